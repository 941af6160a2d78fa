use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::{Monomial, PolyError, Polynomial, Rational, VarSet};

/// Serialized polynomial. Integers are decimal strings so arbitrary
/// precision survives every JSON implementation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyJson {
    pub vars: Vec<String>,
    pub terms: Vec<TermJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermJson {
    pub exp: Vec<u8>,
    pub num: String,
    pub den: String,
}

impl From<&Polynomial> for PolyJson {
    /// Terms are written in descending graded-lex order.
    fn from(p: &Polynomial) -> Self {
        PolyJson {
            vars: p.vars().names().to_vec(),
            terms: p
                .terms()
                .rev()
                .map(|(m, c)| TermJson {
                    exp: m.exponents().to_vec(),
                    num: c.numer().to_string(),
                    den: c.denom().to_string(),
                })
                .collect(),
        }
    }
}

impl PolyJson {
    pub fn to_polynomial(&self) -> Result<Polynomial, PolyError> {
        let vars = VarSet::from_names(self.vars.clone())?;
        let parse = |s: &str| {
            s.parse::<BigInt>()
                .map_err(|_| PolyError::Parse(format!("bad integer `{s}`")))
        };
        let mut terms = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            let den = parse(&t.den)?;
            if den == BigInt::from(0) {
                return Err(PolyError::Parse("zero denominator".into()));
            }
            terms.push((
                Monomial::from_exponents(t.exp.clone()),
                Rational::new(parse(&t.num)?, den),
            ));
        }
        Polynomial::from_terms(&vars, terms)
    }
}

impl Serialize for Polynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PolyJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        PolyJson::deserialize(d)?
            .to_polynomial()
            .map_err(serde::de::Error::custom)
    }
}
