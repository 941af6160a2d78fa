use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;
use rand::Rng;
use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::polyalg::{format_rational, parse_rational, Polynomial, Rational, VarSet};

/// A parameter bound to a rational value or left as its symbol.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParamValue {
    Value(Rational),
    Symbolic,
}

impl ParamValue {
    pub fn int(n: i64) -> Self {
        ParamValue::Value(Rational::from_integer(BigInt::from(n)))
    }

    pub fn frac(n: i64, d: i64) -> Self {
        ParamValue::Value(Rational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn value(&self) -> Option<&Rational> {
        match self {
            ParamValue::Value(q) => Some(q),
            ParamValue::Symbolic => None,
        }
    }

    pub fn is_symbolic(&self) -> bool {
        matches!(self, ParamValue::Symbolic)
    }

    /// True only for a bound zero; a symbol is never known to vanish.
    pub fn is_zero(&self) -> bool {
        self.value().is_some_and(Zero::is_zero)
    }
}

impl Default for ParamValue {
    fn default() -> Self {
        ParamValue::int(0)
    }
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::Value(q) => f.write_str(&format_rational(q)),
            ParamValue::Symbolic => f.write_str("sym"),
        }
    }
}

impl Serialize for ParamValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ParamValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(n) => Ok(ParamValue::int(n)),
            Raw::Text(t) if t.trim() == "sym" => Ok(ParamValue::Symbolic),
            Raw::Text(t) => parse_rational(&t)
                .map(ParamValue::Value)
                .ok_or_else(|| de::Error::custom(format!("`{t}` is neither a rational nor \"sym\""))),
        }
    }
}

/// Family parameters and the two free constants of the integrals.
///
/// JSON field names match the polynomial symbol names. `s_z3` and `S_z1`
/// default to zero; the seven family parameters are required.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub a: ParamValue,
    pub b: ParamValue,
    pub b_phi: ParamValue,
    pub b_z: ParamValue,
    pub w1: ParamValue,
    pub w2: ParamValue,
    pub w3: ParamValue,
    #[serde(default)]
    pub s_z3: ParamValue,
    #[serde(default, rename = "S_z1")]
    pub big_s_z1: ParamValue,
}

impl Params {
    /// Every parameter zero: the free particle.
    pub fn zero() -> Self {
        Self::all(ParamValue::int(0))
    }

    /// Every parameter symbolic.
    pub fn symbolic() -> Self {
        Self::all(ParamValue::Symbolic)
    }

    fn all(v: ParamValue) -> Self {
        Params {
            a: v.clone(),
            b: v.clone(),
            b_phi: v.clone(),
            b_z: v.clone(),
            w1: v.clone(),
            w2: v.clone(),
            w3: v.clone(),
            s_z3: v.clone(),
            big_s_z1: v,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Entries in symbol order, keyed by polynomial symbol name.
    pub fn entries(&self) -> [(&'static str, &ParamValue); 9] {
        [
            ("a", &self.a),
            ("b", &self.b),
            ("b_phi", &self.b_phi),
            ("b_z", &self.b_z),
            ("w1", &self.w1),
            ("w2", &self.w2),
            ("w3", &self.w3),
            ("s_z3", &self.s_z3),
            ("S_z1", &self.big_s_z1),
        ]
    }

    pub fn get_mut(&mut self, name: &str) -> Option<&mut ParamValue> {
        Some(match name {
            "a" => &mut self.a,
            "b" => &mut self.b,
            "b_phi" => &mut self.b_phi,
            "b_z" => &mut self.b_z,
            "w1" => &mut self.w1,
            "w2" => &mut self.w2,
            "w3" => &mut self.w3,
            "s_z3" => &mut self.s_z3,
            "S_z1" => &mut self.big_s_z1,
            _ => return None,
        })
    }

    /// Copy with one parameter replaced; panics on an unknown name.
    pub fn with(mut self, name: &str, v: ParamValue) -> Self {
        *self.get_mut(name).unwrap_or_else(|| panic!("unknown parameter `{name}`")) = v;
        self
    }

    pub fn is_numeric(&self) -> bool {
        self.entries().iter().all(|(_, v)| !v.is_symbolic())
    }

    /// The smallest standard variable set able to hold these parameters.
    pub fn var_set(&self) -> Arc<VarSet> {
        if self.is_numeric() {
            VarSet::phase_space()
        } else {
            VarSet::with_parameters()
        }
    }

    /// Bound values only, keyed by symbol name.
    pub fn values(&self) -> BTreeMap<String, Rational> {
        self.entries()
            .iter()
            .filter_map(|(k, v)| v.value().map(|q| (k.to_string(), q.clone())))
            .collect()
    }

    /// Each parameter as a polynomial over `vars`.
    pub fn polynomial(&self, name: &str, vars: &Arc<VarSet>) -> Polynomial {
        let v = self
            .entries()
            .into_iter()
            .find(|(k, _)| *k == name)
            .unwrap_or_else(|| panic!("unknown parameter `{name}`"))
            .1;
        match v {
            ParamValue::Value(q) => Polynomial::constant(vars, q.clone()),
            ParamValue::Symbolic => Polynomial::var(vars, name)
                .expect("symbolic parameters require a variable set containing them"),
        }
    }

    /// Random family parameters, every one nonzero with denominator at most
    /// `max_den` and absolute value at most 2. The integral constants are
    /// also drawn nonzero so that no term of any integral degenerates.
    pub fn random_generic<R: Rng>(rng: &mut R, max_den: i64) -> Self {
        let mut draw = || loop {
            let d = rng.random_range(1..=max_den);
            let n = rng.random_range(-2 * d..=2 * d);
            if n != 0 {
                return ParamValue::frac(n, d);
            }
        };
        Params {
            a: draw(),
            b: draw(),
            b_phi: draw(),
            b_z: draw(),
            w1: draw(),
            w2: draw(),
            w3: draw(),
            s_z3: draw(),
            big_s_z1: draw(),
        }
    }
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.entries().iter().map(|(k, v)| format!("{k}={v}")).collect();
        f.write_str(&parts.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn parses_documented_format() {
        let p = Params::from_json(
            r#"{"a":"1/2","b":"0","b_phi":"3","b_z":"2","w1":"1","w2":"0","w3":"1/4","s_z3":"0","S_z1":"sym"}"#,
        )
        .unwrap();
        assert_eq!(p.a, ParamValue::frac(1, 2));
        assert_eq!(p.w3, ParamValue::frac(1, 4));
        assert!(p.big_s_z1.is_symbolic());
        assert!(!p.is_numeric());
        let text = serde_json::to_string(&p).unwrap();
        assert_eq!(Params::from_json(&text).unwrap(), p);
    }

    #[test]
    fn integral_constants_default_to_zero() {
        let p = Params::from_json(r#"{"a":1,"b":"0","b_phi":"3","b_z":"2","w1":"1","w2":"0","w3":"1/4"}"#)
            .unwrap();
        assert!(p.s_z3.is_zero() && p.big_s_z1.is_zero());
        assert!(p.is_numeric());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Params::from_json(r#"{"a":"1"}"#).is_err());
        let base = r#""a":"1","b":"0","b_phi":"3","b_z":"2","w1":"1","w2":"0","w3":"1""#;
        assert!(Params::from_json(&format!("{{{base},\"q\":\"1\"}}")).is_err());
        assert!(Params::from_json(&format!("{{{base},\"s_z3\":\"1/0\"}}")).is_err());
        assert!(Params::from_json(&format!("{{{base},\"s_z3\":\"x\"}}")).is_err());
    }

    #[test]
    fn random_draws_are_nonzero_and_bounded() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let p = Params::random_generic(&mut rng, 10);
            for (_, v) in p.entries() {
                let q = v.value().unwrap();
                assert!(!q.is_zero());
                assert!(q.denom() <= &BigInt::from(10));
                assert!(num_traits::Signed::abs(q) <= Rational::from_integer(BigInt::from(2)));
            }
        }
    }
}
