use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::polyalg::{poisson, Polynomial, VarSet, PARAM_SYMBOLS, PHASE_VARS};
use crate::systems::{Family, Observable, ParamValue, Params};

use super::AnalysisError;

/// Parameter regimes with a displayed bracket algebra.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlgebraCase {
    /// Any parameters: `H, X1, X2, X3_1`.
    Generic,
    /// `b_z = 0`: the split integrals appear.
    Bz0,
    /// `b_z = w1 = w2 = 0`: the rotation integral appears as well.
    Bz0W0,
}

impl AlgebraCase {
    pub const ALL: [AlgebraCase; 3] = [AlgebraCase::Generic, AlgebraCase::Bz0, AlgebraCase::Bz0W0];

    pub fn as_str(self) -> &'static str {
        match self {
            AlgebraCase::Generic => "generic",
            AlgebraCase::Bz0 => "bz0",
            AlgebraCase::Bz0W0 => "bz0_w0",
        }
    }

    fn zeroed(self) -> &'static [&'static str] {
        match self {
            AlgebraCase::Generic => &[],
            AlgebraCase::Bz0 => &["b_z"],
            AlgebraCase::Bz0W0 => &["b_z", "w1", "w2"],
        }
    }

    pub fn observables(self) -> &'static [&'static str] {
        match self {
            AlgebraCase::Generic => &["H", "X1", "X2", "X3_1"],
            AlgebraCase::Bz0 => &["H", "X3_1", "X1a", "X1b", "X1c"],
            AlgebraCase::Bz0W0 => &["H", "X3_1", "X3_2", "X1a", "X1b", "X1c"],
        }
    }

    /// Sets the case's vanishing parameters; a nonzero numeric value there
    /// is a contradiction.
    pub fn apply(self, params: &Params) -> Result<Params, AnalysisError> {
        let mut p = params.clone();
        for &name in self.zeroed() {
            let v = p.get_mut(name).expect("known parameter");
            if !v.is_symbolic() && !v.is_zero() {
                return Err(AnalysisError::Usage(format!("case {self} requires {name} = 0, got {v}")));
            }
            *v = ParamValue::int(0);
        }
        Ok(p)
    }

    fn relations(self) -> Vec<Relation> {
        use Lhs::{Bracket as B, Expr as E};
        let mut out = vec![];
        let r = |name: &str, lhs: Lhs, rhs: &'static str| Relation { name: name.to_string(), lhs, rhs };
        match self {
            AlgebraCase::Generic => {
                out.push(r("{H,X1}", B("H", "X1"), "0"));
                out.push(r("{H,X2}", B("H", "X2"), "0"));
                out.push(r("{X1,X2}", B("X1", "X2"), "0"));
                out.push(r("{H,X3_1}", B("H", "X3_1"), "0"));
                out.push(r("X2", E("X2"), "X3_1^2 + S_z1*X3_1"));
            }
            AlgebraCase::Bz0 | AlgebraCase::Bz0W0 => {
                out.push(r("split", E("a*X1a + b*X1b + X1c"), "X1"));
                for f in ["X1a", "X1b", "X1c"] {
                    out.push(r(&format!("{{H,{f}}}"), B("H", f), "0"));
                    out.push(r(&format!("{{X3_1,{f}}}"), B("X3_1", f), "0"));
                }
                out.push(r("{X1a,X1b}", B("X1a", "X1b"), "2*b_phi*(s_z3*X3_1 - X1c)"));
                out.push(r("{X1a,X1c}", B("X1a", "X1c"), "-2*(X3_1 - 2*w3)*X1b + 2*b_phi*w1*w2"));
                out.push(r(
                    "{X1b,X1c}",
                    B("X1b", "X1c"),
                    "(X3_1 - 2*w3)*(X3_1^2 + 2*X1a - 2*H) + b_phi*(w2^2 - w1^2)",
                ));
            }
        }
        if self == AlgebraCase::Bz0W0 {
            out.push(r("{H,X3_2}", B("H", "X3_2"), "0"));
            out.push(r("{X3_1,X3_2}", B("X3_1", "X3_2"), "0"));
            out.push(r("{X3_2,X1a}", B("X3_2", "X1a"), "2*X1b"));
            out.push(r("{X3_2,X1b}", B("X3_2", "X1b"), "-(X3_1^2 - 2*H) - 2*X1a"));
            out.push(r("{X3_2,X1c}", B("X3_2", "X1c"), "0"));
            out.push(r("X1c", E("X1c"), "X3_1*X3_2 - 2*w3*X3_2 + s_z3*X3_1"));
            out.push(r("X1b^2", E("X1b^2"), DEPENDENCE_RHS));
        }
        out
    }
}

/// Right side of the quadratic dependence among the `b_z = w = 0` integrals.
const DEPENDENCE_RHS: &str = "(2*H - X3_1^2 - X1a)*X1a + b_phi*(X3_1 - 2*w3)*X3_2^2";

impl fmt::Display for AlgebraCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AlgebraCase {
    type Err = AnalysisError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AlgebraCase::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| AnalysisError::Usage(format!("unknown case `{s}` (expected generic, bz0 or bz0_w0)")))
    }
}

#[derive(Clone, Copy, Debug)]
enum Lhs {
    Bracket(&'static str, &'static str),
    Expr(&'static str),
}

#[derive(Clone, Debug)]
struct Relation {
    name: String,
    lhs: Lhs,
    rhs: &'static str,
}

/// All pairwise brackets; `entries[i][j] = {F_i, F_j}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AlgebraTable {
    pub names: Vec<String>,
    pub entries: Vec<Vec<Polynomial>>,
}

pub fn algebra_table(obs: &[Observable]) -> Result<AlgebraTable, AnalysisError> {
    let n = obs.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let upper: Vec<Polynomial> = pairs
        .par_iter()
        .map(|&(i, j)| poisson(obs[i].poly(), obs[j].poly()))
        .collect::<Result<_, _>>()?;
    let vars = obs.first().map(|o| o.poly().vars().clone()).unwrap_or_else(VarSet::phase_space);
    let mut entries = vec![vec![Polynomial::zero(&vars); n]; n];
    for ((i, j), p) in pairs.into_iter().zip(upper) {
        entries[j][i] = p.neg();
        entries[i][j] = p;
    }
    Ok(AlgebraTable { names: obs.iter().map(|o| o.name().to_string()).collect(), entries })
}

impl AlgebraTable {
    pub fn get(&self, a: &str, b: &str) -> Option<&Polynomial> {
        let i = self.names.iter().position(|n| n == a)?;
        let j = self.names.iter().position(|n| n == b)?;
        Some(&self.entries[i][j])
    }

    pub fn is_antisymmetric(&self) -> bool {
        let n = self.names.len();
        (0..n).all(|i| {
            self.entries[i][i].is_zero() && (0..n).all(|j| self.entries[i][j].add(&self.entries[j][i]).is_ok_and(|s| s.is_zero()))
        })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RelationCheck {
    pub name: String,
    /// `lhs = rhs` as text over observable and parameter names.
    pub relation: String,
    /// Exact `lhs − rhs`.
    pub residual: Polynomial,
    pub matches_expected: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AlgebraReport {
    pub case: AlgebraCase,
    pub params: Params,
    pub table: AlgebraTable,
    pub relations: Vec<RelationCheck>,
    pub passed: bool,
}

/// Evaluates text over observable and parameter names by parsing it in an
/// enlarged variable set and substituting.
struct Evaluator<'a> {
    ext: Arc<VarSet>,
    target: Arc<VarSet>,
    bindings: HashMap<String, Polynomial>,
    table: &'a AlgebraTable,
}

impl<'a> Evaluator<'a> {
    fn new(family: &Family, obs: &[Observable], table: &'a AlgebraTable) -> Result<Self, AnalysisError> {
        let target = family.vars().clone();
        let mut extra: Vec<String> = target.names()[PHASE_VARS.len()..].to_vec();
        extra.extend(PARAM_SYMBOLS.iter().map(|s| format!("{s}__param")));
        extra.extend(obs.iter().map(|o| o.name().to_string()));
        let ext = VarSet::new(extra)?;
        let k = family.coefficients();
        let mut bindings = HashMap::new();
        let params = [
            ("a", &k.a),
            ("b", &k.b),
            ("b_phi", &k.b_phi),
            ("b_z", &k.b_z),
            ("w1", &k.w1),
            ("w2", &k.w2),
            ("w3", &k.w3),
            ("s_z3", &k.s_z3),
            ("S_z1", &k.big_s_z1),
        ];
        for (name, p) in params {
            bindings.insert(format!("{name}__param"), lift(p, &ext)?);
        }
        for o in obs {
            bindings.insert(o.name().to_string(), lift(o.poly(), &ext)?);
        }
        Ok(Evaluator { ext, target, bindings, table })
    }

    fn eval(&self, text: &str) -> Result<Polynomial, AnalysisError> {
        // Parameter names are rewritten so they cannot collide with the
        // family's own symbols inside the enlarged set.
        let mut t = format!(" {text} ");
        for s in PARAM_SYMBOLS {
            t = replace_word(&t, s, &format!("{s}__param"));
        }
        let p = Polynomial::parse(&self.ext, &t)?;
        Ok(p.substitute(&self.bindings)?.restrict(&self.target)?)
    }

    fn lhs(&self, lhs: Lhs) -> Result<Polynomial, AnalysisError> {
        match lhs {
            Lhs::Bracket(a, b) => self
                .table
                .get(a, b)
                .cloned()
                .ok_or_else(|| AnalysisError::Usage(format!("bracket {{{a},{b}}} not in table"))),
            Lhs::Expr(e) => self.eval(e),
        }
    }
}

fn lift(p: &Polynomial, ext: &Arc<VarSet>) -> Result<Polynomial, AnalysisError> {
    Ok(p.restrict(ext)?)
}

fn replace_word(text: &str, word: &str, with: &str) -> String {
    let is_ident = |c: char| c.is_ascii_alphanumeric() || c == '_';
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    while let Some(pos) = rest.find(word) {
        let before = rest[..pos].chars().next_back();
        let after = rest[pos + word.len()..].chars().next();
        out.push_str(&rest[..pos]);
        if before.is_some_and(is_ident) || after.is_some_and(is_ident) {
            out.push_str(word);
        } else {
            out.push_str(with);
        }
        rest = &rest[pos + word.len()..];
    }
    out.push_str(rest);
    out
}

/// Brackets of the case's observables and exact residuals of every
/// displayed relation. Parameters may be symbolic.
pub fn algebra_report(case: AlgebraCase, params: &Params) -> Result<AlgebraReport, AnalysisError> {
    let params = case.apply(params)?;
    let family = Family::new(&params)?;
    let mut obs: Vec<Observable> = Vec::new();
    for name in case.observables() {
        obs.push(family.observable(name)?);
    }
    let table = algebra_table(&obs)?;
    // X1 enters the split relation without being a table member.
    let mut named = obs.clone();
    if case != AlgebraCase::Generic {
        named.push(family.x1()?);
    }
    let ev = Evaluator::new(&family, &named, &table)?;
    let relations: Vec<RelationCheck> = case
        .relations()
        .par_iter()
        .map(|r| {
            let residual = ev.lhs(r.lhs)?.sub(&ev.eval(r.rhs)?)?;
            let lhs_text = match r.lhs {
                Lhs::Bracket(a, b) => format!("{{{a},{b}}}"),
                Lhs::Expr(e) => e.to_string(),
            };
            Ok(RelationCheck {
                name: r.name.clone(),
                relation: format!("{lhs_text} = {}", r.rhs),
                matches_expected: residual.is_zero(),
                residual,
            })
        })
        .collect::<Result<_, AnalysisError>>()?;
    Ok(AlgebraReport {
        case,
        passed: relations.iter().all(|r| r.matches_expected) && table.is_antisymmetric(),
        params,
        table,
        relations,
    })
}

/// Exact residual of `(X1b)² = (2H − (X3_1)² − X1a)X1a + b_φ(X3_1 − 2w3)(X3_2)²`.
pub fn verify_dependence_identity(params: &Params) -> Result<Polynomial, AnalysisError> {
    let params = AlgebraCase::Bz0W0.apply(params)?;
    let family = Family::new(&params)?;
    let mut obs: Vec<Observable> = Vec::new();
    for name in ["H", "X3_1", "X3_2", "X1a", "X1b"] {
        obs.push(family.observable(name)?);
    }
    let empty = AlgebraTable { names: vec![], entries: vec![] };
    let ev = Evaluator::new(&family, &obs, &empty)?;
    Ok(ev.eval("X1b^2")?.sub(&ev.eval(DEPENDENCE_RHS)?)?)
}
