//! Exact sparse multivariate polynomials over big rationals.
//!
//! Every polynomial belongs to a [`VarSet`] whose first six variables are
//! the canonical phase-space coordinates `x, y, z, p1, p2, p3`; remaining
//! variables are parameter symbols, treated as constants by [`poisson`].
//! Coefficients are [`Rational`] and zero coefficients are never stored,
//! so structural equality is mathematical equality.

mod compiled;
mod json;
mod monomial;
mod parse;
mod poly;
mod vars;

pub use compiled::CompiledPoly;
pub use json::{PolyJson, TermJson};
pub use monomial::Monomial;
pub use poly::{poisson, rational_to_f64, Polynomial};
pub use vars::{VarSet, PARAM_SYMBOLS, PHASE_VARS};

pub type Rational = num_rational::BigRational;

/// Largest total degree any operation may produce.
pub const MAX_DEGREE: u32 = 24;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolyError {
    #[error("operands belong to different variable sets")]
    VarSetMismatch,
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("variable `{0}` is not bound")]
    Unbound(String),
    #[error("result degree {degree} exceeds the limit of {limit}")]
    DegreeLimit { degree: u32, limit: u32 },
    #[error("invalid variable set: {0}")]
    InvalidVarSet(String),
    #[error("cannot express polynomial without variable `{0}`")]
    NotRepresentable(String),
    #[error("parse error: {0}")]
    Parse(String),
}

/// Parses `"p/q"` or `"p"` into a reduced rational.
pub fn parse_rational(s: &str) -> Option<Rational> {
    use num_bigint::BigInt;
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().ok()?;
    let d: BigInt = d.parse().ok()?;
    if d == BigInt::from(0) {
        return None;
    }
    Some(Rational::new(n, d))
}

/// `p/q` or `p` for integers, the inverse of [`parse_rational`].
pub fn format_rational(q: &Rational) -> String {
    if q.denom() == &num_bigint::BigInt::from(1) {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}
