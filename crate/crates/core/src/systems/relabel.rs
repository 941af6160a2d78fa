//! Integration constants of the reduced cylindrical solution and their
//! relabeling into the family parameters:
//! `b_φ = S_Z4`, `b_z = −(S_Z4·a + s_Z1)`, `w1 = −s_r1`, `w2 = s_r2`,
//! `w3 = −½s_φ1`, `s_z3 = s_Z3`, `S_z1 = S_Z1`.

use std::sync::Arc;

use crate::polyalg::{Polynomial, Rational, VarSet};

use super::family::ParamPolys;
use super::SystemsError;

/// Symbols of [`RawReduced::symbolic`], after the phase-space variables.
pub const RAW_SYMBOLS: [&str; 9] = ["a", "b", "S_Z4", "s_Z1", "s_r1", "s_r2", "s_phi1", "s_Z3", "S_Z1"];

#[derive(Clone, Debug)]
pub struct RawReduced {
    pub a: Polynomial,
    pub b: Polynomial,
    pub s_z4: Polynomial,
    pub s_z1: Polynomial,
    pub s_r1: Polynomial,
    pub s_r2: Polynomial,
    pub s_phi1: Polynomial,
    pub s_z3: Polynomial,
    pub big_s_z1: Polynomial,
}

impl RawReduced {
    /// Every constant as its own symbol.
    pub fn symbolic() -> Result<(Arc<VarSet>, Self), SystemsError> {
        let vars = VarSet::new(RAW_SYMBOLS)?;
        let v = |n: &str| Polynomial::var(&vars, n);
        let raw = RawReduced {
            a: v("a")?,
            b: v("b")?,
            s_z4: v("S_Z4")?,
            s_z1: v("s_Z1")?,
            s_r1: v("s_r1")?,
            s_r2: v("s_r2")?,
            s_phi1: v("s_phi1")?,
            s_z3: v("s_Z3")?,
            big_s_z1: v("S_Z1")?,
        };
        Ok((vars, raw))
    }

    /// Copy with `a = b = 0`, the branch without the quadratic leading terms.
    pub fn axial(&self) -> Self {
        let zero = Polynomial::zero(self.a.vars());
        RawReduced {
            a: zero.clone(),
            b: zero,
            ..self.clone()
        }
    }

    pub fn to_params(&self) -> Result<ParamPolys, SystemsError> {
        let half = Rational::new((-1).into(), 2.into());
        Ok(ParamPolys {
            a: self.a.clone(),
            b: self.b.clone(),
            b_phi: self.s_z4.clone(),
            b_z: self.s_z4.mul(&self.a)?.add(&self.s_z1)?.neg(),
            w1: self.s_r1.neg(),
            w2: self.s_r2.clone(),
            w3: self.s_phi1.scale(&half),
            s_z3: self.s_z3.clone(),
            big_s_z1: self.big_s_z1.clone(),
        })
    }

    /// Cartesian field of the `a = b = 0` branch: cylindrical components
    /// `(0, S_Z4 r, −s_Z1 r)` become `(−S_Z4 y, S_Z4 x, −s_Z1)`.
    pub fn axial_field(&self) -> Result<[Polynomial; 3], SystemsError> {
        let vars = self.a.vars();
        let (x, y) = (Polynomial::var_at(vars, 0), Polynomial::var_at(vars, 1));
        Ok([self.s_z4.mul(&y)?.neg(), self.s_z4.mul(&x)?, self.s_z1.neg()])
    }

    /// Potential of the `a = b = 0` branch written directly from its
    /// cylindrical form, `−⅛S_Z4²r⁴ − ½S_Z4 s_φ1 r² + S_Z4 s_r2 r sinφ − S_Z4 s_r1 r cosφ`.
    pub fn axial_potential(&self) -> Result<Polynomial, SystemsError> {
        let vars = self.a.vars();
        let r2 = Polynomial::parse(vars, "x^2+y^2")?;
        let (x, y) = (Polynomial::var_at(vars, 0), Polynomial::var_at(vars, 1));
        let s = &self.s_z4;
        let q = |n: i64, d: i64| Rational::new(n.into(), d.into());
        Ok(s.pow(2)?
            .mul(&r2.pow(2)?)?
            .scale(&q(-1, 8))
            .sub(&s.mul(&self.s_phi1)?.mul(&r2)?.scale(&q(1, 2)))?
            .add(&s.mul(&self.s_r2)?.mul(&y)?)?
            .sub(&s.mul(&self.s_r1)?.mul(&x)?)?)
    }
}
