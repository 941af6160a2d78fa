use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::polyalg::rational_to_f64;
use crate::systems::Params;

use super::{Coef, CoefficientField, CylPoint, DetError};

/// Integration constants of the general solution of the second-order
/// equations.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RawConstants {
    pub s_r1: f64,
    pub s_r2: f64,
    pub s_phi1: f64,
    pub s_z1: f64,
    pub s_z2: f64,
    pub s_z3: f64,
    pub big_s_r1: f64,
    pub big_s_r2: f64,
    pub big_s_z1: f64,
    pub big_s_z2: f64,
    pub big_s_z3: f64,
    pub big_s_z4: f64,
}

impl RawConstants {
    /// Names of the five constants that must vanish for the lower-order
    /// equations to be solvable, in report order.
    pub const CONSTRAINED: [&'static str; 5] = ["S_Z2", "S_Z3", "S_r1", "S_r2", "s_Z2"];

    /// Every constant uniform in `[-range, range]`.
    pub fn random<R: Rng>(rng: &mut R, range: f64) -> Self {
        let mut g = || rng.random_range(-range..=range);
        RawConstants {
            s_r1: g(),
            s_r2: g(),
            s_phi1: g(),
            s_z1: g(),
            s_z2: g(),
            s_z3: g(),
            big_s_r1: g(),
            big_s_r2: g(),
            big_s_z1: g(),
            big_s_z2: g(),
            big_s_z3: g(),
            big_s_z4: g(),
        }
    }

    /// Copy with the five constrained constants set to zero.
    pub fn constrained(self) -> Self {
        RawConstants {
            big_s_z2: 0.0,
            big_s_z3: 0.0,
            big_s_r1: 0.0,
            big_s_r2: 0.0,
            s_z2: 0.0,
            ..self
        }
    }

    pub fn constrained_mut(&mut self, name: &str) -> Option<&mut f64> {
        Some(match name {
            "S_Z2" => &mut self.big_s_z2,
            "S_Z3" => &mut self.big_s_z3,
            "S_r1" => &mut self.big_s_r1,
            "S_r2" => &mut self.big_s_r2,
            "s_Z2" => &mut self.s_z2,
            _ => return None,
        })
    }

    pub fn satisfies_constraints(&self) -> bool {
        [self.big_s_z2, self.big_s_z3, self.big_s_r1, self.big_s_r2, self.s_z2]
            .iter()
            .all(|&v| v == 0.0)
    }
}

/// The general solution of all second-order equations for arbitrary
/// integration constants. No momentum-free parts exist before the
/// constraints are imposed; `W` is the family potential written in the raw
/// constants, which the compatibility scan uses as its trial potential.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct General {
    pub a: f64,
    pub b: f64,
    pub raw: RawConstants,
}

impl General {
    fn s_tilde(&self) -> f64 {
        -(self.raw.big_s_z4 * self.a + self.raw.s_z1)
    }
}

impl CoefficientField for General {
    fn ab(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    fn value(&self, coef: Coef, pt: &CylPoint) -> Option<f64> {
        let (a, b) = (self.a, self.b);
        let k = &self.raw;
        let (r, z) = (pt.r, pt.z);
        let (s, c) = pt.phi.sin_cos();
        let (sz2, sz3, sz4) = (k.big_s_z2, k.big_s_z3, k.big_s_z4);
        let (r2, r3, r4, r5, r6) = (r * r, r.powi(3), r.powi(4), r.powi(5), r.powi(6));
        let g = sz4 * a + k.s_z1;
        let (a2, b2) = (a * a, b * b);
        Some(match coef {
            Coef::SR => {
                let q = 9.0 * sz2 * r5 + 5.0 * sz3 * r3;
                -16.0 / 15.0 * q * a * b * c.powi(4)
                    + 8.0 / 15.0 * (a2 - b2) * q * c.powi(3) * s
                    + (144.0 * sz2 * a * b * r5 + 10.0 * b * (10.0 * sz3 * a + k.s_z2) * r3
                        + 30.0 * b * g * r)
                        / 15.0
                        * c * c
                    - (36.0 * sz2 * (a2 - b2) * r5
                        + 10.0 * (4.0 * sz3 * a2 - 2.0 * sz3 * b2 + k.s_z2 * a) * r3
                        + 30.0 * g * a * r)
                        / 15.0
                        * c
                        * s
                    + 0.5 * (2.0 * k.s_r2 + k.big_s_r1 * z) * c
                    + 0.5 * (2.0 * k.s_r1 - k.big_s_r2 * z) * s
                    - 1.2 * sz2 * a * b * r5
                    - (k.s_z2 + 4.0 * sz3 * a) * b * r3 / 3.0
                    - g * b * r
            }
            Coef::SPhi => {
                (108.0 * sz2 * r2 + 40.0 * sz3) * (a2 - b2) * r2 / 15.0 * c.powi(4)
                    + (216.0 * sz2 * r4 + 80.0 * sz3 * r2) * a * b / 15.0 * c.powi(3) * s
                    + (108.0 * sz2 * (b2 - a2) * r4
                        - 20.0 * (k.s_z2 * a + 4.0 * sz3 * a2 - 2.0 * sz3 * b2) * r2
                        - 30.0 * sz4 * a2
                        - 30.0 * k.s_z1 * a)
                        / 15.0
                        * c
                        * c
                    - (108.0 * sz2 * a * r4 + 20.0 * (4.0 * sz3 * a + k.s_z2) * r2 + 30.0 * g)
                        / 15.0
                        * b
                        * c
                        * s
                    + (2.0 * k.s_r1 - k.big_s_r2 * z) * c / (2.0 * r)
                    - (2.0 * k.s_r2 + k.big_s_r1 * z) * s / (2.0 * r)
                    + sz2 * r6 / 2.0
                    + ((24.0 * a2 + 6.0 * b2) * sz2 + 5.0 * sz3) * r4 / 10.0
                    + ((16.0 * a2 + 4.0 * b2) * sz3 + 4.0 * k.s_z2 * a + 3.0 * sz4) * r2 / 6.0
                    + g * a
                    + k.s_phi1
            }
            Coef::SZ => {
                -(3.0 * sz2 * r6 + 2.0 * sz3 * r4 + sz4 * r2) * (a * c + b * s) * c
                    - k.big_s_r1 * r * c / 2.0
                    + k.big_s_r2 * r * s / 2.0
                    + sz2 * a * r6
                    + (4.0 * sz3 * a + k.s_z2) * r4 / 4.0
                    + g * r2 / 2.0
                    + k.s_z3
            }
            Coef::BigSR => k.big_s_r1 * s + k.big_s_r2 * c,
            Coef::BigSPhi => (k.big_s_r1 * c - k.big_s_r2 * s) / r,
            Coef::BigSZ => sz2 * r6 + sz3 * r4 + sz4 * r2 + k.big_s_z1,
            Coef::BR => 0.0,
            Coef::BPhi => 3.0 * sz2 * r5 + 2.0 * sz3 * r3 + sz4 * r,
            Coef::BZ => {
                let q = 4.0 * (3.0 * sz2 * r2 + sz3) * r3;
                q * a * c * c + q * b * c * s - 6.0 * sz2 * a * r5 - (4.0 * sz3 * a + k.s_z2) * r3 - g * r
            }
            Coef::W => {
                let st = self.s_tilde();
                -sz4 * sz4 * r4 / 8.0 + sz4 * (st * a - k.s_phi1) * r2 / 2.0
                    - sz4 * st * a * r2 * c * c
                    - sz4 * st * b * r2 * s * c
                    - sz4 * k.s_r1 * r * c
                    + sz4 * k.s_r2 * r * s
            }
            Coef::M | Coef::BigM => return None,
        })
    }

    fn gradient(&self, coef: Coef, pt: &CylPoint) -> Option<[f64; 3]> {
        if coef != Coef::W {
            let f = |p: &CylPoint| self.value(coef, p).unwrap_or(f64::NAN);
            self.value(coef, pt)?;
            return Some(super::fd_gradient(&f, pt));
        }
        let (a, b, k) = (self.a, self.b, &self.raw);
        let (r, (s, c)) = (pt.r, pt.phi.sin_cos());
        let (sz4, st) = (k.big_s_z4, self.s_tilde());
        let dr = -0.5 * sz4 * sz4 * r.powi(3) + sz4 * (st * a - k.s_phi1) * r
            - 2.0 * sz4 * st * a * r * c * c
            - 2.0 * sz4 * st * b * r * s * c
            - sz4 * k.s_r1 * c
            + sz4 * k.s_r2 * s;
        let dphi = 2.0 * sz4 * st * a * r * r * c * s - sz4 * st * b * r * r * (c * c - s * s)
            + sz4 * k.s_r1 * r * s
            + sz4 * k.s_r2 * r * c;
        Some([dr, dphi, 0.0])
    }
}

/// The constrained solution in the family parameters, including the
/// momentum-free parts of both integrals.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Reduced {
    pub a: f64,
    pub b: f64,
    pub b_phi: f64,
    pub b_z: f64,
    pub w1: f64,
    pub w2: f64,
    pub w3: f64,
    pub s_z3: f64,
    pub big_s_z1: f64,
}

impl Reduced {
    pub fn from_params(p: &Params) -> Result<Self, DetError> {
        let get = |name: &str, v: &crate::systems::ParamValue| {
            v.value()
                .map(rational_to_f64)
                .ok_or_else(|| DetError::Symbolic(name.to_string()))
        };
        Ok(Reduced {
            a: get("a", &p.a)?,
            b: get("b", &p.b)?,
            b_phi: get("b_phi", &p.b_phi)?,
            b_z: get("b_z", &p.b_z)?,
            w1: get("w1", &p.w1)?,
            w2: get("w2", &p.w2)?,
            w3: get("w3", &p.w3)?,
            s_z3: get("s_z3", &p.s_z3)?,
            big_s_z1: get("S_z1", &p.big_s_z1)?,
        })
    }

    /// The same system as a point of the general solution:
    /// `S_Z4 = b_φ`, `s_Z1 = −b_z − b_φ a`, `s_r1 = −w1`, `s_r2 = w2`,
    /// `s_φ1 = −2w3`, constrained constants zero.
    pub fn to_general(&self) -> General {
        General {
            a: self.a,
            b: self.b,
            raw: RawConstants {
                s_r1: -self.w1,
                s_r2: self.w2,
                s_phi1: -2.0 * self.w3,
                s_z1: -self.b_z - self.b_phi * self.a,
                s_z3: self.s_z3,
                big_s_z1: self.big_s_z1,
                big_s_z4: self.b_phi,
                ..RawConstants::default()
            },
        }
    }
}

impl CoefficientField for Reduced {
    fn ab(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    fn value(&self, coef: Coef, pt: &CylPoint) -> Option<f64> {
        let Reduced { a, b, b_phi: bf, b_z: bz, w1, w2, w3, s_z3, big_s_z1 } = *self;
        let r = pt.r;
        let (s, c) = pt.phi.sin_cos();
        let r2 = r * r;
        Some(match coef {
            Coef::SR => -2.0 * bz * b * r * c * c + 2.0 * bz * a * r * c * s + w2 * c - w1 * s + bz * b * r,
            Coef::SPhi => {
                2.0 * a * bz * c * c + 2.0 * b * bz * c * s - (w1 * c + w2 * s) / r + 0.5 * bf * r2
                    - bz * a
                    - 2.0 * w3
            }
            Coef::SZ => -bf * a * r2 * c * c - bf * b * r2 * s * c - 0.5 * bz * r2 + s_z3,
            Coef::BigSR | Coef::BigSPhi | Coef::BR => 0.0,
            Coef::BigSZ => bf * r2 + big_s_z1,
            Coef::BPhi => bf * r,
            Coef::BZ => bz * r,
            Coef::W => {
                let (s2, c2) = (2.0 * pt.phi).sin_cos();
                bf * (-bf * r2 * r2 / 8.0 + w3 * r2 - 0.5 * bz * (a * c2 + b * s2) * r2 + w2 * r * s + w1 * r * c)
            }
            Coef::M => {
                let q = bf * bf * r2 + 2.0 * bz * bz - 4.0 * bf * w3 + 2.0 * bf * bz * a;
                -0.5 * q * a * r2 * c * c - 0.5 * q * b * r2 * c * s
                    + (2.0 * bf * w1 * a + bf * w2 * b + w1 * bz) * r * c
                    + (bf * w1 * b + w2 * bz) * r * s
                    - 0.25 * (bf * bz * r2 * r2 + 2.0 * (bf * bz * b * b - bz * bz * a - bf * s_z3 - 2.0 * w3 * bz) * r2)
            }
            Coef::BigM => 0.25 * bf * bf * r2 * r2 + 0.5 * bf * big_s_z1 * r2,
        })
    }

    fn gradient(&self, coef: Coef, pt: &CylPoint) -> Option<[f64; 3]> {
        if coef != Coef::W {
            let f = |p: &CylPoint| self.value(coef, p).unwrap_or(f64::NAN);
            return Some(super::fd_gradient(&f, pt));
        }
        let Reduced { a, b, b_phi: bf, b_z: bz, w1, w2, w3, .. } = *self;
        let r = pt.r;
        let (s, c) = pt.phi.sin_cos();
        let (s2, c2) = (2.0 * pt.phi).sin_cos();
        let dr = bf * (-0.5 * bf * r.powi(3) + 2.0 * w3 * r - bz * (a * c2 + b * s2) * r + w2 * s + w1 * c);
        let dphi = bf * (bz * (a * s2 - b * c2) * r * r + w2 * r * c - w1 * r * s);
        Some([dr, dphi, 0.0])
    }
}

/// A field with `scale · delta(pt)` added to one coefficient.
#[derive(Clone)]
pub struct Perturbed<F> {
    pub inner: F,
    pub coef: Coef,
    pub scale: f64,
    pub delta: Arc<dyn Fn(&CylPoint) -> f64 + Send + Sync>,
}

impl<F: CoefficientField> Perturbed<F> {
    pub fn new(inner: F, coef: Coef, scale: f64, delta: impl Fn(&CylPoint) -> f64 + Send + Sync + 'static) -> Self {
        Perturbed { inner, coef, scale, delta: Arc::new(delta) }
    }
}

impl<F: CoefficientField> CoefficientField for Perturbed<F> {
    fn ab(&self) -> (f64, f64) {
        self.inner.ab()
    }

    fn value(&self, c: Coef, pt: &CylPoint) -> Option<f64> {
        let v = self.inner.value(c, pt)?;
        Some(if c == self.coef { v + self.scale * (self.delta)(pt) } else { v })
    }

    fn gradient(&self, c: Coef, pt: &CylPoint) -> Option<[f64; 3]> {
        if c == self.coef {
            self.value(c, pt)?;
            let f = |p: &CylPoint| self.value(c, p).unwrap_or(f64::NAN);
            Some(super::fd_gradient(&f, pt))
        } else {
            self.inner.gradient(c, pt)
        }
    }
}
