//! Numerical verification of the cylindrical determining equations.
//!
//! A [`CoefficientField`] supplies the closed-form coefficient functions of
//! the two integrals, the magnetic field and, when known, the potentials.
//! Residual operators evaluate each equation at a point, taking every
//! derivative by finite differences so no closed form is differentiated by
//! hand. Cylindrical field components follow the 2-form convention, so the
//! family's field is `(B_r, B_φ, B_Z) = (0, b_φ r, b_z r)`.

mod equations;
mod scan;
mod structures;

use serde::{Deserialize, Serialize};

pub use equations::{
    residual_bracket_second, residual_first_order, residual_x1_second, residual_x2_second,
    residual_zeroth, Integral,
};
pub use scan::{
    compatibility_scan, sample_points, scan_general, scan_reduced, CompatReport, EquationMax,
    ScanReport, COMPAT_TOL,
};
pub use structures::{General, Perturbed, RawConstants, Reduced};

#[derive(Debug, thiserror::Error)]
pub enum DetError {
    #[error("coefficient {0:?} has no closed form for this structure")]
    Unavailable(Coef),
    #[error("parameters must be numeric: {0}")]
    Symbolic(String),
}

/// `(r, φ, Z)` with `r > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CylPoint {
    pub r: f64,
    pub phi: f64,
    pub z: f64,
}

impl CylPoint {
    pub fn new(r: f64, phi: f64, z: f64) -> Self {
        CylPoint { r, phi, z }
    }

    fn shifted(&self, axis: usize, d: f64) -> Self {
        let mut p = *self;
        match axis {
            0 => p.r += d,
            1 => p.phi += d,
            _ => p.z += d,
        }
        p
    }
}

/// Names of the coefficient functions. `SmallS*` belong to `X1`, `BigS*`
/// to `X2`; `M` is the momentum-free part of `X1`, `BigM` that of `X2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Coef {
    SR,
    SPhi,
    SZ,
    BigSR,
    BigSPhi,
    BigSZ,
    BR,
    BPhi,
    BZ,
    W,
    M,
    BigM,
}

impl Coef {
    pub const ALL: [Coef; 12] = [
        Coef::SR,
        Coef::SPhi,
        Coef::SZ,
        Coef::BigSR,
        Coef::BigSPhi,
        Coef::BigSZ,
        Coef::BR,
        Coef::BPhi,
        Coef::BZ,
        Coef::W,
        Coef::M,
        Coef::BigM,
    ];
}

/// Closed-form coefficient functions of a candidate system.
pub trait CoefficientField: Sync {
    /// Leading-structure parameters of `X1`.
    fn ab(&self) -> (f64, f64);

    /// Value of `c` at `pt`, or `None` if this structure has no closed form for it.
    fn value(&self, c: Coef, pt: &CylPoint) -> Option<f64>;

    /// `(∂_r, ∂_φ, ∂_Z)` of `c`; finite differences unless overridden.
    fn gradient(&self, c: Coef, pt: &CylPoint) -> Option<[f64; 3]> {
        self.value(c, pt)?;
        Some(fd_gradient(&|p: &CylPoint| self.value(c, p).unwrap_or(f64::NAN), pt))
    }
}

/// Base step of the central differences.
pub const FD_STEP: f64 = 1e-3;

/// Fourth-order central difference at step `h` followed by one Richardson
/// level, so the truncation error is sixth order.
pub fn fd_derivative(f: &dyn Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    let d = |h: f64| (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h);
    (16.0 * d(h / 2.0) - d(h)) / 15.0
}

pub fn fd_partial(f: &dyn Fn(&CylPoint) -> f64, pt: &CylPoint, axis: usize, h: f64) -> f64 {
    fd_derivative(&|t| f(&pt.shifted(axis, t)), 0.0, h)
}

pub fn fd_gradient(f: &dyn Fn(&CylPoint) -> f64, pt: &CylPoint) -> [f64; 3] {
    std::array::from_fn(|axis| fd_partial(f, pt, axis, FD_STEP))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fd_is_accurate_on_smooth_functions() {
        let d = fd_derivative(&|x: f64| x.sin() * x.exp(), 0.7, FD_STEP);
        let exact = 0.7f64.exp() * (0.7f64.sin() + 0.7f64.cos());
        assert!((d - exact).abs() < 1e-10);
        let p = fd_derivative(&|x: f64| x.powi(6), 1.3, FD_STEP);
        assert!((p - 6.0 * 1.3f64.powi(5)).abs() < 1e-9);
    }

    #[test]
    fn gradient_axes() {
        let f = |p: &CylPoint| p.r * p.r + 3.0 * p.phi - p.z;
        let g = fd_gradient(&f, &CylPoint::new(2.0, 0.1, 0.3));
        assert!((g[0] - 4.0).abs() < 1e-10 && (g[1] - 3.0).abs() < 1e-10 && (g[2] + 1.0).abs() < 1e-10);
    }
}
