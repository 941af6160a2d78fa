use serde::{Deserialize, Serialize};

use super::{PhasePoint, SystemsError};

/// Cylindrical phase point `(r, φ, Z, p_r, p_φ, p_Z)` with φ ∈ (−π, π].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CylState {
    pub r: f64,
    pub phi: f64,
    pub z: f64,
    pub p_r: f64,
    pub p_phi: f64,
    pub p_z: f64,
}

pub fn to_cylindrical(s: &PhasePoint) -> Result<CylState, SystemsError> {
    let [x, y, z, p1, p2, p3] = s.0;
    let r = x.hypot(y);
    if r == 0.0 || !r.is_finite() {
        return Err(SystemsError::SingularCoordinates);
    }
    let phi = y.atan2(x);
    // atan2 returns −π on the negative axis with y = −0.0.
    let phi = if phi == -std::f64::consts::PI { std::f64::consts::PI } else { phi };
    let (c, sn) = (x / r, y / r);
    Ok(CylState {
        r,
        phi,
        z,
        p_r: c * p1 + sn * p2,
        p_phi: x * p2 - y * p1,
        p_z: p3,
    })
}

pub fn from_cylindrical(c: &CylState) -> Result<PhasePoint, SystemsError> {
    if c.r <= 0.0 || !c.r.is_finite() {
        return Err(SystemsError::SingularCoordinates);
    }
    let (sn, cs) = c.phi.sin_cos();
    Ok(PhasePoint([
        c.r * cs,
        c.r * sn,
        c.z,
        cs * c.p_r - sn / c.r * c.p_phi,
        sn * c.p_r + cs / c.r * c.p_phi,
        c.p_z,
    ]))
}

/// Cartesian field components from the cylindrical 2-form components
/// `(B^r, B^φ, B^Z)` at `(r, φ)`.
pub fn field_to_cartesian(r: f64, phi: f64, b: [f64; 3]) -> [f64; 3] {
    let (sn, cs) = phi.sin_cos();
    [
        cs / r * b[0] - sn * b[1],
        sn / r * b[0] + cs * b[1],
        b[2] / r,
    ]
}
