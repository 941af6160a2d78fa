//! The magnetic family as exact Cartesian polynomials.
//!
//! Field `B = (−b_φ y, b_φ x, b_z)`, potential
//! `W = b_φ(−⅛b_φ r⁴ + w3 r² − b_z(½a(x²−y²) + bxy) + w1 x + w2 y)`, unit
//! mass and charge −1, so `H = ½|p + A|² + W`. Every integral is built from
//! the covariant momenta of the current gauge, so observables transform
//! correctly under [`GaugeChoice::transform`].

mod cylindrical;
mod family;
mod gauge;
mod observable;
mod params;
mod relabel;

use serde::{Deserialize, Serialize};

use crate::polyalg::PolyError;

pub use cylindrical::{field_to_cartesian, from_cylindrical, to_cylindrical, CylState};
pub use family::{Family, ParamPolys, OBSERVABLE_NAMES};
pub use gauge::{curl, gauge_transform, GaugeChoice};
pub use observable::Observable;
pub use params::{ParamValue, Params};
pub use relabel::{RawReduced, RAW_SYMBOLS};

#[derive(Debug, thiserror::Error)]
pub enum SystemsError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("{0}")]
    Usage(String),
    #[error("vector potential does not reproduce the family's magnetic field")]
    GaugeMismatch,
    #[error("cylindrical coordinates are singular on the axis r = 0")]
    SingularCoordinates,
}

/// `(x, y, z, p1, p2, p3)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint(pub [f64; 6]);

impl PhasePoint {
    pub fn new(position: [f64; 3], momentum: [f64; 3]) -> Self {
        let [x, y, z] = position;
        let [p1, p2, p3] = momentum;
        PhasePoint([x, y, z, p1, p2, p3])
    }

    pub fn position(&self) -> [f64; 3] {
        [self.0[0], self.0[1], self.0[2]]
    }

    pub fn momentum(&self) -> [f64; 3] {
        [self.0[3], self.0[4], self.0[5]]
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
}
