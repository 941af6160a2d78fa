//! Hamilton's equations for numeric family members and conservation
//! monitoring along trajectories.

mod integrators;
mod trajectory;

use serde::{Deserialize, Serialize};

use crate::systems::{Observable, PhasePoint};

pub use integrators::{dp45_step, initial_step, rk4_step, Controller, State, BETA, FAC_MAX, FAC_MIN, MIN_STEP, SAFETY};
pub use trajectory::{
    cyclotron_period, integrate, integrate_many, reversal_error, write_csv, Drift, Reversal, Trajectory,
};

#[derive(Debug, thiserror::Error)]
pub enum DynError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("observable `{0}` still contains parameter symbols")]
    NotNumeric(String),
    #[error("step size {dt:e} at t = {t} fell below the stiffness limit")]
    Stiff { t: f64, dt: f64 },
    #[error("state became non-finite at t = {t}")]
    NonFinite { t: f64 },
    #[error("step budget of {0} exhausted")]
    TooManySteps(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum Method {
    Rk4 { dt: f64 },
    Dp45 { rtol: f64, atol: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryConfig {
    pub t_end: f64,
    #[serde(flatten)]
    pub method: Method,
    /// Record every `stride`-th step; the final state is always recorded.
    pub stride: usize,
    pub max_steps: usize,
}

impl Default for TrajectoryConfig {
    fn default() -> Self {
        TrajectoryConfig { t_end: 100.0, method: Method::Dp45 { rtol: 1e-10, atol: 1e-10 }, stride: 1, max_steps: 20_000_000 }
    }
}

impl TrajectoryConfig {
    pub fn validate(&self) -> Result<(), DynError> {
        let bad = |m: &str| Err(DynError::Config(m.to_string()));
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return bad("t_end must be positive and finite");
        }
        if self.stride == 0 {
            return bad("stride must be at least 1");
        }
        match self.method {
            Method::Rk4 { dt } if !(dt > 0.0 && dt.is_finite()) => bad("dt must be positive"),
            Method::Dp45 { rtol, atol } if !(rtol > 0.0 && atol > 0.0) => bad("rtol and atol must be positive"),
            _ => Ok(()),
        }
    }
}

/// `(∂H/∂p, −∂H/∂x)` at `s`.
pub fn hamiltonian_rhs(h: &Observable, s: &PhasePoint) -> [f64; 6] {
    let g = h.gradient(s);
    [g[3], g[4], g[5], -g[0], -g[1], -g[2]]
}
