//! Functional independence by Jacobian rank and exact bracket algebras.

mod algebra;
mod rank;

use crate::polyalg::PolyError;
use crate::systems::SystemsError;

pub use algebra::{
    algebra_report, algebra_table, verify_dependence_identity, AlgebraCase, AlgebraReport,
    AlgebraTable, RelationCheck,
};
pub use rank::{
    generic_rank, jacobian_rank, jacobian_singular_values, rank_sample_points, RankReport,
    MIN_SAMPLES, PLANE_GAP, RANK_TOL,
};

#[derive(Debug, thiserror::Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Systems(#[from] SystemsError),
    #[error("observable `{0}` still contains parameter symbols")]
    NotNumeric(String),
    #[error("{0}")]
    Usage(String),
}
