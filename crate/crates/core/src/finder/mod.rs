//! Exact search for every integral at most quadratic in the momenta.
//!
//! The ansatz `X3 = Σ α_ij T_iT_j + Σ σ_k pₖᴬ + μ` over `T = (pᴬ, lᴬ)` is
//! linear in its unknowns, so `{H, X3} = 0` becomes a sparse rational
//! linear system, one equation per monomial. Its exact null space is the
//! space of quadratic integrals within the chosen degrees. The identity
//! `pᴬ·lᴬ = 0` makes the parametrization itself non-injective; that kernel
//! is reported, never quotiented away.

mod ansatz;
mod linalg;
mod report;

use crate::analysis::AnalysisError;
use crate::polyalg::PolyError;
use crate::systems::SystemsError;

pub use ansatz::{build_system, xyz_exponents, Ansatz, LinearSystem, Unknown, MAX_UNKNOWNS};
pub use linalg::{integer_row, null_space, Echelon, SparseRow};
pub use report::{
    classify, find_integrals, find_integrals_with, known_generators, polynomial_rank, solve,
    BasisElement, Classification, Known, KnownStatus, NullSpace, NullSpaceReport,
};

#[derive(Debug, thiserror::Error)]
pub enum FinderError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Systems(#[from] SystemsError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error("the linear solve needs numeric parameters")]
    Symbolic,
    #[error("resource limit: {0}")]
    Resource(String),
}
