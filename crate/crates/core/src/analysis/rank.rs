use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::sampling::{scale, Halton};
use crate::systems::{Observable, PhasePoint};

use super::AnalysisError;

/// Singular values at or below `RANK_TOL · s_max` count as zero.
pub const RANK_TOL: f64 = 1e-9;

/// Sample coordinates closer than this to a coordinate plane are rejected.
pub const PLANE_GAP: f64 = 0.05;

pub const MIN_SAMPLES: usize = 10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankReport {
    pub observables: Vec<String>,
    pub seed: u64,
    pub tol: f64,
    pub points: Vec<[f64; 6]>,
    pub singular_values: Vec<Vec<f64>>,
    pub ranks: Vec<usize>,
    /// Most frequent rank; ties go to the larger rank.
    pub generic_rank: usize,
}

fn require_numeric(obs: &[Observable]) -> Result<(), AnalysisError> {
    match obs.iter().find(|o| !o.is_numeric()) {
        Some(o) => Err(AnalysisError::NotNumeric(o.name().to_string())),
        None => Ok(()),
    }
}

/// Descending singular values of the `k × 6` Jacobian at `pt`.
pub fn jacobian_singular_values(obs: &[Observable], pt: &PhasePoint) -> Result<Vec<f64>, AnalysisError> {
    require_numeric(obs)?;
    if obs.is_empty() {
        return Ok(Vec::new());
    }
    let rows: Vec<[f64; 6]> = obs.iter().map(|o| o.gradient(pt)).collect();
    let j = DMatrix::from_fn(rows.len(), 6, |i, k| rows[i][k]);
    let mut sv: Vec<f64> = j.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(sv)
}

fn rank_of(sv: &[f64], tol: f64) -> usize {
    let smax = sv.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol * smax).count()
}

pub fn jacobian_rank(obs: &[Observable], pt: &PhasePoint, tol: f64) -> Result<usize, AnalysisError> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(AnalysisError::Usage(format!("rank tolerance must be positive, got {tol}")));
    }
    Ok(rank_of(&jacobian_singular_values(obs, pt)?, tol))
}

/// Quasi-random points of `[−1, 1]⁶` with every `|coordinate| ≥ PLANE_GAP`.
pub fn rank_sample_points(n: usize, seed: u64) -> Vec<PhasePoint> {
    Halton::<6>::new(seed)
        .map(|u| scale(u, [-1.0; 6], [1.0; 6]))
        .filter(|v| v.iter().all(|c| c.abs() >= PLANE_GAP))
        .take(n)
        .map(PhasePoint)
        .collect()
}

pub fn generic_rank(obs: &[Observable], n_samples: usize, seed: u64) -> Result<RankReport, AnalysisError> {
    if n_samples < MIN_SAMPLES {
        return Err(AnalysisError::Usage(format!("need at least {MIN_SAMPLES} samples, got {n_samples}")));
    }
    require_numeric(obs)?;
    let points = rank_sample_points(n_samples, seed);
    let singular_values: Vec<Vec<f64>> = points
        .par_iter()
        .map(|p| jacobian_singular_values(obs, p))
        .collect::<Result<_, _>>()?;
    let ranks: Vec<usize> = singular_values.iter().map(|sv| rank_of(sv, RANK_TOL)).collect();
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for &r in &ranks {
        *counts.entry(r).or_default() += 1;
    }
    let generic_rank = counts
        .iter()
        .max_by_key(|(r, c)| (**c, **r))
        .map(|(r, _)| *r)
        .unwrap_or(0);
    Ok(RankReport {
        observables: obs.iter().map(|o| o.name().to_string()).collect(),
        seed,
        tol: RANK_TOL,
        points: points.iter().map(|p| p.0).collect(),
        singular_values,
        ranks,
        generic_rank,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::{Family, ParamValue, Params};

    fn generic() -> Family {
        let p = Params::zero()
            .with("a", ParamValue::frac(1, 2))
            .with("b", ParamValue::frac(-2, 3))
            .with("b_phi", ParamValue::frac(3, 4))
            .with("b_z", ParamValue::int(1))
            .with("w1", ParamValue::frac(1, 5))
            .with("w2", ParamValue::frac(-1, 3))
            .with("w3", ParamValue::int(1))
            .with("s_z3", ParamValue::frac(2, 7))
            .with("S_z1", ParamValue::frac(-3, 5));
        Family::new(&p).unwrap()
    }

    #[test]
    fn points_avoid_coordinate_planes() {
        let pts = rank_sample_points(40, 3);
        assert_eq!(pts.len(), 40);
        assert!(pts.iter().all(|p| p.0.iter().all(|c| c.abs() >= PLANE_GAP && c.abs() <= 1.0)));
    }

    #[test]
    fn duplicate_row_drops_rank() {
        let f = generic();
        let h = f.hamiltonian().unwrap();
        let x1 = f.x1().unwrap();
        let pt = rank_sample_points(1, 0)[0];
        assert_eq!(jacobian_rank(&[h.clone(), h, x1], &pt, RANK_TOL).unwrap(), 2);
    }

    #[test]
    fn integrals_are_independent_but_x2_is_not() {
        let f = generic();
        let obs = ["H", "X1", "X2"].map(|n| f.observable(n).unwrap());
        assert_eq!(generic_rank(&obs, 20, 1).unwrap().generic_rank, 3);
        let obs = ["H", "X1", "X2", "X3_1"].map(|n| f.observable(n).unwrap());
        let rep = generic_rank(&obs, 20, 1).unwrap();
        assert_eq!(rep.generic_rank, 3);
        // The collapse is exact, so the gap spans many orders of magnitude.
        assert!(rep.singular_values.iter().all(|sv| sv[3] < 1e-12 * sv[0]));
    }

    #[test]
    fn single_observable_has_rank_one() {
        let rep = generic_rank(&[generic().x1().unwrap()], 10, 4).unwrap();
        assert_eq!(rep.generic_rank, 1);
    }

    #[test]
    fn rejects_bad_input() {
        let f = generic();
        assert!(generic_rank(&[f.hamiltonian().unwrap()], 5, 0).is_err());
        let sym = Family::new(&Params::symbolic()).unwrap().hamiltonian().unwrap();
        assert!(matches!(generic_rank(&[sym], 10, 0), Err(AnalysisError::NotNumeric(_))));
        let pt = rank_sample_points(1, 0)[0];
        assert!(jacobian_rank(&[f.hamiltonian().unwrap()], &pt, 0.0).is_err());
    }
}
