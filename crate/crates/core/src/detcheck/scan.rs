use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::sampling::{scale, Halton};
use crate::systems::Params;

use super::equations::x1_gradient_rhs;
use super::{
    fd_partial, residual_bracket_second, residual_first_order, residual_x1_second,
    residual_x2_second, residual_zeroth, CoefficientField, CylPoint, DetError, General, Integral,
    Reduced, FD_STEP,
};

/// Threshold below which the compatibility residual counts as zero.
pub const COMPAT_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquationMax {
    pub equation: String,
    pub max_residual: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub structure: String,
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
    pub equations: Vec<EquationMax>,
    pub max_residual: f64,
    pub passed: bool,
}

/// Quasi-random points with `r ∈ [0.1, 3]`, `φ ∈ (−π, π]`, `Z ∈ [−2, 2]`.
pub fn sample_points(n: usize, seed: u64) -> Vec<CylPoint> {
    Halton::<3>::new(seed)
        .take(n)
        .map(|u| {
            let [r, t, z] = scale(u, [0.1, 0.0, -2.0], [3.0, 1.0, 2.0]);
            CylPoint::new(r, PI - 2.0 * PI * t, z)
        })
        .collect()
}

fn labels(prefix: &str, suffixes: &[&str]) -> Vec<String> {
    suffixes.iter().map(|s| format!("{prefix}_{s}")).collect()
}

/// Every residual block available for `f` at one point, flattened, with
/// matching labels.
fn evaluate(f: &dyn CoefficientField, pt: &CylPoint, lower: bool) -> Result<Vec<f64>, DetError> {
    let mut v = Vec::with_capacity(26);
    v.extend(residual_x1_second(f, pt));
    v.extend(residual_x2_second(f, pt));
    v.extend(residual_bracket_second(f, pt));
    if lower {
        v.extend(residual_first_order(f, pt, Integral::X1)?);
        v.extend(residual_first_order(f, pt, Integral::X2)?);
        v.push(residual_zeroth(f, pt, Integral::X1)?);
        v.push(residual_zeroth(f, pt, Integral::X2)?);
    }
    Ok(v)
}

fn equation_labels(lower: bool) -> Vec<String> {
    let six = ["1", "2", "3", "4", "5", "6"];
    let mut l = labels("h_x1_second", &six);
    l.extend(labels("h_x2_second", &six));
    l.extend(labels("x1_x2_second", &six));
    if lower {
        l.extend(labels("h_x1_first", &["r", "phi", "z"]));
        l.extend(labels("h_x2_first", &["r", "phi", "z"]));
        l.push("h_x1_zeroth".into());
        l.push("h_x2_zeroth".into());
    }
    l
}

/// Maximum of every residual over `points`.
pub fn scan_field(
    f: &dyn CoefficientField,
    structure: &str,
    points: &[CylPoint],
    seed: u64,
    tol: f64,
    lower: bool,
) -> Result<ScanReport, DetError> {
    let names = equation_labels(lower);
    let per_point: Vec<Vec<f64>> = points
        .par_iter()
        .map(|pt| evaluate(f, pt, lower))
        .collect::<Result<_, _>>()?;
    let equations: Vec<EquationMax> = names
        .into_iter()
        .enumerate()
        .map(|(k, equation)| {
            // NaN must fail, so fold with an explicit NaN check.
            let max_residual = per_point.iter().map(|v| v[k]).fold(0.0, |m: f64, x| {
                if x.is_nan() || m.is_nan() { f64::NAN } else { m.max(x) }
            });
            EquationMax { equation, max_residual, passed: max_residual < tol }
        })
        .collect();
    let max_residual = equations.iter().map(|e| e.max_residual).fold(0.0, |m: f64, x| {
        if x.is_nan() || m.is_nan() { f64::NAN } else { m.max(x) }
    });
    Ok(ScanReport {
        structure: structure.to_string(),
        samples: points.len(),
        seed,
        tol,
        passed: equations.iter().all(|e| e.passed),
        equations,
        max_residual,
    })
}

/// All blocks, including the lower-order ones, for a numeric family member.
pub fn scan_reduced(params: &Params, n: usize, seed: u64, tol: f64) -> Result<ScanReport, DetError> {
    let f = Reduced::from_params(params)?;
    scan_field(&f, "reduced", &sample_points(n, seed), seed, tol, true)
}

/// Second-order blocks for the general solution.
pub fn scan_general(g: &General, n: usize, seed: u64, tol: f64) -> ScanReport {
    scan_field(g, "general", &sample_points(n, seed), seed, tol, false)
        .expect("second-order blocks need no optional coefficient")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompatReport {
    pub samples: usize,
    pub constraints_hold: bool,
    /// Largest `|∂_i G_j − ∂_j G_i|` over all points and pairs.
    pub max_residual: f64,
    pub compatible: bool,
}

/// Mixed-partial test of the first-order block of `X1`: a gradient field
/// `G` for `m` exists only if its curl vanishes.
pub fn compatibility_scan(g: &General, points: &[CylPoint]) -> CompatReport {
    let comp = |k: usize| {
        move |p: &CylPoint| x1_gradient_rhs(g, p).expect("general structure defines W")[k]
    };
    let worst = points
        .par_iter()
        .map(|pt| {
            let d = |k: usize, axis: usize| fd_partial(&comp(k), pt, axis, FD_STEP);
            [d(1, 0) - d(0, 1), d(2, 0) - d(0, 2), d(2, 1) - d(1, 2)]
                .iter()
                .map(|v| v.abs())
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    CompatReport {
        samples: points.len(),
        constraints_hold: g.raw.satisfies_constraints(),
        max_residual: worst,
        compatible: worst < COMPAT_TOL,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detcheck::RawConstants;
    use crate::systems::ParamValue;
    use rand::SeedableRng;

    #[test]
    fn sample_region() {
        let pts = sample_points(200, 5);
        assert_eq!(pts.len(), 200);
        for p in &pts {
            assert!((0.1..=3.0).contains(&p.r));
            assert!(p.phi > -PI && p.phi <= PI);
            assert!((-2.0..=2.0).contains(&p.z));
        }
    }

    #[test]
    fn single_sample_report() {
        let p = Params::zero().with("b_phi", ParamValue::int(1)).with("b_z", ParamValue::int(1));
        let r = scan_reduced(&p, 1, 0, 1e-7).unwrap();
        assert_eq!(r.samples, 1);
        assert_eq!(r.equations.len(), 26);
        assert!(r.passed);
    }

    #[test]
    fn compatibility_separates_constraints() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        let base = General { a: 0.6, b: -0.9, raw: RawConstants::random(&mut rng, 1.5).constrained() };
        let pts = sample_points(20, 1);
        let ok = compatibility_scan(&base, &pts);
        assert!(ok.constraints_hold && ok.compatible, "{}", ok.max_residual);
        for name in RawConstants::CONSTRAINED {
            let mut g = base;
            *g.raw.constrained_mut(name).unwrap() = 1.0;
            let bad = compatibility_scan(&g, &pts);
            assert!(!bad.constraints_hold);
            assert!(bad.max_residual > 1e-2, "{name}: {}", bad.max_residual);
        }
        let zero = General { a: 0.3, b: 0.2, raw: RawConstants::default() };
        assert!(compatibility_scan(&zero, &pts).max_residual == 0.0);
    }
}
