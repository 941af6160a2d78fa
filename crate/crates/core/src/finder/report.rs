use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::generic_rank;
use crate::polyalg::{format_rational, poisson, Monomial, Polynomial, Rational};
use crate::systems::{Family, Observable, Params};

use super::ansatz::{build_system, Ansatz, Unknown};
use super::linalg::{integer_row, null_space, Echelon, SparseRow};
use super::FinderError;

/// Samples used when a new element is tested for functional independence.
const RANK_SAMPLES: usize = 20;

/// A named candidate integral offered to the classifier.
#[derive(Clone, Debug)]
pub struct Known {
    pub name: String,
    pub poly: Polynomial,
}

impl Known {
    pub fn new(name: impl Into<String>, poly: Polynomial) -> Self {
        Known { name: name.into(), poly }
    }
}

/// Products of the family's integrals that are at most quadratic in the
/// momenta. Members that are not conserved for the given parameters are
/// offered anyway; the classifier rejects them.
pub fn known_generators(family: &Family) -> Result<Vec<Known>, FinderError> {
    let x31 = family.x3_first()?.poly().clone();
    let x32 = family.x3_rotation()?.poly().clone();
    let mut out = vec![
        Known::new("1", Polynomial::one(family.vars())),
        Known::new("X3_1", x31.clone()),
        Known::new("H", family.hamiltonian()?.poly().clone()),
        Known::new("X1", family.x1()?.poly().clone()),
        Known::new("X2", family.x2()?.poly().clone()),
    ];
    if let Ok(split) = family.split_integrals() {
        out.extend(split.iter().map(|o| Known::new(o.name(), o.poly().clone())));
    }
    out.push(Known::new("X3_2", x32.clone()));
    out.push(Known::new("X3_1^2", x31.mul(&x31)?));
    out.push(Known::new("X3_1*X3_2", x31.mul(&x32)?));
    out.push(Known::new("X3_2^2", x32.mul(&x32)?));
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    /// Coefficients that assemble to the zero polynomial.
    Kernel,
    /// A known integral, independent of the ones listed before it.
    Known,
    /// Not in the span of the kernel and the known integrals.
    New,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BasisElement {
    pub label: String,
    pub classification: Classification,
    pub alpha: Vec<String>,
    pub sigma_coeffs: Vec<Vec<String>>,
    pub mu_coeffs: Vec<String>,
    /// For new elements: whether adding it raises the Jacobian rank of the
    /// accepted known integrals.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub functionally_independent: Option<bool>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KnownStatus {
    pub name: String,
    pub conserved: bool,
    pub representable: bool,
    /// In the basis: conserved, representable and independent of earlier
    /// accepted entries.
    pub accepted: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NullSpaceReport {
    pub dimension: usize,
    pub kernel_dim: usize,
    pub new_count: usize,
    pub basis: Vec<BasisElement>,
    pub known: Vec<KnownStatus>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub params: Option<Params>,
    pub degrees: [u32; 2],
    pub unknowns: usize,
    pub equations: usize,
    /// Every null-space vector was checked by recomputing `{H, X3}`.
    pub verified: bool,
    pub scope: String,
}

/// Exact null space of a system, with each vector verified by an
/// independent bracket computation.
#[derive(Clone, Debug)]
pub struct NullSpace {
    pub vectors: Vec<Vec<Rational>>,
    pub kernel: Vec<Vec<Rational>>,
    pub equations: usize,
    pub verified: bool,
}

pub fn solve(h: &Observable, ansatz: &Ansatz) -> Result<NullSpace, FinderError> {
    let sys = build_system(h, ansatz)?;
    let (_, vectors) = null_space(sys.ncols(), &sys.rows);
    let h = h.poly().restrict(ansatz.vars())?;
    let checks: Vec<bool> = vectors
        .par_iter()
        .map(|v| -> Result<bool, FinderError> { Ok(poisson(&h, &ansatz.assemble(v)?)?.is_zero()) })
        .collect::<Result<_, _>>()?;
    Ok(NullSpace {
        vectors,
        kernel: ansatz.kernel(),
        equations: sys.rows.len(),
        verified: checks.iter().all(|&ok| ok),
    })
}

fn coefficient_fields(ansatz: &Ansatz, v: &[Rational]) -> (Vec<String>, Vec<Vec<String>>, Vec<String>) {
    let mut alpha = Vec::new();
    let mut sigma = vec![Vec::new(), Vec::new(), Vec::new()];
    let mut mu = Vec::new();
    for (u, c) in ansatz.unknowns().iter().zip(v) {
        let s = format_rational(c);
        match u {
            Unknown::Alpha(..) => alpha.push(s),
            Unknown::Sigma(k, _) => sigma[*k].push(s),
            Unknown::Mu(_) => mu.push(s),
        }
    }
    (alpha, sigma, mu)
}

/// Maps polynomials to sparse rows over a shared monomial index.
struct MonomialIndex(HashMap<Monomial, usize>);

impl MonomialIndex {
    fn new<'a>(polys: impl IntoIterator<Item = &'a Polynomial>) -> Self {
        let mut idx = HashMap::new();
        for p in polys {
            for (m, _) in p.terms() {
                let n = idx.len();
                idx.entry(m.clone()).or_insert(n);
            }
        }
        MonomialIndex(idx)
    }

    fn row(&self, p: &Polynomial) -> SparseRow {
        integer_row(p.terms().map(|(m, c)| (self.0[m], c)))
    }

    fn len(&self) -> usize {
        self.0.len()
    }
}

/// Number of linearly independent polynomials among `polys`.
pub fn polynomial_rank(polys: &[Polynomial]) -> usize {
    let idx = MonomialIndex::new(polys);
    let mut e = Echelon::new(idx.len());
    polys.iter().filter(|p| e.insert(&idx.row(p))).count()
}

/// Labels a basis of the null space: the kernel first, then every accepted
/// known integral, then completions from the null space marked new.
pub fn classify(
    ansatz: &Ansatz,
    h: &Observable,
    ns: &NullSpace,
    known: &[Known],
) -> Result<(Vec<BasisElement>, Vec<KnownStatus>), FinderError> {
    let hp = h.poly().restrict(ansatz.vars())?;
    let known_polys: Vec<Polynomial> =
        known.iter().map(|k| k.poly.restrict(ansatz.vars())).collect::<Result<_, _>>()?;
    let reps: Vec<(bool, Option<Vec<Rational>>)> = known_polys
        .par_iter()
        .map(|p| -> Result<_, FinderError> { Ok((poisson(&hp, p)?.is_zero(), ansatz.represent(p)?)) })
        .collect::<Result<_, _>>()?;
    let assembled: Vec<Polynomial> =
        ns.vectors.par_iter().map(|v| ansatz.assemble(v)).collect::<Result<_, _>>()?;
    let idx = MonomialIndex::new(known_polys.iter().chain(&assembled));
    let mut span = Echelon::new(idx.len());

    let element = |label: String, class: Classification, v: &[Rational]| {
        let (alpha, sigma_coeffs, mu_coeffs) = coefficient_fields(ansatz, v);
        BasisElement { label, classification: class, alpha, sigma_coeffs, mu_coeffs, functionally_independent: None }
    };
    let mut basis: Vec<BasisElement> = ns
        .kernel
        .iter()
        .enumerate()
        .map(|(i, v)| element(format!("kernel_{}", i + 1), Classification::Kernel, v))
        .collect();
    let mut statuses = Vec::new();
    let mut accepted: Vec<Observable> = Vec::new();
    for ((k, p), (conserved, rep)) in known.iter().zip(&known_polys).zip(reps) {
        let mut ok = false;
        if let (true, Some(v)) = (conserved, &rep) {
            if span.insert(&idx.row(p)) {
                basis.push(element(k.name.clone(), Classification::Known, v));
                if !p.is_constant() {
                    accepted.push(Observable::new(k.name.clone(), p.clone()));
                }
                ok = true;
            }
        }
        statuses.push(KnownStatus { name: k.name.clone(), conserved, representable: rep.is_some(), accepted: ok });
    }
    let base_rank = if accepted.is_empty() { 0 } else { generic_rank(&accepted, RANK_SAMPLES, 0)?.generic_rank };
    let mut n_new = 0;
    for (v, p) in ns.vectors.iter().zip(&assembled) {
        if !span.insert(&idx.row(p)) {
            continue;
        }
        n_new += 1;
        let mut with = accepted.clone();
        with.push(Observable::new("new", p.clone()));
        let rank = generic_rank(&with, RANK_SAMPLES, 0)?.generic_rank;
        let mut e = element(format!("new_{n_new}"), Classification::New, v);
        e.functionally_independent = Some(rank > base_rank);
        basis.push(e);
    }
    Ok((basis, statuses))
}

/// Quadratic integrals of `family` within the given degrees, classified
/// against [`known_generators`].
pub fn find_integrals(family: &Family, d_sigma: u32, d_mu: u32) -> Result<NullSpaceReport, FinderError> {
    let known = known_generators(family)?;
    find_integrals_with(family, d_sigma, d_mu, &known)
}

pub fn find_integrals_with(
    family: &Family,
    d_sigma: u32,
    d_mu: u32,
    known: &[Known],
) -> Result<NullSpaceReport, FinderError> {
    let ansatz = Ansatz::for_family(family, d_sigma, d_mu)?;
    let h = family.hamiltonian()?;
    let ns = solve(&h, &ansatz)?;
    let (basis, known) = classify(&ansatz, &h, &ns, known)?;
    debug_assert_eq!(basis.len(), ns.vectors.len());
    Ok(NullSpaceReport {
        dimension: ns.vectors.len(),
        kernel_dim: ns.kernel.len(),
        new_count: basis.iter().filter(|b| b.classification == Classification::New).count(),
        basis,
        known,
        params: family.params().cloned(),
        degrees: [d_sigma, d_mu],
        unknowns: ansatz.len(),
        equations: ns.equations,
        verified: ns.verified,
        scope: format!(
            "complete only among X3 with sigma of degree <= {d_sigma} and mu of degree <= {d_mu}"
        ),
    })
}
