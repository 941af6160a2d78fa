use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::polyalg::{poisson, Monomial, Polynomial, Rational, VarSet};
use crate::systems::{Family, Observable};

use super::linalg::{integer_row, null_space, SparseRow};
use super::FinderError;

/// Upper bound on ansatz size; beyond it elimination cost is unreasonable.
pub const MAX_UNKNOWNS: usize = 4000;

const T_NAMES: [&str; 6] = ["p1A", "p2A", "p3A", "l1A", "l2A", "l3A"];

/// One coefficient of the quadratic ansatz.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Unknown {
    /// Coefficient of `T_i T_j`, `i ≤ j`, over `T = (pᴬ, lᴬ)`.
    Alpha(usize, usize),
    /// Coefficient of `x^e pₖᴬ` in `σ_k pₖᴬ`.
    Sigma(usize, [u8; 3]),
    /// Coefficient of `x^e` in `μ`.
    Mu([u8; 3]),
}

fn xyz_monomial(e: &[u8; 3]) -> String {
    let parts: Vec<String> = ["x", "y", "z"]
        .iter()
        .zip(e)
        .filter(|(_, &k)| k > 0)
        .map(|(v, &k)| if k == 1 { v.to_string() } else { format!("{v}^{k}") })
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

impl fmt::Display for Unknown {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Unknown::Alpha(i, j) => write!(f, "alpha[{}*{}]", T_NAMES[*i], T_NAMES[*j]),
            Unknown::Sigma(k, e) => write!(f, "sigma{}[{}]", k + 1, xyz_monomial(e)),
            Unknown::Mu(e) => write!(f, "mu[{}]", xyz_monomial(e)),
        }
    }
}

/// Exponents of all monomials in `x, y, z` of total degree `≤ d`, graded
/// then lexicographic.
pub fn xyz_exponents(d: u32) -> Vec<[u8; 3]> {
    let mut out = Vec::new();
    for total in 0..=d as u8 {
        for i in (0..=total).rev() {
            for j in (0..=total - i).rev() {
                out.push([i, j, total - i - j]);
            }
        }
    }
    out
}

fn binom3(d: u32) -> usize {
    let d = d as usize;
    (d + 1) * (d + 2) * (d + 3) / 6
}

/// `X3 = Σ α_ij T_iT_j + Σ σ_k pₖᴬ + μ` with polynomial `σ_k`, `μ`.
#[derive(Clone, Debug)]
pub struct Ansatz {
    pub d_sigma: u32,
    pub d_mu: u32,
    vars: Arc<VarSet>,
    unknowns: Vec<Unknown>,
    basis: Vec<Polynomial>,
}

impl Ansatz {
    /// `21 + 3·C(d_σ+3, 3) + C(d_μ+3, 3)`.
    pub fn unknown_count(d_sigma: u32, d_mu: u32) -> usize {
        21 + 3 * binom3(d_sigma) + binom3(d_mu)
    }

    /// Builds the ansatz from the family's covariant momenta; parameters
    /// must be numeric.
    pub fn for_family(family: &Family, d_sigma: u32, d_mu: u32) -> Result<Self, FinderError> {
        if family.vars().len() != VarSet::phase_space().len() {
            return Err(FinderError::Symbolic);
        }
        let n = Self::unknown_count(d_sigma, d_mu);
        if n > MAX_UNKNOWNS {
            return Err(FinderError::Resource(format!(
                "degrees ({d_sigma}, {d_mu}) need {n} unknowns, limit {MAX_UNKNOWNS}"
            )));
        }
        let vars = family.vars().clone();
        let pa = family.covariant_momenta()?;
        let la = family.covariant_angular_momenta()?;
        let t: Vec<&Polynomial> = pa.iter().chain(la.iter()).collect();
        let mut unknowns = Vec::with_capacity(n);
        for i in 0..6 {
            for j in i..6 {
                unknowns.push(Unknown::Alpha(i, j));
            }
        }
        for k in 0..3 {
            for e in xyz_exponents(d_sigma) {
                unknowns.push(Unknown::Sigma(k, e));
            }
        }
        for e in xyz_exponents(d_mu) {
            unknowns.push(Unknown::Mu(e));
        }
        let mono = |e: &[u8; 3]| {
            let mut full = vec![0u8; vars.len()];
            full[..3].copy_from_slice(e);
            Polynomial::from_terms(&vars, [(Monomial::from_exponents(full), Rational::from_integer(1.into()))])
        };
        let basis = unknowns
            .par_iter()
            .map(|u| -> Result<Polynomial, FinderError> {
                Ok(match u {
                    Unknown::Alpha(i, j) => t[*i].mul(t[*j])?,
                    Unknown::Sigma(k, e) => mono(e)?.mul(&pa[*k])?,
                    Unknown::Mu(e) => mono(e)?,
                })
            })
            .collect::<Result<_, _>>()?;
        Ok(Ansatz { d_sigma, d_mu, vars, unknowns, basis })
    }

    pub fn vars(&self) -> &Arc<VarSet> {
        &self.vars
    }

    pub fn unknowns(&self) -> &[Unknown] {
        &self.unknowns
    }

    pub fn len(&self) -> usize {
        self.unknowns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.unknowns.is_empty()
    }

    /// The polynomial `X3` with the given coefficients.
    pub fn assemble(&self, coeffs: &[Rational]) -> Result<Polynomial, FinderError> {
        assert_eq!(coeffs.len(), self.len(), "one coefficient per unknown");
        let mut out = Polynomial::zero(&self.vars);
        for (c, b) in coeffs.iter().zip(&self.basis) {
            if !c.is_zero() {
                out = out.add(&b.scale(c))?;
            }
        }
        Ok(out)
    }

    /// Coefficients reproducing `target`, if it lies in the ansatz.
    pub fn represent(&self, target: &Polynomial) -> Result<Option<Vec<Rational>>, FinderError> {
        let target = target.restrict(&self.vars)?;
        let mut cols: Vec<&Polynomial> = self.basis.iter().collect();
        cols.push(&target);
        let (rows, _) = rows_of_columns(&cols);
        let n = self.len();
        let (_, ns) = null_space(n + 1, &rows);
        Ok(ns.into_iter().find(|v| !v[n].is_zero()).map(|v| {
            let s = -v[n].clone();
            v[..n].iter().map(|c| c / &s).collect()
        }))
    }

    /// Coefficient vectors assembling to the zero polynomial.
    pub fn kernel(&self) -> Vec<Vec<Rational>> {
        let cols: Vec<&Polynomial> = self.basis.iter().collect();
        let (rows, _) = rows_of_columns(&cols);
        null_space(self.len(), &rows).1
    }
}

/// Integer rows of the matrix whose `j`-th column holds the coefficients of
/// `cols[j]`, one row per monomial, with the monomials in row order.
fn rows_of_columns(cols: &[&Polynomial]) -> (Vec<SparseRow>, Vec<Monomial>) {
    let mut by_monomial: BTreeMap<&Monomial, Vec<(usize, &Rational)>> = BTreeMap::new();
    for (j, p) in cols.iter().enumerate() {
        for (m, c) in p.terms() {
            by_monomial.entry(m).or_default().push((j, c));
        }
    }
    let labels = by_monomial.keys().map(|m| (*m).clone()).collect();
    let rows = by_monomial.into_values().map(integer_row).collect();
    (rows, labels)
}

/// Coefficients of `{H, X3}` in every monomial, as linear forms in the
/// unknowns.
#[derive(Clone, Debug)]
pub struct LinearSystem {
    pub unknowns: Vec<Unknown>,
    pub row_labels: Vec<Monomial>,
    pub rows: Vec<SparseRow>,
    images: Vec<Polynomial>,
}

impl LinearSystem {
    pub fn ncols(&self) -> usize {
        self.unknowns.len()
    }

    /// `{H, X3}` for the given coefficients, computed from the column images.
    pub fn image(&self, coeffs: &[Rational]) -> Result<Polynomial, FinderError> {
        let vars = self.images.first().map(|p| p.vars().clone()).unwrap_or_else(VarSet::phase_space);
        let mut out = Polynomial::zero(&vars);
        for (c, p) in coeffs.iter().zip(&self.images) {
            if !c.is_zero() {
                out = out.add(&p.scale(c))?;
            }
        }
        Ok(out)
    }
}

pub fn build_system(h: &Observable, ansatz: &Ansatz) -> Result<LinearSystem, FinderError> {
    if !h.poly().free_symbols().is_empty() {
        return Err(FinderError::Symbolic);
    }
    let h = h.poly().restrict(ansatz.vars())?;
    let images: Vec<Polynomial> = ansatz
        .basis
        .par_iter()
        .map(|b| poisson(&h, b))
        .collect::<Result<_, _>>()?;
    let cols: Vec<&Polynomial> = images.iter().collect();
    let (rows, row_labels) = rows_of_columns(&cols);
    Ok(LinearSystem { unknowns: ansatz.unknowns.clone(), row_labels, rows, images })
}
