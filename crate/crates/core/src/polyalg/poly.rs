use std::collections::btree_map::Entry as BEntry;
use std::collections::hash_map::Entry as HEntry;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{format_rational, Monomial, PolyError, Rational, VarSet, MAX_DEGREE};

/// Sparse polynomial in canonical form: no zero coefficients are stored.
#[derive(Clone, Debug)]
pub struct Polynomial {
    vars: Arc<VarSet>,
    terms: BTreeMap<Monomial, Rational>,
}

impl PartialEq for Polynomial {
    fn eq(&self, other: &Self) -> bool {
        VarSet::same(&self.vars, &other.vars) && self.terms == other.terms
    }
}

impl Eq for Polynomial {}

fn check_degree(degree: u32) -> Result<(), PolyError> {
    if degree > MAX_DEGREE {
        Err(PolyError::DegreeLimit {
            degree,
            limit: MAX_DEGREE,
        })
    } else {
        Ok(())
    }
}

impl Polynomial {
    pub fn zero(vars: &Arc<VarSet>) -> Self {
        Polynomial {
            vars: vars.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(vars: &Arc<VarSet>) -> Self {
        Self::constant(vars, Rational::one())
    }

    pub fn constant(vars: &Arc<VarSet>, c: Rational) -> Self {
        let mut p = Self::zero(vars);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(vars.len()), c);
        }
        p
    }

    pub fn integer(vars: &Arc<VarSet>, c: i64) -> Self {
        Self::constant(vars, Rational::from_integer(BigInt::from(c)))
    }

    pub fn var(vars: &Arc<VarSet>, name: &str) -> Result<Self, PolyError> {
        let idx = vars
            .index_of(name)
            .ok_or_else(|| PolyError::UnknownVariable(name.to_string()))?;
        Ok(Self::var_at(vars, idx))
    }

    /// The variable at position `idx`; panics when out of range.
    pub fn var_at(vars: &Arc<VarSet>, idx: usize) -> Self {
        let mut p = Self::zero(vars);
        p.terms.insert(Monomial::var(vars.len(), idx), Rational::one());
        p
    }

    /// Builds a canonical polynomial from possibly repeated or zero terms.
    pub fn from_terms<I>(vars: &Arc<VarSet>, terms: I) -> Result<Self, PolyError>
    where
        I: IntoIterator<Item = (Monomial, Rational)>,
    {
        let mut out = Self::zero(vars);
        for (m, c) in terms {
            if m.len() != vars.len() {
                return Err(PolyError::InvalidVarSet(format!(
                    "exponent vector of length {} for {} variables",
                    m.len(),
                    vars.len()
                )));
            }
            check_degree(m.degree())?;
            out.add_term(m, c);
        }
        Ok(out)
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            BEntry::Vacant(e) => {
                e.insert(c);
            }
            BEntry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    fn from_accumulator(vars: &Arc<VarSet>, acc: HashMap<Monomial, Rational>) -> Self {
        Polynomial {
            vars: vars.clone(),
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    pub fn vars(&self) -> &Arc<VarSet> {
        &self.vars
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> + '_ {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coefficient(&Monomial::one(self.vars.len()))
    }

    /// Total degree; zero for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.keys().next_back().map_or(0, Monomial::degree)
    }

    /// Highest power of variable `idx` present.
    pub fn degree_in_var(&self, idx: usize) -> u32 {
        self.terms
            .keys()
            .map(|m| u32::from(m.exponent(idx)))
            .max()
            .unwrap_or(0)
    }

    pub fn depends_on(&self, idx: usize) -> bool {
        self.terms.keys().any(|m| m.exponent(idx) > 0)
    }

    /// Parameter symbols (non phase-space variables) that actually occur.
    pub fn free_symbols(&self) -> Vec<&str> {
        (PHASE_LEN..self.vars.len())
            .filter(|&i| self.depends_on(i))
            .map(|i| self.vars.name(i))
            .collect()
    }

    pub fn involves_momenta(&self) -> bool {
        (3..6).any(|i| self.depends_on(i))
    }

    fn check_same(&self, other: &Self) -> Result<(), PolyError> {
        if VarSet::same(&self.vars, &other.vars) {
            Ok(())
        } else {
            Err(PolyError::VarSetMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_same(other)?;
        let (mut out, small) = if self.terms.len() >= other.terms.len() {
            (self.clone(), other)
        } else {
            (other.clone(), self)
        };
        for (m, c) in &small.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, PolyError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Polynomial {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, k: &Rational) -> Self {
        if k.is_zero() {
            return Self::zero(&self.vars);
        }
        Polynomial {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect(),
        }
    }

    pub fn scale_int(&self, k: i64) -> Self {
        self.scale(&Rational::from_integer(BigInt::from(k)))
    }

    pub fn mul(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_same(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(&self.vars));
        }
        check_degree(self.degree() + other.degree())?;
        let mut acc: HashMap<Monomial, Rational> =
            HashMap::with_capacity(self.terms.len() * other.terms.len());
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let c = c1 * c2;
                match acc.entry(m1.mul(m2)) {
                    HEntry::Occupied(mut e) => *e.get_mut() += c,
                    HEntry::Vacant(e) => {
                        e.insert(c);
                    }
                }
            }
        }
        Ok(Self::from_accumulator(&self.vars, acc))
    }

    pub fn pow(&self, n: u32) -> Result<Self, PolyError> {
        if n == 0 {
            return Ok(Self::one(&self.vars));
        }
        if !self.is_zero() {
            check_degree(self.degree().saturating_mul(n))?;
        }
        let mut out = self.clone();
        for _ in 1..n {
            out = out.mul(self)?;
        }
        Ok(out)
    }

    /// Sum of a list, starting from zero in `vars`.
    pub fn sum<'a, I>(vars: &Arc<VarSet>, items: I) -> Result<Self, PolyError>
    where
        I: IntoIterator<Item = &'a Polynomial>,
    {
        items
            .into_iter()
            .try_fold(Self::zero(vars), |acc, p| acc.add(p))
    }

    /// Product of a list, starting from one in `vars`.
    pub fn product<'a, I>(vars: &Arc<VarSet>, items: I) -> Result<Self, PolyError>
    where
        I: IntoIterator<Item = &'a Polynomial>,
    {
        items
            .into_iter()
            .try_fold(Self::one(vars), |acc, p| acc.mul(p))
    }

    pub fn diff(&self, name: &str) -> Result<Self, PolyError> {
        let idx = self
            .vars
            .index_of(name)
            .ok_or_else(|| PolyError::UnknownVariable(name.to_string()))?;
        Ok(self.diff_at(idx))
    }

    /// Partial derivative with respect to the variable at position `idx`.
    pub fn diff_at(&self, idx: usize) -> Self {
        let mut out = Self::zero(&self.vars);
        for (m, c) in &self.terms {
            if let Some((e, lowered)) = m.lower(idx) {
                // Distinct monomials lower to distinct monomials.
                out.terms.insert(lowered, c * Rational::from_integer(BigInt::from(e)));
            }
        }
        out
    }

    /// Exact value with every variable bound to a rational.
    pub fn eval_exact(&self, point: &HashMap<String, Rational>) -> Result<Rational, PolyError> {
        let values = self.bind_all(point)?;
        let mut total = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.exponents().iter().enumerate() {
                if e > 0 {
                    t *= num_traits::pow(values[i].clone(), e as usize);
                }
            }
            total += t;
        }
        Ok(total)
    }

    /// Floating-point value with every variable bound.
    pub fn eval_f64(&self, point: &HashMap<String, f64>) -> Result<f64, PolyError> {
        let values = self.bind_all(point)?;
        Ok(self.eval_f64_slice(&values))
    }

    /// Floating-point value at a point given in variable order.
    ///
    /// Panics if `point` is shorter than the variable set.
    pub fn eval_f64_slice(&self, point: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| {
                m.exponents()
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .fold(rational_to_f64(c), |acc, (i, &e)| {
                        acc * point[i].powi(i32::from(e))
                    })
            })
            .sum()
    }

    /// Looks up a value for every variable that occurs with nonzero exponent;
    /// absent variables get a placeholder that is never read.
    fn bind_all<T: Clone + Default>(&self, point: &HashMap<String, T>) -> Result<Vec<T>, PolyError> {
        (0..self.vars.len())
            .map(|i| {
                let name = self.vars.name(i);
                match point.get(name) {
                    Some(v) => Ok(v.clone()),
                    None if self.depends_on(i) => Err(PolyError::Unbound(name.to_string())),
                    None => Ok(T::default()),
                }
            })
            .collect()
    }

    /// Simultaneous substitution of variables by polynomials in the same set.
    pub fn substitute(&self, bindings: &HashMap<String, Polynomial>) -> Result<Self, PolyError> {
        let mut by_idx: Vec<Option<&Polynomial>> = vec![None; self.vars.len()];
        for (name, p) in bindings {
            let idx = self
                .vars
                .index_of(name)
                .ok_or_else(|| PolyError::UnknownVariable(name.clone()))?;
            self.check_same(p)?;
            by_idx[idx] = Some(p);
        }
        let mut powers: HashMap<(usize, u8), Polynomial> = HashMap::new();
        let mut out = Self::zero(&self.vars);
        for (m, c) in &self.terms {
            let mut kept = m.exponents().to_vec();
            let mut factors = Vec::new();
            for (i, e) in kept.iter_mut().enumerate() {
                if *e > 0 {
                    if let Some(p) = by_idx[i] {
                        let key = (i, *e);
                        if let HEntry::Vacant(slot) = powers.entry(key) {
                            slot.insert(p.pow(u32::from(*e))?);
                        }
                        factors.push(key);
                        *e = 0;
                    }
                }
            }
            let mut term = Polynomial::zero(&self.vars);
            term.terms.insert(Monomial::from_exponents(kept), c.clone());
            for key in factors {
                term = term.mul(&powers[&key])?;
            }
            out = out.add(&term)?;
        }
        Ok(out)
    }

    /// Binds parameter symbols to rational values.
    pub fn substitute_values(&self, values: &HashMap<String, Rational>) -> Result<Self, PolyError> {
        let bindings = values
            .iter()
            .map(|(k, v)| (k.clone(), Polynomial::constant(&self.vars, v.clone())))
            .collect();
        self.substitute(&bindings)
    }

    /// Re-expresses the polynomial in another variable set, matching by name.
    pub fn restrict(&self, target: &Arc<VarSet>) -> Result<Self, PolyError> {
        let map: Vec<Option<usize>> = (0..self.vars.len())
            .map(|i| target.index_of(self.vars.name(i)))
            .collect();
        let mut out = Self::zero(target);
        for (m, c) in &self.terms {
            let mut e = vec![0u8; target.len()];
            for (i, &k) in m.exponents().iter().enumerate() {
                if k == 0 {
                    continue;
                }
                match map[i] {
                    Some(j) => e[j] = k,
                    None => return Err(PolyError::NotRepresentable(self.vars.name(i).to_string())),
                }
            }
            out.terms.insert(Monomial::from_exponents(e), c.clone());
        }
        Ok(out)
    }

    pub(crate) fn monomial_string(&self, m: &Monomial) -> String {
        let parts: Vec<String> = m
            .exponents()
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| {
                if e == 1 {
                    self.vars.name(i).to_string()
                } else {
                    format!("{}^{}", self.vars.name(i), e)
                }
            })
            .collect();
        parts.join("*")
    }
}

const PHASE_LEN: usize = super::PHASE_VARS.len();

/// Nearest float; falls back on dividing the converted parts when the
/// ratio itself does not convert.
pub fn rational_to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        let n = q.numer().to_f64().unwrap_or(f64::NAN);
        let d = q.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Canonical Poisson bracket `Σ_k (∂p/∂x_k ∂q/∂p_k − ∂q/∂x_k ∂p/∂p_k)`.
pub fn poisson(p: &Polynomial, q: &Polynomial) -> Result<Polynomial, PolyError> {
    p.check_same(q)?;
    let mut out = Polynomial::zero(&p.vars);
    for k in 0..3 {
        let a = p.diff_at(k).mul(&q.diff_at(k + 3))?;
        let b = q.diff_at(k).mul(&p.diff_at(k + 3))?;
        out = out.add(&a)?.sub(&b)?;
    }
    Ok(out)
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            let mono = self.monomial_string(m);
            if mono.is_empty() {
                write!(f, "{}", format_rational(&abs))?;
            } else if abs.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{}*{}", format_rational(&abs), mono)?;
            }
        }
        Ok(())
    }
}
