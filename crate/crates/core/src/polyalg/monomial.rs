use std::cmp::Ordering;

/// Exponent vector, one entry per variable of the owning [`VarSet`](super::VarSet).
///
/// Ordered graded-lexicographically: total degree first, then the exponent
/// of the earliest variable.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(Box<[u8]>);

impl Monomial {
    pub fn one(n_vars: usize) -> Self {
        Monomial(vec![0; n_vars].into_boxed_slice())
    }

    pub fn var(n_vars: usize, idx: usize) -> Self {
        let mut e = vec![0; n_vars];
        e[idx] = 1;
        Monomial(e.into_boxed_slice())
    }

    pub fn from_exponents(exps: Vec<u8>) -> Self {
        Monomial(exps.into_boxed_slice())
    }

    pub fn exponents(&self) -> &[u8] {
        &self.0
    }

    pub fn exponent(&self, idx: usize) -> u8 {
        self.0[idx]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| u32::from(e)).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    /// Product of monomials. Callers guarantee the degree guard, so no
    /// exponent can exceed `u8`.
    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(other.0.iter()).map(|(a, b)| a + b).collect())
    }

    /// Derivative with respect to `idx`: the exponent that came down and the
    /// lowered monomial, or `None` if the variable is absent.
    pub fn lower(&self, idx: usize) -> Option<(u8, Monomial)> {
        let e = self.0[idx];
        if e == 0 {
            return None;
        }
        let mut out = self.0.clone();
        out[idx] -= 1;
        Some((e, Monomial(out)))
    }

    /// Degree restricted to a subset of variables.
    pub fn degree_in(&self, idxs: &[usize]) -> u32 {
        idxs.iter().map(|&i| u32::from(self.0[i])).sum()
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_before_lex() {
        let x2 = Monomial::from_exponents(vec![2, 0]);
        let xy = Monomial::from_exponents(vec![1, 1]);
        let y3 = Monomial::from_exponents(vec![0, 3]);
        assert!(xy < x2);
        assert!(x2 < y3);
    }

    #[test]
    fn lower_and_mul() {
        let m = Monomial::from_exponents(vec![2, 1]);
        let (e, l) = m.lower(0).unwrap();
        assert_eq!(e, 2);
        assert_eq!(l.exponents(), &[1, 1]);
        assert!(m.lower(1).unwrap().1.mul(&Monomial::var(2, 1)) == m);
        assert!(Monomial::one(2).lower(0).is_none());
    }
}
