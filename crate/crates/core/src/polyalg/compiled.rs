use super::poly::rational_to_f64;
use super::Polynomial;

/// Float-evaluation form of a [`Polynomial`]: coefficients rounded once and
/// each monomial stored as its nonzero `(variable, exponent)` pairs.
#[derive(Clone, Debug)]
pub struct CompiledPoly {
    n_vars: usize,
    terms: Vec<(f64, Vec<(usize, i32)>)>,
}

impl CompiledPoly {
    pub fn new(p: &Polynomial) -> Self {
        let terms = p
            .terms()
            .map(|(m, c)| {
                let factors = m
                    .exponents()
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(i, &e)| (i, i32::from(e)))
                    .collect();
                (rational_to_f64(c), factors)
            })
            .collect();
        CompiledPoly {
            n_vars: p.vars().len(),
            terms,
        }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    /// Value at `point`, given in variable order.
    ///
    /// Panics if `point` is shorter than the variable set.
    pub fn eval(&self, point: &[f64]) -> f64 {
        assert!(point.len() >= self.n_vars, "point has too few coordinates");
        self.terms
            .iter()
            .map(|(c, fs)| fs.iter().fold(*c, |acc, &(i, e)| acc * point[i].powi(e)))
            .sum()
    }
}
