use std::collections::HashMap;
use std::fmt;

use crate::polyalg::{CompiledPoly, PolyError, Polynomial, Rational, VarSet};

use super::PhasePoint;

/// A named phase-space polynomial with its six first partials cached.
///
/// Partials are ordered `∂/∂x, ∂/∂y, ∂/∂z, ∂/∂p1, ∂/∂p2, ∂/∂p3`. When no
/// parameter symbol remains, float-evaluation forms are compiled too.
#[derive(Clone)]
pub struct Observable {
    name: String,
    poly: Polynomial,
    partials: [Polynomial; 6],
    compiled: Option<Box<Compiled>>,
}

#[derive(Clone)]
struct Compiled {
    value: CompiledPoly,
    partials: [CompiledPoly; 6],
}

impl Observable {
    pub fn new(name: impl Into<String>, poly: Polynomial) -> Self {
        let partials = std::array::from_fn(|k| poly.diff_at(k));
        let compiled = if poly.free_symbols().is_empty() {
            let ps = VarSet::phase_space();
            let restrict = |p: &Polynomial| {
                CompiledPoly::new(&p.restrict(&ps).expect("no parameter symbols remain"))
            };
            Some(Box::new(Compiled {
                value: restrict(&poly),
                partials: std::array::from_fn(|k| restrict(&partials[k])),
            }))
        } else {
            None
        };
        Observable {
            name: name.into(),
            poly,
            partials,
            compiled,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn poly(&self) -> &Polynomial {
        &self.poly
    }

    /// Cached `∂/∂x_k` for k < 3 and `∂/∂p_{k-2}` for k ≥ 3.
    pub fn partial(&self, k: usize) -> &Polynomial {
        &self.partials[k]
    }

    pub fn partials(&self) -> &[Polynomial; 6] {
        &self.partials
    }

    /// True when the polynomial contains no parameter symbol, so it can be
    /// evaluated at a bare phase point.
    pub fn is_numeric(&self) -> bool {
        self.compiled.is_some()
    }

    fn compiled(&self) -> &Compiled {
        self.compiled.as_deref().unwrap_or_else(|| {
            panic!(
                "observable `{}` still contains parameter symbols; specialize it first",
                self.name
            )
        })
    }

    /// Value at a phase point. Panics unless [`is_numeric`](Self::is_numeric).
    pub fn value(&self, s: &PhasePoint) -> f64 {
        self.compiled().value.eval(&s.0)
    }

    /// Gradient `(∂/∂x_k, ∂/∂p_k)` at a phase point. Panics unless numeric.
    pub fn gradient(&self, s: &PhasePoint) -> [f64; 6] {
        let c = self.compiled();
        std::array::from_fn(|k| c.partials[k].eval(&s.0))
    }

    /// Binds parameter symbols to values, keeping the same name.
    pub fn specialize(&self, values: &HashMap<String, Rational>) -> Result<Observable, PolyError> {
        Ok(Observable::new(self.name.clone(), self.poly.substitute_values(values)?))
    }

    pub fn renamed(&self, name: impl Into<String>) -> Observable {
        Observable {
            name: name.into(),
            ..self.clone()
        }
    }
}

impl fmt::Debug for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Observable({}: {})", self.name, self.poly)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cached_partials_match_diff() {
        let vs = VarSet::with_parameters();
        let p = Polynomial::parse(&vs, "x^2*p1 + b_phi*y*p3 - z").unwrap();
        let o = Observable::new("F", p.clone());
        for k in 0..6 {
            assert_eq!(o.partial(k), &p.diff_at(k));
        }
        assert!(!o.is_numeric());
        let vals: HashMap<String, Rational> =
            [("b_phi".to_string(), Rational::from_integer(2.into()))].into();
        let n = o.specialize(&vals).unwrap();
        assert!(n.is_numeric());
        let s = PhasePoint([1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        assert_eq!(n.value(&s), 4.0 + 24.0 - 3.0);
        assert_eq!(n.gradient(&s), [8.0, 12.0, -1.0, 1.0, 0.0, 4.0]);
    }
}
