use std::collections::hash_map::Entry;
use std::collections::HashMap;
use std::sync::Arc;

use crate::polyalg::{Monomial, Polynomial, VarSet, PHASE_VARS};

use super::gauge::GaugeChoice;
use super::observable::Observable;
use super::params::Params;
use super::SystemsError;

/// Names accepted by [`Family::observable`].
pub const OBSERVABLE_NAMES: [&str; 9] = ["H", "X1", "X2", "X3_1", "X3_2", "X1a", "X1b", "X1c", "l3A"];

// Closed forms over the standard parameter symbols, instantiated per family.
const W: &str = "b_phi*(-1/8*b_phi*(x^2+y^2)^2 + w3*(x^2+y^2) - b_z*(a/2*(x^2-y^2) + b*x*y) + w1*x + w2*y)";
const FIELD: [&str; 3] = ["-b_phi*y", "b_phi*x", "b_z"];
const DEFAULT_GAUGE: [&str; 3] = ["-1/2*b_z*y", "1/2*b_z*x", "-1/2*b_phi*(x^2+y^2)"];
const X1_LINEAR: [&str; 3] = [
    "-b_z*b*x + b_z*a*y + w2 - y*(1/2*b_phi*(x^2+y^2) - 2*w3)",
    "b_z*b*y + b_z*a*x - w1 + x*(1/2*b_phi*(x^2+y^2) - 2*w3)",
    "-b_phi*a*x^2 - b_phi*b*x*y - 1/2*b_z*(x^2+y^2) + s_z3",
];
const X1_Q: &str = "b_phi^2*(x^2+y^2) + 2*b_z^2 - 4*b_phi*w3 + 2*b_phi*b_z*a";
const X1_M_REST: &str = "(2*b_phi*w1*a + b_phi*w2*b + w1*b_z)*x + (b_phi*w1*b + w2*b_z)*y \
    - 1/4*b_phi*b_z*(x^2+y^2)^2 \
    - 1/2*(b_phi*b_z*b^2 - b_z^2*a - b_phi*s_z3 - 2*w3*b_z)*(x^2+y^2)";
const X2_LINEAR: &str = "b_phi*(x^2+y^2) + S_z1";
const X2_M: &str = "1/4*b_phi^2*(x^2+y^2)^2 + 1/2*b_phi*S_z1*(x^2+y^2)";
const X31_SHIFT: &str = "1/2*b_phi*(x^2+y^2)";
const X1A_TAIL: &str = "-1/2*b_phi^2*x^2*(x^2+y^2) + 2*b_phi*w3*x^2 + 2*b_phi*w1*x";
const X1B_TAIL: &str = "-1/2*b_phi^2*x*y*(x^2+y^2) + 2*b_phi*w3*x*y + b_phi*w2*x + b_phi*w1*y";
const X1C_L3: &str = "1/2*b_phi*(x^2+y^2) - 2*w3";
const X1C_TAIL: &str = "1/2*b_phi*s_z3*(x^2+y^2)";

/// The nine family parameters as polynomials over one variable set.
///
/// Entries may be constants, standard symbols, or expressions in other
/// symbols (used to relabel integration constants).
#[derive(Clone, Debug, PartialEq)]
pub struct ParamPolys {
    pub a: Polynomial,
    pub b: Polynomial,
    pub b_phi: Polynomial,
    pub b_z: Polynomial,
    pub w1: Polynomial,
    pub w2: Polynomial,
    pub w3: Polynomial,
    pub s_z3: Polynomial,
    pub big_s_z1: Polynomial,
}

impl ParamPolys {
    pub fn from_params(p: &Params, vars: &Arc<VarSet>) -> Self {
        let g = |n| p.polynomial(n, vars);
        ParamPolys {
            a: g("a"),
            b: g("b"),
            b_phi: g("b_phi"),
            b_z: g("b_z"),
            w1: g("w1"),
            w2: g("w2"),
            w3: g("w3"),
            s_z3: g("s_z3"),
            big_s_z1: g("S_z1"),
        }
    }

    fn by_symbol(&self, name: &str) -> &Polynomial {
        match name {
            "a" => &self.a,
            "b" => &self.b,
            "b_phi" => &self.b_phi,
            "b_z" => &self.b_z,
            "w1" => &self.w1,
            "w2" => &self.w2,
            "w3" => &self.w3,
            "s_z3" => &self.s_z3,
            "S_z1" => &self.big_s_z1,
            _ => unreachable!("template symbol `{name}`"),
        }
    }

    fn all(&self) -> [&Polynomial; 9] {
        [
            &self.a,
            &self.b,
            &self.b_phi,
            &self.b_z,
            &self.w1,
            &self.w2,
            &self.w3,
            &self.s_z3,
            &self.big_s_z1,
        ]
    }
}

/// One member of the family in a chosen gauge.
#[derive(Clone, Debug)]
pub struct Family {
    vars: Arc<VarSet>,
    params: Option<Params>,
    k: ParamPolys,
    gauge: GaugeChoice,
    extra_potential: Option<Polynomial>,
}

impl Family {
    /// The family for `params` in the default gauge. Fully numeric
    /// parameters give polynomials over phase space alone.
    pub fn new(params: &Params) -> Result<Self, SystemsError> {
        let vars = params.var_set();
        let mut f = Self::from_coefficients(&vars, ParamPolys::from_params(params, &vars))?;
        f.params = Some(params.clone());
        Ok(f)
    }

    /// The family with parameters given as arbitrary position-free
    /// polynomials over `vars`.
    pub fn from_coefficients(vars: &Arc<VarSet>, k: ParamPolys) -> Result<Self, SystemsError> {
        for p in k.all() {
            if p.vars() != vars {
                return Err(crate::polyalg::PolyError::VarSetMismatch.into());
            }
            if (0..PHASE_VARS.len()).any(|i| p.depends_on(i)) {
                return Err(SystemsError::Usage(
                    "parameters must not depend on phase-space variables".into(),
                ));
            }
        }
        let mut f = Family {
            vars: vars.clone(),
            params: None,
            k,
            gauge: GaugeChoice::from_components([
                Polynomial::zero(vars),
                Polynomial::zero(vars),
                Polynomial::zero(vars),
            ])?,
            extra_potential: None,
        };
        f.gauge = f.default_gauge()?;
        Ok(f)
    }

    /// Same family in another gauge; the curl must equal the family's field.
    pub fn with_gauge(mut self, gauge: GaugeChoice) -> Result<Self, SystemsError> {
        self.gauge = GaugeChoice::new(gauge.components().clone(), &self.magnetic_field()?)?;
        Ok(self)
    }

    /// Adds a position-dependent term to the electrostatic potential. The
    /// result is generally no longer integrable.
    pub fn with_extra_potential(mut self, extra: Polynomial) -> Result<Self, SystemsError> {
        if extra.vars() != &self.vars {
            return Err(crate::polyalg::PolyError::VarSetMismatch.into());
        }
        if extra.involves_momenta() {
            return Err(SystemsError::Usage("potential must not depend on momenta".into()));
        }
        self.extra_potential = Some(extra);
        Ok(self)
    }

    pub fn vars(&self) -> &Arc<VarSet> {
        &self.vars
    }

    /// The parameters this family was built from, if built by [`Family::new`].
    pub fn params(&self) -> Option<&Params> {
        self.params.as_ref()
    }

    pub fn coefficients(&self) -> &ParamPolys {
        &self.k
    }

    pub fn gauge(&self) -> &GaugeChoice {
        &self.gauge
    }

    pub fn has_extra_potential(&self) -> bool {
        self.extra_potential.is_some()
    }

    /// Expands a template over the standard symbols into this family's
    /// variable set by substituting each parameter polynomial.
    fn instantiate(&self, template: &str) -> Result<Polynomial, SystemsError> {
        let full = VarSet::with_parameters();
        let t = Polynomial::parse(&full, template)?;
        let n_phase = PHASE_VARS.len();
        let mut powers: HashMap<(usize, u8), Polynomial> = HashMap::new();
        let mut out = Polynomial::zero(&self.vars);
        for (m, c) in t.terms() {
            let mut e = vec![0u8; self.vars.len()];
            e[..n_phase].copy_from_slice(&m.exponents()[..n_phase]);
            let mut term = Polynomial::from_terms(
                &self.vars,
                [(Monomial::from_exponents(e), c.clone())],
            )?;
            for (i, &k) in m.exponents().iter().enumerate().skip(n_phase) {
                if k == 0 {
                    continue;
                }
                if let Entry::Vacant(slot) = powers.entry((i, k)) {
                    slot.insert(self.k.by_symbol(full.name(i)).pow(u32::from(k))?);
                }
                term = term.mul(&powers[&(i, k)])?;
            }
            out = out.add(&term)?;
        }
        Ok(out)
    }

    fn instantiate3(&self, t: [&str; 3]) -> Result<[Polynomial; 3], SystemsError> {
        Ok([self.instantiate(t[0])?, self.instantiate(t[1])?, self.instantiate(t[2])?])
    }

    fn var(&self, k: usize) -> Polynomial {
        Polynomial::var_at(&self.vars, k)
    }

    /// Cartesian `B = (−b_φ y, b_φ x, b_z)`.
    pub fn magnetic_field(&self) -> Result<[Polynomial; 3], SystemsError> {
        self.instantiate3(FIELD)
    }

    /// The family potential `W`, plus any injected extra term.
    pub fn electrostatic_potential(&self) -> Result<Polynomial, SystemsError> {
        let w = self.instantiate(W)?;
        match &self.extra_potential {
            Some(e) => Ok(w.add(e)?),
            None => Ok(w),
        }
    }

    /// `A = (−½b_z y, ½b_z x, −½b_φ(x²+y²))`, checked against the field.
    pub fn default_gauge(&self) -> Result<GaugeChoice, SystemsError> {
        GaugeChoice::new(self.instantiate3(DEFAULT_GAUGE)?, &self.magnetic_field()?)
    }

    /// `V = W + ½|A|²` in the current gauge.
    pub fn scalar_potential(&self) -> Result<Polynomial, SystemsError> {
        let mut v = Polynomial::zero(&self.vars);
        for a in self.gauge.components() {
            v = v.add(&a.mul(a)?)?;
        }
        let half = crate::polyalg::Rational::new(1.into(), 2.into());
        Ok(v.scale(&half).add(&self.electrostatic_potential()?)?)
    }

    /// `p_k + A_k`.
    pub fn covariant_momenta(&self) -> Result<[Polynomial; 3], SystemsError> {
        let a = self.gauge.components();
        Ok([
            self.var(3).add(&a[0])?,
            self.var(4).add(&a[1])?,
            self.var(5).add(&a[2])?,
        ])
    }

    /// `l_i = ε_ijk x_j p_k^A`.
    pub fn covariant_angular_momenta(&self) -> Result<[Polynomial; 3], SystemsError> {
        let [p1, p2, p3] = self.covariant_momenta()?;
        let (x, y, z) = (self.var(0), self.var(1), self.var(2));
        Ok([
            y.mul(&p3)?.sub(&z.mul(&p2)?)?,
            z.mul(&p1)?.sub(&x.mul(&p3)?)?,
            x.mul(&p2)?.sub(&y.mul(&p1)?)?,
        ])
    }

    /// `H = ½|p + A|² + W`.
    pub fn hamiltonian(&self) -> Result<Observable, SystemsError> {
        let mut kin = Polynomial::zero(&self.vars);
        for p in self.covariant_momenta()? {
            kin = kin.add(&p.mul(&p)?)?;
        }
        let half = crate::polyalg::Rational::new(1.into(), 2.into());
        let h = kin.scale(&half).add(&self.electrostatic_potential()?)?;
        Ok(Observable::new("H", h))
    }

    /// `X1 = l3ᴬp3ᴬ + a(p1ᴬ)² + b p1ᴬp2ᴬ + Σ s_k pₖᴬ + m`, with `m(0) = 0`.
    pub fn x1(&self) -> Result<Observable, SystemsError> {
        let pa = self.covariant_momenta()?;
        let l3 = &self.covariant_angular_momenta()?[2];
        let s = self.instantiate3(X1_LINEAR)?;
        let k = &self.k;
        let mut x1 = l3
            .mul(&pa[2])?
            .add(&k.a.mul(&pa[0].mul(&pa[0])?)?)?
            .add(&k.b.mul(&pa[0].mul(&pa[1])?)?)?;
        for (sk, pk) in s.iter().zip(&pa) {
            x1 = x1.add(&sk.mul(pk)?)?;
        }
        Ok(Observable::new("X1", x1.add(&self.x1_potential_term()?)?))
    }

    /// `m = −½Q(a x² + b xy) + ...`, the momentum-free part of `X1`.
    fn x1_potential_term(&self) -> Result<Polynomial, SystemsError> {
        let q = self.instantiate(X1_Q)?;
        let (x, y) = (self.var(0), self.var(1));
        let quad = self.k.a.mul(&x.mul(&x)?)?.add(&self.k.b.mul(&x.mul(&y)?)?)?;
        let half = crate::polyalg::Rational::new((-1).into(), 2.into());
        Ok(q.mul(&quad)?.scale(&half).add(&self.instantiate(X1_M_REST)?)?)
    }

    /// `X2 = (p3ᴬ)² + (b_φ r² + S_z1) p3ᴬ + ¼b_φ²r⁴ + ½b_φ S_z1 r²`.
    pub fn x2(&self) -> Result<Observable, SystemsError> {
        let p3 = &self.covariant_momenta()?[2];
        let x2 = p3
            .mul(p3)?
            .add(&self.instantiate(X2_LINEAR)?.mul(p3)?)?
            .add(&self.instantiate(X2_M)?)?;
        Ok(Observable::new("X2", x2))
    }

    /// First-order integral `p3ᴬ + ½b_φ r²`; equals `p3` in the default gauge.
    pub fn x3_first(&self) -> Result<Observable, SystemsError> {
        let p3 = &self.covariant_momenta()?[2];
        Ok(Observable::new("X3_1", p3.add(&self.instantiate(X31_SHIFT)?)?))
    }

    /// `l3ᴬ`; conserved only when `b_z = w1 = w2 = 0`.
    pub fn x3_rotation(&self) -> Result<Observable, SystemsError> {
        Ok(Observable::new("X3_2", self.covariant_angular_momenta()?[2].clone()))
    }

    /// `(X1a, X1b, X1c)` with `X1 = a·X1a + b·X1b + X1c`; requires `b_z = 0`.
    pub fn split_integrals(&self) -> Result<[Observable; 3], SystemsError> {
        if !self.k.b_z.is_zero() {
            return Err(SystemsError::Usage(
                "the split of X1 is conserved only for b_z = 0".into(),
            ));
        }
        let pa = self.covariant_momenta()?;
        let l3 = &self.covariant_angular_momenta()?[2];
        let (x, y) = (self.var(0), self.var(1));
        let bphi = &self.k.b_phi;
        let xa = pa[0]
            .mul(&pa[0])?
            .sub(&bphi.mul(&x.mul(&x)?)?.mul(&pa[2])?)?
            .add(&self.instantiate(X1A_TAIL)?)?;
        let xb = pa[0]
            .mul(&pa[1])?
            .sub(&bphi.mul(&x.mul(&y)?)?.mul(&pa[2])?)?
            .add(&self.instantiate(X1B_TAIL)?)?;
        let xc = l3
            .mul(&pa[2])?
            .add(&self.k.w2.mul(&pa[0])?)?
            .sub(&self.k.w1.mul(&pa[1])?)?
            .add(&self.instantiate(X1C_L3)?.mul(l3)?)?
            .add(&self.k.s_z3.mul(&pa[2])?)?
            .add(&self.instantiate(X1C_TAIL)?)?;
        Ok([
            Observable::new("X1a", xa),
            Observable::new("X1b", xb),
            Observable::new("X1c", xc),
        ])
    }

    /// Looks up an observable by one of [`OBSERVABLE_NAMES`].
    pub fn observable(&self, name: &str) -> Result<Observable, SystemsError> {
        match name {
            "H" => self.hamiltonian(),
            "X1" => self.x1(),
            "X2" => self.x2(),
            "X3_1" => self.x3_first(),
            "X3_2" => self.x3_rotation(),
            "l3A" => Ok(self.x3_rotation()?.renamed("l3A")),
            "X1a" | "X1b" | "X1c" => {
                let [a, b, c] = self.split_integrals()?;
                Ok(match name {
                    "X1a" => a,
                    "X1b" => b,
                    _ => c,
                })
            }
            _ => Err(SystemsError::Usage(format!(
                "unknown observable `{name}` (expected one of {})",
                OBSERVABLE_NAMES.join(", ")
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::poisson;
    use crate::systems::params::ParamValue;

    fn numeric(pairs: &[(&str, i64)]) -> Params {
        pairs
            .iter()
            .fold(Params::zero(), |p, &(k, v)| p.with(k, ParamValue::int(v)))
    }

    fn ps(s: &str) -> Polynomial {
        Polynomial::parse(&VarSet::phase_space(), s).unwrap()
    }

    fn full(s: &str) -> Polynomial {
        Polynomial::parse(&VarSet::with_parameters(), s).unwrap()
    }

    #[test]
    fn field_examples() {
        let f = Family::new(&numeric(&[("b_phi", 3), ("b_z", 2)])).unwrap();
        assert_eq!(f.magnetic_field().unwrap(), [ps("-3*y"), ps("3*x"), ps("2")]);
        let f = Family::new(&Params::zero()).unwrap();
        assert!(f.magnetic_field().unwrap().iter().all(Polynomial::is_zero));
        let f = Family::new(&numeric(&[("b_z", 1)])).unwrap();
        assert_eq!(f.magnetic_field().unwrap(), [ps("0"), ps("0"), ps("1")]);
    }

    #[test]
    fn potential_examples() {
        let f = Family::new(&Params::symbolic().with("b_phi", ParamValue::int(0))).unwrap();
        assert!(f.electrostatic_potential().unwrap().is_zero());
        let p = Params::symbolic()
            .with("b_z", ParamValue::int(0))
            .with("w1", ParamValue::int(0))
            .with("w2", ParamValue::int(0));
        let w = Family::new(&p).unwrap().electrostatic_potential().unwrap();
        assert_eq!(w, full("-1/8*b_phi^2*(x^2+y^2)^2 + b_phi*w3*(x^2+y^2)"));
        let b0 = Family::new(&Params::symbolic().with("b", ParamValue::int(0))).unwrap();
        let w = b0.electrostatic_potential().unwrap();
        assert!(w.terms().all(|(m, _)| !(m.exponent(0) % 2 == 1 && m.exponent(1) % 2 == 1)));
    }

    #[test]
    fn default_gauge_example() {
        let f = Family::new(&numeric(&[("b_phi", 3), ("b_z", 2)])).unwrap();
        let g = f.default_gauge().unwrap();
        assert_eq!(g.components(), &[ps("-y"), ps("x"), ps("-3/2*(x^2+y^2)")]);
        assert_eq!(g.curl().unwrap(), [ps("-3*y"), ps("3*x"), ps("2")]);
        let zero = Family::new(&Params::zero()).unwrap();
        assert!(zero.gauge().components().iter().all(Polynomial::is_zero));
    }

    #[test]
    fn with_gauge_rejects_wrong_field() {
        let f = Family::new(&numeric(&[("b_z", 1)])).unwrap();
        let bad = GaugeChoice::from_components([ps("0"), ps("0"), ps("0")]).unwrap();
        assert!(matches!(f.clone().with_gauge(bad), Err(SystemsError::GaugeMismatch)));
        let moved = f.gauge().transform(&ps("x*y")).unwrap();
        assert!(f.with_gauge(moved).is_ok());
    }

    #[test]
    fn hamiltonian_examples() {
        let h = Family::new(&Params::zero()).unwrap().hamiltonian().unwrap();
        assert_eq!(h.poly(), &ps("1/2*(p1^2+p2^2+p3^2)"));
        let hs = Family::new(&Params::symbolic()).unwrap().hamiltonian().unwrap();
        let at_origin = hs
            .poly()
            .substitute(&[("x", "0"), ("y", "0"), ("z", "0")]
                .into_iter()
                .map(|(k, v)| (k.to_string(), full(v)))
                .collect())
            .unwrap();
        assert_eq!(at_origin, full("1/2*(p1^2+p2^2+p3^2)"));
    }

    #[test]
    fn covariant_momentum_examples() {
        let zero = Family::new(&Params::zero()).unwrap();
        assert_eq!(zero.covariant_momenta().unwrap(), [ps("p1"), ps("p2"), ps("p3")]);
        assert_eq!(zero.covariant_angular_momenta().unwrap()[2], ps("x*p2 - y*p1"));
        let f = Family::new(&Params::symbolic()).unwrap();
        assert_eq!(f.covariant_momenta().unwrap()[2], full("p3 - 1/2*b_phi*(x^2+y^2)"));
        let pl = zero
            .covariant_momenta()
            .unwrap()
            .iter()
            .zip(zero.covariant_angular_momenta().unwrap().iter())
            .map(|(p, l)| p.mul(l).unwrap())
            .fold(Polynomial::zero(zero.vars()), |a, t| a.add(&t).unwrap());
        assert!(pl.is_zero());
    }

    #[test]
    fn x1_at_origin() {
        let p = Params::symbolic();
        let x1 = Family::new(&p).unwrap().x1().unwrap();
        let origin = |p3: &str| -> HashMap<String, Polynomial> {
            [("x", "0"), ("y", "0"), ("z", "0"), ("p1", "0"), ("p2", "0"), ("p3", p3)]
                .into_iter()
                .map(|(k, v)| (k.to_string(), full(v)))
                .collect()
        };
        assert!(x1.poly().substitute(&origin("0")).unwrap().is_zero());
        assert_eq!(x1.poly().substitute(&origin("1")).unwrap(), full("s_z3"));
    }

    #[test]
    fn x3_first_is_p3_in_default_gauge() {
        let f = Family::new(&Params::symbolic()).unwrap();
        assert_eq!(f.x3_first().unwrap().poly(), &full("p3"));
        let z = Family::new(&Params::zero()).unwrap();
        assert_eq!(z.x3_first().unwrap().poly(), &ps("p3"));
    }

    #[test]
    fn x2_at_origin() {
        let f = Family::new(&Params::zero()).unwrap();
        assert_eq!(f.x2().unwrap().value(&super::super::PhasePoint([0., 0., 0., 0., 0., 1.])), 1.0);
    }

    #[test]
    fn rotation_integral_needs_vanishing_w() {
        let p = Params::symbolic().with("b_z", ParamValue::int(0));
        let f = Family::new(&p).unwrap();
        let h = f.hamiltonian().unwrap();
        let br = poisson(h.poly(), f.x3_rotation().unwrap().poly()).unwrap();
        assert_eq!(br, full("b_phi*(w2*x - w1*y)"));
        let q = p.with("w1", ParamValue::int(0)).with("w2", ParamValue::int(0));
        let f = Family::new(&q).unwrap();
        let h = f.hamiltonian().unwrap();
        assert!(poisson(h.poly(), f.x3_rotation().unwrap().poly()).unwrap().is_zero());
    }

    #[test]
    fn split_requires_vanishing_b_z() {
        assert!(Family::new(&Params::symbolic()).unwrap().split_integrals().is_err());
        let f = Family::new(&numeric(&[("b_z", 1)])).unwrap();
        assert!(matches!(f.split_integrals(), Err(SystemsError::Usage(_))));
    }

    #[test]
    fn numeric_families_live_in_phase_space() {
        let f = Family::new(&numeric(&[("a", 1), ("b_phi", 2), ("b_z", -1), ("w3", 3)])).unwrap();
        assert_eq!(f.vars().len(), 6);
        for name in ["H", "X1", "X2", "X3_1", "X3_2", "l3A"] {
            assert!(f.observable(name).unwrap().is_numeric(), "{name}");
        }
        assert!(f.observable("nope").is_err());
    }

    #[test]
    fn extra_potential_is_added() {
        let f = Family::new(&Params::zero()).unwrap().with_extra_potential(ps("z")).unwrap();
        assert_eq!(f.electrostatic_potential().unwrap(), ps("z"));
        assert!(Family::new(&Params::zero()).unwrap().with_extra_potential(ps("p1")).is_err());
    }
}
