use std::collections::HashMap;

use maglab::polyalg::{poisson, Polynomial, Rational, VarSet};
use maglab::systems::{
    field_to_cartesian, from_cylindrical, to_cylindrical, Family, ParamValue, Params, PhasePoint,
};
use proptest::prelude::*;

fn full(s: &str) -> Polynomial {
    Polynomial::parse(&VarSet::with_parameters(), s).unwrap()
}

fn assert_zero(label: &str, p: &Polynomial) {
    assert!(p.is_zero(), "{label} = {p}");
}

#[test]
fn symbolic_involutions_vanish() {
    let f = Family::new(&Params::symbolic()).unwrap();
    let h = f.hamiltonian().unwrap();
    let x1 = f.x1().unwrap();
    let x2 = f.x2().unwrap();
    let x31 = f.x3_first().unwrap();
    let pairs = [
        ("{H,X1}", &h, &x1),
        ("{H,X2}", &h, &x2),
        ("{X1,X2}", &x1, &x2),
        ("{H,X3_1}", &h, &x31),
        ("{X1,X3_1}", &x1, &x31),
        ("{X2,X3_1}", &x2, &x31),
    ];
    for (label, a, b) in pairs {
        assert_zero(label, &poisson(a.poly(), b.poly()).unwrap());
    }
}

#[test]
fn x2_is_polynomial_in_first_order_integral() {
    let f = Family::new(&Params::symbolic()).unwrap();
    let x31 = f.x3_first().unwrap().poly().clone();
    let rhs = x31.mul(&x31).unwrap().add(&full("S_z1").mul(&x31).unwrap()).unwrap();
    assert_zero("X2 - (X3_1^2 + S_z1 X3_1)", &f.x2().unwrap().poly().sub(&rhs).unwrap());
}

#[test]
fn degree_of_hamiltonian_is_bounded() {
    let f = Family::new(&Params::symbolic()).unwrap();
    let h = f.hamiltonian().unwrap();
    let phase_degree = h
        .poly()
        .terms()
        .map(|(m, _)| m.degree_in(&[0, 1, 2, 3, 4, 5]))
        .max()
        .unwrap();
    assert!(phase_degree <= 8);
}

#[test]
fn split_sum_reproduces_x1() {
    let p = Params::symbolic().with("b_z", ParamValue::int(0));
    let f = Family::new(&p).unwrap();
    let [xa, xb, xc] = f.split_integrals().unwrap();
    let sum = full("a")
        .mul(xa.poly())
        .unwrap()
        .add(&full("b").mul(xb.poly()).unwrap())
        .unwrap()
        .add(xc.poly())
        .unwrap();
    assert_zero("aX1a + bX1b + X1c - X1", &sum.sub(f.x1().unwrap().poly()).unwrap());
    let h = f.hamiltonian().unwrap();
    for o in [&xa, &xb, &xc] {
        assert_zero(o.name(), &poisson(h.poly(), o.poly()).unwrap());
    }
}

#[test]
fn x1c_factors_through_first_order_integrals() {
    let p = Params::symbolic()
        .with("b_z", ParamValue::int(0))
        .with("w1", ParamValue::int(0))
        .with("w2", ParamValue::int(0));
    let f = Family::new(&p).unwrap();
    let [_, _, xc] = f.split_integrals().unwrap();
    let x31 = f.x3_first().unwrap().poly().clone();
    let x32 = f.x3_rotation().unwrap().poly().clone();
    let rhs = x31
        .mul(&x32)
        .unwrap()
        .sub(&full("2*w3").mul(&x32).unwrap())
        .unwrap()
        .add(&full("s_z3").mul(&x31).unwrap())
        .unwrap();
    assert_zero("X1c - ...", &xc.poly().sub(&rhs).unwrap());
    assert_zero("{X3_1,X3_2}", &poisson(&x31, &x32).unwrap());
}

#[test]
fn rotation_bracket_is_nonzero_for_generic_w() {
    let p = Params::zero()
        .with("b_phi", ParamValue::int(1))
        .with("w1", ParamValue::frac(1, 3));
    let f = Family::new(&p).unwrap();
    let br = poisson(f.hamiltonian().unwrap().poly(), f.x3_rotation().unwrap().poly()).unwrap();
    assert!(!br.is_zero());
}

/// Independent expansion of `W + ½|A|²` for `b_z = w = 0, b_φ = 2`.
#[test]
fn scalar_potential_regression() {
    let p = Params::zero().with("b_phi", ParamValue::int(2));
    let f = Family::new(&p).unwrap();
    // W = −½r⁴, ½A_z² = ½r⁴, so V vanishes identically.
    assert!(f.scalar_potential().unwrap().is_zero());
    let moved = f.clone().with_gauge(f.gauge().transform(&full_ps("x")).unwrap()).unwrap();
    assert_eq!(moved.scalar_potential().unwrap(), full_ps("1/2"));
    assert_eq!(moved.electrostatic_potential().unwrap(), f.electrostatic_potential().unwrap());
}

fn full_ps(s: &str) -> Polynomial {
    Polynomial::parse(&VarSet::phase_space(), s).unwrap()
}

#[test]
fn field_transform_matches_cartesian_field() {
    let p = Params::zero()
        .with("b_phi", ParamValue::frac(3, 2))
        .with("b_z", ParamValue::frac(-2, 3));
    let f = Family::new(&p).unwrap();
    let b = f.magnetic_field().unwrap();
    let (bphi, bz) = (1.5, -2.0 / 3.0);
    for &(r, phi) in &[(0.3, 0.1), (1.7, -2.9), (2.5, 3.0)] {
        let s = from_cylindrical(&maglab::systems::CylState {
            r,
            phi,
            z: 0.4,
            p_r: 0.0,
            p_phi: 0.0,
            p_z: 0.0,
        })
        .unwrap();
        let cart = field_to_cartesian(r, phi, [0.0, bphi * r, bz * r]);
        for k in 0..3 {
            let direct = b[k].eval_f64_slice(&s.0);
            assert!((cart[k] - direct).abs() < 1e-12, "component {k}");
        }
    }
}

fn point() -> impl Strategy<Value = [f64; 6]> {
    prop::array::uniform6(-1.0f64..1.0)
}

fn gauge_fn() -> impl Strategy<Value = Polynomial> {
    prop::collection::vec(((0u8..=3, 0u8..=3, 0u8..=3), -5i64..=5), 1..6).prop_map(|ts| {
        let vs = VarSet::phase_space();
        ts.into_iter()
            .filter(|((a, b, c), _)| a + b + c <= 3)
            .fold(Polynomial::zero(&vs), |acc, ((a, b, c), k)| {
                let m = Polynomial::parse(&vs, &format!("{k}*x^{a}*y^{b}*z^{c}")).unwrap();
                acc.add(&m).unwrap()
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(5))]

    #[test]
    fn gauge_covariance(chi in gauge_fn(), s in point()) {
        let p = Params::zero()
            .with("a", ParamValue::frac(1, 2))
            .with("b", ParamValue::frac(-1, 3))
            .with("b_phi", ParamValue::frac(3, 4))
            .with("b_z", ParamValue::int(1))
            .with("w1", ParamValue::frac(1, 5))
            .with("w2", ParamValue::frac(2, 7))
            .with("w3", ParamValue::int(-1))
            .with("s_z3", ParamValue::frac(1, 9))
            .with("S_z1", ParamValue::int(2));
        let base = Family::new(&p).unwrap();
        let moved = base.clone().with_gauge(base.gauge().transform(&chi).unwrap()).unwrap();
        let s0 = PhasePoint(s);
        let mut shifted = s;
        for k in 0..3 {
            shifted[3 + k] -= chi.diff_at(k).eval_f64_slice(&s);
        }
        let s1 = PhasePoint(shifted);
        for name in ["H", "X1", "X2", "X3_1", "l3A"] {
            let a = base.observable(name).unwrap().value(&s0);
            let b = moved.observable(name).unwrap().value(&s1);
            prop_assert!((a - b).abs() <= 1e-10 * (1.0 + a.abs()), "{}: {} vs {}", name, a, b);
        }
    }
}

proptest! {
    #[test]
    fn cylindrical_round_trip(s in point()) {
        prop_assume!(s[0].hypot(s[1]) > 1e-3);
        let back = from_cylindrical(&to_cylindrical(&PhasePoint(s)).unwrap()).unwrap();
        for (b, v) in back.0.iter().zip(&s) {
            prop_assert!((b - v).abs() <= 1e-12 * (1.0 + v.abs()));
        }
    }

    #[test]
    fn symbolic_specialization_matches_numeric_family(
        a in -3i64..3, bphi in -3i64..3, w1 in -3i64..3, s in point()
    ) {
        let sym = Family::new(&Params::symbolic()).unwrap();
        let vals: HashMap<String, Rational> = [
            ("a", a), ("b", 1), ("b_phi", bphi), ("b_z", 2), ("w1", w1),
            ("w2", -1), ("w3", 1), ("s_z3", 0), ("S_z1", 3),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), Rational::from_integer(v.into())))
        .collect();
        let mut p = Params::zero();
        for (k, v) in &vals {
            *p.get_mut(k).unwrap() = ParamValue::Value(v.clone());
        }
        let num = Family::new(&p).unwrap();
        let h_sym = sym.hamiltonian().unwrap().specialize(&vals).unwrap();
        let h_num = num.hamiltonian().unwrap();
        let pt = PhasePoint(s);
        prop_assert!((h_sym.value(&pt) - h_num.value(&pt)).abs() < 1e-12);
    }
}
