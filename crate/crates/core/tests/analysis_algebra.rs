use maglab::analysis::{
    algebra_report, generic_rank, verify_dependence_identity, AlgebraCase,
};
use maglab::polyalg::{poisson, Polynomial};
use maglab::systems::{Family, ParamValue, Params};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn failing(rep: &maglab::analysis::AlgebraReport) -> Vec<String> {
    rep.relations
        .iter()
        .filter(|r| !r.matches_expected)
        .map(|r| format!("{}: {}", r.name, r.residual))
        .collect()
}

#[test]
fn symbolic_generic_algebra() {
    let rep = algebra_report(AlgebraCase::Generic, &Params::symbolic()).unwrap();
    assert!(rep.passed, "{:?}", failing(&rep));
}

#[test]
fn symbolic_bz0_algebra() {
    let rep = algebra_report(AlgebraCase::Bz0, &Params::symbolic()).unwrap();
    assert!(rep.passed, "{:?}", failing(&rep));
    assert_eq!(rep.relations.len(), 10);
    assert!(rep.table.is_antisymmetric());
}

#[test]
fn symbolic_bz0_w0_algebra() {
    let rep = algebra_report(AlgebraCase::Bz0W0, &Params::symbolic()).unwrap();
    assert!(rep.passed, "{:?}", failing(&rep));
    assert!(verify_dependence_identity(&Params::symbolic()).unwrap().is_zero());
}

#[test]
fn rotation_integral_fails_for_nonzero_w() {
    let f = Family::new(&Params::symbolic().with("b_z", ParamValue::int(0))).unwrap();
    let h = f.hamiltonian().unwrap();
    assert!(!poisson(h.poly(), f.x3_rotation().unwrap().poly()).unwrap().is_zero());
}

#[test]
fn free_limit_of_dependence_identity() {
    // b_φ = 0 leaves (X1b)² = (2H − p3² − X1a)X1a with X1a = p1², X1b = p1 p2.
    let p = Params::zero();
    assert!(verify_dependence_identity(&p).unwrap().is_zero());
    let f = Family::new(&p).unwrap();
    let [xa, xb, _] = f.split_integrals().unwrap();
    let v = f.vars();
    let p1 = Polynomial::var(v, "p1").unwrap();
    let p2 = Polynomial::var(v, "p2").unwrap();
    assert_eq!(xa.poly(), &p1.mul(&p1).unwrap());
    assert_eq!(xb.poly(), &p1.mul(&p2).unwrap());
}

fn bz0_draw(seed: u64, w_zero: bool) -> Family {
    let mut p = Params::random_generic(&mut ChaCha8Rng::seed_from_u64(seed), 9).with("b_z", ParamValue::int(0));
    if w_zero {
        p = p.with("w1", ParamValue::int(0)).with("w2", ParamValue::int(0));
    }
    Family::new(&p).unwrap()
}

#[test]
fn superintegrable_ranks_are_seed_invariant() {
    for seed in [1, 2, 3] {
        let f = bz0_draw(seed, false);
        let obs = ["H", "X1a", "X1b", "X3_1"].map(|n| f.observable(n).unwrap());
        assert_eq!(generic_rank(&obs, 20, seed).unwrap().generic_rank, 4);

        let f = bz0_draw(seed, true);
        let four = ["H", "X1a", "X3_1", "X3_2"].map(|n| f.observable(n).unwrap());
        assert_eq!(generic_rank(&four, 20, seed).unwrap().generic_rank, 4);
        let five = ["H", "X1a", "X1b", "X3_1", "X3_2"].map(|n| f.observable(n).unwrap());
        assert_eq!(generic_rank(&five, 20, seed).unwrap().generic_rank, 4);
    }
}
