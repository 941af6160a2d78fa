//! Classical RK4 and the Dormand–Prince 5(4) pair with PI step control.

pub type State = [f64; 6];

fn axpy(y: &State, h: f64, terms: &[(f64, &State)]) -> State {
    std::array::from_fn(|i| y[i] + h * terms.iter().map(|(c, k)| c * k[i]).sum::<f64>())
}

pub fn rk4_step(f: &dyn Fn(&State) -> State, y: &State, h: f64) -> State {
    let k1 = f(y);
    let k2 = f(&axpy(y, 0.5 * h, &[(1.0, &k1)]));
    let k3 = f(&axpy(y, 0.5 * h, &[(1.0, &k2)]));
    let k4 = f(&axpy(y, h, &[(1.0, &k3)]));
    axpy(y, h / 6.0, &[(1.0, &k1), (2.0, &k2), (2.0, &k3), (1.0, &k4)])
}

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// Differences between the fifth- and fourth-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Controller constants: safety factor, step-ratio bounds and PI exponents.
pub const SAFETY: f64 = 0.9;
pub const FAC_MIN: f64 = 0.2;
pub const FAC_MAX: f64 = 10.0;
pub const BETA: f64 = 0.04;
const ALPHA: f64 = 0.2 - 0.75 * BETA;

/// Steps shorter than this mean the problem is stiff or singular.
pub const MIN_STEP: f64 = 1e-14;

pub struct DpStep {
    pub y: State,
    /// Right-hand side at `y`, reused as the first stage of the next step.
    pub f: State,
    /// Largest scaled component of the error estimate; the step is acceptable iff `≤ 1`.
    pub err: f64,
}

pub fn dp45_step(f: &dyn Fn(&State) -> State, y: &State, k1: &State, h: f64, rtol: f64, atol: f64) -> DpStep {
    let k2 = f(&axpy(y, h, &[(A21, k1)]));
    let k3 = f(&axpy(y, h, &[(A31, k1), (A32, &k2)]));
    let k4 = f(&axpy(y, h, &[(A41, k1), (A42, &k2), (A43, &k3)]));
    let k5 = f(&axpy(y, h, &[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
    let k6 = f(&axpy(y, h, &[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]));
    let y5 = axpy(y, h, &[(B1, k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
    let k7 = f(&y5);
    let e = axpy(&[0.0; 6], h, &[(E1, k1), (E3, &k3), (E4, &k4), (E5, &k5), (E6, &k6), (E7, &k7)]);
    let err = (0..6)
        .map(|i| (e[i] / (atol + rtol * y[i].abs().max(y5[i].abs()))).abs())
        .fold(0.0, f64::max);
    DpStep { y: y5, f: k7, err }
}

/// PI step-size controller.
pub struct Controller {
    prev_err: f64,
}

impl Default for Controller {
    fn default() -> Self {
        Controller { prev_err: 1e-4 }
    }
}

impl Controller {
    /// Step factor after an attempt with error `err`; remembers accepted
    /// errors only.
    pub fn factor(&mut self, err: f64, accepted: bool) -> f64 {
        let err = err.max(1e-10);
        let fac = if accepted {
            let f = SAFETY * err.powf(-ALPHA) * self.prev_err.powf(BETA);
            self.prev_err = err;
            f
        } else {
            SAFETY * err.powf(-ALPHA)
        };
        let hi = if accepted { FAC_MAX } else { 1.0 };
        fac.clamp(FAC_MIN, hi)
    }
}

/// Initial step from the local scale of `y` and `f(y)`, after Hairer,
/// Nørsett and Wanner.
pub fn initial_step(f: &dyn Fn(&State) -> State, y: &State, f0: &State, rtol: f64, atol: f64) -> f64 {
    let norm = |v: &State| {
        ((0..6).map(|i| (v[i] / (atol + rtol * y[i].abs())).powi(2)).sum::<f64>() / 6.0).sqrt()
    };
    let (d0, d1) = (norm(y), norm(f0));
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let y1 = axpy(y, h0, &[(1.0, f0)]);
    let f1 = f(&y1);
    let diff: State = std::array::from_fn(|i| f1[i] - f0[i]);
    let d2 = norm(&diff) / h0;
    let h1 = if d1.max(d2) <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { (0.01 / d1.max(d2)).powf(0.2) };
    (100.0 * h0).min(h1)
}
