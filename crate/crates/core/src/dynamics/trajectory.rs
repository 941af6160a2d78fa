use std::f64::consts::TAU;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::systems::{Observable, PhasePoint};

use super::integrators::{dp45_step, initial_step, rk4_step, Controller, State, MIN_STEP};
use super::{hamiltonian_rhs, DynError, Method, TrajectoryConfig};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Drift {
    pub name: String,
    pub initial: f64,
    pub max_abs_change: f64,
    /// `max |F(t) − F(0)| / max(1, |F(0)|)` over every step.
    pub relative: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<[f64; 6]>,
    pub observables: Vec<String>,
    /// `values[i][k]` is observable `k` at sample `i`.
    pub values: Vec<Vec<f64>>,
    pub drift: Vec<Drift>,
    pub steps: usize,
    pub rejected: usize,
}

impl Trajectory {
    pub fn final_state(&self) -> PhasePoint {
        PhasePoint(*self.states.last().expect("trajectory has a sample"))
    }

    pub fn drift_of(&self, name: &str) -> Option<f64> {
        self.drift.iter().find(|d| d.name == name).map(|d| d.relative)
    }
}

struct Recorder<'a> {
    obs: &'a [Observable],
    stride: usize,
    initial: Vec<f64>,
    max_change: Vec<f64>,
    times: Vec<f64>,
    states: Vec<[f64; 6]>,
    values: Vec<Vec<f64>>,
}

impl<'a> Recorder<'a> {
    fn new(obs: &'a [Observable], stride: usize, y0: &State) -> Self {
        let initial: Vec<f64> = obs.iter().map(|o| o.value(&PhasePoint(*y0))).collect();
        Recorder {
            obs,
            stride,
            max_change: vec![0.0; obs.len()],
            times: vec![0.0],
            states: vec![*y0],
            values: vec![initial.clone()],
            initial,
        }
    }

    /// Updates the drift maxima with the state after step `k` and records it
    /// on stride boundaries or when `force` is set.
    fn step(&mut self, k: usize, t: f64, y: &State, force: bool) -> Result<(), DynError> {
        if !y.iter().all(|v| v.is_finite()) {
            return Err(DynError::NonFinite { t });
        }
        let v: Vec<f64> = self.obs.iter().map(|o| o.value(&PhasePoint(*y))).collect();
        for (m, (x, x0)) in self.max_change.iter_mut().zip(v.iter().zip(&self.initial)) {
            *m = m.max((x - x0).abs());
        }
        if k.is_multiple_of(self.stride) || force {
            self.times.push(t);
            self.states.push(*y);
            self.values.push(v);
        }
        Ok(())
    }

    fn finish(self, steps: usize, rejected: usize) -> Trajectory {
        let drift = self
            .obs
            .iter()
            .zip(self.initial.iter().zip(&self.max_change))
            .map(|(o, (&f0, &m))| Drift {
                name: o.name().to_string(),
                initial: f0,
                max_abs_change: m,
                relative: m / f0.abs().max(1.0),
            })
            .collect();
        Trajectory {
            times: self.times,
            states: self.states,
            observables: self.obs.iter().map(|o| o.name().to_string()).collect(),
            values: self.values,
            drift,
            steps,
            rejected,
        }
    }
}

fn run(
    f: &dyn Fn(&State) -> State,
    y0: &State,
    cfg: &TrajectoryConfig,
    obs: &[Observable],
) -> Result<Trajectory, DynError> {
    cfg.validate()?;
    if let Some(o) = obs.iter().find(|o| !o.is_numeric()) {
        return Err(DynError::NotNumeric(o.name().to_string()));
    }
    let mut rec = Recorder::new(obs, cfg.stride, y0);
    let mut y = *y0;
    match cfg.method {
        Method::Rk4 { dt } => {
            // Tolerate roundoff in t_end/dt so 100/1e-3 gives 10⁵ steps.
            let n = (cfg.t_end / dt + 1e-9).floor() as usize;
            if n > cfg.max_steps {
                return Err(DynError::TooManySteps(cfg.max_steps));
            }
            for k in 1..=n {
                y = rk4_step(f, &y, dt);
                rec.step(k, k as f64 * dt, &y, false)?;
            }
            Ok(rec.finish(n, 0))
        }
        Method::Dp45 { rtol, atol } => {
            let mut fy = f(&y);
            let mut h = initial_step(f, &y, &fy, rtol, atol);
            let mut ctl = Controller::default();
            let (mut t, mut steps, mut rejected) = (0.0, 0usize, 0usize);
            while t < cfg.t_end {
                if steps >= cfg.max_steps {
                    return Err(DynError::TooManySteps(cfg.max_steps));
                }
                if h < MIN_STEP {
                    return Err(DynError::Stiff { t, dt: h });
                }
                let last = t + h >= cfg.t_end;
                let hs = if last { cfg.t_end - t } else { h };
                let st = dp45_step(f, &y, &fy, hs, rtol, atol);
                if st.err.is_finite() && st.err <= 1.0 {
                    t = if last { cfg.t_end } else { t + hs };
                    y = st.y;
                    fy = st.f;
                    steps += 1;
                    rec.step(steps, t, &y, last)?;
                    h = hs * ctl.factor(st.err, true);
                } else {
                    rejected += 1;
                    let err = if st.err.is_finite() { st.err } else { f64::MAX };
                    h = hs * ctl.factor(err, false);
                }
            }
            Ok(rec.finish(steps, rejected))
        }
    }
}

/// Integrates Hamilton's equations of `h` from `s0`, monitoring `obs`.
pub fn integrate(
    h: &Observable,
    s0: &PhasePoint,
    cfg: &TrajectoryConfig,
    obs: &[Observable],
) -> Result<Trajectory, DynError> {
    if !h.is_numeric() {
        return Err(DynError::NotNumeric(h.name().to_string()));
    }
    run(&|y: &State| hamiltonian_rhs(h, &PhasePoint(*y)), &s0.0, cfg, obs)
}

/// Independent trajectories in parallel, results in input order.
pub fn integrate_many(
    h: &Observable,
    starts: &[PhasePoint],
    cfg: &TrajectoryConfig,
    obs: &[Observable],
) -> Vec<Result<Trajectory, DynError>> {
    starts.par_iter().map(|s| integrate(h, s, cfg, obs)).collect()
}

/// How the return leg of a reversal test is integrated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reversal {
    /// The time-reversed field `−X_H`, valid for every Hamiltonian.
    Backward,
    /// Conjugation by `R(x,y,z,p) = (x, y, −z, −p1, −p2, p3)`. `R` is
    /// anti-symplectic and preserves `H` when `b_z = 0`.
    Reflection,
}

fn reflect(s: &State) -> State {
    [s[0], s[1], -s[2], -s[3], -s[4], s[5]]
}

/// `(max |s_back − s0|, one-way relative drift of H)` after integrating
/// `t_end` forward and then returning.
pub fn reversal_error(
    h: &Observable,
    s0: &PhasePoint,
    cfg: &TrajectoryConfig,
    mode: Reversal,
) -> Result<(f64, f64), DynError> {
    let forward = integrate(h, s0, cfg, std::slice::from_ref(h))?;
    let s1 = forward.final_state().0;
    let back = match mode {
        Reversal::Backward => {
            let f = |y: &State| hamiltonian_rhs(h, &PhasePoint(*y)).map(|v| -v);
            run(&f, &s1, cfg, &[])?.final_state().0
        }
        Reversal::Reflection => reflect(&integrate(h, &PhasePoint(reflect(&s1)), cfg, &[])?.final_state().0),
    };
    let err = (0..6).map(|i| (back[i] - s0.0[i]).abs()).fold(0.0, f64::max);
    Ok((err, forward.drift[0].relative))
}

/// Gyration period from the unwrapped angle of the planar velocity: the
/// time of the last complete turn divided by the number of turns.
pub fn cyclotron_period(h: &Observable, traj: &Trajectory) -> Option<f64> {
    let angles: Vec<f64> = traj
        .states
        .iter()
        .map(|s| {
            let d = hamiltonian_rhs(h, &PhasePoint(*s));
            d[1].atan2(d[0])
        })
        .collect();
    let mut unwrapped = Vec::with_capacity(angles.len());
    let mut acc = 0.0;
    for (i, a) in angles.iter().enumerate() {
        if i > 0 {
            let mut d = a - angles[i - 1];
            d -= TAU * (d / TAU).round();
            acc += d;
        }
        unwrapped.push(acc.abs());
    }
    let turns = (unwrapped.last()? / TAU).floor();
    if turns < 1.0 {
        return None;
    }
    let target = turns * TAU;
    let i = unwrapped.iter().position(|&u| u >= target)?;
    let (u0, u1) = (unwrapped[i - 1], unwrapped[i]);
    let (t0, t1) = (traj.times[i - 1], traj.times[i]);
    let t = t0 + (t1 - t0) * (target - u0) / (u1 - u0);
    Some((t - traj.times[0]) / turns)
}

/// CSV with header `t,x,y,z,p1,p2,p3,<observables>`, 17 significant digits.
pub fn write_csv<W: Write>(traj: &Trajectory, mut w: W) -> std::io::Result<()> {
    let mut header = vec!["t".to_string()];
    header.extend(["x", "y", "z", "p1", "p2", "p3"].map(String::from));
    header.extend(traj.observables.iter().cloned());
    writeln!(w, "{}", header.join(","))?;
    for ((t, s), v) in traj.times.iter().zip(&traj.states).zip(&traj.values) {
        let row: Vec<String> = std::iter::once(t).chain(s.iter()).chain(v.iter()).map(|x| format!("{x:.16e}")).collect();
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}
