use std::path::Path;

use anyhow::{bail, Context};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::Value;

use maglab::analysis::{algebra_report, generic_rank, AlgebraCase};
use maglab::detcheck::{compatibility_scan, sample_points, scan_general, scan_reduced, General, RawConstants};
use maglab::dynamics::{cyclotron_period, integrate, write_csv, DynError, Drift, Method, TrajectoryConfig};
use maglab::finder::{find_integrals as find, Classification};
use maglab::polyalg::{poisson, rational_to_f64, Polynomial};
use maglab::systems::{Family, Observable, Params, PhasePoint};

use crate::Global;

pub type UsageError = anyhow::Error;

/// Largest denominator of the parameters drawn when no file is given.
const DRAW_MAX_DEN: i64 = 10;

/// Allowed error of the measured cyclotron period.
const PERIOD_TOL: f64 = 1e-6;

/// Longest residual text kept in a report.
const RESIDUAL_CHARS: usize = 400;

pub struct Outcome {
    pub report: Value,
    pub summary: Vec<String>,
    pub passed: bool,
    /// `--out` already received the command's own output.
    pub writes_out: bool,
}

#[derive(Serialize)]
struct Envelope<T: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    seed: u64,
    params: Option<Params>,
    passed: bool,
    notes: Vec<String>,
    result: T,
}

struct Draft<T: Serialize> {
    command: &'static str,
    params: Option<Params>,
    passed: bool,
    notes: Vec<String>,
    summary: Vec<String>,
    result: T,
}

impl<T: Serialize> Draft<T> {
    fn finish(self, g: &Global, writes_out: bool) -> Result<Outcome, UsageError> {
        let env = Envelope {
            tool: "maglab",
            version: env!("CARGO_PKG_VERSION"),
            command: self.command,
            seed: g.seed,
            params: self.params,
            passed: self.passed,
            notes: self.notes.clone(),
            result: self.result,
        };
        let mut summary = self.summary;
        summary.extend(self.notes.iter().map(|n| format!("note: {n}")));
        Ok(Outcome { report: serde_json::to_value(env)?, summary, passed: self.passed, writes_out })
    }
}

/// Parameters from `--params`, else symbolic or a seeded generic draw.
fn load_params(g: &Global, symbolic_default: bool, notes: &mut Vec<String>) -> Result<Params, UsageError> {
    match &g.params {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            Params::from_json(&text).with_context(|| format!("parsing {}", path.display()))
        }
        None if symbolic_default => Ok(Params::symbolic()),
        None => {
            notes.push(format!("parameters drawn from seed {} (denominators <= {DRAW_MAX_DEN})", g.seed));
            Ok(Params::random_generic(&mut ChaCha8Rng::seed_from_u64(g.seed), DRAW_MAX_DEN))
        }
    }
}

fn require_numeric(p: &Params) -> Result<(), UsageError> {
    if !p.is_numeric() {
        bail!("this command needs numeric parameters; got {p}");
    }
    Ok(())
}

#[derive(Serialize)]
struct IdentityCheck {
    name: String,
    passed: bool,
    residual_terms: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    residual: Option<String>,
}

impl IdentityCheck {
    fn new(name: &str, residual: &Polynomial) -> Self {
        let text = (!residual.is_zero()).then(|| {
            let s = residual.to_string();
            match s.char_indices().nth(RESIDUAL_CHARS) {
                Some((i, _)) => format!("{}...", &s[..i]),
                None => s,
            }
        });
        IdentityCheck { name: name.to_string(), passed: residual.is_zero(), residual_terms: residual.num_terms(), residual: text }
    }
}

#[derive(Serialize)]
struct CaseSummary {
    case: AlgebraCase,
    passed: bool,
    failing: Vec<String>,
}

#[derive(Serialize)]
struct VerifyResult {
    identities: Vec<IdentityCheck>,
    algebra: Vec<CaseSummary>,
}

pub fn verify(g: &Global, symbolic: bool, extra: Option<&str>) -> Result<Outcome, UsageError> {
    let mut notes = Vec::new();
    let params = if symbolic { Params::symbolic() } else { load_params(g, true, &mut notes)? };
    let mut family = Family::new(&params)?;
    if let Some(text) = extra {
        let poly = Polynomial::parse(family.vars(), text).with_context(|| format!("parsing override `{text}`"))?;
        family = family.with_extra_potential(poly)?;
    }
    let h = family.hamiltonian()?;
    let x1 = family.x1()?;
    let x2 = family.x2()?;
    let x31 = family.x3_first()?;
    let vars = family.vars().clone();
    let mut identities = vec![
        IdentityCheck::new("{H,X1} = 0", &poisson(h.poly(), x1.poly())?),
        IdentityCheck::new("{H,X2} = 0", &poisson(h.poly(), x2.poly())?),
        IdentityCheck::new("{X1,X2} = 0", &poisson(x1.poly(), x2.poly())?),
        IdentityCheck::new("{H,X3_1} = 0", &poisson(h.poly(), x31.poly())?),
    ];
    let s_z1 = params.polynomial("S_z1", &vars);
    let sqrt_rel = x2.poly().sub(&x31.poly().mul(x31.poly())?)?.sub(&s_z1.mul(x31.poly())?)?;
    identities.push(IdentityCheck::new("X2 = X3_1^2 + S_z1*X3_1", &sqrt_rel));
    if params.b_z.is_zero() {
        let [xa, xb, xc] = family.split_integrals()?;
        let (a, b) = (params.polynomial("a", &vars), params.polynomial("b", &vars));
        let split = x1.poly().sub(&a.mul(xa.poly())?)?.sub(&b.mul(xb.poly())?)?.sub(xc.poly())?;
        identities.push(IdentityCheck::new("X1 = a*X1a + b*X1b + X1c", &split));
    }
    let mut algebra = Vec::new();
    if extra.is_some() {
        notes.push("algebra tables skipped: they describe the unmodified family".into());
    } else {
        for case in AlgebraCase::ALL.into_iter().filter(|c| c.apply(&params).is_ok()) {
            let r = algebra_report(case, &params)?;
            let failing = r.relations.iter().filter(|c| !c.matches_expected).map(|c| c.name.clone()).collect();
            algebra.push(CaseSummary { case, passed: r.passed, failing });
        }
    }
    if params.b_phi.is_zero() {
        notes.push("free/constant-field limit: b_phi = 0 removes the potential and the azimuthal field".into());
    }
    let passed = identities.iter().all(|c| c.passed) && algebra.iter().all(|c| c.passed);
    let mut summary: Vec<String> =
        identities.iter().map(|c| format!("{:<28} {}", c.name, if c.passed { "ok" } else { "FAILED" })).collect();
    summary.extend(algebra.iter().map(|c| {
        let status = if c.passed { "ok".to_string() } else { format!("FAILED {}", c.failing.join(" ")) };
        format!("{:<28} {status}", format!("algebra {}", c.case.as_str()))
    }));
    Draft { command: "verify", params: Some(params), passed, notes, summary, result: VerifyResult { identities, algebra } }
        .finish(g, false)
}

pub fn detcheck(g: &Global, samples: usize, tol: f64, raw: Option<&Path>) -> Result<Outcome, UsageError> {
    if samples == 0 {
        bail!("--samples must be at least 1");
    }
    if tol.is_nan() || tol <= 0.0 {
        bail!("--tol must be positive");
    }
    let mut notes = Vec::new();
    let params = load_params(g, false, &mut notes)?;
    let Some(path) = raw else {
        require_numeric(&params)?;
        let scan = scan_reduced(&params, samples, g.seed, tol)?;
        let summary = vec![format!("reduced structure: max residual {:.3e} over {} points", scan.max_residual, samples)];
        return Draft { command: "detcheck", params: Some(params), passed: scan.passed, notes, summary, result: scan }
            .finish(g, false);
    };
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let raw: RawConstants = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let (a, b) = match (params.a.value(), params.b.value()) {
        (Some(a), Some(b)) => (rational_to_f64(a), rational_to_f64(b)),
        _ => bail!("the general structure needs numeric a and b"),
    };
    let general = General { a, b, raw };
    let scan = scan_general(&general, samples, g.seed, tol);
    let compat = compatibility_scan(&general, &sample_points(samples, g.seed));
    if !raw.satisfies_constraints() {
        notes.push(format!("constrained constants {} are not all zero", RawConstants::CONSTRAINED.join(", ")));
    }
    let summary = vec![
        format!("general structure: max residual {:.3e} over {} points", scan.max_residual, samples),
        format!("compatibility: max curl residual {:.3e}", compat.max_residual),
    ];
    let passed = scan.passed && compat.compatible;
    let result = serde_json::json!({ "scan": scan, "compatibility": compat });
    Draft { command: "detcheck", params: Some(params), passed, notes, summary, result }.finish(g, false)
}

pub fn find_integrals(g: &Global, sigma_deg: u32, mu_deg: u32) -> Result<Outcome, UsageError> {
    let mut notes = Vec::new();
    let params = load_params(g, false, &mut notes)?;
    require_numeric(&params)?;
    let family = Family::new(&params)?;
    let report = find(&family, sigma_deg, mu_deg)?;
    for k in report.known.iter().filter(|k| k.conserved && !k.representable) {
        notes.push(format!("{} is conserved but not representable at degrees ({sigma_deg}, {mu_deg})", k.name));
    }
    notes.push(report.scope.clone());
    let accepted: Vec<&str> = report.known.iter().filter(|k| k.accepted).map(|k| k.name.as_str()).collect();
    let mut summary = vec![
        format!("null space dimension {} (kernel {}, new {})", report.dimension, report.kernel_dim, report.new_count),
        format!("known integrals in the basis: {}", accepted.join(", ")),
    ];
    summary.extend(
        report
            .basis
            .iter()
            .filter(|b| b.classification == Classification::New)
            .map(|b| format!("new element {}", b.label)),
    );
    let passed = report.new_count == 0 && report.verified;
    Draft { command: "find-integrals", params: Some(params), passed, notes, summary, result: report }.finish(g, false)
}

#[derive(Clone, Copy, Debug, clap::ValueEnum)]
pub enum MethodArg {
    Dp45,
    Rk4,
}

pub struct SimulateOpts {
    pub init: Option<Vec<f64>>,
    pub t_end: f64,
    pub rtol: f64,
    pub method: MethodArg,
    pub dt: f64,
    pub stride: usize,
    pub drift_tol: f64,
}

#[derive(Serialize)]
struct PeriodCheck {
    expected: f64,
    /// `None` when the run covers less than one full turn.
    measured: Option<f64>,
    passed: Option<bool>,
}

#[derive(Serialize)]
struct SimulateResult {
    init: [f64; 6],
    config: TrajectoryConfig,
    conserved: Vec<String>,
    drift_tol: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    steps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rejected: Option<usize>,
    drift: Vec<Drift>,
    #[serde(skip_serializing_if = "Option::is_none")]
    period: Option<PeriodCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

/// Integrals conserved for these parameters; `l3A` is monitored as a probe.
fn conserved_names(p: &Params) -> Vec<&'static str> {
    let mut names = vec!["H", "X1", "X2", "X3_1"];
    if p.b_z.is_zero() {
        names.extend(["X1a", "X1b", "X1c"]);
        if p.w1.is_zero() && p.w2.is_zero() {
            names.push("X3_2");
        }
    }
    names
}

pub fn simulate(g: &Global, o: &SimulateOpts) -> Result<Outcome, UsageError> {
    let mut notes = Vec::new();
    let params = load_params(g, false, &mut notes)?;
    require_numeric(&params)?;
    let init: [f64; 6] = match &o.init {
        Some(v) => v.as_slice().try_into().context("--init takes six numbers")?,
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(g.seed);
            notes.push(format!("initial state drawn in [-1,1]^6 from seed {}", g.seed));
            std::array::from_fn(|_| rng.random_range(-1.0..=1.0))
        }
    };
    let method = match o.method {
        MethodArg::Dp45 => Method::Dp45 { rtol: o.rtol, atol: o.rtol },
        MethodArg::Rk4 => Method::Rk4 { dt: o.dt },
    };
    let config = TrajectoryConfig { t_end: o.t_end, method, stride: o.stride, ..Default::default() };
    config.validate()?;
    let family = Family::new(&params)?;
    let h = family.hamiltonian()?;
    let conserved = conserved_names(&params);
    let obs: Vec<Observable> = conserved
        .iter()
        .chain(["l3A"].iter())
        .map(|n| family.observable(n))
        .collect::<Result<_, _>>()?;
    let mut result = SimulateResult {
        init,
        config,
        conserved: conserved.iter().map(|s| s.to_string()).collect(),
        drift_tol: o.drift_tol,
        steps: None,
        rejected: None,
        drift: vec![],
        period: None,
        error: None,
    };
    let mut summary = Vec::new();
    let mut passed = false;
    match integrate(&h, &PhasePoint(init), &config, &obs) {
        Ok(tr) => {
            if let Some(path) = &g.out {
                let file = std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
                write_csv(&tr, std::io::BufWriter::new(file)).with_context(|| format!("writing {}", path.display()))?;
            }
            passed = tr.drift.iter().filter(|d| conserved.contains(&d.name.as_str())).all(|d| d.relative < o.drift_tol);
            summary.push(format!("{} steps, {} rejected", tr.steps, tr.rejected));
            summary.extend(tr.drift.iter().map(|d| {
                let role = if conserved.contains(&d.name.as_str()) { "" } else { " (probe)" };
                format!("drift {:<5} {:.3e}{role}", d.name, d.relative)
            }));
            if params.b_phi.is_zero() && !params.b_z.is_zero() {
                let bz = rational_to_f64(params.b_z.value().expect("numeric")).abs();
                let expected = std::f64::consts::TAU / bz;
                let measured = cyclotron_period(&h, &tr);
                let ok = measured.map(|t| (t - expected).abs() < PERIOD_TOL);
                summary.push(match measured {
                    Some(t) => format!("cyclotron period {t:.12} (expected {expected:.12})"),
                    None => "cyclotron period: less than one full turn, not checked".into(),
                });
                passed &= ok.unwrap_or(true);
                result.period = Some(PeriodCheck { expected, measured, passed: ok });
            }
            result.steps = Some(tr.steps);
            result.rejected = Some(tr.rejected);
            result.drift = tr.drift;
        }
        Err(e @ (DynError::Config(_) | DynError::NotNumeric(_))) => return Err(e.into()),
        Err(e) => {
            summary.push(format!("integration failed: {e}"));
            result.error = Some(e.to_string());
        }
    }
    Draft { command: "simulate", params: Some(params), passed, notes, summary, result }.finish(g, true)
}

pub fn rank(g: &Global, set: &[String], samples: usize, expect: Option<usize>) -> Result<Outcome, UsageError> {
    let mut notes = Vec::new();
    let params = load_params(g, false, &mut notes)?;
    require_numeric(&params)?;
    let family = Family::new(&params)?;
    let obs: Vec<Observable> = set.iter().map(|n| family.observable(n.trim())).collect::<Result<_, _>>()?;
    let report = generic_rank(&obs, samples, g.seed)?;
    let passed = expect.is_none_or(|e| e == report.generic_rank);
    let mut summary = vec![format!("generic rank of {{{}}}: {}", report.observables.join(", "), report.generic_rank)];
    if let Some(e) = expect {
        summary.push(format!("expected {e}"));
    }
    Draft { command: "rank", params: Some(params), passed, notes, summary, result: report }.finish(g, false)
}

pub fn algebra(g: &Global, case: &str) -> Result<Outcome, UsageError> {
    let case: AlgebraCase = case.parse()?;
    let mut notes = Vec::new();
    let params = load_params(g, true, &mut notes)?;
    let report = algebra_report(case, &params)?;
    let summary = report
        .relations
        .iter()
        .map(|r| format!("{:<40} {}", r.relation, if r.matches_expected { "ok" } else { "FAILED" }))
        .collect();
    let params = report.params.clone();
    Draft { command: "algebra", params: Some(params), passed: report.passed, notes, summary, result: report }
        .finish(g, false)
}
