//! `maglab` command-line frontend.
//!
//! Exit codes: 0 every check passed, 1 a verification failed, 2 the
//! invocation or its configuration was invalid.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use commands::{Outcome, UsageError};

#[derive(Debug, Parser)]
#[command(name = "maglab", version)]
#[command(about = "Exact verification of quadratically integrable charged-particle Hamiltonians")]
struct Cli {
    #[command(flatten)]
    global: Global,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Parameter file (JSON). Without it `verify` and `algebra` use symbolic
    /// parameters and the numeric commands draw generic ones from the seed.
    #[arg(long, global = true)]
    pub params: Option<PathBuf>,

    /// Seed for every random choice; recorded in the report.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,

    /// Output file: the JSON report, or the trajectory CSV for `simulate`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Print the JSON report to stdout instead of a summary.
    #[arg(long, global = true)]
    pub json: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact identity suite: involutions, the square-root relation, the
    /// split identity and the algebra of every applicable limit.
    Verify {
        /// Treat every parameter as a symbol, ignoring --params.
        #[arg(long)]
        symbolic: bool,
        /// Extra polynomial term added to the potential, e.g. "z".
        #[arg(long = "override", value_name = "POLY")]
        extra_potential: Option<String>,
    },
    /// Finite-difference residuals of the determining equations.
    Detcheck {
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 1e-7)]
        tol: f64,
        /// Integration constants of the general structure (JSON); enables
        /// the compatibility scan.
        #[arg(long)]
        raw: Option<PathBuf>,
    },
    /// Exact null space of the quadratic-integral ansatz.
    FindIntegrals {
        #[arg(long, default_value_t = 4)]
        sigma_deg: u32,
        #[arg(long, default_value_t = 6)]
        mu_deg: u32,
    },
    /// Integrates one trajectory and reports the drift of each integral.
    Simulate {
        /// Initial state `x,y,z,p1,p2,p3`; drawn in [−1,1]⁶ when omitted.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        init: Option<Vec<f64>>,
        #[arg(long, default_value_t = 100.0)]
        t_end: f64,
        /// Relative and absolute tolerance of dp45.
        #[arg(long, default_value_t = 1e-10)]
        rtol: f64,
        #[arg(long, value_enum, default_value_t = commands::MethodArg::Dp45)]
        method: commands::MethodArg,
        /// Fixed step of rk4.
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        #[arg(long, default_value_t = 1)]
        stride: usize,
        /// Largest accepted relative drift of a conserved integral.
        #[arg(long, default_value_t = 1e-8)]
        drift_tol: f64,
    },
    /// Generic Jacobian rank of a set of observables.
    Rank {
        #[arg(long, value_delimiter = ',', default_value = "H,X1,X2")]
        set: Vec<String>,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        /// Fail unless the generic rank equals this value.
        #[arg(long)]
        expect: Option<usize>,
    },
    /// Bracket table and displayed relations of one limit.
    Algebra {
        #[arg(long, default_value = "generic")]
        case: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let g = &cli.global;
    let result = match cli.command {
        Command::Verify { symbolic, extra_potential } => commands::verify(g, symbolic, extra_potential.as_deref()),
        Command::Detcheck { samples, tol, raw } => commands::detcheck(g, samples, tol, raw.as_deref()),
        Command::FindIntegrals { sigma_deg, mu_deg } => commands::find_integrals(g, sigma_deg, mu_deg),
        Command::Simulate { init, t_end, rtol, method, dt, stride, drift_tol } => {
            let opts = commands::SimulateOpts { init, t_end, rtol, method, dt, stride, drift_tol };
            commands::simulate(g, &opts)
        }
        Command::Rank { set, samples, expect } => commands::rank(g, &set, samples, expect),
        Command::Algebra { case } => commands::algebra(g, &case),
    };
    match result.and_then(|o| emit(g, o)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn emit(g: &Global, o: Outcome) -> Result<bool, UsageError> {
    let text = serde_json::to_string_pretty(&o.report)? + "\n";
    if let Some(path) = &g.out {
        if !o.writes_out {
            std::fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?;
        }
    }
    if g.json {
        print!("{text}");
    } else {
        for line in &o.summary {
            println!("{line}");
        }
        println!("{}", if o.passed { "PASS" } else { "FAIL" });
    }
    Ok(o.passed)
}
