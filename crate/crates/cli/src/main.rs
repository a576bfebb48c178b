//! `stefan`: self-similar fronts of multi-phase Stefan problems.

mod manifest;
mod sample;
mod solve;
mod verify;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use stefan_core::{Problem, ProblemFile};

use manifest::{Overrides, RunManifest};

const AFTER_HELP: &str = "\
Instance files are JSON objects:
  {\"kind\": \"riemann1d\" | \"radial\", \"temperatures\": [...], \"diffusivities\": [...],
   \"conductivities\": [...], \"latent_heats\": [...], \"dimension\": n, \"amplitude\": A, \"d0\": d0}
(dimension, amplitude and d0 are radial only; radial temperatures list u_0..u_m).

Outputs go to --out-dir (default: current directory):
  solve   -> solve.json   {manifest, converged, fronts, outer_front, energy, grad_norm,
                           iterations, residuals, multistart_spread}
  profile -> profile.csv  columns xi,v (plus x,u with --time) and profile.manifest.json
  verify  -> verify.json  {manifest, fronts, checks: [{name, passed, error, tolerance}], all_passed}
Fronts are listed in model order: increasing on the line, decreasing (xi_1 > ... > xi_m) for radial.

Exit codes: 0 success, 1 input error, 2 solver did not converge, 3 a verification check failed.";

#[derive(Parser, Debug)]
#[command(name = "stefan", version, about = "Self-similar solutions of multi-phase Stefan problems", after_help = AFTER_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Minimize the potential and write the fronts.
    Solve(CommonArgs),
    /// Sample the self-similar profile as CSV.
    Profile {
        #[command(flatten)]
        common: CommonArgs,
        /// Samples per phase.
        #[arg(long, default_value_t = 200)]
        samples: usize,
        /// Also write physical coordinates `x = xi sqrt(t)` and `u` at this time.
        #[arg(long)]
        time: Option<f64>,
    },
    /// Certify fronts against residual, gradient and oracle checks.
    Verify {
        #[command(flatten)]
        common: CommonArgs,
        /// Compare with an enthalpy finite-difference simulation (line only).
        #[arg(long)]
        fd_check: bool,
        /// Compare with scalar bisection (m = 1) and quadrature of F and G.
        #[arg(long)]
        oracle: bool,
        /// Check the heat flux into a small sphere around the source (radial only).
        #[arg(long)]
        flux: bool,
        /// Time for the flux check.
        #[arg(long)]
        time: Option<f64>,
    },
}

#[derive(Args, Debug, Clone)]
struct CommonArgs {
    /// Instance JSON file.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Number of solver starts, including the default one.
    #[arg(long)]
    starts: Option<usize>,
    #[arg(long)]
    grad_tol: Option<f64>,
    /// Comma-separated fronts used instead of solving (radial extended: xi_0 first).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    fronts: Option<Vec<f64>>,
    /// Radial only: add the outer front with this latent heat d0.
    #[arg(long)]
    extended_front: Option<f64>,
}

/// Failures that map to a specific exit code.
#[derive(Debug, thiserror::Error)]
enum Exit {
    #[error("{0:#}")]
    Input(anyhow::Error),
    #[error("{0}")]
    Solver(stefan_core::Error),
}

impl Exit {
    fn code(&self) -> u8 {
        match self {
            Exit::Input(_) => 1,
            Exit::Solver(_) => 2,
        }
    }
}

impl From<anyhow::Error> for Exit {
    fn from(e: anyhow::Error) -> Self {
        Exit::Input(e)
    }
}

fn load_problem(args: &CommonArgs) -> Result<Problem> {
    let text = fs::read_to_string(&args.input).with_context(|| format!("reading {}", args.input.display()))?;
    let mut file: ProblemFile =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", args.input.display()))?;
    if let Some(d0) = args.extended_front {
        if file.kind != stefan_core::ProblemKind::Radial {
            anyhow::bail!("--extended-front applies to radial problems only");
        }
        file.d0 = Some(d0);
    }
    Ok(file.into_problem()?)
}

fn manifest(name: &str, args: &CommonArgs, extra: Overrides) -> RunManifest {
    let overrides = Overrides {
        starts: args.starts,
        grad_tol: args.grad_tol,
        fronts: args.fronts.clone(),
        extended_front: args.extended_front,
        ..extra
    };
    RunManifest::new(name, &args.input, &args.out_dir, args.seed.unwrap_or(0), overrides)
}

fn write_json(dir: &Path, name: &str, value: &impl Serialize) -> Result<String> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    let path = dir.join(name);
    fs::write(&path, &text).with_context(|| format!("writing {}", path.display()))?;
    Ok(text)
}

fn run(cli: Cli) -> Result<u8, Exit> {
    match cli.command {
        Command::Solve(args) => {
            let problem = load_problem(&args)?;
            let settings = solve::settings(&args)?;
            let outcome = solve::fronts_or_solve(&problem, &args, &settings)?;
            let report = solve::SolveOutput::new(manifest("solve", &args, Overrides::default()), &problem, &outcome)?;
            print!("{}", write_json(&args.out_dir, "solve.json", &report)?);
            match outcome.failure {
                Some(e) => {
                    eprintln!("stefan: {e}");
                    Ok(2)
                }
                None => Ok(0),
            }
        }
        Command::Profile { common, samples, time } => {
            if samples == 0 {
                return Err(anyhow::anyhow!("--samples must be positive").into());
            }
            if let Some(t) = time {
                if !(t > 0.0 && t.is_finite()) {
                    return Err(anyhow::anyhow!("--time must be positive, got {t}").into());
                }
            }
            let problem = load_problem(&common)?;
            let settings = solve::settings(&common)?;
            let outcome = solve::fronts_or_solve(&problem, &common, &settings)?;
            if let Some(e) = outcome.failure {
                return Err(Exit::Solver(e));
            }
            let extra = Overrides { samples: Some(samples), time, ..Default::default() };
            let m = manifest("profile", &common, extra);
            let rows = sample::sample(&problem, &outcome.fronts, samples).map_err(anyhow::Error::from)?;
            sample::write_csv(&common.out_dir.join("profile.csv"), &rows, time)?;
            write_json(&common.out_dir, "profile.manifest.json", &m)?;
            Ok(0)
        }
        Command::Verify { common, fd_check, oracle, flux, time } => {
            let problem = load_problem(&common)?;
            let settings = solve::settings(&common)?;
            let outcome = solve::fronts_or_solve(&problem, &common, &settings)?;
            if let Some(e) = outcome.failure {
                return Err(Exit::Solver(e));
            }
            let extra = Overrides { time, fd_check, oracle, flux, ..Default::default() };
            let m = manifest("verify", &common, extra);
            let opts =
                verify::Options { fd_check, oracle, flux, time: time.unwrap_or(1.0), grad_tol: settings.grad_tol };
            let report = verify::verify(m, &problem, &outcome.fronts, &opts)?;
            print!("{}", write_json(&common.out_dir, "verify.json", &report)?);
            Ok(if report.all_passed { 0 } else { 3 })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("stefan: {e}");
            ExitCode::from(e.code())
        }
    }
}
