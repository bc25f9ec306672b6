use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use scramblon::correlators::{evaluate, EvalOptions, ProtocolPoint};
use scramblon::density::{assemble, coefficients_from_correlators, info_measures, spectrum, CLAMP_TOL};
use scramblon::emit::emit;
use scramblon::model::{scramblon_weights, ModelParams, SystemSize};
use scramblon::quadrature::QuadratureSpec;
use scramblon::sweep::{preset, run_sweep_with_threads, Format, Preset, SweepConfig, Threads};
use scramblon::Error;

/// Finite-N wormhole teleportation fidelity in the large-q SYK model.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a sweep described by a TOML configuration.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Worker count or "auto"; overrides the configuration.
        #[arg(long)]
        threads: Option<Threads>,
        /// Output file; overrides the configuration. Standard output if neither is set.
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        format: Option<Format>,
    },
    /// Print a built-in configuration (fig4, fig5, fig6, fig7) as TOML.
    Preset {
        #[arg(long)]
        name: Preset,
    },
    /// Evaluate one protocol point and print every intermediate quantity.
    Point {
        #[arg(long, default_value_t = 4)]
        q: u32,
        #[arg(long)]
        v: f64,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        /// Number of Majoranas, or "inf" for the probe limit.
        #[arg(long = "N")]
        n: SystemSize,
        #[arg(long, allow_negative_numbers = true)]
        mu: f64,
        #[arg(long = "tL")]
        t_l: f64,
        #[arg(long = "tR")]
        t_r: f64,
        #[arg(long, default_value_t = 1)]
        encode: u32,
    },
}

const EXIT_CONFIG: u8 = 1;
const EXIT_IO: u8 = 2;
const EXIT_ALL_FAILED: u8 = 3;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_) => EXIT_IO,
        _ => EXIT_CONFIG,
    }
}

fn sweep(config: PathBuf, threads: Option<Threads>, output: Option<PathBuf>, format: Option<Format>) -> Result<u8, Error> {
    let text = fs::read_to_string(&config)?;
    let mut cfg = SweepConfig::from_toml(&text)?;
    if let Some(t) = threads {
        cfg.threads = t;
    }
    if let Some(o) = output {
        cfg.output.path = Some(o);
    }
    if let Some(f) = format {
        cfg.output.format = f;
    }
    let result = run_sweep_with_threads(&cfg, cfg.threads.resolve())?;
    emit(&result, &cfg, cfg.output.path.as_deref(), cfg.output.format)?;
    if result.failed_rows() > 0 {
        eprintln!("{} of {} rows failed", result.failed_rows(), result.rows.len());
    }
    Ok(if result.all_failed() { EXIT_ALL_FAILED } else { 0 })
}

#[allow(clippy::too_many_arguments)]
fn point(q: u32, v: f64, beta: f64, n: SystemSize, mu: f64, t_l: f64, t_r: f64, encode: u32) -> Result<u8, Error> {
    let params = ModelParams::new(q, v, beta, n)?;
    let pt = ProtocolPoint::new(t_l, t_r, mu, encode)?;
    let cs = evaluate(&params, &pt, &EvalOptions { quadrature: QuadratureSpec::default(), long_time_fast_path: false })?;
    let (rho2, rho4) = coefficients_from_correlators(&cs);
    let dm = assemble(rho2, rho4)?;
    let weights = scramblon_weights(&params, t_l, t_r).ok();
    let mut report = json!({
        "model": {
            "q": q, "v": v, "beta": beta, "N": n, "delta": params.delta(),
            "beta_J": params.beta() * params.j_coupling(), "kappa": params.kappa(),
            "C": params.c_prefactor(), "N_lambda0": params.n_lambda0(t_l, t_r),
        },
        "point": pt,
        "lambda0": weights.map(|w| w.lambda0),
        "lambda1": weights.map(|w| w.lambda1),
        "correlators": cs,
        "rho2": rho2,
        "rho4": rho4,
    });
    match (spectrum(&dm, CLAMP_TOL), info_measures(&dm, CLAMP_TOL)) {
        (Ok(s), Ok(m)) => {
            report["spectrum"] = json!(s);
            report["measures"] = json!(m);
        }
        (Err(e), _) | (_, Err(e)) => report["measures_error"] = json!(e.to_string()),
    }
    println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Sweep { config, threads, output, format } => sweep(config, threads, output, format),
        Command::Preset { name } => {
            print!("{}", preset(name).to_toml());
            Ok(0)
        }
        Command::Point { q, v, beta, n, mu, t_l, t_r, encode } => point(q, v, beta, n, mu, t_l, t_r, encode),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
