//! `locus`: command-line front end for the locus-core computations.
//!
//! Each subcommand reads an optional TOML config (unknown keys are errors),
//! applies command-line overrides, and writes `result.json`, any CSV tables,
//! the resolved config and `manifest.json` to the output directory.
//!
//! Exit status: 0 on success, 2 for invalid input, 3 when a computation did
//! not converge (artifacts are still written), 1 for anything else.

mod commands;
mod config;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use locus_core::mirror::Convention;

use commands::{Outcome, Overrides};
use config::{GenusConfig, HeatConfig, McConfig, MirrorConfig, ModuliConfig, ToricConfig};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Schema(String),
    #[error("did not converge: {0}")]
    NonConvergent(String),
    #[error("computation failed: {0}")]
    Compute(String),
    #[error("i/o error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Schema(_) => 2,
            CliError::NonConvergent(_) => 3,
            CliError::Compute(_) | CliError::Io { .. } => 1,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "locus", version, about = "Genera, heat kernels, moduli volumes and mirror computations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every subcommand. Each can also be set through an
/// environment variable with the `LOCUS_` prefix.
#[derive(Args, Debug, Clone)]
struct Common {
    /// TOML config file; defaults are used when absent.
    #[arg(long, env = "LOCUS_CONFIG")]
    config: Option<PathBuf>,
    /// Output directory for artifacts.
    #[arg(long, env = "LOCUS_OUT", default_value = "locus-out")]
    out: PathBuf,
    /// Series order: q-order for mirror and Witten-genus runs, extrapolation order for moduli runs.
    #[arg(long, env = "LOCUS_ORDER")]
    order: Option<usize>,
    /// Casimir cutoff for heat-kernel and moduli sums.
    #[arg(long, env = "LOCUS_CUTOFF")]
    cutoff: Option<f64>,
    /// Convergence tolerance.
    #[arg(long, env = "LOCUS_TOL")]
    tol: Option<f64>,
    /// Random seed for Monte Carlo runs.
    #[arg(long, env = "LOCUS_SEED")]
    seed: Option<u64>,
    /// Sign convention of the hypergeometric series (`plus` or `minus`).
    #[arg(long, env = "LOCUS_CONVENTION")]
    convention: Option<Convention>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Â, L, Witten or a custom genus from Pontryagin numbers.
    Genus(Common),
    /// Heat kernel of a compact Lie group at given points.
    Heatkernel(Common),
    /// Volume of the moduli space of flat connections with boundary holonomy.
    ModuliVolume(Common),
    /// Intersection pairing at a central holonomy.
    ModuliIntersect(Common),
    /// Monte Carlo holonomy integral against the character sum (SU(2)).
    ModuliMc(Common),
    /// Genus-0 invariants of the quintic threefold.
    MirrorQuintic(Common),
    /// Genus-0 invariants of the resolved conifold.
    MirrorLocal(Common),
    /// Genus-0 invariants of a one-parameter toric Calabi-Yau complete intersection.
    MirrorToric(Common),
}

fn load<T: DeserializeOwned + Default>(path: Option<&Path>, default: T) -> Result<T, CliError> {
    let Some(path) = path else {
        return Ok(default);
    };
    let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
    toml::from_str(&text).map_err(|e| CliError::Schema(format!("{}: {}", path.display(), e.message())))
}

fn overrides(c: &Common) -> Overrides {
    Overrides { order: c.order, cutoff: c.cutoff, tol: c.tol, seed: c.seed, convention: c.convention }
}

/// Load the config, run, and return the resolved config with the outcome.
fn execute<T, F>(common: &Common, default: T, run: F) -> Result<(toml::Value, Result<Outcome, CliError>), CliError>
where
    T: DeserializeOwned + Serialize + Default,
    F: FnOnce(&mut T, &Overrides) -> Result<Outcome, CliError>,
{
    let mut cfg = load(common.config.as_deref(), default)?;
    let outcome = run(&mut cfg, &overrides(common));
    let resolved = toml::Value::try_from(&cfg).map_err(|e| CliError::Compute(e.to_string()))?;
    Ok((resolved, outcome))
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn dispatch(cli: Cli) -> Result<u8, CliError> {
    let start = Instant::now();
    let (name, common, (resolved, outcome)) = match &cli.command {
        Command::Genus(c) => ("genus", c, execute(c, GenusConfig::default(), commands::genus)?),
        Command::Heatkernel(c) => ("heatkernel", c, execute(c, HeatConfig::default(), commands::heatkernel)?),
        Command::ModuliVolume(c) => ("moduli-volume", c, execute(c, ModuliConfig::volume_default(), commands::moduli_volume)?),
        Command::ModuliIntersect(c) => {
            ("moduli-intersect", c, execute(c, ModuliConfig::intersect_default(), commands::moduli_intersect)?)
        }
        Command::ModuliMc(c) => ("moduli-mc", c, execute(c, McConfig::default(), commands::moduli_mc)?),
        Command::MirrorQuintic(c) => ("mirror-quintic", c, execute(c, MirrorConfig::quintic_default(), commands::mirror_quintic)?),
        Command::MirrorLocal(c) => ("mirror-local", c, execute(c, MirrorConfig::local_default(), commands::mirror_local)?),
        Command::MirrorToric(c) => ("mirror-toric", c, execute(c, ToricConfig::default(), commands::mirror_toric)?),
    };
    let outcome = match outcome {
        Ok(o) => o,
        Err(CliError::NonConvergent(msg)) => Outcome {
            summary: format!("did not converge: {msg}"),
            result: json!({ "error": msg }),
            csv: Vec::new(),
            provenance: json!({ "converged": false }),
            converged: false,
        },
        Err(e) => return Err(e),
    };

    let out = &common.out;
    fs::create_dir_all(out).map_err(|source| CliError::Io { path: out.clone(), source })?;
    let mut artifacts = vec!["result.json".to_string(), "config.resolved.toml".to_string()];
    write(&out.join("result.json"), &format!("{:#}\n", outcome.result))?;
    let resolved_toml = toml::to_string(&resolved).map_err(|e| CliError::Compute(e.to_string()))?;
    write(&out.join("config.resolved.toml"), &resolved_toml)?;
    for (file, contents) in &outcome.csv {
        write(&out.join(file), contents)?;
        artifacts.push(file.clone());
    }
    let exit = if outcome.converged { 0 } else { 3 };
    let manifest = json!({
        "tool": "locus",
        "version": env!("CARGO_PKG_VERSION"),
        "subcommand": name,
        "config": resolved,
        "wall_clock_seconds": start.elapsed().as_secs_f64(),
        "converged": outcome.converged,
        "provenance": outcome.provenance,
        "artifacts": artifacts,
        "exit_code": exit,
    });
    write(&out.join("manifest.json"), &format!("{manifest:#}\n"))?;
    println!("{}", outcome.summary.trim_end());
    if exit != 0 {
        eprintln!("{name}: did not converge; artifacts written to {}", out.display());
    }
    Ok(exit)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
