//! `statedet`: reconstruct pure states from measured probability
//! distributions and explore Pauli partners.
//!
//! Exit codes: 0 on success/convergence, 1 when a reconstruction fails to
//! converge (or an enumeration finds nothing), 2 on input errors.

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use statedet::{ingest_distributions, reconstruct, Error, ImpositionData64, RunResult64};
use statedet_cli::config::{parse_format, parse_order, parse_restart, EffectiveConfig, FileConfig};
use statedet_cli::experiments::{self, SAMPLE_STREAM};
use statedet_cli::output;

#[derive(Parser)]
#[command(
    name = "statedet",
    about = "Pure-state determination from measured distributions by iterated imposition operators",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct CommonArgs {
    /// Hilbert space dimension.
    #[arg(long)]
    dim: Option<usize>,
    /// Observable spec (repeatable): `standard`, `fourier`, `xp`,
    /// `random:<seed>`, `mub:<index>`, `jmom:<nx>,<ny>,<nz>` (jmom
    /// directions are normalized).
    #[arg(long = "obs")]
    observables: Vec<String>,
    /// Number of trials / sampled states.
    #[arg(long)]
    trials: Option<usize>,
    /// Base seed; all randomness derives from (seed, stream) pairs.
    #[arg(long)]
    seed: Option<u64>,
    /// Residual tolerance for convergence.
    #[arg(long)]
    tol: Option<f64>,
    /// Total cycle budget across restarts.
    #[arg(long)]
    max_cycles: Option<usize>,
    /// Restart policy: random | orthogonal.
    #[arg(long, value_parser = parse_restart)]
    restart: Option<String>,
    /// Operator ordering per cycle: cyclic | random.
    #[arg(long, value_parser = parse_order)]
    order: Option<String>,
    /// Output path (stdout when omitted).
    #[arg(long)]
    out: Option<String>,
    /// Output format: csv | json.
    #[arg(long, value_parser = parse_format)]
    format: Option<String>,
    /// JSON config file; flags take precedence over its fields.
    #[arg(long)]
    config: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Scatter of distances to the generator before/after one
    /// distribution-imposition (default 8000 trials, dim 3).
    ScatterT(CommonArgs),
    /// Same scatter for the phase-imposition operator; shares the generator
    /// and sample states with scatter-t at equal seeds.
    ScatterP(CommonArgs),
    /// Convergence trace in known-generator mode (cycle, distance, residual).
    Converge(CommonArgs),
    /// Reconstruct a state from a JSON distribution file.
    Reconstruct {
        /// JSON array of {basis, probs} objects.
        #[arg(long)]
        input: String,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Enumerate Pauli partners over many random starts.
    Partners {
        /// Optional JSON distribution file instead of --obs specs.
        #[arg(long)]
        input: Option<String>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Pathological setup: first M unbiased-family bases with uniform
    /// targets, partner count compared to N(N+1-M).
    Pathological {
        /// Number of unbiased observables M.
        #[arg(long)]
        m: usize,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Verify the closed-form spin-1 partner symmetry on every condition
    /// surface (dim fixed at 3).
    JSymmetry(CommonArgs),
}

struct Defaults {
    dim: usize,
    trials: usize,
}

fn resolve(sub: &str, args: &CommonArgs, defaults: Defaults) -> anyhow::Result<EffectiveConfig> {
    let file = match &args.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let observables = if !args.observables.is_empty() {
        args.observables.clone()
    } else {
        file.obs.clone().unwrap_or_default()
    };
    Ok(EffectiveConfig {
        subcommand: sub.to_string(),
        dim: args.dim.or(file.dim).unwrap_or(defaults.dim),
        observables,
        trials: args.trials.or(file.trials).unwrap_or(defaults.trials),
        seed: args.seed.or(file.seed).unwrap_or(0),
        residual_tol: args.tol.or(file.tol).unwrap_or(1e-12),
        max_cycles: args.max_cycles.or(file.max_cycles).unwrap_or(500),
        stall_window: file.stall_window.unwrap_or(20),
        stall_factor: file.stall_factor.unwrap_or(0.99),
        max_restarts: file.max_restarts.unwrap_or(10),
        restart: args
            .restart
            .clone()
            .or(file.restart.clone())
            .unwrap_or_else(|| "orthogonal".to_string()),
        order: args
            .order
            .clone()
            .or(file.order.clone())
            .unwrap_or_else(|| "cyclic".to_string()),
    })
}

fn format_of(args: &CommonArgs, cfg_default: &str) -> String {
    args.format
        .clone()
        .unwrap_or_else(|| cfg_default.to_string())
}

/// Reconstruct-from-file report: the run plus the config that produced it.
#[derive(Serialize)]
struct ReconstructReport {
    config: EffectiveConfig,
    observables: usize,
    result: RunResult64,
}

fn main() {
    std::process::exit(match run() {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            2
        }
    });
}

fn run() -> anyhow::Result<i32> {
    let cli = Cli::parse();
    match cli.command {
        Command::ScatterT(args) => {
            let cfg = resolve(
                "scatter-t",
                &args,
                Defaults {
                    dim: 3,
                    trials: 8000,
                },
            )?;
            let report = experiments::scatter_t(&cfg)?;
            match format_of(&args, "csv").as_str() {
                "json" => output::emit(args.out.as_deref(), &output::to_json_pretty(&report)?)?,
                _ => output::emit(args.out.as_deref(), &output::scatter_csv(&report))?,
            }
            Ok(0)
        }
        Command::ScatterP(args) => {
            let cfg = resolve(
                "scatter-p",
                &args,
                Defaults {
                    dim: 3,
                    trials: 8000,
                },
            )?;
            let report = experiments::scatter_p(&cfg)?;
            match format_of(&args, "csv").as_str() {
                "json" => output::emit(args.out.as_deref(), &output::to_json_pretty(&report)?)?,
                _ => output::emit(args.out.as_deref(), &output::scatter_csv(&report))?,
            }
            Ok(0)
        }
        Command::Converge(args) => {
            let cfg = resolve("converge", &args, Defaults { dim: 3, trials: 1 })?;
            let report = experiments::converge(&cfg)?;
            eprintln!(
                "median contraction factor: {}",
                output::fmt_sig(report.median_contraction)
            );
            match format_of(&args, "csv").as_str() {
                "json" => output::emit(args.out.as_deref(), &output::to_json_pretty(&report)?)?,
                _ => output::emit(args.out.as_deref(), &output::converge_csv(&report))?,
            }
            if report.converged {
                Ok(0)
            } else {
                eprintln!(
                    "run failed to converge after {} restarts",
                    report.restarts_used
                );
                Ok(1)
            }
        }
        Command::Reconstruct { input, common } => {
            let cfg = resolve("reconstruct", &common, Defaults { dim: 3, trials: 1 })?;
            let data = load_distributions(&input)?;
            let result = reconstruct(&data, &cfg.reconstruction(SAMPLE_STREAM))?;
            let converged = result.converged();
            match format_of(&common, "json").as_str() {
                "csv" => {
                    let entries: Vec<(usize, f64, Option<f64>)> = result
                        .trace
                        .entries()
                        .iter()
                        .map(|e| (e.cycle, e.residual, e.distance))
                        .collect();
                    output::emit(common.out.as_deref(), &output::trace_csv(&entries))?;
                }
                _ => {
                    let report = ReconstructReport {
                        config: cfg,
                        observables: data.len(),
                        result,
                    };
                    output::emit(common.out.as_deref(), &output::to_json_pretty(&report)?)?;
                }
            }
            Ok(if converged { 0 } else { 1 })
        }
        Command::Partners { input, common } => {
            let cfg = resolve(
                "partners",
                &common,
                Defaults {
                    dim: 3,
                    trials: 200,
                },
            )?;
            let report = match input {
                Some(path) => {
                    let data = load_distributions(&path)?;
                    experiments::partners_from_data(&cfg, &data)?
                }
                None => experiments::partners_from_specs(&cfg)?,
            };
            let empty = report.set.is_empty();
            match format_of(&common, "json").as_str() {
                "csv" => output::emit(common.out.as_deref(), &output::partners_csv(&report.set))?,
                _ => output::emit(common.out.as_deref(), &output::to_json_pretty(&report)?)?,
            }
            if empty {
                eprintln!(
                    "no partners found: {} of {} trials failed",
                    report.set.failed_trials(),
                    report.set.trials()
                );
                Ok(1)
            } else {
                Ok(0)
            }
        }
        Command::Pathological { m, common } => {
            let cfg = resolve(
                "pathological",
                &common,
                Defaults {
                    dim: 3,
                    trials: 600,
                },
            )?;
            let report = experiments::pathological(&cfg, m)?;
            match format_of(&common, "json").as_str() {
                "csv" => output::emit(common.out.as_deref(), &output::partners_csv(&report.set))?,
                _ => output::emit(common.out.as_deref(), &output::to_json_pretty(&report)?)?,
            }
            Ok(if report.set.is_empty() { 1 } else { 0 })
        }
        Command::JSymmetry(args) => {
            let cfg = resolve(
                "j-symmetry",
                &args,
                Defaults {
                    dim: 3,
                    trials: 100,
                },
            )?;
            if cfg.dim != 3 {
                return Err(Error::DimensionMismatch {
                    expected: 3,
                    found: cfg.dim,
                }
                .into());
            }
            let report = experiments::j_symmetry(&cfg, 5)?;
            let ok = report.all_verified;
            match format_of(&args, "json").as_str() {
                "csv" => output::emit(args.out.as_deref(), &output::j_symmetry_csv(&report))?,
                _ => output::emit(args.out.as_deref(), &output::to_json_pretty(&report)?)?,
            }
            Ok(if ok { 0 } else { 1 })
        }
    }
}

fn load_distributions(path: &str) -> anyhow::Result<Vec<ImpositionData64>> {
    let text =
        std::fs::read_to_string(path).map_err(|e| anyhow::anyhow!("cannot read {path}: {e}"))?;
    Ok(ingest_distributions::<f64>(&text)?)
}
