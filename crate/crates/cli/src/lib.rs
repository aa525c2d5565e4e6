//! Command-line front end for `volrep`.
//!
//! `main.rs` only parses arguments and forwards to [`run`], so every
//! command can be driven from tests with captured output.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};

use volrep::engine::{check_theorem_1, check_theorem_2, run_batch_with, BatchOptions, Verdict};
use volrep::model::{ReputationType, ScenarioConfig, Severity};
use volrep::output::{emit_results, format_summary, Format};
use volrep::scenarios::{find_scenario, list_scenarios, PresetParams};
use volrep::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NOT_CONVERGED: i32 = 3;
pub const EXIT_CHECK_FAILED: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "volrep",
    version,
    about = "Reputation-based master-worker volunteer computing simulator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the built-in scenario presets.
    List,
    /// Print the resolved configuration as TOML.
    Show(ConfigArgs),
    /// Run a batch of instantiations and print a summary.
    Run(RunArgs),
    /// Check an eventual-correctness theorem on an altruistic/malicious pool.
    Check(CheckArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RepArg {
    Linear,
    Exponential,
    Boinc,
}

impl From<RepArg> for ReputationType {
    fn from(r: RepArg) -> Self {
        match r {
            RepArg::Linear => ReputationType::Linear,
            RepArg::Exponential => ReputationType::Exponential,
            RepArg::Boinc => ReputationType::Boinc,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Jsonl,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Jsonl => Format::Jsonl,
        }
    }
}

#[derive(Debug, Args)]
pub struct ConfigArgs {
    /// Preset name (see `volrep list`) or path to a TOML config.
    pub target: String,
    #[arg(long, value_enum)]
    pub reputation: Option<RepArg>,
    /// Initial audit probability.
    #[arg(long = "pa-init")]
    pub pa_init: Option<f64>,
    /// Base seed; instantiation k uses seed + k.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of instantiations.
    #[arg(long)]
    pub runs: Option<usize>,
    /// Rounds simulated after convergence.
    #[arg(long)]
    pub horizon: Option<u64>,
    /// Rounds allowed to reach convergence.
    #[arg(long = "max-rounds")]
    pub max_rounds: Option<u64>,
    /// Dotted-path override such as `mechanism.select_n=4`. Repeatable.
    #[arg(long = "set", value_name = "PATH=VALUE")]
    pub set: Vec<String>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Directory for result files.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write one per-round trace file per instantiation.
    #[arg(long, requires = "out")]
    pub trace: bool,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: FormatArg,
    /// Worker threads; defaults to the available cores.
    #[arg(long)]
    pub parallel: Option<usize>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// Which theorem: 1 (LINEAR/EXPONENTIAL) or 2 (BOINC).
    #[arg(value_parser = clap::value_parser!(u8).range(1..=2))]
    pub theorem: u8,
    #[command(flatten)]
    pub config: ConfigArgs,
    #[arg(long)]
    pub parallel: Option<usize>,
}

/// Builds the configuration described by `args`. Fails on any
/// error-severity diagnostic; warnings are left to the caller.
pub fn resolve_config(args: &ConfigArgs) -> volrep::Result<ScenarioConfig> {
    let path = Path::new(&args.target);
    let mut cfg = if args.target.ends_with(".toml") || path.is_file() {
        let mut cfg = ScenarioConfig::load(path)?;
        if let Some(r) = args.reputation {
            cfg.mechanism.reputation_type = r.into();
        }
        if let Some(p) = args.pa_init {
            cfg.mechanism.audit_prob_initial = p;
        }
        cfg
    } else {
        let defaults = PresetParams::default();
        find_scenario(&args.target)?.generate(PresetParams {
            reputation: args.reputation.map_or(defaults.reputation, Into::into),
            audit_prob_initial: args.pa_init.unwrap_or(defaults.audit_prob_initial),
        })
    };
    if let Some(s) = args.seed {
        cfg.base_seed = s;
    }
    if let Some(r) = args.runs {
        cfg.num_instantiations = r;
    }
    if let Some(h) = args.horizon {
        cfg.post_convergence_horizon = h;
    }
    if let Some(m) = args.max_rounds {
        cfg.max_rounds = m;
    }
    for item in &args.set {
        let (key, value) = item.split_once('=').ok_or_else(|| Error::Override {
            path: item.clone(),
            reason: "expected PATH=VALUE".into(),
        })?;
        cfg = cfg.with_override(key.trim(), value.trim())?;
    }
    cfg.ensure_valid()?;
    Ok(cfg)
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Io(_) | Error::Csv(_) | Error::Json(_) => EXIT_IO,
        _ => EXIT_INVALID,
    }
}

fn threads(requested: Option<usize>) -> usize {
    requested
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
        .max(1)
}

/// Runs a parsed command, writing normal output to `out` and diagnostics to
/// `err`. Returns the process exit code.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match dispatch(cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let code = e.downcast_ref::<Error>().map_or(EXIT_IO, exit_code);
            let _ = writeln!(err, "error: {e:#}");
            code
        }
    }
}

fn load(args: &ConfigArgs, err: &mut dyn Write) -> anyhow::Result<ScenarioConfig> {
    let cfg = resolve_config(args)?;
    for d in cfg.validate() {
        if d.severity == Severity::Warning {
            writeln!(err, "{d}")?;
        }
    }
    Ok(cfg)
}

fn dispatch(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> anyhow::Result<i32> {
    match cli.command {
        Command::List => {
            for p in list_scenarios() {
                writeln!(out, "{:<10} {}", p.name, p.description)?;
            }
            Ok(EXIT_OK)
        }
        Command::Show(args) => {
            let cfg = load(&args, err)?;
            write!(out, "{}", cfg.to_toml_string()?)?;
            Ok(EXIT_OK)
        }
        Command::Run(args) => run_batch_command(args, out, err),
        Command::Check(args) => {
            let cfg = load(&args.config, err)?;
            let report = match args.theorem {
                1 => check_theorem_1(&cfg, threads(args.parallel))?,
                _ => check_theorem_2(&cfg, threads(args.parallel))?,
            };
            writeln!(
                out,
                "theorem {}: {:?} (expected {:?}); runs {}, converged {}, violating {} ({:.4})",
                args.theorem,
                report.verdict,
                report.expectation,
                report.runs,
                report.converged,
                report.violating_runs,
                report.violating_fraction
            )?;
            Ok(if report.verdict == Verdict::Pass {
                EXIT_OK
            } else {
                EXIT_CHECK_FAILED
            })
        }
    }
}

fn run_batch_command(
    args: RunArgs,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> anyhow::Result<i32> {
    let cfg = load(&args.config, err)?;
    let batch = run_batch_with(
        &cfg,
        BatchOptions {
            parallelism: threads(args.parallel),
            keep_traces: args.trace,
        },
    )?;
    writeln!(
        out,
        "{}: {}, p_A init {}, N={}, n={}, seeds {}-{}",
        args.config.target,
        cfg.mechanism.reputation_type,
        cfg.mechanism.audit_prob_initial,
        cfg.mechanism.pool_size,
        cfg.mechanism.select_n,
        cfg.base_seed,
        cfg.base_seed
            .wrapping_add(cfg.num_instantiations as u64 - 1),
    )?;
    write!(out, "{}", format_summary(&batch.stats))?;
    if let Some(dir) = &args.out {
        let files = emit_results(dir, &batch, cfg.mechanism.select_n, args.format.into())
            .with_context(|| format!("writing results to {}", dir.display()))?;
        writeln!(out, "wrote {} file(s) to {}", files.len(), dir.display())?;
    }
    if batch.stats.converged == 0 {
        writeln!(err, "no run converged within {} rounds", cfg.max_rounds)?;
        return Ok(EXIT_NOT_CONVERGED);
    }
    Ok(EXIT_OK)
}
