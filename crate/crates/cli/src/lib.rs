//! Command-line front end: config ingestion, scenario presets and report
//! emission for the franson simulator.

use std::fs;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

pub mod commands;
pub mod config;
mod error;

pub use commands::Render;
pub use config::{preset, RunConfig, PRESETS};
pub use error::CliError;

use config::{FitKind, SimulateMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "franson", version, about = "Franson interferometry over free-space channels")]
pub struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true, conflicts_with = "preset")]
    pub config: Option<PathBuf>,
    /// Shipped scenario (see `franson presets`).
    #[arg(long, global = true)]
    pub preset: Option<String>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory for data products and the resolved config.
    #[arg(long, global = true, env = "FRANSON_OUT_DIR", default_value = "franson-out")]
    pub out: PathBuf,
    /// Report format on stdout (human-readable text when omitted).
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Gravitational redshift and Doppler phases.
    Redshift,
    /// Phase-noise budget.
    Budget,
    /// Satellite link efficiency and acquisition time.
    Linkbudget,
    /// Monte Carlo measurement campaign or fringe scan.
    Simulate {
        #[arg(long, value_enum)]
        mode: Option<SimulateMode>,
        #[arg(long)]
        trials: Option<u64>,
    },
    /// Fit a CSV produced by `simulate`, `g2` or a thermal scan.
    Fit {
        input: Option<PathBuf>,
        #[arg(long, value_enum)]
        kind: Option<FitKind>,
    },
    /// Second-order correlation of a simulated or recorded photon stream.
    G2,
    /// List the shipped presets.
    Presets,
}

fn load(cli: &Cli) -> Result<Option<RunConfig>, CliError> {
    if let Some(path) = &cli.config {
        let text = fs::read_to_string(path).map_err(CliError::io(path))?;
        return RunConfig::parse(&text).map(Some);
    }
    cli.preset.as_deref().map(preset).transpose()
}

fn section<T: Clone + Default>(cfg: &Option<RunConfig>, pick: fn(&RunConfig) -> &Option<T>, name: &str) -> Result<T, CliError> {
    match cfg {
        None => Ok(T::default()),
        Some(c) => pick(c)
            .clone()
            .ok_or_else(|| CliError::Config(format!("configuration has no [{name}] section"))),
    }
}

fn render<R: Render>(r: &R, format: Option<Format>) -> Result<String, CliError> {
    match format {
        None => Ok(r.text()),
        Some(Format::Csv) => Ok(r.csv()),
        Some(Format::Json) => r.json(),
    }
}

/// Runs one command and returns what it prints on stdout.
pub fn run(cli: &Cli) -> Result<String, CliError> {
    if let Command::Presets = cli.command {
        return Ok(PRESETS.iter().map(|(n, _)| format!("{n}\n")).collect());
    }
    let cfg = load(cli)?;
    let seed = cli.seed.or(cfg.as_ref().and_then(|c| c.seed)).unwrap_or(0);
    let out = &cli.out;
    let mut resolved = RunConfig {
        seed: Some(seed),
        ..Default::default()
    };
    let text = match &cli.command {
        Command::Redshift => {
            let s = section(&cfg, |c| &c.redshift, "redshift")?;
            let r = commands::cmd_redshift(&s)?;
            resolved.redshift = Some(s);
            render(&r, cli.format)?
        }
        Command::Budget => {
            let s = section(&cfg, |c| &c.budget, "budget")?;
            let r = commands::cmd_budget(&s, out)?;
            resolved.budget = Some(s);
            render(&r, cli.format)?
        }
        Command::Linkbudget => {
            let s = section(&cfg, |c| &c.linkbudget, "linkbudget")?;
            let r = commands::cmd_linkbudget(&s, out)?;
            resolved.linkbudget = Some(s);
            render(&r, cli.format)?
        }
        Command::Simulate { mode, trials } => {
            let mut s = section(&cfg, |c| &c.simulate, "simulate")?;
            if let Some(m) = mode {
                s.mode = *m;
            }
            if let Some(t) = trials {
                s.trials = *t;
            }
            let r = commands::cmd_simulate(&s, seed, out)?;
            match s.mode {
                SimulateMode::Campaign => s.campaign = Some(commands::resolve_campaign(&s, seed)?),
                SimulateMode::Scan => s.scan = Some(s.scan.unwrap_or_default()),
            }
            resolved.simulate = Some(s);
            render(&r, cli.format)?
        }
        Command::Fit { input, kind } => {
            let mut s = section(&cfg, |c| &c.fit, "fit")?;
            if let Some(k) = kind {
                s.kind = Some(*k);
            }
            if let Some(p) = input {
                s.input = Some(p.display().to_string());
            }
            let path = s
                .input
                .clone()
                .ok_or_else(|| CliError::Config("fit needs an input CSV".into()))?;
            let text = fs::read_to_string(&path).map_err(CliError::io(&path))?;
            let r = commands::cmd_fit(&s, &text, out)?;
            resolved.fit = Some(s);
            render(&r, cli.format)?
        }
        Command::G2 => {
            let s = section(&cfg, |c| &c.g2, "g2")?;
            let r = commands::cmd_g2(&s, seed, out)?;
            resolved.g2 = Some(s);
            render(&r, cli.format)?
        }
        Command::Presets => unreachable!(),
    };
    commands::write_file(out, "resolved.toml", resolved.to_toml()?.as_bytes())?;
    Ok(text)
}

/// Parses `args` (program name first) and runs the command.
pub fn run_from<I, T>(args: I) -> Result<String, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| CliError::Config(e.to_string()))?;
    run(&cli)
}
