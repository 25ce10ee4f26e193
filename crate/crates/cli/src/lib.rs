//! `tzlab` scenario runner.
//!
//! Configuration precedence, lowest first: built-in defaults, the `--config`
//! file, dedicated flags (`--seed`, `--out`, the eigen flags) and finally
//! `--override key=value` in the order given.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

pub use config::ScenarioConfig;
pub use error::CliError;
use output::OutputDir;

#[derive(Debug, Parser)]
#[command(name = "tzlab", version, about = "Target-zone FX scenarios: eigen levels, FX maps, paths and prices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// JSON scenario file; defaults apply when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (overrides `output.dir`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Master seed (overrides `process.seed`).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Dotted `key=value`; the value is parsed as JSON, else taken as a string.
    #[arg(long = "override", value_name = "KEY=VALUE", global = true)]
    pub overrides: Vec<String>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct EigenArgs {
    /// zero | linear | sign | tanh | tan | intervention
    #[arg(long)]
    pub drift: Option<String>,
    /// +1 momentum, -1 mean reversion.
    #[arg(long, allow_hyphen_values = true)]
    pub epsilon: Option<i64>,
    /// `nu L` for the sign, tanh and tan families.
    #[arg(long = "nu-over-L")]
    pub nu_over_l: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub xi: Option<f64>,
    #[arg(long)]
    pub sigma: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// First excited level and band profile, optionally over a parameter sweep.
    Eigen(EigenArgs),
    /// FX map tables, linearized and nonlinear.
    Map,
    /// Reflected paths plus the statistics computed on them.
    Simulate,
    /// PDE surfaces and quotes, checked against Monte Carlo.
    Price,
    /// End-to-end USD/HKD scenario.
    HkdDemo,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Eigen(_) => "eigen",
            Command::Map => "map",
            Command::Simulate => "simulate",
            Command::Price => "price",
            Command::HkdDemo => "hkd-demo",
        }
    }
}

/// Files written by a successful run.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub out_dir: PathBuf,
    pub files: Vec<String>,
    pub summary: Value,
}

fn flag_overrides(cli: &Cli) -> Vec<String> {
    let mut v = Vec::new();
    if let Some(out) = &cli.common.out {
        v.push(format!("output.dir={}", Value::String(out.to_string_lossy().into_owned())));
    }
    if let Some(seed) = cli.common.seed {
        v.push(format!("process.seed={seed}"));
    }
    if let Command::Eigen(e) = &cli.command {
        if let Some(d) = &e.drift {
            v.push(format!("drift.kind={}", Value::String(d.clone())));
        }
        let numbers = [
            ("drift.nu_over_l", e.nu_over_l),
            ("drift.alpha", e.alpha),
            ("drift.xi", e.xi),
            ("process.sigma", e.sigma),
        ];
        for (key, val) in numbers {
            if let Some(x) = val {
                v.push(format!("{key}={}", json!(x)));
            }
        }
        if let Some(eps) = e.epsilon {
            v.push(format!("drift.epsilon={eps}"));
        }
    }
    v.extend(cli.common.overrides.iter().cloned());
    v
}

/// Resolves the configuration of `cli` without running anything.
pub fn resolve_config(cli: &Cli) -> Result<ScenarioConfig, CliError> {
    let raw = match &cli.common.config {
        None => None,
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::config(vec![format!("cannot read {}: {e}", path.display())]))?;
            Some(
                serde_json::from_str(&text)
                    .map_err(|e| CliError::config(vec![format!("{} is not valid JSON: {e}", path.display())]))?,
            )
        }
    };
    ScenarioConfig::resolve(raw, &flag_overrides(cli))
}

pub fn run(cli: &Cli) -> Result<RunReport, CliError> {
    let cfg = resolve_config(cli)?;
    let out_dir = PathBuf::from(&cfg.output.dir);
    let mut out = OutputDir::create(&out_dir)?;
    let summary = match &cli.command {
        Command::Eigen(_) => commands::eigen(&cfg, &mut out)?,
        Command::Map => commands::map(&cfg, &mut out)?,
        Command::Simulate => commands::simulate(&cfg, &mut out)?,
        Command::Price => commands::price(&cfg, &mut out)?,
        Command::HkdDemo => commands::hkd_demo(&cfg, &mut out)?,
    };
    let summary = json!({"subcommand": cli.command.name(), "result": summary});
    out.json("summary.json", &summary)?;
    let config_value = serde_json::to_value(&cfg).map_err(|e| CliError::Io(e.to_string()))?;
    let files = out.finish(cli.command.name(), &config_value, cfg.process.seed)?;
    Ok(RunReport {
        out_dir,
        files,
        summary,
    })
}

/// Parses `args` and runs. A one-line JSON status goes to stdout; the
/// return value is the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand {
                eprint!("{e}");
                return 1;
            }
            let err = CliError::config(vec![e.to_string().trim_end().to_string()]);
            println!("{}", err.to_json());
            return 1;
        }
    };
    match run(&cli) {
        Ok(report) => {
            println!(
                "{}",
                json!({"ok": true, "out": report.out_dir.to_string_lossy(), "files": report.files})
            );
            0
        }
        Err(e) => {
            log::error!("{e}");
            println!("{}", e.to_json());
            e.exit_code()
        }
    }
}
