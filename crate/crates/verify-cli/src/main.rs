//! Command-line runner for the mukai-core verification scenarios.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use mukai_core::par::Exec;
use mukai_core::scenario::{run_scenario, Scenario, ScenarioConfig};
use serde::Deserialize;

const USAGE_ERROR: u8 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Text,
    Jsonl,
}

#[derive(Debug, Parser)]
#[command(name = "mukai-verify", version, about = "Seeded verification scenarios with pass/fail/inconclusive reports")]
struct Cli {
    /// chow, linkage, linear-system, cremona, covering, lines or all
    #[arg(value_parser = parse_scenario)]
    scenario: Scenario,
    #[arg(long)]
    genus: Option<u32>,
    #[arg(long)]
    prime: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    /// Points whose cubic sections enter the covering check
    #[arg(long)]
    points: Option<usize>,
    /// Samples for sampled claims
    #[arg(long)]
    samples: Option<usize>,
    /// Top degree of emptiness sweeps
    #[arg(long)]
    sweep_bound: Option<u32>,
    /// Write the report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// TOML file with the same keys as the flags; flags win
    #[arg(long)]
    config: Option<PathBuf>,
    /// Run without the thread pool
    #[arg(long)]
    sequential: bool,
}

fn parse_scenario(s: &str) -> Result<Scenario, String> {
    s.parse().map_err(|e: mukai_core::Error| e.to_string())
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
struct FileConfig {
    genus: Option<u32>,
    prime: Option<u32>,
    seed: Option<u64>,
    points: Option<usize>,
    samples: Option<usize>,
    sweep_bound: Option<u32>,
    out: Option<PathBuf>,
    format: Option<Format>,
}

fn read_config(path: &Path) -> Result<FileConfig, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

struct Resolved {
    config: ScenarioConfig,
    out: Option<PathBuf>,
    format: Format,
}

fn resolve(cli: Cli) -> Result<Resolved, String> {
    let file = match &cli.config {
        Some(p) => read_config(p)?,
        None => FileConfig::default(),
    };
    let d = ScenarioConfig::new(cli.scenario);
    let config = ScenarioConfig {
        scenario: cli.scenario,
        genus: cli.genus.or(file.genus),
        prime: cli.prime.or(file.prime).unwrap_or(d.prime),
        seed: cli.seed.or(file.seed).unwrap_or(d.seed),
        points: cli.points.or(file.points).unwrap_or(d.points),
        samples: cli.samples.or(file.samples).unwrap_or(d.samples),
        sweep_bound: cli.sweep_bound.or(file.sweep_bound).unwrap_or(d.sweep_bound),
        exec: if cli.sequential { Exec::Sequential } else { Exec::default() },
    };
    config.validate().map_err(|e| e.to_string())?;
    Ok(Resolved {
        config,
        out: cli.out.or(file.out),
        format: cli.format.or(file.format).unwrap_or(Format::Text),
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { USAGE_ERROR } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let r = match resolve(cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(USAGE_ERROR);
        }
    };
    let run = match run_scenario(&r.config) {
        Ok(run) => run,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let body = match r.format {
        Format::Text => run.to_string(),
        Format::Jsonl => run.to_jsonl(),
    };
    match &r.out {
        Some(p) => {
            if let Err(e) = std::fs::write(p, &body) {
                eprintln!("error: {}: {e}", p.display());
                return ExitCode::from(1);
            }
            eprintln!("{}: {}", r.config.scenario, run.status());
        }
        None => print!("{body}"),
    }
    ExitCode::from(run.exit_code() as u8)
}
