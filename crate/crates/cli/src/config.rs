//! Command-line flags, config files and their merge into a `RunConfig`.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use mnbound_core::solver::SolverConfig;
use serde::Deserialize;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
    Table,
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Support values, comma separated (e.g. 0,1,3)
    #[arg(long, allow_hyphen_values = true)]
    pub support: Option<String>,

    /// Sample size
    #[arg(long)]
    pub n: Option<u32>,

    /// Level of the bound, strictly between 0 and 1
    #[arg(long)]
    pub alpha: Option<f64>,

    /// JSON or TOML file with defaults; explicit flags win
    #[arg(long)]
    pub config: Option<PathBuf>,

    #[arg(long, value_enum)]
    pub output: Option<OutputFormat>,

    /// Seed for every random choice (solver starts, simulation, priors)
    #[arg(long)]
    pub seed: Option<u64>,

    /// Worker threads
    #[arg(long, env = "MNBOUND_THREADS")]
    pub threads: Option<usize>,

    /// Report values in the shifted coordinates where the least support value is 0
    #[arg(long)]
    pub raw: bool,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    support: Option<Vec<f64>>,
    n: Option<u32>,
    alpha: Option<f64>,
    order: Option<String>,
    output: Option<OutputFormat>,
    seed: Option<u64>,
    threads: Option<usize>,
    solver: Option<SolverConfig>,
}

impl FileConfig {
    fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::invalid(format!("cannot read {}: {e}", path.display())))?;
        let is_toml = path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("toml"));
        if is_toml {
            toml::from_str(&text)
                .map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))
        } else {
            serde_json::from_str(&text)
                .map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub support: Vec<f64>,
    pub n: u32,
    alpha: Option<f64>,
    pub order: String,
    pub solver: SolverConfig,
    pub output: Option<OutputFormat>,
    pub seed: u64,
    pub threads: Option<usize>,
    pub raw: bool,
}

impl RunConfig {
    /// Merge the config file (if any) under the explicit flags and validate.
    pub fn resolve(common: &Common, order: Option<&str>) -> CliResult<Self> {
        let file = match &common.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };
        let support = match &common.support {
            Some(s) => parse_reals(s, "support")?,
            None => file
                .support
                .ok_or_else(|| CliError::invalid("--support is required"))?,
        };
        if support.is_empty() {
            return Err(CliError::invalid("support must contain at least one value"));
        }
        let n = common
            .n
            .or(file.n)
            .ok_or_else(|| CliError::invalid("--n is required"))?;
        if n == 0 {
            return Err(CliError::invalid("n must be at least 1"));
        }
        let alpha = common.alpha.or(file.alpha);
        if let Some(a) = alpha {
            if !(a > 0.0 && a < 1.0) {
                return Err(CliError::invalid(format!("alpha must lie in (0, 1), got {a}")));
            }
        }
        let mut solver = file.solver.unwrap_or_default();
        if let Some(s) = common.seed.or(file.seed) {
            solver.seed = s;
        }
        solver.validate()?;
        let threads = common.threads.or(file.threads);
        if threads == Some(0) {
            return Err(CliError::invalid("threads must be at least 1"));
        }
        Ok(RunConfig {
            support,
            n,
            alpha,
            order: order
                .map(str::to_string)
                .or(file.order)
                .unwrap_or_else(|| "lex".into()),
            seed: solver.seed,
            solver,
            output: common.output.or(file.output),
            threads,
            raw: common.raw,
        })
    }

    pub fn alpha(&self) -> CliResult<f64> {
        self.alpha
            .ok_or_else(|| CliError::invalid("--alpha is required for this command"))
    }
}

pub fn parse_reals(text: &str, what: &str) -> CliResult<Vec<f64>> {
    text.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| parse_real(t).ok_or_else(|| CliError::invalid(format!("{what}: {t:?} is not a number"))))
        .collect()
}

fn parse_real(t: &str) -> Option<f64> {
    match t {
        "inf" | "+inf" => Some(f64::INFINITY),
        _ => t.parse().ok(),
    }
}

pub fn parse_indices(text: &str, what: &str) -> CliResult<Vec<usize>> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse()
                .map_err(|_| CliError::invalid(format!("{what}: {t:?} is not an index")))
        })
        .collect()
}
