use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use grover_core::generators::{StateSpec, TargetSpec, UnitarySpec};
use grover_core::IterationRule;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// How many iterations a run performs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "IterationsRepr", into = "IterationsRepr")]
pub enum Iterations {
    Fixed(usize),
    Auto(IterationRule),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum IterationsRepr {
    Count(usize),
    Name(String),
}

impl TryFrom<IterationsRepr> for Iterations {
    type Error = CliError;

    fn try_from(r: IterationsRepr) -> Result<Self, CliError> {
        match r {
            IterationsRepr::Count(m) => Ok(Iterations::Fixed(m)),
            IterationsRepr::Name(s) => s.parse(),
        }
    }
}

impl From<Iterations> for IterationsRepr {
    fn from(it: Iterations) -> Self {
        match it {
            Iterations::Fixed(m) => IterationsRepr::Count(m),
            auto => IterationsRepr::Name(auto.to_string()),
        }
    }
}

impl FromStr for Iterations {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "auto-paper" => Ok(Iterations::Auto(IterationRule::Paper)),
            "auto-exact" => Ok(Iterations::Auto(IterationRule::Exact)),
            _ => s.parse().map(Iterations::Fixed).map_err(|_| {
                CliError::Config(format!(
                    "iterations must be a count, auto-paper or auto-exact, got `{s}`"
                ))
            }),
        }
    }
}

impl fmt::Display for Iterations {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Iterations::Fixed(m) => write!(f, "{m}"),
            Iterations::Auto(IterationRule::Paper) => f.write_str("auto-paper"),
            Iterations::Auto(IterationRule::Exact) => f.write_str("auto-exact"),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

fn default_unitary() -> UnitarySpec {
    UnitarySpec::Identity
}

fn default_gamma() -> StateSpec {
    StateSpec::Uniform
}

fn default_iterations() -> Iterations {
    Iterations::Auto(IterationRule::Exact)
}

/// One search run. The output path is read from config files but never
/// echoed into artifacts, so the same run written to two places produces
/// identical bytes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub n: usize,
    pub targets: TargetSpec,
    #[serde(default = "default_unitary")]
    pub unitary: UnitarySpec,
    #[serde(default = "default_gamma")]
    pub gamma: StateSpec,
    #[serde(default = "default_iterations")]
    pub iterations: Iterations,
    #[serde(default)]
    pub record_full: bool,
    #[serde(default)]
    pub measure_seed: Option<u64>,
    #[serde(default, skip_serializing)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub format: OutputFormat,
}

/// The swept axis of a [`SweepConfig`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    /// Problem dimension.
    N(Vec<usize>),
    /// Number of sampled targets; the base target seed is reused.
    TargetCount(Vec<usize>),
    /// Seeds `first..=last` for a Haar unitary.
    Seeds { first: u64, last: u64 },
}

impl SweepAxis {
    pub fn len(&self) -> usize {
        match self {
            SweepAxis::N(v) | SweepAxis::TargetCount(v) => v.len(),
            SweepAxis::Seeds { first, last } => {
                if last < first { 0 } else { (last - first + 1) as usize }
            }
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn default_workers() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub base: RunConfig,
    pub axis: SweepAxis,
    #[serde(default = "default_workers", skip_serializing)]
    pub workers: usize,
}

impl SweepConfig {
    /// One run config per sweep point, in axis order.
    pub fn points(&self) -> Result<Vec<RunConfig>, CliError> {
        if self.axis.is_empty() {
            return Err(CliError::Config("sweep axis is empty".into()));
        }
        let mut out = Vec::with_capacity(self.axis.len());
        match &self.axis {
            SweepAxis::N(ns) => {
                for &n in ns {
                    out.push(RunConfig { n, ..self.base.clone() });
                }
            }
            SweepAxis::TargetCount(counts) => {
                let seed = match self.base.targets {
                    TargetSpec::Sampled { seed, .. } => seed,
                    TargetSpec::Explicit(_) => 0,
                };
                for &count in counts {
                    out.push(RunConfig {
                        targets: TargetSpec::Sampled { count, seed },
                        ..self.base.clone()
                    });
                }
            }
            SweepAxis::Seeds { first, last } => {
                if !matches!(self.base.unitary, UnitarySpec::Haar { .. }) {
                    return Err(CliError::Config(
                        "a seed sweep needs a haar:SEED base unitary".into(),
                    ));
                }
                for seed in *first..=*last {
                    out.push(RunConfig {
                        unitary: UnitarySpec::Haar { seed },
                        ..self.base.clone()
                    });
                }
            }
        }
        Ok(out)
    }
}

pub fn parse_list(s: &str) -> Result<Vec<usize>, CliError> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| CliError::Config(format!("`{t}` is not a valid count in `{s}`")))
        })
        .collect()
}

/// `a..b` or `a..=b`, both inclusive of `b`.
pub fn parse_seed_range(s: &str) -> Result<SweepAxis, CliError> {
    let bad = || CliError::Config(format!("seed range must look like 0..9, got `{s}`"));
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    let b = b.strip_prefix('=').unwrap_or(b);
    let first: u64 = a.trim().parse().map_err(|_| bad())?;
    let last: u64 = b.trim().parse().map_err(|_| bad())?;
    if last < first {
        return Err(bad());
    }
    Ok(SweepAxis::Seeds { first, last })
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("invalid config {}: {e}", path.display())))
}
