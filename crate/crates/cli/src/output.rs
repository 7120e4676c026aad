//! Artifact rendering. CSV floats use 17 significant digits so every value
//! round-trips to the same `f64`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use grover_core::generators::RNG_NAME;
use grover_core::IterationTrace;
use serde::Serialize;

use crate::commands::{RunSummary, SweepRow};
use crate::config::{RunConfig, SweepConfig};
use crate::CliError;

pub const TRACE_HEADER: &str = "m,c1,c2,p_reduced,p_full,deviation";
pub const SWEEP_HEADER: &str =
    "N,l,a,m_paper,m_exact,p_at_m_paper,p_at_m_exact,max_deviation,verdict";

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt_f64(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

fn opt_usize(x: Option<usize>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

#[derive(Serialize)]
pub struct Metadata<'a, C: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub rng: &'static str,
    pub config: &'a C,
}

impl<'a, C: Serialize> Metadata<'a, C> {
    pub fn new(config: &'a C) -> Self {
        Self { tool: "grover", version: env!("CARGO_PKG_VERSION"), rng: RNG_NAME, config }
    }
}

pub fn trace_csv(trace: &IterationTrace) -> String {
    let mut out = String::new();
    writeln!(out, "{TRACE_HEADER}").unwrap();
    for r in &trace.rows {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.m,
            fmt_f64(r.c1),
            fmt_f64(r.c2),
            fmt_f64(r.p_reduced),
            opt_f64(r.p_full),
            opt_f64(r.deviation)
        )
        .unwrap();
    }
    out
}

#[derive(Serialize)]
struct RunDocument<'a> {
    metadata: Metadata<'a, RunConfig>,
    summary: &'a RunSummary,
    rows: &'a [grover_core::TraceRow],
}

pub fn run_json(config: &RunConfig, summary: &RunSummary, trace: &IterationTrace) -> String {
    let doc = RunDocument { metadata: Metadata::new(config), summary, rows: &trace.rows };
    serde_json::to_string_pretty(&doc).expect("serializable") + "\n"
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::new();
    writeln!(out, "{SWEEP_HEADER}").unwrap();
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.n,
            r.l,
            opt_f64(r.a),
            opt_usize(r.m_paper),
            opt_usize(r.m_exact),
            opt_f64(r.p_at_m_paper),
            opt_f64(r.p_at_m_exact),
            opt_f64(r.max_deviation),
            r.verdict
        )
        .unwrap();
    }
    out
}

#[derive(Serialize)]
struct SweepDocument<'a> {
    metadata: Metadata<'a, SweepConfig>,
    rows: &'a [SweepRow],
}

pub fn sweep_json(config: &SweepConfig, rows: &[SweepRow]) -> String {
    let doc = SweepDocument { metadata: Metadata::new(config), rows };
    serde_json::to_string_pretty(&doc).expect("serializable") + "\n"
}

/// Writes to `path`, or to standard output when there is none.
pub fn emit(artifact: &str, path: Option<&Path>) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, artifact).map_err(|source| CliError::Write { path: p.to_owned(), source }),
        None => {
            print!("{artifact}");
            Ok(())
        }
    }
}
