use std::fmt;

use grover_core::generators::{make_state, make_targets, make_unitary};
use grover_core::operators::search_step;
use grover_core::reduced::{build_reduced_model, compute_overlaps, optimal_iteration_count};
use grover_core::simulate::{measure, precheck_start, run_search_with_state, Measurement};
use grover_core::validation::{validate_with, Scope, ValidationReport};
use grover_core::{
    GroverError, IterationRule, IterationTrace, SearchProblem, StartVerdict, StateVector,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Iterations, OutputFormat, RunConfig, SweepConfig};
use crate::output;
use crate::CliError;

pub fn build_problem(config: &RunConfig) -> Result<SearchProblem, CliError> {
    let targets = make_targets(&config.targets, config.n)?;
    let gamma = make_state(&config.gamma, config.n)?;
    let v = make_unitary(&config.unitary, config.n)?;
    Ok(SearchProblem::new(targets, gamma, v)?)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunSummary {
    pub a: f64,
    pub theta: f64,
    pub iterations: usize,
    pub final_p: f64,
    pub measurement: Option<Measurement>,
}

impl fmt::Display for RunSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "a={} theta={} m={} p={}",
            output::fmt_f64(self.a),
            output::fmt_f64(self.theta),
            self.iterations,
            output::fmt_f64(self.final_p)
        )?;
        if let Some(m) = self.measurement {
            write!(f, " measured={} hit={}", m.index, m.hit)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub summary: RunSummary,
    pub trace: IterationTrace,
    pub artifact: String,
}

pub fn cmd_run(config: &RunConfig) -> Result<RunOutcome, CliError> {
    let problem = build_problem(config)?;
    match precheck_start(&problem)? {
        StartVerdict::Proceed => {}
        verdict => return Err(GroverError::Precheck(verdict).into()),
    }
    let model = build_reduced_model(&compute_overlaps(&problem)?)?;
    let iterations = match config.iterations {
        Iterations::Fixed(m) => m,
        Iterations::Auto(rule) => optimal_iteration_count(&model, rule),
    };
    let (trace, state) = run_search_with_state(&problem, iterations, config.record_full)?;
    let last = trace.last().expect("trace has at least one row");
    let final_p = last.p_full.unwrap_or(last.p_reduced);

    let measurement = match config.measure_seed {
        Some(seed) => {
            let state = match state {
                Some(s) => s,
                None => iterate_full(&problem, iterations)?,
            };
            Some(measure(&state, problem.targets(), problem.unitary(), seed)?)
        }
        None => None,
    };

    let summary = RunSummary { a: model.a, theta: model.theta, iterations, final_p, measurement };
    let artifact = match config.format {
        OutputFormat::Csv => output::trace_csv(&trace),
        OutputFormat::Json => output::run_json(config, &summary, &trace),
    };
    Ok(RunOutcome { summary, trace, artifact })
}

fn iterate_full(problem: &SearchProblem, steps: usize) -> Result<StateVector, CliError> {
    let mut state = problem.gamma().clone();
    for _ in 0..steps {
        state = search_step(problem, &state)?;
    }
    Ok(state)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    #[serde(rename = "N")]
    pub n: usize,
    pub l: usize,
    pub a: Option<f64>,
    pub m_paper: Option<usize>,
    pub m_exact: Option<usize>,
    pub p_at_m_paper: Option<f64>,
    pub p_at_m_exact: Option<f64>,
    pub max_deviation: Option<f64>,
    pub verdict: StartVerdict,
}

/// One sweep point. A failed precheck becomes a row, anything else is an
/// error.
pub fn sweep_point(config: &RunConfig) -> Result<SweepRow, CliError> {
    let problem = build_problem(config)?;
    let mut row = SweepRow {
        n: config.n,
        l: problem.targets().len(),
        a: None,
        m_paper: None,
        m_exact: None,
        p_at_m_paper: None,
        p_at_m_exact: None,
        max_deviation: None,
        verdict: precheck_start(&problem)?,
    };
    if row.verdict != StartVerdict::Proceed {
        return Ok(row);
    }
    let model = build_reduced_model(&compute_overlaps(&problem)?)?;
    let m_paper = optimal_iteration_count(&model, IterationRule::Paper);
    let m_exact = optimal_iteration_count(&model, IterationRule::Exact);
    let (trace, _) = run_search_with_state(&problem, m_paper.max(m_exact), true)?;
    row.a = Some(model.a);
    row.m_paper = Some(m_paper);
    row.m_exact = Some(m_exact);
    row.p_at_m_paper = trace.rows[m_paper].p_full;
    row.p_at_m_exact = trace.rows[m_exact].p_full;
    row.max_deviation = trace.max_deviation();
    Ok(row)
}

#[derive(Clone, Debug)]
pub struct SweepOutcome {
    pub rows: Vec<SweepRow>,
    pub artifact: String,
}

/// Evaluates every point on a pool of `config.workers` threads. Rows come
/// back in axis order whatever the worker count.
pub fn cmd_sweep(config: &SweepConfig) -> Result<SweepOutcome, CliError> {
    let points = config.points()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers.max(1))
        .build()
        .map_err(|e| CliError::Config(format!("cannot start worker pool: {e}")))?;
    let rows = pool.install(|| points.par_iter().map(sweep_point).collect::<Result<Vec<_>, _>>())?;
    let artifact = match config.base.format {
        OutputFormat::Csv => output::sweep_csv(&rows),
        OutputFormat::Json => output::sweep_json(config, &rows),
    };
    Ok(SweepOutcome { rows, artifact })
}

pub fn cmd_validate(scope: Scope, seed: u64, problems: usize) -> Result<ValidationReport, CliError> {
    Ok(validate_with(scope, seed, problems)?)
}
