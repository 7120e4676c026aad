//! Two-dimensional model of the search iteration.
//!
//! With overlaps `μ_j = ⟨w_j|V|γ⟩` and `a = 2·(Σ|μ_j|²)^{1/2}`, the unit
//! vector `|μ⟩ = (2/a) Σ μ_j V†|w_j⟩` satisfies
//!
//! ```text
//! U|γ⟩ = (1 − a²)|γ⟩ + a|μ⟩,      U|μ⟩ = −a|γ⟩ + |μ⟩,
//! ```
//!
//! so coordinates `(c1, c2)` of a state `c1|γ⟩ + c2|μ⟩` advance by
//! `Mᵀ = [[1 − a², −a], [a, 1]]`.
//!
//! The basis is oblique: `⟨γ|μ⟩ = (2/a) Σ |μ_j|² = a/2`, so the squared norm
//! of `c1|γ⟩ + c2|μ⟩` is `c1² + c2² + a·c1·c2`, not `c1² + c2²`.
//!
//! Success probability. The projection of `V|γ⟩` onto the target span is
//! `Σ μ_j |w_j⟩ = (a/2)·V|μ⟩`, and `V|μ⟩` lies entirely in that span with unit
//! norm. Hence `P_L V (c1|γ⟩ + c2|μ⟩) = (c1·a/2 + c2)·V|μ⟩`, and the
//! probability of measuring a marked object is `|c1·a/2 + c2|²`.
//!
//! `det M = 1` and `tr M = 2 − a²`, so for `0 < a < 2` the eigenvalues are
//! `e^{±iθ}` with `cos θ = 1 − a²/2`, i.e. `θ = 2·arcsin(a/2)`.

use std::f64::consts::PI;

use crate::error::{GroverError, Result};
use crate::hilbert::{StateVector, C64, ZERO};
use crate::operators::SearchProblem;

/// Smallest admissible `a`. Below it `V|γ⟩` counts as orthogonal to the
/// target span and no reduced model is built.
pub const A_MIN: f64 = 1e-9;

/// Slack allowed on a success probability before it is reported as
/// inconsistent rather than clamped.
pub const PROBABILITY_SLACK: f64 = 1e-9;

/// `μ_j = ⟨w_j|V|γ⟩` in ascending target order, and `Σ|μ_j|²`.
#[derive(Clone, Debug, PartialEq)]
pub struct OverlapData {
    pub mu: Vec<C64>,
    pub ssq: f64,
}

impl OverlapData {
    pub fn new(mu: Vec<C64>) -> Self {
        let ssq = mu.iter().map(|m| m.norm_sqr()).sum();
        Self { mu, ssq }
    }

    pub fn len(&self) -> usize {
        self.mu.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mu.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReducedModel {
    pub a: f64,
    /// `M = [[1 − a², a], [−a, 1]]`.
    pub m2: [[f64; 2]; 2],
    /// Rotation angle per iteration, in `(0, π]`.
    pub theta: f64,
    pub overlaps: OverlapData,
}

/// Coordinates with respect to `{|γ⟩, |μ⟩}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoefficientPair {
    pub c1: f64,
    pub c2: f64,
}

impl CoefficientPair {
    pub const START: CoefficientPair = CoefficientPair { c1: 1.0, c2: 0.0 };

    /// `‖c1|γ⟩ + c2|μ⟩‖²` in the oblique basis.
    pub fn oblique_norm_sqr(&self, a: f64) -> f64 {
        self.c1 * self.c1 + self.c2 * self.c2 + a * self.c1 * self.c2
    }
}

/// The `(ℓ+1)×(ℓ+1)` matrix whose row `k` holds the coefficients of `U b_k`
/// in the basis `b_0 = |γ⟩`, `b_j = V†|w_j⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct BigMMatrix {
    size: usize,
    entries: Vec<C64>,
}

impl BigMMatrix {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.entries[row * self.size + col]
    }

    /// Advances basis coordinates by one application of `U`, i.e. returns
    /// `𝓜ᵀ c`.
    pub fn apply_transpose(&self, coords: &[C64]) -> Vec<C64> {
        assert_eq!(coords.len(), self.size);
        (0..self.size)
            .map(|i| coords.iter().enumerate().map(|(k, c)| self.get(k, i) * c).sum())
            .collect()
    }
}

/// Reads `μ_j` off `V|γ⟩` at the target indices.
pub fn compute_overlaps(problem: &SearchProblem) -> Result<OverlapData> {
    let vg = problem.unitary().apply(problem.gamma(), false)?;
    let amps = vg.amplitudes();
    Ok(OverlapData::new(problem.targets().indices().iter().map(|&t| amps[t]).collect()))
}

pub fn build_reduced_model(overlaps: &OverlapData) -> Result<ReducedModel> {
    if !(overlaps.ssq > (A_MIN / 2.0).powi(2)) {
        return Err(GroverError::OrthogonalStart { ssq: overlaps.ssq });
    }
    let a = 2.0 * overlaps.ssq.sqrt();
    let m2 = [[1.0 - a * a, a], [-a, 1.0]];
    let theta = (1.0 - a * a / 2.0).clamp(-1.0, 1.0).acos();
    Ok(ReducedModel { a, m2, theta, overlaps: overlaps.clone() })
}

/// `|μ⟩ = (2/a) Σ μ_j V†|w_j⟩` as a full-space state.
pub fn mu_state(problem: &SearchProblem, overlaps: &OverlapData) -> Result<StateVector> {
    let model = build_reduced_model(overlaps)?;
    let mut y = vec![ZERO; problem.dim()];
    for (&t, &m) in problem.targets().indices().iter().zip(&overlaps.mu) {
        y[t] = m * (2.0 / model.a);
    }
    let out = problem.unitary().apply_slice(&y, true)?;
    StateVector::new(out)
}

pub fn big_m_matrix(overlaps: &OverlapData) -> BigMMatrix {
    let size = overlaps.len() + 1;
    let mut entries = vec![ZERO; size * size];
    entries[0] = C64::new(1.0 - 4.0 * overlaps.ssq, 0.0);
    for (j, mu) in overlaps.mu.iter().enumerate() {
        entries[j + 1] = mu * 2.0;
        entries[(j + 1) * size] = -mu.conj() * 2.0;
        entries[(j + 1) * size + j + 1] = C64::new(1.0, 0.0);
    }
    BigMMatrix { size, entries }
}

#[inline]
fn advance(model: &ReducedModel, c: CoefficientPair) -> CoefficientPair {
    // Mᵀ = [[m00, m10], [m01, m11]]
    let m = &model.m2;
    CoefficientPair {
        c1: m[0][0] * c.c1 + m[1][0] * c.c2,
        c2: m[0][1] * c.c1 + m[1][1] * c.c2,
    }
}

/// `(Mᵀ)^m (1, 0)` by repeated multiplication.
pub fn iterate_reduced(model: &ReducedModel, m: usize) -> CoefficientPair {
    (0..m).fold(CoefficientPair::START, |c, _| advance(model, c))
}

/// Coefficients for steps `0..=m_max`; entry `m` is bit-identical to
/// `iterate_reduced(model, m)`.
pub fn reduced_trajectory(model: &ReducedModel, m_max: usize) -> Vec<CoefficientPair> {
    let mut out = Vec::with_capacity(m_max + 1);
    let mut c = CoefficientPair::START;
    out.push(c);
    for _ in 0..m_max {
        c = advance(model, c);
        out.push(c);
    }
    out
}

fn raw_success(model: &ReducedModel, c: CoefficientPair) -> f64 {
    let amp = c.c1 * model.a / 2.0 + c.c2;
    amp * amp
}

/// `|c1·a/2 + c2|²`; see the module docs for the derivation.
pub fn success_probability(model: &ReducedModel, c: CoefficientPair) -> Result<f64> {
    let p = raw_success(model, c);
    if !(-PROBABILITY_SLACK..=1.0 + PROBABILITY_SLACK).contains(&p) {
        return Err(GroverError::NumericalConsistency(format!(
            "reduced success probability {p} outside [0, 1]"
        )));
    }
    Ok(p.clamp(0.0, 1.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IterationRule {
    /// `round(π/(2a))`.
    Paper,
    /// Best success probability over `m ∈ [0, ⌈π/θ⌉ + 1]`, smallest `m` on ties.
    Exact,
}

pub fn optimal_iteration_count(model: &ReducedModel, rule: IterationRule) -> usize {
    match rule {
        IterationRule::Paper => (PI / (2.0 * model.a)).round() as usize,
        IterationRule::Exact => {
            let window = (PI / model.theta).ceil() as usize + 1;
            let mut best = (0, raw_success(model, CoefficientPair::START));
            for (m, c) in reduced_trajectory(model, window).into_iter().enumerate().skip(1) {
                let p = raw_success(model, c);
                if p > best.1 {
                    best = (m, p);
                }
            }
            best.0
        }
    }
}
