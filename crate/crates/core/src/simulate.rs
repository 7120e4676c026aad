//! Full-space iteration, measurement, and the residual checks that tie the
//! `N`-dimensional dynamics to the invariant subspace
//! `L̃ = span({|γ⟩} ∪ V†(L))` and to the reduced model.

use std::fmt;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{GroverError, Result};
use crate::generators::{complex_gaussian, seeded_rng};
use crate::hilbert::{dot, norm, LinearOperator, StateVector, C64, ONE, ZERO};
use crate::operators::{search_step, SearchProblem, TargetSet};
use crate::reduced::{
    build_reduced_model, compute_overlaps, reduced_trajectory, success_probability, A_MIN,
};

/// `‖P_L V γ‖²` at or above `1 − ALREADY_SOLVED_TOL` means `V|γ⟩ ∈ L`.
pub const ALREADY_SOLVED_TOL: f64 = 1e-12;

/// Smallest squared Cholesky pivot of the `L̃` Gram matrix accepted as
/// nondegenerate.
pub const GRAM_PIVOT_MIN: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StartVerdict {
    Proceed,
    /// `V|γ⟩` already lies in the target span; measuring it finds a target.
    AlreadySolved,
    /// `V|γ⟩` is orthogonal to the target span; `a = 0`.
    OrthogonalStart,
}

impl fmt::Display for StartVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StartVerdict::Proceed => "Proceed",
            StartVerdict::AlreadySolved => "AlreadySolved",
            StartVerdict::OrthogonalStart => "OrthogonalStart",
        })
    }
}

pub fn precheck_start(problem: &SearchProblem) -> Result<StartVerdict> {
    let ssq = compute_overlaps(problem)?.ssq;
    Ok(if ssq >= 1.0 - ALREADY_SOLVED_TOL {
        StartVerdict::AlreadySolved
    } else if ssq <= (A_MIN / 2.0).powi(2) {
        StartVerdict::OrthogonalStart
    } else {
        StartVerdict::Proceed
    })
}

fn require_proceed(problem: &SearchProblem) -> Result<()> {
    match precheck_start(problem)? {
        StartVerdict::Proceed => Ok(()),
        verdict => Err(GroverError::Precheck(verdict)),
    }
}

/// `‖P_L V x‖²`.
pub fn full_success_probability(problem: &SearchProblem, x: &StateVector) -> Result<f64> {
    let vx = problem.unitary().apply(x, false)?;
    Ok(problem.targets().weight(vx.amplitudes()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub m: usize,
    pub c1: f64,
    pub c2: f64,
    pub p_reduced: f64,
    pub p_full: Option<f64>,
    pub deviation: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct IterationTrace {
    pub rows: Vec<TraceRow>,
}

impl IterationTrace {
    pub fn max_deviation(&self) -> Option<f64> {
        self.rows.iter().filter_map(|r| r.deviation).reduce(f64::max)
    }

    pub fn last(&self) -> Option<&TraceRow> {
        self.rows.last()
    }
}

/// Reduced-model trace for `m = 0..=m_max`. With `record_full` the state is
/// also iterated in the full space and the resulting `U^{m_max}γ` returned.
pub fn run_search_with_state(
    problem: &SearchProblem,
    m_max: usize,
    record_full: bool,
) -> Result<(IterationTrace, Option<StateVector>)> {
    require_proceed(problem)?;
    let model = build_reduced_model(&compute_overlaps(problem)?)?;
    let mut rows = Vec::with_capacity(m_max + 1);
    let mut state = record_full.then(|| problem.gamma().clone());
    for (m, c) in reduced_trajectory(&model, m_max).into_iter().enumerate() {
        if m > 0 {
            if let Some(s) = state.as_mut() {
                *s = search_step(problem, s)?;
            }
        }
        let p_reduced = success_probability(&model, c)?;
        let p_full = state.as_ref().map(|s| full_success_probability(problem, s)).transpose()?;
        rows.push(TraceRow {
            m,
            c1: c.c1,
            c2: c.c2,
            p_reduced,
            p_full,
            deviation: p_full.map(|p| (p - p_reduced).abs()),
        });
    }
    Ok((IterationTrace { rows }, state))
}

pub fn run_search(problem: &SearchProblem, m_max: usize, record_full: bool) -> Result<IterationTrace> {
    run_search_with_state(problem, m_max, record_full).map(|(trace, _)| trace)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Measurement {
    pub index: usize,
    pub hit: bool,
}

/// Samples a basis index from `V·state` with probabilities `|amp_k|²`.
pub fn measure(
    state: &StateVector,
    targets: &TargetSet,
    v: &LinearOperator,
    seed: u64,
) -> Result<Measurement> {
    if targets.dim() != state.dim() {
        return Err(GroverError::dim_mismatch("measurement targets", targets.dim(), state.dim()));
    }
    let amps = v.apply(state, false)?.into_amplitudes();
    let total: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    let u: f64 = seeded_rng(seed).random::<f64>() * total;
    let mut acc = 0.0;
    let mut index = amps.len() - 1;
    for (k, a) in amps.iter().enumerate() {
        acc += a.norm_sqr();
        if acc > u {
            index = k;
            break;
        }
    }
    // Rounding can leave the tail with u ≥ acc; fall back to the last
    // index with nonzero weight.
    if acc <= u {
        index = amps.iter().rposition(|a| a.norm_sqr() > 0.0).unwrap_or(index);
    }
    Ok(Measurement { index, hit: targets.contains(index) })
}

/// The spanning set `{|γ⟩, V†|w_1⟩, …, V†|w_ℓ⟩}` of `L̃` with its Gram
/// matrix. Projections use the Gram system directly, without first
/// orthonormalizing.
#[derive(Clone, Debug)]
pub struct SubspaceBasis {
    vectors: Vec<Vec<C64>>,
    gram: DMatrix<C64>,
    factor: Cholesky<C64, Dyn>,
}

impl SubspaceBasis {
    pub fn new(problem: &SearchProblem) -> Result<Self> {
        let n = problem.dim();
        let mut vectors = vec![problem.gamma().amplitudes().to_vec()];
        for &t in problem.targets().indices() {
            let mut e = vec![ZERO; n];
            e[t] = ONE;
            vectors.push(problem.unitary().apply_slice(&e, true)?);
        }
        Self::from_vectors(vectors)
    }

    pub fn from_vectors(vectors: Vec<Vec<C64>>) -> Result<Self> {
        let k = vectors.len();
        let gram = DMatrix::from_fn(k, k, |i, j| dot(&vectors[i], &vectors[j]));
        let factor = Cholesky::new(gram.clone()).ok_or_else(|| {
            GroverError::DegenerateSubspace("Gram matrix is not positive definite".into())
        })?;
        let min_pivot = (0..k).map(|i| factor.l_dirty()[(i, i)].norm_sqr()).fold(f64::INFINITY, f64::min);
        if min_pivot < GRAM_PIVOT_MIN {
            return Err(GroverError::DegenerateSubspace(format!(
                "smallest Gram pivot {min_pivot:e} below {GRAM_PIVOT_MIN:e}"
            )));
        }
        Ok(Self { vectors, gram, factor })
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[Vec<C64>] {
        &self.vectors
    }

    pub fn gram(&self) -> &DMatrix<C64> {
        &self.gram
    }

    /// Coordinates `c` minimizing `‖x − Σ c_k b_k‖`, from `G c = B†x`.
    pub fn coordinates(&self, x: &[C64]) -> Vec<C64> {
        let rhs = DVector::from_iterator(self.len(), self.vectors.iter().map(|b| dot(b, x)));
        self.factor.solve(&rhs).iter().copied().collect()
    }

    pub fn combine(&self, coords: &[C64]) -> Vec<C64> {
        let n = self.vectors[0].len();
        let mut out = vec![ZERO; n];
        for (b, c) in self.vectors.iter().zip(coords) {
            for (o, bi) in out.iter_mut().zip(b) {
                *o += c * bi;
            }
        }
        out
    }

    /// Component of `x` orthogonal to the subspace.
    pub fn complement(&self, x: &[C64]) -> Vec<C64> {
        let proj = self.combine(&self.coordinates(x));
        x.iter().zip(&proj).map(|(a, b)| a - b).collect()
    }

    pub fn leakage(&self, x: &[C64]) -> f64 {
        norm(&self.complement(x))
    }

    /// Unit vector `Σ c_k b_k` with complex Gaussian `c_k`.
    pub fn random_member<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<StateVector> {
        let coords: Vec<C64> = (0..self.len()).map(|_| complex_gaussian(rng)).collect();
        StateVector::normalized(self.combine(&coords))
    }
}

/// Largest `‖P_{L̃⊥} U v‖` over `v = γ` and `trials` random unit `v ∈ L̃`.
pub fn invariance_residual(problem: &SearchProblem, trials: usize, seed: u64) -> Result<f64> {
    invariance_residual_with(problem, trials, seed, |x| search_step(problem, x))
}

/// [`invariance_residual`] for an arbitrary operator in place of `U`; used
/// for negative controls.
pub fn invariance_residual_with<F>(
    problem: &SearchProblem,
    trials: usize,
    seed: u64,
    op: F,
) -> Result<f64>
where
    F: Fn(&StateVector) -> Result<StateVector>,
{
    require_proceed(problem)?;
    let basis = SubspaceBasis::new(problem)?;
    let mut rng = seeded_rng(seed);
    let mut worst = basis.leakage(op(problem.gamma())?.amplitudes());
    for _ in 0..trials {
        let v = basis.random_member(&mut rng)?;
        worst = worst.max(basis.leakage(op(&v)?.amplitudes()));
    }
    Ok(worst)
}

/// `U` followed by a rotation by `angle` in the plane spanned by `U|γ⟩ ∈ L̃`
/// and a unit vector of `L̃⊥`. Not invariant on `L̃`.
pub struct PerturbedSearch<'a> {
    problem: &'a SearchProblem,
    inside: Vec<C64>,
    outside: Vec<C64>,
    angle: f64,
}

impl<'a> PerturbedSearch<'a> {
    pub fn new(problem: &'a SearchProblem, angle: f64, seed: u64) -> Result<Self> {
        let basis = SubspaceBasis::new(problem)?;
        let inside = search_step(problem, problem.gamma())?.into_amplitudes();
        let mut rng = seeded_rng(seed);
        let raw: Vec<C64> = (0..problem.dim()).map(|_| complex_gaussian(&mut rng)).collect();
        let outside = StateVector::normalized(basis.complement(&raw))
            .map_err(|_| {
                GroverError::DegenerateSubspace("invariant subspace fills the whole space".into())
            })?
            .into_amplitudes();
        Ok(Self { problem, inside, outside, angle })
    }

    pub fn apply(&self, x: &StateVector) -> Result<StateVector> {
        let mut y = search_step(self.problem, x)?.into_amplitudes();
        let (c, s) = (self.angle.cos(), self.angle.sin());
        let alpha = dot(&self.inside, &y);
        let beta = dot(&self.outside, &y);
        let d_in = alpha * (c - 1.0) - beta * s;
        let d_out = alpha * s + beta * (c - 1.0);
        for ((yi, u), w) in y.iter_mut().zip(&self.inside).zip(&self.outside) {
            *yi += d_in * u + d_out * w;
        }
        Ok(StateVector::from_raw(y))
    }
}

/// `‖P_{L̃⊥} U^m γ‖` for `m = 0..=m_max`.
pub fn subspace_leakage(problem: &SearchProblem, m_max: usize) -> Result<Vec<f64>> {
    require_proceed(problem)?;
    let basis = SubspaceBasis::new(problem)?;
    let mut state = problem.gamma().clone();
    let mut out = Vec::with_capacity(m_max + 1);
    for m in 0..=m_max {
        if m > 0 {
            state = search_step(problem, &state)?;
        }
        out.push(basis.leakage(state.amplitudes()));
    }
    Ok(out)
}

/// `max_m |p_full(m) − p_reduced(m)|` over `m ≤ m_max`.
pub fn compare_full_reduced(problem: &SearchProblem, m_max: usize) -> Result<f64> {
    let trace = run_search(problem, m_max, true)?;
    Ok(trace.max_deviation().unwrap_or(0.0))
}

fn max_abs_diff(x: &[C64], y: &[C64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
}

/// Worst entrywise gap between `U(V†|w_j⟩)` and `V†|w_j⟩ − 2·conj(μ_j)·|γ⟩`
/// over all targets.
pub fn target_image_residual(problem: &SearchProblem) -> Result<f64> {
    let overlaps = compute_overlaps(problem)?;
    let basis = SubspaceBasis::new(problem)?;
    let gamma = problem.gamma().amplitudes();
    let mut worst: f64 = 0.0;
    for (b, mu) in basis.vectors()[1..].iter().zip(&overlaps.mu) {
        let image = search_step(problem, &StateVector::from_raw(b.clone()))?;
        let expected: Vec<C64> =
            b.iter().zip(gamma).map(|(bi, gi)| bi - mu.conj() * 2.0 * gi).collect();
        worst = worst.max(max_abs_diff(image.amplitudes(), &expected));
    }
    Ok(worst)
}

/// Entrywise gap between `U|γ⟩` and `(1 − 4Σ|μ_i|²)|γ⟩ + 2Σ μ_i V†|w_i⟩`.
pub fn gamma_image_residual(problem: &SearchProblem) -> Result<f64> {
    let overlaps = compute_overlaps(problem)?;
    let basis = SubspaceBasis::new(problem)?;
    let image = search_step(problem, problem.gamma())?;
    let mut coords = vec![C64::new(1.0 - 4.0 * overlaps.ssq, 0.0)];
    coords.extend(overlaps.mu.iter().map(|m| m * 2.0));
    Ok(max_abs_diff(image.amplitudes(), &basis.combine(&coords)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{haar_unitary, make_targets, random_state, TargetSpec};
    use crate::reduced::{big_m_matrix, iterate_reduced, mu_state};
    use std::f64::consts::PI;

    fn uniform_problem(n: usize, targets: Vec<usize>) -> SearchProblem {
        SearchProblem::new(
            TargetSet::new(n, targets).unwrap(),
            StateVector::uniform(n).unwrap(),
            LinearOperator::identity(n).unwrap(),
        )
        .unwrap()
    }

    fn haar_problem(n: usize, l: usize, v_seed: u64, g_seed: u64) -> SearchProblem {
        SearchProblem::new(
            make_targets(&TargetSpec::Sampled { count: l, seed: v_seed + 100 }, n).unwrap(),
            random_state(n, g_seed).unwrap(),
            LinearOperator::Dense(haar_unitary(n, v_seed)),
        )
        .unwrap()
    }

    #[test]
    fn precheck_verdicts() {
        let id2 = LinearOperator::identity(2).unwrap();
        let t0 = TargetSet::new(2, vec![0]).unwrap();
        let p = SearchProblem::new(t0.clone(), StateVector::basis(2, 0).unwrap(), id2.clone())
            .unwrap();
        assert_eq!(precheck_start(&p).unwrap(), StartVerdict::AlreadySolved);
        let p = SearchProblem::new(t0, StateVector::basis(2, 1).unwrap(), id2).unwrap();
        assert_eq!(precheck_start(&p).unwrap(), StartVerdict::OrthogonalStart);
        assert_eq!(precheck_start(&uniform_problem(4, vec![0])).unwrap(), StartVerdict::Proceed);
    }

    #[test]
    fn four_element_search_trace() {
        let trace = run_search(&uniform_problem(4, vec![0]), 1, true).unwrap();
        assert_eq!(trace.rows.len(), 2);
        assert_eq!(trace.rows[0].p_reduced, 0.25);
        assert!((trace.rows[0].p_full.unwrap() - 0.25).abs() <= 1e-15);
        assert_eq!(trace.rows[1].p_reduced, 1.0);
        assert!(trace.rows[1].deviation.unwrap() <= 1e-12);
    }

    #[test]
    fn zero_iterations_reports_initial_overlap() {
        let p = haar_problem(32, 3, 8, 9);
        let ssq = compute_overlaps(&p).unwrap().ssq;
        let trace = run_search(&p, 0, true).unwrap();
        assert_eq!(trace.rows.len(), 1);
        assert!((trace.rows[0].p_full.unwrap() - ssq).abs() <= 1e-15);
        let reduced_only = run_search(&p, 5, false).unwrap();
        assert!(reduced_only.rows.iter().all(|r| r.p_full.is_none()));
        assert_eq!(reduced_only.max_deviation(), None);
    }

    #[test]
    fn thousand_element_search_reaches_target() {
        let trace = run_search(&uniform_problem(1024, vec![0]), 25, true).unwrap();
        let row = trace.last().unwrap();
        assert!(row.p_full.unwrap() >= 0.999);
        let analytic = (51.0 * (1.0f64 / 32.0).asin()).sin().powi(2);
        assert!((row.p_full.unwrap() - analytic).abs() <= 1e-10);
    }

    #[test]
    fn run_search_rejects_non_proceed() {
        let p = uniform_problem(2, vec![0, 1]);
        assert!(matches!(
            run_search(&p, 3, true),
            Err(GroverError::Precheck(StartVerdict::AlreadySolved))
        ));
        assert!(matches!(
            compare_full_reduced(&p, 3),
            Err(GroverError::Precheck(StartVerdict::AlreadySolved))
        ));
    }

    #[test]
    fn measurement_of_basis_state_is_deterministic() {
        let state = StateVector::basis(8, 3).unwrap();
        let id = LinearOperator::identity(8).unwrap();
        let hit_set = TargetSet::new(8, vec![3, 5]).unwrap();
        let miss_set = TargetSet::new(8, vec![4]).unwrap();
        for seed in 0..50 {
            assert_eq!(measure(&state, &hit_set, &id, seed).unwrap(), Measurement { index: 3, hit: true });
            assert_eq!(measure(&state, &miss_set, &id, seed).unwrap().index, 3);
            assert!(!measure(&state, &miss_set, &id, seed).unwrap().hit);
        }
    }

    #[test]
    fn measurement_after_one_step_always_hits() {
        let p = uniform_problem(4, vec![0]);
        let (_, state) = run_search_with_state(&p, 1, true).unwrap();
        let state = state.unwrap();
        for seed in 0..200 {
            assert!(measure(&state, p.targets(), p.unitary(), seed).unwrap().hit);
        }
    }

    #[test]
    fn measurement_hit_rate_matches_initial_overlap() {
        let p = uniform_problem(4, vec![0]);
        let hits = (0..10_000u64)
            .filter(|&seed| measure(p.gamma(), p.targets(), p.unitary(), seed).unwrap().hit)
            .count();
        let rate = hits as f64 / 10_000.0;
        assert!((rate - 0.25).abs() <= 0.02, "{rate}");
    }

    #[test]
    fn invariance_holds_on_classic_and_haar_problems() {
        let r = invariance_residual(&uniform_problem(4, vec![0]), 16, 1).unwrap();
        assert!(r <= 1e-12, "{r:e}");
        let r = invariance_residual(&haar_problem(32, 3, 1, 2), 16, 1).unwrap();
        assert!(r <= 1e-10, "{r:e}");
    }

    #[test]
    fn perturbed_operator_is_caught() {
        for p in [uniform_problem(4, vec![0]), haar_problem(32, 3, 1, 2)] {
            let bad = PerturbedSearch::new(&p, 1e-3, 77).unwrap();
            let r = invariance_residual_with(&p, 32, 1, |x| bad.apply(x)).unwrap();
            assert!(r >= 5e-4, "{r:e}");
            // Still unitary: only the subspace is broken.
            let x = random_state(p.dim(), 5).unwrap();
            assert!((bad.apply(&x).unwrap().norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_subspace_is_reported() {
        let e0 = vec![ONE, ZERO, ZERO];
        let almost = vec![ONE, C64::new(1e-9, 0.0), ZERO];
        assert!(matches!(
            SubspaceBasis::from_vectors(vec![e0.clone(), e0.clone()]),
            Err(GroverError::DegenerateSubspace(_))
        ));
        assert!(matches!(
            SubspaceBasis::from_vectors(vec![e0, almost]),
            Err(GroverError::DegenerateSubspace(_))
        ));
    }

    #[test]
    fn iterates_stay_in_invariant_subspace() {
        let p = haar_problem(64, 4, 21, 22);
        let leak = subspace_leakage(&p, 100).unwrap();
        for (m, l) in leak.into_iter().enumerate() {
            assert!(l <= (m.max(1)) as f64 * 1e-11, "m={m}: {l:e}");
        }
    }

    #[test]
    fn full_and_reduced_agree() {
        assert!(compare_full_reduced(&uniform_problem(4, vec![0]), 3).unwrap() <= 1e-12);
        let p = SearchProblem::new(
            make_targets(&TargetSpec::Sampled { count: 5, seed: 13 }, 256).unwrap(),
            random_state(256, 4).unwrap(),
            LinearOperator::Dense(haar_unitary(256, 13)),
        )
        .unwrap();
        let model = build_reduced_model(&compute_overlaps(&p).unwrap()).unwrap();
        let m_max = 2 * (PI / model.theta).ceil() as usize;
        assert!(compare_full_reduced(&p, m_max).unwrap() <= 1e-9);
    }

    #[test]
    fn full_state_matches_reduced_coordinates() {
        // U^m γ = c1 γ + c2 μ, checked amplitude by amplitude.
        let p = haar_problem(48, 3, 31, 32);
        let o = compute_overlaps(&p).unwrap();
        let model = build_reduced_model(&o).unwrap();
        let mu = mu_state(&p, &o).unwrap();
        let mut state = p.gamma().clone();
        for m in 0..30 {
            let c = iterate_reduced(&model, m);
            let expect: Vec<C64> = p
                .gamma()
                .amplitudes()
                .iter()
                .zip(mu.amplitudes())
                .map(|(g, u)| g * c.c1 + u * c.c2)
                .collect();
            assert!(max_abs_diff(state.amplitudes(), &expect) <= 1e-11, "m={m}");
            assert!((c.oblique_norm_sqr(model.a) - 1.0).abs() <= 1e-10);
            state = search_step(&p, &state).unwrap();
        }
    }

    #[test]
    fn basis_images_match_closed_forms() {
        for seed in 0..5 {
            let p = haar_problem(40, 1 + seed as usize, seed, seed + 50);
            assert!(target_image_residual(&p).unwrap() <= 1e-11);
            assert!(gamma_image_residual(&p).unwrap() <= 1e-11);
        }
    }

    #[test]
    fn big_m_transpose_tracks_full_space_action() {
        let p = haar_problem(24, 3, 2, 3);
        let o = compute_overlaps(&p).unwrap();
        let big = big_m_matrix(&o);
        let basis = SubspaceBasis::new(&p).unwrap();
        let mut rng = seeded_rng(2);
        for _ in 0..10 {
            let coords: Vec<C64> = (0..4).map(|_| complex_gaussian(&mut rng)).collect();
            let x = basis.combine(&coords);
            let scale = norm(&x);
            let x: Vec<C64> = x.into_iter().map(|v| v / scale).collect();
            let coords: Vec<C64> = coords.into_iter().map(|v| v / scale).collect();
            let ux = search_step(&p, &StateVector::from_raw(x)).unwrap();
            let full = basis.coordinates(ux.amplitudes());
            let reduced = big.apply_transpose(&coords);
            assert!(max_abs_diff(&full, &reduced) <= 1e-10);
        }
    }
}
