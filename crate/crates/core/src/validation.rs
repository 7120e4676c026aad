//! Batched checks over a seeded family of random problems.
//!
//! Each check reports its worst observed value against a fixed bound. The
//! report text contains no timings or addresses, so a given scope and seed
//! always render to the same bytes.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{GroverError, Result};
use crate::generators::{haar_unitary, make_targets, random_state, seeded_rng, TargetSpec};
use crate::hilbert::{inner_product, DenseMatrix, LinearOperator, StateVector, C64};
use crate::operators::{materialize_search_operator, SearchProblem, TargetSet};
use crate::reduced::{
    big_m_matrix, build_reduced_model, compute_overlaps, mu_state, reduced_trajectory,
    OverlapData, ReducedModel,
};
use crate::simulate::{
    compare_full_reduced, gamma_image_residual, invariance_residual, invariance_residual_with,
    precheck_start, subspace_leakage, target_image_residual, PerturbedSearch, StartVerdict,
    SubspaceBasis,
};

pub const FAMILY_SIZE: usize = 50;
pub const FAMILY_MIN_DIM: usize = 8;
pub const FAMILY_MAX_DIM: usize = 256;
pub const FAMILY_MAX_TARGETS: usize = 8;

pub const INVARIANCE_TOL: f64 = 1e-10;
pub const INVARIANCE_TRIALS: usize = 8;
pub const NEGATIVE_CONTROL_ANGLE: f64 = 1e-3;
pub const NEGATIVE_CONTROL_MIN: f64 = 5e-4;
pub const NEGATIVE_CONTROL_TRIALS: usize = 32;
pub const IMAGE_TOL: f64 = 1e-11;
pub const BIG_M_TOL: f64 = 1e-10;
pub const LEAKAGE_TOL_PER_STEP: f64 = 1e-11;
pub const LEAKAGE_STEPS: usize = 100;
pub const EQUIVALENCE_TOL: f64 = 1e-9;
pub const DEGENERATE_TOL: f64 = 1e-12;
pub const DEGENERATE_MAX_DIM: usize = 64;
pub const DET_TOL: f64 = 1e-13;
pub const ANGLE_TOL: f64 = 1e-12;
pub const OBLIQUE_TOL: f64 = 1e-10;
pub const MU_OVERLAP_TOL: f64 = 1e-12;
pub const STRUCTURE_SAMPLE_A: [f64; 5] = [0.01, 0.1, 0.5, 1.0, 1.9];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scope {
    All,
    Lemma21,
    Lemma22,
    Thm23,
    Degenerate,
}

impl FromStr for Scope {
    type Err = GroverError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(Scope::All),
            "lemma21" => Ok(Scope::Lemma21),
            "lemma22" => Ok(Scope::Lemma22),
            "thm23" => Ok(Scope::Thm23),
            "degenerate" => Ok(Scope::Degenerate),
            _ => Err(GroverError::InvalidSpec {
                input: s.to_owned(),
                reason: "expected all, lemma21, lemma22, thm23 or degenerate".into(),
            }),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Bound {
    AtMost(f64),
    AtLeast(f64),
}

impl Bound {
    fn admits(self, value: f64) -> bool {
        match self {
            Bound::AtMost(b) => value <= b,
            Bound::AtLeast(b) => value >= b,
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::AtMost(b) => write!(f, "<= {b:.0e}"),
            Bound::AtLeast(b) => write!(f, ">= {b:.0e}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub family: &'static str,
    pub name: &'static str,
    pub cases: usize,
    /// Largest value for `AtMost` bounds, smallest for `AtLeast`.
    pub worst: f64,
    pub bound: Bound,
}

impl CheckResult {
    fn at_most(family: &'static str, name: &'static str, values: &[f64], bound: f64) -> Self {
        let worst = values.iter().copied().fold(0.0, f64::max);
        Self { family, name, cases: values.len(), worst, bound: Bound::AtMost(bound) }
    }

    fn at_least(family: &'static str, name: &'static str, values: &[f64], bound: f64) -> Self {
        let worst = values.iter().copied().fold(f64::INFINITY, f64::min);
        Self { family, name, cases: values.len(), worst, bound: Bound::AtLeast(bound) }
    }

    pub fn passed(&self) -> bool {
        self.cases > 0 && self.bound.admits(self.worst)
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckResult::passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "{:<4} {:<10} {:<28} cases={:<4} worst={:.6e} bound {}",
                if c.passed() { "PASS" } else { "FAIL" },
                c.family,
                c.name,
                c.cases,
                c.worst,
                c.bound
            )?;
        }
        let failed = self.checks.iter().filter(|c| !c.passed()).count();
        writeln!(f, "summary: {} checks, {} failed", self.checks.len(), failed)
    }
}

/// One member of the random problem family.
#[derive(Clone, Debug)]
pub struct FamilyProblem {
    pub index: usize,
    pub problem: SearchProblem,
    pub v_seed: u64,
    pub gamma_seed: u64,
    pub target_seed: u64,
}

/// `count` problems with `N ∈ [8, 256]`, `ℓ ∈ [1, 8]`, Haar `V` and random
/// `γ`, all drawn from `seed`. Draws whose start is not `Proceed` are
/// replaced by fresh draws.
pub fn problem_family(seed: u64, count: usize) -> Result<Vec<FamilyProblem>> {
    let mut rng = seeded_rng(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let n = rng.random_range(FAMILY_MIN_DIM..=FAMILY_MAX_DIM);
        let l = rng.random_range(1..=FAMILY_MAX_TARGETS.min(n - 1));
        let (v_seed, gamma_seed, target_seed) = (rng.random(), rng.random(), rng.random());
        let problem = SearchProblem::new(
            make_targets(&TargetSpec::Sampled { count: l, seed: target_seed }, n)?,
            random_state(n, gamma_seed)?,
            LinearOperator::Dense(haar_unitary(n, v_seed)),
        )?;
        if precheck_start(&problem)? == StartVerdict::Proceed {
            out.push(FamilyProblem { index: out.len(), problem, v_seed, gamma_seed, target_seed });
        }
    }
    Ok(out)
}

fn classic_problem() -> Result<SearchProblem> {
    SearchProblem::new(TargetSet::new(4, vec![0])?, StateVector::uniform(4)?, LinearOperator::identity(4)?)
}

/// Step count used for full/reduced comparisons: two full turns.
pub fn comparison_horizon(model: &ReducedModel) -> usize {
    2 * (PI / model.theta).ceil() as usize
}

pub fn validate(scope: Scope, seed: u64) -> Result<ValidationReport> {
    validate_with(scope, seed, FAMILY_SIZE)
}

pub fn validate_with(scope: Scope, seed: u64, family_size: usize) -> Result<ValidationReport> {
    let family = match scope {
        Scope::Degenerate => Vec::new(),
        _ => problem_family(seed, family_size)?,
    };
    let mut checks = Vec::new();
    if matches!(scope, Scope::All | Scope::Lemma21) {
        checks.extend(lemma21_checks(&family, seed)?);
    }
    if matches!(scope, Scope::All | Scope::Lemma22) {
        checks.extend(lemma22_checks(&family)?);
    }
    if matches!(scope, Scope::All | Scope::Thm23) {
        checks.extend(thm23_checks(&family)?);
    }
    if matches!(scope, Scope::All | Scope::Degenerate) {
        checks.extend(degenerate_checks(seed)?);
    }
    Ok(ValidationReport { checks })
}

/// Invariance of `L̃`, the closed-form images of its spanning vectors, the
/// `(ℓ+1)×(ℓ+1)` representation, and a negative control.
pub fn lemma21_checks(family: &[FamilyProblem], seed: u64) -> Result<Vec<CheckResult>> {
    let mut invariance = Vec::new();
    let mut target_images = Vec::new();
    let mut gamma_images = Vec::new();
    let mut big_m = Vec::new();
    for fp in family {
        let p = &fp.problem;
        invariance.push(invariance_residual(p, INVARIANCE_TRIALS, seed ^ fp.index as u64)?);
        target_images.push(target_image_residual(p)?);
        gamma_images.push(gamma_image_residual(p)?);
        big_m.push(big_m_representation_residual(p, seed ^ fp.index as u64)?);
    }

    let mut controls = vec![negative_control(&classic_problem()?, seed)?];
    if let Some(first) = family.first() {
        controls.push(negative_control(&first.problem, seed)?);
    }

    Ok(vec![
        CheckResult::at_most("lemma21", "invariance_residual", &invariance, INVARIANCE_TOL),
        CheckResult::at_least("lemma21", "negative_control", &controls, NEGATIVE_CONTROL_MIN),
        CheckResult::at_most("lemma21", "target_image_identity", &target_images, IMAGE_TOL),
        CheckResult::at_most("lemma21", "gamma_image_identity", &gamma_images, IMAGE_TOL),
        CheckResult::at_most("lemma21", "big_m_representation", &big_m, BIG_M_TOL),
    ])
}

/// Residual of the perturbed operator; must be large.
pub fn negative_control(problem: &SearchProblem, seed: u64) -> Result<f64> {
    let bad = PerturbedSearch::new(problem, NEGATIVE_CONTROL_ANGLE, seed)?;
    invariance_residual_with(problem, NEGATIVE_CONTROL_TRIALS, seed, |x| bad.apply(x))
}

/// Max gap between the basis coordinates of `U x` and `𝓜ᵀ` applied to the
/// coordinates of `x`, for a few random `x ∈ L̃`.
pub fn big_m_representation_residual(problem: &SearchProblem, seed: u64) -> Result<f64> {
    let overlaps = compute_overlaps(problem)?;
    let big = big_m_matrix(&overlaps);
    let basis = SubspaceBasis::new(problem)?;
    let mut rng = seeded_rng(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..4 {
        let x = basis.random_member(&mut rng)?;
        let coords = basis.coordinates(x.amplitudes());
        let ux = crate::operators::search_step(problem, &x)?;
        let full = basis.coordinates(ux.amplitudes());
        for (a, b) in full.iter().zip(big.apply_transpose(&coords)) {
            worst = worst.max((a - b).norm());
        }
    }
    Ok(worst)
}

/// `‖P_{L̃⊥} U^m γ‖ / max(m, 1)` over `m ≤ 100`.
pub fn lemma22_checks(family: &[FamilyProblem]) -> Result<Vec<CheckResult>> {
    let mut per_step = Vec::new();
    for fp in family {
        let leak = subspace_leakage(&fp.problem, LEAKAGE_STEPS)?;
        let worst = leak.iter().enumerate().map(|(m, l)| l / m.max(1) as f64).fold(0.0, f64::max);
        per_step.push(worst);
    }
    Ok(vec![CheckResult::at_most("lemma22", "leakage_per_step", &per_step, LEAKAGE_TOL_PER_STEP)])
}

/// Full-space vs reduced success probabilities, plus the structure of `M`
/// and the oblique-norm identity.
pub fn thm23_checks(family: &[FamilyProblem]) -> Result<Vec<CheckResult>> {
    let mut deviation = Vec::new();
    let mut mu_overlap = Vec::new();
    let mut models = Vec::new();
    for fp in family {
        let p = &fp.problem;
        let overlaps = compute_overlaps(p)?;
        let model = build_reduced_model(&overlaps)?;
        deviation.push(compare_full_reduced(p, comparison_horizon(&model))?);
        let mu = mu_state(p, &overlaps)?;
        mu_overlap.push((inner_product(p.gamma(), &mu)? - C64::new(model.a / 2.0, 0.0)).norm());
        models.push(model);
    }
    for a in STRUCTURE_SAMPLE_A {
        models.push(build_reduced_model(&OverlapData::new(vec![C64::new(a / 2.0, 0.0)]))?);
    }

    let mut det = Vec::new();
    let mut angle = Vec::new();
    let mut oblique = Vec::new();
    for m in &models {
        det.push((m.m2[0][0] * m.m2[1][1] - m.m2[0][1] * m.m2[1][0] - 1.0).abs());
        angle.push((m.theta - 2.0 * (m.a / 2.0).asin()).abs());
        let worst = reduced_trajectory(m, comparison_horizon(m))
            .iter()
            .map(|c| (c.oblique_norm_sqr(m.a) - 1.0).abs())
            .fold(0.0, f64::max);
        oblique.push(worst);
    }

    Ok(vec![
        CheckResult::at_most("thm23", "full_vs_reduced", &deviation, EQUIVALENCE_TOL),
        CheckResult::at_most("thm23", "gamma_mu_overlap", &mu_overlap, MU_OVERLAP_TOL),
        CheckResult::at_most("thm23", "det_m", &det, DET_TOL),
        CheckResult::at_most("thm23", "rotation_angle_identity", &angle, ANGLE_TOL),
        CheckResult::at_most("thm23", "oblique_norm", &oblique, OBLIQUE_TOL),
    ])
}

/// `I − 2|v⟩⟨v|` as a dense matrix.
pub fn dense_reflection(v: &[C64]) -> DenseMatrix {
    let n = v.len();
    let mut m = DenseMatrix::identity(n);
    for r in 0..n {
        for c in 0..n {
            m.set(r, c, m.get(r, c) - v[r] * v[c].conj() * 2.0);
        }
    }
    m
}

fn negate(mut m: DenseMatrix) -> DenseMatrix {
    for r in 0..m.dim() {
        for c in 0..m.dim() {
            m.set(r, c, -m.get(r, c));
        }
    }
    m
}

/// `−I_s I_w` from the two reflections, `s` uniform.
pub fn classic_operator_dense(dim: usize, target: usize) -> Result<DenseMatrix> {
    let s = StateVector::uniform(dim)?;
    let w = StateVector::basis(dim, target)?;
    Ok(negate(dense_reflection(s.amplitudes()).matmul(&dense_reflection(w.amplitudes()))))
}

/// `−I_γ V† I_w V` by dense products.
pub fn single_target_operator_dense(
    gamma: &StateVector,
    v: &LinearOperator,
    target: usize,
) -> Result<DenseMatrix> {
    let vm = v.materialize(DEGENERATE_MAX_DIM)?;
    let w = StateVector::basis(gamma.dim(), target)?;
    let inner = vm.adjoint().matmul(&dense_reflection(w.amplitudes())).matmul(&vm);
    Ok(negate(dense_reflection(gamma.amplitudes()).matmul(&inner)))
}

/// With one target the general operator must equal the single-object
/// construction, and with `V = I`, `γ = s` it must equal the classic one.
pub fn degenerate_checks(seed: u64) -> Result<Vec<CheckResult>> {
    let mut rng = seeded_rng(seed);
    let mut general = Vec::new();
    let mut classic = Vec::new();
    let mut n = 2;
    while n <= DEGENERATE_MAX_DIM {
        let target = rng.random_range(0..n);
        let (v_seed, g_seed): (u64, u64) = (rng.random(), rng.random());
        let targets = TargetSet::new(n, vec![target])?;

        let p = SearchProblem::new(targets.clone(), StateVector::uniform(n)?, LinearOperator::identity(n)?)?;
        let u = materialize_search_operator(&p, DEGENERATE_MAX_DIM)?;
        classic.push(u.max_abs_diff(&classic_operator_dense(n, target)?));

        for v in [LinearOperator::Dense(haar_unitary(n, v_seed)), LinearOperator::walsh_hadamard(n)?] {
            let p = SearchProblem::new(targets.clone(), random_state(n, g_seed)?, v)?;
            let u = materialize_search_operator(&p, DEGENERATE_MAX_DIM)?;
            let reference = single_target_operator_dense(p.gamma(), p.unitary(), target)?;
            general.push(u.max_abs_diff(&reference));
        }
        n *= 2;
    }
    Ok(vec![
        CheckResult::at_most("degenerate", "single_target_general_v", &general, DEGENERATE_TOL),
        CheckResult::at_most("degenerate", "classic_identity_v", &classic, DEGENERATE_TOL),
    ])
}
