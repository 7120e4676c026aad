//! Reflections and the composed search operator `U = −I_γ V† I_L V`.

use crate::error::{GroverError, Result};
use crate::hilbert::{dot, DenseMatrix, LinearOperator, StateVector, C64, ZERO};

/// Marked indices: the preimage of 1 under the oracle `f`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TargetSet {
    dim: usize,
    indices: Vec<usize>,
}

impl TargetSet {
    /// Sorts `indices`; rejects an empty set, duplicates and out-of-range
    /// entries.
    pub fn new(dim: usize, mut indices: Vec<usize>) -> Result<Self> {
        if indices.is_empty() {
            return Err(GroverError::InvalidTarget("at least one target is required".into()));
        }
        if let Some(&bad) = indices.iter().find(|&&i| i >= dim) {
            return Err(GroverError::InvalidTarget(format!(
                "index {bad} out of range for dimension {dim}"
            )));
        }
        indices.sort_unstable();
        if let Some(w) = indices.windows(2).find(|w| w[0] == w[1]) {
            return Err(GroverError::InvalidTarget(format!("duplicate index {}", w[0])));
        }
        Ok(Self { dim, indices })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// Number of marked objects, `ℓ`.
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// The oracle `f`.
    pub fn contains(&self, index: usize) -> bool {
        self.indices.binary_search(&index).is_ok()
    }

    /// `‖P_L x‖²`.
    pub fn weight(&self, x: &[C64]) -> f64 {
        self.indices.iter().map(|&t| x[t].norm_sqr()).sum()
    }

    fn flip_in_place(&self, x: &mut [C64]) {
        for &t in &self.indices {
            x[t] = -x[t];
        }
    }
}

/// Everything that defines one search: targets `L`, start state `γ` and the
/// unitary `V`.
#[derive(Clone, Debug)]
pub struct SearchProblem {
    targets: TargetSet,
    gamma: StateVector,
    v: LinearOperator,
}

impl SearchProblem {
    pub fn new(targets: TargetSet, gamma: StateVector, v: LinearOperator) -> Result<Self> {
        let n = gamma.dim();
        if targets.dim() != n {
            return Err(GroverError::dim_mismatch("target set vs gamma", targets.dim(), n));
        }
        if v.dim() != n {
            return Err(GroverError::dim_mismatch("unitary vs gamma", v.dim(), n));
        }
        Ok(Self { targets, gamma, v })
    }

    pub fn dim(&self) -> usize {
        self.gamma.dim()
    }

    pub fn targets(&self) -> &TargetSet {
        &self.targets
    }

    pub fn gamma(&self) -> &StateVector {
        &self.gamma
    }

    pub fn unitary(&self) -> &LinearOperator {
        &self.v
    }
}

/// `I_L x`: negates the target amplitudes.
pub fn oracle_reflection(targets: &TargetSet, x: &StateVector) -> Result<StateVector> {
    if targets.dim() != x.dim() {
        return Err(GroverError::dim_mismatch("oracle reflection", targets.dim(), x.dim()));
    }
    let mut out = x.amplitudes().to_vec();
    targets.flip_in_place(&mut out);
    Ok(StateVector::from_raw(out))
}

/// `I_γ x = x − 2⟨γ|x⟩γ`.
pub fn diffusion_reflection(gamma: &StateVector, x: &StateVector) -> Result<StateVector> {
    if gamma.dim() != x.dim() {
        return Err(GroverError::dim_mismatch("diffusion reflection", gamma.dim(), x.dim()));
    }
    let mut out = x.amplitudes().to_vec();
    reflect_about(gamma.amplitudes(), &mut out);
    Ok(StateVector::from_raw(out))
}

fn reflect_about(axis: &[C64], x: &mut [C64]) {
    let coeff = dot(axis, x) * 2.0;
    for (xi, gi) in x.iter_mut().zip(axis) {
        *xi -= coeff * gi;
    }
}

/// One application of `U = −I_γ V† I_L V`, as a sequence of passes over the
/// amplitudes. The trailing global sign is kept so the full-space iterate
/// agrees with the reduced recursion coefficient by coefficient.
pub fn search_step(problem: &SearchProblem, x: &StateVector) -> Result<StateVector> {
    if problem.dim() != x.dim() {
        return Err(GroverError::dim_mismatch("search step", problem.dim(), x.dim()));
    }
    let mut y = problem.v.apply(x, false)?.into_amplitudes();
    problem.targets.flip_in_place(&mut y);
    let mut z = problem.v.apply(&StateVector::from_raw(y), true)?.into_amplitudes();
    reflect_about(problem.gamma.amplitudes(), &mut z);
    for zi in &mut z {
        *zi = -*zi;
    }
    Ok(StateVector::from_raw(z))
}

/// Dense matrix of `U`, one column per basis vector. Only intended for
/// small validation problems.
pub fn materialize_search_operator(problem: &SearchProblem, limit: usize) -> Result<DenseMatrix> {
    let n = problem.dim();
    if n > limit {
        return Err(GroverError::ResourceLimit { dim: n, limit });
    }
    let mut out = DenseMatrix::new(n, vec![ZERO; n * n])?;
    for c in 0..n {
        let col = search_step(problem, &StateVector::basis(n, c)?)?;
        for (r, v) in col.amplitudes().iter().enumerate() {
            out.set(r, c, *v);
        }
    }
    Ok(out)
}
