//! Complex state vectors and the unitary operators that act on them.
//!
//! Indices are 0-based: the database object `w_{j+1}` is the basis vector
//! `e_j`. Structured operators (identity, Walsh–Hadamard) are applied without
//! ever forming their matrices; a dense matrix is only built on request.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::error::{GroverError, Result};

pub type C64 = Complex64;

/// Unit-norm tolerance for constructed states.
pub const NORM_TOL: f64 = 1e-12;

/// Largest `|‖U x‖ − ‖x‖|` tolerated by [`LinearOperator::apply`] before it
/// reports a non-unitary operator. States are never renormalized after an
/// application.
pub const APPLY_NORM_TOL: f64 = 1e-9;

/// Default dimension cap for materializing an operator densely.
pub const DEFAULT_DENSE_LIMIT: usize = 4096;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// `⟨x|y⟩ = Σ conj(x_k) y_k` on raw slices of equal length.
pub fn dot(x: &[C64], y: &[C64]) -> C64 {
    debug_assert_eq!(x.len(), y.len());
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

pub fn norm_sqr(x: &[C64]) -> f64 {
    x.iter().map(|a| a.norm_sqr()).sum()
}

pub fn norm(x: &[C64]) -> f64 {
    norm_sqr(x).sqrt()
}

/// A unit vector in `C^N`, `N ≥ 2`.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<C64>,
}

impl StateVector {
    /// Wraps `amplitudes`, rejecting anything that is not unit norm to
    /// within [`NORM_TOL`].
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        Self::with_tolerance(amplitudes, NORM_TOL)
    }

    /// Like [`StateVector::new`] but with a caller-chosen norm tolerance. The
    /// amplitudes are rescaled to unit norm once they pass the check.
    pub fn with_tolerance(amplitudes: Vec<C64>, tol: f64) -> Result<Self> {
        check_dim(amplitudes.len())?;
        let n = norm(&amplitudes);
        if !n.is_finite() || (n - 1.0).abs() > tol {
            return Err(GroverError::InvalidState(format!(
                "norm {n} is not within {tol:e} of 1"
            )));
        }
        if (n - 1.0).abs() > NORM_TOL {
            return Ok(Self::from_raw(amplitudes.into_iter().map(|a| a / n).collect()));
        }
        Ok(Self { amplitudes })
    }

    /// Scales an arbitrary nonzero vector to unit norm.
    pub fn normalized(amplitudes: Vec<C64>) -> Result<Self> {
        check_dim(amplitudes.len())?;
        let n = norm(&amplitudes);
        if !n.is_finite() || n == 0.0 {
            return Err(GroverError::InvalidState(format!(
                "cannot normalize a vector of norm {n}"
            )));
        }
        Ok(Self::from_raw(amplitudes.into_iter().map(|a| a / n).collect()))
    }

    /// The basis state `e_k`.
    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        check_dim(dim)?;
        if k >= dim {
            return Err(GroverError::Dimension(format!(
                "basis index {k} out of range for dimension {dim}"
            )));
        }
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[k] = ONE;
        Ok(Self { amplitudes })
    }

    /// `(1/√N) Σ e_i`.
    pub fn uniform(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        let amp = C64::new(1.0 / (dim as f64).sqrt(), 0.0);
        Ok(Self { amplitudes: vec![amp; dim] })
    }

    pub(crate) fn from_raw(amplitudes: Vec<C64>) -> Self {
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        norm(&self.amplitudes)
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim < 2 {
        return Err(GroverError::Dimension(format!(
            "state dimension must be at least 2, got {dim}"
        )));
    }
    Ok(())
}

/// `⟨x|y⟩`, conjugate-linear in `x`.
pub fn inner_product(x: &StateVector, y: &StateVector) -> Result<C64> {
    if x.dim() != y.dim() {
        return Err(GroverError::dim_mismatch("inner product", x.dim(), y.dim()));
    }
    Ok(dot(x.amplitudes(), y.amplitudes()))
}

/// Square complex matrix in row-major order.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl DenseMatrix {
    pub fn new(dim: usize, data: Vec<C64>) -> Result<Self> {
        if dim == 0 || data.len() != dim * dim {
            return Err(GroverError::Dimension(format!(
                "dense matrix of dimension {dim} needs {} entries, got {}",
                dim * dim,
                data.len()
            )));
        }
        Ok(Self { dim, data })
    }

    pub fn identity(dim: usize) -> Self {
        let mut data = vec![ZERO; dim * dim];
        for i in 0..dim {
            data[i * dim + i] = ONE;
        }
        Self { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data[row * self.dim + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: C64) {
        self.data[row * self.dim + col] = value;
    }

    pub fn row(&self, row: usize) -> &[C64] {
        &self.data[row * self.dim..(row + 1) * self.dim]
    }

    pub fn mul_vec(&self, x: &[C64]) -> Vec<C64> {
        debug_assert_eq!(x.len(), self.dim);
        (0..self.dim).map(|r| self.row(r).iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    }

    /// `A† x`, accumulated row by row so the row-major layout is walked
    /// contiguously.
    pub fn adjoint_mul_vec(&self, x: &[C64]) -> Vec<C64> {
        debug_assert_eq!(x.len(), self.dim);
        let mut out = vec![ZERO; self.dim];
        for (r, &xr) in x.iter().enumerate() {
            if xr == ZERO {
                continue;
            }
            for (o, a) in out.iter_mut().zip(self.row(r)) {
                *o += a.conj() * xr;
            }
        }
        out
    }

    pub fn matmul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut data = vec![ZERO; n * n];
        for i in 0..n {
            let out_row = &mut data[i * n..(i + 1) * n];
            for (k, &aik) in self.row(i).iter().enumerate() {
                if aik == ZERO {
                    continue;
                }
                for (o, b) in out_row.iter_mut().zip(other.row(k)) {
                    *o += aik * b;
                }
            }
        }
        DenseMatrix { dim: n, data }
    }

    pub fn adjoint(&self) -> DenseMatrix {
        let n = self.dim;
        let mut data = vec![ZERO; n * n];
        for r in 0..n {
            for c in 0..n {
                data[c * n + r] = self.get(r, c).conj();
            }
        }
        DenseMatrix { dim: n, data }
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &DenseMatrix) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `max |(A†A − I)_{jk}|`.
    pub fn unitarity_residual(&self) -> f64 {
        let n = self.dim;
        // Gram matrix accumulated as a sum of row outer products.
        let mut gram = vec![ZERO; n * n];
        for r in 0..n {
            let row = self.row(r);
            for (j, a) in row.iter().enumerate() {
                let aj = a.conj();
                let g = &mut gram[j * n..(j + 1) * n];
                for (gjk, b) in g.iter_mut().zip(row) {
                    *gjk += aj * b;
                }
            }
        }
        let mut worst: f64 = 0.0;
        for j in 0..n {
            for k in 0..n {
                let target = if j == k { ONE } else { ZERO };
                worst = worst.max((gram[j * n + k] - target).norm());
            }
        }
        worst
    }
}

/// A unitary operator on `C^N`.
#[derive(Clone, Debug, PartialEq)]
pub enum LinearOperator {
    Identity { dim: usize },
    /// `H^{⊗n}` on `N = 2^n`, applied with the fast transform.
    WalshHadamard { qubits: u32 },
    Dense(DenseMatrix),
    /// Product applied in list order: `Composed([A, B])` acts as `B·A`.
    Composed { dim: usize, ops: Vec<LinearOperator> },
}

impl LinearOperator {
    pub fn identity(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(LinearOperator::Identity { dim })
    }

    pub fn walsh_hadamard(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        if !dim.is_power_of_two() {
            return Err(GroverError::Dimension(format!(
                "Walsh-Hadamard operator needs a power-of-two dimension, got {dim}"
            )));
        }
        Ok(LinearOperator::WalshHadamard { qubits: dim.trailing_zeros() })
    }

    pub fn dense(matrix: DenseMatrix) -> Result<Self> {
        check_dim(matrix.dim())?;
        Ok(LinearOperator::Dense(matrix))
    }

    pub fn composed(ops: Vec<LinearOperator>) -> Result<Self> {
        let dim = match ops.first() {
            Some(op) => op.dim(),
            None => {
                return Err(GroverError::Dimension("empty operator composition".into()));
            }
        };
        if let Some(bad) = ops.iter().find(|op| op.dim() != dim) {
            return Err(GroverError::dim_mismatch("operator composition", dim, bad.dim()));
        }
        Ok(LinearOperator::Composed { dim, ops })
    }

    pub fn dim(&self) -> usize {
        match self {
            LinearOperator::Identity { dim } | LinearOperator::Composed { dim, .. } => *dim,
            LinearOperator::WalshHadamard { qubits } => 1usize << qubits,
            LinearOperator::Dense(m) => m.dim(),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            LinearOperator::Identity { .. } => "identity",
            LinearOperator::WalshHadamard { .. } => "walsh_hadamard",
            LinearOperator::Dense(_) => "dense",
            LinearOperator::Composed { .. } => "composed",
        }
    }

    /// Applies the operator (or its adjoint) to a raw vector of matching
    /// length.
    pub fn apply_slice(&self, x: &[C64], adjoint: bool) -> Result<Vec<C64>> {
        if x.len() != self.dim() {
            return Err(GroverError::dim_mismatch("operator application", self.dim(), x.len()));
        }
        Ok(self.apply_unchecked(x, adjoint))
    }

    fn apply_unchecked(&self, x: &[C64], adjoint: bool) -> Vec<C64> {
        match self {
            LinearOperator::Identity { .. } => x.to_vec(),
            LinearOperator::WalshHadamard { .. } => {
                let mut out = x.to_vec();
                fwht_unchecked(&mut out);
                out
            }
            LinearOperator::Dense(m) if adjoint => m.adjoint_mul_vec(x),
            LinearOperator::Dense(m) => m.mul_vec(x),
            LinearOperator::Composed { ops, .. } => {
                let mut out = x.to_vec();
                if adjoint {
                    for op in ops.iter().rev() {
                        out = op.apply_unchecked(&out, true);
                    }
                } else {
                    for op in ops {
                        out = op.apply_unchecked(&out, false);
                    }
                }
                out
            }
        }
    }

    /// `op·x`, or `op†·x` when `adjoint` is set. The output norm is checked
    /// against the input norm, not rescaled.
    pub fn apply(&self, x: &StateVector, adjoint: bool) -> Result<StateVector> {
        let out = self.apply_slice(x.amplitudes(), adjoint)?;
        let drift = (norm(&out) - x.norm()).abs();
        if drift > APPLY_NORM_TOL {
            return Err(GroverError::NumericalConsistency(format!(
                "{} operator changed the state norm by {drift:e}",
                self.kind_name()
            )));
        }
        Ok(StateVector::from_raw(out))
    }

    /// Builds the dense matrix column by column. Refuses dimensions above
    /// `limit`.
    pub fn materialize(&self, limit: usize) -> Result<DenseMatrix> {
        let n = self.dim();
        if n > limit {
            return Err(GroverError::ResourceLimit { dim: n, limit });
        }
        if let LinearOperator::Dense(m) = self {
            return Ok(m.clone());
        }
        let mut out = DenseMatrix { dim: n, data: vec![ZERO; n * n] };
        let mut e = vec![ZERO; n];
        for c in 0..n {
            e[c] = ONE;
            let col = self.apply_unchecked(&e, false);
            for (r, v) in col.into_iter().enumerate() {
                out.set(r, c, v);
            }
            e[c] = ZERO;
        }
        Ok(out)
    }
}

/// Normalized fast Walsh–Hadamard transform, `H^{⊗n} x`.
pub fn fwht(x: &[C64]) -> Result<Vec<C64>> {
    let mut out = x.to_vec();
    fwht_in_place(&mut out)?;
    Ok(out)
}

pub fn fwht_in_place(x: &mut [C64]) -> Result<()> {
    if x.is_empty() || !x.len().is_power_of_two() {
        return Err(GroverError::Dimension(format!(
            "Walsh-Hadamard transform needs a power-of-two length, got {}",
            x.len()
        )));
    }
    fwht_unchecked(x);
    Ok(())
}

fn fwht_unchecked(x: &mut [C64]) {
    let n = x.len();
    let mut half = 1;
    while half < n {
        for block in x.chunks_exact_mut(2 * half) {
            let (lo, hi) = block.split_at_mut(half);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (u, v) = (*a, *b);
                *a = (u + v) * FRAC_1_SQRT_2;
                *b = (u - v) * FRAC_1_SQRT_2;
            }
        }
        half *= 2;
    }
}

/// `max |(op†op − I)_{jk}|`, materializing structured kinds up to
/// [`DEFAULT_DENSE_LIMIT`].
pub fn unitarity_residual(op: &LinearOperator) -> Result<f64> {
    unitarity_residual_with_limit(op, DEFAULT_DENSE_LIMIT)
}

pub fn unitarity_residual_with_limit(op: &LinearOperator, limit: usize) -> Result<f64> {
    if let LinearOperator::Dense(m) = op {
        if m.dim() > limit {
            return Err(GroverError::ResourceLimit { dim: m.dim(), limit });
        }
        return Ok(m.unitarity_residual());
    }
    Ok(op.materialize(limit)?.unitarity_residual())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    /// Kronecker product of square row-major matrices.
    fn kron(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
        let (n, m) = (a.dim(), b.dim());
        let mut out = DenseMatrix::identity(n * m);
        for i in 0..n {
            for j in 0..n {
                for k in 0..m {
                    for l in 0..m {
                        out.set(i * m + k, j * m + l, a.get(i, j) * b.get(k, l));
                    }
                }
            }
        }
        out
    }

    fn dense_hadamard(qubits: u32) -> DenseMatrix {
        let s = FRAC_1_SQRT_2;
        let h = DenseMatrix::new(2, vec![c(s), c(s), c(s), c(-s)]).unwrap();
        (1..qubits).fold(h.clone(), |acc, _| kron(&acc, &h))
    }

    #[test]
    fn inner_product_of_basis_states() {
        let e0 = StateVector::basis(2, 0).unwrap();
        let e1 = StateVector::basis(2, 1).unwrap();
        assert_eq!(inner_product(&e0, &e0).unwrap(), ONE);
        assert_eq!(inner_product(&e0, &e1).unwrap(), ZERO);
        let plus = StateVector::new(vec![c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2)]).unwrap();
        assert!((inner_product(&plus, &e0).unwrap() - c(FRAC_1_SQRT_2)).norm() < 1e-15);
    }

    #[test]
    fn inner_product_is_conjugate_linear_in_first_argument() {
        let x = StateVector::new(vec![C64::new(0.0, 1.0), ZERO]).unwrap();
        let e0 = StateVector::basis(2, 0).unwrap();
        assert_eq!(inner_product(&x, &e0).unwrap(), C64::new(0.0, -1.0));
    }

    #[test]
    fn inner_product_dimension_mismatch() {
        let x = StateVector::basis(2, 0).unwrap();
        let y = StateVector::basis(4, 0).unwrap();
        assert!(matches!(inner_product(&x, &y), Err(GroverError::Dimension(_))));
    }

    #[test]
    fn state_construction_rejects_bad_input() {
        assert!(StateVector::new(vec![c(1.0)]).is_err());
        assert!(StateVector::new(vec![c(1.0), c(1.0)]).is_err());
        assert!(StateVector::basis(4, 4).is_err());
        assert!(StateVector::normalized(vec![ZERO, ZERO]).is_err());
        assert!(StateVector::with_tolerance(vec![c(1.0 + 1e-11), ZERO], 1e-10).is_ok());
    }

    #[test]
    fn identity_apply_returns_input() {
        let x = StateVector::normalized(vec![c(1.0), C64::new(0.5, -0.25), c(-2.0)]).unwrap();
        let id = LinearOperator::identity(3).unwrap();
        assert_eq!(id.apply(&x, false).unwrap(), x);
        assert_eq!(id.apply(&x, true).unwrap(), x);
    }

    #[test]
    fn one_qubit_hadamard_on_e0() {
        let h = LinearOperator::walsh_hadamard(2).unwrap();
        let out = h.apply(&StateVector::basis(2, 0).unwrap(), false).unwrap();
        for a in out.amplitudes() {
            assert!((a - c(FRAC_1_SQRT_2)).norm() < 1e-16);
        }
    }

    #[test]
    fn fwht_small_cases() {
        let out = fwht(&[ONE, ZERO]).unwrap();
        assert_eq!(out, vec![c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2)]);
        let out = fwht(&[ONE, ZERO, ZERO, ZERO]).unwrap();
        for a in out {
            assert!((a - c(0.5)).norm() < 1e-15);
        }
    }

    #[test]
    fn fwht_rejects_non_power_of_two() {
        assert!(matches!(fwht(&[ONE; 6]), Err(GroverError::Dimension(_))));
        assert!(fwht(&[]).is_err());
        assert!(LinearOperator::walsh_hadamard(6).is_err());
    }

    #[test]
    fn fwht_matches_kronecker_construction() {
        for qubits in 1..=6u32 {
            let n = 1usize << qubits;
            let x: Vec<C64> = (0..n)
                .map(|k| C64::new((k as f64 * 0.37).sin(), (k as f64 * 1.3).cos()))
                .collect();
            let fast = fwht(&x).unwrap();
            let dense = dense_hadamard(qubits).mul_vec(&x);
            let dev = fast.iter().zip(&dense).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            assert!(dev <= 1e-12, "n={qubits}: deviation {dev:e}");
            let back = fwht(&fast).unwrap();
            let dev = back.iter().zip(&x).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            assert!(dev <= 1e-12, "self-inverse n={qubits}: {dev:e}");
        }
    }

    #[test]
    fn unitarity_residual_cases() {
        assert_eq!(unitarity_residual(&LinearOperator::identity(16).unwrap()).unwrap(), 0.0);
        let h = LinearOperator::walsh_hadamard(16).unwrap();
        assert!(unitarity_residual(&h).unwrap() <= 1e-14);

        // Gram-matrix oracle: perturbing entry (0,0) of H⊗H⊗H⊗H by δ moves
        // (A†A)_{00} by 2·δ·A_00 + δ² = δ/2 + δ².
        let mut m = dense_hadamard(4);
        m.set(0, 0, m.get(0, 0) + 1e-3);
        let r = unitarity_residual(&LinearOperator::Dense(m)).unwrap();
        assert!(r >= 5e-4, "{r:e}");
    }

    #[test]
    fn unitarity_residual_respects_limit() {
        let h = LinearOperator::walsh_hadamard(64).unwrap();
        assert!(matches!(
            unitarity_residual_with_limit(&h, 32),
            Err(GroverError::ResourceLimit { dim: 64, limit: 32 })
        ));
    }

    #[test]
    fn composed_applies_in_list_order() {
        // X then Z on a qubit: Z·X e0 = Z e1 = −e1.
        let x = DenseMatrix::new(2, vec![ZERO, ONE, ONE, ZERO]).unwrap();
        let z = DenseMatrix::new(2, vec![ONE, ZERO, ZERO, -ONE]).unwrap();
        let op = LinearOperator::composed(vec![
            LinearOperator::Dense(x.clone()),
            LinearOperator::Dense(z.clone()),
        ])
        .unwrap();
        let out = op.apply(&StateVector::basis(2, 0).unwrap(), false).unwrap();
        assert_eq!(out.amplitudes(), &[ZERO, -ONE]);
        assert_eq!(op.materialize(16).unwrap(), z.matmul(&x));
        let back = op.apply(&out, true).unwrap();
        assert_eq!(back.amplitudes(), &[ONE, ZERO]);
    }

    #[test]
    fn composed_rejects_mixed_dims() {
        let ops = vec![LinearOperator::identity(2).unwrap(), LinearOperator::identity(4).unwrap()];
        assert!(LinearOperator::composed(ops).is_err());
        assert!(LinearOperator::composed(vec![]).is_err());
    }

    #[test]
    fn non_unitary_apply_is_reported() {
        let m = DenseMatrix::new(2, vec![c(2.0), ZERO, ZERO, ONE]).unwrap();
        let op = LinearOperator::Dense(m);
        let err = op.apply(&StateVector::basis(2, 0).unwrap(), false);
        assert!(matches!(err, Err(GroverError::NumericalConsistency(_))));
    }
}
