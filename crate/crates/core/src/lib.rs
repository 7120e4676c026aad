//! Multiobject amplitude amplification with a general unitary.
//!
//! The search operator is `U = −I_γ V† I_L V`, where `I_L` flips the sign of
//! the `ℓ` marked basis states, `I_γ = I − 2|γ⟩⟨γ|`, and `V` is any unitary.
//! Starting from `|γ⟩`, the iterates `U^m|γ⟩` stay in a two-dimensional
//! subspace on which `U` acts through a real `2×2` matrix. This crate
//! simulates the full `N`-dimensional dynamics, builds the reduced model,
//! and checks the two against each other.
//!
//! Modules:
//! - [`hilbert`]: states, operators, fast Walsh–Hadamard transform.
//! - [`operators`]: target sets, reflections, the search step.
//! - [`reduced`]: overlaps, the reduced model, iteration counts.
//! - [`generators`]: seeded unitaries, states and target sets.
//! - [`simulate`]: traces, measurement, invariant-subspace residuals.
//! - [`validation`]: batched residual checks over random problem families.
//! - [`files`]: the JSON state/matrix format.

pub mod error;
pub mod files;
pub mod generators;
pub mod hilbert;
pub mod operators;
pub mod reduced;
pub mod simulate;
pub mod validation;

pub use error::{GroverError, Result};
pub use hilbert::{inner_product, DenseMatrix, LinearOperator, StateVector, C64};
pub use operators::{search_step, SearchProblem, TargetSet};
pub use reduced::{CoefficientPair, IterationRule, OverlapData, ReducedModel};
pub use simulate::{IterationTrace, StartVerdict, TraceRow};
