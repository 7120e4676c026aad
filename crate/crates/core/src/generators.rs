//! Seeded constructors for the unitary `V`, the start state `γ` and the
//! target set.
//!
//! Every random draw comes from a [`SeededRng`] built from an explicit seed,
//! so the same spec always yields bit-identical output.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{GroverError, Result};
use crate::files;
use crate::hilbert::{DenseMatrix, LinearOperator, StateVector, C64};
use crate::operators::TargetSet;

/// The portable generator behind every seeded draw.
pub type SeededRng = ChaCha8Rng;

/// Recorded in output metadata.
pub const RNG_NAME: &str = "ChaCha8Rng (rand_chacha 0.9, seed_from_u64)";

/// Load-time unitarity tolerance per unit of dimension.
pub const FILE_UNITARY_TOL_PER_DIM: f64 = 1e-10;

pub fn seeded_rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard complex Gaussian, `E|z|² = 1`.
pub fn complex_gaussian<R: rand::Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Haar-distributed `N×N` unitary.
///
/// A complex Ginibre matrix `Z` is factored as `Z = QR`; column `j` of `Q`
/// is then multiplied by `r_jj/|r_jj|`, which is the unique rephasing that
/// makes the triangular factor's diagonal positive. Without that step the
/// distribution of `Q` depends on the factorization's sign convention and
/// is not Haar.
pub fn haar_unitary(dim: usize, seed: u64) -> DenseMatrix {
    let mut rng = seeded_rng(seed);
    let entries: Vec<C64> = (0..dim * dim).map(|_| complex_gaussian(&mut rng)).collect();
    let z = DMatrix::from_row_slice(dim, dim, &entries);
    let qr = z.qr();
    let (q, r) = (qr.q(), qr.r());
    let mut data = Vec::with_capacity(dim * dim);
    for row in 0..dim {
        for col in 0..dim {
            let rjj = r[(col, col)];
            let phase = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { C64::new(1.0, 0.0) };
            data.push(q[(row, col)] * phase);
        }
    }
    DenseMatrix::new(dim, data).expect("square by construction")
}

/// I.i.d. complex Gaussian amplitudes, normalized.
pub fn random_state(dim: usize, seed: u64) -> Result<StateVector> {
    let mut rng = seeded_rng(seed);
    StateVector::normalized((0..dim).map(|_| complex_gaussian(&mut rng)).collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum UnitarySpec {
    Identity,
    WalshHadamard,
    Haar { seed: u64 },
    File(PathBuf),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum StateSpec {
    Uniform,
    Basis(usize),
    Random { seed: u64 },
    File(PathBuf),
}

/// `idx:a,b,c` or `count:k@seed`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum TargetSpec {
    Explicit(Vec<usize>),
    Sampled { count: usize, seed: u64 },
}

fn spec_err(input: &str, reason: impl Into<String>) -> GroverError {
    GroverError::InvalidSpec { input: input.to_owned(), reason: reason.into() }
}

fn parse_num<T: FromStr>(input: &str, field: &str) -> Result<T> {
    field.trim().parse().map_err(|_| spec_err(input, format!("`{field}` is not a valid number")))
}

impl FromStr for UnitarySpec {
    type Err = GroverError;

    fn from_str(s: &str) -> Result<Self> {
        match s.split_once(':') {
            None => match s {
                "identity" => Ok(UnitarySpec::Identity),
                "walsh-hadamard" | "walsh_hadamard" => Ok(UnitarySpec::WalshHadamard),
                _ => Err(spec_err(s, "expected identity, walsh-hadamard, haar:SEED or file:PATH")),
            },
            Some(("haar", seed)) => Ok(UnitarySpec::Haar { seed: parse_num(s, seed)? }),
            Some(("file", path)) if !path.is_empty() => Ok(UnitarySpec::File(path.into())),
            Some(_) => Err(spec_err(s, "expected identity, walsh-hadamard, haar:SEED or file:PATH")),
        }
    }
}

impl fmt::Display for UnitarySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UnitarySpec::Identity => f.write_str("identity"),
            UnitarySpec::WalshHadamard => f.write_str("walsh-hadamard"),
            UnitarySpec::Haar { seed } => write!(f, "haar:{seed}"),
            UnitarySpec::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

impl FromStr for StateSpec {
    type Err = GroverError;

    fn from_str(s: &str) -> Result<Self> {
        match s.split_once(':') {
            None if s == "uniform" => Ok(StateSpec::Uniform),
            Some(("basis", k)) => Ok(StateSpec::Basis(parse_num(s, k)?)),
            Some(("random", seed)) => Ok(StateSpec::Random { seed: parse_num(s, seed)? }),
            Some(("file", path)) if !path.is_empty() => Ok(StateSpec::File(path.into())),
            _ => Err(spec_err(s, "expected uniform, basis:K, random:SEED or file:PATH")),
        }
    }
}

impl fmt::Display for StateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateSpec::Uniform => f.write_str("uniform"),
            StateSpec::Basis(k) => write!(f, "basis:{k}"),
            StateSpec::Random { seed } => write!(f, "random:{seed}"),
            StateSpec::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

impl FromStr for TargetSpec {
    type Err = GroverError;

    fn from_str(s: &str) -> Result<Self> {
        match s.split_once(':') {
            Some(("idx", list)) => {
                let indices = list
                    .split(',')
                    .map(|t| parse_num(s, t))
                    .collect::<Result<Vec<usize>>>()?;
                Ok(TargetSpec::Explicit(indices))
            }
            Some(("count", rest)) => {
                let (count, seed) =
                    rest.split_once('@').ok_or_else(|| spec_err(s, "expected count:K@SEED"))?;
                Ok(TargetSpec::Sampled { count: parse_num(s, count)?, seed: parse_num(s, seed)? })
            }
            _ => Err(spec_err(s, "expected idx:A,B,... or count:K@SEED")),
        }
    }
}

impl fmt::Display for TargetSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TargetSpec::Explicit(list) => {
                let parts: Vec<String> = list.iter().map(ToString::to_string).collect();
                write!(f, "idx:{}", parts.join(","))
            }
            TargetSpec::Sampled { count, seed } => write!(f, "count:{count}@{seed}"),
        }
    }
}

macro_rules! string_conversions {
    ($($ty:ty),*) => {$(
        impl TryFrom<String> for $ty {
            type Error = GroverError;
            fn try_from(s: String) -> Result<Self> {
                s.parse()
            }
        }
        impl From<$ty> for String {
            fn from(spec: $ty) -> String {
                spec.to_string()
            }
        }
    )*};
}

string_conversions!(UnitarySpec, StateSpec, TargetSpec);

pub fn make_unitary(spec: &UnitarySpec, dim: usize) -> Result<LinearOperator> {
    match spec {
        UnitarySpec::Identity => LinearOperator::identity(dim),
        UnitarySpec::WalshHadamard => LinearOperator::walsh_hadamard(dim),
        UnitarySpec::Haar { seed } => {
            if dim < 2 {
                return Err(GroverError::Dimension(format!("dimension must be at least 2, got {dim}")));
            }
            LinearOperator::dense(haar_unitary(dim, *seed))
        }
        UnitarySpec::File(path) => {
            let m = files::read_matrix(path)?;
            if m.dim() != dim {
                return Err(GroverError::dim_mismatch("unitary file", m.dim(), dim));
            }
            let residual = m.unitarity_residual();
            let tol = FILE_UNITARY_TOL_PER_DIM * dim as f64;
            if !(residual <= tol) {
                return Err(GroverError::InvalidUnitary(format!(
                    "{}: unitarity residual {residual:e} exceeds {tol:e}",
                    path.display()
                )));
            }
            LinearOperator::dense(m)
        }
    }
}

pub fn make_state(spec: &StateSpec, dim: usize) -> Result<StateVector> {
    match spec {
        StateSpec::Uniform => StateVector::uniform(dim),
        StateSpec::Basis(k) => StateVector::basis(dim, *k),
        StateSpec::Random { seed } => random_state(dim, *seed),
        StateSpec::File(path) => {
            let s = files::read_state(path)?;
            if s.dim() != dim {
                return Err(GroverError::dim_mismatch("state file", s.dim(), dim));
            }
            Ok(s)
        }
    }
}

/// Explicit lists are used as given (sorted); sampled sets draw `count`
/// distinct indices uniformly without replacement.
pub fn make_targets(spec: &TargetSpec, dim: usize) -> Result<TargetSet> {
    match spec {
        TargetSpec::Explicit(list) => TargetSet::new(dim, list.clone()),
        TargetSpec::Sampled { count, seed } => {
            if *count == 0 || *count > dim {
                return Err(GroverError::InvalidTarget(format!(
                    "cannot sample {count} targets from dimension {dim}"
                )));
            }
            let mut rng = seeded_rng(*seed);
            TargetSet::new(dim, index::sample(&mut rng, dim, *count).into_vec())
        }
    }
}
