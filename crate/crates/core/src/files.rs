//! JSON files for states and matrices: `{"dim": N, "data": [[re, im], ...]}`.
//! Matrices are row-major with `N²` entries, states are flat with `N`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{GroverError, Result};
use crate::hilbert::{DenseMatrix, StateVector, C64};

/// Normalization tolerance applied to loaded states.
pub const STATE_FILE_TOL: f64 = 1e-10;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComplexArrayFile {
    pub dim: usize,
    pub data: Vec<[f64; 2]>,
}

impl ComplexArrayFile {
    pub fn from_values(dim: usize, values: &[C64]) -> Self {
        Self { dim, data: values.iter().map(|z| [z.re, z.im]).collect() }
    }

    pub fn values(&self) -> Vec<C64> {
        self.data.iter().map(|&[re, im]| C64::new(re, im)).collect()
    }
}

fn read(path: &Path) -> Result<ComplexArrayFile> {
    let text = fs::read_to_string(path)
        .map_err(|source| GroverError::Io { path: path.to_owned(), source })?;
    serde_json::from_str(&text).map_err(|source| GroverError::Parse { path: path.to_owned(), source })
}

fn write(path: &Path, file: &ComplexArrayFile) -> Result<()> {
    let text = serde_json::to_string(file)
        .map_err(|source| GroverError::Parse { path: path.to_owned(), source })?;
    fs::write(path, text).map_err(|source| GroverError::Io { path: path.to_owned(), source })
}

/// Reads a matrix; shape only. Unitarity is checked by the caller.
pub fn read_matrix(path: &Path) -> Result<DenseMatrix> {
    let file = read(path)?;
    if file.data.len() != file.dim * file.dim {
        return Err(GroverError::Dimension(format!(
            "{}: dim {} needs {} matrix entries, found {}",
            path.display(),
            file.dim,
            file.dim * file.dim,
            file.data.len()
        )));
    }
    DenseMatrix::new(file.dim, file.values())
}

/// Reads a state and checks it is unit norm to [`STATE_FILE_TOL`].
pub fn read_state(path: &Path) -> Result<StateVector> {
    let file = read(path)?;
    if file.data.len() != file.dim {
        return Err(GroverError::Dimension(format!(
            "{}: dim {} but {} state entries",
            path.display(),
            file.dim,
            file.data.len()
        )));
    }
    StateVector::with_tolerance(file.values(), STATE_FILE_TOL)
}

pub fn write_matrix(path: &Path, matrix: &DenseMatrix) -> Result<()> {
    write(path, &ComplexArrayFile::from_values(matrix.dim(), matrix.data()))
}

pub fn write_state(path: &Path, state: &StateVector) -> Result<()> {
    write(path, &ComplexArrayFile::from_values(state.dim(), state.amplitudes()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn state_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.json");
        let s = StateVector::normalized(vec![C64::new(0.3, -0.1), C64::new(-0.7, 0.2)]).unwrap();
        write_state(&path, &s).unwrap();
        assert_eq!(read_state(&path).unwrap(), s);
    }

    #[test]
    fn rejects_wrong_lengths_and_norms() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.json");
        fs::write(&path, r#"{"dim": 2, "data": [[1,0],[0,0],[0,0]]}"#).unwrap();
        assert!(matches!(read_state(&path), Err(GroverError::Dimension(_))));
        assert!(matches!(read_matrix(&path), Err(GroverError::Dimension(_))));

        fs::write(&path, r#"{"dim": 2, "data": [[1,0],[0.1,0]]}"#).unwrap();
        assert!(matches!(read_state(&path), Err(GroverError::InvalidState(_))));

        fs::write(&path, r#"{"dim": 2, "data": "nope"}"#).unwrap();
        assert!(matches!(read_state(&path), Err(GroverError::Parse { .. })));
        assert!(matches!(
            read_state(&dir.path().join("missing.json")),
            Err(GroverError::Io { .. })
        ));
    }

    #[test]
    fn matrix_is_row_major() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.json");
        fs::write(&path, r#"{"dim": 2, "data": [[0,0],[1,0],[0,1],[0,0]]}"#).unwrap();
        let m = read_matrix(&path).unwrap();
        assert_eq!(m.get(0, 1), C64::new(1.0, 0.0));
        assert_eq!(m.get(1, 0), C64::new(0.0, 1.0));
    }
}
