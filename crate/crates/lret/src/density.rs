//! Dense density-matrix state for the reference engine.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::factor::EigenPair;
use crate::linalg;
use crate::tolerance;

/// A `2^N × 2^N` Hermitian positive-semidefinite matrix with trace at most 1.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    num_qubits: usize,
    /// Column-major, `dim * dim` entries.
    data: Vec<Complex64>,
}

impl DensityMatrix {
    /// `|basis_index⟩⟨basis_index|`.
    pub fn basis_state(num_qubits: usize, basis_index: usize) -> Result<Self> {
        if num_qubits == 0 {
            return Err(Error::InvalidFactor("need at least one qubit".into()));
        }
        let dim = 1usize << num_qubits;
        if basis_index >= dim {
            return Err(Error::BasisIndexOutOfRange {
                index: basis_index,
                num_qubits,
            });
        }
        let mut data = vec![Complex64::ZERO; dim * dim];
        data[basis_index + basis_index * dim] = Complex64::ONE;
        Ok(Self { num_qubits, data })
    }

    /// Builds from explicit column-major entries, checking shape, Hermiticity
    /// and trace. Positive semidefiniteness is not verified here; it is an
    /// eigendecomposition-grade check left to callers that need it.
    pub fn from_entries(num_qubits: usize, data: Vec<Complex64>) -> Result<Self> {
        let dim = 1usize << num_qubits;
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                left: data.len(),
                right: dim * dim,
            });
        }
        let dev = linalg::hermiticity_deviation(&data, dim);
        if dev > tolerance::HERMITICITY {
            return Err(Error::NotHermitian(dev));
        }
        let rho = Self { num_qubits, data };
        let tr = rho.trace();
        if tr <= 0.0 || tr > 1.0 + tolerance::TRACE_EXCESS {
            return Err(Error::InvalidFactor(format!("trace {tr} out of range")));
        }
        Ok(rho)
    }

    /// Internal constructor for matrices produced by trusted numerics.
    pub(crate) fn from_raw(num_qubits: usize, data: Vec<Complex64>) -> Self {
        debug_assert_eq!(data.len(), (1usize << num_qubits) * (1 << num_qubits));
        Self { num_qubits, data }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.num_qubits
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub(crate) fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.data[i + j * self.dim()]
    }

    pub fn trace(&self) -> f64 {
        let dim = self.dim();
        (0..dim).map(|i| self.data[i + i * dim].re).sum()
    }

    /// Real parts of the diagonal; the computational-basis probabilities.
    pub fn diagonal(&self) -> Vec<f64> {
        let dim = self.dim();
        (0..dim).map(|i| self.data[i + i * dim].re).collect()
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        linalg::hermiticity_deviation(&self.data, self.dim())
    }

    pub fn frobenius_distance(&self, other: &DensityMatrix) -> f64 {
        linalg::frobenius_distance(&self.data, &other.data)
    }

    pub fn max_entry_distance(&self, other: &DensityMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Descending eigenvalues (clamped at zero within tolerance).
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let view = linalg::view(&self.data, self.dim(), self.dim());
        let (values, _) = linalg::hermitian_eig_desc(view)?;
        Ok(values)
    }

    /// Full eigendecomposition, keeping eigenvalues above the numerical floor.
    pub fn eigendecomposition(&self) -> Result<EigenPair> {
        let dim = self.dim();
        let view = linalg::view(&self.data, dim, dim);
        let (values, vectors) = linalg::hermitian_eig_desc(view)?;
        let keep = values
            .iter()
            .take_while(|&&v| v >= tolerance::EIGENVALUE_FLOOR)
            .count();
        let mut out = Vec::with_capacity(dim * keep);
        for k in 0..keep {
            for i in 0..dim {
                out.push(vectors[(i, k)]);
            }
        }
        Ok(EigenPair::new(dim, values[..keep].to_vec(), out))
    }

    /// Number of eigenvalues above the numerical floor.
    pub fn numerical_rank(&self) -> Result<usize> {
        Ok(self
            .eigenvalues()?
            .iter()
            .take_while(|&&v| v >= tolerance::EIGENVALUE_FLOOR)
            .count())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_state_diagonal() {
        let rho = DensityMatrix::basis_state(2, 3).unwrap();
        assert_eq!(rho.diagonal(), vec![0.0, 0.0, 0.0, 1.0]);
        assert!((rho.trace() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn from_entries_rejects_non_hermitian() {
        let mut data = vec![Complex64::ZERO; 4];
        data[0] = Complex64::ONE;
        data[1] = Complex64::new(0.3, 0.0);
        assert!(matches!(
            DensityMatrix::from_entries(1, data),
            Err(Error::NotHermitian(_))
        ));
    }

    #[test]
    fn eigenvalues_of_mixture() {
        let mut data = vec![Complex64::ZERO; 4];
        data[0] = Complex64::new(0.75, 0.0);
        data[3] = Complex64::new(0.25, 0.0);
        let rho = DensityMatrix::from_entries(1, data).unwrap();
        let ev = rho.eigenvalues().unwrap();
        assert!((ev[0] - 0.75).abs() < 1e-12);
        assert!((ev[1] - 0.25).abs() < 1e-12);
        assert_eq!(rho.numerical_rank().unwrap(), 2);
    }
}
