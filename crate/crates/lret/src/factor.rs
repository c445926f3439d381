//! Factored state representation `ρ = L L†` and its rank-compression
//! primitives.
//!
//! A density matrix of rank `V` can be stored as a `2^N × V` factor `L` with
//! `ρ = L L†`. Gates and Kraus matrices act directly on `L`, and the spectrum
//! of `ρ` is recovered from the `V × V` Gram matrix `L†L` without ever
//! forming the `2^N × 2^N` product: if `u` is an eigenvector of `L†L` with
//! eigenvalue `λ > 0`, then `Lu/√λ` is a unit eigenvector of `LL†` with the
//! same eigenvalue. The cost is `O(V³ + 2^N·V²)`.

use num_complex::Complex64;

use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::linalg;
use crate::tolerance;

/// A `2^N × V` complex factor with `ρ = L L†`.
///
/// The trace of `LL†` equals the squared Frobenius norm of `L`. It starts at
/// 1 and may only fall below 1 through truncation; the lost weight is an
/// audit trail of what truncation discarded, so the factor is never
/// renormalized.
#[derive(Debug, Clone, PartialEq)]
pub struct LFactor {
    num_qubits: usize,
    cols: usize,
    /// Column-major, `2^num_qubits * cols` entries.
    data: Vec<Complex64>,
}

impl LFactor {
    /// Single-column factor for the computational basis state `|basis_index⟩`.
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
        let mut data = vec![Complex64::ZERO; dim];
        data[basis_index] = Complex64::ONE;
        Ok(Self {
            num_qubits,
            cols: 1,
            data,
        })
    }

    /// Builds a factor from explicit column-major data.
    ///
    /// Accepts any factor with positive trace not exceeding 1 (beyond
    /// rounding); this is how sparse superposition initial states and test
    /// fixtures enter the engine.
    pub fn from_columns(num_qubits: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if num_qubits == 0 || cols == 0 {
            return Err(Error::InvalidFactor(
                "factor must have at least one qubit and one column".into(),
            ));
        }
        let dim = 1usize << num_qubits;
        if data.len() != dim * cols {
            return Err(Error::DimensionMismatch {
                left: data.len(),
                right: dim * cols,
            });
        }
        let factor = Self {
            num_qubits,
            cols,
            data,
        };
        let tr = factor.trace();
        if tr <= 0.0 {
            return Err(Error::InvalidFactor("trace must be positive".into()));
        }
        if tr > 1.0 + tolerance::TRACE_EXCESS {
            return Err(Error::InvalidFactor(format!(
                "trace {tr} exceeds 1 beyond tolerance"
            )));
        }
        Ok(factor)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    /// Hilbert-space dimension `2^N`.
    pub fn dim(&self) -> usize {
        1 << self.num_qubits
    }

    /// Number of columns `V` (the stored rank).
    pub fn num_cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub(crate) fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    /// Replaces the column buffer. Callers guarantee `data.len() == dim * cols`.
    pub(crate) fn replace_columns(&mut self, cols: usize, data: Vec<Complex64>) {
        debug_assert_eq!(data.len(), self.dim() * cols);
        self.cols = cols;
        self.data = data;
    }

    pub fn column(&self, v: usize) -> &[Complex64] {
        let dim = self.dim();
        &self.data[v * dim..(v + 1) * dim]
    }

    /// `trace(LL†) = Σ |L_{x,v}|²`.
    pub fn trace(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Forms the dense density matrix `ρ = L L†`.
    pub fn to_density(&self) -> DensityMatrix {
        let dim = self.dim();
        let l = linalg::view(&self.data, dim, self.cols);
        let rho = linalg::hermitized_outer(l);
        DensityMatrix::from_raw(self.num_qubits, linalg::to_vec(rho.as_ref()))
    }

    /// Spectrum of `LL†` computed in the column subspace.
    ///
    /// Forms the Gram matrix `L†L`, Hermitized as `(M + M†)/2`, diagonalizes
    /// it, and lifts each eigenvector `u` with eigenvalue above the numerical
    /// floor to the full-space eigenvector `Lu/√λ`. Never forms `LL†`.
    pub fn eigendecomposition(&self) -> Result<EigenPair> {
        let dim = self.dim();
        let l = linalg::view(&self.data, dim, self.cols);
        let gram = linalg::hermitized_gram(l);
        let (values, subspace_vectors) = linalg::hermitian_eig_desc(gram.as_ref())?;

        let kept: Vec<usize> = (0..values.len())
            .filter(|&i| values[i] >= tolerance::EIGENVALUE_FLOOR)
            .collect();
        let mut kept_values = Vec::with_capacity(kept.len());
        let mut scaled = faer::Mat::<Complex64>::zeros(self.cols, kept.len());
        for (out_col, &i) in kept.iter().enumerate() {
            kept_values.push(values[i]);
            let inv_sqrt = 1.0 / values[i].sqrt();
            for r in 0..self.cols {
                scaled[(r, out_col)] = subspace_vectors[(r, i)] * inv_sqrt;
            }
        }
        let vectors = linalg::matmul(l, scaled.as_ref());
        Ok(EigenPair {
            dim,
            values: kept_values,
            vectors,
        })
    }

    /// Projects onto the leading eigenvectors, keeping the minimal descending
    /// prefix whose trace-normalized eigenvalue sum reaches `1 − epsilon`.
    ///
    /// The cutoff is evaluated on eigenvalues normalized by the current trace
    /// so that `epsilon` keeps its meaning after earlier truncations shrank
    /// the trace. The returned factor's columns are the kept eigenvectors
    /// scaled by the square roots of their eigenvalues, so its trace equals
    /// the kept eigenvalue sum; nothing is renormalized.
    pub fn truncate(&self, epsilon: f64) -> Result<LFactor> {
        if !(0.0..1.0).contains(&epsilon) {
            return Err(Error::InvalidEpsilon(epsilon));
        }
        let dim = self.dim();
        let l = linalg::view(&self.data, dim, self.cols);

        // The Gram route costs O(V³); once V exceeds 2^N the full-space
        // eigendecomposition is cheaper, so pick whichever is smaller.
        if self.cols <= dim {
            let gram = linalg::hermitized_gram(l);
            let (values, subspace_vectors) = linalg::hermitian_eig_desc(gram.as_ref())?;
            let keep = cutoff_count(&values, epsilon)?;
            // L·u has squared norm u†(L†L)u = λ, so the kept columns come out
            // scaled by √λ without an explicit normalize-and-rescale pass.
            let mut kept = faer::Mat::<Complex64>::zeros(self.cols, keep);
            for k in 0..keep {
                for r in 0..self.cols {
                    kept[(r, k)] = subspace_vectors[(r, k)];
                }
            }
            let data = linalg::matmul(l, kept.as_ref());
            Ok(LFactor {
                num_qubits: self.num_qubits,
                cols: keep,
                data,
            })
        } else {
            let rho = linalg::hermitized_outer(l);
            let (values, vectors) = linalg::hermitian_eig_desc(rho.as_ref())?;
            let keep = cutoff_count(&values, epsilon)?;
            let mut data = Vec::with_capacity(dim * keep);
            for k in 0..keep {
                let scale = values[k].sqrt();
                for i in 0..dim {
                    data.push(vectors[(i, k)] * scale);
                }
            }
            Ok(LFactor {
                num_qubits: self.num_qubits,
                cols: keep,
                data,
            })
        }
    }
}

/// Number of leading eigenvalues to keep for a given threshold.
///
/// Values below the numerical floor never count. Keeps the minimal prefix of
/// the descending spectrum whose sum reaches `(1 − epsilon) · total`.
fn cutoff_count(values_desc: &[f64], epsilon: f64) -> Result<usize> {
    let significant = values_desc
        .iter()
        .take_while(|&&v| v >= tolerance::EIGENVALUE_FLOOR)
        .count();
    if significant == 0 {
        return Err(Error::Internal(
            "truncation of a numerically zero factor".into(),
        ));
    }
    let total: f64 = values_desc[..significant].iter().sum();
    let target = (1.0 - epsilon) * total;
    let mut cumulative = 0.0;
    for (i, &v) in values_desc[..significant].iter().enumerate() {
        cumulative += v;
        if cumulative >= target {
            return Ok(i + 1);
        }
    }
    Ok(significant)
}

/// Descending eigenvalues of a positive semidefinite matrix together with the
/// matching orthonormal eigenvectors (column-major, `dim × k`).
#[derive(Debug, Clone)]
pub struct EigenPair {
    dim: usize,
    values: Vec<f64>,
    vectors: Vec<Complex64>,
}

impl EigenPair {
    pub(crate) fn new(dim: usize, values: Vec<f64>, vectors: Vec<Complex64>) -> Self {
        Self {
            dim,
            values,
            vectors,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn vector(&self, k: usize) -> &[Complex64] {
        &self.vectors[k * self.dim..(k + 1) * self.dim]
    }

    /// Rebuilds `Σ λ_k v_k v_k†` as a dense matrix (column-major buffer).
    pub fn reconstruct(&self) -> Vec<Complex64> {
        let dim = self.dim;
        let mut out = vec![Complex64::ZERO; dim * dim];
        for k in 0..self.len() {
            let lambda = self.values[k];
            let v = self.vector(k);
            for j in 0..dim {
                let w = v[j].conj() * lambda;
                for i in 0..dim {
                    out[i + j * dim] += v[i] * w;
                }
            }
        }
        out
    }

    /// Factor whose columns are `√λ_k · v_k`.
    pub fn to_factor(&self, num_qubits: usize) -> Result<LFactor> {
        if self.is_empty() {
            return Err(Error::Internal(
                "cannot build a factor from an empty spectrum".into(),
            ));
        }
        let dim = self.dim;
        let mut data = Vec::with_capacity(dim * self.len());
        for k in 0..self.len() {
            let scale = self.values[k].sqrt();
            for i in 0..dim {
                data.push(self.vectors[k * dim + i] * scale);
            }
        }
        LFactor::from_columns(num_qubits, self.len(), data)
    }
}
