//! Index arithmetic for applying `2^k × 2^k` operators to k target qubits of
//! a `2^N`-dimensional state without materializing the embedded operator.
//!
//! Basis convention: index `x = Σ_q b_q · 2^(N−1−q)`, so qubit 0 is the most
//! significant bit. A k-qubit operator's local index uses `targets[0]` as its
//! most significant local bit.

use num_complex::Complex64;

/// Precomputed index tables for one (targets, N) combination.
pub(crate) struct TargetIndexer {
    /// Number of non-target bit assignments, `2^(N−k)`.
    pub base_count: usize,
    /// Target bit positions, ascending, for base expansion.
    sorted_positions: Vec<usize>,
    /// `offsets[l]` places the bits of local index `l` at the target positions.
    pub offsets: Vec<usize>,
}

impl TargetIndexer {
    pub fn new(num_qubits: usize, targets: &[usize]) -> Self {
        let k = targets.len();
        let positions: Vec<usize> = targets.iter().map(|&t| num_qubits - 1 - t).collect();
        let mut sorted_positions = positions.clone();
        sorted_positions.sort_unstable();
        let m = 1usize << k;
        let mut offsets = vec![0usize; m];
        for (l, off) in offsets.iter_mut().enumerate() {
            let mut o = 0usize;
            for (j, &pos) in positions.iter().enumerate() {
                if (l >> (k - 1 - j)) & 1 == 1 {
                    o |= 1 << pos;
                }
            }
            *off = o;
        }
        Self {
            base_count: 1usize << (num_qubits - k),
            sorted_positions,
            offsets,
        }
    }

    /// Expands a compact counter into a global index with zeros at all target
    /// bit positions.
    #[inline]
    pub fn base(&self, mut b: usize) -> usize {
        for &p in &self.sorted_positions {
            let high = (b >> p) << (p + 1);
            let low = b & ((1 << p) - 1);
            b = high | low;
        }
        b
    }
}

/// Applies a row-major `2^k × 2^k` matrix to the target qubits of one
/// `2^N`-length state vector, in place.
pub(crate) fn apply_to_vector(
    matrix: &[Complex64],
    indexer: &TargetIndexer,
    scratch: &mut [Complex64],
    vector: &mut [Complex64],
) {
    let m = indexer.offsets.len();
    debug_assert_eq!(matrix.len(), m * m);
    debug_assert!(scratch.len() >= m);
    if m == 2 {
        // One-qubit fast path: amplitude pairs split by the target bit.
        let stride = indexer.offsets[1];
        let (g00, g01, g10, g11) = (matrix[0], matrix[1], matrix[2], matrix[3]);
        for b in 0..indexer.base_count {
            let i0 = indexer.base(b);
            let i1 = i0 + stride;
            let a0 = vector[i0];
            let a1 = vector[i1];
            vector[i0] = g00 * a0 + g01 * a1;
            vector[i1] = g10 * a0 + g11 * a1;
        }
        return;
    }
    for b in 0..indexer.base_count {
        let base = indexer.base(b);
        for (l, s) in scratch[..m].iter_mut().enumerate() {
            *s = vector[base + indexer.offsets[l]];
        }
        for l in 0..m {
            let row = &matrix[l * m..(l + 1) * m];
            let mut acc = Complex64::ZERO;
            for c in 0..m {
                acc += row[c] * scratch[c];
            }
            vector[base + indexer.offsets[l]] = acc;
        }
    }
}

/// Applies the matrix to every column of a column-major `dim × ncols` buffer.
pub(crate) fn apply_to_columns(
    matrix: &[Complex64],
    indexer: &TargetIndexer,
    dim: usize,
    data: &mut [Complex64],
) {
    let m = indexer.offsets.len();
    let mut scratch = vec![Complex64::ZERO; m];
    for col in data.chunks_mut(dim) {
        apply_to_vector(matrix, indexer, &mut scratch, col);
    }
}

/// Right-multiplies a column-major `dim × dim` matrix by `G†` where `G` acts
/// on the target qubits of the column index: `A ← A G†`.
pub(crate) fn apply_adjoint_to_rows(
    matrix: &[Complex64],
    indexer: &TargetIndexer,
    dim: usize,
    data: &mut [Complex64],
) {
    let m = indexer.offsets.len();
    let mut cols = vec![0usize; m];
    let mut scratch = vec![Complex64::ZERO; m];
    for b in 0..indexer.base_count {
        let base = indexer.base(b);
        for (l, c) in cols.iter_mut().enumerate() {
            *c = (base + indexer.offsets[l]) * dim;
        }
        for i in 0..dim {
            for (l, s) in scratch[..m].iter_mut().enumerate() {
                *s = data[i + cols[l]];
            }
            for l in 0..m {
                let row = &matrix[l * m..(l + 1) * m];
                let mut acc = Complex64::ZERO;
                for c in 0..m {
                    acc += row[c].conj() * scratch[c];
                }
                data[i + cols[l]] = acc;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_expansion_skips_target_bits() {
        // N = 3, target qubit 1 → bit position 1.
        let idx = TargetIndexer::new(3, &[1]);
        let bases: Vec<usize> = (0..idx.base_count).map(|b| idx.base(b)).collect();
        assert_eq!(bases, vec![0b000, 0b001, 0b100, 0b101]);
        assert_eq!(idx.offsets, vec![0, 0b010]);
    }

    #[test]
    fn offsets_respect_target_order() {
        // N = 3, targets [2, 0]: local MSB is qubit 2 (bit position 0),
        // local LSB is qubit 0 (bit position 2).
        let idx = TargetIndexer::new(3, &[2, 0]);
        assert_eq!(idx.offsets, vec![0, 0b100, 0b001, 0b101]);
    }
}
