//! Thin wrappers around the dense linear-algebra backend.
//!
//! State data is stored in plain column-major `Vec<Complex64>` buffers; this
//! module is the only place that adapts those buffers to the backend's matrix
//! types for products and Hermitian eigendecompositions.

use faer::{Mat, MatRef, Side};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tolerance;

/// Borrows a column-major buffer as a matrix view.
pub(crate) fn view(data: &[Complex64], nrows: usize, ncols: usize) -> MatRef<'_, Complex64> {
    debug_assert_eq!(data.len(), nrows * ncols);
    MatRef::from_column_major_slice(data, nrows, ncols)
}

/// Copies a backend matrix into a column-major buffer.
pub(crate) fn to_vec(m: MatRef<'_, Complex64>) -> Vec<Complex64> {
    let (nrows, ncols) = (m.nrows(), m.ncols());
    let mut out = Vec::with_capacity(nrows * ncols);
    for j in 0..ncols {
        for i in 0..nrows {
            out.push(m[(i, j)]);
        }
    }
    out
}

/// `A† A`, explicitly Hermitized as `(M + M†)/2`.
pub(crate) fn hermitized_gram(a: MatRef<'_, Complex64>) -> Mat<Complex64> {
    let mut m = a.adjoint() * a;
    hermitize_in_place(&mut m);
    m
}

/// `A A†`, explicitly Hermitized.
pub(crate) fn hermitized_outer(a: MatRef<'_, Complex64>) -> Mat<Complex64> {
    let mut m = a * a.adjoint();
    hermitize_in_place(&mut m);
    m
}

pub(crate) fn hermitize_in_place(m: &mut Mat<Complex64>) {
    let n = m.nrows();
    for j in 0..n {
        for i in 0..=j {
            let avg = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            m[(i, j)] = avg;
            m[(j, i)] = avg.conj();
        }
    }
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues descending.
///
/// Eigenvalues in `[-NEGATIVE_EIGENVALUE, 0)` are clamped to zero; anything
/// more negative is an internal-consistency error (the inputs here are Gram
/// or density matrices, which are positive semidefinite by construction).
/// Ties keep the eigensolver's ordering, so the output is deterministic for a
/// fixed backend.
pub(crate) fn hermitian_eig_desc(m: MatRef<'_, Complex64>) -> Result<(Vec<f64>, Mat<Complex64>)> {
    let n = m.nrows();
    if n == 0 {
        return Ok((Vec::new(), Mat::zeros(0, 0)));
    }
    let evd = m
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Internal(format!("eigendecomposition failed: {e:?}")))?;
    let s = evd.S();
    let u = evd.U();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        s[b].re
            .partial_cmp(&s[a].re)
            .unwrap_or(std::cmp::Ordering::Equal)
    });

    let mut values = Vec::with_capacity(n);
    let mut vectors = Mat::zeros(n, n);
    for (k, &idx) in order.iter().enumerate() {
        let lambda = s[idx].re;
        if lambda < -tolerance::NEGATIVE_EIGENVALUE {
            return Err(Error::Internal(format!(
                "negative eigenvalue {lambda:e} below clamp tolerance"
            )));
        }
        values.push(lambda.max(0.0));
        for i in 0..n {
            vectors[(i, k)] = u[(i, idx)];
        }
    }
    Ok((values, vectors))
}

/// `A · B` into a plain buffer.
pub(crate) fn matmul(a: MatRef<'_, Complex64>, b: MatRef<'_, Complex64>) -> Vec<Complex64> {
    let m = a * b;
    to_vec(m.as_ref())
}

/// Frobenius norm of the difference of two equally-sized buffers.
pub(crate) fn frobenius_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Largest entrywise modulus of `A − A†` for a square buffer.
pub(crate) fn hermiticity_deviation(data: &[Complex64], n: usize) -> f64 {
    let mut dev = 0.0f64;
    for j in 0..n {
        for i in 0..=j {
            let d = (data[i + j * n] - data[j + i * n].conj()).norm();
            dev = dev.max(d);
        }
    }
    dev
}
