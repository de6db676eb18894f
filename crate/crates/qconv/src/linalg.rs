//! Shared dense complex linear-algebra aliases and small helpers.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Number of qubits for a power-of-two dimension, or an error.
pub fn qubit_count(dim: usize) -> Result<usize> {
    if dim >= 2 && dim.is_power_of_two() {
        Ok(dim.trailing_zeros() as usize)
    } else {
        Err(Error::InvalidDimension(format!(
            "dimension {dim} is not a power of two >= 2"
        )))
    }
}

/// Entrywise max-norm of a matrix.
pub fn max_norm(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Entrywise max-norm of the difference of two matrices.
pub fn max_norm_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch in max_norm_diff");
    max_norm(&(a - b))
}

pub fn vec_max_norm_diff(a: &CVector, b: &CVector) -> f64 {
    assert_eq!(a.len(), b.len(), "length mismatch in vec_max_norm_diff");
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn is_unitary(m: &CMatrix, tol: f64) -> bool {
    let n = m.nrows();
    if n != m.ncols() {
        return false;
    }
    let prod = m.adjoint() * m;
    max_norm_diff(&prod, &CMatrix::identity(n, n)) <= tol
}

pub fn is_hermitian(m: &CMatrix, tol: f64) -> bool {
    m.nrows() == m.ncols() && max_norm_diff(m, &m.adjoint()) <= tol
}

/// Exactly one unit entry per row and column, all other entries zero.
pub fn is_permutation(m: &CMatrix, tol: f64) -> bool {
    let n = m.nrows();
    if n != m.ncols() {
        return false;
    }
    let mut col_hits = vec![0usize; n];
    for r in 0..n {
        let mut row_hits = 0usize;
        for c in 0..n {
            let z = m[(r, c)];
            if (z - ONE).norm() <= tol {
                row_hits += 1;
                col_hits[c] += 1;
            } else if z.norm() > tol {
                return false;
            }
        }
        if row_hits != 1 {
            return false;
        }
    }
    col_hits.iter().all(|&h| h == 1)
}

/// Random complex vector with entries uniform on the unit square.
pub fn random_complex_vector<R: Rng>(rng: &mut R, dim: usize) -> CVector {
    CVector::from_fn(dim, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

/// Random real-valued vector (stored as complex with zero imaginary parts).
pub fn random_real_vector<R: Rng>(rng: &mut R, dim: usize) -> CVector {
    CVector::from_fn(dim, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), 0.0))
}

/// Normalize to unit 2-norm; errors on (numerically) zero input.
pub fn normalized(v: &CVector) -> Result<CVector> {
    let norm = v.norm();
    if norm < 1e-14 {
        return Err(Error::ZeroVector("cannot normalize a zero vector"));
    }
    Ok(v / Complex64::new(norm, 0.0))
}

pub fn ensure_unit_norm(v: &CVector) -> Result<()> {
    let norm = v.norm();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::NotNormalized { norm });
    }
    Ok(())
}
