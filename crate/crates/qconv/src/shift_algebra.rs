//! Dense-matrix oracles for the cyclic-shift operator family over Z/2^n Z.
//!
//! Everything the circuit layer synthesizes is checked against the matrices
//! built here: the cyclic shifts, the reversal (anti-identity) permutation,
//! the reflected shifts obtained by composing the two, and the convolution
//! operators assembled from a kernel vector. The literal O(N^2) convolution
//! loop in [`circular_convolve`] is the project-wide ground truth; it is kept
//! deliberately naive.
//!
//! Conventions: little-endian basis indexing (basis index bit `j` is qubit
//! `j`), and tensor-product formulas read qubit `n-1` as the leftmost factor,
//! which is exactly the standard Kronecker-product ordering.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{qubit_count, CMatrix, CVector, ONE, ZERO};

/// Dense oracle matrices are capped at this many qubits per register.
pub const ORACLE_MAX_QUBITS: usize = 6;

fn check_register_size(n: usize) -> Result<usize> {
    if n < 1 {
        return Err(Error::InvalidDimension(format!(
            "register needs at least one qubit, got n = {n}"
        )));
    }
    if n > ORACLE_MAX_QUBITS {
        return Err(Error::Capacity(format!(
            "dense oracle matrices support at most {ORACLE_MAX_QUBITS} qubits, got n = {n}"
        )));
    }
    Ok(1usize << n)
}

fn check_kernel_dim(b: &CVector, n: usize) -> Result<usize> {
    let dim = check_register_size(n)?;
    if b.len() != dim {
        return Err(Error::DimensionMismatch {
            left: b.len(),
            right: dim,
        });
    }
    Ok(dim)
}

/// Cyclic shift by `i` on `n` qubits: the permutation sending `|k>` to
/// `|k+i mod 2^n>`. Shift amounts are reduced mod `2^n`.
pub fn shift_matrix(i: u64, n: usize) -> Result<CMatrix> {
    let dim = check_register_size(n)?;
    let shift = (i % dim as u64) as usize;
    Ok(CMatrix::from_fn(dim, dim, |r, c| {
        if r == (c + shift) % dim {
            ONE
        } else {
            ZERO
        }
    }))
}

/// Reversal (anti-identity) permutation: `|s> -> |2^n - 1 - s>`, equal to an
/// X gate on every wire under little-endian indexing. Involutory.
pub fn reversal_matrix(n: usize) -> Result<CMatrix> {
    let dim = check_register_size(n)?;
    Ok(CMatrix::from_fn(dim, dim, |r, c| {
        if r == dim - 1 - c {
            ONE
        } else {
            ZERO
        }
    }))
}

/// Reflected shift: the product of a cyclic shift and the reversal,
/// `|k> -> |i - 1 - k mod 2^n>`. Hermitian as well as unitary.
pub fn reflected_shift(i: u64, n: usize) -> Result<CMatrix> {
    let dim = check_register_size(n)?;
    let shift = (i % dim as u64) as usize;
    // shift_matrix(i) * reversal_matrix: column k has its unit entry at
    // row (2^n - 1 - k + i) mod 2^n.
    Ok(CMatrix::from_fn(dim, dim, |r, c| {
        if r == (dim - 1 - c + shift) % dim {
            ONE
        } else {
            ZERO
        }
    }))
}

/// Reflected generator: the reflected unit shift, `|k> -> |2^n - k mod 2^n>`.
///
/// Satisfies the block recursion `U_{n+1} = U_n (x) |0><0| + J_n (x) |1><1|`
/// with `U_1 = I`, where the projectors act on the low qubit.
pub fn reflected_generator(n: usize) -> Result<CMatrix> {
    reflected_shift(1, n)
}

/// Convolution operator for kernel `b`: the circulant matrix summing
/// `b_i` times the cyclic shift by `i`.
pub fn convolution_matrix(b: &CVector, n: usize) -> Result<CMatrix> {
    let dim = check_kernel_dim(b, n)?;
    // Column k of the circulant holds b cyclically shifted down by k.
    Ok(CMatrix::from_fn(dim, dim, |r, c| {
        b[(r + dim - c) % dim]
    }))
}

/// Symmetrized convolution operator for kernel `b`: the sum of `b_i` times
/// the reflected shift by `i`. Hermitian whenever `b` is real, and related
/// to the plain convolution operator by one reversal factor on the right.
pub fn symmetrized_operator(b: &CVector, n: usize) -> Result<CMatrix> {
    let dim = check_kernel_dim(b, n)?;
    // Entry (r, c) of sum_i b_i L~_{i,n}: the reflected shift by i maps
    // column c to row (dim - 1 - c + i) mod dim, so i = (r + 1 + c) mod dim.
    Ok(CMatrix::from_fn(dim, dim, |r, c| {
        b[(r + 1 + c) % dim]
    }))
}

/// Classical circular convolution, computed by the literal O(N^2) double
/// loop: `c_k = sum_j a_j b_{(k-j) mod N}`. This is the project-wide oracle.
pub fn circular_convolve(a: &CVector, b: &CVector) -> Result<CVector> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    qubit_count(a.len())?;
    let dim = a.len();
    let mut out = CVector::zeros(dim);
    for k in 0..dim {
        let mut acc = ZERO;
        for j in 0..dim {
            acc += a[j] * b[(k + dim - j) % dim];
        }
        out[k] = acc;
    }
    Ok(out)
}

/// Success probability of the postselected convolution block:
/// `||C_n(b) a||^2 / (N ||a||^2 ||b||^2)`.
pub fn success_probability(a: &CVector, b: &CVector) -> Result<f64> {
    let norm_a = a.norm();
    let norm_b = b.norm();
    if norm_a < 1e-14 {
        return Err(Error::ZeroVector("data vector a"));
    }
    if norm_b < 1e-14 {
        return Err(Error::ZeroVector("kernel vector b"));
    }
    let conv = circular_convolve(a, b)?;
    let dim = a.len() as f64;
    Ok(conv.norm_squared() / (dim * norm_a * norm_a * norm_b * norm_b))
}

/// A convolution kernel together with its norm.
#[derive(Debug, Clone)]
pub struct KernelSpec {
    vector: CVector,
    norm: f64,
}

impl KernelSpec {
    pub fn new(vector: CVector) -> Result<Self> {
        qubit_count(vector.len())?;
        let norm = vector.norm();
        if norm < 1e-14 {
            return Err(Error::ZeroVector("kernel vector b"));
        }
        Ok(Self { vector, norm })
    }

    pub fn vector(&self) -> &CVector {
        &self.vector
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm - 1.0).abs() <= 1e-12
    }

    /// The kernel rescaled to unit norm.
    pub fn unit(&self) -> CVector {
        &self.vector / Complex64::new(self.norm, 0.0)
    }

    pub fn dim(&self) -> usize {
        self.vector.len()
    }

    pub fn qubits(&self) -> usize {
        self.vector.len().trailing_zeros() as usize
    }
}

/// Basis-index delta kernel of the given dimension.
pub fn delta_kernel(index: usize, dim: usize) -> CVector {
    let mut v = CVector::zeros(dim);
    v[index % dim] = ONE;
    v
}

/// Uniform kernel: every entry `1/sqrt(N)`.
pub fn uniform_kernel(dim: usize) -> CVector {
    CVector::from_element(dim, Complex64::new(1.0 / (dim as f64).sqrt(), 0.0))
}
