//! Quantum circuits for circular convolution over Z/2^n Z.
//!
//! The library builds, simulates, and verifies convolution circuits in which
//! the controlled-shift block of a linear-combination-of-unitaries (LCU)
//! pipeline is realized by modular addition. Four interchangeable SELECT
//! realizations are provided (a direct recursive form, its compiled bitwise
//! carry chain, a QFT phase-network adder, and a Cuccaro ripple-carry adder),
//! together with dense-matrix oracles for every operator involved, an exact
//! statevector simulator with postselection, Pauli-support analysis of the
//! reflected-shift family, Hermitian spectral processing for deconvolution,
//! and structural gate counting with scaling-exponent fits.
//!
//! Start with the runnable programs in `examples/`, or go straight to
//! [`simulator::convolve_quantum`]:
//!
//! ```
//! use nalgebra::DVector;
//! use num_complex::Complex64;
//! use qconv::{shift_algebra, simulator, synthesis::SelectVariant};
//!
//! let a = DVector::from_vec(vec![
//!     Complex64::new(1.0, 0.0),
//!     Complex64::new(2.0, 0.0),
//!     Complex64::new(3.0, 0.0),
//!     Complex64::new(4.0, 0.0),
//! ]);
//! let b = shift_algebra::delta_kernel(1, 4);
//! let (c, _p) = simulator::convolve_quantum(&a, &b, SelectVariant::CompiledBitwise).unwrap();
//! let expected = shift_algebra::circular_convolve(&a, &b).unwrap();
//! assert!((c - expected).norm() < 1e-10);
//! ```

pub mod circuit;
pub mod cli;
pub mod error;
pub mod linalg;
pub mod pauli;
pub mod resources;
pub mod shift_algebra;
pub mod simulator;
pub mod spectral;
pub mod synthesis;

pub use error::{Error, Result};
pub use linalg::{CMatrix, CVector};
