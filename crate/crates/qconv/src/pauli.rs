//! Pauli-string decomposition and the reflected-shift support check.
//!
//! Every reflected shift decomposes inside the span of {I,X} on the top
//! qubit times {I,X,Z} on the rest: no Pauli-Y letter ever appears, and at
//! most 2*3^(n-1) strings occur. [`verify_support`] decomposes a reflected
//! shift (or a whole symmetrized kernel operator) and reports how the
//! decomposition sits against that bound.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{qubit_count, CMatrix, CVector};
use crate::shift_algebra::{reflected_shift, symmetrized_operator};

/// Decomposition is capped at this register size (4^n strings).
pub const PAULI_MAX_QUBITS: usize = 5;

/// Coefficients below this threshold are structural zeros and are pruned.
pub const PRUNE_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum PauliOp {
    I,
    X,
    Y,
    Z,
}

impl PauliOp {
    pub fn letter(&self) -> char {
        match self {
            PauliOp::I => 'I',
            PauliOp::X => 'X',
            PauliOp::Y => 'Y',
            PauliOp::Z => 'Z',
        }
    }
}

/// One term of a Pauli decomposition. `word[j]` is the letter on qubit `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliTerm {
    pub word: Vec<PauliOp>,
    pub coefficient: Complex64,
}

impl PauliTerm {
    /// Render with character position j equal to qubit j.
    pub fn string(&self) -> String {
        self.word.iter().map(PauliOp::letter).collect()
    }

    pub fn contains_y(&self) -> bool {
        self.word.contains(&PauliOp::Y)
    }
}

/// Dense matrix of a Pauli word (qubit n-1 is the leftmost tensor factor).
pub fn word_matrix(word: &[PauliOp]) -> CMatrix {
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let z = Complex64::default();
    let single = |op: PauliOp| -> CMatrix {
        match op {
            PauliOp::I => CMatrix::identity(2, 2),
            PauliOp::X => CMatrix::from_row_slice(2, 2, &[z, one, one, z]),
            PauliOp::Y => CMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
            PauliOp::Z => CMatrix::from_row_slice(2, 2, &[one, z, z, -one]),
        }
    };
    let mut out = CMatrix::identity(1, 1);
    for &op in word.iter().rev() {
        out = out.kronecker(&single(op));
    }
    out
}

/// Hilbert-Schmidt decomposition of a dense operator into Pauli strings:
/// coefficients Tr(P M)/2^n, entries below the pruning threshold dropped,
/// output in lexicographic string order.
pub fn pauli_decompose(m: &CMatrix) -> Result<Vec<PauliTerm>> {
    if m.nrows() != m.ncols() {
        return Err(Error::InvalidDimension(format!(
            "matrix is {}x{}, expected square",
            m.nrows(),
            m.ncols()
        )));
    }
    let n = qubit_count(m.nrows())?;
    if n > PAULI_MAX_QUBITS {
        return Err(Error::Capacity(format!(
            "Pauli decomposition capped at n = {PAULI_MAX_QUBITS}, got n = {n}"
        )));
    }
    let dim = 1usize << n;
    let scale = 1.0 / dim as f64;
    let mut terms = Vec::new();
    let mut word = vec![PauliOp::I; n];
    for code in 0..4usize.pow(n as u32) {
        let mut rem = code;
        let mut xmask = 0usize;
        for (j, letter) in word.iter_mut().enumerate() {
            *letter = match rem % 4 {
                0 => PauliOp::I,
                1 => PauliOp::X,
                2 => PauliOp::Y,
                3 => PauliOp::Z,
                _ => unreachable!(),
            };
            if matches!(*letter, PauliOp::X | PauliOp::Y) {
                xmask |= 1 << j;
            }
            rem /= 4;
        }
        // P|k> = phase(k) |k ^ xmask>, so Tr(P^dag M) is a single sum of
        // matrix entries against conjugated phases.
        let mut acc = Complex64::default();
        for k in 0..dim {
            let mut phase = Complex64::new(1.0, 0.0);
            for (j, letter) in word.iter().enumerate() {
                let bit = (k >> j) & 1;
                match letter {
                    PauliOp::Y => {
                        phase *= if bit == 1 {
                            Complex64::new(0.0, -1.0)
                        } else {
                            Complex64::new(0.0, 1.0)
                        };
                    }
                    PauliOp::Z => {
                        if bit == 1 {
                            phase = -phase;
                        }
                    }
                    _ => {}
                }
            }
            acc += phase.conj() * m[(k ^ xmask, k)];
        }
        let coefficient = acc * scale;
        if coefficient.norm() > PRUNE_THRESHOLD {
            terms.push(PauliTerm { word: word.clone(), coefficient });
        }
    }
    terms.sort_by(|a, b| a.word.cmp(&b.word));
    Ok(terms)
}

/// What to decompose: a single reflected shift or a kernel's symmetrized
/// operator.
#[derive(Debug, Clone)]
pub enum SupportTarget<'a> {
    Shift(u64),
    Kernel(&'a CVector),
}

/// Outcome of the support check against the reflected-shift support set.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportReport {
    /// Total absolute coefficient weight on strings containing Y.
    pub y_weight: f64,
    pub term_count: usize,
    /// The support-set size bound 2 * 3^(n-1).
    pub bound: usize,
    /// True when the qubit n-1 letter of every surviving string is I or X.
    pub leading_factor_ok: bool,
}

impl SupportReport {
    pub fn ok(&self) -> bool {
        self.y_weight <= PRUNE_THRESHOLD && self.term_count <= self.bound && self.leading_factor_ok
    }
}

/// Decompose the target and check it against the support set
/// {I,X} (x) {I,X,Z}^{(n-1)}. Returns the surviving terms and the report.
pub fn verify_support(target: SupportTarget<'_>, n: usize) -> Result<(Vec<PauliTerm>, SupportReport)> {
    let m = match target {
        SupportTarget::Shift(i) => reflected_shift(i, n)?,
        SupportTarget::Kernel(b) => symmetrized_operator(b, n)?,
    };
    let terms = pauli_decompose(&m)?;
    let y_weight: f64 = terms
        .iter()
        .filter(|t| t.contains_y())
        .map(|t| t.coefficient.norm())
        .sum();
    let leading_factor_ok = terms
        .iter()
        .all(|t| matches!(t.word[n - 1], PauliOp::I | PauliOp::X));
    let bound = 2 * 3usize.pow(n as u32 - 1);
    let report = SupportReport {
        y_weight,
        term_count: terms.len(),
        bound,
        leading_factor_ok,
    };
    Ok((terms, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_norm_diff, random_complex_vector, random_real_vector, ONE};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn decompose_pauli_x() {
        let x = word_matrix(&[PauliOp::X]);
        let terms = pauli_decompose(&x).unwrap();
        assert_eq!(terms.len(), 1);
        assert_eq!(terms[0].word, vec![PauliOp::X]);
        assert!((terms[0].coefficient - ONE).norm() < 1e-14);
    }

    #[test]
    fn decompose_single_qubit_symmetrized_kernel() {
        // H_1(b) = b0 X + b1 I.
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let b = random_complex_vector(&mut rng, 2);
        let h = symmetrized_operator(&b, 1).unwrap();
        let terms = pauli_decompose(&h).unwrap();
        assert_eq!(terms.len(), 2);
        assert_eq!(terms[0].word, vec![PauliOp::I]);
        assert!((terms[0].coefficient - b[1]).norm() < 1e-14);
        assert_eq!(terms[1].word, vec![PauliOp::X]);
        assert!((terms[1].coefficient - b[0]).norm() < 1e-14);
    }

    #[test]
    fn decomposition_reconstructs_random_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let m = CMatrix::from_fn(4, 4, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let terms = pauli_decompose(&m).unwrap();
        let mut rebuilt = CMatrix::zeros(4, 4);
        for t in &terms {
            rebuilt += word_matrix(&t.word) * t.coefficient;
        }
        assert!(max_norm_diff(&rebuilt, &m) <= 1e-12);
    }

    #[test]
    fn parseval_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for n in 1..=3usize {
            let dim = 1 << n;
            let m = CMatrix::from_fn(dim, dim, |_, _| {
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            });
            let terms = pauli_decompose(&m).unwrap();
            let weight: f64 = terms.iter().map(|t| t.coefficient.norm_sqr()).sum();
            let trace = (m.adjoint() * &m).trace().re / dim as f64;
            assert!((weight - trace).abs() <= 1e-12, "n={n}");
        }
    }

    #[test]
    fn support_recursion_appends_x_on_new_low_qubit() {
        // Terms of the even reflected shift on n+1 qubits are the terms of
        // the half-index shift on n qubits with X appended at qubit 0.
        for n in 1..=3usize {
            for r in 0..1u64 << n {
                let parent = pauli_decompose(&reflected_shift(r, n).unwrap()).unwrap();
                let child = pauli_decompose(&reflected_shift(2 * r, n + 1).unwrap()).unwrap();
                let mut expected: Vec<PauliTerm> = parent
                    .into_iter()
                    .map(|t| {
                        let mut word = vec![PauliOp::X];
                        word.extend(t.word);
                        PauliTerm { word, coefficient: t.coefficient }
                    })
                    .collect();
                expected.sort_by(|a, b| a.word.cmp(&b.word));
                assert_eq!(child.len(), expected.len(), "n={n} r={r}");
                for (c, e) in child.iter().zip(&expected) {
                    assert_eq!(c.word, e.word);
                    assert!((c.coefficient - e.coefficient).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn single_qubit_shifts_have_tiny_support() {
        for i in 0..2 {
            let (_, report) = verify_support(SupportTarget::Shift(i), 1).unwrap();
            assert!(report.term_count <= 2);
            assert_eq!(report.y_weight, 0.0);
            assert!(report.ok());
        }
    }

    #[test]
    fn all_shifts_on_four_qubits_respect_bound() {
        for i in 0..16 {
            let (_, report) = verify_support(SupportTarget::Shift(i), 4).unwrap();
            assert!(report.term_count <= 54, "i={i}: {}", report.term_count);
            assert!(report.y_weight <= 1e-12);
            assert!(report.leading_factor_ok);
        }
    }

    #[test]
    fn random_real_kernel_support() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let b = random_real_vector(&mut rng, 8);
        let (terms, report) = verify_support(SupportTarget::Kernel(&b), 3).unwrap();
        assert!(report.ok());
        assert!(report.term_count <= 18);
        assert!(terms.iter().all(|t| !t.contains_y()));
    }

    #[test]
    fn decompose_rejects_oversized_input() {
        let m = CMatrix::identity(128, 128);
        assert!(matches!(pauli_decompose(&m), Err(Error::Capacity(_))));
        let bad = CMatrix::identity(3, 3);
        assert!(matches!(pauli_decompose(&bad), Err(Error::InvalidDimension(_))));
    }
}
