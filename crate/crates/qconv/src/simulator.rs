//! Exact statevector execution, postselection, and block-encoding checks.

use std::ops::Range;

use num_complex::Complex64;

use crate::circuit::{apply_gate, Circuit};
use crate::error::{Error, Result};
use crate::linalg::{ensure_unit_norm, normalized, qubit_count, CMatrix, CVector};
use crate::shift_algebra::symmetrized_operator;
use crate::synthesis::{build_lcu_pipeline, build_select_l, PipelineMode, SelectVariant};

/// Statevector simulation is capped at this width.
pub const SIM_MAX_WIDTH: usize = 24;

/// Dense amplitudes over a fixed number of qubits, little-endian indexed.
#[derive(Debug, Clone)]
pub struct StateVector {
    width: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    fn check_width(width: usize) -> Result<()> {
        if width == 0 || width > SIM_MAX_WIDTH {
            return Err(Error::Capacity(format!(
                "statevector width must be in 1..={SIM_MAX_WIDTH}, got {width}"
            )));
        }
        Ok(())
    }

    /// The all-zeros computational basis state.
    pub fn zero_state(width: usize) -> Result<Self> {
        Self::check_width(width)?;
        let mut amps = vec![Complex64::default(); 1 << width];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(StateVector { width, amps })
    }

    /// Wrap explicit amplitudes; must be normalized to 1e-12.
    pub fn from_amplitudes(width: usize, amps: Vec<Complex64>) -> Result<Self> {
        Self::check_width(width)?;
        if amps.len() != 1 << width {
            return Err(Error::DimensionMismatch { left: amps.len(), right: 1 << width });
        }
        let norm: f64 = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::NotNormalized { norm });
        }
        Ok(StateVector { width, amps })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn to_cvector(&self) -> CVector {
        CVector::from_vec(self.amps.clone())
    }
}

/// Apply a circuit to a state by local amplitude updates, gates in
/// application order. Deterministic; no full matrix is formed.
pub fn run(circuit: &Circuit, initial: &StateVector) -> Result<StateVector> {
    if circuit.width() != initial.width {
        return Err(Error::DimensionMismatch { left: circuit.width(), right: initial.width });
    }
    let mut out = initial.clone();
    for gate in circuit.gates() {
        apply_gate(gate, &mut out.amps);
    }
    Ok(out)
}

/// Replace the contents of a register (currently |0..0>) with the given
/// normalized amplitudes, leaving the rest of the state untouched.
pub fn inject_register(
    state: &StateVector,
    register: Range<usize>,
    amplitudes: &CVector,
) -> Result<StateVector> {
    let (lo, hi) = (register.start, register.end);
    if lo >= hi || hi > state.width {
        return Err(Error::InvalidDimension(format!(
            "register [{lo}, {hi}) out of range for width {}",
            state.width
        )));
    }
    let reg_width = hi - lo;
    if amplitudes.len() != 1 << reg_width {
        return Err(Error::DimensionMismatch {
            left: amplitudes.len(),
            right: 1 << reg_width,
        });
    }
    ensure_unit_norm(amplitudes)?;
    let reg_mask = ((1usize << reg_width) - 1) << lo;
    for (idx, amp) in state.amps.iter().enumerate() {
        if idx & reg_mask != 0 && amp.norm() > 1e-12 {
            return Err(Error::RegisterNotZero);
        }
    }
    let mut amps = vec![Complex64::default(); state.amps.len()];
    for (idx, amp) in state.amps.iter().enumerate() {
        if idx & reg_mask == 0 {
            for r in 0..1usize << reg_width {
                amps[idx | (r << lo)] = amp * amplitudes[r];
            }
        }
    }
    Ok(StateVector { width: state.width, amps })
}

/// Project a register onto the all-zero outcome. Returns the renormalized
/// state of the remaining qubits and the outcome probability.
pub fn postselect_zero(
    state: &StateVector,
    register: Range<usize>,
) -> Result<(StateVector, f64)> {
    let (lo, hi) = (register.start, register.end);
    if lo >= hi || hi > state.width {
        return Err(Error::InvalidDimension(format!(
            "register [{lo}, {hi}) out of range for width {}",
            state.width
        )));
    }
    let reg_width = hi - lo;
    let reg_mask = ((1usize << reg_width) - 1) << lo;
    let mut prob = 0.0;
    for (idx, amp) in state.amps.iter().enumerate() {
        if idx & reg_mask == 0 {
            prob += amp.norm_sqr();
        }
    }
    if prob < 1e-14 {
        return Err(Error::PostselectionImpossible { prob });
    }
    let new_width = state.width - reg_width;
    let low_mask = (1usize << lo) - 1;
    let scale = Complex64::new(1.0 / prob.sqrt(), 0.0);
    let mut amps = vec![Complex64::default(); 1 << new_width];
    for (new_idx, amp) in amps.iter_mut().enumerate() {
        let low = new_idx & low_mask;
        let high = new_idx >> lo;
        let old_idx = (high << hi) | low;
        *amp = state.amps[old_idx] * scale;
    }
    Ok((StateVector { width: new_width.max(1), amps }, prob))
}

fn reversed_entries(v: &CVector) -> CVector {
    let dim = v.len();
    CVector::from_fn(dim, |i, _| v[dim - 1 - i])
}

/// Run the full convolution pipeline and rescale the postselected data
/// state so that the output equals the classical circular convolution of
/// `a` and `b`, phase included. Also returns the success probability.
///
/// The pipeline's reflected block computes the symmetrized operator, which
/// differs from plain convolution by one reversal of the data input; the
/// compensating reversal is pre-applied here by loading the data register
/// with the entry-reversed normalized `a`.
pub fn convolve_quantum(
    a: &CVector,
    b: &CVector,
    variant: SelectVariant,
) -> Result<(CVector, f64)> {
    convolve_quantum_impl(a, b, variant, false)
}

/// Same contract as [`convolve_quantum`], but with the kernel amplitudes
/// injected directly into the ancilla register instead of prepared by a
/// gate-level block.
pub fn convolve_quantum_supplied(
    a: &CVector,
    b: &CVector,
    variant: SelectVariant,
) -> Result<(CVector, f64)> {
    convolve_quantum_impl(a, b, variant, true)
}

fn convolve_quantum_impl(
    a: &CVector,
    b: &CVector,
    variant: SelectVariant,
    supplied: bool,
) -> Result<(CVector, f64)> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { left: a.len(), right: b.len() });
    }
    let n = qubit_count(a.len())?;
    let norm_a = a.norm();
    let norm_b = b.norm();
    if norm_a < 1e-14 {
        return Err(Error::ZeroVector("data vector a"));
    }
    if norm_b < 1e-14 {
        return Err(Error::ZeroVector("kernel vector b"));
    }
    let a_unit = normalized(a)?;
    let b_unit = normalized(b)?;
    let mode = if supplied {
        PipelineMode::SuppliedState
    } else {
        PipelineMode::OracleKernel(b_unit.clone())
    };
    let pipeline = build_lcu_pipeline(variant, n, mode)?;
    let width = pipeline.width();
    let init = StateVector::zero_state(width)?;
    let mut loaded = inject_register(&init, 0..n, &reversed_entries(&a_unit))?;
    if supplied {
        loaded = inject_register(&loaded, n..2 * n, &b_unit)?;
    }
    let finished = run(&pipeline, &loaded)?;
    let (data_state, prob) = postselect_zero(&finished, n..width)?;
    let scale = Complex64::new((prob * (1 << n) as f64).sqrt() * norm_a * norm_b, 0.0);
    let c = data_state.to_cvector() * scale;
    Ok((c, prob))
}

/// Ancilla-zero block of the full pipeline unitary: rows and columns with
/// every non-data wire in |0>.
pub fn asymmetric_block(variant: SelectVariant, b: &CVector, n: usize) -> Result<CMatrix> {
    ensure_unit_norm(b)?;
    if n > 4 {
        return Err(Error::Capacity(format!(
            "block extraction needs the dense pipeline unitary; capped at n = 4, got {n}"
        )));
    }
    let pipeline = build_lcu_pipeline(variant, n, PipelineMode::OracleKernel(b.clone()))?;
    let u = pipeline.unitary_of()?;
    let dim = 1 << n;
    Ok(CMatrix::from_fn(dim, dim, |r, c| u[(r, c)]))
}

/// Max-norm defect between the extracted ancilla-zero block and the
/// symmetrized convolution operator divided by sqrt(N).
pub fn verify_block_encoding(variant: SelectVariant, b: &CVector, n: usize) -> Result<f64> {
    let block = asymmetric_block(variant, b, n)?;
    let target = symmetrized_operator(b, n)? / Complex64::new((1u64 << n) as f64, 0.0).sqrt();
    Ok(crate::linalg::max_norm_diff(&block, &target))
}

/// The symmetric-overlap foil: kernel preparation on both sides of the
/// plain controlled-shift block. Its ancilla-zero block carries the
/// squared magnitudes of the kernel and erases the phases.
pub fn symmetric_overlap_block(b: &CVector, n: usize) -> Result<CMatrix> {
    ensure_unit_norm(b)?;
    if n > 4 {
        return Err(Error::Capacity(format!(
            "block extraction needs the dense pipeline unitary; capped at n = 4, got {n}"
        )));
    }
    let prep = crate::synthesis::build_prep_state(b)?;
    let select = build_select_l(SelectVariant::CompiledBitwise, n)?;
    let mut c = Circuit::new(2 * n)?;
    let ancilla_map: Vec<usize> = (n..2 * n).collect();
    c.append_remapped(&prep, &ancilla_map)?;
    c.append_remapped(&select, &(0..2 * n).collect::<Vec<_>>())?;
    c.append_remapped(&prep.inverse(), &ancilla_map)?;
    let u = c.unitary_of()?;
    let dim = 1 << n;
    Ok(CMatrix::from_fn(dim, dim, |r, cc| u[(r, cc)]))
}
