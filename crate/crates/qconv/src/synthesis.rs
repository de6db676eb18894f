//! Circuit builders: the four SELECT realizations, state preparation, and
//! the full asymmetric-LCU convolution pipeline.
//!
//! All four SELECT variants realize the same reflected-shift block
//! `sum_i |i><i| (x) L~_{i,n}` on a data register `D = [0, n)` and an
//! ancilla/index register `A = [n, 2n)`:
//!
//! * `DirectRecursive` — expands each controlled block shift through the
//!   structural recursion of the reflected generator (controlled-X fans for
//!   the reversal layers, an X-conjugated control for the low-bit-zero
//!   branch).
//! * `CompiledBitwise` — the exactly equivalent carry-propagation form: one
//!   descending multi-controlled-X chain per ancilla bit.
//! * `QftAdder` — modular addition in the Fourier basis via a controlled
//!   diagonal phase network between the two registers.
//! * `RippleCarry` — a Cuccaro MAJ/UMA in-place adder with one clean carry
//!   ancilla on qubit `2n`.
//!
//! The first two build the reflected block natively; the adder variants
//! build the plain controlled-shift block and obtain the reflected one by
//! prepending the data-side reversal layer (one X per data wire).

use std::f64::consts::PI;
use std::str::FromStr;


use crate::circuit::{Circuit, Gate, SectionKind};
use crate::error::{Error, Result};
use crate::linalg::{ensure_unit_norm, qubit_count, CVector};

/// Verification-range cap for gate-level synthesis.
pub const SYNTH_MAX_QUBITS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SelectVariant {
    DirectRecursive,
    CompiledBitwise,
    QftAdder,
    RippleCarry,
}

impl SelectVariant {
    pub const ALL: [SelectVariant; 4] = [
        SelectVariant::DirectRecursive,
        SelectVariant::CompiledBitwise,
        SelectVariant::QftAdder,
        SelectVariant::RippleCarry,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SelectVariant::DirectRecursive => "direct",
            SelectVariant::CompiledBitwise => "compiled",
            SelectVariant::QftAdder => "qft",
            SelectVariant::RippleCarry => "ripple",
        }
    }

    /// Number of extra ancilla wires beyond the two n-qubit registers.
    pub fn carry_qubits(&self) -> usize {
        match self {
            SelectVariant::RippleCarry => 1,
            _ => 0,
        }
    }
}

impl FromStr for SelectVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(SelectVariant::DirectRecursive),
            "compiled" => Ok(SelectVariant::CompiledBitwise),
            "qft" => Ok(SelectVariant::QftAdder),
            "ripple" => Ok(SelectVariant::RippleCarry),
            other => Err(Error::Data(format!(
                "unknown variant {other:?} (expected direct|compiled|qft|ripple)"
            ))),
        }
    }
}

/// How the kernel register is filled: by a gate-level preparation block, or
/// by amplitudes injected directly into the simulator.
#[derive(Debug, Clone)]
pub enum PipelineMode {
    OracleKernel(CVector),
    SuppliedState,
}

fn check_n(n: usize) -> Result<()> {
    if n < 1 {
        return Err(Error::InvalidDimension(format!(
            "at least one data qubit required, got n = {n}"
        )));
    }
    if n > SYNTH_MAX_QUBITS {
        return Err(Error::Capacity(format!(
            "circuit synthesis capped at n = {SYNTH_MAX_QUBITS}, got n = {n}"
        )));
    }
    Ok(())
}

/// Fresh circuit with the standard register layout for a variant.
fn select_shell(variant: SelectVariant, n: usize) -> Result<Circuit> {
    let width = 2 * n + variant.carry_qubits();
    let mut c = Circuit::new(width)?;
    c.add_register("data", 0, n)?;
    c.add_register("ancilla_index", n, 2 * n)?;
    if variant.carry_qubits() > 0 {
        c.add_register("carry", 2 * n, 2 * n + 1)?;
    }
    Ok(c)
}

/// Reversal layer on the data register: one X per data wire.
fn append_reversal_layer(c: &mut Circuit, n: usize) -> Result<()> {
    let start = c.gate_count();
    for q in 0..n {
        c.append(Gate::x(q))?;
    }
    c.add_section("j_layer", SectionKind::Global, start, c.gate_count());
    Ok(())
}

/// Controlled reflected-generator synthesis (the recursive normal form).
///
/// Realizes the controlled generator on `qubits` under the given control
/// set: the low-qubit-zero branch applies the recursed generator on the
/// remaining wires (with the low qubit X-conjugated as an extra control),
/// the low-qubit-one branch applies a controlled bit-flip fan.
fn synth_generator(c: &mut Circuit, controls: &mut Vec<usize>, qubits: &[usize]) -> Result<()> {
    let k = qubits.len();
    if k == 1 {
        return Ok(());
    }
    c.append(Gate::x(qubits[0]))?;
    controls.push(qubits[0]);
    synth_generator(c, controls, &qubits[1..])?;
    controls.pop();
    c.append(Gate::x(qubits[0]))?;
    for &q in &qubits[1..] {
        let mut cs = controls.clone();
        cs.push(qubits[0]);
        c.append(Gate::mcx(cs, q))?;
    }
    Ok(())
}

fn append_direct_blocks(c: &mut Circuit, n: usize) -> Result<()> {
    for m in 0..n {
        let start = c.gate_count();
        let ancilla = n + m;
        let data: Vec<usize> = (m..n).collect();
        // Controlled reversal fan of the suffix, then the controlled
        // generator; the product is the controlled suffix increment.
        for &q in &data {
            c.append(Gate::cx(ancilla, q))?;
        }
        let mut controls = vec![ancilla];
        synth_generator(c, &mut controls, &data)?;
        c.add_section(&m.to_string(), SectionKind::Interior, start, c.gate_count());
    }
    Ok(())
}

fn append_compiled_blocks(c: &mut Circuit, n: usize) -> Result<()> {
    for m in 0..n {
        let start = c.gate_count();
        let ancilla = n + m;
        // Descending multi-controlled-X carry chain, then the controlled
        // flip of the lowest suffix bit.
        for j in (m + 1..n).rev() {
            let mut controls = vec![ancilla];
            controls.extend(m..j);
            c.append(Gate::mcx(controls, j))?;
        }
        c.append(Gate::cx(ancilla, m))?;
        c.add_section(&m.to_string(), SectionKind::Interior, start, c.gate_count());
    }
    Ok(())
}

/// Gate list of the textbook QFT on the given wires (low index = low bit),
/// including the final qubit-reversal swap network, so that the dense
/// unitary equals the DFT matrix exactly.
fn qft_gates(qubits: &[usize]) -> Vec<Gate> {
    let n = qubits.len();
    let mut gates = Vec::new();
    for j in (0..n).rev() {
        gates.push(Gate::h(qubits[j]));
        for t in 0..j {
            gates.push(Gate::cphase(qubits[t], qubits[j], PI / (1u64 << (j - t)) as f64));
        }
    }
    for i in 0..n / 2 {
        gates.push(Gate::swap(qubits[i], qubits[n - 1 - i]));
    }
    gates
}

/// Standalone QFT circuit on `n` qubits (matches the DFT matrix).
pub fn build_qft(n: usize) -> Result<Circuit> {
    check_n(n)?;
    let mut c = Circuit::new(n)?;
    for g in qft_gates(&(0..n).collect::<Vec<_>>()) {
        c.append(g)?;
    }
    Ok(c)
}

fn append_qft_adder(c: &mut Circuit, n: usize) -> Result<()> {
    let data: Vec<usize> = (0..n).collect();
    let forward = qft_gates(&data);

    let start = c.gate_count();
    for g in &forward {
        c.append(g.clone())?;
    }
    c.add_section("qft", SectionKind::Global, start, c.gate_count());

    // Controlled diagonal phase network: ancilla bit j and Fourier bit t
    // pick up 2 pi 2^{j+t} / N; pairs with j + t >= n are full turns and
    // are skipped.
    for j in 0..n {
        let start = c.gate_count();
        for t in 0..n - j {
            let theta = PI / (1u64 << (n - 1 - j - t)) as f64;
            c.append(Gate::cphase(n + j, t, theta))?;
        }
        c.add_section(&j.to_string(), SectionKind::Interior, start, c.gate_count());
    }

    let start = c.gate_count();
    for g in forward.iter().rev() {
        c.append(g.inverse())?;
    }
    c.add_section("qft_dag", SectionKind::Global, start, c.gate_count());
    Ok(())
}

fn append_ripple_adder(c: &mut Circuit, n: usize) -> Result<()> {
    let start = c.gate_count();
    let carry = 2 * n;
    if n == 1 {
        // One-bit addition mod 2 is a single CNOT.
        c.append(Gate::cx(n, 0))?;
    } else {
        let carry_in = |i: usize| if i == 0 { carry } else { n + i - 1 };
        // MAJ chain: after stage i the ancilla wire A_i holds the carry
        // into bit i + 1.
        for i in 0..n {
            let a = n + i;
            c.append(Gate::cx(a, i))?;
            c.append(Gate::cx(a, carry_in(i)))?;
            c.append(Gate::mcx(vec![carry_in(i), i], a))?;
        }
        // No carry-out extraction: dropping it is the mod-2^n reduction.
        // UMA chain restores A and the carry ancilla, writing sum bits into D.
        for i in (0..n).rev() {
            let a = n + i;
            c.append(Gate::mcx(vec![carry_in(i), i], a))?;
            c.append(Gate::cx(a, carry_in(i)))?;
            c.append(Gate::cx(carry_in(i), i))?;
        }
    }
    c.add_section("adder", SectionKind::Interior, start, c.gate_count());
    Ok(())
}

/// Plain controlled-shift block (modular addition `D <- D + A`), without
/// the data-side reversal layer.
pub fn build_select_l(variant: SelectVariant, n: usize) -> Result<Circuit> {
    check_n(n)?;
    let mut c = select_shell(variant, n)?;
    match variant {
        SelectVariant::DirectRecursive => append_direct_blocks(&mut c, n)?,
        SelectVariant::CompiledBitwise => append_compiled_blocks(&mut c, n)?,
        SelectVariant::QftAdder => append_qft_adder(&mut c, n)?,
        SelectVariant::RippleCarry => append_ripple_adder(&mut c, n)?,
    }
    Ok(c)
}

/// Reflected controlled-shift block: the data-side reversal layer followed
/// by the controlled block shifts.
pub fn build_select(variant: SelectVariant, n: usize) -> Result<Circuit> {
    check_n(n)?;
    let mut c = select_shell(variant, n)?;
    append_reversal_layer(&mut c, n)?;
    match variant {
        SelectVariant::DirectRecursive => append_direct_blocks(&mut c, n)?,
        SelectVariant::CompiledBitwise => append_compiled_blocks(&mut c, n)?,
        SelectVariant::QftAdder => append_qft_adder(&mut c, n)?,
        SelectVariant::RippleCarry => append_ripple_adder(&mut c, n)?,
    }
    Ok(c)
}

pub fn build_select_direct(n: usize) -> Result<Circuit> {
    build_select(SelectVariant::DirectRecursive, n)
}

pub fn build_select_compiled(n: usize) -> Result<Circuit> {
    build_select(SelectVariant::CompiledBitwise, n)
}

pub fn build_select_qft(n: usize) -> Result<Circuit> {
    build_select(SelectVariant::QftAdder, n)
}

pub fn build_select_ripple(n: usize) -> Result<Circuit> {
    build_select(SelectVariant::RippleCarry, n)
}

/// Uniform-state preparation: a Hadamard on every wire. Self-inverse.
pub fn build_prep_uniform(n: usize) -> Result<Circuit> {
    check_n(n)?;
    let mut c = Circuit::new(n)?;
    for q in 0..n {
        c.append(Gate::h(q))?;
    }
    Ok(c)
}

#[derive(Clone, Copy)]
enum RotationAxis {
    Y,
    Z,
}

/// Builder for exact amplitude/phase preparation over the {H, PHASE, MCX}
/// gate set. Rotations are realized up to known global phases which are
/// accumulated and cancelled by a final phase gadget, so the finished
/// circuit maps |0..0> to the target state exactly, phase included.
struct PrepBuilder {
    circuit: Circuit,
    owed_phase: f64,
}

impl PrepBuilder {
    fn new(n: usize) -> Result<Self> {
        Ok(PrepBuilder { circuit: Circuit::new(n)?, owed_phase: 0.0 })
    }

    fn rotate(&mut self, axis: RotationAxis, target: usize, theta: f64) -> Result<()> {
        if theta.abs() < 1e-14 {
            return Ok(());
        }
        match axis {
            RotationAxis::Y => {
                // P(pi/2) H P(theta) H P(-pi/2) realizes Ry(theta) up to
                // the phase exp(i theta / 2).
                self.circuit.append(Gate::phase(target, -PI / 2.0))?;
                self.circuit.append(Gate::h(target))?;
                self.circuit.append(Gate::phase(target, theta))?;
                self.circuit.append(Gate::h(target))?;
                self.circuit.append(Gate::phase(target, PI / 2.0))?;
            }
            RotationAxis::Z => {
                self.circuit.append(Gate::phase(target, theta))?;
            }
        }
        self.owed_phase -= theta / 2.0;
        Ok(())
    }

    /// Uniformly controlled rotation: applies the rotation with
    /// `angles[p]` when the control wires (bit i of p is `controls[i]`)
    /// read p. Demultiplexed into CNOTs and single-qubit rotations.
    fn uc_rotation(
        &mut self,
        controls: &[usize],
        target: usize,
        angles: &[f64],
        axis: RotationAxis,
    ) -> Result<()> {
        debug_assert_eq!(angles.len(), 1 << controls.len());
        if angles.iter().all(|a| a.abs() < 1e-14) {
            return Ok(());
        }
        let Some((&top, rest)) = controls.split_last() else {
            return self.rotate(axis, target, angles[0]);
        };
        let half = angles.len() / 2;
        let sums: Vec<f64> = (0..half).map(|p| (angles[p] + angles[p + half]) / 2.0).collect();
        let diffs: Vec<f64> = (0..half).map(|p| (angles[p] - angles[p + half]) / 2.0).collect();
        if diffs.iter().all(|a| a.abs() < 1e-14) {
            return self.uc_rotation(rest, target, &sums, axis);
        }
        self.uc_rotation(rest, target, &sums, axis)?;
        self.circuit.append(Gate::cx(top, target))?;
        self.uc_rotation(rest, target, &diffs, axis)?;
        self.circuit.append(Gate::cx(top, target))?;
        Ok(())
    }

    /// Diagonal phase pattern over the given wires (bit i of the pattern
    /// index is `qubits[i]`).
    fn diagonal(&mut self, qubits: &[usize], phases: &[f64]) -> Result<()> {
        let Some((&target, rest)) = qubits.split_first() else {
            self.owed_phase += phases[0];
            return Ok(());
        };
        let half = phases.len() / 2;
        let mut deltas = Vec::with_capacity(half);
        let mut means = Vec::with_capacity(half);
        for m in 0..half {
            deltas.push(phases[2 * m + 1] - phases[2 * m]);
            means.push((phases[2 * m] + phases[2 * m + 1]) / 2.0);
        }
        self.uc_rotation(rest, target, &deltas, RotationAxis::Z)?;
        self.diagonal(rest, &means)
    }

    fn finish(mut self) -> Result<Circuit> {
        let phi = crate::circuit::wrap_angle(self.owed_phase);
        if phi.abs() > 1e-14 {
            // Global phase gadget: P then X-conjugated P covers both
            // branches of wire 0.
            self.circuit.append(Gate::phase(0, phi))?;
            self.circuit.append(Gate::x(0))?;
            self.circuit.append(Gate::phase(0, phi))?;
            self.circuit.append(Gate::x(0))?;
        }
        Ok(self.circuit)
    }
}

/// State preparation via the binary tree of uniformly controlled rotations:
/// amplitude magnitudes first (one multiplexed Y rotation per wire, most
/// significant wire first), then the phase diagonal. The resulting circuit
/// sends |0..0> to `b` exactly.
pub fn build_prep_state(b: &CVector) -> Result<Circuit> {
    let n = qubit_count(b.len())?;
    check_n(n)?;
    ensure_unit_norm(b)?;

    let mut builder = PrepBuilder::new(n)?;
    let probs: Vec<f64> = b.iter().map(|z| z.norm_sqr()).collect();

    for j in (0..n).rev() {
        let controls: Vec<usize> = (j + 1..n).collect();
        let mut angles = vec![0.0; 1 << controls.len()];
        for (p, angle) in angles.iter_mut().enumerate() {
            let base = p << (j + 1);
            let mut w0 = 0.0;
            let mut w1 = 0.0;
            for low in 0..1usize << j {
                w0 += probs[base | low];
                w1 += probs[base | (1 << j) | low];
            }
            if w0 + w1 > 0.0 {
                *angle = 2.0 * w1.sqrt().atan2(w0.sqrt());
            }
        }
        builder.uc_rotation(&controls, j, &angles, RotationAxis::Y)?;
    }

    let phases: Vec<f64> = b
        .iter()
        .map(|z| if z.norm() > 1e-15 { z.arg() } else { 0.0 })
        .collect();
    if phases.iter().any(|p| p.abs() > 1e-15) {
        builder.diagonal(&(0..n).collect::<Vec<_>>(), &phases)?;
    }
    builder.finish()
}

/// Full asymmetric-LCU convolution pipeline: optional kernel preparation on
/// the ancilla register, the reflected SELECT block of the chosen variant,
/// and the uniform-state uncompute (a Hadamard layer) on the ancilla.
///
/// In `SuppliedState` mode the kernel state is expected to be injected into
/// the ancilla register by the caller and the circuit contains no
/// preparation block.
pub fn build_lcu_pipeline(
    variant: SelectVariant,
    n: usize,
    mode: PipelineMode,
) -> Result<Circuit> {
    check_n(n)?;
    let mut c = select_shell(variant, n)?;

    if let PipelineMode::OracleKernel(b) = &mode {
        if b.len() != 1 << n {
            return Err(Error::DimensionMismatch { left: b.len(), right: 1 << n });
        }
        let prep = build_prep_state(b)?;
        let start = c.gate_count();
        let map: Vec<usize> = (n..2 * n).collect();
        c.append_remapped(&prep, &map)?;
        c.add_section("prep_b", SectionKind::Global, start, c.gate_count());
    }

    let select = build_select(variant, n)?;
    let map: Vec<usize> = (0..select.width()).collect();
    c.append_remapped(&select, &map)?;

    let start = c.gate_count();
    for q in n..2 * n {
        c.append(Gate::h(q))?;
    }
    c.add_section("prep_u_dag", SectionKind::Global, start, c.gate_count());
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::GateKind;
    use crate::linalg::{max_norm_diff, random_complex_vector, CMatrix, ONE, ZERO};
    use crate::shift_algebra::{reflected_shift, reversal_matrix, shift_matrix};
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Oracle assembly of the reflected SELECT block from the dense shifts.
    fn select_reflected_oracle(n: usize) -> CMatrix {
        let dim = 1 << n;
        let mut out = CMatrix::zeros(dim * dim, dim * dim);
        for i in 0..dim {
            let mut proj = CMatrix::zeros(dim, dim);
            proj[(i, i)] = ONE;
            out += proj.kronecker(&reflected_shift(i as u64, n).unwrap());
        }
        out
    }

    fn select_plain_oracle(n: usize) -> CMatrix {
        let dim = 1 << n;
        let mut out = CMatrix::zeros(dim * dim, dim * dim);
        for i in 0..dim {
            let mut proj = CMatrix::zeros(dim, dim);
            proj[(i, i)] = ONE;
            out += proj.kronecker(&shift_matrix(i as u64, n).unwrap());
        }
        out
    }

    /// Restrict a (2n+1)-wide unitary to the carry-zero sector.
    fn carry_zero_sector(u: &CMatrix, n: usize) -> CMatrix {
        let dim = 1 << (2 * n);
        CMatrix::from_fn(dim, dim, |r, c| u[(r, c)])
    }

    fn select_matrix(variant: SelectVariant, n: usize) -> CMatrix {
        let u = build_select(variant, n).unwrap().unitary_of().unwrap();
        if variant == SelectVariant::RippleCarry {
            carry_zero_sector(&u, n)
        } else {
            u
        }
    }

    #[test]
    fn direct_single_qubit_matrix() {
        // CX(control A0, target D0) composed after X on D0.
        let u = build_select_direct(1).unwrap().unitary_of().unwrap();
        let mut cx = Circuit::new(2).unwrap();
        cx.append(Gate::cx(1, 0)).unwrap();
        let mut xd = Circuit::new(2).unwrap();
        xd.append(Gate::x(0)).unwrap();
        let expect = cx.unitary_of().unwrap() * xd.unitary_of().unwrap();
        assert!(max_norm_diff(&u, &expect) < 1e-15);
        assert!(max_norm_diff(&u, &select_reflected_oracle(1)) < 1e-15);
    }

    #[test]
    fn direct_two_qubit_basis_action() {
        // |i=2>|k=1> maps to |2> L~_{2,2}|1> = |2>|0>.
        let u = build_select_direct(2).unwrap().unitary_of().unwrap();
        let col = 2 * 4 + 1;
        let row = 2 * 4;
        assert_eq!(u[(row, col)], ONE);
    }

    #[test]
    fn direct_matches_oracle_assembly() {
        for n in 1..=3 {
            let u = build_select_direct(n).unwrap().unitary_of().unwrap();
            assert!(
                max_norm_diff(&u, &select_reflected_oracle(n)) <= 1e-12,
                "n={n}"
            );
        }
    }

    #[test]
    fn compiled_equals_direct() {
        for n in 1..=4 {
            let a = build_select_compiled(n).unwrap().unitary_of().unwrap();
            let b = build_select_direct(n).unwrap().unitary_of().unwrap();
            assert!(max_norm_diff(&a, &b) <= 1e-12, "n={n}");
        }
    }

    #[test]
    fn compiled_block_is_controlled_increment() {
        // Block m = 0 alone for n = 3, on |c=1>|x=7>: data becomes 0.
        let mut c = Circuit::new(4).unwrap();
        let a = 3;
        for j in (1..3).rev() {
            let mut controls = vec![a];
            controls.extend(0..j);
            c.append(Gate::mcx(controls, j)).unwrap();
        }
        c.append(Gate::cx(a, 0)).unwrap();
        let u = c.unitary_of().unwrap();
        let col = (1 << 3) | 7;
        let row = 1 << 3;
        assert_eq!(u[(row, col)], ONE, "7 + 1 wraps to 0");
        // And on x = 3: carries stop at bit 2, giving 4.
        let col = (1 << 3) | 3;
        let row = (1 << 3) | 4;
        assert_eq!(u[(row, col)], ONE);
    }

    #[test]
    fn qft_block_matches_dft_matrix() {
        for n in 1..=4usize {
            let dim = 1 << n;
            let f = build_qft(n).unwrap().unitary_of().unwrap();
            let w = 2.0 * PI / dim as f64;
            let dft = CMatrix::from_fn(dim, dim, |t, k| {
                Complex64::from_polar(1.0 / (dim as f64).sqrt(), w * (t * k) as f64)
            });
            assert!(max_norm_diff(&f, &dft) <= 1e-12, "n={n}");
        }
    }

    #[test]
    fn qft_phase_network_single_qubit() {
        // The middle block for n = 1 is one CPHASE(pi): on |1>_A |1>_D the
        // phase is -1.
        let c = build_select_l(SelectVariant::QftAdder, 1).unwrap();
        let phases: Vec<&Gate> = c
            .gates()
            .iter()
            .filter(|g| matches!(g.kind, GateKind::CPhase(_)))
            .collect();
        assert_eq!(phases.len(), 1);
        match phases[0].kind {
            GateKind::CPhase(t) => assert!((t - PI).abs() < 1e-15),
            _ => unreachable!(),
        }
    }

    #[test]
    fn qft_adder_basis_action() {
        // SELECT_L part only: |i=1>|k=3> -> |1>|0> for n = 2.
        let u = build_select_l(SelectVariant::QftAdder, 2)
            .unwrap()
            .unitary_of()
            .unwrap();
        let col = (1 << 2) | 3;
        let row = 1 << 2;
        assert!((u[(row, col)] - ONE).norm() < 1e-12);
    }

    #[test]
    fn qft_select_matches_direct() {
        for n in 1..=3 {
            let a = build_select_qft(n).unwrap().unitary_of().unwrap();
            let b = build_select_direct(n).unwrap().unitary_of().unwrap();
            assert!(max_norm_diff(&a, &b) <= 1e-10, "n={n}");
        }
    }

    #[test]
    fn ripple_single_qubit_adder_is_cx() {
        let c = build_select_l(SelectVariant::RippleCarry, 1).unwrap();
        assert_eq!(c.gate_count(), 1);
        assert_eq!(c.gates()[0], Gate::cx(1, 0));
    }

    #[test]
    fn ripple_sector_matches_direct() {
        for n in 1..=3 {
            let sector = select_matrix(SelectVariant::RippleCarry, n);
            let direct = build_select_direct(n).unwrap().unitary_of().unwrap();
            assert!(max_norm_diff(&sector, &direct) <= 1e-12, "n={n}");
        }
    }

    #[test]
    fn ripple_adder_adds_classically_and_restores_carry() {
        // All 64 basis pairs for n = 3: adder part only.
        let n = 3;
        let u = build_select_l(SelectVariant::RippleCarry, n)
            .unwrap()
            .unitary_of()
            .unwrap();
        let dim = 1 << n;
        for i in 0..dim {
            for k in 0..dim {
                let col = (i << n) | k;
                let row = (i << n) | ((k + i) % dim);
                assert_eq!(u[(row, col)], ONE, "i={i} k={k}");
            }
        }
    }

    #[test]
    fn ripple_preserves_carry_zero_sector() {
        // Every carry-|0> basis state maps to a carry-|0> state.
        let n = 3;
        let u = build_select(SelectVariant::RippleCarry, n)
            .unwrap()
            .unitary_of()
            .unwrap();
        let sector = 1 << (2 * n);
        for col in 0..sector {
            for row in sector..(2 * sector) {
                assert_eq!(u[(row, col)], ZERO, "col={col} row={row}");
            }
        }
    }

    #[test]
    fn four_way_equivalence_small() {
        for n in 1..=3 {
            let reference = select_matrix(SelectVariant::DirectRecursive, n);
            for variant in SelectVariant::ALL {
                let u = select_matrix(variant, n);
                assert!(
                    max_norm_diff(&u, &reference) <= 1e-10,
                    "variant {} n={n}",
                    variant.name()
                );
            }
        }
    }

    #[test]
    fn bridge_identity() {
        // SELECT_L followed by the data-side reversal equals the reflected
        // block, for the two adder-backed variants.
        for variant in [SelectVariant::QftAdder, SelectVariant::RippleCarry] {
            for n in 1..=3usize {
                let plain = build_select_l(variant, n).unwrap().unitary_of().unwrap();
                let width = 2 * n + variant.carry_qubits();
                let mut j_embed = Circuit::new(width).unwrap();
                for q in 0..n {
                    j_embed.append(Gate::x(q)).unwrap();
                }
                let bridge = plain * j_embed.unitary_of().unwrap();
                let reflected = build_select(variant, n).unwrap().unitary_of().unwrap();
                assert!(
                    max_norm_diff(&bridge, &reflected) <= 1e-12,
                    "variant {} n={n}",
                    variant.name()
                );
            }
        }
    }

    #[test]
    fn basis_action_law_all_variants() {
        // SELECT_L |i>|k> = |i>|k+i mod N> for every basis pair.
        for variant in SelectVariant::ALL {
            for n in 1..=3usize {
                let u = build_select_l(variant, n).unwrap().unitary_of().unwrap();
                let sector = if variant.carry_qubits() > 0 {
                    carry_zero_sector(&u, n)
                } else {
                    u
                };
                assert!(
                    max_norm_diff(&sector, &select_plain_oracle(n)) <= 1e-10,
                    "variant {} n={n}",
                    variant.name()
                );
            }
        }
    }

    #[test]
    fn binary_shift_decomposition() {
        // Product of power-of-two block shifts selected by the bits of i
        // equals the shift by i.
        for n in 1..=4usize {
            let dim = 1u64 << n;
            for i in 0..dim {
                let mut prod = CMatrix::identity(dim as usize, dim as usize);
                for m in 0..n {
                    if (i >> m) & 1 == 1 {
                        prod = shift_matrix(1 << m, n).unwrap() * prod;
                    }
                }
                assert_eq!(
                    max_norm_diff(&prod, &shift_matrix(i, n).unwrap()),
                    0.0,
                    "n={n} i={i}"
                );
            }
        }
    }

    #[test]
    fn prep_uniform_gives_flat_amplitudes() {
        for n in 1..=4usize {
            let dim = 1 << n;
            let u = build_prep_uniform(n).unwrap().unitary_of().unwrap();
            let expect = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
            for r in 0..dim {
                assert!((u[(r, 0)] - expect).norm() < 1e-14, "n={n}");
            }
        }
    }

    #[test]
    fn prep_state_trivial_kernel_is_empty() {
        let b = CVector::from_vec(vec![ONE, ZERO]);
        let c = build_prep_state(&b).unwrap();
        assert_eq!(c.gate_count(), 0);
    }

    #[test]
    fn prep_state_balanced_pair_matches_hadamard_column() {
        let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let b = CVector::from_vec(vec![s, s]);
        let u = build_prep_state(&b).unwrap().unitary_of().unwrap();
        assert!((u[(0, 0)] - s).norm() < 1e-12);
        assert!((u[(1, 0)] - s).norm() < 1e-12);
    }

    #[test]
    fn prep_state_random_kernels_exact_with_phase() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for n in 1..=4usize {
            let dim = 1 << n;
            let b = crate::linalg::normalized(&random_complex_vector(&mut rng, dim)).unwrap();
            let u = build_prep_state(&b).unwrap().unitary_of().unwrap();
            for r in 0..dim {
                assert!((u[(r, 0)] - b[r]).norm() <= 1e-10, "n={n} r={r}");
            }
        }
    }

    #[test]
    fn prep_state_rejects_unnormalized() {
        let b = CVector::from_vec(vec![ONE, ONE]);
        assert!(matches!(
            build_prep_state(&b),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn supplied_state_pipeline_has_no_prep_block() {
        let c = build_lcu_pipeline(SelectVariant::CompiledBitwise, 3, PipelineMode::SuppliedState)
            .unwrap();
        assert!(c.sections().iter().all(|s| s.label != "prep_b"));
        // The first gates are the data-side reversal layer.
        assert_eq!(c.sections()[0].label, "j_layer");
        assert_eq!(c.sections()[0].start, 0);
    }

    #[test]
    fn pipeline_layout_matches_spec() {
        let b = crate::shift_algebra::uniform_kernel(8);
        let c = build_lcu_pipeline(SelectVariant::RippleCarry, 3, PipelineMode::OracleKernel(b))
            .unwrap();
        assert_eq!(c.width(), 7);
        assert_eq!(c.register("data"), Some((0, 3)));
        assert_eq!(c.register("ancilla_index"), Some((3, 6)));
        assert_eq!(c.register("carry"), Some((6, 7)));
        assert_eq!(c.sections()[0].label, "prep_b");
    }

    #[test]
    fn reversal_layer_matches_oracle() {
        let mut c = Circuit::new(3).unwrap();
        append_reversal_layer(&mut c, 3).unwrap();
        let u = c.unitary_of().unwrap();
        assert_eq!(max_norm_diff(&u, &reversal_matrix(3).unwrap()), 0.0);
    }

    #[test]
    fn synthesis_range_checks() {
        assert!(matches!(build_select_direct(0), Err(Error::InvalidDimension(_))));
        assert!(matches!(build_select_direct(7), Err(Error::Capacity(_))));
    }
}
