//! Minimal gate-level circuit representation.
//!
//! A [`Circuit`] is an ordered gate list over a fixed qubit layout. Gate
//! order is application order: the first gate in the list acts first on the
//! state. The gate set is deliberately small (X, H, SWAP, PHASE, CPHASE,
//! multi-controlled X); it covers every construction in this crate.
//!
//! Named register spans record the qubit layout, and optional gate-range
//! sections record which synthesis sub-block emitted each gate so that
//! resource counts can be broken down per block.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, ONE};

/// Dense unitary extraction is capped at this circuit width.
pub const UNITARY_MAX_WIDTH: usize = 12;

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Wrap an angle into the canonical interval (-pi, pi].
pub fn wrap_angle(theta: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut t = theta % two_pi;
    if t <= -PI {
        t += two_pi;
    } else if t > PI {
        t -= two_pi;
    }
    t
}

#[derive(Debug, Clone, PartialEq)]
pub enum GateKind {
    X,
    H,
    Swap,
    Phase(f64),
    CPhase(f64),
    Mcx,
}

impl GateKind {
    pub fn name(&self) -> &'static str {
        match self {
            GateKind::X => "X",
            GateKind::H => "H",
            GateKind::Swap => "SWAP",
            GateKind::Phase(_) => "PHASE",
            GateKind::CPhase(_) => "CPHASE",
            GateKind::Mcx => "MCX",
        }
    }
}

/// One primitive operation. For `Swap` the single `controls` entry is the
/// partner qubit; for `CPhase` it is the control; `Mcx` carries any number
/// of controls (zero controls is a plain X and is normalized to that).
#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    pub target: usize,
    pub controls: Vec<usize>,
}

impl Gate {
    pub fn x(target: usize) -> Self {
        Gate { kind: GateKind::X, target, controls: vec![] }
    }

    pub fn h(target: usize) -> Self {
        Gate { kind: GateKind::H, target, controls: vec![] }
    }

    pub fn swap(a: usize, b: usize) -> Self {
        Gate { kind: GateKind::Swap, target: a, controls: vec![b] }
    }

    pub fn phase(target: usize, theta: f64) -> Self {
        Gate { kind: GateKind::Phase(wrap_angle(theta)), target, controls: vec![] }
    }

    pub fn cphase(control: usize, target: usize, theta: f64) -> Self {
        Gate { kind: GateKind::CPhase(wrap_angle(theta)), target, controls: vec![control] }
    }

    pub fn mcx(controls: Vec<usize>, target: usize) -> Self {
        if controls.is_empty() {
            Gate::x(target)
        } else {
            Gate { kind: GateKind::Mcx, target, controls }
        }
    }

    pub fn cx(control: usize, target: usize) -> Self {
        Gate::mcx(vec![control], target)
    }

    /// Gate-wise inverse: self-inverse for all kinds except the phases.
    pub fn inverse(&self) -> Gate {
        let mut g = self.clone();
        g.kind = match g.kind {
            GateKind::Phase(t) => GateKind::Phase(wrap_angle(-t)),
            GateKind::CPhase(t) => GateKind::CPhase(wrap_angle(-t)),
            other => other,
        };
        g
    }

    fn validate(&self, width: usize) -> Result<()> {
        if self.target >= width {
            return Err(Error::IndexOutOfRange { index: self.target, width });
        }
        for &c in &self.controls {
            if c >= width {
                return Err(Error::IndexOutOfRange { index: c, width });
            }
            if c == self.target {
                return Err(Error::InvalidGate(format!(
                    "target {} also appears in the control list",
                    self.target
                )));
            }
        }
        let mut sorted = self.controls.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != self.controls.len() {
            return Err(Error::InvalidGate("duplicate control qubits".into()));
        }
        let arity_ok = match self.kind {
            GateKind::X | GateKind::H | GateKind::Phase(_) => self.controls.is_empty(),
            GateKind::Swap | GateKind::CPhase(_) => self.controls.len() == 1,
            GateKind::Mcx => !self.controls.is_empty(),
        };
        if !arity_ok {
            return Err(Error::InvalidGate(format!(
                "{} does not take {} auxiliary qubits",
                self.kind.name(),
                self.controls.len()
            )));
        }
        if let GateKind::Phase(t) | GateKind::CPhase(t) = self.kind {
            if !t.is_finite() {
                return Err(Error::InvalidGate("non-finite phase angle".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegisterSpan {
    pub name: String,
    pub lo: usize,
    pub hi: usize,
}

/// Whether a section belongs to the SELECT interior (ancilla-controlled
/// sub-blocks) or is a global layer such as the trailing reversal or the
/// state-preparation stages. Scaling fits use interior counts only.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SectionKind {
    Interior,
    Global,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Section {
    pub label: String,
    pub kind: SectionKind,
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    width: usize,
    gates: Vec<Gate>,
    registers: Vec<RegisterSpan>,
    sections: Vec<Section>,
}

impl Circuit {
    pub fn new(width: usize) -> Result<Self> {
        if width == 0 {
            return Err(Error::InvalidDimension("circuit width must be positive".into()));
        }
        Ok(Circuit { width, gates: vec![], registers: vec![], sections: vec![] })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }

    pub fn sections(&self) -> &[Section] {
        &self.sections
    }

    pub fn registers(&self) -> &[RegisterSpan] {
        &self.registers
    }

    pub fn register(&self, name: &str) -> Option<(usize, usize)> {
        self.registers.iter().find(|r| r.name == name).map(|r| (r.lo, r.hi))
    }

    pub fn add_register(&mut self, name: &str, lo: usize, hi: usize) -> Result<()> {
        if lo >= hi || hi > self.width {
            return Err(Error::InvalidDimension(format!(
                "register {name} span [{lo}, {hi}) invalid for width {}",
                self.width
            )));
        }
        for r in &self.registers {
            if lo < r.hi && r.lo < hi {
                return Err(Error::InvalidDimension(format!(
                    "register {name} overlaps register {}",
                    r.name
                )));
            }
        }
        self.registers.push(RegisterSpan { name: name.to_string(), lo, hi });
        Ok(())
    }

    /// Append a gate; order of appends is application order.
    pub fn append(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.width)?;
        self.gates.push(gate);
        Ok(())
    }

    /// Record that gates `[start, end)` were emitted by one named block.
    pub fn add_section(&mut self, label: &str, kind: SectionKind, start: usize, end: usize) {
        assert!(start <= end && end <= self.gates.len(), "section out of range");
        self.sections.push(Section { label: label.to_string(), kind, start, end });
    }

    /// Append all gates of `other`, remapping qubit `q` to `map[q]`.
    /// Sections of `other` are carried over (shifted); registers are not.
    pub fn append_remapped(&mut self, other: &Circuit, map: &[usize]) -> Result<()> {
        if map.len() != other.width {
            return Err(Error::DimensionMismatch { left: map.len(), right: other.width });
        }
        let offset = self.gates.len();
        for gate in &other.gates {
            let mut g = gate.clone();
            g.target = map[g.target];
            for c in &mut g.controls {
                *c = map[*c];
            }
            self.append(g)?;
        }
        for s in &other.sections {
            self.sections.push(Section {
                label: s.label.clone(),
                kind: s.kind,
                start: s.start + offset,
                end: s.end + offset,
            });
        }
        Ok(())
    }

    /// Concatenate two circuits of equal width and identical register maps.
    pub fn compose(&self, other: &Circuit) -> Result<Circuit> {
        if self.width != other.width {
            return Err(Error::DimensionMismatch { left: self.width, right: other.width });
        }
        if self.registers != other.registers {
            return Err(Error::InvalidDimension("register maps differ".into()));
        }
        let mut out = self.clone();
        let offset = out.gates.len();
        out.gates.extend(other.gates.iter().cloned());
        for s in &other.sections {
            out.sections.push(Section {
                label: s.label.clone(),
                kind: s.kind,
                start: s.start + offset,
                end: s.end + offset,
            });
        }
        Ok(out)
    }

    /// Gate-wise inverse in reverse order. Sections are dropped.
    pub fn inverse(&self) -> Circuit {
        Circuit {
            width: self.width,
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
            registers: self.registers.clone(),
            sections: vec![],
        }
    }

    /// Dense unitary of the whole circuit, gates multiplied in application
    /// order (first gate rightmost).
    pub fn unitary_of(&self) -> Result<CMatrix> {
        if self.width > UNITARY_MAX_WIDTH {
            return Err(Error::Capacity(format!(
                "dense unitary extraction capped at width {UNITARY_MAX_WIDTH}, circuit has {}",
                self.width
            )));
        }
        let dim = 1usize << self.width;
        let mut out = CMatrix::zeros(dim, dim);
        let mut column = vec![Complex64::default(); dim];
        for k in 0..dim {
            column.iter_mut().for_each(|z| *z = Complex64::default());
            column[k] = ONE;
            for gate in &self.gates {
                apply_gate(gate, &mut column);
            }
            for (r, z) in column.iter().enumerate() {
                out[(r, k)] = *z;
            }
        }
        Ok(out)
    }

    /// Serialize to the line-oriented circuit text format.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "QUBITS {}", self.width).unwrap();
        for r in &self.registers {
            writeln!(s, "REG {} {} {}", r.name, r.lo, r.hi).unwrap();
        }
        for g in &self.gates {
            let controls = g
                .controls
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(",");
            let param = match g.kind {
                GateKind::Phase(t) | GateKind::CPhase(t) => format!("{t}"),
                _ => "-".to_string(),
            };
            writeln!(s, "GATE {} t={} c=[{}] p={}", g.kind.name(), g.target, controls, param)
                .unwrap();
        }
        s
    }

    /// Parse the circuit text format; errors carry 1-based line numbers.
    pub fn from_text(text: &str) -> Result<Circuit> {
        let mut circuit: Option<Circuit> = None;
        let mut seen_gate = false;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| Error::Parse { line: line_no, message };
            let mut parts = line.split_whitespace();
            match parts.next() {
                Some("QUBITS") => {
                    if circuit.is_some() {
                        return Err(err("duplicate QUBITS header".into()));
                    }
                    let width: usize = parts
                        .next()
                        .ok_or_else(|| err("missing width".into()))?
                        .parse()
                        .map_err(|e| err(format!("bad width: {e}")))?;
                    circuit = Some(Circuit::new(width).map_err(|e| err(e.to_string()))?);
                }
                Some("REG") => {
                    let c = circuit
                        .as_mut()
                        .ok_or_else(|| err("REG before QUBITS header".into()))?;
                    if seen_gate {
                        return Err(err("REG after first GATE".into()));
                    }
                    let name = parts.next().ok_or_else(|| err("missing register name".into()))?;
                    let lo: usize = parts
                        .next()
                        .ok_or_else(|| err("missing register lo".into()))?
                        .parse()
                        .map_err(|e| err(format!("bad lo: {e}")))?;
                    let hi: usize = parts
                        .next()
                        .ok_or_else(|| err("missing register hi".into()))?
                        .parse()
                        .map_err(|e| err(format!("bad hi: {e}")))?;
                    c.add_register(name, lo, hi).map_err(|e| err(e.to_string()))?;
                }
                Some("GATE") => {
                    let c = circuit
                        .as_mut()
                        .ok_or_else(|| err("GATE before QUBITS header".into()))?;
                    seen_gate = true;
                    let kind = parts.next().ok_or_else(|| err("missing gate kind".into()))?;
                    let t_field = parts.next().ok_or_else(|| err("missing t= field".into()))?;
                    let c_field = parts.next().ok_or_else(|| err("missing c= field".into()))?;
                    let p_field = parts.next().ok_or_else(|| err("missing p= field".into()))?;
                    let target: usize = t_field
                        .strip_prefix("t=")
                        .ok_or_else(|| err(format!("expected t=<target>, got {t_field}")))?
                        .parse()
                        .map_err(|e| err(format!("bad target: {e}")))?;
                    let controls_text = c_field
                        .strip_prefix("c=[")
                        .and_then(|s| s.strip_suffix(']'))
                        .ok_or_else(|| err(format!("expected c=[..], got {c_field}")))?;
                    let controls: Vec<usize> = if controls_text.is_empty() {
                        vec![]
                    } else {
                        controls_text
                            .split(',')
                            .map(|s| s.parse().map_err(|e| err(format!("bad control: {e}"))))
                            .collect::<Result<_>>()?
                    };
                    let param = p_field
                        .strip_prefix("p=")
                        .ok_or_else(|| err(format!("expected p=<angle|->, got {p_field}")))?;
                    let theta = || -> Result<f64> {
                        param.parse().map_err(|e| err(format!("bad angle: {e}")))
                    };
                    let gate = match kind {
                        "X" => Gate::x(target),
                        "H" => Gate::h(target),
                        "SWAP" => {
                            let partner = *controls.first().ok_or_else(|| {
                                err("SWAP requires one partner qubit".into())
                            })?;
                            Gate::swap(target, partner)
                        }
                        "PHASE" => Gate::phase(target, theta()?),
                        "CPHASE" => {
                            let control = *controls.first().ok_or_else(|| {
                                err("CPHASE requires one control".into())
                            })?;
                            Gate::cphase(control, target, theta()?)
                        }
                        "MCX" => Gate::mcx(controls, target),
                        other => return Err(err(format!("unknown gate kind {other}"))),
                    };
                    c.append(gate).map_err(|e| err(e.to_string()))?;
                }
                Some(other) => return Err(err(format!("unknown directive {other}"))),
                None => unreachable!(),
            }
        }
        circuit.ok_or(Error::Parse { line: 1, message: "missing QUBITS header".into() })
    }
}

/// In-place amplitude update for one gate. The amplitude slice length fixes
/// the width; no full gate matrix is ever constructed.
pub(crate) fn apply_gate(gate: &Gate, amps: &mut [Complex64]) {
    let dim = amps.len();
    let tbit = 1usize << gate.target;
    match gate.kind {
        GateKind::X => {
            for i in 0..dim {
                if i & tbit == 0 {
                    amps.swap(i, i | tbit);
                }
            }
        }
        GateKind::H => {
            let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
            for i in 0..dim {
                if i & tbit == 0 {
                    let a = amps[i];
                    let b = amps[i | tbit];
                    amps[i] = (a + b) * s;
                    amps[i | tbit] = (a - b) * s;
                }
            }
        }
        GateKind::Swap => {
            let obit = 1usize << gate.controls[0];
            for i in 0..dim {
                if i & tbit != 0 && i & obit == 0 {
                    amps.swap(i, i ^ tbit ^ obit);
                }
            }
        }
        GateKind::Phase(theta) => {
            let w = Complex64::from_polar(1.0, theta);
            for (i, amp) in amps.iter_mut().enumerate() {
                if i & tbit != 0 {
                    *amp *= w;
                }
            }
        }
        GateKind::CPhase(theta) => {
            let cbit = 1usize << gate.controls[0];
            let w = Complex64::from_polar(1.0, theta);
            for (i, amp) in amps.iter_mut().enumerate() {
                if i & tbit != 0 && i & cbit != 0 {
                    *amp *= w;
                }
            }
        }
        GateKind::Mcx => {
            let cmask: usize = gate.controls.iter().fold(0, |m, &c| m | (1 << c));
            for i in 0..dim {
                if i & cmask == cmask && i & tbit == 0 {
                    amps.swap(i, i | tbit);
                }
            }
        }
    }
}

/// CNOT-cost model for an r-controlled X: cost(0) = 0, cost(1) = 1,
/// cost(r >= 2) = alpha * r + beta. The defaults give the textbook Toffoli
/// count cost(2) = 6.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostModel {
    pub alpha: i64,
    pub beta: i64,
}

impl Default for CostModel {
    fn default() -> Self {
        CostModel { alpha: 6, beta: -6 }
    }
}

impl CostModel {
    pub fn mcx_cost(&self, controls: usize) -> u64 {
        match controls {
            0 => 0,
            1 => 1,
            r => {
                let cost = self.alpha * r as i64 + self.beta;
                assert!(cost >= 0, "cost model yields negative cost at r = {r}");
                cost as u64
            }
        }
    }
}

/// Per-section gate tallies.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GateTally {
    pub macro_blocks: u64,
    pub primitive_cnots: u64,
    pub phase_gates: u64,
    pub h_gates: u64,
    pub swap_gates: u64,
}

impl GateTally {
    pub fn add(&mut self, other: &GateTally) {
        self.macro_blocks += other.macro_blocks;
        self.primitive_cnots += other.primitive_cnots;
        self.phase_gates += other.phase_gates;
        self.h_gates += other.h_gates;
        self.swap_gates += other.swap_gates;
    }
}

/// Gate counts under a named cost model, with a per-block breakdown.
///
/// The flat fields are circuit totals; `per_block` holds the interior
/// (ancilla-controlled) sub-blocks and `global` the uncontrolled layers,
/// so totals always equal the sum of the two maps.
#[derive(Debug, Clone, PartialEq)]
pub struct ResourceReport {
    pub macro_blocks: u64,
    pub primitive_cnots: u64,
    pub phase_gates: u64,
    pub h_gates: u64,
    pub swap_gates: u64,
    pub per_block: BTreeMap<String, GateTally>,
    pub global: BTreeMap<String, GateTally>,
    pub model: CostModel,
}

impl ResourceReport {
    /// Sum over the interior (per-block) sections.
    pub fn interior(&self) -> GateTally {
        let mut t = GateTally::default();
        for v in self.per_block.values() {
            t.add(v);
        }
        t
    }

    pub fn global_total(&self) -> GateTally {
        let mut t = GateTally::default();
        for v in self.global.values() {
            t.add(v);
        }
        t
    }
}

fn tally_gate(gate: &Gate, model: &CostModel, tally: &mut GateTally) {
    match gate.kind {
        GateKind::X | GateKind::Mcx => {
            tally.macro_blocks += 1;
            tally.primitive_cnots += model.mcx_cost(gate.controls.len());
        }
        GateKind::Phase(_) | GateKind::CPhase(_) => tally.phase_gates += 1,
        GateKind::H => tally.h_gates += 1,
        GateKind::Swap => tally.swap_gates += 1,
    }
}

/// Count macro blocks (X/MCX instances) and primitive CNOTs under the given
/// cost model. Gates outside any recorded section land in an interior
/// bucket named `main`.
pub fn count_resources(circuit: &Circuit, model: &CostModel) -> ResourceReport {
    let mut per_block: BTreeMap<String, GateTally> = BTreeMap::new();
    let mut global: BTreeMap<String, GateTally> = BTreeMap::new();
    let mut totals = GateTally::default();

    for (idx, gate) in circuit.gates().iter().enumerate() {
        tally_gate(gate, model, &mut totals);
        let section = circuit
            .sections()
            .iter()
            .find(|s| s.start <= idx && idx < s.end);
        let (map, label) = match section {
            Some(s) => (
                if s.kind == SectionKind::Interior { &mut per_block } else { &mut global },
                s.label.clone(),
            ),
            None => (&mut per_block, "main".to_string()),
        };
        let entry = map.entry(label).or_default();
        tally_gate(gate, model, entry);
    }

    ResourceReport {
        macro_blocks: totals.macro_blocks,
        primitive_cnots: totals.primitive_cnots,
        phase_gates: totals.phase_gates,
        h_gates: totals.h_gates,
        swap_gates: totals.swap_gates,
        per_block,
        global,
        model: *model,
    }
}
