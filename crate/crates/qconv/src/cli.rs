//! Command-line plumbing: stable file formats, run manifests, verification
//! suites, and the subcommand implementations dispatched by the `qconv`
//! binary.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::circuit::{count_resources, Circuit, CostModel};
use crate::error::{Error, Result};
use crate::linalg::{
    max_norm_diff, normalized, random_complex_vector, random_real_vector, CMatrix, CVector,
};
use crate::pauli::{verify_support, SupportTarget};
use crate::resources::{count_variant, run_study, CountModel};
use crate::shift_algebra::{
    circular_convolve, delta_kernel, success_probability, symmetrized_operator, KernelSpec,
};
use crate::simulator::{convolve_quantum, convolve_quantum_supplied, verify_block_encoding};
use crate::spectral::{
    deconvolve_exact, deconvolve_polynomial, deconvolve_pseudo, spectrum, InverseRoute,
    SINGULARITY_REL_THRESHOLD,
};
use crate::synthesis::{build_select, build_select_l, SelectVariant};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_VERIFICATION: i32 = 3;
pub const EXIT_CAPACITY: i32 = 4;

pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Capacity(_) => EXIT_CAPACITY,
        Error::Verification(_) => EXIT_VERIFICATION,
        _ => EXIT_USAGE,
    }
}

/// Format with 12 significant digits (the printing precision used for all
/// console numbers).
pub fn format_g12(x: f64) -> String {
    format!("{x:.11e}")
}

// ---------------------------------------------------------------------
// Vector files
// ---------------------------------------------------------------------

/// Serialize a vector: a `dim=<2^n>` header, then one `<re> <im>` line per
/// entry in full double precision.
pub fn vector_to_text(v: &CVector) -> String {
    let mut s = String::new();
    writeln!(s, "dim={}", v.len()).unwrap();
    for z in v.iter() {
        writeln!(s, "{} {}", z.re, z.im).unwrap();
    }
    s
}

pub fn vector_from_text(text: &str) -> Result<CVector> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or(Error::Parse { line: 1, message: "empty vector file".into() })?;
    let dim: usize = header
        .trim()
        .strip_prefix("dim=")
        .ok_or(Error::Parse { line: 1, message: format!("expected dim=<2^n>, got {header:?}") })?
        .parse()
        .map_err(|e| Error::Parse { line: 1, message: format!("bad dimension: {e}") })?;
    if dim < 2 || !dim.is_power_of_two() {
        return Err(Error::Parse {
            line: 1,
            message: format!("dimension {dim} is not a power of two >= 2"),
        });
    }
    let mut entries = Vec::with_capacity(dim);
    for (idx, line) in lines {
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if entries.len() == dim {
            return Err(Error::Parse {
                line: line_no,
                message: format!("more than {dim} entries"),
            });
        }
        let mut parts = trimmed.split_whitespace();
        let re: f64 = parts
            .next()
            .ok_or(Error::Parse { line: line_no, message: "missing real part".into() })?
            .parse()
            .map_err(|e| Error::Parse { line: line_no, message: format!("bad real part: {e}") })?;
        let im: f64 = parts
            .next()
            .ok_or(Error::Parse { line: line_no, message: "missing imaginary part".into() })?
            .parse()
            .map_err(|e| Error::Parse {
                line: line_no,
                message: format!("bad imaginary part: {e}"),
            })?;
        if parts.next().is_some() {
            return Err(Error::Parse {
                line: line_no,
                message: "expected exactly two fields".into(),
            });
        }
        entries.push(Complex64::new(re, im));
    }
    if entries.len() != dim {
        return Err(Error::Parse {
            line: entries.len() + 2,
            message: format!("expected {dim} entries, found {}", entries.len()),
        });
    }
    Ok(CVector::from_vec(entries))
}

pub fn write_vector_file(path: &Path, v: &CVector) -> Result<()> {
    std::fs::write(path, vector_to_text(v))?;
    Ok(())
}

pub fn read_vector_file(path: &Path) -> Result<CVector> {
    let text = std::fs::read_to_string(path)?;
    vector_from_text(&text)
}

// ---------------------------------------------------------------------
// Run manifests
// ---------------------------------------------------------------------

/// Line-oriented `key: value` record of one subcommand run.
#[derive(Debug, Clone, Default)]
pub struct Manifest {
    entries: Vec<(String, String)>,
    failures: usize,
}

impl Manifest {
    pub fn new(subcommand: &str) -> Self {
        let mut m = Manifest::default();
        m.push("subcommand", subcommand);
        m
    }

    pub fn push(&mut self, key: &str, value: impl ToString) {
        self.entries.push((key.to_string(), value.to_string()));
    }

    pub fn tolerance(&mut self, check: &str, tol: f64) {
        self.push(&format!("tolerance.{check}"), format!("{tol:e}"));
    }

    pub fn check(&mut self, name: &str, pass: bool) {
        if !pass {
            self.failures += 1;
        }
        self.push(&format!("check.{name}"), if pass { "pass" } else { "fail" });
    }

    pub fn all_passed(&self) -> bool {
        self.failures == 0
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.entries {
            writeln!(s, "{k}: {v}").unwrap();
        }
        s
    }
}

// ---------------------------------------------------------------------
// Verification suites
// ---------------------------------------------------------------------

/// Supplies the reflected SELECT circuit per variant; the four-way
/// equivalence suite runs against it. Tests substitute tampered builders
/// to confirm the suite localizes faults.
pub type SelectProvider<'a> = &'a dyn Fn(SelectVariant, usize) -> Result<Circuit>;

fn shared_sector_unitary(circuit: &Circuit, n: usize, has_carry: bool) -> Result<CMatrix> {
    let u = circuit.unitary_of()?;
    if !has_carry {
        return Ok(u);
    }
    let dim = 1 << (2 * n);
    Ok(CMatrix::from_fn(dim, dim, |r, c| u[(r, c)]))
}

pub fn run_verify_suites(n_max: usize, seed: u64, provider: SelectProvider<'_>) -> Result<Manifest> {
    if n_max > 4 {
        return Err(Error::Capacity(format!(
            "verify is capped at n-max = 4, got {n_max}"
        )));
    }
    if n_max < 1 {
        return Err(Error::Data("n-max must be at least 1".into()));
    }
    let mut manifest = Manifest::new("verify");
    manifest.push("n_max", n_max);
    manifest.push("seed", seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Four-way unitary equality of the reflected SELECT block.
    let tol_four_way = 1e-10;
    manifest.tolerance("four_way_equivalence", tol_four_way);
    let mut four_way_ok = true;
    for n in 1..=n_max {
        let reference = shared_sector_unitary(
            &provider(SelectVariant::DirectRecursive, n)?,
            n,
            SelectVariant::DirectRecursive.carry_qubits() > 0,
        )?;
        for variant in SelectVariant::ALL {
            let u = shared_sector_unitary(
                &provider(variant, n)?,
                n,
                variant.carry_qubits() > 0,
            )?;
            if max_norm_diff(&u, &reference) > tol_four_way {
                four_way_ok = false;
            }
        }
    }
    manifest.check("four_way_equivalence", four_way_ok);

    // Bridge identity: SELECT_L then the data-side reversal equals the
    // reflected block (adder-backed variants, default builders).
    let tol_bridge = 1e-12;
    manifest.tolerance("bridge_identity", tol_bridge);
    let mut bridge_ok = true;
    for variant in [SelectVariant::QftAdder, SelectVariant::RippleCarry] {
        for n in 1..=n_max.min(3) {
            let width = 2 * n + variant.carry_qubits();
            let plain = build_select_l(variant, n)?.unitary_of()?;
            let mut j_embed = Circuit::new(width)?;
            for q in 0..n {
                j_embed.append(crate::circuit::Gate::x(q))?;
            }
            let bridged = plain * j_embed.unitary_of()?;
            let reflected = build_select(variant, n)?.unitary_of()?;
            if max_norm_diff(&bridged, &reflected) > tol_bridge {
                bridge_ok = false;
            }
        }
    }
    manifest.check("bridge_identity", bridge_ok);

    // Basis-action law of the plain adder block (ripple-carry builder).
    let tol_basis = 1e-12;
    manifest.tolerance("basis_action", tol_basis);
    let mut basis_ok = true;
    for n in 1..=n_max.min(3) {
        let circuit = build_select_l(SelectVariant::RippleCarry, n)?;
        let u = shared_sector_unitary(&circuit, n, true)?;
        let dim = 1usize << n;
        for i in 0..dim {
            for k in 0..dim {
                let col = (i << n) | k;
                let row = (i << n) | ((k + i) % dim);
                if (u[(row, col)] - Complex64::new(1.0, 0.0)).norm() > tol_basis {
                    basis_ok = false;
                }
            }
        }
    }
    manifest.check("basis_action", basis_ok);

    // Hermiticity of the symmetrized operator for real kernels.
    let tol_herm = 1e-12;
    manifest.tolerance("hermiticity", tol_herm);
    let mut herm_ok = true;
    for n in 1..=n_max {
        for _ in 0..10 {
            let b = random_real_vector(&mut rng, 1 << n);
            let h = symmetrized_operator(&b, n)?;
            if crate::spectral::hermiticity_defect(&h) > tol_herm {
                herm_ok = false;
            }
        }
    }
    manifest.check("hermiticity", herm_ok);

    // Pauli support of every reflected shift.
    manifest.tolerance("pauli_support", 1e-12);
    let mut support_ok = true;
    for n in 1..=n_max {
        for i in 0..1u64 << n {
            let (_, report) = verify_support(SupportTarget::Shift(i), n)?;
            if !report.ok() {
                support_ok = false;
            }
        }
    }
    manifest.check("pauli_support", support_ok);

    // Block encoding of the symmetrized operator (direct builder).
    let tol_block = 1e-10;
    manifest.tolerance("block_encoding", tol_block);
    let mut block_ok = true;
    for n in 1..=n_max.min(3) {
        let b = normalized(&random_complex_vector(&mut rng, 1 << n))?;
        let defect = verify_block_encoding(SelectVariant::DirectRecursive, &b, n)?;
        if defect > tol_block {
            block_ok = false;
        }
    }
    manifest.check("block_encoding", block_ok);

    // Success probability law (QFT builder).
    let tol_prob = 1e-10;
    manifest.tolerance("probability", tol_prob);
    let mut prob_ok = true;
    for n in 1..=n_max.min(3) {
        for _ in 0..5 {
            let a = random_complex_vector(&mut rng, 1 << n);
            let b = random_complex_vector(&mut rng, 1 << n);
            let (_, p) = convolve_quantum(&a, &b, SelectVariant::QftAdder)?;
            if (p - success_probability(&a, &b)?).abs() > tol_prob {
                prob_ok = false;
            }
        }
        let a = normalized(&random_complex_vector(&mut rng, 1 << n))?;
        let (_, p) = convolve_quantum(&a, &delta_kernel(0, 1 << n), SelectVariant::QftAdder)?;
        if (p - 1.0 / (1 << n) as f64).abs() > 1e-12 {
            prob_ok = false;
        }
    }
    manifest.check("probability", prob_ok);

    Ok(manifest)
}

// ---------------------------------------------------------------------
// Subcommand argument surface (clap)
// ---------------------------------------------------------------------

#[derive(Parser, Debug)]
#[command(
    name = "qconv",
    about = "Quantum circular-convolution circuits: synthesis, simulation, verification, and analysis",
    version
)]
pub struct CliArgs {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct CostModelArgs {
    /// Linear coefficient of the r-controlled-X CNOT cost model.
    #[arg(long, default_value_t = 6)]
    pub alpha: i64,
    /// Constant offset of the r-controlled-X CNOT cost model.
    #[arg(long, default_value_t = -6)]
    pub beta: i64,
}

impl CostModelArgs {
    fn model(&self) -> CostModel {
        CostModel { alpha: self.alpha, beta: self.beta }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Synthesize a reflected SELECT circuit and write the circuit file.
    Synthesize {
        #[arg(long)]
        variant: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        cost: CostModelArgs,
        /// Recorded in the manifest; synthesis itself is deterministic.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Convolve two vectors through the simulated pipeline (or classically
    /// with --oracle) and write the result vector.
    Convolve {
        /// Input data vector file; omit to generate randomly (needs --random-n).
        #[arg(long)]
        a: Option<PathBuf>,
        /// Input kernel vector file; omit to generate randomly (needs --random-n).
        #[arg(long)]
        b: Option<PathBuf>,
        #[arg(long, default_value = "compiled")]
        variant: String,
        /// kernel = gate-level preparation block, state = injected amplitudes.
        #[arg(long, default_value = "kernel")]
        mode: String,
        #[arg(long)]
        out: PathBuf,
        /// Compute with the classical O(N^2) oracle instead of the circuit.
        #[arg(long)]
        oracle: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Register size for randomly generated inputs.
        #[arg(long)]
        random_n: Option<usize>,
    },
    /// Run the verification suites and emit a manifest.
    Verify {
        #[arg(long, default_value_t = 3)]
        n_max: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Structural gate counts over a range of n with a scaling fit.
    Estimate {
        #[arg(long)]
        variant: String,
        #[arg(long, default_value = "macro")]
        model: String,
        /// Inclusive range lo:hi.
        #[arg(long)]
        range: String,
        /// Optional comma-separated output table.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        cost: CostModelArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Pauli-decompose a reflected shift or a kernel operator and check the
    /// support bound.
    Pauli {
        /// Kernel vector file (decomposes the symmetrized operator).
        #[arg(long)]
        b: Option<PathBuf>,
        /// Shift index (decomposes one reflected shift).
        #[arg(long)]
        shift: Option<u64>,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Deconvolve: recover a with circular_convolve(a, b) = c.
    Deconvolve {
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        c: PathBuf,
        /// exact | hermitian | normal.
        #[arg(long, default_value = "exact")]
        route: String,
        #[arg(long, default_value_t = 1e-4)]
        eps: f64,
        /// Project out sub-threshold singular directions instead of failing.
        #[arg(long)]
        pseudoinverse: bool,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn parse_range(range: &str) -> Result<(usize, usize)> {
    let (lo, hi) = range
        .split_once(':')
        .ok_or_else(|| Error::Data(format!("range must be lo:hi, got {range:?}")))?;
    let lo: usize = lo.parse().map_err(|e| Error::Data(format!("bad range start: {e}")))?;
    let hi: usize = hi.parse().map_err(|e| Error::Data(format!("bad range end: {e}")))?;
    if lo >= hi {
        return Err(Error::Data(format!("empty range {lo}:{hi}")));
    }
    Ok((lo, hi))
}

fn load_or_random(
    path: Option<&PathBuf>,
    random_n: Option<usize>,
    rng: &mut ChaCha8Rng,
    what: &str,
) -> Result<CVector> {
    match path {
        Some(p) => read_vector_file(p),
        None => {
            let n = random_n.ok_or_else(|| {
                Error::Data(format!("--{what} missing and no --random-n given"))
            })?;
            Ok(random_complex_vector(rng, 1 << n))
        }
    }
}

// ---------------------------------------------------------------------
// Subcommand implementations
// ---------------------------------------------------------------------

fn cmd_synthesize(
    variant: &str,
    n: usize,
    out: &Path,
    cost: &CostModelArgs,
    seed: u64,
) -> Result<Manifest> {
    let variant = SelectVariant::from_str(variant)?;
    let circuit = build_select(variant, n)?;
    std::fs::write(out, circuit.to_text())?;
    let report = count_resources(&circuit, &cost.model());
    let mut manifest = Manifest::new("synthesize");
    manifest.push("variant", variant.name());
    manifest.push("n", n);
    manifest.push("seed", seed);
    manifest.push("out", out.display());
    manifest.push("qubits", circuit.width());
    manifest.push("gates", circuit.gate_count());
    manifest.push("macro_blocks", report.macro_blocks);
    manifest.push("primitive_cnots", report.primitive_cnots);
    manifest.push("phase_gates", report.phase_gates);
    manifest.push("interior_macro_blocks", report.interior().macro_blocks);
    manifest.push("interior_primitive_cnots", report.interior().primitive_cnots);
    Ok(manifest)
}

#[allow(clippy::too_many_arguments)]
fn cmd_convolve(
    a_path: Option<&PathBuf>,
    b_path: Option<&PathBuf>,
    variant: &str,
    mode: &str,
    out: &Path,
    oracle: bool,
    seed: u64,
    random_n: Option<usize>,
) -> Result<Manifest> {
    let variant = SelectVariant::from_str(variant)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = load_or_random(a_path, random_n, &mut rng, "a")?;
    let b = load_or_random(b_path, random_n, &mut rng, "b")?;
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { left: a.len(), right: b.len() });
    }
    let mut manifest = Manifest::new("convolve");
    manifest.push("variant", variant.name());
    manifest.push("mode", mode);
    manifest.push("seed", seed);
    manifest.push("dim", a.len());
    manifest.push("oracle", oracle);
    let scale = (a.len() as f64).sqrt() * a.norm() * b.norm();
    let c = if oracle {
        circular_convolve(&a, &b)?
    } else {
        let (c, p) = match mode {
            "kernel" => convolve_quantum(&a, &b, variant)?,
            "state" => convolve_quantum_supplied(&a, &b, variant)?,
            other => {
                return Err(Error::Data(format!(
                    "unknown mode {other:?} (expected kernel|state)"
                )))
            }
        };
        manifest.push("p_succ", format_g12(p));
        c
    };
    manifest.push("rescale_factor", format_g12(scale));
    write_vector_file(out, &c)?;
    manifest.push("out", out.display());
    Ok(manifest)
}

fn cmd_verify(n_max: usize, seed: u64) -> Result<Manifest> {
    let provider =
        |variant: SelectVariant, n: usize| -> Result<Circuit> { build_select(variant, n) };
    run_verify_suites(n_max, seed, &provider)
}

fn cmd_estimate(
    variant: &str,
    model: &str,
    range: &str,
    csv: Option<&PathBuf>,
    cost: &CostModelArgs,
    seed: u64,
) -> Result<Manifest> {
    let variant = SelectVariant::from_str(variant)?;
    let model = CountModel::from_str(model)?;
    let (lo, hi) = parse_range(range)?;
    let cost_model = cost.model();
    let ns: Vec<usize> = (lo..=hi).collect();
    let study = run_study(variant, model, &ns, &cost_model)?;

    println!("{:>4} {:>14} {:>14} {:>14}  variant", "n", "macro", "cnot", "phase");
    let mut csv_text = String::from("n,macro,cnot,variant\n");
    for &n in &ns {
        let report = count_variant(variant, n, &cost_model)?;
        let interior = report.interior();
        println!(
            "{:>4} {:>14} {:>14} {:>14}  {}",
            n,
            interior.macro_blocks,
            interior.primitive_cnots,
            report.phase_gates,
            variant.name()
        );
        writeln!(
            csv_text,
            "{},{},{},{}",
            n,
            interior.macro_blocks,
            interior.primitive_cnots,
            variant.name()
        )
        .unwrap();
    }
    if let Some(path) = csv {
        std::fs::write(path, &csv_text)?;
    }

    let mut manifest = Manifest::new("estimate");
    manifest.push("variant", variant.name());
    manifest.push("model", model.name());
    manifest.push("range", format!("{lo}:{hi}"));
    manifest.push("seed", seed);
    manifest.push("fitted_slope", format_g12(study.fitted_slope));
    manifest.push("r_squared", format_g12(study.r_squared));
    Ok(manifest)
}

fn cmd_pauli(
    b_path: Option<&PathBuf>,
    shift: Option<u64>,
    n: usize,
    seed: u64,
) -> Result<Manifest> {
    let mut manifest = Manifest::new("pauli");
    manifest.push("n", n);
    manifest.push("seed", seed);
    let kernel;
    let target = match (b_path, shift) {
        (Some(_), Some(_)) => {
            return Err(Error::Data("give either --b or --shift, not both".into()))
        }
        (Some(path), None) => {
            kernel = read_vector_file(path)?;
            manifest.push("target", "kernel");
            SupportTarget::Kernel(&kernel)
        }
        (None, Some(i)) => {
            manifest.push("target", format!("shift {i}"));
            SupportTarget::Shift(i)
        }
        (None, None) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            kernel = random_real_vector(&mut rng, 1 << n);
            manifest.push("target", "random real kernel");
            SupportTarget::Kernel(&kernel)
        }
    };
    let (terms, report) = verify_support(target, n)?;
    for t in &terms {
        println!(
            "{} {} {}",
            t.string(),
            format_g12(t.coefficient.re),
            format_g12(t.coefficient.im)
        );
    }
    manifest.push("term_count", report.term_count);
    manifest.push("bound", report.bound);
    manifest.push("y_weight", format_g12(report.y_weight));
    manifest.tolerance("pauli_support", 1e-12);
    manifest.check("pauli_support", report.ok());
    Ok(manifest)
}

#[allow(clippy::too_many_arguments)]
fn cmd_deconvolve(
    b_path: &Path,
    c_path: &Path,
    route: &str,
    eps: f64,
    pseudoinverse: bool,
    out: &Path,
    seed: u64,
) -> Result<Manifest> {
    let b = read_vector_file(b_path)?;
    let c = read_vector_file(c_path)?;
    if b.len() != c.len() {
        return Err(Error::DimensionMismatch { left: b.len(), right: c.len() });
    }
    let spec = KernelSpec::new(b.clone())?;
    let report = spectrum(spec.vector(), spec.qubits())?;
    let mut manifest = Manifest::new("deconvolve");
    manifest.push("route", route);
    manifest.push("seed", seed);
    manifest.push("kappa", format_g12(report.kappa));
    let a = match route {
        "exact" => {
            if report.kappa.is_finite() {
                deconvolve_exact(&b, &c)?
            } else if pseudoinverse {
                manifest.push("pseudoinverse", true);
                deconvolve_pseudo(&b, &c, SINGULARITY_REL_THRESHOLD)?
            } else {
                return Err(Error::NotInvertible);
            }
        }
        other => {
            let route = InverseRoute::from_str(other)?;
            let result = deconvolve_polynomial(&b, &c, eps, route)?;
            manifest.push("eps", format_g12(eps));
            manifest.push("degree", result.polynomial.degree);
            manifest.push(
                "achieved_sup_error",
                format_g12(result.polynomial.achieved_sup_error),
            );
            result.output
        }
    };
    write_vector_file(out, &a)?;
    manifest.push("out", out.display());
    Ok(manifest)
}

// ---------------------------------------------------------------------
// Entry point
// ---------------------------------------------------------------------

fn dispatch(command: &Command) -> Result<Manifest> {
    match command {
        Command::Synthesize { variant, n, out, cost, seed } => {
            cmd_synthesize(variant, *n, out, cost, *seed)
        }
        Command::Convolve { a, b, variant, mode, out, oracle, seed, random_n } => cmd_convolve(
            a.as_ref(),
            b.as_ref(),
            variant,
            mode,
            out,
            *oracle,
            *seed,
            *random_n,
        ),
        Command::Verify { n_max, seed } => cmd_verify(*n_max, *seed),
        Command::Estimate { variant, model, range, csv, cost, seed } => {
            cmd_estimate(variant, model, range, csv.as_ref(), cost, *seed)
        }
        Command::Pauli { b, shift, n, seed } => cmd_pauli(b.as_ref(), *shift, *n, *seed),
        Command::Deconvolve { b, c, route, eps, pseudoinverse, out, seed } => {
            cmd_deconvolve(b, c, route, *eps, *pseudoinverse, out, *seed)
        }
    }
}

/// Parse arguments, run the subcommand, print its manifest, and return the
/// process exit code.
pub fn main_entry() -> i32 {
    let args = match CliArgs::try_parse() {
        Ok(args) => args,
        Err(e) => {
            // clap prints its own message; usage problems exit with 2.
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let started = Instant::now();
    match dispatch(&args.command) {
        Ok(mut manifest) => {
            manifest.push("runtime_ms", started.elapsed().as_millis());
            print!("{}", manifest.render());
            if manifest.all_passed() {
                EXIT_OK
            } else {
                EXIT_VERIFICATION
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::vec_max_norm_diff;

    #[test]
    fn vector_file_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let v = random_complex_vector(&mut rng, 8);
        let text = vector_to_text(&v);
        let parsed = vector_from_text(&text).unwrap();
        assert!(vec_max_norm_diff(&parsed, &v) == 0.0);
    }

    #[test]
    fn vector_file_errors_carry_line_numbers() {
        match vector_from_text("dim=3\n") {
            Err(Error::Parse { line: 1, .. }) => {}
            other => panic!("expected header error, got {other:?}"),
        }
        match vector_from_text("dim=2\n1.0 0.0\nbad 0.0\n") {
            Err(Error::Parse { line: 3, .. }) => {}
            other => panic!("expected line-3 error, got {other:?}"),
        }
        match vector_from_text("dim=4\n1 0\n") {
            Err(Error::Parse { .. }) => {}
            other => panic!("expected truncation error, got {other:?}"),
        }
    }

    #[test]
    fn manifest_tracks_failures() {
        let mut m = Manifest::new("test");
        m.check("good", true);
        assert!(m.all_passed());
        m.check("bad", false);
        assert!(!m.all_passed());
        assert_eq!(m.get("check.bad"), Some("fail"));
        assert!(m.render().contains("check.good: pass\n"));
    }

    #[test]
    fn default_verify_suites_pass() {
        let manifest = cmd_verify(2, 7).unwrap();
        assert!(manifest.all_passed(), "{}", manifest.render());
    }

    #[test]
    fn mutated_compiled_builder_fails_only_equivalence() {
        // Flip the polarity of one control in the compiled builder by
        // X-conjugating it: a valid circuit with the wrong unitary.
        let provider = |variant: SelectVariant, n: usize| -> Result<Circuit> {
            let honest = build_select(variant, n)?;
            if variant != SelectVariant::CompiledBitwise || n != 2 {
                return Ok(honest);
            }
            let mut tampered = Circuit::new(honest.width())?;
            let victim = honest
                .gates()
                .iter()
                .position(|g| g.controls.len() >= 2)
                .expect("compiled n=2 has a Toffoli");
            for (idx, gate) in honest.gates().iter().enumerate() {
                if idx == victim {
                    let flip = gate.controls[1];
                    tampered.append(crate::circuit::Gate::x(flip))?;
                    tampered.append(gate.clone())?;
                    tampered.append(crate::circuit::Gate::x(flip))?;
                } else {
                    tampered.append(gate.clone())?;
                }
            }
            Ok(tampered)
        };
        let manifest = run_verify_suites(2, 7, &provider).unwrap();
        assert_eq!(manifest.get("check.four_way_equivalence"), Some("fail"));
        for check in [
            "bridge_identity",
            "basis_action",
            "hermiticity",
            "pauli_support",
            "block_encoding",
            "probability",
        ] {
            assert_eq!(
                manifest.get(&format!("check.{check}")),
                Some("pass"),
                "{check} should be unaffected"
            );
        }
    }

    #[test]
    fn range_parsing() {
        assert_eq!(parse_range("8:32").unwrap(), (8, 32));
        assert!(parse_range("8").is_err());
        assert!(parse_range("9:3").is_err());
    }

    #[test]
    fn format_g12_has_12_significant_digits() {
        assert_eq!(format_g12(1.0 / 3.0), "3.33333333333e-1");
    }
}
