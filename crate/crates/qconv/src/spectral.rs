//! Hermitian spectral structure, condition numbers, deconvolution, and
//! inverse-polynomial degree scaling.
//!
//! For a real kernel the symmetrized operator is Hermitian, so inversion
//! can run through its eigendecomposition directly; the plain convolution
//! operator shares its singular values, and the deconvolution map only
//! differs by one reversal factor. The polynomial machinery measures how
//! the degree of an odd Chebyshev least-squares approximant of the inverse
//! function grows with the condition number, on the native Hermitian domain
//! and on the squared (normal-equations) domain.

use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{qubit_count, CMatrix, CVector};
use crate::shift_algebra::{
    circular_convolve, convolution_matrix, symmetrized_operator, KernelSpec,
};

/// Relative threshold under which the smallest singular value flags the
/// operator as singular.
pub const SINGULARITY_REL_THRESHOLD: f64 = 1e-12;

/// Grid resolution for measured sup errors.
const GRID_POINTS: usize = 10_000;

/// Degree search cap.
const DEGREE_CAP: usize = 100_000;

/// Entrywise max-norm of M minus its adjoint.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    assert_eq!(m.nrows(), m.ncols(), "hermiticity defect needs a square matrix");
    crate::linalg::max_norm_diff(m, &m.adjoint())
}

fn is_real_kernel(b: &CVector) -> bool {
    b.iter().all(|z| z.im.abs() <= 1e-12)
}

/// Eigenvalues (Hermitian path), singular values, and the condition number
/// of the convolution operators for one kernel.
#[derive(Debug, Clone)]
pub struct SpectrumReport {
    /// Eigenvalues of the symmetrized operator, sorted descending; present
    /// only for real kernels.
    pub eigenvalues: Option<Vec<f64>>,
    /// Singular values of the convolution operator, sorted descending.
    pub singular_values: Vec<f64>,
    /// Ratio of extreme singular values; infinite when singular.
    pub kappa: f64,
    pub hermiticity_defect: f64,
}

fn kappa_of(singular: &[f64]) -> f64 {
    let smax = singular[0];
    let smin = *singular.last().unwrap();
    if smax <= 0.0 || smin < SINGULARITY_REL_THRESHOLD * smax {
        f64::INFINITY
    } else {
        smax / smin
    }
}

fn hermitian_eigenvalues(h: &CMatrix) -> Vec<f64> {
    let eig = h.clone().symmetric_eigen();
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(|a, b| b.partial_cmp(a).unwrap());
    vals
}

fn singular_values_of(c: &CMatrix) -> Vec<f64> {
    let svd = c.clone().svd(false, false);
    let mut vals: Vec<f64> = svd.singular_values.iter().copied().collect();
    vals.sort_by(|a, b| b.partial_cmp(a).unwrap());
    vals
}

/// Spectral summary of one kernel. For real kernels the Hermitian
/// eigendecomposition runs alongside the singular value decomposition and
/// the two spectra are cross-checked as multisets.
pub fn spectrum(b: &CVector, n: usize) -> Result<SpectrumReport> {
    let h = symmetrized_operator(b, n)?;
    let c = convolution_matrix(b, n)?;
    let defect = hermiticity_defect(&h);
    let singular_values = singular_values_of(&c);
    let eigenvalues = if is_real_kernel(b) {
        let eig = hermitian_eigenvalues(&h);
        let mut magnitudes: Vec<f64> = eig.iter().map(|v| v.abs()).collect();
        magnitudes.sort_by(|a, b| b.partial_cmp(a).unwrap());
        for (m, s) in magnitudes.iter().zip(&singular_values) {
            if (m - s).abs() > 1e-10 {
                return Err(Error::Verification(format!(
                    "eigenvalue magnitudes and singular values disagree: {m} vs {s}"
                )));
            }
        }
        Some(eig)
    } else {
        None
    };
    Ok(SpectrumReport {
        eigenvalues,
        singular_values: singular_values.clone(),
        kappa: kappa_of(&singular_values),
        hermiticity_defect: defect,
    })
}

/// Condition number of a kernel's convolution operator.
pub fn kernel_condition(spec: &KernelSpec) -> Result<f64> {
    Ok(spectrum(spec.vector(), spec.qubits())?.kappa)
}

fn reversed_entries(v: &CVector) -> CVector {
    let dim = v.len();
    CVector::from_fn(dim, |i, _| v[dim - 1 - i])
}

/// Exact deconvolution through the symmetrized operator: solve the
/// Hermitian-side system and reverse, recovering `a` with
/// `circular_convolve(a, b) = c`. The round trip is verified to
/// `1e-8 * kappa` before returning.
pub fn deconvolve_exact(b: &CVector, c: &CVector) -> Result<CVector> {
    if b.len() != c.len() {
        return Err(Error::DimensionMismatch { left: b.len(), right: c.len() });
    }
    let n = qubit_count(b.len())?;
    let report = spectrum(b, n)?;
    if !report.kappa.is_finite() {
        return Err(Error::NotInvertible);
    }
    let h = symmetrized_operator(b, n)?;
    let solved = h.lu().solve(c).ok_or(Error::NotInvertible)?;
    let a = reversed_entries(&solved);
    let round_trip = circular_convolve(&a, b)?;
    let defect = crate::linalg::vec_max_norm_diff(&round_trip, c);
    if defect > 1e-8 * report.kappa {
        return Err(Error::Verification(format!(
            "deconvolution round trip defect {defect:e} exceeds 1e-8 * kappa"
        )));
    }
    Ok(a)
}

/// Thresholded pseudo-inverse deconvolution: singular directions below
/// `rel_threshold * sigma_max` are projected out instead of inverted.
pub fn deconvolve_pseudo(b: &CVector, c: &CVector, rel_threshold: f64) -> Result<CVector> {
    if b.len() != c.len() {
        return Err(Error::DimensionMismatch { left: b.len(), right: c.len() });
    }
    let n = qubit_count(b.len())?;
    let conv = convolution_matrix(b, n)?;
    let svd = conv.svd(true, true);
    let u = svd.u.as_ref().expect("u requested");
    let v_t = svd.v_t.as_ref().expect("v_t requested");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    if smax <= 0.0 {
        return Err(Error::NotInvertible);
    }
    let mut inv = CMatrix::zeros(b.len(), b.len());
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s > rel_threshold * smax {
            inv[(k, k)] = Complex64::new(1.0 / s, 0.0);
        }
    }
    Ok(v_t.adjoint() * inv * u.adjoint() * c)
}

/// Which spectral domain the inverse polynomial lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InverseRoute {
    /// Native Hermitian spectrum: promised interval [1/kappa, 1].
    Hermitian,
    /// Normal-equations spectrum (squared singular values): promised
    /// interval [1/kappa^2, 1].
    NormalEquations,
}

impl InverseRoute {
    pub fn name(&self) -> &'static str {
        match self {
            InverseRoute::Hermitian => "hermitian",
            InverseRoute::NormalEquations => "normal",
        }
    }

    fn effective_kappa(&self, kappa: f64) -> f64 {
        match self {
            InverseRoute::Hermitian => kappa,
            InverseRoute::NormalEquations => kappa * kappa,
        }
    }
}

impl FromStr for InverseRoute {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hermitian" => Ok(InverseRoute::Hermitian),
            "normal" => Ok(InverseRoute::NormalEquations),
            other => Err(Error::Data(format!(
                "unknown route {other:?} (expected hermitian|normal)"
            ))),
        }
    }
}

/// An odd polynomial approximating the rescaled inverse function on a
/// promised interval.
///
/// Stored as `p(x) = x * q(x^2)` with `q` held by its Chebyshev
/// coefficients on the squared domain `[domain_min^2, 1]`; oddness is
/// therefore structural. `eval` reconstructs `p`.
#[derive(Debug, Clone)]
pub struct InversePolynomial {
    pub degree: usize,
    pub route: InverseRoute,
    /// Lower edge of the promised interval (1 over the effective kappa).
    pub domain_min: f64,
    /// Sup error against `domain_min / x`, measured on the evaluation grid.
    pub achieved_sup_error: f64,
    cheb_coeffs: Vec<f64>,
}

impl InversePolynomial {
    /// The identity polynomial `p(x) = x` (exact on a collapsed domain).
    pub fn identity(route: InverseRoute) -> Self {
        InversePolynomial {
            degree: 1,
            route,
            domain_min: 1.0,
            achieved_sup_error: 0.0,
            cheb_coeffs: vec![1.0],
        }
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.cheb_coeffs
    }

    /// Evaluate the even Chebyshev factor at u via Clenshaw recursion.
    fn eval_factor(&self, u: f64) -> f64 {
        let lo = self.domain_min * self.domain_min;
        let hi = 1.0;
        let y = if hi - lo < 1e-300 { 0.0 } else { (2.0 * u - (hi + lo)) / (hi - lo) };
        let mut b1 = 0.0;
        let mut b2 = 0.0;
        for &c in self.cheb_coeffs.iter().rev() {
            let b0 = 2.0 * y * b1 - b2 + c;
            b2 = b1;
            b1 = b0;
        }
        b1 - y * b2
    }

    pub fn eval(&self, x: f64) -> f64 {
        x * self.eval_factor(x * x)
    }
}

/// Chebyshev least-squares fit of `delta/u` on `[delta^2, 1]` truncated at
/// `terms - 1`, with the sup error of the reconstructed odd polynomial
/// against `delta/x` measured on the standard grid over `[delta, 1]`.
fn fit_inverse_factor(delta: f64, terms: usize, route: InverseRoute) -> InversePolynomial {
    let lo = delta * delta;
    let hi = 1.0;
    let samples = (2 * terms).max(64);
    // Coefficients against the Chebyshev nodes of the squared domain;
    // discrete orthogonality makes the truncation the least-squares
    // solution in the node norm. T_j at each node comes from the
    // three-term recurrence.
    let mut coeffs = vec![0.0; terms];
    for i in 0..samples {
        let theta = std::f64::consts::PI * (i as f64 + 0.5) / samples as f64;
        let y = theta.cos();
        let u = 0.5 * ((hi - lo) * y + (hi + lo));
        let g = delta / u;
        coeffs[0] += g;
        if terms > 1 {
            coeffs[1] += g * y;
        }
        let mut t_prev = 1.0;
        let mut t_cur = y;
        for coeff in coeffs.iter_mut().skip(2) {
            let t_next = 2.0 * y * t_cur - t_prev;
            *coeff += g * t_next;
            t_prev = t_cur;
            t_cur = t_next;
        }
    }
    for c in coeffs.iter_mut() {
        *c *= 2.0 / samples as f64;
    }
    coeffs[0] *= 0.5;

    let mut poly = InversePolynomial {
        degree: 2 * (terms - 1) + 1,
        route,
        domain_min: delta,
        achieved_sup_error: 0.0,
        cheb_coeffs: coeffs,
    };
    let mut sup = 0.0f64;
    for t in 0..GRID_POINTS {
        let x = delta + (1.0 - delta) * t as f64 / (GRID_POINTS - 1) as f64;
        sup = sup.max((poly.eval(x) - delta / x).abs());
    }
    poly.achieved_sup_error = sup;
    poly
}

/// Minimal odd polynomial degree for which the Chebyshev least-squares
/// approximant of the rescaled inverse meets `eps / kappa_eff` sup error on
/// the promised interval. Found by doubling then bisection over the term
/// count.
pub fn inverse_poly_degree(kappa: f64, eps: f64, route: InverseRoute) -> Result<InversePolynomial> {
    if !(kappa >= 1.0) {
        return Err(Error::Data(format!("kappa must be >= 1, got {kappa}")));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Data(format!("eps must lie in (0, 1), got {eps}")));
    }
    let kappa_eff = route.effective_kappa(kappa);
    let delta = 1.0 / kappa_eff;
    if 1.0 - delta < 1e-12 {
        // Domain collapses to the single point {1}: p(x) = x is exact.
        return Ok(InversePolynomial::identity(route));
    }
    let tol = eps * delta;

    let fit = |terms: usize| fit_inverse_factor(delta, terms, route);
    let passes = |p: &InversePolynomial| p.achieved_sup_error <= tol;

    let mut candidate = fit(1);
    if passes(&candidate) {
        return Ok(candidate);
    }
    let mut lo = 1usize; // failing term count
    let mut hi = 2usize;
    loop {
        if 2 * (hi - 1) + 1 > DEGREE_CAP {
            return Err(Error::Capacity(format!(
                "degree search exceeded cap {DEGREE_CAP} (kappa_eff = {kappa_eff}, eps = {eps})"
            )));
        }
        candidate = fit(hi);
        if passes(&candidate) {
            break;
        }
        lo = hi;
        hi *= 2;
    }
    // Bisect for the minimal passing term count in (lo, hi].
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        let trial = fit(mid);
        if passes(&trial) {
            hi = mid;
            candidate = trial;
        } else {
            lo = mid;
        }
    }
    Ok(candidate)
}

/// Functional calculus: evaluate the polynomial on the spectrally rescaled
/// symmetrized operator of a real kernel and apply it to `c`, i.e.
/// `p(H / ||H||_2) c`. Eigenvalues inside the excluded interval around
/// zero are a promise violation.
pub fn apply_matrix_polynomial(
    b: &CVector,
    n: usize,
    poly: &InversePolynomial,
    c: &CVector,
) -> Result<CVector> {
    if !is_real_kernel(b) {
        return Err(Error::Data(
            "the Hermitian functional calculus needs a real kernel".into(),
        ));
    }
    let h = symmetrized_operator(b, n)?;
    if c.len() != h.nrows() {
        return Err(Error::DimensionMismatch { left: c.len(), right: h.nrows() });
    }
    let eig = h.symmetric_eigen();
    let lam_max = eig.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if lam_max < 1e-14 {
        return Err(Error::NotInvertible);
    }
    let mut scaled = Vec::with_capacity(eig.eigenvalues.len());
    for &lam in eig.eigenvalues.iter() {
        let s = lam / lam_max;
        if s.abs() < poly.domain_min * (1.0 - 1e-9) {
            return Err(Error::PromiseViolation(format!(
                "rescaled eigenvalue {s:e} lies inside the excluded interval (+-{:e})",
                poly.domain_min
            )));
        }
        scaled.push(s);
    }
    // V p(Lambda) V^dag c, with V the (complex) eigenvector matrix.
    let vt_c = eig.eigenvectors.adjoint() * c;
    let mut weighted = vt_c;
    for (k, s) in scaled.iter().enumerate() {
        weighted[k] *= Complex64::new(poly.eval(*s), 0.0);
    }
    Ok(&eig.eigenvectors * weighted)
}

/// Result of a polynomial-route deconvolution.
#[derive(Debug, Clone)]
pub struct PolyDeconvolution {
    pub output: CVector,
    pub polynomial: InversePolynomial,
    pub kappa: f64,
}

/// Deconvolve through the inverse polynomial: on the Hermitian route the
/// polynomial acts on the rescaled symmetrized operator; on the
/// normal-equations route it acts on the rescaled Gram operator of the
/// convolution matrix.
pub fn deconvolve_polynomial(
    b: &CVector,
    c: &CVector,
    eps: f64,
    route: InverseRoute,
) -> Result<PolyDeconvolution> {
    if b.len() != c.len() {
        return Err(Error::DimensionMismatch { left: b.len(), right: c.len() });
    }
    let n = qubit_count(b.len())?;
    let report = spectrum(b, n)?;
    if !report.kappa.is_finite() {
        return Err(Error::NotInvertible);
    }
    let kappa = report.kappa;
    let polynomial = inverse_poly_degree(kappa, eps, route)?;
    let output = match route {
        InverseRoute::Hermitian => {
            if !is_real_kernel(b) {
                return Err(Error::Data(
                    "the Hermitian route needs a real kernel; use the normal-equations route".into(),
                ));
            }
            let lam_max = report.singular_values[0];
            // H^{-1} ~= kappa_eff * p(H / lam_max) / lam_max, then reverse.
            let y = apply_matrix_polynomial(b, n, &polynomial, c)?;
            reversed_entries(&y) * Complex64::new(kappa / lam_max, 0.0)
        }
        InverseRoute::NormalEquations => {
            let conv = convolution_matrix(b, n)?;
            let smax = report.singular_values[0];
            let gram = conv.adjoint() * &conv / Complex64::new(smax * smax, 0.0);
            let eig = gram.symmetric_eigen();
            let kappa_eff = kappa * kappa;
            for &lam in eig.eigenvalues.iter() {
                if lam < polynomial.domain_min * (1.0 - 1e-9) {
                    return Err(Error::PromiseViolation(format!(
                        "rescaled Gram eigenvalue {lam:e} below the promised interval"
                    )));
                }
            }
            let rhs = conv.adjoint() * c;
            let vt_rhs = eig.eigenvectors.adjoint() * rhs;
            let mut weighted = vt_rhs;
            for (k, &lam) in eig.eigenvalues.iter().enumerate() {
                weighted[k] *= Complex64::new(polynomial.eval_factor(lam), 0.0);
            }
            // (C^dag C)^{-1} C^dag c ~= kappa_eff * q(Gram) C^dag c / smax^2.
            (&eig.eigenvectors * weighted) * Complex64::new(kappa_eff / (smax * smax), 0.0)
        }
    };
    Ok(PolyDeconvolution { output, polynomial, kappa })
}
