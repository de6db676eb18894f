//! Structural gate counting and scaling-exponent fits.
//!
//! The counters here re-derive the gate inventory of each SELECT variant
//! arithmetically, without allocating gates, so counts stay cheap out to
//! n = 64. For n within synthesis range they must agree exactly with
//! [`count_resources`](crate::circuit::count_resources) applied to the
//! actually synthesized circuits; a test pins that.

use std::collections::BTreeMap;
use std::str::FromStr;

use crate::circuit::{CostModel, GateTally, ResourceReport};
use crate::error::{Error, Result};
use crate::synthesis::SelectVariant;

/// Structural counting cap.
pub const COUNT_MAX_QUBITS: usize = 64;

/// Primitive-CNOT cost of one r-controlled X under the default model.
pub fn mcx_cnot_cost(r: usize) -> u64 {
    CostModel::default().mcx_cost(r)
}

/// Which count a scaling study tracks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CountModel {
    /// Interior macro blocks (X/MCX instances inside the SELECT blocks).
    Macro,
    /// Interior primitive CNOTs under the cost model.
    Cnot,
    /// Controlled-phase gates anywhere in the circuit (the relevant count
    /// for the QFT variant).
    Phase,
}

impl CountModel {
    pub fn name(&self) -> &'static str {
        match self {
            CountModel::Macro => "macro",
            CountModel::Cnot => "cnot",
            CountModel::Phase => "phase",
        }
    }
}

impl FromStr for CountModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "macro" => Ok(CountModel::Macro),
            "cnot" => Ok(CountModel::Cnot),
            "phase" => Ok(CountModel::Phase),
            other => Err(Error::Data(format!(
                "unknown count model {other:?} (expected macro|cnot|phase)"
            ))),
        }
    }
}

fn reversal_layer_tally(n: usize) -> GateTally {
    GateTally { macro_blocks: n as u64, ..GateTally::default() }
}

fn direct_block_tally(k: usize, model: &CostModel) -> GateTally {
    let mut t = GateTally::default();
    // Controlled reversal fan of the suffix.
    t.macro_blocks += k as u64;
    t.primitive_cnots += k as u64 * model.mcx_cost(1);
    // Generator recursion: depth d handles suffix size k - d; each level
    // contributes two conjugating X gates and a fan of k - d - 1
    // multi-controlled X with d + 2 controls.
    for d in 0..k.saturating_sub(1) {
        let fan = (k - d - 1) as u64;
        t.macro_blocks += 2 + fan;
        t.primitive_cnots += fan * model.mcx_cost(d + 2);
    }
    t
}

fn compiled_block_tally(k: usize, model: &CostModel) -> GateTally {
    let mut t = GateTally::default();
    // Carry chain: targets k-1 down to 1 with 1 + j controls, then the
    // final CX on the block's low bit.
    for j in 1..k {
        t.macro_blocks += 1;
        t.primitive_cnots += model.mcx_cost(1 + j);
    }
    t.macro_blocks += 1;
    t.primitive_cnots += model.mcx_cost(1);
    t
}

fn qft_layer_tally(n: usize) -> GateTally {
    GateTally {
        h_gates: n as u64,
        phase_gates: (n * (n - 1) / 2) as u64,
        swap_gates: (n / 2) as u64,
        ..GateTally::default()
    }
}

fn ripple_adder_tally(n: usize, model: &CostModel) -> GateTally {
    let mut t = GateTally::default();
    if n == 1 {
        t.macro_blocks = 1;
        t.primitive_cnots = model.mcx_cost(1);
    } else {
        // MAJ and UMA stages: 4n CX and 2n Toffolis in total.
        t.macro_blocks = 6 * n as u64;
        t.primitive_cnots = 4 * n as u64 * model.mcx_cost(1) + 2 * n as u64 * model.mcx_cost(2);
    }
    t
}

/// Structural gate inventory of the reflected SELECT block for one variant,
/// broken down exactly like the synthesized circuit's sections.
pub fn count_variant(variant: SelectVariant, n: usize, model: &CostModel) -> Result<ResourceReport> {
    if n < 1 {
        return Err(Error::InvalidDimension("n must be at least 1".into()));
    }
    if n > COUNT_MAX_QUBITS {
        return Err(Error::Capacity(format!(
            "structural counting capped at n = {COUNT_MAX_QUBITS}, got {n}"
        )));
    }
    let mut per_block: BTreeMap<String, GateTally> = BTreeMap::new();
    let mut global: BTreeMap<String, GateTally> = BTreeMap::new();
    global.insert("j_layer".into(), reversal_layer_tally(n));

    match variant {
        SelectVariant::DirectRecursive => {
            for m in 0..n {
                per_block.insert(m.to_string(), direct_block_tally(n - m, model));
            }
        }
        SelectVariant::CompiledBitwise => {
            for m in 0..n {
                per_block.insert(m.to_string(), compiled_block_tally(n - m, model));
            }
        }
        SelectVariant::QftAdder => {
            global.insert("qft".into(), qft_layer_tally(n));
            global.insert("qft_dag".into(), qft_layer_tally(n));
            for j in 0..n {
                per_block.insert(
                    j.to_string(),
                    GateTally { phase_gates: (n - j) as u64, ..GateTally::default() },
                );
            }
        }
        SelectVariant::RippleCarry => {
            per_block.insert("adder".into(), ripple_adder_tally(n, model));
        }
    }

    let mut totals = GateTally::default();
    for t in per_block.values().chain(global.values()) {
        totals.add(t);
    }
    Ok(ResourceReport {
        macro_blocks: totals.macro_blocks,
        primitive_cnots: totals.primitive_cnots,
        phase_gates: totals.phase_gates,
        h_gates: totals.h_gates,
        swap_gates: totals.swap_gates,
        per_block,
        global,
        model: *model,
    })
}

/// Extract the count a study tracks from a report.
pub fn model_count(report: &ResourceReport, model: CountModel) -> u64 {
    match model {
        CountModel::Macro => report.interior().macro_blocks,
        CountModel::Cnot => report.interior().primitive_cnots,
        CountModel::Phase => report.phase_gates,
    }
}

/// A log-log scaling fit over a range of register sizes.
#[derive(Debug, Clone)]
pub struct ScalingStudy {
    pub variant: SelectVariant,
    pub model: CountModel,
    pub n_values: Vec<usize>,
    pub counts: Vec<u64>,
    /// Least-squares slope of log(count) against log(n) over the top half
    /// of the n range.
    pub fitted_slope: f64,
    pub r_squared: f64,
}

/// Least-squares fit of log counts against log n over the larger-n half.
pub fn fit_scaling(
    variant: SelectVariant,
    model: CountModel,
    n_values: Vec<usize>,
    counts: Vec<u64>,
) -> Result<ScalingStudy> {
    if n_values.len() < 4 {
        return Err(Error::Data(format!(
            "scaling fit needs at least 4 points, got {}",
            n_values.len()
        )));
    }
    if n_values.len() != counts.len() {
        return Err(Error::DimensionMismatch { left: n_values.len(), right: counts.len() });
    }
    if n_values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Data("n values must be strictly increasing".into()));
    }
    if counts.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Data("counts must be strictly increasing in n".into()));
    }
    let half = n_values.len() / 2;
    let xs: Vec<f64> = n_values[half..].iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = counts[half..].iter().map(|&c| (c as f64).ln()).collect();
    let m = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / m;
    let mean_y = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mean_x) * (x - mean_x)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mean_x) * (y - mean_y)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let resid = y - (intercept + slope * x);
            resid * resid
        })
        .sum();
    let ss_tot: f64 = ys.iter().map(|y| (y - mean_y) * (y - mean_y)).sum();
    let r_squared = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    Ok(ScalingStudy { variant, model, n_values, counts, fitted_slope: slope, r_squared })
}

/// Count a variant across a range of n and fit the scaling exponent.
pub fn run_study(
    variant: SelectVariant,
    model: CountModel,
    n_values: &[usize],
    cost: &CostModel,
) -> Result<ScalingStudy> {
    let counts = n_values
        .iter()
        .map(|&n| Ok(model_count(&count_variant(variant, n, cost)?, model)))
        .collect::<Result<Vec<u64>>>()?;
    fit_scaling(variant, model, n_values.to_vec(), counts)
}

/// Expected runtime after amplitude amplification: block cost over the
/// square root of the success probability.
pub fn amplified_runtime(p_succ: f64, block_cost: u64) -> Result<f64> {
    if !(p_succ > 0.0 && p_succ <= 1.0) {
        return Err(Error::Data(format!(
            "success probability must lie in (0, 1], got {p_succ}"
        )));
    }
    Ok(block_cost as f64 / p_succ.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::count_resources;
    use crate::synthesis::build_select;

    #[test]
    fn default_cost_model_values() {
        assert_eq!(mcx_cnot_cost(1), 1);
        assert_eq!(mcx_cnot_cost(2), 6);
        assert_eq!(mcx_cnot_cost(5), 24);
    }

    #[test]
    fn compiled_interior_macro_is_triangular() {
        let model = CostModel::default();
        for n in 1..=12usize {
            let report = count_variant(SelectVariant::CompiledBitwise, n, &model).unwrap();
            assert_eq!(report.interior().macro_blocks, (n * (n + 1) / 2) as u64, "n={n}");
        }
    }

    #[test]
    fn compiled_interior_cnots_are_cubic() {
        // With the default model the interior CNOT count is exactly n^3.
        let model = CostModel::default();
        for n in 1..=16usize {
            let report = count_variant(SelectVariant::CompiledBitwise, n, &model).unwrap();
            assert_eq!(report.interior().primitive_cnots, (n * n * n) as u64, "n={n}");
        }
    }

    #[test]
    fn direct_macro_ratio_is_consistent_with_cubic_growth() {
        let model = CostModel::default();
        let c4 = count_variant(SelectVariant::DirectRecursive, 4, &model)
            .unwrap()
            .interior()
            .macro_blocks as f64;
        let c8 = count_variant(SelectVariant::DirectRecursive, 8, &model)
            .unwrap()
            .interior()
            .macro_blocks as f64;
        let exponent = (c8 / c4).log2();
        assert!((2.25..=3.75).contains(&exponent), "effective exponent {exponent}");
    }

    #[test]
    fn direct_interior_cnots_are_quartic_sum_of_cubes() {
        // Each suffix block costs exactly k^3 CNOTs under the default
        // model, so the total is the squared triangular number.
        let model = CostModel::default();
        for n in 1..=10usize {
            let report = count_variant(SelectVariant::DirectRecursive, n, &model).unwrap();
            let tri = (n * (n + 1) / 2) as u64;
            assert_eq!(report.interior().primitive_cnots, tri * tri, "n={n}");
        }
    }

    #[test]
    fn ripple_counts_are_linear() {
        let model = CostModel::default();
        let ns: Vec<usize> = (8..=32).collect();
        let study = run_study(SelectVariant::RippleCarry, CountModel::Cnot, &ns, &model).unwrap();
        assert!((study.fitted_slope - 1.0).abs() <= 0.05, "slope {}", study.fitted_slope);
    }

    #[test]
    fn qft_phase_count_matches_closed_form() {
        let model = CostModel::default();
        for n in 1..=12usize {
            let report = count_variant(SelectVariant::QftAdder, n, &model).unwrap();
            let phi = (n * (n + 1) / 2) as u64;
            let qft_layers = (n * (n - 1)) as u64;
            assert_eq!(report.phase_gates, phi + qft_layers, "n={n}");
        }
    }

    #[test]
    fn structural_counts_match_synthesized_circuits() {
        let model = CostModel::default();
        for variant in SelectVariant::ALL {
            for n in 1..=6usize {
                let circuit = build_select(variant, n).unwrap();
                let from_gates = count_resources(&circuit, &model);
                let structural = count_variant(variant, n, &model).unwrap();
                assert_eq!(from_gates, structural, "variant {} n={n}", variant.name());
            }
        }
    }

    #[test]
    fn counts_increase_strictly_with_n() {
        let model = CostModel::default();
        for variant in SelectVariant::ALL {
            for count_model in [CountModel::Macro, CountModel::Cnot, CountModel::Phase] {
                if variant != SelectVariant::QftAdder && count_model == CountModel::Phase {
                    continue;
                }
                if variant == SelectVariant::QftAdder && count_model != CountModel::Phase {
                    continue;
                }
                let counts: Vec<u64> = (2..=16)
                    .map(|n| {
                        model_count(&count_variant(variant, n, &model).unwrap(), count_model)
                    })
                    .collect();
                assert!(
                    counts.windows(2).all(|w| w[0] < w[1]),
                    "variant {} model {}",
                    variant.name(),
                    count_model.name()
                );
            }
        }
    }

    #[test]
    fn synthetic_square_counts_fit_slope_two() {
        let ns: Vec<usize> = (4..=20).collect();
        let counts: Vec<u64> = ns.iter().map(|&n| (n * n) as u64).collect();
        let study =
            fit_scaling(SelectVariant::CompiledBitwise, CountModel::Macro, ns, counts).unwrap();
        assert!((study.fitted_slope - 2.0).abs() <= 1e-9);
        assert!((study.r_squared - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn non_monotone_counts_are_rejected() {
        let ns = vec![4, 5, 6, 7];
        let counts = vec![10, 9, 11, 12];
        assert!(matches!(
            fit_scaling(SelectVariant::CompiledBitwise, CountModel::Macro, ns, counts),
            Err(Error::Data(_))
        ));
    }

    #[test]
    fn amplified_runtime_formula() {
        assert_eq!(amplified_runtime(1.0, 100).unwrap(), 100.0);
        let n = 16.0f64;
        assert!((amplified_runtime(1.0 / n, 100).unwrap() - 100.0 * n.sqrt()).abs() < 1e-12);
        assert!(amplified_runtime(0.0, 1).is_err());
    }
}
