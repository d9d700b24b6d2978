//! Absolute-minimal-requirement sweep: one parameter walks from the
//! state-of-the-art value toward perfect while every other parameter is
//! perfect (photon loss in fiber excepted); an inner grid covers the
//! protocol tunables.

use serde::{Deserialize, Serialize};

use crate::hardware::ParamName;

use super::evaluate::{evaluate_candidate, CandidateSolution, Scenario, SchemeKind, Tunables};
use super::improve::improve_parameter;
use super::OptimizerError;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepConfig {
    /// Multiplicative step applied to the improvement factor per sweep point.
    pub factor_step: f64,
    /// Largest improvement factor tried before declaring infeasibility.
    pub k_max: f64,
    /// Cut-off fractions tried per point (empty = no cut-off).
    pub cutoff_fractions: Vec<f64>,
    /// Bright-state parameters tried per point (single click).
    pub alphas: Vec<f64>,
    /// Coincidence windows tried per point (trapped-ion double click).
    pub coincidence_windows: Vec<f64>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            factor_step: 2f64.sqrt(),
            k_max: 1e6,
            cutoff_fractions: vec![],
            alphas: vec![0.01, 0.05, 0.1, 0.3],
            coincidence_windows: vec![],
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepResult {
    pub parameter: ParamName,
    pub feasible: bool,
    /// Smallest swept value meeting both targets.
    pub minimal_value: Option<f64>,
    pub improvement_factor: Option<f64>,
    pub tunables: Option<Tunables>,
    /// (factor, value, best rate, best fidelity) per sweep point.
    pub trail: Vec<(f64, f64, f64, f64)>,
}

/// Sweeps `parameter` upward from baseline with all other parameters perfect,
/// returning the smallest value that meets both targets.
pub fn absolute_minimal_sweep(
    scenario: &Scenario,
    parameter: ParamName,
    config: &SweepConfig,
) -> Result<SweepResult, OptimizerError> {
    let mut perfect_scenario = scenario.clone();
    let baseline_value = scenario.baseline.get(parameter)?;
    perfect_scenario.baseline = scenario.baseline.perfected();
    perfect_scenario
        .baseline
        .set(parameter, baseline_value)?;

    let tunable_grid = build_tunable_grid(scenario, config);
    let mut trail = Vec::new();
    let mut k = 1.0;
    let mut step_index = 0u64;
    while k <= config.k_max {
        let value = improve_parameter(parameter, baseline_value, k)?;
        let mut best: Option<(f64, f64, Tunables)> = None;
        for tunables in &tunable_grid {
            let mut candidate = CandidateSolution::baseline_candidate(&[parameter]);
            candidate.factors.insert(parameter, k);
            candidate.tunables = *tunables;
            let eval = evaluate_candidate(&candidate, &perfect_scenario, step_index)?;
            step_index += 1;
            if eval.targets_met {
                return Ok(SweepResult {
                    parameter,
                    feasible: true,
                    minimal_value: Some(value),
                    improvement_factor: Some(k),
                    tunables: Some(*tunables),
                    trail,
                });
            }
            let better = best
                .as_ref()
                .is_none_or(|(r, f, _)| eval.rate_hz + eval.f_tel > r + f);
            if better {
                best = Some((eval.rate_hz, eval.f_tel, *tunables));
            }
        }
        let (rate, f_tel, _) = best.expect("grid is nonempty");
        trail.push((k, value, rate, f_tel));
        k *= config.factor_step;
    }
    Ok(SweepResult {
        parameter,
        feasible: false,
        minimal_value: None,
        improvement_factor: None,
        tunables: None,
        trail,
    })
}

fn build_tunable_grid(scenario: &Scenario, config: &SweepConfig) -> Vec<Tunables> {
    let cutoffs: Vec<Option<f64>> = if scenario.use_cutoff && !config.cutoff_fractions.is_empty()
    {
        config.cutoff_fractions.iter().map(|&f| Some(f)).collect()
    } else {
        vec![None]
    };
    let alphas: Vec<Option<f64>> = if scenario.scheme == SchemeKind::SingleClick {
        config.alphas.iter().map(|&a| Some(a)).collect()
    } else {
        vec![None]
    };
    let taus: Vec<Option<f64>> = if config.coincidence_windows.is_empty() {
        vec![None]
    } else {
        config
            .coincidence_windows
            .iter()
            .map(|&t| Some(t))
            .collect()
    };
    let mut grid = Vec::new();
    for &cutoff_fraction in &cutoffs {
        for &alpha in &alphas {
            for &coincidence_window in &taus {
                grid.push(Tunables {
                    cutoff_fraction,
                    alpha,
                    coincidence_window,
                });
            }
        }
    }
    grid
}
