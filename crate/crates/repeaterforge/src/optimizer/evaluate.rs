//! Candidate evaluation: apply improvement factors, configure tunables, run
//! the simulation repeatedly and aggregate.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::{
    compute_metrics, run_simulation, EngineError, EntanglementScheme, NetworkTopology,
    ProtocolConfig,
};
use crate::hardware::{HardwareParams, ParamName, PlatformKind};
use crate::targetmetric::PerformanceTarget;

use super::cost::{hardware_cost, total_cost, CostWeights};
use super::improve::improve_parameter;
use super::OptimizerError;

/// Which generation scheme a scenario runs (the tunables differ).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeKind {
    DoubleClick,
    SingleClick,
}

/// A reproducible optimization scenario.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Scenario {
    pub topology: NetworkTopology,
    pub baseline: HardwareParams,
    pub scheme: SchemeKind,
    pub move_end_node_to_memory: bool,
    pub use_cutoff: bool,
    pub n_pairs: usize,
    pub n_runs: usize,
    pub base_seed: u64,
    pub target: PerformanceTarget,
    pub weights: CostWeights,
    /// Round budget per simulation run.
    pub max_rounds: u64,
    /// Overrides the platform's default improvable-parameter set.
    pub improvable: Option<Vec<ParamName>>,
}

impl Scenario {
    pub fn improvable_params(&self) -> Vec<ParamName> {
        self.improvable
            .clone()
            .unwrap_or_else(|| super::improve::improvable_params(self.baseline.platform).to_vec())
    }
}

/// Protocol tunables co-optimized with the hardware factors.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, Default)]
pub struct Tunables {
    /// Cut-off as a fraction of the storage coherence time, in [0.1, 1].
    pub cutoff_fraction: Option<f64>,
    /// Bright-state parameter of the most lossy segment (single click).
    pub alpha: Option<f64>,
    /// Coincidence time window (trapped-ion double click).
    pub coincidence_window: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub rate_hz: f64,
    pub f_tel: f64,
    pub sem_rate: f64,
    pub sem_f_tel: f64,
    pub hardware_cost: f64,
    pub cost: f64,
    pub targets_met: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CandidateSolution {
    /// Improvement factor per parameter, all ≥ 1.
    pub factors: BTreeMap<ParamName, f64>,
    pub tunables: Tunables,
    pub evaluation: Option<Evaluation>,
}

impl CandidateSolution {
    pub fn baseline_candidate(params: &[ParamName]) -> Self {
        Self {
            factors: params.iter().map(|&p| (p, 1.0)).collect(),
            tunables: Tunables::default(),
            evaluation: None,
        }
    }

    pub fn hardware_cost(&self) -> f64 {
        hardware_cost(self.factors.values())
    }
}

/// The coherence time that anchors the cut-off interval [0.1 T_C, T_C].
pub fn storage_coherence_time(params: &HardwareParams) -> Result<f64, EngineError> {
    Ok(match params.platform {
        PlatformKind::ColorCenter => params.get(ParamName::CarbonT2)?,
        PlatformKind::TrappedIon => params.get(ParamName::CoherenceTime)?,
        PlatformKind::Abstract => params.get(ParamName::MemoryT2)?,
    })
}

/// Applies a candidate's improvement factors to the scenario baseline.
pub fn improved_params(
    baseline: &HardwareParams,
    factors: &BTreeMap<ParamName, f64>,
) -> Result<HardwareParams, OptimizerError> {
    let mut out = baseline.clone();
    for (&name, &k) in factors {
        let base = out.get(name)?;
        let value = improve_parameter(name, base, k)?;
        out.set(name, value)?;
    }
    Ok(out)
}

fn protocol_for(
    scenario: &Scenario,
    tunables: &Tunables,
    improved: &HardwareParams,
    seed: u64,
) -> Result<ProtocolConfig, OptimizerError> {
    let scheme = match scenario.scheme {
        SchemeKind::DoubleClick => EntanglementScheme::DoubleClick {
            coincidence_window: tunables.coincidence_window,
        },
        SchemeKind::SingleClick => EntanglementScheme::SingleClick {
            alpha: tunables.alpha.unwrap_or(0.1),
        },
    };
    let cutoff_time = if scenario.use_cutoff {
        let fraction = tunables.cutoff_fraction.unwrap_or(1.0).clamp(0.1, 1.0);
        Some(fraction * storage_coherence_time(improved)?)
    } else {
        None
    };
    Ok(ProtocolConfig {
        scheme,
        cutoff_time,
        move_end_node_to_memory: scenario.move_end_node_to_memory,
        n_pairs: scenario.n_pairs,
        seed,
        max_rounds: scenario.max_rounds,
        collect_trace: false,
    })
}

/// Runs the scenario `n_runs` times for one candidate and aggregates rate,
/// fidelity and cost. Runs evaluate in parallel and merge by index, so the
/// result is independent of scheduling. A run that exhausts its round budget
/// scores zero rate and fidelity instead of aborting the search.
pub fn evaluate_candidate(
    candidate: &CandidateSolution,
    scenario: &Scenario,
    eval_seed: u64,
) -> Result<Evaluation, OptimizerError> {
    if scenario.n_runs < 2 {
        return Err(OptimizerError::BadConfig(
            "candidate evaluation needs at least 2 runs".into(),
        ));
    }
    let improved = improved_params(&scenario.baseline, &candidate.factors)?;
    let results: Vec<Result<(f64, f64), OptimizerError>> = (0..scenario.n_runs)
        .into_par_iter()
        .map(|run| {
            let seed = scenario
                .base_seed
                .wrapping_add(eval_seed.wrapping_mul(0x9e37_79b9_7f4a_7c15))
                .wrapping_add(run as u64 * 0x2545_f491_4f6c_dd1d);
            let protocol = protocol_for(scenario, &candidate.tunables, &improved, seed)?;
            match run_simulation(&scenario.topology, &improved, &protocol) {
                Ok(output) => {
                    let metrics = compute_metrics(
                        &output.deliveries,
                        scenario.target.server_coherence_time,
                    )?;
                    Ok((metrics.rate_hz, metrics.f_tel))
                }
                Err(EngineError::MaxRoundsExceeded { .. }) => Ok((0.0, 0.0)),
                Err(e) => Err(e.into()),
            }
        })
        .collect();
    let mut rates = Vec::with_capacity(scenario.n_runs);
    let mut fids = Vec::with_capacity(scenario.n_runs);
    for r in results {
        let (rate, f) = r?;
        rates.push(rate);
        fids.push(f);
    }
    let n = rates.len() as f64;
    let rate = rates.iter().sum::<f64>() / n;
    let f_tel = fids.iter().sum::<f64>() / n;
    let sem = |xs: &[f64], mean: f64| {
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (var / n).sqrt()
    };
    let h_c = candidate.hardware_cost();
    let cost = total_cost(f_tel, rate, h_c, &scenario.target, &scenario.weights);
    let met = crate::targetmetric::targets_met(rate, f_tel, &scenario.target).met;
    Ok(Evaluation {
        rate_hz: rate,
        f_tel,
        sem_rate: sem(&rates, rate),
        sem_f_tel: sem(&fids, f_tel),
        hardware_cost: h_c,
        cost,
        targets_met: met,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{LinkSpec, Segment};
    use crate::hardware::baseline;

    pub(crate) fn short_topology() -> NetworkTopology {
        let seg = |length_km: f64| Segment {
            length_km,
            attenuation_db_per_km: 0.2,
        };
        NetworkTopology {
            nodes: vec!["a".into(), "r".into(), "b".into()],
            links: vec![
                LinkSpec {
                    station: "s1".into(),
                    segment_a: seg(4.0),
                    segment_b: seg(4.0),
                },
                LinkSpec {
                    station: "s2".into(),
                    segment_a: seg(6.0),
                    segment_b: seg(6.0),
                },
            ],
            refractive_index: 1.44,
        }
    }

    fn scenario() -> Scenario {
        Scenario {
            topology: short_topology(),
            baseline: baseline("cc-baseline").unwrap(),
            scheme: SchemeKind::DoubleClick,
            move_end_node_to_memory: false,
            use_cutoff: false,
            n_pairs: 6,
            n_runs: 4,
            base_seed: 1234,
            target: PerformanceTarget::target_one(),
            weights: CostWeights::default(),
            max_rounds: 1_000_000,
            improvable: None,
        }
    }

    #[test]
    fn perfect_surrogate_reaches_unit_fidelity() {
        let mut sc = scenario();
        sc.baseline = sc.baseline.perfected();
        let candidate =
            CandidateSolution::baseline_candidate(super::super::improve::improvable_params(
                PlatformKind::ColorCenter,
            ));
        let eval = evaluate_candidate(&candidate, &sc, 0).unwrap();
        assert!((eval.f_tel - 1.0).abs() < 1e-9, "F_tel {}", eval.f_tel);
        assert!(eval.rate_hz > 0.0);
    }

    #[test]
    fn deterministic_seed_reproduces_cost() {
        let sc = scenario();
        let mut candidate =
            CandidateSolution::baseline_candidate(super::super::improve::improvable_params(
                PlatformKind::ColorCenter,
            ));
        candidate.factors.insert(ParamName::DetectionProbZeroDistance, 40.0);
        let a = evaluate_candidate(&candidate, &sc, 7).unwrap();
        let b = evaluate_candidate(&candidate, &sc, 7).unwrap();
        assert_eq!(a, b);
        let c = evaluate_candidate(&candidate, &sc, 8).unwrap();
        assert!(a.cost != c.cost || a.rate_hz != c.rate_hz);
    }

    #[test]
    fn improved_params_apply_factors() {
        let sc = scenario();
        let mut factors = BTreeMap::new();
        factors.insert(ParamName::CarbonT2, 3.0);
        factors.insert(ParamName::DetectionProbZeroDistance, 2.0);
        let improved = improved_params(&sc.baseline, &factors).unwrap();
        assert_eq!(improved.get(ParamName::CarbonT2).unwrap(), 3.0);
        let expect = 5.1e-4f64.powf(0.5);
        assert!(
            (improved.get(ParamName::DetectionProbZeroDistance).unwrap() - expect).abs() < 1e-12
        );
    }
}
