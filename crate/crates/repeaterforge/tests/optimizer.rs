//! Optimizer behavior: GA convergence against a grid-search oracle,
//! determinism, VAR termination and the minimal-requirement sweep.

use repeaterforge::engine::{LinkSpec, NetworkTopology, Segment};
use repeaterforge::hardware::{baseline, HardwareParams, ParamName};
use repeaterforge::optimizer::{
    absolute_minimal_sweep, evaluate_candidate, genetic_optimize, CandidateSolution, CostWeights,
    GaConfig, Scenario, SchemeKind, SweepConfig,
};
use repeaterforge::targetmetric::PerformanceTarget;

fn toy_topology() -> NetworkTopology {
    let seg = |length_km: f64| Segment {
        length_km,
        attenuation_db_per_km: 0.2,
    };
    NetworkTopology {
        nodes: vec!["a".into(), "r".into(), "b".into()],
        links: vec![
            LinkSpec {
                station: "s1".into(),
                segment_a: seg(2.0),
                segment_b: seg(2.0),
            },
            LinkSpec {
                station: "s2".into(),
                segment_a: seg(3.0),
                segment_b: seg(3.0),
            },
        ],
        refractive_index: 1.44,
    }
}

/// Single-parameter scenario: everything perfect except the detection
/// probability, which starts low; only the rate target binds.
fn toy_scenario() -> Scenario {
    let mut params: HardwareParams = baseline("cc-baseline").unwrap().perfected();
    params
        .set(ParamName::DetectionProbZeroDistance, 0.02)
        .unwrap();
    Scenario {
        topology: toy_topology(),
        baseline: params,
        scheme: SchemeKind::DoubleClick,
        move_end_node_to_memory: false,
        use_cutoff: false,
        n_pairs: 6,
        n_runs: 3,
        base_seed: 424242,
        target: PerformanceTarget {
            f_tel: 0.5,
            rate_hz: 20.0,
            server_coherence_time: 100.0,
        },
        weights: CostWeights::default(),
        max_rounds: 100_000,
        improvable: Some(vec![ParamName::DetectionProbZeroDistance]),
    }
}

#[test]
fn ga_matches_grid_search_oracle() {
    let scenario = toy_scenario();
    // Grid-search oracle over the single improvement factor.
    let mut oracle_best: Option<(f64, f64)> = None;
    let mut k = 1.0f64;
    let mut idx = 0u64;
    while k < 1e3 {
        let mut candidate =
            CandidateSolution::baseline_candidate(&[ParamName::DetectionProbZeroDistance]);
        candidate
            .factors
            .insert(ParamName::DetectionProbZeroDistance, k);
        let eval = evaluate_candidate(&candidate, &scenario, 1_000_000 + idx).unwrap();
        idx += 1;
        if oracle_best.map_or(true, |(c, _)| eval.cost < c) {
            oracle_best = Some((eval.cost, k));
        }
        k *= 1.05;
    }
    let (oracle_cost, oracle_k) = oracle_best.unwrap();
    assert!(oracle_cost < 1e10, "oracle never met the targets");

    let config = GaConfig {
        population: 20,
        generations: 30,
        seed: 7,
        k_init_max: 1e3,
        ..GaConfig::default()
    };
    let result = genetic_optimize(&scenario, &config).unwrap();
    let best_cost = result.history.last().unwrap().best_cost;
    assert!(
        best_cost <= oracle_cost * 1.05,
        "GA cost {best_cost} not within 5% of grid-search optimum {oracle_cost} (k* = {oracle_k})"
    );
    assert!(result.best.evaluation.unwrap().targets_met);
}

#[test]
fn ga_history_is_deterministic_and_elitist() {
    let scenario = toy_scenario();
    let config = GaConfig {
        population: 8,
        generations: 6,
        seed: 3,
        ..GaConfig::default()
    };
    let a = genetic_optimize(&scenario, &config).unwrap();
    let b = genetic_optimize(&scenario, &config).unwrap();
    assert_eq!(
        serde_json::to_string(&a.history).unwrap(),
        serde_json::to_string(&b.history).unwrap()
    );
    let mut last = f64::INFINITY;
    for record in &a.history {
        assert!(record.best_cost <= last, "best-so-far cost increased");
        last = record.best_cost;
    }
}

#[test]
fn var_at_full_tolerance_stops_at_generation_sixteen() {
    let scenario = toy_scenario();
    let config = GaConfig {
        population: 6,
        generations: 40,
        var_tolerance: Some(1.0),
        seed: 11,
        ..GaConfig::default()
    };
    let result = genetic_optimize(&scenario, &config).unwrap();
    assert!(result.terminated_by_var);
    assert_eq!(result.history.len(), 16);
}

#[test]
fn sweep_finds_analytic_threshold() {
    let scenario = toy_scenario();
    let config = SweepConfig {
        factor_step: 2f64.sqrt(),
        k_max: 1e4,
        ..SweepConfig::default()
    };
    let result =
        absolute_minimal_sweep(&scenario, ParamName::DetectionProbZeroDistance, &config).unwrap();
    assert!(result.feasible, "sweep should find the threshold");
    let k_sweep = result.improvement_factor.unwrap();

    // Independent fine-grid threshold.
    let mut k_fine = 1.0f64;
    let mut threshold = None;
    let mut idx = 0;
    while k_fine < 1e4 {
        let mut candidate =
            CandidateSolution::baseline_candidate(&[ParamName::DetectionProbZeroDistance]);
        candidate
            .factors
            .insert(ParamName::DetectionProbZeroDistance, k_fine);
        let eval = evaluate_candidate(&candidate, &scenario, 2_000_000 + idx).unwrap();
        idx += 1;
        if eval.targets_met {
            threshold = Some(k_fine);
            break;
        }
        k_fine *= 1.02;
    }
    let k_star = threshold.expect("fine grid finds a threshold");
    // Agreement within one coarse grid step (plus sampling noise slack).
    assert!(
        k_sweep <= k_star * config.factor_step * 1.1 && k_sweep * config.factor_step * 1.1 >= k_star,
        "sweep threshold k = {k_sweep} vs fine-grid k* = {k_star}"
    );
}

#[test]
fn sweep_returns_baseline_when_sufficient() {
    let mut scenario = toy_scenario();
    scenario.target.rate_hz = 1e-6; // trivially met at baseline
    let result = absolute_minimal_sweep(
        &scenario,
        ParamName::DetectionProbZeroDistance,
        &SweepConfig::default(),
    )
    .unwrap();
    assert!(result.feasible);
    assert_eq!(result.improvement_factor, Some(1.0));
    assert!((result.minimal_value.unwrap() - 0.02).abs() < 1e-12);
}

#[test]
fn sweep_reports_infeasible_targets() {
    let mut scenario = toy_scenario();
    scenario.target.rate_hz = 1e9; // beyond any detection probability
    let config = SweepConfig {
        k_max: 64.0,
        ..SweepConfig::default()
    };
    let result =
        absolute_minimal_sweep(&scenario, ParamName::DetectionProbZeroDistance, &config).unwrap();
    assert!(!result.feasible);
    assert!(result.minimal_value.is_none());
    assert!(!result.trail.is_empty());
}
