//! End-to-end protocol behavior: frame tracking, timing, determinism and the
//! cut-off protocol.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use repeaterforge::engine::{
    agreement_handshake, compute_metrics, run_simulation, sample_swap, EngineError,
    EntanglementScheme, NetworkTopology, ProtocolConfig, Segment, SPEED_OF_LIGHT_M_PER_S,
};
use repeaterforge::hardware::{baseline, swap_circuit, HardwareParams, ParamName, PlatformKind};
use repeaterforge::linkmodels::sample_link;
use repeaterforge::qstate::{avg_teleportation_fidelity, bell_state, fidelity, BellIndex};

fn two_link_topology(short_km: f64, long_km: f64) -> NetworkTopology {
    let seg = |length_km: f64| Segment {
        length_km,
        attenuation_db_per_km: 0.2,
    };
    NetworkTopology {
        nodes: vec!["west-end".into(), "repeater".into(), "east-end".into()],
        links: vec![
            repeaterforge::engine::LinkSpec {
                station: "station-a".into(),
                segment_a: seg(short_km / 2.0),
                segment_b: seg(short_km / 2.0),
            },
            repeaterforge::engine::LinkSpec {
                station: "station-b".into(),
                segment_a: seg(long_km / 2.0),
                segment_b: seg(long_km / 2.0),
            },
        ],
        refractive_index: 1.44,
    }
}

fn one_link_topology(km: f64) -> NetworkTopology {
    let seg = |length_km: f64| Segment {
        length_km,
        attenuation_db_per_km: 0.2,
    };
    NetworkTopology {
        nodes: vec!["alice".into(), "bob".into()],
        links: vec![repeaterforge::engine::LinkSpec {
            station: "midpoint".into(),
            segment_a: seg(km / 2.0),
            segment_b: seg(km / 2.0),
        }],
        refractive_index: 1.44,
    }
}

/// Perfect hardware apart from fiber loss, with a boosted zero-distance
/// detection probability so runs stay short.
fn loss_only_cc() -> HardwareParams {
    baseline("cc-baseline").unwrap().perfected()
}

#[test]
fn frame_composition_corrects_to_phi_plus() {
    // Ideal links in every Pauli frame, every swap outcome: the XOR-composed
    // correction on the first qubit restores Φ+.
    let circuit = swap_circuit(&loss_only_cc()).unwrap();
    for f_long in BellIndex::ALL {
        for f_short in BellIndex::ALL {
            let long_state = bell_state::<f64>(f_long);
            let short_state = bell_state::<f64>(f_short);
            let mut rng = ChaCha12Rng::seed_from_u64(7);
            for _ in 0..16 {
                let (outcome, swapped) =
                    sample_swap(&long_state, &short_state, &circuit, &mut rng).unwrap();
                let frame = f_long.compose(f_short).compose(outcome);
                let corrected = swapped
                    .apply_unitary(
                        &repeaterforge::qstate::ops::pauli_frame::<f64>(frame),
                        &[0],
                    )
                    .unwrap();
                let f = fidelity(&corrected, &bell_state::<f64>(BellIndex::new(0, 0))).unwrap();
                assert!(
                    (f - 1.0).abs() < 1e-10,
                    "frames {f_long:?}+{f_short:?}, outcome {outcome:?}: fidelity {f}"
                );
            }
        }
    }
}

#[test]
fn repeaterless_completion_time_is_hand_checkable() {
    let topo = one_link_topology(10.0);
    let params = loss_only_cc();
    let protocol = ProtocolConfig {
        n_pairs: 1,
        seed: 11,
        collect_trace: true,
        ..ProtocolConfig::default()
    };
    let output = run_simulation(&topo, &params, &protocol).unwrap();
    assert_eq!(output.deliveries.len(), 1);
    let record = &output.deliveries[0];

    // Replay the link sample with the same stream the engine uses.
    let p_det = 1.0 * 10f64.powf(-0.2 * 5.0 / 10.0);
    let success = 0.5 * p_det * p_det;
    let one_way = 10.0 * 1000.0 * 1.44 / SPEED_OF_LIGHT_M_PER_S;
    let attempt = 2e-6 + 3.8e-6 + 2.0 * (5.0 * 1000.0 * 1.44 / SPEED_OF_LIGHT_M_PER_S);
    let mut rng = ChaCha12Rng::seed_from_u64(11);
    let sample = sample_link(success, attempt, &mut rng).unwrap();
    let expected = 2.0 * one_way + sample.delay;
    assert!(
        (record.completion_time - expected).abs() < 1e-12,
        "completion {} vs hand-computed {expected}",
        record.completion_time
    );
    assert_eq!(record.attempts_long, sample.n_attempts);
    // One classical round trip of handshaking precedes the first attempt.
    assert!(record.completion_time > 2.0 * one_way);
}

#[test]
fn same_seed_reproduces_byte_identical_output() {
    let topo = two_link_topology(8.0, 14.0);
    let params = loss_only_cc();
    let protocol = ProtocolConfig {
        n_pairs: 5,
        seed: 99,
        collect_trace: true,
        ..ProtocolConfig::default()
    };
    let a = run_simulation(&topo, &params, &protocol).unwrap();
    let b = run_simulation(&topo, &params, &protocol).unwrap();
    assert_eq!(
        serde_json::to_string(&a.deliveries).unwrap(),
        serde_json::to_string(&b.deliveries).unwrap()
    );
    assert_eq!(a.trace, b.trace);
    let c = run_simulation(
        &topo,
        &params,
        &ProtocolConfig {
            seed: 100,
            ..protocol
        },
    )
    .unwrap();
    assert_ne!(
        serde_json::to_string(&a.deliveries).unwrap(),
        serde_json::to_string(&c.deliveries).unwrap()
    );
}

#[test]
fn trace_times_are_monotone_and_after_fiber_delays() {
    let topo = two_link_topology(8.0, 14.0);
    let params = loss_only_cc();
    let protocol = ProtocolConfig {
        n_pairs: 3,
        seed: 5,
        collect_trace: true,
        ..ProtocolConfig::default()
    };
    let output = run_simulation(&topo, &params, &protocol).unwrap();
    let mut last = 0.0;
    for line in &output.trace {
        let t: f64 = line.split_whitespace().next().unwrap().parse().unwrap();
        assert!(t >= last, "trace time went backwards: {line}");
        last = t;
    }
    // No event precedes the first possible message arrival.
    let first_recv = output
        .trace
        .iter()
        .find(|l| l.contains("recv"))
        .unwrap()
        .split_whitespace()
        .next()
        .unwrap()
        .parse::<f64>()
        .unwrap();
    // Trace timestamps round to nanoseconds.
    assert!(first_recv >= topo.path_delay() - 1e-9);
}

#[test]
fn perfect_hardware_end_to_end_double_click() {
    let topo = two_link_topology(10.0, 18.0);
    let params = loss_only_cc();
    let protocol = ProtocolConfig {
        n_pairs: 8,
        seed: 3,
        ..ProtocolConfig::default()
    };
    let output = run_simulation(&topo, &params, &protocol).unwrap();
    for record in &output.deliveries {
        let f = avg_teleportation_fidelity(&record.corrected_state).unwrap();
        assert!((f - 1.0).abs() < 1e-9, "pair {}: F_tel {f}", record.pair_index);
    }
    // Completion times strictly increase.
    for pair in output.deliveries.windows(2) {
        assert!(pair[1].completion_time > pair[0].completion_time);
    }
}

#[test]
fn perfect_hardware_end_to_end_single_click() {
    let topo = two_link_topology(10.0, 18.0);
    let params = loss_only_cc();
    let protocol = ProtocolConfig {
        scheme: EntanglementScheme::SingleClick { alpha: 1e-10 },
        n_pairs: 4,
        seed: 3,
        ..ProtocolConfig::default()
    };
    let output = run_simulation(&topo, &params, &protocol).unwrap();
    for record in &output.deliveries {
        let f = avg_teleportation_fidelity(&record.corrected_state).unwrap();
        assert!((f - 1.0).abs() < 1e-9, "pair {}: F_tel {f}", record.pair_index);
    }
}

#[test]
fn infinite_cutoff_never_discards() {
    let topo = two_link_topology(8.0, 14.0);
    let params = baseline("cc-baseline").unwrap().perfected();
    let protocol = ProtocolConfig {
        cutoff_time: Some(1e12),
        n_pairs: 10,
        seed: 21,
        ..ProtocolConfig::default()
    };
    let output = run_simulation(&topo, &params, &protocol).unwrap();
    assert_eq!(output.discards, 0);
    assert_eq!(output.deliveries.len(), 10);
}

#[test]
fn impossible_cutoff_never_delivers() {
    let topo = two_link_topology(8.0, 14.0);
    let mut params = baseline("cc-baseline").unwrap().perfected();
    // Make the short link slow enough that one attempt exceeds the cut-off.
    params
        .set(ParamName::DetectionProbZeroDistance, 0.05)
        .unwrap();
    let protocol = ProtocolConfig {
        cutoff_time: Some(1e-9),
        n_pairs: 1,
        seed: 2,
        max_rounds: 2000,
        ..ProtocolConfig::default()
    };
    match run_simulation(&topo, &params, &protocol) {
        Err(EngineError::MaxRoundsExceeded { delivered, .. }) => assert_eq!(delivered, 0),
        other => panic!("expected round budget exhaustion, got {other:?}"),
    }
}

#[test]
fn storage_time_respects_cutoff() {
    let topo = two_link_topology(8.0, 14.0);
    let mut params = baseline("cc-baseline").unwrap().perfected();
    params
        .set(ParamName::DetectionProbZeroDistance, 0.6)
        .unwrap();
    let cutoff = 0.02;
    let protocol = ProtocolConfig {
        cutoff_time: Some(cutoff),
        n_pairs: 20,
        seed: 8,
        ..ProtocolConfig::default()
    };
    let output = run_simulation(&topo, &params, &protocol).unwrap();
    assert_eq!(output.deliveries.len(), 20);
    for record in &output.deliveries {
        assert!(
            record.storage_time <= cutoff + 1e-12,
            "stored {}s beyond the {cutoff}s cut-off",
            record.storage_time
        );
    }
}

#[test]
fn handshake_delay_examples() {
    // Fiber of length L adds one round trip before the first attempt.
    let l_km = 25.0;
    let delay = l_km * 1000.0 * 1.44 / SPEED_OF_LIGHT_M_PER_S;
    let (a, b) = agreement_handshake(0.0, 0.0, delay);
    assert_eq!(a, b);
    assert!((a - 2.0 * delay).abs() < 1e-18);
    // Zero-length fiber adds nothing.
    let (z, _) = agreement_handshake(3.0, 0.0, 0.0);
    assert_eq!(z, 3.0);
    // A busy responder defers the epoch.
    let (busy, _) = agreement_handshake(0.0, 10.0, delay);
    assert!((busy - (10.0 + delay)).abs() < 1e-18);
}

#[test]
fn metrics_from_simulation_records() {
    let topo = two_link_topology(8.0, 14.0);
    let params = loss_only_cc();
    let protocol = ProtocolConfig {
        n_pairs: 12,
        seed: 17,
        ..ProtocolConfig::default()
    };
    let output = run_simulation(&topo, &params, &protocol).unwrap();
    let metrics = compute_metrics(&output.deliveries, 100.0).unwrap();
    assert_eq!(metrics.n_pairs, 12);
    assert!((metrics.f_tel - 1.0).abs() < 1e-9);
    assert!(metrics.rate_hz > 0.0);
    assert!(metrics.sem_rate >= 0.0);
}

#[test]
fn trapped_ion_baseline_runs_with_coincidence_window() {
    let topo = two_link_topology(4.0, 6.0);
    let params = baseline("ti-baseline").unwrap();
    let protocol = ProtocolConfig {
        scheme: EntanglementScheme::DoubleClick {
            coincidence_window: Some(0.5e-6),
        },
        n_pairs: 4,
        seed: 31,
        ..ProtocolConfig::default()
    };
    let output = run_simulation(&topo, &params, &protocol).unwrap();
    assert_eq!(output.deliveries.len(), 4);
    for record in &output.deliveries {
        let f = avg_teleportation_fidelity(&record.corrected_state).unwrap();
        assert!(f > 0.25 && f <= 1.0, "F_tel {f} out of range");
    }
}

#[test]
fn single_click_rejected_for_trapped_ions() {
    let topo = two_link_topology(4.0, 6.0);
    let params = baseline("ti-baseline").unwrap();
    let protocol = ProtocolConfig {
        scheme: EntanglementScheme::SingleClick { alpha: 0.1 },
        n_pairs: 1,
        seed: 1,
        ..ProtocolConfig::default()
    };
    assert!(matches!(
        run_simulation(&topo, &params, &protocol),
        Err(EngineError::BadConfig(_))
    ));
}

#[test]
fn move_scenario_changes_but_still_delivers() {
    let topo = two_link_topology(10.0, 18.0);
    let params = baseline("cc-baseline").unwrap();
    let base = ProtocolConfig {
        n_pairs: 4,
        seed: 13,
        collect_trace: true,
        ..ProtocolConfig::default()
    };
    let no_move = run_simulation(&topo, &params, &base).unwrap();
    assert!(!no_move
        .trace
        .iter()
        .any(|l| l.contains("end-node move")));
    let with_move = run_simulation(
        &topo,
        &params,
        &ProtocolConfig {
            move_end_node_to_memory: true,
            ..base
        },
    )
    .unwrap();
    assert_eq!(with_move.deliveries.len(), 4);
    // Same seeds: identical attempt counts, different corrected states
    // (extra move noise).
    for (a, b) in no_move.deliveries.iter().zip(with_move.deliveries.iter()) {
        assert_eq!(a.attempts_long, b.attempts_long);
        assert_eq!(a.attempts_short, b.attempts_short);
    }
}
