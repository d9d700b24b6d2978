//! Aggregation of delivery records into rate and fidelity metrics.

use serde::{Deserialize, Serialize};

use crate::qstate::avg_teleportation_fidelity;
use crate::targetmetric::{targets_met, vbqc_min_fidelity, PerformanceTarget, TargetMargins};

use super::protocol::DeliveryRecord;
use super::EngineError;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub n_pairs: usize,
    pub rate_hz: f64,
    pub f_tel: f64,
    pub sem_rate: f64,
    pub sem_f_tel: f64,
    /// Minimum teleportation fidelity that would support VBQC at the
    /// achieved rate and the given server coherence time.
    pub min_fidelity_bound: f64,
}

impl Metrics {
    pub fn against(&self, target: &PerformanceTarget) -> TargetMargins {
        targets_met(self.rate_hz, self.f_tel, target)
    }
}

/// Computes the entangling rate (pairs per second of simulated time) and the
/// mean average-teleportation-fidelity of the corrected states, with
/// standard errors of the mean.
pub fn compute_metrics(
    records: &[DeliveryRecord],
    server_coherence_time: f64,
) -> Result<Metrics, EngineError> {
    if records.len() < 2 {
        return Err(EngineError::NotEnoughRecords {
            found: records.len(),
        });
    }
    let n = records.len();
    let last = records
        .last()
        .expect("nonempty")
        .completion_time;
    let rate = n as f64 / last;
    // Inter-delivery intervals for the rate uncertainty.
    let mut deltas = Vec::with_capacity(n);
    let mut prev = 0.0;
    for r in records {
        deltas.push(r.completion_time - prev);
        prev = r.completion_time;
    }
    let mean_delta = last / n as f64;
    let var_delta =
        deltas.iter().map(|d| (d - mean_delta).powi(2)).sum::<f64>() / (n as f64 - 1.0);
    let sem_delta = (var_delta / n as f64).sqrt();
    let sem_rate = sem_delta / (mean_delta * mean_delta);

    let fidelities: Vec<f64> = records
        .iter()
        .map(|r| avg_teleportation_fidelity(&r.corrected_state))
        .collect::<Result<_, _>>()?;
    let f_mean = fidelities.iter().sum::<f64>() / n as f64;
    let f_var =
        fidelities.iter().map(|f| (f - f_mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
    let sem_f = (f_var / n as f64).sqrt();
    let bound = vbqc_min_fidelity(rate, server_coherence_time).unwrap_or(f64::NAN);
    Ok(Metrics {
        n_pairs: n,
        rate_hz: rate,
        f_tel: f_mean,
        sem_rate,
        sem_f_tel: sem_f,
        min_fidelity_bound: bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{bell_state, BellIndex};

    fn synthetic_record(idx: usize, t: f64, bell_fraction: f64) -> DeliveryRecord {
        let phi = bell_state::<f64>(BellIndex::new(0, 0));
        let mixed = crate::qstate::DensityMatrix::maximally_mixed(2);
        let w = 4.0 / 3.0 * (bell_fraction - 0.25);
        let state = crate::qstate::DensityMatrix::new(
            phi.matrix()
                .scale_re(w)
                .add(&mixed.matrix().scale_re(1.0 - w)),
        )
        .unwrap();
        DeliveryRecord {
            pair_index: idx,
            completion_time: t,
            corrected_state: state,
            frame: BellIndex::new(0, 0),
            attempts_long: 1,
            attempts_short: 1,
            storage_time: 0.0,
        }
    }

    #[test]
    fn perfect_states_give_unit_fidelity() {
        let records: Vec<_> = (0..5)
            .map(|i| synthetic_record(i, (i + 1) as f64, 1.0))
            .collect();
        let m = compute_metrics(&records, 100.0).unwrap();
        assert!((m.f_tel - 1.0).abs() < 1e-12);
        assert!((m.rate_hz - 1.0).abs() < 1e-12);
        assert!(m.sem_f_tel < 1e-12);
    }

    #[test]
    fn known_mixture_recomputes_by_hand() {
        // Werner fractions 1.0 and 0.7 alternate: F_tel = (2F+1)/3 averages.
        let records: Vec<_> = (0..4)
            .map(|i| synthetic_record(i, (i + 1) as f64 * 2.0, if i % 2 == 0 { 1.0 } else { 0.7 }))
            .collect();
        let m = compute_metrics(&records, 100.0).unwrap();
        let expect = (1.0 + 0.8 + 1.0 + 0.8) / 4.0;
        assert!((m.f_tel - expect).abs() < 1e-12);
        assert!((m.rate_hz - 4.0 / 8.0).abs() < 1e-12);
        let margins = m.against(&PerformanceTarget::target_one());
        assert!(margins.met);
    }

    #[test]
    fn too_few_records_rejected() {
        let records = vec![synthetic_record(0, 1.0, 1.0)];
        assert!(matches!(
            compute_metrics(&records, 100.0),
            Err(EngineError::NotEnoughRecords { .. })
        ));
    }
}
