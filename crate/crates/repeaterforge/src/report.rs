//! Replay-sufficient result persistence: every output embeds the config
//! hash, seed and code version. JSON results follow the shipped schema;
//! the CSV summary has one row per expanded config with stable columns.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::ScenarioConfig;
use crate::engine::{compute_metrics, run_simulation, DeliveryRecord, Metrics};
use crate::engine::EngineError;
use crate::targetmetric::TargetMargins;

/// JSON schema the [`RunReport`] serialization conforms to.
pub const OUTPUT_SCHEMA: &str = include_str!("../schemas/output-schema.json");

/// Stable CSV header for simulation summaries.
pub const CSV_HEADER: &str = "name,seed,config_hash,n_runs,n_pairs,rate_hz,sem_rate,f_tel,sem_f_tel,min_fidelity_bound,target_rate_hz,target_f_tel,met";

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunMetrics {
    pub seed: u64,
    pub metrics: Metrics,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunReport {
    pub name: String,
    pub config_hash: String,
    pub seed: u64,
    pub version: String,
    pub metrics: Metrics,
    pub target: crate::targetmetric::PerformanceTarget,
    pub margins: TargetMargins,
    pub runs: Vec<RunMetrics>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deliveries: Option<Vec<DeliveryRecord>>,
}

pub fn config_hash(config: &ScenarioConfig) -> String {
    let mut hasher = Sha256::new();
    hasher.update(config.canonical().as_bytes());
    hex_string(&hasher.finalize())
}

fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Runs a scenario `n_runs` times with derived seeds, aggregates across runs
/// and assembles the replayable report.
pub fn simulate_report(
    config: &ScenarioConfig,
    keep_deliveries: bool,
) -> Result<RunReport, EngineError> {
    let topology = config
        .to_topology()
        .map_err(|e| EngineError::BadConfig(e.to_string()))?;
    let hardware = config
        .to_hardware()
        .map_err(|e| EngineError::BadConfig(e.to_string()))?;
    let mut runs = Vec::with_capacity(config.n_runs);
    let mut all_deliveries = Vec::new();
    let mut rates = Vec::new();
    let mut fids = Vec::new();
    for run in 0..config.n_runs {
        let mut protocol = config.to_protocol();
        protocol.seed = config
            .seed
            .wrapping_add(run as u64 * 0x2545_f491_4f6c_dd1d);
        let output = run_simulation(&topology, &hardware, &protocol)?;
        let metrics = compute_metrics(&output.deliveries, config.target.server_coherence_time)?;
        rates.push(metrics.rate_hz);
        fids.push(metrics.f_tel);
        runs.push(RunMetrics {
            seed: protocol.seed,
            metrics,
        });
        if keep_deliveries {
            all_deliveries.extend(output.deliveries);
        }
    }
    let n = runs.len() as f64;
    let rate = rates.iter().sum::<f64>() / n;
    let f_tel = fids.iter().sum::<f64>() / n;
    let sem = |xs: &[f64], mean: f64| {
        if xs.len() < 2 {
            return 0.0;
        }
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (var / n).sqrt()
    };
    let bound =
        crate::targetmetric::vbqc_min_fidelity(rate, config.target.server_coherence_time)
            .unwrap_or(f64::NAN);
    let metrics = Metrics {
        n_pairs: config.protocol.n_pairs,
        rate_hz: rate,
        f_tel,
        sem_rate: sem(&rates, rate),
        sem_f_tel: sem(&fids, f_tel),
        min_fidelity_bound: bound,
    };
    let margins = crate::targetmetric::targets_met(rate, f_tel, &config.target);
    Ok(RunReport {
        name: config.name.clone(),
        config_hash: config_hash(config),
        seed: config.seed,
        version: env!("CARGO_PKG_VERSION").to_string(),
        metrics,
        target: config.target,
        margins,
        runs,
        deliveries: keep_deliveries.then_some(all_deliveries),
    })
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{:.10e},{:.10e},{:.10},{:.10e},{:.10},{},{},{}",
            self.name,
            self.seed,
            self.config_hash,
            self.runs.len(),
            self.metrics.n_pairs,
            self.metrics.rate_hz,
            self.metrics.sem_rate,
            self.metrics.f_tel,
            self.metrics.sem_f_tel,
            self.metrics.min_fidelity_bound,
            self.target.rate_hz,
            self.target.f_tel,
            self.margins.met
        )
    }
}
