//! Human-readable scenario configuration (YAML) and its expansion into
//! runtime objects. Unknown fields are rejected; every cross-reference is
//! resolved at load time; parameter-sweep stanzas expand one config into
//! many.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{
    EntanglementScheme, LinkSpec, NetworkTopology, ProtocolConfig, Segment,
    DEFAULT_REFRACTIVE_INDEX,
};
use crate::hardware::{baseline, HardwareError, HardwareParams, ParamName, PlatformKind};
use crate::optimizer::{CostWeights, GaConfig, Scenario, SchemeKind};
use crate::targetmetric::PerformanceTarget;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("config parse error: {0}")]
    Parse(#[from] serde_yaml::Error),
    #[error("field {field}: {problem}")]
    Invalid { field: String, problem: String },
    #[error(transparent)]
    Hardware(#[from] HardwareError),
    #[error(transparent)]
    Engine(#[from] crate::engine::EngineError),
}

fn invalid(field: &str, problem: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field: field.to_string(),
        problem: problem.into(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub seed: u64,
    pub n_runs: usize,
    pub topology: TopologyConfig,
    pub hardware: HardwareConfig,
    pub protocol: ProtocolSection,
    pub target: PerformanceTarget,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimizer: Option<OptimizerSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepStanza>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopologyConfig {
    pub nodes: Vec<String>,
    pub links: Vec<LinkConfig>,
    #[serde(default)]
    pub refractive_index: Option<f64>,
    /// Standard-scenario flag: segments may omit attenuation, which then
    /// defaults to 0.2 dB/km.
    #[serde(default)]
    pub standard_scenario: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkConfig {
    pub station: String,
    pub segment_a: SegmentConfig,
    pub segment_b: SegmentConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentConfig {
    pub length_km: f64,
    #[serde(default)]
    pub attenuation_db_per_km: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HardwareConfig {
    /// Named shipped baseline ("cc-baseline", "ti-baseline").
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub baseline: Option<String>,
    /// Inline parameter set (platform + values) instead of a baseline.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub platform: Option<PlatformKind>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub values: BTreeMap<ParamName, f64>,
    /// Per-parameter overrides applied on top of the baseline.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub overrides: BTreeMap<ParamName, f64>,
    /// Maps the resolved platform parameters onto the abstract model.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub map_to_abstract: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolSection {
    pub scheme: EntanglementScheme,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff_time: Option<f64>,
    #[serde(default)]
    pub move_end_node_to_memory: bool,
    pub n_pairs: usize,
    #[serde(default = "default_max_rounds")]
    pub max_rounds: u64,
}

fn default_max_rounds() -> u64 {
    10_000_000
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerSection {
    #[serde(default = "default_population")]
    pub population: usize,
    #[serde(default = "default_generations")]
    pub generations: usize,
    #[serde(default)]
    pub var_tolerance: Option<f64>,
    #[serde(default)]
    pub use_cutoff: bool,
    #[serde(default = "default_k_init_max")]
    pub k_init_max: f64,
    #[serde(default)]
    pub improvable: Option<Vec<ParamName>>,
}

fn default_population() -> usize {
    150
}
fn default_generations() -> usize {
    200
}
fn default_k_init_max() -> f64 {
    1e3
}

/// One parameter varied over a list of values, expanding the config.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepStanza {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    CutoffTime,
    Alpha,
    CoincidenceWindow,
    Hardware(ParamName),
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let config: ScenarioConfig = serde_yaml::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    /// Canonical serialized form (stable field order).
    pub fn canonical(&self) -> String {
        serde_yaml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.n_runs == 0 {
            return Err(invalid("n_runs", "must be positive"));
        }
        if self.protocol.n_pairs == 0 {
            return Err(invalid("protocol.n_pairs", "must be positive"));
        }
        if !(self.target.rate_hz > 0.0) {
            return Err(invalid("target.rate_hz", "must be positive"));
        }
        if !(0.5..=1.0).contains(&self.target.f_tel) {
            return Err(invalid("target.f_tel", "must be in (0.5, 1]"));
        }
        match (&self.hardware.baseline, &self.hardware.platform) {
            (Some(_), Some(_)) => {
                return Err(invalid(
                    "hardware",
                    "give either a baseline name or an inline platform, not both",
                ))
            }
            (None, None) => {
                return Err(invalid(
                    "hardware",
                    "one of baseline or platform is required",
                ))
            }
            _ => {}
        }
        self.to_topology()?.validate()?;
        self.to_hardware()?; // resolves the baseline reference and overrides
        if let EntanglementScheme::SingleClick { alpha } = self.protocol.scheme {
            if !(alpha > 0.0 && alpha < 1.0) {
                return Err(invalid("protocol.scheme.alpha", "must be in (0, 1)"));
            }
        }
        Ok(())
    }

    pub fn to_topology(&self) -> Result<NetworkTopology, ConfigError> {
        let resolve = |seg: &SegmentConfig, field: &str| -> Result<Segment, ConfigError> {
            let attenuation = match seg.attenuation_db_per_km {
                Some(a) => a,
                None if self.topology.standard_scenario => 0.2,
                None => {
                    return Err(invalid(
                        field,
                        "attenuation_db_per_km required unless standard_scenario is set",
                    ))
                }
            };
            Ok(Segment {
                length_km: seg.length_km,
                attenuation_db_per_km: attenuation,
            })
        };
        let mut links = Vec::new();
        for (idx, link) in self.topology.links.iter().enumerate() {
            links.push(LinkSpec {
                station: link.station.clone(),
                segment_a: resolve(&link.segment_a, &format!("topology.links[{idx}].segment_a"))?,
                segment_b: resolve(&link.segment_b, &format!("topology.links[{idx}].segment_b"))?,
            });
        }
        Ok(NetworkTopology {
            nodes: self.topology.nodes.clone(),
            links,
            refractive_index: self
                .topology
                .refractive_index
                .unwrap_or(DEFAULT_REFRACTIVE_INDEX),
        })
    }

    pub fn to_hardware(&self) -> Result<HardwareParams, ConfigError> {
        let mut params = match (&self.hardware.baseline, self.hardware.platform) {
            (Some(name), None) => baseline(name)?,
            (None, Some(platform)) => {
                HardwareParams::new(platform, self.hardware.values.clone())?
            }
            _ => unreachable!("validated"),
        };
        for (&name, &value) in &self.hardware.overrides {
            params.set(name, value)?;
        }
        if self.hardware.map_to_abstract {
            params = crate::hardware::map_to_abstract(&params)?;
        }
        params.validate()?;
        Ok(params)
    }

    pub fn to_protocol(&self) -> ProtocolConfig {
        ProtocolConfig {
            scheme: self.protocol.scheme,
            cutoff_time: self.protocol.cutoff_time,
            move_end_node_to_memory: self.protocol.move_end_node_to_memory,
            n_pairs: self.protocol.n_pairs,
            seed: self.seed,
            max_rounds: self.protocol.max_rounds,
            collect_trace: false,
        }
    }

    /// Scenario for the optimizer and sweep machinery.
    pub fn to_scenario(&self) -> Result<Scenario, ConfigError> {
        let scheme = match self.protocol.scheme {
            EntanglementScheme::DoubleClick { .. } => SchemeKind::DoubleClick,
            EntanglementScheme::SingleClick { .. } => SchemeKind::SingleClick,
        };
        Ok(Scenario {
            topology: self.to_topology()?,
            baseline: self.to_hardware()?,
            scheme,
            move_end_node_to_memory: self.protocol.move_end_node_to_memory,
            use_cutoff: self
                .optimizer
                .as_ref()
                .map(|o| o.use_cutoff)
                .unwrap_or(self.protocol.cutoff_time.is_some()),
            n_pairs: self.protocol.n_pairs,
            n_runs: self.n_runs,
            base_seed: self.seed,
            target: self.target,
            weights: CostWeights::default(),
            max_rounds: self.protocol.max_rounds,
            improvable: self.optimizer.as_ref().and_then(|o| o.improvable.clone()),
        })
    }

    pub fn to_ga_config(&self) -> GaConfig {
        let section = self.optimizer.clone().unwrap_or(OptimizerSection {
            population: default_population(),
            generations: default_generations(),
            var_tolerance: None,
            use_cutoff: false,
            k_init_max: default_k_init_max(),
            improvable: None,
        });
        GaConfig {
            population: section.population,
            generations: section.generations,
            var_tolerance: section.var_tolerance,
            k_init_max: section.k_init_max,
            seed: self.seed,
            ..GaConfig::default()
        }
    }

    /// Expands the sweep stanza into one config per value (the base config
    /// alone when no stanza is present).
    pub fn expand_sweep(&self) -> Result<Vec<ScenarioConfig>, ConfigError> {
        let Some(stanza) = &self.sweep else {
            return Ok(vec![self.clone()]);
        };
        if stanza.values.is_empty() {
            return Err(invalid("sweep.values", "must not be empty"));
        }
        let mut configs = Vec::new();
        for &value in &stanza.values {
            let mut expanded = self.clone();
            expanded.sweep = None;
            expanded.name = format!("{}@{value}", self.name);
            match stanza.parameter {
                SweepParameter::CutoffTime => expanded.protocol.cutoff_time = Some(value),
                SweepParameter::Alpha => match &mut expanded.protocol.scheme {
                    EntanglementScheme::SingleClick { alpha } => *alpha = value,
                    _ => {
                        return Err(invalid(
                            "sweep.parameter",
                            "alpha sweeps need a single-click scheme",
                        ))
                    }
                },
                SweepParameter::CoincidenceWindow => match &mut expanded.protocol.scheme {
                    EntanglementScheme::DoubleClick { coincidence_window } => {
                        *coincidence_window = Some(value)
                    }
                    _ => {
                        return Err(invalid(
                            "sweep.parameter",
                            "coincidence sweeps need a double-click scheme",
                        ))
                    }
                },
                SweepParameter::Hardware(name) => {
                    expanded.hardware.overrides.insert(name, value);
                }
            }
            expanded.validate()?;
            configs.push(expanded);
        }
        Ok(configs)
    }
}
