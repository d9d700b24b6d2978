//! Fiber-path topology: processing nodes joined by elementary links, each
//! with a heralding station between two fiber segments.

use serde::{Deserialize, Serialize};

use super::EngineError;

pub const SPEED_OF_LIGHT_M_PER_S: f64 = 299_792_458.0;
/// Default refractive-index delay factor for classical and quantum fiber.
pub const DEFAULT_REFRACTIVE_INDEX: f64 = 1.44;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub length_km: f64,
    pub attenuation_db_per_km: f64,
}

impl Segment {
    /// Photon survival probability over the segment.
    pub fn transmission(&self) -> f64 {
        10f64.powf(-self.attenuation_db_per_km * self.length_km / 10.0)
    }
}

/// One elementary link: the heralding station sits between segment_a (to the
/// lower-indexed node) and segment_b (to the higher-indexed node). Both
/// segments carry quantum and classical traffic.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinkSpec {
    pub station: String,
    pub segment_a: Segment,
    pub segment_b: Segment,
}

impl LinkSpec {
    pub fn total_length_km(&self) -> f64 {
        self.segment_a.length_km + self.segment_b.length_km
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetworkTopology {
    /// Processing nodes in chain order; ends are end nodes, the middle node
    /// (when present) is the sequential repeater.
    pub nodes: Vec<String>,
    pub links: Vec<LinkSpec>,
    pub refractive_index: f64,
}

impl NetworkTopology {
    pub fn validate(&self) -> Result<(), EngineError> {
        if self.links.len() + 1 != self.nodes.len() {
            return Err(EngineError::BadTopology(format!(
                "{} nodes require {} links, found {}",
                self.nodes.len(),
                self.nodes.len().saturating_sub(1),
                self.links.len()
            )));
        }
        if !(1..=2).contains(&self.links.len()) {
            return Err(EngineError::BadTopology(
                "supported chains have one repeater or none (1 or 2 links)".into(),
            ));
        }
        for link in &self.links {
            for seg in [&link.segment_a, &link.segment_b] {
                if seg.length_km < 0.0 || !seg.length_km.is_finite() {
                    return Err(EngineError::BadTopology(format!(
                        "segment length {} km invalid",
                        seg.length_km
                    )));
                }
                if !(seg.attenuation_db_per_km > 0.0) {
                    return Err(EngineError::BadTopology(format!(
                        "segment attenuation {} dB/km must be positive",
                        seg.attenuation_db_per_km
                    )));
                }
            }
        }
        if !(self.refractive_index >= 1.0) {
            return Err(EngineError::BadTopology(format!(
                "refractive index {} must be at least 1",
                self.refractive_index
            )));
        }
        Ok(())
    }

    /// One-way classical delay over a full link (both segments).
    pub fn link_delay(&self, link: usize) -> f64 {
        self.fiber_delay(self.links[link].total_length_km())
    }

    /// One-way delay over the whole path.
    pub fn path_delay(&self) -> f64 {
        (0..self.links.len()).map(|l| self.link_delay(l)).sum()
    }

    pub fn fiber_delay(&self, length_km: f64) -> f64 {
        length_km * 1000.0 * self.refractive_index / SPEED_OF_LIGHT_M_PER_S
    }

    /// Index of the repeater node, when the chain has one.
    pub fn repeater(&self) -> Option<usize> {
        (self.links.len() == 2).then_some(1)
    }

    /// Placeholder path between the two end cities: four segments over two
    /// links summing to 226.5 km, with the repeater closer to the first end.
    /// The per-segment split is not recoverable from public sources and is
    /// explicitly non-authoritative; override it in the scenario config.
    pub fn placeholder_fiber_path() -> Self {
        let seg = |length_km: f64| Segment {
            length_km,
            attenuation_db_per_km: 0.2,
        };
        Self {
            nodes: vec!["delft".into(), "nieuwegein".into(), "eindhoven".into()],
            links: vec![
                LinkSpec {
                    station: "station-west".into(),
                    segment_a: seg(40.0),
                    segment_b: seg(35.0),
                },
                LinkSpec {
                    station: "station-east".into(),
                    segment_a: seg(90.0),
                    segment_b: seg(61.5),
                },
            ],
            refractive_index: DEFAULT_REFRACTIVE_INDEX,
        }
    }
}
