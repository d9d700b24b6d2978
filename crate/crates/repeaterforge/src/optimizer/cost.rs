//! Scalarized cost: two Heaviside penalty terms with squared shortfalls plus
//! the weighted hardware cost.

use serde::{Deserialize, Serialize};

use crate::targetmetric::PerformanceTarget;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostWeights {
    pub w1: f64,
    pub w2: f64,
    pub w3: f64,
}

impl Default for CostWeights {
    /// w1 = w2 = 1e20 and w3 = 1, so any constraint-violating candidate
    /// costs more than any satisfying one for realistic factor ranges.
    fn default() -> Self {
        Self {
            w1: 1e20,
            w2: 1e20,
            w3: 1.0,
        }
    }
}

/// Sum of improvement factors.
pub fn hardware_cost<'a>(factors: impl IntoIterator<Item = &'a f64>) -> f64 {
    factors.into_iter().sum()
}

/// C = w1 (1 + (F_t - F)²) Θ(F_t - F) + w2 (1 + (R_t - R)²) Θ(R_t - R)
///     + w3 H_C, with Θ(0) = 0 so exact equality counts as met.
pub fn total_cost(
    f_tel: f64,
    rate_hz: f64,
    hardware_cost: f64,
    target: &PerformanceTarget,
    weights: &CostWeights,
) -> f64 {
    let mut cost = weights.w3 * hardware_cost;
    let f_short = target.f_tel - f_tel;
    if f_short > 0.0 {
        cost += weights.w1 * (1.0 + f_short * f_short);
    }
    let r_short = target.rate_hz - rate_hz;
    if r_short > 0.0 {
        cost += weights.w2 * (1.0 + r_short * r_short);
    }
    cost
}

#[cfg(test)]
mod tests {
    use super::*;

    fn target() -> PerformanceTarget {
        PerformanceTarget::target_one()
    }

    #[test]
    fn met_targets_cost_only_hardware() {
        let w = CostWeights::default();
        let c = total_cost(0.9, 0.2, 17.5, &target(), &w);
        assert_eq!(c, 17.5);
        // Exact equality is met.
        let c = total_cost(0.8717, 0.1, 3.0, &target(), &w);
        assert_eq!(c, 3.0);
    }

    #[test]
    fn fidelity_shortfall_penalty() {
        let w = CostWeights::default();
        let c = total_cost(0.7717, 0.2, 0.0, &target(), &w);
        assert!((c - 1e20 * (1.0 + 0.01)).abs() < 1e10);
    }

    #[test]
    fn violating_candidates_always_cost_more() {
        let w = CostWeights::default();
        // Even absurdly expensive satisfying candidates undercut violators
        // while H_C stays below w1/w3.
        let satisfying = total_cost(0.95, 0.5, 1e6, &target(), &w);
        let violating = total_cost(0.99, 0.099, 6.0, &target(), &w);
        assert!(satisfying < violating);
    }

    #[test]
    fn hardware_cost_sums_factors() {
        assert_eq!(hardware_cost([1.0, 1.0, 1.0].iter()), 3.0);
        assert_eq!(hardware_cost([5.0, 1.0, 1.0, 1.0, 1.0, 1.0].iter()), 10.0);
        let low = hardware_cost([1.0, 2.0].iter());
        let high = hardware_cost([1.0, 3.0].iter());
        assert!(high > low);
    }
}
