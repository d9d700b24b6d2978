//! Genetic algorithm over improvement factors and protocol tunables:
//! tournament selection (size 3), uniform crossover, per-gene Gaussian
//! mutation in log space, elitism of one, and VAR termination on the rolling
//! fifteen-generation mean of the best cost.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::hardware::ParamName;

use super::evaluate::{
    evaluate_candidate, CandidateSolution, Scenario, SchemeKind, Tunables,
};
use super::OptimizerError;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GaConfig {
    pub population: usize,
    pub generations: usize,
    pub tournament_size: usize,
    pub crossover_rate: f64,
    pub mutation_rate: f64,
    /// Mutation width in log-factor space.
    pub mutation_sigma: f64,
    pub elitism: usize,
    /// VAR termination: relative change of the rolling 15-generation mean of
    /// the best cost below which the search stops (1.0 = 100%).
    pub var_tolerance: Option<f64>,
    /// Upper bound on any improvement factor gene.
    pub k_max: f64,
    /// Upper bound for factor initialization.
    pub k_init_max: f64,
    pub seed: u64,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population: 150,
            generations: 200,
            tournament_size: 3,
            crossover_rate: 0.8,
            mutation_rate: 0.1,
            mutation_sigma: 0.2,
            elitism: 1,
            var_tolerance: None,
            k_max: 1e6,
            k_init_max: 1e3,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub generation: usize,
    /// Best cost seen so far (elitist running minimum).
    pub best_cost: f64,
    pub best_candidate: CandidateSolution,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GaResult {
    pub best: CandidateSolution,
    pub history: Vec<GenerationRecord>,
    pub terminated_by_var: bool,
}

/// Gene vector layout: one log-factor per improvable parameter, then the
/// scheme's tunables.
#[derive(Clone, Debug)]
struct Genome {
    log_factors: Vec<f64>,
    cutoff_fraction: Option<f64>,
    log_alpha: Option<f64>,
    log_tau: Option<f64>,
}

struct GeneSpace {
    params: Vec<ParamName>,
    use_cutoff: bool,
    single_click: bool,
    coincidence: bool,
    tau_max: f64,
}

impl GeneSpace {
    fn for_scenario(scenario: &Scenario) -> Result<Self, OptimizerError> {
        let params = scenario.improvable_params();
        let single_click = scenario.scheme == SchemeKind::SingleClick;
        let coincidence = scenario.scheme == SchemeKind::DoubleClick
            && scenario.baseline.platform == crate::hardware::PlatformKind::TrappedIon;
        let tau_max = if coincidence {
            scenario.baseline.get(ParamName::DetectionWindow)?
        } else {
            0.0
        };
        Ok(Self {
            params,
            use_cutoff: scenario.use_cutoff,
            single_click,
            coincidence,
            tau_max,
        })
    }

    fn sample(&self, rng: &mut ChaCha12Rng, config: &GaConfig) -> Genome {
        let log_factors = (0..self.params.len())
            .map(|_| rng.gen_range(0.0..config.k_init_max.ln()))
            .collect();
        Genome {
            log_factors,
            cutoff_fraction: self.use_cutoff.then(|| rng.gen_range(0.1..=1.0)),
            log_alpha: self
                .single_click
                .then(|| rng.gen_range((1e-4f64).ln()..(0.5f64).ln())),
            log_tau: self
                .coincidence
                .then(|| rng.gen_range((self.tau_max * 1e-3).ln()..self.tau_max.ln())),
        }
    }

    fn to_candidate(&self, genome: &Genome) -> CandidateSolution {
        CandidateSolution {
            factors: self
                .params
                .iter()
                .zip(&genome.log_factors)
                .map(|(&p, &lk)| (p, lk.exp()))
                .collect(),
            tunables: Tunables {
                cutoff_fraction: genome.cutoff_fraction,
                alpha: genome.log_alpha.map(f64::exp),
                coincidence_window: genome.log_tau.map(f64::exp),
            },
            evaluation: None,
        }
    }

    fn crossover(&self, a: &Genome, b: &Genome, rng: &mut ChaCha12Rng) -> Genome {
        let pick = |x: f64, y: f64, rng: &mut ChaCha12Rng| if rng.gen_bool(0.5) { x } else { y };
        Genome {
            log_factors: a
                .log_factors
                .iter()
                .zip(&b.log_factors)
                .map(|(&x, &y)| pick(x, y, rng))
                .collect(),
            cutoff_fraction: a
                .cutoff_fraction
                .map(|x| pick(x, b.cutoff_fraction.unwrap(), rng)),
            log_alpha: a.log_alpha.map(|x| pick(x, b.log_alpha.unwrap(), rng)),
            log_tau: a.log_tau.map(|x| pick(x, b.log_tau.unwrap(), rng)),
        }
    }

    fn mutate(&self, genome: &mut Genome, config: &GaConfig, rng: &mut ChaCha12Rng) {
        for lk in genome.log_factors.iter_mut() {
            if rng.gen_bool(config.mutation_rate) {
                let step: f64 = rng.sample(StandardNormal);
                *lk = (*lk + step * config.mutation_sigma).clamp(0.0, config.k_max.ln());
            }
        }
        if let Some(f) = genome.cutoff_fraction.as_mut() {
            if rng.gen_bool(config.mutation_rate) {
                let step: f64 = rng.sample(StandardNormal);
                *f = (*f + step * 0.09).clamp(0.1, 1.0);
            }
        }
        if let Some(a) = genome.log_alpha.as_mut() {
            if rng.gen_bool(config.mutation_rate) {
                let step: f64 = rng.sample(StandardNormal);
                *a = (*a + step * config.mutation_sigma)
                    .clamp((1e-6f64).ln(), (0.7f64).ln());
            }
        }
        if let Some(t) = genome.log_tau.as_mut() {
            if rng.gen_bool(config.mutation_rate) {
                let step: f64 = rng.sample(StandardNormal);
                *t = (*t + step * config.mutation_sigma)
                    .clamp((self.tau_max * 1e-6).ln(), self.tau_max.ln());
            }
        }
    }
}

/// Rolling-mean VAR criterion: compares the mean best cost over generations
/// [g-15, g-1] with the mean over [g-14, g]; fires when the relative change
/// is within tolerance. The earliest possible stop is generation 16.
fn var_fires(best_costs: &[f64], tolerance: f64) -> bool {
    const WINDOW: usize = 15;
    let n = best_costs.len();
    if n < WINDOW + 1 {
        return false;
    }
    let older: f64 = best_costs[n - WINDOW - 1..n - 1].iter().sum::<f64>() / WINDOW as f64;
    let newer: f64 = best_costs[n - WINDOW..].iter().sum::<f64>() / WINDOW as f64;
    if older == 0.0 {
        return newer == 0.0;
    }
    ((newer - older) / older).abs() <= tolerance
}

pub fn genetic_optimize(
    scenario: &Scenario,
    config: &GaConfig,
) -> Result<GaResult, OptimizerError> {
    if config.population < 4 {
        return Err(OptimizerError::BadConfig(
            "population must be at least 4".into(),
        ));
    }
    let space = GeneSpace::for_scenario(scenario)?;
    let mut rng = ChaCha12Rng::seed_from_u64(config.seed);
    let mut population: Vec<Genome> = (0..config.population)
        .map(|_| space.sample(&mut rng, config))
        .collect();
    let mut history: Vec<GenerationRecord> = Vec::new();
    let mut best: Option<(f64, CandidateSolution)> = None;
    let mut best_costs: Vec<f64> = Vec::new();
    let mut terminated_by_var = false;

    for generation in 0..config.generations {
        // Deterministic fan-out: evaluations are independent and merged by
        // candidate index.
        let candidates: Vec<CandidateSolution> =
            population.iter().map(|g| space.to_candidate(g)).collect();
        let evals: Vec<_> = candidates
            .par_iter()
            .enumerate()
            .map(|(idx, candidate)| {
                evaluate_candidate(
                    candidate,
                    scenario,
                    (generation as u64) << 32 | idx as u64,
                )
            })
            .collect::<Result<_, _>>()?;
        let mut order: Vec<usize> = (0..population.len()).collect();
        order.sort_by(|&a, &b| evals[a].cost.total_cmp(&evals[b].cost));
        let gen_best_idx = order[0];
        let gen_best_cost = evals[gen_best_idx].cost;
        if best.as_ref().is_none_or(|(c, _)| gen_best_cost < *c) {
            let mut candidate = candidates[gen_best_idx].clone();
            candidate.evaluation = Some(evals[gen_best_idx]);
            best = Some((gen_best_cost, candidate));
        }
        let (best_cost, best_candidate) = best.clone().expect("best set");
        best_costs.push(best_cost);
        history.push(GenerationRecord {
            generation,
            best_cost,
            best_candidate,
        });
        if let Some(tol) = config.var_tolerance {
            if var_fires(&best_costs, tol) {
                terminated_by_var = true;
                break;
            }
        }
        if generation + 1 == config.generations {
            break;
        }
        // Breed the next generation.
        let mut next: Vec<Genome> = Vec::with_capacity(population.len());
        for &idx in order.iter().take(config.elitism) {
            next.push(population[idx].clone());
        }
        let tournament = |rng: &mut ChaCha12Rng| -> usize {
            let mut winner = rng.gen_range(0..population.len());
            for _ in 1..config.tournament_size {
                let challenger = rng.gen_range(0..population.len());
                if evals[challenger].cost < evals[winner].cost {
                    winner = challenger;
                }
            }
            winner
        };
        while next.len() < population.len() {
            let a = tournament(&mut rng);
            let b = tournament(&mut rng);
            let mut child = if rng.gen_bool(config.crossover_rate) {
                space.crossover(&population[a], &population[b], &mut rng)
            } else {
                population[a].clone()
            };
            space.mutate(&mut child, config, &mut rng);
            next.push(child);
        }
        population = next;
    }
    let (_, best_candidate) = best.expect("at least one generation ran");
    Ok(GaResult {
        best: best_candidate,
        history,
        terminated_by_var,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn var_criterion_first_fires_at_sixteen() {
        // Any positive, nonincreasing cost sequence passes a 100% tolerance
        // exactly when two full windows exist.
        let costs: Vec<f64> = (0..16).map(|i| 100.0 / (i + 1) as f64).collect();
        assert!(!var_fires(&costs[..15], 1.0));
        assert!(var_fires(&costs, 1.0));
        // A tight tolerance does not fire on a still-moving sequence.
        assert!(!var_fires(&costs, 1e-6));
        // A flat sequence fires even at tight tolerance.
        let flat = vec![5.0; 16];
        assert!(var_fires(&flat, 1e-9));
    }
}
