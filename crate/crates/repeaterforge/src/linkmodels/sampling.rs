//! Geometric sampling of heralded-link generation attempts.

use rand::Rng;
use rand_distr::{Distribution, Geometric};

use super::LinkModelError;

/// Result of sampling one heralded link generation: the attempt count
/// (support {1, 2, ...}) and the elapsed delay.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeometricDelay {
    pub n_attempts: u64,
    pub delay: f64,
}

/// Samples the number of attempts until the first success from a geometric
/// distribution and converts it to a delay.
pub fn sample_link<R: Rng + ?Sized>(
    success_prob: f64,
    attempt_duration: f64,
    rng: &mut R,
) -> Result<GeometricDelay, LinkModelError> {
    if !(success_prob > 0.0) || success_prob > 1.0 {
        return Err(LinkModelError::InvalidParameter {
            name: "success_prob",
            value: success_prob,
        });
    }
    if !(attempt_duration > 0.0) {
        return Err(LinkModelError::InvalidParameter {
            name: "attempt_duration",
            value: attempt_duration,
        });
    }
    let failures = Geometric::new(success_prob)
        .map_err(|_| LinkModelError::InvalidParameter {
            name: "success_prob",
            value: success_prob,
        })?
        .sample(rng);
    let n_attempts = failures.saturating_add(1);
    Ok(GeometricDelay {
        n_attempts,
        delay: n_attempts as f64 * attempt_duration,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn certain_success_takes_one_attempt() {
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        for _ in 0..100 {
            let s = sample_link(1.0, 2.5e-3, &mut rng).unwrap();
            assert_eq!(s.n_attempts, 1);
            assert_eq!(s.delay, 2.5e-3);
        }
    }

    #[test]
    fn empirical_mean_matches_geometric() {
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        let p = 0.25;
        let n = 100_000;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..n {
            let s = sample_link(p, 1.0, &mut rng).unwrap() .n_attempts as f64;
            sum += s;
            sum_sq += s * s;
        }
        let mean = sum / n as f64;
        let var = sum_sq / n as f64 - mean * mean;
        let sem = (var / n as f64).sqrt();
        assert!(
            (mean - 1.0 / p).abs() < 3.0 * sem,
            "mean {mean} vs 1/p {} (sem {sem})",
            1.0 / p
        );
    }

    #[test]
    fn fixed_seed_reproduces_sequence() {
        let draw = || {
            let mut rng = ChaCha12Rng::seed_from_u64(3);
            (0..32)
                .map(|_| sample_link(0.01, 1.0, &mut rng).unwrap().n_attempts)
                .collect::<Vec<_>>()
        };
        assert_eq!(draw(), draw());
    }

    #[test]
    fn zero_success_probability_rejected() {
        let mut rng = ChaCha12Rng::seed_from_u64(4);
        assert!(sample_link(0.0, 1.0, &mut rng).is_err());
        assert!(sample_link(0.5, 0.0, &mut rng).is_err());
    }
}
