//! Shared experiment-report record emitted by the statistical suites.

use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentReport {
    pub trials: u64,
    pub mean_queries: f64,
    pub stderr: f64,
    pub success_probability: f64,
    /// Theoretical reference value the mean is compared against.
    pub check_value: f64,
    pub seed: u64,
}

impl ExperimentReport {
    pub fn from_counts(counts: &[u64], successes: u64, check_value: f64, seed: u64) -> Self {
        let trials = counts.len() as u64;
        let mean = counts.iter().sum::<u64>() as f64 / trials as f64;
        let var = counts
            .iter()
            .map(|&c| (c as f64 - mean).powi(2))
            .sum::<f64>()
            / (trials as f64 - 1.0).max(1.0);
        ExperimentReport {
            trials,
            mean_queries: mean,
            stderr: (var / trials as f64).sqrt(),
            success_probability: successes as f64 / trials as f64,
            check_value,
            seed,
        }
    }
}

/// Per-trial RNG stream derived from a base seed and the trial index, so
/// trials are independent and individually replayable.
pub fn trial_seed(seed: u64, index: u64) -> u64 {
    seed.wrapping_mul(0x9e37_79b9_7f4a_7c15)
        .wrapping_add(index)
        .wrapping_mul(0xbf58_476d_1ce4_e5b9)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_statistics() {
        let rep = ExperimentReport::from_counts(&[2, 4, 6], 3, 4.0, 7);
        assert_eq!(rep.trials, 3);
        assert!((rep.mean_queries - 4.0).abs() < 1e-12);
        assert!((rep.success_probability - 1.0).abs() < 1e-12);
        assert!((rep.stderr - (4.0f64 / 3.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn trial_seeds_differ() {
        assert_ne!(trial_seed(1, 0), trial_seed(1, 1));
        assert_ne!(trial_seed(1, 0), trial_seed(2, 0));
        assert_eq!(trial_seed(5, 9), trial_seed(5, 9));
    }
}
