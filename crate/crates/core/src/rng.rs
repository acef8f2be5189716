//! Reproducible randomness.
//!
//! Every Monte Carlo sample draws from its own ChaCha stream, indexed by the
//! sample number under one user seed. Results therefore do not depend on the
//! order in which samples are evaluated or on how they are spread over threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A seed from which independent per-sample streams are derived.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RngStreams {
    seed: u64,
}

impl RngStreams {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// The stream for sample `index`.
    pub fn stream(&self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        rng
    }

    /// A child family of streams, for nesting one Monte Carlo loop inside another.
    pub fn fork(&self, salt: u64) -> RngStreams {
        // splitmix64 finalizer
        let mut z = self.seed ^ salt.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        RngStreams::new(z ^ (z >> 31))
    }
}

/// Mean and standard error of a Monte Carlo estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McEstimate {
    pub estimate: f64,
    pub std_error: f64,
}

impl McEstimate {
    /// Sample mean and standard error of the mean. A single sample has zero
    /// reported error.
    pub fn from_samples(samples: &[f64]) -> Self {
        let n = samples.len();
        if n == 0 {
            return McEstimate {
                estimate: f64::NAN,
                std_error: f64::NAN,
            };
        }
        let mean = samples.iter().sum::<f64>() / n as f64;
        if n == 1 {
            return McEstimate {
                estimate: mean,
                std_error: 0.0,
            };
        }
        let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        McEstimate {
            estimate: mean,
            std_error: (var / n as f64).sqrt(),
        }
    }

    /// Number of standard errors between the estimate and `target`.
    pub fn z_score(&self, target: f64) -> f64 {
        if self.std_error == 0.0 {
            if self.estimate == target {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (self.estimate - target).abs() / self.std_error
        }
    }
}
