use std::time::Instant;

use serde::{Deserialize, Serialize};

/// Per-prediction wall-clock statistics in seconds.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct LatencyStats {
    pub mean_s: f64,
    pub p50_s: f64,
    pub p95_s: f64,
}

impl LatencyStats {
    /// Nearest-rank percentiles over the given samples.
    pub fn from_samples(samples: &[f64]) -> Self {
        if samples.is_empty() {
            return Self::default();
        }
        let mut sorted = samples.to_vec();
        sorted.sort_by(f64::total_cmp);
        let rank = |q: f64| {
            let r = (q * sorted.len() as f64).ceil() as usize;
            sorted[r.clamp(1, sorted.len()) - 1]
        };
        Self {
            mean_s: sorted.iter().sum::<f64>() / sorted.len() as f64,
            p50_s: rank(0.50),
            p95_s: rank(0.95),
        }
    }
}

/// Times `reps` single predictions on the calling thread, cycling through
/// `inputs`, after `warmup` untimed calls.
pub fn measure_latency<T, F>(
    mut predict: F,
    inputs: &[T],
    warmup: usize,
    reps: usize,
) -> LatencyStats
where
    F: FnMut(&T),
{
    if inputs.is_empty() || reps == 0 {
        return LatencyStats::default();
    }
    for i in 0..warmup {
        predict(&inputs[i % inputs.len()]);
    }
    let mut samples = Vec::with_capacity(reps);
    for i in 0..reps {
        let input = &inputs[i % inputs.len()];
        let start = Instant::now();
        predict(input);
        samples.push(start.elapsed().as_secs_f64());
    }
    LatencyStats::from_samples(&samples)
}
