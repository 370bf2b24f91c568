use num_complex::Complex64;

/// Uniformly sampled complex envelope.
#[derive(Debug, Clone, PartialEq)]
pub struct BasebandSignal {
    pub samples: Vec<Complex64>,
    /// Seconds between samples (`Tc`).
    pub sample_period: f64,
    /// Time of the first sample in seconds.
    pub t0: f64,
}

impl BasebandSignal {
    pub fn new(samples: Vec<Complex64>, sample_period: f64) -> Self {
        Self {
            samples,
            sample_period,
            t0: 0.0,
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn time_of(&self, index: usize) -> f64 {
        self.t0 + index as f64 * self.sample_period
    }

    /// Largest deviation of `|s|` from one.
    pub fn max_envelope_deviation(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| (s.norm() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}
