//! Modulation parameterization shared by every stage of the pipeline.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Frequency-pulse family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PulseShape {
    /// `f(t) = (1 / 2LT) [1 - cos(2 pi t / LT)]` on `[0, LT]`.
    RaisedCosine,
}

impl PulseShape {
    pub fn name(self) -> &'static str {
        match self {
            PulseShape::RaisedCosine => "raised-cosine",
        }
    }
}

/// Binary CPM parameters.
///
/// The default is the PCM/FM telemetry setup: `h = 0.7`, `L = 2`, `T = 1`,
/// eight samples per symbol, raised-cosine frequency pulse.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModulationParams {
    /// Modulation index.
    pub h: f64,
    /// Frequency-pulse duration in symbol intervals.
    #[serde(rename = "L")]
    pub pulse_len: usize,
    /// Symbol period in seconds.
    #[serde(rename = "T")]
    pub symbol_period: f64,
    /// Samples per symbol, `T / Tc`.
    pub osf: usize,
    pub pulse: PulseShape,
}

impl Default for ModulationParams {
    fn default() -> Self {
        Self {
            h: 0.7,
            pulse_len: 2,
            symbol_period: 1.0,
            osf: 8,
            pulse: PulseShape::RaisedCosine,
        }
    }
}

impl ModulationParams {
    pub fn new(h: f64, pulse_len: usize, osf: usize) -> Result<Self> {
        let params = Self {
            h,
            pulse_len,
            osf,
            ..Self::default()
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.h.is_finite() && self.h > 0.0) {
            return Err(Error::InvalidParams(format!("h must be positive, got {}", self.h)));
        }
        if self.pulse_len == 0 {
            return Err(Error::InvalidParams("L must be at least 1".into()));
        }
        // Q = 2^(L-1) filters; anything past this is not a meaningful bank.
        if self.pulse_len > 16 {
            return Err(Error::InvalidParams(format!("L = {} is too large", self.pulse_len)));
        }
        if self.osf == 0 {
            return Err(Error::InvalidParams("osf must be at least 1".into()));
        }
        if !(self.symbol_period.is_finite() && self.symbol_period > 0.0) {
            return Err(Error::InvalidParams(format!(
                "T must be positive, got {}",
                self.symbol_period
            )));
        }
        Ok(())
    }

    /// Number of Laurent components, `Q = 2^(L-1)`.
    pub fn component_count(&self) -> usize {
        1 << (self.pulse_len - 1)
    }

    /// Sample period `Tc = T / osf`.
    pub fn sample_period(&self) -> f64 {
        self.symbol_period / self.osf as f64
    }

    /// `L * T`.
    pub fn pulse_duration(&self) -> f64 {
        self.pulse_len as f64 * self.symbol_period
    }

    /// Samples per frequency pulse, `L * osf`.
    pub fn pulse_samples(&self) -> usize {
        self.pulse_len * self.osf
    }

    pub(crate) fn ensure_same(&self, other: &Self) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::ParamsMismatch)
        }
    }
}
