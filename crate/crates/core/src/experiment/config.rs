use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::metrics::{default_guard, DEFAULT_SAMPLE_PHASE};
use crate::params::ModulationParams;
use crate::quantize::FixedPointConfig;
use crate::wiener::{default_tap_count, MIN_TRAINING_SAMPLES};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    Table1,
    Table2,
    Phase,
    Taps,
    Sweep,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Table1 => "table1",
            Experiment::Table2 => "table2",
            Experiment::Phase => "phase",
            Experiment::Taps => "taps",
            Experiment::Sweep => "sweep",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Inclusive tap-count range `start:end[:step]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct TapRange {
    pub start: usize,
    pub end: usize,
    pub step: usize,
}

impl TapRange {
    pub fn values(&self) -> Vec<usize> {
        (self.start..=self.end).step_by(self.step).collect()
    }
}

impl FromStr for TapRange {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |p: &str| {
            p.trim()
                .parse::<usize>()
                .map_err(|_| Error::Config(format!("bad tap range '{s}'")))
        };
        let (start, end, step) = match parts.as_slice() {
            [n] => {
                let n = num(n)?;
                (n, n, 1)
            }
            [a, b] => (num(a)?, num(b)?, 1),
            [a, b, c] => (num(a)?, num(b)?, num(c)?),
            _ => return Err(Error::Config(format!("bad tap range '{s}'"))),
        };
        if start == 0 || end < start || step == 0 {
            return Err(Error::Config(format!("empty or invalid tap range '{s}'")));
        }
        Ok(Self { start, end, step })
    }
}

impl TryFrom<String> for TapRange {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<TapRange> for String {
    fn from(r: TapRange) -> String {
        format!("{}:{}:{}", r.start, r.end, r.step)
    }
}

/// Sample range `start:len` for phase traces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Window {
    pub start: usize,
    pub len: usize,
}

impl Window {
    pub fn range(&self) -> std::ops::Range<usize> {
        self.start..self.start + self.len
    }
}

impl FromStr for Window {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("bad window '{s}', expected START:LEN"));
        let (a, b) = s.split_once(':').ok_or_else(bad)?;
        let start = a.trim().parse().map_err(|_| bad())?;
        let len: usize = b.trim().parse().map_err(|_| bad())?;
        if len == 0 {
            return Err(bad());
        }
        Ok(Self { start, len })
    }
}

impl TryFrom<String> for Window {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Window> for String {
    fn from(w: Window) -> String {
        format!("{}:{}", w.start, w.len)
    }
}

/// Everything one run depends on. Missing fields take the PCM/FM defaults.
///
/// ```toml
/// experiment = "table1"
/// seed = 42
/// eval_bits = 10000
/// training_bits = 120000
/// taps = 23
///
/// [modulation]
/// h = 0.7
/// L = 2
/// T = 1.0
/// osf = 8
/// pulse = "raised-cosine"
///
/// [fixed_point]
/// signal_bits = 12
/// internal_bits = 16
/// scale = 1.0
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub seed: u64,
    /// Seed of the held-out training sequence; `seed + 1` when absent.
    pub training_seed: Option<u64>,
    /// Train `c_w` on the evaluation sequence itself instead of a held-out one.
    pub same_sequence: bool,
    pub eval_bits: usize,
    pub training_bits: usize,
    pub min_training_samples: usize,
    /// MMSE tap count; `(L + 1) osf - 1` when absent.
    pub taps: Option<usize>,
    /// Tap counts visited by the sweep experiment.
    pub sweep: Option<TapRange>,
    pub sample_phase: usize,
    /// Edge guard in samples; `2 (L + 1) osf` when absent.
    pub guard: Option<usize>,
    pub window: Window,
    pub output_dir: PathBuf,
    pub modulation: ModulationParams,
    pub fixed_point: FixedPointConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            experiment: Experiment::Table1,
            seed: 42,
            training_seed: None,
            same_sequence: false,
            eval_bits: 10_000,
            training_bits: 120_000,
            min_training_samples: MIN_TRAINING_SAMPLES,
            taps: None,
            sweep: None,
            sample_phase: DEFAULT_SAMPLE_PHASE,
            guard: None,
            window: Window {
                start: 4000,
                len: 200,
            },
            output_dir: PathBuf::from("runs"),
            modulation: ModulationParams::default(),
            fixed_point: FixedPointConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.modulation.validate()?;
        self.fixed_point.validate()?;
        if self.eval_bits == 0 || self.training_bits == 0 {
            return Err(Error::Config("bit counts must be positive".into()));
        }
        if self.taps == Some(0) {
            return Err(Error::Config("taps must be positive".into()));
        }
        if self.sample_phase >= self.modulation.osf {
            return Err(Error::Config(format!(
                "sample_phase {} must be below osf {}",
                self.sample_phase, self.modulation.osf
            )));
        }
        Ok(())
    }

    pub fn tap_count(&self) -> usize {
        self.taps.unwrap_or_else(|| default_tap_count(&self.modulation))
    }

    pub fn guard(&self) -> usize {
        self.guard.unwrap_or_else(|| default_guard(&self.modulation))
    }

    pub fn training_seed(&self) -> u64 {
        if self.same_sequence {
            self.seed
        } else {
            self.training_seed.unwrap_or(self.seed.wrapping_add(1))
        }
    }

    pub fn sweep_range(&self) -> TapRange {
        self.sweep.unwrap_or(TapRange {
            start: self.modulation.osf + 1,
            end: (self.modulation.pulse_len + 2) * self.modulation.osf + 1,
            step: 2,
        })
    }

    /// First 12 hex digits of SHA-256 over the canonical TOML form.
    pub fn content_hash(&self) -> String {
        let digest = Sha256::digest(self.to_toml().as_bytes());
        digest.iter().take(6).map(|b| format!("{b:02x}")).collect()
    }

    /// `<output_dir>/<experiment>-seed<seed>-<hash>`.
    pub fn run_dir(&self) -> PathBuf {
        self.output_dir.join(format!(
            "{}-seed{}-{}",
            self.experiment,
            self.seed,
            self.content_hash()
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_from_empty_file() {
        let c = ExperimentConfig::from_toml("").unwrap();
        assert_eq!(c, ExperimentConfig::default());
        assert_eq!(c.tap_count(), 23);
        assert_eq!(c.guard(), 48);
        assert_eq!(c.training_seed(), 43);
    }

    #[test]
    fn toml_round_trip() {
        let mut c = ExperimentConfig::default();
        c.experiment = Experiment::Sweep;
        c.sweep = Some("9:33:4".parse().unwrap());
        c.taps = Some(17);
        c.modulation.h = 0.5;
        let back = ExperimentConfig::from_toml(&c.to_toml()).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.content_hash(), c.content_hash());
    }

    #[test]
    fn partial_file() {
        let c = ExperimentConfig::from_toml(
            "experiment = \"table2\"\nseed = 7\n[modulation]\nL = 3\nh = 0.5\n[fixed_point]\nsignal_bits = 14\n",
        )
        .unwrap();
        assert_eq!(c.experiment, Experiment::Table2);
        assert_eq!(c.modulation.pulse_len, 3);
        assert_eq!(c.modulation.osf, 8);
        assert_eq!(c.fixed_point.signal_bits, 14);
        assert_eq!(c.fixed_point.internal_bits, 16);
        assert_eq!(c.tap_count(), 31);
    }

    #[test]
    fn rejects_unknown_and_invalid() {
        assert!(ExperimentConfig::from_toml("bogus = 1").is_err());
        assert!(ExperimentConfig::from_toml("experiment = \"table9\"").is_err());
        assert!(ExperimentConfig::from_toml("sample_phase = 8").is_err());
        assert!(ExperimentConfig::from_toml("eval_bits = 0").is_err());
        assert!(ExperimentConfig::from_toml("[fixed_point]\nsignal_bits = 20").is_err());
    }

    #[test]
    fn ranges_parse() {
        let r: TapRange = "9:33:2".parse().unwrap();
        assert_eq!(r.values().first(), Some(&9));
        assert_eq!(r.values().last(), Some(&33));
        assert_eq!("17".parse::<TapRange>().unwrap().values(), vec![17]);
        assert!("0:4".parse::<TapRange>().is_err());
        assert!("9:3".parse::<TapRange>().is_err());
        let w: Window = "100:200".parse().unwrap();
        assert_eq!(w.range(), 100..300);
        assert!("100".parse::<Window>().is_err());
    }

    #[test]
    fn run_dir_depends_on_content() {
        let a = ExperimentConfig::default();
        let mut b = a.clone();
        b.eval_bits = 20_000;
        assert_ne!(a.run_dir(), b.run_dir());
        assert!(a.run_dir().to_string_lossy().contains("table1-seed42-"));
    }
}
