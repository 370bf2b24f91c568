//! Error measures between a reference envelope and an approximation.
//!
//! MSE is `10 log10(mean |ref - cand|^2)` over the complex error. The
//! reference CPM envelope has unit power, so the figure is also the
//! normalized error power.
//!
//! Two symbol-rate figures are reported for the samples at offset
//! `sample_phase` within each symbol:
//!
//! * `mse_symbol_rate`: the `1/T`-sampled signals held on the `Tc` grid
//!   (all other samples zeroed), so the error energy at the symbol instants is
//!   averaged over every oversampled position in the compared region;
//! * `mse_decimated`: the same error energy averaged over the symbol instants
//!   only. It exceeds `mse_symbol_rate` by `10 log10(osf)`.

use std::fmt;
use std::ops::Range;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::params::ModulationParams;
use crate::signal::BasebandSignal;

/// Values below this are reported as [`MseDb::Floor`].
pub const MSE_FLOOR_DB: f64 = -300.0;

/// Minimum number of compared samples after guards.
pub const MIN_OVERLAP: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MseDb {
    Value(f64),
    /// Error power at or below [`MSE_FLOOR_DB`], including exact zero.
    Floor,
}

impl MseDb {
    pub fn from_power(power: f64) -> Self {
        let db = 10.0 * power.log10();
        if db.is_nan() || db <= MSE_FLOOR_DB {
            MseDb::Floor
        } else {
            MseDb::Value(db)
        }
    }

    /// Decibel value, with the floor mapped to [`MSE_FLOOR_DB`].
    pub fn db(self) -> f64 {
        match self {
            MseDb::Value(v) => v,
            MseDb::Floor => MSE_FLOOR_DB,
        }
    }

    pub fn is_floor(self) -> bool {
        matches!(self, MseDb::Floor)
    }
}

impl fmt::Display for MseDb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MseDb::Value(v) => write!(f, "{v:.2}"),
            MseDb::Floor => write!(f, "<={MSE_FLOOR_DB:.1}"),
        }
    }
}

impl Serialize for MseDb {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            MseDb::Value(v) => s.serialize_f64(*v),
            MseDb::Floor => s.serialize_str("floor"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MseOptions {
    /// Samples excluded at each end.
    pub guard: usize,
    /// Offset of the symbol-rate samples within each symbol, in `Tc` units.
    pub sample_phase: usize,
    pub osf: usize,
}

/// Default symbol-rate offset: one sample after the symbol instant.
///
/// At offset 0 the truncated bank is exact (every `c_k`, `k >= 1`, vanishes
/// at multiples of `T`), so the symbol-rate comparison is made one `Tc` in.
pub const DEFAULT_SAMPLE_PHASE: usize = 1;

impl MseOptions {
    /// Guard of `2 (L + 1) osf` samples, the default sampling phase.
    pub fn for_params(params: &ModulationParams) -> Self {
        Self {
            guard: default_guard(params),
            sample_phase: DEFAULT_SAMPLE_PHASE.min(params.osf - 1),
            osf: params.osf,
        }
    }

    pub fn with_guard(mut self, guard: usize) -> Self {
        self.guard = guard;
        self
    }

    pub fn with_sample_phase(mut self, phase: usize) -> Self {
        self.sample_phase = phase;
        self
    }
}

pub fn default_guard(params: &ModulationParams) -> usize {
    2 * (params.pulse_len + 1) * params.osf
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MseReport {
    pub mse_oversampled: MseDb,
    pub mse_symbol_rate: MseDb,
    pub mse_decimated: MseDb,
    pub guard_samples: usize,
    pub sample_phase: usize,
    pub compared_samples: usize,
    pub signal_ids: [String; 2],
}

impl MseReport {
    pub fn labeled(mut self, reference: &str, candidate: &str) -> Self {
        self.signal_ids = [reference.to_string(), candidate.to_string()];
        self
    }
}

fn check_pair(a: &BasebandSignal, b: &BasebandSignal) -> Result<()> {
    let (pa, pb) = (a.sample_period, b.sample_period);
    if (pa - pb).abs() > 1e-12 * pa.abs().max(pb.abs()) {
        return Err(Error::SamplePeriodMismatch(pa, pb));
    }
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            what: "compared signals",
            expected: a.len(),
            got: b.len(),
        });
    }
    Ok(())
}

/// Squared error per sample over `guard..len-guard`.
pub fn error_power(
    reference: &BasebandSignal,
    candidate: &BasebandSignal,
    guard: usize,
) -> Result<Vec<f64>> {
    check_pair(reference, candidate)?;
    let len = reference.len();
    let compared = len.saturating_sub(2 * guard);
    if compared < MIN_OVERLAP {
        return Err(Error::InsufficientOverlap {
            got: compared,
            need: MIN_OVERLAP,
        });
    }
    Ok(reference.samples[guard..len - guard]
        .iter()
        .zip(&candidate.samples[guard..len - guard])
        .map(|(r, c)| (r - c).norm_sqr())
        .collect())
}

pub fn mse_db(
    reference: &BasebandSignal,
    candidate: &BasebandSignal,
    opts: &MseOptions,
) -> Result<MseReport> {
    if opts.osf == 0 || opts.sample_phase >= opts.osf {
        return Err(Error::InvalidParams(format!(
            "sample phase {} outside 0..{}",
            opts.sample_phase, opts.osf
        )));
    }
    let err = error_power(reference, candidate, opts.guard)?;
    let total: f64 = err.iter().sum();
    let (symbol_energy, symbol_count) = err
        .iter()
        .enumerate()
        .filter(|(i, _)| (i + opts.guard) % opts.osf == opts.sample_phase)
        .fold((0.0, 0usize), |(e, n), (_, &p)| (e + p, n + 1));
    let n = err.len() as f64;
    Ok(MseReport {
        mse_oversampled: MseDb::from_power(total / n),
        mse_symbol_rate: MseDb::from_power(symbol_energy / n),
        mse_decimated: MseDb::from_power(symbol_energy / symbol_count as f64),
        guard_samples: opts.guard,
        sample_phase: opts.sample_phase,
        compared_samples: err.len(),
        signal_ids: ["reference".into(), "candidate".into()],
    })
}

/// Unwrapped phase of several signals over a common window.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseTrace {
    /// Seconds, one per row.
    pub time: Vec<f64>,
    /// `phases[s][row]` in radians.
    pub phases: Vec<Vec<f64>>,
    pub window: Range<usize>,
}

fn wrap(x: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let y = (x + PI).rem_euclid(TAU) - PI;
    if y == -PI {
        PI
    } else {
        y
    }
}

/// Unwraps `arg(z)` so consecutive values differ by less than pi.
pub fn unwrap_phase(samples: &[num_complex::Complex64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(samples.len());
    let mut prev: Option<f64> = None;
    for z in samples {
        let raw = z.arg();
        let next = match prev {
            None => raw,
            Some(p) => p + wrap(raw - p),
        };
        out.push(next);
        prev = Some(next);
    }
    out
}

pub fn phase_trace(signals: &[&BasebandSignal], window: Range<usize>) -> Result<PhaseTrace> {
    let first = signals.first().ok_or(Error::InvalidParams("no signals".into()))?;
    for s in signals {
        let (pa, pb) = (first.sample_period, s.sample_period);
        if (pa - pb).abs() > 1e-12 * pa.abs().max(pb.abs()) {
            return Err(Error::SamplePeriodMismatch(pa, pb));
        }
        if window.start >= window.end || window.end > s.len() {
            return Err(Error::WindowOutOfRange {
                start: window.start,
                end: window.end,
                len: s.len(),
            });
        }
    }
    Ok(PhaseTrace {
        time: window.clone().map(|i| first.time_of(i)).collect(),
        phases: signals
            .iter()
            .map(|s| unwrap_phase(&s.samples[window.clone()]))
            .collect(),
        window,
    })
}

impl PhaseTrace {
    pub fn rows(&self) -> usize {
        self.time.len()
    }

    /// Mean of `|wrap(phase[candidate] - phase[reference])|` over the window.
    pub fn mean_abs_error(&self, reference: usize, candidate: usize) -> f64 {
        let (r, c) = (&self.phases[reference], &self.phases[candidate]);
        r.iter().zip(c).map(|(a, b)| wrap(b - a).abs()).sum::<f64>() / r.len() as f64
    }

    /// Root-mean-square wrapped phase difference between two traces.
    pub fn rms_difference(&self, a: usize, b: usize) -> f64 {
        let (x, y) = (&self.phases[a], &self.phases[b]);
        (x.iter().zip(y).map(|(p, q)| wrap(p - q).powi(2)).sum::<f64>() / x.len() as f64).sqrt()
    }

    /// Comma-separated columns: `time_s` followed by one `<label>_rad` column
    /// per signal.
    pub fn to_csv(&self, labels: &[&str]) -> String {
        let mut out = String::from("time_s");
        for l in labels {
            out.push_str(&format!(",{l}_rad"));
        }
        out.push('\n');
        for row in 0..self.rows() {
            out.push_str(&format!("{:.6}", self.time[row]));
            for p in &self.phases {
                out.push_str(&format!(",{:.12}", p[row]));
            }
            out.push('\n');
        }
        out
    }
}
