//! MMSE single-filter approximation `c_w` driven by the `b_{0,n}` stream.
//!
//! The regressor is the zero-stuffed pseudo-symbol stream `d` at the sample
//! rate, so `c_w` is a `Tc`-spaced FIR that drops into the datapath in place of
//! `c_0`. With
//!
//! ```text
//! R[i][j] = < d(m-i) conj(d(m-j)) >,   r[i] = < s(m) conj(d(m-i)) >
//! ```
//!
//! averaged over the guarded region, the normal equations for
//! `y(m) = sum_i c[i] d(m-i)` read `conj(R) c = r`. Only entries with
//! `i = j (mod osf)` can be nonzero, so the system splits into `osf`
//! independent branch systems of size `ceil(N / osf)`.

use std::ops::Range;

use num_complex::Complex64;
use serde::Serialize;

use crate::bits::generate_bits;
use crate::cpm::cpm_modulate_with;
use crate::error::{Error, Result};
use crate::fir::upsample_filter;
use crate::laurent::{build_beta, PseudoSymbolStream};
use crate::metrics::{default_guard, MseDb};
use crate::params::ModulationParams;
use crate::pulse::phase_response;
use crate::signal::BasebandSignal;

/// Minimum number of averaged samples for a trustworthy estimate.
pub const MIN_TRAINING_SAMPLES: usize = 800_000;

/// Relative diagonal loading applied to every branch system.
pub const DIAGONAL_LOADING: f64 = 1e-10;

/// `(L + 1) osf - 1` taps: the span of `c_0` without its two zero endpoints.
pub fn default_tap_count(params: &ModulationParams) -> usize {
    (params.pulse_len + 1) * params.osf - 1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CorrelationOptions {
    pub taps: usize,
    /// Samples excluded at each end of the signal.
    pub guard: usize,
    /// Below this many averaged samples the estimate is flagged.
    pub min_samples: usize,
}

impl CorrelationOptions {
    pub fn new(taps: usize, params: &ModulationParams) -> Self {
        Self {
            taps,
            guard: default_guard(params),
            min_samples: MIN_TRAINING_SAMPLES,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationEstimate {
    /// `N x N`, Hermitian, zero wherever `i != j (mod osf)`.
    pub autocorrelation: Vec<Vec<Complex64>>,
    pub cross: Vec<Complex64>,
    /// Mean `|s(m)|^2` over the same region.
    pub signal_power: f64,
    pub sample_count: usize,
    pub region: Range<usize>,
    pub osf: usize,
    /// Set when `sample_count` is below the configured minimum.
    pub below_minimum: bool,
    pub seed: Option<u64>,
}

impl CorrelationEstimate {
    pub fn taps(&self) -> usize {
        self.cross.len()
    }
}

pub fn estimate_correlations(
    signal: &BasebandSignal,
    b0: &PseudoSymbolStream,
    opts: &CorrelationOptions,
) -> Result<CorrelationEstimate> {
    let osf = b0.params.osf;
    let n_taps = opts.taps;
    let len = signal.len();
    if len != b0.len() * osf {
        return Err(Error::LengthMismatch {
            what: "signal vs. pseudo-symbols * osf",
            expected: b0.len() * osf,
            got: len,
        });
    }
    if n_taps == 0 || n_taps > len {
        return Err(Error::TooManyTaps { taps: n_taps, len });
    }
    let start = opts.guard.max(n_taps - 1);
    let end = len.saturating_sub(opts.guard);
    if start >= end {
        return Err(Error::InsufficientTraining {
            got: 0,
            need: opts.min_samples,
        });
    }
    let count = end - start;
    let scale = 1.0 / count as f64;
    let b = &b0.values;
    let s = &signal.samples;

    // Symbols n with n*osf + i inside the region.
    let symbols_for = |i: usize| {
        let lo = (start.saturating_sub(i)).div_ceil(osf);
        let hi = (end - i).div_ceil(osf);
        lo..hi
    };

    let zero = Complex64::new(0.0, 0.0);
    let mut autocorrelation = vec![vec![zero; n_taps]; n_taps];
    let mut cross = vec![zero; n_taps];
    for i in 0..n_taps {
        let range = symbols_for(i);
        for j in (i..n_taps).step_by(osf) {
            let lag = (j - i) / osf;
            let acc: Complex64 = range
                .clone()
                .filter(|&n| n >= lag)
                .map(|n| b[n] * b[n - lag].conj())
                .sum();
            let v = acc * scale;
            autocorrelation[i][j] = v;
            autocorrelation[j][i] = v.conj();
        }
        // The diagonal is a sum of |b|^2; drop rounding residue in Im.
        autocorrelation[i][i] = Complex64::new(autocorrelation[i][i].re, 0.0);
        let acc: Complex64 = range.map(|n| s[n * osf + i] * b[n].conj()).sum();
        cross[i] = acc * scale;
    }
    let signal_power = s[start..end].iter().map(|z| z.norm_sqr()).sum::<f64>() * scale;

    Ok(CorrelationEstimate {
        autocorrelation,
        cross,
        signal_power,
        sample_count: count,
        region: start..end,
        osf,
        below_minimum: count < opts.min_samples,
        seed: None,
    })
}

/// Cholesky solve of a Hermitian positive definite system, in place.
fn hermitian_solve(mut a: Vec<Vec<Complex64>>, mut rhs: Vec<Complex64>) -> Option<Vec<Complex64>> {
    let n = rhs.len();
    for j in 0..n {
        let mut d = a[j][j].re;
        for k in 0..j {
            d -= a[j][k].norm_sqr();
        }
        if !(d.is_finite() && d > 0.0) {
            return None;
        }
        let d = d.sqrt();
        a[j][j] = Complex64::new(d, 0.0);
        for i in (j + 1)..n {
            let mut v = a[i][j];
            for k in 0..j {
                v -= a[i][k] * a[j][k].conj();
            }
            a[i][j] = v / d;
        }
    }
    // L y = rhs
    for i in 0..n {
        for k in 0..i {
            let t = a[i][k] * rhs[k];
            rhs[i] -= t;
        }
        rhs[i] /= a[i][i].re;
    }
    // L^H x = y
    for i in (0..n).rev() {
        for k in (i + 1)..n {
            let t = a[k][i].conj() * rhs[k];
            rhs[i] -= t;
        }
        rhs[i] /= a[i][i].re;
    }
    Some(rhs)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FilterProvenance {
    pub seed: Option<u64>,
    pub sample_count: usize,
    pub below_minimum: bool,
}

/// MMSE transmit filter `c_w(0..N)` at `Tc` spacing.
#[derive(Debug, Clone, PartialEq)]
pub struct WienerFilter {
    pub taps: Vec<Complex64>,
    pub source: FilterProvenance,
    /// Training MSE from the quadratic form `P_s - 2 Re(c^H r) + c^H conj(R) c`.
    pub achieved_mse_db: MseDb,
    pub estimate: CorrelationEstimate,
}

impl WienerFilter {
    pub fn len(&self) -> usize {
        self.taps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taps.is_empty()
    }

    /// Drives the filter with the `b_{0,n}` stream; aligned with the
    /// reference CPM like the Laurent bank.
    pub fn modulate(&self, b0: &PseudoSymbolStream) -> BasebandSignal {
        let osf = b0.params.osf;
        let samples = upsample_filter(&b0.values, &self.taps, osf, b0.len() * osf);
        BasebandSignal::new(samples, b0.params.sample_period())
    }

    /// Largest imaginary part relative to the largest tap magnitude.
    pub fn imaginary_ratio(&self) -> f64 {
        let peak = self.taps.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let im = self.taps.iter().map(|c| c.im.abs()).fold(0.0, f64::max);
        if peak > 0.0 {
            im / peak
        } else {
            0.0
        }
    }
}

pub fn solve_wiener_hopf(est: &CorrelationEstimate) -> Result<WienerFilter> {
    let n_taps = est.taps();
    let osf = est.osf.max(1);
    let mut taps = vec![Complex64::new(0.0, 0.0); n_taps];
    for branch in 0..osf.min(n_taps) {
        let idx: Vec<usize> = (branch..n_taps).step_by(osf).collect();
        let size = idx.len();
        let mut system: Vec<Vec<Complex64>> = idx
            .iter()
            .map(|&i| idx.iter().map(|&j| est.autocorrelation[i][j].conj()).collect())
            .collect();
        let trace: f64 = (0..size).map(|a| system[a][a].re).sum();
        if !(trace.is_finite() && trace > 0.0) {
            return Err(Error::SingularBranch { branch });
        }
        let loading = DIAGONAL_LOADING * trace / size as f64;
        for (a, row) in system.iter_mut().enumerate() {
            row[a] += loading;
        }
        let rhs = idx.iter().map(|&i| est.cross[i]).collect();
        let solution = hermitian_solve(system, rhs).ok_or(Error::SingularBranch { branch })?;
        for (&i, c) in idx.iter().zip(solution) {
            taps[i] = c;
        }
    }

    let mut quad = est.signal_power;
    for i in 0..n_taps {
        quad -= 2.0 * (taps[i].conj() * est.cross[i]).re;
        for j in (i % osf..n_taps).step_by(osf) {
            quad += (taps[i].conj() * est.autocorrelation[i][j].conj() * taps[j]).re;
        }
    }

    Ok(WienerFilter {
        taps,
        source: FilterProvenance {
            seed: est.seed,
            sample_count: est.sample_count,
            below_minimum: est.below_minimum,
        },
        achieved_mse_db: MseDb::from_power(quad.max(0.0)),
        estimate: est.clone(),
    })
}

/// `< e(m) conj(d(m-i)) >` over `region` for `e = s - c * d`.
///
/// Zero at the exact Wiener solution; used as an optimality check.
pub fn orthogonality_residual(
    signal: &BasebandSignal,
    b0: &PseudoSymbolStream,
    taps: &[Complex64],
    region: Range<usize>,
) -> Vec<Complex64> {
    let osf = b0.params.osf;
    let y = upsample_filter(&b0.values, taps, osf, signal.len());
    let count = region.len() as f64;
    (0..taps.len())
        .map(|i| {
            region
                .clone()
                .filter(|m| m >= &i && (m - i) % osf == 0)
                .map(|m| (signal.samples[m] - y[m]) * b0.values[(m - i) / osf].conj())
                .sum::<Complex64>()
                / count
        })
        .collect()
}

/// Mean squared error of `taps` driven by `b0` against `signal` over `region`.
pub fn training_mse(
    signal: &BasebandSignal,
    b0: &PseudoSymbolStream,
    taps: &[Complex64],
    region: Range<usize>,
) -> f64 {
    let osf = b0.params.osf;
    let y = upsample_filter(&b0.values, taps, osf, signal.len());
    let count = region.len() as f64;
    region.map(|m| (signal.samples[m] - y[m]).norm_sqr()).sum::<f64>() / count
}

/// End-to-end MMSE design: bits, reference CPM, `b_{0,n}`, statistics, solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MmseDesign {
    pub params: ModulationParams,
    pub seed: u64,
    pub taps: usize,
    pub training_bits: usize,
    pub guard: usize,
    pub min_samples: usize,
}

impl MmseDesign {
    pub fn new(params: ModulationParams, seed: u64, taps: usize, training_bits: usize) -> Self {
        Self {
            params,
            seed,
            taps,
            training_bits,
            guard: default_guard(&params),
            min_samples: MIN_TRAINING_SAMPLES,
        }
    }

    /// Lowers the sample-count floor (small tests, quick sweeps).
    pub fn with_min_samples(mut self, min_samples: usize) -> Self {
        self.min_samples = min_samples;
        self
    }

    /// Training signal and its `b_{0,n}` stream.
    pub fn training_data(&self) -> Result<(BasebandSignal, PseudoSymbolStream)> {
        let pulse = phase_response(&self.params)?;
        let bits = generate_bits(self.training_bits, self.seed)?;
        let signal = cpm_modulate_with(&bits, &pulse)?;
        let b0 = pseudo_symbols_main(&bits, &self.params)?;
        Ok((signal, b0))
    }

    pub fn run(&self) -> Result<WienerFilter> {
        let available = self.training_bits * self.params.osf;
        if available < self.min_samples {
            return Err(Error::InsufficientTraining {
                got: available,
                need: self.min_samples,
            });
        }
        let (signal, b0) = self.training_data()?;
        self.run_on(&signal, &b0)
    }

    /// Estimation and solve on already generated training data.
    pub fn run_on(&self, signal: &BasebandSignal, b0: &PseudoSymbolStream) -> Result<WienerFilter> {
        let opts = CorrelationOptions {
            taps: self.taps,
            guard: self.guard,
            min_samples: self.min_samples,
        };
        let mut est = estimate_correlations(signal, b0, &opts)?;
        est.seed = Some(self.seed);
        solve_wiener_hopf(&est)
    }
}

pub fn design_mmse_filter(
    params: &ModulationParams,
    seed: u64,
    taps: usize,
    training_bits: usize,
) -> Result<WienerFilter> {
    MmseDesign::new(*params, seed, taps, training_bits).run()
}

/// `b_{0,n}` only; row 0 of the bit matrix is all zeros.
pub(crate) fn pseudo_symbols_main(
    bits: &crate::bits::SymbolStream,
    params: &ModulationParams,
) -> Result<PseudoSymbolStream> {
    let beta = build_beta(params.pulse_len);
    let mut streams = crate::laurent::pseudo_symbols(bits, &beta, params)?;
    Ok(streams.swap_remove(0))
}
