//! Bit-true fixed-point model of the transmit datapath.
//!
//! Conventions, applied everywhere:
//!
//! * signal codes are two's complement with `signal_bits` bits; a sample `x`
//!   maps to `round(x / scale * 2^(signal_bits-1))`;
//! * taps are `internal_bits` wide with a power-of-two scale `2^-frac_bits`,
//!   chosen so the largest tap component lands in `(1/4, 1/2]` of internal
//!   full scale;
//! * multiplies are `internal_bits x internal_bits` and accumulate into a
//!   `2 * internal_bits` accumulator;
//! * the only rounding step is the final shift back to `signal_bits`;
//! * rounding is to nearest, ties to even; overflow saturates and is counted.
//!
//! All arithmetic after quantization is integer, so results are identical on
//! every platform.

use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::BasebandSignal;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FixedPointConfig {
    pub signal_bits: u32,
    pub internal_bits: u32,
    /// Amplitude mapped to the full-scale code.
    pub scale: f64,
}

impl Default for FixedPointConfig {
    fn default() -> Self {
        Self {
            signal_bits: 12,
            internal_bits: 16,
            scale: 1.0,
        }
    }
}

impl FixedPointConfig {
    pub fn new(signal_bits: u32, internal_bits: u32) -> Result<Self> {
        let c = Self {
            signal_bits,
            internal_bits,
            ..Self::default()
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(2 <= self.signal_bits && self.signal_bits <= self.internal_bits && self.internal_bits <= 32) {
            return Err(Error::FixedPoint(format!(
                "need 2 <= signal_bits ({}) <= internal_bits ({}) <= 32",
                self.signal_bits, self.internal_bits
            )));
        }
        if !(self.scale.is_finite() && self.scale > 0.0) {
            return Err(Error::FixedPoint(format!("scale must be positive, got {}", self.scale)));
        }
        Ok(())
    }

    pub fn code_min(&self) -> i64 {
        -(1i64 << (self.signal_bits - 1))
    }

    pub fn code_max(&self) -> i64 {
        (1i64 << (self.signal_bits - 1)) - 1
    }

    /// Amplitude of one signal LSB.
    pub fn lsb(&self) -> f64 {
        self.scale / (1u64 << (self.signal_bits - 1)) as f64
    }

    fn acc_bits(&self) -> u32 {
        2 * self.internal_bits
    }
}

/// Integer I/Q codes at `signal_bits`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantizedSignal {
    pub i_codes: Vec<i32>,
    pub q_codes: Vec<i32>,
    pub config: FixedPointConfigBits,
    /// Number of rail values clamped during production of this signal.
    pub saturations: usize,
}

/// The bit-exact part of [`FixedPointConfig`] plus the sample period.
///
/// Kept separate so that quantized signals compare with `Eq`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FixedPointConfigBits {
    pub signal_bits: u32,
    pub internal_bits: u32,
    scale_bits: u64,
    period_bits: u64,
}

impl FixedPointConfigBits {
    fn new(config: &FixedPointConfig, sample_period: f64) -> Self {
        Self {
            signal_bits: config.signal_bits,
            internal_bits: config.internal_bits,
            scale_bits: config.scale.to_bits(),
            period_bits: sample_period.to_bits(),
        }
    }

    pub fn config(&self) -> FixedPointConfig {
        FixedPointConfig {
            signal_bits: self.signal_bits,
            internal_bits: self.internal_bits,
            scale: f64::from_bits(self.scale_bits),
        }
    }

    pub fn sample_period(&self) -> f64 {
        f64::from_bits(self.period_bits)
    }
}

impl QuantizedSignal {
    pub fn len(&self) -> usize {
        self.i_codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.i_codes.is_empty()
    }

    pub fn sample_period(&self) -> f64 {
        self.config.sample_period()
    }

    /// Interleaved I/Q text, one `i q` pair per line.
    pub fn write_iq_text<W: Write>(&self, mut w: W) -> Result<()> {
        for (i, q) in self.i_codes.iter().zip(&self.q_codes) {
            writeln!(w, "{i} {q}")?;
        }
        Ok(())
    }

    /// Little-endian 16-bit records, I then Q per sample.
    pub fn write_iq_le16<W: Write>(&self, mut w: W) -> Result<()> {
        if self.config.signal_bits > 16 {
            return Err(Error::FixedPoint(format!(
                "{}-bit codes do not fit 16-bit records",
                self.config.signal_bits
            )));
        }
        for (&i, &q) in self.i_codes.iter().zip(&self.q_codes) {
            w.write_all(&(i as i16).to_le_bytes())?;
            w.write_all(&(q as i16).to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_iq_le16(bytes: &[u8], config: &FixedPointConfig, sample_period: f64) -> Result<Self> {
        if !bytes.len().is_multiple_of(4) {
            return Err(Error::FixedPoint("record stream length is not a multiple of 4".into()));
        }
        let (i_codes, q_codes) = bytes
            .chunks_exact(4)
            .map(|r| {
                (
                    i32::from(i16::from_le_bytes([r[0], r[1]])),
                    i32::from(i16::from_le_bytes([r[2], r[3]])),
                )
            })
            .unzip();
        Ok(Self {
            i_codes,
            q_codes,
            config: FixedPointConfigBits::new(config, sample_period),
            saturations: 0,
        })
    }
}

fn saturate(v: i128, min: i128, max: i128, count: &mut usize) -> i128 {
    if v > max {
        *count += 1;
        max
    } else if v < min {
        *count += 1;
        min
    } else {
        v
    }
}

/// `round(x)` with ties to even, clamped to `[min, max]`.
fn quantize_value(x: f64, min: i64, max: i64, count: &mut usize) -> i32 {
    let r = x.round_ties_even();
    let v = if r.is_nan() {
        0
    } else if r > max as f64 {
        *count += 1;
        max
    } else if r < min as f64 {
        *count += 1;
        min
    } else {
        r as i64
    };
    v as i32
}

/// `v / 2^shift` rounded to nearest, ties to even.
pub fn round_shift_even(v: i128, shift: u32) -> i128 {
    if shift == 0 {
        return v;
    }
    let floor = v >> shift;
    let rem = v - (floor << shift);
    let half = 1i128 << (shift - 1);
    if rem > half || (rem == half && floor & 1 == 1) {
        floor + 1
    } else {
        floor
    }
}

pub fn quantize_signal(signal: &BasebandSignal, config: &FixedPointConfig) -> Result<QuantizedSignal> {
    config.validate()?;
    let gain = (1u64 << (config.signal_bits - 1)) as f64 / config.scale;
    let (min, max) = (config.code_min(), config.code_max());
    let mut saturations = 0;
    let mut i_codes = Vec::with_capacity(signal.len());
    let mut q_codes = Vec::with_capacity(signal.len());
    for z in &signal.samples {
        i_codes.push(quantize_value(z.re * gain, min, max, &mut saturations));
        q_codes.push(quantize_value(z.im * gain, min, max, &mut saturations));
    }
    Ok(QuantizedSignal {
        i_codes,
        q_codes,
        config: FixedPointConfigBits::new(config, signal.sample_period),
        saturations,
    })
}

pub fn dequantize(q: &QuantizedSignal) -> BasebandSignal {
    let lsb = q.config.config().lsb();
    let samples = q
        .i_codes
        .iter()
        .zip(&q.q_codes)
        .map(|(&i, &qq)| Complex64::new(f64::from(i) * lsb, f64::from(qq) * lsb))
        .collect();
    BasebandSignal::new(samples, q.sample_period())
}

/// Filter taps as `internal_bits` integers with value `code * 2^-frac_bits`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantizedTaps {
    pub re: Vec<i32>,
    pub im: Vec<i32>,
    pub frac_bits: u32,
    pub internal_bits: u32,
}

impl QuantizedTaps {
    pub fn len(&self) -> usize {
        self.re.len()
    }

    pub fn is_empty(&self) -> bool {
        self.re.is_empty()
    }

    pub fn to_complex(&self) -> Vec<Complex64> {
        let step = (-(self.frac_bits as f64)).exp2();
        self.re
            .iter()
            .zip(&self.im)
            .map(|(&r, &i)| Complex64::new(f64::from(r) * step, f64::from(i) * step))
            .collect()
    }
}

/// Largest `F` with `peak * 2^F <= 2^(internal_bits - 2)`.
fn tap_frac_bits(peak: f64, internal_bits: u32) -> Result<u32> {
    if !(peak.is_finite() && peak > 0.0) {
        return Err(Error::FixedPoint("taps are all zero or not finite".into()));
    }
    let half_scale = (internal_bits - 2) as f64;
    let f = (half_scale - peak.log2()).floor();
    // Keep the shift inside the accumulator.
    if f < 0.0 || f > f64::from(2 * internal_bits - 2) {
        return Err(Error::FixedPoint(format!("tap peak {peak} out of range")));
    }
    let mut f = f as u32;
    // Guard against log2 rounding at exact powers of two.
    while f > 0 && peak * (f as f64).exp2() > (half_scale).exp2() {
        f -= 1;
    }
    Ok(f)
}

fn peak_component(taps: &[Complex64]) -> f64 {
    taps.iter().map(|c| c.re.abs().max(c.im.abs())).fold(0.0, f64::max)
}

/// Quantizes several filters with one shared scale so their outputs can be
/// summed in a single accumulator.
pub fn quantize_tap_bank(filters: &[&[Complex64]], config: &FixedPointConfig) -> Result<Vec<QuantizedTaps>> {
    config.validate()?;
    let peak = filters.iter().map(|f| peak_component(f)).fold(0.0, f64::max);
    let frac_bits = tap_frac_bits(peak, config.internal_bits)?;
    let gain = (frac_bits as f64).exp2();
    let lim = (1i64 << (config.internal_bits - 1)) - 1;
    let mut sat = 0;
    Ok(filters
        .iter()
        .map(|f| QuantizedTaps {
            re: f.iter().map(|c| quantize_value(c.re * gain, -lim - 1, lim, &mut sat)).collect(),
            im: f.iter().map(|c| quantize_value(c.im * gain, -lim - 1, lim, &mut sat)).collect(),
            frac_bits,
            internal_bits: config.internal_bits,
        })
        .collect())
}

pub fn quantize_taps(taps: &[Complex64], config: &FixedPointConfig) -> Result<QuantizedTaps> {
    Ok(quantize_tap_bank(&[taps], config)?.remove(0))
}

/// Bit-exact FIR: `y[m] = sum_j taps[j] * x[m - j]`, one rounding at the end.
pub fn fir_fixed(input: &QuantizedSignal, taps: &QuantizedTaps, config: &FixedPointConfig) -> Result<QuantizedSignal> {
    fir_fixed_sum(&[(input, taps)], config)
}

/// Several FIR branches summed in one accumulator before the output rounding.
///
/// All tap sets must share `frac_bits` (see [`quantize_tap_bank`]).
pub fn fir_fixed_sum(
    branches: &[(&QuantizedSignal, &QuantizedTaps)],
    config: &FixedPointConfig,
) -> Result<QuantizedSignal> {
    config.validate()?;
    let (first, first_taps) = branches
        .first()
        .ok_or_else(|| Error::FixedPoint("no FIR branches".into()))?;
    let len = first.len();
    let frac_bits = first_taps.frac_bits;
    let operand = 1i64 << (config.internal_bits - 1);
    for (x, t) in branches {
        if x.len() != len {
            return Err(Error::LengthMismatch {
                what: "fixed-point branch inputs",
                expected: len,
                got: x.len(),
            });
        }
        if t.frac_bits != frac_bits {
            return Err(Error::FixedPoint("tap sets use different scales".into()));
        }
        if x.config.signal_bits > config.internal_bits || t.internal_bits > config.internal_bits {
            return Err(Error::FixedPoint("operand wider than internal_bits".into()));
        }
        let fits = |c: &i32| (-operand..operand).contains(&i64::from(*c));
        if !(t.re.iter().all(fits) && t.im.iter().all(fits)) {
            return Err(Error::FixedPoint("tap code exceeds internal_bits".into()));
        }
    }

    let acc_max = (1i128 << (config.acc_bits() - 1)) - 1;
    let acc_min = -(1i128 << (config.acc_bits() - 1));
    let (out_min, out_max) = (i128::from(config.code_min()), i128::from(config.code_max()));
    let mut saturations = 0;
    let mut i_codes = Vec::with_capacity(len);
    let mut q_codes = Vec::with_capacity(len);
    for m in 0..len {
        let mut acc_re: i128 = 0;
        let mut acc_im: i128 = 0;
        for (x, t) in branches {
            for j in 0..t.len().min(m + 1) {
                let (xr, xi) = (i128::from(x.i_codes[m - j]), i128::from(x.q_codes[m - j]));
                if xr == 0 && xi == 0 {
                    continue;
                }
                let (tr, ti) = (i128::from(t.re[j]), i128::from(t.im[j]));
                acc_re += tr * xr - ti * xi;
                acc_im += tr * xi + ti * xr;
            }
        }
        let acc_re = saturate(acc_re, acc_min, acc_max, &mut saturations);
        let acc_im = saturate(acc_im, acc_min, acc_max, &mut saturations);
        let yr = saturate(round_shift_even(acc_re, frac_bits), out_min, out_max, &mut saturations);
        let yi = saturate(round_shift_even(acc_im, frac_bits), out_min, out_max, &mut saturations);
        i_codes.push(yr as i32);
        q_codes.push(yi as i32);
    }
    Ok(QuantizedSignal {
        i_codes,
        q_codes,
        config: FixedPointConfigBits::new(config, first.sample_period()),
        saturations: saturations + branches.iter().map(|(x, _)| x.saturations).sum::<usize>(),
    })
}
