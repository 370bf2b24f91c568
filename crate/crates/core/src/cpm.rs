//! Reference nonlinear CPM modulator, `s(t) = exp(j 2 pi h sum_i alpha_i q(t - iT))`.
//!
//! The phase state is zero before the first symbol. Output sample `n` sits at
//! `t = n Tc` for `n` in `0..count*osf`, so every symbol of the stream has
//! started by the last sample.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::bits::SymbolStream;
use crate::error::{Error, Result};
use crate::params::ModulationParams;
use crate::pulse::{phase_response, PhasePulse};
use crate::signal::BasebandSignal;

/// `pi h m` for an integer running sum `m`.
///
/// Shared with the pseudo-symbol generator so both modulators round the
/// large accumulated-phase term identically.
#[inline]
pub(crate) fn accumulated_phase(h: f64, running_sum: i64) -> f64 {
    PI * h * running_sum as f64
}

pub fn cpm_modulate(bits: &SymbolStream, params: &ModulationParams) -> Result<BasebandSignal> {
    let pulse = phase_response(params)?;
    cpm_modulate_with(bits, &pulse)
}

/// Same as [`cpm_modulate`] with a precomputed phase pulse.
pub fn cpm_modulate_with(bits: &SymbolStream, pulse: &PhasePulse) -> Result<BasebandSignal> {
    if bits.is_empty() {
        return Err(Error::EmptySymbols);
    }
    let params = &pulse.params;
    let osf = params.osf;
    let l = params.pulse_len;
    let h = params.h;
    let alpha = bits.symbols();
    let cum = bits.cumulative();

    let mut samples = Vec::with_capacity(alpha.len() * osf);
    for sym in 0..alpha.len() {
        // Symbols older than L periods have saturated at q = 1/2.
        let settled = if sym >= l {
            accumulated_phase(h, cum[sym - l])
        } else {
            0.0
        };
        let first_active = (sym + 1).saturating_sub(l);
        for offset in 0..osf {
            let mut active = 0.0;
            for (i, &a) in alpha.iter().enumerate().take(sym + 1).skip(first_active) {
                let k = ((sym - i) * osf + offset) as i64;
                active += f64::from(a) * pulse.q_at(k);
            }
            let psi = settled + 2.0 * PI * h * active;
            samples.push(Complex64::from_polar(1.0, psi));
        }
    }
    Ok(BasebandSignal::new(samples, params.sample_period()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::generate_bits;

    #[test]
    fn single_symbol_reaches_h_pi() {
        let p = ModulationParams::new(0.7, 1, 8).unwrap();
        let pulse = phase_response(&p).unwrap();
        let bits = SymbolStream::from_symbols(vec![1, 1]).unwrap();
        let s = cpm_modulate_with(&bits, &pulse).unwrap();
        // t = LT = T is sample 8: first symbol complete, second just starting.
        let expected = Complex64::from_polar(1.0, 0.7 * PI);
        assert!((s.samples[8] - expected).norm() < 1e-14);
    }

    #[test]
    fn alternating_symbols_return_to_start() {
        let p = ModulationParams::new(0.7, 1, 8).unwrap();
        let bits = SymbolStream::from_symbols(vec![1, -1, 1, -1, 1, -1, 1]).unwrap();
        let s = cpm_modulate(&bits, &p).unwrap();
        for pair in 1..3 {
            assert!((s.samples[16 * pair] - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        }
        assert!(s.max_envelope_deviation() < 1e-12);
    }

    #[test]
    fn length_and_envelope() {
        let p = ModulationParams::default();
        let bits = generate_bits(10_000, 3).unwrap();
        let s = cpm_modulate(&bits, &p).unwrap();
        assert_eq!(s.len(), 80_000);
        assert!(s.max_envelope_deviation() < 1e-12);
        assert_eq!(s.sample_period, 0.125);
    }

    #[test]
    fn all_ones_ramp() {
        let p = ModulationParams::default();
        let bits = SymbolStream::from_symbols(vec![1; 12]).unwrap();
        let s = cpm_modulate(&bits, &p).unwrap();
        // Steady state: each symbol adds h pi.
        for n in 24..(s.len() - 8) {
            let step = (s.samples[n + 8] * s.samples[n].conj()).arg();
            assert!((step - 0.7 * PI).abs() < 1e-12);
        }
    }

    #[test]
    fn matches_direct_sum_over_all_symbols() {
        // Brute force: sum every symbol's contribution with the closed-form q.
        let p = ModulationParams::new(0.6, 3, 5).unwrap();
        let pulse = phase_response(&p).unwrap();
        let bits = generate_bits(40, 11).unwrap();
        let s = cpm_modulate_with(&bits, &pulse).unwrap();
        let tc = p.sample_period();
        for (n, sample) in s.samples.iter().enumerate() {
            let t = n as f64 * tc;
            let psi: f64 = bits
                .symbols()
                .iter()
                .enumerate()
                .map(|(i, &a)| 2.0 * PI * p.h * f64::from(a) * pulse.q(t - i as f64))
                .sum();
            assert!((sample - Complex64::from_polar(1.0, psi)).norm() < 1e-12);
        }
    }

    #[test]
    fn deterministic() {
        let p = ModulationParams::default();
        let a = cpm_modulate(&generate_bits(500, 9).unwrap(), &p).unwrap();
        let b = cpm_modulate(&generate_bits(500, 9).unwrap(), &p).unwrap();
        assert_eq!(a, b);
    }
}
