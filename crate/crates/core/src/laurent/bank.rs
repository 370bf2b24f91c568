use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::params::ModulationParams;
use crate::pulse::PhasePulse;

use super::beta::{build_beta, BetaMatrix};

fn check_h(h: f64) -> Result<f64> {
    if (h - h.round()).abs() < 1e-12 {
        return Err(Error::IntegerModulationIndex(h));
    }
    Ok((PI * h).sin())
}

/// The Laurent kernel `u(t)`, supported on `[0, 2LT]`.
///
/// The second half uses `sin(pi h - 2 pi h q(t - LT)) / sin(pi h)`, which is
/// continuous at `LT` and mirrors the first half.
#[derive(Debug, Clone)]
pub struct LaurentKernel<'a> {
    pulse: &'a PhasePulse,
    sin_pi_h: f64,
}

impl<'a> LaurentKernel<'a> {
    pub fn new(pulse: &'a PhasePulse) -> Result<Self> {
        let sin_pi_h = check_h(pulse.params.h)?;
        Ok(Self { pulse, sin_pi_h })
    }

    /// `u(t)` at an arbitrary time.
    pub fn eval(&self, t: f64) -> f64 {
        let lt = self.pulse.params.pulse_duration();
        let h = self.pulse.params.h;
        if (0.0..=lt).contains(&t) {
            (2.0 * PI * h * self.pulse.q(t)).sin() / self.sin_pi_h
        } else if t > lt && t <= 2.0 * lt {
            (PI * h - 2.0 * PI * h * self.pulse.q(t - lt)).sin() / self.sin_pi_h
        } else {
            0.0
        }
    }

    /// `u(k Tc)` on the sample grid.
    pub fn at(&self, k: i64) -> f64 {
        let n = self.pulse.params.pulse_samples() as i64;
        let h = self.pulse.params.h;
        if (0..=n).contains(&k) {
            (2.0 * PI * h * self.pulse.q_at(k)).sin() / self.sin_pi_h
        } else if k > n && k <= 2 * n {
            (PI * h - 2.0 * PI * h * self.pulse.q_at(k - n)).sin() / self.sin_pi_h
        } else {
            0.0
        }
    }
}

/// `u(t)` for a single time instant. Rejects integer `h`.
pub fn laurent_u(t: f64, pulse: &PhasePulse) -> Result<f64> {
    Ok(LaurentKernel::new(pulse)?.eval(t))
}

/// The `Q` Laurent filters sampled at `Tc`, plus the matching bit matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct LaurentBank {
    /// `filters[k][n] = c_k(n Tc)`, `n = 0..=support_k * osf`. Both support
    /// endpoints are sampled.
    pub filters: Vec<Vec<f64>>,
    pub beta: BetaMatrix,
    pub params: ModulationParams,
}

impl LaurentBank {
    pub fn component_count(&self) -> usize {
        self.filters.len()
    }

    pub fn filter(&self, k: usize) -> &[f64] {
        &self.filters[k]
    }

    pub fn energy(&self, k: usize) -> f64 {
        self.filters[k].iter().map(|c| c * c).sum()
    }

    /// Length of the longest filter in samples.
    pub fn span(&self) -> usize {
        self.filters.iter().map(Vec::len).max().unwrap_or(0)
    }
}

/// Support length of `c_k` in symbol periods: `min_i (2L - i - L beta_{k,i})`.
pub fn support_symbols(beta: &BetaMatrix, k: usize) -> usize {
    let l = beta.pulse_len();
    beta.row(k)
        .iter()
        .enumerate()
        .map(|(i, &b)| 2 * l - i - l * usize::from(b))
        .min()
        .unwrap_or(0)
}

pub fn build_laurent_bank(params: &ModulationParams, pulse: &PhasePulse) -> Result<LaurentBank> {
    params.validate()?;
    params.ensure_same(&pulse.params)?;
    let kernel = LaurentKernel::new(pulse)?;
    let beta = build_beta(params.pulse_len);
    let osf = params.osf as i64;
    let shift_lt = params.pulse_samples() as i64;

    let filters = (0..beta.component_count())
        .map(|k| {
            let row = beta.row(k);
            let len = support_symbols(&beta, k) * params.osf + 1;
            (0..len as i64)
                .map(|n| {
                    row.iter()
                        .enumerate()
                        .map(|(i, &b)| kernel.at(n + i as i64 * osf + i64::from(b) * shift_lt))
                        .product()
                })
                .collect()
        })
        .collect();

    Ok(LaurentBank {
        filters,
        beta,
        params: *params,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulse::phase_response;

    fn pcm_fm() -> (ModulationParams, PhasePulse) {
        let p = ModulationParams::default();
        (p, phase_response(&p).unwrap())
    }

    #[test]
    fn u_landmarks() {
        let (_, pulse) = pcm_fm();
        let u = LaurentKernel::new(&pulse).unwrap();
        assert_eq!(u.eval(0.0), 0.0);
        assert!((u.eval(2.0) - 1.0).abs() < 1e-15);
        assert!(u.eval(4.0).abs() < 1e-15);
        assert_eq!(u.eval(-0.1), 0.0);
        assert_eq!(u.eval(4.1), 0.0);
        // sin(0.35 pi) / sin(0.7 pi), 30-digit reference.
        assert!((u.eval(1.0) - 1.101_344_632_292_633_2).abs() < 1e-12);
        assert!((laurent_u(1.0, &pulse).unwrap() - u.eval(1.0)).abs() < 1e-15);
    }

    #[test]
    fn u_symmetric_and_continuous_on_grid() {
        let (p, pulse) = pcm_fm();
        let u = LaurentKernel::new(&pulse).unwrap();
        let n = p.pulse_samples() as i64;
        assert!((u.at(n) - 1.0).abs() < 1e-12);
        for k in 0..=2 * n {
            assert!((u.at(k) - u.at(2 * n - k)).abs() < 1e-12);
            let t = k as f64 * p.sample_period();
            assert!((u.at(k) - u.eval(t)).abs() < 1e-14);
        }
        // Left and right limits around LT.
        let lt = p.pulse_duration();
        assert!((u.eval(lt - 1e-9) - u.eval(lt + 1e-9)).abs() < 1e-8);
    }

    #[test]
    fn integer_h_rejected() {
        let p = ModulationParams::new(1.0, 2, 8).unwrap();
        let pulse = phase_response(&p).unwrap();
        assert!(matches!(
            laurent_u(0.5, &pulse),
            Err(Error::IntegerModulationIndex(_))
        ));
        assert!(build_laurent_bank(&p, &pulse).is_err());
    }

    #[test]
    fn pcm_fm_bank_shape() {
        let (p, pulse) = pcm_fm();
        let bank = build_laurent_bank(&p, &pulse).unwrap();
        assert_eq!(bank.component_count(), 2);
        assert_eq!(bank.filter(0).len(), 25);
        assert_eq!(bank.filter(1).len(), 9);
        assert!(bank.filters.iter().flatten().all(|&c| c >= 0.0));
        assert!(bank.energy(0) > bank.energy(1));
        // c_0 vanishes at both ends of [0, 3T], c_1 at both ends of [0, T].
        assert!(bank.filter(0)[0].abs() < 1e-15 && bank.filter(0)[24].abs() < 1e-15);
        assert!(bank.filter(1)[0].abs() < 1e-15 && bank.filter(1)[8].abs() < 1e-15);
    }

    #[test]
    fn bank_matches_product_definition() {
        // c_0(t) = u(t) u(t + T) and c_1(t) = u(t) u(t + 3T) for L = 2.
        let (p, pulse) = pcm_fm();
        let u = LaurentKernel::new(&pulse).unwrap();
        let bank = build_laurent_bank(&p, &pulse).unwrap();
        for (n, &c) in bank.filter(0).iter().enumerate() {
            let t = n as f64 / 8.0;
            assert!((c - u.eval(t) * u.eval(t + 1.0)).abs() < 1e-14);
        }
        for (n, &c) in bank.filter(1).iter().enumerate() {
            let t = n as f64 / 8.0;
            assert!((c - u.eval(t) * u.eval(t + 3.0)).abs() < 1e-14);
        }
        // Beyond the support every product vanishes.
        assert!((u.eval(3.125) * u.eval(4.125)).abs() < 1e-15);
        assert!((u.eval(1.125) * u.eval(4.125)).abs() < 1e-15);
    }

    #[test]
    fn l1_bank_is_u() {
        let p = ModulationParams::new(0.5, 1, 8).unwrap();
        let pulse = phase_response(&p).unwrap();
        let bank = build_laurent_bank(&p, &pulse).unwrap();
        let u = LaurentKernel::new(&pulse).unwrap();
        assert_eq!(bank.component_count(), 1);
        assert_eq!(bank.filter(0).len(), 17);
        for (n, &c) in bank.filter(0).iter().enumerate() {
            assert_eq!(c, u.at(n as i64));
        }
    }

    #[test]
    fn supports_shrink_after_c0() {
        for l in 1..=4 {
            let beta = build_beta(l);
            assert_eq!(support_symbols(&beta, 0), l + 1);
            for k in 1..beta.component_count() {
                assert!(support_symbols(&beta, k) < l + 1);
                assert!(support_symbols(&beta, k) >= 1);
            }
        }
    }

    #[test]
    fn c0_dominates_energy() {
        for (l, h) in [(2, 0.7), (3, 0.5), (3, 0.7), (4, 0.3)] {
            let p = ModulationParams::new(h, l, 8).unwrap();
            let pulse = phase_response(&p).unwrap();
            let bank = build_laurent_bank(&p, &pulse).unwrap();
            for k in 1..bank.component_count() {
                assert!(bank.energy(0) > bank.energy(k), "L={l} h={h} k={k}");
            }
        }
    }
}
