//! Frequency pulse `f(t)` and phase response `q(t)`.
//!
//! The phase response of the raised-cosine pulse is integrated in closed form,
//! `q(t) = (1 / 2LT) [t - (LT / 2 pi) sin(2 pi t / LT)]`, so `q(LT) = 1/2`
//! holds to machine precision independently of the sampling grid.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::params::{ModulationParams, PulseShape};

/// Largest tolerated `|q(LT) - 1/2|`.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

/// Raised-cosine frequency pulse; zero outside `[0, LT]`.
pub fn rc_frequency_pulse(t: f64, params: &ModulationParams) -> f64 {
    let lt = params.pulse_duration();
    if !(0.0..=lt).contains(&t) {
        return 0.0;
    }
    (1.0 - (2.0 * PI * t / lt).cos()) / (2.0 * lt)
}

fn rc_phase(t: f64, lt: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= lt {
        0.5
    } else {
        (t - lt / (2.0 * PI) * (2.0 * PI * t / lt).sin()) / (2.0 * lt)
    }
}

/// Frequency pulse and phase response sampled at `Tc` on `[0, LT]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePulse {
    /// `f(n Tc)`, `n = 0..=L*osf`.
    pub f_taps: Vec<f64>,
    /// `q(n Tc)`, `n = 0..=L*osf`.
    pub q_taps: Vec<f64>,
    pub params: ModulationParams,
}

pub fn phase_response(params: &ModulationParams) -> Result<PhasePulse> {
    params.validate()?;
    if params.osf < 2 {
        return Err(Error::InvalidParams(format!(
            "phase pulse needs at least 2 samples per symbol, got osf = {}",
            params.osf
        )));
    }
    let n = params.pulse_samples();
    let tc = params.sample_period();
    // Sample the first half and mirror it: f is symmetric about LT/2 and
    // q(LT - t) = 1/2 - q(t), so both relations hold exactly on the grid.
    let half = |k: usize| k.min(n - k);
    let f_taps: Vec<f64> = (0..=n)
        .map(|k| match params.pulse {
            PulseShape::RaisedCosine => rc_frequency_pulse(half(k) as f64 * tc, params),
        })
        .collect();
    let lt = params.pulse_duration();
    let q_taps: Vec<f64> = (0..=n)
        .map(|k| {
            let base = rc_phase(half(k) as f64 * tc, lt);
            if 2 * k > n {
                0.5 - base
            } else {
                base
            }
        })
        .collect();

    let end = q_taps[n];
    if (end - 0.5).abs() > NORMALIZATION_TOLERANCE || q_taps[0] != 0.0 {
        return Err(Error::PulseNormalization {
            error: end - 0.5,
            tolerance: NORMALIZATION_TOLERANCE,
        });
    }
    Ok(PhasePulse {
        f_taps,
        q_taps,
        params: *params,
    })
}

impl PhasePulse {
    /// `q(t)` at an arbitrary time, saturating at 1/2 beyond `LT`.
    pub fn q(&self, t: f64) -> f64 {
        match self.params.pulse {
            PulseShape::RaisedCosine => rc_phase(t, self.params.pulse_duration()),
        }
    }

    /// `q(k Tc)` for any integer `k`; 0 before the pulse, 1/2 after it.
    pub fn q_at(&self, k: i64) -> f64 {
        if k <= 0 {
            0.0
        } else if k as usize >= self.q_taps.len() - 1 {
            0.5
        } else {
            self.q_taps[k as usize]
        }
    }

    /// `f(k Tc)`, zero off the support.
    pub fn f_at(&self, k: i64) -> f64 {
        if k < 0 || k as usize >= self.f_taps.len() {
            0.0
        } else {
            self.f_taps[k as usize]
        }
    }

    pub fn max_frequency(&self) -> f64 {
        self.f_taps.iter().copied().fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pcm_fm() -> ModulationParams {
        ModulationParams::default()
    }

    #[test]
    fn rc_pulse_values() {
        let p = pcm_fm();
        assert_eq!(rc_frequency_pulse(0.0, &p), 0.0);
        assert!((rc_frequency_pulse(1.0, &p) - 0.5).abs() < 1e-15);
        assert_eq!(rc_frequency_pulse(-0.25, &p), 0.0);
        assert_eq!(rc_frequency_pulse(2.5, &p), 0.0);
        assert!((rc_frequency_pulse(0.5, &p) - rc_frequency_pulse(1.5, &p)).abs() < 1e-15);
    }

    #[test]
    fn phase_response_endpoints() {
        let pulse = phase_response(&pcm_fm()).unwrap();
        let n = pulse.q_taps.len() - 1;
        assert_eq!(n, 16);
        assert_eq!(pulse.q_taps[0], 0.0);
        assert_eq!(pulse.q_taps[n], 0.5);
        assert!((pulse.q_taps[n / 2] - 0.25).abs() < 1e-15);
        assert_eq!(pulse.q_at(-3), 0.0);
        assert_eq!(pulse.q_at(100), 0.5);
    }

    #[test]
    fn sampled_pulse_is_symmetric_and_monotone() {
        for (l, osf) in [(1, 2), (2, 8), (3, 5), (4, 7)] {
            let p = ModulationParams::new(0.7, l, osf).unwrap();
            let pulse = phase_response(&p).unwrap();
            let n = pulse.f_taps.len() - 1;
            for k in 0..=n {
                assert_eq!(pulse.f_taps[k], pulse.f_taps[n - k]);
                assert!((pulse.q_taps[k] + pulse.q_taps[n - k] - 0.5).abs() < 1e-15);
            }
            assert!(pulse.q_taps.windows(2).all(|w| w[1] >= w[0]));
        }
    }

    #[test]
    fn grid_matches_closed_form() {
        let p = ModulationParams::new(0.7, 3, 6).unwrap();
        let pulse = phase_response(&p).unwrap();
        for k in 0..pulse.q_taps.len() {
            let t = k as f64 * p.sample_period();
            assert!((pulse.q_taps[k] - pulse.q(t)).abs() < 1e-15);
            assert!((pulse.f_taps[k] - rc_frequency_pulse(t, &p)).abs() < 1e-15);
        }
    }

    #[test]
    fn closed_form_matches_quadrature() {
        // Composite Simpson on a fine grid as an independent check of q.
        let p = pcm_fm();
        let pulse = phase_response(&p).unwrap();
        for &t in &[0.3, 0.9, 1.0, 1.7, 2.0] {
            let n = 2000;
            let h = t / n as f64;
            let mut acc = rc_frequency_pulse(0.0, &p) + rc_frequency_pulse(t, &p);
            for i in 1..n {
                let w = if i % 2 == 1 { 4.0 } else { 2.0 };
                acc += w * rc_frequency_pulse(i as f64 * h, &p);
            }
            let simpson = acc * h / 3.0;
            assert!((simpson - pulse.q(t)).abs() < 1e-12, "t={t}");
        }
    }

    #[test]
    fn coarse_grid_rejected() {
        let p = ModulationParams::new(0.7, 2, 1).unwrap();
        assert!(phase_response(&p).is_err());
    }
}
