//! Exact Laurent decomposition of binary CPM into `Q = 2^(L-1)` PAM components.
//!
//! `s(t) = sum_k sum_n b_{k,n} c_k(t - nT)`. The filter bank output is aligned
//! sample-for-sample with [`crate::cpm::cpm_modulate`]: no delay is applied,
//! because `c_k` starts at `t = 0` and the pseudo-symbol `b_{k,n}` already
//! carries the full `alpha_n` rotation. The only disagreement is the start-up
//! transient where the reference has an empty symbol past.

mod bank;
mod beta;

use num_complex::Complex64;

pub use bank::{build_laurent_bank, laurent_u, support_symbols, LaurentBank, LaurentKernel};
pub use beta::{build_beta, BetaMatrix};

use crate::bits::SymbolStream;
use crate::cpm::accumulated_phase;
use crate::error::{Error, Result};
use crate::fir::upsample_filter;
use crate::params::ModulationParams;
use crate::signal::BasebandSignal;

/// Symbol-rate pseudo-symbols `b_{k,n}` feeding filter `c_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudoSymbolStream {
    pub component: usize,
    pub values: Vec<Complex64>,
    pub params: ModulationParams,
}

impl PseudoSymbolStream {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// `b_{k,n} = exp(j pi h [sum_{m<=n} alpha_m - sum_i alpha_{n-i} beta_{k,i}])`.
///
/// Symbols before the stream start count as zero in both sums.
pub fn pseudo_symbols(
    bits: &SymbolStream,
    beta: &BetaMatrix,
    params: &ModulationParams,
) -> Result<Vec<PseudoSymbolStream>> {
    params.validate()?;
    if bits.is_empty() {
        return Err(Error::EmptySymbols);
    }
    if beta.pulse_len() != params.pulse_len {
        return Err(Error::ParamsMismatch);
    }
    let alpha = bits.symbols();
    let cum = bits.cumulative();
    let streams = (0..beta.component_count())
        .map(|k| {
            let row = beta.row(k);
            let values = cum
                .iter()
                .enumerate()
                .map(|(n, &total)| {
                    let excluded: i64 = row
                        .iter()
                        .enumerate()
                        .filter(|&(i, &b)| b == 1 && i <= n)
                        .map(|(i, _)| i64::from(alpha[n - i]))
                        .sum();
                    Complex64::from_polar(1.0, accumulated_phase(params.h, total - excluded))
                })
                .collect();
            PseudoSymbolStream {
                component: k,
                values,
                params: *params,
            }
        })
        .collect();
    Ok(streams)
}

/// Which Laurent components to superimpose.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ComponentSelector {
    All,
    Only(Vec<usize>),
}

impl ComponentSelector {
    pub fn main() -> Self {
        ComponentSelector::Only(vec![0])
    }

    fn resolve(&self, count: usize) -> Result<Vec<usize>> {
        let mut picked = match self {
            ComponentSelector::All => (0..count).collect(),
            ComponentSelector::Only(ks) => ks.clone(),
        };
        picked.sort_unstable();
        picked.dedup();
        if picked.is_empty() {
            return Err(Error::BadSelector("empty".into()));
        }
        if let Some(&k) = picked.iter().find(|&&k| k >= count) {
            return Err(Error::BadSelector(format!("component {k} of {count}")));
        }
        Ok(picked)
    }
}

/// Filter-bank modulator: zero-stuffed pseudo-symbols through each selected
/// `c_k`, summed in ascending component order.
pub fn linear_modulate(
    streams: &[PseudoSymbolStream],
    bank: &LaurentBank,
    components: &ComponentSelector,
) -> Result<BasebandSignal> {
    let picked = components.resolve(bank.component_count())?;
    let params = &bank.params;
    let first = streams.first().ok_or(Error::EmptySymbols)?;
    let symbol_count = first.len();
    let out_len = symbol_count * params.osf;
    let mut out = vec![Complex64::new(0.0, 0.0); out_len];
    for k in picked {
        let stream = streams
            .iter()
            .find(|s| s.component == k)
            .ok_or_else(|| Error::BadSelector(format!("no pseudo-symbols for component {k}")))?;
        stream.params.ensure_same(params)?;
        if stream.len() != symbol_count {
            return Err(Error::LengthMismatch {
                what: "pseudo-symbol streams",
                expected: symbol_count,
                got: stream.len(),
            });
        }
        let part = upsample_filter(&stream.values, bank.filter(k), params.osf, out_len);
        for (acc, y) in out.iter_mut().zip(part) {
            *acc += y;
        }
    }
    Ok(BasebandSignal::new(out, params.sample_period()))
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::bits::generate_bits;
    use crate::cpm::cpm_modulate;
    use crate::pulse::phase_response;

    fn setup(h: f64, l: usize, osf: usize) -> (ModulationParams, LaurentBank) {
        let p = ModulationParams::new(h, l, osf).unwrap();
        let pulse = phase_response(&p).unwrap();
        let bank = build_laurent_bank(&p, &pulse).unwrap();
        (p, bank)
    }

    #[test]
    fn pseudo_symbols_hand_example() {
        let p = ModulationParams::default();
        let bits = SymbolStream::from_symbols(vec![1, -1, 1]).unwrap();
        let b = pseudo_symbols(&bits, &build_beta(2), &p).unwrap();
        let expect = [0.7 * PI, 0.0, 0.7 * PI];
        for (v, &phi) in b[0].values.iter().zip(&expect) {
            assert!((v - Complex64::from_polar(1.0, phi)).norm() < 1e-15);
        }
        // b_1 drops alpha_{n-1}: sums 1, 0 - 1, 1 - (-1).
        let expect1 = [0.7 * PI, -0.7 * PI, 1.4 * PI];
        for (v, &phi) in b[1].values.iter().zip(&expect1) {
            assert!((v - Complex64::from_polar(1.0, phi)).norm() < 1e-14);
        }
    }

    #[test]
    fn pseudo_symbols_unit_modulus_and_recursion() {
        let (p, bank) = setup(0.7, 3, 4);
        let bits = generate_bits(2000, 5).unwrap();
        let b = pseudo_symbols(&bits, &bank.beta, &p).unwrap();
        assert_eq!(b.len(), 4);
        for s in &b {
            assert!(s.values.iter().all(|v| (v.norm() - 1.0).abs() < 1e-12));
        }
        let step = |a: i8| Complex64::from_polar(1.0, PI * 0.7 * f64::from(a));
        for n in 1..bits.len() {
            let predicted = b[0].values[n - 1] * step(bits.symbols()[n]);
            assert!((b[0].values[n] - predicted).norm() < 1e-12);
        }
    }

    #[test]
    fn selector_validation() {
        let (p, bank) = setup(0.7, 2, 8);
        let bits = generate_bits(10, 1).unwrap();
        let b = pseudo_symbols(&bits, &bank.beta, &p).unwrap();
        assert!(linear_modulate(&b, &bank, &ComponentSelector::Only(vec![])).is_err());
        assert!(linear_modulate(&b, &bank, &ComponentSelector::Only(vec![2])).is_err());
        assert!(linear_modulate(&b[..1], &bank, &ComponentSelector::All).is_err());
        assert!(linear_modulate(&b, &bank, &ComponentSelector::main()).is_ok());
    }

    #[test]
    fn mismatched_params_rejected() {
        let (_, bank) = setup(0.7, 2, 8);
        let other = ModulationParams::new(0.6, 2, 8).unwrap();
        let bits = generate_bits(10, 1).unwrap();
        let b = pseudo_symbols(&bits, &bank.beta, &other).unwrap();
        assert!(matches!(
            linear_modulate(&b, &bank, &ComponentSelector::All),
            Err(Error::ParamsMismatch)
        ));
    }

    #[test]
    fn full_bank_reproduces_cpm_after_transient() {
        for (h, l) in [(0.7, 1), (0.5, 1), (0.7, 2), (0.5, 2), (0.7, 3), (0.5, 3), (0.3, 4)] {
            let (p, bank) = setup(h, l, 8);
            let bits = generate_bits(500, 17).unwrap();
            let reference = cpm_modulate(&bits, &p).unwrap();
            let b = pseudo_symbols(&bits, &bank.beta, &p).unwrap();
            let linear = linear_modulate(&b, &bank, &ComponentSelector::All).unwrap();
            assert_eq!(linear.len(), reference.len());
            let guard = 2 * (l + 1) * p.osf;
            let worst = reference.samples[guard..reference.len() - guard]
                .iter()
                .zip(&linear.samples[guard..linear.len() - guard])
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            assert!(worst < 1e-10, "h={h} L={l}: {worst:e}");
        }
    }

    #[test]
    fn single_symbol_overlap() {
        // One symbol: after the pulse has fully elapsed the phase is exact.
        let (p, bank) = setup(0.7, 2, 8);
        let bits = SymbolStream::from_symbols(vec![1, 1, -1, 1, 1, 1]).unwrap();
        let reference = cpm_modulate(&bits, &p).unwrap();
        let b = pseudo_symbols(&bits, &bank.beta, &p).unwrap();
        let linear = linear_modulate(&b, &bank, &ComponentSelector::All).unwrap();
        for n in p.pulse_samples()..reference.len() {
            assert!((reference.samples[n] - linear.samples[n]).norm() < 1e-12, "n={n}");
        }
    }
}
