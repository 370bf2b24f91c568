use num_complex::Complex64;

use crate::bits::generate_bits;
use crate::cpm::cpm_modulate_with;
use crate::error::Result;
use crate::fir::zero_stuff;
use crate::laurent::{
    build_laurent_bank, linear_modulate, pseudo_symbols, ComponentSelector, LaurentBank, PseudoSymbolStream,
};
use crate::metrics::MseOptions;
use crate::pulse::{phase_response, PhasePulse};
use crate::quantize::{
    dequantize, fir_fixed, fir_fixed_sum, quantize_signal, quantize_tap_bank, quantize_taps, FixedPointConfig,
    QuantizedSignal, QuantizedTaps,
};
use crate::signal::BasebandSignal;
use crate::wiener::{MmseDesign, WienerFilter};

use super::config::ExperimentConfig;

/// Evaluation sequence, reference, and the three transmit variants.
#[derive(Debug, Clone)]
pub struct Pipeline {
    pub config: ExperimentConfig,
    pub pulse: PhasePulse,
    pub bank: LaurentBank,
    pub streams: Vec<PseudoSymbolStream>,
    pub reference: BasebandSignal,
    pub full: BasebandSignal,
    pub main_only: BasebandSignal,
    pub mmse: WienerFilter,
    pub mmse_signal: BasebandSignal,
    pub warnings: Vec<String>,
}

impl Pipeline {
    pub fn build(config: &ExperimentConfig) -> Result<Self> {
        Self::build_with_taps(config, config.tap_count())
    }

    pub fn build_with_taps(config: &ExperimentConfig, taps: usize) -> Result<Self> {
        config.validate()?;
        let params = config.modulation;
        let pulse = phase_response(&params)?;
        let bank = build_laurent_bank(&params, &pulse)?;
        let bits = generate_bits(config.eval_bits, config.seed)?;
        let reference = cpm_modulate_with(&bits, &pulse)?;
        let streams = pseudo_symbols(&bits, &bank.beta, &params)?;
        let full = linear_modulate(&streams, &bank, &ComponentSelector::All)?;
        let main_only = linear_modulate(&streams, &bank, &ComponentSelector::main())?;

        let mut warnings = Vec::new();
        let mmse = if config.same_sequence {
            let design = MmseDesign {
                guard: config.guard(),
                ..MmseDesign::new(params, config.seed, taps, config.eval_bits)
            }
            .with_min_samples(config.min_training_samples);
            design.run_on(&reference, &streams[0])?
        } else {
            let design = MmseDesign {
                guard: config.guard(),
                ..MmseDesign::new(params, config.training_seed(), taps, config.training_bits)
            }
            .with_min_samples(0);
            let (signal, b0) = design.training_data()?;
            design.run_on(&signal, &b0)?
        };
        if mmse.source.sample_count < config.min_training_samples {
            warnings.push(format!(
                "c_w statistics averaged over {} samples, below the configured minimum {}",
                mmse.source.sample_count, config.min_training_samples
            ));
        }
        let mmse_signal = mmse.modulate(&streams[0]);

        Ok(Self {
            config: config.clone(),
            pulse,
            bank,
            streams,
            reference,
            full,
            main_only,
            mmse,
            mmse_signal,
            warnings,
        })
    }

    pub fn mse_options(&self) -> MseOptions {
        MseOptions::for_params(&self.config.modulation)
            .with_guard(self.config.guard())
            .with_sample_phase(self.config.sample_phase)
    }

    pub fn training_mode(&self) -> &'static str {
        if self.config.same_sequence {
            "same-sequence"
        } else {
            "held-out"
        }
    }

    pub fn bank_taps(&self) -> Vec<Vec<Complex64>> {
        self.bank
            .filters
            .iter()
            .map(|f| f.iter().map(|&c| Complex64::new(c, 0.0)).collect())
            .collect()
    }

    /// Runs the three variants through the bit-true datapath.
    pub fn fixed_point(&self, config: &FixedPointConfig) -> Result<FixedOutputs> {
        let inputs = self
            .streams
            .iter()
            .map(|s| {
                quantize_signal(
                    &BasebandSignal::new(zero_stuff(&s.values, s.params.osf), s.params.sample_period()),
                    config,
                )
            })
            .collect::<Result<Vec<_>>>()?;

        let bank_taps = self.bank_taps();
        let refs: Vec<&[Complex64]> = bank_taps.iter().map(Vec::as_slice).collect();
        let bank_q = quantize_tap_bank(&refs, config)?;
        let branches: Vec<(&QuantizedSignal, &QuantizedTaps)> = inputs.iter().zip(&bank_q).collect();
        let full = fir_fixed_sum(&branches, config)?;

        let main_taps = quantize_taps(&bank_taps[0], config)?;
        let main_only = fir_fixed(&inputs[0], &main_taps, config)?;

        let mmse_taps = quantize_taps(&self.mmse.taps, config)?;
        let mmse = fir_fixed(&inputs[0], &mmse_taps, config)?;

        Ok(FixedOutputs {
            full_signal: dequantize(&full),
            main_signal: dequantize(&main_only),
            mmse_signal: dequantize(&mmse),
            full,
            main_only,
            mmse,
            bank_taps: bank_q,
            main_taps,
            mmse_taps,
        })
    }
}

/// Integer outputs of the fixed-point datapath and their real-valued views.
#[derive(Debug, Clone)]
pub struct FixedOutputs {
    pub full: QuantizedSignal,
    pub main_only: QuantizedSignal,
    pub mmse: QuantizedSignal,
    pub full_signal: BasebandSignal,
    pub main_signal: BasebandSignal,
    pub mmse_signal: BasebandSignal,
    pub bank_taps: Vec<QuantizedTaps>,
    pub main_taps: QuantizedTaps,
    pub mmse_taps: QuantizedTaps,
}
