// Bit-true datapath: 12-bit pseudo-symbols, 16-bit taps, integer FIR with
// round-half-even and saturation, and a binary I/Q dump.
//
// Run with `cargo run --example fixed_point`.

use pcmfm::bits::generate_bits;
use pcmfm::cpm::cpm_modulate_with;
use pcmfm::fir::zero_stuff;
use pcmfm::laurent::{build_laurent_bank, pseudo_symbols};
use pcmfm::metrics::{mse_db, MseOptions};
use pcmfm::params::ModulationParams;
use pcmfm::pulse::phase_response;
use pcmfm::quantize::{
    dequantize, fir_fixed_sum, quantize_signal, quantize_tap_bank, FixedPointConfig, QuantizedSignal,
};
use pcmfm::signal::BasebandSignal;
use pcmfm::Complex64;

pub fn run_example() -> pcmfm::Result<()> {
    let params = ModulationParams::default();
    let pulse = phase_response(&params)?;
    let bank = build_laurent_bank(&params, &pulse)?;
    let bits = generate_bits(10_000, 42)?;
    let reference = cpm_modulate_with(&bits, &pulse)?;
    let streams = pseudo_symbols(&bits, &bank.beta, &params)?;
    let opts = MseOptions::for_params(&params);

    let taps: Vec<Vec<Complex64>> = bank
        .filters
        .iter()
        .map(|f| f.iter().map(|&c| Complex64::new(c, 0.0)).collect())
        .collect();
    let tap_refs: Vec<&[Complex64]> = taps.iter().map(Vec::as_slice).collect();

    for signal_bits in [10, 12, 14, 16] {
        let config = FixedPointConfig::new(signal_bits, 16)?;
        let inputs = streams
            .iter()
            .map(|s| {
                let stuffed = BasebandSignal::new(zero_stuff(&s.values, params.osf), params.sample_period());
                quantize_signal(&stuffed, &config)
            })
            .collect::<pcmfm::Result<Vec<_>>>()?;
        let bank_q = quantize_tap_bank(&tap_refs, &config)?;
        let branches: Vec<_> = inputs.iter().zip(&bank_q).collect();
        let out = fir_fixed_sum(&branches, &config)?;
        let again = fir_fixed_sum(&branches, &config)?;
        assert_eq!(out, again);
        let mse = mse_db(&reference, &dequantize(&out), &opts)?;
        println!(
            "{signal_bits:>2}-bit signals: full bank {} dB, tap frac_bits {}, {} saturations",
            mse.mse_oversampled, bank_q[0].frac_bits, out.saturations
        );

        if signal_bits == 12 {
            let mut raw = Vec::new();
            out.write_iq_le16(&mut raw)?;
            let back = QuantizedSignal::read_iq_le16(&raw, &config, params.sample_period())?;
            assert_eq!(back.i_codes, out.i_codes);
            println!("   I/Q dump: {} bytes, first codes {:?}", raw.len(), &out.i_codes[40..44]);
        }
    }
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
