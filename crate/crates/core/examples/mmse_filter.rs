// MMSE single-filter transmitter: train `c_w` on one bit sequence and
// compare it with `c_0` on another.
//
// Run with `cargo run --release --example mmse_filter`.

use pcmfm::bits::generate_bits;
use pcmfm::cpm::cpm_modulate_with;
use pcmfm::laurent::{build_laurent_bank, linear_modulate, pseudo_symbols, ComponentSelector};
use pcmfm::metrics::{mse_db, MseOptions};
use pcmfm::params::ModulationParams;
use pcmfm::pulse::phase_response;
use pcmfm::wiener::{default_tap_count, design_mmse_filter, orthogonality_residual, MmseDesign};

pub fn run_example() -> pcmfm::Result<()> {
    let params = ModulationParams::default();
    let taps = default_tap_count(&params);
    let filter = design_mmse_filter(&params, 43, taps, 120_000)?;
    println!(
        "c_w: {} taps from {} samples, training MSE {} dB, max |Im| / peak = {:.1e}",
        filter.len(),
        filter.source.sample_count,
        filter.achieved_mse_db,
        filter.imaginary_ratio()
    );
    for (i, c) in filter.taps.iter().enumerate().step_by(4) {
        println!("  c_w[{i:>2}] = {:+.6}", c.re);
    }

    let design = MmseDesign::new(params, 43, taps, 120_000);
    let (train, train_b0) = design.training_data()?;
    let residual = orthogonality_residual(&train, &train_b0, &filter.taps, filter.estimate.region.clone());
    let worst = residual.iter().map(|r| r.norm()).fold(0.0, f64::max);
    let r_max = filter.estimate.cross.iter().map(|r| r.norm()).fold(0.0, f64::max);
    println!("orthogonality residual {worst:.2e} (|r|max {r_max:.3})");

    let pulse = phase_response(&params)?;
    let bank = build_laurent_bank(&params, &pulse)?;
    let bits = generate_bits(10_000, 42)?;
    let reference = cpm_modulate_with(&bits, &pulse)?;
    let streams = pseudo_symbols(&bits, &bank.beta, &params)?;
    let c0 = linear_modulate(&streams, &bank, &ComponentSelector::main())?;
    let cw = filter.modulate(&streams[0]);
    let opts = MseOptions::for_params(&params);
    let a = mse_db(&reference, &c0, &opts)?;
    let b = mse_db(&reference, &cw, &opts)?;
    println!("held-out sequence: c0 {} dB, c_w {} dB", a.mse_oversampled, b.mse_oversampled);
    println!("gain {:.2} dB", a.mse_oversampled.db() - b.mse_oversampled.db());
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
