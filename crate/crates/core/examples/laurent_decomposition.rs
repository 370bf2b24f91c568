// Laurent decomposition: the CPM signal as a sum of linearly modulated
// components, and the error of keeping only the main one.
//
// Run with `cargo run --example laurent_decomposition`.

use pcmfm::bits::generate_bits;
use pcmfm::cpm::cpm_modulate_with;
use pcmfm::laurent::{build_laurent_bank, linear_modulate, pseudo_symbols, ComponentSelector};
use pcmfm::metrics::{mse_db, MseOptions};
use pcmfm::params::ModulationParams;
use pcmfm::pulse::phase_response;

pub fn run_example() -> pcmfm::Result<()> {
    for (h, l) in [(0.7, 2), (0.5, 3)] {
        let params = ModulationParams::new(h, l, 8)?;
        let pulse = phase_response(&params)?;
        let bank = build_laurent_bank(&params, &pulse)?;
        println!("h = {h}, L = {l}: {} components", bank.component_count());
        let total: f64 = (0..bank.component_count()).map(|k| bank.energy(k)).sum();
        for k in 0..bank.component_count() {
            println!(
                "  c{k}: {:>2} taps, beta row {:?}, energy share {:.4}",
                bank.filter(k).len(),
                bank.beta.row(k),
                bank.energy(k) / total
            );
        }

        let bits = generate_bits(10_000, 42)?;
        let reference = cpm_modulate_with(&bits, &pulse)?;
        let streams = pseudo_symbols(&bits, &bank.beta, &params)?;
        let opts = MseOptions::for_params(&params);
        let full = linear_modulate(&streams, &bank, &ComponentSelector::All)?;
        let main = linear_modulate(&streams, &bank, &ComponentSelector::main())?;
        let full_mse = mse_db(&reference, &full, &opts)?;
        let main_mse = mse_db(&reference, &main, &opts)?;
        println!("  all components: {} dB", full_mse.mse_oversampled);
        println!(
            "  c0 only:        {} dB oversampled, {} dB at the symbol instants",
            main_mse.mse_oversampled, main_mse.mse_symbol_rate
        );
        assert!(full_mse.mse_oversampled.db() < -250.0);
    }
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
