// Reference PCM/FM waveform: random bits through the nonlinear CPM modulator.
//
// Run with `cargo run --example cpm_reference`.

use pcmfm::bits::generate_bits;
use pcmfm::cpm::cpm_modulate;
use pcmfm::metrics::unwrap_phase;
use pcmfm::params::ModulationParams;
use pcmfm::pulse::phase_response;

pub fn run_example() -> pcmfm::Result<()> {
    let params = ModulationParams::default();
    let pulse = phase_response(&params)?;
    println!(
        "h = {}, L = {}, osf = {}, q(LT) = {:.15}",
        params.h,
        params.pulse_len,
        params.osf,
        pulse.q(params.pulse_duration())
    );

    let bits = generate_bits(10_000, 42)?;
    let signal = cpm_modulate(&bits, &params)?;
    println!(
        "{} bits -> {} samples at Tc = {} s, max ||s| - 1| = {:.2e}",
        bits.len(),
        signal.len(),
        signal.sample_period,
        signal.max_envelope_deviation()
    );

    // The unwrapped phase at the end of each symbol tracks pi h times the
    // running bit sum, delayed by the pulse memory.
    let phase = unwrap_phase(&signal.samples);
    let cum = bits.cumulative();
    for n in [100usize, 1000, 9000] {
        let settled = std::f64::consts::PI * params.h * cum[n - params.pulse_len] as f64;
        let end = (n + 1) * params.osf - 1;
        println!(
            "symbol {n:>5}: phase {:+10.4} rad, settled part {:+10.4} rad",
            phase[end], settled
        );
    }
    assert!(signal.max_envelope_deviation() < 1e-12);
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
