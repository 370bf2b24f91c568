// Phase of the reference, `c_0` and `c_w` signals over a short window,
// printed as CSV.
//
// Run with `cargo run --release --example phase_trace > phase.csv`.

use pcmfm::experiment::{phase, ExperimentConfig, Pipeline};

pub fn run_example() -> pcmfm::Result<()> {
    let config = ExperimentConfig {
        window: "4000:200".parse()?,
        ..ExperimentConfig::default()
    };
    let pipeline = Pipeline::build(&config)?;
    let fixed = pipeline.fixed_point(&config.fixed_point)?;
    let (summary, float_csv, _fixed_csv) = phase(&pipeline, &fixed, config.window)?;
    eprintln!(
        "mean |phase error| over the window: c0 {:.4} rad, c_w {:.4} rad (fixed point: {:.4}, {:.4})",
        summary.float_c0_rad, summary.float_cw_rad, summary.fixed_c0_rad, summary.fixed_cw_rad
    );
    for line in float_csv.lines().take(12) {
        println!("{line}");
    }
    println!("...");
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
