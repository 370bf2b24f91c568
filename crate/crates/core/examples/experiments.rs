// Full experiment runs from a TOML config, as the `pcmfm` binary does them:
// both MSE tables and the tap export, each in its own run directory.
//
// Run with `cargo run --release --example experiments [OUT_DIR]`.

use pcmfm::experiment::{read_output, run, Experiment, ExperimentConfig};
use pcmfm::experiment::taps::parse_taps;

const CONFIG: &str = r#"
seed = 42
eval_bits = 10000
training_bits = 120000

[modulation]
h = 0.7
L = 2
osf = 8

[fixed_point]
signal_bits = 12
internal_bits = 16
"#;

pub fn run_in(out: &std::path::Path) -> pcmfm::Result<()> {
    let mut config = ExperimentConfig::from_toml(CONFIG)?;
    config.output_dir = out.to_path_buf();
    for experiment in [Experiment::Table1, Experiment::Table2, Experiment::Taps] {
        config.experiment = experiment;
        let manifest = run(&config)?;
        println!("== {} -> {}", experiment, manifest.run_dir.display());
        for file in &manifest.files {
            if file.starts_with("table") && file.ends_with(".txt") {
                print!("{}", read_output(&manifest, file)?);
            }
        }
        if experiment == Experiment::Taps {
            for name in ["c0.txt", "c1.txt", "cw.txt"] {
                let taps = parse_taps(&read_output(&manifest, name)?)?;
                println!("{name}: {} taps ({})", taps.taps.len(), taps.header.filter);
            }
        }
    }
    Ok(())
}

pub fn run_example() -> pcmfm::Result<()> {
    let dir = tempfile::tempdir()?;
    run_in(dir.path())
}

fn main() {
    let result = match std::env::args().nth(1) {
        Some(out) => run_in(std::path::Path::new(&out)),
        None => run_example(),
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
