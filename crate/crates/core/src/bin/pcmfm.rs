use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use pcmfm::experiment::{run, Experiment, ExperimentConfig, TapRange};

#[derive(Parser)]
#[command(name = "pcmfm", version, about = "PCM/FM Laurent approximation experiments")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand)]
enum Verb {
    /// Floating-point MSE table: full bank, c0 only, MMSE filter.
    Table1(Overrides),
    /// Fixed-point MSE table.
    Table2(Overrides),
    /// Phase traces of the reference and both approximations.
    Phase(Overrides),
    /// Export the Laurent and MMSE taps, floating and fixed point.
    Taps(Overrides),
    /// MMSE error as a function of tap count.
    Sweep(Overrides),
}

#[derive(Args)]
struct Overrides {
    /// TOML run configuration; defaults apply to anything it leaves out.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Evaluation sequence length in bits.
    #[arg(long)]
    bits: Option<usize>,
    /// MMSE tap count, or START:END[:STEP] for sweep.
    #[arg(long)]
    taps: Option<TapRange>,
    #[arg(long)]
    signal_bits: Option<u32>,
    #[arg(long)]
    internal_bits: Option<u32>,
    /// Output root; each run writes to its own subdirectory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Sample offset within each symbol for the symbol-rate column.
    #[arg(long)]
    sample_phase: Option<usize>,
}

impl Overrides {
    fn apply(self, experiment: Experiment) -> pcmfm::Result<ExperimentConfig> {
        let mut c = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        c.experiment = experiment;
        if let Some(v) = self.seed {
            c.seed = v;
        }
        if let Some(v) = self.bits {
            c.eval_bits = v;
        }
        if let Some(r) = self.taps {
            if experiment == Experiment::Sweep {
                c.sweep = Some(r);
            } else if r.start == r.end {
                c.taps = Some(r.start);
            } else {
                return Err(pcmfm::Error::Config(format!(
                    "--taps takes a single count for {experiment}"
                )));
            }
        }
        if let Some(v) = self.signal_bits {
            c.fixed_point.signal_bits = v;
        }
        if let Some(v) = self.internal_bits {
            c.fixed_point.internal_bits = v;
        }
        if let Some(v) = self.out {
            c.output_dir = v;
        }
        if let Some(v) = self.sample_phase {
            c.sample_phase = v;
        }
        c.validate()?;
        Ok(c)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (experiment, overrides) = match cli.verb {
        Verb::Table1(o) => (Experiment::Table1, o),
        Verb::Table2(o) => (Experiment::Table2, o),
        Verb::Phase(o) => (Experiment::Phase, o),
        Verb::Taps(o) => (Experiment::Taps, o),
        Verb::Sweep(o) => (Experiment::Sweep, o),
    };
    let result = overrides.apply(experiment).and_then(|c| run(&c));
    match result {
        Ok(manifest) => {
            for w in &manifest.warnings {
                eprintln!("warning: {w}");
            }
            for f in &manifest.files {
                if f.ends_with(".txt") && (f.starts_with("table") || f.starts_with("sweep")) {
                    if let Ok(text) = pcmfm::experiment::read_output(&manifest, f) {
                        print!("{text}");
                    }
                }
            }
            println!("{}", manifest.run_dir.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("pcmfm {experiment}: {e}");
            ExitCode::FAILURE
        }
    }
}
