//! Experiment runner: regenerates the MSE tables, exports taps, writes phase
//! traces and sweeps the MMSE tap count.
//!
//! Every `run_*` function writes into [`ExperimentConfig::run_dir`] and
//! returns a [`RunManifest`]. Outputs other than `timings.json` are a pure
//! function of the config.

mod config;
mod pipeline;
pub mod taps;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

pub use config::{Experiment, ExperimentConfig, TapRange, Window};
pub use pipeline::{FixedOutputs, Pipeline};

use crate::error::Result;
use crate::metrics::{mse_db, phase_trace, MseDb, MseReport};
use crate::signal::BasebandSignal;
use crate::wiener::training_mse;
use taps::{format_fixed_taps, format_taps, TapHeader};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRow {
    pub filter: String,
    pub taps: usize,
    pub oversampled_db: MseDb,
    /// `None` for tables that report the oversampled column only.
    pub symbol_rate_db: Option<MseDb>,
    pub decimated_db: Option<MseDb>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrainingInfo {
    pub mode: &'static str,
    pub seed: u64,
    pub bits: usize,
    pub sample_count: usize,
    pub taps: usize,
    pub training_mse_db: MseDb,
    /// Largest `|Im c_w|` relative to the peak tap magnitude.
    pub imaginary_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MseTable {
    pub rows: Vec<TableRow>,
    /// `c_0`-only minus `c_w`, oversampled column.
    pub gain_db: f64,
    pub sample_phase: usize,
    pub guard: usize,
    pub training: TrainingInfo,
    /// Symbol-rate MSE of each row at every sampling phase `0..osf`.
    pub phase_sweep: Vec<Vec<MseDb>>,
    pub saturations: Option<usize>,
}

impl MseTable {
    pub fn row(&self, filter: &str) -> &TableRow {
        self.rows.iter().find(|r| r.filter == filter).expect("row exists")
    }
}

fn training_info(p: &Pipeline) -> TrainingInfo {
    let c = &p.config;
    TrainingInfo {
        mode: p.training_mode(),
        seed: c.training_seed(),
        bits: if c.same_sequence { c.eval_bits } else { c.training_bits },
        sample_count: p.mmse.source.sample_count,
        taps: p.mmse.len(),
        training_mse_db: p.mmse.achieved_mse_db,
        imaginary_ratio: p.mmse.imaginary_ratio(),
    }
}

fn labels(p: &Pipeline) -> [String; 3] {
    let q = p.bank.component_count();
    let full = (0..q).map(|k| format!("c{k}")).collect::<Vec<_>>().join("+");
    [full, "c0".into(), "cw".into()]
}

fn score(p: &Pipeline, candidates: [&BasebandSignal; 3], symbol_rate: bool) -> Result<(Vec<TableRow>, Vec<Vec<MseDb>>)> {
    let opts = p.mse_options();
    let names = labels(p);
    let tap_counts = [p.bank.span(), p.bank.filter(0).len(), p.mmse.len()];
    let mut rows = Vec::new();
    let mut sweep = Vec::new();
    for ((name, cand), taps) in names.iter().zip(candidates).zip(tap_counts) {
        let r: MseReport = mse_db(&p.reference, cand, &opts)?.labeled("reference", name);
        rows.push(TableRow {
            filter: name.clone(),
            taps,
            oversampled_db: r.mse_oversampled,
            symbol_rate_db: symbol_rate.then_some(r.mse_symbol_rate),
            decimated_db: symbol_rate.then_some(r.mse_decimated),
        });
        if symbol_rate {
            sweep.push(
                (0..p.config.modulation.osf)
                    .map(|ph| mse_db(&p.reference, cand, &opts.with_sample_phase(ph)).map(|r| r.mse_symbol_rate))
                    .collect::<Result<Vec<_>>>()?,
            );
        }
    }
    Ok((rows, sweep))
}

/// Floating-point MSE table: full bank, `c_0` only, `c_w`.
pub fn table1(p: &Pipeline) -> Result<MseTable> {
    let (rows, phase_sweep) = score(p, [&p.full, &p.main_only, &p.mmse_signal], true)?;
    Ok(MseTable {
        gain_db: rows[1].oversampled_db.db() - rows[2].oversampled_db.db(),
        rows,
        sample_phase: p.config.sample_phase,
        guard: p.config.guard(),
        training: training_info(p),
        phase_sweep,
        saturations: None,
    })
}

/// Fixed-point MSE table against the floating-point reference.
pub fn table2(p: &Pipeline) -> Result<(MseTable, FixedOutputs)> {
    let fixed = p.fixed_point(&p.config.fixed_point)?;
    let (rows, _) = score(p, [&fixed.full_signal, &fixed.main_signal, &fixed.mmse_signal], false)?;
    let table = MseTable {
        gain_db: rows[1].oversampled_db.db() - rows[2].oversampled_db.db(),
        rows,
        sample_phase: p.config.sample_phase,
        guard: p.config.guard(),
        training: training_info(p),
        phase_sweep: Vec::new(),
        saturations: Some(fixed.full.saturations + fixed.main_only.saturations + fixed.mmse.saturations),
    };
    Ok((table, fixed))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseSummary {
    pub window_start: usize,
    pub window_len: usize,
    /// Mean `|phase error|` against the floating-point reference, radians.
    pub float_c0_rad: f64,
    pub float_cw_rad: f64,
    pub fixed_c0_rad: f64,
    pub fixed_cw_rad: f64,
    /// RMS difference between the floating and fixed `c_w` traces, radians.
    pub cw_float_fixed_rms_rad: f64,
    pub c0_float_fixed_rms_rad: f64,
}

/// Phase traces over `window`: floating-point columns (reference, `c_0`,
/// `c_w`) and fixed-point columns (full bank, `c_0`, `c_w`).
pub fn phase(p: &Pipeline, fixed: &FixedOutputs, window: Window) -> Result<(PhaseSummary, String, String)> {
    let range = window.range();
    let float = phase_trace(&[&p.reference, &p.main_only, &p.mmse_signal], range.clone())?;
    let fixed_trace = phase_trace(
        &[&fixed.full_signal, &fixed.main_signal, &fixed.mmse_signal, &p.reference],
        range.clone(),
    )?;
    let both = phase_trace(
        &[&p.main_only, &fixed.main_signal, &p.mmse_signal, &fixed.mmse_signal],
        range,
    )?;
    let summary = PhaseSummary {
        window_start: window.start,
        window_len: window.len,
        float_c0_rad: float.mean_abs_error(0, 1),
        float_cw_rad: float.mean_abs_error(0, 2),
        fixed_c0_rad: fixed_trace.mean_abs_error(3, 1),
        fixed_cw_rad: fixed_trace.mean_abs_error(3, 2),
        c0_float_fixed_rms_rad: both.rms_difference(0, 1),
        cw_float_fixed_rms_rad: both.rms_difference(2, 3),
    };
    let float_csv = float.to_csv(&["reference", "c0", "cw"]);
    let fixed_only = crate::metrics::PhaseTrace {
        phases: fixed_trace.phases[..3].to_vec(),
        ..fixed_trace
    };
    let fixed_csv = fixed_only.to_csv(&["full_bank_fixed", "c0_fixed", "cw_fixed"]);
    Ok((summary, float_csv, fixed_csv))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub taps: usize,
    pub training_mse_db: MseDb,
    pub oversampled_db: MseDb,
    pub symbol_rate_db: MseDb,
    /// `c_0`-only oversampled MSE minus this row's.
    pub gain_db: f64,
}

/// MMSE filters for each tap count in the range, designed in parallel on the
/// same training data.
pub fn sweep(config: &ExperimentConfig) -> Result<Vec<SweepRow>> {
    let base = Pipeline::build(config)?;
    let opts = base.mse_options();
    let c0 = mse_db(&base.reference, &base.main_only, &opts)?;
    let params = config.modulation;
    let design = |taps: usize| crate::wiener::MmseDesign {
        guard: config.guard(),
        ..crate::wiener::MmseDesign::new(params, config.training_seed(), taps, config.training_bits)
    };
    let (train_signal, train_b0) = if config.same_sequence {
        (base.reference.clone(), base.streams[0].clone())
    } else {
        design(1).training_data()?
    };
    config
        .sweep_range()
        .values()
        .into_par_iter()
        .map(|taps| {
            let w = design(taps).run_on(&train_signal, &train_b0)?;
            let y = w.modulate(&base.streams[0]);
            let r = mse_db(&base.reference, &y, &opts)?;
            let training = training_mse(&train_signal, &train_b0, &w.taps, w.estimate.region.clone());
            Ok(SweepRow {
                taps,
                training_mse_db: MseDb::from_power(training),
                oversampled_db: r.mse_oversampled,
                symbol_rate_db: r.mse_symbol_rate,
                gain_db: c0.mse_oversampled.db() - r.mse_oversampled.db(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TapExport {
    pub files: Vec<String>,
    pub tap_counts: Vec<(String, usize)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ExperimentResult {
    Table1(MseTable),
    Table2(MseTable),
    Phase(PhaseSummary),
    Taps(TapExport),
    Sweep { rows: Vec<SweepRow> },
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub experiment: Experiment,
    pub config_hash: String,
    pub config: ExperimentConfig,
    pub run_dir: PathBuf,
    pub results: Vec<ExperimentResult>,
    pub files: Vec<String>,
    pub warnings: Vec<String>,
    /// Wall-clock seconds per stage; written to `timings.json`, not to the
    /// manifest file.
    #[serde(skip)]
    pub timings: Vec<(String, f64)>,
}

struct Run {
    manifest: RunManifest,
    started: Instant,
}

impl Run {
    fn start(config: &ExperimentConfig, experiment: Experiment) -> Result<Self> {
        let mut config = config.clone();
        config.experiment = experiment;
        config.validate()?;
        let run_dir = config.run_dir();
        std::fs::create_dir_all(&run_dir)?;
        Ok(Self {
            manifest: RunManifest {
                tool: "pcmfm",
                version: VERSION,
                experiment,
                config_hash: config.content_hash(),
                run_dir,
                config,
                results: Vec::new(),
                files: Vec::new(),
                warnings: Vec::new(),
                timings: Vec::new(),
            },
            started: Instant::now(),
        })
    }

    fn config(&self) -> &ExperimentConfig {
        &self.manifest.config
    }

    fn lap(&mut self, stage: &str) {
        self.manifest
            .timings
            .push((stage.to_string(), self.started.elapsed().as_secs_f64()));
    }

    fn write(&mut self, name: &str, contents: &[u8]) -> Result<()> {
        std::fs::write(self.manifest.run_dir.join(name), contents)?;
        self.manifest.files.push(name.to_string());
        Ok(())
    }

    fn finish(mut self) -> Result<RunManifest> {
        self.lap("total");
        let dir = self.manifest.run_dir.clone();
        let mut files = self.manifest.files.clone();
        files.push("manifest.json".into());
        self.manifest.files = files;
        let json = serde_json::to_string_pretty(&self.manifest).expect("manifest serializes");
        std::fs::write(dir.join("manifest.json"), json + "\n")?;
        let timings: serde_json::Map<String, serde_json::Value> = self
            .manifest
            .timings
            .iter()
            .map(|(k, v)| (k.clone(), serde_json::json!(v)))
            .collect();
        std::fs::write(
            dir.join("timings.json"),
            serde_json::to_string_pretty(&timings).expect("timings serialize") + "\n",
        )?;
        Ok(self.manifest)
    }
}

fn title(config: &ExperimentConfig, what: &str) -> String {
    let m = &config.modulation;
    format!(
        "# {what}: MSE vs. reference CPM (h={}, L={}, osf={}, pulse={}, {} bits, seed {})\n",
        m.h,
        m.pulse_len,
        m.osf,
        m.pulse.name(),
        config.eval_bits,
        config.seed
    )
}

fn training_note(t: &TrainingInfo) -> String {
    format!(
        "# cw: {} taps, trained {} (seed {}, {} bits, {} averaged samples), training MSE {} dB\n",
        t.taps, t.mode, t.seed, t.bits, t.sample_count, t.training_mse_db
    )
}

fn cell(v: Option<MseDb>) -> String {
    v.map_or_else(|| "-".to_string(), |m| m.to_string())
}

fn csv_cell(v: Option<MseDb>) -> String {
    match v {
        Some(MseDb::Value(x)) => format!("{x:.4}"),
        Some(MseDb::Floor) => "floor".into(),
        None => String::new(),
    }
}

pub fn format_table_text(config: &ExperimentConfig, table: &MseTable, what: &str, symbol_rate: bool) -> String {
    let mut out = title(config, what);
    out.push_str(&training_note(&table.training));
    let _ = writeln!(
        out,
        "# guard {} samples per edge; symbol-rate samples at offset {} Tc",
        table.guard, table.sample_phase
    );
    if symbol_rate {
        let _ = writeln!(out, "{:<8} {:>5} {:>16} {:>16} {:>16}", "filter", "taps", "oversampled_dB", "symbol_rate_dB", "decimated_dB");
    } else {
        let _ = writeln!(out, "{:<8} {:>5} {:>16}", "filter", "taps", "oversampled_dB");
    }
    for r in &table.rows {
        if symbol_rate {
            let _ = writeln!(
                out,
                "{:<8} {:>5} {:>16} {:>16} {:>16}",
                r.filter,
                r.taps,
                r.oversampled_db.to_string(),
                cell(r.symbol_rate_db),
                cell(r.decimated_db)
            );
        } else {
            let _ = writeln!(out, "{:<8} {:>5} {:>16}", r.filter, r.taps, r.oversampled_db.to_string());
        }
    }
    let _ = writeln!(out, "gain cw over c0 (oversampled, dB): {:.2}", table.gain_db);
    if let Some(s) = table.saturations {
        let _ = writeln!(out, "saturated values: {s}");
    }
    if !table.phase_sweep.is_empty() {
        let _ = writeln!(out, "\n# symbol-rate MSE (dB) by sampling offset in Tc");
        let _ = write!(out, "{:<8}", "filter");
        for ph in 0..table.phase_sweep[0].len() {
            let _ = write!(out, " {:>10}", ph);
        }
        out.push('\n');
        for (r, sweep) in table.rows.iter().zip(&table.phase_sweep) {
            let _ = write!(out, "{:<8}", r.filter);
            for v in sweep {
                let _ = write!(out, " {:>10}", v.to_string());
            }
            out.push('\n');
        }
    }
    out
}

pub fn format_table_csv(table: &MseTable) -> String {
    let mut out = String::from("filter,taps,oversampled_db,symbol_rate_db,decimated_db\n");
    for r in &table.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.filter,
            r.taps,
            csv_cell(Some(r.oversampled_db)),
            csv_cell(r.symbol_rate_db),
            csv_cell(r.decimated_db)
        );
    }
    out
}

pub fn run_table1(config: &ExperimentConfig) -> Result<RunManifest> {
    let mut run = Run::start(config, Experiment::Table1)?;
    let p = Pipeline::build(run.config())?;
    run.lap("pipeline");
    let t = table1(&p)?;
    run.lap("score");
    let text = format_table_text(run.config(), &t, "Table 1 (floating point)", true);
    run.write("table1.txt", text.as_bytes())?;
    run.write("table1.csv", format_table_csv(&t).as_bytes())?;
    run.manifest.warnings.extend(p.warnings.iter().cloned());
    run.manifest.results.push(ExperimentResult::Table1(t));
    run.finish()
}

pub fn run_table2(config: &ExperimentConfig) -> Result<RunManifest> {
    let mut run = Run::start(config, Experiment::Table2)?;
    let p = Pipeline::build(run.config())?;
    run.lap("pipeline");
    let (t, _) = table2(&p)?;
    run.lap("fixed-point");
    let fp = run.config().fixed_point;
    let what = format!(
        "Table 2 (fixed point, {}-bit signals, {}-bit internal)",
        fp.signal_bits, fp.internal_bits
    );
    let text = format_table_text(run.config(), &t, &what, false);
    run.write("table2.txt", text.as_bytes())?;
    run.write("table2.csv", format_table_csv(&t).as_bytes())?;
    if let Some(s) = t.saturations.filter(|&s| s > 0) {
        run.manifest
            .warnings
            .push(format!("{s} values saturated in the fixed-point datapath"));
    }
    run.manifest.warnings.extend(p.warnings.iter().cloned());
    run.manifest.results.push(ExperimentResult::Table2(t));
    run.finish()
}

pub fn run_phase(config: &ExperimentConfig) -> Result<RunManifest> {
    let mut run = Run::start(config, Experiment::Phase)?;
    let p = Pipeline::build(run.config())?;
    let fixed = p.fixed_point(&run.config().fixed_point)?;
    run.lap("pipeline");
    let (summary, float_csv, fixed_csv) = phase(&p, &fixed, run.config().window)?;
    run.write("phase_float.csv", float_csv.as_bytes())?;
    run.write("phase_fixed.csv", fixed_csv.as_bytes())?;
    run.manifest.warnings.extend(p.warnings.iter().cloned());
    run.manifest.results.push(ExperimentResult::Phase(summary));
    run.finish()
}

pub fn run_taps(config: &ExperimentConfig) -> Result<RunManifest> {
    let mut run = Run::start(config, Experiment::Taps)?;
    let p = Pipeline::build(run.config())?;
    let fixed = p.fixed_point(&run.config().fixed_point)?;
    run.lap("pipeline");
    let params = run.config().modulation;
    let seed = run.config().seed;
    let header = |filter: &str| TapHeader {
        filter: filter.to_string(),
        params,
        seed,
    };
    let mut tap_counts = Vec::new();
    for (k, taps) in p.bank_taps().iter().enumerate() {
        let name = format!("c{k}");
        run.write(&format!("{name}.txt"), format_taps(&header(&name), taps).as_bytes())?;
        run.write(
            &format!("{name}.fixed.txt"),
            format_fixed_taps(&header(&name), &fixed.bank_taps[k]).as_bytes(),
        )?;
        tap_counts.push((name, taps.len()));
    }
    run.write("cw.txt", format_taps(&header("cw"), &p.mmse.taps).as_bytes())?;
    run.write("cw.fixed.txt", format_fixed_taps(&header("cw"), &fixed.mmse_taps).as_bytes())?;
    tap_counts.push(("cw".into(), p.mmse.len()));
    let files = run.manifest.files.clone();
    run.manifest.warnings.extend(p.warnings.iter().cloned());
    run.manifest
        .results
        .push(ExperimentResult::Taps(TapExport { files, tap_counts }));
    run.finish()
}

pub fn run_sweep(config: &ExperimentConfig) -> Result<RunManifest> {
    let mut run = Run::start(config, Experiment::Sweep)?;
    let rows = sweep(run.config())?;
    run.lap("sweep");
    let mut csv = String::from("taps,training_mse_db,oversampled_db,symbol_rate_db,gain_db\n");
    let mut text = title(run.config(), "MMSE tap-count sweep");
    let _ = writeln!(text, "{:>5} {:>16} {:>16} {:>16} {:>10}", "taps", "training_dB", "oversampled_dB", "symbol_rate_dB", "gain_dB");
    for r in &rows {
        let _ = writeln!(
            csv,
            "{},{},{},{},{:.4}",
            r.taps,
            csv_cell(Some(r.training_mse_db)),
            csv_cell(Some(r.oversampled_db)),
            csv_cell(Some(r.symbol_rate_db)),
            r.gain_db
        );
        let _ = writeln!(
            text,
            "{:>5} {:>16} {:>16} {:>16} {:>10.2}",
            r.taps,
            r.training_mse_db.to_string(),
            r.oversampled_db.to_string(),
            r.symbol_rate_db.to_string(),
            r.gain_db
        );
    }
    run.write("sweep.csv", csv.as_bytes())?;
    run.write("sweep.txt", text.as_bytes())?;
    run.manifest.results.push(ExperimentResult::Sweep { rows });
    run.finish()
}

/// Dispatches on `config.experiment`.
pub fn run(config: &ExperimentConfig) -> Result<RunManifest> {
    match config.experiment {
        Experiment::Table1 => run_table1(config),
        Experiment::Table2 => run_table2(config),
        Experiment::Phase => run_phase(config),
        Experiment::Taps => run_taps(config),
        Experiment::Sweep => run_sweep(config),
    }
}

/// Reads a file written by a run, relative to its run directory.
pub fn read_output(manifest: &RunManifest, name: &str) -> Result<String> {
    Ok(std::fs::read_to_string(Path::new(&manifest.run_dir).join(name))?)
}
