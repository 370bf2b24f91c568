// Acceptance criteria for the default PCM/FM setup. Prints one PASS/FAIL
// line per check and exits nonzero if any check fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use pcmfm::bits::generate_bits;
use pcmfm::cpm::cpm_modulate_with;
use pcmfm::experiment::{table1, table2, ExperimentConfig, Pipeline};
use pcmfm::laurent::{build_laurent_bank, linear_modulate, pseudo_symbols, ComponentSelector, LaurentKernel};
use pcmfm::metrics::{mse_db, MseOptions};
use pcmfm::params::ModulationParams;
use pcmfm::pulse::phase_response;
use pcmfm::quantize::QuantizedSignal;
use pcmfm::signal::BasebandSignal;
use pcmfm::wiener::{orthogonality_residual, training_mse, MmseDesign};
use pcmfm::Complex64;
use sha2::{Digest, Sha256};

const WINDOW: usize = 200;

struct Report {
    failures: usize,
}

impl Report {
    fn check(&mut self, id: &str, ok: bool, detail: String) {
        println!("{} [{id}] {detail}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            self.failures += 1;
        }
    }
}

fn within(x: f64, target: f64, tol: f64) -> bool {
    (x - target).abs() <= tol
}

/// Worst ratio, over every `WINDOW`-sample window of `range`, of the c_w
/// mean absolute phase error to the c_0 one. Below 1 means c_w wins everywhere.
fn worst_window_ratio(
    reference: &BasebandSignal,
    c0: &BasebandSignal,
    cw: &BasebandSignal,
    range: std::ops::Range<usize>,
) -> (f64, usize) {
    let err = |s: &BasebandSignal| -> Vec<f64> {
        let mut acc = vec![0.0];
        for m in range.clone() {
            let e = (reference.samples[m] * s.samples[m].conj()).arg().abs();
            acc.push(acc.last().unwrap() + e);
        }
        acc
    };
    let (a, b) = (err(c0), err(cw));
    let mut worst = (0.0, 0);
    for start in 0..=range.len() - WINDOW {
        let r = (b[start + WINDOW] - b[start]) / (a[start + WINDOW] - a[start]);
        if r > worst.0 {
            worst = (r, range.start + start);
        }
    }
    worst
}

fn fixed_digest(outputs: &[&QuantizedSignal]) -> String {
    let mut h = Sha256::new();
    for q in outputs {
        for (i, qq) in q.i_codes.iter().zip(&q.q_codes) {
            h.update(i.to_le_bytes());
            h.update(qq.to_le_bytes());
        }
    }
    h.finalize().iter().take(8).map(|b| format!("{b:02x}")).collect()
}

fn exactness_db(h: f64, l: usize) -> f64 {
    let params = ModulationParams::new(h, l, 8).unwrap();
    let pulse = phase_response(&params).unwrap();
    let bank = build_laurent_bank(&params, &pulse).unwrap();
    let bits = generate_bits(10_000, 42).unwrap();
    let reference = cpm_modulate_with(&bits, &pulse).unwrap();
    let streams = pseudo_symbols(&bits, &bank.beta, &params).unwrap();
    let full = linear_modulate(&streams, &bank, &ComponentSelector::All).unwrap();
    mse_db(&reference, &full, &MseOptions::for_params(&params))
        .unwrap()
        .mse_oversampled
        .db()
}

fn main() -> ExitCode {
    let mut rep = Report { failures: 0 };
    let config = ExperimentConfig::default();
    let params = config.modulation;

    let started = Instant::now();
    let p = Pipeline::build(&config).unwrap();
    let t1 = table1(&p).unwrap();
    let (t2, fixed) = table2(&p).unwrap();
    let elapsed = started.elapsed().as_secs_f64();
    let n = p.mmse.len();
    println!(
        "setup: h={}, L={}, osf={}, {} eval bits (seed {}), c_w N={} trained on {} held-out bits (seed {}), symbol-rate offset {} Tc, {elapsed:.2} s",
        params.h, params.pulse_len, params.osf, config.eval_bits, config.seed, n,
        config.training_bits, config.training_seed(), config.sample_phase
    );

    // 1
    let full = t1.rows[0].oversampled_db.db();
    rep.check("1 exactness", full <= -250.0, format!("full bank oversampled {full:.2} dB <= -250 dB"));

    // 2
    let c0 = &t1.rows[1];
    let c0_over = c0.oversampled_db.db();
    let c0_sym = c0.symbol_rate_db.unwrap().db();
    rep.check("2 c0 oversampled", within(c0_over, -29.4, 2.0), format!("{c0_over:.2} dB, want -29.4 +/- 2.0"));
    rep.check("2 c0 symbol-rate", within(c0_sym, -57.2, 3.0), format!("{c0_sym:.2} dB, want -57.2 +/- 3.0"));

    // 3
    let cw_over = t1.rows[2].oversampled_db.db();
    rep.check("3 cw oversampled", within(cw_over, -33.0, 2.0), format!("N={n}: {cw_over:.2} dB, want -33.0 +/- 2.0"));
    rep.check("3 cw gain", t1.gain_db >= 3.0, format!("N={n}: gain {:.2} dB >= 3.0", t1.gain_db));

    // 4
    let f_full = t2.rows[0].oversampled_db.db();
    let f_c0 = t2.rows[1].oversampled_db.db();
    let f_cw = t2.rows[2].oversampled_db.db();
    let fp = config.fixed_point;
    println!(
        "fixed point {}/{} bits: full {f_full:.2}, c0 {f_c0:.2}, cw {f_cw:.2} dB, {} saturated values",
        fp.signal_bits, fp.internal_bits, t2.saturations.unwrap()
    );
    rep.check("4 fixed gain", t2.gain_db >= 3.0, format!("gain {:.2} dB >= 3.0", t2.gain_db));
    rep.check("4 fixed c0", within(f_c0, -29.7, 2.0), format!("{f_c0:.2} dB, want -29.7 +/- 2.0"));
    rep.check("4 fixed full bank", (-75.0..=-60.0).contains(&f_full), format!("{f_full:.2} dB in [-75, -60]"));

    // 5
    let env = p.reference.max_envelope_deviation();
    rep.check("5 unit envelope", env < 1e-12, format!("max ||s|-1| = {env:.2e} < 1e-12"));

    let q_lt = p.pulse.q(params.pulse_duration());
    rep.check("5 q(LT)", (q_lt - 0.5).abs() <= 2.0 * f64::EPSILON, format!("|q(LT) - 1/2| = {:.1e}", (q_lt - 0.5).abs()));

    let b_dev = p
        .streams
        .iter()
        .flat_map(|s| s.values.iter())
        .map(|b| (b.norm() - 1.0).abs())
        .fold(0.0, f64::max);
    rep.check("5 |b| = 1", b_dev < 1e-12, format!("max ||b|-1| = {b_dev:.2e} < 1e-12"));

    let bits = generate_bits(config.eval_bits, config.seed).unwrap();
    let b0 = &p.streams[0].values;
    let rec = (1..b0.len())
        .map(|k| (b0[k] - b0[k - 1] * Complex64::from_polar(1.0, PI * params.h * f64::from(bits.symbols()[k]))).norm())
        .fold(0.0, f64::max);
    rep.check("5 b0 recursion", rec < 1e-12, format!("max deviation {rec:.2e} < 1e-12"));

    let u = LaurentKernel::new(&p.pulse).unwrap();
    let ls = params.pulse_samples() as i64;
    let cont = (u.at(ls) - 1.0).abs();
    let sym = (0..=2 * ls).map(|k| (u.at(k) - u.at(2 * ls - k)).abs()).fold(0.0, f64::max);
    rep.check(
        "5 u(t)",
        cont < 1e-12 && sym < 1e-12,
        format!("|u(LT)-1| = {cont:.1e}, max |u(t)-u(2LT-t)| = {sym:.1e}"),
    );

    let design = MmseDesign {
        guard: config.guard(),
        ..MmseDesign::new(params, config.training_seed(), n, config.training_bits)
    };
    let (train, train_b0) = design.training_data().unwrap();
    let r = &p.mmse.estimate.autocorrelation;
    let osf = params.osf;
    let hermitian = (0..n).all(|i| (0..n).all(|j| r[i][j] == r[j][i].conj()));
    let blocks = (0..n).all(|i| (0..n).all(|j| i % osf == j % osf || r[i][j] == Complex64::new(0.0, 0.0)));
    rep.check("5 R structure", hermitian && blocks, format!("Hermitian {hermitian}, exact zero cross-blocks {blocks}"));

    let r_inf = p.mmse.estimate.cross.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let resid = orthogonality_residual(&train, &train_b0, &p.mmse.taps, p.mmse.estimate.region.clone())
        .iter()
        .map(|e| e.norm())
        .fold(0.0, f64::max);
    rep.check(
        "5 orthogonality",
        resid < 1e-3 * r_inf,
        format!("max residual {resid:.2e} < {:.2e}", 1e-3 * r_inf),
    );

    let c0_taps: Vec<Complex64> = p.bank.filter(0).iter().map(|&c| Complex64::new(c, 0.0)).collect();
    let wide = MmseDesign { taps: c0_taps.len(), ..design }.run_on(&train, &train_b0).unwrap();
    let region = wide.estimate.region.clone();
    let mse_w = training_mse(&train, &train_b0, &wide.taps, region.clone());
    let mse_c0 = training_mse(&train, &train_b0, &c0_taps, region);
    rep.check(
        "5 optimality",
        mse_w <= mse_c0 + 1e-9,
        format!("N={}: training MSE {mse_w:.4e} <= c0 {mse_c0:.4e} + 1e-9", c0_taps.len()),
    );

    for l in [1, 3] {
        for h in [0.5, 0.7] {
            let db = exactness_db(h, l);
            rep.check(
                "5 exactness L/h",
                db <= -250.0,
                format!("L={l} (Q={}), h={h}: {db:.2} dB <= -250 dB", 1 << (l - 1)),
            );
        }
    }

    let again = Pipeline::build(&config).unwrap().fixed_point(&config.fixed_point).unwrap();
    let d1 = fixed_digest(&[&fixed.full, &fixed.main_only, &fixed.mmse]);
    let d2 = fixed_digest(&[&again.full, &again.main_only, &again.mmse]);
    rep.check(
        "5 bit-true",
        d1 == d2 && fixed.full == again.full && fixed.mmse == again.mmse,
        format!("two runs identical, code digest {d1}; compare this digest on another platform"),
    );

    // 6
    let guard = config.guard();
    let len = p.reference.len();
    let steady = guard..len - guard;
    let (wf, at_f) = worst_window_ratio(&p.reference, &p.main_only, &p.mmse_signal, steady.clone());
    rep.check(
        "6 phase float",
        wf < 1.0,
        format!("every {WINDOW}-sample window: worst cw/c0 mean |phase error| ratio {wf:.3} at sample {at_f}"),
    );
    let (wq, at_q) = worst_window_ratio(&p.reference, &fixed.main_signal, &fixed.mmse_signal, steady);
    rep.check(
        "6 phase fixed",
        wq < 1.0,
        format!("every {WINDOW}-sample window: worst cw/c0 mean |phase error| ratio {wq:.3} at sample {at_q}"),
    );

    println!("{} failure(s)", rep.failures);
    if rep.failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
