//! End-to-end acceptance checks. Runs as a plain binary so that each
//! criterion prints one result line whether it passes or not.

use std::time::Instant;

use rand::Rng;
use softdec::config::{Experiment, ExperimentConfig, OutputFormat, PeakConfig, ReadoutKind};
use softdec::experiments::{peak_parameters, peak_tabulation, run_estimation, run_repetition};
use softdec::output::render;
use softdec::{Parallel, RunConfig};
use softdec_core::estimation::{
    asymptotic_mse, fisher_information, fisher_information_score, mse_monte_carlo, ExpectationValue, Method,
    MixtureDistribution,
};
use softdec_core::numerics::{normal_cdf, QuadratureSpec};
use softdec_core::readout::{integrate_over, simulate_peak_trace, PeakTabulation};
use softdec_core::repcode::{
    decide, estimate_error_rate_mc, gaussian_majority_error, gaussian_soft_error, log_lr_thresholded,
    min_qubits_to_reach, DecodingMode, EncodingChannel, LogLikelihoodRatio, LogicalBit,
};
use softdec_core::rng::{stream, Domain};
use softdec_core::{ConditionalErrorRates, GaussianReadout, QubitState, Readout};

const SEED: u64 = 1;

const GAUSSIAN_MAJORITY: [f64; 9] = [7.86e-2, 7.86e-2, 1.76e-2, 1.76e-2, 4.31e-3, 4.31e-3, 1.10e-3, 1.10e-3, 2.89e-4];
const GAUSSIAN_SOFT: [f64; 9] = [7.86e-2, 2.28e-2, 7.15e-3, 2.34e-3, 7.83e-4, 2.66e-4, 9.14e-5, 3.17e-5, 1.10e-5];
const PEAK_MAJORITY: [f64; 9] = [0.253, 0.208, 0.172, 0.124, 0.121, 0.0845, 0.0715, 0.0630, 0.0465];
const PEAK_SOFT: [f64; 9] = [0.253, 0.166, 0.116, 0.0832, 0.0608, 0.0450, 0.0334, 0.0247, 0.0187];

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn run_config(experiment: Experiment, config: ExperimentConfig) -> RunConfig {
    ExperimentConfig {
        seed: Some(SEED),
        ..config
    }
    .resolve(experiment)
    .unwrap()
}

fn significant(x: f64, digits: i32) -> f64 {
    let scale = 10f64.powf(x.abs().log10().floor() - f64::from(digits - 1));
    (x / scale).round() * scale
}

fn same_figures(x: f64, reference: f64, digits: i32) -> bool {
    (significant(x, digits) - significant(reference, digits)).abs() <= 1e-9 * reference.abs()
}

fn ks_distance(mut samples: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max((f - (i + 1) as f64 / n).abs())
        })
        .fold(0.0, f64::max)
}

fn gaussian_table() -> Outcome {
    let mut bad = Vec::new();
    for n in 1..=9 {
        let c = gaussian_majority_error(2.0, n).map_err(|e| e.to_string())?;
        let o = gaussian_soft_error(2.0, n).map_err(|e| e.to_string())?;
        if !same_figures(c, GAUSSIAN_MAJORITY[n - 1], 3) {
            bad.push(format!("eps_c({n})={c:.4e}"));
        }
        if !same_figures(o, GAUSSIAN_SOFT[n - 1], 3) {
            bad.push(format!("eps_O({n})={o:.4e}"));
        }
    }
    let detail = format!(
        "18 entries at 3 significant figures; eps_c(9)={:.3e}, eps_O(6)={:.3e}",
        gaussian_majority_error(2.0, 9).unwrap(),
        gaussian_soft_error(2.0, 6).unwrap()
    );
    check(bad.is_empty(), if bad.is_empty() { detail } else { format!("mismatches: {}", bad.join(", ")) })
}

fn mc_agreement(exec: &Parallel) -> Outcome {
    let run = run_config(
        Experiment::Repetition,
        ExperimentConfig {
            snr: vec![2.0],
            n_min: 1,
            n_max: 9,
            trials: 1_000_000,
            ..ExperimentConfig::default()
        },
    );
    let rows = run_repetition(&run, exec).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    let mut bad = Vec::new();
    for row in &rows {
        let analytic = row.analytic_rate.ok_or("missing analytic column")?;
        let z = (row.rate - analytic).abs() / row.std_err.max(f64::MIN_POSITIVE);
        worst = worst.max(z);
        if (row.rate - analytic).abs() > 3.0 * row.std_err {
            bad.push(format!("{} n={}: {:.3e} vs {:.3e}", row.mode, row.n, row.rate, analytic));
        }
    }
    check(
        bad.is_empty() && rows.len() == 18,
        format!("{} cells, largest deviation {worst:.2} std_err {}", rows.len(), bad.join("; ")),
    )
}

fn qubit_advantage() -> Outcome {
    let soft = min_qubits_to_reach(|n| gaussian_soft_error(2.0, n), 3e-4, 64).map_err(|e| e.to_string())?;
    let hard = min_qubits_to_reach(|n| gaussian_majority_error(2.0, n), 3e-4, 64).map_err(|e| e.to_string())?;
    check((soft, hard) == (6, 9), format!("N_O={soft}, N_c={hard}"))
}

fn encoding_errors(exec: &Parallel, peak: &PeakTabulation) -> Outcome {
    let g = GaussianReadout::new(2.0).unwrap();
    let ch = EncodingChannel::new(0.01).unwrap();
    let mut parts = Vec::new();
    let mut ok = true;
    let cells = [
        ("gaussian", DecodingMode::Analog, 6, 0.01, 10_000_000, 8e-4),
        ("gaussian", DecodingMode::Thresholded, 9, 0.01, 10_000_000, 8e-4),
        ("peak", DecodingMode::Analog, 6, 0.05, 1_000_000, 0.08),
        ("peak", DecodingMode::Thresholded, 9, 0.05, 1_000_000, 0.08),
    ];
    for (name, mode, n, eta, trials, bound) in cells {
        let est = if name == "gaussian" {
            estimate_error_rate_mc(&g, mode, n, ch, trials, SEED, exec)
        } else {
            estimate_error_rate_mc(&peak.readout, mode, n, EncodingChannel::new(eta).unwrap(), trials, SEED, exec)
        }
        .map_err(|e| e.to_string())?;
        let upper = est.rate + 3.0 * est.std_err;
        ok &= upper < bound;
        parts.push(format!("{name} {mode:?} n={n} eta={eta}: {:.3e}+3sd={upper:.3e} < {bound:e}", est.rate));
    }
    check(ok, parts.join("; "))
}

fn peak_calibration(exec: &Parallel, peak: &PeakTabulation) -> Outcome {
    let threshold = peak.readout.optimal_threshold().map_err(|e| e.to_string())?;
    let avg = peak.readout.conditional_error_rates(threshold).average();
    let mut ok = (avg - 0.253).abs() <= 0.02;
    let mut worst: f64 = 0.0;
    let mut problems = Vec::new();
    for n in 1..=9 {
        let rate = |mode| estimate_error_rate_mc(&peak.readout, mode, n, EncodingChannel::NOISELESS, 1_000_000, SEED, exec);
        let soft = rate(DecodingMode::Analog).map_err(|e| e.to_string())?;
        let hard = rate(DecodingMode::Thresholded).map_err(|e| e.to_string())?;
        for (got, want, label) in [(hard.rate, PEAK_MAJORITY[n - 1], "eps_c"), (soft.rate, PEAK_SOFT[n - 1], "eps_O")] {
            let rel = (got / want - 1.0).abs();
            worst = worst.max(rel);
            if rel > 0.15 {
                ok = false;
                problems.push(format!("{label}({n})={got:.4} vs {want}"));
            }
        }
        if soft.rate > hard.rate + 3.0 * soft.std_err.hypot(hard.std_err) {
            ok = false;
            problems.push(format!("dominance fails at n={n}"));
        }
    }
    let p = &peak.params;
    check(
        ok,
        format!(
            "tau_M={:.3} tau_b={:.3} N_b={} threshold={threshold:.3} average error {avg:.4}; table rows within {:.1}% {}",
            p.meas_time(),
            p.bin_time(),
            p.n_bins(),
            100.0 * worst,
            problems.join("; ")
        ),
    )
}

fn estimation_closed_forms() -> Outcome {
    let g = GaussianReadout::new(2.0).unwrap();
    let s0 = ExpectationValue::new(0.0).unwrap();
    let spec = QuadratureSpec::default();
    let ta = asymptotic_mse(&g, s0, Method::ThresholdedAverage, &spec).map_err(|e| e.to_string())?;
    let sa = asymptotic_mse(&g, s0, Method::SoftAverage, &spec).map_err(|e| e.to_string())?;
    let eps = g.single_shot_error();
    let ta_formula = (1.0 - 2.0 * eps).powi(-2);
    let sa_formula = 1.0 + 1.0 / 2.0;
    let ok = same_figures(ta, ta_formula, 4)
        && same_figures(sa, sa_formula, 4)
        && same_figures(ta, 1.408, 4)
        && same_figures(sa, 1.5, 4);
    check(ok, format!("TA={ta:.6} (formula {ta_formula:.6}), SA={sa:.6} (formula {sa_formula:.6})"))
}

fn mse_protocol(exec: &Parallel, peak: &PeakTabulation) -> Outcome {
    let run = run_config(
        Experiment::Estimation,
        ExperimentConfig {
            snr: vec![2.0],
            s0: vec![0.0],
            records: 50_000,
            n_per_record: 100,
            ..ExperimentConfig::default()
        },
    );
    let rows = run_estimation(&run, exec).map_err(|e| e.to_string())?;
    let mut results = Vec::new();
    for row in &rows {
        results.push(("gaussian", row.method, row.normalized_mse, row.asymptotic_normalized_mse.unwrap()));
    }
    let s0 = ExpectationValue::new(0.0).unwrap();
    let spec = QuadratureSpec::default();
    for method in Method::ALL {
        let rep = mse_monte_carlo(&peak.readout, s0, method, 100, 50_000, SEED, exec).map_err(|e| e.to_string())?;
        let asym = asymptotic_mse(&peak.readout, s0, method, &spec).map_err(|e| e.to_string())?;
        results.push(("peak", method.abbreviation(), rep.normalized_mse, asym));
    }
    let mut ok = true;
    let mut parts = Vec::new();
    for (readout, method, mc, asym) in &results {
        let rel = mc / asym - 1.0;
        ok &= rel.abs() <= 0.05;
        parts.push(format!("{readout} {method} {mc:.4}/{asym:.4} ({:+.1}%)", 100.0 * rel));
    }
    // The relative standard error of an MSE estimated from K records is
    // about sqrt(2/K).
    let slack = 1.0 + 3.0 * (2.0f64 / 50_000.0).sqrt();
    let get = |readout: &str, m: &str| results.iter().find(|r| r.0 == readout && r.1 == m).unwrap().2;
    let g_order = get("gaussian", "SD") <= get("gaussian", "TA") * slack && get("gaussian", "TA") <= get("gaussian", "SA") * slack;
    let p_order = get("peak", "SD") <= get("peak", "TA") * slack && get("peak", "TA") <= get("peak", "SA") * slack;
    ok &= g_order && p_order;
    parts.push(format!("ordering SD<=TA<=SA: gaussian {g_order}, peak {p_order}"));
    check(ok, parts.join("; "))
}

fn property_suite(peak: &PeakTabulation) -> Outcome {
    let spec = QuadratureSpec::default();
    let g = GaussianReadout::new(2.0).unwrap();
    let mut parts = Vec::new();
    let mut ok = true;

    let mut fisher_worst: f64 = 0.0;
    for s in [-0.5, 0.0, 0.5] {
        let s0 = ExpectationValue::new(s).unwrap();
        for (a, b) in [
            (fisher_information(&g, s0, &spec), fisher_information_score(&g, s0, &spec)),
            (fisher_information(&peak.readout, s0, &spec), fisher_information_score(&peak.readout, s0, &spec)),
        ] {
            let (a, b) = (a.map_err(|e| e.to_string())?, b.map_err(|e| e.to_string())?);
            fisher_worst = fisher_worst.max((a - b).abs() / a);
        }
    }
    ok &= fisher_worst <= 1e-6;
    parts.push(format!("Fisher forms {fisher_worst:.1e}"));

    let mut norm_worst: f64 = 0.0;
    for state in [QubitState::Plus, QubitState::Minus] {
        for mass in [
            integrate_over(&g, |o| g.pdf(o, state), &spec),
            integrate_over(&peak.readout, |o| peak.readout.pdf(o, state), &spec),
        ] {
            norm_worst = norm_worst.max((mass.map_err(|e| e.to_string())? - 1.0).abs());
        }
    }
    for s in [-0.9, 0.0, 0.9] {
        let s0 = ExpectationValue::new(s).unwrap();
        for mass in [MixtureDistribution::new(&g, s0).mass(&spec), MixtureDistribution::new(&peak.readout, s0).mass(&spec)] {
            norm_worst = norm_worst.max((mass.map_err(|e| e.to_string())? - 1.0).abs());
        }
    }
    ok &= norm_worst <= 1e-6;
    parts.push(format!("normalization {norm_worst:.1e}"));

    let n = 1_000_000;
    let draw = |k: u64, f: &dyn Fn(&mut softdec_core::rng::StreamRng) -> f64| {
        let mut rng = stream(SEED, Domain::Sampling, k);
        (0..n).map(|_| f(&mut rng)).collect::<Vec<f64>>()
    };
    let sigma = g.sigma();
    let params = peak.params;
    let (bin_sigma, nb) = (params.bin_sigma(), params.n_bins() as i32);
    let ks = [
        ks_distance(draw(1, &|r| g.sample(QubitState::Plus, r)), |x| normal_cdf((x - 1.0) / sigma)),
        ks_distance(draw(2, &|r| peak.readout.sample(QubitState::Plus, r)), |x| peak.readout.cdf(x, QubitState::Plus)),
        ks_distance(draw(3, &|r| peak.readout.sample(QubitState::Minus, r)), |x| {
            normal_cdf((x + 1.0) / bin_sigma).powi(nb)
        }),
        ks_distance(draw(4, &|r| simulate_peak_trace(&params, QubitState::Plus, r)), |x| {
            peak.readout.cdf(x, QubitState::Plus)
        }),
    ];
    let ks_worst = ks.iter().copied().fold(0.0, f64::max);
    ok &= ks_worst <= 0.002;
    parts.push(format!(
        "KS at 1e6: gaussian {:.4}, table {:.4}, ground vs closed form {:.4}, pulse simulation vs table {:.4}",
        ks[0], ks[1], ks[2], ks[3]
    ));

    let mut rng = stream(SEED, Domain::Sampling, 10);
    let mut disagreements = 0;
    for _ in 0..10_000 {
        let eps = rng.random_range(0.001..0.499);
        let total = rng.random_range(1..=25usize);
        let n_plus = rng.random_range(0..=total);
        let rates = ConditionalErrorRates::symmetric(eps, 0.0).unwrap();
        let llr = log_lr_thresholded(&rates, n_plus, total, EncodingChannel::NOISELESS).unwrap();
        let vote = 2 * n_plus as i64 - total as i64;
        if vote != 0 {
            let want = if vote > 0 { LogicalBit::One } else { LogicalBit::Zero };
            disagreements += (decide(llr, &mut rng) != want) as u32;
        } else {
            disagreements += (llr.value() != 0.0) as u32;
        }
    }
    ok &= disagreements == 0;
    parts.push(format!("majority vote disagreements {disagreements}/10000"));

    let ties = 1_000_000;
    let ones = (0..ties).filter(|_| decide(LogLikelihoodRatio(0.0), &mut rng) == LogicalBit::One).count();
    let freq = ones as f64 / ties as f64;
    let tie_ok = (freq - 0.5).abs() <= 3.0 * 0.5 / (ties as f64).sqrt();
    ok &= tie_ok;
    parts.push(format!("tie coin {freq:.5}"));

    let identical = determinism()?;
    ok &= identical;
    parts.push(format!("byte-identical across 1/2/4 workers {identical}"));
    check(ok, parts.join("; "))
}

fn determinism() -> Result<bool, String> {
    let repetition = run_config(
        Experiment::Repetition,
        ExperimentConfig {
            snr: vec![1.0, 3.0],
            eta: 0.03,
            n_max: 5,
            trials: 50_000,
            ..ExperimentConfig::default()
        },
    );
    let estimation = run_config(
        Experiment::Estimation,
        ExperimentConfig {
            readout: ReadoutKind::PeakSignal,
            snr: vec![4.0],
            s0: vec![-0.4, 0.7],
            records: 500,
            n_per_record: 50,
            format: OutputFormat::Json,
            peak: PeakConfig {
                search_samples: 500,
                tabulation_samples: 5_000,
                grid_size: 256,
                ..PeakConfig::default()
            },
            ..ExperimentConfig::default()
        },
    );
    let mut outputs = Vec::new();
    for workers in [1, 2, 4] {
        let exec = Parallel::new(workers).map_err(|e| e.to_string())?;
        let a = render(&run_repetition(&repetition, &exec).map_err(|e| e.to_string())?, OutputFormat::Csv)?;
        let b = render(&run_estimation(&estimation, &exec).map_err(|e| e.to_string())?, OutputFormat::Json)?;
        outputs.push((a, b));
    }
    Ok(outputs.windows(2).all(|w| w[0] == w[1]))
}

fn main() {
    let exec = Parallel::new(0).expect("thread pool");
    let start = Instant::now();
    let calibration = run_config(
        Experiment::Calibrate,
        ExperimentConfig {
            readout: ReadoutKind::PeakSignal,
            snr: vec![2.0],
            table: Some("unused.json".into()),
            ..ExperimentConfig::default()
        },
    );
    let peak = peak_parameters(&calibration, 2.0, &exec)
        .and_then(|params| peak_tabulation(&calibration, &params, &exec))
        .expect("peak-signal calibration");
    println!("calibrated peak-signal readout in {:.1?}", start.elapsed());

    let criteria: Vec<Criterion> = vec![
        ("Gaussian analytic table", Box::new(gaussian_table)),
        ("MC/analytic agreement", Box::new(|| mc_agreement(&exec))),
        ("qubit-count advantage", Box::new(qubit_advantage)),
        ("encoding-error claims", Box::new(|| encoding_errors(&exec, &peak))),
        ("peak-signal calibration band", Box::new(|| peak_calibration(&exec, &peak))),
        ("estimation closed forms", Box::new(estimation_closed_forms)),
        ("estimator MSE protocol", Box::new(|| mse_protocol(&exec, &peak))),
        ("property suite", Box::new(|| property_suite(&peak))),
    ];
    let mut failed = 0;
    for (i, (name, criterion)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let (status, detail) = match criterion() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {} [{status}] {name} ({:.1?}): {detail}", i + 1, t.elapsed());
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
