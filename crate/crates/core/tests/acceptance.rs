//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::f64::consts::FRAC_2_PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use lowres_array::approximations::{
    first_order_denominator, first_order_sindr, saturation_limit, third_order_denominator,
    third_order_sindr, ApproxInputs,
};
use lowres_array::bussgang::{
    build_bussgang_model, exact_sindr, exact_sindr_from_mse, sindr_report, siso_unit_sindr,
    ChannelMatrix, MimoScenario,
};
use lowres_array::cli::average_exact_sindr;
use lowres_array::direct_detection::{
    achievable_rate_dd, db_to_linear, log_spaced_antennas, rate_vs_antennas_sweep,
    upper_bound_rate, DirectDetectionScenario, LoCapture,
};
use lowres_array::filter::{g2_self_convolution, ConvolutionMethod, FilterSpec};
use lowres_array::montecarlo::{run_trials, CheckStatus, McConfig};
use lowres_array::sampling::{child_rng, mix_seed};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

const SEED: u64 = 2018;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn closed_form_matches_quadrature() -> Verdict {
    let b = 1e9;
    let mut worst: f64 = 0.0;
    for sigma in [0.01, 0.05, 0.2] {
        let spec = FilterSpec::new(b, sigma).unwrap();
        for i in 1..=1000 {
            let f = b * (1e-3 + (1.0 - 1e-3) * i as f64 / 1000.0);
            let cf = g2_self_convolution(f, &spec, ConvolutionMethod::ClosedForm).unwrap();
            let q = g2_self_convolution(f, &spec, ConvolutionMethod::Quadrature).unwrap();
            let rel = if cf == q { 0.0 } else { (cf - q).abs() / q.abs().max(cf.abs()) };
            worst = worst.max(rel);
        }
    }
    verdict(worst < 1e-6, format!("max relative error {worst:.3e} (limit 1e-6)"))
}

fn theorem_convergence() -> Verdict {
    let base = DirectDetectionScenario::reference(100).unwrap();
    let ratios: Vec<f64> = [1e-2, 1e-3, 1e-4]
        .iter()
        .map(|&eps: &f64| {
            let sc = DirectDetectionScenario::new(
                100,
                base.signal_power_w,
                base.noise_density_w_per_hz,
                base.lo_power_w,
                LoCapture::Fixed(eps),
                FilterSpec::new(base.bandwidth_hz(), eps.powf(1.5)).unwrap(),
            )
            .unwrap();
            achievable_rate_dd(&sc).unwrap() / upper_bound_rate(&sc)
        })
        .collect();
    let increasing = ratios.windows(2).all(|w| w[1] > w[0]);
    verdict(
        increasing && ratios[2] > 0.99,
        format!("ratios {:.8} {:.8} {:.8}", ratios[0], ratios[1], ratios[2]),
    )
}

fn rate_curve_peak() -> Verdict {
    let template = DirectDetectionScenario::reference(16).unwrap();
    let grid = log_spaced_antennas(16, 65536, 49);
    let curve = rate_vs_antennas_sweep(&template, &grid).unwrap();
    let peak = curve.argmax().unwrap();
    let in_window = (1000..=4000).contains(&peak.num_antennas);
    verdict(
        curve.is_unimodal() && in_window && curve.respects_upper_bound(),
        format!(
            "argmax N = {} ({:.4e} bit/s), unimodal {}, bounded {}",
            peak.num_antennas,
            peak.rate_bps,
            curve.is_unimodal(),
            curve.respects_upper_bound()
        ),
    )
}

fn low_snr_law() -> Verdict {
    let (n, rho) = (256, 1e-3);
    let mut worst: f64 = 0.0;
    let mut mean_db = 0.0;
    let draws = 10;
    for d in 0..draws {
        let mut rng = child_rng(SEED, d);
        let h = ChannelMatrix::iid_rayleigh(n, 1, &mut rng).unwrap().with_unit_average_gain();
        let g = sindr_report(&MimoScenario::new(h, rho).unwrap()).unwrap().users[0].gamma_exact;
        let db = 10.0 * (g / (n as f64 * rho)).log10();
        worst = worst.max((db + 1.96).abs());
        mean_db += db / draws as f64;
    }
    verdict(
        worst < 0.1,
        format!(
            "10log10(gamma/(N rho)) = {mean_db:.4} dB, 2/pi = {:.4} dB, worst deviation from -1.96 dB {worst:.4}",
            10.0 * FRAC_2_PI.log10()
        ),
    )
}

fn large_array_behaviour() -> Verdict {
    let (k, rho) = (10, db_to_linear(-6.0));
    let ns = [64, 128, 256, 512, 1024];
    let mut firsts = Vec::new();
    let mut gaps = Vec::new();
    let mut worst_track: f64 = 0.0;
    let mut below = true;
    for &n in &ns {
        let inputs = ApproxInputs::new(n, k, rho).unwrap();
        let first = first_order_sindr(&inputs);
        let third = third_order_sindr(&inputs);
        let exact = average_exact_sindr(n, k, rho, 20, SEED).unwrap();
        below &= exact < first;
        firsts.push(first);
        gaps.push(first - exact);
        worst_track = worst_track.max((third - exact).abs() / exact);
    }
    let linear = firsts
        .iter()
        .zip(&ns)
        .all(|(g, &n)| (g / n as f64 - firsts[0] / ns[0] as f64).abs() < 1e-12 * firsts[0]);
    let growing = gaps.windows(2).all(|w| w[1] > w[0]);
    verdict(
        linear && below && growing && worst_track < 0.15,
        format!(
            "first-order linear {linear}, exact below {below}, gap growing {growing}, worst third-order tracking error {:.2}%",
            100.0 * worst_track
        ),
    )
}

fn multi_stream_gain() -> Verdict {
    let n = 1024;
    let single = average_exact_sindr(n, 1, db_to_linear(0.0), 20, SEED).unwrap();
    let dual = average_exact_sindr(n, 2, db_to_linear(-3.0), 20, SEED).unwrap();
    let (s1, s2) = (saturation_limit(1, 1.0), saturation_limit(2, 0.5));
    let saturation_ok = s1 == 16.0 && s2 == 32.0;
    verdict(
        dual > single && saturation_ok,
        format!(
            "exact per-stream gamma: K=2 {dual:.3} vs K=1 {single:.3}; saturation {s2} vs {s1}"
        ),
    )
}

fn monte_carlo_gates() -> Verdict {
    let trials = 1_000_000;
    let mut rng = child_rng(SEED, u64::MAX);
    let h = ChannelMatrix::iid_rayleigh(8, 2, &mut rng).unwrap();
    let rep = run_trials(&McConfig::new(MimoScenario::new(h, 1.0).unwrap(), trials, SEED).unwrap()).unwrap();
    let one = ChannelMatrix::new(DMatrix::from_element(1, 1, Complex64::new(1.0, 0.0))).unwrap();
    let scalar =
        run_trials(&McConfig::new(MimoScenario::new(one, 1.0).unwrap(), trials, mix_seed(SEED, 1)).unwrap()).unwrap();
    let group_ok = |prefix: &str| rep.checks_named(prefix).all(|c| c.status == CheckStatus::Pass);
    let c_r = group_ok("c_r");
    let x_e = group_ok("x_e");
    let gamma = group_ok("gamma");
    let g1 = scalar.gamma_hat[0];
    let s1 = scalar.gamma_hat_stderr[0];
    let scalar_ok = (g1 - siso_unit_sindr()).abs() <= 3.0 * s1;
    let failed: Vec<&str> = rep.failed().map(|c| c.name.as_str()).collect();
    verdict(
        c_r && x_e && gamma && scalar_ok,
        format!(
            "C_r {c_r}, E[x e^H] {x_e}, gamma {gamma}, scalar {g1:.5} +/- {s1:.5} vs {:.5}; failed checks {failed:?}",
            siso_unit_sindr()
        ),
    )
}

fn algebraic_identities() -> Verdict {
    let mut rng = child_rng(SEED, 8);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let n = rng.random_range(2..=32);
        let k = rng.random_range(1..=n.min(6));
        let rho = 10f64.powf(rng.random_range(-2.0..1.0));
        let h = ChannelMatrix::iid_rayleigh(n, k, &mut rng).unwrap();
        let model = build_bussgang_model(&MimoScenario::new(h, rho).unwrap()).unwrap();
        for u in 0..k {
            let a = exact_sindr(&model, rho, u).unwrap();
            let b = exact_sindr_from_mse(&model, rho, u).unwrap();
            worst = worst.max((a - b).abs() / a.abs());
        }
    }
    let mut factor_worst: f64 = 0.0;
    let mut ordered = true;
    for k in [1, 2, 4, 10, 32] {
        for rho_db in [-20.0, -10.0, -6.0, -3.0, 0.0, 5.0, 10.0] {
            let rho = db_to_linear(rho_db);
            let a = first_order_denominator(k as f64, rho);
            let b = third_order_denominator(k as f64, rho);
            factor_worst = factor_worst.max((a - b).abs() / a);
            for n in [16, 64, 256, 1024, 4096, 65536] {
                let inputs = ApproxInputs::new(n, k, rho).unwrap();
                ordered &= third_order_sindr(&inputs) < first_order_sindr(&inputs);
            }
        }
    }
    verdict(
        worst < 1e-8 && factor_worst < 1e-12 && ordered,
        format!(
            "SINDR forms {worst:.2e} (limit 1e-8), leading factors {factor_worst:.2e} (limit 1e-12), third < first {ordered}"
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, Duration, fn() -> Verdict); 8] = [
        ("1 closed-form convolution vs quadrature", Duration::from_secs(10), closed_form_matches_quadrature),
        ("2 rate ratio convergence", Duration::from_secs(60), theorem_convergence),
        ("3 rate-vs-N peak and bound", Duration::from_secs(300), rate_curve_peak),
        ("4 low-SNR 2/pi law", Duration::from_secs(10), low_snr_law),
        ("5 large-array approximations", Duration::from_secs(600), large_array_behaviour),
        ("6 multi-stream processing gain", Duration::from_secs(300), multi_stream_gain),
        ("7 Monte Carlo gates", Duration::from_secs(300), monte_carlo_gates),
        ("8 algebraic identities", Duration::from_secs(10), algebraic_identities),
    ];
    let mut failures = 0;
    for (name, budget, run) in criteria {
        let start = Instant::now();
        let v = run();
        let elapsed = start.elapsed();
        let pass = v.pass && elapsed <= budget;
        if !pass {
            failures += 1;
        }
        println!(
            "{} criterion {name}: {} [{:.2} s, budget {} s]",
            if pass { "PASS" } else { "FAIL" },
            v.detail,
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!("acceptance: {} of 8 criteria passed", 8 - failures);
    if failures == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
