//! Sweep commands behind the `lowres-array` binary.
//!
//! Configuration is a `key = value` file (with `#` comments) overridden by
//! `key=value` arguments. Values in dB/dBm are converted to SI before any
//! computation and the effective configuration is echoed as `#` lines at
//! the top of each CSV.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::approximations::{
    first_order_sindr, linear_dsp_threshold, saturation_limit, third_order_sindr, ApproxInputs,
    Target, RECOMMENDED_MARGIN,
};
use crate::bussgang::{sindr_report, ChannelMatrix, MimoScenario};
use crate::direct_detection::{
    db_to_linear, dbm_to_watts, log_spaced_antennas, sweep_points, DirectDetectionScenario,
    LoCapture,
};
use crate::error::Error;
use crate::filter::{rlc_ladder_response, FilterSpec, RlcParams};
use crate::montecarlo::{run_trials, McConfig, McReport};
use crate::sampling::{child_rng, mix_seed};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_GATE: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "lowres-array", version, about = "Rate sweeps for direct-detection arrays and one-bit massive MIMO")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Ideal asymmetric filter vs. RLC ladder, |G|^2 on [-0.6B, 0.6B].
    FilterResponse(CommonArgs),
    /// Direct-detection rate vs. antenna count with epsilon = N^-2.
    ///
    /// snr_db is 10 log10(rho / (B N0)); p_lo_dbm, n0_dbm_per_hz and
    /// noise_figure_db are converted to W and W/Hz (N0 includes the noise
    /// figure).
    DdSweep(CommonArgs),
    /// One-bit uplink SINDR vs. antenna count: exact (channel-averaged),
    /// first-order, third-order and saturation.
    ///
    /// snr_db is 10 log10(rho) with unit noise variance. Presets: fig5
    /// (K=10, -6 dB), single-stream (K=1, 0 dB), dual-stream (K=2, -3 dB).
    OnebitSweep(CommonArgs),
    /// Monte Carlo validation of the Bussgang analysis; exit status 4 if a
    /// statistical gate fails.
    McValidate(CommonArgs),
    /// Antenna-count threshold for near-optimal linear processing.
    Prop1(CommonArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Configuration file with `key = value` lines.
    #[arg(long, short)]
    pub config: Option<PathBuf>,
    /// CSV destination (overrides the `output` key).
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// `key=value` overrides applied after the file.
    pub overrides: Vec<String>,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::FilterResponse(_) => "filter-response",
            Command::DdSweep(_) => "dd-sweep",
            Command::OnebitSweep(_) => "onebit-sweep",
            Command::McValidate(_) => "mc-validate",
            Command::Prop1(_) => "prop1",
        }
    }

    pub fn args(&self) -> &CommonArgs {
        match self {
            Command::FilterResponse(a)
            | Command::DdSweep(a)
            | Command::OnebitSweep(a)
            | Command::McValidate(a)
            | Command::Prop1(a) => a,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(#[from] Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => EXIT_CONFIG,
            CliError::Numerical(_) => EXIT_NUMERICAL,
        }
    }
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

/// Raw `key = value` settings.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunConfig {
    values: BTreeMap<String, String>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| config_err(format!("line {}: expected `key = value`", lineno + 1)))?;
            cfg.set(k.trim(), v.trim())?;
        }
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        if key.is_empty() {
            return Err(config_err("empty key"));
        }
        self.values.insert(key.to_string(), value.to_string());
        Ok(())
    }

    pub fn apply_override(&mut self, assignment: &str) -> Result<(), CliError> {
        let (k, v) = assignment
            .split_once('=')
            .ok_or_else(|| config_err(format!("override `{assignment}` is not key=value")))?;
        self.set(k.trim(), v.trim())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn reject_unknown(&self, allowed: &[&str]) -> Result<(), CliError> {
        let unknown: Vec<&str> = self
            .values
            .keys()
            .map(String::as_str)
            .filter(|k| !allowed.contains(k))
            .collect();
        if unknown.is_empty() {
            Ok(())
        } else {
            Err(config_err(format!(
                "unknown key(s): {} (allowed: {})",
                unknown.join(", "),
                allowed.join(", ")
            )))
        }
    }

    fn f64_or(&self, key: &str, default: f64) -> Result<f64, CliError> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| config_err(format!("`{key}`: `{v}` is not a finite number"))),
        }
    }

    fn u64_or(&self, key: &str, default: u64) -> Result<u64, CliError> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => parse_count(v).ok_or_else(|| config_err(format!("`{key}`: `{v}` is not a nonnegative integer"))),
        }
    }

    fn usize_list(&self, key: &str) -> Result<Option<Vec<usize>>, CliError> {
        self.get(key)
            .map(|v| {
                v.split(',')
                    .map(|s| {
                        parse_count(s.trim())
                            .map(|x| x as usize)
                            .ok_or_else(|| config_err(format!("`{key}`: `{s}` is not a nonnegative integer")))
                    })
                    .collect()
            })
            .transpose()
    }

    fn f64_list(&self, key: &str, default: &[f64]) -> Result<Vec<f64>, CliError> {
        match self.get(key) {
            None => Ok(default.to_vec()),
            Some(v) => v
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .ok()
                        .filter(|x| x.is_finite())
                        .ok_or_else(|| config_err(format!("`{key}`: `{s}` is not a finite number")))
                })
                .collect(),
        }
    }
}

/// Accepts plain integers and exact integer floats such as `1e6`.
fn parse_count(s: &str) -> Option<u64> {
    s.parse::<u64>().ok().or_else(|| {
        s.parse::<f64>()
            .ok()
            .filter(|x| x.is_finite() && *x >= 0.0 && x.fract() == 0.0 && *x < 1.8e19)
            .map(|x| x as u64)
    })
}

/// Result of one subcommand.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub csv: String,
    pub summary: String,
    pub exit_code: i32,
}

/// Effective SI-unit settings, echoed into the CSV preamble.
#[derive(Debug, Default)]
struct Echo(Vec<(String, String)>);

impl Echo {
    fn push(&mut self, key: &str, value: impl std::fmt::Display) {
        self.0.push((key.to_string(), value.to_string()));
    }

    fn preamble(&self, command: &str) -> String {
        let mut out = format!("# command = {command}\n");
        for (k, v) in &self.0 {
            let _ = writeln!(out, "# {k} = {v}");
        }
        out
    }
}

/// 17 significant digits.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn execute(command: &Command, cfg: &RunConfig) -> Result<Outcome, CliError> {
    match command {
        Command::FilterResponse(_) => cmd_filter_response(cfg),
        Command::DdSweep(_) => cmd_dd_sweep(cfg),
        Command::OnebitSweep(_) => cmd_onebit_sweep(cfg),
        Command::McValidate(_) => cmd_mc_validate(cfg),
        Command::Prop1(_) => cmd_prop1(cfg),
    }
}

/// Loads the file named by `--config`, then applies overrides.
pub fn load_config(args: &CommonArgs) -> Result<RunConfig, CliError> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
            RunConfig::parse(&text)?
        }
        None => RunConfig::default(),
    };
    for o in &args.overrides {
        cfg.apply_override(o)?;
    }
    Ok(cfg)
}

/// Output path: `--output`, else the `output` key, else `<command>.csv`.
pub fn output_path(command: &Command, cfg: &RunConfig) -> PathBuf {
    command
        .args()
        .output
        .clone()
        .or_else(|| cfg.get("output").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(format!("{}.csv", command.name())))
}

const FILTER_KEYS: &[&str] = &[
    "output",
    "bandwidth_hz",
    "sigma",
    "points",
    "rlc_center_over_b",
    "rlc_series_dissipation",
    "rlc_tank_q",
    "rlc_r",
    "rlc_r1",
];

pub fn cmd_filter_response(cfg: &RunConfig) -> Result<Outcome, CliError> {
    cfg.reject_unknown(FILTER_KEYS)?;
    let b = cfg.f64_or("bandwidth_hz", 1e9)?;
    let sigma = cfg.f64_or("sigma", 0.05)?;
    let points = cfg.u64_or("points", 1000)? as usize;
    if points < 2 {
        return Err(config_err("`points`: need at least 2"));
    }
    let spec = FilterSpec::new(b, sigma).map_err(|e| config_err(e.to_string()))?;
    let rlc = RlcParams::from_ratios(
        b,
        cfg.f64_or("rlc_center_over_b", 3.0)? * b,
        cfg.f64_or("rlc_series_dissipation", 4.0)?,
        cfg.f64_or("rlc_tank_q", 80.0)?,
        cfg.f64_or("rlc_r", 2.6e4)?,
        cfg.f64_or("rlc_r1", 1.0)?,
    )
    .map_err(|e| config_err(e.to_string()))?;

    let mut echo = Echo::default();
    echo.push("bandwidth_hz", num(b));
    echo.push("sigma", num(sigma));
    echo.push("points", points);
    for (k, v) in [
        ("rlc_r_ohm", rlc.r),
        ("rlc_l_h", rlc.l),
        ("rlc_c_f", rlc.c),
        ("rlc_r1_ohm", rlc.r1),
        ("rlc_l1_h", rlc.l1),
        ("rlc_c1_f", rlc.c1),
        ("rlc_f0_hz", rlc.center_frequency_hz),
    ] {
        echo.push(k, num(v));
    }

    let mut csv = echo.preamble("filter-response");
    csv.push_str("f_over_B,eq4_mag2,rlc_mag2\n");
    let mut peak = (f64::NEG_INFINITY, 0.0);
    for i in 0..points {
        let x = -0.6 + 1.2 * i as f64 / (points - 1) as f64;
        let f = x * b;
        let ideal = spec.magnitude_sq(f);
        let ladder = rlc_ladder_response(&rlc, f);
        if ideal > peak.0 {
            peak = (ideal, x);
        }
        let _ = writeln!(csv, "{},{},{}", num(x), num(ideal), num(ladder));
    }
    let summary = format!(
        "filter-response: {points} points over [-0.6B, 0.6B]\npeak |G|^2 = {:.6} at f/B = {:.4} (1/sigma^2 = {:.6})\nladder resonances: series {:.6e} Hz, tank {:.6e} Hz\n",
        peak.0,
        peak.1,
        1.0 / (sigma * sigma),
        rlc.series_resonance_hz(),
        rlc.tank_resonance_hz()
    );
    Ok(Outcome {
        csv,
        summary,
        exit_code: EXIT_OK,
    })
}

const DD_KEYS: &[&str] = &[
    "output",
    "bandwidth_hz",
    "sigma",
    "snr_db",
    "p_lo_dbm",
    "n0_dbm_per_hz",
    "noise_figure_db",
    "n_min",
    "n_max",
    "n_points",
    "n_list",
];

pub fn cmd_dd_sweep(cfg: &RunConfig) -> Result<Outcome, CliError> {
    cfg.reject_unknown(DD_KEYS)?;
    let b = cfg.f64_or("bandwidth_hz", 1e9)?;
    let sigma = cfg.f64_or("sigma", 0.05)?;
    let snr = db_to_linear(cfg.f64_or("snr_db", 0.0)?);
    let p_lo = dbm_to_watts(cfg.f64_or("p_lo_dbm", -30.0)?);
    let n0 = dbm_to_watts(cfg.f64_or("n0_dbm_per_hz", -174.2)?)
        * db_to_linear(cfg.f64_or("noise_figure_db", 3.0)?);
    let n_list = match cfg.usize_list("n_list")? {
        Some(list) => list,
        None => log_spaced_antennas(
            cfg.u64_or("n_min", 16)? as usize,
            cfg.u64_or("n_max", 65536)? as usize,
            cfg.u64_or("n_points", 25)? as usize,
        ),
    };
    let filter = FilterSpec::new(b, sigma).map_err(|e| config_err(e.to_string()))?;
    let n_first = *n_list.first().ok_or_else(|| config_err("`n_list`: empty"))?;
    let template =
        DirectDetectionScenario::new(n_first.max(2), snr * b * n0, n0, p_lo, LoCapture::InverseSquare, filter)
            .map_err(|e| config_err(e.to_string()))?;

    let mut echo = Echo::default();
    echo.push("bandwidth_hz", num(b));
    echo.push("sigma", num(sigma));
    echo.push("rho_w", num(template.signal_power_w));
    echo.push("p_lo_w", num(p_lo));
    echo.push("n0_w_per_hz", num(n0));
    echo.push("epsilon", "N^-2");
    echo.push(
        "n_list",
        n_list.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(","),
    );

    let results = sweep_points(&template, &n_list).map_err(|e| config_err(e.to_string()))?;
    let mut csv = echo.preamble("dd-sweep");
    csv.push_str("N,rate_bps,upper_bound_bps\n");
    let mut summary = String::from("dd-sweep\n");
    let mut failures = 0;
    let mut best: Option<(usize, f64)> = None;
    for (n, point) in &results {
        match point {
            Ok(p) => {
                let _ = writeln!(csv, "{},{},{}", n, num(p.rate_bps), num(p.upper_bound_bps));
                if best.is_none_or(|(_, r)| p.rate_bps > r) {
                    best = Some((*n, p.rate_bps));
                }
            }
            Err(e) => {
                failures += 1;
                let _ = writeln!(summary, "N = {n}: {e}");
            }
        }
    }
    if let Some((n, r)) = best {
        let _ = writeln!(summary, "argmax N = {n} with rate {:.6e} bit/s", r);
    }
    let _ = writeln!(summary, "{} of {} points computed", results.len() - failures, results.len());
    Ok(Outcome {
        csv,
        summary,
        exit_code: if failures > 0 { EXIT_NUMERICAL } else { EXIT_OK },
    })
}

const ONEBIT_KEYS: &[&str] = &["output", "preset", "k", "snr_db", "n_list", "channel_draws", "seed"];

/// `(K, snr_db)` for a named preset.
pub fn onebit_preset(name: &str) -> Option<(usize, f64)> {
    match name {
        "fig5" => Some((10, -6.0)),
        "single-stream" => Some((1, 0.0)),
        "dual-stream" => Some((2, -3.0)),
        _ => None,
    }
}

/// Channel-averaged exact per-user SINDR over `draws` i.i.d. Rayleigh
/// channels. Draw `d` uses the child stream `(mix_seed(seed, N), d)`.
pub fn average_exact_sindr(
    num_antennas: usize,
    num_users: usize,
    rho: f64,
    draws: usize,
    seed: u64,
) -> crate::error::Result<f64> {
    let per_draw: Vec<crate::error::Result<f64>> = (0..draws)
        .into_par_iter()
        .map(|d| {
            let mut rng = child_rng(mix_seed(seed, num_antennas as u64), d as u64);
            let h = ChannelMatrix::iid_rayleigh(num_antennas, num_users, &mut rng)?;
            Ok(sindr_report(&MimoScenario::new(h, rho)?)?.mean_gamma())
        })
        .collect();
    let mut sum = 0.0;
    for g in per_draw {
        sum += g?;
    }
    Ok(sum / draws as f64)
}

pub fn cmd_onebit_sweep(cfg: &RunConfig) -> Result<Outcome, CliError> {
    cfg.reject_unknown(ONEBIT_KEYS)?;
    let (mut k, mut snr_db) = (10usize, -6.0);
    if let Some(p) = cfg.get("preset") {
        (k, snr_db) = onebit_preset(p)
            .ok_or_else(|| config_err(format!("`preset`: unknown preset `{p}` (fig5, single-stream, dual-stream)")))?;
    }
    k = cfg.u64_or("k", k as u64)? as usize;
    snr_db = cfg.f64_or("snr_db", snr_db)?;
    let rho = db_to_linear(snr_db);
    let n_list = cfg.usize_list("n_list")?.unwrap_or_else(|| vec![64, 128, 256, 512, 1024]);
    let draws = cfg.u64_or("channel_draws", 20)? as usize;
    let seed = cfg.u64_or("seed", 1)?;
    if k == 0 || draws == 0 || n_list.is_empty() || n_list.contains(&0) {
        return Err(config_err("`k`, `channel_draws` and every N must be positive"));
    }

    let mut echo = Echo::default();
    echo.push("k", k);
    echo.push("rho", num(rho));
    echo.push("channel_draws", draws);
    echo.push("seed", seed);
    echo.push(
        "n_list",
        n_list.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(","),
    );

    let mut csv = echo.preamble("onebit-sweep");
    csv.push_str("N,K,rho,gamma_exact_mean,gamma_first,gamma_third,gamma_saturation,gain_over_rho\n");
    let mut summary = format!("onebit-sweep: K = {k}, rho = {rho:.6} ({snr_db} dB), {draws} channel draws\n");
    let mut failures = 0;
    for &n in &n_list {
        let inputs = ApproxInputs::new(n, k, rho).map_err(|e| config_err(e.to_string()))?;
        let first = first_order_sindr(&inputs);
        let third = third_order_sindr(&inputs);
        let sat = saturation_limit(k, rho);
        let exact = match average_exact_sindr(n, k, rho, draws, seed) {
            Ok(g) => g,
            Err(e) => {
                failures += 1;
                let _ = writeln!(summary, "N = {n}: flagged, {e}");
                f64::NAN
            }
        };
        let _ = writeln!(
            csv,
            "{n},{k},{},{},{},{},{},{}",
            num(rho),
            num(exact),
            num(first),
            num(third),
            num(sat),
            num(exact / rho)
        );
        let _ = writeln!(
            summary,
            "N = {n:>6}: exact {exact:>10.4}  first {first:>10.4}  third {third:>10.4}  (gain {:.3})",
            exact / rho
        );
    }
    Ok(Outcome {
        csv,
        summary,
        exit_code: if failures > 0 { EXIT_NUMERICAL } else { EXIT_OK },
    })
}

const MC_KEYS: &[&str] = &["output", "n", "k", "snr_db", "trials", "seed", "scalar_check"];

pub fn cmd_mc_validate(cfg: &RunConfig) -> Result<Outcome, CliError> {
    cfg.reject_unknown(MC_KEYS)?;
    let n = cfg.u64_or("n", 8)? as usize;
    let k = cfg.u64_or("k", 2)? as usize;
    let rho = db_to_linear(cfg.f64_or("snr_db", 0.0)?);
    let trials = cfg.u64_or("trials", 1_000_000)?;
    let seed = cfg.u64_or("seed", 2018)?;
    let scalar = match cfg.get("scalar_check").unwrap_or("true") {
        "true" | "1" | "yes" => true,
        "false" | "0" | "no" => false,
        other => return Err(config_err(format!("`scalar_check`: `{other}` is not a boolean"))),
    };
    if n == 0 || k == 0 || trials == 0 {
        return Err(config_err("`n`, `k` and `trials` must be positive"));
    }

    let mut rng = child_rng(seed, u64::MAX);
    let h = ChannelMatrix::iid_rayleigh(n, k, &mut rng)?;
    let main_cfg = McConfig::new(MimoScenario::new(h, rho)?, trials, seed)?;
    let mut runs: Vec<(&str, McReport)> = vec![("", run_trials(&main_cfg)?)];
    if scalar {
        let one = ChannelMatrix::new(nalgebra::DMatrix::from_element(1, 1, num_complex::Complex64::new(1.0, 0.0)))?;
        let scalar_cfg = McConfig::new(MimoScenario::new(one, 1.0)?, trials, mix_seed(seed, 1))?;
        runs.push(("scalar:", run_trials(&scalar_cfg)?));
    }

    let mut echo = Echo::default();
    echo.push("n", n);
    echo.push("k", k);
    echo.push("rho", num(rho));
    echo.push("trials", trials);
    echo.push("seed", seed);
    echo.push("scalar_check", scalar);

    let mut csv = echo.preamble("mc-validate");
    csv.push_str("check_name,analytic,empirical,stderr,z,pass\n");
    let mut summary = String::new();
    let mut failed = false;
    let mut inconclusive = false;
    for (prefix, rep) in &runs {
        for line in rep.to_csv().lines().skip(1) {
            let _ = writeln!(csv, "{prefix}{line}");
        }
        let label = if prefix.is_empty() { format!("N = {n}, K = {k}, rho = {rho}") } else { "scalar N = K = 1, h = 1, rho = 1".to_string() };
        let _ = writeln!(summary, "[{label}]\n{}", rep.summary());
        failed |= rep.failed().next().is_some();
        inconclusive |= rep.is_inconclusive();
    }
    let exit_code = if failed {
        let _ = writeln!(summary, "RESULT: gate failure");
        EXIT_GATE
    } else if inconclusive {
        let _ = writeln!(summary, "WARNING: too few trials for batch-means standard errors; gates inconclusive");
        EXIT_OK
    } else {
        let _ = writeln!(summary, "RESULT: all gates passed");
        EXIT_OK
    };
    Ok(Outcome {
        csv,
        summary,
        exit_code,
    })
}

const PROP1_KEYS: &[&str] = &["output", "k_list", "rate_list"];

pub fn cmd_prop1(cfg: &RunConfig) -> Result<Outcome, CliError> {
    cfg.reject_unknown(PROP1_KEYS)?;
    let ks = cfg.usize_list("k_list")?.unwrap_or_else(|| vec![1, 2, 4, 8]);
    let rates = cfg.f64_list("rate_list", &[1.0, 2.0, 3.0, 4.0])?;
    if ks.contains(&0) || rates.iter().any(|r| *r < 0.0) {
        return Err(config_err("`k_list` entries must be positive and `rate_list` nonnegative"));
    }
    let mut echo = Echo::default();
    echo.push("k_list", ks.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(","));
    echo.push("rate_list", rates.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(","));
    echo.push("recommended_margin", RECOMMENDED_MARGIN);

    let mut csv = echo.preamble("prop1");
    csv.push_str("K,R_bits,gamma,N_threshold,N_recommended\n");
    let mut summary = String::from("linear-processing antenna threshold (recommend 10x)\n");
    for &k in &ks {
        for &r in &rates {
            let target = Target::Rate(r);
            let t = linear_dsp_threshold(k, target);
            let _ = writeln!(
                csv,
                "{k},{},{},{},{}",
                num(r),
                num(target.gamma()),
                num(t),
                num(RECOMMENDED_MARGIN * t)
            );
            let _ = writeln!(summary, "K = {k:>3}, R = {r:>5} bit: N >> {t:.3} (recommended {:.1})", RECOMMENDED_MARGIN * t);
        }
    }
    Ok(Outcome {
        csv,
        summary,
        exit_code: EXIT_OK,
    })
}
