use std::path::Path;
use std::process::{Command, Output};

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lowres-array"))
        .current_dir(dir)
        .args(args)
        .output()
        .unwrap()
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

fn header(csv: &str) -> &str {
    csv.lines().find(|l| !l.starts_with('#')).unwrap()
}

#[test]
fn filter_response_grid() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["filter-response", "-o", "f.csv"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("f.csv")).unwrap();
    assert_eq!(header(&csv), "f_over_B,eq4_mag2,rlc_mag2");
    let data = rows(&csv);
    assert_eq!(data.len(), 1000);
    let parse = |s: &str| s.parse::<f64>().unwrap();
    assert_eq!(parse(&data[0][0]), -0.6);
    assert_eq!(parse(&data[999][0]), 0.6);
    let mut peak = (0.0, 0.0);
    for r in &data {
        let (x, g) = (parse(&r[0]), parse(&r[1]));
        if x.abs() > 0.5 {
            assert_eq!(g, 0.0);
        }
        if g > peak.1 {
            peak = (x, g);
        }
    }
    assert!((peak.0 - 0.5).abs() < 2e-3, "{peak:?}");
    assert!((peak.1 - 400.0).abs() / 400.0 < 0.01, "{peak:?}");
}

#[test]
fn dd_sweep_rows_respect_bound() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["dd-sweep", "n_min=16", "n_max=65536", "n_points=17"]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.path().join("dd-sweep.csv")).unwrap();
    assert_eq!(header(&csv), "N,rate_bps,upper_bound_bps");
    assert!(csv.contains("# p_lo"));
    for r in rows(&csv) {
        assert!(r[1].parse::<f64>().unwrap() <= r[2].parse::<f64>().unwrap());
    }
    assert!(String::from_utf8_lossy(&out.stdout).contains("argmax N"));
}

#[test]
fn prop1_thresholds() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["prop1", "k_list=1", "rate_list=0,1,2,4"]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.path().join("prop1.csv")).unwrap();
    assert_eq!(header(&csv), "K,R_bits,gamma,N_threshold,N_recommended");
    let t: Vec<f64> = rows(&csv).iter().map(|r| r[3].parse().unwrap()).collect();
    assert_eq!(t[0], 0.0);
    assert!((t[2] - 4.081).abs() < 1e-3);
    assert!(t[3] > 2.0 * t[2]);
}

#[test]
fn onebit_sweep_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["onebit-sweep", "preset=dual-stream", "n_list=16,32", "channel_draws=3"]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.path().join("onebit-sweep.csv")).unwrap();
    assert_eq!(
        header(&csv),
        "N,K,rho,gamma_exact_mean,gamma_first,gamma_third,gamma_saturation,gain_over_rho"
    );
    for r in rows(&csv) {
        let v: Vec<f64> = r.iter().map(|s| s.parse().unwrap()).collect();
        assert_eq!(v[1], 2.0);
        assert!((v[7] - v[3] / v[2]).abs() <= 1e-12 * v[7]);
    }
}

#[test]
fn mc_validate_is_byte_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = run(dir.path(), &["mc-validate", "trials=20000", "-o", "a.csv"]);
    let b = run(dir.path(), &["mc-validate", "trials=20000", "-o", "b.csv"]);
    assert!(a.status.code().is_some() && a.status.code() == b.status.code());
    let read = |f: &str| std::fs::read(dir.path().join(f)).unwrap();
    assert_eq!(read("a.csv"), read("b.csv"));
}

#[test]
fn single_trial_is_inconclusive() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["mc-validate", "trials=1"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("inconclusive"));
    let csv = std::fs::read_to_string(dir.path().join("mc-validate.csv")).unwrap();
    assert!(csv.contains(",inconclusive"));
}

#[test]
fn unknown_key_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["prop1", "bogus=1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bogus"));
}

#[test]
fn config_file_and_override() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("run.cfg"), "# thresholds\nk_list = 2\nrate_list = 1\n").unwrap();
    let out = run(dir.path(), &["prop1", "-c", "run.cfg", "rate_list=3"]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.path().join("prop1.csv")).unwrap();
    let r = &rows(&csv)[0];
    assert_eq!((r[0].as_str(), r[1].parse::<f64>().unwrap()), ("2", 3.0));
}
