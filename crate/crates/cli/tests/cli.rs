use std::path::Path;
use std::process::{Command, Output};

use mgs_detect::metrics::chi_tradeoff;
use mgs_sim::output::{CSV_HEADER, PLOT_FILE, RESULTS_FILE};
use mgs_sim::{parse_config_str, simulate};
use serde::Deserialize;

const SMALL: &str = r#"
seed = 11

[system]
K = 2
N = 4
M = 4

[sweep]
values = [0, 4, 8]

[stopping]
min_bit_errors = 40
max_trials = 5000

[[detector]]
kind = "mmse"

[[detector]]
preset = "dsmgs-default"
d = 1
"#;

#[derive(Debug, Deserialize)]
#[allow(non_snake_case)]
struct Row {
    detector: String,
    K: usize,
    N: usize,
    M: u32,
    d: Option<usize>,
    L_e: Option<usize>,
    q: Option<f64>,
    axis: String,
    axis_value: f64,
    trials: u64,
    total_bits: u64,
    bit_errors: u64,
    ber: f64,
    ber_ci95: f64,
    eni: f64,
    rops_per_symbol: f64,
    chi: f64,
    seed: u64,
}

fn mgs_sim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mgs-sim")).args(args).output().unwrap()
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("run.toml");
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn simulate_into(dir: &Path, text: &str, extra: &[&str]) -> Output {
    let cfg = write_config(dir, text);
    let out = dir.join("out");
    let mut args = vec!["simulate", cfg.as_str(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    mgs_sim(&args)
}

fn read_rows(path: &Path) -> Vec<Row> {
    csv::Reader::from_path(path)
        .unwrap()
        .deserialize()
        .map(|r| r.unwrap())
        .collect()
}

fn close(a: f64, b: f64) -> bool {
    (a.is_nan() && b.is_nan()) || a == b || ((a - b) / b).abs() < 1e-9
}

#[test]
fn two_detectors_three_snrs_give_six_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = simulate_into(dir.path(), SMALL, &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = read_rows(&dir.path().join("out").join(RESULTS_FILE));
    assert_eq!(rows.len(), 6);
    assert_eq!(rows.iter().filter(|r| r.detector == "MMSE").count(), 3);
    assert_eq!(rows.iter().filter(|r| r.detector == "1-sMGS-MR").count(), 3);
    for r in &rows {
        assert_eq!((r.K, r.N, r.M, r.seed, r.axis.as_str()), (2, 4, 4, 11, "snr_db"));
        assert_eq!(r.total_bits, r.trials * 4);
        assert!(r.bit_errors >= 40 || r.trials == 5000);
        assert!(r.ber_ci95 > 0.0 && r.ber_ci95 < 0.5);
        assert!(r.rops_per_symbol > 0.0);
    }
    let ds: Vec<&Row> = rows.iter().filter(|r| r.d == Some(1)).collect();
    assert!(ds.iter().all(|r| r.q == Some(0.25) && r.L_e.is_none() && r.eni > 0.0));
    assert!(rows
        .iter()
        .filter(|r| r.detector == "MMSE")
        .all(|r| r.d.is_none() && r.q.is_none() && r.eni == 0.0));
}

#[test]
fn rerun_is_byte_identical_across_thread_counts() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert!(simulate_into(a.path(), SMALL, &["--threads", "1"]).status.success());
    assert!(simulate_into(b.path(), SMALL, &["--threads", "4"]).status.success());
    let x = std::fs::read(a.path().join("out").join(RESULTS_FILE)).unwrap();
    let y = std::fs::read(b.path().join("out").join(RESULTS_FILE)).unwrap();
    assert_eq!(x, y);
}

#[test]
fn chi_column_matches_ber_and_rops() {
    let dir = tempfile::tempdir().unwrap();
    assert!(simulate_into(dir.path(), SMALL, &[]).status.success());
    for r in read_rows(&dir.path().join("out").join(RESULTS_FILE)) {
        let chi = chi_tradeoff(r.ber, r.rops_per_symbol).unwrap();
        assert!(close(r.chi, chi), "{} vs {chi}", r.chi);
    }
}

#[test]
fn csv_round_trips_through_a_generic_parser() {
    let dir = tempfile::tempdir().unwrap();
    assert!(simulate_into(dir.path(), SMALL, &[]).status.success());
    let path = dir.path().join("out").join(RESULTS_FILE);
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(!text.contains('\r'));
    assert!(text.ends_with('\n'));
    assert_eq!(text.lines().next().unwrap(), CSV_HEADER);

    let points = simulate(&parse_config_str(SMALL).unwrap(), None).unwrap();
    let rows = read_rows(&path);
    assert_eq!(rows.len(), points.len());
    for (r, p) in rows.iter().zip(&points) {
        assert_eq!(r.detector, p.detector);
        assert_eq!(
            (r.d, r.L_e, r.trials, r.total_bits, r.bit_errors),
            (p.d, p.l_e, p.trials, p.total_bits, p.bit_errors)
        );
        for (a, b) in [
            (r.axis_value, p.axis_value),
            (r.ber, p.ber),
            (r.ber_ci95, p.ber_ci95),
            (r.eni, p.eni),
            (r.rops_per_symbol, p.rops_per_symbol),
            (r.chi, p.chi),
        ] {
            assert!(close(a, b), "{a} vs {b}");
        }
    }
}

#[test]
fn oracle_rows_have_no_complexity() {
    let text = SMALL.replace("kind = \"mmse\"", "kind = \"ml\"");
    let dir = tempfile::tempdir().unwrap();
    assert!(simulate_into(dir.path(), &text, &[]).status.success());
    let rows = read_rows(&dir.path().join("out").join(RESULTS_FILE));
    let ml: Vec<&Row> = rows.iter().filter(|r| r.detector == "ML").collect();
    assert_eq!(ml.len(), 3);
    assert!(ml.iter().all(|r| r.rops_per_symbol.is_nan() && r.chi.is_nan()));
}

#[test]
fn config_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (SMALL.replace("\nd = 1", "\nd = 1\nspeed = 2"), "speed"),
        (SMALL.replace("\nd = 1", ""), "\"d\""),
        (SMALL.replace("N = 4", "N = 1"), "exceeds"),
        (SMALL.replace("[sweep]", "[sweep\n"), "error"),
    ];
    for (text, needle) in cases {
        let out = simulate_into(dir.path(), &text, &[]);
        assert_eq!(out.status.code(), Some(2));
        let stderr = String::from_utf8_lossy(&out.stderr);
        assert!(stderr.contains(needle), "{needle}: {stderr}");
    }
    let out = mgs_sim(&["simulate", dir.path().join("missing.toml").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let out = simulate_into(dir.path(), SMALL, &["--threads", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unwritable_output_exits_with_3() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("blocker");
    std::fs::write(&blocker, "not a directory").unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out = mgs_sim(&["simulate", &cfg, "--out", blocker.join("sub").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn under_resolved_points_warn_but_succeed() {
    let text = SMALL
        .replace("values = [0, 4, 8]", "values = [40]")
        .replace("max_trials = 5000", "max_trials = 20");
    let dir = tempfile::tempdir().unwrap();
    let out = simulate_into(dir.path(), &text, &[]);
    assert_eq!(out.status.code(), Some(0));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert_eq!(stderr.matches("warning:").count(), 2, "{stderr}");
}

#[test]
fn plot_flag_writes_script_and_seed_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let out = simulate_into(dir.path(), SMALL, &["--plot", "--seed", "99"]);
    assert!(out.status.success());
    let script = std::fs::read_to_string(dir.path().join("out").join(PLOT_FILE)).unwrap();
    assert!(script.contains(RESULTS_FILE) && script.contains("set_yscale(\"log\")"));
    let rows = read_rows(&dir.path().join("out").join(RESULTS_FILE));
    assert!(rows.iter().all(|r| r.seed == 99));
}

#[test]
fn presets_and_version() {
    let out = mgs_sim(&["presets"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["mgs-mr-baseline", "dsmgs-default", "amgs-best"] {
        assert!(text.contains(name));
    }
    let out = mgs_sim(&["--version"]);
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .contains(env!("CARGO_PKG_VERSION")));
}

#[test]
fn shipped_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            mgs_sim::parse_config(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            seen += 1;
        }
    }
    assert!(seen >= 3);
}
