//! End-to-end checks of the binary: output determinism, exit codes, the
//! config-file/override precedence, and the figure recipes.

use std::path::PathBuf;
use std::process::{Command, Output};

fn ddicav(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ddicav"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn tmp_dir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ddicav-cli-test-{name}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn identical_config_gives_identical_bytes() {
    let args = [
        "spectrum",
        "--regime",
        "saturated",
        "--set",
        "kappa=0.1",
        "--set",
        "gamma=0.1",
        "--set",
        "gamma_prime=0.01",
        "--set",
        "j_ddi=0.5",
        "--set",
        "eta2_over_kappa2=4",
        "--sweep",
        "delta_c=-2:2:101",
    ];
    let first = ddicav(&args);
    let second = ddicav(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
    assert!(!first.stdout.is_empty());
}

#[test]
fn spectrum_low_has_the_documented_columns() {
    let out = ddicav(&[
        "spectrum",
        "--set",
        "eta=0.12",
        "--set",
        "kappa=0.12",
        "--set",
        "gamma=0.0767",
        "--sweep",
        "delta_c=-1:1:3",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let header_line = text
        .lines()
        .find(|l| !l.starts_with('#'))
        .expect("column header");
    assert_eq!(
        header_line,
        "delta_c,photon_number,re_a,im_a,re_sigma,im_sigma"
    );
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 4);
}

#[test]
fn single_point_sweep_yields_a_single_row() {
    let out = ddicav(&[
        "spectrum",
        "--set",
        "kappa=0.12",
        "--set",
        "gamma=0.0767",
        "--set",
        "eta=0.12",
        "--sweep",
        "delta_c=0.5:0.5:1",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let data_rows = text.lines().filter(|l| !l.starts_with('#')).skip(1).count();
    assert_eq!(data_rows, 1);
}

#[test]
fn config_file_feeds_parameters_and_overrides_win() {
    let dir = tmp_dir("config");
    let cfg = dir.join("params.cfg");
    std::fs::write(
        &cfg,
        "# test config\nkappa = 0.12\ngamma = 0.0767\neta = 0.12\nj_ddi = 2\n",
    )
    .unwrap();
    let out = ddicav(&[
        "spectrum",
        "--config",
        cfg.to_str().unwrap(),
        "--set",
        "j_ddi=1",
        "--sweep",
        "delta_c=0:1:2",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("# j_ddi = 1"), "override lost:\n{text}");
    assert!(text.contains("# kappa = 0.12"));
}

#[test]
fn bad_configuration_exits_2() {
    let out = ddicav(&["spectrum", "--set", "kappa=-1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = ddicav(&["spectrum", "--sweep", "delta_c=5:-5:11"]);
    assert_eq!(out.status.code(), Some(2));
    let out = ddicav(&["spectrum", "--set", "nonsense=1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = ddicav(&[
        "figure",
        "9",
        "--out-dir",
        tmp_dir("fig9").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn numerical_failure_exits_3() {
    // saturated regime rejects gamma = 0 only after parameters resolve;
    // a lossless singular point is a numerical-domain error
    let out = ddicav(&["spectrum", "--set", "eta=0.1", "--sweep", "delta_c=-1:1:3"]);
    assert_eq!(
        out.status.code(),
        Some(3),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("at sweep point"), "missing point tag: {err}");
}

#[test]
fn json_mirrors_the_csv_rows() {
    let args_csv = ["dressed", "--set", "j_ddi=1", "--levels", "1"];
    let csv = String::from_utf8(ddicav(&args_csv).stdout).unwrap();
    let json_out = ddicav(&[
        "dressed", "--set", "j_ddi=1", "--levels", "1", "--format", "json",
    ]);
    assert!(json_out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&json_out.stdout).unwrap();
    assert_eq!(doc["columns"][0], "n");
    assert_eq!(doc["rows"].as_array().unwrap().len(), 2);
    assert_eq!(doc["rows"][0][1], "minus");
    // energies at J = g are -1 and +2
    assert_eq!(doc["rows"][0][2].as_f64().unwrap(), -1.0);
    assert_eq!(doc["rows"][1][2].as_f64().unwrap(), 2.0);
    assert!(csv.contains("1,minus,-1,"));
}

#[test]
fn figure_recipe_writes_labelled_files() {
    let dir = tmp_dir("fig1");
    let out = ddicav(&["figure", "1", "--out-dir", dir.to_str().unwrap()]);
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    for j in ["0", "1", "2"] {
        let path = dir.join(format!("figure1_j{j}.csv"));
        let text = std::fs::read_to_string(&path).expect("recipe file exists");
        assert!(text.contains("# filled_defaults = J/g in {0, 1, 2}"));
        assert!(text.contains(&format!("# j_ddi = {j}")));
        assert!(text.lines().filter(|l| !l.starts_with('#')).count() > 2000);
    }
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn relax_reports_a_time_series_reaching_steady_state() {
    let out = ddicav(&[
        "relax",
        "--set",
        "eta=0.12",
        "--set",
        "kappa=0.12",
        "--set",
        "gamma=0.0767",
        "--set",
        "gamma_prime=0.05",
        "--set",
        "delta_c=0.5",
    ]);
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .collect();
    assert!(rows.len() > 5);
    let first: f64 = rows[0].split(',').next().unwrap().parse().unwrap();
    let last: f64 = rows[rows.len() - 1]
        .split(',')
        .next()
        .unwrap()
        .parse()
        .unwrap();
    assert_eq!(first, 0.0);
    assert!(last > 0.0);
}

#[test]
fn oracle_reports_agreement_against_the_linear_layer() {
    let out = ddicav(&[
        "oracle",
        "--n-max",
        "4",
        "--set",
        "eta=0.01",
        "--set",
        "kappa=0.12",
        "--set",
        "gamma=0.0767",
        "--set",
        "gamma_prime=0.05",
        "--sweep",
        "delta_c=-1:1:5",
    ]);
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("# truncation_change_at_peak ="));
    for row in text.lines().filter(|l| !l.starts_with('#')).skip(1) {
        let rel: f64 = row.split(',').nth(3).unwrap().parse().unwrap();
        assert!(rel < 0.05, "row {row}");
    }
}
