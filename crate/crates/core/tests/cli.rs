use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};
use vacdetect::run::RunResult;

fn vacdetect(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vacdetect"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn config(dir: &Path, name: &str, value: &Value) -> String {
    let p = dir.join(name);
    std::fs::write(&p, serde_json::to_string_pretty(value).unwrap()).unwrap();
    p.to_str().unwrap().to_string()
}

fn reference_config() -> Value {
    json!({
        "detector": {"transition_frequency": 50.0},
        "electronic": {"kind": "electronic", "gamma": 1.0, "center_frequency": 50.0, "bandwidth": 40.0, "mode_count": 2001},
        "radiative": {"kind": "radiative", "gamma": 0.0, "center_frequency": 50.0, "bandwidth": 40.0, "mode_count": 2001},
        "drive": {"alpha": [1.0, 0.0], "laser_frequency": 50.0, "coupling": 0.1}
    })
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

#[test]
fn steady_reference_reports_two_percent_current() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "c.json", &reference_config());
    let out = dir.path().join("r.json");
    let o = vacdetect(&["steady", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r: RunResult = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!((r.steady_summary.mean_current - 0.02).abs() < 1e-15);
    assert_eq!(r.steady_summary.efficiency_factor, 1.0);
    assert!(String::from_utf8_lossy(&o.stderr).contains("steady current"));
}

#[test]
fn spec_echo_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let mut value = reference_config();
    value["oracle"] = json!({"mode_count": 801, "horizon": 10.0, "trace_points": 21});
    value["radiative"]["gamma"] = json!(0.5);
    let cfg = config(dir.path(), "c.json", &value);
    for extra in [&[][..], &["--oracle"][..]] {
        let first = dir.path().join("first.json");
        let mut args = vec!["steady", "--config", &cfg, "--out", first.to_str().unwrap()];
        args.extend(extra);
        assert_eq!(code(&vacdetect(&args)), 0);
        let a: RunResult = serde_json::from_str(&std::fs::read_to_string(&first).unwrap()).unwrap();

        let echo = config(
            dir.path(),
            "echo.json",
            &serde_json::to_value(&a.spec_echo).unwrap(),
        );
        let second = dir.path().join("second.json");
        let mut args = vec![
            "steady",
            "--config",
            &echo,
            "--out",
            second.to_str().unwrap(),
        ];
        args.extend(extra);
        assert_eq!(code(&vacdetect(&args)), 0);
        let b: RunResult =
            serde_json::from_str(&std::fs::read_to_string(&second).unwrap()).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn oracle_sweep_is_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let mut value = reference_config();
    value["oracle"] = json!({"mode_count": 601, "horizon": 12.0, "trace_points": 2});
    let cfg = config(dir.path(), "c.json", &value);
    let run = |jobs: &str| {
        let o = vacdetect(&[
            "sweep", "--config", &cfg, "--axis", "detuning", "--grid", "-1:1:5", "--oracle",
            "--jobs", jobs,
        ]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        o.stdout
    };
    let serial = run("1");
    assert_eq!(serial, run("4"));
    let text = String::from_utf8(serial).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("detuning,mean_current"));
    let detunings: Vec<f64> = lines
        .map(|l| l.split(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(detunings, vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
}

#[test]
fn malformed_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.json");
    std::fs::write(&p, "{ not json").unwrap();
    let o = vacdetect(&["steady", "--config", p.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
}

#[test]
fn invalid_spec_lists_violations_and_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let mut value = reference_config();
    value["electronic"]["gamma"] = json!(-1.0);
    value["drive"]["coupling"] = json!(-0.1);
    let cfg = config(dir.path(), "c.json", &value);
    let o = vacdetect(&["steady", "--config", &cfg]);
    assert_eq!(code(&o), 2);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("gamma") && err.contains("coupling"), "{err}");
}

#[test]
fn non_positive_lag_range_exits_2() {
    assert_eq!(code(&vacdetect(&["correlate", "--tau-max", "0"])), 2);
    assert_eq!(code(&vacdetect(&["correlate", "--tau-max", "-1"])), 2);
}

#[test]
fn kappa_sweep_needs_cavity_section() {
    assert_eq!(
        code(&vacdetect(&["sweep", "--axis", "kappa", "--grid", "10,20"])),
        2
    );
    let dir = tempfile::tempdir().unwrap();
    let mut value = reference_config();
    value["cavity"] =
        json!({"g_ke": 0.5, "kappa": 10.0, "gamma_1": 1.0, "other_loss_ratios": [0.0]});
    let cfg = config(dir.path(), "c.json", &value);
    let o = vacdetect(&[
        "sweep", "--config", &cfg, "--axis", "kappa", "--grid", "10:40:4",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn coarse_grid_validation_fails_with_exit_3() {
    let o = vacdetect(&["validate", "--mode-count", "51"]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
    let table = String::from_utf8(o.stdout).unwrap();
    assert!(table.starts_with("check,value,reference"));
    assert!(table
        .lines()
        .any(|l| l.starts_with("mean_current,") && l.contains(",false,")));
}

#[test]
fn detector_at_band_edge_is_a_calibration_failure() {
    let dir = tempfile::tempdir().unwrap();
    let mut value = reference_config();
    value["electronic"]["center_frequency"] = json!(89.9);
    let cfg = config(dir.path(), "c.json", &value);
    let o = vacdetect(&["steady", "--oracle", "--config", &cfg]);
    assert_eq!(code(&o), 4, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn correlate_csv_columns() {
    let o = vacdetect(&["correlate", "--tau-max", "4", "--points", "9"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "tau,real,imag,abs");
    assert_eq!(lines.count(), 9);
}
