use std::fs;
use std::process::{Command, Output};

use reactive_squeeze::sweep::output::read_csv;

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_reactive-squeeze"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn variance_prints_breakdown_as_json() {
    let out = cli(&["--format", "json", "variance"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let total = v["total"].as_f64().unwrap();
    assert!(total > 0.2 && total < 0.3, "{total}");
    assert_eq!(v["tolerance_met"], true);
}

#[test]
fn steady_reports_stable_reference_point() {
    let out = cli(&["steady"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("q_s,p_s,"));
    assert!(lines.next().unwrap().ends_with(",true"));
}

#[test]
fn sweep_writes_readable_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let out = cli(&[
        "--out",
        path.to_str().unwrap(),
        "sweep",
        "--axis",
        "power",
        "--start",
        "5",
        "--stop",
        "50",
        "--points",
        "10",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = read_csv(fs::File::open(&path).unwrap()).unwrap();
    assert_eq!(rows.len(), 10);
    assert_eq!(rows[0].axis_value, 5.0);
    assert!(rows.iter().all(|r| r.stable && r.total.unwrap() < 1.0));
}

#[test]
fn sweep_reads_axis_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.toml");
    fs::write(
        &config,
        "[physical]\ntemperature_mk = 20.0\n\n[sweep]\naxis = \"squeeze_r\"\nstart = 0.0\nstop = 1.0\npoints = 3\n",
    )
    .unwrap();
    let out = cli(&["--config", config.to_str().unwrap(), "--format", "json", "sweep"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 3);
    assert!(rows[0]["total"].as_f64().unwrap() > 1.0);
    assert!(rows[2]["total"].as_f64().unwrap() < 1.0);
}

#[test]
fn invalid_input_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.toml");
    fs::write(&config, "[physical]\npump_power = 1.0\n").unwrap();
    assert_eq!(
        cli(&["--config", config.to_str().unwrap(), "steady"]).status.code(),
        Some(1)
    );
    assert_eq!(cli(&["--temperature", "-3", "variance"]).status.code(), Some(1));
    assert_eq!(
        cli(&["sweep", "--axis", "power", "--start", "1", "--stop", "2"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(cli(&["--cutoff", "0", "variance"]).status.code(), Some(1));
}

#[test]
fn figure1_flags_unstable_rows_with_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = cli(&["--out", dir.path().to_str().unwrap(), "figure1", "--points", "41"]);
    assert_eq!(out.status.code(), Some(2));
    for t in ["1", "10", "50", "100"] {
        let rows = read_csv(fs::File::open(dir.path().join(format!("figure1_T{t}mK.csv"))).unwrap()).unwrap();
        assert_eq!(rows.len(), 41);
        // low detunings have no stable fixed point; the rest carry values
        assert!(rows.iter().any(|r| !r.stable && r.total.is_none()));
        assert!(rows.iter().filter(|r| r.stable).all(|r| r.total.is_some()));
    }
}

#[test]
fn figure2_writes_one_file_per_temperature() {
    let dir = tempfile::tempdir().unwrap();
    let out = cli(&[
        "--out",
        dir.path().to_str().unwrap(),
        "--format",
        "json",
        "figure2",
        "--points",
        "7",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for t in ["1", "20"] {
        let text = fs::read_to_string(dir.path().join(format!("figure2_T{t}mK.json"))).unwrap();
        let rows: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(rows.as_array().unwrap().len(), 7);
    }
}

#[test]
fn minimize_locates_power_minimum() {
    let out = cli(&[
        "--format", "json", "minimize", "--axis", "power", "--start", "1", "--stop", "60", "--points", "30",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let at = v["axis_value"].as_f64().unwrap();
    assert!(at > 5.0 && at < 15.0, "{at}");
    assert_eq!(v["axis_unit"], "uW");
}

#[test]
fn nested_sweep_emits_outer_column() {
    let out = cli(&[
        "sweep",
        "--axis",
        "power",
        "--start",
        "5",
        "--stop",
        "20",
        "--points",
        "3",
        "--outer",
        "temperature:1:50:2",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 7);
    assert!(lines[0].starts_with("outer_value,axis_value,"));
    assert!(lines[6].starts_with("5.0000000000000000e1,2.0000000000000000e1,"));
    assert_eq!(
        cli(&[
            "sweep",
            "--axis",
            "power",
            "--start",
            "5",
            "--stop",
            "20",
            "--points",
            "3",
            "--outer",
            "mass:1:2:2"
        ])
        .status
        .code(),
        Some(1)
    );
}
