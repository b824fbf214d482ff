use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nla-weaksim"))
        .args(args)
        .env_remove("NLA_WEAKSIM_OUTPUT_DIR")
        .env_remove("NLA_WEAKSIM_MAX_BASIS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn protocol_at_quarter_turn_has_unit_gain() {
    let out = run(&[
        "protocol",
        "--phi",
        "1.5707963",
        "--alpha2",
        "1e-4",
        "--gate",
        "ideal",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schema"], "nla-weaksim/1");
    let gain = v["result"]["gain"].as_f64().unwrap();
    assert!((gain - 1.0).abs() < 1e-6, "{gain}");
}

#[test]
fn protocol_reports_closed_form_herald_probability() {
    let out = run(&[
        "protocol",
        "--gain",
        "3",
        "--alpha2",
        "1e-4",
        "--gate",
        "ppbs",
        "--signal",
        "qubit-truncated",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = &json(&out)["result"];
    let sim = r["herald_probability"].as_f64().unwrap();
    let closed = r["herald_probability_analytic"].as_f64().unwrap();
    assert!((sim / closed - 1.0).abs() < 1e-9);
    assert!((r["gain"].as_f64().unwrap() - 3.0).abs() < 1e-9);
}

#[test]
fn zero_phase_is_flagged_with_exit_three() {
    let out = run(&["protocol", "--phi", "0"]);
    assert_eq!(out.status.code(), Some(3));
    let flags = json(&out)["result"]["flags"].clone();
    assert!(flags
        .as_array()
        .unwrap()
        .iter()
        .any(|f| f == "infinite_gain"));
}

#[test]
fn configuration_errors_exit_two() {
    for args in [
        &["protocol", "--gain", "3", "--phi", "1"][..],
        &["gain-sweep", "--shots", "10"],
        &["gain-sweep", "--epsilon", "1.5"],
        &["gain-sweep", "--inputs", "1e-3:1e-5:sq4"],
        &["protocol", "--format", "csv"],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn io_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.json");
    let out = run(&["replay", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));

    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "").unwrap();
    let target = blocker.join("out.csv");
    let out = run(&["gain-sweep", "--gain", "3", "-o", target.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn gain_sweep_writes_one_row_per_input() {
    let out = run(&[
        "gain-sweep",
        "--gain",
        "3",
        "--inputs",
        "1e-4:0.2:log20",
        "--epsilon",
        "0.35",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 21);
    assert!(lines[0].starts_with("input_size,"));
    assert!(lines[0].contains("output_ideal") && lines[0].contains("output_model"));
    assert!(lines[1].starts_with("0.0001,"));
    assert!(lines[20].starts_with("0.2,"));
}

#[test]
fn default_gains_follow_the_nominal_settings() {
    let out = run(&["gain-sweep", "--inputs", "1e-4", "--format", "json"]);
    let gains: Vec<f64> = json(&out)["result"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["nominal_g2"].as_f64().unwrap())
        .collect();
    assert_eq!(gains.len(), 3);
    for (got, want) in gains.iter().zip([3.0 / 2f64.sqrt(), 3.0, 6.0]) {
        assert!((got - want).abs() < 1e-12);
    }
}

#[test]
fn seeded_output_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for name in ["a.csv", "b.csv"] {
        let path = dir.path().join(name);
        let out = run(&[
            "gain-sweep",
            "--shots",
            "100000",
            "--seed",
            "42",
            "--rate-scale",
            "100",
            "-o",
            path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
        files.push(std::fs::read(&path).unwrap());
    }
    assert_eq!(files[0], files[1]);
    assert!(String::from_utf8_lossy(&files[0]).contains("gain_err"));
}

#[test]
fn output_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_nla-weaksim"))
        .args(["visibility", "--gain", "2", "-o", "nested/v.csv"])
        .env("NLA_WEAKSIM_OUTPUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(read(&dir.path().join("nested/v.csv")).starts_with("gain_setting,"));
}

#[test]
fn json_report_replays_to_identical_output() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first.json");
    let out = run(&[
        "gain-vs-phi",
        "--phi",
        "0.5:1.5:lin5",
        "--epsilon",
        "0.35",
        "--shots",
        "1000",
        "--seed",
        "9",
        "--rate-scale",
        "1000",
        "--format",
        "json",
        "-o",
        first.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let replayed = run(&["replay", first.to_str().unwrap(), "--format", "json"]);
    assert_eq!(replayed.status.code(), Some(0));
    assert_eq!(stdout(&replayed), read(&first));
}

#[test]
fn visibility_at_gain_four_is_unity() {
    let out = run(&["visibility", "--gain", "4", "--gate", "ideal"]);
    let text = stdout(&out);
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = |name: &str| -> f64 {
        row[header.iter().position(|h| *h == name).unwrap()]
            .parse()
            .unwrap()
    };
    assert!((col("visibility") - 1.0).abs() < 1e-6);
    assert!((col("classical_bound") - 0.5).abs() < 1e-12);
}

#[test]
fn gain_vs_phi_ideal_column_at_third_turn() {
    let out = run(&[
        "gain-vs-phi",
        "--phi",
        "60",
        "--degrees",
        "--inputs",
        "1e-4",
    ]);
    let text = stdout(&out);
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    let gain_ideal: f64 = row[2].parse().unwrap();
    assert!((gain_ideal - 3.0).abs() < 1e-6);
}

#[test]
fn svg_is_self_contained() {
    for command in ["gain-sweep", "gain-vs-phi", "visibility"] {
        let out = run(&[command, "--format", "svg"]);
        assert_eq!(out.status.code(), Some(0));
        let svg = stdout(&out);
        assert!(svg.starts_with("<svg") || svg.starts_with("<?xml"));
        assert!(svg.trim_end().ends_with("</svg>"));
        for external in ["href=", "<image", "url(http", "@import", "<script"] {
            assert!(!svg.contains(external), "{command}: {external}");
        }
    }
}

#[test]
fn help_lists_every_flag_with_units() {
    let expected: [(&str, &[&str]); 4] = [
        (
            "protocol",
            &[
                "--gain",
                "--phi",
                "--degrees",
                "--alpha2",
                "--loss",
                "--seed",
                "--shots",
                "radians",
            ],
        ),
        (
            "gain-sweep",
            &[
                "--gain",
                "--inputs",
                "--epsilon",
                "--format",
                "--output",
                "--cap",
            ],
        ),
        (
            "gain-vs-phi",
            &["--phi", "--inputs", "--epsilon", "--max-basis", "radians"],
        ),
        (
            "visibility",
            &[
                "--gain",
                "--alpha",
                "--phase-points",
                "--calibration",
                "--bias-ratio",
            ],
        ),
    ];
    for (command, flags) in expected {
        let help = stdout(&run(&[command, "--help"]));
        for flag in flags {
            assert!(help.contains(flag), "{command} {flag}");
        }
        for unit in ["(photons)", "(probability)", "(dimensionless"] {
            assert!(help.contains(unit), "{command} {unit}");
        }
    }
}
