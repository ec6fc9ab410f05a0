use std::path::{Path, PathBuf};

use rabi_ladder::cli::output::SimulationOutput;
use rabi_ladder::cli::{run, EXIT_NOT_RESONANT, EXIT_OK, EXIT_USAGE};

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("scenarios")
        .join(name)
}

fn invoke(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("rabi-ladder").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let p = dir.join("scenario.json");
    std::fs::write(&p, body).unwrap();
    p
}

fn parse_csv(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(|f| f.parse().unwrap()).collect())
        .collect()
}

#[test]
fn detuned_scenario_exits_3_and_names_the_level() {
    let (code, out, err) = invoke(&[
        "simulate",
        "--config",
        scenario("detuned.json").to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_NOT_RESONANT);
    assert!(out.is_empty());
    let row = err
        .lines()
        .find(|l| l.starts_with("2\t"))
        .expect("row for k = 2");
    let delta: f64 = row.split('\t').nth(1).unwrap().parse().unwrap();
    assert!((delta + 0.1).abs() < 1e-12);
}

#[test]
fn three_level_transfer_ends_in_top_level() {
    let (code, out, _) = invoke(&[
        "simulate",
        "--config",
        scenario("three_level_transfer.json").to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK);
    let rows = parse_csv(&out);
    assert_eq!(rows.len(), 2);
    let last = &rows[1];
    assert!(last[1].abs() < 1e-12 && last[2].abs() < 1e-12 && (last[3] - 1.0).abs() < 1e-12);
}

#[test]
fn single_step_grid_gives_one_row() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"n": 2, "energies": [0, 1], "couplings": [0.5], "time": {"start": 1.5, "stop": 9, "steps": 1}}"#,
    );
    let (code, out, _) = invoke(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    let rows = parse_csv(&out);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][0], 1.5);
}

#[test]
fn output_file_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("four.csv");
    let (code, out, _) = invoke(&[
        "simulate",
        "--config",
        scenario("four_level.json").to_str().unwrap(),
        "--out",
        target.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("n=4 kernel=closed_form rows=201 "));
    let golden = std::fs::read_to_string(scenario("four_level.golden.csv")).unwrap();
    let written = std::fs::read_to_string(&target).unwrap();
    assert_eq!(written.lines().next(), golden.lines().next());
    for (a, b) in parse_csv(&written).iter().zip(parse_csv(&golden)) {
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
    }
}

#[test]
fn kernel_override_and_propagator_columns() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"n": 3, "energies": [0, 1, 1.8], "couplings": [0.4, 0.9],
            "time": {"start": 0, "stop": 3, "steps": 4},
            "output": {"include_propagator": true}}"#,
    );
    let (code, closed, _) = invoke(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    let (code, spectral, err) = invoke(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--kernel",
        "spectral",
    ]);
    assert_eq!(code, EXIT_OK);
    assert!(err.contains("kernel=spectral"));
    assert!(closed.lines().next().unwrap().ends_with("reU22,imU22"));
    for (a, b) in parse_csv(&closed).iter().zip(parse_csv(&spectral)) {
        assert_eq!(a.len(), 1 + 3 + 18);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
    }
}

#[test]
fn json_output_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"n": 4, "energies": [0, 1, 1.8, 2.4], "couplings": [1, 1, 1],
            "time": {"start": 0, "stop": 2, "steps": 5},
            "output": {"format": "json", "include_propagator": true}}"#,
    );
    let (code, out, _) = invoke(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    let doc: SimulationOutput = serde_json::from_str(&out).unwrap();
    assert_eq!(doc.meta.n, 4);
    assert_eq!(doc.rows.len(), 5);
    assert_eq!(doc.rows[4].t, 2.0);
    assert_eq!(doc.rows[0].propagator.as_ref().unwrap().len(), 16);
    let again: SimulationOutput =
        serde_json::from_str(&serde_json::to_string(&doc).unwrap()).unwrap();
    assert_eq!(again, doc);
}

#[test]
fn config_errors_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (
            r#"{"n": 3, "energies": [0, 1], "couplings": [1, 1], "time": {"start": 0, "stop": 1, "steps": 2}}"#,
            "energies",
        ),
        (
            r#"{"n": 2, "energies": [0, 1], "couplings": [-1], "time": {"start": 0, "stop": 1, "steps": 2}}"#,
            "negative",
        ),
        (
            r#"{"n": 2, "energies": [0, 1], "couplings": [1], "tme": {}}"#,
            "tme",
        ),
        (
            r#"{"n": 2, "energies": [0, 1], "couplings": [1], "initial_level": 2, "time": {"start": 0, "stop": 1, "steps": 2}}"#,
            "initial_level",
        ),
        (
            r#"{"n": 2, "energies": [0, 1], "couplings": [1], "time": {"start": 0, "stop": 1, "steps": 0}}"#,
            "steps",
        ),
    ];
    for (body, needle) in cases {
        let cfg = write_config(dir.path(), body);
        let (code, _, err) = invoke(&["simulate", "--config", cfg.to_str().unwrap()]);
        assert_eq!(code, EXIT_USAGE, "{body}");
        assert!(err.contains(needle), "{err} lacks {needle}");
    }
    let (code, _, _) = invoke(&[
        "simulate",
        "--config",
        dir.path().join("missing.json").to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_USAGE);
}

#[test]
fn eigs_reports_closed_and_spectral() {
    let (code, out, _) = invoke(&["eigs", "1", "1", "1"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("1.6180339887"));
    assert!(out.contains("0.6180339887"));
    assert!(out.contains("A = 5.0000000000  B = 1.0000000000"));

    let (code, out, _) = invoke(&["eigs", "1", "0", "1"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("DEGENERATE"));
    assert!(out.contains("spectral only"));

    let (code, out, _) = invoke(&["eigs", "1", "1", "1", "1", "1", "1"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("no closed form for n = 7"));
    assert!(!out.contains("-0.0000000000"));

    let (code, _, _) = invoke(&["eigs", "1", "-2"]);
    assert_eq!(code, EXIT_USAGE);
}

#[test]
fn verify_is_deterministic_and_validates_draws() {
    let a = invoke(&["verify", "--seed", "3", "--draws", "30"]);
    let b = invoke(&["verify", "--seed", "3", "--draws", "30"]);
    assert_eq!(a.0, EXIT_OK, "{}", a.1);
    assert_eq!(a.1, b.1);
    assert!(a
        .1
        .lines()
        .all(|l| l.starts_with("PASS ") || l.starts_with("verify seed=3 ")));

    let (code, _, err) = invoke(&["verify", "--draws", "0"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("draws"));
}

#[test]
fn unknown_subcommand_is_usage_error() {
    assert_eq!(invoke(&["frobnicate"]).0, EXIT_USAGE);
}
