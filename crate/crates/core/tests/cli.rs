use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use causal_work::instrument::{alpha_family_instruments, saturating_instruments};
use causal_work::io::{instrument_to_value, operator_to_value, OperatorForm};
use causal_work::operator::Operator;
use causal_work::process::{alpha_family_operator, ALPHA_MAX};
use tempfile::TempDir;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_causal-work"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write(dir: &Path, name: &str, value: serde_json::Value) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, value.to_string()).unwrap();
    p
}

fn process_file(dir: &Path, name: &str, w: &Operator, form: OperatorForm) -> String {
    write(dir, name, operator_to_value(w, form).unwrap())
        .display()
        .to_string()
}

#[test]
fn validate_reports_positivity_failure() {
    let dir = TempDir::new().unwrap();
    let bad = process_file(dir.path(), "w.json", &alpha_family_operator(0.9), OperatorForm::Dense);
    let o = bin(&["validate", &bad]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(
        text.contains("positivity") && text.contains("FAIL") && text.contains("INVALID"),
        "{text}"
    );

    let good = process_file(dir.path(), "ok.json", &alpha_family_operator(0.5), OperatorForm::Pauli);
    let o = bin(&["--json", "validate", &good]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["valid"], true);
    assert_eq!(v["kind"], "process");
}

#[test]
fn validate_instruments() {
    let dir = TempDir::new().unwrap();
    let (a, _) = saturating_instruments();
    let f = write(
        dir.path(),
        "a.json",
        instrument_to_value(&a, OperatorForm::Pauli).unwrap(),
    );
    let o = bin(&["validate", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));

    let broken = a.map_ops(|m| m.scale(1.5));
    let f = write(
        dir.path(),
        "bad.json",
        instrument_to_value(&broken, OperatorForm::Dense).unwrap(),
    );
    assert_eq!(bin(&["validate", f.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn input_errors_have_distinct_messages() {
    let dir = TempDir::new().unwrap();
    let junk = dir.path().join("junk.json");
    std::fs::write(&junk, "{not json").unwrap();
    let o = bin(&["validate", junk.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("malformed input"), "{}", stderr(&o));

    let o = bin(&["validate", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("cannot read"));

    let o = bin(&["teleport"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("unrecognized subcommand"));

    let o = bin(&["sweep", "--grid", "0:1:3", "--bogus"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("unexpected argument"));

    let o = bin(&["sweep", "--grid", "0:1"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("a:b:n"));
}

#[test]
fn game_with_reports() {
    let dir = TempDir::new().unwrap();
    let w = process_file(
        dir.path(),
        "w.json",
        &alpha_family_operator(ALPHA_MAX),
        OperatorForm::Pauli,
    );
    let (a, b) = saturating_instruments();
    let fa = write(
        dir.path(),
        "a.json",
        instrument_to_value(&a, OperatorForm::Dense).unwrap(),
    );
    let fb = write(
        dir.path(),
        "b.json",
        instrument_to_value(&b, OperatorForm::Dense).unwrap(),
    );
    let (fa, fb) = (fa.to_str().unwrap(), fb.to_str().unwrap());

    let o = bin(&["--json", "game", &w, fa, fb, "--thermo", "--info", "--eps", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["stats"]["p_succ"], 0.5);
    assert_eq!(v["thermo"]["work"], 1.0);
    assert!(v["info"]["i_red_blue"].is_number());

    let o = bin(&["game", &w, fa, fb]);
    assert!(stdout(&o).contains("p_succ  0.500000000"));

    // parties swapped
    let o = bin(&["game", &w, fb, fa]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("expected A"));

    // instrument where a process belongs
    let o = bin(&["game", fa, fa, fb]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("expected a process matrix"));
}

#[test]
fn scenario_output() {
    let o = bin(&["scenario", "saturating", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(
        text.contains(r#""p_succ":0.5"#) && text.contains(r#""p2":0.0"#),
        "{text}"
    );

    let o = bin(&["scenario", "alpha-family", "--alpha", "0.25"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("all expected values match"));

    let o = bin(&["scenario", "alpha-family", "--alpha", "0.75"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("alpha"));
}

#[test]
fn sweep_writes_csv() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("sweep.csv");
    let o = bin(&[
        "sweep",
        "--grid",
        "0:0.7071067811865476:5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(
        lines[0],
        "alpha,p_succ,p2,gap,E_avg,w_avg,S_red,H_AB,I_IO,I_redblue,bound"
    );
    assert_eq!(lines.len(), 6);
    for line in &lines[1..] {
        let cells: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(cells.len(), 11);
        assert!((cells[3] - cells[0] / 4.0).abs() < 2e-9);
    }
    let again = bin(&["sweep", "--grid", "0:0.7071067811865476:5"]);
    assert_eq!(stdout(&again), csv);
}

#[test]
fn bound_search_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let w = process_file(
        dir.path(),
        "w.json",
        &alpha_family_operator(ALPHA_MAX),
        OperatorForm::Pauli,
    );
    let args = [
        "--json",
        "bound-search",
        &w,
        "--samples",
        "300",
        "--seed",
        "11",
        "--refine",
        "--refine-steps",
        "50",
    ];
    let first = bin(&args);
    let second = bin(&args);
    assert_eq!(first.status.code(), Some(0), "{}", stderr(&first));
    assert_eq!(first.stdout, second.stdout);
    let v: serde_json::Value = serde_json::from_slice(&first.stdout).unwrap();
    assert!(v["best_gap"].as_f64().unwrap() <= 0.5 + 1e-9);
    assert_eq!(v["exceeds_bound"], false);

    let text = bin(&["bound-search", &w, "--samples", "100", "--seed", "11"]);
    assert!(stdout(&text).contains("bound holds"));
    assert_eq!(
        bin(&["bound-search", &w, "--samples", "0", "--seed", "1"])
            .status
            .code(),
        Some(3)
    );
}

#[test]
fn bound_search_rejects_invalid_process() {
    let dir = TempDir::new().unwrap();
    let w = process_file(dir.path(), "w.json", &alpha_family_operator(1.0), OperatorForm::Dense);
    let o = bin(&["bound-search", &w, "--samples", "10", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("positivity"));
}

#[test]
fn local_only_game_from_files() {
    let dir = TempDir::new().unwrap();
    let w = process_file(
        dir.path(),
        "w.json",
        &Operator::identity(&[2, 2, 2, 2]).scale(0.25),
        OperatorForm::Pauli,
    );
    let (a, b) = alpha_family_instruments();
    let fa = write(
        dir.path(),
        "a.json",
        instrument_to_value(&a, OperatorForm::Pauli).unwrap(),
    );
    let fb = write(
        dir.path(),
        "b.json",
        instrument_to_value(&b, OperatorForm::Pauli).unwrap(),
    );
    let o = bin(&[
        "--json",
        "game",
        &w,
        fa.to_str().unwrap(),
        fb.to_str().unwrap(),
        "--thermo",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["thermo"]["work"], 0.0);
    assert_eq!(v["stats"]["gap"], 0.0);
}
