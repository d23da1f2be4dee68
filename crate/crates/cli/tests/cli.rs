use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rigidity"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn triangle(dir: &Path) -> PathBuf {
    write(dir, "triangle.json", r#"{"n": 2, "points": [[-0.5, 0], [0, 0.1], [0.5, 0]]}"#)
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn remez_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let tri = triangle(dir.path());
    let out = run(&["remez", "--input", tri.to_str().unwrap(), "--oracle"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!((v["lower"].as_f64().unwrap() - 21.0).abs() < 1e-6);
    assert!((v["oracle"].as_f64().unwrap() - 21.0).abs() < 1e-9);

    let line = write(dir.path(), "line.csv", "-0.5,-0.5\n0,0\n0.5,0.5\n0.2,0.2\n");
    let out = run(&["remez", "--input", line.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["status"], "infinite");

    let out = run(&["remez", "--input", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn malformed_csv_names_line_and_field() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.csv", "0.1,0.2\n0.3,zz\n");
    let out = run(&["remez", "--input", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2") && err.contains("field 2"), "{err}");
}

#[test]
fn rigidity_reports() {
    let dir = tempfile::tempdir().unwrap();
    let line = write(dir.path(), "line.csv", "-0.5,-0.5\n0,0\n0.5,0.5\n");
    let out = run(&["rigidity", "--input", line.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["degenerate"], true);
    assert_eq!(v["upper"]["construction"]["value"].as_f64(), Some(0.0));

    let tri = triangle(dir.path());
    let out = run(&["rigidity", "--input", tri.to_str().unwrap(), "--degree", "0..2", "--oracle"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let reports = v.as_array().unwrap();
    assert_eq!(reports.len(), 3);
    assert_eq!(reports[2]["degenerate"], true);
    let lower = reports[1]["lower"]["main1_oracle"]["value"].as_f64().unwrap();
    assert!((lower - 1.0 / 21.0).abs() < 1e-9);
    assert_eq!(reports[1]["conventions"]["derivative_norm"], "distinct-multi-indices");
}

#[test]
fn omega_sequences() {
    let dir = tempfile::tempdir().unwrap();
    let mut grid = String::new();
    for i in 0..5 {
        for j in 0..5 {
            grid.push_str(&format!("{},{}\n", -0.6 + 0.3 * i as f64, -0.6 + 0.3 * j as f64));
        }
    }
    let g = write(dir.path(), "grid.csv", &grid);
    let out = run(&["omega", "--input", g.to_str().unwrap(), "--degree", "1..4"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["non_increasing"], true);
    assert_eq!(v["results"].as_array().unwrap().len(), 4);

    let single = write(dir.path(), "one.csv", "0.1,0.2\n");
    let out = run(&["omega", "--input", single.to_str().unwrap(), "--trace"]);
    let v = json(&out);
    assert!(v["certified"].as_f64().unwrap() <= 0.0);
    assert!(!v["trace"].as_array().unwrap().is_empty());
}

#[test]
fn family_sweeps() {
    let out = run(&["family", "--family", "triangle", "--values", "0.5,0.2,0.1,0.05"]);
    assert_eq!(out.status.code(), Some(0));
    let mut rdr = csv::Reader::from_reader(&out.stdout[..]);
    let headers = rdr.headers().unwrap().clone();
    let col = headers.iter().position(|h| h == "h_r_over_2").unwrap();
    for rec in rdr.records() {
        let rec = rec.unwrap();
        let h: f64 = rec[1].parse().unwrap();
        let v: f64 = rec[col].parse().unwrap();
        assert!((v - 1.0).abs() <= h);
    }

    let out = run(&["family", "--family", "grid", "--dim", "1", "--values", "0.2,0.1,0.05"]);
    assert_eq!(out.status.code(), Some(0));
    let mut rdr = csv::Reader::from_reader(&out.stdout[..]);
    let col = rdr.headers().unwrap().iter().position(|h| h == "fitted_slope").unwrap();
    let rec = rdr.records().next().unwrap().unwrap();
    let slope: f64 = rec[col].parse().unwrap();
    assert!((slope - 2.0).abs() <= 0.2, "{slope}");

    let out = run(&["family", "--family", "grid", "--values"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn verify_replays_witnesses() {
    let dir = tempfile::tempdir().unwrap();
    let tri = triangle(dir.path());
    let w = dir.path().join("w.json");
    let out = run(&["rigidity", "--input", tri.to_str().unwrap(), "--witness-out", w.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let out = run(&["verify", "--input", tri.to_str().unwrap(), "--witness", w.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    let mut file: Value = serde_json::from_str(&fs::read_to_string(&w).unwrap()).unwrap();
    let a = file["function"]["bumps"][1]["amplitude"].as_f64().unwrap();
    file["function"]["bumps"][1]["amplitude"] = (a + 1e-3).into();
    let bad = write(dir.path(), "bad.json", &file.to_string());
    let out = run(&["verify", "--input", tri.to_str().unwrap(), "--witness", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("exceeds"));

    let other = write(dir.path(), "other.json", r#"{"n": 2, "points": [[-0.5, 0], [0, 0.3], [0.5, 0]]}"#);
    let out = run(&["verify", "--input", other.to_str().unwrap(), "--witness", w.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
}

#[test]
fn identical_runs_give_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let tri = triangle(dir.path());
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let out = run(&["rigidity", "--input", tri.to_str().unwrap(), "--oracle", "--output", p.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}
