use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn input(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("inputs").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_laxforge")).args(args).output().expect("binary runs")
}

fn run_json(args: &[&str]) -> (i32, Value) {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let out = run(&all);
    let v = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("bad json ({e}): {}\n{}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
    });
    (out.status.code().unwrap(), v)
}

fn temp_input(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

fn table<'a>(report: &'a Value, name: &str) -> &'a Value {
    report["tables"].as_array().unwrap().iter().find(|t| t["name"] == name).unwrap()
}

fn path_str(p: &std::path::Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn analyze_reports_one_quadruple() {
    let path = input("complex_quadruple.json");
    let (code, r) = run_json(&["analyze", "--input", path_str(&path)]);
    assert_eq!(code, 0);
    assert_eq!(r["summary"]["eigenvalues"], 4);
    assert_eq!(r["summary"]["quadruples"], 1);
    assert_eq!(r["summary"]["simple"], "true");
    // the spectrum of this P Γ⁻¹ is {±1 ± 2i}
    let mut found: Vec<(f64, f64)> = table(&r, "spectrum")["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|row| (row[1].as_f64().unwrap(), row[2].as_f64().unwrap()))
        .collect();
    found.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let want = [(-1.0, -2.0), (-1.0, 2.0), (1.0, -2.0), (1.0, 2.0)];
    for ((re, im), (wr, wi)) in found.iter().zip(want) {
        assert!((re - wr).abs() < 1e-10 && (im - wi).abs() < 1e-10, "{found:?}");
    }
    for row in table(&r, "spectrum")["rows"].as_array().unwrap() {
        assert_eq!(row[5], 2, "V_lambda is two-dimensional");
    }
}

#[test]
fn integrals_are_multiples_of_h1_and_h2() {
    let path = input("complex_quadruple.json");
    let (code, r) = run_json(&["integrals", "--input", path_str(&path)]);
    assert_eq!(code, 0);
    assert_eq!(r["summary"]["real_integrals"], 2);
    let rows = table(&r, "integrals")["rows"].as_array().unwrap();
    let entries = |prefix: &str| -> Vec<((u64, u64), f64)> {
        rows.iter()
            .filter(|row| row[0].as_str().unwrap().starts_with(prefix))
            .map(|row| ((row[1].as_u64().unwrap(), row[2].as_u64().unwrap()), row[3].as_f64().unwrap()))
            .filter(|(_, v)| v.abs() > 1e-12)
            .collect()
    };
    // H1 = x1x2 + x3x4 and H2 = x1x4 − x2x3 as upper-triangle entries of S
    let re = entries("Re ");
    let im = entries("Im ");
    assert_eq!(re.iter().map(|e| e.0).collect::<Vec<_>>(), [(0, 1), (2, 3)]);
    assert!((re[0].1 - re[1].1).abs() < 1e-12);
    assert_eq!(im.iter().map(|e| e.0).collect::<Vec<_>>(), [(0, 3), (1, 2)]);
    assert!((im[0].1 + im[1].1).abs() < 1e-12);
    let inv = r["checks"].as_array().unwrap().iter().find(|c| c["name"] == "involution residual").unwrap();
    assert!(inv["value"].as_f64().unwrap() < 1e-10);
}

#[test]
fn normalized_single_integral_is_two_p() {
    let path = input("oscillator.json");
    let (code, r) = run_json(&["integrals", "--input", path_str(&path)]);
    assert_eq!(code, 0);
    // P = [[2, 0.5], [0.5, 1]]
    let want = [((0, 0), 4.0), ((0, 1), 1.0), ((1, 1), 2.0)];
    let rows: Vec<&Value> =
        table(&r, "integrals")["rows"].as_array().unwrap().iter().filter(|row| row[0] == "normalized").collect();
    assert_eq!(rows.len(), 3);
    for (row, ((i, j), v)) in rows.iter().zip(want) {
        assert_eq!((row[1].as_u64().unwrap(), row[2].as_u64().unwrap()), (i, j));
        assert!((row[3].as_f64().unwrap() - v).abs() < 1e-12);
        assert!(row[4].as_f64().unwrap().abs() < 1e-12);
    }
}

#[test]
fn verify_passes_on_sample_inputs() {
    for name in ["complex_quadruple.json", "oscillator.json", "coupled.json"] {
        let path = input(name);
        let (code, r) = run_json(&["verify", "--input", path_str(&path)]);
        assert_eq!(code, 0, "{name}: {r:#}");
        assert_eq!(r["pass"], true);
        for c in r["checks"].as_array().unwrap() {
            assert!(c["tol"].is_number(), "every residual carries its bound");
        }
    }
}

#[test]
fn simulate_csv_has_small_drift() {
    let path = input("complex_quadruple.json");
    let out = run(&["simulate", "--input", path_str(&path), "--times", "0:10:101", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let block = text.split("\n\n").next().unwrap();
    let mut lines = block.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(header[0], "t");
    let drift_cols: Vec<usize> = (0..header.len()).filter(|&k| header[k].starts_with("drift")).collect();
    assert_eq!(drift_cols.len(), 2);
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 101);
    for row in &rows {
        for cell in row {
            // %.15e: one digit, point, fifteen digits, signed two-or-more digit exponent
            let (m, e) = cell.split_once('e').unwrap();
            assert_eq!(m.trim_start_matches('-').len(), 17, "{cell}");
            assert!(e.starts_with('+') || e.starts_with('-'));
            assert!(e.len() >= 3);
        }
        for &k in &drift_cols {
            assert!(row[k].parse::<f64>().unwrap() < 1e-8);
        }
    }
}

#[test]
fn groebner_check_default_passes() {
    let (code, r) = run_json(&["groebner-check"]);
    assert_eq!(code, 0);
    assert_eq!(r["summary"]["p"], "1 2 3 5");
    let m = r["checks"].as_array().unwrap().iter().find(|c| c["name"] == "displayed element lies in the ideal").unwrap();
    assert_eq!(m["pass"], true);
}

#[test]
fn groebner_check_reads_p_from_input() {
    let f = temp_input(r#"{"p": {"rows": 2, "cols": 2, "entries": [1, 0, 0, 1]}}"#);
    let (code, r) = run_json(&["groebner-check", "--input", path_str(f.path())]);
    assert_eq!(code, 0);
    assert_eq!(r["summary"]["p"], "1 0 0 1");
}

#[test]
fn malformed_json_exits_2() {
    let f = temp_input("{\"gamma\": ");
    let out = run(&["analyze", "--input", path_str(f.path())]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("parse error"));
    assert_eq!(run(&["analyze"]).status.code(), Some(2));
    assert_eq!(run(&["analyze", "--input", "/nonexistent/file.json"]).status.code(), Some(2));
}

#[test]
fn asymmetric_p_exits_3() {
    let f = temp_input(
        r#"{"gamma": {"rows": 2, "cols": 2, "entries": [0, 1, -1, 0]},
            "p": {"rows": 2, "cols": 2, "entries": [1, 2, 0, 1]}}"#,
    );
    let out = run(&["analyze", "--input", path_str(f.path())]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn bad_explicit_pair_exits_3() {
    let f = temp_input(
        r#"{"gamma": {"rows": 2, "cols": 2, "entries": [0, 1, -1, 0]},
            "p": {"rows": 2, "cols": 2, "entries": [1, 0, 0, 4]},
            "pairs": [{"lambda": [0, 5], "w": [[1, 0], [0, 0]]}]}"#,
    );
    assert_eq!(run(&["integrals", "--input", path_str(f.path())]).status.code(), Some(3));
}

#[test]
fn repeated_spectrum_needs_force() {
    let path = input("repeated.json");
    let out = run(&["integrals", "--input", path_str(&path)]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--force"));
    let forced = run(&["integrals", "--input", path_str(&path), "--force"]);
    assert_ne!(forced.status.code(), Some(3));
    assert_ne!(forced.status.code(), Some(2));
}

#[test]
fn tiny_tolerance_fails_with_exit_1() {
    let path = input("complex_quadruple.json");
    let out = run(&["simulate", "--input", path_str(&path), "--tol", "1e-300"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL"));
}

#[test]
fn output_is_deterministic_per_seed() {
    let path = input("coupled.json");
    for format in ["json", "csv", "text"] {
        let a = run(&["simulate", "--input", path_str(&path), "--seed", "7", "--format", format]);
        let b = run(&["simulate", "--input", path_str(&path), "--seed", "7", "--format", format]);
        assert_eq!(a.stdout, b.stdout);
    }
    let a = run(&["simulate", "--input", path_str(&path), "--seed", "7"]);
    let c = run(&["simulate", "--input", path_str(&path), "--seed", "8"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn bad_times_and_tolerances_are_rejected() {
    let path = input("oscillator.json");
    for extra in [["--times", "1:0:5"], ["--times", "0:1"], ["--tol", "-1"], ["--pairing-tol", "0"]] {
        let mut args = vec!["simulate", "--input", path_str(&path)];
        args.extend(extra);
        assert_eq!(run(&args).status.code(), Some(2), "{extra:?}");
    }
}
