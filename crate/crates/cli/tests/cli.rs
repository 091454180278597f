use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_stabforge"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn json_out(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_str(stdout(&out).trim()).unwrap()
}

#[test]
fn subgroup_rows() {
    for (spec, rows) in [("Z2", 2), ("Z4", 3), ("Z2xZ2", 5)] {
        let out = run(&["subgroups", "--group", spec, "--format", "csv"]);
        assert!(out.status.success());
        assert_eq!(stdout(&out).lines().count(), rows + 1, "{spec}");
    }
    let v = json_out(&["subgroups", "--group", "Z4", "--format", "json"]);
    let list = v["subgroups"].as_array().unwrap();
    let ch2: Vec<u64> = list.iter().map(|h| h["ch2"].as_u64().unwrap()).collect();
    assert_eq!(ch2, vec![1, 4, 16]);
}

#[test]
fn bad_group_spec_exits_2() {
    assert_eq!(run(&["subgroups", "--group", "Zx"]).status.code(), Some(2));
    assert_eq!(run(&["states", "--group", "Z0"]).status.code(), Some(2));
    assert_eq!(run(&["states", "--group", "Z2", "--tolerance", "0"]).status.code(), Some(2));
}

#[test]
fn state_counts() {
    for (spec, n) in [("Z2", "6"), ("Z3", "12"), ("Z4", "28"), ("Z2xZ2", "60")] {
        let out = run(&["states", "--group", spec]);
        assert!(out.status.success());
        assert_eq!(stdout(&out).trim(), n, "{spec}");
    }
}

#[test]
fn bound_exceeded_exits_3() {
    let out = run(&["states", "--group", "Z4xZ4xZ4", "--bound", "16"]);
    assert_eq!(out.status.code(), Some(3));
    let out = run(&["subgroups", "--group", "Z8", "--bound", "4"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn enumerate_lines_are_distinct_records() {
    let out = run(&["states", "--group", "Z2", "enumerate"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 6);
    let mut amps: Vec<String> = lines
        .iter()
        .map(|l| {
            let v: Value = serde_json::from_str(l).unwrap();
            assert!(v["group"]["K"].is_object());
            v["wavefunction"]["amplitudes"].to_string()
        })
        .collect();
    amps.sort();
    amps.dedup();
    assert_eq!(amps.len(), 6);
}

#[test]
fn output_flag_writes_file() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("count.txt");
    let out = run(&["states", "--group", "Z3", "--output", p(&path)]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap().trim(), "12");
}

#[test]
fn plus_state_to_group() {
    let dir = TempDir::new().unwrap();
    let plus = write(&dir, "plus.json", r#"{"group":"Z2","amplitudes":[[1,0],[1,0]]}"#);
    let v = json_out(&["stab", "to-group", p(&plus), "--format", "json"]);
    let elements: Vec<String> =
        v["K"]["elements"].as_array().unwrap().iter().map(|e| e.to_string()).collect();
    assert_eq!(elements, vec![r#"["(0)","(0)"]"#, r#"["(1)","(0)"]"#]);
    assert_eq!(v["alpha"], serde_json::json!([0, 0]));
}

#[test]
fn minus_z_group_to_state() {
    let dir = TempDir::new().unwrap();
    let g = write(
        &dir,
        "g.json",
        r#"{"group":"Z2","K":{"H":[],"orders":[],"beta":[],"elements":[["(0)","(0)"],["(0)","(1)"]]},"alpha":[0,2]}"#,
    );
    let v = json_out(&["stab", "to-state", p(&g), "--format", "json"]);
    let amps = v["wavefunction"]["amplitudes"].as_array().unwrap();
    let mags: Vec<f64> = amps
        .iter()
        .map(|a| a[0].as_f64().unwrap().hypot(a[1].as_f64().unwrap()))
        .collect();
    assert!(mags[0].abs() < 1e-12 && (mags[1] - 1.0).abs() < 1e-12);
}

#[test]
fn non_stabilizer_state_exits_4() {
    let dir = TempDir::new().unwrap();
    let (s, c) = (std::f64::consts::PI / 5.0).sin_cos();
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let body = format!(r#"{{"group":"Z2","amplitudes":[[{r},0],[{},{}]]}}"#, r * c, r * s);
    let psi = write(&dir, "psi.json", &body);
    assert_eq!(run(&["stab", "to-group", p(&psi)]).status.code(), Some(4));
}

#[test]
fn invalid_group_inputs() {
    let dir = TempDir::new().unwrap();
    let bad = write(
        &dir,
        "bad.json",
        r#"{"group":"Z2","K":{"H":["(1)"],"orders":[2],"beta":[[1]],"elements":[["(0)","(0)"],["(1)","(1)"]]},"alpha":[0,0]}"#,
    );
    assert_eq!(run(&["stab", "to-state", p(&bad)]).status.code(), Some(5));
    let garbage = write(&dir, "garbage.json", "{not json");
    assert_eq!(run(&["stab", "to-state", p(&garbage)]).status.code(), Some(2));
    let missing = dir.path().join("missing.json");
    assert_eq!(run(&["stab", "to-group", p(&missing)]).status.code(), Some(2));
}

struct Fixture {
    _dir: TempDir,
    d0: PathBuf,
    d1: PathBuf,
    plus: PathBuf,
    mixed: PathBuf,
}

fn fixture() -> Fixture {
    let dir = TempDir::new().unwrap();
    Fixture {
        d0: write(&dir, "d0.json", r#"{"group":"Z2","amplitudes":[[1,0],[0,0]]}"#),
        d1: write(&dir, "d1.json", r#"{"group":"Z2","amplitudes":[[0,0],[1,0]]}"#),
        plus: write(&dir, "plus.json", r#"{"group":"Z2","amplitudes":[[1,0],[1,0]]}"#),
        mixed: write(&dir, "mixed.json", r#"{"group":"Z2","matrix":[[[0.5,0],[0,0]],[[0,0],[0.5,0]]]}"#),
        _dir: dir,
    }
}

#[test]
fn wehrl_min_reports_witness() {
    let f = fixture();
    let v = json_out(&["wehrl", "min", "--window", p(&f.d0), "--state", p(&f.d1), "--format", "json"]);
    assert_eq!(v["equality"], Value::Bool(true));
    assert!(v["entropy"].as_f64().unwrap().abs() < 1e-12);
    assert_eq!(v["witness"]["z"], "[(1), (0)]");
    assert_eq!(v["witness"]["support_size"], 2);

    let v = json_out(&["wehrl", "min", "--window", p(&f.d0), "--state", p(&f.plus), "--format", "json"]);
    assert_eq!(v["equality"], Value::Bool(false));
    assert!(v["witness"].is_null());
}

#[test]
fn wehrl_berezin_maximally_mixed() {
    let f = fixture();
    let v = json_out(&["wehrl", "berezin", "--window", p(&f.d0), "--density", p(&f.mixed), "--format", "json"]);
    assert!(v["gap"].as_f64().unwrap().abs() < 1e-12);
    assert!((v["trace_g"].as_f64().unwrap() - 2f64.ln()).abs() < 1e-12);
}

#[test]
fn wehrl_max_and_fourier() {
    let f = fixture();
    let v = json_out(&["wehrl", "max", "--window", p(&f.d0), "--state", p(&f.plus), "--format", "json"]);
    assert_eq!(v["equality"], Value::Bool(true));
    assert_eq!(v["overlap_trivial"], Value::Bool(true));
    let v = json_out(&["wehrl", "max", "--window", p(&f.d0), "--state", p(&f.d0), "--format", "json"]);
    assert_eq!(v["equality"], Value::Bool(false));

    let v = json_out(&["wehrl", "fourier", "--window", p(&f.plus), "--state", p(&f.d1), "--format", "json"]);
    assert!(v["residual"].as_f64().unwrap() < 1e-8);
}

#[test]
fn wehrl_requires_one_state_source() {
    let f = fixture();
    let out = run(&["wehrl", "min", "--window", p(&f.d0)]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["wehrl", "min", "--window", p(&f.d0), "--state", p(&f.d1), "--g", "t^2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_csv_is_seeded() {
    let args = ["wehrl", "sweep", "--group", "Z2", "--random", "3", "--format", "csv", "--seed", "9"];
    let a = stdout(&run(&args));
    let b = stdout(&run(&args));
    assert_eq!(a, b);
    let mut lines = a.lines();
    assert_eq!(lines.next(), Some("state-id,G-id,entropy,gap"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), (6 + 3) * 3);
    for row in rows {
        let cols: Vec<&str> = row.split(',').collect();
        let gap: f64 = cols[3].parse().unwrap();
        assert!(gap >= -1e-9, "{row}");
        if cols[0].starts_with("rand") {
            assert!(gap > 1e-6, "{row}");
        }
    }
}

#[test]
fn selftest_passes_and_json_is_deterministic() {
    let out = run(&["selftest", "Z2", "Z3"]);
    assert!(out.status.success(), "{}", stdout(&out));
    assert!(stdout(&out).lines().last().unwrap().starts_with("selftest PASS"));

    let a = run(&["selftest", "Z2", "Z2xZ2", "--format", "json", "--seed", "4"]);
    let b = run(&["selftest", "Z2", "Z2xZ2", "--format", "json", "--seed", "4"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    for line in stdout(&a).lines() {
        let v: Value = serde_json::from_str(line).unwrap();
        assert_ne!(v["status"], "FAIL");
    }
}

#[test]
fn selftest_skips_large_groups() {
    let out = run(&["selftest", "Z16", "--format", "csv", "--cases", "5"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("SKIP"));
}
