use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn teichflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_teichflow")).args(args).output().expect("spawn teichflow")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

#[test]
fn distance_prints_closed_form() {
    let o = teichflow(&["distance", "--tau1", "0,1", "--tau2", "0,2"]);
    assert_eq!(code(&o), 0);
    assert_eq!(String::from_utf8_lossy(&o.stdout).trim(), "0.34657359028");
}

#[test]
fn distance_with_farey_and_negative_real_part() {
    let o = teichflow(&["distance", "--tau1", "-0.3,1.1", "--tau2", "0.2,0.9", "--farey"]);
    assert_eq!(code(&o), 0);
    let out = String::from_utf8_lossy(&o.stdout);
    let mut lines = out.lines();
    let closed: f64 = lines.next().unwrap().parse().unwrap();
    let farey: f64 = lines.next().unwrap().split_whitespace().nth(1).unwrap().parse().unwrap();
    assert!((closed - farey).abs() <= 1e-9 * closed);
}

#[test]
fn bad_point_is_a_config_error() {
    let o = teichflow(&["distance", "--tau1", "0,-1", "--tau2", "0,2"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn unknown_flag_exits_one() {
    assert_eq!(code(&teichflow(&["earthquake", "--bogus"])), 1);
    assert_eq!(code(&teichflow(&[])), 1);
}

#[test]
fn help_exits_zero() {
    let o = teichflow(&["--help"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8_lossy(&o.stdout);
    for sub in ["earthquake", "horocycle", "distance", "boundary-trace", "quasiconvex", "selftest", "plot"] {
        assert!(text.contains(sub), "{sub} missing from help");
    }
}

const CONFIG: &str = r#"{
  "backend": "torus",
  "flow": "earthquake",
  "base": {"torus": {"re": 0.0, "im": 1.0}},
  "direction": "1/0",
  "depth": 4,
  "schedule": {"t0": 1.0, "ratio": 2.0, "count": 11},
  "tolerances": {"limit_tol": 0.01, "window": 3}
}"#;

#[test]
fn earthquake_writes_trace_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, CONFIG).unwrap();
    let csv = dir.path().join("trace.csv");
    let rep = dir.path().join("report.json");
    let o = teichflow(&[
        "earthquake",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        csv.to_str().unwrap(),
        "--report",
        rep.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 12);
    assert!(text.starts_with("t,"));
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(&rep).unwrap()).unwrap();
    assert!(json.get("rate").is_some());
}

#[test]
fn missing_config_file_exits_one() {
    let o = teichflow(&["earthquake", "--config", "/nonexistent/cfg.json"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn boundary_trace_inconclusive_exits_three() {
    // Two samples cannot fill a window of three.
    let o = teichflow(&["boundary-trace", "--count", "2"]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn horocycle_and_quasiconvex_run() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("h.csv");
    let o = teichflow(&["horocycle", "--count", "9", "--out", csv.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let o = teichflow(&["quasiconvex", "--input", csv.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let out = String::from_utf8_lossy(&o.stdout);
    assert!(out.starts_with("slope,K\n"));
    for line in out.lines().skip(1) {
        let k: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!(k >= 1.0);
    }
}

#[test]
fn plot_rejects_malformed_input() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.csv");
    fs::write(&empty, "").unwrap();
    let svg = dir.path().join("p.svg");
    let o = teichflow(&["plot", "--input", empty.to_str().unwrap(), "--out", svg.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(!svg.exists());
}

#[test]
fn plot_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, CONFIG).unwrap();
    let csv = dir.path().join("trace.csv");
    assert_eq!(code(&teichflow(&["earthquake", "--config", cfg.to_str().unwrap(), "--out", csv.to_str().unwrap()])), 0);
    let render = |name: &str| {
        let svg = dir.path().join(name);
        assert_eq!(code(&teichflow(&["plot", "--input", csv.to_str().unwrap(), "--out", svg.to_str().unwrap()])), 0);
        fs::read(svg).unwrap()
    };
    assert_eq!(render("a.svg"), render("b.svg"));
}

fn selftest(dir: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["selftest", "--out", dir.to_str().unwrap()];
    args.extend_from_slice(extra);
    teichflow(&args)
}

#[test]
fn selftest_table_and_artifacts() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let o1 = selftest(a.path(), &["--threads", "1"]);
    let o2 = selftest(b.path(), &["--threads", "4"]);
    let table = String::from_utf8_lossy(&o1.stdout);
    let rows: Vec<&str> = table.lines().filter(|l| l.starts_with("criterion")).collect();
    assert_eq!(rows.len(), 11);
    let all_pass = rows.iter().all(|r| r.contains(" PASS "));
    assert_eq!(code(&o1) == 0, all_pass);
    assert_eq!(code(&o1), if all_pass { 0 } else { 2 });
    let mut names: Vec<_> = fs::read_dir(a.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert_eq!(names.len(), 15);
    for name in names {
        assert_eq!(fs::read(a.path().join(&name)).unwrap(), fs::read(b.path().join(&name)).unwrap(), "{name:?}");
    }
    assert_eq!(code(&o2), code(&o1));
}

#[test]
fn selftest_with_impossible_tolerance_fails() {
    let dir = tempfile::tempdir().unwrap();
    let o = selftest(dir.path(), &["--eps-tol", "1e-15"]);
    assert_eq!(code(&o), 2);
    let table = String::from_utf8_lossy(&o.stdout);
    assert!(table.lines().any(|l| l.starts_with("criterion  2 FAIL")));
}
