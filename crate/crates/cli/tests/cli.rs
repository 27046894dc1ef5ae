use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hyperlab"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("cli");
    fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn write_config(name: &str, body: &str) -> PathBuf {
    let p = scratch(name);
    fs::write(&p, body).unwrap();
    p
}

fn analyze(name: &str, body: &str) -> (Output, Option<Value>) {
    let cfg = write_config(&format!("{name}.json"), body);
    let out = scratch(&format!("{name}.report.json"));
    let _ = fs::remove_file(&out);
    let o = run(&[
        "analyze",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    let report = fs::read_to_string(&out)
        .ok()
        .map(|s| serde_json::from_str(&s).unwrap());
    (o, report)
}

fn error_of(o: &Output) -> Value {
    let line = String::from_utf8_lossy(&o.stdout);
    serde_json::from_str::<Value>(line.trim()).expect("error object on stdout")["error"].clone()
}

const SKYRME_POINT: &str = r#"{"dims":{"m_plus_1":4,"n":3},"dphi":{"lambdas":[1.5,0.5,2,0]},"model":{"name":"skyrme","c1":0.5,"c2":0.5}}"#;

#[test]
fn skyrme_breakdown_point_is_ultrahyperbolic() {
    let (o, r) = analyze("skyrme", SKYRME_POINT);
    assert_eq!(o.status.code(), Some(0));
    let r = r.unwrap();
    assert_eq!(r["verdict"], "ultrahyperbolic");
    assert!(r["margins"]["observer"].as_f64().unwrap() < 0.0);
    assert!(r["dec"]["holds"].as_bool().unwrap());
    assert_eq!(r["symbol"]["source"], "closed-form");
    assert!(r["witnesses"]["violating_eta"].is_array());
}

#[test]
fn static_wave_map_has_zero_stress_and_is_hyperbolic() {
    let (o, r) = analyze(
        "wave-map",
        r#"{"dims":{"m_plus_1":4,"n":3},"dphi":[[0,0,0],[0,0,0],[0,0,0],[0,0,0]],"model":{"name":"wave-map"}}"#,
    );
    assert_eq!(o.status.code(), Some(0));
    let r = r.unwrap();
    assert_eq!(r["verdict"], "regularly-hyperbolic");
    for row in r["stress_energy"]["components"].as_array().unwrap() {
        for x in row.as_array().unwrap() {
            assert_eq!(x.as_f64(), Some(0.0));
        }
    }
    assert_eq!(r["det_poly"]["all_real_rooted"], true);
}

#[test]
fn wrong_signature_is_rejected() {
    let (o, r) = analyze(
        "split",
        r#"{"dims":{"m_plus_1":4,"n":3},"metric_g":[[-1,0,0,0],[0,-1,0,0],[0,0,1,0],[0,0,0,1]],
            "dphi":[[0,0,0],[0,0,0],[0,0,0],[0,0,0]],"model":{"name":"wave-map"}}"#,
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(r.is_none());
    let e = error_of(&o);
    assert_eq!(e["kind"], "not-lorentzian");
    assert!(e["message"]
        .as_str()
        .unwrap()
        .contains("metric not Lorentzian"));
}

#[test]
fn invalid_configs_exit_2() {
    let cases = [
        (
            "unknown-key",
            r#"{"dims":{"m_plus_1":4,"n":3},"dphi":{"lambdas":[1,0,0,0]},"model":{"name":"wave-map"},"colour":1}"#,
        ),
        (
            "bad-dims",
            r#"{"dims":{"m_plus_1":4,"n":3},"dphi":[[0,0],[0,0],[0,0],[0,0]],"model":{"name":"wave-map"}}"#,
        ),
        (
            "rank",
            r#"{"dims":{"m_plus_1":4,"n":2},"dphi":{"lambdas":[1,1,1,0]},"model":{"name":"wave-map"}}"#,
        ),
        (
            "model",
            r#"{"dims":{"m_plus_1":4,"n":3},"dphi":{"lambdas":[1,0,0,0]},"model":{"name":"nosuch"}}"#,
        ),
        (
            "preset",
            r#"{"dims":{"m_plus_1":4,"n":3},"metric_g":"euclid","dphi":{"lambdas":[1,0,0,0]},"model":{"name":"wave-map"}}"#,
        ),
        ("syntax", "{"),
    ];
    for (name, body) in cases {
        let (o, _) = analyze(name, body);
        assert_eq!(o.status.code(), Some(2), "{name}");
        assert!(error_of(&o)["kind"].is_string(), "{name}");
    }
    let o = run(&["analyze", "--config", "/nonexistent/config.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_of(&o)["kind"], "io");
}

#[test]
fn reports_are_deterministic_and_rerunnable() {
    let (_, a) = analyze("det-a", SKYRME_POINT);
    let (_, b) = analyze("det-b", SKYRME_POINT);
    let a_text = fs::read(scratch("det-a.report.json")).unwrap();
    let b_text = fs::read(scratch("det-b.report.json")).unwrap();
    assert_eq!(a_text, b_text);
    let echoed = serde_json::to_string(&a.unwrap()["config"]).unwrap();
    let (o, c) = analyze("det-c", &echoed);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(c.unwrap(), b.unwrap());
}

#[test]
fn check_subsets_limit_the_report() {
    let (_, r) = analyze(
        "subset",
        r#"{"dims":{"m_plus_1":3,"n":2},"dphi":[[0.2,0],[0,1],[0.5,0.1]],"model":{"name":"sigma-combo","coeffs":[1,0.5]},
            "checks":["invariants"]}"#,
    );
    let r = r.unwrap();
    assert!(r["invariants"]["sigmas"].is_array());
    assert!(r.get("verdict").is_none());
    assert!(r.get("stress_energy").is_none());
}

fn scan(grid: &str, extra: &[&str]) -> (Output, String) {
    let mut args = vec!["scan", "--model", "skyrme", "--grid", grid];
    args.extend_from_slice(extra);
    let o = run(&args);
    let csv = String::from_utf8(o.stdout.clone()).unwrap();
    (o, csv)
}

#[test]
fn skyrme_scan_flips_at_unit_lambda0() {
    let (o, csv) = scan("lambda0=0:2:0.1,lambda1=0.5,lambda2=1,lambda3=0", &[]);
    assert_eq!(o.status.code(), Some(0));
    let mut rows = csv::Reader::from_reader(csv.as_bytes());
    let headers = rows.headers().unwrap().clone();
    let l0 = headers.iter().position(|h| h == "lambda0").unwrap();
    let v = headers.iter().position(|h| h == "verdict").unwrap();
    let mut n = 0;
    for rec in rows.records() {
        let rec = rec.unwrap();
        let lambda0: f64 = rec[l0].parse().unwrap();
        if (lambda0 - 1.0).abs() < 1e-9 {
            continue;
        }
        let expected = if lambda0 < 1.0 {
            "regularly-hyperbolic"
        } else {
            "ultrahyperbolic"
        };
        assert_eq!(&rec[v], expected, "lambda0 = {lambda0}");
        n += 1;
    }
    assert_eq!(n, 20);
}

#[test]
fn scan_grid_edge_cases() {
    let (o, _) = scan("", &[]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_of(&o)["kind"], "malformed-grid");
    let (o, _) = scan("lambda0=1:0:0.1,lambda1=0", &[]);
    assert_eq!(o.status.code(), Some(2));
    let (o, _) = scan("lambda0=0:1,lambda1=0", &[]);
    assert_eq!(o.status.code(), Some(2));
    let (o, csv) = scan("lambda0=0.5,lambda1=0.5,lambda2=1,lambda3=0", &[]);
    assert_eq!(o.status.code(), Some(0));
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("lambda0,lambda1,lambda2,lambda3,sigma1"));
    assert!(lines[0].ends_with("dec_holds,verdict,time_margin,observer_margin"));
    let (_, csv) = scan("lambda0=1,lambda1=1,lambda2=1,lambda3=1", &[]);
    assert!(csv.lines().nth(1).unwrap().contains("rank-violation"));
}

#[test]
fn scan_output_is_independent_of_thread_count() {
    let grid = "lambda0=0:2:0.5,lambda1=0:1:0.5,lambda2=1,lambda3=0";
    let one = bin()
        .env("HYPERLAB_THREADS", "1")
        .args([
            "scan",
            "--model",
            "skyrme",
            "--grid",
            grid,
            "--search",
            "n_dirs=256",
        ])
        .output()
        .unwrap();
    let many = bin()
        .env("HYPERLAB_THREADS", "3")
        .args([
            "scan",
            "--model",
            "skyrme",
            "--grid",
            grid,
            "--search",
            "n_dirs=256",
        ])
        .output()
        .unwrap();
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, many.stdout);
    let bad = bin()
        .env("HYPERLAB_THREADS", "0")
        .args(["scan", "--model", "skyrme", "--grid", grid])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn scan_rejects_bad_model_and_search_settings() {
    let grid = "lambda0=1,lambda1=0";
    assert_eq!(
        run(&["scan", "--model", "skyrme", "--param", "c9=1", "--grid", grid])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["scan", "--model", "skyrme", "--search", "n_dirs=0", "--grid", grid])
            .status
            .code(),
        Some(2)
    );
    let o = run(&[
        "scan",
        "--model",
        "born-infeld",
        "--param",
        "b=1",
        "--grid",
        "lambda0=0:3:1,lambda1=1,lambda2=0,lambda3=0",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8(o.stdout)
        .unwrap()
        .contains("out-of-domain"));
}

#[test]
fn verify_exit_codes_and_report() {
    let out = scratch("counterexample.verify.json");
    let o = run(&[
        "verify",
        "--suite",
        "counterexample",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let table = String::from_utf8(o.stdout).unwrap();
    assert!(table
        .lines()
        .any(|l| l.starts_with("PASS") && l.contains("counterexample-energy-density")));
    let report: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["passed"], true);
    assert_eq!(report["options"]["tol_factor"], 1.0);
    assert!(report.get("elapsed_ms").is_none());

    let o = run(&["verify", "--suite", "grid", "--threshold", "2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8(o.stdout)
        .unwrap()
        .lines()
        .any(|l| l.starts_with("FAIL")));

    let o = run(&["verify", "--suite", "nosuch"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_of(&o)["kind"], "invalid-argument");

    assert_eq!(
        run(&["verify", "--suite", "fluid", "--tol", "0"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn paper_suite_passes() {
    let o = run(&["verify", "--suite", "paper", "--samples", "100"]);
    let table = String::from_utf8(o.stdout).unwrap();
    assert_eq!(o.status.code(), Some(0), "{table}");
    assert!(table.lines().filter(|l| l.starts_with("PASS")).count() >= 10);
}
