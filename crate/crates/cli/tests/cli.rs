use std::process::Command;

use bk_cli::cli::run;
use proptest::prelude::*;
use serde_json::Value;

fn bk(args: &[&str]) -> (i32, String, String) {
    let argv: Vec<String> = std::iter::once("bk").chain(args.iter().copied()).map(String::from).collect();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(&argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut a = args.to_vec();
    a.extend(["--json", "-"]);
    let (code, out, _) = bk(&a);
    (code, serde_json::from_str(&out).unwrap())
}

fn statuses(v: &Value) -> Vec<(String, String)> {
    v["claims"].as_array().unwrap().iter().map(|c| (c["id"].as_str().unwrap().to_string(), c["status"].as_str().unwrap().to_string())).collect()
}

#[test]
fn unknown_generator_is_a_usage_error() {
    let (code, _, err) = bk(&["verify", "conservation", "--which", "G9"]);
    assert_eq!(code, 2);
    assert!(err.contains("unknown generator `G9`"), "{err}");
    assert_eq!(bk(&["verify", "nothing"]).0, 2);
    assert_eq!(bk(&["solve", "--ode", "3.21"]).0, 2);
    assert_eq!(bk(&["verify", "symmetries", "--params", "gamma=2"]).0, 2);
}

#[test]
fn symmetry_suite() {
    let (code, v) = json(&["verify", "symmetries"]);
    assert_eq!(code, 0);
    let s = statuses(&v);
    assert!(s.len() >= 7);
    assert!(s.iter().all(|(_, st)| st == "pass" || st == "corrected"));
    assert!(s.contains(&("symmetry/G2a".into(), "corrected".into())));
    assert!(v["claims"].as_array().unwrap().iter().all(|c| c.get("wall_time_s").is_none()));
}

#[test]
fn bound_parameters() {
    let (code, v) = json(&["verify", "symmetries", "--params", "alpha=1,beta=1"]);
    assert_eq!(code, 0);
    assert!(statuses(&v).contains(&("symmetry/G6a(generic)".into(), "pass".into())));
}

#[test]
fn conservation_modes() {
    let (code, v) = json(&["verify", "conservation", "--which", "G1a,G4a", "--construct", "--points", "50"]);
    assert_eq!(code, 0);
    let ids: Vec<String> = statuses(&v).into_iter().map(|(id, _)| id).collect();
    assert!(ids.contains(&"conservation/G4a/constructed".into()));
    assert!(!ids.iter().any(|i| i.ends_with("/printed")));
    let (code, v) = json(&["verify", "conservation", "--which", "G5a", "--printed", "--points", "50"]);
    assert_eq!(code, 1);
    assert!(statuses(&v).contains(&("conservation/G5a/printed".into(), "fail".into())));
}

#[test]
fn adjoint_suite() {
    let (code, v) = json(&["verify", "adjoint"]);
    assert_eq!(code, 0);
    let c = v["claims"].as_array().unwrap().iter().find(|c| c["id"] == "adjoint/printed-display").unwrap();
    assert_eq!(c["details"]["difference"], "-4*beta*u[y,y] + 4*beta*u[x,y]*v[x]");
}

#[test]
fn reductions() {
    let (code, out, _) = bk(&["reduce", "--list"]);
    assert_eq!(code, 0);
    assert!(out.lines().any(|l| l.starts_with("3.22->3.27")));
    let (code, out, _) = bk(&["reduce", "--show", "3.2->3.4"]);
    assert_eq!(code, 0);
    assert!(out.contains("matches:  false"));
    let (code, v) = json(&["reduce", "--verify", "1.2->3.2"]);
    assert_eq!(code, 0);
    assert_eq!(statuses(&v), [("reduction/1.2->3.2".to_string(), "pass".to_string())]);
    assert_eq!(bk(&["reduce", "--verify", "9.9->1.0"]).0, 2);
}

#[test]
fn solve_writes_csv() {
    let path = std::env::temp_dir().join(format!("bk-solve-{}.csv", std::process::id()));
    let p = path.to_str().unwrap();
    let (code, _, _) = bk(&["solve", "--ode", "3.27", "--span", "-10,10", "--csv", p]);
    assert_eq!(code, 0);
    let mut r = csv::Reader::from_path(&path).unwrap();
    assert_eq!(r.headers().unwrap().iter().collect::<Vec<_>>(), ["s", "m", "m_n", "m_nn", "local_error"]);
    let rows: Vec<csv::StringRecord> = r.records().map(Result::unwrap).collect();
    assert!(rows.len() > 10);
    let last: f64 = rows.last().unwrap()[0].parse().unwrap();
    assert!((last - 10.0).abs() < 1e-12);
    std::fs::remove_file(&path).unwrap();
}

#[test]
fn lift() {
    let (code, v) = json(&["lift", "--wave", "1,1,1", "--check-residual", "200", "--numeric"]);
    assert_eq!(code, 0);
    let s = statuses(&v);
    assert!(s.iter().any(|(id, _)| id == "numeric/soliton-residual"));
    assert!(s.iter().any(|(id, _)| id == "numeric/numeric-lift-residual"));
    assert!(s.iter().all(|(_, st)| st == "pass"));
    assert_eq!(bk(&["lift", "--wave", "1,-0.75,1"]).0, 2);
}

#[test]
fn full_report_exits_on_printed_failures() {
    let exe = env!("CARGO_BIN_EXE_bk");
    let out = Command::new(exe).args(["report", "--all", "--points", "200", "--json", "-"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let failed: Vec<String> = statuses(&v).into_iter().filter(|(_, s)| s == "fail").map(|(id, _)| id).collect();
    assert_eq!(failed, ["ode-symmetry/3.18/G3e", "ode-symmetry/3.2/G3b"]);
    assert!(v["claims"].as_array().unwrap().iter().filter(|c| c["status"] == "fail").all(|c| c["source"] == "paper"));
    let ids: Vec<String> = statuses(&v).into_iter().map(|(id, _)| id).collect();
    let mut sorted = ids.clone();
    sorted.sort();
    assert_eq!(ids, sorted);
}

#[test]
fn timings_are_opt_in() {
    let (_, v) = json(&["verify", "adjoint", "--timings"]);
    assert!(v["claims"][0]["wall_time_s"].is_number());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4))]

    #[test]
    fn reports_are_deterministic(seed in 0u64..10_000) {
        let s = seed.to_string();
        let args = ["verify", "conservation", "--which", "G4a,G5a", "--points", "40", "--seed", s.as_str(), "--json", "-"];
        let a = bk(&args);
        let b = bk(&args);
        prop_assert_eq!(a.0, b.0);
        prop_assert_eq!(a.1, b.1);
    }
}
