use std::process::{Command, Output};

use serde_json::Value;

fn mql(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mql")).args(args).env_remove("MQL_MAX_CELLS").output().expect("run mql")
}

fn records(out: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&out.stdout).lines().map(|l| serde_json::from_str(l).expect("json line")).collect()
}

fn one(args: &[&str]) -> (i32, Value) {
    let out = mql(args);
    let mut r = records(&out);
    assert_eq!(r.len(), 1, "{args:?}: {}", String::from_utf8_lossy(&out.stdout));
    (out.status.code().unwrap(), r.remove(0))
}

#[test]
fn every_record_carries_context() {
    let (code, r) = one(&["flip", "4,4,4,4", "-i", "4"]);
    assert_eq!(code, 0);
    assert_eq!(r["subcommand"], "flip");
    assert_eq!(r["input"], "4,4,4,4");
    assert_eq!(r["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(r["output"], "4,4,4,36");
}

#[test]
fn verify_exit_codes() {
    assert_eq!(one(&["verify", "4,4,4,4"]).0, 0);
    let (code, r) = one(&["verify", "1,2,3,4"]);
    assert_eq!(code, 2);
    assert_eq!(r["valid"], false);
    assert_eq!(mql(&["verify", "1,2,x,4"]).status.code(), Some(1));
    assert_eq!(mql(&["verify", "1,2,3"]).status.code(), Some(1));
    assert_eq!(mql(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(mql(&["--version"]).status.code(), Some(0));
}

#[test]
fn negative_and_complex_entries_parse() {
    let (code, r) = one(&["verify", "-1,2,3,4"]);
    assert_eq!(code, 2);
    assert_eq!(r["exact"], false);
    let out = mql(&["flip", "1+2i,3,-4i,2", "-i", "1"]);
    assert_eq!(out.status.code(), Some(4), "invalid complex quad is a precondition failure");
}

#[test]
fn reduce_uses_exact_arithmetic_for_integers() {
    let (code, r) = one(&["reduce", "3481,5,24,30"]);
    assert_eq!(code, 0);
    assert_eq!(r["exact"], true);
    assert_eq!(r["output"], "1,5,24,30");
    assert_eq!(r["word"], serde_json::json!([1]));
    // a quad far past f64 precision still reduces exactly
    let (_, r) = one(&["reduce", "4,4,36,484"]);
    assert_eq!(r["output"], "4,4,4,4");
    let (_, r) = one(&["reduce", "4.0,4,4,36"]);
    assert_eq!(r["exact"], false);
    assert_eq!(r["output"], "4,4,4,4");
}

#[test]
fn spectrum_and_systole() {
    let out = mql(&["spectrum", "4,4,4,4", "-L", "5"]);
    let r = records(&out);
    assert_eq!(r.len(), 4);
    assert!(r.iter().all(|x| (x["length"].as_f64().unwrap() - 2.0 * 2f64.asinh()).abs() < 1e-12));
    let (_, s) = one(&["systole", "4,4,4,36"]);
    assert_eq!(s["sink"], "4,4,4,4");
    assert!((s["length"].as_f64().unwrap() - 2.0 * 2f64.asinh()).abs() < 1e-9);
    let two = records(&mql(&["spectrum", "4,4,4,4", "-L", "5", "--two-sided"]));
    assert!(two.iter().all(|x| x["kind"] == "two_sided"));
}

#[test]
fn threads_do_not_change_output() {
    let a = mql(&["spectrum", "2,5,5,8", "-L", "20"]);
    let b = mql(&["spectrum", "2,5,5,8", "-L", "20", "--threads", "4"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn budget_is_exit_3() {
    let out = mql(&["spectrum", "4,4,4,4", "-L", "40", "--max-cells", "50"]);
    assert_eq!(out.status.code(), Some(3));
    let out = Command::new(env!("CARGO_BIN_EXE_mql"))
        .args(["spectrum", "4,4,4,4", "-L", "40"])
        .env("MQL_MAX_CELLS", "50")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn mcshane_modes() {
    let (code, r) = one(&["mcshane", "4,4,4,4", "--cutoff", "144"]);
    assert_eq!(code, 0);
    assert_eq!(r["term_count"], 18);
    assert_eq!(r["verdict"], "partial");
    let (code, r) = one(&["mcshane", "2,5,5,8", "--target-tol", "1e-3"]);
    assert_eq!(code, 0);
    assert_eq!(r["pass"], true);
    let (code, _) = one(&["mcshane", "4,4,4,4", "--target-tol", "1e-9", "--budget", "100"]);
    assert_eq!(code, 3);
    assert_eq!(mql(&["mcshane", "0,0,0,0", "--cutoff", "16"]).status.code(), Some(4));
}

#[test]
fn bq_check() {
    let (code, r) = one(&["bq-check", "4,4,4,4", "-k", "16"]);
    assert_eq!(code, 0);
    assert_eq!(r["faces"], 6);
    let (code, r) = one(&["bq-check", "0,0,0,0", "-k", "4", "--max-cells", "100"]);
    assert_eq!(code, 2);
    assert_eq!(r["budget_hit"], true);
}

#[test]
fn integral_listings() {
    let f = records(&mql(&["fundamental"]));
    assert_eq!(f.len(), 9);
    assert_eq!(f[0]["quad"], "1,5,24,30");
    let e = records(&mql(&["enumerate-integral", "-B", "36"]));
    let quads: Vec<&str> = e.iter().map(|r| r["quad"].as_str().unwrap()).collect();
    assert!(quads.contains(&"4,4,4,36") && quads.contains(&"2,4,6,12"));
    assert_eq!(mql(&["enumerate-integral", "-B", "-3"]).status.code(), Some(1));
}

#[test]
fn csv_output() {
    let out = mql(&["fundamental", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("input,quad,subcommand,version"));
    assert_eq!(lines.next().unwrap(), format!(",\"1,5,24,30\",fundamental,{}", env!("CARGO_PKG_VERSION")));
}

#[test]
fn out_file() {
    let path = std::env::temp_dir().join(format!("mql-out-{}.jsonl", std::process::id()));
    let out = mql(&["verify", "4,4,4,4", "--out", path.to_str().unwrap()]);
    assert!(out.status.success() && out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    let v: Value = serde_json::from_str(text.trim()).unwrap();
    assert_eq!(v["valid"], true);
}

#[test]
fn coords_roundtrip() {
    let (_, h) = one(&["coords", "4,4,4,36", "--to", "horocyclic"]);
    let hs: Vec<String> = h["h"].as_array().unwrap().iter().map(|x| x.to_string()).collect();
    let (_, back) = one(&["coords", &hs.join(","), "--from", "horocyclic"]);
    assert_eq!(back["output"], "4,4,4,36");
    let (_, l) = one(&["coords", "4,4,4,4", "--to", "lambda"]);
    assert_eq!(l["lambda"], serde_json::json!([4.0, 4.0, 4.0]));
    assert_eq!(mql(&["coords", "4,4,4,4"]).status.code(), Some(1));
}

#[test]
fn mcg_and_klein() {
    let (_, r) = one(&["mcg", "4,4,4,4", "-w", "f4"]);
    assert_eq!(r["output"], "4,4,4,36");
    let (_, r) = one(&["mcg", "1+0i,5,24,30", "-w", "phi1"]);
    assert_eq!(r["output"], "5,1,30,24");
    assert_eq!(mql(&["mcg", "1,2,3,4", "-w", "phi1"]).status.code(), Some(4));
    let (code, r) = one(&["klein", "-A", "3", "--seed", "1,2", "-n", "6"]);
    assert_eq!(code, 0);
    assert_eq!(r["terms"], serde_json::json!([1.0, 2.0, 5.0, 13.0, 34.0, 89.0]));
    assert_eq!(r["exact_check"], true);
    assert_eq!(mql(&["klein", "-A", "3", "--seed", "1,3"]).status.code(), Some(4));
}

#[test]
fn represent() {
    let (code, r) = one(&["represent", "1,5,24,30"]);
    assert_eq!(code, 0);
    assert!(r["max_deviation"].as_f64().unwrap() < 1e-12);
}
