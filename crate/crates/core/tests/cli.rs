use std::path::Path;
use std::process::Command;

use serde_json::Value;
use simplex_meanwidth::cli::run;
use simplex_meanwidth::io::{read_simplex, ReadOptions};

fn smw(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(std::iter::once("smw").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn lines(out: &str) -> Vec<Value> {
    out.lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn generate(dir: &Path, kind: &str, dim: &str, seed: &str) -> String {
    let p = dir.join(format!("{kind}-{dim}-{seed}.json"));
    let path = p.to_str().unwrap().to_string();
    assert_eq!(smw(&["generate", kind, "--dim", dim, "--seed", seed, "--out", &path]).0, 0);
    path
}

fn assert_meta(v: &Value) {
    for key in ["seed", "n_samples", "dim", "version"] {
        assert!(v.get(key).is_some(), "{key} missing from {v}");
    }
}

#[test]
fn binary_runs() {
    let out = Command::new(env!("CARGO_BIN_EXE_smw")).args(["generate", "regular", "--dim", "3"]).output().unwrap();
    assert!(out.status.success());
    let bad = Command::new(env!("CARGO_BIN_EXE_smw")).args(["meanwidth", "--input", "/nonexistent/x.json"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn malformed_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "bad.json", "{\"dim\": 3, \"vertices\": [[1,0,0]");
    let (code, out, err) = smw(&["meanwidth", "--input", &p]);
    assert_eq!(code, 2);
    assert!(out.is_empty() && !err.is_empty());
}

#[test]
fn meanwidth_of_regular_simplex() {
    let dir = tempfile::tempdir().unwrap();
    let p = generate(dir.path(), "regular", "3", "0");
    let (code, out, _) = smw(&["meanwidth", "--input", &p, "--samples", "200000"]);
    assert_eq!(code, 0);
    let v = &lines(&out)[0];
    assert_meta(v);
    let measures: Vec<f64> = v["report"]["cell_measures"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert_eq!(measures.len(), 4);
    for m in measures {
        // binomial sd at n = 2e5 is about 1e-3
        assert!((m - 0.25).abs() < 5e-3, "{m}");
    }
}

#[test]
fn meanwidth_of_a_segment_in_test_mode() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "seg.json", r#"{"dim": 3, "vertices": [[1,0,0],[-1,0,0]]}"#);
    assert_eq!(smw(&["meanwidth", "--input", &p]).0, 2);
    let (code, out, _) = smw(&["meanwidth", "--input", &p, "--test-mode", "--samples", "400000"]);
    assert_eq!(code, 0);
    let total = &lines(&out)[0]["report"]["total"];
    let (w, se) = (total["value"].as_f64().unwrap(), total["std_error"].as_f64().unwrap());
    assert!((w - 1.0).abs() < 4.0 * se, "{w} ± {se}");
}

#[test]
fn ascend_regular_stops_after_one_iteration() {
    let dir = tempfile::tempdir().unwrap();
    let p = generate(dir.path(), "regular", "3", "0");
    let (code, out, _) = smw(&["ascend", "--input", &p, "--samples", "100000"]);
    assert_eq!(code, 0);
    let recs = lines(&out);
    let summary = recs.last().unwrap();
    assert_eq!(summary["kind"], "summary");
    assert_eq!(summary["converged"], true);
    assert_eq!(summary["iterations"], 1);
    recs.iter().for_each(assert_meta);
}

#[test]
fn ascend_random_start_is_monotone() {
    let dir = tempfile::tempdir().unwrap();
    let p = generate(dir.path(), "random-covering", "3", "3");
    let (code, out, _) = smw(&["ascend", "--input", &p, "--samples", "200000", "--output", "csv"]);
    assert_eq!(code, 0);
    let mut rdr = csv::Reader::from_reader(out.as_bytes());
    let headers = rdr.headers().unwrap().clone();
    let col = |name: &str| headers.iter().position(|h| h == name).unwrap();
    let (w, se) = (col("mean_width"), col("std_error"));
    let rows: Vec<(f64, f64)> = rdr.records().map(|r| r.unwrap()).map(|r| (r[w].parse().unwrap(), r[se].parse().unwrap())).collect();
    assert!(rows.len() > 1);
    for p in rows.windows(2) {
        assert!(p[1].0 > p[0].0 - 3.0 * (p[0].1.powi(2) + p[1].1.powi(2)).sqrt(), "{p:?}");
    }
    for m in ["seed", "n_samples", "dim", "version"] {
        col(m);
    }
}

#[test]
fn ascend_non_covering_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(
        dir.path(),
        "cap.json",
        r#"{"dim": 3, "vertices": [[1,0,0],[0.8,0.6,0],[0.8,0,0.6],[0.8,-0.36,-0.48]]}"#,
    );
    let (code, _, err) = smw(&["ascend", "--input", &p, "--samples", "10000"]);
    assert_eq!(code, 3, "{err}");
    assert!(!err.is_empty());
}

#[test]
fn verify_default_suites_pass() {
    let (code, out, err) = smw(&["verify", "shear", "--trials", "500"]);
    assert_eq!(code, 0, "{err}");
    let recs = lines(&out);
    assert!(recs.iter().all(|r| r.get("result").is_none_or(|c| c["violations"] == 0)));
    recs.iter().for_each(assert_meta);

    let (code, _, _) = smw(&["verify", "--suite", "switch", "--trials", "20", "--samples", "5000"]);
    assert_eq!(code, 0);
}

#[test]
fn verify_rejects_nonpositive_tuple() {
    assert_eq!(smw(&["verify", "lemma", "--trials", "100", "--tuple", "1,1,1,1,0,1,1,1"]).0, 3);
    assert_eq!(smw(&["verify", "lemma", "--trials", "100", "--tuple", "1,1,1"]).0, 2);
}

#[test]
fn strip_ratio_at_zero_shear() {
    let (code, out, _) = smw(&["experiment", "strip-ratio", "--s", "0", "--test-mode", "--samples", "20000"]);
    assert_eq!(code, 0);
    let v = &lines(&out)[0];
    assert_meta(v);
    assert_eq!(v["record"]["ratios"], serde_json::json!([1.0, 1.0]));
    assert_ne!(smw(&["experiment", "strip-ratio", "--s", "0", "--samples", "1000"]).0, 0);
}

#[test]
fn uniqueness_slopes_increase() {
    let (code, out, _) = smw(&["experiment", "centroid-uniqueness", "--samples", "200000"]);
    assert_eq!(code, 0);
    let v = &lines(&out)[0];
    let slopes: Vec<f64> = v["record"]["entries"].as_array().unwrap().iter().map(|e| e["slope"].as_f64().unwrap()).collect();
    assert_eq!(slopes.len(), 4);
    assert!(slopes.windows(2).all(|p| p[1] > p[0]), "{slopes:?}");
}

#[test]
fn generated_simplexes() {
    let dir = tempfile::tempdir().unwrap();
    let regular = read_simplex(generate(dir.path(), "regular", "4", "0"), ReadOptions::default()).unwrap();
    for i in 0..5 {
        for j in 0..5 {
            let g: f64 = regular.vertex(i).iter().zip(regular.vertex(j)).map(|(a, b)| a * b).sum();
            let want = if i == j { 1.0 } else { -0.25 };
            assert!((g - want).abs() < 1e-12);
        }
    }
    for seed in ["1", "2", "3"] {
        let s = read_simplex(generate(dir.path(), "random-covering", "4", seed), ReadOptions::default()).unwrap();
        assert!(s.covers_sphere().unwrap());
    }
    let s = read_simplex(generate(dir.path(), "perturbed-regular", "3", "0"), ReadOptions::default()).unwrap();
    assert!(s.regularity_distance() > 0.0);
}

#[test]
fn unwritable_output_exits_2() {
    assert_eq!(smw(&["generate", "regular", "--out", "/nonexistent/dir/x.json"]).0, 2);
}

#[test]
fn runs_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let p = generate(dir.path(), "random-covering", "4", "7");
    let args = ["ascend", "--input", &p, "--samples", "50000", "--seed", "11"];
    assert_eq!(smw(&args).1, smw(&args).1);
    let args = ["meanwidth", "--input", &p, "--samples", "50000", "--output", "csv"];
    assert_eq!(smw(&args).1, smw(&args).1);
}

#[test]
fn csv_headers() {
    let dir = tempfile::tempdir().unwrap();
    let p = generate(dir.path(), "regular", "3", "0");
    let header = |args: &[&str]| smw(args).1.lines().next().unwrap().to_string();
    assert_eq!(
        header(&["meanwidth", "--input", &p, "--samples", "1000", "--output", "csv"]),
        "cell,measure,count,value,std_error,seed,n_samples,dim,version"
    );
    assert!(header(&["ascend", "--input", &p, "--samples", "1000", "--output", "csv"])
        .starts_with("iteration,mean_width,std_error,regularity_distance,movement,converged"));
    assert!(header(&["experiment", "strip-ratio", "--samples", "1000", "--output", "csv"]).ends_with("seed,n_samples,dim,version"));
}
