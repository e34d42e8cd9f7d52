use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn charscan(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_charscan"))
        .args(args)
        .current_dir(dir)
        .env_remove("CHARSCAN_CACHE")
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

/// Parses CSV into rows of JSON values so both formats can be compared field by field.
fn csv_rows(bytes: &[u8]) -> Vec<serde_json::Map<String, Value>> {
    let mut rdr = csv::Reader::from_reader(bytes);
    let headers = rdr.headers().unwrap().clone();
    rdr.records()
        .map(|rec| {
            let rec = rec.unwrap();
            headers
                .iter()
                .zip(rec.iter())
                .map(|(h, v)| {
                    let value = if v.is_empty() {
                        Value::Null
                    } else if let Ok(n) = v.parse::<serde_json::Number>() {
                        Value::Number(n)
                    } else if let Ok(b) = v.parse::<bool>() {
                        Value::Bool(b)
                    } else {
                        Value::String(v.to_string())
                    };
                    (h.to_string(), value)
                })
                .collect()
        })
        .collect()
}

fn assert_value_equal(json: &Value, csv: &[serde_json::Map<String, Value>]) {
    let rows = json.as_array().unwrap();
    assert_eq!(rows.len(), csv.len());
    for (j, c) in rows.iter().zip(csv) {
        for (k, v) in j.as_object().unwrap() {
            let cv = &c[k];
            match (v.as_f64(), cv.as_f64()) {
                (Some(a), Some(b)) => assert_eq!(a, b, "field {k}"),
                _ => assert_eq!(v, cv, "field {k}"),
            }
        }
    }
}

#[test]
fn pv_scan_counts_and_is_idempotent() {
    let dir = tempfile::tempdir().unwrap();
    let first = charscan(dir.path(), &["pv-scan", "--p-min", "3", "--p-max", "100", "--residue-class", "3"]);
    assert!(first.status.success());
    let s = stdout_json(&first);
    // 3, 7, 11, 19, 23, 31, 43, 47, 59, 67, 71, 79, 83
    assert_eq!(s[0]["new_records"], 13);
    let cache = std::fs::read_to_string(dir.path().join("charscan-cache.jsonl")).unwrap();
    assert_eq!(cache.lines().count(), 13);

    let again = charscan(dir.path(), &["pv-scan", "--p-min", "3", "--p-max", "100", "--residue-class", "3"]);
    assert!(again.status.success());
    let s2 = stdout_json(&again);
    assert_eq!(s2[0]["new_records"], 0);
    assert_eq!(s2[0]["skipped"], 13);
    assert_eq!(s2[0]["max_ratio_log"], s[0]["max_ratio_log"]);
    let cache2 = std::fs::read_to_string(dir.path().join("charscan-cache.jsonl")).unwrap();
    assert_eq!(cache, cache2);

    let forced = charscan(
        dir.path(),
        &["pv-scan", "--p-min", "3", "--p-max", "20", "--residue-class", "3", "--force"],
    );
    assert!(forced.status.success());
    assert_eq!(stdout_json(&forced)[0]["new_records"], 4);
    let cache3 = std::fs::read_to_string(dir.path().join("charscan-cache.jsonl")).unwrap();
    assert_eq!(cache3.lines().count(), 13);
}

#[test]
fn pv_scan_empty_range_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let out = charscan(dir.path(), &["pv-scan", "--p-min", "24", "--p-max", "28"]);
    assert!(out.status.success());
    let s = stdout_json(&out);
    assert_eq!(s[0]["new_records"], 0);
    assert_eq!(s[0]["records_in_range"], 0);
}

#[test]
fn pv_scan_respects_env_cache_and_lock() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("elsewhere.jsonl");
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_charscan"))
            .args(["pv-scan", "--p-min", "3", "--p-max", "30"])
            .current_dir(dir.path())
            .env("CHARSCAN_CACHE", &cache)
            .output()
            .unwrap()
    };
    assert!(run().status.success());
    assert!(cache.exists());
    std::fs::write(dir.path().join("elsewhere.jsonl.lock"), "1\n").unwrap();
    let locked = run();
    assert_eq!(locked.status.code(), Some(4));
}

#[test]
fn pv_scan_workers_do_not_change_values() {
    let dir = tempfile::tempdir().unwrap();
    let read = |name: &str| -> Vec<Value> {
        std::fs::read_to_string(dir.path().join(name))
            .unwrap()
            .lines()
            .map(|l| {
                let mut v: Value = serde_json::from_str(l).unwrap();
                v.as_object_mut().unwrap().remove("timestamp");
                v
            })
            .collect()
    };
    for (w, name) in [("1", "one.jsonl"), ("4", "four.jsonl")] {
        let out = charscan(
            dir.path(),
            &["pv-scan", "--p-min", "3", "--p-max", "3000", "--workers", w, "--out", name],
        );
        assert!(out.status.success());
    }
    assert_eq!(read("one.jsonl"), read("four.jsonl"));
}

#[test]
fn pv_scan_products_and_capacity() {
    let dir = tempfile::tempdir().unwrap();
    let out = charscan(dir.path(), &["pv-scan", "--p-min", "3", "--p-max", "50", "--ell", "7"]);
    assert!(out.status.success());
    let cache = std::fs::read_to_string(dir.path().join("charscan-cache.jsonl")).unwrap();
    for line in cache.lines() {
        let v: Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["family"], "product");
        assert_eq!(v["conductor"].as_u64().unwrap() % 7, 0);
    }
    let over = charscan(dir.path(), &["pv-scan", "--p-min", "3", "--p-max", "5000", "--limit", "1000"]);
    assert_eq!(over.status.code(), Some(3));
}

#[test]
fn thm_a_report_round_trips_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = charscan(dir.path(), &["thm-a", "--p", "10007", "--epsilon", "0.3", "--c", "0.1", "--out", "a.json"]);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    let b = charscan(dir.path(), &["thm-a", "--p", "10007", "--epsilon", "0.3", "--c", "0.1", "--out", "b.json"]);
    assert!(b.status.success());
    assert_eq!(a.stdout, b.stdout);
    let load = |n: &str| {
        let mut v: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join(n)).unwrap()).unwrap();
        assert!(v["timestamp"].is_u64());
        v.as_object_mut().unwrap().remove("timestamp");
        v
    };
    let (ra, rb) = (load("a.json"), load("b.json"));
    assert_eq!(ra, rb);
    let report: charscan_core::experiments::WitnessReport = serde_json::from_value(ra.clone()).unwrap();
    assert_eq!(report.q, report.p * report.ell);
    assert_eq!(ra["chain_lines"][0]["label"], "split");
    assert!(ra["chain_lines"][0]["value"].is_f64());
    assert_eq!(ra["product"]["parity"], "even");
}

#[test]
fn thm_a_rejects_even_xi() {
    let dir = tempfile::tempdir().unwrap();
    let out = charscan(dir.path(), &["thm-a", "--p", "5", "--epsilon", "0.3", "--c", "0.1", "--out", "x.json"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("parity"));
    assert!(!dir.path().join("x.json").exists());
}

#[test]
fn argument_errors_exit_two_without_output() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["--bogus"],
        vec!["means", "--x", "1.5"],
        vec!["means", "--x", "nan"],
        vec!["lemma-b", "--c", "0", "--x", "100"],
        vec!["thm-a", "--p", "7", "--epsilon", "1.0", "--c", "0.1", "--out", "y.json"],
        vec!["burgess-scan", "--p", "7919", "--thetas", "0.5,1.5"],
        vec!["counterexample", "--x-max", "50"],
        vec!["pv-scan", "--p-min", "10", "--p-max", "3"],
        vec!["nonresidue", "--pmax", "1000", "--format", "xml"],
    ] {
        let out = charscan(dir.path(), &args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn nonresidue_csv_has_one_row_per_odd_prime() {
    let dir = tempfile::tempdir().unwrap();
    let csv = charscan(dir.path(), &["nonresidue", "--pmax", "1000", "--format", "csv"]);
    assert!(csv.status.success());
    let rows = csv_rows(&csv.stdout);
    assert_eq!(rows.len(), 167);
    let json = charscan(dir.path(), &["nonresidue", "--pmax", "1000"]);
    assert_value_equal(&stdout_json(&json), &rows);
}

#[test]
fn json_and_csv_carry_identical_values() {
    let dir = tempfile::tempdir().unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["means", "--x", "5000", "--function", "random", "--seed", "3"],
        vec!["means", "--x", "999.5", "--function", "legendre", "--p", "1009"],
        vec!["lemma-b", "--c", "0.9", "--x", "1000", "--trials", "50", "--seed", "9"],
        vec!["burgess-scan", "--p", "1000003", "--thetas", "0.2,0.25,0.3,0.5"],
    ];
    for args in cases {
        let j = charscan(dir.path(), &args);
        let mut csv_args = args.clone();
        csv_args.extend(["--format", "csv"]);
        let c = charscan(dir.path(), &csv_args);
        assert!(j.status.success() && c.status.success(), "{args:?}");
        assert_value_equal(&stdout_json(&j), &csv_rows(&c.stdout));
    }
}

#[test]
fn counterexample_formats_agree() {
    let dir = tempfile::tempdir().unwrap();
    let j = charscan(dir.path(), &["counterexample", "--x-max", "300", "--flip-budget", "1", "--threshold", "0.5"]);
    let c = charscan(
        dir.path(),
        &["counterexample", "--x-max", "300", "--flip-budget", "1", "--threshold", "0.5", "--format", "csv"],
    );
    let json = stdout_json(&j);
    let rows = csv_rows(&c.stdout);
    assert_eq!(json.as_array().unwrap().len(), rows.len());
    for (a, b) in json.as_array().unwrap().iter().zip(&rows) {
        let primes: Vec<String> = a["flipped_primes"]
            .as_array()
            .unwrap()
            .iter()
            .map(|p| p.to_string())
            .collect();
        let cell = match &b["flipped_primes"] {
            Value::Null => String::new(),
            Value::String(s) => s.clone(),
            other => other.to_string(),
        };
        assert_eq!(cell, primes.join(";"));
        assert_eq!(a["N"], b["N"]);
        assert_eq!(a["mean_at_N"].as_f64(), b["mean_at_N"].as_f64());
        assert_eq!(a["log_mean_at_N"].as_f64(), b["log_mean_at_N"].as_f64());
    }
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = charscan(dir.path(), &["means", "--x", "100", "--function", "one", "--out", "m.json"]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("m.json")).unwrap()).unwrap();
    assert_eq!(v[0]["mean"], 1.0);
    assert_eq!(v[0]["u"], 0.0);
    let bad = charscan(dir.path(), &["means", "--x", "100", "--out", "no/such/dir/m.json"]);
    assert_eq!(bad.status.code(), Some(4));
}
