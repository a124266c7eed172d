use std::collections::HashMap;
use std::io::Write;
use std::process::{Command, Output};

use tempfile::NamedTempFile;

const LN2: f64 = std::f64::consts::LN_2;

fn softcover(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_softcover"))
        .args(args)
        .env_remove("SOFTCOVER_THREADS")
        .output()
        .expect("binary runs")
}

fn model_file(text: &str) -> NamedTempFile {
    let mut f = NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

fn qubit_model(prior: &str, a: [f64; 2], b: [f64; 2]) -> String {
    format!(
        r#"{{"alphabet": ["a", "b"], "prior": {prior}, "states": [
            [[[{}, 0], [0, 0]], [[0, 0], [{}, 0]]],
            [[[{}, 0], [0, 0]], [[0, 0], [{}, 0]]]
        ]}}"#,
        a[0], a[1], b[0], b[1]
    )
}

/// CSV body (no timestamp line) as one map per row.
fn rows(out: &Output) -> Vec<HashMap<String, String>> {
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let headers = r.headers().unwrap().clone();
    r.records()
        .map(|rec| {
            let rec = rec.unwrap();
            headers
                .iter()
                .map(String::from)
                .zip(rec.iter().map(String::from))
                .collect()
        })
        .collect()
}

fn num(row: &HashMap<String, String>, col: &str) -> f64 {
    row[col].parse().unwrap_or_else(|_| panic!("{col} = {:?}", row[col]))
}

fn model_a_path() -> String {
    format!("{}/../../models/model_a.json", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn info_model_a_matches_classical_closed_forms() {
    let out = softcover(&["info", "--model", &model_a_path(), "--alpha", "1.5,0.75", "--no-header"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = rows(&out);
    assert_eq!(rows.len(), 3);
    // Commuting model: Sibson's closed form over the output alphabet.
    let a: f64 = 1.5;
    let y0 = (0.5 + 0.5 * 0.5f64.powf(a)).powf(1.0 / a);
    let y1 = (0.5 * 0.5f64.powf(a)).powf(1.0 / a);
    let sibson = a / (a - 1.0) * (y0 + y1).ln();
    assert!((num(&rows[0], "I_star") - sibson).abs() < 1e-8);
    assert!(num(&rows[0], "I_star_breve") <= num(&rows[0], "I_star") + 1e-9);
    assert_eq!(rows[0]["status"], "ok");
    // Sandwiched columns are empty below 1; Petz columns are filled.
    assert_eq!(rows[1]["I_star"], "");
    let b: f64 = 0.75;
    let q = [0.75f64, 0.25];
    let s = 0.5 * q[0].powf(1.0 - b) + 0.5 * 0.5f64.powf(b) * (q[0].powf(1.0 - b) + q[1].powf(1.0 - b));
    assert!((num(&rows[1], "I_down") - s.ln() / (b - 1.0)).abs() < 1e-12);
    let summary = &rows[2];
    assert_eq!(summary["alpha"], "summary");
    assert!((num(summary, "I") - 0.215762).abs() < 1e-6);
    assert!((num(summary, "V") - 0.156041).abs() < 1e-6);
    assert!((num(summary, "V_breve") - 0.150869).abs() < 1e-6);
}

#[test]
fn info_all_equal_model_is_zero() {
    let f = model_file(&qubit_model("[0.3, 0.7]", [0.6, 0.4], [0.6, 0.4]));
    let out = softcover(&["info", "--model", f.path().to_str().unwrap(), "--no-header"]);
    assert!(out.status.success());
    for row in rows(&out) {
        for col in ["I_star", "I_star_breve", "I_down", "I_down_breve", "I", "V", "V_breve"] {
            if !row[col].is_empty() {
                assert!(num(&row, col).abs() < 1e-9, "{col} = {}", row[col]);
            }
        }
    }
}

#[test]
fn validation_errors_exit_with_one() {
    let f = model_file(&qubit_model("[0.5, 0.6]", [1.0, 0.0], [0.0, 1.0]));
    let out = softcover(&["info", "--model", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("prior sums to"));
    assert!(out.stdout.is_empty());

    let out = softcover(&["info", "--model", "/nonexistent/model.json"]);
    assert_eq!(out.status.code(), Some(1));
    let out = softcover(&["info", "--model", "builtin:model_a", "--alpha", "3"]);
    assert_eq!(out.status.code(), Some(1));
    // Usage errors are validation errors too.
    let out = softcover(&["info"]);
    assert_eq!(out.status.code(), Some(1));
    let out = softcover(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(softcover(&["--help"]).status.code(), Some(0));
}

#[test]
fn exponent_rows() {
    let out = softcover(&[
        "exponent",
        "--model",
        "builtin:orthogonal_binary",
        "--rate",
        &format!("{},{}", LN2, 2.0 * LN2),
        "--no-header",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = rows(&out);
    for col in ["E_star", "E_star_breve", "E_sc_down", "E_sc_down_breve"] {
        assert!(num(&rows[0], col).abs() < 1e-9, "{col} at R = I: {}", rows[0][col]);
    }
    // sup over α ∈ (1, 2) of (α-1)/α ln 2 is approached as α -> 2.
    let e = num(&rows[1], "E_star");
    assert!(e <= LN2 / 2.0 && LN2 / 2.0 - e < 1e-4, "{e}");
    assert!((num(&rows[1], "argmax_E_star") - 2.0).abs() < 1e-3);
}

#[test]
fn exponent_cc_columns_need_integral_composition() {
    let args = ["exponent", "--model", "builtin:model_a", "--rate", "0.3", "--no-header"];
    let out = softcover(&[&args[..], &["--n", "3"]].concat());
    assert!(out.status.success());
    let row = &rows(&out)[0];
    assert_eq!(row["E_star_breve"], "");
    assert!(row["note"].contains("n = 3"));
    assert!(num(row, "E_star") > 0.0);
    let out = softcover(&[&args[..], &["--n", "4"]].concat());
    let row = &rows(&out)[0];
    assert!(num(row, "E_star_breve") >= num(row, "E_star") - 1e-9);
    assert_eq!(row["note"], "");
}

#[test]
fn simulate_exact_anchor() {
    let out = softcover(&[
        "simulate",
        "--model",
        "builtin:orthogonal_binary",
        "--n",
        "1",
        "--M",
        "2",
        "--exact",
        "--no-header",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let row = &rows(&out)[0];
    assert!((num(row, "mean") - 0.25).abs() < 1e-12);
    assert!(num(row, "ach_iid_tight") >= 0.25);
    assert!(num(row, "sc_iid") <= 0.25);
    assert_eq!(row["ach_check"], "ok");
    assert_eq!(row["exact"], "true");
}

#[test]
fn simulate_monte_carlo_and_guards() {
    let f = model_file(&qubit_model(r#"["1/2", "1/2"]"#, [0.6, 0.4], [0.6, 0.4]));
    let path = f.path().to_str().unwrap();
    let out = softcover(&[
        "simulate",
        "--model",
        path,
        "--kind",
        "cc",
        "--n",
        "2",
        "--M",
        "3",
        "--no-header",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let row = &rows(&out)[0];
    assert!(num(row, "mean").abs() < 1e-12);
    assert_eq!(row["samples"], "2000");

    let out = softcover(&["simulate", "--model", path, "--n", "2", "--M", "3", "--samples", "1"]);
    assert_eq!(out.status.code(), Some(1));
    let out = softcover(&["simulate", "--model", path, "--n", "2"]);
    assert_eq!(out.status.code(), Some(1));
    let out = softcover(&["simulate", "--model", path, "--n", "20", "--M", "2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("too large"));
}

#[test]
fn simulate_rate_sets_codebook_size() {
    let out = softcover(&[
        "simulate",
        "--model",
        "builtin:model_a",
        "--n",
        "2",
        "--rate",
        "0.5",
        "--seed",
        "7",
        "--no-header",
    ]);
    assert!(out.status.success());
    let row = &rows(&out)[0];
    assert_eq!(row["M"], "3");
    assert!((num(row, "effective_rate") - 3f64.ln() / 2.0).abs() < 1e-15);
    assert!(num(row, "half_width_95") > 0.0);
}

#[test]
fn verify_suites() {
    let out = softcover(&["verify", "--suite", "trace-inequality,type-class", "--no-header"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = rows(&out);
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r["status"] == "pass" && r["failures"] == "0"));
    let out = softcover(&["verify", "--suite", "no-such-suite"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn moderate_scan() {
    let out = softcover(&["moderate", "--model", "builtin:model_a", "--no-header"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let ratios: Vec<f64> = rows(&out).iter().map(|r| num(r, "ratio_iid")).collect();
    let want = [0.4099, 0.7607, 0.9144];
    for (r, w) in ratios.iter().zip(want) {
        assert!((r - w).abs() < 1e-3, "{ratios:?}");
    }
    let out = softcover(&["moderate", "--model", "builtin:orthogonal_binary"]);
    assert_eq!(out.status.code(), Some(1));
    let out = softcover(&["moderate", "--model", "builtin:model_a", "--t", "0.7"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn output_is_reproducible() {
    let args = [
        "simulate",
        "--model",
        "builtin:model_a",
        "--n",
        "3",
        "--M",
        "4",
        "--samples",
        "300",
        "--seed",
        "11",
        "--no-header",
    ];
    let a = softcover(&args);
    let b = softcover(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let single = Command::new(env!("CARGO_BIN_EXE_softcover"))
        .args(args)
        .env("SOFTCOVER_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(a.stdout, single.stdout);
    let with_header = softcover(&args[..args.len() - 1]);
    let text = String::from_utf8(with_header.stdout).unwrap();
    let (first, rest) = text.split_once('\n').unwrap();
    assert!(first.starts_with("# softcover simulate"));
    assert_eq!(rest.as_bytes(), &a.stdout[..]);
}

#[test]
fn bad_thread_count_is_rejected() {
    let out = Command::new(env!("CARGO_BIN_EXE_softcover"))
        .args(["info", "--model", "builtin:model_a"])
        .env("SOFTCOVER_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn json_report() {
    let out = softcover(&["info", "--model", "builtin:model_a", "--alpha", "2", "--format", "json"]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["command"][0], "info");
    assert_eq!(doc["seed"], 0);
    assert_eq!(doc["config"]["alpha"][0], 2.0);
    assert!(doc["generated_unix_s"].is_u64());
    assert!(doc["wall_time_s"].is_number());
    let rows = doc["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows[0]["I_star"].is_number());
    assert_eq!(rows[1]["alpha"], "summary");
    assert!(rows[1]["I_star"].is_null());
}
