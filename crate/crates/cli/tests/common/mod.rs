//! Shared helpers for the CLI tests: running the binary and comparing JSON
//! reports against golden files.

#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

/// Absolute slack for numbers in golden comparisons. Residuals sit near
/// machine precision and may move in the last digits.
pub const NUM_SLACK: f64 = 1e-9;

pub fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

/// Runs the binary from the crate directory so relative fixture paths in
/// messages are stable.
pub fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_qgroupoid"))
        .args(args)
        .current_dir(crate_dir())
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

pub struct GoldenCase {
    pub name: &'static str,
    pub args: &'static [&'static str],
    pub exit: i32,
}

pub const CASES: &[GoldenCase] = &[
    GoldenCase { name: "verify_mpi_p2", args: &["verify-mpi", "tests/fixtures/p2.json"], exit: 0 },
    GoldenCase { name: "verify_mpi_s3_pair", args: &["verify-mpi", "tests/fixtures/s3.json", "tests/fixtures/s3_pair.json"], exit: 0 },
    GoldenCase { name: "verify_mpi_malformed", args: &["verify-mpi", "tests/fixtures/malformed.json"], exit: 2 },
    GoldenCase { name: "verify_mpi_bad_table", args: &["verify-mpi", "tests/fixtures/bad_table.json"], exit: 2 },
    GoldenCase { name: "verify_mpi_tight_tol", args: &["verify-mpi", "tests/fixtures/p2.json", "--tol", "1e-20"], exit: 1 },
    GoldenCase { name: "wha_z2_right", args: &["wha", "tests/fixtures/z2.json", "--side", "right"], exit: 0 },
    GoldenCase { name: "haar_z2_oracle", args: &["haar", "tests/fixtures/z2.json", "--oracle"], exit: 0 },
    GoldenCase { name: "haar_p2_oracle", args: &["haar", "tests/fixtures/p2.json", "--oracle"], exit: 0 },
    GoldenCase { name: "crossed_z2_flip", args: &["crossed-product", "tests/fixtures/z2_flip.json"], exit: 0 },
    GoldenCase { name: "crossed_p2_identity", args: &["crossed-product", "tests/fixtures/p2_identity.json"], exit: 0 },
    GoldenCase { name: "crossed_broken_action", args: &["crossed-product", "tests/fixtures/z2_broken_action.json"], exit: 1 },
    GoldenCase { name: "crossed_bad_shape", args: &["crossed-product", "tests/fixtures/z2_action_bad_shape.json"], exit: 2 },
    GoldenCase { name: "outer_ad_sigma_x", args: &["outer-test", "tests/fixtures/z2_ad_sigma_x.json"], exit: 0 },
    GoldenCase { name: "outer_p2_identity", args: &["outer-test", "tests/fixtures/p2_identity.json"], exit: 0 },
    GoldenCase { name: "matchpair_s3", args: &["matchpair", "tests/fixtures/s3.json", "tests/fixtures/s3_pair.json"], exit: 0 },
    GoldenCase { name: "matchpair_bad_pair", args: &["matchpair", "tests/fixtures/s3.json", "tests/fixtures/s3_bad_pair.json"], exit: 2 },
];

pub fn golden_path(name: &str) -> PathBuf {
    crate_dir().join("tests/golden").join(format!("{name}.json"))
}

/// Replaces tokens that parse as numbers below the slack by `~0`, so
/// formatted residuals inside observation strings compare stably.
fn normalize_text(s: &str) -> String {
    let mut out = String::new();
    let mut tok = String::new();
    let flush = |tok: &mut String, out: &mut String| {
        match tok.parse::<f64>() {
            Ok(x) if x.abs() < NUM_SLACK => out.push_str("~0"),
            _ => out.push_str(tok),
        }
        tok.clear();
    };
    for ch in s.chars() {
        if matches!(ch, ' ' | '(' | ')' | ',' | '[' | ']') {
            flush(&mut tok, &mut out);
            out.push(ch);
        } else {
            tok.push(ch);
        }
    }
    flush(&mut tok, &mut out);
    out
}

/// Structural equality with numeric slack; the error names the first
/// differing path.
pub fn json_close(got: &Value, want: &Value, path: &str) -> Result<(), String> {
    match (got, want) {
        (Value::Number(a), Value::Number(b)) => {
            let (a, b) = (a.as_f64().unwrap_or(f64::NAN), b.as_f64().unwrap_or(f64::NAN));
            if (a - b).abs() <= NUM_SLACK {
                Ok(())
            } else {
                Err(format!("{path}: {a} vs {b}"))
            }
        }
        (Value::String(a), Value::String(b)) => {
            if normalize_text(a) == normalize_text(b) {
                Ok(())
            } else {
                Err(format!("{path}: {a:?} vs {b:?}"))
            }
        }
        (Value::Array(a), Value::Array(b)) => {
            if a.len() != b.len() {
                return Err(format!("{path}: length {} vs {}", a.len(), b.len()));
            }
            a.iter().zip(b).enumerate().try_for_each(|(i, (x, y))| json_close(x, y, &format!("{path}[{i}]")))
        }
        (Value::Object(a), Value::Object(b)) => {
            let ka: Vec<&String> = a.keys().collect();
            let kb: Vec<&String> = b.keys().collect();
            if ka != kb {
                return Err(format!("{path}: keys {ka:?} vs {kb:?}"));
            }
            a.iter().try_for_each(|(k, x)| json_close(x, &b[k], &format!("{path}.{k}")))
        }
        (a, b) if a == b => Ok(()),
        (a, b) => Err(format!("{path}: {a} vs {b}")),
    }
}

/// Runs a case in JSON mode and compares with its golden file. With
/// `UPDATE_GOLDEN=1` the golden file is rewritten instead.
pub fn check_case(case: &GoldenCase) -> Result<(), String> {
    let mut args: Vec<&str> = case.args.to_vec();
    args.extend(["--format", "json"]);
    let (code, stdout, stderr) = run(&args);
    if code != case.exit {
        return Err(format!("{}: exit {code}, expected {} (stderr: {stderr})", case.name, case.exit));
    }
    let got: Value = serde_json::from_str(&stdout).map_err(|e| format!("{}: stdout is not JSON: {e}", case.name))?;
    let path = golden_path(case.name);
    if std::env::var("UPDATE_GOLDEN").is_ok_and(|v| v == "1") {
        std::fs::create_dir_all(path.parent().expect("golden dir")).map_err(|e| e.to_string())?;
        std::fs::write(&path, format!("{}\n", serde_json::to_string_pretty(&got).expect("serializes")))
            .map_err(|e| e.to_string())?;
        return Ok(());
    }
    let text = std::fs::read_to_string(&path).map_err(|e| format!("{}: missing golden file: {e}", case.name))?;
    let want: Value = serde_json::from_str(&text).map_err(|e| format!("{}: golden is not JSON: {e}", case.name))?;
    json_close(&got, &want, case.name)
}

/// The fixed report schema: every check has exactly `axiom`, `residual`,
/// `pass`, sorted by axiom.
pub fn schema_ok(doc: &Value) -> Result<(), String> {
    let Some(checks) = doc.get("checks").and_then(Value::as_array) else {
        return if doc.get("error").is_some() { Ok(()) } else { Err("no checks and no error".into()) };
    };
    let mut prev = String::new();
    for c in checks {
        let obj = c.as_object().ok_or("check is not an object")?;
        let keys: Vec<&str> = obj.keys().map(String::as_str).collect();
        if keys != ["axiom", "pass", "residual"] {
            return Err(format!("check keys {keys:?}"));
        }
        let axiom = obj["axiom"].as_str().ok_or("axiom is not a string")?.to_string();
        if axiom < prev {
            return Err(format!("checks not sorted at {axiom}"));
        }
        prev = axiom;
        if !obj["pass"].is_boolean() || !(obj["residual"].is_number() || obj["residual"].is_null()) {
            return Err("bad pass or residual type".into());
        }
    }
    for key in ["command", "title", "tol", "pass", "max_residual", "observations", "result"] {
        if doc.get(key).is_none() {
            return Err(format!("missing field {key}"));
        }
    }
    Ok(())
}

pub fn fixture(name: &str) -> String {
    Path::new("tests/fixtures").join(name).display().to_string()
}
