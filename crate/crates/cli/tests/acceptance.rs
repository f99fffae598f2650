//! Acceptance gate: one pass/fail line per criterion.
//!
//! Criteria 1 to 9 come from `report --all --seed 7`, run through the
//! binary; criterion 10 checks that this report is byte-stable and that
//! every file of the malformed corpus exits 2 with its expected diagnostic.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode, Output};

use serde_json::Value;

/// Seed of the acceptance report.
const SEED: &str = "7";
/// Size of the malformed-input corpus.
const MALFORMED_FILES: usize = 10;

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn rickart(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rickart"))
        .args(args)
        .env_remove("RICKART_SEED")
        .current_dir(fixtures())
        .output()
        .expect("binary runs")
}

/// Arguments that feed `file` to the command whose schema it breaks.
fn malformed_args(file: &str) -> Vec<String> {
    let path = format!("malformed/{file}");
    if file.starts_with("series_") {
        vec!["series".into(), "--input".into(), path]
    } else if file.starts_with("partition_") {
        ["spectral", "--input", "diag12.json", "--mesh", "1", "--partition"]
            .iter()
            .map(|s| s.to_string())
            .chain([path])
            .collect()
    } else {
        vec!["norm".into(), "--input".into(), path]
    }
}

fn malformed_corpus() -> Result<usize, String> {
    let dir = fixtures().join("malformed");
    let table = fs::read_to_string(dir.join("expected.tsv")).map_err(|e| e.to_string())?;
    let expected: Vec<(&str, &str)> = table.lines().filter_map(|l| l.split_once('\t')).collect();
    let mut files: Vec<String> = fs::read_dir(&dir)
        .map_err(|e| e.to_string())?
        .filter_map(|e| e.ok())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .filter(|n| n.ends_with(".json"))
        .collect();
    files.sort();
    if files.len() != MALFORMED_FILES || expected.len() != MALFORMED_FILES {
        return Err(format!("{} files, {} expectations", files.len(), expected.len()));
    }
    for file in &files {
        let want = expected
            .iter()
            .find(|(f, _)| f == file)
            .map(|(_, d)| *d)
            .ok_or_else(|| format!("{file}: no expected diagnostic"))?;
        let args = malformed_args(file);
        let out = rickart(&args.iter().map(String::as_str).collect::<Vec<_>>());
        let stderr = String::from_utf8_lossy(&out.stderr);
        if out.status.code() != Some(2) {
            return Err(format!("{file}: exit {:?}", out.status.code()));
        }
        if !stderr.contains(want) {
            return Err(format!("{file}: diagnostic {:?}, expected {want:?}", stderr.trim()));
        }
        let v: Value = serde_json::from_slice(&out.stdout).map_err(|e| format!("{file}: stdout: {e}"))?;
        if v["error"]["field"].as_str().is_none_or(|f| f.is_empty()) {
            return Err(format!("{file}: error report names no field"));
        }
    }
    Ok(files.len())
}

fn main() -> ExitCode {
    let first = rickart(&["report", "--all", "--seed", SEED]);
    let second = rickart(&["report", "--all", "--seed", SEED]);
    let report: Value = serde_json::from_slice(&first.stdout).unwrap_or(Value::Null);
    let checks = report["checks"].as_array().cloned().unwrap_or_default();

    let mut all = true;
    for id in 1..=9 {
        let prefix = format!("criterion {id}:");
        let found = checks
            .iter()
            .find(|c| c["name"].as_str().is_some_and(|n| n.starts_with(&prefix)));
        let (pass, line) = match found {
            Some(c) => (
                c["pass"].as_bool() == Some(true),
                format!(
                    "{} - {}",
                    c["name"].as_str().unwrap_or_default(),
                    c["detail"].as_str().unwrap_or_default()
                ),
            ),
            None => (false, format!("criterion {id}: missing from the report")),
        };
        all &= pass;
        println!("[{}] {line}", if pass { "PASS" } else { "FAIL" });
    }

    let stable = first.stdout == second.stdout && !first.stdout.is_empty();
    let exits = first.status.code() == Some(0) && second.status.code() == Some(0);
    let corpus = malformed_corpus();
    let pass = stable && exits && corpus.is_ok();
    all &= pass;
    println!(
        "[{}] criterion 10: cli - report --all --seed {SEED}: exit {:?}/{:?}, byte-stable: {stable}; malformed corpus: {}",
        if pass { "PASS" } else { "FAIL" },
        first.status.code(),
        second.status.code(),
        match &corpus {
            Ok(n) => format!("{n} files exit 2 with field diagnostics"),
            Err(e) => e.clone(),
        }
    );

    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
