use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mukai-verify"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

/// Report lines with timings removed.
fn strip_timings(jsonl: &str) -> String {
    jsonl
        .lines()
        .map(|l| {
            let mut v: serde_json::Value = serde_json::from_str(l).expect("json line");
            v.as_object_mut().expect("object").remove("millis");
            format!("{v}\n")
        })
        .collect()
}

fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

/// Compares against a golden file; `UPDATE_GOLDEN=1` rewrites it.
fn check_golden(name: &str, args: &[&str], code: i32) {
    let mut all = args.to_vec();
    all.extend(["--format", "jsonl"]);
    let out = run(&all);
    assert_eq!(out.status.code(), Some(code), "{}", String::from_utf8_lossy(&out.stderr));
    let body = strip_timings(&String::from_utf8(out.stdout).unwrap());
    let path = golden_path(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &body).unwrap();
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(body, expected, "golden {name} differs");
}

#[test]
fn golden_chow_g7() {
    check_golden("chow_g7.jsonl", &["chow", "--genus", "7"], 0);
}

#[test]
fn golden_linkage_g7() {
    check_golden("linkage_g7.jsonl", &["linkage", "--genus", "7", "--prime", "10007", "--seed", "1"], 0);
}

#[test]
fn golden_linkage_g9() {
    check_golden("linkage_g9.jsonl", &["linkage", "--genus", "9"], 0);
}

#[test]
fn golden_linear_system() {
    check_golden("linear_system.jsonl", &["linear-system", "--seed", "3"], 0);
}

#[test]
fn golden_lines() {
    check_golden("lines.jsonl", &["lines", "--seed", "2"], 0);
}

#[test]
fn golden_covering() {
    check_golden("covering.jsonl", &["covering", "--seed", "1"], 0);
}

#[test]
fn every_row_carries_timing() {
    let out = run(&["chow", "--genus", "8", "--format", "jsonl"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    let meta: serde_json::Value = serde_json::from_str(lines.next().unwrap()).unwrap();
    assert_eq!(meta["meta"]["seed"], 1);
    assert_eq!(meta["meta"]["version"], env!("CARGO_PKG_VERSION"));
    for l in lines {
        let v: serde_json::Value = serde_json::from_str(l).unwrap();
        assert!(v["millis"].is_u64(), "{l}");
        assert_eq!(v["suite"], "chow");
    }
}

#[test]
fn usage_errors_exit_3() {
    for args in [
        &["chow", "--prime", "10008"][..],
        &["covering", "--genus", "8"],
        &["linkage", "--genus", "11"],
        &["nonsense"],
        &["chow", "--points", "0"],
        &["chow", "--format", "xml"],
        &["chow", "--config", "/nonexistent/file.toml"],
    ] {
        assert_eq!(run(args).status.code(), Some(3), "{args:?}");
    }
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn inconclusive_and_config_file() {
    let dir = std::env::temp_dir().join(format!("mukai-verify-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.toml");
    let out = dir.join("report.jsonl");
    std::fs::write(&cfg, format!("genus = 10\nformat = \"jsonl\"\nout = {:?}\n", out.to_str().unwrap())).unwrap();
    // the genus-10 Betti display is recorded, not judged
    let o = run(&["linkage", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("\"status\":\"inconclusive\""));
    assert!(!text.contains("\"status\":\"fail\""));
    // flags override the file
    let o = run(&["linkage", "--config", cfg.to_str().unwrap(), "--genus", "9", "--format", "text"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(std::fs::read_to_string(&out).unwrap().contains("overall: PASS"));
    std::fs::write(&cfg, "genus = 9\nbogus = 1\n").unwrap();
    assert_eq!(run(&["linkage", "--config", cfg.to_str().unwrap()]).status.code(), Some(3));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn same_config_same_body() {
    let a = run(&["linkage", "--genus", "8", "--seed", "5", "--format", "jsonl"]);
    let b = run(&["linkage", "--genus", "8", "--seed", "5", "--format", "jsonl", "--sequential"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(
        strip_timings(&String::from_utf8(a.stdout).unwrap()),
        strip_timings(&String::from_utf8(b.stdout).unwrap())
    );
}
