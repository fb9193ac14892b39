//! Binary contract: exit codes (0 pass, 2 failed check, 1 error),
//! error spelling on stderr, CSV column headers, and the key=value
//! manifest sidecar.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_groupoid-rd"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("no signal")
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).expect("fixture written");
    path
}

const Z2: &str = r#"{"units":[0],"arrows":[
  {"id":0,"src":0,"rng":0,"inv":0},
  {"id":1,"src":0,"rng":0,"inv":1}],
  "product":[[0,0,0],[0,1,1],[1,0,1],[1,1,0]]}"#;

/// Well-formed but 1∘1 = 1 contradicts inv(1) = 1.
const Z2_BROKEN: &str = r#"{"units":[0],"arrows":[
  {"id":0,"src":0,"rng":0,"inv":0},
  {"id":1,"src":0,"rng":0,"inv":1}],
  "product":[[0,0,0],[0,1,1],[1,0,1],[1,1,1]]}"#;

#[test]
fn help_and_version_exit_zero() {
    for flag in ["--help", "--version"] {
        let o = run(&[flag]);
        assert_eq!(code(&o), 0, "{flag}: {}", stderr(&o));
    }
}

#[test]
fn usage_errors_exit_one() {
    let o = run(&["rd-scan", "--no-such-flag"]);
    assert_eq!(code(&o), 1);
    assert!(!stderr(&o).is_empty());

    let o = run(&["no-such-command"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn missing_input_file_exits_one_with_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("norm.csv");
    let o = run(&[
        "norm",
        "--groupoid",
        "/definitely/not/here.json",
        "--function",
        "/also/missing.json",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("error: IO"), "{}", stderr(&o));
}

#[test]
fn negative_exponents_are_rejected_before_any_work() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("scan.csv");
    let o = run(&[
        "rd-scan",
        "--groupoid",
        "builtin:path:4",
        "--length",
        "metric",
        "--t",
        "-1",
        "--family",
        "balls",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("NEGATIVE_T"), "{}", stderr(&o));
    assert!(!out.exists(), "no CSV may be written on error");
}

#[test]
fn validate_distinguishes_pass_fail_and_error() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(dir.path(), "z2.json", Z2);
    let o = run(&["validate", "--groupoid", good.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("ok: groupoid"), "{text}");
    assert!(text.trim_end().ends_with("PASS"), "{text}");

    let bad = write(dir.path(), "z2-broken.json", Z2_BROKEN);
    let o = run(&["validate", "--groupoid", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("invalid: groupoid"), "{text}");
    assert!(text.trim_end().ends_with("FAIL"), "{text}");

    let junk = write(dir.path(), "junk.json", "{\"units\": [0],");
    let o = run(&["validate", "--groupoid", junk.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("PARSE_ERROR"), "{}", stderr(&o));

    let extra = write(
        dir.path(),
        "extra.json",
        &Z2.replace("{\"units\"", "{\"color\":\"blue\",\"units\""),
    );
    let o = run(&["validate", "--groupoid", extra.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("SCHEMA_ERROR"), "{}", stderr(&o));
}

#[test]
fn info_reports_counts_and_inline_specs() {
    let o = run(&[
        "info",
        "--groupoid",
        "builtin:cyclic:6",
        "--length",
        "word:1",
        "--cocycle",
        "trivial",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("groupoid: units=1 arrows=6"), "{text}");
    assert!(text.contains("length: min=0 max=3"), "{text}");
    assert!(text.contains("cocycle: trivial"), "{text}");

    let o = run(&["info", "--space", "builtin:grid:4"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("space: points=16 diameter=6"), "{}", stdout(&o));
}

#[test]
fn growth_norm_and_scan_write_contract_csvs_with_manifests() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "f.json", r#"{"coeffs":[[0,1.0,0.0],[1,0.5,0.0]]}"#);

    let growth_out = dir.path().join("growth.csv");
    let o = run(&[
        "growth",
        "--space",
        "builtin:path:16",
        "--out",
        growth_out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("growth_exponent="), "{}", stdout(&o));
    let csv = std::fs::read_to_string(&growth_out).unwrap();
    assert_eq!(csv.lines().next(), Some("unit,r,count"));
    let manifest = std::fs::read_to_string(dir.path().join("growth.csv.manifest")).unwrap();
    assert!(manifest.contains("command=growth"), "{manifest}");
    assert!(manifest.contains("input.space="), "{manifest}");
    assert!(manifest.contains("tool_version="), "{manifest}");

    let norm_out = dir.path().join("norm.csv");
    let o = run(&[
        "norm",
        "--groupoid",
        "builtin:cyclic:2",
        "--function",
        f.to_str().unwrap(),
        "--out",
        norm_out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("reduced_norm="), "{}", stdout(&o));
    let csv = std::fs::read_to_string(&norm_out).unwrap();
    assert_eq!(csv.lines().next(), Some("unit,dim,spectral_norm,residual"));

    let scan_out = dir.path().join("scan.csv");
    let o = run(&[
        "rd-scan",
        "--groupoid",
        "builtin:path:6",
        "--length",
        "metric",
        "--t",
        "0,1",
        "--family",
        "balls",
        "--seed",
        "11",
        "--out",
        scan_out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let csv = std::fs::read_to_string(&scan_out).unwrap();
    assert_eq!(csv.lines().next(), Some("kind,t,param,ratio,bound,residual"));
    let manifest = std::fs::read_to_string(dir.path().join("scan.csv.manifest")).unwrap();
    for key in [
        "command=rd-scan",
        "seed=11",
        "family=ball_indicators",
        "input.groupoid=",
        "input.length=",
        "tool_version=",
    ] {
        assert!(manifest.contains(key), "missing {key} in:\n{manifest}");
    }
}

#[test]
fn seminorm_prints_the_value_for_every_mode() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "f.json", r#"{"coeffs":[[0,1.0,0.0],[1,0.5,0.5]]}"#);
    for mode in ["symmetric", "sup", "unit:0"] {
        let o = run(&[
            "seminorm",
            "--groupoid",
            "builtin:cyclic:4",
            "--length",
            "word:1",
            "--function",
            f.to_str().unwrap(),
            "--t",
            "1.5",
            "--mode",
            mode,
        ]);
        assert_eq!(code(&o), 0, "mode {mode}: {}", stderr(&o));
        assert!(stdout(&o).starts_with("seminorm="), "{}", stdout(&o));
    }
}

#[test]
fn permanence_checks_report_pass_and_fail_via_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let id_hom = write(dir.path(), "id.json", r#"{"map":[[0,0],[1,1]]}"#);
    let f = write(dir.path(), "f.json", r#"{"coeffs":[[0,1.0,0.0],[1,0.5,0.0]]}"#);

    let out = dir.path().join("pullback.csv");
    let o = run(&[
        "check-permanence",
        "pullback",
        "--domain",
        "builtin:cyclic:2",
        "--groupoid",
        "builtin:cyclic:2",
        "--hom",
        id_hom.to_str().unwrap(),
        "--length",
        "word:1",
        "--function",
        f.to_str().unwrap(),
        "--t",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.trim_end().ends_with("PASS"), "{text}");
    assert!(text.contains("check="), "{text}");
    let csv = std::fs::read_to_string(&out).unwrap();
    assert_eq!(csv.lines().next(), Some("check,lhs,rhs,pass,tol"));
    let manifest = std::fs::read_to_string(dir.path().join("pullback.csv.manifest")).unwrap();
    assert!(manifest.contains("tol.exact_identity="), "{manifest}");
    assert!(manifest.contains("tol.norm_inequality="), "{manifest}");

    // An absurdly small RD constant must fail the transfer bound.
    let o = run(&[
        "check-permanence",
        "transfer",
        "--domain",
        "builtin:cyclic:2",
        "--groupoid",
        "builtin:cyclic:2",
        "--hom",
        id_hom.to_str().unwrap(),
        "--length",
        "word:1",
        "--function",
        f.to_str().unwrap(),
        "--constant",
        "0.0001",
        "--t",
        "1",
    ]);
    assert_eq!(code(&o), 2, "{}\n{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).trim_end().ends_with("FAIL"), "{}", stdout(&o));
}

#[test]
fn dichotomy_writes_the_contract_csv_and_classifies() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("dichotomy.csv");
    let o = run(&[
        "dichotomy",
        "--family",
        "paths",
        "--sizes",
        "4,6,8",
        "--t",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("classification="), "{}", stdout(&o));
    let csv = std::fs::read_to_string(&out).unwrap();
    assert_eq!(
        csv.lines().next(),
        Some("family,size,t,growth_exponent,scan_max_ratio,witness_bound,classification")
    );
}

#[test]
fn witness_certificates_drive_the_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("witness.csv");
    let o = run(&[
        "--workers",
        "1",
        "witness",
        "--groupoid",
        "builtin:tree:4",
        "--length",
        "metric",
        "--unit",
        "0",
        "--radius",
        "4",
        "--t",
        "1,2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("fiber=31"), "{text}");
    assert!(text.trim_end().ends_with("PASS"), "{text}");
    let manifest = std::fs::read_to_string(dir.path().join("witness.csv.manifest")).unwrap();
    assert!(manifest.contains("tol.cert="), "{manifest}");
}
