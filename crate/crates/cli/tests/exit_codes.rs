use std::path::Path;
use std::process::Command;

fn tspipe(args: &[&str]) -> (Option<i32>, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_tspipe")).args(args).output().unwrap();
    (out.status.code(), String::from_utf8_lossy(&out.stderr).into_owned())
}

#[test]
fn missing_file_is_a_usage_error() {
    let (code, stderr) = tspipe(&["stats", "/nonexistent/series.csv"]);
    assert_eq!(code, Some(2));
    assert!(stderr.contains("series.csv"));
}

#[test]
fn empty_series_cannot_be_plotted() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.csv");
    std::fs::write(&empty, "").unwrap();
    assert_eq!(tspipe(&["plot", empty.to_str().unwrap()]).0, Some(2));
}

#[test]
fn bad_flags_are_usage_errors() {
    assert_eq!(tspipe(&["stats", "x.csv", "--interval", "5 parsecs"]).0, Some(2));
    assert_eq!(tspipe(&["bench", "x.csv", "--metric", "auc"]).0, Some(2));
}

#[test]
fn domain_errors_exit_one() {
    let fx = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let dir = tempfile::tempdir().unwrap();
    // two values cannot give outlier fences
    let short = dir.path().join("short.csv");
    std::fs::write(&short, "Date,Value\n01/01/2015 00:00,1\n01/01/2015 01:00,2\n").unwrap();
    assert_eq!(tspipe(&["clean", short.to_str().unwrap(), "--outliers"]).0, Some(1));
    let (code, _) = tspipe(&[
        "stats",
        fx.join("gap.csv").to_str().unwrap(),
        "--processmissing",
        "false",
    ]);
    assert_eq!(code, Some(0));
}
