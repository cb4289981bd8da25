mod common;

use common::*;

#[test]
fn exit_codes() {
    assert_eq!(check_exit_codes(), Ok(()));
}

#[test]
fn help_exits_zero() {
    assert_eq!(exit_code(&["--help"]), 0);
    assert_eq!(exit_code(&["scan", "--help"]), 0);
}

#[test]
fn found_report_is_stable() {
    assert_eq!(check_golden("found.json", FOUND_ARGS, 0), Ok(()));
}

#[test]
fn not_found_report_is_stable() {
    assert_eq!(check_golden("notfound.json", NOT_FOUND_ARGS, 3), Ok(()));
}

#[test]
fn trace_only_report_is_stable() {
    let mut args = FOUND_ARGS.to_vec();
    args.push("--trace-only");
    assert_eq!(check_golden("trace_only.json", &args, 0), Ok(()));
}

#[test]
fn csv_and_json_inputs_agree() {
    assert_eq!(check_ingestion_round_trip(), Ok(()));
}

#[test]
fn summary_names_the_outcome() {
    let out = gridscan(FOUND_ARGS);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().last().unwrap().starts_with("found: a=8"), "{text}");
    let out = gridscan(NOT_FOUND_ARGS);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().last().unwrap().starts_with("not found"), "{text}");
}

#[test]
fn plot_draws_kept_cells_and_chain() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    let svg = dir.path().join("p.svg");
    let mut args = FOUND_ARGS.to_vec();
    args.extend(["--report", report.to_str().unwrap()]);
    assert_eq!(exit_code(&args), 0);
    let parsed =
        gridscan_core::RunReport::from_json(&std::fs::read_to_string(&report).unwrap()).unwrap();
    let k = parsed.kept_cells.as_ref().unwrap().len();
    let code = exit_code(&[
        "plot", "--synthetic", "sine-curve", "--count", "308", "--outliers", "0.08", "--seed",
        "7", "--report", report.to_str().unwrap(), "--output", svg.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(&svg).unwrap();
    assert_eq!(text.matches("<rect").count(), k);
    assert_eq!(text.matches("<line").count(), k - 1);
    assert_eq!(text.matches("<circle").count(), 308);
}

#[test]
fn plot_rejects_mismatched_dimension() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    let mut args = FOUND_ARGS.to_vec();
    args.extend(["--report", report.to_str().unwrap()]);
    assert_eq!(exit_code(&args), 0);
    let svg = dir.path().join("p.svg");
    let code = exit_code(&[
        "plot", "--synthetic", "uniform", "--dim", "3", "--report", report.to_str().unwrap(),
        "--output", svg.to_str().unwrap(),
    ]);
    assert_eq!(code, 2);
}

#[test]
fn bench_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bench.csv");
    let code = exit_code(&[
        "bench", "--sizes", "500,1000", "--runs", "1", "--output", out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("method,J,N,millis,reached,threads"));
    assert_eq!(lines.count(), 4);
    assert_eq!(exit_code(&["bench", "--sizes", "1000,500"]), 1);
}
