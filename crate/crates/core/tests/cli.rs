use std::io::Write;
use std::process::{Command, Output, Stdio};

fn evalues(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_evalues"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    {
        let mut pipe = child.stdin.take().unwrap();
        if let Some(text) = stdin {
            pipe.write_all(text.as_bytes()).unwrap();
        }
    }
    child.wait_with_output().unwrap()
}

fn stdout_of(args: &[&str]) -> String {
    let out = evalues(args, None);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn merge_average() {
    assert_eq!(stdout_of(&["merge-e", "--method", "average", "4", "0.5"]), "2.25\n");
}

#[test]
fn product_adjustment() {
    assert_eq!(stdout_of(&["adjust", "--method", "product", "4", "0.5"]), "2 0.5\n");
}

#[test]
fn power_calibrator_at_a_quarter() {
    assert_eq!(
        stdout_of(&["calibrate", "--method", "power", "--kappa", "0.5", "0.25"]),
        "1\n"
    );
}

#[test]
fn bonferroni_merge() {
    assert_eq!(
        stdout_of(&["merge-p", "--method", "bonferroni", "0.01", "0.04", "0.1"]),
        "0.03\n"
    );
}

#[test]
fn fisher_closed_testing() {
    let text = stdout_of(&["fact", "--method", "fisher", "0.01", "0.8"]);
    let v: Vec<f64> = text.split_whitespace().map(|t| t.parse().unwrap()).collect();
    assert!((v[0] - 0.0466265).abs() < 1e-6);
    assert_eq!(v[1], 0.8);
}

#[test]
fn values_from_stdin_and_file() {
    let out = evalues(&["merge-e", "--method", "average", "-"], Some("4\n0.5\n"));
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "2.25\n");

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("values.txt");
    std::fs::write(&path, "4, 0.5\n").unwrap();
    let text = stdout_of(&["merge-e", "--method", "average", "--input", path.to_str().unwrap()]);
    assert_eq!(text, "2.25\n");
}

#[test]
fn malformed_token_is_a_usage_error() {
    let out = evalues(&["merge-e", "--method", "average", "4", "x"], None);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("token 2"), "{err}");
}

#[test]
fn out_of_range_p_value_is_a_usage_error() {
    let out = evalues(&["merge-p", "--method", "bonferroni", "1.5"], None);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    assert_eq!(evalues(&["bogus"], None).status.code(), Some(2));
}

#[test]
fn validate_reports_invalid_merger() {
    let out = evalues(&["validate", "--method", "product", "--trials", "50"], None);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("fail product"), "{text}");
    assert!(text.contains("prob,values"));
}

#[test]
fn validate_accepts_valid_merger() {
    let out = evalues(&["validate", "--method", "average", "--trials", "200"], None);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("pass average"));
}

#[test]
fn validate_product_under_independence() {
    let out = evalues(
        &[
            "validate",
            "--method",
            "product",
            "--class",
            "independent",
            "--trials",
            "200",
        ],
        None,
    );
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn jeffreys_categories() {
    assert_eq!(
        stdout_of(&["jeffreys", "2", "20", "200"]),
        "bare-mention\nstrong\ndecisive\n"
    );
}

#[test]
fn ville_conversion() {
    assert_eq!(stdout_of(&["cross", "--method", "ville", "2", "0.5", "4"]), "0.25\n");
}

#[test]
fn simulate_header_lists_methods() {
    let text = stdout_of(&[
        "simulate",
        "combining",
        "--method",
        "product-lr,universal",
        "--seeds",
        "3",
        "--n-obs",
        "5",
    ]);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("index,product-lr,universal"));
    assert_eq!(lines.count(), 5);
}
