use std::process::Command;

use conestab::cli::{self, AnalysisReport, Provenance, Status};

fn conestab(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_conestab"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn json_report(args: &[&str]) -> (i32, AnalysisReport) {
    let mut full = args.to_vec();
    full.push("--json");
    let (code, stdout, stderr) = conestab(&full);
    let report: AnalysisReport = serde_json::from_str(&stdout)
        .unwrap_or_else(|e| panic!("bad JSON ({e}) for {args:?}: {stdout}\n{stderr}"));
    report.validate().unwrap();
    (code, report)
}

fn status_of(r: &AnalysisReport, claim_prefix: &str) -> Status {
    r.verdicts
        .iter()
        .find(|v| v.claim.starts_with(claim_prefix))
        .unwrap_or_else(|| panic!("no verdict starting with {claim_prefix:?}"))
        .status
}

#[test]
fn page_json() {
    let (code, r) = json_report(&["page"]);
    assert_eq!(code, 0);
    assert_eq!(r.pipeline, "page");
    assert!((r.outputs["kappa_closed_form"].value - 182.219).abs() < 1e-2);
    assert!(r.outputs["ratio"].value < 2.65);
    assert_eq!(status_of(&r, "cone unstable"), Status::Verified);
    assert!(r.verdicts.iter().all(|v| v.status == Status::Verified));
}

#[test]
fn clw_json_is_conjectural() {
    let (code, r) = json_report(&["clw"]);
    assert_eq!(code, 0);
    assert!((r.outputs["lambda"].value - 1.886).abs() < 1e-2);
    assert!(r.outputs["ratio"].value < 2.17);
    assert_eq!(r.outputs["k_bound"].provenance, Provenance::External);
    assert_eq!(status_of(&r, "12K/κ < 2.17"), Status::Conjectural);
    assert_eq!(status_of(&r, "cone unstable"), Status::Conjectural);
    assert_eq!(status_of(&r, "b = 2.790"), Status::Verified);
}

#[test]
fn clw_k_override_flows_into_ratio() {
    let (code, r) = json_report(&["clw", "--clw-k-bound", "2.0"]);
    assert_eq!(code, 1);
    assert!((r.outputs["ratio"].value - 24.0 / r.outputs["kappa"].value).abs() < 1e-9);
    assert_eq!(status_of(&r, "12K/κ < 2.17"), Status::Failed);
}

#[test]
fn clw_rejects_degenerate_class() {
    let (code, stdout, stderr) = conestab(&["clw", "--a", "0.5", "--json"]);
    assert_eq!(code, 1);
    assert!(stderr.contains("error"));
    let r: AnalysisReport = serde_json::from_str(&stdout).unwrap();
    assert_eq!(status_of(&r, "pipeline completed"), Status::Failed);
}

#[test]
fn cone_threshold_boundary_is_undecided() {
    let (code, r) = json_report(&["cone-threshold", "--n", "10", "--lambda", "16"]);
    assert_eq!(code, 0);
    assert_eq!(status_of(&r, "radial variation"), Status::Undecided);
    assert_eq!(status_of(&r, "discrete radial form"), Status::Verified);

    let (code, r) = json_report(&["cone-threshold", "--n", "9"]);
    assert_eq!(code, 0);
    assert_eq!(status_of(&r, "radial variation"), Status::Verified);
    assert!(r.outputs["form_value"].value < 0.0);
}

#[test]
fn product_and_ke() {
    let (_, r) = json_report(&["product", "--n1", "2", "--n2", "2"]);
    assert_eq!(status_of(&r, "cone over the product"), Status::Verified);
    let (_, r) = json_report(&["product", "--n1", "4", "--n2", "5"]);
    assert_eq!(status_of(&r, "cone over the product"), Status::Undecided);
    let (_, r) = json_report(&["ke", "--n", "5", "--h11", "2"]);
    assert_eq!(status_of(&r, "cone over the Kähler-Einstein"), Status::Verified);
    let (_, r) = json_report(&["ke", "--n", "11", "--h11", "5"]);
    assert_eq!(status_of(&r, "cone over the Kähler-Einstein"), Status::Undecided);
}

#[test]
fn cp2_check_point_and_search() {
    let (code, r) = json_report(&["cp2-check"]);
    assert_eq!(code, 0);
    assert!((r.outputs["min_coefficient"].value - 0.36).abs() < 1e-12);
    let (code, r) = json_report(&["cp2-check", "--alpha", "4", "--beta", "3"]);
    assert_eq!(code, 1);
    assert_eq!(r.outputs["c_b"].value, -12.0);
    let (code, r) = json_report(&["cp2-check", "--search", "3.9..4.3"]);
    assert_eq!(code, 0);
    assert_eq!(status_of(&r, "scan contains the witness"), Status::Verified);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(conestab(&["cone-threshold", "--n", "2"]).0, 2);
    assert_eq!(conestab(&["no-such-command"]).0, 2);
    assert_eq!(conestab(&["cp2-check", "--search", "4..3"]).0, 2);
    assert_eq!(conestab(&["polytope-integrals", "--shape", "custom"]).0, 2);
    assert_eq!(conestab(&["--help"]).0, 0);
}

#[test]
fn csv_dumps() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("witness.csv");
    let (code, _, _) = conestab(&["cone-threshold", "--n", "5", "--csv", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("log_r,r,f,g"));
    assert!(lines.count() > 1000);

    let path = dir.path().join("sweep.csv");
    conestab(&["clw", "--csv", path.to_str().unwrap()]);
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 12);
}

#[test]
fn custom_polygon_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("square.txt");
    std::fs::write(&path, "# unit square\n1 0 0\n0 1 0\n-1 0 1\n0 -1 1\n").unwrap();
    let (code, r) = json_report(&["polytope-integrals", "--shape", "custom", "--facets", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(r.outputs["area"].value, 1.0);
    assert!((r.outputs["scal_b"].value - 4.0).abs() < 1e-12);
}

#[test]
fn json_keys_are_stable_across_runs() {
    let (_, a) = json_report(&["clw"]);
    let (_, b) = json_report(&["clw"]);
    assert_eq!(a.outputs.keys().collect::<Vec<_>>(), b.outputs.keys().collect::<Vec<_>>());
    assert_eq!(a.inputs, b.inputs);
    let top: serde_json::Value = serde_json::to_value(&a).unwrap();
    let keys: Vec<_> = top.as_object().unwrap().keys().cloned().collect();
    assert_eq!(keys, ["inputs", "outputs", "pipeline", "runtime_ms", "verdicts"]);
}

#[test]
fn numbers_carry_at_most_twelve_significant_digits() {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = cli::run(["conestab", "page", "--json"], &mut out, &mut err);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_slice(&out).unwrap();
    let mut stack = vec![&v];
    while let Some(x) = stack.pop() {
        match x {
            serde_json::Value::Number(n) => {
                let s = n.to_string();
                let mantissa = s.split(['e', 'E']).next().unwrap();
                let digits = mantissa.trim_start_matches('-').replace('.', "");
                let digits = digits.trim_start_matches('0');
                assert!(digits.len() <= 12, "{s}");
            }
            serde_json::Value::Array(a) => stack.extend(a),
            serde_json::Value::Object(o) => stack.extend(o.values()),
            _ => {}
        }
    }
}
