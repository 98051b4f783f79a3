use std::path::Path;

use hausdorff::cli::run;
use serde_json::Value;

fn run_to(dir: &Path, name: &str, args: &[&str]) -> (i32, String) {
    let out = dir.join(name);
    let mut argv = vec!["hausdorff"];
    argv.extend_from_slice(args);
    argv.extend_from_slice(&["--output", out.to_str().unwrap()]);
    let code = run(argv);
    (code, std::fs::read_to_string(&out).unwrap_or_default())
}

fn without_timestamp(report: &str) -> String {
    let mut v: Value = serde_json::from_str(report).unwrap();
    v.as_object_mut().unwrap().remove("timestamp").expect("timestamp field");
    serde_json::to_string(&v).unwrap()
}

#[test]
fn bounds_matches_library_value() {
    let dir = tempfile::tempdir().unwrap();
    let (code, text) = run_to(dir.path(), "b.json", &["bounds", "--op", "discrete_hausdorff", "--p", "2"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&text).unwrap();
    let op = hausdorff::catalog::find("discrete_hausdorff").unwrap().build(&Value::Null).unwrap();
    assert_eq!(v["result"]["bound"].as_f64().unwrap(), op.phi_norm_ap(2.0).unwrap());
    assert_eq!(v["config"]["operator"]["name"], "discrete_hausdorff");
    assert_eq!(v["config"]["subcommand"], "bounds");
}

#[test]
fn selftest_reports_twenty_matches() {
    let dir = tempfile::tempdir().unwrap();
    let (code, text) = run_to(dir.path(), "s.json", &["catalog", "selftest", "determinant", "--n", "3"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!((v["result"]["matches"].as_u64(), v["result"]["total"].as_u64()), (Some(20), Some(20)));
}

#[test]
fn torus_points_are_angles() {
    let dir = tempfile::tempdir().unwrap();
    let (code, text) =
        run_to(dir.path(), "t.csv", &["apply", "--op", "cauchy_torus", "--input", "monomial:2", "--at", "0.7", "--format", "csv"]);
    assert_eq!(code, 0);
    let row: Vec<f64> = text.lines().nth(1).unwrap().split(',').skip(1).map(|s| s.parse().unwrap()).collect();
    // on the circle the principal value is half the boundary data
    let half = hausdorff::Complex64::from_polar(0.5, 1.4);
    assert!((row[0] - half.re).abs() < 1e-12 && (row[1] - half.im).abs() < 1e-12, "{row:?}");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run_to(dir.path(), "a", &["frobnicate"]).0, 2);
    assert_eq!(run_to(dir.path(), "b", &["bounds", "--op", "nope"]).0, 2);
    assert_eq!(run_to(dir.path(), "c", &["bounds", "--op", "hilbert", "--params", "{\"bogus\": 1}"]).0, 2);
    assert_eq!(run_to(dir.path(), "d", &["bounds", "--op", "hilbert", "--format", "csv"]).0, 2);
    // ∫Φ = 2 on a translation operator: the regularity spread about 1 is 1
    let (code, _) = run_to(
        dir.path(),
        "e",
        &["regularity", "--op", "discrete_hausdorff", "--params", "{\"matrices\": [[[1.0]]], \"weights\": [2.0]}", "--tolerance", "1e-6"],
    );
    assert_eq!(code, 1);
}

#[test]
fn csv_grid_output() {
    let dir = tempfile::tempdir().unwrap();
    let (code, text) = run_to(
        dir.path(),
        "g.csv",
        &["apply", "--op", "hilbert", "--input", "lorentzian", "--at", "0.5", "--at", "-1", "--format", "csv"],
    );
    assert_eq!(code, 0);
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "x,re,im");
    let fields: Vec<f64> = rows[1].split(',').map(|s| s.parse().unwrap()).collect();
    assert!((fields[1] - 0.4).abs() < 1e-3);
    assert!(rows[2].starts_with("-1,"));
}

#[test]
fn reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let commands: Vec<Vec<&str>> = vec![
        vec!["contraction", "--op", "discrete_hilbert", "--p", "4", "--trials", "12", "--seed", "7"],
        vec!["contraction", "--op", "convolution", "--p", "inf", "--trials", "6", "--seed", "3"],
        vec!["bounds", "--op", "discrete_hausdorff", "--p", "1", "--q", "2"],
        vec!["apply", "--op", "cauchy_torus", "--input", "monomial:2", "--params", "{\"domain_nodes\": 16}"],
        vec!["regularity", "--op", "convolution", "--input", "offset-gaussian:2", "--limit", "2"],
        vec!["atoms", "--op", "discrete_hausdorff", "--count", "4", "--per-atom", "3", "--seed", "11"],
        vec!["h1", "--op", "discrete_hausdorff", "--terms", "3", "--seed", "5", "--q", "inf"],
        vec!["doubling", "--domain", "{\"point_kind\": {\"real_vector\": 1}, \"window\": 10, \"nodes_per_unit\": 50}"],
        vec!["catalog", "list"],
        vec!["catalog", "build", "hilbert_curve"],
        vec!["catalog", "selftest", "discrete_hilbert"],
    ];
    for (i, args) in commands.iter().enumerate() {
        let (c1, first) = run_to(dir.path(), &format!("{i}.json"), args);
        let (c2, second) = run_to(dir.path(), &format!("{i}.json"), args);
        assert_eq!((c1, c2), (0, 0), "{args:?}");
        assert_eq!(without_timestamp(&first), without_timestamp(&second), "{args:?}");
        let v: Value = serde_json::from_str(&first).unwrap();
        assert!(v["config"]["subcommand"].is_string(), "{args:?}");
    }
}
