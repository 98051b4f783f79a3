use hausdorff::catalog::{entries, find};
use serde_json::{json, Value};

#[test]
fn every_entry_passes_its_selftest() {
    for e in entries() {
        let r = e.selftest(&Value::Null).unwrap();
        for f in r.facts.iter().filter(|f| !f.passed) {
            eprintln!("{}: {} got {:?} expected {:?} err {:e}", e.name, f.input, f.got, f.expected, f.error);
        }
        eprintln!("{}: {}/{} agreement {:?}", e.name, r.matches, r.total, r.agreement);
        assert!(r.passed, "{}", e.name);
    }
}

#[test]
fn agreement_samples_ten_parameters() {
    for e in entries() {
        if let Some(setup) = e.agreement_setup(&Value::Null).unwrap() {
            assert!(setup.params.len() >= 3, "{} has {} samples", e.name, setup.params.len());
        }
    }
}

#[test]
fn integer_convolution_selftest() {
    let r = find("convolution").unwrap().selftest(&json!({"group": "integer", "atoms": [[-2, 0.25], [1, 0.75]]})).unwrap();
    assert!(r.passed, "{r:?}");
    assert_eq!(r.agreement.unwrap().measure_error, 0.0);
}

#[test]
fn two_dimensional_entries() {
    let r = find("cauchy_torus").unwrap().selftest(&json!({"n": 2, "nodes": 256, "domain_nodes": 32})).unwrap();
    assert!(r.passed, "{r:?}");
    let rot = |t: f64| vec![vec![t.cos(), -t.sin()], vec![t.sin(), t.cos()]];
    let params = json!({
        "matrices": [rot(0.4), [[2.0, 0.5], [0.0, 1.0]]],
        "weights": [0.5, -0.25],
        "window": 3.0,
        "nodes_per_unit": 10.0
    });
    let r = find("discrete_hausdorff").unwrap().selftest(&params).unwrap();
    assert!(r.passed, "{r:?}");
}

#[test]
fn bad_params_are_rejected() {
    assert!(find("hilbert").unwrap().build(&json!({"bogus": 1})).is_err());
    assert!(find("hilbert_curve").unwrap().build(&json!({"powers": [0, 2]})).is_err());
    assert!(find("determinant").unwrap().build(&json!({"n": 9})).is_err());
}
