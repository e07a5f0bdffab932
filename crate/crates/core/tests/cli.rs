use std::process::{Command, Output};

use formtensor::field::manufactured;
use formtensor::models::registry::{build, ModelParams};
use formtensor::models::GasState;
use formtensor::symmetry::{self, MetricSignature};
use formtensor::tensor;
use serde_json::Value;

fn formtensor(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_formtensor")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn matrix(v: &Value) -> Vec<Vec<f64>> {
    serde_json::from_value(v.clone()).unwrap()
}

#[test]
fn gas_tensor() {
    let v = json(&formtensor(&[
        "tensor", "--model", "gas", "--params", "g=polytropic,gamma=2", "--state", r#"{"rho":1,"q":[1]}"#,
    ]));
    assert_eq!(matrix(&v["T"]), [[-1.0, -1.5], [1.0, 1.5]]);
    assert_eq!(v["pressure"].as_f64(), Some(0.5));
}

#[test]
fn lorentz_verdict() {
    let v = json(&formtensor(&["invariance", "--model", "maxwell-lorentz", "--metric", "minkowski"]));
    assert_eq!(v["verdict"], "invariant & symmetric");
    assert_eq!(v["agree"], true);
}

#[test]
fn exit_codes() {
    assert_eq!(formtensor(&["models"]).status.code(), Some(0));
    assert_eq!(formtensor(&["tensor", "--model", "nope", "--state", "{}"]).status.code(), Some(1));
    assert_eq!(formtensor(&["tensor", "--model", "gas"]).status.code(), Some(1));
    assert_eq!(formtensor(&["verify", "--case", "non-closed-form"]).status.code(), Some(2));
    assert_eq!(formtensor(&["verify", "--case", "exact-form"]).status.code(), Some(2));
    assert_eq!(formtensor(&["verify", "--case", "maxwell-plane-wave"]).status.code(), Some(0));
}

#[test]
fn models_lists_cases() {
    let v = json(&formtensor(&["models"]));
    let cases: Vec<String> = serde_json::from_value(v["cases"].clone()).unwrap();
    assert_eq!(cases, manufactured::CASE_NAMES);
    assert!(v["models"].as_array().unwrap().iter().any(|m| m["name"] == "relativistic"));
}

#[test]
fn out_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let args = ["invariance", "--model", "iso-p1", "--states", "10"];
    let direct = formtensor(&args);
    let to_file = formtensor(&[&args[..], &["--out", path.to_str().unwrap()]].concat());
    assert!(to_file.status.success());
    assert!(to_file.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), direct.stdout);
}

#[test]
fn cli_is_a_thin_wrapper() {
    let params = ModelParams::parse("g=polytropic,gamma=2").unwrap();
    let gas = build("gas", &params).unwrap();
    let alpha = GasState::new(1.3, vec![0.4], 0.0).encode();
    let t = tensor::assemble_general(&gas, &alpha).unwrap();
    let v = json(&formtensor(&[
        "tensor", "--model", "gas", "--params", "g=polytropic,gamma=2", "--state", r#"{"rho":1.3,"q":[0.4]}"#,
    ]));
    assert_eq!(matrix(&v["T"]), t.rows());

    let mx = build("maxwell-lorentz", &ModelParams::default()).unwrap();
    let metric = MetricSignature::minkowski(4, 1.0).unwrap();
    let states = symmetry::sample_states(&mx, 30, 7);
    let rep = symmetry::equivalence_on(&mx, &metric, &states, 7).unwrap();
    let v = json(&formtensor(&[
        "invariance", "--model", "maxwell-lorentz", "--metric", "minkowski", "--states", "30", "--seed", "7",
    ]));
    assert_eq!(v["invariance_defect"].as_f64(), Some(rep.invariance_defect));
    assert_eq!(v["symmetry_defect"].as_f64(), Some(rep.symmetry_defect));
    assert_eq!(v["verdict"], rep.verdict.as_str());
}

#[test]
fn reports_round_trip() {
    let out = formtensor(&["verify", "--case", "gas-uniform"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.ends_with('\n'));
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(formtensor::report::to_json(&v).unwrap(), text);
}

#[test]
fn field_file_verification() {
    let dir = tempfile::tempdir().unwrap();
    let case = manufactured::case("maxwell-plane-wave", 8).unwrap();
    let manifest = dir.path().join("wave.json");
    case.field.write(&manifest).unwrap();
    let v = json(&formtensor(&[
        "verify", "--model", "maxwell-linear", "--field", manifest.to_str().unwrap(),
    ]));
    let from_case = json(&formtensor(&["verify", "--case", "maxwell-plane-wave", "--h", "0.125"]));
    assert_eq!(v["levels"], from_case["levels"]);
}
