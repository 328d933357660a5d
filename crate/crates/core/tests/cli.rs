use std::path::PathBuf;
use std::process::Command;

use orbifold_tqm::cli::io::{chain_from_str, model_from_str};
use orbifold_tqm::cli::parse::parse_observable;
use orbifold_tqm::exactnum::Cyclo;
use orbifold_tqm::model::Model;
use orbifold_tqm::weyl::{MatrixWeyl, Weyl};

fn data(name: &str) -> String {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.push("data");
    p.push(name);
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_orbtqm")).args(args).output().expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn z3_model() -> Model {
    Model::build(2, 1, 1, 3, &[1], None).unwrap()
}

#[test]
fn parses_sums_of_monomials() {
    let m = Model::build(1, 1, 1, 1, &[], None).unwrap();
    let p = parse_observable("y1*y2 + (1/2)*h", &m).unwrap();
    let expect = Weyl::monomial(&m, vec![1, 1], 0, Cyclo::one()).add(&Weyl::monomial(&m, vec![0, 0], 1, Cyclo::frac(1, 2)));
    assert_eq!(p.value, MatrixWeyl::scalar(&m, &expect));
}

#[test]
fn rejects_out_of_range_variables_with_position() {
    let m = Model::build(1, 0, 1, 2, &[1], None).unwrap();
    let e = parse_observable("z3^2", &m).unwrap_err();
    assert_eq!((e.line, e.col), (1, 1));
    assert!(e.msg.contains("out of range"), "{}", e.msg);
    let e = parse_observable("y1 +\n  z5", &z3_model()).unwrap_err();
    assert_eq!((e.line, e.col), (2, 3));
    let e = parse_observable("y1 * * y2", &z3_model()).unwrap_err();
    assert_eq!(e.line, 1);
    assert!(parse_observable("q1", &z3_model()).is_err());
}

#[test]
fn cyclotomic_literals_round_trip() {
    let m = z3_model();
    let p = parse_observable("zeta3 * z3", &m).unwrap();
    let expect = Weyl::monomial(&m, vec![0, 0, 1, 0], 0, Cyclo::zeta_pow(3, 1));
    assert_eq!(p.value, MatrixWeyl::scalar(&m, &expect));
    let text = p.value.render(&m);
    assert_eq!(parse_observable(&text, &m).unwrap().value, p.value);
    assert!(parse_observable("zeta5 * z3", &m).is_err());
}

#[test]
fn terms_above_truncation_warn() {
    let m = Model::build(1, 1, 1, 1, &[], None).unwrap().with_truncation(2, 3);
    let p = parse_observable("y1 + y1^4 + h^3", &m).unwrap();
    assert_eq!(p.warnings.len(), 2);
    assert_eq!(p.value.render(&m), "y1^1");
}

#[test]
fn model_files_validate() {
    let m = model_from_str(r#"{"n": 2, "k": 1, "r": 2, "N": 3, "perp_eigs": [1], "e_twist": [[0, -1], [1, -1]]}"#, None, None).unwrap();
    assert!(m.twisted);
    assert!(model_from_str(r#"{"n": 1, "k": 0, "N": 2, "perp_eigs": [1], "bogus": 1}"#, None, None).is_err());
    assert!(model_from_str(r#"{"n": 1, "k": 0, "N": 2, "perp_eigs": [0]}"#, None, None).is_err());
    assert!(model_from_str(r#"{"n": 1, "k": 1, "r": 2, "N": 2, "e_twist": [[1, 1], [0, 1]]}"#, None, None).is_err());
}

#[test]
fn chain_files_accept_coefficients() {
    let m = Model::build(1, 1, 1, 1, &[], None).unwrap();
    let mut w = Vec::new();
    let c = chain_from_str(r#"{"terms": [{"coef": "2*h", "factors": ["y1", "y2"]}]}"#, &m, &mut w).unwrap();
    assert_eq!(c.render(&m), "2*h^1*[y1^1 | y2^1]");
}

#[test]
fn cli_reports_values() {
    let (code, out, _) = run(&["trace", "--model", &data("involution.json"), "--chain", &data("unit_chain.json")]);
    assert_eq!(code, 0);
    assert!(out.contains("seed=1"));
    assert!(out.trim_end().ends_with("(1/4)"));

    let (code, out, _) = run(&["wheel", "4"]);
    assert_eq!((code, out.as_str()), (0, "C(4) = 1/2880\n"));

    let (code, out, _) = run(&["weight", "2", "0-1", "1-0"]);
    assert_eq!((code, out.as_str()), (0, "weight = -1/12\n"));

    let (code, out, _) = run(&[
        "charclass",
        "--model",
        &data("gamma4_model.json"),
        "--args",
        &data("gamma4_args.json"),
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("oneloop: pass"));
}

#[test]
fn json_mirrors_text() {
    let base = ["correlate-free", "--model", &data("darboux.json"), "--chain", &data("pair_chain.json")];
    let (_, text, _) = run(&base);
    let mut args = base.to_vec();
    args.extend(["--format", "json"]);
    let (code, js, _) = run(&args);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&js).unwrap();
    let body = v["form"]["text"].as_str().unwrap();
    assert!(text.ends_with(&format!("{body}\n")));
    let joined: Vec<&str> = v["form"]["terms"].as_array().unwrap().iter().map(|t| t["text"].as_str().unwrap()).collect();
    assert_eq!(joined.join(" + "), body);
}

#[test]
fn output_is_deterministic() {
    let args = ["correlate-int", "--model", &data("z3_twisted.json"), "--chain", &data("unit_chain.json"), "--args", &data("gamma1_args.json")];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a, b);
}

#[test]
fn unknown_suite_is_a_usage_error() {
    let (code, _, err) = run(&["verify", "unknown"]);
    assert_eq!(code, 2);
    assert!(err.contains("unknown suite"));
}

#[test]
fn verify_wheels_lists_values() {
    let (code, out, _) = run(&["verify", "wheels", "--seed", "7"]);
    assert_eq!(code, 0);
    assert!(out.contains("seed 7"));
    assert!(out.contains("C(2) = -1/24, C(3) = 0, C(4) = 1/2880"));
}
