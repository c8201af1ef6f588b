use std::path::PathBuf;
use std::process::{Command, Output};

use ncwb_cli::document::{parse_document, render_document};
use ncwb_cli::workspace::load;
use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn ncwb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ncwb")).args(args).env_remove("NCWB_MAX_WORD_LEN").output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn check(name: &str) -> Output {
    ncwb(&["check", fixture(name).to_str().unwrap()])
}

#[test]
fn valid_documents_exit_zero() {
    for f in ["builtins.json", "empty.json", "kahler_plus_trivial.json"] {
        assert_eq!(code(&check(f)), 0, "{f}");
    }
}

#[test]
fn planted_failures_exit_one() {
    for f in [
        "bad_unit_differential.json",
        "vacuum_violation.json",
        "plain_derivative.json",
        "naive_derivative.json",
        "zero_connection.json",
    ] {
        let out = check(f);
        assert_eq!(code(&out), 1, "{f}");
        assert!(stdout(&out).contains("[FAIL]"), "{f}");
    }
}

#[test]
fn input_errors_exit_two() {
    for f in [
        "malformed_rational.json",
        "dangling_reference.json",
        "not_associative.json",
        "unknown_field.json",
        "truncated.json",
        "does_not_exist.json",
    ] {
        let out = check(f);
        assert_eq!(code(&out), 2, "{f}");
        assert!(out.stdout.is_empty(), "{f}");
        assert!(String::from_utf8_lossy(&out.stderr).contains("error"), "{f}");
    }
}

#[test]
fn malformed_rational_names_the_entry() {
    let err = String::from_utf8(check("malformed_rational.json").stderr).unwrap();
    assert!(err.contains("\"1/0\""), "{err}");
    assert!(err.contains("differential[0][0]"), "{err}");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&ncwb(&[])), 2);
    assert_eq!(code(&ncwb(&["frobnicate"])), 2);
    assert_eq!(code(&ncwb(&["builtin", "no_such_builtin"])), 2);
    assert_eq!(code(&ncwb(&["builtin", "truncated_poly", "1/2"])), 2);
    let f = fixture("builtins.json");
    assert_eq!(code(&ncwb(&["derive", f.to_str().unwrap(), "dn", "nonsense"])), 2);
    assert_eq!(code(&ncwb(&["derive", f.to_str().unwrap(), "missing", "dual"])), 2);
    assert_eq!(code(&ncwb(&["check", f.to_str().unwrap(), "missing"])), 2);
    assert_eq!(code(&ncwb(&["report", f.to_str().unwrap(), "--format=yaml"])), 2);
    assert_eq!(code(&ncwb(&["--help"])), 0);
}

#[test]
fn max_word_len_must_be_positive() {
    let f = fixture("builtins.json");
    for bad in ["0", "-1", "four", ""] {
        let out = Command::new(env!("CARGO_BIN_EXE_ncwb"))
            .args(["derive", f.to_str().unwrap(), "dn", "relations"])
            .env("NCWB_MAX_WORD_LEN", bad)
            .output()
            .unwrap();
        assert_eq!(code(&out), 2, "{bad:?}");
    }
}

#[test]
fn max_word_len_bounds_the_search() {
    let f = fixture("builtins.json");
    let run = |len: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_ncwb"));
        cmd.args(["derive", f.to_str().unwrap(), "dn", "relations"]);
        match len {
            Some(l) => cmd.env("NCWB_MAX_WORD_LEN", l),
            None => cmd.env_remove("NCWB_MAX_WORD_LEN"),
        };
        let out = cmd.output().unwrap();
        assert_eq!(code(&out), 0);
        serde_json::from_slice::<Value>(&out.stdout).unwrap()["summary"].clone()
    };
    assert_eq!(run(None)["max_len"], 4);
    let two = run(Some("2"));
    assert_eq!((two["words"].as_u64(), two["kernel_dim"].as_u64()), (Some(5), Some(2)));
    let three = run(Some("3"));
    assert_eq!((three["words"].as_u64(), three["kernel_dim"].as_u64()), (Some(7), Some(4)));
}

#[test]
fn broken_object_does_not_hide_the_others() {
    let out = ncwb(&["report", fixture("zero_connection.json").to_str().unwrap(), "--format=json"]);
    assert_eq!(code(&out), 1);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["schema"], "ncwb-report/1");
    assert_eq!(v["passed"], false);
    let objects = v["objects"].as_array().unwrap();
    assert_eq!(objects.len(), 5);
    let failed: Vec<&str> =
        objects.iter().filter(|o| o["passed"] == false).map(|o| o["name"].as_str().unwrap()).collect();
    assert_eq!(failed, ["zero"]);
    let kahler = objects.iter().find(|o| o["name"] == "kahler").unwrap();
    assert_eq!(kahler["facts"]["spanned_by_differential"], true);
}

#[test]
fn empty_workspace_reports_nothing() {
    let out = ncwb(&["report", fixture("empty.json").to_str().unwrap(), "--format=json"]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["objects"].as_array().unwrap().len(), 0);
    assert_eq!(v["passed"], true);
}

#[test]
fn quantum_plane_report_lists_a_ccr_witness() {
    let out = ncwb(&["report", fixture("builtins.json").to_str().unwrap(), "--format=json"]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let with_witness: Vec<&str> = v["objects"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|o| o["facts"]["ccr"]["violations"].as_array().is_some_and(|w| !w.is_empty()))
        .map(|o| o["name"].as_str().unwrap())
        .collect();
    assert_eq!(with_witness, ["mat2.pair", "qp.pair"]);
}

#[test]
fn naive_derivative_witnesses_use_basis_names() {
    let out = ncwb(&["check", fixture("naive_derivative.json").to_str().unwrap(), "naive"]);
    let text = stdout(&out);
    assert!(text.contains("cartan_twisted_leibniz at (X0, x, x^2): defect [0, 0, -3]"), "{text}");
    assert!(text.contains("cartan_twisted_leibniz at (X0, x^2, x): defect [0, 0, -3]"), "{text}");
}

fn derive(name: &str, what: &str) -> (i32, Value) {
    let out = ncwb(&["derive", fixture("builtins.json").to_str().unwrap(), name, what]);
    let v = if out.stdout.is_empty() { Value::Null } else { serde_json::from_slice(&out.stdout).unwrap() };
    (code(&out), v)
}

fn object<'a>(doc: &'a Value, name: &str) -> &'a Value {
    doc["objects"].as_array().unwrap().iter().find(|o| o["name"] == name).unwrap()
}

#[test]
fn couniversal_on_dual_numbers() {
    let (c, doc) = derive("dn", "couniversal");
    assert_eq!(c, 0);
    assert_eq!(doc["summary"]["dim"], 2);
    let pair = object(&doc, "dn.algebra.couniversal");
    assert_eq!(pair["kind"], "cartan_pair");
    assert_eq!(pair["actions"].as_array().unwrap().len(), 2);
}

#[test]
fn diffops_on_dual_numbers() {
    let (c, doc) = derive("dn", "diffops");
    assert_eq!(c, 0);
    let ops = object(&doc, "dn.pair.diffops");
    assert_eq!(ops["basis"].as_array().unwrap().len(), 3);
    assert_eq!(ops["generators"], serde_json::json!(["id", "a:x", "m:0"]));
}

#[test]
fn every_derivation_rechecks_clean() {
    let dir = tempfile::tempdir().unwrap();
    for what in ["dual", "pair", "calculus", "universal", "couniversal", "diffops", "relations", "factorization"] {
        for src in ["dn", "tp3", "ut2"] {
            let out_path = dir.path().join(format!("{src}-{what}.json"));
            let out = ncwb(&[
                "derive",
                fixture("builtins.json").to_str().unwrap(),
                src,
                what,
                "-o",
                out_path.to_str().unwrap(),
            ]);
            assert_eq!(code(&out), 0, "{src} {what}");
            assert!(out.stdout.is_empty());
            let again = ncwb(&["check", out_path.to_str().unwrap()]);
            assert_eq!(code(&again), 0, "{src} {what}: {}", stdout(&again));
        }
    }
}

#[test]
fn derive_refuses_invalid_sources() {
    let f = fixture("bad_unit_differential.json");
    let out = ncwb(&["derive", f.to_str().unwrap(), "bad", "pair"]);
    assert_eq!(code(&out), 1);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["summary"]["leibniz_violations"].as_u64().unwrap() > 0);

    let f = fixture("vacuum_violation.json");
    assert_eq!(code(&ncwb(&["derive", f.to_str().unwrap(), "vac", "calculus"])), 1);
}

#[test]
fn dual_of_the_zero_bimodule_is_zero() {
    let text = r#"{"schema": "ncwb/1", "objects": [
        {"kind": "algebra", "name": "k", "basis": ["1"], "unit": ["1"], "products": [[["1"]]]},
        {"kind": "bimodule", "name": "z", "algebra": "k", "dim": 0, "left": [[]], "right": [[]]}]}"#;
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("zero.json");
    std::fs::write(&path, text).unwrap();
    let out = ncwb(&["derive", path.to_str().unwrap(), "z", "dual"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(object(&v, "z.right_dual")["dim"], 0);
    assert_eq!(object(&v, "z.left_dual")["dim"], 0);
}

#[test]
fn builtin_export_round_trips_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    for spec in ["dual_numbers", "truncated_poly(4)", "group_algebra_z2", "upper_triangular_2", "matrix_2"] {
        let path = dir.path().join("b.json");
        let out = ncwb(&["builtin", spec, "-o", path.to_str().unwrap()]);
        assert_eq!(code(&out), 0, "{spec}");
        let text = std::fs::read_to_string(&path).unwrap();
        let ws = load(&parse_document(&text).unwrap()).unwrap();
        assert_eq!(render_document(&ws.export()), text, "{spec}");
        assert_eq!(code(&ncwb(&["check", path.to_str().unwrap()])), 0, "{spec}");
    }
}

#[test]
fn builtin_params_positional_or_inline() {
    let a = ncwb(&["builtin", "quantum_plane_trunc", "3", "2"]);
    let b = ncwb(&["builtin", "quantum_plane_trunc(3,2)"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(object(&v, "quantum_plane_trunc.algebra")["basis"].as_array().unwrap().len(), 6);
}

#[test]
fn rationals_are_strings() {
    let out = ncwb(&["builtin", "quantum_plane_trunc(1/2,2)"]);
    let text = stdout(&out);
    assert!(text.contains("\"1/2\""));
    let v: Value = serde_json::from_str(&text).unwrap();
    fn no_floats(v: &Value) -> bool {
        match v {
            Value::Number(n) => n.is_u64(),
            Value::Array(xs) => xs.iter().all(no_floats),
            Value::Object(m) => m.values().all(no_floats),
            _ => true,
        }
    }
    assert!(no_floats(&v));
}
