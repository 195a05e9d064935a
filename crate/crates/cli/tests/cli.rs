use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const ID2: &str =
    r#"{"dim_in":2,"dim_out":2,"repr":{"type":"matrix","matrix":[[[1,0],[0,0]],[[0,0],[1,0]]]}}"#;
const E2: &str =
    r#"{"dim_in":2,"dim_out":2,"repr":{"type":"matrix","matrix":[[[2,0],[1,0]],[[1,0],[1,0]]]}}"#;
const E3: &str = r#"{"dim_in":2,"dim_out":2,"repr":{"type":"operator_mul",
    "domain_basis":[[[1,0],[0,0]]],"matrix_on_domain":[[[1,0]],[[0,0]]],"mul_basis":[[[0,0],[1,0]]]}}"#;
const INDEFINITE: &str =
    r#"{"dim_in":2,"dim_out":2,"repr":{"type":"matrix","matrix":[[[1,0],[0,0]],[[0,0],[-1,0]]]}}"#;
const S_E1: &str = r#"{"ambient_dim":2,"basis":[[[1,0],[0,0]]]}"#;
const S_MIXED: &str = r#"{"ambient_dim":2,"basis":[[[1,0],[1,0]]]}"#;

fn linrel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_linrel"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

/// Lower-right operator-part entry of a relation object written by the CLI.
fn lower_right(rel: &Value) -> f64 {
    let t = linrel::Tolerances::default();
    let parsed = linrel::json::parse_relation(&rel.to_string(), &t).unwrap();
    let a = linrel::NonnegSelfAdjointRelation::validate(&parsed, &t).unwrap();
    a.operator_full()[(1, 1)].re
}

#[test]
fn schur_of_identity() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "id2.json", ID2);
    let e1 = write(&dir, "e1.json", S_E1);
    let out = linrel(&["schur", "--relation", s(&a), "--subspace", s(&e1)]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = json(&out);
    assert!((lower_right(&v["schur"]) - 1.0).abs() < 1e-10);
    let d = &v["diagnostics"];
    for key in [
        "tt_lemma_gap",
        "compression_lemma_gap",
        "pekarev_schur_gap",
        "anderson_trapp_max_entry_diff",
    ] {
        assert!(d[key].as_f64().unwrap() < 1e-10, "{key}: {}", d[key]);
    }
}

#[test]
fn schur_of_e2_with_every_method() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "e2.json", E2);
    let e1 = write(&dir, "e1.json", S_E1);
    for method in ["formula", "pekarev", "anderson-trapp"] {
        let out = linrel(&[
            "schur",
            "--relation",
            s(&a),
            "--subspace",
            s(&e1),
            "--method",
            method,
        ]);
        assert!(out.status.success());
        let v = json(&out);
        assert!((lower_right(&v["schur"]) - 0.5).abs() < 1e-10, "{method}");
        assert_eq!(v["diagnostics"]["method"], method);
    }
    let text = linrel(&[
        "schur",
        "--relation",
        s(&a),
        "--subspace",
        s(&e1),
        "--format",
        "text",
    ]);
    let text = String::from_utf8(text.stdout).unwrap();
    assert!(text.contains("graph basis"));
    assert!(text.contains("dim dom 2, ran 1, ker 1, mul 0"));
}

#[test]
fn anderson_trapp_needs_bounded_input() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "e3.json", E3);
    let e1 = write(&dir, "e1.json", S_E1);
    let out = linrel(&["schur", "--relation", s(&a), "--subspace", s(&e1)]);
    assert!(out.status.success());
    assert!(json(&out)["diagnostics"]["anderson_trapp_max_entry_diff"].is_null());
    let out = linrel(&[
        "schur",
        "--relation",
        s(&a),
        "--subspace",
        s(&e1),
        "--method",
        "anderson-trapp",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn compress_and_block() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "e2.json", E2);
    let e1 = write(&dir, "e1.json", S_E1);
    let out = linrel(&["compress", "--relation", s(&a), "--subspace", s(&e1)]);
    assert!(out.status.success());
    assert!((lower_right(&json(&out)["compression"]) - 0.5).abs() < 1e-10);

    let out = linrel(&["block", "--relation", s(&a), "--subspace", s(&e1)]);
    assert!(out.status.success());
    let v = json(&out);
    let g01 = v["g"][0][1][0].as_f64().unwrap();
    assert!((g01 - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-10);
    assert!(v["checks"]["factorization_residual"].as_f64().unwrap() < 1e-10);
}

#[test]
fn order_verdicts() {
    let dir = TempDir::new().unwrap();
    let id = write(&dir, "id2.json", ID2);
    let e2 = write(&dir, "e2.json", E2);
    let e3 = write(&dir, "e3.json", E3);
    let verdict = |a: &Path, b: &Path| {
        let out = linrel(&["order", "--a", s(a), "--b", s(b), "--format", "text"]);
        assert!(out.status.success());
        String::from_utf8(out.stdout).unwrap().trim().to_string()
    };
    assert_eq!(verdict(&id, &id), "both (equal)");
    let triple = write(
        &dir,
        "triple.json",
        r#"{"dim_in":2,"dim_out":2,"repr":{"type":"matrix","matrix":[[[3,0],[0,0]],[[0,0],[3,0]]]}}"#,
    );
    assert_eq!(verdict(&e2, &triple), "A<=B");
    assert_eq!(verdict(&triple, &e2), "B<=A");
    assert_eq!(verdict(&id, &e2), "incomparable");
    assert_eq!(verdict(&id, &e3), "A<=B");
    let half = write(
        &dir,
        "half.json",
        r#"{"dim_in":2,"dim_out":2,"repr":{"type":"matrix","matrix":[[[2,0],[0,0]],[[0,0],[0.5,0]]]}}"#,
    );
    assert_eq!(verdict(&half, &id), "incomparable");
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let e2 = write(&dir, "e2.json", E2);
    let e1 = write(&dir, "e1.json", S_E1);
    let bad = write(&dir, "bad.json", "{ not json");
    let indefinite = write(&dir, "indef.json", INDEFINITE);
    let mixed = write(&dir, "mixed.json", S_MIXED);
    let e3 = write(&dir, "e3.json", E3);
    let missing = dir.path().join("missing.json");

    let code = |args: &[&str]| linrel(args).status.code();
    assert_eq!(
        code(&["schur", "--relation", s(&bad), "--subspace", s(&e1)]),
        Some(2)
    );
    assert_eq!(
        code(&["schur", "--relation", s(&missing), "--subspace", s(&e1)]),
        Some(2)
    );
    assert_eq!(
        code(&[
            "schur",
            "--relation",
            s(&e2),
            "--subspace",
            s(&e1),
            "--tol-eq",
            "0"
        ]),
        Some(2)
    );
    assert_eq!(
        code(&["gen", "--n", "2", "--k", "3", "--d1", "0", "--d2", "0"]),
        Some(2)
    );
    assert_eq!(
        code(&["schur", "--relation", s(&indefinite), "--subspace", s(&e1)]),
        Some(1)
    );

    // dom E3 = span{e1} is not invariant under the projection onto span{e1 + e2}.
    let out = linrel(&["schur", "--relation", s(&e3), "--subspace", s(&mixed)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
    assert!(out.stdout.is_empty());
}

#[test]
fn gen_writes_loadable_files() {
    let dir = TempDir::new().unwrap();
    let rel = dir.path().join("a.json");
    let sub = dir.path().join("s.json");
    let args = [
        "gen",
        "--n",
        "5",
        "--k",
        "2",
        "--d1",
        "1",
        "--d2",
        "2",
        "--seed",
        "4",
        "--out-relation",
        s(&rel),
        "--out-subspace",
        s(&sub),
    ];
    assert!(linrel(&args).status.success());
    let first = std::fs::read(&rel).unwrap();
    assert!(linrel(&args).status.success());
    assert_eq!(first, std::fs::read(&rel).unwrap());

    let out = linrel(&["schur", "--relation", s(&rel), "--subspace", s(&sub)]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = json(&out);
    assert_eq!(v["schur"]["derived"]["mul_dim"], 1);
    assert!(v["diagnostics"]["pekarev_schur_gap"].as_f64().unwrap() < 1e-8);
}

#[test]
fn verify_lists_every_check() {
    let out = linrel(&["verify", "--seed", "3", "--trials", "20", "--max-dim", "5"]);
    assert!(out.status.success());
    let v = json(&out);
    let checks = v["checks"].as_object().unwrap();
    assert_eq!(checks.len(), linrel::verify::CHECKS.len());
    for name in linrel::verify::CHECKS {
        assert_eq!(checks[name]["passed"], 20, "{name}");
    }
    assert_eq!(v["failures"].as_array().unwrap().len(), 0);
}
