//! Command dispatch, exit codes, and document round-trips.

use std::fs;
use std::path::PathBuf;

use noff_cli::docs::{
    fmt_float, matrix_document_json, render_document, MatrixDocument, MatrixKind,
};
use proptest::prelude::*;

fn workdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("noff_cli_{}_{tag}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> (i32, String, String) {
    let argv: Vec<String> = std::iter::once("noff".to_string())
        .chain(args.iter().map(|s| s.to_string()))
        .collect();
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = noff_cli::run(&argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

#[test]
fn usage_errors_exit_2() {
    let (code, _, err) = run(&["no-such-command"]);
    assert_eq!(code, 2);
    assert!(!err.is_empty());

    let (code, _, _) = run(&["synthesize"]);
    assert_eq!(code, 2);

    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("synthesize"));
}

#[test]
fn malformed_documents_exit_2() {
    let dir = workdir("malformed");
    let path = dir.join("broken.json");
    fs::write(&path, "{не json").unwrap();
    let (code, _, err) = run(&[
        "synthesize",
        "--input",
        path.to_str().unwrap(),
        "--out",
        dir.join("x.json").to_str().unwrap(),
    ]);
    assert_eq!(code, 2);
    assert!(!err.is_empty());

    let shape = dir.join("shape.json");
    fs::write(&shape, r#"{"n": 2, "kind": "symmetric", "data": [[1.0]]}"#).unwrap();
    let (code, _, _) = run(&[
        "synthesize",
        "--input",
        shape.to_str().unwrap(),
        "--out",
        dir.join("y.json").to_str().unwrap(),
    ]);
    assert_eq!(code, 2);
}

#[test]
fn domain_errors_exit_1_with_error_name() {
    let dir = workdir("domain");
    let bad = dir.join("bad.json");
    fs::write(
        &bad,
        r#"{"n": 2, "kind": "symmetric", "data": [[0.5, 0.0], [0.0, 0.0]]}"#,
    )
    .unwrap();
    let (code, _, err) = run(&[
        "synthesize",
        "--input",
        bad.to_str().unwrap(),
        "--out",
        dir.join("p.json").to_str().unwrap(),
    ]);
    assert_eq!(code, 1);
    assert!(err.contains("EigenvalueBelowOne"), "stderr: {err}");

    // A projection document failing idempotency is also a domain error.
    let not_proj = dir.join("notproj.json");
    fs::write(
        &not_proj,
        r#"{"n": 2, "kind": "projection", "data": [[1.0, 0.0], [0.0, 0.5]]}"#,
    )
    .unwrap();
    let (code, _, err) = run(&["split-unit", "--input", not_proj.to_str().unwrap(), "--out",
        dir.join("s.json").to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains("NotIdempotent"), "stderr: {err}");
}

#[test]
fn tolerance_flags_are_honored() {
    let dir = workdir("tol");
    let nearly = dir.join("nearly.json");
    // Idempotency residual ~1e-6: rejected at defaults, accepted at 1e-4.
    fs::write(
        &nearly,
        r#"{"n": 2, "kind": "projection", "data": [[1.000001, 0.0], [0.0, 0.0]]}"#,
    )
    .unwrap();
    let out_path = dir.join("sp.json");
    let (code, _, _) = run(&["split-unit", "--input", nearly.to_str().unwrap(), "--out",
        out_path.to_str().unwrap()]);
    assert_eq!(code, 1);
    let (code, _, _) = run(&[
        "--tol-residual",
        "1e-4",
        "split-unit",
        "--input",
        nearly.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
}

#[test]
fn weighted_mode_writes_frame_document() {
    let dir = workdir("weighted");
    let input = dir.join("t.json");
    fs::write(
        &input,
        r#"{"n": 2, "kind": "symmetric", "data": [[0.5, 0.0], [0.0, 0.0]]}"#,
    )
    .unwrap();
    let out_path = dir.join("w.json");
    let (code, report, _) = run(&[
        "synthesize",
        "--mode",
        "weighted",
        "--input",
        input.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(report.contains("weight"));
    let text = fs::read_to_string(&out_path).unwrap();
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    let weight = doc["items"][0]["weight"].as_f64().unwrap();
    assert!((weight - 0.5f64.sqrt()).abs() < 1e-15);
}

#[test]
fn povm_rejects_non_tight_frame() {
    let dir = workdir("povm");
    let f_path = dir.join("loose.json");
    fs::write(
        &f_path,
        r#"{"n": 2, "items": [
            {"weight": 1.0, "matrix": {"n": 2, "kind": "projection", "data": [[1.0, 0.0], [0.0, 0.0]]}}
        ]}"#,
    )
    .unwrap();
    let (code, _, err) = run(&["povm", "--frame", f_path.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains("NotTight"), "stderr: {err}");
}

#[test]
fn indefinite_mode_round_trips_the_operator() {
    let dir = workdir("indefinite");
    let t_path = dir.join("t.json");
    fs::write(
        &t_path,
        r#"{"n": 4, "kind": "symmetric", "data": [
            [2.0, 0.0, 0.0, 0.0],
            [0.0, 3.0, 0.0, 0.0],
            [0.0, 0.0, -1.0, 0.0],
            [0.0, 0.0, 0.0, 0.0]
        ]}"#,
    )
    .unwrap();
    let out_path = dir.join("dec.json");
    let (code, _, _) = run(&[
        "synthesize",
        "--mode",
        "indefinite",
        "--input",
        t_path.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);

    let doc: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&out_path).unwrap()).unwrap();
    let side = |key: &str| -> (f64, Vec<nalgebra::DMatrix<f64>>) {
        let weight = doc[key]["weight"].as_f64().unwrap();
        let mats = doc[key]["matrices"]
            .as_array()
            .unwrap()
            .iter()
            .map(|m| {
                let rows = m.as_array().unwrap();
                nalgebra::DMatrix::from_fn(4, 4, |i, j| rows[i][j].as_f64().unwrap())
            })
            .collect();
        (weight, mats)
    };
    let (v1, pos) = side("positive");
    let (v2, neg) = side("negative");
    assert!((v1 - 2.0f64.sqrt()).abs() < 1e-12);
    assert!((v2 - 1.0).abs() < 1e-12);
    let gram = |p: &nalgebra::DMatrix<f64>| p.transpose() * p;
    let reconstructed = (gram(&pos[0]) + gram(&pos[1])) * v1 * v1
        - (gram(&neg[0]) + gram(&neg[1])) * v2 * v2;
    let target = nalgebra::DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
        2.0, 3.0, -1.0, 0.0,
    ]));
    assert!((reconstructed - target).norm() <= 1e-10);
}

proptest! {
    // Emitted documents parse back to bit-identical matrices.
    #[test]
    fn matrix_documents_round_trip(
        n in 1usize..=5,
        seed in any::<u64>(),
    ) {
        let values: Vec<f64> = {
            let mut state = seed;
            (0..n * n)
                .map(|_| {
                    state = state
                        .wrapping_mul(6364136223846793005)
                        .wrapping_add(1442695040888963407);
                    // Spread mantissas across a wide range of magnitudes.
                    let x = (state >> 11) as f64 / (1u64 << 53) as f64;
                    (x - 0.5) * 1e3_f64.powf((state % 7) as f64 - 3.0)
                })
                .collect()
        };
        let m = nalgebra::DMatrix::from_row_slice(n, n, &values);
        let text = render_document(&matrix_document_json(MatrixKind::General, &m));
        let doc = MatrixDocument::parse(&text).unwrap();
        let back = doc.to_dmatrix();
        for (a, b) in m.iter().zip(back.iter()) {
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn floats_round_trip_at_17_digits(x in proptest::num::f64::NORMAL) {
        let rendered = fmt_float(x);
        let parsed: f64 = rendered.parse().unwrap();
        prop_assert_eq!(parsed.to_bits(), x.to_bits());
    }
}
