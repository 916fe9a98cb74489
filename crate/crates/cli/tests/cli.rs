//! End-to-end tests of the `grscat` binary: exit-code contract, report
//! shape, and agreement of CLI output with direct library computation.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use gr_scattering_core::agler::agler_factors;
use gr_scattering_core::colligation::transfer_coefficients;
use gr_scattering_core::samples;

fn example(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join(format!("examples/{name}.json"))
}

fn grscat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_grscat"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(output: &Output) -> serde_json::Value {
    serde_json::from_slice(&output.stdout).expect("stdout is JSON")
}

#[test]
fn validate_examples_pass() {
    for name in ["e1", "e2"] {
        let out = grscat(&["validate", example(name).to_str().unwrap()]);
        assert!(out.status.success(), "{name}: {out:?}");
        let report = stdout_json(&out);
        assert_eq!(report["command"], "validate");
        assert!(report["results"].as_array().unwrap().iter().all(|c| c["pass"] == true));
    }
}

#[test]
fn validate_rejects_perturbed_colligation_with_exit_1() {
    let text = std::fs::read_to_string(example("e1")).unwrap();
    let mut json: serde_json::Value = serde_json::from_str(&text).unwrap();
    // Double every entry of B: the connecting matrix is no longer unitary.
    for row in json["B"].as_array_mut().unwrap() {
        for entry in row.as_array_mut().unwrap() {
            for part in entry.as_array_mut().unwrap() {
                let v = part.as_f64().unwrap();
                *part = serde_json::json!(2.0 * v);
            }
        }
    }
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, serde_json::to_string(&json).unwrap()).unwrap();
    let out = grscat(&["validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn truncated_file_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trunc.json");
    let text = std::fs::read_to_string(example("e1")).unwrap();
    std::fs::write(&path, &text[..text.len() / 2]).unwrap();
    let out = grscat(&["validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn transfer_of_example_one_is_the_monomial() {
    let out = grscat(&["transfer", example("e1").to_str().unwrap(), "--degree", "4"]);
    assert!(out.status.success());
    let series = stdout_json(&out);
    let terms = series["terms"].as_array().unwrap();
    assert_eq!(terms.len(), 1);
    assert_eq!(terms[0]["index"], serde_json::json!([1, 1]));
    let [re, im]: [f64; 2] = serde_json::from_value(terms[0]["matrix"][0][0].clone()).unwrap();
    assert!((re - 1.0).abs() < 1e-12 && im.abs() < 1e-12);
}

#[test]
fn agler_verify_passes_on_examples() {
    for name in ["e1", "e2"] {
        let out = grscat(&[
            "agler-verify",
            example(name).to_str().unwrap(),
            "--box",
            "-2..2,-2..2",
        ]);
        assert!(out.status.success(), "{name}: {out:?}");
        let report = stdout_json(&out);
        assert_eq!(report["results"].as_array().unwrap().len(), 4);
        assert_eq!(report["safe_window"], serde_json::json!({"lo": [-2, -2], "hi": [2, 2]}));
    }
}

#[test]
fn classify_reproduces_the_example_taxonomy() {
    let out = grscat(&["classify", example("e1").to_str().unwrap()]);
    assert!(out.status.success());
    let report = stdout_json(&out);
    let details = &report["details"];
    assert_eq!(details["closely_connected"], true);
    assert_eq!(details["strictly_closely_connected"], false);
    assert_eq!(details["shifted_strictly_closely_connected"], false);

    let out = grscat(&[
        "classify",
        example("e2").to_str().unwrap(),
        "--cert-window",
        "-2..2,-2..2",
        "--cert-depth",
        "8",
    ]);
    assert!(out.status.success());
    let report = stdout_json(&out);
    let details = &report["details"];
    assert_eq!(details["strictly_closely_connected"], true);
    assert_eq!(details["shifted_strictly_closely_connected"], true);
    assert_eq!(details["scattering_minimal_on_window"], false);
    assert_eq!(details["scattering_defect_dim"], 32);
}

fn write_system(dir: &Path, col: &gr_scattering_core::colligation::GRColligation) -> PathBuf {
    let degree = col.state_dim() as i64 + 1;
    let factors: Vec<serde_json::Value> = agler_factors(col, degree)
        .iter()
        .map(|f| serde_json::to_value(f.as_series().to_json()).unwrap())
        .collect();
    let system = serde_json::json!({
        "out_dim": col.out_dim(),
        "in_dim": col.in_dim(),
        "transfer": transfer_coefficients(col, degree).to_json(),
        "factors": factors,
    });
    let path = dir.join("system.json");
    std::fs::write(&path, serde_json::to_string(&system).unwrap()).unwrap();
    path
}

#[test]
fn realize_round_trips_example_two() {
    let dir = tempfile::tempdir().unwrap();
    let system = write_system(dir.path(), &samples::example_two());
    let out = grscat(&["realize", system.to_str().unwrap()]);
    assert!(out.status.success(), "{out:?}");
    let report = stdout_json(&out);
    assert_eq!(report["details"]["state_dim"], 8);
    assert!(report["results"].as_array().unwrap().iter().all(|c| c["pass"] == true));
}

#[test]
fn realize_reports_defects_without_a_load() {
    let dir = tempfile::tempdir().unwrap();
    let system = write_system(dir.path(), &samples::example_one());
    let out = grscat(&["realize", system.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("domain defect 1"), "{msg}");

    // The same data closes against a load colligation via the Redheffer
    // parametrization; the trivial 1-D-per-axis load suffices.
    // A 2-state unitary load (the 2-D realization of z1 z2).
    let mut a = gr_scattering_core::matrix::zeros(2, 2);
    a[(1, 0)] = gr_scattering_core::matrix::c(1.0);
    let mut b = gr_scattering_core::matrix::zeros(2, 1);
    b[(0, 0)] = gr_scattering_core::matrix::c(1.0);
    let mut c = gr_scattering_core::matrix::zeros(1, 2);
    c[(0, 1)] = gr_scattering_core::matrix::c(1.0);
    let load = gr_scattering_core::colligation::GRColligation::new(
        a,
        b,
        c,
        gr_scattering_core::matrix::zeros(1, 1),
        vec![
            {
                let mut p = gr_scattering_core::matrix::zeros(2, 2);
                p[(0, 0)] = gr_scattering_core::matrix::c(1.0);
                p
            },
            {
                let mut p = gr_scattering_core::matrix::zeros(2, 2);
                p[(1, 1)] = gr_scattering_core::matrix::c(1.0);
                p
            },
        ],
    )
    .unwrap();
    let load_path = dir.path().join("load.json");
    std::fs::write(
        &load_path,
        serde_json::to_string(&load.to_json()).unwrap(),
    )
    .unwrap();
    let out = grscat(&[
        "realize",
        system.to_str().unwrap(),
        "--load",
        load_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{out:?}");
    let report = stdout_json(&out);
    assert_eq!(report["details"]["state_dim"], 6);
}

#[test]
fn simulate_impulse_matches_transfer() {
    let out = grscat(&[
        "simulate",
        example("e1").to_str().unwrap(),
        "--mode",
        "impulse",
        "--degree",
        "4",
    ]);
    assert!(out.status.success());
    let report = stdout_json(&out);
    let terms = report["details"]["series"]["terms"].as_array().unwrap();
    assert_eq!(terms.len(), 1);
    assert_eq!(terms[0]["index"], serde_json::json!([1, 1]));
}

#[test]
fn simulate_forward_then_backward_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    // Zero lower-face boundary, a single unit impulse at the window corner.
    let scenario = serde_json::json!({
        "lo": [0, 0],
        "hi": [2, 2],
        "inputs": [{"site": [0, 0], "vector": [[1.0, 0.0]]}],
        "boundary": [
            (0..3).map(|j| serde_json::json!({"site": [0, j], "vector": [[0.0,0.0],[0.0,0.0],[0.0,0.0],[0.0,0.0]]})).collect::<Vec<_>>(),
            (0..3).map(|i| serde_json::json!({"site": [i, 0], "vector": [[0.0,0.0],[0.0,0.0],[0.0,0.0],[0.0,0.0]]})).collect::<Vec<_>>(),
        ],
    });
    let fwd_path = dir.path().join("fwd.json");
    std::fs::write(&fwd_path, serde_json::to_string(&scenario).unwrap()).unwrap();
    let out = grscat(&[
        "simulate",
        example("e1").to_str().unwrap(),
        "--mode",
        "forward",
        "--scenario",
        fwd_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{out:?}");
    let report = stdout_json(&out);
    assert!(report["results"][0]["pass"] == true);

    // Feed the produced outputs and ghost boundary back through the
    // backward sweep and compare the recovered inputs.
    let details = &report["details"];
    let back = serde_json::json!({
        "lo": [0, 0],
        "hi": [2, 2],
        "outputs": details["outputs"],
        "boundary": details["ghost_boundary"],
    });
    let back_path = dir.path().join("back.json");
    std::fs::write(&back_path, serde_json::to_string(&back).unwrap()).unwrap();
    let out = grscat(&[
        "simulate",
        example("e1").to_str().unwrap(),
        "--mode",
        "backward",
        "--scenario",
        back_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{out:?}");
    let report = stdout_json(&out);
    let inputs = report["details"]["inputs"].as_array().unwrap();
    let impulse = inputs
        .iter()
        .find(|e| e["site"] == serde_json::json!([0, 0]))
        .unwrap();
    let [re, im]: [f64; 2] = serde_json::from_value(impulse["vector"][0].clone()).unwrap();
    assert!((re - 1.0).abs() < 1e-10 && im.abs() < 1e-10);
}

#[test]
fn simulate_missing_boundary_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = serde_json::json!({
        "lo": [0, 0],
        "hi": [1, 1],
        "inputs": [],
        "boundary": [[], []],
    });
    let path = dir.path().join("scenario.json");
    std::fs::write(&path, serde_json::to_string(&scenario).unwrap()).unwrap();
    let out = grscat(&[
        "simulate",
        example("e1").to_str().unwrap(),
        "--mode",
        "forward",
        "--scenario",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing boundary data at"));
}

#[test]
fn simulate_schaffer_check_passes() {
    let out = grscat(&[
        "simulate",
        example("e2").to_str().unwrap(),
        "--mode",
        "schaffer-check",
        "--trials",
        "100",
        "--seed",
        "3",
        "--tol",
        "1e-12",
    ]);
    assert!(out.status.success(), "{out:?}");
    let report = stdout_json(&out);
    assert_eq!(report["seed"], 3);
    assert!(report["results"].as_array().unwrap().iter().all(|c| c["pass"] == true));
}

#[test]
fn reports_are_deterministic() {
    let args = ["agler-verify", "--box", "-1..1,-1..1"];
    let path = example("e1");
    let run = || {
        let out = grscat(&[args[0], path.to_str().unwrap(), args[1], args[2]]);
        assert!(out.status.success());
        out.stdout
    };
    assert_eq!(run(), run());
}
