use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).display().to_string()
}

fn dilate(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dilate")).args(args).output().expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stderr)))
}

#[test]
fn identity_check_passes() {
    let out = dilate(&["identity-check", "--m", "2", "--N", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["command"], "identity-check");
    assert_eq!(r["summary"]["pass"], true);
    let orbit_checks =
        r["results"].as_array().unwrap().iter().filter(|c| c["check"].as_str().unwrap().starts_with("orbit")).count();
    // 6 orbits of {1,2}^4, each checked for n = 0..=4
    assert_eq!(orbit_checks, 6 * 5);
}

#[test]
fn build_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let triple = dir.path().join("triple.json");
    let triple = triple.to_str().unwrap();
    let out = dilate(&["build", "--combo", &data("combo.json"), "--N", "3", "--p", "3", "--triple-out", triple]);
    assert_eq!(out.status.code(), Some(0));
    let built = report(&out);
    assert_eq!(built["details"]["space"]["dim"], 3 * 8 * 2);
    assert_eq!(built["n_guarantee"], 3);

    let out = dilate(&["verify", "--triple", triple]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["inputs"]["mode"], "exact");
    assert_eq!(r["summary"]["max_residual"], 0.0);
    assert_eq!(r["details"]["space"]["dim"], 48);
    let words = r["results"].as_array().unwrap().iter().filter(|c| c["check"] == "word").count();
    assert_eq!(words, 4);

    // one step past the guarantee the strict combination fails
    let out = dilate(&["verify", "--triple", triple, "--all-up-to", "4"]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    assert_eq!(r["details"]["verification"]["in_contract"], false);
    let failing: Vec<&Value> = r["results"].as_array().unwrap().iter().filter(|c| c["pass"] == false).collect();
    assert_eq!(failing.len(), 1);
    assert_eq!(failing[0]["word"].as_array().unwrap().len(), 4);
}

#[test]
fn hull_check_average_matrix() {
    let out = dilate(&["hull-check", "--matrix", &data("avg2.json"), "--generators", "perms", "--mode", "convex"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["details"]["status"], "member");
    assert_eq!(r["details"]["coefficients"]["id"], "1/2");
    assert_eq!(r["details"]["coefficients"]["swap"], "1/2");
}

#[test]
fn hull_check_certifies_non_member() {
    let out = dilate(&["hull-check", "--matrix", &data("row.json"), "--mode", "subconvex"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["details"]["status"], "non-member");
    assert!(r["details"]["certificate"]["rank_one"].is_object());
    assert_eq!(r["warnings"].as_array().unwrap().len(), 1);
}

#[test]
fn simultaneous_zero_and_shift() {
    for args in [
        vec!["simultaneous", "--family", &data("family.json"), "--N", "2"],
        vec!["zero-augment", "--combo", &data("combo.json"), "--N", "2"],
        vec!["shift", "--matrix", &data("l1_contraction.json"), "--N", "3"],
    ] {
        let out = dilate(&args);
        assert_eq!(out.status.code(), Some(0), "{args:?}");
        let r = report(&out);
        assert_eq!(r["summary"]["max_residual"], 0.0, "{args:?}");
    }
}

#[test]
fn float_commands() {
    let out = dilate(&["decompose", "--matrix", &data("contraction.json")]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["inputs"]["mode"], "float");
    let matrix = data("contraction.json");
    for extra in [&[][..], &["--snap", "64"][..], &["--strategy", "staircase"][..]] {
        let mut args = vec!["oracle", "--matrix", &matrix, "--N", "3"];
        args.extend_from_slice(extra);
        let out = dilate(&args);
        assert_eq!(out.status.code(), Some(0), "{extra:?}");
    }
}

#[test]
fn mixed_payload_warns_and_uses_float() {
    let out = dilate(&["shift", "--matrix", &data("mixed.json"), "--N", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["inputs"]["mode"], "float");
    assert!(r["warnings"][0].as_str().unwrap().contains("float mode"));
}

#[test]
fn input_errors_exit_two() {
    for args in [
        vec!["build", "--combo", "/nonexistent.json", "--N", "2"],
        vec!["build", "--combo", &data("combo.json"), "--N", "2", "--p", "2"],
        vec!["build", "--combo", &data("combo.json"), "--N", "0"],
        vec!["verify", "--triple", &data("combo.json")],
        vec!["shift", "--matrix", &data("combo.json"), "--N", "2"],
        vec!["orbit", "--m", "0", "--N", "3"],
        vec!["no-such-command"],
    ] {
        assert_eq!(dilate(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn reports_are_deterministic() {
    let args = ["build", "--combo", &data("combo.json"), "--N", "3"];
    assert_eq!(dilate(&args).stdout, dilate(&args).stdout);
    let a = report(&dilate(&args));
    let b = report(&dilate(&["build", "--combo", &data("combo.json"), "--N", "2"]));
    // same payload, same hash, whatever the parameters
    assert_eq!(a["inputs"]["hash"], b["inputs"]["hash"]);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let out = dilate(&["orbit", "--m", "3", "--N", "3", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(r["details"]["orbits"].as_array().unwrap().len(), 11);
}
