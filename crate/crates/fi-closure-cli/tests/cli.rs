//! End-to-end runs of the binary: exit codes, JSON shapes, and byte
//! determinism.

use fi_closure::{DenseTensor, OffDiagTensor, Scalar};
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_fi-closure"));
    cmd.env_remove("FI_CLOSURE_DENSE_CAP");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

fn write_worked_tensor(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("worked.json");
    std::fs::write(
        &path,
        r#"{"d":2,"width":3,"entries":[
            {"idx":[1,2],"value":"2"},{"idx":[2,1],"value":"2"},
            {"idx":[1,3],"value":"3"},{"idx":[3,1],"value":"3"},
            {"idx":[2,3],"value":"6"},{"idx":[3,2],"value":"6"}]}"#,
    )
    .unwrap();
    path
}

#[test]
fn shift_profile_is_byte_exact() {
    let out = run(&["shift-profile", "--d", "2", "--m", "1"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "{\"counts\":[0,2,1]}\n");
}

#[test]
fn gen_eqs_pins_the_exchange_relation() {
    let out = run(&["gen-eqs", "--d", "2", "--l", "1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(
        text,
        concat!(
            r#"[{"d":2,"l":1,"n":4,"axis":2,"rows":[[1],[2]],"cols":[3,4],"#,
            r#""poly":{"kind":"tensor_y","terms":[{"coeff":"1","vars":[{"idx":[1,3],"exp":1},"#,
            r#"{"idx":[2,4],"exp":1}]},{"coeff":"-1","vars":[{"idx":[1,4],"exp":1},"#,
            r#"{"idx":[2,3],"exp":1}]}]}}]"#,
            "\n"
        )
    );
}

#[test]
fn member_splits_exit_codes_on_membership() {
    let dir = tempfile::tempdir().unwrap();
    let worked = write_worked_tensor(dir.path());
    let out = run(&["member", "--tensor", worked.to_str().unwrap(), "--l", "1"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "{\"member\":true}\n");

    let bad = dir.path().join("bad.json");
    std::fs::write(
        &bad,
        r#"{"d":2,"width":4,"entries":[{"idx":[1,3],"value":"1"},{"idx":[2,4],"value":"1"}]}"#,
    )
    .unwrap();
    let out = run(&["member", "--tensor", bad.to_str().unwrap(), "--l", "1"]);
    assert_eq!(out.status.code(), Some(3));
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(value["member"], serde_json::json!(false));
    assert_eq!(value["witness"]["axis"], serde_json::json!(1));
    // The same tensor is fine two ranks up.
    let out = run(&["member", "--tensor", bad.to_str().unwrap(), "--l", "2"]);
    assert!(out.status.success());
}

#[test]
fn complete_reproduces_the_worked_instance() {
    let dir = tempfile::tempdir().unwrap();
    let worked = write_worked_tensor(dir.path());
    let trace = dir.path().join("trace.json");
    let out = run(&[
        "complete",
        "--tensor",
        worked.to_str().unwrap(),
        "--l",
        "1",
        "--dense",
        "--trace",
        trace.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(value["certified_cap"], serde_json::json!(7));
    assert!(value["realized_terms"].as_u64().unwrap() <= 7);
    let dense: DenseTensor = serde_json::from_value(value["dense"].clone()).unwrap();
    let expected = [[0, 2, 3], [2, 0, 6], [3, 6, 9]];
    for (i, row) in expected.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            assert_eq!(dense.get(&[i + 1, j + 1]), &Scalar::from_int(*v));
        }
    }
    let trace_text = std::fs::read_to_string(&trace).unwrap();
    let trace_value: serde_json::Value = serde_json::from_str(&trace_text).unwrap();
    assert_eq!(trace_value["node"]["case"], serde_json::json!("split"));
}

#[test]
fn completing_a_nonmember_exits_3_with_a_witness() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(
        &bad,
        r#"{"d":2,"width":4,"entries":[{"idx":[1,3],"value":"1"},{"idx":[2,4],"value":"1"}]}"#,
    )
    .unwrap();
    let out = run(&["complete", "--tensor", bad.to_str().unwrap(), "--l", "1"]);
    assert_eq!(out.status.code(), Some(3));
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(value["member"], serde_json::json!(false));
    assert!(value["witness"]["value"].is_string());
}

#[test]
fn dense_cap_env_is_honored() {
    let dir = tempfile::tempdir().unwrap();
    let worked = write_worked_tensor(dir.path());
    let out = bin()
        .args(["complete", "--tensor", worked.to_str().unwrap(), "--l", "1", "--dense"])
        .env("FI_CLOSURE_DENSE_CAP", "1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    // Without --dense nothing is materialized, so the cap does not bite.
    let out = bin()
        .args(["complete", "--tensor", worked.to_str().unwrap(), "--l", "1"])
        .env("FI_CLOSURE_DENSE_CAP", "1")
        .output()
        .unwrap();
    assert!(out.status.success());
}

#[test]
fn push_round_trips_and_matches_the_library() {
    let dir = tempfile::tempdir().unwrap();
    let point = dir.path().join("point.json");
    std::fs::write(&point, r#"{"k":2,"width":4,"rows":[["1","2","3","4"],["5","6","7","8"]]}"#)
        .unwrap();
    let out = run(&["push", "--preset-k", "1", "--point", point.to_str().unwrap()]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let tensors: Vec<OffDiagTensor> = serde_json::from_str(&text).unwrap();
    assert_eq!(tensors.len(), 2);
    // Emitted JSON re-parses to an equal value.
    let mut again = serde_json::to_string(&tensors).unwrap();
    again.push('\n');
    assert_eq!(again, text);
}

#[test]
fn preset_output_feeds_back_into_verify() {
    let dir = tempfile::tempdir().unwrap();
    let map = dir.path().join("map.json");
    let out = run(&["preset", "--k", "1", "--output", map.to_str().unwrap()]);
    assert!(out.status.success());
    let via_file = run(&[
        "verify",
        "--map",
        map.to_str().unwrap(),
        "--width",
        "5",
        "--trials",
        "5",
        "--seed",
        "42",
    ]);
    let via_preset = run(&[
        "verify",
        "--preset-k",
        "1",
        "--width",
        "5",
        "--trials",
        "5",
        "--seed",
        "42",
    ]);
    assert!(via_file.status.success());
    assert_eq!(stdout(&via_file), stdout(&via_preset));
}

#[test]
fn verify_is_deterministic_and_the_control_fails() {
    let args = ["verify", "--preset-k", "1", "--width", "5", "--trials", "10", "--seed", "42"];
    let first = run(&args);
    let second = run(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout, "same seed must give identical bytes");
    let value: serde_json::Value = serde_json::from_str(&stdout(&first)).unwrap();
    assert_eq!(value["failures"], serde_json::json!([]));
    assert!(value.get("timings_ms").is_none());

    let mut control: Vec<&str> = args.to_vec();
    control.push("--negative-control");
    let out = run(&control);
    assert_eq!(out.status.code(), Some(1));
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(!value["failures"].as_array().unwrap().is_empty());
}

#[test]
fn bad_inputs_exit_2() {
    let out = run(&["member", "--tensor", "/nonexistent/t.json", "--l", "1"]);
    assert_eq!(out.status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let mangled = dir.path().join("mangled.json");
    std::fs::write(&mangled, r#"{"d":2,"width":3,"entries":[{"idx":[1,1],"value":"2"}]}"#)
        .unwrap();
    let out = run(&["member", "--tensor", mangled.to_str().unwrap(), "--l", "1"]);
    assert_eq!(out.status.code(), Some(2), "repeated index tuples are rejected");

    let point = dir.path().join("point.json");
    std::fs::write(&point, r#"{"k":1,"width":2,"rows":[["1","2"]]}"#).unwrap();
    let out = run(&["push", "--preset-k", "2", "--point", point.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "row-count mismatch is bad input");

    let out = run(&["verify", "--preset-k", "1", "--width", "1", "--trials", "1", "--seed", "0"]);
    assert_eq!(out.status.code(), Some(2), "width below the map's needs is bad input");
}
