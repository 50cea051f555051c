//! Exit-code and report-format contracts of the command-line surface.

use std::process::Command;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_primtower")
}

fn fixture(name: &str) -> String {
    format!("{}/fixtures/{}", env!("CARGO_MANIFEST_DIR"), name)
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(bin())
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

#[test]
fn usage_errors_exit_two() {
    let (code, _, _) = run(&["verify-tower", "--degree", "3"]); // no input file
    assert_eq!(code, 2);
    let (code, _, _) = run(&["no-such-command"]);
    assert_eq!(code, 2);
    let (code, _, stderr) = run(&[
        "verify-tower",
        "--lie",
        "/does/not/exist.json",
        "--degree",
        "3",
    ]);
    assert_eq!(code, 2);
    assert!(stderr.contains("error"));
    // composite characteristic
    let (code, _, _) = run(&[
        "primitives",
        "--generators",
        "2",
        "--char",
        "6",
        "--degree",
        "3",
    ]);
    assert_eq!(code, 2);
    // tower commands need degree >= 2
    let (code, _, _) = run(&[
        "verify-tower",
        "--lie",
        &fixture("sl2.json"),
        "--degree",
        "1",
    ]);
    assert_eq!(code, 2);
    // the classical endpoint needs p <= degree
    let (code, _, stderr) = run(&[
        "verify-tower",
        "--lie",
        &fixture("f3_line_fixed.json"),
        "--degree",
        "2",
    ]);
    assert_eq!(code, 2);
    assert!(stderr.contains("exceeds"));
    // slack must be positive
    let (code, _, _) = run(&[
        "verify-tower",
        "--lie",
        &fixture("sl2.json"),
        "--degree",
        "3",
        "--slack",
        "0",
    ]);
    assert_eq!(code, 2);
}

#[test]
fn primitives_known_dimension_vectors() {
    let (code, stdout, _) = run(&[
        "--format",
        "json",
        "primitives",
        "--generators",
        "1",
        "--char",
        "2",
        "--degree",
        "4",
    ]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    let dims = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "primitives.dims")
        .unwrap();
    assert_eq!(dims["data"], serde_json::json!([1, 1, 0, 1]));

    let (code, stdout, _) = run(&[
        "--format",
        "json",
        "primitives",
        "--generators",
        "1",
        "--char",
        "0",
        "--degree",
        "3",
    ]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    let dims = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "primitives.dims")
        .unwrap();
    assert_eq!(dims["data"], serde_json::json!([1, 0, 0]));
}

#[test]
fn char_above_cap_warns() {
    let (code, stdout, _) = run(&[
        "primitives",
        "--generators",
        "1",
        "--char",
        "5",
        "--degree",
        "3",
    ]);
    assert_eq!(code, 0);
    assert!(stdout.contains("warning: characteristic 5 exceeds the degree cap 3"));
}

#[test]
fn b1_object_file_drives_the_tower() {
    let (code, stdout, _) = run(&[
        "--format",
        "json",
        "verify-tower",
        "--b1",
        &fixture("b1_abelian2_d3.json"),
        "--degree",
        "3",
    ]);
    assert_eq!(code, 0, "{stdout}");
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["overall"], "pass");
    // no Lie input, so there is no input-recovery line
    assert!(v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["name"] != "lie.recovered"));
    let build = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "l1.build")
        .unwrap();
    assert_eq!(build["data"], serde_json::json!([1, 3, 6, 10]));
    // the degree flag is redundant for object files but must be consistent
    let (code, _, stderr) = run(&[
        "verify-tower",
        "--b1",
        &fixture("b1_abelian2_d3.json"),
        "--degree",
        "4",
    ]);
    assert_eq!(code, 2, "{stderr}");
}

#[test]
fn corrupt_mu0_on_object_files() {
    let (code, stdout, _) = run(&[
        "--format",
        "json",
        "verify-tower",
        "--b1",
        &fixture("b1_abelian2_d3.json"),
        "--degree",
        "3",
        "--corrupt-mu0",
        "3",
    ]);
    assert_eq!(code, 1);
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    let axioms = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "b1.axioms")
        .unwrap();
    assert_eq!(axioms["status"], "fail");
    assert!(axioms["witness"].as_str().unwrap().contains("*"));
}

#[test]
fn text_format_carries_windows_and_witnesses() {
    let (code, stdout, _) = run(&[
        "verify-tower",
        "--lie",
        &fixture("sl2.json"),
        "--degree",
        "3",
        "--corrupt-bracket",
        "2",
    ]);
    assert_eq!(code, 1);
    assert!(stdout.contains("[FAIL] lie.axioms"));
    assert!(stdout.contains("witness:"));
    assert!(stdout.contains("[skip]"));
    assert!(stdout.contains("overall: FAIL"));
    // every check line prints its window
    for line in stdout.lines().filter(|l| l.starts_with('[')) {
        assert!(line.contains('('), "window missing in {line:?}");
    }
}
