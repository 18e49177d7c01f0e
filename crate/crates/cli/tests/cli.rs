use std::process::{Command, Output};

fn thompson(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_thompson"))
        .args(args)
        .env_remove("THOMPSON_MACHINES")
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = thompson(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn line(args: &[&str]) -> String {
    stdout(args).trim_end_matches('\n').to_string()
}

#[test]
fn reduce_examples() {
    assert_eq!(line(&["reduce", "x1^1 x0^1"]), "x0^1 x2^1");
    assert_eq!(line(&["reduce", ""]), "e");
    assert_eq!(line(&["reduce", "x1^-1 x0^1"]), "x0^1 x2^-1");
}

#[test]
fn member_reports_cases() {
    assert_eq!(line(&["member", "x1inv", "", "#b"]), "accept (case 1.1)");
    assert_eq!(
        line(&["member", "x1inv", "bb", "bb###b"]),
        "accept (case 2.1 R>M)"
    );
    assert_eq!(line(&["member", "x0inv", "a", "a#b"]), "reject");
    assert_eq!(
        line(&["member", "x1", "#b", ""]),
        "accept (case 1.1, tracks swapped)"
    );
}

#[test]
fn normal_forms_and_images() {
    assert_eq!(line(&["nf", "x1^1 x0^1"]), "a##a");
    assert_eq!(line(&["nf", "x0^-1 x0"]), "");
    assert_eq!(line(&["apply", "bb", "x1inv"]), "bb###b");
    assert_eq!(line(&["apply", "a", "x0inv"]), "");
    assert_eq!(line(&["encode", "x1 x0"]), "a##a");
    assert_eq!(line(&["decode", "a##a"]), "x0^1 x2^1");
    assert_eq!(line(&["mult", "x1", "x0"]), "x0^1 x2^1");
}

#[test]
fn outputs_round_trip() {
    for word in ["x1 x0", "x0^-2 x1 x3^-1", "x2^-1 x1^2"] {
        let normal = line(&["reduce", word]);
        assert_eq!(line(&["reduce", &normal]), normal);
        let encoded = line(&["encode", word]);
        assert_eq!(line(&["decode", &encoded]), normal);
    }
    let dot = stdout(&["export-dot", "fig1"]);
    assert_eq!(dot.matches("doublecircle").count(), 3);
    let definition = stdout(&["show", "fig4", "--assembled"]);
    assert!(definition.starts_with("name: fig4"));
}

#[test]
fn enumerate_fig1() {
    let words: Vec<String> = stdout(&["enumerate", "fig1", "2"])
        .lines()
        .map(str::to_string)
        .collect();
    assert_eq!(words, ["", "a", "aa", "b", "bb", "#a", "#b"]);
    let pairs = stdout(&["enumerate", "m1", "2"]);
    assert_eq!(pairs.lines().next(), Some("(_|#)"));
}

#[test]
fn exit_codes() {
    let domain = thompson(&["decode", "ab"]);
    assert_eq!(domain.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&domain.stderr).starts_with("error:"));
    assert_eq!(thompson(&["reduce", "y3"]).status.code(), Some(1));
    assert_eq!(thompson(&["apply", "a#", "x0"]).status.code(), Some(1));
    assert_eq!(thompson(&["export-dot", "fig9"]).status.code(), Some(1));
    assert_eq!(thompson(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(thompson(&["member", "x2", "", ""]).status.code(), Some(2));
    assert_eq!(
        thompson(&["verify", "--radius", "x"]).status.code(),
        Some(2)
    );
    assert_eq!(
        thompson(&["verify", "--radius", "9"]).status.code(),
        Some(1)
    );
}

#[test]
fn verify_small_with_report_file() {
    let path = std::env::temp_dir().join(format!("thompson-report-{}.txt", std::process::id()));
    let out = thompson(&[
        "verify",
        "--max-len",
        "6",
        "--radius",
        "3",
        "--len-cap",
        "3",
        "--p-max",
        "5",
        "--report",
        path.to_str().unwrap(),
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(std::fs::read_to_string(&path).unwrap(), text);
    std::fs::remove_file(&path).unwrap();
    assert!(text.contains("[multipliers] PASS"));
    assert!(text.contains("summary:"));
    // The D <= D' <= 2D check fails already in the radius 3 ball.
    assert!(text.contains("[encoding-length] FAIL"));
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn patches_can_be_disabled() {
    assert_eq!(
        line(&["--no-patches", "member", "x0inv", "a", ""]),
        "reject"
    );
    assert_eq!(
        thompson(&["--no-patches", "apply", "a", "x0inv"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn machine_directory_from_environment() {
    let dir = std::env::temp_dir().join(format!("thompson-cli-machines-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    std::fs::write(
        dir.join("fig1.cam"),
        "name: only-empty\nalphabet: a b #\nstates: q0\nstart: q0\naccept: q0\n",
    )
    .unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_thompson"))
        .args(["enumerate", "fig1", "3"])
        .env("THOMPSON_MACHINES", &dir)
        .output()
        .unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "\n");
    std::fs::remove_dir_all(&dir).unwrap();
}
