use std::process::Command;

use jetsym::frontend::cli::run_command;
use jetsym::frontend::GARDNER;

fn run(args: &[&str]) -> jetsym::frontend::cli::Outcome {
    let mut full = vec!["jetsym"];
    full.extend_from_slice(args);
    run_command(full)
}

fn json(args: &[&str]) -> (i32, serde_json::Value) {
    let mut full = vec!["--format", "json"];
    full.extend_from_slice(args);
    let out = run(&full);
    assert_eq!(out.stderr, "", "{args:?}");
    (out.code, serde_json::from_str(&out.stdout).unwrap())
}

#[test]
fn symmetry_passes_with_zero_residual() {
    let (code, v) = json(&[
        "check-symmetry",
        "@gardner",
        "--char",
        "Q3",
        "--system",
        "gardner",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["verdict"], "pass");
    assert_eq!(v["eps_order"], 1);
    assert_eq!(v["max_jet_order"], 12);
    assert_eq!(v["model_hash"].as_str().unwrap().len(), 64);
    assert_eq!(v["checks"][0]["name"], "symmetry Q3");
    assert_eq!(v["checks"][0]["verdict"], "pass");
    assert_eq!(v["checks"][0]["residual"], "0");
}

#[test]
fn several_characteristics_at_once() {
    let (code, v) = json(&[
        "check-symmetry",
        "@potential_burgers",
        "--char",
        "Q1,Q2,Q12,Q5_printed",
        "--system",
        "burgers",
    ]);
    assert_eq!(code, 1);
    let verdicts: Vec<&str> = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["verdict"].as_str().unwrap())
        .collect();
    assert_eq!(verdicts, ["pass", "pass", "pass", "fail"]);
    assert_ne!(v["checks"][3]["residual"], "0");
}

#[test]
fn conservation_failure_carries_obstruction() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.jf");
    std::fs::write(
        &path,
        "system heat { rhs: u_xx; }\ndensity bad = x*u^2;\ndensity mass = u;\n",
    )
    .unwrap();
    let path = path.to_str().unwrap();
    let (code, v) = json(&[
        "check-claw",
        path,
        "--density",
        "mass,bad",
        "--system",
        "heat",
    ]);
    assert_eq!(code, 1);
    let mass = &v["checks"][0];
    assert_eq!(mass["verdict"], "pass");
    assert_eq!(mass["certificates"]["flux"], "-u_x");
    assert_eq!(mass["certificates"]["density"], "u");
    let bad = &v["checks"][1];
    assert_eq!(bad["verdict"], "fail");
    // D_t(x u^2) = 2 x u u_xx, whose Euler derivative is
    // 2 x u_xx + D_x^2(2 x u) = 4 u_x + 4 x u_xx.
    assert_eq!(bad["obstruction"], "4*u_x + 4*x*u_xx");
}

#[test]
fn noether_with_expected_density() {
    let (code, v) = json(&[
        "noether", "@gardner", "--char", "Q7", "--op", "E", "--expect", "Pt7",
    ]);
    assert_eq!(code, 0);
    assert!(v["checks"][0]["certificates"]["density"].is_string());
    let (code, v) = json(&["noether", "@gardner", "--char", "Q3", "--op", "D"]);
    assert_eq!(code, 1);
    assert!(v["checks"][0]["obstruction"].is_string());
}

#[test]
fn recursion_modes() {
    let out = run(&[
        "check-recursion",
        "@potential_burgers",
        "--op",
        "R2",
        "--system",
        "burgers",
    ]);
    assert_eq!(out.code, 0, "{}", out.stdout);
    let out = run(&[
        "check-recursion",
        "@gardner",
        "--op",
        "R",
        "--system",
        "gardner",
    ]);
    assert_eq!(out.code, 1);
    let (code, v) = json(&[
        "check-recursion",
        "@gardner",
        "--op",
        "R",
        "--system",
        "gardner",
        "--mode",
        "action",
        "--seeds",
        "Q1,Q4,Q5",
    ]);
    assert_eq!(code, 0);
    let images = v["checks"][0]["certificates"]["characteristics"]
        .as_array()
        .unwrap();
    assert_eq!(images.len(), 3);
    assert_eq!(images[0], "6*u*u_x - u_xxx + 6*eps*u^2*u_x");
    let out = run(&[
        "check-recursion",
        "@gardner",
        "--op",
        "R",
        "--system",
        "gardner",
        "--mode",
        "action",
    ]);
    assert_eq!(out.code, 2);
}

#[test]
fn pair_check_passes_and_strict_mode_reports_jacobi() {
    let out = run(&["check-pair", "@gardner", "--op1", "D", "--op2", "E"]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.contains("[pass] compatible D E"));
    assert!(out.stdout.contains("E alone fails the Jacobi identity"));
    let out = run(&[
        "check-pair",
        "@gardner",
        "--op1",
        "D",
        "--op2",
        "E",
        "--strict",
    ]);
    assert_eq!(out.code, 1);
    assert!(out.stdout.contains("[pass] jacobi D"));
    assert!(out.stdout.contains("[fail] jacobi E"));
}

#[test]
fn hierarchy_reports_flows_and_functionals() {
    let out = run(&[
        "hierarchy",
        "@gardner",
        "--op",
        "R",
        "--seed",
        "Kbar1",
        "--steps",
        "2",
        "--dop",
        "D",
    ]);
    assert_eq!(out.code, 0, "{}", out.stdout);
    assert!(out
        .stdout
        .contains("K1: 30*eps*u^2*u_x - 10*eps*u*u_xxx - 20*eps*u_x*u_xx + eps*u{5}"));
    assert!(out.stdout.contains("[pass] involution H0 H2 second"));

    let (code, v) = json(&[
        "hierarchy",
        "@gardner",
        "--op",
        "R",
        "--seed",
        "K1",
        "--steps",
        "2",
        "--dop",
        "D",
    ]);
    assert_eq!(code, 1);
    let h = &v["checks"][0]["certificates"]["hierarchy"];
    assert_eq!(h["flows"].as_array().unwrap().len(), 2);
    assert_eq!(h["functionals"][1], serde_json::Value::Null);
    assert_eq!(h["stopped_at"]["step"], 2);
    assert_ne!(v["checks"][0]["obstruction"], serde_json::Value::Null);
}

#[test]
fn latex_uses_subscripted_derivatives() {
    let out = run(&[
        "--format",
        "latex",
        "hierarchy",
        "@gardner",
        "--op",
        "R",
        "--seed",
        "Kbar1",
        "--steps",
        "1",
        "--dop",
        "D",
    ]);
    assert_eq!(out.code, 0);
    assert!(out
        .stdout
        .contains("K_{0} &= \\varepsilon(6uu_x - u_{xxx})"));
    assert!(out.stdout.starts_with("% --format latex hierarchy"));
}

#[test]
fn resource_cap_exit_code() {
    let capped = GARDNER.replace("set max_jet_order = 12;", "set max_jet_order = 6;");
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("capped.jf");
    std::fs::write(&path, capped).unwrap();
    let out = run(&[
        "hierarchy",
        path.to_str().unwrap(),
        "--op",
        "R",
        "--seed",
        "Kbar1",
        "--steps",
        "3",
        "--dop",
        "D",
    ]);
    assert_eq!(out.code, 3, "{}", out.stderr);
    assert!(out.stderr.contains("cap"));
}

#[test]
fn usage_and_model_errors() {
    for args in [
        vec!["frobnicate"],
        vec!["check-symmetry", "@gardner", "--system", "gardner"],
        vec![
            "check-symmetry",
            "@gardner",
            "--char",
            "Q3",
            "--system",
            "gardner",
            "--bogus",
        ],
        vec![
            "check-symmetry",
            "@nothing",
            "--char",
            "Q3",
            "--system",
            "gardner",
        ],
        vec![
            "check-symmetry",
            "/no/such/file.jf",
            "--char",
            "Q3",
            "--system",
            "gardner",
        ],
        vec![
            "check-symmetry",
            "@gardner",
            "--char",
            "Q99",
            "--system",
            "gardner",
        ],
        vec![
            "check-claw",
            "@gardner",
            "--density",
            "P1",
            "--system",
            "kdv",
        ],
        vec![
            "--format",
            "yaml",
            "check-symmetry",
            "@gardner",
            "--char",
            "Q3",
            "--system",
            "gardner",
        ],
        vec![
            "validate-numeric",
            "@gardner",
            "--system",
            "gardner",
            "--density",
            "M",
            "--points",
            "100",
        ],
        vec![
            "hierarchy",
            "@gardner",
            "--op",
            "R",
            "--seed",
            "Kbar1",
            "--steps",
            "x",
            "--dop",
            "D",
        ],
    ] {
        let out = run(&args);
        assert_eq!(out.code, 2, "{args:?}");
        assert_eq!(out.stdout, "");
        assert!(!out.stderr.is_empty());
    }
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.jf");
    std::fs::write(&path, "system s { rhs: u_xx; }\nchar q = u_x +;\n").unwrap();
    let out = run(&[
        "check-symmetry",
        path.to_str().unwrap(),
        "--char",
        "q",
        "--system",
        "s",
    ]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains(":2:"), "{}", out.stderr);
    assert!(out.stderr.contains("expected"), "{}", out.stderr);
}

#[test]
fn help_and_version() {
    let out = run(&["--help"]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.contains("check-symmetry"));
    assert!(out.stdout.contains("validate-numeric"));
    assert_eq!(run(&["--version"]).code, 0);
}

#[test]
fn output_is_deterministic() {
    let args = [
        "--format",
        "json",
        "check-claw",
        "@gardner",
        "--density",
        "P1,P2,P5,P6",
        "--system",
        "gardner",
    ];
    assert_eq!(run(&args), run(&args));
}

#[test]
fn numeric_validation_small_grid() {
    let (code, v) = json(&[
        "validate-numeric",
        "@gardner",
        "--system",
        "gardner",
        "--density",
        "M",
        "--eps",
        "0.01",
        "--points",
        "64",
        "--dt",
        "1e-3",
        "--t-end",
        "0.1",
        "--sample-every",
        "10",
    ]);
    assert_eq!(code, 0);
    let series = &v["numeric"][0];
    assert_eq!(series["epsilon"], 0.01);
    let rows = series["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 11);
    assert!(rows.iter().all(|r| r["drift"].as_f64().unwrap() < 1e-12));

    let (code, v) = json(&[
        "validate-numeric",
        "@gardner",
        "--system",
        "gardner",
        "--density",
        "M",
        "--eps",
        "0.01",
        "--points",
        "64",
        "--dt",
        "0.5",
        "--t-end",
        "5",
    ]);
    assert_eq!(code, 1);
    assert!(v["checks"][0]["notes"][0]
        .as_str()
        .unwrap()
        .contains("diverged"));
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_jetsym");
    let out = Command::new(bin)
        .args([
            "check-symmetry",
            "@gardner",
            "--char",
            "Q3",
            "--system",
            "gardner",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).ends_with("result: pass\n"));
    let out = Command::new(bin)
        .args([
            "check-symmetry",
            "@gardner",
            "--char",
            "Q3_missing",
            "--system",
            "gardner",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Q3_missing"));
}
