use std::process::Command;

use serde_json::Value;
use spindir::cli::{run, ReportEnvelope, EXIT_OK, EXIT_PROPERTY_FAILURE, EXIT_USAGE};

fn run_args(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("spindir").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn report(args: &[&str]) -> ReportEnvelope {
    let (code, out, err) = run_args(args);
    assert_eq!(code, EXIT_OK, "{args:?}: {err}");
    serde_json::from_str(&out).unwrap()
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap_or_else(|| panic!("not a number: {v}"))
}

#[test]
fn table_rows_and_exact_forms() {
    let env = report(&["table", "--n-max", "7"]);
    let rows = env.results["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 7);
    let exact = [
        2.0 / 3.0,
        (3.0 + 3f64.sqrt()) / 6.0,
        (6.0 + 6f64.sqrt()) / 10.0,
        (5.0 + 15f64.sqrt()) / 10.0,
    ];
    for (row, e) in rows.iter().zip(exact) {
        assert!((num(&row["fidelity"]) - e).abs() < 1e-14);
        assert!(row["exact"].is_string());
    }
    for (row, r4) in rows[4..].iter().zip([0.9114, 0.9306, 0.9429]) {
        assert_eq!(num(&row["rounded_4"]), r4);
        assert!(row["exact"].is_null());
    }
    assert_eq!(rows[3]["effective_dimension"], 9);
    assert_eq!(rows[2]["effective_dimension"], 6);
    assert!((num(&rows[1]["parallel_fidelity"]) - 0.75).abs() < 1e-15);

    let single = report(&["table", "--n-max", "1"]);
    assert_eq!(single.results["rows"].as_array().unwrap().len(), 1);
}

#[test]
fn table_tail_bound() {
    let env = report(&["table", "--n-max", "200"]);
    let last = env.results["rows"]
        .as_array()
        .unwrap()
        .last()
        .unwrap()
        .clone();
    let xi = spindir::jacobi::BESSEL_J0_FIRST_ZERO;
    assert!(1.0 - num(&last["fidelity"]) < 1.05 * xi * xi / 40000.0);
}

#[test]
fn csv_and_json_carry_the_same_numbers() {
    let env = report(&["table", "--n-max", "40"]);
    let (code, csv, _) = run_args(&["table", "--n-max", "40", "--format", "csv"]);
    assert_eq!(code, EXIT_OK);
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "n,fidelity,exact,rounded_4,effective_dimension,parallel_fidelity"
    );
    let rows = env.results["rows"].as_array().unwrap();
    let mut count = 0;
    for (line, row) in lines.zip(rows) {
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(cells[0].parse::<u64>().unwrap(), row["n"].as_u64().unwrap());
        assert_eq!(cells[1].parse::<f64>().unwrap(), num(&row["fidelity"]));
        assert_eq!(cells[3].parse::<f64>().unwrap(), num(&row["rounded_4"]));
        assert_eq!(
            cells[4].parse::<u64>().unwrap(),
            row["effective_dimension"].as_u64().unwrap()
        );
        assert_eq!(
            cells[5].parse::<f64>().unwrap(),
            num(&row["parallel_fidelity"])
        );
        count += 1;
    }
    assert_eq!(count, 40);
}

#[test]
fn fidelity_reports() {
    let env = report(&["fidelity", "--spins", "4", "--ma", "2", "--mb", "2"]);
    assert!((num(&env.results["fidelity"]) - (10.0 + 10f64.sqrt()) / 15.0).abs() < 1e-13);
    // integers are twice-values; fractions are read literally
    let env = report(&["fidelity", "--spins", "5", "--ma", "3", "--mb", "1"]);
    let env2 = report(&["fidelity", "--spins", "5", "--ma", "3/2", "--mb", "1/2"]);
    assert_eq!(env.results, env2.results);

    let env = report(&["fidelity", "--spins", "2", "--ma", "2", "--mb", "2"]);
    assert!((num(&env.results["fidelity"]) - 0.75).abs() < 1e-14);

    let env = report(&["fidelity", "--spins", "2", "--ma", "0", "--mb", "0"]);
    let r = &env.results;
    assert!((num(&r["fidelity"]) - (3.0 + 3f64.sqrt()) / 6.0).abs() < 1e-14);
    for c in r["optimal_state"].as_array().unwrap() {
        assert!((num(&c["amplitude"]) - 0.5f64.sqrt()).abs() < 1e-14);
    }
    assert_eq!(r["jacobi"]["l"], 2);
    assert_eq!(r["jacobi"]["a"], 0);
    assert_eq!(r["jacobi"]["b"], 0);
    assert!((num(&r["jacobi_fidelity"]) - num(&r["fidelity"])).abs() < 1e-14);
    let m = r["matrix"].as_array().unwrap();
    assert_eq!(m.len(), 2);
    assert!((num(&m[0][1]) - 1.0 / 3f64.sqrt()).abs() < 1e-14);
}

#[test]
fn fidelity_rejects_bad_projections() {
    assert_eq!(
        run_args(&["fidelity", "--spins", "3", "--ma", "2"]).0,
        EXIT_USAGE
    );
    assert_eq!(
        run_args(&["fidelity", "--spins", "2", "--ma", "4"]).0,
        EXIT_USAGE
    );
    assert_eq!(run_args(&["fidelity", "--spins", "0"]).0, EXIT_USAGE);
}

#[test]
fn verify_suites_pass() {
    for suite in [
        "jacobi",
        "povm",
        "orthogonality",
        "multiplicity",
        "asymptotics",
    ] {
        let (code, out, err) = run_args(&["verify", "--suite", suite]);
        assert_eq!(code, EXIT_OK, "{suite}: {err}\n{out}");
        let env: ReportEnvelope = serde_json::from_str(&out).unwrap();
        assert_eq!(env.results["passed"], true);
        assert!(env.results["failures"].as_array().unwrap().is_empty());
    }
}

#[test]
fn injected_fault_fails_verification() {
    for suite in ["jacobi", "asymptotics"] {
        let (code, out, _) = run_args(&["verify", "--suite", suite, "--inject-fault", "nu-sign"]);
        assert_eq!(code, EXIT_PROPERTY_FAILURE, "{suite}");
        let env: ReportEnvelope = serde_json::from_str(&out).unwrap();
        assert_eq!(env.results["passed"], false);
        assert!(!env.results["failures"].as_array().unwrap().is_empty());
    }
    assert_eq!(
        run_args(&["verify", "--suite", "jacobi", "--inject-fault", "bogus"]).0,
        EXIT_USAGE
    );
}

#[test]
fn simulate_small_and_deterministic() {
    let a = report(&[
        "simulate",
        "--spins",
        "2",
        "--povm",
        "tetrahedron",
        "--trials",
        "10",
        "--seed",
        "42",
    ]);
    let b = report(&[
        "simulate",
        "--spins",
        "2",
        "--povm",
        "tetrahedron",
        "--trials",
        "10",
        "--seed",
        "42",
    ]);
    assert_eq!(a, b);
    let r = &a.results;
    assert_eq!(r["trials"], 10);
    assert_eq!(r["seed"], 42);
    assert!(num(&r["stderr"]) > 0.01);
    assert!((num(&r["target"]) - (3.0 + 3f64.sqrt()) / 6.0).abs() < 1e-14);
    assert!(num(&r["completeness_residual"]) < 1e-12);
    let c = report(&[
        "simulate",
        "--spins",
        "2",
        "--povm",
        "tetrahedron",
        "--trials",
        "10",
        "--seed",
        "43",
    ]);
    assert_ne!(a.results["mean"], c.results["mean"]);
}

#[test]
fn simulate_parallel_spin_reference() {
    let env = report(&[
        "simulate",
        "--spins",
        "2",
        "--povm",
        "tetrahedron",
        "--trials",
        "200000",
        "--mb",
        "2",
    ]);
    assert!((num(&env.results["target"]) - 0.75).abs() < 1e-14);
    assert!(num(&env.results["sigma_distance"]) < 4.0);
}

#[test]
fn simulate_rejects_bad_arguments() {
    assert_eq!(
        run_args(&["simulate", "--spins", "2", "--povm", "octahedron"]).0,
        EXIT_USAGE
    );
    assert_eq!(
        run_args(&[
            "simulate",
            "--spins",
            "2",
            "--povm",
            "tetrahedron",
            "--trials",
            "0"
        ])
        .0,
        EXIT_USAGE
    );
    assert_eq!(
        run_args(&["simulate", "--spins", "2", "--povm", "cube"]).0,
        EXIT_USAGE
    );
}

#[test]
fn decompose_product_states() {
    let env = report(&["decompose", "uudd"]);
    let r = &env.results;
    let exact = (15.0 + 5.0 * 2f64.sqrt() + 2.0 * 5f64.sqrt()) / 30.0;
    assert!((num(&r["fidelity"]) - exact).abs() < 1e-12);
    let gap = num(&r["gap"]);
    assert!(gap > 0.0 && gap < 0.003, "{gap}");
    let eff: Vec<f64> = r["effective_components"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| num(&c["value"]))
        .collect();
    for (a, e) in eff
        .iter()
        .zip([1.0 / 6f64.sqrt(), 0.5f64.sqrt(), 1.0 / 3f64.sqrt()])
    {
        assert!((a - e).abs() < 1e-14);
    }

    let env = report(&["decompose", "uu"]);
    assert!((num(&env.results["fidelity"]) - 0.75).abs() < 1e-14);
    let eff = env.results["effective_components"].as_array().unwrap();
    assert_eq!(eff.len(), 1);
    assert!((num(&eff[0]["value"]) - 1.0).abs() < 1e-15);

    let env = report(&["decompose", "ud"]);
    assert!((num(&env.results["fidelity"]) - (3.0 + 3f64.sqrt()) / 6.0).abs() < 1e-14);
    assert!(num(&env.results["gap"]).abs() < 1e-14);

    // flipping every spin leaves the fidelity unchanged
    let a = report(&["decompose", "uuud"]);
    let b = report(&["decompose", "dddu"]);
    assert_eq!(a.results["fidelity"], b.results["fidelity"]);
}

#[test]
fn commands_are_deterministic() {
    for args in [
        &["table", "--n-max", "12"][..],
        &["fidelity", "--spins", "7"],
        &["decompose", "udud"],
    ] {
        assert_eq!(run_args(args), run_args(args));
    }
}

#[test]
fn binary_exit_codes_and_streams() {
    let bin = env!("CARGO_BIN_EXE_spindir");
    let ok = Command::new(bin)
        .args(["fidelity", "--spins", "3"])
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(EXIT_OK));
    let env: ReportEnvelope = serde_json::from_slice(&ok.stdout).unwrap();
    assert!((num(&env.results["fidelity"]) - (6.0 + 6f64.sqrt()) / 10.0).abs() < 1e-14);

    let bad = Command::new(bin)
        .args(["table", "--n-max", "0"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(EXIT_USAGE));
    assert!(bad.stdout.is_empty());
    assert!(!bad.stderr.is_empty());

    let fault = Command::new(bin)
        .args(["verify", "--suite", "jacobi", "--inject-fault", "nu-sign"])
        .output()
        .unwrap();
    assert_eq!(fault.status.code(), Some(EXIT_PROPERTY_FAILURE));

    let logged = Command::new(bin)
        .env("RUST_LOG", "info")
        .args(["table", "--n-max", "3"])
        .output()
        .unwrap();
    assert_eq!(logged.status.code(), Some(EXIT_OK));
    assert!(
        serde_json::from_slice::<Value>(&logged.stdout).is_ok(),
        "logs must not reach stdout"
    );
}

#[test]
fn threads_env_splits_work() {
    let bin = env!("CARGO_BIN_EXE_spindir");
    let out = Command::new(bin)
        .env("SPINDIR_THREADS", "4")
        .args([
            "simulate",
            "--spins",
            "3",
            "--povm",
            "octahedron",
            "--trials",
            "100000",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let env: ReportEnvelope = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(env.results["workers"], 4);
    assert_eq!(env.results["trials"], 100000);
    assert!(num(&env.results["sigma_distance"]) < 4.0);
}
