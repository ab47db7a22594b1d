//! End-to-end tests of the command-line interface.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use heavytail::distributions::DistributionSpec;
use heavytail::maxent::{self, EntropyKind, MaxEntProblem};

fn heavytail(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_heavytail"))
        .args(args)
        .output()
        .expect("failed to launch binary")
}

fn write_dataset(path: &Path, n: usize) {
    let prices = DistributionSpec::pareto(1.2, 1e6)
        .unwrap()
        .sample(n, 1001)
        .unwrap();
    let levels: Vec<f64> = (1..=40).map(f64::from).collect();
    let target = maxent::boltzmann_mean(&levels, 0.27);
    let problem = MaxEntProblem::new(levels, target, EntropyKind::Shannon).unwrap();
    let solution = maxent::solve(&problem).unwrap();
    let bidders = maxent::generate_synthetic(&solution, n, 1002).unwrap();

    let mut csv = String::from("tender_id,authority_id,winner_id,price,n_bidders,date\n");
    for (i, (p, b)) in prices.values().iter().zip(bidders.values()).enumerate() {
        csv.push_str(&format!(
            "t{i},A{},W{},{p},{b},2009-06-0{}\n",
            i % 61,
            i % 251,
            i % 9 + 1
        ));
    }
    fs::write(path, csv).unwrap();
}

#[test]
fn analyze_writes_report_and_plots_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("tenders.csv");
    write_dataset(&input, 2500);

    let run = |out: &str| {
        heavytail(&[
            "analyze",
            "--input",
            input.to_str().unwrap(),
            "--floor",
            "0",
            "--replicates",
            "200",
            "--seed",
            "42",
            "--out-dir",
            dir.path().join(out).to_str().unwrap(),
        ])
    };
    let first = run("out1");
    assert!(
        first.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&first.stderr)
    );
    let second = run("out2");
    assert!(second.status.success());

    for name in [
        "report.json",
        "fig1_cdf.tsv",
        "fig1_pdf.tsv",
        "fig2_cdf.tsv",
        "fig2_zipf.tsv",
        "fig3_cdf.tsv",
        "fig3_zipf.tsv",
    ] {
        let a = fs::read(dir.path().join("out1").join(name)).unwrap();
        let b = fs::read(dir.path().join("out2").join(name)).unwrap();
        assert!(!a.is_empty(), "{name} is empty");
        assert_eq!(a, b, "{name} differs between identical runs");
    }

    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("out1/report.json")).unwrap())
            .unwrap();
    assert_eq!(report["schema_version"], 1);
    assert_eq!(report["seed"], 42);
    assert_eq!(report["config"]["replicates"], 200);
    assert!(report["bidders"]["fits"][0]["exponent"].as_f64().unwrap() > 0.0);
    assert!(report["revenues"]["zipf"]["gamma"].as_f64().unwrap() > 0.0);
    assert!(report["reference"]["revenues_alpha"].as_f64().unwrap() == 1.236);
}

#[test]
fn analyze_rejects_empty_input_without_writing_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("empty.csv");
    fs::write(&input, "tender_id,authority_id,winner_id,price,n_bidders\n").unwrap();
    let out_dir = dir.path().join("out");

    let output = heavytail(&[
        "analyze",
        "--input",
        input.to_str().unwrap(),
        "--seed",
        "1",
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(3));
    assert!(!out_dir.exists(), "no outputs may be written on failure");
}

#[test]
fn analyze_missing_file_is_an_input_error() {
    let output = heavytail(&[
        "analyze",
        "--input",
        "/nonexistent/tenders.csv",
        "--seed",
        "1",
        "--out-dir",
        "/tmp/heavytail-nonexistent-out",
    ]);
    assert_eq!(output.status.code(), Some(3));
}

#[test]
fn usage_errors_exit_with_two() {
    let output = heavytail(&["analyze", "--input"]);
    assert_eq!(output.status.code(), Some(2));
    let output = heavytail(&["no-such-command"]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn simulate_is_deterministic_and_fit_recovers_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let out1 = dir.path().join("a.txt");
    let out2 = dir.path().join("b.txt");
    for out in [&out1, &out2] {
        let output = heavytail(&[
            "simulate",
            "--family",
            "pareto",
            "--alpha",
            "1.4",
            "--n",
            "20000",
            "--seed",
            "7",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(output.status.success());
    }
    let a = fs::read(&out1).unwrap();
    assert_eq!(a, fs::read(&out2).unwrap());

    let values: Vec<f64> = String::from_utf8(a)
        .unwrap()
        .lines()
        .map(|l| l.parse().unwrap())
        .collect();
    assert_eq!(values.len(), 20000);
    let alpha = heavytail::tailfit::hill_exponent(&values, 1.0).unwrap();
    assert!((alpha - 1.4).abs() < 0.05, "recovered {alpha}");
}

#[test]
fn simulate_rejects_missing_parameters() {
    let output = heavytail(&[
        "simulate", "--family", "pareto", "--n", "10", "--seed", "1", "--out", "/tmp/x.txt",
    ]);
    assert_eq!(output.status.code(), Some(4));
}

#[test]
fn maxent_solves_and_near_one_matches_shannon() {
    let dir = tempfile::tempdir().unwrap();
    let shannon_out = dir.path().join("shannon.json");
    let tsallis_out = dir.path().join("tsallis.json");

    let output = heavytail(&[
        "maxent",
        "--levels",
        "1,2,4,8",
        "--target",
        "3",
        "--entropy",
        "shannon",
        "--out",
        shannon_out.to_str().unwrap(),
    ]);
    assert!(output.status.success());

    let output = heavytail(&[
        "maxent",
        "--levels",
        "1,2,4,8",
        "--target",
        "3",
        "--entropy",
        "tsallis",
        "--q",
        "1.000001",
        "--out",
        tsallis_out.to_str().unwrap(),
    ]);
    assert!(output.status.success());

    let shannon: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&shannon_out).unwrap()).unwrap();
    let tsallis: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&tsallis_out).unwrap()).unwrap();
    for i in 0..4 {
        let ps = shannon["probabilities"][i].as_f64().unwrap();
        let pt = tsallis["probabilities"][i].as_f64().unwrap();
        assert!((ps - pt).abs() < 1e-3, "level {i}: {ps} vs {pt}");
    }
}

#[test]
fn maxent_symmetric_problem_is_uniform() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("uniform.json");
    let output = heavytail(&[
        "maxent",
        "--levels",
        "1,2,3",
        "--target",
        "2",
        "--entropy",
        "shannon",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(output.status.success());
    let solution: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    for i in 0..3 {
        let p = solution["probabilities"][i].as_f64().unwrap();
        assert!((p - 1.0 / 3.0).abs() < 1e-10);
    }
}

#[test]
fn maxent_infeasible_target_is_a_computation_error() {
    let output = heavytail(&[
        "maxent",
        "--levels",
        "1,2,3",
        "--target",
        "9",
        "--entropy",
        "shannon",
        "--out",
        "/tmp/infeasible.json",
    ]);
    assert_eq!(output.status.code(), Some(4));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("infeasible"), "stderr: {stderr}");
}
