use std::path::Path;
use std::process::{Command, Output};

use minfit::synth::trial_rng;
use minfit::{OrientedPoint, SolutionKind, SolverKind};
use minfit_cli::io::{write_points, PointFormat};
use minfit_cli::report::FitReport;
use minfit_cli::stats::TrialStats;

fn minfit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_minfit")).args(args).env_remove("MINFIT_SEED").output().expect("binary runs")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn fit_planted_five_points() {
    let dir = tempfile::tempdir().unwrap();
    let (_, pts) = SolverKind::Cylinder5P.planted(&mut trial_rng(3, 0));
    let file = write(dir.path(), "five.csv", &write_points(&pts, PointFormat::Csv));
    let out = minfit(&["fit", "--kind", "cylinder-5p", "--input", &file]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let report: FitReport = serde_json::from_str(&text).unwrap();
    assert_eq!(report.schema, "minfit/1");
    assert!(!report.solution.primitives.is_empty());
    for r in &report.residuals {
        assert!(r.position.iter().all(|x| *x <= 1e-7), "{r:?}");
    }
    // The document round-trips.
    let again: FitReport = serde_json::from_str(&serde_json::to_string(&report).unwrap()).unwrap();
    assert_eq!(again, report);
}

#[test]
fn fit_two_oriented_points_json_input() {
    let dir = tempfile::tempdir().unwrap();
    let (_, pts) = SolverKind::Cone2N.planted(&mut trial_rng(4, 0));
    let file = write(dir.path(), "two.json", &write_points(&pts, PointFormat::Json));
    let outfile = dir.path().join("out.json");
    let out = minfit(&["fit", "--kind", "cone-2n", "--input", &file, "--out", outfile.to_str().unwrap()]);
    assert!(out.status.success());
    let report: FitReport = serde_json::from_str(&std::fs::read_to_string(outfile).unwrap()).unwrap();
    assert_eq!(report.solution.kind, SolutionKind::Finite);
    assert_eq!(report.solution.len(), 2);
    assert!(report.residuals.iter().all(|r| r.normal.len() == 2 && r.normal.iter().all(|x| *x <= 1e-7)));
}

#[test]
fn usage_and_parse_errors() {
    let dir = tempfile::tempdir().unwrap();
    let three = write(dir.path(), "three.csv", "0,0,0\n1,0,0\n0,1,0\n");
    let out = minfit(&["fit", "--kind", "cylinder-5p", "--input", &three]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("5 points"));

    let plain = write(dir.path(), "plain.csv", "0,0,0\n1,0,0\n");
    let out = minfit(&["fit", "--kind", "cone-2n", "--input", &plain]);
    assert_eq!(out.status.code(), Some(2));

    let bad = write(dir.path(), "bad.csv", "0,0,0\n1,0,x\n0,1,0\n");
    let out = minfit(&["fit", "--kind", "cylinder-1n2p", "--input", &bad]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    assert_eq!(minfit(&["fit", "--kind", "sphere", "--input", &three]).status.code(), Some(2));
}

#[test]
fn empty_solution_set_is_success() {
    let dir = tempfile::tempdir().unwrap();
    // The two plain points lie on opposite sides of the normal plane.
    let file = write(dir.path(), "opp.csv", "0,0,0,0,0,1\n1,0.3,0.5\n-0.2,1,-0.4\n");
    let out = minfit(&["fit", "--kind", "cylinder-1n2p", "--input", &file]);
    assert!(out.status.success());
    let report: FitReport = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report.solution.kind, SolutionKind::Empty);
}

#[test]
fn stats_is_deterministic_and_seed_falls_back_to_env() {
    let run = |extra: &[&str], env: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_minfit"));
        cmd.args(["stats", "--kind", "cone-1n3p"]).args(extra).env_remove("MINFIT_SEED");
        if let Some(s) = env {
            cmd.env("MINFIT_SEED", s);
        }
        let out = cmd.output().unwrap();
        assert!(out.status.success());
        let mut s: TrialStats = serde_json::from_slice(&out.stdout).unwrap();
        s.mean_time_us = 0.0;
        s
    };
    let a = run(&["--seed", "17", "--trials", "50"], None);
    assert_eq!(a, run(&["--seed", "17", "--trials", "50"], None));
    assert_eq!(a, run(&["--trials", "50"], Some("17")));
    assert_eq!(a.histogram.values().sum::<u64>(), 50);
    let one = run(&["--seed", "9", "--trials", "1"], None);
    assert_eq!(one, run(&["--seed", "9", "--trials", "1"], None));

    let out = minfit(&["stats", "--kind", "cylinder-1n2p", "--trials", "100", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("count,frequency,proportion_percent\n"));
    assert_eq!(minfit(&["stats", "--kind", "cone-6p", "--trials", "0"]).status.code(), Some(2));
}

#[test]
fn bench_and_sample() {
    let out = minfit(&["bench", "--kind", "cone-2n", "--trials", "20"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v[0]["mean_ms"].as_f64().unwrap() >= 0.0);
    assert_eq!(minfit(&["bench", "--trials", "3"]).status.code(), Some(2));

    let out = minfit(&["sample", "--kind", "cone-1n3p", "--seed", "2"]);
    let pts = minfit_cli::io::parse_points(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(pts.len(), 4);
    assert!(pts[0].n.is_some() && pts[1..].iter().all(|p: &OrientedPoint| p.n.is_none()));
}
