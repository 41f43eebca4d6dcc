//! Per-call timings on random input.

use std::time::Instant;

use minfit::synth::trial_rng;
use minfit::SolverKind;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub kind: SolverKind,
    pub trials: usize,
    pub mean_ms: f64,
    pub p50_ms: f64,
    pub p90_ms: f64,
    pub p99_ms: f64,
}

fn percentile(sorted: &[f64], q: f64) -> f64 {
    let i = ((sorted.len() - 1) as f64 * q).round() as usize;
    sorted[i]
}

/// Times `trials` sequential calls; inputs are generated outside the timer.
pub fn run_bench(kind: SolverKind, trials: usize, seed: u64) -> BenchReport {
    let trials = trials.max(1);
    let inputs: Vec<_> = (0..trials as u64).map(|i| kind.random_input(&mut trial_rng(seed, i))).collect();
    let mut times: Vec<f64> = inputs
        .iter()
        .map(|pts| {
            let t = Instant::now();
            let r = kind.solve(pts);
            std::hint::black_box(&r);
            t.elapsed().as_secs_f64() * 1e3
        })
        .collect();
    times.sort_by(f64::total_cmp);
    BenchReport {
        kind,
        trials,
        mean_ms: times.iter().sum::<f64>() / trials as f64,
        p50_ms: percentile(&times, 0.5),
        p90_ms: percentile(&times, 0.9),
        p99_ms: percentile(&times, 0.99),
    }
}
