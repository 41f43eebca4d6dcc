//! Solution-count histograms over random inputs.

use std::collections::BTreeMap;
use std::time::Instant;

use minfit::synth::trial_rng;
use minfit::{SolutionKind, SolverKind};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialStats {
    pub solver: SolverKind,
    pub trials: u64,
    pub seed: u64,
    /// Solution count -> number of trials.
    pub histogram: BTreeMap<usize, u64>,
    /// Trials reported as infinite families.
    pub degenerate: u64,
    /// Trials where the solver returned an error.
    pub failed: u64,
    /// Trials whose count was reduced by merging a double root.
    pub merged: u64,
    /// Trials whose count lies outside the admissible set without a merge note.
    pub violations: u64,
    pub mean_time_us: f64,
}

enum Outcome {
    Count { n: usize, merged: bool },
    Degenerate,
    Failed,
}

fn run_trial(kind: SolverKind, seed: u64, index: u64) -> (Outcome, f64) {
    let mut rng = trial_rng(seed, index);
    let pts = kind.random_input(&mut rng);
    let t = Instant::now();
    let res = kind.solve(&pts);
    let us = t.elapsed().as_secs_f64() * 1e6;
    let out = match res {
        Ok(set) if set.kind == SolutionKind::InfiniteFamily => Outcome::Degenerate,
        Ok(set) => Outcome::Count { n: set.len(), merged: set.has_merged_root() },
        Err(_) => Outcome::Failed,
    };
    (out, us)
}

/// Runs `trials` independent trials on uniform unit-cube input. The result
/// does not depend on the number of threads.
pub fn run_stats(kind: SolverKind, trials: u64, seed: u64) -> TrialStats {
    let outcomes: Vec<(Outcome, f64)> = (0..trials).into_par_iter().map(|i| run_trial(kind, seed, i)).collect();
    let mut stats = TrialStats {
        solver: kind,
        trials,
        seed,
        histogram: BTreeMap::new(),
        degenerate: 0,
        failed: 0,
        merged: 0,
        violations: 0,
        mean_time_us: 0.0,
    };
    let mut total = 0.0;
    for (o, us) in &outcomes {
        total += us;
        match o {
            Outcome::Count { n, merged } => {
                *stats.histogram.entry(*n).or_default() += 1;
                if *merged {
                    stats.merged += 1;
                } else if !kind.admissible().contains(n) {
                    stats.violations += 1;
                }
            }
            Outcome::Degenerate => stats.degenerate += 1,
            Outcome::Failed => stats.failed += 1,
        }
    }
    stats.mean_time_us = if trials > 0 { total / trials as f64 } else { 0.0 };
    stats
}

impl TrialStats {
    /// Percentage of all trials with `count` solutions.
    pub fn proportion(&self, count: usize) -> f64 {
        let f = self.histogram.get(&count).copied().unwrap_or(0);
        100.0 * f as f64 / self.trials.max(1) as f64
    }

    /// `count,frequency,proportion_percent`, one row per observed count.
    pub fn histogram_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["count", "frequency", "proportion_percent"]).expect("in-memory write");
        for (count, freq) in &self.histogram {
            w.write_record([count.to_string(), freq.to_string(), format!("{:.2}", self.proportion(*count))])
                .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("ascii")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_complete() {
        let a = run_stats(SolverKind::Cylinder1N2P, 200, 9);
        let b = run_stats(SolverKind::Cylinder1N2P, 200, 9);
        assert_eq!(a.histogram, b.histogram);
        let sum: u64 = a.histogram.values().sum::<u64>() + a.degenerate + a.failed;
        assert_eq!(sum, 200);
        assert!(a.histogram_csv().starts_with("count,frequency,proportion_percent\n"));
    }
}
