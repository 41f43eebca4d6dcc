//! Greedy RANSAC over minimal samples, for synthetic clouds.

use minfit::synth::trial_rng;
use minfit::{cone_residual, cylinder_residual, OrientedPoint, Primitive, SolverKind, Surface};
use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RansacConfig {
    pub kind: SolverKind,
    pub iterations: u64,
    /// Largest distance of an inlier from the surface.
    pub tol_pos: f64,
    /// Largest angle (radians) between an inlier's normal and the surface normal.
    pub tol_normal: f64,
    pub min_inliers: usize,
    pub seed: u64,
    /// Stop after this many primitives.
    pub max_results: usize,
}

#[derive(Debug, Error, PartialEq)]
pub enum RansacError {
    #[error("iterations must be at least 1")]
    NoIterations,
    #[error("tolerances must be positive")]
    Tolerance,
    #[error("{kind} needs {oriented} oriented and {total} points in total; the cloud has {have_oriented} oriented of {have}")]
    TooFewPoints { kind: SolverKind, oriented: usize, total: usize, have_oriented: usize, have: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    pub primitive: Primitive,
    /// Inliers not claimed by an earlier detection.
    pub inliers: usize,
    pub inlier_indices: Vec<usize>,
}

/// Euclidean distance from `p` to the surface.
pub fn surface_distance(prim: &Primitive, p: &minfit::Point3) -> f64 {
    match prim {
        Primitive::Cylinder(c) => cylinder_residual(c, p),
        Primitive::Cone(c) => {
            let r = (p - c.apex).norm();
            match cone_residual(c, p) {
                Ok(a) => r * a.min(std::f64::consts::FRAC_PI_2).sin(),
                Err(_) => 0.0,
            }
        }
    }
}

/// Angle between the carried normal and the surface normal at the point,
/// folded to `[0, pi/2]`; zero for plain points.
fn normal_angle(prim: &Primitive, op: &OrientedPoint) -> f64 {
    let Some(n) = op.n else { return 0.0 };
    let Ok(m) = prim.normal_at(&op.p) else { return std::f64::consts::FRAC_PI_2 };
    let norm = m.norm();
    if norm == 0.0 {
        return std::f64::consts::FRAC_PI_2;
    }
    (n.as_vec().dot(&m).abs() / norm).min(1.0).acos()
}

pub fn is_inlier(prim: &Primitive, op: &OrientedPoint, cfg: &RansacConfig) -> bool {
    surface_distance(prim, &op.p) <= cfg.tol_pos && normal_angle(prim, op) <= cfg.tol_normal
}

/// Draws a minimal sample matching the kind's pattern. Oriented slots are
/// filled from points that carry normals; plain slots drop any normal.
fn draw<R: Rng>(kind: SolverKind, cloud: &[OrientedPoint], oriented: &[usize], rng: &mut R) -> Vec<OrientedPoint> {
    let pat = kind.pattern();
    let need = pat.iter().filter(|o| **o).count();
    let mut picked: Vec<usize> = sample(rng, oriented.len(), need).into_iter().map(|i| oriented[i]).collect();
    let mut rest = Vec::with_capacity(pat.len() - need);
    while rest.len() < pat.len() - need {
        let i = rng.random_range(0..cloud.len());
        if !picked.contains(&i) && !rest.contains(&i) {
            rest.push(i);
        }
    }
    let mut rest = rest.into_iter();
    let mut ori = std::mem::take(&mut picked).into_iter();
    pat.iter()
        .map(|&o| {
            if o {
                cloud[ori.next().expect("counted")]
            } else {
                OrientedPoint::plain(cloud[rest.next().expect("counted")].p)
            }
        })
        .collect()
}

pub fn ransac(cloud: &[OrientedPoint], cfg: &RansacConfig) -> Result<Vec<Detection>, RansacError> {
    if cfg.iterations == 0 {
        return Err(RansacError::NoIterations);
    }
    if !(cfg.tol_pos > 0.0 && cfg.tol_normal > 0.0) {
        return Err(RansacError::Tolerance);
    }
    let pat = cfg.kind.pattern();
    let oriented: Vec<usize> = (0..cloud.len()).filter(|&i| cloud[i].n.is_some()).collect();
    let need = pat.iter().filter(|o| **o).count();
    if oriented.len() < need || cloud.len() < pat.len() {
        return Err(RansacError::TooFewPoints {
            kind: cfg.kind,
            oriented: need,
            total: pat.len(),
            have_oriented: oriented.len(),
            have: cloud.len(),
        });
    }

    let mut candidates: Vec<(Primitive, Vec<usize>)> = (0..cfg.iterations)
        .into_par_iter()
        .flat_map_iter(|it| {
            let mut rng = trial_rng(cfg.seed, it);
            let sample = draw(cfg.kind, cloud, &oriented, &mut rng);
            let prims = cfg.kind.solve(&sample).map(|s| s.primitives).unwrap_or_default();
            prims.into_iter().map(|prim| {
                let inl: Vec<usize> = (0..cloud.len()).filter(|&i| is_inlier(&prim, &cloud[i], cfg)).collect();
                (prim, inl)
            })
        })
        .collect();

    let mut claimed = vec![false; cloud.len()];
    let mut out = Vec::new();
    while out.len() < cfg.max_results {
        // Ties go to the earliest iteration, which keeps the result seed-stable.
        let best = candidates
            .iter()
            .enumerate()
            .map(|(k, (_, inl))| (k, inl.iter().filter(|&&i| !claimed[i]).count()))
            .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)));
        let Some((k, count)) = best else { break };
        if count < cfg.min_inliers.max(1) {
            break;
        }
        let (prim, inl) = candidates.remove(k);
        let fresh: Vec<usize> = inl.into_iter().filter(|&i| !claimed[i]).collect();
        for &i in &fresh {
            claimed[i] = true;
        }
        out.push(Detection { primitive: prim, inliers: count, inlier_indices: fresh });
    }
    Ok(out)
}
