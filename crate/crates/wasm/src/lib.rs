//! wasm-bindgen surface for the browser demo in `www/`.
//!
//! Everything crosses the boundary as JSON strings or flat `f64` arrays so
//! the page needs no bundler.

use std::f64::consts::TAU;

use minfit::synth::trial_rng;
use minfit::{Dir3, OrientedPoint, Point3, Primitive, SolutionSet, SolverKind, Surface};
use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::*;

#[derive(Serialize, Deserialize)]
struct Record {
    p: [f64; 3],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n: Option<[f64; 3]>,
}

impl From<&OrientedPoint> for Record {
    fn from(op: &OrientedPoint) -> Self {
        Record { p: [op.p.x, op.p.y, op.p.z], n: op.n.map(|n| [n.x(), n.y(), n.z()]) }
    }
}

#[derive(Serialize)]
struct Fit<'a> {
    solution: &'a SolutionSet<Primitive>,
    /// Largest positional residual of each primitive over the input.
    max_residual: Vec<f64>,
}

fn kind(name: &str) -> Result<SolverKind, JsError> {
    name.parse::<SolverKind>().map_err(|e| JsError::new(&e))
}

fn points(json: &str) -> Result<Vec<OrientedPoint>, JsError> {
    let recs: Vec<Record> = serde_json::from_str(json).map_err(|e| JsError::new(&e.to_string()))?;
    recs.into_iter()
        .map(|r| {
            let p = Point3::new(r.p[0], r.p[1], r.p[2]);
            match r.n {
                None => Ok(OrientedPoint::plain(p)),
                Some(n) => {
                    OrientedPoint::oriented(p, Point3::new(n[0], n[1], n[2])).map_err(|e| JsError::new(&e.to_string()))
                }
            }
        })
        .collect()
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("plain data serializes")
}

/// Minimal sample on a random primitive of the given kind:
/// `{"primitive": .., "points": [..]}`.
#[wasm_bindgen]
pub fn planted(kind_name: &str, seed: u64) -> Result<String, JsError> {
    let (prim, pts) = kind(kind_name)?.planted(&mut trial_rng(seed, 0));
    let recs: Vec<Record> = pts.iter().map(Record::from).collect();
    Ok(to_json(&serde_json::json!({ "primitive": prim, "points": recs })))
}

/// Points uniform in the unit cube with the kind's normal pattern.
#[wasm_bindgen]
pub fn random_input(kind_name: &str, seed: u64) -> Result<String, JsError> {
    let pts = kind(kind_name)?.random_input(&mut trial_rng(seed, 0));
    Ok(to_json(&pts.iter().map(Record::from).collect::<Vec<_>>()))
}

#[wasm_bindgen]
pub fn fit(kind_name: &str, points_json: &str) -> Result<String, JsError> {
    let pts = points(points_json)?;
    let set = kind(kind_name)?.solve(&pts).map_err(|e| JsError::new(&e.to_string()))?;
    let max_residual = set
        .primitives
        .iter()
        .map(|s| pts.iter().map(|op| s.residual(&op.p).unwrap_or(f64::INFINITY)).fold(0.0, f64::max))
        .collect();
    Ok(to_json(&Fit { solution: &set, max_residual }))
}

fn ring(out: &mut Vec<f64>, center: Point3, u: Point3, v: Point3, radius: f64) {
    let k = 48;
    for i in 0..k {
        let (a, b) = (TAU * i as f64 / k as f64, TAU * (i + 1) as f64 / k as f64);
        let p = center + (u * a.cos() + v * a.sin()) * radius;
        let q = center + (u * b.cos() + v * b.sin()) * radius;
        out.extend([p.x, p.y, p.z, q.x, q.y, q.z]);
    }
}

fn frame(d: &Dir3) -> (Point3, Point3) {
    minfit::orthonormal_complement(d.as_vec())
}

/// Wireframe of a primitive around the given points, as line segments
/// `[x0, y0, z0, x1, y1, z1, ...]`.
#[wasm_bindgen]
pub fn wireframe(primitive_json: &str, points_json: &str) -> Result<Vec<f64>, JsError> {
    let prim: Primitive = serde_json::from_str(primitive_json).map_err(|e| JsError::new(&e.to_string()))?;
    let pts = points(points_json)?;
    let mut out = Vec::new();
    match prim {
        Primitive::Cylinder(c) => {
            let d = *c.axis_dir.as_vec();
            let (u, v) = frame(&c.axis_dir);
            let hs: Vec<f64> = pts.iter().map(|op| (op.p - c.axis_point).dot(&d)).collect();
            let pad = 0.25 * c.radius;
            let lo = hs.iter().copied().fold(f64::INFINITY, f64::min) - pad;
            let hi = hs.iter().copied().fold(f64::NEG_INFINITY, f64::max) + pad;
            for i in 0..=6 {
                let h = lo + (hi - lo) * i as f64 / 6.0;
                ring(&mut out, c.axis_point + d * h, u, v, c.radius);
            }
            for i in 0..12 {
                let a = TAU * i as f64 / 12.0;
                let off = (u * a.cos() + v * a.sin()) * c.radius;
                let (p, q) = (c.axis_point + d * lo + off, c.axis_point + d * hi + off);
                out.extend([p.x, p.y, p.z, q.x, q.y, q.z]);
            }
        }
        Primitive::Cone(c) => {
            let d = *c.axis_dir.as_vec();
            let (u, v) = frame(&c.axis_dir);
            let hs: Vec<f64> = pts.iter().map(|op| (op.p - c.apex).dot(&d)).collect();
            let reach = hs.iter().fold(0.0f64, |m, h| m.max(h.abs())) * 1.2;
            let tan = c.half_angle.tan();
            for sign in [-1.0, 1.0] {
                if !hs.iter().any(|h| h * sign > 0.0) {
                    continue;
                }
                for i in 1..=5 {
                    let h = sign * reach * i as f64 / 5.0;
                    ring(&mut out, c.apex + d * h, u, v, h.abs() * tan);
                }
                for i in 0..12 {
                    let a = TAU * i as f64 / 12.0;
                    let q = c.apex + d * (sign * reach) + (u * a.cos() + v * a.sin()) * (reach * tan);
                    out.extend([c.apex.x, c.apex.y, c.apex.z, q.x, q.y, q.z]);
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn planted_fit_round_trip() {
        for k in SolverKind::ALL {
            let doc: serde_json::Value = serde_json::from_str(&planted(k.name(), 7).unwrap()).unwrap();
            let pts = doc["points"].to_string();
            let fitted: serde_json::Value = serde_json::from_str(&fit(k.name(), &pts).unwrap()).unwrap();
            let prims = fitted["solution"]["primitives"].as_array().unwrap();
            assert!(!prims.is_empty(), "{k}");
            assert!(fitted["max_residual"].as_array().unwrap().iter().all(|r| r.as_f64().unwrap() < 1e-7));
            let segs = wireframe(&prims[0].to_string(), &pts).unwrap();
            assert!(!segs.is_empty() && segs.len().is_multiple_of(6));
        }
    }
}
