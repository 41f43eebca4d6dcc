//! Point files: CSV `x,y,z[,nx,ny,nz]` or a JSON array of `{p, n?}`.

use std::path::Path;

use minfit::{OrientedPoint, Point3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("{path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("line {line}: {msg}")]
    Line { line: usize, msg: String },
    #[error("json: {0}")]
    Json(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PointFormat {
    Csv,
    Json,
}

#[derive(Serialize, Deserialize)]
struct JsonRecord {
    p: [f64; 3],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n: Option<[f64; 3]>,
}

fn vec3(a: [f64; 3]) -> Point3 {
    Point3::new(a[0], a[1], a[2])
}

fn record(p: [f64; 3], n: Option<[f64; 3]>) -> Result<OrientedPoint, String> {
    if p.iter().chain(n.iter().flatten()).any(|x| !x.is_finite()) {
        return Err("non-finite coordinate".into());
    }
    let p = vec3(p);
    match n {
        None => Ok(OrientedPoint::plain(p)),
        Some(n) => OrientedPoint::oriented(p, vec3(n)).map_err(|_| "zero normal vector".to_string()),
    }
}

pub fn parse_csv(text: &str) -> Result<Vec<OrientedPoint>, ParseError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| ParseError::Line { line: i + 1, msg: e.to_string() })?;
        let line = rec.position().map_or(i + 1, |p| p.line() as usize);
        let fields: Vec<&str> = rec.iter().filter(|f| !f.is_empty()).collect();
        if fields.is_empty() {
            continue;
        }
        let nums: Result<Vec<f64>, _> = fields.iter().map(|f| f.parse::<f64>()).collect();
        let nums = match nums {
            Ok(v) => v,
            // A header line such as `x,y,z,nx,ny,nz`.
            Err(_) if out.is_empty() && fields.iter().all(|f| f.chars().all(char::is_alphabetic)) => continue,
            Err(e) => return Err(ParseError::Line { line, msg: e.to_string() }),
        };
        let op = match nums.as_slice() {
            [x, y, z] => record([*x, *y, *z], None),
            [x, y, z, a, b, c] => record([*x, *y, *z], Some([*a, *b, *c])),
            _ => Err(format!("expected 3 or 6 fields, found {}", nums.len())),
        }
        .map_err(|msg| ParseError::Line { line, msg })?;
        out.push(op);
    }
    Ok(out)
}

pub fn parse_json(text: &str) -> Result<Vec<OrientedPoint>, ParseError> {
    let recs: Vec<JsonRecord> = serde_json::from_str(text).map_err(|e| ParseError::Json(e.to_string()))?;
    recs.into_iter()
        .enumerate()
        .map(|(i, r)| record(r.p, r.n).map_err(|msg| ParseError::Json(format!("record {i}: {msg}"))))
        .collect()
}

/// Guesses the format from the first non-blank character.
pub fn parse_points(text: &str) -> Result<Vec<OrientedPoint>, ParseError> {
    if text.trim_start().starts_with('[') {
        parse_json(text)
    } else {
        parse_csv(text)
    }
}

pub fn read_points(path: &Path) -> Result<Vec<OrientedPoint>, ParseError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| ParseError::Read { path: path.display().to_string(), source })?;
    parse_points(&text)
}

pub fn write_points(pts: &[OrientedPoint], format: PointFormat) -> String {
    match format {
        PointFormat::Csv => {
            let mut s = String::new();
            for op in pts {
                let p = op.p;
                match op.n {
                    Some(n) => s += &format!("{},{},{},{},{},{}\n", p.x, p.y, p.z, n.x(), n.y(), n.z()),
                    None => s += &format!("{},{},{}\n", p.x, p.y, p.z),
                }
            }
            s
        }
        PointFormat::Json => {
            let recs: Vec<JsonRecord> = pts
                .iter()
                .map(|op| JsonRecord { p: [op.p.x, op.p.y, op.p.z], n: op.n.map(|n| [n.x(), n.y(), n.z()]) })
                .collect();
            serde_json::to_string_pretty(&recs).expect("plain records serialize")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_with_header_and_normals() {
        let pts = parse_csv("x,y,z,nx,ny,nz\n0,0,0,0,0,2\n1,2,3\n# comment\n").unwrap();
        assert_eq!(pts.len(), 2);
        assert!((pts[0].n.unwrap().z() - 1.0).abs() < 1e-15);
        assert!(pts[1].n.is_none());
    }

    #[test]
    fn bad_lines_report_position() {
        match parse_csv("0,0,0\n1,2\n") {
            Err(ParseError::Line { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_csv("0,0,0,0,0,0\n"), Err(ParseError::Line { line: 1, .. })));
    }

    #[test]
    fn json_round_trip() {
        let pts = parse_json(r#"[{"p":[1,2,3],"n":[0,1,0]},{"p":[0,0,1]}]"#).unwrap();
        let back = parse_points(&write_points(&pts, PointFormat::Json)).unwrap();
        assert_eq!(pts, back);
        let back = parse_points(&write_points(&pts, PointFormat::Csv)).unwrap();
        assert_eq!(pts, back);
    }
}
