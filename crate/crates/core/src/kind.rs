//! Uniform dispatch over the five solvers.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cone::{cone_1n3p, cone_2n, cone_6p};
use crate::cylinder::{cyl_1n2p, cyl_5p};
use crate::error::{FitError, Result};
use crate::geom::{OrientedPoint, Point3, Primitive, SolutionSet};
use crate::synth::{random_cone, random_cylinder, sample_on, uniform_cube_point};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SolverKind {
    #[serde(rename = "cylinder-1n2p")]
    Cylinder1N2P,
    #[serde(rename = "cylinder-5p")]
    Cylinder5P,
    #[serde(rename = "cone-2n")]
    Cone2N,
    #[serde(rename = "cone-1n3p")]
    Cone1N3P,
    #[serde(rename = "cone-6p")]
    Cone6P,
}

impl SolverKind {
    pub const ALL: [SolverKind; 5] = [
        SolverKind::Cylinder1N2P,
        SolverKind::Cylinder5P,
        SolverKind::Cone2N,
        SolverKind::Cone1N3P,
        SolverKind::Cone6P,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Cylinder1N2P => "cylinder-1n2p",
            SolverKind::Cylinder5P => "cylinder-5p",
            SolverKind::Cone2N => "cone-2n",
            SolverKind::Cone1N3P => "cone-1n3p",
            SolverKind::Cone6P => "cone-6p",
        }
    }

    /// Which input records must carry a normal, in order.
    pub fn pattern(self) -> &'static [bool] {
        match self {
            SolverKind::Cylinder1N2P => &[true, false, false],
            SolverKind::Cylinder5P => &[false; 5],
            SolverKind::Cone2N => &[true, true],
            SolverKind::Cone1N3P => &[true, false, false, false],
            SolverKind::Cone6P => &[false; 6],
        }
    }

    pub fn pattern_description(self) -> &'static str {
        match self {
            SolverKind::Cylinder1N2P => "1 oriented point followed by 2 points",
            SolverKind::Cylinder5P => "5 points",
            SolverKind::Cone2N => "2 oriented points",
            SolverKind::Cone1N3P => "1 oriented point followed by 3 points",
            SolverKind::Cone6P => "6 points",
        }
    }

    pub fn is_cylinder(self) -> bool {
        matches!(self, SolverKind::Cylinder1N2P | SolverKind::Cylinder5P)
    }

    /// Solution counts allowed for generic input.
    pub fn admissible(self) -> &'static [usize] {
        match self {
            SolverKind::Cylinder1N2P => &[0, 2],
            SolverKind::Cylinder5P => &[0, 2, 4, 6],
            SolverKind::Cone2N => &[2],
            SolverKind::Cone1N3P => &[0, 2, 4],
            SolverKind::Cone6P => &[0, 2, 4, 6, 8, 10, 12],
        }
    }

    /// Checks the record count and that required normals are present.
    pub fn check_input(self, pts: &[OrientedPoint]) -> Result<()> {
        let pat = self.pattern();
        if pts.len() != pat.len() {
            return Err(FitError::Arity { expected: pat.len(), got: pts.len() });
        }
        if pts.iter().zip(pat).any(|(p, need)| *need && p.n.is_none()) {
            return Err(FitError::MissingNormal);
        }
        Ok(())
    }

    pub fn solve(self, pts: &[OrientedPoint]) -> Result<SolutionSet<Primitive>> {
        self.check_input(pts)?;
        let p = |i: usize| pts[i].p;
        Ok(match self {
            SolverKind::Cylinder1N2P => cyl_1n2p(&pts[0], &p(1), &p(2))?.map(Primitive::from),
            SolverKind::Cylinder5P => {
                let a: [Point3; 5] = std::array::from_fn(p);
                cyl_5p(&a)?.map(Primitive::from)
            }
            SolverKind::Cone2N => cone_2n(&pts[0], &pts[1])?.map(Primitive::from),
            SolverKind::Cone1N3P => cone_1n3p(&pts[0], &p(1), &p(2), &p(3))?.map(Primitive::from),
            SolverKind::Cone6P => {
                let a: [Point3; 6] = std::array::from_fn(p);
                cone_6p(&a)?.map(Primitive::from)
            }
        })
    }

    /// A random primitive of the matching type and a minimal sample on it.
    pub fn planted<R: Rng + ?Sized>(self, rng: &mut R) -> (Primitive, Vec<OrientedPoint>) {
        let prim: Primitive = if self.is_cylinder() { random_cylinder(rng).into() } else { random_cone(rng).into() };
        let pts = self.pattern().iter().map(|&o| sample_on(&prim, o, rng)).collect();
        (prim, pts)
    }

    /// Uniform random input in the unit cube.
    pub fn random_input<R: Rng + ?Sized>(self, rng: &mut R) -> Vec<OrientedPoint> {
        self.pattern().iter().map(|&o| uniform_cube_point(o, rng)).collect()
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SolverKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        SolverKind::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| {
            format!("unknown kind `{s}`; expected one of cylinder-1n2p, cylinder-5p, cone-2n, cone-1n3p, cone-6p")
        })
    }
}

/// Largest parameter discrepancy between two primitives of the same type.
pub fn primitive_distance(a: &Primitive, b: &Primitive, reference: &Point3) -> f64 {
    match (a, b) {
        (Primitive::Cylinder(x), Primitive::Cylinder(y)) => x.param_distance(y, reference),
        (Primitive::Cone(x), Primitive::Cone(y)) => x.param_distance(y),
        _ => f64::INFINITY,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::trial_rng;

    #[test]
    fn every_kind_recovers_a_planted_sample() {
        for kind in SolverKind::ALL {
            let mut rng = trial_rng(11, 0);
            let (prim, pts) = kind.planted(&mut rng);
            let set = kind.solve(&pts).unwrap();
            assert!(set.primitives.iter().any(|s| primitive_distance(s, &prim, &pts[0].p) < 1e-6), "{kind}");
        }
    }

    #[test]
    fn names_round_trip() {
        for kind in SolverKind::ALL {
            assert_eq!(kind.name().parse::<SolverKind>().unwrap(), kind);
        }
        assert!("cone".parse::<SolverKind>().is_err());
    }

    #[test]
    fn arity_is_checked() {
        let pts = vec![OrientedPoint::plain(Point3::zeros()); 3];
        assert_eq!(SolverKind::Cylinder5P.solve(&pts), Err(FitError::Arity { expected: 5, got: 3 }));
        assert_eq!(SolverKind::Cylinder1N2P.solve(&pts), Err(FitError::MissingNormal));
    }
}
