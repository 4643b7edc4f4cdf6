use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use super::{CurveError, KnotCurve, TrigCurve};

/// Default Fourier degree of preset curves.
pub const DEFAULT_DEGREE: usize = 8;

/// Named curves addressable from the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preset {
    /// `(1/√2)(cos 4πt, sin 4πt, cos 6πt, sin 6πt)`, a trefoil on S³.
    SymmetricTrefoilS3,
    GreatCircleS3,
    TrefoilR3,
    FigureEightR3,
    /// `((2 + cos qu) cos pu, (2 + cos qu) sin pu, sin qu)` with `u = 2πt`.
    TorusR3 { p: u32, q: u32 },
}

impl Preset {
    pub fn curve(self) -> KnotCurve {
        match self {
            Preset::SymmetricTrefoilS3 => {
                let mut c = TrigCurve::<4>::new(vec![], vec![]);
                c.add_cos(0, 2, FRAC_1_SQRT_2);
                c.add_sin(1, 2, FRAC_1_SQRT_2);
                c.add_cos(2, 3, FRAC_1_SQRT_2);
                c.add_sin(3, 3, FRAC_1_SQRT_2);
                KnotCurve::S3(c.padded(DEFAULT_DEGREE))
            }
            Preset::GreatCircleS3 => {
                let mut c = TrigCurve::<4>::new(vec![], vec![]);
                c.add_cos(0, 1, 1.0);
                c.add_sin(1, 1, 1.0);
                KnotCurve::S3(c.padded(DEFAULT_DEGREE))
            }
            Preset::TrefoilR3 => {
                let mut c = TrigCurve::<3>::new(vec![], vec![]);
                c.add_sin(0, 1, 1.0);
                c.add_sin(0, 2, 2.0);
                c.add_cos(1, 1, 1.0);
                c.add_cos(1, 2, -2.0);
                c.add_sin(2, 3, -1.0);
                KnotCurve::R3(c.padded(DEFAULT_DEGREE))
            }
            Preset::FigureEightR3 => {
                // (2 + cos 2u)(cos 3u, sin 3u) expanded by product-to-sum.
                let mut c = TrigCurve::<3>::new(vec![], vec![]);
                c.add_cos(0, 3, 2.0);
                c.add_cos(0, 5, 0.5);
                c.add_cos(0, 1, 0.5);
                c.add_sin(1, 3, 2.0);
                c.add_sin(1, 5, 0.5);
                c.add_sin(1, 1, 0.5);
                c.add_sin(2, 4, 1.0);
                KnotCurve::R3(c.padded(DEFAULT_DEGREE))
            }
            Preset::TorusR3 { p, q } => {
                let (p, q) = (p as i64, q as i64);
                let mut c = TrigCurve::<3>::new(vec![], vec![]);
                c.add_cos(0, p as usize, 2.0);
                c.add_sin(1, p as usize, 2.0);
                // cos qu · cos pu and cos qu · sin pu
                for (k, w) in [(p + q, 0.5), (p - q, 0.5)] {
                    add_signed_cos(&mut c, 0, k, w);
                    add_signed_sin(&mut c, 1, k, w);
                }
                c.add_sin(2, q as usize, 1.0);
                KnotCurve::R3(c.padded(DEFAULT_DEGREE))
            }
        }
    }
}

fn add_signed_cos(c: &mut TrigCurve<3>, i: usize, k: i64, w: f64) {
    c.add_cos(i, k.unsigned_abs() as usize, w);
}

fn add_signed_sin(c: &mut TrigCurve<3>, i: usize, k: i64, w: f64) {
    c.add_sin(i, k.unsigned_abs() as usize, w * k.signum() as f64);
}

impl FromStr for Preset {
    type Err = CurveError;

    fn from_str(name: &str) -> Result<Self, Self::Err> {
        let unknown = || CurveError::UnknownPreset(name.to_string());
        Ok(match name {
            "paper-trefoil-s3" => Preset::SymmetricTrefoilS3,
            "great-circle-s3" => Preset::GreatCircleS3,
            "trefoil-r3" => Preset::TrefoilR3,
            "figure-eight-r3" => Preset::FigureEightR3,
            _ => {
                let inner = name
                    .strip_prefix("torus(")
                    .and_then(|s| s.strip_suffix(")-r3"))
                    .ok_or_else(unknown)?;
                let (p, q) = inner.split_once(',').ok_or_else(unknown)?;
                let p: u32 = p.trim().parse().map_err(|_| unknown())?;
                let q: u32 = q.trim().parse().map_err(|_| unknown())?;
                // Coprime and large enough to be a knot; the bound keeps the degree sane.
                if p < 2 || q < 2 || gcd(p, q) != 1 || p + q > 64 {
                    return Err(unknown());
                }
                Preset::TorusR3 { p, q }
            }
        })
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Preset::SymmetricTrefoilS3 => write!(f, "paper-trefoil-s3"),
            Preset::GreatCircleS3 => write!(f, "great-circle-s3"),
            Preset::TrefoilR3 => write!(f, "trefoil-r3"),
            Preset::FigureEightR3 => write!(f, "figure-eight-r3"),
            Preset::TorusR3 { p, q } => write!(f, "torus({p},{q})-r3"),
        }
    }
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Looks up a preset curve by name.
pub fn preset(name: &str) -> Result<KnotCurve, CurveError> {
    Ok(name.parse::<Preset>()?.curve())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::CurvePoint;
    use std::f64::consts::TAU;

    #[test]
    fn names_round_trip() {
        for name in ["paper-trefoil-s3", "great-circle-s3", "trefoil-r3", "figure-eight-r3", "torus(3,5)-r3"] {
            assert_eq!(name.parse::<Preset>().unwrap().to_string(), name);
        }
    }

    #[test]
    fn unknown_names() {
        for name in ["", "trefoil", "torus(2,4)-r3", "torus(1,3)-r3", "torus(2,3)", "torus(a,3)-r3", "torus(2,3)-r3x"] {
            assert!(matches!(preset(name), Err(CurveError::UnknownPreset(_))), "{name}");
        }
    }

    #[test]
    fn s3_trefoil_coefficients() {
        let KnotCurve::S3(c) = preset("paper-trefoil-s3").unwrap() else { panic!() };
        let pairs = c.to_pairs();
        assert_eq!(c.degree(), DEFAULT_DEGREE);
        assert_eq!(pairs[0][2], (FRAC_1_SQRT_2, 0.0));
        assert_eq!(pairs[1][2], (0.0, FRAC_1_SQRT_2));
        assert_eq!(pairs[2][3], (FRAC_1_SQRT_2, 0.0));
        assert_eq!(pairs[3][3], (0.0, FRAC_1_SQRT_2));
        let nonzero = pairs.iter().flatten().filter(|p| **p != (0.0, 0.0)).count();
        assert_eq!(nonzero, 4);
    }

    #[test]
    fn great_circle_formula() {
        let c = preset("great-circle-s3").unwrap();
        for i in 0..7 {
            let t = i as f64 / 7.0;
            let CurvePoint::S3(p) = c.eval(t) else { panic!() };
            assert!((p.x - (TAU * t).cos()).abs() < 1e-15);
            assert!((p.y - (TAU * t).sin()).abs() < 1e-15);
            assert_eq!((p.z, p.w), (0.0, 0.0));
        }
    }

    #[test]
    fn torus_matches_closed_form() {
        let c = preset("torus(3,2)-r3").unwrap();
        for i in 0..11 {
            let t = i as f64 / 11.0;
            let u = TAU * t;
            let r = 2.0 + (2.0 * u).cos();
            let CurvePoint::R3(p) = c.eval(t) else { panic!() };
            assert!((p.x - r * (3.0 * u).cos()).abs() < 1e-13);
            assert!((p.y - r * (3.0 * u).sin()).abs() < 1e-13);
            assert!((p.z - (2.0 * u).sin()).abs() < 1e-13);
        }
    }
}
