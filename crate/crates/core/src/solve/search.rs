use nalgebra::{Vector4, Vector6};
use rayon::prelude::*;
use serde::Serialize;

use super::system::ResidualSystem;
use super::{cyclic_gap, SolveError};
use crate::curve::{KnotCurve, SpaceCurve};
use crate::gauss::a2_of_knot;
use crate::projgeom::{make_prism_config, PrismConfig};

/// Residual norm required of an accepted root.
pub const ACCEPT_TOL: f64 = 1e-8;
const CONVERGE_TOL: f64 = 1e-12;
const MAX_ITER: usize = 50;
/// Largest parameter change in one Newton step.
const STEP_CAP: f64 = 0.05;
/// Roots closer than this in the flat torus metric on `(t₂, …, t₆)` merge.
pub const DEDUP_RADIUS: f64 = 1e-6;
const CONDITION_LIMIT: f64 = 1e12;
/// Consecutive parameters closer than this are treated as coincident.
const MIN_GAP: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SearchParams {
    /// Simplex grid resolution: seeds are the compositions of `grid` into six parts.
    pub grid: usize,
    /// Acceptance threshold on the residual norm.
    pub tol: f64,
}

impl Default for SearchParams {
    fn default() -> Self {
        Self { grid: 12, tol: ACCEPT_TOL }
    }
}

/// An accepted configuration: `t₁ < … < t₆ < t₁ + 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConfigTuple {
    pub params: [f64; 6],
    pub points: [Vector4<f64>; 6],
    pub phi: f64,
    pub residual: f64,
    pub prism: PrismConfig,
    /// Sign of the Jacobian determinant, `None` for a non-transverse root.
    pub sign: Option<i8>,
    pub condition: f64,
}

impl ConfigTuple {
    /// Flat torus distance on `(t₂, …, t₆)`.
    pub fn torus_distance(&self, other: &[f64; 6]) -> f64 {
        (1..6).map(|k| cyclic_gap(self.params[k], other[k]).powi(2)).sum::<f64>().sqrt()
    }
}

fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in 1..=total - (parts - 1) {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn seed_params(t1: f64, comp: &[usize], grid: usize) -> [f64; 6] {
    let mut t = [t1; 6];
    for k in 1..6 {
        t[k] = t[k - 1] + comp[k - 1] as f64 / grid as f64;
    }
    t
}

fn ordered(t: &[f64; 6]) -> bool {
    (0..6).all(|k| {
        let next = if k == 5 { t[0] + 1.0 } else { t[k + 1] };
        next - t[k] > MIN_GAP
    })
}

/// Damped Newton from one seed; `None` when it does not reach `tol`.
fn newton<C: SpaceCurve<4> + ?Sized>(sys: &ResidualSystem<C>, seed: &[f64; 6], tol: f64) -> Option<(Vector6<f64>, f64)> {
    let mut x = sys.start(seed);
    let mut cur = sys.eval(&x);
    let mut norm = cur.value.norm();
    for _ in 0..MAX_ITER {
        if norm < CONVERGE_TOL {
            break;
        }
        let mut step = cur.jacobian.lu().solve(&(-cur.value))?;
        let big = step.fixed_rows::<5>(0).amax();
        if big > STEP_CAP {
            step *= STEP_CAP / big;
        }
        let mut lambda = 1.0;
        let mut improved = false;
        while lambda > 1e-4 {
            let trial = x + step * lambda;
            let r = sys.eval(&trial);
            let n = r.value.norm();
            if n.is_finite() && n < (1.0 - 1e-4 * lambda) * norm {
                x = trial;
                cur = r;
                norm = n;
                improved = true;
                break;
            }
            lambda *= 0.5;
        }
        if !improved {
            break;
        }
    }
    (norm < tol).then_some((x, norm))
}

/// Accepted roots of the based system with `t₁ = basepoint`, sorted by `t₂`.
pub fn find_inscribed_prisms<C: SpaceCurve<4> + ?Sized>(
    curve: &C,
    basepoint: f64,
    params: &SearchParams,
) -> Result<Vec<ConfigTuple>, SolveError> {
    if params.grid < 6 {
        return Err(SolveError::Parameter(format!("grid {} is below 6", params.grid)));
    }
    if !(params.tol > 0.0) {
        return Err(SolveError::Parameter("tolerance must be positive".into()));
    }
    let t1 = basepoint.rem_euclid(1.0);
    let sys = ResidualSystem { curve, t1 };
    let seeds: Vec<[f64; 6]> = compositions(params.grid, 6).iter().map(|c| seed_params(t1, c, params.grid)).collect();
    let found: Vec<Option<ConfigTuple>> = seeds
        .par_iter()
        .map(|seed| {
            let (x, residual) = newton(&sys, seed, params.tol)?;
            let params = sys.params(&x);
            if !ordered(&params) {
                return None;
            }
            let r = sys.eval(&x);
            let prism = make_prism_config(&r.points).ok()?;
            let svd = r.jacobian.svd(false, false);
            let (hi, lo) = (svd.singular_values.max(), svd.singular_values.min());
            let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
            let sign = (condition <= CONDITION_LIMIT).then(|| if r.jacobian.determinant() > 0.0 { 1 } else { -1 });
            let phi = x[5].rem_euclid(std::f64::consts::PI);
            Some(ConfigTuple { params, points: r.points, phi, residual, prism, sign, condition })
        })
        .collect();
    let mut unique: Vec<ConfigTuple> = Vec::new();
    for sol in found.into_iter().flatten() {
        if !unique.iter().any(|u| u.torus_distance(&sol.params) < DEDUP_RADIUS) {
            unique.push(sol);
        }
    }
    unique.sort_by(|a, b| a.params[1..].partial_cmp(&b.params[1..]).expect("finite parameters"));
    Ok(unique)
}

pub fn intersection_sign(sol: &ConfigTuple) -> Result<i8, SolveError> {
    sol.sign.ok_or(SolveError::NonTransverse(sol.condition))
}

#[derive(Clone, Debug)]
pub struct InvariantReport {
    pub basepoint: f64,
    pub solutions: Vec<ConfigTuple>,
    /// Signed count; `None` when some root is not transverse.
    pub kappa: Option<i64>,
    pub parity: u8,
    pub a2: Result<i64, SolveError>,
}

impl InvariantReport {
    pub fn non_transverse(&self) -> usize {
        self.solutions.iter().filter(|s| s.sign.is_none()).count()
    }

    /// `|𝔎| = |a₂|` when both are known.
    pub fn matches_a2(&self) -> Option<bool> {
        match (&self.kappa, &self.a2) {
            (Some(k), Ok(a)) => Some(k.abs() == a.abs()),
            _ => None,
        }
    }
}

pub fn kappa(curve: &KnotCurve, basepoint: f64, params: &SearchParams) -> Result<InvariantReport, SolveError> {
    let model = curve.s3_model();
    let solutions = find_inscribed_prisms(&*model, basepoint, params)?;
    let kappa = solutions.iter().map(|s| s.sign.map(i64::from)).sum::<Option<i64>>();
    let parity = (solutions.len() % 2) as u8;
    let a2 = a2_of_knot(curve).map_err(SolveError::from);
    Ok(InvariantReport { basepoint, solutions, kappa, parity, a2 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::preset;

    #[test]
    fn seed_count_is_binomial() {
        assert_eq!(compositions(12, 6).len(), 462);
        assert_eq!(compositions(6, 6).len(), 1);
    }

    #[test]
    fn counts_on_presets() {
        let cases: [(&str, f64, &[i8]); 5] = [
            ("paper-trefoil-s3", 0.0, &[-1]),
            ("trefoil-r3", 0.3, &[-1]),
            ("great-circle-s3", 0.0, &[]),
            ("figure-eight-r3", 0.0, &[1, 1, -1, -1, 1]),
            ("figure-eight-r3", 0.3, &[1, -1, 1]),
        ];
        for (name, b, signs) in cases {
            let m = preset(name).unwrap().s3_model();
            let sols = find_inscribed_prisms(&*m, b, &SearchParams::default()).unwrap();
            let got: Vec<i8> = sols.iter().map(|s| s.sign.unwrap()).collect();
            assert_eq!(got, signs, "{name} at {b}");
            for s in &sols {
                assert!(s.residual < ACCEPT_TOL);
                assert!((s.params[0] - b).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        let m = preset("great-circle-s3").unwrap().s3_model();
        assert!(find_inscribed_prisms(&*m, 0.0, &SearchParams { grid: 5, tol: 1e-8 }).is_err());
        assert!(find_inscribed_prisms(&*m, 0.0, &SearchParams { grid: 12, tol: 0.0 }).is_err());
    }
}
