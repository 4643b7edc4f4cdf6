use nalgebra::SVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{cyclic_gap, ConfigTuple, SolveError};
use crate::curve::SpaceCurve;
use crate::projgeom::circumradius;

const COARSE: usize = 64;
const PAIR_GRID: usize = 256;
const FINE: usize = 4096;
/// Starting points kept from each coarse phase for local descent.
const KEEP: usize = 12;
/// Below this parameter gap the three-point and tangent-point formulas are
/// dominated by rounding; the limits are covered by the next phase down.
const GAP_FLOOR: f64 = 1e-3;
pub const SEPARATION_SLACK: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ThicknessKind {
    /// Osculating circle at one point.
    Osculating,
    /// Circle tangent at the first point, through the third.
    TangentPoint,
    ThreePoint,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ThicknessReport {
    pub tau: f64,
    pub triple: [f64; 3],
    pub kind: ThicknessKind,
}

/// Radius of the circle through `a` tangent to `v` there and through `b`.
fn tangent_point_radius<const D: usize>(a: &SVector<f64, D>, v: &SVector<f64, D>, b: &SVector<f64, D>) -> f64 {
    let d = b - a;
    let vn = v.normalize();
    let perp = (d - vn * vn.dot(&d)).norm();
    if perp <= 1e-15 * d.norm() {
        f64::INFINITY
    } else {
        d.norm_squared() / (2.0 * perp)
    }
}

fn osculating_radius<C: SpaceCurve<D> + ?Sized, const D: usize>(curve: &C, t: f64) -> Result<f64, SolveError> {
    let tay = curve.taylor(t, 2);
    let (d1, d2) = (tay.derivative(1), tay.derivative(2));
    let speed2 = d1.norm_squared();
    if !(speed2 > 1e-24) {
        return Err(SolveError::DegenerateDerivative(t));
    }
    let normal = (d2 - d1 * (d1.dot(&d2) / speed2)).norm();
    Ok(if normal == 0.0 { f64::INFINITY } else { speed2 / normal })
}

/// Compass search over periodic parameters.
fn descend<F: Fn(&[f64]) -> f64>(f: F, start: &[f64], step: f64) -> (Vec<f64>, f64) {
    let mut x = start.to_vec();
    let mut best = f(&x);
    let mut h = step;
    while h > 1e-11 {
        let mut moved = false;
        for k in 0..x.len() {
            for dir in [1.0, -1.0] {
                let mut y = x.clone();
                y[k] += dir * h;
                let v = f(&y);
                if v < best {
                    best = v;
                    x = y;
                    moved = true;
                }
            }
        }
        if !moved {
            h *= 0.5;
        }
    }
    (x.iter().map(|t| t.rem_euclid(1.0)).collect(), best)
}

fn lowest<T: Copy>(mut v: Vec<(f64, T)>, k: usize) -> Vec<(f64, T)> {
    v.sort_by(|a, b| a.0.total_cmp(&b.0));
    v.truncate(k);
    v
}

/// Infimum of circumradii of triples of curve points: three-point circles
/// on a coarse grid, tangent-point circles, and osculating circles, each
/// refined by local descent.
pub fn thickness<C: SpaceCurve<D> + ?Sized, const D: usize>(curve: &C) -> Result<ThicknessReport, SolveError> {
    let pt = |t: f64| curve.point(t);
    let mut best = ThicknessReport { tau: f64::INFINITY, triple: [0.0; 3], kind: ThicknessKind::Osculating };
    let mut consider = |tau: f64, triple: [f64; 3], kind| {
        if tau < best.tau {
            best = ThicknessReport { tau, triple, kind };
        }
    };

    let fine: Vec<(f64, f64)> = (0..FINE)
        .map(|i| {
            let t = i as f64 / FINE as f64;
            osculating_radius(curve, t).map(|r| (r, t))
        })
        .collect::<Result<_, _>>()?;
    for (_, t) in lowest(fine, KEEP) {
        let (x, r) = descend(|x| osculating_radius(curve, x[0]).unwrap_or(f64::INFINITY), &[t], 1.0 / FINE as f64);
        consider(r, [x[0]; 3], ThicknessKind::Osculating);
    }

    let tp = |s: f64, u: f64| {
        let tay = curve.taylor(s, 1);
        tangent_point_radius(&tay.coeffs[0], &tay.derivative(1), &pt(u))
    };
    let mut pairs = Vec::with_capacity(PAIR_GRID * PAIR_GRID);
    for i in 0..PAIR_GRID {
        for j in 0..PAIR_GRID {
            if i != j {
                let (s, u) = (i as f64 / PAIR_GRID as f64, j as f64 / PAIR_GRID as f64);
                pairs.push((tp(s, u), (s, u)));
            }
        }
    }
    for (_, (s, u)) in lowest(pairs, KEEP) {
        let (x, r) = descend(
            |x| if cyclic_gap(x[0], x[1]) < GAP_FLOOR { f64::INFINITY } else { tp(x[0], x[1]) },
            &[s, u],
            1.0 / PAIR_GRID as f64,
        );
        consider(r, [x[0], x[0], x[1]], ThicknessKind::TangentPoint);
    }

    let grid: Vec<SVector<f64, D>> = (0..COARSE).map(|i| pt(i as f64 / COARSE as f64)).collect();
    let mut triples = Vec::new();
    for i in 0..COARSE {
        for j in i + 1..COARSE {
            for k in j + 1..COARSE {
                let t = [i, j, k].map(|m| m as f64 / COARSE as f64);
                triples.push((circumradius(&grid[i], &grid[j], &grid[k]), t));
            }
        }
    }
    for (_, t) in lowest(triples, KEEP) {
        let three = |x: &[f64]| {
            if cyclic_gap(x[0], x[1]).min(cyclic_gap(x[1], x[2])).min(cyclic_gap(x[0], x[2])) < GAP_FLOOR {
                f64::INFINITY
            } else {
                circumradius(&pt(x[0]), &pt(x[1]), &pt(x[2]))
            }
        };
        let (x, r) = descend(three, &t, 1.0 / COARSE as f64);
        consider(r, [x[0], x[1], x[2]], ThicknessKind::ThreePoint);
    }
    if !(best.tau > 0.0 && best.tau.is_finite()) {
        return Err(SolveError::DegenerateDerivative(best.triple[0]));
    }
    Ok(best)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SeparationReport {
    pub tau: f64,
    /// Smallest chord among all points of all solutions.
    pub min_solution_distance: Option<f64>,
    pub solutions_checked: usize,
    pub random_sets: usize,
    /// Random sets that had a pair closer than `2τ` (and so were checked for adjacency).
    pub random_sets_below: usize,
}

fn closest_pair<const D: usize>(pts: &[SVector<f64, D>]) -> (usize, usize, f64) {
    let mut best = (0, 1, f64::INFINITY);
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let d = (pts[i] - pts[j]).norm();
            if d < best.2 {
                best = (i, j, d);
            }
        }
    }
    best
}

/// Checks `|xᵢ − xⱼ| ≥ 2τ` on every solution, and that in random six-point
/// sets with a pair closer than `2τ` the closest pair is cyclically adjacent.
pub fn check_separation<C: SpaceCurve<4> + ?Sized>(
    curve: &C,
    sols: &[ConfigTuple],
    tau: f64,
    random_sets: usize,
    seed: u64,
) -> Result<SeparationReport, SolveError> {
    let mut min_solution_distance: Option<f64> = None;
    for (index, sol) in sols.iter().enumerate() {
        let (_, _, d) = closest_pair(&sol.points);
        if d < 2.0 * tau - SEPARATION_SLACK {
            return Err(SolveError::SeparationViolated { index, distance: d, tau });
        }
        min_solution_distance = Some(min_solution_distance.map_or(d, |m| m.min(d)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut below = 0;
    for _ in 0..random_sets {
        let mut t: Vec<f64> = (0..6).map(|_| rng.gen_range(0.0..1.0)).collect();
        t.sort_by(f64::total_cmp);
        let pts: Vec<_> = t.iter().map(|&s| curve.point(s)).collect();
        let (i, j, d) = closest_pair(&pts);
        if d < 2.0 * tau {
            below += 1;
            if j - i != 1 && !(i == 0 && j == 5) {
                return Err(SolveError::NotAdjacent(i, j));
            }
        }
    }
    Ok(SeparationReport { tau, min_solution_distance, solutions_checked: sols.len(), random_sets, random_sets_below: below })
}
