//! How a space curve meets a plane: roots of the height function
//! `h(t) = ⟨n, γ(t)⟩ − offset`, their contact order and sidedness.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::{CurveError, SpaceCurve};
use crate::series::MAX_ORDER;

/// `|h(t0)|` below this counts as contact.
pub const CONTACT_TOL: f64 = 1e-10;
/// Taylor coefficients of `h` below this count as zero.
pub const COEFF_TOL: f64 = 1e-9;
pub const DEFAULT_SAMPLES: usize = 1 << 14;
const MERGE_RADIUS: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlaneR3 {
    pub normal: Vector3<f64>,
    pub offset: f64,
}

impl PlaneR3 {
    /// Normalizes `normal`; the offset is the signed distance of the plane
    /// from the origin along the normalized normal.
    pub fn new(normal: Vector3<f64>, offset: f64) -> Self {
        Self { normal: normal.normalize(), offset }
    }

    pub fn through(point: &Vector3<f64>, normal: Vector3<f64>) -> Self {
        let n = normal.normalize();
        Self { normal: n, offset: n.dot(point) }
    }

    pub fn height(&self, x: &Vector3<f64>) -> f64 {
        self.normal.dot(x) - self.offset
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SideClass {
    TwoSided,
    OneSidedPositive,
    OneSidedNegative,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContactReport {
    pub t0: f64,
    pub contact_order: usize,
    pub side_class: SideClass,
}

/// Taylor coefficients of the height function at `t`.
fn height_series<C: SpaceCurve<3> + ?Sized>(curve: &C, plane: &PlaneR3, t: f64) -> [f64; MAX_ORDER + 1] {
    let tay = curve.taylor(t, MAX_ORDER);
    let mut h: [f64; MAX_ORDER + 1] = std::array::from_fn(|k| plane.normal.dot(&tay.coeffs[k]));
    h[0] -= plane.offset;
    h
}

pub fn plane_contact<C: SpaceCurve<3> + ?Sized>(curve: &C, plane: &PlaneR3, t0: f64) -> Result<ContactReport, CurveError> {
    let h = height_series(curve, plane, t0);
    if !(h[0].abs() < CONTACT_TOL) {
        return Err(CurveError::NoContact(t0, h[0].abs()));
    }
    let n = (1..=MAX_ORDER)
        .find(|&k| h[k].abs() > COEFF_TOL)
        .ok_or(CurveError::Indeterminate(t0))?;
    let side_class = if n % 2 == 1 {
        SideClass::TwoSided
    } else if h[n] > 0.0 {
        SideClass::OneSidedPositive
    } else {
        SideClass::OneSidedNegative
    };
    Ok(ContactReport { t0: t0.rem_euclid(1.0), contact_order: n, side_class })
}

/// Every point where the curve meets `plane`, sorted by parameter.
pub fn plane_intersections<C: SpaceCurve<3> + ?Sized>(curve: &C, plane: &PlaneR3) -> Result<Vec<ContactReport>, CurveError> {
    plane_intersections_with(curve, plane, DEFAULT_SAMPLES)
}

/// As [`plane_intersections`] with `samples` grid points; the count is
/// cross-checked against a grid twice as dense.
pub fn plane_intersections_with<C: SpaceCurve<3> + ?Sized>(
    curve: &C,
    plane: &PlaneR3,
    samples: usize,
) -> Result<Vec<ContactReport>, CurveError> {
    let coarse = roots(curve, plane, samples)?;
    let fine = roots(curve, plane, 2 * samples)?;
    if coarse.len() != fine.len() {
        return Err(CurveError::UnstableRootCount { coarse: coarse.len(), fine: fine.len() });
    }
    coarse.into_iter().map(|t| plane_contact(curve, plane, t)).collect()
}

fn roots<C: SpaceCurve<3> + ?Sized>(curve: &C, plane: &PlaneR3, n: usize) -> Result<Vec<f64>, CurveError> {
    let ts: Vec<f64> = (0..n).map(|i| i as f64 / n as f64).collect();
    let mut h = Vec::with_capacity(n);
    let mut dh = Vec::with_capacity(n);
    for &t in &ts {
        let tay = curve.taylor(t, 1);
        h.push(plane.normal.dot(&tay.coeffs[0]) - plane.offset);
        dh.push(plane.normal.dot(&tay.coeffs[1]));
    }
    if h.iter().all(|x| x.abs() < CONTACT_TOL) {
        return Err(CurveError::CurveInPlane);
    }
    let value = |t: f64| {
        let s = height_series(curve, plane, t);
        (s[0], s[1], 2.0 * s[2])
    };
    let step = 1.0 / n as f64;
    // (t, from a critical point) pairs; critical-point roots win merges.
    let mut found: Vec<(f64, bool)> = Vec::new();
    for i in 0..n {
        let j = (i + 1) % n;
        if h[i] == 0.0 {
            found.push((ts[i], false));
        } else if h[i] * h[j] < 0.0 {
            let t = refine(ts[i], ts[i] + step, h[i], |t| {
                let (f, df, _) = value(t);
                (f, df)
            });
            found.push((t, false));
        }
        if dh[i] == 0.0 {
            if value(ts[i]).0.abs() < CONTACT_TOL {
                found.push((ts[i], true));
            }
        } else if dh[i] * dh[j] < 0.0 {
            let t = refine(ts[i], ts[i] + step, dh[i], |t| {
                let (_, df, ddf) = value(t);
                (df, ddf)
            });
            if value(t).0.abs() < CONTACT_TOL {
                found.push((t, true));
            }
        }
    }
    let mut out: Vec<(f64, bool)> = Vec::new();
    found.sort_by(|a, b| a.0.rem_euclid(1.0).total_cmp(&b.0.rem_euclid(1.0)));
    for (t, crit) in found {
        let t = t.rem_euclid(1.0);
        if let Some(last) = out.last_mut() {
            if cyclic_gap(last.0, t) < MERGE_RADIUS {
                if crit && !last.1 {
                    *last = (t, true);
                }
                continue;
            }
        }
        out.push((t, crit));
    }
    if out.len() > 1 && cyclic_gap(out[0].0, out[out.len() - 1].0) < MERGE_RADIUS {
        let last = out.pop().expect("nonempty");
        if last.1 && !out[0].1 {
            out[0] = last;
        }
    }
    Ok(out.into_iter().map(|(t, _)| t).collect())
}

fn cyclic_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

/// Root of `f` in `[a, b]` given a sign change, by bisection then Newton.
fn refine(mut a: f64, mut b: f64, fa: f64, f: impl Fn(f64) -> (f64, f64)) -> f64 {
    let sa = fa.signum();
    for _ in 0..30 {
        let m = 0.5 * (a + b);
        let (fm, _) = f(m);
        if fm == 0.0 {
            return m;
        }
        if fm.signum() == sa {
            a = m;
        } else {
            b = m;
        }
    }
    let mut t = 0.5 * (a + b);
    for _ in 0..8 {
        let (v, dv) = f(t);
        if dv == 0.0 {
            break;
        }
        let next = t - v / dv;
        // Stay inside the bracket; bisection has already done the real work.
        if !(a - 1e-9..=b + 1e-9).contains(&next) {
            break;
        }
        let done = (next - t).abs() < 1e-15;
        t = next;
        if done {
            break;
        }
    }
    t
}

/// Outcome of the angle-versus-height check near one tangential contact.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AngleBound {
    pub contact_order: usize,
    /// Fitted `C` in `θ ≥ C·h^(1−1/n)`.
    pub constant: f64,
    /// Smallest ratio `θ / h^(1−1/n)` over the checked samples.
    pub min_ratio: f64,
    /// Half-width actually checked: `delta`, shrunk to where the leading
    /// term of the height series dominates the rest.
    pub window: f64,
    pub samples: usize,
    pub holds: bool,
}

/// Radius in which the order-`n` term of `h` bounds the later ones, each by
/// `|h_n| / 2^(k−n+1)`, so they sum to at most half of it.
fn dominance_radius(h: &[f64; MAX_ORDER + 1], n: usize) -> f64 {
    (n + 1..=MAX_ORDER)
        .filter(|&k| h[k] != 0.0)
        .map(|k| {
            let j = (k - n) as f64;
            (h[n].abs() / (2f64.powf(j + 1.0) * k as f64 / n as f64 * h[k].abs())).powf(1.0 / j)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Near a contact of order `n`, the angle `θ(t)` between the tangent line
/// and the plane dominates `h(t)^(1−1/n)`. `C` is fitted as half the ratio
/// at the sample closest to `t0` and then checked on `samples` points on
/// each side within `delta`, or within the radius where the order-`n` term
/// still dominates the height when that is smaller.
pub fn angle_height_bound<C: SpaceCurve<3> + ?Sized>(
    curve: &C,
    plane: &PlaneR3,
    contact: &ContactReport,
    delta: f64,
    samples: usize,
) -> AngleBound {
    let window = delta.min(dominance_radius(&height_series(curve, plane, contact.t0), contact.contact_order));
    let n = contact.contact_order as f64;
    let exponent = 1.0 - 1.0 / n;
    let ratio_at = |t: f64| {
        let x = curve.point(t);
        let v = curve.velocity(t);
        let h = plane.height(&x).abs();
        let theta = (plane.normal.dot(&v).abs() / v.norm()).clamp(0.0, 1.0).asin();
        (h > 0.0).then(|| theta / h.powf(exponent))
    };
    let mut ratios = Vec::new();
    for k in 1..=samples {
        let s = window * k as f64 / samples as f64;
        for t in [contact.t0 - s, contact.t0 + s] {
            if let Some(r) = ratio_at(t) {
                ratios.push(r);
            }
        }
    }
    let constant = 0.5 * ratios.iter().take(2).copied().fold(f64::INFINITY, f64::min);
    let min_ratio = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    AngleBound {
        contact_order: contact.contact_order,
        constant,
        min_ratio,
        window,
        samples: ratios.len(),
        holds: constant.is_finite() && constant > 0.0 && min_ratio >= constant,
    }
}
