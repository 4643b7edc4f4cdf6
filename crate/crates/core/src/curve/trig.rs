use std::f64::consts::TAU;

use nalgebra::SVector;

use super::{CurveError, SpaceCurve, Taylor};
use crate::series::MAX_ORDER;

/// Truncated Fourier series `Σ_k a_k cos(2πkt) + b_k sin(2πkt)` with period 1.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigCurve<const D: usize> {
    cos: Vec<SVector<f64, D>>,
    sin: Vec<SVector<f64, D>>,
}

impl<const D: usize> TrigCurve<D> {
    /// `cos[k]`, `sin[k]` are the coefficient vectors of harmonic `k`.
    /// The two lists are padded to equal length.
    pub fn new(mut cos: Vec<SVector<f64, D>>, mut sin: Vec<SVector<f64, D>>) -> Self {
        let n = cos.len().max(sin.len()).max(1);
        cos.resize(n, SVector::zeros());
        sin.resize(n, SVector::zeros());
        // sin(0) contributes nothing.
        sin[0] = SVector::zeros();
        Self { cos, sin }
    }

    /// Coordinate-major constructor: `coords[i][k] = (a_k, b_k)` for coordinate `i`.
    pub fn from_pairs(coords: &[Vec<(f64, f64)>]) -> Result<Self, CurveError> {
        if coords.len() != D {
            return Err(CurveError::Spec(format!(
                "expected {D} coordinate lists, found {}",
                coords.len()
            )));
        }
        let n = coords.iter().map(Vec::len).max().unwrap_or(0).max(1);
        let mut cos = vec![SVector::<f64, D>::zeros(); n];
        let mut sin = vec![SVector::<f64, D>::zeros(); n];
        for (i, list) in coords.iter().enumerate() {
            for (k, &(a, b)) in list.iter().enumerate() {
                cos[k][i] = a;
                sin[k][i] = b;
            }
        }
        Ok(Self::new(cos, sin))
    }

    /// Inverse of [`TrigCurve::from_pairs`], padded to `degree`.
    pub fn to_pairs(&self) -> Vec<Vec<(f64, f64)>> {
        (0..D)
            .map(|i| {
                (0..=self.degree())
                    .map(|k| (self.cos[k][i], self.sin[k][i]))
                    .collect()
            })
            .collect()
    }

    pub fn degree(&self) -> usize {
        self.cos.len() - 1
    }

    /// Zero-pads the harmonic lists so that `degree() >= degree`.
    pub fn padded(mut self, degree: usize) -> Self {
        if degree > self.degree() {
            self.cos.resize(degree + 1, SVector::zeros());
            self.sin.resize(degree + 1, SVector::zeros());
        }
        self
    }

    /// Sets coefficient for `a cos(2πkt)` in coordinate `i`, growing the degree as needed.
    pub fn add_cos(&mut self, i: usize, k: usize, a: f64) {
        self.grow(k);
        self.cos[k][i] += a;
    }

    pub fn add_sin(&mut self, i: usize, k: usize, b: f64) {
        self.grow(k);
        if k > 0 {
            self.sin[k][i] += b;
        }
    }

    fn grow(&mut self, k: usize) {
        if k > self.degree() {
            self.cos.resize(k + 1, SVector::zeros());
            self.sin.resize(k + 1, SVector::zeros());
        }
    }

    pub fn coefficient_norm(&self) -> f64 {
        self.cos
            .iter()
            .chain(self.sin.iter())
            .map(|v| v.norm_squared())
            .sum::<f64>()
            .sqrt()
    }

    /// Adds `other` term by term.
    pub fn plus(&self, other: &TrigCurve<D>) -> TrigCurve<D> {
        let n = self.degree().max(other.degree());
        let a = self.clone().padded(n);
        let b = other.clone().padded(n);
        let cos = a.cos.iter().zip(&b.cos).map(|(x, y)| x + y).collect();
        let sin = a.sin.iter().zip(&b.sin).map(|(x, y)| x + y).collect();
        TrigCurve::new(cos, sin)
    }

    pub fn eval(&self, t: f64) -> SVector<f64, D> {
        let (c, s) = harmonics(t, self.degree());
        let mut out = SVector::zeros();
        for k in 0..=self.degree() {
            out += self.cos[k] * c[k] + self.sin[k] * s[k];
        }
        out
    }

    /// Exact `order`-th derivative, `1 <= order <= 6`.
    pub fn deriv(&self, t: f64, order: usize) -> Result<SVector<f64, D>, CurveError> {
        if order == 0 || order > MAX_ORDER {
            return Err(CurveError::DerivativeOrder(order));
        }
        let (c, s) = harmonics(t, self.degree());
        Ok(self.derivative_from(&c, &s, order))
    }

    fn derivative_from(&self, c: &[f64], s: &[f64], order: usize) -> SVector<f64, D> {
        let mut out = SVector::zeros();
        for k in 1..=self.degree() {
            let w = (TAU * k as f64).powi(order as i32);
            // d^m/dt^m of cos θ and sin θ expressed through cos θ, sin θ.
            let (dc, ds) = match order % 4 {
                0 => (c[k], s[k]),
                1 => (-s[k], c[k]),
                2 => (-c[k], -s[k]),
                _ => (s[k], -c[k]),
            };
            out += (self.cos[k] * dc + self.sin[k] * ds) * w;
        }
        out
    }
}

impl<const D: usize> SpaceCurve<D> for TrigCurve<D> {
    fn taylor(&self, t: f64, order: usize) -> Taylor<D> {
        let (c, s) = harmonics(t, self.degree());
        let mut coeffs = [SVector::zeros(); MAX_ORDER + 1];
        let mut factorial = 1.0;
        for (m, slot) in coeffs.iter_mut().enumerate().take(order.min(MAX_ORDER) + 1) {
            if m == 0 {
                for k in 0..=self.degree() {
                    *slot += self.cos[k] * c[k] + self.sin[k] * s[k];
                }
            } else {
                factorial *= m as f64;
                *slot = self.derivative_from(&c, &s, m) / factorial;
            }
        }
        Taylor { coeffs }
    }

    fn point(&self, t: f64) -> SVector<f64, D> {
        self.eval(t)
    }

    fn velocity(&self, t: f64) -> SVector<f64, D> {
        let (c, s) = harmonics(t, self.degree());
        self.derivative_from(&c, &s, 1)
    }
}

/// `cos(2πkt)`, `sin(2πkt)` for `k = 0..=degree` by angle addition.
fn harmonics(t: f64, degree: usize) -> (Vec<f64>, Vec<f64>) {
    let mut c = Vec::with_capacity(degree + 1);
    let mut s = Vec::with_capacity(degree + 1);
    c.push(1.0);
    s.push(0.0);
    if degree == 0 {
        return (c, s);
    }
    // Reduce to [0,1) first so large t keeps full precision.
    let theta = TAU * t.rem_euclid(1.0);
    let (s1, c1) = theta.sin_cos();
    c.push(c1);
    s.push(s1);
    for k in 2..=degree {
        // Recompute every few steps to stop error growth.
        if k % 8 == 0 {
            let (sk, ck) = (theta * k as f64).sin_cos();
            c.push(ck);
            s.push(sk);
        } else {
            let (cp, sp) = (c[k - 1], s[k - 1]);
            c.push(cp * c1 - sp * s1);
            s.push(sp * c1 + cp * s1);
        }
    }
    (c, s)
}
