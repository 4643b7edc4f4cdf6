//! Truncated Taylor series used to push exact derivatives through the
//! stereographic maps.

use std::ops::{Add, Mul, Neg, Sub};

/// Highest derivative order tracked anywhere in the crate.
pub const MAX_ORDER: usize = 6;

/// Scalar power series `c[0] + c[1] h + ... + c[MAX_ORDER] h^MAX_ORDER`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Series(pub [f64; MAX_ORDER + 1]);

impl Series {
    pub const ZERO: Series = Series([0.0; MAX_ORDER + 1]);

    pub fn constant(c: f64) -> Self {
        let mut s = Self::ZERO;
        s.0[0] = c;
        s
    }

    pub fn scale(self, k: f64) -> Self {
        Series(self.0.map(|c| c * k))
    }

    /// Division by a series with nonzero constant term.
    pub fn div(self, rhs: Series) -> Series {
        let d0 = rhs.0[0];
        let mut q = [0.0; MAX_ORDER + 1];
        for n in 0..=MAX_ORDER {
            let mut acc = self.0[n];
            for k in 1..=n {
                acc -= rhs.0[k] * q[n - k];
            }
            q[n] = acc / d0;
        }
        Series(q)
    }

    /// Square root of a series with positive constant term.
    pub fn sqrt(self) -> Series {
        let r0 = self.0[0].sqrt();
        let mut r = [0.0; MAX_ORDER + 1];
        r[0] = r0;
        for n in 1..=MAX_ORDER {
            let mut acc = self.0[n];
            for k in 1..n {
                acc -= r[k] * r[n - k];
            }
            r[n] = acc / (2.0 * r0);
        }
        Series(r)
    }
}

impl Add for Series {
    type Output = Series;
    fn add(self, rhs: Series) -> Series {
        let mut out = self.0;
        for (o, r) in out.iter_mut().zip(rhs.0) {
            *o += r;
        }
        Series(out)
    }
}

impl Sub for Series {
    type Output = Series;
    fn sub(self, rhs: Series) -> Series {
        self + (-rhs)
    }
}

impl Neg for Series {
    type Output = Series;
    fn neg(self) -> Series {
        Series(self.0.map(|c| -c))
    }
}

impl Mul for Series {
    type Output = Series;
    fn mul(self, rhs: Series) -> Series {
        let mut out = [0.0; MAX_ORDER + 1];
        for i in 0..=MAX_ORDER {
            if self.0[i] == 0.0 {
                continue;
            }
            for j in 0..=(MAX_ORDER - i) {
                out[i + j] += self.0[i] * rhs.0[j];
            }
        }
        Series(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geometric() -> Series {
        // 1/(1-h)
        Series([1.0; MAX_ORDER + 1])
    }

    #[test]
    fn division_inverts_multiplication() {
        let a = Series([2.0, -1.0, 0.5, 3.0, 0.0, 1.0, -2.0]);
        let b = Series([1.5, 0.25, -1.0, 0.0, 2.0, 0.0, 1.0]);
        let q = (a * b).div(b);
        for (x, y) in q.0.iter().zip(a.0) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn one_over_one_minus_h() {
        let one_minus_h = Series([1.0, -1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(Series::constant(1.0).div(one_minus_h), geometric());
    }

    #[test]
    fn sqrt_squares_back() {
        let a = Series([2.0, -1.0, 0.5, 3.0, 0.0, 1.0, -2.0]);
        let r = a.sqrt();
        for (x, y) in (r * r).0.iter().zip(a.0) {
            assert!((x - y).abs() < 1e-12);
        }
        // sqrt(1 + 2h + h²) = 1 + h
        let sq = Series([1.0, 2.0, 1.0, 0.0, 0.0, 0.0, 0.0]).sqrt();
        assert_eq!(sq, Series([1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0]));
    }
}
