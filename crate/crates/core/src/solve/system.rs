//! The based concurrency system: unknowns `(t₂, …, t₆, φ)` with `t₁`
//! fixed, six residuals saying that `p(φ) = cos φ·X₁ + sin φ·X₄` lies on
//! the chords through `X₂, X₅` and through `X₃, X₆`.

use nalgebra::{Matrix2, SMatrix, Vector4, Vector5, Vector6};

use crate::curve::SpaceCurve;
use crate::projgeom::{best_phi, complement_basis, homogenize};

pub type Jacobian = SMatrix<f64, 6, 6>;

pub struct ResidualSystem<'a, C: ?Sized> {
    pub curve: &'a C,
    pub t1: f64,
}

#[derive(Clone, Debug)]
pub struct Residual {
    pub value: Vector6<f64>,
    pub jacobian: Jacobian,
    pub points: [Vector4<f64>; 6],
}

impl<C: SpaceCurve<4> + ?Sized> ResidualSystem<'_, C> {
    pub fn params(&self, x: &Vector6<f64>) -> [f64; 6] {
        [self.t1, x[0], x[1], x[2], x[3], x[4]]
    }

    /// Starting vector for the parameters `t`, with the best φ for them.
    pub fn start(&self, t: &[f64; 6]) -> Vector6<f64> {
        let x: Vec<Vector5<f64>> = t.iter().map(|&s| homogenize(&self.curve.point(s))).collect();
        let (phi, _) = best_phi(&x[0], &x[3], &complement_basis(&x[1], &x[4]), &complement_basis(&x[2], &x[5]));
        Vector6::new(t[1], t[2], t[3], t[4], t[5], phi)
    }

    pub fn eval(&self, x: &Vector6<f64>) -> Residual {
        let ts = self.params(x);
        let phi = x[5];
        let mut pts = [Vector4::zeros(); 6];
        let mut hx = [Vector5::zeros(); 6];
        let mut dx = [Vector5::zeros(); 6];
        for k in 0..6 {
            let tay = self.curve.taylor(ts[k], 1);
            pts[k] = tay.coeffs[0];
            hx[k] = homogenize(&tay.coeffs[0]);
            let d = tay.derivative(1);
            dx[k] = Vector5::new(d[0], d[1], d[2], d[3], 0.0);
        }
        let (c, s) = (phi.cos(), phi.sin());
        let p = hx[0] * c + hx[3] * s;
        let pn = p.norm();
        let dp_t4 = dx[3] * s;
        let dp_phi = hx[3] * c - hx[0] * s;
        let mut value = Vector6::zeros();
        let mut jac = Jacobian::zeros();
        // (point a, point b, column of t_a, column of t_b)
        for (block, &(a, b, ca, cb)) in [(1usize, 4usize, 0usize, 3usize), (2, 5, 1, 4)].iter().enumerate() {
            let basis = complement_basis(&hx[a], &hx[b]);
            let g = Matrix2::new(hx[a].dot(&hx[a]), hx[a].dot(&hx[b]), hx[b].dot(&hx[a]), hx[b].dot(&hx[b]));
            let coef = g.try_inverse().unwrap_or_else(Matrix2::zeros) * nalgebra::Vector2::new(hx[a].dot(&p), hx[b].dot(&p));
            let r = basis.transpose() * p / pn;
            let rows = 3 * block;
            value.fixed_rows_mut::<3>(rows).copy_from(&r);
            jac.fixed_view_mut::<3, 1>(rows, ca).copy_from(&(-(basis.transpose() * dx[a]) * coef[0] / pn));
            jac.fixed_view_mut::<3, 1>(rows, cb).copy_from(&(-(basis.transpose() * dx[b]) * coef[1] / pn));
            for (col, dp) in [(2, &dp_t4), (5, &dp_phi)] {
                let d = basis.transpose() * dp / pn - r * (p.dot(dp) / (pn * pn));
                jac.fixed_view_mut::<3, 1>(rows, col).copy_from(&d);
            }
        }
        Residual { value, jacobian: jac, points: pts }
    }
}
