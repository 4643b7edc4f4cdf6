//! Deterministic low-discrepancy sequences.

use std::f64::consts::{PI, TAU};

use nalgebra::Vector3;

/// Radical inverse of `i` in `base`.
pub fn halton(mut i: usize, base: usize) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

/// `n` unit vectors spread over the sphere by the Fibonacci spiral. The
/// small irrational `twist` keeps them off coordinate planes, where
/// symmetric inputs tend to be non-generic.
pub fn sphere_directions(n: usize, twist: f64) -> Vec<Vector3<f64>> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
            let r = (1.0 - z * z).sqrt();
            let phi = golden * i as f64 + twist;
            let v = Vector3::new(r * phi.cos(), r * phi.sin(), z);
            tilt(v, twist)
        })
        .collect()
}

fn tilt(v: Vector3<f64>, twist: f64) -> Vector3<f64> {
    // Small rotation about (1,1,1) so z never lines up with an axis exactly.
    let axis = Vector3::new(1.0, 1.0, 1.0).normalize();
    let a = 0.3 + twist;
    let (s, c) = a.sin_cos();
    (v * c + axis.cross(&v) * s + axis * axis.dot(&v) * (1.0 - c)).normalize()
}

/// A point of the unit 3-sphere from three numbers in `[0, 1)`.
pub fn s3_point(u: f64, v: f64, w: f64) -> nalgebra::Vector4<f64> {
    let (a, b) = ((1.0 - u).sqrt(), u.sqrt());
    let (t1, t2) = (TAU * v, TAU * w);
    nalgebra::Vector4::new(a * t1.cos(), a * t1.sin(), b * t2.cos(), b * t2.sin())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn halton_base_two() {
        let got: Vec<f64> = (1..5).map(|i| halton(i, 2)).collect();
        assert_eq!(got, vec![0.5, 0.25, 0.75, 0.125]);
    }

    #[test]
    fn directions_are_unit_and_spread() {
        let d = sphere_directions(32, 0.1);
        assert!(d.iter().all(|v| (v.norm() - 1.0).abs() < 1e-14));
        let mean: Vector3<f64> = d.iter().sum::<Vector3<f64>>() / 32.0;
        assert!(mean.norm() < 0.1);
        assert!(d.iter().all(|v| v.iter().all(|x| x.abs() > 1e-6)));
    }
}
