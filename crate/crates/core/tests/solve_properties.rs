use nalgebra::Vector4;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use trefoil_core::curve::stereo::pole_avoiding;
use trefoil_core::curve::{preset, KnotCurve, ProjectedCurve, RadialCurve, SpaceCurve, TrigCurve};
use trefoil_core::gauss::{a2_of_curve, a2_of_knot};
use trefoil_core::solve::{find_inscribed_prisms, kappa, ConfigTuple, SearchParams, DEDUP_RADIUS};

fn s3_trefoil() -> TrigCurve<4> {
    match preset("paper-trefoil-s3").unwrap() {
        KnotCurve::S3(c) => c,
        KnotCurve::R3(_) => unreachable!(),
    }
}

fn solve(curve: &dyn SpaceCurve<4>, basepoint: f64, grid: usize) -> Vec<ConfigTuple> {
    find_inscribed_prisms(curve, basepoint, &SearchParams { grid, ..Default::default() }).unwrap()
}

fn contains(sols: &[ConfigTuple], t: &[f64; 6]) -> bool {
    sols.iter().any(|s| s.torus_distance(t) < DEDUP_RADIUS)
}

/// Parameters sorted cyclically starting from the one nearest `start`.
fn rebase(mut t: [f64; 6], start: f64) -> [f64; 6] {
    for x in t.iter_mut() {
        *x = x.rem_euclid(1.0);
    }
    t.sort_by(f64::total_cmp);
    let k = (0..6)
        .min_by(|&a, &b| {
            let da = (t[a] - start).rem_euclid(1.0).min((start - t[a]).rem_euclid(1.0));
            let db = (t[b] - start).rem_euclid(1.0).min((start - t[b]).rem_euclid(1.0));
            da.total_cmp(&db)
        })
        .unwrap();
    t.rotate_left(k);
    t
}

#[test]
fn identical_runs_give_identical_lists() {
    for name in ["paper-trefoil-s3", "figure-eight-r3"] {
        let m = preset(name).unwrap().s3_model();
        let a = solve(&*m, 0.0, 12);
        let b = solve(&*m, 0.0, 12);
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.params, y.params);
            assert_eq!(x.sign, y.sign);
        }
        for w in a.windows(2) {
            assert!(w[0].params[1] <= w[1].params[1]);
        }
    }
}

#[test]
fn reflection_symmetry_maps_solutions() {
    // t -> -t negates the second and fourth coordinates of the curve.
    let c = s3_trefoil();
    for b in [0.0, 0.1, 0.3] {
        let here = solve(&c, b, 12);
        let there = solve(&c, -b, 12);
        assert!(!here.is_empty());
        for s in &here {
            let mapped = rebase(s.params.map(|t| -t), -b);
            assert!(contains(&there, &mapped), "basepoint {b}: {mapped:?}");
            let p0 = c.point(s.params[2]);
            let p1 = c.point(-s.params[2]);
            assert!((Vector4::new(p0.x, -p0.y, p0.z, -p0.w) - p1).norm() < 1e-14);
        }
    }
}

#[test]
fn half_turn_symmetry_maps_solutions() {
    // t -> t + 1/2 negates the third and fourth coordinates.
    let c = s3_trefoil();
    for b in [0.0, 0.2] {
        let here = solve(&c, b, 12);
        let there = solve(&c, b + 0.5, 12);
        assert_eq!(here.len(), there.len());
        for s in &here {
            let mapped = rebase(s.params.map(|t| t + 0.5), b + 0.5);
            assert!(contains(&there, &mapped), "basepoint {b}: {mapped:?}");
        }
    }
}

#[test]
fn doubling_the_grid_keeps_every_solution() {
    for name in ["paper-trefoil-s3", "figure-eight-r3"] {
        let m = preset(name).unwrap().s3_model();
        let coarse = solve(&*m, 0.0, 12);
        let fine = solve(&*m, 0.0, 24);
        for s in &coarse {
            assert!(contains(&fine, &s.params), "{name}: {:?}", s.params);
        }
    }
}

#[test]
fn parity_is_odd_on_the_s3_trefoil() {
    let c = s3_trefoil();
    for k in 0..10 {
        let sols = solve(&c, k as f64 / 10.0, 12);
        assert_eq!(sols.len() % 2, 1, "basepoint {}", k as f64 / 10.0);
    }
}

#[test]
fn small_perturbation_keeps_the_count() {
    let base = s3_trefoil();
    let reference = kappa(&KnotCurve::S3(base.clone()), 0.0, &SearchParams::default()).unwrap();
    let want = reference.kappa.unwrap().abs();
    assert_eq!(want, a2_of_knot(&KnotCurve::S3(base.clone())).unwrap().abs());
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..3 {
        let raw: Vec<(usize, usize, f64, f64)> = (0..4)
            .flat_map(|i| (1..=4).map(move |k| (i, k)))
            .map(|(i, k)| (i, k, rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let norm = raw.iter().map(|r| r.2 * r.2 + r.3 * r.3).sum::<f64>().sqrt();
        let mut bump = TrigCurve::<4>::new(vec![], vec![]);
        for (i, k, a, b) in raw {
            bump.add_cos(i, k, 0.009 * a / norm);
            bump.add_sin(i, k, 0.009 * b / norm);
        }
        assert!(bump.coefficient_norm() < 0.01);
        let curve = RadialCurve(base.plus(&bump));
        let picture = ProjectedCurve::new(curve.clone(), pole_avoiding(&curve, &[], 0.2));
        assert_eq!(a2_of_curve(&picture).unwrap(), a2_of_curve(&*preset("paper-trefoil-s3").unwrap().r3_model()).unwrap());
        let sols = solve(&curve, 0.0, 12);
        assert!(sols.iter().all(|s| s.sign.is_some()));
        let k: i64 = sols.iter().map(|s| i64::from(s.sign.unwrap())).sum();
        assert_eq!(k.abs(), want);
    }
}
