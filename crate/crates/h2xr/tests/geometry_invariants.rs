//! Property tests for the hyperbolic-plane primitives: every claimed
//! identity is checked on randomized interior points, not hand-picked ones.

use h2xr::geometry::{
    apply_dilation, conformal_factor, hyperbolic_distance, metric_f, DiskPoint, Isometry,
};
use proptest::prelude::*;

/// Strategy for disk points bounded away from the ideal boundary; the
/// invariants hold up to round-off only while 1−|z| is not itself noise.
fn interior_point(max_radius: f64) -> impl Strategy<Value = DiskPoint> {
    (0.0..max_radius, 0.0..std::f64::consts::TAU)
        .prop_map(|(r, th)| DiskPoint::from_polar(r, th).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn dilations_preserve_hyperbolic_distance(
        z0 in interior_point(0.9),
        p in interior_point(0.95),
        q in interior_point(0.95),
    ) {
        let d_before = hyperbolic_distance(&p, &q);
        let tp = apply_dilation(&z0, &p).unwrap();
        let tq = apply_dilation(&z0, &q).unwrap();
        let d_after = hyperbolic_distance(&tp, &tq);
        prop_assert!((d_before - d_after).abs() < 1e-10,
            "distance drifted by {}", (d_before - d_after).abs());
    }

    #[test]
    fn rotations_preserve_hyperbolic_distance(
        zeta in 0.0..std::f64::consts::TAU,
        p in interior_point(0.98),
        q in interior_point(0.98),
    ) {
        let rot = Isometry::Rotation(zeta);
        let d_before = hyperbolic_distance(&p, &q);
        let d_after = hyperbolic_distance(&rot.apply(&p).unwrap(), &rot.apply(&q).unwrap());
        prop_assert!((d_before - d_after).abs() < 1e-10);
    }

    #[test]
    fn lambda2_times_f_reciprocal_to_one_rounding(p in interior_point(0.999)) {
        // λ² is stored as 1/F: the product can miss 1 by at most the two
        // roundings involved, never by an algorithmic error.
        let m = conformal_factor(&p).unwrap();
        prop_assert!((m.lambda2 * m.f - 1.0).abs() <= 4.0 * f64::EPSILON);
        prop_assert!(m.lambda2 >= 4.0 - 1e-12);
    }

    #[test]
    fn conformal_factor_is_radial(
        r in 0.0..0.999f64,
        th1 in 0.0..std::f64::consts::TAU,
        th2 in 0.0..std::f64::consts::TAU,
    ) {
        let p1 = DiskPoint::from_polar(r, th1).unwrap();
        let p2 = DiskPoint::from_polar(r, th2).unwrap();
        let f1 = conformal_factor(&p1).unwrap().f;
        let f2 = conformal_factor(&p2).unwrap().f;
        // Same radius up to sin/cos round-off ⇒ same F up to a few ulps.
        prop_assert!((f1 - f2).abs() <= 1e-15 * (1.0 + f1.abs()));
        prop_assert!((f1 - metric_f(r)).abs() <= 1e-15);
    }

    #[test]
    fn isometry_inverse_round_trips(
        z0 in interior_point(0.85),
        zeta in 0.0..std::f64::consts::TAU,
        p in interior_point(0.9),
    ) {
        let iso = Isometry::Composition(vec![
            Isometry::Dilation(z0),
            Isometry::Rotation(zeta),
        ]);
        let back = iso.inverse().apply(&iso.apply(&p).unwrap()).unwrap();
        prop_assert!((back.x - p.x).abs() < 1e-10 && (back.y - p.y).abs() < 1e-10);
    }

    #[test]
    fn triangle_inequality(
        p in interior_point(0.95),
        q in interior_point(0.95),
        s in interior_point(0.95),
    ) {
        let pq = hyperbolic_distance(&p, &q);
        let qs = hyperbolic_distance(&q, &s);
        let ps = hyperbolic_distance(&p, &s);
        prop_assert!(ps <= pq + qs + 1e-12);
    }
}
