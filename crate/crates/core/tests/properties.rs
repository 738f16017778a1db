use cylkit::enclosing::{enclosure_check, smallest_enclosing_cylinder, ENCLOSURE_TOL};
use cylkit::five_point::circumscribed_5;
use cylkit::four_point::quartic_objective;
use cylkit::geometry::{center_points, compute_moments, SolverConfig, Vec3};
use nalgebra::{Rotation3, Unit};
use proptest::prelude::*;

fn point() -> impl Strategy<Value = Vec3> {
    (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64).prop_map(|(x, y, z)| Vec3::new(x, y, z))
}

fn rigid_motion() -> impl Strategy<Value = (Rotation3<f64>, Vec3)> {
    (point(), 0.0..std::f64::consts::PI, point()).prop_filter_map("axis", |(a, angle, t)| {
        (a.norm() > 1e-3).then(|| {
            (
                Rotation3::from_axis_angle(&Unit::new_normalize(a), angle),
                t * 10.0,
            )
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn quartic_is_homogeneous(pts in prop::collection::vec(point(), 4), u in point(), lambda in 0.1..3.0f64) {
        let ps = center_points(&pts).unwrap();
        prop_assume!(ps.full_rank && u.norm() > 1e-2);
        let m = compute_moments(&ps);
        let f1 = quartic_objective(&u, &ps, &m).unwrap();
        let f2 = quartic_objective(&(u * lambda), &ps, &m).unwrap();
        prop_assert!((f2 - lambda.powi(4) * f1).abs() <= 1e-10 * f2.abs().max(1e-12));
    }

    #[test]
    fn enclosing_cylinder_contains_everything_and_moves_rigidly(
        pts in prop::collection::vec(point(), 5..9),
        (rot, shift) in rigid_motion(),
    ) {
        let cfg = SolverConfig::default();
        let ps = center_points(&pts).unwrap();
        let res = smallest_enclosing_cylinder(&ps, &cfg).unwrap();
        prop_assert!(enclosure_check(&res.cylinder, &ps, ENCLOSURE_TOL).0);
        let moved: Vec<Vec3> = pts.iter().map(|p| rot * p + shift).collect();
        let res2 = smallest_enclosing_cylinder(&center_points(&moved).unwrap(), &cfg).unwrap();
        prop_assert!((res2.cylinder.rho - res.cylinder.rho).abs() <= 1e-10 * res.cylinder.rho.max(1e-12));
    }

    #[test]
    fn circumscribed_set_is_permutation_invariant(pts in prop::collection::vec(point(), 5), shift in 1usize..5) {
        let ps = center_points(&pts).unwrap();
        prop_assume!(ps.full_rank);
        let Ok(a) = circumscribed_5(&ps) else { return Ok(()) };
        let mut rotated = pts.clone();
        rotated.rotate_left(shift);
        let b = circumscribed_5(&center_points(&rotated).unwrap()).unwrap();
        prop_assert_eq!(a.cylinders.len(), b.cylinders.len());
        for c in &a.cylinders {
            prop_assert!(b.cylinders.iter().any(|d| c.axis_angle(d) <= 1e-7 && (c.rho - d.rho).abs() <= 1e-9 * c.rho));
        }
    }
}
