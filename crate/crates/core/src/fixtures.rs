//! Point sets with known cylinders, shared by the `verify` command and the tests.

use nalgebra::Rotation3;
use rand::Rng;

use crate::geometry::{Cylinder, Vec3};
use crate::numerics::{any_orthogonal, random_unit_vector};

/// Regular tetrahedron with edge `2√2` centered at the origin.
pub fn regular_tetrahedron() -> Vec<Vec3> {
    vec![
        Vec3::new(1.0, 1.0, 1.0),
        Vec3::new(1.0, -1.0, -1.0),
        Vec3::new(-1.0, 1.0, -1.0),
        Vec3::new(-1.0, -1.0, 1.0),
    ]
}

/// Triangular bipyramid: apexes `(0,0,±h)` over the unit equilateral triangle.
pub fn bipyramid(h: f64) -> Vec<Vec3> {
    let s = 3f64.sqrt() / 2.0;
    vec![
        Vec3::new(0.0, 0.0, h),
        Vec3::new(0.0, 0.0, -h),
        Vec3::new(1.0, 0.0, 0.0),
        Vec3::new(-0.5, s, 0.0),
        Vec3::new(-0.5, -s, 0.0),
    ]
}

/// Radius shared by every cylinder circumscribed to the bipyramid.
pub fn bipyramid_radius(h: f64) -> f64 {
    let h2 = h * h;
    (4.0 * h2 + 1.0) / (4.0 * h2 + 2.0)
}

/// The closed-form circumscribed cylinders of the bipyramid, `h ≥ √2/2`.
/// Six of them, or three at the boundary where the two signs coincide.
pub fn bipyramid_cylinders(h: f64) -> Vec<Cylinder> {
    let h2 = h * h;
    let rho = bipyramid_radius(h);
    let c = Vec3::new(1.0 / (4.0 * h2 + 2.0), 0.0, 0.0);
    let uy = (2.0 / (2.0 * h2 + 1.0)).sqrt();
    let gap = 2.0 * h2 - 1.0;
    let uz = if gap <= 1e-12 {
        0.0
    } else {
        (gap / (2.0 * h2 + 1.0)).sqrt()
    };
    let signs: &[f64] = if uz == 0.0 { &[1.0] } else { &[1.0, -1.0] };
    let mut out = Vec::new();
    for k in 0..3 {
        let rot =
            Rotation3::from_axis_angle(&Vec3::z_axis(), k as f64 * std::f64::consts::TAU / 3.0);
        for s in signs {
            out.push(Cylinder::new(
                rot * Vec3::new(0.0, uy, s * uz),
                rot * c,
                rho,
            ));
        }
    }
    out
}

pub fn random_cloud<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<Vec3> {
    (0..n)
        .map(|_| {
            Vec3::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            )
        })
        .collect()
}

/// A random cylinder with radius in `[0.3, 2]` passing near the origin.
pub fn random_cylinder<R: Rng + ?Sized>(rng: &mut R) -> Cylinder {
    let u = random_unit_vector(rng);
    let c = Vec3::new(
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
    );
    Cylinder::new(u, c, rng.gen_range(0.3..2.0))
}

/// `n` points placed exactly on the surface of `cyl`, spread over a height
/// of about `±2ρ` along the axis.
pub fn sample_on_cylinder<R: Rng + ?Sized>(rng: &mut R, cyl: &Cylinder, n: usize) -> Vec<Vec3> {
    let e1 = any_orthogonal(&cyl.u);
    let e2 = cyl.u.cross(&e1);
    (0..n)
        .map(|_| {
            let phi = rng.gen_range(0.0..std::f64::consts::TAU);
            let z = rng.gen_range(-2.0..2.0) * cyl.rho.max(0.5);
            cyl.c + cyl.u * z + (e1 * phi.cos() + e2 * phi.sin()) * cyl.rho
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn bipyramid_cylinders_pass_through_all_points() {
        for h in [std::f64::consts::FRAC_1_SQRT_2, 0.8, 1.0, 2.5] {
            let cyls = bipyramid_cylinders(h);
            for cyl in &cyls {
                for x in bipyramid(h) {
                    assert!((cyl.sq_distance(&x).sqrt() - cyl.rho).abs() < 1e-14);
                }
            }
        }
        assert_eq!(bipyramid_cylinders(1.0).len(), 6);
        assert_eq!(bipyramid_cylinders(0.5f64.sqrt()).len(), 3);
    }

    #[test]
    fn sampled_points_lie_on_cylinder() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let cyl = random_cylinder(&mut rng);
        for x in sample_on_cylinder(&mut rng, &cyl, 20) {
            assert!((cyl.sq_distance(&x).sqrt() - cyl.rho).abs() < 1e-13);
        }
    }
}
