//! Shared domain types: centered point sets, their moment matrices, the
//! cylinder representation and the point-to-axis distance.
//!
//! Every solver works in the centered frame (the mean of the input points is
//! translated to the origin). A cylinder is stored as a unit direction `u`, the
//! axis point `c` closest to the origin (so `c'u = 0`) and a radius.

use nalgebra::{DMatrix, Matrix3, Vector3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{CylError, Result};

pub type Vec3 = Vector3<f64>;
pub type Mat3 = Matrix3<f64>;

/// Relative singular-value threshold below which a direction counts as missing.
pub const RANK_TOL: f64 = 1e-10;

/// A centered set of 3D points.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    pub points: Vec<Vec3>,
    pub centroid_offset: Vec3,
    /// Number of singular values of X above `RANK_TOL` times the largest.
    pub rank: usize,
    pub full_rank: bool,
}

impl PointSet {
    pub fn n(&self) -> usize {
        self.points.len()
    }

    /// Bounding-box diameter. Used to make tolerances scale-free.
    pub fn scale(&self) -> f64 {
        bbox_diameter(&self.points)
    }

    /// `scale()` floored away from zero, for use as a tolerance unit.
    pub fn tol_scale(&self) -> f64 {
        let s = self.scale();
        if s > 0.0 {
            s
        } else {
            1.0
        }
    }

    /// The input points in their original frame.
    pub fn original_points(&self) -> Vec<Vec3> {
        self.points
            .iter()
            .map(|p| p + self.centroid_offset)
            .collect()
    }

    /// Sub-problem on the listed points, re-centered.
    pub fn subset(&self, indices: &[usize]) -> PointSet {
        let raw: Vec<Vec3> = indices
            .iter()
            .map(|&i| self.points[i] + self.centroid_offset)
            .collect();
        center_points(&raw).expect("subset is nonempty")
    }
}

pub fn bbox_diameter(points: &[Vec3]) -> f64 {
    if points.is_empty() {
        return 0.0;
    }
    let mut lo = points[0];
    let mut hi = points[0];
    for p in points {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    (hi - lo).norm()
}

/// Translates the mean of `raw_points` to the origin and flags the rank.
pub fn center_points(raw_points: &[Vec3]) -> Result<PointSet> {
    if raw_points.is_empty() {
        return Err(CylError::InvalidInput("point set is empty".into()));
    }
    if raw_points.iter().any(|p| !p.iter().all(|v| v.is_finite())) {
        return Err(CylError::InvalidInput("non-finite coordinate".into()));
    }
    let n = raw_points.len() as f64;
    let mean = raw_points.iter().fold(Vec3::zeros(), |acc, p| acc + p) / n;
    let points: Vec<Vec3> = raw_points.iter().map(|p| p - mean).collect();
    let rank = numeric_rank(&points);
    Ok(PointSet {
        points,
        centroid_offset: mean,
        rank,
        full_rank: rank == 3,
    })
}

fn inertia(points: &[Vec3]) -> Mat3 {
    points
        .iter()
        .fold(Mat3::zeros(), |acc, x| acc + x * x.transpose())
}

/// Numerical rank of the centered coordinate matrix X, from its singular values.
fn numeric_rank(points: &[Vec3]) -> usize {
    let x = DMatrix::from_fn(points.len(), 3, |i, j| points[i][j]);
    let sv = x.singular_values();
    let top = sv.max();
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > RANK_TOL * top).count()
}

/// Moment matrices of a centered point set.
#[derive(Debug, Clone, PartialEq)]
pub struct Moments {
    /// Inertia matrix X'X.
    pub t: Mat3,
    /// Covariance T/n.
    pub v: Mat3,
    /// Per-point `I·Tr(V_i − V) − (V_i − V)` with `V_i = x_i x_i'`.
    pub b: Vec<Mat3>,
    /// `I·Tr(T) − T`.
    pub w: Mat3,
    /// `T⁻¹` when the set is full rank.
    pub t_inv: Option<Mat3>,
}

pub fn compute_moments(ps: &PointSet) -> Moments {
    let n = ps.n() as f64;
    let t = inertia(&ps.points);
    let v = t / n;
    let eye = Mat3::identity();
    let b = ps
        .points
        .iter()
        .map(|x| {
            let d = x * x.transpose() - v;
            eye * d.trace() - d
        })
        .collect();
    let w = eye * t.trace() - t;
    let t_inv = if ps.full_rank { t.try_inverse() } else { None };
    Moments { t, v, b, w, t_inv }
}

impl Moments {
    /// `b_i = u'B_i u` for every point. Homogeneous of degree 2 in `u`.
    pub fn b_values(&self, u: &Vec3) -> Vec<f64> {
        self.b.iter().map(|bi| u.dot(&(bi * u))).collect()
    }

    /// `γ = T⁻¹ X' b`, twice the axis point of the cylinder through the set
    /// with direction `u`, whenever one exists.
    pub fn gamma(&self, ps: &PointSet, u: &Vec3) -> Result<Vec3> {
        let t_inv = self.t_inv.ok_or(CylError::SingularT)?;
        let xb = ps
            .points
            .iter()
            .zip(&self.b)
            .fold(Vec3::zeros(), |acc, (x, bi)| acc + x * u.dot(&(bi * u)));
        Ok(t_inv * xb)
    }

    /// `T⁻¹ x_i` for every point.
    pub fn projectors(&self, ps: &PointSet) -> Result<Vec<Vec3>> {
        let t_inv = self.t_inv.ok_or(CylError::SingularT)?;
        Ok(ps.points.iter().map(|x| t_inv * x).collect())
    }
}

/// A circular cylinder in the centered frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cylinder {
    pub u: Vec3,
    pub c: Vec3,
    pub rho: f64,
}

impl Cylinder {
    /// Builds a cylinder from any direction and any point on the axis.
    /// `c` is moved along the axis to the projection of the origin.
    pub fn new(direction: Vec3, point_on_axis: Vec3, rho: f64) -> Cylinder {
        let u = direction.normalize();
        let c = point_on_axis - u * u.dot(&point_on_axis);
        Cylinder {
            u,
            c,
            rho: rho.max(0.0),
        }
    }

    pub fn sq_distance(&self, x: &Vec3) -> f64 {
        axis_sq_distance(x, &self.u, &self.c)
    }

    /// Direction with its first nonzero component positive.
    pub fn canonical_direction(&self) -> Vec3 {
        canonical_sign(self.u)
    }

    /// Same cylinder expressed after translating the frame by `offset`
    /// (the axis point is re-projected onto the new origin).
    pub fn translated(&self, offset: &Vec3) -> Cylinder {
        Cylinder::new(self.u, self.c + offset, self.rho)
    }

    /// Angle between the axes of two cylinders, ignoring orientation.
    pub fn axis_angle(&self, other: &Cylinder) -> f64 {
        axis_angle(&self.u, &other.u)
    }
}

pub fn canonical_sign(v: Vec3) -> Vec3 {
    for k in 0..3 {
        if v[k] != 0.0 {
            return if v[k] < 0.0 { -v } else { v };
        }
    }
    v
}

/// Angle in `[0, π/2]` between two lines with directions `a` and `b`.
pub fn axis_angle(a: &Vec3, b: &Vec3) -> f64 {
    let cross = a.cross(b).norm();
    let dot = a.dot(b).abs();
    cross.atan2(dot)
}

/// Squared distance from `x` to the line through `c` with unit direction `u`.
pub fn axis_sq_distance(x: &Vec3, u: &Vec3, c: &Vec3) -> f64 {
    let d = x - c;
    // Same value as (x−c)'(x−c) − ((x−c)'u)², without the cancellation.
    (d - u * d.dot(u)).norm_squared()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualProfile {
    /// Mean of the squared axis distances.
    pub mean: f64,
    /// Population standard deviation of the squared axis distances.
    pub stdev: f64,
    /// Largest `|Δ_i − ρ²|`.
    pub max_dev: f64,
}

pub fn residual_profile(ps: &PointSet, cyl: &Cylinder) -> ResidualProfile {
    residual_profile_of(&ps.points, cyl)
}

pub fn residual_profile_of(points: &[Vec3], cyl: &Cylinder) -> ResidualProfile {
    let deltas: Vec<f64> = points.iter().map(|x| cyl.sq_distance(x)).collect();
    let n = deltas.len() as f64;
    let mean = deltas.iter().sum::<f64>() / n;
    let var = deltas.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / n;
    let r2 = cyl.rho * cyl.rho;
    let max_dev = deltas.iter().map(|d| (d - r2).abs()).fold(0.0, f64::max);
    ResidualProfile {
        mean,
        stdev: var.sqrt(),
        max_dev,
    }
}

/// Tolerances and iteration limits shared by the iterative solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub tol_rel: f64,
    pub tol_orth: f64,
    pub max_iter: usize,
    pub n_starts: usize,
    pub seed: u64,
    /// Upper bound on the Newton step length factor, in (0, 1].
    pub step_damping: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tol_rel: 1e-10,
            tol_orth: 1e-10,
            max_iter: 100,
            n_starts: 100,
            seed: 0x5eed_cafe,
            step_damping: 1.0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol_rel > 0.0 && self.tol_orth > 0.0) {
            return Err(CylError::InvalidInput("tolerances must be positive".into()));
        }
        if self.n_starts == 0 {
            return Err(CylError::InvalidInput(
                "at least one start is required".into(),
            ));
        }
        if self.max_iter == 0 {
            return Err(CylError::InvalidInput("max_iter must be positive".into()));
        }
        if !(self.step_damping > 0.0 && self.step_damping <= 1.0) {
            return Err(CylError::InvalidInput(
                "step damping must lie in (0, 1]".into(),
            ));
        }
        Ok(())
    }

    /// Independent generator for one start of a multi-start run.
    pub fn start_rng(&self, index: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index as u64);
        rng
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn tetrahedron() -> Vec<Vec3> {
        vec![
            Vec3::new(1.0, 1.0, 1.0),
            Vec3::new(1.0, -1.0, -1.0),
            Vec3::new(1.0, -1.0, 1.0),
            Vec3::new(-1.0, -1.0, 1.0),
        ]
    }

    #[test]
    fn centering_tetrahedron_coordinates() {
        let ps = center_points(&tetrahedron()).unwrap();
        assert_eq!(ps.centroid_offset, Vec3::new(0.5, -0.5, 0.5));
        let sum = ps.points.iter().fold(Vec3::zeros(), |a, p| a + p);
        assert!(sum.norm() <= 1e-12 * ps.scale());
        assert!(ps.full_rank);
    }

    #[test]
    fn single_point_goes_to_origin() {
        let ps = center_points(&[Vec3::new(5.0, 5.0, 5.0)]).unwrap();
        assert_eq!(ps.points[0], Vec3::zeros());
        assert_eq!(ps.centroid_offset, Vec3::new(5.0, 5.0, 5.0));
        assert_eq!(ps.rank, 0);
        assert!(!ps.full_rank);
    }

    #[test]
    fn empty_input_is_rejected() {
        assert!(center_points(&[]).is_err());
    }

    #[test]
    fn rank_flags_for_planar_and_collinear() {
        let planar = [
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(0.0, 1.0, 0.0),
            Vec3::new(1.0, 1.0, 0.0),
        ];
        assert_eq!(center_points(&planar).unwrap().rank, 2);
        let line: Vec<Vec3> = (0..5)
            .map(|i| Vec3::new(1.0, 2.0, 3.0) * i as f64)
            .collect();
        assert_eq!(center_points(&line).unwrap().rank, 1);
    }

    #[test]
    fn translation_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let raw: Vec<Vec3> = (0..9)
            .map(|_| {
                Vec3::new(
                    rng.gen_range(-5.0..5.0),
                    rng.gen_range(-5.0..5.0),
                    rng.gen_range(-5.0..5.0),
                )
            })
            .collect();
        let ps = center_points(&raw).unwrap();
        for (orig, back) in raw.iter().zip(ps.original_points()) {
            assert!((orig - back).amax() <= 4.0 * f64::EPSILON * orig.amax().max(1.0));
        }
    }

    #[test]
    fn regular_tetrahedron_covariance_is_identity() {
        let sym = center_points(&[
            Vec3::new(1.0, 1.0, 1.0),
            Vec3::new(1.0, -1.0, -1.0),
            Vec3::new(-1.0, 1.0, -1.0),
            Vec3::new(-1.0, -1.0, 1.0),
        ])
        .unwrap();
        assert_eq!(sym.centroid_offset, Vec3::zeros());
        let m = compute_moments(&sym);
        assert!((m.v - Mat3::identity()).amax() < 1e-15);
        assert!(m.t_inv.is_some());
    }

    fn bipyramid(h: f64) -> PointSet {
        let s = 3f64.sqrt() / 2.0;
        center_points(&[
            Vec3::new(0.0, 0.0, h),
            Vec3::new(0.0, 0.0, -h),
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(-0.5, s, 0.0),
            Vec3::new(-0.5, -s, 0.0),
        ])
        .unwrap()
    }

    #[test]
    fn bipyramid_b_matrices() {
        for h in [0.7, 1.0, 2.0] {
            let m = compute_moments(&bipyramid(h));
            let d = (6.0 * h * h - 3.0) / 10.0;
            let expect12 = Mat3::from_diagonal(&Vec3::new(d, d, -0.6));
            assert!((m.b[0] - expect12).amax() < 1e-14);
            assert!((m.b[1] - expect12).amax() < 1e-14);
            let expect3 = Mat3::from_diagonal(&Vec3::new(
                (-4.0 * h * h - 3.0) / 10.0,
                (7.0 - 4.0 * h * h) / 10.0,
                0.4,
            ));
            assert!((m.b[2] - expect3).amax() < 1e-14);
            let r3 = 3f64.sqrt() / 4.0;
            let expect4 = Mat3::new(
                (9.0 - 8.0 * h * h) / 20.0,
                r3,
                0.0,
                r3,
                (-1.0 - 8.0 * h * h) / 20.0,
                0.0,
                0.0,
                0.0,
                0.4,
            );
            assert!((m.b[3] - expect4).amax() < 1e-14);
        }
    }

    #[test]
    fn b_matrices_sum_to_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..12 {
            let raw: Vec<Vec3> = (0..n)
                .map(|_| {
                    Vec3::new(
                        rng.gen_range(-3.0..3.0),
                        rng.gen_range(-1.0..1.0),
                        rng.gen_range(-2.0..7.0),
                    )
                })
                .collect();
            let ps = center_points(&raw).unwrap();
            let m = compute_moments(&ps);
            let sum = m.b.iter().fold(Mat3::zeros(), |a, b| a + b);
            assert!(sum.amax() <= 1e-12 * m.t.trace().max(1e-300), "n={n}");
        }
    }

    #[test]
    fn axis_distance_examples() {
        let u = Vec3::new(0.0, 1.0, 0.0);
        let c = Vec3::new(0.25, 0.0, 0.0);
        assert_eq!(axis_sq_distance(&(c + 2.0 * u), &u, &c), 0.0);
        let x = Vec3::new(0.0, 0.0, 0.5f64.sqrt());
        assert!((axis_sq_distance(&x, &u, &c) - 9.0 / 16.0).abs() < 1e-15);
    }

    #[test]
    fn axis_distance_matches_projection_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let x = Vec3::new(rng.gen(), rng.gen(), rng.gen()) * 4.0;
            let u = Vec3::new(
                rng.gen::<f64>() - 0.5,
                rng.gen::<f64>() - 0.5,
                rng.gen::<f64>() - 0.5,
            )
            .normalize();
            let c = Vec3::new(rng.gen(), rng.gen(), rng.gen());
            let d = x - c;
            let perp = d - u * u.dot(&d);
            let direct = perp.norm_squared();
            assert!(
                (axis_sq_distance(&x, &u, &c) - direct).abs() <= 1e-12 * d.norm_squared().max(1.0)
            );
            // sign and axial-shift invariance
            let lambda: f64 = rng.gen_range(-10.0..10.0);
            let shifted = axis_sq_distance(&x, &(-u), &(c + lambda * u));
            assert!(
                (shifted - direct).abs() <= 1e-11 * (d.norm_squared() + lambda * lambda).max(1.0)
            );
        }
    }

    #[test]
    fn residual_profile_on_circumscribed_set() {
        let cyl = Cylinder::new(Vec3::new(0.0, 0.0, 1.0), Vec3::zeros(), 2.0);
        let pts: Vec<Vec3> = (0..7)
            .map(|k| {
                let a = k as f64 * 0.9;
                Vec3::new(2.0 * a.cos(), 2.0 * a.sin(), k as f64 - 3.0)
            })
            .collect();
        let prof = residual_profile_of(&pts, &cyl);
        assert!(prof.stdev < 1e-14);
        assert!((prof.mean - 4.0).abs() < 1e-14);
        assert!(prof.max_dev < 1e-14);
    }

    #[test]
    fn residual_profile_mean_is_direct_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let raw: Vec<Vec3> = (0..8)
            .map(|_| Vec3::new(rng.gen(), rng.gen(), rng.gen()))
            .collect();
        let ps = center_points(&raw).unwrap();
        let cyl = Cylinder::new(Vec3::new(0.3, -0.2, 0.9), Vec3::new(0.1, 0.2, 0.0), 0.4);
        let mut sum = 0.0;
        for x in &ps.points {
            let d = x - cyl.c;
            sum += d.norm_squared() - d.dot(&cyl.u).powi(2);
        }
        let prof = residual_profile(&ps, &cyl);
        assert!((prof.mean - sum / 8.0).abs() < 1e-15);
    }

    #[test]
    fn cylinder_invariants_hold_after_construction() {
        let cyl = Cylinder::new(Vec3::new(3.0, -1.0, 2.0), Vec3::new(5.0, 7.0, -2.0), 1.0);
        assert!((cyl.u.norm_squared() - 1.0).abs() <= 1e-12);
        assert!(cyl.c.dot(&cyl.u).abs() <= 1e-10 * (cyl.c.norm() + 1.0));
    }

    #[test]
    fn default_config_is_valid() {
        let cfg = SolverConfig::default();
        cfg.validate().unwrap();
        assert!(SolverConfig { n_starts: 0, ..cfg }.validate().is_err());
        assert!(SolverConfig {
            step_damping: 0.0,
            ..cfg
        }
        .validate()
        .is_err());
    }
}
