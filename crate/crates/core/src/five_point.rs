//! All cylinders circumscribed to five points.
//!
//! A direction `u` admits a circumscribed cylinder when the vector
//! `b_i = u'B_i u` lies in the column space of X. For five points that space
//! has a one-dimensional complement (besides the all-ones vector), spanned by
//! `t`, which turns the condition into the quadric cone `u'Mu = 0` with
//! `M = Σ t_i B_i`. The axis point is then `γ/2 = T⁻¹X'b/2`, and `c'u = 0`
//! adds the cubic cone `C(u) = u'γ(u) = 0`. Intersecting the two cones reduces
//! to the real roots of a polynomial of degree at most six.

use nalgebra::{Matrix3, Vector5};

use crate::error::{CylError, Result};
use crate::geometry::{
    axis_angle, compute_moments, residual_profile, Cylinder, Mat3, Moments, PointSet, Vec3,
};
use crate::numerics::{eig_sym3, poly_add, poly_mul, real_roots, Spectrum3};

/// Eigenvalues of M at or below this fraction of its norm count as zero.
pub const ZERO_EIGEN: f64 = 1e-10;
/// `‖M‖ ≤ DEGENERATE_M·Tr(T)` signals a duplicated point.
pub const DEGENERATE_M: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Solutions,
    /// M or −M is positive definite: no circumscribed cylinder exists.
    NoneDefinite,
    DegenerateDuplicatePoints,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FivePointReduction {
    pub t: Vector5<f64>,
    pub m: Mat3,
    pub spectrum: Spectrum3,
    /// Rotation angle about the second eigenvector, when the generic branch applies.
    pub alpha2: Option<f64>,
    /// Reduced polynomial in `w = z₂/z₁`, ascending coefficients.
    pub poly: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CircumscribedSet {
    pub cylinders: Vec<Cylinder>,
    pub verdict: Verdict,
    pub reduction: FivePointReduction,
}

fn check_five(ps: &PointSet) -> Result<()> {
    if ps.n() != 5 {
        return Err(CylError::WrongPointCount {
            expected: 5,
            got: ps.n(),
        });
    }
    if !ps.full_rank {
        return Err(CylError::RankDeficient { rank: ps.rank });
    }
    Ok(())
}

/// Unit-free vector orthogonal to the columns of X and to the all-ones
/// vector. It is scaled to `t't = 5` (the number of points) and its entry of
/// largest magnitude is made positive.
pub fn compute_t(ps: &PointSet) -> Result<Vector5<f64>> {
    check_five(ps)?;
    let mut basis: Vec<Vector5<f64>> = Vec::with_capacity(4);
    let cols = [
        Vector5::repeat(1.0),
        Vector5::from_fn(|i, _| ps.points[i].x),
        Vector5::from_fn(|i, _| ps.points[i].y),
        Vector5::from_fn(|i, _| ps.points[i].z),
    ];
    for col in cols {
        let mut v = col;
        // two passes of modified Gram-Schmidt
        for _ in 0..2 {
            for q in &basis {
                v -= q * q.dot(&v);
            }
        }
        let norm = v.norm();
        if norm <= 1e-12 * col.norm() {
            return Err(CylError::RankDeficient { rank: ps.rank });
        }
        basis.push(v / norm);
    }
    let residual = |mut v: Vector5<f64>| {
        for _ in 0..2 {
            for q in &basis {
                v -= q * q.dot(&v);
            }
        }
        v
    };
    let t = (0..5)
        .map(|k| residual(Vector5::from_fn(|i, _| if i == k { 1.0 } else { 0.0 })))
        .max_by(|a, b| a.norm_squared().total_cmp(&b.norm_squared()))
        .expect("five candidates");
    let t = t * (5f64.sqrt() / t.norm());
    let lead = t
        .iter()
        .copied()
        .max_by(|a, b| a.abs().total_cmp(&b.abs()))
        .unwrap();
    Ok(if lead < 0.0 { -t } else { t })
}

/// `M = Σ t_i B_i`, computed as `I·Tr(X'ΘX) − X'ΘX` with `Θ = diag(t)`.
pub fn compute_m(ps: &PointSet, t: &Vector5<f64>) -> Mat3 {
    let xtx = ps
        .points
        .iter()
        .zip(t.iter())
        .fold(Mat3::zeros(), |acc, (x, ti)| acc + x * x.transpose() * *ti);
    Mat3::identity() * xtx.trace() - xtx
}

/// Existence test on the spectrum of M. `trace_t` is `Tr(T)`, the scale for
/// the degeneracy test.
pub fn existence_verdict(spectrum: &Spectrum3, trace_t: f64) -> Verdict {
    if spectrum.norm() <= DEGENERATE_M * trace_t {
        return Verdict::DegenerateDuplicatePoints;
    }
    let [mu1, _, mu3] = spectrum.eigenvalues;
    let zero = ZERO_EIGEN * spectrum.norm();
    if mu1.abs() > zero && mu3.abs() > zero && mu1 * mu3 > 0.0 {
        Verdict::NoneDefinite
    } else {
        Verdict::Solutions
    }
}

/// `γ(u) = T⁻¹X'b`, homogeneous of degree two in `u`.
pub fn cubic_gamma(u: &Vec3, ps: &PointSet, moments: &Moments) -> Result<Vec3> {
    moments.gamma(ps, u)
}

/// The cubic `C(u) = u'γ(u) = Σ (p_i'u)(u'B_i u)` with `p_i = T⁻¹x_i`.
fn cubic(u: &Vec3, p: &[Vec3], b: &[Mat3]) -> f64 {
    p.iter()
        .zip(b)
        .map(|(pi, bi)| pi.dot(u) * u.dot(&(bi * u)))
        .sum()
}

fn cubic_gradient(u: &Vec3, p: &[Vec3], b: &[Mat3]) -> Vec3 {
    p.iter().zip(b).fold(Vec3::zeros(), |acc, (pi, bi)| {
        let bu = bi * u;
        acc + pi * u.dot(&bu) + bu * (2.0 * pi.dot(u))
    })
}

/// Coefficients of `C(u₀ + u₁w + u₂w²)` in `w` for a quadratic vector curve.
fn cubic_along(curve: &[Vec3], p: &[Vec3], b: &[Mat3]) -> Vec<f64> {
    let mut total = vec![0.0];
    for (pi, bi) in p.iter().zip(b) {
        let lin: Vec<f64> = curve.iter().map(|c| pi.dot(c)).collect();
        let mut quad = vec![0.0; 2 * curve.len() - 1];
        for (j, cj) in curve.iter().enumerate() {
            let bc = bi * cj;
            for (k, ck) in curve.iter().enumerate() {
                quad[j + k] += ck.dot(&bc);
            }
        }
        total = poly_add(&total, &poly_mul(&lin, &quad));
    }
    total
}

/// Squared-component intervals for unit solutions of `y'Λy = 0`, in the
/// eigenbasis of M. Intervals are `[lo, hi]` for `y₁², y₂², y₃²`.
pub fn component_bounds(spectrum: &Spectrum3) -> Result<[(f64, f64); 3]> {
    let [m1, m2, m3] = spectrum.eigenvalues;
    let sep = ZERO_EIGEN * spectrum.norm();
    if m1 - m2 <= sep || m2 - m3 <= sep {
        return Err(CylError::EigenTies);
    }
    Ok(if m2 >= 0.0 {
        [
            (0.0, 1.0 - m1 / (m1 - m3)),
            (0.0, 1.0 - m2 / (m2 - m3)),
            (m2 / (m2 - m3), 1.0 + m3 / (m1 - m3)),
        ]
    } else {
        [
            (-m2 / (m1 - m2), 1.0 - m1 / (m1 - m3)),
            (0.0, 1.0 + m2 / (m1 - m2)),
            (0.0, 1.0 + m3 / (m1 - m3)),
        ]
    })
}

/// Directions in the plane spanned by `ea`, `eb` where the cubic vanishes.
fn plane_candidates(ea: Vec3, eb: Vec3, p: &[Vec3], b: &[Mat3], out: &mut Vec<Vec3>) {
    // u = ea·r + eb; the endpoints ea (r → ∞) and eb are always tried,
    // validation discards them when they are not solutions
    let coeffs = cubic_along(&[eb, ea], p, b);
    if let Ok(roots) = real_roots(&coeffs) {
        out.extend(roots.roots.iter().map(|r| ea * *r + eb));
    }
    out.push(ea);
    out.push(eb);
}

/// Newton on `(u'Mu, C(u), (u'u − 1)/2)`; a step is kept only if it lowers
/// the residual.
fn polish(u: Vec3, m: &Mat3, p: &[Vec3], b: &[Mat3]) -> Vec3 {
    let resid = |u: &Vec3| {
        Vec3::new(
            u.dot(&(m * u)),
            cubic(u, p, b),
            0.5 * (u.norm_squared() - 1.0),
        )
    };
    let mut u = u.normalize();
    let mut r = resid(&u);
    for _ in 0..6 {
        let j = Matrix3::from_rows(&[
            (m * u * 2.0).transpose(),
            cubic_gradient(&u, p, b).transpose(),
            u.transpose(),
        ]);
        let Some(step) = j.lu().solve(&r) else {
            break;
        };
        let cand = (u - step).normalize();
        let rc = resid(&cand);
        if rc.norm() >= r.norm() {
            break;
        }
        u = cand;
        r = rc;
    }
    u
}

/// Every cylinder through five points in general position (at most six).
pub fn circumscribed_5(ps: &PointSet) -> Result<CircumscribedSet> {
    check_five(ps)?;
    let scale = ps.tol_scale();
    for i in 0..5 {
        for j in i + 1..5 {
            if (ps.points[i] - ps.points[j]).norm() <= 1e-9 * scale {
                return Err(CylError::DuplicatePoints {
                    first: i,
                    second: j,
                });
            }
        }
    }
    let moments = compute_moments(ps);
    let t = compute_t(ps)?;
    let m = compute_m(ps, &t);
    let spectrum = eig_sym3(&m);
    let verdict = existence_verdict(&spectrum, moments.t.trace());
    let mut reduction = FivePointReduction {
        t,
        m,
        spectrum,
        alpha2: None,
        poly: Vec::new(),
    };
    if verdict != Verdict::Solutions {
        return Ok(CircumscribedSet {
            cylinders: Vec::new(),
            verdict,
            reduction,
        });
    }
    let p = moments.projectors(ps)?;
    let b = &moments.b;
    let [mu1, mu2, mu3] = spectrum.eigenvalues;
    let zero = ZERO_EIGEN * spectrum.norm();
    let (q1, q2, q3) = (spectrum.vector(0), spectrum.vector(1), spectrum.vector(2));
    let mu2_zero = mu2.abs() <= zero;

    let mut candidates: Vec<Vec3> = Vec::new();
    if mu1 > zero && mu3 < -zero {
        // Rotate about q2 so the cone becomes (μ₁+μ₃)z₁² + μ₂z₂² − 2s·z₁z₃ = 0.
        let s = (-mu1 * mu3).sqrt();
        let alpha = (-mu3 / mu1).sqrt().atan();
        let (sa, ca) = alpha.sin_cos();
        let p1 = q1 * ca + q3 * sa;
        let p3 = -q1 * sa + q3 * ca;
        let (a, bb) = (mu2 / (2.0 * s), (mu1 + mu3) / (2.0 * s));
        // z = (1, w, a·w² + bb) so that z₃/z₁ is read off the parabola
        let curve = [p1 + p3 * bb, q2, p3 * a];
        let poly = cubic_along(&curve, &p, b);
        if let Ok(roots) = real_roots(&poly) {
            candidates.extend(
                roots
                    .roots
                    .iter()
                    .map(|w| curve[0] + curve[1] * *w + curve[2] * (w * w)),
            );
        }
        reduction.alpha2 = Some(alpha);
        reduction.poly = poly;
        // z₁ = 0
        if mu2_zero {
            plane_candidates(q2, p3, &p, b, &mut candidates);
        } else {
            candidates.push(p3);
        }
    } else if mu3.abs() <= zero {
        // μ₁ > 0 = μ₃
        if mu2_zero {
            plane_candidates(q2, q3, &p, b, &mut candidates);
        } else {
            candidates.push(q3);
        }
    } else {
        // μ₁ = 0 > μ₃
        if mu2_zero {
            plane_candidates(q1, q2, &p, b, &mut candidates);
        } else {
            candidates.push(q1);
        }
    }

    let bounds = component_bounds(&spectrum).ok();
    let mut cylinders: Vec<Cylinder> = Vec::new();
    for cand in candidates {
        if !cand.iter().all(|v| v.is_finite()) || cand.norm() == 0.0 {
            continue;
        }
        let u = polish(cand, &m, &p, b);
        let Some(cyl) = validated(u, ps, &moments, scale) else {
            continue;
        };
        if let Some(bounds) = bounds {
            let y = spectrum.eigenvectors.transpose() * cyl.u;
            let inside = (0..3).all(|k| {
                let y2 = y[k] * y[k];
                y2 >= bounds[k].0 - 1e-9 && y2 <= bounds[k].1 + 1e-9
            });
            if !inside {
                continue;
            }
        }
        let dup = cylinders
            .iter()
            .any(|c| axis_angle(&c.u, &cyl.u) <= 1e-6 && (c.rho - cyl.rho).abs() <= 1e-8 * scale);
        if !dup {
            cylinders.push(cyl);
        }
    }
    cylinders.sort_by(|a, b| a.rho.total_cmp(&b.rho));
    Ok(CircumscribedSet {
        cylinders,
        verdict,
        reduction,
    })
}

/// The cylinder with direction `u` through all points, if every squared
/// axis distance agrees with their mean to `1e-9·scale²`.
fn validated(u: Vec3, ps: &PointSet, moments: &Moments, scale: f64) -> Option<Cylinder> {
    let gamma = moments.gamma(ps, &u).ok()?;
    let axis = Cylinder::new(u, gamma / 2.0, 0.0);
    let mean = residual_profile(ps, &axis).mean;
    let ok = ps
        .points
        .iter()
        .all(|x| (axis.sq_distance(x) - mean).abs() <= 1e-9 * scale * scale);
    ok.then(|| Cylinder::new(u, gamma / 2.0, mean.sqrt()))
}
