//! Best fitting cylinder: the axis minimizing the variance of the squared
//! point-to-axis distances, the radius being the root of their mean.
//!
//! With the points centered and `c'u = 0`, the variance reads
//! `(1/n) Σ (u'B_i u − 2c'x_i)²`. For a fixed direction `u` the optimal axis
//! point solves a linear system, so the search runs over `u` alone.

use nalgebra::{Matrix2, Matrix4, Vector2, Vector4};

use crate::error::{CylError, Result};
use crate::four_point;
use crate::geometry::{
    axis_angle, compute_moments, residual_profile, Cylinder, Mat3, Moments, PointSet, SolverConfig,
    Vec3,
};
use crate::numerics::{any_orthogonal, random_unit_vector};

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub cylinder: Cylinder,
    /// Minimized variance of the squared axis distances.
    pub variance: f64,
    pub n_starts_converged: usize,
    /// Number of distinct local minima seen across the starts.
    pub distinct_minima: usize,
    pub is_circumscribed: bool,
    /// Four points: every direction on a curve fits exactly, so the
    /// minimal-radius circumscribed cylinder is returned.
    pub underdetermined: bool,
}

fn v_inverse(moments: &Moments, n: usize) -> Result<Mat3> {
    moments
        .t_inv
        .map(|t_inv| t_inv * n as f64)
        .ok_or(CylError::SingularCovariance)
}

fn weighted_sum(ps: &PointSet, moments: &Moments, u: &Vec3) -> Vec3 {
    let n = ps.n() as f64;
    ps.points
        .iter()
        .zip(&moments.b)
        .fold(Vec3::zeros(), |acc, (x, bi)| acc + x * u.dot(&(bi * u)))
        * (4.0 / n)
}

/// Axis point minimizing the variance for a fixed direction `u`.
///
/// Stationarity in `c` gives `8Vc = Ku + (4/n) Σ x_i u'B_i u`. Left-multiplying
/// the solved form by `u'` and imposing `u'c = 0` yields
/// `K = −u'V⁻¹q / u'V⁻¹u` with `q = (4/n) Σ x_i u'B_i u`.
pub fn optimal_center(u: &Vec3, moments: &Moments, ps: &PointSet) -> Result<Vec3> {
    let v_inv = v_inverse(moments, ps.n())?;
    let q = weighted_sum(ps, moments, u);
    let pu = v_inv * u;
    let k = -u.dot(&(v_inv * q)) / u.dot(&pu);
    let c = (v_inv * (u * k + q)) / 8.0;
    // remove the rounding-level component along u
    Ok(c - u * (u.dot(&c) / u.norm_squared()))
}

/// The variance objective with the axis point eliminated.
pub fn fit_objective(u: &Vec3, moments: &Moments, ps: &PointSet) -> Result<f64> {
    let c = optimal_center(u, moments, ps)?;
    let n = ps.n() as f64;
    Ok(ps
        .points
        .iter()
        .zip(&moments.b)
        .map(|(x, bi)| {
            let e = u.dot(&(bi * u)) - 2.0 * c.dot(x);
            e * e
        })
        .sum::<f64>()
        / n)
}

/// Value, gradient and Hessian of [`fit_objective`] as a function on R³.
#[derive(Debug, Clone, Copy)]
pub struct FitDerivatives {
    pub value: f64,
    pub gradient: Vec3,
    pub hessian: Mat3,
}

/// Analytic derivatives, obtained by differentiating the bordered system
/// `[8V −u; −u' 0] (c, K) = (q, 0)` that defines the optimal center.
pub fn fit_derivatives(u: &Vec3, moments: &Moments, ps: &PointSet) -> Result<FitDerivatives> {
    if moments.t_inv.is_none() {
        return Err(CylError::SingularCovariance);
    }
    let n = ps.n() as f64;
    let mut a = Matrix4::zeros();
    a.fixed_view_mut::<3, 3>(0, 0).copy_from(&(moments.v * 8.0));
    for k in 0..3 {
        a[(k, 3)] = -u[k];
        a[(3, k)] = -u[k];
    }
    let lu = a.lu();
    let q = weighted_sum(ps, moments, u);
    let z = lu
        .solve(&Vector4::new(q.x, q.y, q.z, 0.0))
        .ok_or(CylError::SingularCovariance)?;
    let c = Vec3::new(z[0], z[1], z[2]);
    let kk = z[3];

    let bu: Vec<Vec3> = moments.b.iter().map(|bi| bi * u).collect();
    // dq/du_j = (8/n) Σ x_i (B_i u)_j
    let dq = ps
        .points
        .iter()
        .zip(&bu)
        .fold(Mat3::zeros(), |acc, (x, b)| acc + x * b.transpose())
        * (8.0 / n);

    let mut dz = [Vector4::zeros(); 3];
    for j in 0..3 {
        let mut rhs = Vector4::new(dq[(0, j)], dq[(1, j)], dq[(2, j)], c[j]);
        rhs[j] += kk;
        dz[j] = lu.solve(&rhs).ok_or(CylError::SingularCovariance)?;
    }
    // (∂A_j w) = (−w_K e_j, −w_c[j])
    let da = |j: usize, w: &Vector4<f64>| {
        let mut out = Vector4::zeros();
        out[j] = -w[3];
        out[3] = -w[j];
        out
    };
    let mut d2c = [[Vec3::zeros(); 3]; 3];
    for j in 0..3 {
        for k in j..3 {
            let d2q = ps
                .points
                .iter()
                .zip(&moments.b)
                .fold(Vec3::zeros(), |acc, (x, bi)| acc + x * bi[(j, k)])
                * (8.0 / n);
            let rhs = Vector4::new(d2q.x, d2q.y, d2q.z, 0.0) - da(j, &dz[k]) - da(k, &dz[j]);
            let sol = lu.solve(&rhs).ok_or(CylError::SingularCovariance)?;
            d2c[j][k] = Vec3::new(sol[0], sol[1], sol[2]);
            d2c[k][j] = d2c[j][k];
        }
    }
    let dc: [Vec3; 3] = [0, 1, 2].map(|j| Vec3::new(dz[j][0], dz[j][1], dz[j][2]));

    let mut value = 0.0;
    let mut gradient = Vec3::zeros();
    let mut hessian = Mat3::zeros();
    for ((x, bi), b) in ps.points.iter().zip(&moments.b).zip(&bu) {
        let e = u.dot(b) - 2.0 * c.dot(x);
        let de = Vec3::from_fn(|j, _| 2.0 * b[j] - 2.0 * x.dot(&dc[j]));
        value += e * e;
        gradient += de * e;
        for j in 0..3 {
            for k in 0..3 {
                let d2e = 2.0 * bi[(j, k)] - 2.0 * x.dot(&d2c[j][k]);
                hessian[(j, k)] += de[j] * de[k] + e * d2e;
            }
        }
    }
    Ok(FitDerivatives {
        value: value / n,
        gradient: gradient * (2.0 / n),
        hessian: hessian * (2.0 / n),
    })
}

struct LocalFit {
    u: Vec3,
    value: f64,
}

/// Damped Newton on the unit sphere from `u0`. Falls back to a scaled
/// gradient step where the tangent Hessian is not positive definite.
fn local_fit(
    u0: Vec3,
    moments: &Moments,
    ps: &PointSet,
    cfg: &SolverConfig,
    damping: f64,
) -> Option<LocalFit> {
    let s2 = moments.t.trace() / ps.n() as f64;
    let floor = (1e-15 * s2).powi(2);
    let mut u = u0.normalize();
    let mut d = fit_derivatives(&u, moments, ps).ok()?;
    for _ in 0..cfg.max_iter {
        if d.value <= floor {
            return Some(LocalFit { u, value: d.value });
        }
        let e1 = any_orthogonal(&u);
        let e2 = u.cross(&e1);
        let radial = u.dot(&d.gradient);
        let g2 = Vector2::new(e1.dot(&d.gradient), e2.dot(&d.gradient));
        let h = d.hessian - Mat3::identity() * radial;
        let h2 = Matrix2::new(
            e1.dot(&(h * e1)),
            e1.dot(&(h * e2)),
            e2.dot(&(h * e1)),
            e2.dot(&(h * e2)),
        );
        let pd = h2[(0, 0)] > 0.0 && h2.determinant() > 0.0;
        let step2 = match (pd, h2.try_inverse()) {
            (true, Some(inv)) => -(inv * g2),
            _ => {
                let curv = h2.abs().max().max(s2 * s2 * 1e-6);
                -g2 / curv
            }
        };
        let dir = e1 * step2.x + e2 * step2.y;
        let slope = d.gradient.dot(&dir);
        let mut alpha = damping;
        let mut accepted = None;
        for _ in 0..40 {
            let cand = (u + dir * alpha).normalize();
            if let Ok(dc) = fit_derivatives(&cand, moments, ps) {
                if dc.value <= d.value + 1e-4 * alpha * slope.min(0.0) {
                    accepted = Some((cand, dc));
                    break;
                }
            }
            alpha *= 0.5;
        }
        let Some((cand, dc)) = accepted else {
            // no decrease possible from here: a minimum to rounding
            return (dir.norm() < 1e-6).then_some(LocalFit { u, value: d.value });
        };
        let change = (dc.value - d.value).abs();
        let step = (cand - u).norm();
        u = cand;
        d = dc;
        if change <= cfg.tol_rel * (dc.value + d.value) || step <= 1e-14 {
            return Some(LocalFit { u, value: d.value });
        }
    }
    None
}

/// Two fitted cylinders are the same local minimum when their axes and radii agree.
pub fn same_minimum(a: &Cylinder, b: &Cylinder, scale: f64) -> bool {
    (a.rho - b.rho).abs() <= 1e-8 * scale && axis_angle(&a.u, &b.u) <= 1e-6
}

fn finish(ps: &PointSet, moments: &Moments, u: Vec3) -> Result<Cylinder> {
    let c = optimal_center(&u, moments, ps)?;
    let provisional = Cylinder::new(u, c, 0.0);
    let mean = residual_profile(ps, &provisional).mean;
    Ok(Cylinder::new(u, c, mean.sqrt()))
}

/// Multi-start search for the best fitting cylinder.
pub fn fit_cylinder(ps: &PointSet, cfg: &SolverConfig) -> Result<FitResult> {
    cfg.validate()?;
    if !ps.full_rank {
        return Err(CylError::RankDeficient { rank: ps.rank });
    }
    let moments = compute_moments(ps);
    let s2 = moments.t.trace() / ps.n() as f64;
    let circ_tol = 1e-16 * s2 * s2;

    if ps.n() == 4 {
        let set = four_point::min_circumscribed_4(ps, cfg)?;
        let best = set.global_min().ok_or(CylError::NoConvergence {
            attempts: set.attempts,
        })?;
        let variance = residual_profile(ps, &best.cylinder).stdev.powi(2);
        return Ok(FitResult {
            cylinder: best.cylinder,
            variance,
            n_starts_converged: set.converged,
            distinct_minima: set.minima.len(),
            is_circumscribed: variance <= circ_tol,
            underdetermined: true,
        });
    }

    let scale = ps.tol_scale();
    let mut damping = cfg.step_damping;
    for _retry in 0..4 {
        let mut found: Vec<(Cylinder, f64)> = Vec::new();
        let mut converged = 0;
        for i in 0..cfg.n_starts {
            let mut rng = cfg.start_rng(i);
            let u0 = random_unit_vector(&mut rng);
            let Some(fit) = local_fit(u0, &moments, ps, cfg, damping) else {
                continue;
            };
            converged += 1;
            let cyl = finish(ps, &moments, fit.u)?;
            if !found.iter().any(|(c, _)| same_minimum(c, &cyl, scale)) {
                found.push((cyl, fit.value));
            }
        }
        if converged == 0 {
            damping *= 0.25;
            continue;
        }
        // lowest variance; near-equal variances resolved by the smaller radius
        let tie = 1e-9;
        let (best, variance) = found
            .iter()
            .copied()
            .min_by(|(ca, va), (cb, vb)| {
                if (va - vb).abs() <= tie * va.max(*vb) + circ_tol {
                    ca.rho.partial_cmp(&cb.rho).unwrap()
                } else {
                    va.partial_cmp(vb).unwrap()
                }
            })
            .expect("at least one start converged");
        return Ok(FitResult {
            cylinder: best,
            variance,
            n_starts_converged: converged,
            distinct_minima: found.len(),
            is_circumscribed: variance <= circ_tol,
            underdetermined: false,
        });
    }
    Err(CylError::NoConvergence {
        attempts: 4 * cfg.n_starts,
    })
}
