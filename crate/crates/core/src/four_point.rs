//! Cylinders circumscribed to four points in general position.
//!
//! For a unit direction `u` the four circumscription equations are linear in
//! the axis point, solved by `γ = 2c = T⁻¹X'b`. What remains is the quartic
//! `F(u) = u'u·u'Wu + γ'γ` (four times the squared radius on the unit sphere),
//! minimized subject to `γ'u = 0`.

use nalgebra::{Matrix2, Vector2};
use rand::Rng;

use crate::error::{CylError, Result};
use crate::geometry::{
    axis_angle, compute_moments, residual_profile, Cylinder, Mat3, Moments, PointSet, SolverConfig,
    Vec3,
};
use crate::numerics::{any_orthogonal, random_unit_vector};

/// Upper bound on the number of local minima for four points.
pub const MAX_LOCAL_MINIMA: usize = 9;

const MAX_HALVINGS: usize = 20;

fn check_four(ps: &PointSet) -> Result<()> {
    if ps.n() != 4 {
        return Err(CylError::WrongPointCount {
            expected: 4,
            got: ps.n(),
        });
    }
    if !ps.full_rank {
        return Err(CylError::RankDeficient { rank: ps.rank });
    }
    Ok(())
}

/// `γ = T⁻¹X'b`, twice the axis point of the cylinder with direction `u`.
pub fn gamma_from_u(u: &Vec3, ps: &PointSet, moments: &Moments) -> Result<Vec3> {
    check_four(ps)?;
    moments.gamma(ps, u)
}

/// Homogeneous quartic `u'u·u'Wu + γ'γ`.
pub fn quartic_objective(u: &Vec3, ps: &PointSet, moments: &Moments) -> Result<f64> {
    let gamma = moments.gamma(ps, u)?;
    Ok(u.norm_squared() * u.dot(&(moments.w * u)) + gamma.norm_squared())
}

/// Squared radius of the cylinder with unit direction `u`, as
/// `Tr(V) − u'Vu + c'c` with `c = γ/2`.
pub fn radius_sq(u: &Vec3, gamma: &Vec3, moments: &Moments, n: usize) -> f64 {
    u.dot(&(moments.w * u)) / (n as f64 * u.norm_squared()) + gamma.norm_squared() / 4.0
}

/// Quartic, the constraint `G = γ'u`, and their first and second derivatives.
#[derive(Debug, Clone, Copy)]
pub struct QuarticState {
    pub u: Vec3,
    pub gamma: Vec3,
    pub f: f64,
    pub grad: Vec3,
    pub hess: Mat3,
    pub g: f64,
    pub g_grad: Vec3,
    pub g_hess: Mat3,
}

impl QuarticState {
    pub fn new(u: &Vec3, ps: &PointSet, moments: &Moments) -> Result<QuarticState> {
        let p = moments.projectors(ps)?;
        let gamma = moments.gamma(ps, u)?;
        let wu = moments.w * u;
        let uwu = u.dot(&wu);
        let uu = u.norm_squared();
        // J = ∂γ/∂u = Σ p_i (2 B_i u)'
        let mut j = Mat3::zeros();
        let mut sum_gamma = Mat3::zeros();
        let mut sum_u = Mat3::zeros();
        for (pi, bi) in p.iter().zip(&moments.b) {
            j += pi * (bi * u).transpose() * 2.0;
            sum_gamma += bi * pi.dot(&gamma);
            sum_u += bi * pi.dot(u);
        }
        let f = uu * uwu + gamma.norm_squared();
        let grad = u * (2.0 * uwu) + wu * (2.0 * uu) + j.transpose() * gamma * 2.0;
        let hess = Mat3::identity() * (2.0 * uwu)
            + (u * wu.transpose() + wu * u.transpose()) * 4.0
            + moments.w * (2.0 * uu)
            + j.transpose() * j * 2.0
            + sum_gamma * 4.0;
        let g = gamma.dot(u);
        let g_grad = gamma + j.transpose() * u;
        let g_hess = j + j.transpose() + sum_u * 2.0;
        Ok(QuarticState {
            u: *u,
            gamma,
            f,
            grad,
            hess,
            g,
            g_grad,
            g_hess,
        })
    }

    /// Multipliers `(K, L)` minimizing `‖∇F − 2K∇G − 2Lu‖`.
    pub fn multipliers(&self) -> (f64, f64) {
        let a = self.g_grad;
        let u = self.u;
        let m = Matrix2::new(a.dot(&a), a.dot(&u), a.dot(&u), u.dot(&u));
        let rhs = Vector2::new(a.dot(&self.grad), u.dot(&self.grad));
        // ∇G vanishing or parallel to u leaves K undetermined
        let perp = (a - u * (a.dot(&u) / u.dot(&u))).norm();
        if perp <= 1e-10 * (self.grad.norm() / u.norm()).max(1e-300) {
            return (0.0, rhs.y / (2.0 * m[(1, 1)]));
        }
        match m.try_inverse() {
            Some(inv) => {
                let kl = inv * rhs / 2.0;
                (kl.x, kl.y)
            }
            None => (0.0, rhs.y / (2.0 * m[(1, 1)])),
        }
    }

    /// Gradient of the Lagrangian at the least-squares multipliers.
    pub fn lagrangian_gradient(&self) -> Vec3 {
        let (k, l) = self.multipliers();
        self.grad - self.g_grad * (2.0 * k) - self.u * (2.0 * l)
    }

    /// First-order optimality measure: relative Lagrangian gradient plus
    /// relative constraint violation.
    pub fn kkt_residual(&self) -> f64 {
        let f = self.f.max(1e-300);
        self.lagrangian_gradient().norm_squared() / (f * f) + self.g * self.g / f
    }

    /// `|cos(u, c)|`, taken as zero when the constraint holds exactly.
    pub fn cos_uc(&self) -> f64 {
        if self.g == 0.0 {
            return 0.0;
        }
        self.g.abs() / (self.u.norm() * self.gamma.norm())
    }
}

/// One iteration: a Newton step on the Lagrangian, taken in the tangent space
/// of the constraints, then the minimal change of that step meeting the
/// linearized constraint `∇G's = −G` and keeping `g's ≤ g's_k`. The result is
/// renormalized.
pub fn newton_restore_step(state: &QuarticState, alpha: f64) -> Vec3 {
    let (k, l) = state.multipliers();
    let u = state.u / state.u.norm();
    let g = state.grad - state.g_grad * (2.0 * k) - state.u * (2.0 * l);
    let h = state.hess - state.g_hess * (2.0 * k) - Mat3::identity() * (2.0 * l);
    let hscale = h.abs().max().max(1e-300);

    let a = state.g_grad;
    let a_perp = a - u * a.dot(&u);
    let s_k = if a_perp.norm() > 1e-10 * state.grad.norm() {
        let t = u.cross(&a_perp).normalize();
        let gt = t.dot(&g);
        let htt = t.dot(&(h * t));
        let step = if htt.abs() > 1e-12 * hscale {
            -gt / htt
        } else {
            -gt / hscale
        };
        t * (alpha * step)
    } else {
        // the constraint gradient vanishes: Newton on the sphere
        let e1 = any_orthogonal(&u);
        let e2 = u.cross(&e1);
        let h2 = Matrix2::new(
            e1.dot(&(h * e1)),
            e1.dot(&(h * e2)),
            e2.dot(&(h * e1)),
            e2.dot(&(h * e2)),
        );
        let g2 = Vector2::new(e1.dot(&g), e2.dot(&g));
        let d = h2
            .try_inverse()
            .filter(|inv| inv.abs().max() * hscale < 1e12)
            .map(|inv| -(inv * g2))
            .unwrap_or(-g2 / hscale);
        (e1 * d.x + e2 * d.y) * alpha
    };
    let eta = g.dot(&s_k);

    let a2 = a.norm_squared();
    let s = if a2 <= (1e-12 * state.grad.norm()).powi(2) {
        s_k
    } else {
        let s1 = s_k - a * ((a.dot(&s_k) + state.g) / a2);
        if g.dot(&s1) <= eta + 1e-15 * g.norm() * s1.norm() {
            s1
        } else {
            // both constraints active: minimize ‖s − s_k‖ with a's = −G, g's = η
            let m = Matrix2::new(a2, a.dot(&g), a.dot(&g), g.norm_squared());
            let r = Vector2::new(a.dot(&s_k) + state.g, g.dot(&s_k) - eta);
            match m.try_inverse() {
                Some(inv) => {
                    let lam = inv * r;
                    s_k - a * lam.x - g * lam.y
                }
                None => s1,
            }
        }
    };
    let next = state.u + s;
    next / next.norm()
}

/// A converged stationary point of the constrained quartic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationaryCylinder {
    pub cylinder: Cylinder,
    /// Squared radius.
    pub objective: f64,
    pub local_min: bool,
    pub global_min: bool,
    /// Starts that converged to this cylinder.
    pub hits: usize,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalMinSet {
    /// Distinct stationary cylinders, ascending by radius.
    pub minima: Vec<StationaryCylinder>,
    pub attempts: usize,
    pub converged: usize,
    pub warnings: Vec<String>,
}

impl LocalMinSet {
    pub fn global_min(&self) -> Option<&StationaryCylinder> {
        self.minima.iter().find(|m| m.global_min)
    }

    pub fn local_minima(&self) -> impl Iterator<Item = &StationaryCylinder> {
        self.minima.iter().filter(|m| m.local_min)
    }

    /// Distinct radii of the local minima, ascending.
    pub fn local_min_radii(&self, scale: f64) -> Vec<f64> {
        let mut radii: Vec<f64> = Vec::new();
        for m in self.local_minima() {
            if !radii
                .iter()
                .any(|r| (r - m.cylinder.rho).abs() <= 1e-8 * scale)
            {
                radii.push(m.cylinder.rho);
            }
        }
        radii.sort_by(f64::total_cmp);
        radii
    }
}

struct Run {
    u: Vec3,
    iterations: usize,
    trace: Vec<f64>,
}

fn run_start(
    u0: Vec3,
    ps: &PointSet,
    moments: &Moments,
    cfg: &SolverConfig,
    damping: f64,
) -> Option<Run> {
    let mut state = QuarticState::new(&project_feasible(u0, ps, moments), ps, moments).ok()?;
    let mut psi = state.kkt_residual();
    let mut trace = vec![state.f];
    // Newton on the first-order conditions until it stalls, then steps
    // that must lower the radius, which can only end at a local minimum.
    let mut descending = false;
    for it in 1..=cfg.max_iter {
        let mut alpha = damping;
        let mut next = None;
        for _ in 0..=MAX_HALVINGS {
            let u = project_feasible(newton_restore_step(&state, alpha), ps, moments);
            if let Ok(cand) = QuarticState::new(&u, ps, moments) {
                let cand_psi = cand.kkt_residual();
                let accept = if descending {
                    cand.f < state.f && cand.cos_uc() <= 1e-8
                } else {
                    cand_psi < psi
                };
                if accept || cand_psi <= 1e-30 {
                    next = Some(cand);
                    break;
                }
            }
            alpha *= 0.5;
        }
        let cand = match next {
            Some(found) => found,
            None => {
                descending = true;
                curve_descent(&state, ps, moments)?
            }
        };
        let change = (cand.f - state.f).abs() / (cand.f + state.f);
        state = cand;
        psi = state.kkt_residual();
        trace.push(state.f);
        let stationary = state.lagrangian_gradient().norm() <= 1e-8 * state.f;
        if state.cos_uc() <= cfg.tol_orth && change <= cfg.tol_rel && stationary {
            // a few full steps more: convergence is quadratic here
            for _ in 0..3 {
                let Ok(cand) = QuarticState::new(&newton_restore_step(&state, 1.0), ps, moments)
                else {
                    break;
                };
                if cand.kkt_residual() >= psi || cand.cos_uc() > cfg.tol_orth {
                    break;
                }
                psi = cand.kkt_residual();
                state = cand;
            }
            return Some(Run {
                u: state.u,
                iterations: it,
                trace,
            });
        }
    }
    None
}

/// Fallback when no damped Newton step reduces the residual: an Armijo step
/// decreasing the radius along the tangent of the constraint curve.
fn curve_descent(state: &QuarticState, ps: &PointSet, moments: &Moments) -> Option<QuarticState> {
    let u = state.u / state.u.norm();
    let tangent = u.cross(&state.g_grad);
    if tangent.norm_squared() == 0.0 {
        return None;
    }
    let tangent = tangent.normalize();
    let slope = state.grad.dot(&tangent);
    if slope == 0.0 {
        return None;
    }
    let dir = -tangent * slope.signum();
    let f0 = state.f / state.u.norm_squared().powi(2);
    let mut beta = 0.25;
    for _ in 0..40 {
        let v = project_feasible(u + dir * beta, ps, moments);
        if let Ok(cand) = QuarticState::new(&v, ps, moments) {
            if cand.cos_uc() <= 1e-8 && cand.f < f0 - 1e-4 * beta * slope.abs() {
                return Some(cand);
            }
        }
        beta *= 0.5;
    }
    None
}

/// A few projected Newton iterations on `G = 0`, each step capped in length.
/// Best effort: returns the last iterate.
fn project_feasible(u: Vec3, ps: &PointSet, moments: &Moments) -> Vec3 {
    let mut u = u.normalize();
    for _ in 0..8 {
        let Ok(st) = QuarticState::new(&u, ps, moments) else {
            break;
        };
        let a = st.g_grad - u * st.g_grad.dot(&u);
        if st.g == 0.0 || a.norm_squared() == 0.0 {
            break;
        }
        let mut step = a * (st.g / a.norm_squared());
        if step.norm() > 0.3 {
            step *= 0.3 / step.norm();
        }
        u = (u - step).normalize();
        if st.cos_uc() <= 1e-14 {
            break;
        }
    }
    u
}

/// Moves `u` onto the constraint surface along `∇G`.
fn restore_feasibility(u: Vec3, ps: &PointSet, moments: &Moments) -> Option<Vec3> {
    let mut u = u.normalize();
    for _ in 0..50 {
        let st = QuarticState::new(&u, ps, moments).ok()?;
        if st.cos_uc() <= 1e-13 {
            return Some(u);
        }
        let a = st.g_grad - u * st.g_grad.dot(&u);
        if a.norm_squared() == 0.0 {
            return None;
        }
        u = (u - a * (st.g / a.norm_squared())).normalize();
    }
    None
}

/// Objective does not drop along feasible perturbations of size 1e-4 in
/// two random tangent directions.
fn is_local_min<R: Rng>(
    u: &Vec3,
    rho_sq: f64,
    ps: &PointSet,
    moments: &Moments,
    rng: &mut R,
) -> bool {
    for _ in 0..2 {
        let r = random_unit_vector(rng);
        let d = (r - u * r.dot(u)).normalize();
        for sign in [1.0, -1.0] {
            let Some(v) = restore_feasibility(u + d * (1e-4 * sign), ps, moments) else {
                return false;
            };
            let Ok(gamma) = moments.gamma(ps, &v) else {
                return false;
            };
            if radius_sq(&v, &gamma, moments, ps.n()) < rho_sq * (1.0 - 1e-13) {
                return false;
            }
        }
    }
    true
}

fn same_cylinder(a: &Cylinder, b: &Cylinder, scale: f64) -> bool {
    (a.rho - b.rho).abs() <= 1e-8 * scale && axis_angle(&a.u, &b.u) <= 1e-6
}

/// Multi-start search for the cylinders of locally minimal (and otherwise
/// stationary) radius circumscribed to four points.
pub fn min_circumscribed_4(ps: &PointSet, cfg: &SolverConfig) -> Result<LocalMinSet> {
    cfg.validate()?;
    check_four(ps)?;
    let moments = compute_moments(ps);
    let scale = ps.tol_scale();
    let mut damping = cfg.step_damping;
    let mut attempts = 0;
    for _retry in 0..4 {
        let mut found: Vec<StationaryCylinder> = Vec::new();
        let mut converged = 0;
        for i in 0..cfg.n_starts {
            attempts += 1;
            let mut rng = cfg.start_rng(i);
            let u0 = random_unit_vector(&mut rng);
            let Some(run) = run_start(u0, ps, &moments, cfg, damping) else {
                continue;
            };
            let gamma = moments.gamma(ps, &run.u)?;
            let cyl = Cylinder::new(run.u, gamma / 2.0, 0.0);
            let profile = residual_profile(ps, &cyl);
            let spread = ps
                .points
                .iter()
                .map(|x| (cyl.sq_distance(x) - profile.mean).abs())
                .fold(0.0, f64::max);
            if spread > 1e-9 * scale * scale {
                continue;
            }
            converged += 1;
            let cyl = Cylinder::new(run.u, gamma / 2.0, profile.mean.sqrt());
            if let Some(existing) = found
                .iter_mut()
                .find(|m| same_cylinder(&m.cylinder, &cyl, scale))
            {
                existing.hits += 1;
                continue;
            }
            let local_min = is_local_min(&run.u, profile.mean, ps, &moments, &mut rng);
            found.push(StationaryCylinder {
                cylinder: cyl,
                objective: profile.mean,
                local_min,
                global_min: false,
                hits: 1,
                iterations: run.iterations,
            });
        }
        if converged == 0 {
            damping *= 0.1;
            continue;
        }
        found.sort_by(|a, b| a.objective.total_cmp(&b.objective));
        found[0].global_min = true;
        // ties with the smallest radius are global minima as well
        let best = found[0].cylinder.rho;
        for m in found.iter_mut().skip(1) {
            if (m.cylinder.rho - best).abs() <= 1e-8 * scale {
                m.global_min = true;
            }
        }
        let mut warnings = Vec::new();
        let n_min = found.iter().filter(|m| m.local_min).count();
        if n_min > MAX_LOCAL_MINIMA {
            warnings.push(format!(
                "{n_min} distinct local minima exceed the bound of {MAX_LOCAL_MINIMA}"
            ));
        }
        return Ok(LocalMinSet {
            minima: found,
            attempts,
            converged,
            warnings,
        });
    }
    Err(CylError::NoConvergence { attempts })
}

#[doc(hidden)]
pub fn objective_trace(
    u0: Vec3,
    ps: &PointSet,
    cfg: &SolverConfig,
) -> Option<(Vec3, usize, Vec<f64>)> {
    let moments = compute_moments(ps);
    run_start(u0, ps, &moments, cfg, cfg.step_damping).map(|r| (r.u, r.iterations, r.trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::center_points;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tetra() -> PointSet {
        center_points(&[
            Vec3::new(1.0, 1.0, 1.0),
            Vec3::new(1.0, -1.0, -1.0),
            Vec3::new(-1.0, 1.0, -1.0),
            Vec3::new(-1.0, -1.0, 1.0),
        ])
        .unwrap()
    }

    fn random_tetra(rng: &mut ChaCha8Rng) -> PointSet {
        loop {
            let raw: Vec<Vec3> = (0..4)
                .map(|_| {
                    Vec3::new(
                        rng.gen_range(-1.0..1.0),
                        rng.gen_range(-1.0..1.0),
                        rng.gen_range(-1.0..1.0),
                    )
                })
                .collect();
            let ps = center_points(&raw).unwrap();
            let vol = (raw[1] - raw[0])
                .cross(&(raw[2] - raw[0]))
                .dot(&(raw[3] - raw[0]))
                .abs();
            if vol > 0.05 {
                return ps;
            }
        }
    }

    #[test]
    fn gamma_examples() {
        let ps = tetra();
        let m = compute_moments(&ps);
        assert!(gamma_from_u(&Vec3::x(), &ps, &m).unwrap().norm() < 1e-15);
        let u = Vec3::new(1.0, 1.0, 0.0).normalize();
        let g = gamma_from_u(&u, &ps, &m).unwrap();
        assert!(((g / 2.0).norm_squared() - 0.25).abs() < 1e-14);
        assert!((radius_sq(&u, &g, &m, 4) - 2.25).abs() < 1e-14);
    }

    #[test]
    fn gamma_solves_circumscription_equations() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..100 {
            let ps = random_tetra(&mut rng);
            let m = compute_moments(&ps);
            let u = random_unit_vector(&mut rng);
            let g = gamma_from_u(&u, &ps, &m).unwrap();
            let b = m.b_values(&u);
            let bmax = b.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            for (x, bi) in ps.points.iter().zip(&b) {
                assert!((x.dot(&g) - bi).abs() <= 1e-10 * bmax);
            }
        }
    }

    #[test]
    fn wrong_count_and_flat_inputs_rejected() {
        let flat = center_points(&[
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(0.0, 1.0, 0.0),
            Vec3::new(1.0, 1.0, 0.0),
        ])
        .unwrap();
        let cfg = SolverConfig::default();
        assert!(matches!(
            min_circumscribed_4(&flat, &cfg),
            Err(CylError::RankDeficient { rank: 2 })
        ));
        let five = center_points(&[
            Vec3::x(),
            Vec3::y(),
            Vec3::z(),
            -Vec3::x(),
            Vec3::new(0.3, 0.2, -0.9),
        ])
        .unwrap();
        assert!(matches!(
            min_circumscribed_4(&five, &cfg),
            Err(CylError::WrongPointCount {
                expected: 4,
                got: 5
            })
        ));
    }

    #[test]
    fn quartic_homogeneity_and_radius() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let ps = random_tetra(&mut rng);
            let m = compute_moments(&ps);
            let u = random_unit_vector(&mut rng);
            let lam: f64 = rng.gen_range(0.2..3.0) * if rng.gen_bool(0.5) { -1.0 } else { 1.0 };
            let f1 = quartic_objective(&u, &ps, &m).unwrap();
            let f2 = quartic_objective(&(u * lam), &ps, &m).unwrap();
            assert!((f2 - lam.powi(4) * f1).abs() <= 1e-12 * f2);
            assert!((quartic_objective(&(u * 2.0), &ps, &m).unwrap() / f1 - 16.0).abs() < 1e-12);
            let g = m.gamma(&ps, &u).unwrap();
            assert!((f1 / 4.0 - radius_sq(&u, &g, &m, 4)).abs() <= 1e-12 * f1);
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        for _ in 0..50 {
            let ps = random_tetra(&mut rng);
            let m = compute_moments(&ps);
            let u = random_unit_vector(&mut rng);
            let st = QuarticState::new(&u, &ps, &m).unwrap();
            let h = 1e-6;
            for j in 0..3 {
                let mut up = u;
                let mut dn = u;
                up[j] += h;
                dn[j] -= h;
                let sp = QuarticState::new(&up, &ps, &m).unwrap();
                let sm = QuarticState::new(&dn, &ps, &m).unwrap();
                let fd = (sp.f - sm.f) / (2.0 * h);
                assert!((fd - st.grad[j]).abs() <= 1e-5 * st.grad.norm());
                let gd = (sp.g - sm.g) / (2.0 * h);
                assert!((gd - st.g_grad[j]).abs() <= 1e-5 * st.g_grad.norm().max(1e-3));
                let col = (sp.grad - sm.grad) / (2.0 * h);
                assert!((col - st.hess.column(j)).norm() <= 1e-5 * st.hess.norm());
                let gcol = (sp.g_grad - sm.g_grad) / (2.0 * h);
                assert!((gcol - st.g_hess.column(j)).norm() <= 1e-5 * st.g_hess.norm().max(1e-3));
            }
        }
    }

    #[test]
    fn fixed_point_step_is_null() {
        let ps = tetra();
        let m = compute_moments(&ps);
        for u in [
            Vec3::x(),
            Vec3::new(1.0, 1.0, 0.0).normalize(),
            Vec3::new(0.0, 1.0, -1.0).normalize(),
        ] {
            let st = QuarticState::new(&u, &ps, &m).unwrap();
            let next = newton_restore_step(&st, 1.0);
            assert!((next - u).norm() <= 1e-12, "{u} -> {next}");
        }
    }

    #[test]
    fn tetrahedron_converges_from_near_e1() {
        let ps = tetra();
        let cfg = SolverConfig::default();
        let u0 = Vec3::new(1.0, 0.15, -0.1);
        let (u, iters, _) = objective_trace(u0, &ps, &cfg).unwrap();
        assert!(iters <= 35, "{iters} iterations");
        assert!(axis_angle(&u, &Vec3::x()) <= 1e-8);
    }

    #[test]
    fn tetrahedron_minima() {
        let ps = tetra();
        let set = min_circumscribed_4(&ps, &SolverConfig::default()).unwrap();
        let radii = set.local_min_radii(ps.tol_scale());
        assert_eq!(radii.len(), 1, "{:?}", set.minima);
        assert!((radii[0] - 2f64.sqrt()).abs() < 1e-8);
        let global: Vec<_> = set.minima.iter().filter(|m| m.global_min).collect();
        assert_eq!(global.len(), 3);
        for m in &global {
            assert!(m.cylinder.c.norm() <= 1e-10);
            let a = m.cylinder.u.abs();
            assert!([Vec3::x(), Vec3::y(), Vec3::z()]
                .iter()
                .any(|e| axis_angle(&a, e) <= 1e-8));
        }
        // the edge-direction maxima come out as stationary points
        let maxima: Vec<_> = set.minima.iter().filter(|m| !m.local_min).collect();
        assert!(!maxima.is_empty());
        for m in maxima {
            assert!((m.cylinder.rho - 1.5).abs() < 1e-10, "{m:?}");
        }
    }

    #[test]
    fn random_tetrahedra_are_circumscribed() {
        let mut rng = ChaCha8Rng::seed_from_u64(1000);
        let cfg = SolverConfig {
            n_starts: 20,
            ..Default::default()
        };
        for _ in 0..200 {
            let ps = random_tetra(&mut rng);
            let set = min_circumscribed_4(&ps, &cfg).unwrap();
            assert!(set.global_min().is_some());
            assert!(set.local_minima().count() <= MAX_LOCAL_MINIMA);
            let s = ps.tol_scale();
            for m in &set.minima {
                let rho2 = m.cylinder.rho.powi(2);
                for x in &ps.points {
                    assert!((m.cylinder.sq_distance(x) - rho2).abs() <= 1e-9 * s * s);
                }
                let dot = m.cylinder.u.dot(&m.cylinder.c).abs();
                assert!(dot <= 1e-10 * m.cylinder.c.norm() || dot == 0.0);
            }
        }
    }

    #[test]
    fn rotation_equivariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let cfg = SolverConfig::default();
        for _ in 0..10 {
            let raw: Vec<Vec3> = (0..4)
                .map(|_| {
                    Vec3::new(
                        rng.gen_range(-1.0..1.0),
                        rng.gen_range(-1.0..1.0),
                        rng.gen_range(-1.0..1.0),
                    )
                })
                .collect();
            let axis = random_unit_vector(&mut rng);
            let rot = nalgebra::Rotation3::from_axis_angle(
                &nalgebra::Unit::new_normalize(axis),
                rng.gen_range(0.0..3.0),
            );
            let shift = Vec3::new(0.5, -2.0, 1.0);
            let moved: Vec<Vec3> = raw.iter().map(|x| rot * x + shift).collect();
            let a = min_circumscribed_4(&center_points(&raw).unwrap(), &cfg).unwrap();
            let b = min_circumscribed_4(&center_points(&moved).unwrap(), &cfg).unwrap();
            let ga = a.global_min().unwrap().cylinder;
            let gb = b.global_min().unwrap().cylinder;
            assert!((ga.rho - gb.rho).abs() <= 1e-10 * ga.rho);
            assert!(axis_angle(&(rot * ga.u), &gb.u) <= 1e-8);
        }
    }
}
