//! Small dense kernels: symmetric 3×3 eigendecomposition, real roots of
//! low-degree polynomials and isotropic random directions.

use nalgebra::{Matrix3, SymmetricEigen, Vector3};
use rand::Rng;

use crate::error::{CylError, Result};

/// Eigen-decomposition of a symmetric 3×3 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spectrum3 {
    /// Sorted so that `μ₁ ≥ μ₂ ≥ μ₃`.
    pub eigenvalues: [f64; 3],
    /// Orthogonal, columns in eigenvalue order, determinant +1.
    pub eigenvectors: Matrix3<f64>,
}

impl Spectrum3 {
    pub fn vector(&self, k: usize) -> Vector3<f64> {
        self.eigenvectors.column(k).into_owned()
    }

    pub fn reconstruct(&self) -> Matrix3<f64> {
        let d = Matrix3::from_diagonal(&Vector3::from(self.eigenvalues));
        self.eigenvectors * d * self.eigenvectors.transpose()
    }

    /// Largest eigenvalue magnitude.
    pub fn norm(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// Symmetric QR as implemented by nalgebra, then sorted descending with the
/// frame made right-handed.
pub fn eig_sym3(a: &Matrix3<f64>) -> Spectrum3 {
    let a = (a + a.transpose()) * 0.5;
    if a.amax() == 0.0 {
        return Spectrum3 {
            eigenvalues: [0.0; 3],
            eigenvectors: Matrix3::identity(),
        };
    }
    let eig = SymmetricEigen::new(a);
    let d = eig.eigenvalues;
    let q = eig.eigenvectors;
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| d[j].total_cmp(&d[i]));
    let eigenvalues = order.map(|k| d[k]);
    let mut vecs =
        Matrix3::from_columns(&[q.column(order[0]), q.column(order[1]), q.column(order[2])]);
    if vecs.determinant() < 0.0 {
        let neg = -vecs.column(2);
        vecs.set_column(2, &neg);
    }
    Spectrum3 {
        eigenvalues,
        eigenvectors: vecs,
    }
}

/// A unit vector orthogonal to `v` (which must be nonzero).
pub fn any_orthogonal(v: &Vector3<f64>) -> Vector3<f64> {
    let a = v.abs();
    let helper = if a.x <= a.y && a.x <= a.z {
        Vector3::x()
    } else if a.y <= a.z {
        Vector3::y()
    } else {
        Vector3::z()
    };
    v.cross(&helper).normalize()
}

/// Real roots of a univariate polynomial, sorted ascending, without multiplicity.
#[derive(Debug, Clone, PartialEq)]
pub struct RealRoots {
    pub roots: Vec<f64>,
    /// Degree after trimming negligible leading coefficients.
    pub degree: usize,
}

/// Leading coefficients at or below this fraction of the largest are dropped.
pub const LEADING_TRIM: f64 = 1e-14;
/// Roots closer than this (relative to `max(1, |r|)`) are merged.
pub const ROOT_MERGE: f64 = 1e-9;

/// Real roots of `coeffs[0] + coeffs[1]·x + … + coeffs[d]·xᵈ` for `d ≤ 6`.
///
/// Roots are isolated recursively: between consecutive real critical points
/// (the roots of the derivative) the polynomial is monotone, so each such
/// interval holds at most one root, found by bisection. A critical point where
/// the polynomial vanishes to rounding is a multiple root. Every root is then
/// polished by Newton iterations on the original polynomial.
pub fn real_roots(coeffs: &[f64]) -> Result<RealRoots> {
    if coeffs.len() > 7 {
        return Err(CylError::InvalidInput(format!(
            "degree {} exceeds 6",
            coeffs.len() - 1
        )));
    }
    let big = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    if big == 0.0 || !big.is_finite() {
        return Err(CylError::AllCoefficientsZero);
    }
    let mut p: Vec<f64> = coeffs.iter().map(|c| c / big).collect();
    while p.len() > 1 && p.last().unwrap().abs() <= LEADING_TRIM {
        p.pop();
    }
    let degree = p.len() - 1;
    let mut roots = Vec::new();
    // exact zero roots
    let mut low = 0;
    while low < p.len() - 1 && p[low] == 0.0 {
        low += 1;
    }
    if low > 0 {
        roots.push(0.0);
    }
    let reduced = &p[low..];
    isolate(reduced, &mut roots);
    for r in roots.iter_mut() {
        *r = polish(&p, *r);
    }
    roots.sort_by(f64::total_cmp);
    Ok(RealRoots {
        roots: merge_clusters(&p, roots),
        degree,
    })
}

pub fn poly_eval(p: &[f64], x: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// `Σ |c_i| |x|^i`, the natural magnitude against which `p(x)` is judged.
pub fn poly_abs_eval(p: &[f64], x: f64) -> f64 {
    let ax = x.abs();
    p.iter().rev().fold(0.0, |acc, &c| acc * ax + c.abs())
}

pub fn poly_derivative(p: &[f64]) -> Vec<f64> {
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * i as f64)
        .collect()
}

pub fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

pub fn poly_add(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] += y;
    }
    out
}

pub fn poly_scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

/// Collapses neighbouring roots that are closer than `ROOT_MERGE`, or between
/// which the polynomial stays zero to rounding (a multiple root split by noise).
fn merge_clusters(p: &[f64], roots: Vec<f64>) -> Vec<f64> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for r in roots {
        if let Some(cluster) = out.last_mut() {
            let prev = *cluster.last().unwrap();
            let mid = 0.5 * (prev + r);
            let close = (r - prev).abs() <= ROOT_MERGE * prev.abs().max(1.0);
            if close || poly_eval(p, mid).abs() <= 1e-11 * poly_abs_eval(p, mid) {
                cluster.push(r);
                continue;
            }
        }
        out.push(vec![r]);
    }
    out.iter()
        .map(|c| c.iter().sum::<f64>() / c.len() as f64)
        .collect()
}

fn isolate(p: &[f64], out: &mut Vec<f64>) {
    let deg = p.len() - 1;
    match deg {
        0 => {}
        1 => out.push(-p[0] / p[1]),
        _ => {
            let lead = p[deg];
            let bound = 1.0 + p[..deg].iter().fold(0.0f64, |m, c| m.max((c / lead).abs()));
            let mut crit = Vec::new();
            isolate(&poly_derivative(p), &mut crit);
            crit.retain(|c| c.is_finite() && c.abs() < bound);
            crit.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let mut knots = Vec::with_capacity(crit.len() + 2);
            knots.push(-bound);
            knots.extend(crit.iter().copied());
            knots.push(bound);
            for &c in &crit {
                if poly_eval(p, c).abs() <= 1e-12 * poly_abs_eval(p, c) {
                    out.push(c);
                }
            }
            for win in knots.windows(2) {
                if let Some(r) = bisect(p, win[0], win[1]) {
                    out.push(r);
                }
            }
        }
    }
}

fn bisect(p: &[f64], mut a: f64, mut b: f64) -> Option<f64> {
    let mut fa = poly_eval(p, a);
    let fb = poly_eval(p, b);
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if fa.signum() == fb.signum() {
        return None;
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = poly_eval(p, m);
        if fm == 0.0 {
            return Some(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Some(0.5 * (a + b))
}

fn polish(p: &[f64], mut x: f64) -> f64 {
    let dp = poly_derivative(p);
    let mut fx = poly_eval(p, x).abs();
    for _ in 0..4 {
        let d = poly_eval(&dp, x);
        if d == 0.0 || !d.is_finite() {
            break;
        }
        let next = x - poly_eval(p, x) / d;
        let fn_ = poly_eval(p, next).abs();
        // also stops on NaN
        if fn_.partial_cmp(&fx) != Some(std::cmp::Ordering::Less) {
            break;
        }
        x = next;
        fx = fn_;
    }
    x
}

/// Uniformly distributed unit vector, by rejection sampling from the cube.
pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R) -> Vector3<f64> {
    loop {
        let v = Vector3::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        let n2: f64 = v.norm_squared();
        if n2 <= 1.0 && n2 > 1e-6 {
            return v / n2.sqrt();
        }
    }
}
