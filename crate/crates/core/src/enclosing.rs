//! Smallest enclosing cylinder.
//!
//! The optimum has between one and five points on its boundary and is a
//! locally minimal cylinder circumscribed to them, so the search enumerates
//! such cylinders over subsets of the convex hull vertices and keeps the
//! smallest one containing every point.

use std::collections::HashSet;

use nalgebra::Vector2;

use crate::error::{CylError, Result};
use crate::five_point::circumscribed_5;
use crate::four_point::min_circumscribed_4;
use crate::geometry::{Cylinder, PointSet, SolverConfig, Vec3};
use crate::numerics::{any_orthogonal, eig_sym3};

/// Relative slack on the squared radius when testing containment.
pub const ENCLOSURE_TOL: f64 = 1e-9;
/// Candidate radii closer than this (times the scale) are ties.
pub const TIE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct EnclosingResult {
    /// In the centered frame of the input set.
    pub cylinder: Cylinder,
    /// Indices of the points the cylinder was built on, ascending.
    pub support: Vec<usize>,
    pub k: usize,
    pub hull_size: usize,
    pub candidates_examined: usize,
    /// Other enclosing candidates whose radius ties with the optimum.
    pub ties: usize,
}

type P2 = Vector2<f64>;

fn cross2(o: &P2, a: &P2, b: &P2) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

/// Strict vertices of the 2D hull (no points interior to edges). Among
/// coincident points the first index is kept.
fn hull_2d(pts: &[(usize, P2)], eps: f64) -> Vec<usize> {
    let mut sorted: Vec<(usize, P2)> = pts.to_vec();
    sorted.sort_by(|a, b| {
        a.1.x
            .total_cmp(&b.1.x)
            .then(a.1.y.total_cmp(&b.1.y))
            .then(a.0.cmp(&b.0))
    });
    sorted.dedup_by(|a, b| (a.1 - b.1).norm() <= eps);
    if sorted.len() <= 2 {
        return sorted.iter().map(|p| p.0).collect();
    }
    let area_eps = eps
        * sorted
            .iter()
            .map(|p| p.1.norm())
            .fold(0.0, f64::max)
            .max(eps);
    let mut chain: Vec<(usize, P2)> = Vec::new();
    for pass in 0..2 {
        let start = chain.len();
        let iter: Box<dyn Iterator<Item = &(usize, P2)>> = if pass == 0 {
            Box::new(sorted.iter())
        } else {
            Box::new(sorted.iter().rev())
        };
        for p in iter {
            while chain.len() >= start + 2
                && cross2(&chain[chain.len() - 2].1, &chain[chain.len() - 1].1, &p.1) <= area_eps
            {
                chain.pop();
            }
            chain.push(*p);
        }
        chain.pop();
    }
    let mut idx: Vec<usize> = chain.iter().map(|p| p.0).collect();
    idx.sort_unstable();
    idx.dedup();
    idx
}

/// Orthonormal basis of the plane with normal `n`.
fn plane_basis(n: &Vec3) -> (Vec3, Vec3) {
    let e1 = any_orthogonal(n);
    (e1, n.normalize().cross(&e1))
}

/// Indices of the convex-hull vertices, ascending. Planar and collinear
/// inputs give the 2D hull and the segment endpoints.
pub fn hull_vertices(ps: &PointSet) -> Vec<usize> {
    let n = ps.n();
    let scale = ps.scale();
    if n == 0 {
        return Vec::new();
    }
    if scale == 0.0 {
        return vec![0];
    }
    let eps = 1e-10 * scale;
    let pts = &ps.points;
    match ps.rank {
        0 => vec![0],
        1 => {
            let dir = eig_sym3(
                &ps.points
                    .iter()
                    .fold(nalgebra::Matrix3::zeros(), |a, x| a + x * x.transpose()),
            )
            .vector(0);
            let proj: Vec<f64> = pts.iter().map(|x| x.dot(&dir)).collect();
            let lo = (0..n)
                .min_by(|&a, &b| proj[a].total_cmp(&proj[b]).then(a.cmp(&b)))
                .unwrap();
            let hi = (0..n)
                .max_by(|&a, &b| proj[a].total_cmp(&proj[b]).then(b.cmp(&a)))
                .unwrap();
            let mut v = vec![lo, hi];
            v.sort_unstable();
            v.dedup();
            v
        }
        2 => {
            let normal = eig_sym3(
                &ps.points
                    .iter()
                    .fold(nalgebra::Matrix3::zeros(), |a, x| a + x * x.transpose()),
            )
            .vector(2);
            let (e1, e2) = plane_basis(&normal);
            let proj: Vec<(usize, P2)> = pts
                .iter()
                .enumerate()
                .map(|(i, x)| (i, P2::new(x.dot(&e1), x.dot(&e2))))
                .collect();
            hull_2d(&proj, eps)
        }
        _ => {
            let mut vertices: HashSet<usize> = HashSet::new();
            let mut seen_faces: HashSet<Vec<usize>> = HashSet::new();
            for i in 0..n {
                for j in i + 1..n {
                    for k in j + 1..n {
                        let nrm = (pts[j] - pts[i]).cross(&(pts[k] - pts[i]));
                        let len = nrm.norm();
                        if len <= eps * scale {
                            continue;
                        }
                        let nrm = nrm / len;
                        let d: Vec<f64> = pts.iter().map(|x| nrm.dot(&(x - pts[i]))).collect();
                        let above = d.iter().any(|&v| v > eps);
                        let below = d.iter().any(|&v| v < -eps);
                        if above && below {
                            continue;
                        }
                        let face: Vec<usize> = (0..n).filter(|&l| d[l].abs() <= eps).collect();
                        if !seen_faces.insert(face.clone()) {
                            continue;
                        }
                        let (e1, e2) = plane_basis(&nrm);
                        let proj: Vec<(usize, P2)> = face
                            .iter()
                            .map(|&l| (l, P2::new(pts[l].dot(&e1), pts[l].dot(&e2))))
                            .collect();
                        vertices.extend(hull_2d(&proj, eps));
                    }
                }
            }
            let mut v: Vec<usize> = vertices.into_iter().collect();
            v.sort_unstable();
            v
        }
    }
}

/// Smallest cylinder through three points: half the smallest height, with
/// the axis parallel to the longest side, midway between it and the
/// opposite vertex.
pub fn triangle_min_cylinder(a: &Vec3, b: &Vec3, c: &Vec3) -> Result<Cylinder> {
    triangle_strips(a, b, c)?
        .into_iter()
        .min_by(|x, y| x.rho.total_cmp(&y.rho))
        .ok_or(CylError::CollinearPoints)
}

/// For each side, the cylinder with axis parallel to it through all three points.
fn triangle_strips(a: &Vec3, b: &Vec3, c: &Vec3) -> Result<Vec<Cylinder>> {
    let area2 = (b - a).cross(&(c - a)).norm();
    let longest = (b - a).norm().max((c - b).norm()).max((a - c).norm());
    if area2 <= 1e-12 * longest * longest {
        return Err(CylError::CollinearPoints);
    }
    Ok([(a, b, c), (b, c, a), (c, a, b)]
        .iter()
        .map(|(p, q, r)| {
            let dir = (*q - *p).normalize();
            let foot = *p + dir * dir.dot(&(*r - *p));
            Cylinder::new(dir, (*r + foot) / 2.0, (*r - foot).norm() / 2.0)
        })
        .collect())
}

/// Whether every point lies within the cylinder up to a relative slack
/// `tol_rel` on `ρ²`, and the largest `(Δ_i − ρ²)/scale²`.
pub fn enclosure_check(cyl: &Cylinder, ps: &PointSet, tol_rel: f64) -> (bool, f64) {
    let scale2 = ps.tol_scale().powi(2);
    let rho2 = cyl.rho * cyl.rho;
    let worst = ps
        .points
        .iter()
        .map(|x| cyl.sq_distance(x) - rho2)
        .fold(f64::NEG_INFINITY, f64::max);
    let floor = 1e-24 * scale2;
    (worst <= rho2 * tol_rel + floor, worst / scale2)
}

struct Candidate {
    cylinder: Cylinder,
    support: Vec<usize>,
}

fn better(a: &Candidate, b: &Candidate, tie: f64) -> bool {
    if (a.cylinder.rho - b.cylinder.rho).abs() > tie {
        return a.cylinder.rho < b.cylinder.rho;
    }
    (a.support.len(), &a.support) < (b.support.len(), &b.support)
}

fn combinations(items: &[usize], k: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(
        items: &[usize],
        k: usize,
        start: usize,
        cur: &mut Vec<usize>,
        f: &mut impl FnMut(&[usize]),
    ) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..items.len() {
            if items.len() - i < k - cur.len() {
                break;
            }
            cur.push(items[i]);
            rec(items, k, i + 1, cur, f);
            cur.pop();
        }
    }
    rec(items, k, 0, &mut Vec::with_capacity(k), f);
}

/// Minimal-radius cylinder containing every point of `ps`.
pub fn smallest_enclosing_cylinder(ps: &PointSet, cfg: &SolverConfig) -> Result<EnclosingResult> {
    cfg.validate()?;
    let n = ps.n();
    if n == 0 {
        return Err(CylError::InvalidInput("empty point set".into()));
    }
    let scale = ps.tol_scale();
    let hull = hull_vertices(ps);

    if let Some(result) = collinear_case(ps, &hull) {
        return Ok(result);
    }

    let tie = TIE_TOL * scale;
    let mut examined = 0;
    let mut best: Option<Candidate> = None;
    let mut ties = 0;
    let mut consider = |cand: Candidate, best: &mut Option<Candidate>| {
        let (ok, _) = enclosure_check(&cand.cylinder, ps, ENCLOSURE_TOL);
        if !ok {
            return;
        }
        match best {
            Some(b) if (b.cylinder.rho - cand.cylinder.rho).abs() <= tie => {
                ties += 1;
                if better(&cand, b, tie) {
                    *best = Some(cand);
                }
            }
            Some(b) if !better(&cand, b, tie) => {}
            _ => {
                ties = 0;
                *best = Some(cand);
            }
        }
    };

    combinations(&hull, 3, &mut |s| {
        if let Ok(strips) = triangle_strips(&ps.points[s[0]], &ps.points[s[1]], &ps.points[s[2]]) {
            for cyl in strips {
                examined += 1;
                consider(
                    Candidate {
                        cylinder: cyl,
                        support: s.to_vec(),
                    },
                    &mut best,
                );
            }
        }
    });

    let centered_subset = |s: &[usize]| {
        let sub = ps.subset(s);
        let shift = sub.centroid_offset - ps.centroid_offset;
        (sub, shift)
    };
    if hull.len() >= 4 {
        combinations(&hull, 4, &mut |s| {
            let (sub, shift) = centered_subset(s);
            if !sub.full_rank {
                return;
            }
            if let Ok(set) = min_circumscribed_4(&sub, cfg) {
                for m in &set.minima {
                    examined += 1;
                    consider(
                        Candidate {
                            cylinder: m.cylinder.translated(&shift),
                            support: s.to_vec(),
                        },
                        &mut best,
                    );
                }
            }
        });
    }
    if hull.len() >= 5 {
        combinations(&hull, 5, &mut |s| {
            let (sub, shift) = centered_subset(s);
            if !sub.full_rank {
                return;
            }
            if let Ok(set) = circumscribed_5(&sub) {
                for cyl in &set.cylinders {
                    examined += 1;
                    consider(
                        Candidate {
                            cylinder: cyl.translated(&shift),
                            support: s.to_vec(),
                        },
                        &mut best,
                    );
                }
            }
        });
    }

    let best = best.ok_or(CylError::NoCandidateFound { examined })?;
    Ok(EnclosingResult {
        k: best.support.len(),
        cylinder: best.cylinder,
        support: best.support,
        hull_size: hull.len(),
        candidates_examined: examined,
        ties,
    })
}

/// All points within `1e-9·scale` of their principal line: a zero-radius
/// cylinder along it (enlarged to the largest residual distance).
fn collinear_case(ps: &PointSet, hull: &[usize]) -> Option<EnclosingResult> {
    let scale = ps.scale();
    if scale == 0.0 {
        return Some(EnclosingResult {
            cylinder: Cylinder::new(Vec3::z(), Vec3::zeros(), 0.0),
            support: vec![0],
            k: 1,
            hull_size: 1,
            candidates_examined: 0,
            ties: 0,
        });
    }
    let t = ps
        .points
        .iter()
        .fold(nalgebra::Matrix3::zeros(), |a, x| a + x * x.transpose());
    let dir = eig_sym3(&t).vector(0);
    let axis = Cylinder::new(dir, Vec3::zeros(), 0.0);
    let worst = ps
        .points
        .iter()
        .map(|x| axis.sq_distance(x))
        .fold(0.0, f64::max)
        .sqrt();
    if worst > 1e-9 * scale {
        return None;
    }
    let proj: Vec<f64> = ps.points.iter().map(|x| x.dot(&dir)).collect();
    let lo = (0..ps.n())
        .min_by(|&a, &b| proj[a].total_cmp(&proj[b]).then(a.cmp(&b)))
        .unwrap();
    let hi = (0..ps.n())
        .max_by(|&a, &b| proj[a].total_cmp(&proj[b]).then(b.cmp(&a)))
        .unwrap();
    let mut support = vec![lo, hi];
    support.sort_unstable();
    Some(EnclosingResult {
        cylinder: Cylinder::new(dir, Vec3::zeros(), worst),
        k: 2,
        support,
        hull_size: hull.len(),
        candidates_examined: 0,
        ties: 0,
    })
}

/// `n`-th direction of a nested low-discrepancy sequence on the upper
/// hemisphere (uniform in area). Any prefix of the sequence is a grid.
pub fn grid_direction(index: usize) -> Vec3 {
    // additive recurrence with the plastic number
    const G: f64 = 1.324_717_957_244_746;
    let (a1, a2) = (1.0 / G, 1.0 / (G * G));
    let k = index as f64 + 1.0;
    let z = (0.5 + a1 * k).fract();
    let phi = std::f64::consts::TAU * (0.5 + a2 * k).fract();
    let r = (1.0 - z * z).max(0.0).sqrt();
    Vec3::new(r * phi.cos(), r * phi.sin(), z)
}

/// Radius of the smallest circle containing `pts` (Welzl's incremental form).
pub fn min_enclosing_circle(pts: &[P2]) -> f64 {
    let circle2 = |a: &P2, b: &P2| ((a + b) / 2.0, (a - b).norm() / 2.0);
    let circle3 = |a: &P2, b: &P2, c: &P2| {
        let d = 2.0 * cross2(a, b, c);
        if d.abs() <= 1e-300 {
            // collinear: the widest pair
            let cands = [circle2(a, b), circle2(b, c), circle2(a, c)];
            return cands
                .into_iter()
                .max_by(|x, y| x.1.total_cmp(&y.1))
                .unwrap();
        }
        let (ba, ca) = (b - a, c - a);
        let (b2, c2) = (ba.norm_squared(), ca.norm_squared());
        let off = P2::new(ca.y * b2 - ba.y * c2, ba.x * c2 - ca.x * b2) / d;
        (a + off, off.norm())
    };
    let inside = |c: &(P2, f64), p: &P2| (p - c.0).norm() <= c.1 * (1.0 + 1e-12) + 1e-300;
    if pts.is_empty() {
        return 0.0;
    }
    let mut c = (pts[0], 0.0);
    for i in 1..pts.len() {
        if inside(&c, &pts[i]) {
            continue;
        }
        c = (pts[i], 0.0);
        for j in 0..i {
            if inside(&c, &pts[j]) {
                continue;
            }
            c = circle2(&pts[i], &pts[j]);
            for k in 0..j {
                if !inside(&c, &pts[k]) {
                    c = circle3(&pts[i], &pts[j], &pts[k]);
                }
            }
        }
    }
    c.1
}

/// Upper bound on the enclosing radius: the best smallest enclosing circle
/// of the projections over `resolution` grid directions.
pub fn oracle_enclosing_radius(ps: &PointSet, resolution: usize) -> f64 {
    let resolution = resolution.max(8);
    let mut best = f64::INFINITY;
    let mut proj = Vec::with_capacity(ps.n());
    for idx in 0..resolution {
        let u = grid_direction(idx);
        let (e1, e2) = plane_basis(&u);
        proj.clear();
        proj.extend(ps.points.iter().map(|x| P2::new(x.dot(&e1), x.dot(&e2))));
        best = best.min(min_enclosing_circle(&proj));
    }
    best
}
