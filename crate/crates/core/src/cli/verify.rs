//! Built-in fixtures with known answers, run by `cylkit verify`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::enclosing::smallest_enclosing_cylinder;
use crate::error::CylError;
use crate::five_point::{circumscribed_5, compute_m, compute_t, Verdict};
use crate::fixtures;
use crate::four_point::min_circumscribed_4;
use crate::geometry::{axis_angle, center_points, Cylinder, SolverConfig, Vec3};
use crate::numerics::eig_sym3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixtureOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn outcome(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> FixtureOutcome {
    FixtureOutcome {
        name: name.into(),
        passed,
        detail: detail.into(),
    }
}

/// Whether `found` and `expected` are the same set of cylinders, matching
/// direction, axis point and radius to `tol`.
pub fn same_cylinder_set(found: &[Cylinder], expected: &[Cylinder], tol: f64) -> bool {
    found.len() == expected.len()
        && expected.iter().all(|e| {
            found.iter().any(|f| {
                axis_angle(&f.u, &e.u) <= tol
                    && (f.c - e.c).norm() <= tol
                    && (f.rho - e.rho).abs() <= tol
            })
        })
}

pub fn tetrahedron_fixtures(cfg: &SolverConfig) -> Vec<FixtureOutcome> {
    let ps = center_points(&fixtures::regular_tetrahedron()).expect("fixture is valid");
    let mut out = Vec::new();
    match min_circumscribed_4(&ps, cfg) {
        Ok(set) => {
            let mut radii: Vec<f64> = Vec::new();
            for m in &set.minima {
                if !radii.iter().any(|r| (r - m.cylinder.rho).abs() <= 1e-8) {
                    radii.push(m.cylinder.rho);
                }
            }
            radii.sort_by(f64::total_cmp);
            let radii_ok = radii.len() == 2
                && (radii[0] - 2f64.sqrt()).abs() <= 1e-8
                && (radii[1] - 1.5).abs() <= 1e-8;
            out.push(outcome(
                "tetrahedron circumscribed radii",
                radii_ok,
                format!("{radii:?}"),
            ));

            let axes = [Vec3::x(), Vec3::y(), Vec3::z()];
            let globals: Vec<&Cylinder> = set
                .minima
                .iter()
                .filter(|m| m.global_min)
                .map(|m| &m.cylinder)
                .collect();
            let axes_ok = globals.len() == 3
                && axes.iter().all(|e| {
                    globals
                        .iter()
                        .any(|g| axis_angle(&g.u, e) <= 1e-8 && g.c.norm() <= 1e-10)
                });
            out.push(outcome(
                "tetrahedron minimal axes",
                axes_ok,
                format!("{} global minima", globals.len()),
            ));

            let edges: Vec<Vec3> = {
                let p = fixtures::regular_tetrahedron();
                let mut e = Vec::new();
                for i in 0..4 {
                    for j in i + 1..4 {
                        e.push(p[j] - p[i]);
                    }
                }
                e
            };
            let along_edges: Vec<&Cylinder> = set
                .minima
                .iter()
                .map(|m| &m.cylinder)
                .filter(|c| edges.iter().any(|e| axis_angle(&c.u, e) <= 1e-8))
                .collect();
            let edges_ok =
                !along_edges.is_empty() && along_edges.iter().all(|c| (c.rho - 1.5).abs() <= 1e-10);
            out.push(outcome(
                "tetrahedron edge axes",
                edges_ok,
                format!("{} stationary cylinders along edges", along_edges.len()),
            ));
        }
        Err(e) => out.push(outcome(
            "tetrahedron circumscribed radii",
            false,
            e.to_string(),
        )),
    }
    match smallest_enclosing_cylinder(&ps, cfg) {
        Ok(r) => out.push(outcome(
            "tetrahedron enclosing",
            (r.cylinder.rho - 2f64.sqrt()).abs() <= 1e-8 && r.k == 4,
            format!("rho = {}, k = {}", r.cylinder.rho, r.k),
        )),
        Err(e) => out.push(outcome("tetrahedron enclosing", false, e.to_string())),
    }
    out
}

/// Bipyramid with apex height `h`: six (or three) closed-form cylinders
/// above `√2/2`, none below.
pub fn bipyramid_fixture(h: f64) -> FixtureOutcome {
    let name = format!("bipyramid h = {h}");
    let ps = match center_points(&fixtures::bipyramid(h)) {
        Ok(ps) => ps,
        Err(e) => return outcome(name, false, e.to_string()),
    };
    let set = match circumscribed_5(&ps) {
        Ok(s) => s,
        Err(e) => return outcome(name, false, e.to_string()),
    };
    if 2.0 * h * h < 1.0 - 1e-12 {
        let ok = set.verdict == Verdict::NoneDefinite && set.cylinders.is_empty();
        return outcome(
            name,
            ok,
            format!("{:?}, {} cylinders", set.verdict, set.cylinders.len()),
        );
    }
    let expected = fixtures::bipyramid_cylinders(h);
    let ok =
        set.verdict == Verdict::Solutions && same_cylinder_set(&set.cylinders, &expected, 1e-9);
    outcome(
        name,
        ok,
        format!(
            "{} cylinders, expected {} with radius {}",
            set.cylinders.len(),
            expected.len(),
            fixtures::bipyramid_radius(h)
        ),
    )
}

/// Random five-point sets never have more than six circumscribed cylinders,
/// and every reported one passes through all five points.
pub fn five_point_sweep(count: usize, seed: u64) -> FixtureOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_count = 0;
    let mut bad = 0;
    let mut failures = 0;
    for _ in 0..count {
        let ps = match center_points(&fixtures::random_cloud(&mut rng, 5)) {
            Ok(ps) if ps.full_rank => ps,
            _ => continue,
        };
        let set = match circumscribed_5(&ps) {
            Ok(s) => s,
            Err(_) => {
                failures += 1;
                continue;
            }
        };
        max_count = max_count.max(set.cylinders.len());
        let s2 = ps.tol_scale().powi(2);
        bad += set
            .cylinders
            .iter()
            .filter(|c| {
                ps.points
                    .iter()
                    .any(|x| (c.sq_distance(x) - c.rho * c.rho).abs() > 1e-9 * s2)
            })
            .count();
    }
    outcome(
        format!("five-point sweep ({count} sets, seed {seed})"),
        max_count <= 6 && bad == 0 && failures == 0,
        format!(
            "max {max_count} cylinders, {bad} failed residual checks, {failures} solver errors"
        ),
    )
}

/// A repeated point makes M vanish and is reported as a duplicate.
pub fn duplicate_fixture() -> FixtureOutcome {
    let mut pts = fixtures::regular_tetrahedron();
    pts.push(pts[2]);
    let ps = center_points(&pts).expect("fixture is valid");
    let trace_t: f64 = ps.points.iter().map(|x| x.norm_squared()).sum();
    let norm = compute_t(&ps).map(|t| eig_sym3(&compute_m(&ps, &t)).norm());
    let reported = circumscribed_5(&ps);
    let ok = matches!(norm, Ok(m) if m <= 1e-12 * trace_t)
        && matches!(
            reported,
            Err(CylError::DuplicatePoints {
                first: 2,
                second: 4
            })
        );
    outcome("duplicate point", ok, format!("|M| = {norm:?}"))
}

/// Parses `a:b:step` into the grid points `a, a + step, ..., ≤ b`.
pub fn parse_h_grid(spec: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [a, b, step] = parts.as_slice() else {
        return Err(format!("expected a:b:step, got '{spec}'"));
    };
    let parse = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| format!("'{s}' is not a number"))
    };
    let (a, b, step) = (parse(a)?, parse(b)?, parse(step)?);
    if !(step > 0.0 && a > 0.0 && b >= a) {
        return Err("need 0 < a ≤ b and step > 0".into());
    }
    let count = ((b - a) / step + 1e-9).floor() as usize;
    Ok((0..=count).map(|i| a + step * i as f64).collect())
}

pub const DEFAULT_H: [f64; 9] = [0.3, 0.5, 0.7, 0.71, 0.75, 1.0, 1.5, 2.0, 3.0];

pub fn run_all(cfg: &SolverConfig, h_grid: &[f64], sweep: usize, seed: u64) -> Vec<FixtureOutcome> {
    let mut out = tetrahedron_fixtures(cfg);
    out.extend(h_grid.iter().map(|&h| bipyramid_fixture(h)));
    out.push(duplicate_fixture());
    if sweep > 0 {
        out.push(five_point_sweep(sweep, seed));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn h_grid_parsing() {
        let g = parse_h_grid("0.5:3.0:0.1").unwrap();
        assert_eq!(g.len(), 26);
        assert!((g[25] - 3.0).abs() < 1e-12);
        assert!(parse_h_grid("1:2").is_err());
        assert!(parse_h_grid("2:1:0.1").is_err());
        assert!(parse_h_grid("0.5:1:0").is_err());
    }

    #[test]
    fn default_fixtures_pass() {
        for o in run_all(&SolverConfig::default(), &DEFAULT_H, 200, 7) {
            assert!(o.passed, "{o:?}");
        }
    }
}
