//! The structured result every command emits.

use serde::{Deserialize, Serialize};

use crate::enclosing::enclosure_check;
use crate::geometry::{residual_profile, Cylinder, PointSet, SolverConfig, Vec3};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultDocument {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub input_summary: Option<InputSummary>,
    pub cylinders: Vec<CylinderEntry>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub verdict: Option<String>,
    /// Command-specific values (variance, spectrum, oracle gap, ...).
    pub diagnostics: serde_json::Map<String, serde_json::Value>,
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<ErrorEntry>,
    pub timing: Timing,
    pub config: ConfigEcho,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputSummary {
    pub n: usize,
    pub hull_size: usize,
    pub centroid: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CylinderEntry {
    /// Unit direction, first nonzero component positive.
    pub direction: [f64; 3],
    /// Point of the axis nearest the input centroid, in input coordinates.
    pub axis_point: [f64; 3],
    pub radius: f64,
    pub residual_stats: ResidualStats,
    /// Input indices the cylinder was built on.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub support: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub local_min: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub global_min: Option<bool>,
}

/// Statistics of the squared axis distances `Δ_i` of every input point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualStats {
    pub mean_sq_distance: f64,
    pub stdev_sq_distance: f64,
    /// `max |Δ_i − ρ²|`.
    pub max_abs_deviation: f64,
    /// `max (Δ_i − ρ²) / scale²`; not positive when the cylinder encloses.
    pub worst_excess: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorEntry {
    pub kind: String,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub seconds: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub seed: u64,
    pub tol_rel: f64,
    pub tol_orth: f64,
    pub max_iter: usize,
    pub starts: usize,
}

impl From<&SolverConfig> for ConfigEcho {
    fn from(cfg: &SolverConfig) -> Self {
        ConfigEcho {
            seed: cfg.seed,
            tol_rel: cfg.tol_rel,
            tol_orth: cfg.tol_orth,
            max_iter: cfg.max_iter,
            starts: cfg.n_starts,
        }
    }
}

impl ResultDocument {
    pub fn new(command: &str, cfg: &SolverConfig) -> Self {
        ResultDocument {
            command: command.to_string(),
            input_summary: None,
            cylinders: Vec::new(),
            verdict: None,
            diagnostics: serde_json::Map::new(),
            warnings: Vec::new(),
            error: None,
            timing: Timing { seconds: 0.0 },
            config: cfg.into(),
        }
    }

    pub fn diag(&mut self, key: &str, value: impl Serialize) {
        self.diagnostics.insert(
            key.to_string(),
            serde_json::to_value(value).unwrap_or_default(),
        );
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents always serialize") + "\n"
    }
}

fn arr(v: &Vec3) -> [f64; 3] {
    // adding +0 turns -0 into 0
    [v.x + 0.0, v.y + 0.0, v.z + 0.0]
}

/// Shortest round-trip form, with an exponent for very large or small values.
pub fn num(x: f64) -> String {
    serde_json::to_string(&x).unwrap_or_else(|_| x.to_string())
}

fn triple(v: &[f64; 3]) -> String {
    format!("{} {} {}", num(v[0]), num(v[1]), num(v[2]))
}

/// Entry for a cylinder given in the centered frame of `ps`.
pub fn cylinder_entry(ps: &PointSet, cyl: &Cylinder, support: Vec<usize>) -> CylinderEntry {
    let profile = residual_profile(ps, cyl);
    let (_, worst_excess) = enclosure_check(cyl, ps, 0.0);
    CylinderEntry {
        direction: arr(&cyl.canonical_direction()),
        axis_point: arr(&(cyl.c + ps.centroid_offset)),
        radius: cyl.rho,
        residual_stats: ResidualStats {
            mean_sq_distance: profile.mean,
            stdev_sq_distance: profile.stdev,
            max_abs_deviation: profile.max_dev,
            worst_excess,
        },
        support,
        local_min: None,
        global_min: None,
    }
}

impl CylinderEntry {
    /// The cylinder in input coordinates.
    pub fn cylinder(&self) -> Cylinder {
        Cylinder::new(
            Vec3::from(self.direction),
            Vec3::from(self.axis_point),
            self.radius,
        )
    }
}

/// Aligned plain-text rendering.
pub fn render_text(doc: &ResultDocument) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    let _ = writeln!(out, "command: {}", doc.command);
    if let Some(s) = &doc.input_summary {
        let _ = writeln!(
            out,
            "points: {}  hull vertices: {}  centroid: {}",
            s.n,
            s.hull_size,
            triple(&s.centroid)
        );
    }
    if let Some(v) = &doc.verdict {
        let _ = writeln!(out, "verdict: {v}");
    }
    if let Some(e) = &doc.error {
        let _ = writeln!(out, "error: {} ({})", e.message, e.kind);
    }
    if !doc.cylinders.is_empty() {
        let header = [
            "#",
            "radius",
            "direction",
            "axis point",
            "max |Δ−ρ²|",
            "flags",
        ];
        let rows: Vec<[String; 6]> = doc
            .cylinders
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let mut flags = Vec::new();
                if c.global_min == Some(true) {
                    flags.push("global".to_string());
                }
                match c.local_min {
                    Some(true) => flags.push("local-min".into()),
                    Some(false) => flags.push("stationary".into()),
                    None => {}
                }
                if !c.support.is_empty() {
                    flags.push(format!("support={:?}", c.support));
                }
                [
                    (i + 1).to_string(),
                    num(c.radius),
                    triple(&c.direction),
                    triple(&c.axis_point),
                    num(c.residual_stats.max_abs_deviation),
                    flags.join(" "),
                ]
            })
            .collect();
        let mut widths = header.map(|h| h.chars().count());
        for row in &rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let line = |cells: &[String]| {
            let padded: Vec<String> = cells
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:<w$}"))
                .collect();
            padded.join("  ").trim_end().to_string()
        };
        let _ = writeln!(out, "{}", line(&header.map(String::from)));
        for row in &rows {
            let _ = writeln!(out, "{}", line(row));
        }
    }
    for (k, v) in &doc.diagnostics {
        let _ = writeln!(out, "{k}: {v}");
    }
    for w in &doc.warnings {
        let _ = writeln!(out, "warning: {w}");
    }
    let _ = writeln!(out, "time: {} s", num(doc.timing.seconds));
    out
}
