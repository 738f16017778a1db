//! The `cylkit` command line.

pub mod document;
pub mod input;
pub mod verify;

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bestfit::fit_cylinder;
use crate::enclosing::{hull_vertices, oracle_enclosing_radius, smallest_enclosing_cylinder};
use crate::error::CylError;
use crate::five_point::{circumscribed_5, Verdict};
use crate::four_point::min_circumscribed_4;
use crate::geometry::{center_points, PointSet, SolverConfig};
use document::{cylinder_entry, render_text, ErrorEntry, InputSummary, ResultDocument};
use input::{read_point_file, InputError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_NO_CONVERGENCE: i32 = 2;
pub const EXIT_RANK_DEFICIENT: i32 = 3;
pub const EXIT_DUPLICATES: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "cylkit",
    version,
    about = "Best-fitting, circumscribed and enclosing cylinders of 3D points"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cylinder minimizing the variance of the squared axis distances.
    Fit(FileArgs),
    /// Circumscribed cylinders of locally minimal radius through 4 points.
    Circ4(FileArgs),
    /// Every cylinder through 5 points.
    Circ5(FileArgs),
    /// Smallest cylinder containing every point.
    Enclose(EncloseArgs),
    /// Run the built-in fixtures with known answers.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Text,
}

#[derive(Debug, Clone, Args)]
pub struct SolverFlags {
    /// Relative and orthogonality tolerance of the iterative solvers.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Number of random starts.
    #[arg(long)]
    pub starts: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long = "max-iter")]
    pub max_iter: Option<usize>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
}

impl SolverFlags {
    pub fn config(&self) -> SolverConfig {
        let mut cfg = SolverConfig::default();
        if let Some(t) = self.tol {
            cfg.tol_rel = t;
            cfg.tol_orth = t;
        }
        if let Some(s) = self.starts {
            cfg.n_starts = s;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(m) = self.max_iter {
            cfg.max_iter = m;
        }
        cfg
    }
}

#[derive(Debug, Clone, Args)]
pub struct FileArgs {
    /// CSV (`x,y,z[,label]`) or JSON (`[[x,y,z],...]`) point file.
    pub file: PathBuf,
    #[command(flatten)]
    pub solver: SolverFlags,
}

#[derive(Debug, Clone, Args)]
pub struct EncloseArgs {
    #[command(flatten)]
    pub input: FileArgs,
    /// Cross-check against the direction-grid bound with this many directions.
    #[arg(long)]
    pub oracle: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Apex heights of the bipyramid fixture, as `start:end:step`.
    #[arg(long = "h-grid")]
    pub h_grid: Option<String>,
    /// Number of random five-point sets in the cylinder-count sweep.
    #[arg(long, default_value_t = 1000)]
    pub sweep: usize,
    #[command(flatten)]
    pub solver: SolverFlags,
}

/// What a command produced: the text for stdout and stderr, and the exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn exit_code(err: &CylError) -> i32 {
    match err {
        CylError::InvalidInput(_) | CylError::WrongPointCount { .. } => EXIT_INPUT,
        CylError::RankDeficient { .. }
        | CylError::SingularT
        | CylError::SingularCovariance
        | CylError::CollinearPoints => EXIT_RANK_DEFICIENT,
        CylError::DuplicatePoints { .. } => EXIT_DUPLICATES,
        CylError::NoConvergence { .. }
        | CylError::NoCandidateFound { .. }
        | CylError::EigenTies
        | CylError::AllCoefficientsZero => EXIT_NO_CONVERGENCE,
    }
}

fn error_kind(err: &CylError) -> &'static str {
    match err {
        CylError::SingularCovariance => "SingularCovariance",
        CylError::SingularT => "SingularT",
        CylError::RankDeficient { .. } => "RankDeficient",
        CylError::WrongPointCount { .. } => "WrongPointCount",
        CylError::DuplicatePoints { .. } => "DuplicatePoints",
        CylError::NoConvergence { .. } => "NoConvergence",
        CylError::EigenTies => "EigenTies",
        CylError::AllCoefficientsZero => "AllCoefficientsZero",
        CylError::CollinearPoints => "CollinearPoints",
        CylError::NoCandidateFound { .. } => "NoCandidateFound",
        CylError::InvalidInput(_) => "InvalidInput",
    }
}

pub fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Fit(a) => run_file_command("fit", &a, cmd_fit),
        Command::Circ4(a) => run_file_command("circ4", &a, cmd_circ4),
        Command::Circ5(a) => run_file_command("circ5", &a, |ps, _, doc| cmd_circ5(ps, doc)),
        Command::Enclose(a) => {
            let oracle = a.oracle;
            run_file_command("enclose", &a.input, move |ps, cfg, doc| {
                cmd_enclose(ps, cfg, oracle, doc)
            })
        }
        Command::Verify(a) => cmd_verify(&a),
    }
}

fn emit(doc: &ResultDocument, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => doc.to_json(),
        OutputFormat::Text => render_text(doc),
    }
}

fn input_failure(err: &InputError) -> Outcome {
    Outcome {
        code: EXIT_INPUT,
        stdout: String::new(),
        stderr: format!("error: {err}\n"),
    }
}

fn run_file_command(
    name: &str,
    args: &FileArgs,
    body: impl FnOnce(&PointSet, &SolverConfig, &mut ResultDocument) -> Result<(), CylError>,
) -> Outcome {
    let cfg = args.solver.config();
    let file = match read_point_file(&args.file) {
        Ok(f) => f,
        Err(e) => return input_failure(&e),
    };
    let mut doc = ResultDocument::new(name, &cfg);
    let start = Instant::now();
    let result = cfg
        .validate()
        .and_then(|_| center_points(&file.points))
        .and_then(|ps| {
            let c = ps.centroid_offset;
            doc.input_summary = Some(InputSummary {
                n: ps.n(),
                hull_size: hull_vertices(&ps).len(),
                centroid: [c.x, c.y, c.z],
            });
            body(&ps, &cfg, &mut doc)
        });
    doc.timing.seconds = start.elapsed().as_secs_f64();
    let (code, stderr) = match result {
        Ok(()) => (EXIT_OK, String::new()),
        Err(e) => {
            doc.error = Some(ErrorEntry {
                kind: error_kind(&e).to_string(),
                message: e.to_string(),
            });
            (exit_code(&e), format!("error: {e}\n"))
        }
    };
    let mut stderr = stderr;
    for w in &doc.warnings {
        stderr.push_str(&format!("warning: {w}\n"));
    }
    Outcome {
        code,
        stdout: emit(&doc, args.solver.format),
        stderr,
    }
}

fn cmd_fit(ps: &PointSet, cfg: &SolverConfig, doc: &mut ResultDocument) -> Result<(), CylError> {
    if ps.n() < 5 {
        doc.warnings.push(format!(
            "{} points do not determine a best-fitting cylinder; at least 5 are recommended",
            ps.n()
        ));
    }
    let fit = fit_cylinder(ps, cfg)?;
    doc.cylinders
        .push(cylinder_entry(ps, &fit.cylinder, Vec::new()));
    doc.diag("variance", fit.variance);
    doc.diag("starts_converged", fit.n_starts_converged);
    doc.diag("distinct_minima", fit.distinct_minima);
    doc.diag("is_circumscribed", fit.is_circumscribed);
    doc.diag("underdetermined", fit.underdetermined);
    Ok(())
}

fn cmd_circ4(ps: &PointSet, cfg: &SolverConfig, doc: &mut ResultDocument) -> Result<(), CylError> {
    let set = min_circumscribed_4(ps, cfg)?;
    let mut radii: Vec<f64> = Vec::new();
    for m in &set.minima {
        let mut entry = cylinder_entry(ps, &m.cylinder, vec![0, 1, 2, 3]);
        entry.local_min = Some(m.local_min);
        entry.global_min = Some(m.global_min);
        doc.cylinders.push(entry);
        if !radii
            .iter()
            .any(|r| (r - m.cylinder.rho).abs() <= 1e-8 * ps.tol_scale())
        {
            radii.push(m.cylinder.rho);
        }
    }
    doc.diag("radii", radii);
    doc.diag("local_min_radii", set.local_min_radii(ps.tol_scale()));
    doc.diag(
        "hits",
        set.minima.iter().map(|m| m.hits).collect::<Vec<_>>(),
    );
    doc.diag("attempts", set.attempts);
    doc.diag("converged", set.converged);
    doc.warnings.extend(set.warnings);
    Ok(())
}

fn cmd_circ5(ps: &PointSet, doc: &mut ResultDocument) -> Result<(), CylError> {
    if ps.n() != 5 {
        return Err(CylError::WrongPointCount {
            expected: 5,
            got: ps.n(),
        });
    }
    let set = match circumscribed_5(ps) {
        Err(e @ CylError::DuplicatePoints { .. }) => {
            doc.verdict = Some(format!("{:?}", Verdict::DegenerateDuplicatePoints));
            return Err(e);
        }
        other => other?,
    };
    doc.verdict = Some(format!("{:?}", set.verdict));
    for cyl in &set.cylinders {
        doc.cylinders
            .push(cylinder_entry(ps, cyl, vec![0, 1, 2, 3, 4]));
    }
    let r = &set.reduction;
    doc.diag("m_eigenvalues", r.spectrum.eigenvalues);
    doc.diag("t", r.t.as_slice());
    doc.diag("alpha2", r.alpha2);
    doc.diag("polynomial", &r.poly);
    Ok(())
}

fn cmd_enclose(
    ps: &PointSet,
    cfg: &SolverConfig,
    oracle: Option<usize>,
    doc: &mut ResultDocument,
) -> Result<(), CylError> {
    let res = smallest_enclosing_cylinder(ps, cfg)?;
    doc.cylinders
        .push(cylinder_entry(ps, &res.cylinder, res.support.clone()));
    doc.diag("k", res.k);
    doc.diag("candidates_examined", res.candidates_examined);
    doc.diag("ties", res.ties);
    if let Some(resolution) = oracle {
        let bound = oracle_enclosing_radius(ps, resolution);
        doc.diag("oracle_resolution", resolution.max(8));
        doc.diag("oracle_radius", bound);
        doc.diag("oracle_gap", bound - res.cylinder.rho);
        doc.diag(
            "oracle_gap_over_scale",
            (bound - res.cylinder.rho) / ps.tol_scale(),
        );
    }
    Ok(())
}

fn cmd_verify(args: &VerifyArgs) -> Outcome {
    let cfg = args.solver.config();
    if let Err(e) = cfg.validate() {
        return Outcome {
            code: EXIT_INPUT,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        };
    }
    let grid = match &args.h_grid {
        Some(spec) => match verify::parse_h_grid(spec) {
            Ok(g) => g,
            Err(msg) => {
                return Outcome {
                    code: EXIT_INPUT,
                    stdout: String::new(),
                    stderr: format!("error: --h-grid: {msg}\n"),
                }
            }
        },
        None => verify::DEFAULT_H.to_vec(),
    };
    let start = Instant::now();
    let results = verify::run_all(&cfg, &grid, args.sweep, cfg.seed);
    let all_pass = results.iter().all(|r| r.passed);
    let stdout = match args.solver.format {
        OutputFormat::Json => {
            let doc = serde_json::json!({
                "command": "verify",
                "passed": all_pass,
                "fixtures": results,
                "timing": { "seconds": start.elapsed().as_secs_f64() },
                "config": document::ConfigEcho::from(&cfg),
            });
            serde_json::to_string_pretty(&doc).expect("serializable") + "\n"
        }
        OutputFormat::Text => {
            let width = results
                .iter()
                .map(|r| r.name.chars().count())
                .max()
                .unwrap_or(0);
            let mut s = String::new();
            for r in &results {
                let status = if r.passed { "PASS" } else { "FAIL" };
                s.push_str(&format!("{status}  {:<width$}  {}\n", r.name, r.detail));
            }
            s.push_str(&format!(
                "{} of {} fixtures passed\n",
                results.iter().filter(|r| r.passed).count(),
                results.len()
            ));
            s
        }
    };
    Outcome {
        code: if all_pass {
            EXIT_OK
        } else {
            EXIT_NO_CONVERGENCE
        },
        stdout,
        stderr: String::new(),
    }
}
