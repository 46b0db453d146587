//! Command-line driver: mesh generation, single optimization solves, and
//! convergence studies on the corner benchmark.

use clap::{Args, Parser, Subcommand};
use neumann_control::bench::{self, StudyConfig};
use neumann_control::control::Bounds;
use neumann_control::mesh::{build_sector_domain, export_mesh, generate_graded_mesh};
use neumann_control::optimizer::{check_discrete_optimality, sqp_solve, SqpConfig};
use neumann_control::problem::{ProblemSpec, ReactionPreset};
use neumann_control::Error;
use serde::Deserialize;
use std::f64::consts::PI;
use std::process::ExitCode;
use std::sync::Arc;

#[derive(Parser)]
#[command(
    name = "neumann-control",
    about = "Box-constrained Neumann boundary control on corner-graded meshes",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a graded mesh of the sector domain and write it to a file.
    Mesh(MeshArgs),
    /// Solve one control problem described by a JSON configuration file.
    Solve(SolveArgs),
    /// Run the benchmark convergence study over a mesh hierarchy.
    Study(StudyArgs),
}

#[derive(Args)]
struct MeshArgs {
    /// Opening angle at the singular corner, in radians.
    #[arg(long, default_value_t = 1.5 * PI)]
    omega: f64,
    /// Target mesh parameter.
    #[arg(long)]
    h: f64,
    /// Grading parameter at the singular corner (1.0 = uniform).
    #[arg(long, default_value_t = 0.5)]
    mu: f64,
    /// Grading disc radius.
    #[arg(long, default_value_t = 0.5)]
    radius: f64,
    /// Output path for the mesh text file.
    #[arg(long)]
    out: String,
}

#[derive(Args)]
struct SolveArgs {
    /// Path to the problem configuration (JSON).
    #[arg(long)]
    config: String,
    /// Target mesh parameter.
    #[arg(long)]
    h: f64,
    /// Grading parameter at the singular corner.
    #[arg(long, default_value_t = 0.5)]
    mu: f64,
    /// Optional output path for the optimal control (rows `edge value`).
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct StudyArgs {
    /// Opening angle at the singular corner, in radians.
    #[arg(long, default_value_t = 1.5 * PI)]
    omega: f64,
    /// Grading parameter at the singular corner.
    #[arg(long, default_value_t = 0.5)]
    mu: f64,
    /// Grading disc radius.
    #[arg(long, default_value_t = 0.5)]
    radius: f64,
    /// Number of refinement levels.
    #[arg(long, default_value_t = 5)]
    levels: usize,
    /// Mesh parameter of the coarsest level.
    #[arg(long, default_value_t = 0.5)]
    h0: f64,
    /// Output path for the report.
    #[arg(long)]
    out: String,
    /// Report format.
    #[arg(long, default_value = "csv", value_parser = ["csv", "json", "svg"])]
    format: String,
    /// Force a quasi-uniform hierarchy (mu = 1).
    #[arg(long)]
    uniform: bool,
    /// Disable the nested-iteration warm start between levels.
    #[arg(long)]
    cold_start: bool,
}

/// JSON problem description for `solve`.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SolveConfig {
    nu: f64,
    ua: f64,
    ub: f64,
    /// "linear", "cubic" or "affine:<c>".
    nonlinearity: String,
    /// "benchmark" (manufactured corner-singularity data) or "tracking"
    /// (y_d = 1, all other data zero).
    data: String,
}

fn parse_reaction(name: &str) -> Result<ReactionPreset, Error> {
    match name {
        "linear" => Ok(ReactionPreset::Linear),
        "cubic" => Ok(ReactionPreset::Cubic),
        other => {
            if let Some(c) = other.strip_prefix("affine:") {
                let c: f64 = c
                    .parse()
                    .map_err(|_| Error::Config(format!("bad affine constant in {other:?}")))?;
                Ok(ReactionPreset::Affine { c })
            } else {
                Err(Error::Config(format!("unknown nonlinearity {other:?}")))
            }
        }
    }
}

fn build_problem(cfg: &SolveConfig) -> Result<ProblemSpec, Error> {
    let reaction = Arc::new(parse_reaction(&cfg.nonlinearity)?);
    // validate bounds and nu early
    Bounds::new(cfg.ua, cfg.ub)?;
    match cfg.data.as_str() {
        "benchmark" => {
            let bench = bench::build_benchmark(1.5 * PI)?;
            let spec = ProblemSpec::new(reaction, bench.spec.y_d.clone(), cfg.nu, cfg.ua, cfg.ub)?
                .with_f(bench.spec.f.clone())
                .with_g1(bench.spec.g1.clone())
                .with_g2(bench.spec.g2.clone());
            Ok(spec)
        }
        "tracking" => ProblemSpec::new(reaction, Arc::new(|_| 1.0), cfg.nu, cfg.ua, cfg.ub),
        other => Err(Error::Config(format!("unknown data preset {other:?}"))),
    }
}

fn grading(omega: f64, mu: f64) -> Result<(Vec<f64>, Vec<f64>), Error> {
    let domain = build_sector_domain(omega)?;
    let mus = domain
        .corners
        .iter()
        .map(|c| if c.interior_angle > PI + 1e-12 { mu } else { 1.0 })
        .collect();
    let radii = vec![0.5; domain.corners.len()];
    Ok((mus, radii))
}

fn run_mesh(args: &MeshArgs) -> Result<(), Error> {
    let domain = build_sector_domain(args.omega)?;
    let mus: Vec<f64> = domain
        .corners
        .iter()
        .map(|c| if c.interior_angle > PI + 1e-12 { args.mu } else { 1.0 })
        .collect();
    let radii = vec![args.radius; domain.corners.len()];
    let mesh = generate_graded_mesh(&domain, args.h, &mus, &radii)?;
    std::fs::write(&args.out, export_mesh(&mesh))?;
    eprintln!(
        "wrote {} ({} vertices, {} triangles, {} boundary edges)",
        args.out,
        mesh.num_vertices(),
        mesh.num_triangles(),
        mesh.num_boundary_edges()
    );
    Ok(())
}

fn run_solve(args: &SolveArgs) -> Result<(), Error> {
    let text = std::fs::read_to_string(&args.config)?;
    let cfg: SolveConfig =
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("bad config: {e}")))?;
    let spec = build_problem(&cfg)?;
    spec.validate_reaction()?;
    let (mus, radii) = grading(1.5 * PI, args.mu)?;
    let domain = build_sector_domain(1.5 * PI)?;
    let mesh = Arc::new(generate_graded_mesh(&domain, args.h, &mus, &radii)?);
    let sol = sqp_solve(&spec, &mesh, None, &SqpConfig::default())?;
    for rec in &sol.log {
        println!("{}", rec.to_json_line());
    }
    let report = check_discrete_optimality(&spec, &sol.u, &sol.p, 1e-8);
    eprintln!(
        "optimality: pass = {}, max violation = {:.3e}",
        report.pass, report.max_violation
    );
    if let Some(out) = &args.out {
        std::fs::write(out, sol.u.to_text())?;
        eprintln!("wrote {out}");
    }
    Ok(())
}

fn run_study(args: &StudyArgs) -> Result<(), Error> {
    let config = StudyConfig {
        omega: args.omega,
        mu: if args.uniform { 1.0 } else { args.mu },
        radius: args.radius,
        levels: args.levels,
        h0: args.h0,
        cold_start: args.cold_start,
        sqp: SqpConfig::default(),
    };
    let report = bench::run_convergence_study(&config)?;
    std::fs::write(&args.out, report.emit(&args.format)?)?;
    eprintln!("wrote {} ({} levels, format {})", args.out, args.levels, args.format);
    Ok(())
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::SqpNonconvergence { .. }
        | Error::NewtonNonconvergence { .. }
        | Error::NewtonDivergence(_)
        | Error::PdasCycling(_)
        | Error::SolverBreakdown(_)
        | Error::Indefinite(_) => 2,
        Error::Config(_) | Error::Parse(_) | Error::InvalidBounds { .. } | Error::InvalidAngle(_) => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Mesh(args) => run_mesh(args),
        Command::Solve(args) => run_solve(args),
        Command::Study(args) => run_study(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
