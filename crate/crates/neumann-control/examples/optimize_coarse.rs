//! Solves the box-constrained benchmark control problem on a coarse graded
//! mesh with the SQP / primal-dual active set solver, printing the
//! machine-readable iteration log and the a-posteriori optimality check.
//!
//! Usage: cargo run --release --example optimize_coarse [h]

use neumann_control::bench::build_benchmark;
use neumann_control::mesh::generate_graded_mesh;
use neumann_control::optimizer::{check_discrete_optimality, sqp_solve, SqpConfig};
use std::f64::consts::PI;
use std::sync::Arc;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let h: f64 = std::env::args().nth(1).map_or(Ok(0.125), |s| s.parse())?;
    let bench = build_benchmark(1.5 * PI)?;
    let m = bench.domain.corners.len();
    let mut mus = vec![1.0; m];
    mus[0] = 0.5;
    let mesh = Arc::new(generate_graded_mesh(&bench.domain, h, &mus, &vec![0.5; m])?);
    eprintln!(
        "optimizing on {} vertices / {} boundary edges",
        mesh.num_vertices(),
        mesh.num_boundary_edges()
    );
    let sol = sqp_solve(&bench.spec, &mesh, None, &SqpConfig::default())?;
    for rec in &sol.log {
        println!("{}", rec.to_json_line());
    }
    let report = check_discrete_optimality(&bench.spec, &sol.u, &sol.p, 1e-8);
    eprintln!(
        "optimality check: pass = {}, max violation = {:.3e}, active edges = {} lower / {} upper",
        report.pass, report.max_violation, report.active_lower, report.active_upper
    );
    Ok(())
}
