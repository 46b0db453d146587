//! Solves the semilinear state equation of the corner benchmark with the
//! exact optimal control as boundary data and reports the Newton history
//! and the L2 error against the exact state.
//!
//! Usage: cargo run --release --example solve_state [h]

use neumann_control::bench::build_benchmark;
use neumann_control::control::l2_project_qh;
use neumann_control::fem::domain_l2_error;
use neumann_control::mesh::generate_graded_mesh;
use neumann_control::pde::{solve_state_detailed, NewtonConfig};
use std::f64::consts::PI;
use std::sync::Arc;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let h: f64 = std::env::args().nth(1).map_or(Ok(0.125), |s| s.parse())?;
    let bench = build_benchmark(1.5 * PI)?;
    let m = bench.domain.corners.len();
    let mut mus = vec![1.0; m];
    mus[0] = 0.5;
    let mesh = Arc::new(generate_graded_mesh(&bench.domain, h, &mus, &vec![0.5; m])?);
    println!("mesh: {} vertices, h = {h}", mesh.num_vertices());

    let exact_u = bench.exact_u.clone();
    let u = l2_project_qh(&mesh, move |p| exact_u(p));
    let result = solve_state_detailed(&bench.spec, &u, None, &NewtonConfig::default())?;
    println!("Newton converged in {} iterations:", result.iterations);
    for (k, r) in result.residuals.iter().enumerate() {
        println!("  iter {k}: residual {r:.3e}");
    }
    let err = domain_l2_error(&mesh, &result.y, |p| (bench.exact_y)(p));
    println!("state L2 error vs exact solution: {err:.6e}");
    Ok(())
}
