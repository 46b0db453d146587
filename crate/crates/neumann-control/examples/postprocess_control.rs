//! Demonstrates the postprocessing step: the raw piecewise-constant optimal
//! control converges at a reduced order, while the clamped adjoint trace
//! recovers second order on graded meshes.
//!
//! Usage: cargo run --release --example postprocess_control

use neumann_control::bench::{build_benchmark, BENCH_UA, BENCH_UB};
use neumann_control::control::postprocess;
use neumann_control::fem::boundary_l2_error;
use neumann_control::mesh::generate_graded_mesh;
use neumann_control::optimizer::{sqp_solve, SqpConfig};
use std::f64::consts::PI;
use std::sync::Arc;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let bench = build_benchmark(1.5 * PI)?;
    let m = bench.domain.corners.len();
    let mut mus = vec![1.0; m];
    mus[0] = 0.5;

    println!("{:>8} {:>14} {:>14}", "h", "raw err", "postprocessed");
    let mut prev: Option<(f64, f64)> = None;
    for k in 1..=4 {
        let h = 0.5f64.powi(k);
        let mesh = Arc::new(generate_graded_mesh(&bench.domain, h, &mus, &vec![0.5; m])?);
        let sol = sqp_solve(&bench.spec, &mesh, None, &SqpConfig::default())?;
        let pp = postprocess(&sol.p, bench.spec.nu, BENCH_UA, BENCH_UB)?;
        let exact_u = bench.exact_u.clone();
        let raw = boundary_l2_error(
            &mesh,
            |e, _t| sol.u.values[e],
            |p| exact_u(p),
            |_| Vec::new(),
        );
        let exact_u = bench.exact_u.clone();
        let improved = boundary_l2_error(
            &mesh,
            |e, t| pp.eval_on_edge(e, t),
            |p| exact_u(p),
            |e| pp.kink_params(e),
        );
        print!("{h:>8.4} {raw:>14.6e} {improved:>14.6e}");
        if let Some((r0, i0)) = prev {
            print!(
                "   orders: {:.2} vs {:.2}",
                (r0 / raw).ln() / 2f64.ln(),
                (i0 / improved).ln() / 2f64.ln()
            );
        }
        println!();
        prev = Some((raw, improved));
    }
    Ok(())
}
