//! Validates the reduced gradient and Hessian of the control problem
//! against central finite differences of the reduced cost.
//!
//! Usage: cargo run --release --example gradient_check

use neumann_control::bench::build_benchmark;
use neumann_control::control::{midpoint_interpolate_rh, BoundaryControl};
use neumann_control::mesh::generate_graded_mesh;
use neumann_control::pde::{reduced_derivatives, Linearization, NewtonConfig};
use std::f64::consts::PI;
use std::sync::Arc;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let bench = build_benchmark(1.5 * PI)?;
    let m = bench.domain.corners.len();
    let mesh = Arc::new(generate_graded_mesh(
        &bench.domain,
        0.25,
        &vec![1.0; m],
        &vec![0.5; m],
    )?);
    let cfg = NewtonConfig { tol: 1e-13, max_iter: 30 };
    let u = midpoint_interpolate_rh(&mesh, |p| 0.3 * p[0] - 0.1 * p[1]);
    let v = midpoint_interpolate_rh(&mesh, |p| (3.0 * p[0]).sin() + 0.5);

    let der = reduced_derivatives(&bench.spec, &u, None, &cfg)?;
    let directional = der.gradient.inner(&v);
    println!("cost J_h(u)           = {:.10e}", der.cost);
    println!("gradient  j'(u)[v]    = {:.10e}", directional);
    for eps in [1e-4, 1e-5, 1e-6] {
        let mut up = u.clone();
        up.axpy(eps, &v);
        let mut um = u.clone();
        um.axpy(-eps, &v);
        let jp = reduced_derivatives(&bench.spec, &up, Some(&der.y), &cfg)?.cost;
        let jm = reduced_derivatives(&bench.spec, &um, Some(&der.y), &cfg)?.cost;
        let fd = (jp - jm) / (2.0 * eps);
        println!(
            "  eps = {eps:.0e}: FD = {fd:.10e}, rel gap = {:.2e}",
            (fd - directional).abs() / directional.abs()
        );
    }

    let lin = Linearization::new(&bench.spec, der.y.clone())?;
    let w: BoundaryControl = midpoint_interpolate_rh(&mesh, |p| p[1].cos());
    let hvw = lin.hessian_bilinear(&bench.spec, &v, &w)?;
    println!("Hessian   j''(u)[v,w] = {hvw:.10e}");
    for eps in [1e-3, 1e-4] {
        let mut up = u.clone();
        up.axpy(eps, &v);
        let gp = reduced_derivatives(&bench.spec, &up, Some(&der.y), &cfg)?.gradient;
        let mut um = u.clone();
        um.axpy(-eps, &v);
        let gm = reduced_derivatives(&bench.spec, &um, Some(&der.y), &cfg)?.gradient;
        let mut diff = gp;
        diff.axpy(-1.0, &gm);
        let fd = diff.inner(&w) / (2.0 * eps);
        println!(
            "  eps = {eps:.0e}: FD = {fd:.10e}, abs gap = {:.2e}",
            (fd - hvw).abs()
        );
    }
    Ok(())
}
