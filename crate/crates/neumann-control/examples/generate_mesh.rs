//! Generates a corner-graded triangulation of the L-shaped domain,
//! validates the grading condition, and writes the mesh to a text file.
//!
//! Usage: cargo run --example generate_mesh [h] [mu] [out.txt]

use neumann_control::mesh::{
    build_sector_domain, export_mesh, generate_graded_mesh, validate_grading,
};
use std::f64::consts::PI;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let h: f64 = args.next().map_or(Ok(0.125), |s| s.parse())?;
    let mu: f64 = args.next().map_or(Ok(0.5), |s| s.parse())?;
    let out = args.next();

    let domain = build_sector_domain(1.5 * PI)?;
    let m = domain.corners.len();
    // grade only the reentrant corner at the origin
    let mut mus = vec![1.0; m];
    mus[0] = mu;
    let radii = vec![0.5; m];
    let mesh = generate_graded_mesh(&domain, h, &mus, &radii)?;
    println!(
        "mesh: {} vertices, {} triangles, {} boundary edges",
        mesh.num_vertices(),
        mesh.num_triangles(),
        mesh.num_boundary_edges()
    );
    let smallest = (0..mesh.num_triangles())
        .map(|t| mesh.triangle_diameter(t))
        .fold(f64::INFINITY, f64::min);
    println!("smallest triangle diameter: {smallest:.3e} (h = {h}, mu = {mu})");

    let report = validate_grading(&mesh, &mus, &radii);
    println!(
        "grading certificate: pass = {}, worst ratio = {:.3} (triangle {})",
        report.pass, report.worst_ratio, report.worst_triangle
    );
    if let Some(path) = out {
        std::fs::write(&path, export_mesh(&mesh))?;
        println!("wrote {path}");
    }
    Ok(())
}
