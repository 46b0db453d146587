//! P1 finite element core: assembly of stiffness, weighted mass and boundary
//! operators, load integration, direct SPD solves and L2 error evaluation.

use crate::error::{Error, Result};
use crate::geometry::{self, Point};
use crate::mesh::GradedMesh;
use crate::quadrature;
use faer::prelude::*;
use faer::sparse::linalg::solvers::{Llt, SymbolicLlt};
use faer::sparse::{SparseColMat, Triplet};
use std::sync::Arc;

/// A P1 finite element function: one nodal value per mesh vertex.
#[derive(Debug, Clone)]
pub struct FeFunction {
    pub mesh: Arc<GradedMesh>,
    pub values: Vec<f64>,
}

impl FeFunction {
    pub fn new(mesh: Arc<GradedMesh>, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), mesh.num_vertices());
        FeFunction { mesh, values }
    }

    pub fn zeros(mesh: Arc<GradedMesh>) -> Self {
        let n = mesh.num_vertices();
        FeFunction { mesh, values: vec![0.0; n] }
    }

    pub fn constant(mesh: Arc<GradedMesh>, c: f64) -> Self {
        let n = mesh.num_vertices();
        FeFunction { mesh, values: vec![c; n] }
    }

    /// Nodal interpolant of a pointwise function.
    pub fn interpolate(mesh: Arc<GradedMesh>, f: impl Fn(Point) -> f64) -> Self {
        let values = mesh.vertices.iter().map(|&v| f(v)).collect();
        FeFunction { mesh, values }
    }

    /// Evaluation inside triangle `t` by barycentric interpolation.
    pub fn eval_in_triangle(&self, t: usize, p: Point) -> f64 {
        let [i, j, k] = self.mesh.triangles[t];
        let [a, b, c] = self.mesh.triangle_points(t);
        let area = geometry::signed_area(a, b, c);
        let la = geometry::signed_area(p, b, c) / area;
        let lb = geometry::signed_area(a, p, c) / area;
        let lc = 1.0 - la - lb;
        la * self.values[i] + lb * self.values[j] + lc * self.values[k]
    }

    /// Evaluation on boundary edge `e` at parameter `t` in [0, 1].
    pub fn eval_on_edge(&self, e: usize, t: f64) -> f64 {
        let [a, b] = self.mesh.boundary_edges[e].vertices;
        (1.0 - t) * self.values[a] + t * self.values[b]
    }

    pub fn max_abs_diff(&self, other: &FeFunction) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// A square sparse operator over the vertex dofs.
pub struct SparseOperator {
    pub n: usize,
    pub mat: SparseColMat<usize, f64>,
    pub symmetric: bool,
    /// Set when a weighted assembly saw a negative weight; the operator may
    /// lose definiteness.
    pub definiteness_warning: bool,
}

impl SparseOperator {
    fn from_triplets(n: usize, triplets: &[Triplet<usize, usize, f64>], symmetric: bool) -> Self {
        let mat = SparseColMat::try_new_from_triplets(n, n, triplets)
            .expect("triplet indices in range");
        SparseOperator { n, mat, symmetric, definiteness_warning: false }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let xm = Mat::from_fn(self.n, 1, |i, _| x[i]);
        let y = &self.mat * &xm;
        (0..self.n).map(|i| y[(i, 0)]).collect()
    }

    /// Sum of two operators on the same dof set.
    pub fn add(&self, other: &SparseOperator) -> SparseOperator {
        assert_eq!(self.n, other.n);
        SparseOperator {
            n: self.n,
            mat: &self.mat + &other.mat,
            symmetric: self.symmetric && other.symmetric,
            definiteness_warning: self.definiteness_warning || other.definiteness_warning,
        }
    }

    /// Sum of all entries (integrates 1 against 1 for mass-type operators).
    pub fn entry_sum(&self) -> f64 {
        let ones = vec![1.0; self.n];
        self.matvec(&ones).iter().sum()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        self.matvec(&vec![1.0; self.n])
    }
}

/// A reusable Cholesky factorization of an SPD operator.
pub struct SpdFactor {
    n: usize,
    llt: Llt<usize, f64>,
}

impl SpdFactor {
    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let b = Mat::from_fn(self.n, 1, |i, _| rhs[i]);
        let x = self.llt.solve(&b);
        (0..self.n).map(|i| x[(i, 0)]).collect()
    }
}

/// Factorizes a symmetric positive definite operator for repeated solves.
pub fn factorize_spd(op: &SparseOperator) -> Result<SpdFactor> {
    let sym = SymbolicLlt::try_new(op.mat.symbolic(), faer::Side::Lower)
        .map_err(|e| Error::SolverBreakdown(format!("symbolic factorization: {e:?}")))?;
    let llt = Llt::try_new_with_symbolic(sym, op.mat.rb(), faer::Side::Lower)
        .map_err(|e| Error::SolverBreakdown(format!("matrix not positive definite: {e:?}")))?;
    Ok(SpdFactor { n: op.n, llt })
}

/// Direct solve of an SPD system with a residual guarantee
/// ||Ax - b|| <= 1e-10 ||b||.
pub fn solve_spd(op: &SparseOperator, rhs: &[f64]) -> Result<Vec<f64>> {
    let factor = factorize_spd(op)?;
    let x = factor.solve(rhs);
    let r = op.matvec(&x);
    let norm_b = rhs.iter().map(|v| v * v).sum::<f64>().sqrt();
    let norm_r = r
        .iter()
        .zip(rhs)
        .map(|(ax, b)| (ax - b) * (ax - b))
        .sum::<f64>()
        .sqrt();
    if !norm_r.is_finite() || norm_r > 1e-10 * norm_b.max(1e-300) {
        return Err(Error::SolverBreakdown(format!(
            "residual {norm_r:.3e} exceeds tolerance for rhs norm {norm_b:.3e}"
        )));
    }
    Ok(x)
}

fn p1_gradients(points: &[Point; 3]) -> ([Point; 3], f64) {
    let [a, b, c] = *points;
    let area = geometry::signed_area(a, b, c);
    let g = [
        [(b[1] - c[1]) / (2.0 * area), (c[0] - b[0]) / (2.0 * area)],
        [(c[1] - a[1]) / (2.0 * area), (a[0] - c[0]) / (2.0 * area)],
        [(a[1] - b[1]) / (2.0 * area), (b[0] - a[0]) / (2.0 * area)],
    ];
    (g, area)
}

/// Exact P1 stiffness matrix of the bilinear form grad-grad.
pub fn assemble_stiffness(mesh: &GradedMesh) -> Result<SparseOperator> {
    let n = mesh.num_vertices();
    let mut triplets = Vec::with_capacity(9 * mesh.num_triangles());
    for t in 0..mesh.num_triangles() {
        let points = mesh.triangle_points(t);
        let (grads, area) = p1_gradients(&points);
        if !(area > 0.0) || !area.is_finite() {
            return Err(Error::Assembly(format!("degenerate triangle {t} (area {area})")));
        }
        let idx = mesh.triangles[t];
        for i in 0..3 {
            for j in 0..3 {
                triplets.push(Triplet::new(
                    idx[i],
                    idx[j],
                    area * geometry::dot(grads[i], grads[j]),
                ));
            }
        }
    }
    Ok(SparseOperator::from_triplets(n, &triplets, true))
}

/// Mass matrix with a per-quadrature-point weight; `weight(t, x)` receives
/// the owning triangle and the physical point. Degree-4 quadrature.
pub fn assemble_weighted_mass(
    mesh: &GradedMesh,
    weight: impl Fn(usize, Point) -> f64,
) -> SparseOperator {
    let rule = quadrature::triangle_degree4();
    let n = mesh.num_vertices();
    let mut negative = false;
    let mut triplets = Vec::with_capacity(9 * mesh.num_triangles());
    for t in 0..mesh.num_triangles() {
        let [a, b, c] = mesh.triangle_points(t);
        let area = geometry::signed_area(a, b, c);
        let idx = mesh.triangles[t];
        let mut local = [[0.0f64; 3]; 3];
        for (bary, w) in rule.points.iter().zip(&rule.weights) {
            let x = [
                bary[0] * a[0] + bary[1] * b[0] + bary[2] * c[0],
                bary[0] * a[1] + bary[1] * b[1] + bary[2] * c[1],
            ];
            let wx = weight(t, x);
            if wx < 0.0 {
                negative = true;
            }
            for i in 0..3 {
                for j in 0..3 {
                    local[i][j] += w * area * wx * bary[i] * bary[j];
                }
            }
        }
        for i in 0..3 {
            for j in 0..3 {
                triplets.push(Triplet::new(idx[i], idx[j], local[i][j]));
            }
        }
    }
    let mut op = SparseOperator::from_triplets(n, &triplets, true);
    op.definiteness_warning = negative;
    op
}

/// Plain mass matrix (weight 1).
pub fn assemble_mass(mesh: &GradedMesh) -> SparseOperator {
    assemble_weighted_mass(mesh, |_, _| 1.0)
}

/// 1D P1 mass matrix on the boundary: per edge (|E|/6) [[2,1],[1,2]].
pub fn assemble_boundary_mass(mesh: &GradedMesh) -> SparseOperator {
    let n = mesh.num_vertices();
    let mut triplets = Vec::with_capacity(4 * mesh.num_boundary_edges());
    for e in 0..mesh.num_boundary_edges() {
        let [a, b] = mesh.boundary_edges[e].vertices;
        let len = mesh.edge_length(e);
        triplets.push(Triplet::new(a, a, len / 3.0));
        triplets.push(Triplet::new(b, b, len / 3.0));
        triplets.push(Triplet::new(a, b, len / 6.0));
        triplets.push(Triplet::new(b, a, len / 6.0));
    }
    SparseOperator::from_triplets(n, &triplets, true)
}

/// Load vector with entries given by a per-triangle integrand:
/// `g(t, x)` is integrated against every hat function with the degree-4 rule.
pub fn integrate_volume_term(
    mesh: &GradedMesh,
    g: impl Fn(usize, Point) -> f64,
) -> Result<Vec<f64>> {
    let rule = quadrature::triangle_degree4();
    let mut load = vec![0.0; mesh.num_vertices()];
    for t in 0..mesh.num_triangles() {
        let [a, b, c] = mesh.triangle_points(t);
        let area = geometry::signed_area(a, b, c);
        let idx = mesh.triangles[t];
        for (bary, w) in rule.points.iter().zip(&rule.weights) {
            let x = [
                bary[0] * a[0] + bary[1] * b[0] + bary[2] * c[0],
                bary[0] * a[1] + bary[1] * b[1] + bary[2] * c[1],
            ];
            let gx = g(t, x);
            if !gx.is_finite() {
                return Err(Error::Evaluation(format!(
                    "non-finite integrand value at quadrature point ({}, {})",
                    x[0], x[1]
                )));
            }
            for i in 0..3 {
                load[idx[i]] += w * area * gx * bary[i];
            }
        }
    }
    Ok(load)
}

/// Load vector of a pointwise volume density f.
pub fn integrate_volume_load(mesh: &GradedMesh, f: impl Fn(Point) -> f64) -> Result<Vec<f64>> {
    integrate_volume_term(mesh, |_, x| f(x))
}

/// Boundary load of a smooth density g via 3-point Gauss per edge.
pub fn integrate_boundary_load(mesh: &GradedMesh, g: impl Fn(Point) -> f64) -> Vec<f64> {
    let rule = quadrature::edge_gauss3();
    let mut load = vec![0.0; mesh.num_vertices()];
    for e in 0..mesh.num_boundary_edges() {
        let [a, b] = mesh.boundary_edges[e].vertices;
        let len = mesh.edge_length(e);
        for (&t, &w) in rule.points.iter().zip(&rule.weights) {
            let x = mesh.edge_point(e, t);
            let gx = g(x);
            load[a] += w * len * gx * (1.0 - t);
            load[b] += w * len * gx * t;
        }
    }
    load
}

/// Boundary load of an edgewise-constant control: exact, value * |E| / 2 to
/// each endpoint.
pub fn integrate_boundary_control(mesh: &GradedMesh, edge_values: &[f64]) -> Vec<f64> {
    assert_eq!(edge_values.len(), mesh.num_boundary_edges());
    let mut load = vec![0.0; mesh.num_vertices()];
    for e in 0..mesh.num_boundary_edges() {
        let [a, b] = mesh.boundary_edges[e].vertices;
        let half = 0.5 * edge_values[e] * mesh.edge_length(e);
        load[a] += half;
        load[b] += half;
    }
    load
}

fn subdivide_triangle(points: [Point; 3], depth: usize, out: &mut Vec<[Point; 3]>) {
    if depth == 0 {
        out.push(points);
        return;
    }
    let [a, b, c] = points;
    let mid = |p: Point, q: Point| [0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])];
    let (ab, bc, ca) = (mid(a, b), mid(b, c), mid(c, a));
    subdivide_triangle([a, ab, ca], depth - 1, out);
    subdivide_triangle([ab, b, bc], depth - 1, out);
    subdivide_triangle([ca, bc, c], depth - 1, out);
    subdivide_triangle([ab, bc, ca], depth - 1, out);
}

/// L2 norm over the domain of (exact - fe), with degree-5 quadrature on
/// subdivided triangles; triangles touching a graded corner are subdivided
/// more deeply because the exact solution may have an unbounded gradient
/// there.
pub fn domain_l2_error(
    mesh: &GradedMesh,
    fe: &FeFunction,
    exact: impl Fn(Point) -> f64,
) -> f64 {
    let rule = quadrature::triangle_degree5();
    let mut total = 0.0;
    let mut cells = Vec::new();
    for t in 0..mesh.num_triangles() {
        let depth = if mesh.touches_singular_corner(t) { 3 } else { 1 };
        cells.clear();
        subdivide_triangle(mesh.triangle_points(t), depth, &mut cells);
        for cell in &cells {
            let [a, b, c] = *cell;
            let area = geometry::signed_area(a, b, c);
            for (bary, w) in rule.points.iter().zip(&rule.weights) {
                let x = [
                    bary[0] * a[0] + bary[1] * b[0] + bary[2] * c[0],
                    bary[0] * a[1] + bary[1] * b[1] + bary[2] * c[1],
                ];
                let diff = exact(x) - fe.eval_in_triangle(t, x);
                total += w * area * diff * diff;
            }
        }
    }
    total.sqrt()
}

/// Splits [0, 1] at the given interior breakpoints (sorted, deduplicated)
/// and refines geometrically towards an endpoint that sits on a corner.
fn edge_partition(breaks: &[f64], refine_start: bool, refine_end: bool) -> Vec<(f64, f64)> {
    let mut knots = vec![0.0, 1.0];
    knots.extend(breaks.iter().copied().filter(|&t| t > 1e-14 && t < 1.0 - 1e-14));
    knots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    knots.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
    let mut segments = Vec::new();
    for w in knots.windows(2) {
        segments.push((w[0], w[1]));
    }
    // geometric refinement toward singular endpoints
    let levels = 14;
    if refine_start {
        let (t0, t1) = segments.remove(0);
        let mut right = t1;
        for _ in 0..levels {
            let left = t0 + 0.5 * (right - t0);
            segments.insert(0, (left, right));
            right = left;
        }
        segments.insert(0, (t0, right));
    }
    if refine_end {
        let (t0, t1) = segments.pop().unwrap();
        let mut left = t0;
        for _ in 0..levels {
            let right = t1 - 0.5 * (t1 - left);
            segments.push((left, right));
            left = right;
        }
        segments.push((left, t1));
    }
    segments
}

/// L2 norm over the boundary of (exact - approx), where `approx(e, t)`
/// evaluates the discrete object on edge `e` at parameter `t`, and
/// `breakpoints(e)` lists parameters where the integrand has kinks.
/// Seven-point Gauss per sub-segment; edges touching a corner are refined
/// geometrically toward it.
pub fn boundary_l2_error(
    mesh: &GradedMesh,
    approx: impl Fn(usize, f64) -> f64,
    exact: impl Fn(Point) -> f64,
    breakpoints: impl Fn(usize) -> Vec<f64>,
) -> f64 {
    let rule = quadrature::edge_gauss7();
    let corner_positions: Vec<Point> = mesh.domain.positions();
    let at_corner = |p: Point| corner_positions.iter().any(|&c| geometry::dist(p, c) < 1e-12);
    let mut total = 0.0;
    for e in 0..mesh.num_boundary_edges() {
        let len = mesh.edge_length(e);
        let refine_start = at_corner(mesh.edge_point(e, 0.0));
        let refine_end = at_corner(mesh.edge_point(e, 1.0));
        for (t0, t1) in edge_partition(&breakpoints(e), refine_start, refine_end) {
            let dl = (t1 - t0) * len;
            for (&q, &w) in rule.points.iter().zip(&rule.weights) {
                let t = t0 + q * (t1 - t0);
                let diff = exact(mesh.edge_point(e, t)) - approx(e, t);
                total += w * dl * diff * diff;
            }
        }
    }
    total.sqrt()
}

/// Serializes a dof vector as one value per line (debugging aid).
pub fn format_vector(values: &[f64]) -> String {
    let mut out = String::new();
    for v in values {
        out.push_str(&format!("{v:.17e}\n"));
    }
    out
}

pub fn parse_vector(text: &str) -> Result<Vec<f64>> {
    text.split_whitespace()
        .map(|s| s.parse::<f64>().map_err(|_| Error::Parse(format!("bad number {s}"))))
        .collect()
}
