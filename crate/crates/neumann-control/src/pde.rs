//! Semilinear state solver (Newton), linearized state and adjoint solves,
//! the reduced cost, gradient and Hessian of the control problem.

use crate::control::{self, BoundaryControl};
use crate::error::{Error, Result};
use crate::fem::{self, FeFunction, SparseOperator, SpdFactor};
use crate::mesh::GradedMesh;
use crate::problem::ProblemSpec;
use crate::quadrature;
use std::sync::Arc;

/// Newton iteration parameters for the semilinear state equation.
#[derive(Debug, Clone, Copy)]
pub struct NewtonConfig {
    /// Residual tolerance in the Euclidean norm of the discrete residual.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        NewtonConfig { tol: 1e-11, max_iter: 30 }
    }
}

/// Outcome of a Newton solve, with the residual history for diagnostics.
#[derive(Debug, Clone)]
pub struct NewtonResult {
    pub y: FeFunction,
    pub residuals: Vec<f64>,
    pub iterations: usize,
}

fn vec_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Right-hand side of the state equation: volume load of f plus boundary
/// loads of the control u and the Neumann offset g1.
fn state_rhs(spec: &ProblemSpec, u: &BoundaryControl) -> Result<Vec<f64>> {
    let mesh = &u.mesh;
    let mut rhs = fem::integrate_volume_load(mesh, |x| (spec.f)(x))?;
    let bu = fem::integrate_boundary_control(mesh, &u.values);
    let bg = fem::integrate_boundary_load(mesh, |x| (spec.g1)(x));
    for i in 0..rhs.len() {
        rhs[i] += bu[i] + bg[i];
    }
    Ok(rhs)
}

/// Solves the discrete semilinear state equation
///   a(y, v) + (d(x, y), v) = (f, v) + <u + g1, v>_Gamma
/// by a plain Newton iteration on the residual, with the Jacobian
/// K + M_{d_y(y)} refactorized every step.
pub fn solve_state(
    spec: &ProblemSpec,
    u: &BoundaryControl,
    warm_start: Option<&FeFunction>,
    cfg: &NewtonConfig,
) -> Result<FeFunction> {
    Ok(solve_state_detailed(spec, u, warm_start, cfg)?.y)
}

/// As [`solve_state`] but returns the residual history.
pub fn solve_state_detailed(
    spec: &ProblemSpec,
    u: &BoundaryControl,
    warm_start: Option<&FeFunction>,
    cfg: &NewtonConfig,
) -> Result<NewtonResult> {
    let mesh = u.mesh.clone();
    let stiffness = fem::assemble_stiffness(&mesh)?;
    let rhs = state_rhs(spec, u)?;
    let mut y = match warm_start {
        Some(y0) => y0.clone(),
        None => FeFunction::zeros(mesh.clone()),
    };
    let mut residuals = Vec::new();
    for it in 0..=cfg.max_iter {
        let reaction = fem::integrate_volume_term(&mesh, |t, x| {
            spec.reaction.d(x, y.eval_in_triangle(t, x))
        })?;
        let ky = stiffness.matvec(&y.values);
        let residual: Vec<f64> = (0..rhs.len())
            .map(|i| ky[i] + reaction[i] - rhs[i])
            .collect();
        let rnorm = vec_norm(&residual);
        if !rnorm.is_finite() {
            return Err(Error::NewtonDivergence(it));
        }
        residuals.push(rnorm);
        if rnorm <= cfg.tol {
            return Ok(NewtonResult { y, residuals, iterations: it });
        }
        if it == cfg.max_iter {
            break;
        }
        let mass = fem::assemble_weighted_mass(&mesh, |t, x| {
            spec.reaction.d_y(x, y.eval_in_triangle(t, x))
        });
        let jac = stiffness.add(&mass);
        let neg_res: Vec<f64> = residual.iter().map(|r| -r).collect();
        let delta = fem::solve_spd(&jac, &neg_res)?;
        for (yi, di) in y.values.iter_mut().zip(&delta) {
            *yi += di;
        }
    }
    Err(Error::NewtonNonconvergence {
        iterations: cfg.max_iter,
        history: residuals,
    })
}

/// The state equation linearized at a state y, together with the adjoint
/// state. The factorization of K + M_{d_y(y)} is computed once and reused
/// for every linearized, adjoint and Hessian solve at this point.
pub struct Linearization {
    pub mesh: Arc<GradedMesh>,
    pub y: FeFunction,
    pub p: FeFunction,
    operator: SparseOperator,
    factor: SpdFactor,
}

impl Linearization {
    /// Builds the linearization at `y` and solves the adjoint equation
    ///   a(p, v) + (d_y(y) p, v) = (y - y_d, v) + <g2, v>_Gamma.
    pub fn new(spec: &ProblemSpec, y: FeFunction) -> Result<Self> {
        let mesh = y.mesh.clone();
        let stiffness = fem::assemble_stiffness(&mesh)?;
        let mass = fem::assemble_weighted_mass(&mesh, |t, x| {
            spec.reaction.d_y(x, y.eval_in_triangle(t, x))
        });
        let operator = stiffness.add(&mass);
        let factor = fem::factorize_spd(&operator)?;
        let mut rhs = fem::integrate_volume_term(&mesh, |t, x| {
            y.eval_in_triangle(t, x) - (spec.y_d)(x)
        })?;
        let bg = fem::integrate_boundary_load(&mesh, |x| (spec.g2)(x));
        for i in 0..rhs.len() {
            rhs[i] += bg[i];
        }
        let p = FeFunction::new(mesh.clone(), factor.solve(&rhs));
        Ok(Linearization { mesh, y, p, operator, factor })
    }

    /// Solves the linearized state equation with boundary control v:
    ///   a(z, w) + (d_y(y) z, w) = <v, w>_Gamma.
    pub fn solve_linearized(&self, v: &BoundaryControl) -> FeFunction {
        let rhs = fem::integrate_boundary_control(&self.mesh, &v.values);
        FeFunction::new(self.mesh.clone(), self.factor.solve(&rhs))
    }

    /// Solves the linearized operator against an arbitrary load vector.
    pub fn solve_load(&self, rhs: &[f64]) -> FeFunction {
        FeFunction::new(self.mesh.clone(), self.factor.solve(rhs))
    }

    /// Residual check for a candidate solution of the linearized operator.
    pub fn residual(&self, z: &[f64], rhs: &[f64]) -> f64 {
        let az = self.operator.matvec(z);
        vec_norm(&az.iter().zip(rhs).map(|(a, b)| a - b).collect::<Vec<_>>())
    }

    /// The reduced Hessian applied to a control direction:
    ///   H v = nu v + Q_h (q|_Gamma),
    /// where q solves the linearized operator against the load of
    /// (1 - p d_yy(y)) y^v with y^v the linearized state of v.
    pub fn hessian_action(&self, spec: &ProblemSpec, v: &BoundaryControl) -> Result<BoundaryControl> {
        let yv = self.solve_linearized(v);
        let load = fem::integrate_volume_term(&self.mesh, |t, x| {
            let w = 1.0 - self.p.eval_in_triangle(t, x)
                * spec.reaction.d_yy(x, self.y.eval_in_triangle(t, x));
            w * yv.eval_in_triangle(t, x)
        })?;
        let q = self.solve_load(&load);
        let mut h = control::project_trace(&q);
        h.axpy(spec.nu, v);
        Ok(h)
    }

    /// The reduced Hessian as a bilinear form:
    ///   J''(u)[v1, v2] = int (1 - p d_yy(y)) y^{v1} y^{v2} + nu <v1, v2>_Gamma.
    pub fn hessian_bilinear(
        &self,
        spec: &ProblemSpec,
        v1: &BoundaryControl,
        v2: &BoundaryControl,
    ) -> Result<f64> {
        let y1 = self.solve_linearized(v1);
        let y2 = self.solve_linearized(v2);
        let rule = quadrature::triangle_degree4();
        let mut acc = 0.0;
        for t in 0..self.mesh.num_triangles() {
            let [a, b, c] = self.mesh.triangle_points(t);
            let area = crate::geometry::signed_area(a, b, c);
            for (bary, w) in rule.points.iter().zip(&rule.weights) {
                let x = [
                    bary[0] * a[0] + bary[1] * b[0] + bary[2] * c[0],
                    bary[0] * a[1] + bary[1] * b[1] + bary[2] * c[1],
                ];
                let weight = 1.0 - self.p.eval_in_triangle(t, x)
                    * spec.reaction.d_yy(x, self.y.eval_in_triangle(t, x));
                acc += w * area * weight * y1.eval_in_triangle(t, x) * y2.eval_in_triangle(t, x);
            }
        }
        Ok(acc + spec.nu * v1.inner(v2))
    }
}

/// Solves the adjoint equation at state y.
pub fn solve_adjoint(spec: &ProblemSpec, y: FeFunction) -> Result<FeFunction> {
    Ok(Linearization::new(spec, y)?.p)
}

/// Solves the state equation linearized at `y` with boundary control `v`.
pub fn solve_linearized_state(
    spec: &ProblemSpec,
    y: FeFunction,
    v: &BoundaryControl,
) -> Result<FeFunction> {
    Ok(Linearization::new(spec, y)?.solve_linearized(v))
}

/// Discrete cost functional
///   J_h(u, y) = 1/2 ||y - y_d||^2 + nu/2 ||u||^2_Gamma + int_Gamma g2 y.
pub fn cost(spec: &ProblemSpec, u: &BoundaryControl, y: &FeFunction) -> f64 {
    let mesh = &u.mesh;
    let rule = quadrature::triangle_degree4();
    let mut tracking = 0.0;
    for t in 0..mesh.num_triangles() {
        let [a, b, c] = mesh.triangle_points(t);
        let area = crate::geometry::signed_area(a, b, c);
        for (bary, w) in rule.points.iter().zip(&rule.weights) {
            let x = [
                bary[0] * a[0] + bary[1] * b[0] + bary[2] * c[0],
                bary[0] * a[1] + bary[1] * b[1] + bary[2] * c[1],
            ];
            let d = y.eval_in_triangle(t, x) - (spec.y_d)(x);
            tracking += w * area * d * d;
        }
    }
    let erule = quadrature::edge_gauss3();
    let mut boundary_cost = 0.0;
    for e in 0..mesh.num_boundary_edges() {
        let len = mesh.edge_length(e);
        for (&t, &w) in erule.points.iter().zip(&erule.weights) {
            boundary_cost += w * len * (spec.g2)(mesh.edge_point(e, t)) * y.eval_on_edge(e, t);
        }
    }
    0.5 * tracking + 0.5 * spec.nu * u.inner(u) + boundary_cost
}

/// State, adjoint and reduced gradient at a control u.
pub struct ReducedDerivatives {
    pub y: FeFunction,
    pub p: FeFunction,
    /// Riesz representative of j'(u) in L2(Gamma): nu u + Q_h (p|_Gamma).
    pub gradient: BoundaryControl,
    pub cost: f64,
}

/// Evaluates the reduced cost and its gradient at u (solves state and
/// adjoint).
pub fn reduced_derivatives(
    spec: &ProblemSpec,
    u: &BoundaryControl,
    warm_start: Option<&FeFunction>,
    cfg: &NewtonConfig,
) -> Result<ReducedDerivatives> {
    let y = solve_state(spec, u, warm_start, cfg)?;
    let lin = Linearization::new(spec, y)?;
    let mut gradient = control::project_trace(&lin.p);
    gradient.axpy(spec.nu, u);
    let cost = cost(spec, u, &lin.y);
    Ok(ReducedDerivatives { y: lin.y, p: lin.p, gradient, cost })
}
