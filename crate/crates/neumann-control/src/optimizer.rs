//! SQP outer loop with a primal-dual active set (PDAS) inner solver for the
//! box-constrained quadratic subproblems, plus a first-order projected
//! gradient reference solver and an a-posteriori optimality checker.

use crate::control::{Bounds, BoundaryControl};
use crate::error::{Error, Result};
use crate::fem::FeFunction;
use crate::mesh::GradedMesh;
use crate::pde::{self, Linearization, NewtonConfig};
use crate::problem::ProblemSpec;
use std::sync::Arc;

/// Parameters of the SQP / PDAS / CG solver stack.
#[derive(Debug, Clone, Copy)]
pub struct SqpConfig {
    pub newton: NewtonConfig,
    /// Outer iteration cap.
    pub max_outer: usize,
    /// Outer stopping tolerance on ||u^{k+1} - u^k||_{L2(Gamma)}.
    pub outer_tol: f64,
    /// PDAS iteration cap per subproblem.
    pub max_pdas: usize,
    /// CG iteration cap per equality-constrained solve.
    pub max_cg: usize,
    /// Relative CG residual tolerance.
    pub cg_tol: f64,
}

impl Default for SqpConfig {
    fn default() -> Self {
        SqpConfig {
            newton: NewtonConfig::default(),
            max_outer: 25,
            outer_tol: 1e-10,
            max_pdas: 50,
            max_cg: 200,
            cg_tol: 1e-10,
        }
    }
}

/// One outer SQP iteration for the structured log.
#[derive(Debug, Clone)]
pub struct IterationRecord {
    pub outer_iter: usize,
    /// ||u^{k+1} - u^k||_{L2(Gamma)}.
    pub residual: f64,
    /// Cost at the start of the iteration.
    pub cost: f64,
    pub active_lower: usize,
    pub active_upper: usize,
    pub pdas_iters: usize,
}

impl IterationRecord {
    /// Single-line JSON representation for machine-readable solver logs.
    pub fn to_json_line(&self) -> String {
        format!(
            "{{\"outer_iter\":{},\"residual\":{:.6e},\"J_h\":{:.12e},\"active_lower\":{},\"active_upper\":{},\"pdas_iters\":{}}}",
            self.outer_iter,
            self.residual,
            self.cost,
            self.active_lower,
            self.active_upper,
            self.pdas_iters
        )
    }
}

/// Solution triple of the discrete optimality system.
pub struct OptimalTriple {
    pub u: BoundaryControl,
    pub y: FeFunction,
    pub p: FeFunction,
    pub log: Vec<IterationRecord>,
}

/// Outcome of one PDAS run.
struct PdasOutcome {
    u: BoundaryControl,
    iterations: usize,
    active_lower: usize,
    active_upper: usize,
}

/// Gradient of the quadratic model at u: g + H (u - u_k).
fn model_gradient(
    lin: &Linearization,
    spec: &ProblemSpec,
    g: &BoundaryControl,
    u_k: &BoundaryControl,
    u: &BoundaryControl,
) -> Result<BoundaryControl> {
    let mut step = u.clone();
    step.axpy(-1.0, u_k);
    let mut grad = lin.hessian_action(spec, &step)?;
    grad.axpy(1.0, g);
    Ok(grad)
}

/// CG on the inactive block of the reduced Hessian, in the edge-length
/// weighted L2(Gamma) inner product. Solves H_II x_I = r_I with zeros on the
/// active set, updating `u` in place on the inactive edges.
fn cg_on_inactive(
    lin: &Linearization,
    spec: &ProblemSpec,
    g: &BoundaryControl,
    u_k: &BoundaryControl,
    u: &mut BoundaryControl,
    inactive: &[usize],
    cfg: &SqpConfig,
) -> Result<()> {
    if inactive.is_empty() {
        return Ok(());
    }
    let mesh = u.mesh.clone();
    let weighted = |a: &BoundaryControl, b: &BoundaryControl| -> f64 {
        inactive
            .iter()
            .map(|&e| mesh.edge_length(e) * a.values[e] * b.values[e])
            .sum()
    };
    // initial residual of the model gradient, restricted to inactive edges
    let grad = model_gradient(lin, spec, g, u_k, u)?;
    let mut r = BoundaryControl::zeros(mesh.clone());
    for &e in inactive {
        r.values[e] = -grad.values[e];
    }
    let r0 = weighted(&r, &r).sqrt();
    if r0 == 0.0 {
        return Ok(());
    }
    let mut p = r.clone();
    let mut rr = r0 * r0;
    for _ in 0..cfg.max_cg {
        let hp_full = lin.hessian_action(spec, &p)?;
        let mut hp = BoundaryControl::zeros(mesh.clone());
        for &e in inactive {
            hp.values[e] = hp_full.values[e];
        }
        let php = weighted(&p, &hp);
        if php <= 0.0 {
            return Err(Error::Indefinite(php));
        }
        let alpha = rr / php;
        for &e in inactive {
            u.values[e] += alpha * p.values[e];
            r.values[e] -= alpha * hp.values[e];
        }
        let rr_new = weighted(&r, &r);
        if rr_new.sqrt() <= cfg.cg_tol * r0 {
            return Ok(());
        }
        let beta = rr_new / rr;
        rr = rr_new;
        for &e in inactive {
            p.values[e] = r.values[e] + beta * p.values[e];
        }
    }
    // CG hit its cap: accept the iterate; the outer loops control accuracy
    Ok(())
}

/// Primal-dual active set method for the box-constrained quadratic model
///   min_u  (g, u - u_k) + 1/2 (H (u - u_k), u - u_k)   s.t.  u_a <= u <= u_b.
/// Stops when the active sets repeat; errors with [`Error::PdasCycling`]
/// at the iteration cap.
fn pdas_solve_subproblem(
    lin: &Linearization,
    spec: &ProblemSpec,
    g: &BoundaryControl,
    u_k: &BoundaryControl,
    bounds: Bounds,
    cfg: &SqpConfig,
) -> Result<PdasOutcome> {
    let mesh = u_k.mesh.clone();
    let n = mesh.num_boundary_edges();
    let c = spec.nu;
    let mut u = u_k.clamped(bounds);
    let mut lambda = BoundaryControl::zeros(mesh.clone());
    let mut prev_sets: Option<Vec<i8>> = None;
    for it in 1..=cfg.max_pdas {
        // active set prediction from the primal-dual quantity u + lambda/c
        let sets: Vec<i8> = (0..n)
            .map(|e| {
                let q = u.values[e] + lambda.values[e] / c;
                if q < bounds.lower {
                    -1
                } else if q > bounds.upper {
                    1
                } else {
                    0
                }
            })
            .collect();
        let active_lower = sets.iter().filter(|&&s| s == -1).count();
        let active_upper = sets.iter().filter(|&&s| s == 1).count();
        if prev_sets.as_ref() == Some(&sets) {
            return Ok(PdasOutcome { u, iterations: it - 1, active_lower, active_upper });
        }
        // fix active values, solve the equality-constrained problem on the
        // inactive set
        let mut inactive = Vec::new();
        for (e, &s) in sets.iter().enumerate() {
            match s {
                -1 => u.values[e] = bounds.lower,
                1 => u.values[e] = bounds.upper,
                _ => inactive.push(e),
            }
        }
        cg_on_inactive(lin, spec, g, u_k, &mut u, &inactive, cfg)?;
        // multiplier update: lambda = -grad on the active set, zero elsewhere
        let grad = model_gradient(lin, spec, g, u_k, &u)?;
        for e in 0..n {
            lambda.values[e] = if sets[e] == 0 { 0.0 } else { -grad.values[e] };
        }
        prev_sets = Some(sets);
    }
    Err(Error::PdasCycling(cfg.max_pdas))
}

/// Solves the discrete optimal control problem by SQP: each outer iteration
/// linearizes the optimality system at (u^k, y^k, p^k) and solves the
/// resulting box-constrained quadratic subproblem with PDAS.
pub fn sqp_solve(
    spec: &ProblemSpec,
    mesh: &Arc<GradedMesh>,
    initial: Option<&BoundaryControl>,
    cfg: &SqpConfig,
) -> Result<OptimalTriple> {
    let bounds = spec.bounds;
    let mut u = match initial {
        Some(u0) => u0.clamped(bounds),
        None => BoundaryControl::zeros(mesh.clone()),
    };
    let mut warm: Option<FeFunction> = None;
    let mut log = Vec::new();
    for k in 1..=cfg.max_outer {
        let y = pde::solve_state(spec, &u, warm.as_ref(), &cfg.newton)?;
        let cost = pde::cost(spec, &u, &y);
        let lin = Linearization::new(spec, y)?;
        let mut g = crate::control::project_trace(&lin.p);
        g.axpy(spec.nu, &u);
        let outcome = pdas_solve_subproblem(&lin, spec, &g, &u, bounds, cfg)?;
        let residual = outcome.u.diff_norm(&u);
        log.push(IterationRecord {
            outer_iter: k,
            residual,
            cost,
            active_lower: outcome.active_lower,
            active_upper: outcome.active_upper,
            pdas_iters: outcome.iterations,
        });
        warm = Some(lin.y.clone());
        u = outcome.u;
        if residual <= cfg.outer_tol {
            let y = pde::solve_state(spec, &u, warm.as_ref(), &cfg.newton)?;
            let lin = Linearization::new(spec, y)?;
            return Ok(OptimalTriple { u, y: lin.y, p: lin.p, log });
        }
    }
    Err(Error::SqpNonconvergence {
        iterations: cfg.max_outer,
        last_update: log.last().map_or(f64::NAN, |r| r.residual),
    })
}

/// Report of the edgewise discrete optimality conditions.
#[derive(Debug, Clone)]
pub struct OptimalityReport {
    /// Largest violation of the sign conditions on I_E = int_E (p + nu u),
    /// normalized by the edge length.
    pub max_violation: f64,
    pub pass: bool,
    pub active_lower: usize,
    pub active_upper: usize,
}

/// Verifies the discrete variational inequality edge by edge: with
/// I_E = int_E (p_h + nu u_h), interior edges need I_E = 0, lower-active
/// edges need I_E >= 0 and upper-active edges need I_E <= 0.
pub fn check_discrete_optimality(
    spec: &ProblemSpec,
    u: &BoundaryControl,
    p: &FeFunction,
    tol: f64,
) -> OptimalityReport {
    let bounds = spec.bounds;
    let mesh = &u.mesh;
    let mut max_violation: f64 = 0.0;
    let mut active_lower = 0;
    let mut active_upper = 0;
    for e in 0..mesh.num_boundary_edges() {
        // exact integral of the linear adjoint trace plus the constant control
        let integrand_mean = p.eval_on_edge(e, 0.5) + spec.nu * u.values[e];
        let violation = if bounds.is_lower_active(u.values[e]) {
            active_lower += 1;
            (-integrand_mean).max(0.0)
        } else if bounds.is_upper_active(u.values[e]) {
            active_upper += 1;
            integrand_mean.max(0.0)
        } else {
            integrand_mean.abs()
        };
        max_violation = max_violation.max(violation);
    }
    OptimalityReport {
        max_violation,
        pass: max_violation <= tol,
        active_lower,
        active_upper,
    }
}

/// First-order reference solver: projected gradient iteration
///   u <- clamp(u - s (nu u + Q_h p(u)))
/// with a fixed step s = 1/L, L estimated by power iteration on the reduced
/// Hessian at the initial point. Intended for cross-validation on coarse
/// meshes; slow but structurally independent of the SQP/PDAS path.
pub fn projected_gradient_solve(
    spec: &ProblemSpec,
    mesh: &Arc<GradedMesh>,
    initial: Option<&BoundaryControl>,
    tol: f64,
    max_iter: usize,
) -> Result<BoundaryControl> {
    let bounds = spec.bounds;
    let mut u = match initial {
        Some(u0) => u0.clamped(bounds),
        None => BoundaryControl::zeros(mesh.clone()),
    };
    let cfg = NewtonConfig::default();
    // Lipschitz estimate via power iteration at the starting point
    let y0 = pde::solve_state(spec, &u, None, &cfg)?;
    let lin = Linearization::new(spec, y0)?;
    let mut v = BoundaryControl::constant(mesh.clone(), 1.0);
    let mut lipschitz = spec.nu;
    for _ in 0..20 {
        let hv = lin.hessian_action(spec, &v)?;
        let norm = hv.norm();
        if norm == 0.0 {
            break;
        }
        lipschitz = norm / v.norm();
        v = hv;
        let s = 1.0 / v.norm();
        for x in v.values.iter_mut() {
            *x *= s;
        }
    }
    let step = 1.0 / (1.1 * lipschitz.max(spec.nu));
    let mut warm: Option<FeFunction> = None;
    for _ in 0..max_iter {
        let der = pde::reduced_derivatives(spec, &u, warm.as_ref(), &cfg)?;
        let mut next = u.clone();
        next.axpy(-step, &der.gradient);
        let next = next.clamped(bounds);
        let change = next.diff_norm(&u);
        warm = Some(der.y);
        u = next;
        if change <= tol {
            return Ok(u);
        }
    }
    Err(Error::SqpNonconvergence { iterations: max_iter, last_update: f64::NAN })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::control::midpoint_interpolate_rh;
    use crate::geometry::Point;
    use crate::mesh::{build_sector_domain, generate_graded_mesh};
    use crate::problem::{ProblemSpec, ReactionPreset};
    use std::f64::consts::PI;

    fn lshape_mesh(h: f64) -> Arc<GradedMesh> {
        let domain = build_sector_domain(1.5 * PI).unwrap();
        let m = domain.corners.len();
        Arc::new(generate_graded_mesh(&domain, h, &vec![1.0; m], &vec![0.5; m]).unwrap())
    }

    fn lq_problem(u_a: f64, u_b: f64) -> ProblemSpec {
        ProblemSpec::new(
            Arc::new(ReactionPreset::Linear),
            Arc::new(|p: Point| p[0] - 0.3 * p[1]),
            1.0,
            u_a,
            u_b,
        )
        .unwrap()
    }

    fn nonlinear_problem(u_a: f64, u_b: f64) -> ProblemSpec {
        ProblemSpec::new(
            Arc::new(ReactionPreset::Cubic),
            Arc::new(|p: Point| p[0] + 0.5 * p[1]),
            1.0,
            u_a,
            u_b,
        )
        .unwrap()
        .with_f(Arc::new(|p: Point| p[0] * p[1]))
    }

    #[test]
    fn unconstrained_lq_matches_dense_solve() {
        // without bounds the optimum solves H u = -g(0); assemble H densely
        // through Hessian actions on unit controls and compare
        let mesh = lshape_mesh(0.5);
        let spec = lq_problem(-1e30, 1e30);
        let cfg = SqpConfig::default();
        let sol = sqp_solve(&spec, &mesh, None, &cfg).unwrap();

        let n = mesh.num_boundary_edges();
        let u0 = BoundaryControl::zeros(mesh.clone());
        let y0 = pde::solve_state(&spec, &u0, None, &cfg.newton).unwrap();
        let lin = Linearization::new(&spec, y0).unwrap();
        let g0 = crate::control::project_trace(&lin.p);
        // dense Hessian in the plain coefficient basis
        let mut h = vec![vec![0.0; n]; n];
        for j in 0..n {
            let mut ej = BoundaryControl::zeros(mesh.clone());
            ej.values[j] = 1.0;
            let hj = lin.hessian_action(&spec, &ej).unwrap();
            for i in 0..n {
                h[i][j] = hj.values[i];
            }
        }
        // Gaussian elimination for H x = -g0
        let mut a = h;
        let mut b: Vec<f64> = g0.values.iter().map(|v| -v).collect();
        for col in 0..n {
            let piv = (col..n)
                .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
                .unwrap();
            a.swap(col, piv);
            b.swap(col, piv);
            let d = a[col][col];
            for i in (col + 1)..n {
                let f = a[i][col] / d;
                for j in col..n {
                    a[i][j] -= f * a[col][j];
                }
                b[i] -= f * b[col];
            }
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut s = b[i];
            for j in (i + 1)..n {
                s -= a[i][j] * x[j];
            }
            x[i] = s / a[i][i];
        }
        let dense = BoundaryControl::new(mesh.clone(), x);
        assert!(
            sol.u.diff_norm(&dense) < 1e-8,
            "gap to dense solve {}",
            sol.u.diff_norm(&dense)
        );
    }

    #[test]
    fn lq_converges_in_one_sqp_step() {
        // for a linear state equation the quadratic model is exact, so the
        // second outer iteration observes a zero update
        let mesh = lshape_mesh(0.5);
        let spec = lq_problem(-0.1, 0.1);
        let sol = sqp_solve(&spec, &mesh, None, &SqpConfig::default()).unwrap();
        assert!(sol.log.len() <= 2, "outer iterations {}", sol.log.len());
        assert!(sol.log.last().unwrap().residual <= 1e-10);
        // bounds produce a nontrivial active set here
        let last = sol.log.last().unwrap();
        assert!(last.active_lower + last.active_upper > 0);
        assert!(sol.u.is_admissible(spec.bounds));
    }

    #[test]
    fn degenerate_equal_bounds() {
        let mesh = lshape_mesh(0.5);
        let spec = lq_problem(0.25, 0.25);
        let sol = sqp_solve(&spec, &mesh, None, &SqpConfig::default()).unwrap();
        for &v in &sol.u.values {
            assert_eq!(v, 0.25);
        }
    }

    #[test]
    fn cold_and_warm_starts_agree() {
        let mesh = lshape_mesh(0.5);
        let spec = nonlinear_problem(-0.2, 0.2);
        let cfg = SqpConfig::default();
        let cold = sqp_solve(&spec, &mesh, None, &cfg).unwrap();
        let u0 = midpoint_interpolate_rh(&mesh, |p: Point| 0.15 * p[0] - 0.05);
        let warm = sqp_solve(&spec, &mesh, Some(&u0), &cfg).unwrap();
        assert!(
            cold.u.diff_norm(&warm.u) < 1e-8,
            "start dependence {}",
            cold.u.diff_norm(&warm.u)
        );
    }

    #[test]
    fn solution_is_fixed_point() {
        let mesh = lshape_mesh(0.5);
        let spec = nonlinear_problem(-0.2, 0.2);
        let cfg = SqpConfig::default();
        let sol = sqp_solve(&spec, &mesh, None, &cfg).unwrap();
        let again = sqp_solve(&spec, &mesh, Some(&sol.u), &cfg).unwrap();
        assert_eq!(again.log.len(), 1, "restart took {} iterations", again.log.len());
        assert!(sol.u.diff_norm(&again.u) < 1e-12);
        // PDAS terminates by set repetition, never by the cycling cap
        for rec in sol.log.iter().chain(&again.log) {
            assert!(rec.pdas_iters < cfg.max_pdas);
        }
    }

    #[test]
    fn optimality_check_accepts_solution_rejects_perturbation() {
        let mesh = lshape_mesh(0.5);
        let spec = nonlinear_problem(-0.2, 0.2);
        let sol = sqp_solve(&spec, &mesh, None, &SqpConfig::default()).unwrap();
        let report = check_discrete_optimality(&spec, &sol.u, &sol.p, 1e-8);
        assert!(report.pass, "violation {}", report.max_violation);
        assert!(report.active_lower + report.active_upper > 0);

        let mut bad = sol.u.clone();
        // perturb an inactive edge
        let e = (0..mesh.num_boundary_edges())
            .find(|&e| {
                !spec.bounds.is_lower_active(bad.values[e])
                    && !spec.bounds.is_upper_active(bad.values[e])
            })
            .unwrap();
        bad.values[e] += 1e-3;
        let report = check_discrete_optimality(&spec, &bad, &sol.p, 1e-8);
        assert!(!report.pass);
    }

    #[test]
    fn projected_gradient_agrees_with_sqp() {
        let mesh = lshape_mesh(0.5);
        assert!(mesh.num_boundary_edges() <= 40);
        let spec = nonlinear_problem(-0.2, 0.2);
        let sqp = sqp_solve(&spec, &mesh, None, &SqpConfig::default()).unwrap();
        let pg = projected_gradient_solve(&spec, &mesh, None, 1e-10, 100_000).unwrap();
        let gap = sqp.u.diff_norm(&pg);
        assert!(gap < 1e-6, "solver gap {gap}");
    }

    #[test]
    fn json_log_lines() {
        let rec = IterationRecord {
            outer_iter: 3,
            residual: 1.5e-7,
            cost: 0.123456,
            active_lower: 2,
            active_upper: 5,
            pdas_iters: 4,
        };
        let line = rec.to_json_line();
        let parsed: serde_json::Value = serde_json::from_str(&line).unwrap();
        assert_eq!(parsed["outer_iter"], 3);
        assert_eq!(parsed["active_lower"], 2);
        assert_eq!(parsed["active_upper"], 5);
        assert_eq!(parsed["pdas_iters"], 4);
        assert!((parsed["residual"].as_f64().unwrap() - 1.5e-7).abs() < 1e-20);
        assert!((parsed["J_h"].as_f64().unwrap() - 0.123456).abs() < 1e-15);
    }
}
