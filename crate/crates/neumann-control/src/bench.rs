//! The corner-singularity benchmark problem with known exact solution, the
//! convergence study over a mesh hierarchy, and report emission (CSV, JSON,
//! SVG).

use crate::control::{self, BoundaryControl, EdgeClassification, PostprocessedControl};
use crate::error::{Error, Result};
use crate::fem;
use crate::geometry::{self, Point};
use crate::mesh::{build_sector_domain, generate_graded_mesh, GradedMesh, PolygonalDomain};
use crate::optimizer::{self, IterationRecord, SqpConfig};
use crate::problem::{ProblemSpec, ReactionPreset, ScalarField};
use std::fmt::Write as _;
use std::sync::Arc;

/// Control bounds of the benchmark.
pub const BENCH_UA: f64 = -0.8;
pub const BENCH_UB: f64 = 0.8;

/// The benchmark problem on the circular-sector polygon with opening angle
/// omega at the origin. The exact optimal state is the singular harmonic
/// y(r, phi) = r^lambda cos(lambda phi) with lambda = pi / omega, the
/// adjoint is p = -y and the control is the clamped boundary trace of y.
pub struct Benchmark {
    pub domain: PolygonalDomain,
    pub spec: ProblemSpec,
    pub lambda: f64,
    pub exact_y: ScalarField,
    pub exact_p: ScalarField,
    pub exact_u: ScalarField,
}

/// Outward unit normal of the domain polygon at a boundary point (taken
/// from the nearest polygon side; callers avoid exact corner points).
pub fn outward_normal(positions: &[Point], p: Point) -> Point {
    let m = positions.len();
    let side = (0..m)
        .min_by(|&i, &j| {
            let di = geometry::dist_point_segment(p, positions[i], positions[(i + 1) % m]);
            let dj = geometry::dist_point_segment(p, positions[j], positions[(j + 1) % m]);
            di.partial_cmp(&dj).unwrap()
        })
        .unwrap();
    let t = geometry::sub(positions[(side + 1) % m], positions[side]);
    let len = geometry::norm(t);
    [t[1] / len, -t[0] / len]
}

/// Builds the benchmark problem for opening angle omega in (pi/2, 2 pi).
pub fn build_benchmark(omega: f64) -> Result<Benchmark> {
    let domain = build_sector_domain(omega)?;
    let lambda = std::f64::consts::PI / omega;
    let positions = domain.positions();

    let singular = move |p: Point| -> f64 {
        let r = geometry::norm(p);
        if r == 0.0 {
            return 0.0;
        }
        let phi = geometry::polar_angle(p);
        r.powf(lambda) * (lambda * phi).cos()
    };
    let singular_grad = move |p: Point| -> Point {
        let r = geometry::norm(p);
        let phi = geometry::polar_angle(p);
        let s = lambda * r.powf(lambda - 1.0);
        [s * ((lambda - 1.0) * phi).cos(), -s * ((lambda - 1.0) * phi).sin()]
    };
    let clamp = |v: f64| v.clamp(BENCH_UA, BENCH_UB);

    let exact_y: ScalarField = Arc::new(singular);
    let exact_p: ScalarField = Arc::new(move |p| -singular(p));
    let exact_u: ScalarField = Arc::new(move |p| clamp(singular(p)));

    // the state is harmonic: f = d(y) = y + y^3
    let f: ScalarField = Arc::new(move |p| {
        let y = singular(p);
        y + y * y * y
    });
    // adjoint equation -Laplace p + d_y(y) p = y - y_d with p = -y gives
    // y_d = 2 y + 3 y^3
    let y_d: ScalarField = Arc::new(move |p| {
        let y = singular(p);
        2.0 * y + 3.0 * y * y * y
    });
    // state flux dn y = u + g1  =>  g1 = dn y - clamp(y)
    let pos1 = positions.clone();
    let g1: ScalarField = Arc::new(move |p| {
        let n = outward_normal(&pos1, p);
        geometry::dot(singular_grad(p), n) - clamp(singular(p))
    });
    // adjoint flux dn p = g2 with p = -y  =>  g2 = -dn y
    let pos2 = positions;
    let g2: ScalarField = Arc::new(move |p| {
        let n = outward_normal(&pos2, p);
        -geometry::dot(singular_grad(p), n)
    });

    let spec = ProblemSpec::new(
        Arc::new(ReactionPreset::Cubic),
        y_d,
        1.0,
        BENCH_UA,
        BENCH_UB,
    )?
    .with_f(f)
    .with_g1(g1)
    .with_g2(g2);

    Ok(Benchmark { domain, spec, lambda, exact_y, exact_p, exact_u })
}

/// Parameters of a convergence study over the level hierarchy
/// h_k = h0 2^{-k}, k = 0, ..., levels-1.
#[derive(Debug, Clone)]
pub struct StudyConfig {
    pub omega: f64,
    /// Grading parameter applied at reentrant corners (1.0 = uniform).
    pub mu: f64,
    /// Grading disc radius.
    pub radius: f64,
    pub levels: usize,
    pub h0: f64,
    /// Disable the nested-iteration warm start between levels.
    pub cold_start: bool,
    pub sqp: SqpConfig,
}

impl Default for StudyConfig {
    fn default() -> Self {
        StudyConfig {
            omega: 1.5 * std::f64::consts::PI,
            mu: 0.5,
            radius: 0.5,
            levels: 6,
            h0: 0.5,
            cold_start: false,
            sqp: SqpConfig::default(),
        }
    }
}

/// Per-level measurements of the study.
#[derive(Debug, Clone)]
pub struct LevelRecord {
    pub level: usize,
    pub h: f64,
    pub ndof_domain: usize,
    pub nedges_boundary: usize,
    /// L2(Gamma) error of the postprocessed control.
    pub err_u: f64,
    pub eoc_u: Option<f64>,
    /// L2(Omega) error of the discrete state.
    pub err_y: f64,
    pub eoc_y: Option<f64>,
    /// L2(Gamma) error of the discrete adjoint trace.
    pub err_p: f64,
    pub eoc_p: Option<f64>,
    /// L2(Gamma) distance of the raw discrete control to the modified
    /// interpolant of the exact control.
    pub err_superclose: f64,
    pub eoc_superclose: Option<f64>,
    /// Total length of edges mixing active and inactive exact control.
    pub meas_k1: f64,
    /// Largest edgewise violation of the discrete optimality conditions at
    /// the converged triple (diagnostic; not part of the CSV table).
    pub optimality_violation: f64,
    pub sqp_log: Vec<IterationRecord>,
}

/// Full study outcome.
pub struct ConvergenceReport {
    pub config: StudyConfig,
    pub records: Vec<LevelRecord>,
}

/// Experimental order of convergence between consecutive levels with mesh
/// ratio `ratio`; `None` when either error is nonpositive or not finite.
pub fn compute_eoc(err_coarse: f64, err_fine: f64, ratio: f64) -> Option<f64> {
    if !(err_coarse > 0.0) || !(err_fine > 0.0) || !err_coarse.is_finite() || !err_fine.is_finite()
    {
        return None;
    }
    Some((err_coarse / err_fine).ln() / ratio.ln())
}

/// Grading vectors: reentrant corners (interior angle > pi) receive the
/// study's mu, convex corners stay uniform.
fn grading_vectors(domain: &PolygonalDomain, mu: f64, radius: f64) -> (Vec<f64>, Vec<f64>) {
    let mus = domain
        .corners
        .iter()
        .map(|c| if c.interior_angle > std::f64::consts::PI + 1e-12 { mu } else { 1.0 })
        .collect();
    let radii = vec![radius; domain.corners.len()];
    (mus, radii)
}

/// Solves the benchmark on one mesh and measures all errors against the
/// exact solution.
pub struct LevelSolution {
    pub mesh: Arc<GradedMesh>,
    pub u: BoundaryControl,
    pub postprocessed: PostprocessedControl,
    pub classification: EdgeClassification,
    pub triple: optimizer::OptimalTriple,
}

fn solve_level(
    bench: &Benchmark,
    mesh: &Arc<GradedMesh>,
    initial: Option<&BoundaryControl>,
    sqp: &SqpConfig,
) -> Result<LevelSolution> {
    let triple = optimizer::sqp_solve(&bench.spec, mesh, initial, sqp)?;
    let postprocessed =
        control::postprocess(&triple.p, bench.spec.nu, BENCH_UA, BENCH_UB)?;
    let exact_u = bench.exact_u.clone();
    let classification = control::classify_edges(mesh, move |p| exact_u(p), BENCH_UA, BENCH_UB)?;
    Ok(LevelSolution {
        mesh: mesh.clone(),
        u: triple.u.clone(),
        postprocessed,
        classification,
        triple,
    })
}

fn measure_level(
    bench: &Benchmark,
    level: usize,
    h: f64,
    sol: &LevelSolution,
) -> Result<LevelRecord> {
    let mesh = &sol.mesh;
    let exact_u = bench.exact_u.clone();
    let pp = &sol.postprocessed;
    let cls = &sol.classification;
    let err_u = fem::boundary_l2_error(
        mesh,
        |e, t| pp.eval_on_edge(e, t),
        |p| exact_u(p),
        |e| {
            let mut breaks = pp.kink_params(e);
            if let Some(t) = cls.anchors[e] {
                breaks.push(t);
            }
            breaks
        },
    );
    let err_y = fem::domain_l2_error(mesh, &sol.triple.y, |p| (bench.exact_y)(p));
    let err_p = fem::boundary_l2_error(
        mesh,
        |e, t| sol.triple.p.eval_on_edge(e, t),
        |p| (bench.exact_p)(p),
        |_| Vec::new(),
    );
    let exact_u2 = bench.exact_u.clone();
    let rhu = control::modified_interpolate_rhu(mesh, move |p| exact_u2(p), cls)?;
    let err_superclose = sol.u.diff_norm(&rhu);
    Ok(LevelRecord {
        level,
        h,
        ndof_domain: mesh.num_vertices(),
        nedges_boundary: mesh.num_boundary_edges(),
        err_u,
        eoc_u: None,
        err_y,
        eoc_y: None,
        err_p,
        eoc_p: None,
        err_superclose,
        eoc_superclose: None,
        meas_k1: cls.meas_k1(mesh),
        optimality_violation: optimizer::check_discrete_optimality(
            &bench.spec,
            &sol.u,
            &sol.triple.p,
            1e-8,
        )
        .max_violation,
        sqp_log: sol.triple.log.clone(),
    })
}

fn fill_eocs(records: &mut [LevelRecord]) {
    for k in 1..records.len() {
        let (prev, cur) = (records[k - 1].clone(), &mut records[k]);
        cur.eoc_u = compute_eoc(prev.err_u, cur.err_u, 2.0);
        cur.eoc_y = compute_eoc(prev.err_y, cur.err_y, 2.0);
        cur.eoc_p = compute_eoc(prev.err_p, cur.err_p, 2.0);
        cur.eoc_superclose = compute_eoc(prev.err_superclose, cur.err_superclose, 2.0);
    }
}

/// Runs the convergence study: builds the graded mesh hierarchy, solves the
/// benchmark on every level (warm-starting from the prolonged coarse control
/// unless `cold_start`), and measures errors and orders.
pub fn run_convergence_study(config: &StudyConfig) -> Result<ConvergenceReport> {
    let bench = build_benchmark(config.omega)?;
    let (mus, radii) = grading_vectors(&bench.domain, config.mu, config.radius);
    let mut records = Vec::with_capacity(config.levels);
    let mut previous: Option<BoundaryControl> = None;
    for k in 0..config.levels {
        let h = config.h0 * 0.5f64.powi(k as i32);
        let mesh = Arc::new(generate_graded_mesh(&bench.domain, h, &mus, &radii)?);
        let initial = if config.cold_start {
            None
        } else {
            previous.as_ref().map(|u| control::prolong(u, &mesh))
        };
        let sol = solve_level(&bench, &mesh, initial.as_ref(), &config.sqp)?;
        records.push(measure_level(&bench, k, h, &sol)?);
        previous = Some(sol.u);
    }
    fill_eocs(&mut records);
    Ok(ConvergenceReport { config: config.clone(), records })
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or(String::new(), |x| format!("{x:.4}"))
}

impl ConvergenceReport {
    /// CSV table, one row per level.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "level,h,ndof_domain,nedges_boundary,err_u,eoc_u,err_y,eoc_y,err_p,eoc_p,err_superclose,eoc_superclose,meas_K1\n",
        );
        for r in &self.records {
            let _ = writeln!(
                out,
                "{},{:.6e},{},{},{:.6e},{},{:.6e},{},{:.6e},{},{:.6e},{},{:.6e}",
                r.level,
                r.h,
                r.ndof_domain,
                r.nedges_boundary,
                r.err_u,
                fmt_opt(r.eoc_u),
                r.err_y,
                fmt_opt(r.eoc_y),
                r.err_p,
                fmt_opt(r.eoc_p),
                r.err_superclose,
                fmt_opt(r.eoc_superclose),
                r.meas_k1,
            );
        }
        out
    }

    /// JSON mirror of the CSV table plus per-level solver logs.
    pub fn to_json(&self) -> String {
        let levels: Vec<serde_json::Value> = self
            .records
            .iter()
            .map(|r| {
                serde_json::json!({
                    "level": r.level,
                    "h": r.h,
                    "ndof_domain": r.ndof_domain,
                    "nedges_boundary": r.nedges_boundary,
                    "err_u": r.err_u,
                    "eoc_u": r.eoc_u,
                    "err_y": r.err_y,
                    "eoc_y": r.eoc_y,
                    "err_p": r.err_p,
                    "eoc_p": r.eoc_p,
                    "err_superclose": r.err_superclose,
                    "eoc_superclose": r.eoc_superclose,
                    "meas_K1": r.meas_k1,
                    "sqp_log": r.sqp_log.iter().map(|rec| {
                        serde_json::from_str::<serde_json::Value>(&rec.to_json_line()).unwrap()
                    }).collect::<Vec<_>>(),
                })
            })
            .collect();
        let doc = serde_json::json!({
            "omega": self.config.omega,
            "mu": self.config.mu,
            "radius": self.config.radius,
            "h0": self.config.h0,
            "cold_start": self.config.cold_start,
            "levels": levels,
        });
        serde_json::to_string_pretty(&doc).unwrap()
    }

    /// Log-log convergence plot with the three error curves (control, state,
    /// adjoint) and two reference slopes.
    pub fn to_svg(&self) -> String {
        let (w, h) = (640.0, 480.0);
        let (ml, mr, mt, mb) = (70.0, 20.0, 20.0, 50.0);
        let xs: Vec<f64> = self.records.iter().map(|r| r.h.log10()).collect();
        let series: [(&str, &str, Vec<f64>); 3] = [
            ("err_u", "#d62728", self.records.iter().map(|r| r.err_u).collect()),
            ("err_y", "#1f77b4", self.records.iter().map(|r| r.err_y).collect()),
            ("err_p", "#2ca02c", self.records.iter().map(|r| r.err_p).collect()),
        ];
        let mut ymin = f64::INFINITY;
        let mut ymax = f64::NEG_INFINITY;
        for (_, _, v) in &series {
            for &e in v {
                if e > 0.0 {
                    ymin = ymin.min(e.log10());
                    ymax = ymax.max(e.log10());
                }
            }
        }
        if !ymin.is_finite() {
            ymin = -1.0;
            ymax = 0.0;
        }
        let (xmin, xmax) = (
            xs.iter().cloned().fold(f64::INFINITY, f64::min),
            xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        );
        let sx = |x: f64| ml + (x - xmin) / (xmax - xmin).max(1e-12) * (w - ml - mr);
        let sy = |y: f64| h - mb - (y - ymin) / (ymax - ymin).max(1e-12) * (h - mt - mb);
        let mut svg = format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n\
             <rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n\
             <text x=\"{:.0}\" y=\"{:.0}\" text-anchor=\"middle\">log10 h</text>\n\
             <text x=\"16\" y=\"{:.0}\" transform=\"rotate(-90 16 {:.0})\" text-anchor=\"middle\">log10 error</text>\n",
            0.5 * w,
            h - 12.0,
            0.5 * h,
            0.5 * h,
        );
        let _ = writeln!(
            svg,
            "<line x1=\"{ml}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"black\"/>",
            h - mb,
            w - mr,
            h - mb
        );
        let _ = writeln!(
            svg,
            "<line x1=\"{ml}\" y1=\"{mt}\" x2=\"{ml}\" y2=\"{:.1}\" stroke=\"black\"/>",
            h - mb
        );
        for (name, color, vals) in &series {
            let pts: Vec<String> = xs
                .iter()
                .zip(vals)
                .filter(|(_, &e)| e > 0.0)
                .map(|(&x, &e)| format!("{:.1},{:.1}", sx(x), sy(e.log10())))
                .collect();
            let _ = writeln!(
                svg,
                "<polyline class=\"error-curve\" fill=\"none\" stroke=\"{color}\" stroke-width=\"2\" points=\"{}\"/>",
                pts.join(" ")
            );
            if let Some((&x, &e)) = xs.iter().zip(vals).next_back() {
                if e > 0.0 {
                    let _ = writeln!(
                        svg,
                        "<text x=\"{:.1}\" y=\"{:.1}\" fill=\"{color}\" font-size=\"12\">{name}</text>",
                        sx(x) + 4.0,
                        sy(e.log10())
                    );
                }
            }
        }
        // reference slopes h^2 (graded theory) and h^1.16 (uniform theory)
        // anchored at the coarsest level
        if let (Some(&x0), Some(&x1)) = (xs.first(), xs.last()) {
            let y0 = ymax;
            for (slope, label) in [(2.0, "h^2"), (1.16, "h^1.16")] {
                let y1 = y0 + slope * (x1 - x0);
                let _ = writeln!(
                    svg,
                    "<line class=\"reference-slope\" x1=\"{:.1}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"#888\" stroke-dasharray=\"5 3\"/>",
                    sx(x0),
                    sy(y0),
                    sx(x1),
                    sy(y1)
                );
                let _ = writeln!(
                    svg,
                    "<text x=\"{:.1}\" y=\"{:.1}\" fill=\"#888\" font-size=\"12\">{label}</text>",
                    sx(x1) - 28.0,
                    sy(y1) - 4.0
                );
            }
        }
        svg.push_str("</svg>\n");
        svg
    }

    /// Emits the report in the requested format.
    pub fn emit(&self, format: &str) -> Result<String> {
        match format {
            "csv" => Ok(self.to_csv()),
            "json" => Ok(self.to_json()),
            "svg" => Ok(self.to_svg()),
            other => Err(Error::Config(format!("unknown report format: {other}"))),
        }
    }
}
