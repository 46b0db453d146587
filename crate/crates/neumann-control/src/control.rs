//! The piecewise-constant boundary control space and its operators: clamp
//! projection, edgewise L2 projection, midpoint interpolation, the modified
//! interpolator that respects the active set, and postprocessing of the
//! discrete adjoint state.

use crate::error::{Error, Result};
use crate::fem::FeFunction;
use crate::geometry::Point;
use crate::mesh::GradedMesh;
use crate::quadrature;
use std::sync::Arc;

/// Validated box bounds [u_a, u_b]. Sentinel values of magnitude >= 1e30 are
/// treated as absent bounds.
#[derive(Debug, Clone, Copy)]
pub struct Bounds {
    pub lower: f64,
    pub upper: f64,
}

/// Sentinel magnitude marking an absent bound.
pub const UNBOUNDED: f64 = 1e30;

impl Bounds {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if lower > upper {
            return Err(Error::InvalidBounds { ua: lower, ub: upper });
        }
        Ok(Bounds { lower, upper })
    }

    pub fn clamp(&self, v: f64) -> f64 {
        v.max(self.lower).min(self.upper)
    }

    pub fn is_lower_active(&self, v: f64) -> bool {
        self.lower > -UNBOUNDED && (v - self.lower).abs() <= 1e-12
    }

    pub fn is_upper_active(&self, v: f64) -> bool {
        self.upper < UNBOUNDED && (v - self.upper).abs() <= 1e-12
    }
}

/// Pointwise projection onto [u_a, u_b].
pub fn clamp(value: f64, u_a: f64, u_b: f64) -> Result<f64> {
    Ok(Bounds::new(u_a, u_b)?.clamp(value))
}

/// An element of the control space: one value per boundary edge.
#[derive(Debug, Clone)]
pub struct BoundaryControl {
    pub mesh: Arc<GradedMesh>,
    pub values: Vec<f64>,
}

impl BoundaryControl {
    pub fn new(mesh: Arc<GradedMesh>, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), mesh.num_boundary_edges());
        BoundaryControl { mesh, values }
    }

    pub fn zeros(mesh: Arc<GradedMesh>) -> Self {
        let n = mesh.num_boundary_edges();
        BoundaryControl { mesh, values: vec![0.0; n] }
    }

    pub fn constant(mesh: Arc<GradedMesh>, c: f64) -> Self {
        let n = mesh.num_boundary_edges();
        BoundaryControl { mesh, values: vec![c; n] }
    }

    /// L2(Gamma) inner product (exact for piecewise constants).
    pub fn inner(&self, other: &BoundaryControl) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .enumerate()
            .map(|(e, (a, b))| self.mesh.edge_length(e) * a * b)
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).sqrt()
    }

    pub fn axpy(&mut self, alpha: f64, other: &BoundaryControl) {
        for (v, o) in self.values.iter_mut().zip(&other.values) {
            *v += alpha * o;
        }
    }

    pub fn diff_norm(&self, other: &BoundaryControl) -> f64 {
        let mut d = self.clone();
        d.axpy(-1.0, other);
        d.norm()
    }

    pub fn clamped(&self, bounds: Bounds) -> BoundaryControl {
        BoundaryControl {
            mesh: self.mesh.clone(),
            values: self.values.iter().map(|&v| bounds.clamp(v)).collect(),
        }
    }

    pub fn is_admissible(&self, bounds: Bounds) -> bool {
        self.values
            .iter()
            .all(|&v| v >= bounds.lower - 1e-14 && v <= bounds.upper + 1e-14)
    }

    /// Serialization as text rows `edge_index value`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (e, v) in self.values.iter().enumerate() {
            out.push_str(&format!("{e} {v:.17e}\n"));
        }
        out
    }

    pub fn from_text(mesh: Arc<GradedMesh>, text: &str) -> Result<Self> {
        let mut values = vec![0.0; mesh.num_boundary_edges()];
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            let mut parts = line.split_whitespace();
            let e: usize = parts
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::Parse(format!("bad control row: {line}")))?;
            let v: f64 = parts
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::Parse(format!("bad control row: {line}")))?;
            if e >= values.len() {
                return Err(Error::Parse(format!("edge index {e} out of range")));
            }
            values[e] = v;
        }
        Ok(BoundaryControl { mesh, values })
    }
}

/// Cumulative arclength at the start of each boundary edge, plus the total
/// boundary length as a final entry.
fn boundary_arclengths(mesh: &GradedMesh) -> Vec<f64> {
    let mut s = Vec::with_capacity(mesh.num_boundary_edges() + 1);
    let mut acc = 0.0;
    for e in 0..mesh.num_boundary_edges() {
        s.push(acc);
        acc += mesh.edge_length(e);
    }
    s.push(acc);
    s
}

/// Transfers a control between meshes of the same domain: each target edge
/// takes the source value at its midpoint arclength. Both boundary loops
/// start at corner 0 and run counterclockwise, so arclength identifies
/// points on the physical boundary.
pub fn prolong(source: &BoundaryControl, target: &Arc<GradedMesh>) -> BoundaryControl {
    let src_s = boundary_arclengths(&source.mesh);
    let tgt_s = boundary_arclengths(target);
    let total = src_s[src_s.len() - 1];
    let values = (0..target.num_boundary_edges())
        .map(|e| {
            let mid = 0.5 * (tgt_s[e] + tgt_s[e + 1]);
            let mid = mid.min(total * (1.0 - 1e-15));
            // locate the source edge containing this arclength
            let idx = match src_s.binary_search_by(|s| s.partial_cmp(&mid).unwrap()) {
                Ok(i) => i.min(source.values.len() - 1),
                Err(i) => i - 1,
            };
            source.values[idx.min(source.values.len() - 1)]
        })
        .collect();
    BoundaryControl { mesh: target.clone(), values }
}

/// Edgewise L2 projection Q_h: per-edge mean value, 3-point Gauss.
pub fn l2_project_qh(mesh: &Arc<GradedMesh>, f: impl Fn(Point) -> f64) -> BoundaryControl {
    let rule = quadrature::edge_gauss3();
    let values = (0..mesh.num_boundary_edges())
        .map(|e| {
            rule.points
                .iter()
                .zip(&rule.weights)
                .map(|(&t, &w)| w * f(mesh.edge_point(e, t)))
                .sum()
        })
        .collect();
    BoundaryControl { mesh: mesh.clone(), values }
}

/// Q_h applied to the boundary trace of a P1 function (exact: the trace is
/// linear per edge, so the mean is the midpoint value).
pub fn project_trace(fe: &FeFunction) -> BoundaryControl {
    let mesh = fe.mesh.clone();
    let values = (0..mesh.num_boundary_edges())
        .map(|e| fe.eval_on_edge(e, 0.5))
        .collect();
    BoundaryControl { mesh, values }
}

/// Midpoint interpolator R_h: per-edge value f(S_E).
pub fn midpoint_interpolate_rh(mesh: &Arc<GradedMesh>, f: impl Fn(Point) -> f64) -> BoundaryControl {
    let values = (0..mesh.num_boundary_edges())
        .map(|e| f(mesh.edge_midpoint(e)))
        .collect();
    BoundaryControl { mesh: mesh.clone(), values }
}

/// Per-edge label: K1 edges mix active and inactive points of the exact
/// control; K2 edges do not.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeLabel {
    K1,
    K2,
}

/// Classification of all boundary edges with anchor parameters for K1 edges.
#[derive(Debug, Clone)]
pub struct EdgeClassification {
    pub labels: Vec<EdgeLabel>,
    /// For K1 edges: edge parameter of a point where the control meets a
    /// bound (the crossing closest to the edge midpoint).
    pub anchors: Vec<Option<f64>>,
}

impl EdgeClassification {
    pub fn meas_k1(&self, mesh: &GradedMesh) -> f64 {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, &l)| l == EdgeLabel::K1)
            .map(|(e, _)| mesh.edge_length(e))
            .sum()
    }

    pub fn k1_count(&self) -> usize {
        self.labels.iter().filter(|&&l| l == EdgeLabel::K1).count()
    }
}

const CLASSIFY_SAMPLES: usize = 64;
const ACTIVE_ATOL: f64 = 1e-12;

/// Classifies boundary edges into K1/K2 by dense sampling of the exact
/// control, with bisection refinement of activity transitions.
pub fn classify_edges(
    mesh: &Arc<GradedMesh>,
    u_exact: impl Fn(Point) -> f64,
    u_a: f64,
    u_b: f64,
) -> Result<EdgeClassification> {
    let bounds = Bounds::new(u_a, u_b)?;
    let is_active = |v: f64| {
        (v - bounds.lower).abs() <= ACTIVE_ATOL || (v - bounds.upper).abs() <= ACTIVE_ATOL
            || v < bounds.lower || v > bounds.upper
    };
    let mut labels = Vec::with_capacity(mesh.num_boundary_edges());
    let mut anchors = Vec::with_capacity(mesh.num_boundary_edges());
    for e in 0..mesh.num_boundary_edges() {
        let eval = |t: f64| u_exact(mesh.edge_point(e, t));
        let n = CLASSIFY_SAMPLES;
        let samples: Vec<(f64, bool)> = (0..=n)
            .map(|k| {
                let t = k as f64 / n as f64;
                (t, is_active(eval(t)))
            })
            .collect();
        let any_active = samples.iter().any(|&(_, a)| a);
        let any_inactive = samples.iter().any(|&(_, a)| !a);
        if any_active && any_inactive {
            // bisect every activity transition and keep the crossing closest
            // to the midpoint
            let mut best: Option<f64> = None;
            for w in samples.windows(2) {
                let (t0, a0) = w[0];
                let (t1, a1) = w[1];
                if a0 != a1 {
                    let (mut lo, mut hi) = (t0, t1);
                    for _ in 0..60 {
                        let mid = 0.5 * (lo + hi);
                        if is_active(eval(mid)) == a0 {
                            lo = mid;
                        } else {
                            hi = mid;
                        }
                    }
                    // take the endpoint of the bracket on the active side
                    let anchor = if a0 { lo } else { hi };
                    if best.map_or(true, |b| (anchor - 0.5).abs() < (b - 0.5).abs()) {
                        best = Some(anchor);
                    }
                }
            }
            labels.push(EdgeLabel::K1);
            anchors.push(best);
        } else {
            labels.push(EdgeLabel::K2);
            anchors.push(None);
        }
    }
    Ok(EdgeClassification { labels, anchors })
}

/// Modified interpolator: midpoint values on K2 edges, the bound value at
/// the anchor point on K1 edges.
pub fn modified_interpolate_rhu(
    mesh: &Arc<GradedMesh>,
    u_exact: impl Fn(Point) -> f64,
    cls: &EdgeClassification,
) -> Result<BoundaryControl> {
    let mut values = Vec::with_capacity(mesh.num_boundary_edges());
    for e in 0..mesh.num_boundary_edges() {
        match cls.labels[e] {
            EdgeLabel::K2 => values.push(u_exact(mesh.edge_midpoint(e))),
            EdgeLabel::K1 => {
                let t = cls.anchors[e].ok_or(Error::MissingAnchor(e))?;
                values.push(u_exact(mesh.edge_point(e, t)));
            }
        }
    }
    Ok(BoundaryControl { mesh: mesh.clone(), values })
}

/// The postprocessed control: the clamped boundary trace of -p_h / nu,
/// stored unclamped so that clamp crossings can be recovered exactly for
/// sub-edge quadrature.
#[derive(Debug, Clone)]
pub struct PostprocessedControl {
    /// Unclamped nodal values of -p_h / nu (full nodal vector; only boundary
    /// vertices are meaningful).
    pub trace: FeFunction,
    pub bounds: Bounds,
}

impl PostprocessedControl {
    pub fn eval_on_edge(&self, e: usize, t: f64) -> f64 {
        self.bounds.clamp(self.trace.eval_on_edge(e, t))
    }

    /// Edge parameters where the unclamped linear trace crosses a bound.
    pub fn kink_params(&self, e: usize) -> Vec<f64> {
        let [a, b] = self.trace.mesh.boundary_edges[e].vertices;
        let (va, vb) = (self.trace.values[a], self.trace.values[b]);
        let mut kinks = Vec::new();
        for bound in [self.bounds.lower, self.bounds.upper] {
            if bound.abs() >= UNBOUNDED {
                continue;
            }
            if (vb - va).abs() > 0.0 {
                let t = (bound - va) / (vb - va);
                if t > 1e-14 && t < 1.0 - 1e-14 {
                    kinks.push(t);
                }
            }
        }
        kinks
    }
}

/// Builds the postprocessed control from the discrete adjoint state.
pub fn postprocess(p: &FeFunction, nu: f64, u_a: f64, u_b: f64) -> Result<PostprocessedControl> {
    let bounds = Bounds::new(u_a, u_b)?;
    if !(nu > 0.0) {
        return Err(Error::Config(format!("nu = {nu} must be positive")));
    }
    let trace = FeFunction::new(
        p.mesh.clone(),
        p.values.iter().map(|&v| -v / nu).collect(),
    );
    Ok(PostprocessedControl { trace, bounds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry;
    use crate::mesh::{build_sector_domain, generate_graded_mesh};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn lshape_mesh(h: f64) -> Arc<GradedMesh> {
        let domain = build_sector_domain(1.5 * PI).unwrap();
        let m = domain.corners.len();
        Arc::new(generate_graded_mesh(&domain, h, &vec![1.0; m], &vec![0.5; m]).unwrap())
    }

    #[test]
    fn clamp_basics() {
        assert_eq!(clamp(0.5, -0.8, 0.8).unwrap(), 0.5);
        assert_eq!(clamp(1.2, -0.8, 0.8).unwrap(), 0.8);
        assert_eq!(clamp(-1.2, -0.8, 0.8).unwrap(), -0.8);
        assert!(clamp(0.0, 1.0, -1.0).is_err());
    }

    proptest! {
        #[test]
        fn clamp_idempotent_and_lipschitz(a in -10.0f64..10.0, b in -10.0f64..10.0) {
            let bounds = Bounds::new(-0.8, 0.8).unwrap();
            let ca = bounds.clamp(a);
            prop_assert_eq!(bounds.clamp(ca), ca);
            prop_assert!((bounds.clamp(a) - bounds.clamp(b)).abs() <= (a - b).abs() + 1e-15);
        }
    }

    #[test]
    fn qh_projection_properties() {
        let mesh = lshape_mesh(0.25);
        // constants reproduce
        let q = l2_project_qh(&mesh, |_| 3.25);
        assert!(q.values.iter().all(|&v| (v - 3.25).abs() < 1e-14));
        // projection property: projecting the projection changes nothing
        let f = |p: Point| p[0] * p[0] - 0.5 * p[1];
        let q1 = l2_project_qh(&mesh, f);
        // evaluate q1 as a piecewise-constant boundary function
        let mesh2 = mesh.clone();
        let q1c = q1.clone();
        let q2 = l2_project_qh(&mesh, move |p| {
            // locate the edge containing p (only called at quadrature points)
            let e = (0..mesh2.num_boundary_edges())
                .min_by(|&a, &b| {
                    let da = geometry::dist_point_segment(
                        p,
                        mesh2.vertices[mesh2.boundary_edges[a].vertices[0]],
                        mesh2.vertices[mesh2.boundary_edges[a].vertices[1]],
                    );
                    let db = geometry::dist_point_segment(
                        p,
                        mesh2.vertices[mesh2.boundary_edges[b].vertices[0]],
                        mesh2.vertices[mesh2.boundary_edges[b].vertices[1]],
                    );
                    da.partial_cmp(&db).unwrap()
                })
                .unwrap();
            q1c.values[e]
        });
        for (a, b) in q1.values.iter().zip(&q2.values) {
            assert!((a - b).abs() < 1e-13);
        }
        // trace projection equals midpoint value of the trace
        let fe = FeFunction::interpolate(mesh.clone(), |p| 2.0 * p[0] - p[1]);
        let qt = project_trace(&fe);
        for e in 0..mesh.num_boundary_edges() {
            assert!((qt.values[e] - fe.eval_on_edge(e, 0.5)).abs() < 1e-14);
        }
    }

    #[test]
    fn qh_best_approximation_per_edge() {
        // || f - Q_h f ||_E <= || f - c ||_E for any constant, on quadratics
        use rand::prelude::*;
        let mesh = lshape_mesh(0.5);
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..10 {
            let (a, b, c) = (rng.gen::<f64>(), rng.gen::<f64>(), rng.gen::<f64>());
            let f = move |p: Point| a * p[0] * p[0] + b * p[0] * p[1] + c;
            let q = l2_project_qh(&mesh, f);
            let rule = quadrature::edge_gauss7();
            for e in 0..mesh.num_boundary_edges() {
                let len = mesh.edge_length(e);
                let err2 = |cst: f64| -> f64 {
                    rule.points
                        .iter()
                        .zip(&rule.weights)
                        .map(|(&t, &w)| {
                            let d = f(mesh.edge_point(e, t)) - cst;
                            w * len * d * d
                        })
                        .sum()
                };
                let best = err2(q.values[e]);
                for trial in [-1.0, 0.0, 0.3, 1.0] {
                    assert!(best <= err2(q.values[e] + trial) + 1e-14);
                }
            }
        }
    }

    #[test]
    fn midpoint_interpolator() {
        let mesh = lshape_mesh(0.5);
        let c = midpoint_interpolate_rh(&mesh, |_| 7.0);
        assert!(c.values.iter().all(|&v| v == 7.0));
        // integral exactness on P1 per edge: the midpoint value integrates
        // linear functions exactly
        let f = |p: Point| 3.0 * p[0] - 2.0 * p[1] + 0.5;
        let r = midpoint_interpolate_rh(&mesh, f);
        let rule = quadrature::edge_gauss3();
        for e in 0..mesh.num_boundary_edges() {
            let len = mesh.edge_length(e);
            let int_f: f64 = rule
                .points
                .iter()
                .zip(&rule.weights)
                .map(|(&t, &w)| w * len * f(mesh.edge_point(e, t)))
                .sum();
            assert!((int_f - r.values[e] * len).abs() < 1e-14);
        }
    }

    #[test]
    fn midpoint_quadratic_mismatch() {
        // f(t) = t^2 in the normalized edge parameter: midpoint value 1/4,
        // exact mean 1/3, mismatch 1/12
        let mesh = lshape_mesh(0.9);
        let e = 0;
        let start = mesh.edge_point(e, 0.0);
        let len = mesh.edge_length(e);
        let f = move |p: Point| {
            let t = geometry::dist(p, start) / len;
            t * t
        };
        let val = f(mesh.edge_midpoint(e));
        assert!((val - 0.25).abs() < 1e-14);
        let rule = quadrature::edge_gauss3();
        let int_f: f64 = rule
            .points
            .iter()
            .zip(&rule.weights)
            .map(|(&t, &w)| w * f(mesh.edge_point(e, t)))
            .sum();
        assert!((int_f - val - 1.0 / 12.0).abs() < 1e-14);
    }

    #[test]
    fn classification_cases() {
        let mesh = lshape_mesh(0.25);
        // strictly interior control: all K2
        let cls = classify_edges(&mesh, |_| 0.1, -0.8, 0.8).unwrap();
        assert_eq!(cls.k1_count(), 0);
        // control identically at the upper bound: all K2 (only active points)
        let cls = classify_edges(&mesh, |_| 0.8, -0.8, 0.8).unwrap();
        assert_eq!(cls.k1_count(), 0);
        // a control crossing the bound: K1 near the crossing
        let cls = classify_edges(&mesh, |p| (0.8f64).min(p[0] + 0.75), -0.8, 0.8).unwrap();
        assert!(cls.k1_count() >= 1);
        for (e, &l) in cls.labels.iter().enumerate() {
            if l == EdgeLabel::K1 {
                let t = cls.anchors[e].unwrap();
                let v = (0.8f64).min(mesh.edge_point(e, t)[0] + 0.75);
                assert!((v - 0.8).abs() < 1e-12, "anchor value {v}");
            }
        }
    }

    #[test]
    fn benchmark_control_k1_measure() {
        // exact control clamp(r^lambda cos(lambda phi)) has a bounded number
        // of clamp crossings; meas(K1) <= c h across refinement levels
        let lambda = 2.0 / 3.0;
        let u = move |p: Point| {
            let r = geometry::norm(p);
            let phi = geometry::polar_angle(p);
            (r.powf(lambda) * (lambda * phi).cos()).clamp(-0.8, 0.8)
        };
        let mut prev_count = None;
        for k in 2..=5 {
            let h = 0.5f64.powi(k);
            let mesh = lshape_mesh(h);
            let cls = classify_edges(&mesh, u, -0.8, 0.8).unwrap();
            let count = cls.k1_count();
            assert!(count <= 8, "K1 count {count} at h = {h}");
            if let Some(p) = prev_count {
                // crossing count stays bounded, not growing with refinement
                assert!(count <= p + 4);
            }
            prev_count = Some(count);
            let meas = cls.meas_k1(&mesh);
            assert!(meas <= 8.0 * 2.0 * h, "meas(K1) = {meas} at h = {h}");
        }
    }

    #[test]
    fn modified_interpolator_cases() {
        let mesh = lshape_mesh(0.25);
        // all-K2: identical to the midpoint interpolator
        let f = |p: Point| 0.3 * p[0] - 0.1;
        let cls = classify_edges(&mesh, f, -0.8, 0.8).unwrap();
        let rhu = modified_interpolate_rhu(&mesh, f, &cls).unwrap();
        let rh = midpoint_interpolate_rh(&mesh, f);
        for (a, b) in rhu.values.iter().zip(&rh.values) {
            assert!((a - b).abs() < 1e-14);
        }
        // constants reproduce exactly
        let cls = classify_edges(&mesh, |_| 0.5, -0.8, 0.8).unwrap();
        let rhu = modified_interpolate_rhu(&mesh, |_| 0.5, &cls).unwrap();
        assert!(rhu.values.iter().all(|&v| v == 0.5));
        // K1 edge takes the bound value
        let g = |p: Point| (0.8f64).min(p[0] + 0.75);
        let cls = classify_edges(&mesh, g, -0.8, 0.8).unwrap();
        let rhu = modified_interpolate_rhu(&mesh, g, &cls).unwrap();
        let mut saw_k1 = false;
        for (e, &l) in cls.labels.iter().enumerate() {
            if l == EdgeLabel::K1 {
                saw_k1 = true;
                assert!((rhu.values[e] - 0.8).abs() < 1e-12);
            }
        }
        assert!(saw_k1);
        // admissibility: output within the bounds of the sampled control
        assert!(rhu.is_admissible(Bounds::new(-0.8, 0.8).unwrap()));
    }

    #[test]
    fn postprocess_cases() {
        let mesh = lshape_mesh(0.25);
        let p0 = FeFunction::zeros(mesh.clone());
        let pp = postprocess(&p0, 1.0, -0.8, 0.8).unwrap();
        for e in 0..mesh.num_boundary_edges() {
            assert_eq!(pp.eval_on_edge(e, 0.3), 0.0);
        }
        let pc = FeFunction::constant(mesh.clone(), -2.0);
        let pp = postprocess(&pc, 1.0, -0.8, 0.8).unwrap();
        for e in 0..mesh.num_boundary_edges() {
            assert_eq!(pp.eval_on_edge(e, 0.7), 0.8);
        }
        assert!(postprocess(&pc, 1.0, 0.8, -0.8).is_err());
        // kink recovery: a trace crossing the bound inside an edge
        let lin = FeFunction::interpolate(mesh.clone(), |p| p[0]);
        let pp = PostprocessedControl {
            trace: lin,
            bounds: Bounds::new(-0.8, 0.8).unwrap(),
        };
        let mut found = false;
        for e in 0..mesh.num_boundary_edges() {
            for t in pp.kink_params(e) {
                let x = mesh.edge_point(e, t);
                assert!((x[0].abs() - 0.8).abs() < 1e-12);
                found = true;
            }
        }
        assert!(found, "expected kinks where |x| crosses 0.8 on the boundary");
    }

    #[test]
    fn prolongation_by_arclength() {
        let coarse = lshape_mesh(0.5);
        let fine = lshape_mesh(0.25);
        let c = BoundaryControl::constant(coarse.clone(), 0.7);
        let p = prolong(&c, &fine);
        assert!(p.values.iter().all(|&v| v == 0.7));
        // a generic control: each fine edge must inherit the value of the
        // coarse edge that geometrically contains its midpoint
        let u = BoundaryControl::new(
            coarse.clone(),
            (0..coarse.num_boundary_edges()).map(|e| (e as f64).sin()).collect(),
        );
        let p = prolong(&u, &fine);
        for e in 0..fine.num_boundary_edges() {
            let mid = fine.edge_midpoint(e);
            let owner = (0..coarse.num_boundary_edges())
                .find(|&c| {
                    geometry::dist_point_segment(
                        mid,
                        coarse.vertices[coarse.boundary_edges[c].vertices[0]],
                        coarse.vertices[coarse.boundary_edges[c].vertices[1]],
                    ) < 1e-12
                })
                .expect("fine midpoint lies on the coarse boundary");
            assert_eq!(p.values[e], u.values[owner]);
        }
    }

    #[test]
    fn control_text_roundtrip() {
        let mesh = lshape_mesh(0.5);
        let u = BoundaryControl::new(
            mesh.clone(),
            (0..mesh.num_boundary_edges()).map(|e| e as f64 * 0.1 - 0.4).collect(),
        );
        let text = u.to_text();
        let back = BoundaryControl::from_text(mesh, &text).unwrap();
        for (a, b) in u.values.iter().zip(&back.values) {
            assert!((a - b).abs() < 1e-16);
        }
    }
}
