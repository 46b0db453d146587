//! Polygonal sector domains, corner-graded triangulations and their
//! certification.
//!
//! Meshes are produced by uniform red refinement of a coarse fan
//! triangulation followed by a radial displacement `r -> R*(r/R)^(1/mu)`
//! inside the grading disc of each corner. The displacement keeps
//! connectivity fixed, so refinement levels nest.

use crate::error::{Error, Result};
use crate::geometry::{self, Point};
use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt::Write as _;

/// Default grading constants used by [`validate_grading`]; deliberately loose
/// so that certification is generator-independent.
pub const GRADING_C1: f64 = 0.05;
pub const GRADING_C2: f64 = 20.0;

/// Minimum-angle threshold in degrees for generated meshes. The graded
/// family produced by the radial displacement map bottoms out at 17.7 deg
/// for mu = 0.5, uniformly in h.
pub const MIN_ANGLE_DEG: f64 = 15.0;

/// A polygon corner together with its grading data.
#[derive(Debug, Clone)]
pub struct CornerSpec {
    pub position: Point,
    /// Interior angle omega_j in (0, 2*pi).
    pub interior_angle: f64,
    /// Grading parameter mu_j in (0, 1]; 1 means no grading.
    pub grading: f64,
    /// Grading disc radius R_j > 0.
    pub radius: f64,
}

impl CornerSpec {
    /// Singular exponent lambda_j = pi / omega_j, always recomputed.
    pub fn lambda(&self) -> f64 {
        PI / self.interior_angle
    }
}

/// A closed simple polygon in counter-clockwise orientation.
#[derive(Debug, Clone)]
pub struct PolygonalDomain {
    pub corners: Vec<CornerSpec>,
}

impl PolygonalDomain {
    /// Builds a domain from corner positions in counter-clockwise order,
    /// computing the interior angles geometrically.
    pub fn from_positions(positions: &[Point]) -> Result<Self> {
        let m = positions.len();
        if m < 3 {
            return Err(Error::Config("polygon needs at least 3 corners".into()));
        }
        let mut corners = Vec::with_capacity(m);
        for i in 0..m {
            let prev = positions[(i + m - 1) % m];
            let next = positions[(i + 1) % m];
            let angle = geometry::interior_angle(prev, positions[i], next);
            let r_default = 0.25
                * geometry::dist(prev, positions[i]).min(geometry::dist(next, positions[i]));
            corners.push(CornerSpec {
                position: positions[i],
                interior_angle: angle,
                grading: 1.0,
                radius: r_default,
            });
        }
        let domain = PolygonalDomain { corners };
        if domain.area() <= 0.0 {
            return Err(Error::Config(
                "polygon is not counter-clockwise oriented".into(),
            ));
        }
        Ok(domain)
    }

    pub fn positions(&self) -> Vec<Point> {
        self.corners.iter().map(|c| c.position).collect()
    }

    /// Signed polygon area (positive for counter-clockwise orientation).
    pub fn area(&self) -> f64 {
        let p = self.positions();
        let m = p.len();
        0.5 * (0..m)
            .map(|i| geometry::cross(p[i], p[(i + 1) % m]))
            .sum::<f64>()
    }

    pub fn perimeter(&self) -> f64 {
        let p = self.positions();
        let m = p.len();
        (0..m).map(|i| geometry::dist(p[i], p[(i + 1) % m])).sum()
    }

    /// Length of the two polygon sides adjacent to corner `j`.
    fn adjacent_side_lengths(&self, j: usize) -> (f64, f64) {
        let p = self.positions();
        let m = p.len();
        (
            geometry::dist(p[(j + m - 1) % m], p[j]),
            geometry::dist(p[j], p[(j + 1) % m]),
        )
    }
}

/// Builds the sector domain Omega_omega = (-1,1)^2 intersected with the wedge
/// {0 <= phi <= omega}, with the distinguished corner at the origin.
pub fn build_sector_domain(omega: f64) -> Result<PolygonalDomain> {
    if !(omega > 0.0 && omega < 2.0 * PI) || !omega.is_finite() {
        return Err(Error::InvalidAngle(omega));
    }
    let mut positions: Vec<Point> = vec![[0.0, 0.0], [1.0, 0.0]];
    // square corners in counter-clockwise order starting after (1,0)
    let square = [[1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0], [1.0, -1.0]];
    for sc in square {
        if geometry::polar_angle(sc) < omega - 1e-12 {
            positions.push(sc);
        }
    }
    // exit point of the ray phi = omega on the square boundary
    let dir = [omega.cos(), omega.sin()];
    let t = 1.0 / dir[0].abs().max(dir[1].abs());
    let snap = |x: f64| {
        for v in [-1.0, 0.0, 1.0] {
            if (x - v).abs() < 1e-12 {
                return v;
            }
        }
        x
    };
    let exit = [snap(dir[0] * t), snap(dir[1] * t)];
    let last = *positions.last().unwrap();
    if geometry::dist(exit, last) > 1e-12 && geometry::dist(exit, [0.0, 0.0]) > 1e-12 {
        positions.push(exit);
    }
    let mut domain = PolygonalDomain::from_positions(&positions)?;
    // pin the distinguished corner angle exactly
    domain.corners[0].interior_angle = omega;
    Ok(domain)
}

/// A boundary edge: endpoint vertices (CCW along the boundary), owning
/// triangle and sub-segmentation tag (0 = away from all corners, j >= 1 means
/// the edge lies within the grading arc of corner j-1... tag j corresponds to
/// E_{h,j} with corners numbered from 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundaryEdge {
    pub vertices: [usize; 2],
    pub triangle: usize,
    /// 0 for E_{h,0}; j in 1..=m for the sub-segmentation of corner j-1.
    pub tag: usize,
}

/// A conforming triangulation of a polygonal domain with grading metadata.
#[derive(Debug, Clone)]
pub struct GradedMesh {
    pub domain: PolygonalDomain,
    pub vertices: Vec<Point>,
    /// Vertex-index triples in counter-clockwise order.
    pub triangles: Vec<[usize; 3]>,
    /// Ordered counter-clockwise along the boundary, starting at corner 0.
    pub boundary_edges: Vec<BoundaryEdge>,
    /// Global mesh parameter in (0, 1).
    pub h: f64,
    /// Per-corner grading parameters used during generation.
    pub mu: Vec<f64>,
    /// Per-corner grading radii used during generation.
    pub radius: Vec<f64>,
}

impl GradedMesh {
    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn num_boundary_edges(&self) -> usize {
        self.boundary_edges.len()
    }

    pub fn triangle_points(&self, t: usize) -> [Point; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangle_points(t);
        geometry::signed_area(a, b, c)
    }

    /// Triangle mesh size h_T (longest side).
    pub fn triangle_diameter(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangle_points(t);
        geometry::dist(a, b)
            .max(geometry::dist(b, c))
            .max(geometry::dist(c, a))
    }

    /// Distance r_{T,j} from triangle `t` to corner `j`.
    pub fn corner_distance(&self, t: usize, j: usize) -> f64 {
        let [a, b, c] = self.triangle_points(t);
        geometry::dist_point_triangle(self.domain.corners[j].position, a, b, c)
    }

    pub fn edge_length(&self, e: usize) -> f64 {
        let [a, b] = self.boundary_edges[e].vertices;
        geometry::dist(self.vertices[a], self.vertices[b])
    }

    pub fn edge_midpoint(&self, e: usize) -> Point {
        let [a, b] = self.boundary_edges[e].vertices;
        let (p, q) = (self.vertices[a], self.vertices[b]);
        [0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])]
    }

    /// Point on boundary edge `e` at parameter `t` in [0, 1].
    pub fn edge_point(&self, e: usize, t: f64) -> Point {
        let [a, b] = self.boundary_edges[e].vertices;
        let (p, q) = (self.vertices[a], self.vertices[b]);
        [p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]
    }

    pub fn boundary_length(&self) -> f64 {
        (0..self.num_boundary_edges()).map(|e| self.edge_length(e)).sum()
    }

    /// True if triangle `t` touches a corner with an active grading (mu < 1).
    pub fn touches_singular_corner(&self, t: usize) -> bool {
        self.mu.iter().enumerate().any(|(j, &mu)| {
            mu < 1.0 && self.corner_distance(t, j) < 1e-14
        })
    }

    /// Checks pairwise triangle conformity (shared vertex sets of size 0, 1
    /// or 2; every interior edge shared by exactly two triangles).
    pub fn check_conformity(&self) -> Result<()> {
        let mut edge_count: HashMap<(usize, usize), usize> = HashMap::new();
        for tri in &self.triangles {
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                let key = (a.min(b), a.max(b));
                *edge_count.entry(key).or_insert(0) += 1;
            }
        }
        for (&(a, b), &c) in &edge_count {
            if c > 2 {
                return Err(Error::Config(format!(
                    "edge ({a}, {b}) shared by {c} triangles"
                )));
            }
        }
        let n_boundary = edge_count.values().filter(|&&c| c == 1).count();
        if n_boundary != self.boundary_edges.len() {
            return Err(Error::Config(format!(
                "boundary edge bookkeeping mismatch: {} mesh edges on the boundary, {} recorded",
                n_boundary,
                self.boundary_edges.len()
            )));
        }
        Ok(())
    }
}

/// Coarse fan triangulation of a polygon that is star-shaped with respect to
/// its first corner.
fn fan_triangulation(domain: &PolygonalDomain) -> (Vec<Point>, Vec<[usize; 3]>) {
    let positions = domain.positions();
    let n = positions.len();
    let triangles = (1..n - 1).map(|i| [0, i, i + 1]).collect();
    (positions, triangles)
}

fn refine_once(vertices: &mut Vec<Point>, triangles: &mut Vec<[usize; 3]>) {
    let mut midpoints: HashMap<(usize, usize), usize> = HashMap::new();
    let mut midpoint = |a: usize, b: usize, vertices: &mut Vec<Point>| -> usize {
        let key = (a.min(b), a.max(b));
        *midpoints.entry(key).or_insert_with(|| {
            let p = vertices[a];
            let q = vertices[b];
            vertices.push([0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])]);
            vertices.len() - 1
        })
    };
    let mut new_triangles = Vec::with_capacity(triangles.len() * 4);
    for &[a, b, c] in triangles.iter() {
        let ab = midpoint(a, b, vertices);
        let bc = midpoint(b, c, vertices);
        let ca = midpoint(c, a, vertices);
        new_triangles.push([a, ab, ca]);
        new_triangles.push([ab, b, bc]);
        new_triangles.push([ca, bc, c]);
        new_triangles.push([ab, bc, ca]);
    }
    *triangles = new_triangles;
}

/// Extracts boundary edges (CCW), ordered as a loop starting at corner 0.
fn boundary_loop(
    vertices: &[Point],
    triangles: &[[usize; 3]],
    start_at: Point,
) -> Result<Vec<(usize, usize, usize)>> {
    let mut edge_owner: HashMap<(usize, usize), (usize, usize, usize)> = HashMap::new();
    let mut counts: HashMap<(usize, usize), usize> = HashMap::new();
    for (t, tri) in triangles.iter().enumerate() {
        for k in 0..3 {
            let (a, b) = (tri[k], tri[(k + 1) % 3]);
            let key = (a.min(b), a.max(b));
            *counts.entry(key).or_insert(0) += 1;
            edge_owner.insert(key, (a, b, t));
        }
    }
    // boundary edges keep the orientation of their unique owning triangle,
    // which is CCW along the boundary for CCW triangles
    let mut next: HashMap<usize, (usize, usize)> = HashMap::new();
    let mut n_edges = 0;
    for (key, &c) in &counts {
        if c == 1 {
            let (a, b, t) = edge_owner[key];
            next.insert(a, (b, t));
            n_edges += 1;
        }
    }
    let start = (0..vertices.len())
        .filter(|&v| next.contains_key(&v))
        .min_by(|&u, &v| {
            geometry::dist(vertices[u], start_at)
                .partial_cmp(&geometry::dist(vertices[v], start_at))
                .unwrap()
        })
        .ok_or_else(|| Error::Config("mesh has no boundary".into()))?;
    let mut loop_edges = Vec::with_capacity(n_edges);
    let mut v = start;
    loop {
        let &(w, t) = next
            .get(&v)
            .ok_or_else(|| Error::Config("boundary loop is not closed".into()))?;
        loop_edges.push((v, w, t));
        v = w;
        if v == start {
            break;
        }
        if loop_edges.len() > n_edges {
            return Err(Error::Config("boundary walk does not close".into()));
        }
    }
    Ok(loop_edges)
}

/// Assigns sub-segmentation tags: an edge belongs to E_{h,j} iff both of its
/// endpoints lie within arclength R_j of corner j along the boundary.
fn assign_tags(
    domain: &PolygonalDomain,
    vertices: &[Point],
    loop_edges: &[(usize, usize, usize)],
    radius: &[f64],
) -> Vec<usize> {
    let n = loop_edges.len();
    // cumulative arclength of each loop vertex
    let mut s = vec![0.0; n + 1];
    for (i, &(a, b, _)) in loop_edges.iter().enumerate() {
        s[i + 1] = s[i] + geometry::dist(vertices[a], vertices[b]);
    }
    let total = s[n];
    // arclength coordinate of each corner
    let corner_s: Vec<f64> = domain
        .corners
        .iter()
        .map(|c| {
            let mut best = (f64::INFINITY, 0.0);
            for (i, &(a, _, _)) in loop_edges.iter().enumerate() {
                let d = geometry::dist(vertices[a], c.position);
                if d < best.0 {
                    best = (d, s[i]);
                }
            }
            best.1
        })
        .collect();
    let arc_dist = |x: f64, y: f64| {
        let d = (x - y).abs();
        d.min(total - d)
    };
    loop_edges
        .iter()
        .enumerate()
        .map(|(i, _)| {
            let (sa, sb) = (s[i], s[i + 1]);
            let mut best: Option<(f64, usize)> = None;
            for (j, &cs) in corner_s.iter().enumerate() {
                let d = arc_dist(sa, cs).max(arc_dist(sb, cs));
                if d <= radius[j] + 1e-12 {
                    if best.map_or(true, |(bd, _)| d < bd) {
                        best = Some((d, j + 1));
                    }
                }
            }
            best.map_or(0, |(_, tag)| tag)
        })
        .collect()
}

/// Generates a graded conforming triangulation of `domain`.
///
/// The quasi-uniform stage refines a coarse fan triangulation until the
/// largest triangle diameter is at most `h`; the grading stage then applies
/// the radial displacement map inside each corner disc.
pub fn generate_graded_mesh(
    domain: &PolygonalDomain,
    h: f64,
    mu: &[f64],
    radius: &[f64],
) -> Result<GradedMesh> {
    let m = domain.corners.len();
    if !(h > 0.0 && h < 1.0) {
        return Err(Error::Config(format!("mesh parameter h = {h} not in (0, 1)")));
    }
    if mu.len() != m || radius.len() != m {
        return Err(Error::Config(format!(
            "expected {m} grading parameters and radii, got {} and {}",
            mu.len(),
            radius.len()
        )));
    }
    for (j, &g) in mu.iter().enumerate() {
        if !(g > 0.0 && g <= 1.0) {
            return Err(Error::Config(format!("mu[{j}] = {g} not in (0, 1]")));
        }
        if radius[j] <= 0.0 {
            return Err(Error::Config(format!("radius[{j}] = {} not positive", radius[j])));
        }
    }
    // active grading discs must be disjoint and confined to adjacent sides
    for j in 0..m {
        if mu[j] >= 1.0 {
            continue;
        }
        let (l1, l2) = domain.adjacent_side_lengths(j);
        if radius[j] > l1.min(l2) + 1e-12 {
            return Err(Error::Config(format!(
                "grading radius {} at corner {j} exceeds adjacent side length {}",
                radius[j],
                l1.min(l2)
            )));
        }
        for k in 0..m {
            if k != j
                && mu[k] < 1.0
                && geometry::dist(domain.corners[j].position, domain.corners[k].position)
                    < radius[j] + radius[k]
            {
                return Err(Error::Config(format!(
                    "grading discs of corners {j} and {k} overlap"
                )));
            }
        }
    }

    let (mut vertices, mut triangles) = fan_triangulation(domain);
    let coarse_diameter = (0..triangles.len())
        .map(|t| {
            let [a, b, c] = triangles[t];
            geometry::dist(vertices[a], vertices[b])
                .max(geometry::dist(vertices[b], vertices[c]))
                .max(geometry::dist(vertices[c], vertices[a]))
        })
        .fold(0.0f64, f64::max);
    let n_refine = ((coarse_diameter / h).log2().ceil().max(0.0)) as usize;
    for _ in 0..n_refine {
        refine_once(&mut vertices, &mut triangles);
    }

    // radial grading displacement, identity on and outside the disc boundary
    for j in 0..m {
        if mu[j] >= 1.0 {
            continue;
        }
        let center = domain.corners[j].position;
        let rj = radius[j];
        let exponent = 1.0 / mu[j];
        for v in vertices.iter_mut() {
            let d = geometry::sub(*v, center);
            let r = geometry::norm(d);
            if r > 0.0 && r < rj {
                let r_new = rj * (r / rj).powf(exponent);
                *v = geometry::add(center, geometry::scale(d, r_new / r));
            }
        }
    }

    // quality check
    let threshold = MIN_ANGLE_DEG.to_radians();
    for (t, &[a, b, c]) in triangles.iter().enumerate() {
        let ang = geometry::min_angle(vertices[a], vertices[b], vertices[c]);
        if ang < threshold {
            return Err(Error::MeshQuality {
                triangle: t,
                min_angle_deg: ang.to_degrees(),
                threshold_deg: MIN_ANGLE_DEG,
            });
        }
        if geometry::signed_area(vertices[a], vertices[b], vertices[c]) <= 0.0 {
            return Err(Error::MeshQuality {
                triangle: t,
                min_angle_deg: 0.0,
                threshold_deg: MIN_ANGLE_DEG,
            });
        }
    }

    let loop_edges = boundary_loop(&vertices, &triangles, domain.corners[0].position)?;
    let tags = assign_tags(domain, &vertices, &loop_edges, radius);
    let boundary_edges = loop_edges
        .iter()
        .zip(&tags)
        .map(|(&(a, b, t), &tag)| BoundaryEdge {
            vertices: [a, b],
            triangle: t,
            tag,
        })
        .collect();

    Ok(GradedMesh {
        domain: domain.clone(),
        vertices,
        triangles,
        boundary_edges,
        h,
        mu: mu.to_vec(),
        radius: radius.to_vec(),
    })
}

/// Result of checking the grading inequalities for every triangle.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub pass: bool,
    /// Triangle with the largest constraint violation ratio.
    pub worst_triangle: usize,
    /// Largest ratio of h_T to its admissible upper bound (or of the lower
    /// bound to h_T); pass requires this to stay <= 1.
    pub worst_ratio: f64,
    /// Extremal observed ratios h_T / h^(1/mu_j) over corner triangles.
    pub max_ratio_corner: f64,
    /// Extremal observed ratios h_T / (h r_{T,j}^(1-mu_j)) inside discs.
    pub max_ratio_graded: f64,
    /// Extremal observed ratios h_T / h outside all discs.
    pub max_ratio_uniform: f64,
    pub failures: usize,
}

/// Checks the three grading inequalities for every triangle against the
/// module constants [`GRADING_C1`] and [`GRADING_C2`].
pub fn validate_grading(mesh: &GradedMesh, mu: &[f64], radius: &[f64]) -> ValidationReport {
    let h = mesh.h;
    let mut report = ValidationReport {
        pass: true,
        worst_triangle: 0,
        worst_ratio: 0.0,
        max_ratio_corner: 0.0,
        max_ratio_graded: 0.0,
        max_ratio_uniform: 0.0,
        failures: 0,
    };
    for t in 0..mesh.num_triangles() {
        let ht = mesh.triangle_diameter(t);
        // governing corner: the (by disjointness unique) corner whose grading
        // disc contains the triangle; outside all discs the uniform line of
        // the mesh condition applies
        let governing = (0..mesh.domain.corners.len())
            .map(|j| (j, mesh.corner_distance(t, j)))
            .find(|&(j, r)| r <= radius[j] && mu[j] < 1.0);
        let bound = match governing {
            Some((j, r)) if r < 1e-14 => {
                let b = h.powf(1.0 / mu[j]);
                report.max_ratio_corner = report.max_ratio_corner.max(ht / b);
                b
            }
            Some((j, r)) => {
                let b = h * r.powf(1.0 - mu[j]);
                report.max_ratio_graded = report.max_ratio_graded.max(ht / b);
                b
            }
            None => {
                report.max_ratio_uniform = report.max_ratio_uniform.max(ht / h);
                h
            }
        };
        // violation ratio > 1 means the inequality fails
        let tri_violation = (ht / (GRADING_C2 * bound)).max((GRADING_C1 * bound) / ht);
        if tri_violation > report.worst_ratio {
            report.worst_ratio = tri_violation;
            report.worst_triangle = t;
        }
        if tri_violation > 1.0 {
            report.failures += 1;
            report.pass = false;
        }
    }
    report
}

/// Writes the plain-text mesh format:
/// `vertices N triangles M bedges K`, coordinate rows, index triples,
/// boundary-edge rows `v0 v1 tri tag`.
pub fn export_mesh(mesh: &GradedMesh) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "vertices {} triangles {} bedges {}",
        mesh.num_vertices(),
        mesh.num_triangles(),
        mesh.num_boundary_edges()
    )
    .unwrap();
    for v in &mesh.vertices {
        writeln!(out, "{:.17e} {:.17e}", v[0], v[1]).unwrap();
    }
    for t in &mesh.triangles {
        writeln!(out, "{} {} {}", t[0], t[1], t[2]).unwrap();
    }
    for e in &mesh.boundary_edges {
        writeln!(out, "{} {} {} {}", e.vertices[0], e.vertices[1], e.triangle, e.tag).unwrap();
    }
    out
}

/// Reads the plain-text mesh format produced by [`export_mesh`].
///
/// The domain and grading metadata are not part of the wire format; callers
/// supply them (the CLI rebuilds them from its arguments).
pub fn import_mesh(
    text: &str,
    domain: PolygonalDomain,
    h: f64,
    mu: Vec<f64>,
    radius: Vec<f64>,
) -> Result<GradedMesh> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty mesh file".into()))?;
    let parts: Vec<&str> = header.split_whitespace().collect();
    if parts.len() != 6 || parts[0] != "vertices" || parts[2] != "triangles" || parts[4] != "bedges"
    {
        return Err(Error::Parse(format!("bad mesh header: {header}")));
    }
    let parse = |s: &str| -> Result<usize> {
        s.parse().map_err(|_| Error::Parse(format!("bad count {s}")))
    };
    let (nv, nt, ne) = (parse(parts[1])?, parse(parts[3])?, parse(parts[5])?);
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let line = lines.next().ok_or_else(|| Error::Parse("truncated vertex rows".into()))?;
        let nums: Vec<f64> = line
            .split_whitespace()
            .map(|s| s.parse().map_err(|_| Error::Parse(format!("bad coordinate {s}"))))
            .collect::<Result<_>>()?;
        if nums.len() != 2 {
            return Err(Error::Parse(format!("bad vertex row: {line}")));
        }
        vertices.push([nums[0], nums[1]]);
    }
    let mut triangles = Vec::with_capacity(nt);
    for _ in 0..nt {
        let line = lines.next().ok_or_else(|| Error::Parse("truncated triangle rows".into()))?;
        let nums: Vec<usize> = line
            .split_whitespace()
            .map(|s| s.parse().map_err(|_| Error::Parse(format!("bad index {s}"))))
            .collect::<Result<_>>()?;
        if nums.len() != 3 {
            return Err(Error::Parse(format!("bad triangle row: {line}")));
        }
        triangles.push([nums[0], nums[1], nums[2]]);
    }
    let mut boundary_edges = Vec::with_capacity(ne);
    for _ in 0..ne {
        let line = lines.next().ok_or_else(|| Error::Parse("truncated boundary rows".into()))?;
        let nums: Vec<usize> = line
            .split_whitespace()
            .map(|s| s.parse().map_err(|_| Error::Parse(format!("bad index {s}"))))
            .collect::<Result<_>>()?;
        if nums.len() != 4 {
            return Err(Error::Parse(format!("bad boundary-edge row: {line}")));
        }
        boundary_edges.push(BoundaryEdge {
            vertices: [nums[0], nums[1]],
            triangle: nums[2],
            tag: nums[3],
        });
    }
    let mesh = GradedMesh {
        domain,
        vertices,
        triangles,
        boundary_edges,
        h,
        mu,
        radius,
    };
    mesh.check_conformity()?;
    Ok(mesh)
}
