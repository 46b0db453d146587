//! Small planar geometry helpers shared by the mesh and FEM modules.

pub type Point = [f64; 2];

pub fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

pub fn add(a: Point, b: Point) -> Point {
    [a[0] + b[0], a[1] + b[1]]
}

pub fn scale(a: Point, s: f64) -> Point {
    [a[0] * s, a[1] * s]
}

pub fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

pub fn cross(a: Point, b: Point) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

pub fn norm(a: Point) -> f64 {
    a[0].hypot(a[1])
}

pub fn dist(a: Point, b: Point) -> f64 {
    norm(sub(a, b))
}

/// Signed area of the triangle (a, b, c); positive for counter-clockwise order.
pub fn signed_area(a: Point, b: Point, c: Point) -> f64 {
    0.5 * cross(sub(b, a), sub(c, a))
}

/// Distance from point `p` to the segment [a, b].
pub fn dist_point_segment(p: Point, a: Point, b: Point) -> f64 {
    let ab = sub(b, a);
    let len2 = dot(ab, ab);
    if len2 == 0.0 {
        return dist(p, a);
    }
    let t = (dot(sub(p, a), ab) / len2).clamp(0.0, 1.0);
    dist(p, add(a, scale(ab, t)))
}

/// Distance from point `p` to the closed triangle (a, b, c); zero if inside.
pub fn dist_point_triangle(p: Point, a: Point, b: Point, c: Point) -> f64 {
    let s0 = signed_area(p, a, b);
    let s1 = signed_area(p, b, c);
    let s2 = signed_area(p, c, a);
    let orient = signed_area(a, b, c).signum();
    if s0 * orient >= 0.0 && s1 * orient >= 0.0 && s2 * orient >= 0.0 {
        return 0.0;
    }
    dist_point_segment(p, a, b)
        .min(dist_point_segment(p, b, c))
        .min(dist_point_segment(p, c, a))
}

/// Minimum interior angle of the triangle (a, b, c) in radians.
pub fn min_angle(a: Point, b: Point, c: Point) -> f64 {
    let la = dist(b, c);
    let lb = dist(a, c);
    let lc = dist(a, b);
    let angle = |opp: f64, s1: f64, s2: f64| {
        let cosv = ((s1 * s1 + s2 * s2 - opp * opp) / (2.0 * s1 * s2)).clamp(-1.0, 1.0);
        cosv.acos()
    };
    angle(la, lb, lc).min(angle(lb, la, lc)).min(angle(lc, la, lb))
}

/// Interior angle of a polygon at vertex `b` given neighbours `a` (previous)
/// and `c` (next) in counter-clockwise order.
pub fn interior_angle(a: Point, b: Point, c: Point) -> f64 {
    let u = sub(a, b);
    let v = sub(c, b);
    let ang = v[1].atan2(v[0]) - u[1].atan2(u[0]);
    let mut ang = -ang;
    if ang < 0.0 {
        ang += 2.0 * std::f64::consts::PI;
    }
    ang
}

/// Polar angle of `p` in [0, 2*pi), measured from the positive x-axis.
pub fn polar_angle(p: Point) -> f64 {
    let phi = p[1].atan2(p[0]);
    if phi < 0.0 {
        phi + 2.0 * std::f64::consts::PI
    } else {
        phi
    }
}
