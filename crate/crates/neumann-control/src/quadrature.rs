//! Quadrature rules on the reference triangle and the unit interval.
//!
//! Triangle rules are given in barycentric coordinates with weights summing
//! to one (multiply by the physical triangle area). Interval rules live on
//! [0, 1] with weights summing to one.

/// A rule on the reference triangle: barycentric points and weights.
#[derive(Debug, Clone)]
pub struct TriangleRule {
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
    pub degree: usize,
}

/// A rule on the unit interval [0, 1].
#[derive(Debug, Clone)]
pub struct EdgeRule {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
    pub degree: usize,
}

/// Six-point rule, exact for polynomials up to degree 4.
pub fn triangle_degree4() -> TriangleRule {
    let a1 = 0.108_103_018_168_070;
    let b1 = 0.445_948_490_915_965;
    let w1 = 0.223_381_589_678_011;
    let a2 = 0.816_847_572_980_459;
    let b2 = 0.091_576_213_509_771;
    let w2 = 0.109_951_743_655_322;
    TriangleRule {
        points: vec![
            [a1, b1, b1],
            [b1, a1, b1],
            [b1, b1, a1],
            [a2, b2, b2],
            [b2, a2, b2],
            [b2, b2, a2],
        ],
        weights: vec![w1, w1, w1, w2, w2, w2],
        degree: 4,
    }
}

/// Seven-point rule, exact for polynomials up to degree 5.
pub fn triangle_degree5() -> TriangleRule {
    let t = 15.0_f64.sqrt();
    let w1 = (155.0 - t) / 1200.0;
    let a1 = (6.0 - t) / 21.0;
    let b1 = (9.0 + 2.0 * t) / 21.0;
    let w2 = (155.0 + t) / 1200.0;
    let a2 = (6.0 + t) / 21.0;
    let b2 = (9.0 - 2.0 * t) / 21.0;
    let third = 1.0 / 3.0;
    TriangleRule {
        points: vec![
            [third, third, third],
            [b1, a1, a1],
            [a1, b1, a1],
            [a1, a1, b1],
            [b2, a2, a2],
            [a2, b2, a2],
            [a2, a2, b2],
        ],
        weights: vec![9.0 / 40.0, w1, w1, w1, w2, w2, w2],
        degree: 5,
    }
}

/// Three-point Gauss-Legendre on [0, 1], exact up to degree 5.
pub fn edge_gauss3() -> EdgeRule {
    let s = (0.6_f64).sqrt();
    EdgeRule {
        points: vec![0.5 * (1.0 - s), 0.5, 0.5 * (1.0 + s)],
        weights: vec![5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0],
        degree: 5,
    }
}

/// Seven-point Gauss-Legendre on [0, 1], exact up to degree 13.
pub fn edge_gauss7() -> EdgeRule {
    let x = [
        -0.949_107_912_342_758_5,
        -0.741_531_185_599_394_4,
        -0.405_845_151_377_397_2,
        0.0,
        0.405_845_151_377_397_2,
        0.741_531_185_599_394_4,
        0.949_107_912_342_758_5,
    ];
    let w = [
        0.129_484_966_168_869_7,
        0.279_705_391_489_276_7,
        0.381_830_050_505_118_9,
        0.417_959_183_673_469_4,
        0.381_830_050_505_118_9,
        0.279_705_391_489_276_7,
        0.129_484_966_168_869_7,
    ];
    EdgeRule {
        points: x.iter().map(|&t| 0.5 * (t + 1.0)).collect(),
        weights: w.iter().map(|&v| 0.5 * v).collect(),
        degree: 13,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Integral of x^a y^b over the reference triangle {x,y>=0, x+y<=1}:
    /// a! b! / (a+b+2)!.
    fn monomial_exact(a: u32, b: u32) -> f64 {
        let fact = |n: u32| (1..=n).map(|k| k as f64).product::<f64>().max(1.0);
        fact(a) * fact(b) / fact(a + b + 2)
    }

    fn check_triangle(rule: &TriangleRule) {
        for a in 0..=rule.degree as u32 {
            for b in 0..=(rule.degree as u32 - a) {
                let mut val = 0.0;
                for (p, w) in rule.points.iter().zip(&rule.weights) {
                    // reference triangle vertices (0,0), (1,0), (0,1)
                    let x = p[1];
                    let y = p[2];
                    val += w * x.powi(a as i32) * y.powi(b as i32);
                }
                // weights sum to 1 on a triangle of area 1/2
                val *= 0.5;
                assert!(
                    (val - monomial_exact(a, b)).abs() < 1e-14,
                    "monomial x^{a} y^{b}: got {val}, want {}",
                    monomial_exact(a, b)
                );
            }
        }
    }

    #[test]
    fn triangle_rules_exactness() {
        check_triangle(&triangle_degree4());
        check_triangle(&triangle_degree5());
    }

    #[test]
    fn edge_rules_exactness() {
        for rule in [edge_gauss3(), edge_gauss7()] {
            for d in 0..=rule.degree as u32 {
                let val: f64 = rule
                    .points
                    .iter()
                    .zip(&rule.weights)
                    .map(|(&x, &w)| w * x.powi(d as i32))
                    .sum();
                let exact = 1.0 / (d as f64 + 1.0);
                assert!((val - exact).abs() < 1e-14, "x^{d}: got {val}, want {exact}");
            }
        }
    }

    #[test]
    fn weights_sum_to_reference_measure() {
        assert!((triangle_degree4().weights.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        assert!((triangle_degree5().weights.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        assert!((edge_gauss3().weights.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        assert!((edge_gauss7().weights.iter().sum::<f64>() - 1.0).abs() < 1e-14);
    }
}
