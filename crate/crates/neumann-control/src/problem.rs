//! Problem data: the monotone reaction nonlinearity d(x, y), the tracking
//! target, boundary data, regularization and control bounds.

use crate::control::Bounds;
use crate::error::{Error, Result};
use crate::geometry::Point;
use std::sync::Arc;

/// A reaction nonlinearity d(x, y), monotonically nondecreasing in y, with
/// first and second partial derivatives in y.
pub trait Reaction: Send + Sync {
    fn d(&self, x: Point, y: f64) -> f64;
    fn d_y(&self, x: Point, y: f64) -> f64;
    fn d_yy(&self, x: Point, y: f64) -> f64;
}

/// Built-in reaction nonlinearities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReactionPreset {
    /// d(y) = y
    Linear,
    /// d(y) = y + y^3
    Cubic,
    /// d(y) = y - c
    Affine { c: f64 },
}

impl Reaction for ReactionPreset {
    fn d(&self, _x: Point, y: f64) -> f64 {
        match *self {
            ReactionPreset::Linear => y,
            ReactionPreset::Cubic => y + y * y * y,
            ReactionPreset::Affine { c } => y - c,
        }
    }

    fn d_y(&self, _x: Point, y: f64) -> f64 {
        match *self {
            ReactionPreset::Linear | ReactionPreset::Affine { .. } => 1.0,
            ReactionPreset::Cubic => 1.0 + 3.0 * y * y,
        }
    }

    fn d_yy(&self, _x: Point, y: f64) -> f64 {
        match *self {
            ReactionPreset::Linear | ReactionPreset::Affine { .. } => 0.0,
            ReactionPreset::Cubic => 6.0 * y,
        }
    }
}

/// A reaction given by three closures (value, first and second y-derivative).
pub struct ClosureReaction<D, D1, D2>
where
    D: Fn(Point, f64) -> f64 + Send + Sync,
    D1: Fn(Point, f64) -> f64 + Send + Sync,
    D2: Fn(Point, f64) -> f64 + Send + Sync,
{
    pub d: D,
    pub d_y: D1,
    pub d_yy: D2,
}

impl<D, D1, D2> Reaction for ClosureReaction<D, D1, D2>
where
    D: Fn(Point, f64) -> f64 + Send + Sync,
    D1: Fn(Point, f64) -> f64 + Send + Sync,
    D2: Fn(Point, f64) -> f64 + Send + Sync,
{
    fn d(&self, x: Point, y: f64) -> f64 {
        (self.d)(x, y)
    }
    fn d_y(&self, x: Point, y: f64) -> f64 {
        (self.d_y)(x, y)
    }
    fn d_yy(&self, x: Point, y: f64) -> f64 {
        (self.d_yy)(x, y)
    }
}

pub type ScalarField = Arc<dyn Fn(Point) -> f64 + Send + Sync>;

/// The full optimal control problem:
///
///   minimize 1/2 ||y - y_d||^2 + nu/2 ||u||^2_Gamma + int_Gamma g2 y
///   subject to  -Laplace y + d(x, y) = f  in Omega,
///               dn y = u + g1            on Gamma,
///               u_a <= u <= u_b.
pub struct ProblemSpec {
    pub reaction: Arc<dyn Reaction>,
    /// Tracking target y_d.
    pub y_d: ScalarField,
    /// Regularization parameter (positive).
    pub nu: f64,
    /// Control bounds.
    pub bounds: Bounds,
    /// Volume source f.
    pub f: ScalarField,
    /// Fixed Neumann offset g1 (the flux is u + g1).
    pub g1: ScalarField,
    /// Linear boundary cost density g2.
    pub g2: ScalarField,
}

fn zero_field() -> ScalarField {
    Arc::new(|_| 0.0)
}

impl ProblemSpec {
    /// A problem with the given reaction, target, regularization and bounds;
    /// f, g1, g2 default to zero.
    pub fn new(
        reaction: Arc<dyn Reaction>,
        y_d: ScalarField,
        nu: f64,
        u_a: f64,
        u_b: f64,
    ) -> Result<Self> {
        if !(nu > 0.0) {
            return Err(Error::Config(format!("nu = {nu} must be positive")));
        }
        Ok(ProblemSpec {
            reaction,
            y_d,
            nu,
            bounds: Bounds::new(u_a, u_b)?,
            f: zero_field(),
            g1: zero_field(),
            g2: zero_field(),
        })
    }

    pub fn with_f(mut self, f: ScalarField) -> Self {
        self.f = f;
        self
    }

    pub fn with_g1(mut self, g1: ScalarField) -> Self {
        self.g1 = g1;
        self
    }

    pub fn with_g2(mut self, g2: ScalarField) -> Self {
        self.g2 = g2;
        self
    }

    /// Checks monotonicity d_y >= 0 and finite-difference consistency of the
    /// derivatives of the reaction at sample points/values. Used as a guard
    /// before handing a user-defined reaction to the solvers.
    pub fn validate_reaction(&self) -> Result<()> {
        let xs: [Point; 4] = [[0.0, 0.0], [0.5, 0.5], [-0.5, 0.7], [0.9, -0.3]];
        let ys = [-2.0, -0.5, 0.0, 0.3, 1.7];
        let eps = 1e-6;
        for &x in &xs {
            for &y in &ys {
                let dy = self.reaction.d_y(x, y);
                if dy < 0.0 {
                    return Err(Error::Config(format!(
                        "reaction not monotone: d_y({}, {}; y = {y}) = {dy}",
                        x[0], x[1]
                    )));
                }
                let fd1 = (self.reaction.d(x, y + eps) - self.reaction.d(x, y - eps)) / (2.0 * eps);
                if (fd1 - dy).abs() > 1e-4 * (1.0 + dy.abs()) {
                    return Err(Error::Config(format!(
                        "reaction derivative inconsistent at y = {y}: d_y = {dy}, FD = {fd1}"
                    )));
                }
                let dyy = self.reaction.d_yy(x, y);
                let fd2 =
                    (self.reaction.d_y(x, y + eps) - self.reaction.d_y(x, y - eps)) / (2.0 * eps);
                if (fd2 - dyy).abs() > 1e-4 * (1.0 + dyy.abs()) {
                    return Err(Error::Config(format!(
                        "reaction second derivative inconsistent at y = {y}: d_yy = {dyy}, FD = {fd2}"
                    )));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets() {
        let x = [0.1, 0.2];
        assert_eq!(ReactionPreset::Linear.d(x, 2.0), 2.0);
        assert_eq!(ReactionPreset::Cubic.d(x, 2.0), 10.0);
        assert_eq!(ReactionPreset::Cubic.d_y(x, 2.0), 13.0);
        assert_eq!(ReactionPreset::Cubic.d_yy(x, 2.0), 12.0);
        assert_eq!(ReactionPreset::Affine { c: 3.0 }.d(x, 2.0), -1.0);
        assert_eq!(ReactionPreset::Affine { c: 3.0 }.d_y(x, 2.0), 1.0);
    }

    #[test]
    fn validation_accepts_presets() {
        for r in [
            ReactionPreset::Linear,
            ReactionPreset::Cubic,
            ReactionPreset::Affine { c: 1.5 },
        ] {
            let p = ProblemSpec::new(Arc::new(r), Arc::new(|_| 0.0), 1.0, -1.0, 1.0).unwrap();
            p.validate_reaction().unwrap();
        }
    }

    #[test]
    fn validation_rejects_nonmonotone_and_inconsistent() {
        let nonmonotone = ClosureReaction {
            d: |_x: Point, y: f64| -y,
            d_y: |_x: Point, _y: f64| -1.0,
            d_yy: |_x: Point, _y: f64| 0.0,
        };
        let p = ProblemSpec::new(Arc::new(nonmonotone), Arc::new(|_| 0.0), 1.0, -1.0, 1.0).unwrap();
        assert!(p.validate_reaction().is_err());

        let inconsistent = ClosureReaction {
            d: |_x: Point, y: f64| y * y * y,
            d_y: |_x: Point, _y: f64| 1.0,
            d_yy: |_x: Point, _y: f64| 0.0,
        };
        let p =
            ProblemSpec::new(Arc::new(inconsistent), Arc::new(|_| 0.0), 1.0, -1.0, 1.0).unwrap();
        assert!(p.validate_reaction().is_err());
    }

    #[test]
    fn config_guards() {
        assert!(ProblemSpec::new(
            Arc::new(ReactionPreset::Linear),
            Arc::new(|_| 0.0),
            0.0,
            -1.0,
            1.0
        )
        .is_err());
        assert!(ProblemSpec::new(
            Arc::new(ReactionPreset::Linear),
            Arc::new(|_| 0.0),
            1.0,
            1.0,
            -1.0
        )
        .is_err());
    }
}
