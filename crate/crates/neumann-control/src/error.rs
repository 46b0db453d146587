use thiserror::Error;

/// Errors produced by mesh generation, assembly and the solvers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid opening angle {0} (must lie in (0, 2*pi))")]
    InvalidAngle(f64),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("mesh quality failure: minimum angle {min_angle_deg:.3} deg below threshold {threshold_deg:.1} deg (triangle {triangle})")]
    MeshQuality {
        triangle: usize,
        min_angle_deg: f64,
        threshold_deg: f64,
    },

    #[error("assembly failure: {0}")]
    Assembly(String),

    #[error("invalid bounds: u_a = {ua} > u_b = {ub}")]
    InvalidBounds { ua: f64, ub: f64 },

    #[error("linear solver breakdown: {0}")]
    SolverBreakdown(String),

    #[error("Newton iteration did not converge after {iterations} iterations (residuals {history:?})")]
    NewtonNonconvergence {
        iterations: usize,
        history: Vec<f64>,
    },

    #[error("Newton iteration diverged: non-finite residual at iteration {0}")]
    NewtonDivergence(usize),

    #[error("SQP did not converge after {iterations} outer iterations (last update {last_update:.3e})")]
    SqpNonconvergence { iterations: usize, last_update: f64 },

    #[error("active set cycling: PDAS reached iteration cap {0} without a fixed point")]
    PdasCycling(usize),

    #[error("indefiniteness detected in the control Hessian (curvature {0:.3e})")]
    Indefinite(f64),

    #[error("evaluation error: {0}")]
    Evaluation(String),

    #[error("edge {0} classified K1 carries no anchor point")]
    MissingAnchor(usize),

    #[error("domain error: {0}")]
    Domain(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
