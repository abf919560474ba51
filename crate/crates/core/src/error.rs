use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Input violates a documented precondition or type invariant.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("point ({x1}, {x2}, {x3}) lies on the closure of the cut surface")]
    BranchCut { x1: f64, x2: f64, x3: f64 },

    #[error("point at distance {r:e} from the dislocation line is inside the core radius {r_core:e}")]
    CoreSingularity { r: f64, r_core: f64 },

    #[error("screw orientation: |b x tau| = {cross_norm:e} <= {threshold:e}{}", node.map(|n| format!(" at node {n}")).unwrap_or_default())]
    ScrewSingularity {
        cross_norm: f64,
        threshold: f64,
        node: Option<usize>,
    },

    #[error("CFL condition violated: dt = {dt:e}, largest stable dt = {suggested:e}")]
    Cfl { dt: f64, suggested: f64 },

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("quadrature did not converge: last change {change:e} > tolerance {tolerance:e}")]
    Quadrature { change: f64, tolerance: f64 },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
