use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument fell outside the domain of a function.
    #[error("{func}: argument {value} outside domain ({expected})")]
    Domain {
        func: &'static str,
        value: f64,
        expected: &'static str,
    },

    /// The moment orders violate `p < 1/r - 1 < q`.
    #[error("invalid moment orders: need 0 < r < 1 and p < 1/r - 1 < q, got r={r}, p={p}, q={q}")]
    InvalidMomentOrder { r: f64, p: f64, q: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The tail (or endpoint) mass of an integral does not decay under refinement.
    #[error("integral diverges (tail mass does not decay)")]
    DivergenceDetected,

    /// Adaptive quadrature ran out of panels before meeting its tolerance.
    #[error("quadrature tolerance not reached after {subdivisions} subdivisions (estimate {estimate}, error {error})")]
    MaxSubdivisions {
        subdivisions: usize,
        estimate: f64,
        error: f64,
    },

    #[error("integrand returned a non-finite value at x={0}")]
    NonFinite(f64),

    /// A required moment `E|X|^s` is infinite.
    #[error("moment of order {0} diverges")]
    MomentDiverges(f64),

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Parameters violate the feasibility condition of a parametrization.
    #[error("infeasible parameters: {0}")]
    Infeasible(String),

    #[error("optimizer did not converge: {0}")]
    OptimizerNoConverge(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(func: &'static str, value: f64, expected: &'static str) -> Error {
    Error::Domain { func, value, expected }
}
