use thiserror::Error;

/// Errors raised by operator evaluation, moment verification and bound checks.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The linear-domain path overflowed or underflowed; use the log-domain path.
    #[error("linear-domain evaluation out of range ({0}); switch to log domain")]
    LinearDomainRange(String),

    #[error("tail not absorbed at x = {x}: mass {mass:.17e} after k_max_hard = {k_max_hard} terms")]
    TailNotAbsorbed { x: f64, k_max_hard: usize, mass: f64 },

    #[error("quadrature did not converge on [{lo}, {hi}] (error estimate {error_estimate:e})")]
    QuadratureDidNotConverge { lo: f64, hi: f64, error_estimate: f64 },

    #[error("quadrature method not applicable: {0}")]
    QuadratureNotApplicable(String),

    #[error("x = {x} outside the domain {domain} of {operator}")]
    DomainViolation { x: f64, domain: &'static str, operator: &'static str },

    #[error("window [{lo}, {hi}] too small for delta = {delta}")]
    WindowTooSmall { lo: f64, hi: f64, delta: f64 },

    #[error("function {0} is not in the weighted space B_rho")]
    NotInWeightedSpace(String),

    #[error("Lip* certificate violated at (t, x) = ({t}, {x}) by {excess:e}")]
    CertificateViolation { t: f64, x: f64, excess: f64 },

    #[error("function metadata does not admit this check: {0}")]
    MetadataMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;
