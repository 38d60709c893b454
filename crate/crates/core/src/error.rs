//! Error types shared across the crate.
//!
//! Variants split into two classes: *domain* problems (bad parameters,
//! arguments outside a map's domain, degenerate conditioning, estimator
//! boundaries) and *numerical* failures (quadrature that cannot reach its
//! tolerance, root brackets that cannot be established). [`Error::is_numeric`]
//! exposes the class so callers such as the CLI can map them to different
//! exit codes.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A constructor argument violates its documented range.
    #[error("invalid parameter {name}: got {value}, require {requirement}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        requirement: &'static str,
    },

    /// A function argument lies outside the mathematical domain of the map.
    #[error("{what}: argument {value:e} outside domain {domain}")]
    OutsideDomain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },

    /// The requested operation exists but not for this configuration.
    #[error("{what} is not available here")]
    NotAvailable { what: &'static str },

    /// Adaptive quadrature exhausted its subdivision budget.
    #[error(
        "quadrature did not converge: error estimate {achieved:e} above target {requested:e} \
         after {subdivisions} subdivisions"
    )]
    QuadratureNonConvergence {
        achieved: f64,
        requested: f64,
        subdivisions: usize,
    },

    /// No sign change could be established for a root search.
    #[error("cannot bracket a root of {what}: f({lo:e}) = {f_lo:e}, f({hi:e}) = {f_hi:e}")]
    BracketFailure {
        what: &'static str,
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    /// A conditional law degenerates at this conditioning value.
    #[error("degenerate conditioning at {value:e}: {reason}")]
    DegenerateConditioning { value: f64, reason: &'static str },

    /// A moment integrand does not decay below the cutoff threshold.
    #[error("{what}: integrand still {value:e} at t = {at:e}; moment may not be finite")]
    TailNotNegligible {
        what: &'static str,
        at: f64,
        value: f64,
    },

    /// The estimation pipeline left its validity region.
    #[error("estimation boundary: {reason} (tau_hat = {tau_hat})")]
    EstimationBoundary { reason: &'static str, tau_hat: f64 },

    /// Input data unusable for the requested computation.
    #[error("degenerate sample: {reason}")]
    DegenerateSample { reason: &'static str },

    /// Inversion failure while sampling, with the failing draw attached.
    #[error("sampling failed at index {index} (u = {u}, v = {v}): {source}")]
    SampleInversion {
        index: usize,
        u: f64,
        v: f64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// True for failures of the numerical machinery (quadrature budgets,
    /// root brackets), false for domain/usage errors. The CLI exits 2 for
    /// the former and 3 for the latter.
    pub fn is_numeric(&self) -> bool {
        match self {
            Error::QuadratureNonConvergence { .. } | Error::BracketFailure { .. } => true,
            Error::SampleInversion { source, .. } => source.is_numeric(),
            _ => false,
        }
    }
}
