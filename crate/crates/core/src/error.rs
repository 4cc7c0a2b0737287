use thiserror::Error;

/// Errors shared by all modules of the crate.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("spline order {0} exceeds the supported maximum 16")]
    OrderTooLarge(usize),

    #[error("derivative order {order} exceeds the degree bound {degree}")]
    DegreeExceeded { order: usize, degree: usize },

    #[error("expected {expected} roots in (0,1) but found {found}")]
    RootCount { expected: usize, found: usize },

    #[error("shift {k} and shift {s} must be both integers or both half-integers")]
    ParityMismatch { k: f64, s: f64 },

    #[error("weight |x-c|^{alpha} is not integrable over [{a}, {b}]")]
    NonIntegrable { a: f64, b: f64, alpha: f64 },

    #[error("basis order {n0} violates the order condition (needs >= {required}, binding term: {term})")]
    OrderTooLow {
        n0: usize,
        required: i64,
        term: String,
    },

    #[error("exact spectra of the sequence model require p = q = 2 (got p={p}, q={q})")]
    NonHilbert { p: f64, q: f64 },

    #[error("source weight deviates from the target weight on inactive axis {axis}")]
    WeightMismatch { axis: usize },

    #[error("input carries mass {mass:.3e} on the dead side of the cut at {cut}")]
    SupportViolation { cut: f64, mass: f64 },

    #[error("model shapes do not match: {0}")]
    ModelShape(String),

    #[error("mollifier provides moments up to order {have}, smoothness s={s} requires more")]
    MomentDeficiency { s: f64, have: i64 },

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
