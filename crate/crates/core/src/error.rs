use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("quadrature with {0} points is not supported (1..=20)")]
    QuadratureOrder(usize),

    #[error("degree {degree} needs at least {needed} quadrature points, got {got}")]
    InsufficientQuadrature {
        degree: usize,
        needed: usize,
        got: usize,
    },

    #[error("unsupported polynomial degree {0} (supported: 1, 2, 3)")]
    UnsupportedDegree(usize),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("singular block encountered while factorizing the {which} operator (a={a}, b={b}, c={c}, d={d})")]
    SingularOperator {
        which: &'static str,
        a: f64,
        b: f64,
        c: f64,
        d: f64,
    },

    #[error("singular local system")]
    Singular,

    #[error("penalized flux rule requires a jump source")]
    MissingJumpSource,

    #[error("invalid time-step rule: {0}")]
    InvalidDtRule(String),

    #[error("snapshot time {0} lies outside [0, T]")]
    SnapshotOutOfRange(f64),

    #[error("case {0} has no exact solution")]
    NoExactSolution(&'static str),

    #[error("non-finite or unbounded solution at t = {t}")]
    BlowUp { t: f64 },
}
