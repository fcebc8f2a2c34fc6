//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate domain: {0}")]
    DegenerateDomain(String),

    #[error("invalid polygon: {0}")]
    InvalidPolygon(String),

    #[error("origin cell excluded")]
    OriginCellExcluded,

    #[error("singular point")]
    SingularPoint,

    #[error("nondifferentiable point: bond difference {value} lies on a half-integer")]
    NondifferentiablePoint { value: f64 },

    #[error("invalid potential parameter: {0}")]
    InvalidPotential(String),

    #[error("non-integer circulation {value} on cell ({m},{n})")]
    NonIntegerCirculation { value: f64, m: i64, n: i64 },

    #[error("configuration assigns both signs to cell ({m},{n})")]
    ConflictingCore { m: i64, n: i64 },

    #[error("cores too close: {0}")]
    CoresTooClose(String),

    #[error("core on or outside the domain boundary: {0}")]
    CoreOutsideDomain(String),

    #[error("window too small: {0}")]
    WindowTooSmall(String),

    #[error("no stable core found: {0}")]
    NoStableCore(String),

    #[error("core unstable: smallest stability eigenvalue {lambda} <= 0")]
    CoreUnstable { lambda: f64 },

    #[error("left stability basin: indefinite energy Hessian encountered")]
    LeftStabilityBasin,

    #[error("solver did not converge: {0}")]
    NoConvergence(String),

    #[error("witness requires balanced configuration (net Burgers vector {net})")]
    UnbalancedConfiguration { net: i64 },

    #[error("dipole pairing failed: {0}")]
    PairingFailure(String),

    #[error("boundary corrector does not match configuration")]
    MismatchedCorrector,

    #[error("empty sweep: at least 3 values required")]
    EmptySweep,

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
