//! Error taxonomy shared by every module in the crate.

use thiserror::Error;

/// Everything that can go wrong in library calls.
///
/// Variants carry enough context to name the offending object (mode, step,
/// config line) without holding references into caller data.
#[derive(Debug, Error)]
pub enum Error {
    /// Field storage is inconsistent (shape, component count, NaN content).
    #[error("invalid field: {0}")]
    InvalidField(String),

    /// Two objects live on different grids.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// An operation received a field of the wrong dimensionality.
    #[error("dimension error: {0}")]
    DimensionError(String),

    /// Basis construction produced no modes (k_max < 1).
    #[error("empty basis: k_max must be at least 1")]
    EmptyBasis,

    /// Coefficient vector length disagrees with the basis.
    #[error("invalid coefficients: expected {expected}, got {got}")]
    InvalidCoefficients { expected: usize, got: usize },

    /// The elliptic symbol is not strictly positive on some mode.
    #[error("not elliptic: symbol {symbol} at wavevector ({k1}, {k2})")]
    NotElliptic { symbol: f64, k1: i64, k2: i64 },

    /// Quadrature resolution too coarse for the requested bandwidth.
    #[error("aliasing: {points} points cannot resolve cubic products at bandwidth {k_max} (need at least {needed})")]
    Aliasing {
        points: usize,
        k_max: i64,
        needed: usize,
    },

    /// Input violates the solenoidal constraint beyond tolerance.
    #[error("non-solenoidal input: max constraint residual {residual:e} exceeds {tolerance:e}")]
    NonSolenoidalInput { residual: f64, tolerance: f64 },

    /// The state left the finite range during time stepping.
    #[error("diverged: non-finite state at step {step} (t = {time})")]
    Diverged { step: usize, time: f64 },

    /// Two trajectories cannot be compared (different basis, times, or grid).
    #[error("incompatible runs: {0}")]
    IncompatibleRuns(String),

    /// A zero field has no interpolation ratio.
    #[error("zero field: interpolation ratio is undefined")]
    ZeroFieldRatio,

    /// A parameter left its admissible interval.
    #[error("out of range: {0}")]
    OutOfRange(String),

    /// The interpolation balance equation degenerates (zero denominator).
    #[error("degenerate balance: exponent equation has zero denominator")]
    DegenerateBalance,

    /// The plane coefficient a3 vanishes, so the section cannot be normalized.
    #[error("degenerate plane: a3 = 0 cannot be normalized")]
    DegeneratePlane,

    /// A normalized plane coefficient vanishes, so D3 substitution fails.
    #[error("unsupported orientation: normalized plane coefficient {name} = 0")]
    UnsupportedOrientation { name: &'static str },

    /// The operation is not defined for the given parameters.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Config text failed to parse or validate.
    #[error("config: {0}")]
    Config(#[from] ConfigError),

    /// Snapshot or artifact files are malformed.
    #[error("format: {0}")]
    Format(String),

    /// Underlying I/O failure.
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

/// Config-file errors; every variant names the offending line.
#[derive(Debug, Error)]
pub enum ConfigError {
    /// Key is not part of the config schema.
    #[error("unknown key `{key}` at line {line}")]
    UnknownKey { key: String, line: usize },

    /// Value failed to parse or violates a range check.
    #[error("bad value for `{key}` at line {line}: {reason}")]
    TypeError {
        key: String,
        line: usize,
        reason: String,
    },

    /// A key required by the scenario is absent.
    #[error("missing required key `{key}` for scenario `{scenario}`")]
    MissingRequired {
        key: &'static str,
        scenario: &'static str,
    },

    /// Line is not `key = value`.
    #[error("malformed line {line}: expected `key = value`")]
    Malformed { line: usize },
}
