use thiserror::Error;

/// Errors produced by the spectral toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("derivative order {requested} unavailable (potential provides {available})")]
    DerivativeUnavailable { requested: usize, available: usize },

    #[error("argument {x} outside [0,1]")]
    OutOfDomain { x: f64 },

    #[error("grid resolution {0} below minimum 16")]
    ResolutionTooSmall(usize),

    #[error("node index {index} out of range (grid has {len} nodes)")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("grid function does not live on the operator grid")]
    GridMismatch,

    #[error("jet order {requested} exceeds cap {cap}")]
    JetOrderTooLarge { requested: usize, cap: usize },

    #[error("jet order mismatch: expected {expected}, got {got}")]
    JetOrderMismatch { expected: usize, got: usize },

    #[error("jet table has insufficient data: need derivative {order} of f_{j}")]
    JetOrderInsufficient { j: usize, order: usize },

    #[error("series solver outside contraction region (bound ratio {ratio:.3e} >= 1)")]
    NotAdmissible { ratio: f64 },

    #[error("series did not converge within {max_terms} terms (observed ratio {ratio:.3e})")]
    NonConvergence { max_terms: usize, ratio: f64 },

    #[error("z = {z} is not a characteristic root (|F| = {residual:.3e})")]
    NotARoot { z: num_complex::Complex64, residual: f64 },

    #[error("Newton iterate escaped the rectangle for n = {n}")]
    RootEscapedBox { n: usize },

    #[error("no root convergence for n = {n} after {steps} steps")]
    RootNoConvergence { n: usize, steps: usize },

    #[error("characteristic function nearly vanishes on the box boundary (min |F| = {min_abs:.3e})")]
    BoundaryNearZero { min_abs: f64 },

    #[error("no index with verified contraction and unit winding number up to n = {scanned}")]
    NoUniformRegime { scanned: usize },

    #[error("coefficient table holds {available} coefficients, {requested} requested")]
    InsufficientCoefficients { requested: usize, available: usize },

    #[error("series unreliable at this index (fitted ratio {ratio:.3e} >= 1)")]
    SeriesUnreliable { ratio: f64 },

    #[error("QR iteration failed to converge within {0} sweeps")]
    QrNoConvergence(usize),

    #[error("Galerkin section under-resolved at index {index} (refinement gap {gap:.3e})")]
    UnderResolved { index: usize, gap: f64 },

    #[error("trusted band exceeded: n_max {n_max} > K/4 = {limit}")]
    TrustBandExceeded { n_max: usize, limit: usize },

    #[error("fewer than {min} positive errors; data below floor")]
    BelowFloor { min: usize },

    #[error("{method} failed at n = {n}: {source}")]
    MethodFailed {
        n: usize,
        method: String,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid potential spec `{spec}`: {reason}")]
    PotentialParse { spec: String, reason: String },

    #[error("reading tabulated potential: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
