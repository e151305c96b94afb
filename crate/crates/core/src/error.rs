//! Error type shared by every module of the crate.

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong across group arithmetic, quadrature,
/// characteristic charts, variations and calibration checks.
///
/// Variants carry the offending values so callers can report precise
/// diagnostics without re-deriving them.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Two objects with incompatible group index or coordinate length met.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A coordinate or parameter was NaN or infinite.
    #[error("non-finite value in {what}")]
    NonFinite { what: &'static str },

    /// Dilations require a strictly positive scale factor.
    #[error("scale factor must be positive, got {0}")]
    NonPositiveScale(f64),

    /// A box was malformed (length mismatch or empty extent).
    #[error("invalid box: {detail}")]
    BadBox { detail: String },

    /// An evaluation point left the declared domain (or its safety margin).
    #[error("outside domain: {detail}")]
    OutsideDomain { detail: String },

    /// The characteristic flow jacobian vanished or turned negative, so the
    /// chart cannot be inverted at this time slice.
    #[error("degenerate chart at t = {t}: flow jacobian {jacobian:.3e} <= 0 near c = {c}")]
    DegenerateChart { c: f64, t: f64, jacobian: f64 },

    /// Bracket expansion exhausted without finding the target position; the
    /// point lies outside the image of the characteristic chart.
    #[error("position (x, t) = ({x}, {t}) is outside the chart image")]
    OutsideImage { x: f64, t: f64 },

    /// Initial data violates the no-crossing condition for characteristics.
    #[error("inadmissible initial data at c = {c}: B'^2 = {b_prime_sq:.6} >= 2A' = {two_a_prime:.6}")]
    Inadmissible { c: f64, b_prime_sq: f64, two_a_prime: f64 },

    /// The base graph fails the stationarity residual bound required by the
    /// stationary-form second variation.
    #[error("stationarity violated at ({eta}, {tau}): residual {residual:.3e}")]
    StationarityViolated { eta: f64, tau: f64, residual: f64 },

    /// The candidate normal direction of a t-graph vanished.
    #[error("characteristic point at ({x}, {y}): normal direction vanishes")]
    CharacteristicPoint { x: f64, y: f64 },

    /// Reduced quadratic-form weights need b^2 < 2a.
    #[error("indefinite weights: need b^2 < 2a, got a = {a}, b = {b}")]
    IndefiniteWeights { a: f64, b: f64 },

    /// An operation requiring an entire synthesized graph was handed data
    /// whose chart does not cover the plane.
    #[error("graph is not entire: {detail}")]
    NotEntire { detail: String },

    /// Lipschitz reparametrization is only invertible for |eta| < bound.
    #[error("slope bound exceeded: |eta| = {eta} not below {bound}")]
    SlopeBound { eta: f64, bound: f64 },

    /// Sampled-grid payload malformed (ragged rows, non-uniform spacing, ...).
    #[error("invalid grid payload: {0}")]
    InvalidGrid(String),

    /// Mollification needs the sample resolution well below the kernel scale.
    #[error("grid resolution {resolution} too coarse for kernel scale {scale}")]
    ResolutionViolated { resolution: f64, scale: f64 },

    /// Adaptive refinement hit its depth limit before meeting the tolerance.
    #[error("quadrature did not converge: defect {defect:.3e} above tolerance {tol:.3e}")]
    QuadratureDidNotConverge { defect: f64, tol: f64 },

    /// Catch-all for invalid scalar parameters (non-positive widths, ...).
    #[error("invalid parameter: {detail}")]
    InvalidParameter { detail: String },
}
