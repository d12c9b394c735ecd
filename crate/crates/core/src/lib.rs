//! Numerics for the Brown measure of `Y_t·P`, the product of a free unitary
//! Brownian motion with a free self-adjoint projection of rank `α ∈ (0,1)`.
//!
//! The library is organized around the first-order PDE satisfied by the
//! regularized log-potential
//!
//! ```text
//! S(t, λ, x) = τ[ log( (Y_t h − λ)*(Y_t h − λ) + x ) ]
//! ```
//!
//! and its Hamiltonian characteristics:
//!
//! * [`spectral`] — discrete spectral measures of the non-negative factor `h`
//!   and all the initial data (traces, momenta) feeding the characteristics;
//! * [`hamiltonian`] — the six-dimensional characteristic ODE system, an RK4
//!   integrator with blow-up detection, and conserved-quantity audits;
//! * [`closed_form`] — closed-form radial/angular/x solutions along the
//!   characteristics, the blow-up time, and the transported value of `S`;
//! * [`region`] — the support geometry for `h = P`: the map `f_{t,α}`, the
//!   boundary curves `∂Σ_{t,α}` and `∂Ω_{t,α}`, membership tests, and the
//!   inverse map `f_{t,α}⁻¹`;
//! * [`brown_eval`] — the log-potential `s_t(λ)` outside the support region,
//!   the Fuglede–Kadison log-determinant, harmonicity fields, and PDE
//!   residual checks;
//! * [`rmt`] — an independent random-matrix Monte Carlo oracle (finite-`N`
//!   unitary Brownian motion, eigenvalue clouds, empirical `S`).
//!
//! All analytic modules are pure scalar code; only [`rmt`] touches dense
//! linear algebra (BLAS/LAPACK through `ndarray-linalg`).

pub mod brown_eval;
pub mod closed_form;
pub mod hamiltonian;
mod numerics;
pub mod region;
pub mod rmt;
pub mod spectral;

pub use num_complex::Complex64;

/// Errors produced by the library.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// A constructor argument violated its domain (range, positivity, ...).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    /// A spectral-measure invariant failed (weights, locations).
    #[error("invalid spectral measure: {0}")]
    InvalidMeasure(String),
    /// An atom denominator `(s−a)² + b² + x` was non-positive.
    #[error("non-positive denominator at atom {location}: {value}")]
    NonPositiveDenominator { location: f64, value: f64 },
    /// The characteristic start `λ₀ = 0` is excluded.
    #[error("degenerate start: lambda0 = 0")]
    LambdaZero,
    /// Step-size underflow without a blow-up signature.
    #[error("integration failure at u = {u}: {reason}")]
    IntegrationFailure { u: f64, reason: String },
    /// The trajectory passed through (or started at) λ = 0.
    #[error("lambda vanishes along the trajectory (|lambda| = {min_abs})")]
    LambdaVanishes { min_abs: f64 },
    /// Requested evaluation at/after the blow-up time.
    #[error("u = {u} is not below the blow-up time t* = {t_star}")]
    BeyondBlowup { u: f64, t_star: f64 },
    /// The closed-form blow-up formula requires the turning time `u₁ ≥ t*`.
    #[error("unsupported regime: turning time u1 = {u1} is below t* ~ {estimate}")]
    UnsupportedRegime { u1: f64, estimate: f64 },
    /// Bracketing for a root failed (no sign change found).
    #[error("root bracketing failure: {0}")]
    BracketingFailure(String),
    /// The map is evaluated at a pole (`z = 1` for `f`, `w = −1` for the chart).
    #[error("pole input: {0}")]
    PoleInput(String),
    /// Newton iteration did not converge.
    #[error("no convergence after {iterations} iterations (residual {residual})")]
    NoConvergence { iterations: usize, residual: f64 },
    /// The queried point is inside the closed support region.
    #[error("lambda = {re}+{im}i lies inside the closed support region")]
    InsideOmega { re: f64, im: f64 },
    /// A dense eigensolver failed.
    #[error("eigensolver failure: {0}")]
    Eigensolver(String),
}

impl Error {
    fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Central table of numeric defaults.
pub mod defaults {
    /// Integrator step for the characteristic ODE system.
    pub const STEP: f64 = 1e-3;
    /// Sample count for boundary curves.
    pub const SAMPLES: usize = 1024;
    /// Conserved-quantity drift tolerance for integrated trajectories.
    pub const TOL_CONS: f64 = 1e-8;
    /// Blow-up is declared when `p_x` exceeds `1/EPS_BLOW`.
    pub const EPS_BLOW: f64 = 1e-10;
    /// Dilation margin for random-matrix containment reports.
    pub const MARGIN: f64 = 0.05;
    /// Band half-width on `|T_α − t|` used by membership in `Σ`.
    pub const TOL_SIGMA_BAND: f64 = 1e-9;
    /// Round-trip residual required of the inverse map.
    pub const TOL_INVERSE: f64 = 1e-12;
    /// Finite-difference stencil step for pointwise PDE residuals.
    pub const FD_STEP: f64 = 1e-3;
    /// Mask radius around logarithmic singular loci in field evaluation.
    pub const FIELD_EXCLUSION: f64 = 0.6;
}
