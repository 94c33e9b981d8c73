//! Sharp constants of Kato-Yajima smoothing estimates.
//!
//! The crate computes the optimal constant `C_d(w, psi, phi)` of the
//! weighted space-time bound
//!
//! ```text
//! integral over (x, t) of w(|x|) |psi(|D|) e^{it phi(|D|)} f(x)|^2
//!     <= (2 pi)^d C_d(w, psi, phi) ||f||^2
//! ```
//!
//! for Schrodinger (`phi(r) = r^2`), relativistic Schrodinger
//! (`phi_m(r) = sqrt(r^2 + m^2)`) and Dirac evolutions in dimensions
//! two and three (radial data in any dimension >= 2), together with the
//! block spherical-harmonic machinery that reduces the Dirac problem to
//! scalar mode profiles.
//!
//! Organization:
//! - [`lambda`]: mode profiles `lambda_k(r)` through the Funk-Hecke
//!   transform, plus the Dirac combinations.
//! - [`optimum`]: suprema over `(k, r)`, closed-form constants, the
//!   equivalence chain between massive and massless problems.
//! - [`dirac`] and [`harmonics`]: gamma matrices, propagators, coupling
//!   matrices `A_k^n`, matrix harmonics and their identities.
//! - [`oracle`]: direct space-time quadrature of the smoothing norm,
//!   kept independent of the spectral pipeline for cross-checking.
//! - [`cli`]: implementation of the `kysharp` binary.

pub mod bessel;
pub mod cli;
pub mod dirac;
pub mod harmonics;
pub mod lambda;
pub mod linalg;
pub mod optimum;
pub mod oracle;
pub mod problem;
pub mod quad;
pub mod special;
pub mod verify;

/// Unified error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A parameter violates a documented precondition.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    /// An index pair lies outside the defined range of a matrix family.
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    /// A quadrature failed its error or convergence check.
    #[error("quadrature failure: {0}")]
    QuadratureFailure(String),
    /// A radial Fourier transform failed its convergence check.
    #[error("divergent transform: {0}")]
    DivergentTransform(String),
    /// The supremum search hit its mode ceiling or could not resolve a
    /// boundary limit.
    #[error("supremum not localized: {0}")]
    SupNotLocalized(String),
    /// A truncated space-time integral missed its tail budget.
    #[error("truncation not converged: {0}")]
    TruncationNotConverged(String),
    /// The Dirac symbol vanishes, so the +/- projections are undefined.
    #[error("degenerate symbol: {0}")]
    DegenerateSymbol(String),
    /// The problem is already in Schrodinger-dispersion form.
    #[error("already reduced: {0}")]
    AlreadyReduced(String),
    /// Malformed configuration or scenario input.
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
