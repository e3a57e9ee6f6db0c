use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    /// Adaptive quadrature could not reach the requested tolerance.
    #[error("quadrature did not converge: error estimate {estimate:e} exceeds tolerance {tolerance:e}")]
    Quadrature { estimate: f64, tolerance: f64 },

    /// A requested time lies outside the tabulated rate profile.
    #[error("time {t} outside profile range [0, {horizon}]")]
    Range { t: f64, horizon: f64 },

    /// The density matrix lost positivity during integration.
    #[error("positivity violated at t = {t} (minimum eigenvalue {min_eigenvalue:e})")]
    Positivity { t: f64, min_eigenvalue: f64 },

    /// A sine factor is too small to divide by.
    #[error("ill-conditioned inversion: |S| = {s_factor:e} below threshold {threshold:e}")]
    Conditioning { s_factor: f64, threshold: f64 },

    /// Inputs are mutually inconsistent (for example a Bloch radius above one).
    #[error("inconsistent inputs: {0}")]
    InconsistentInputs(String),

    /// The logarithm in the entropy-production rate diverges for a pure state.
    #[error("entropy production is singular for a pure state (r = {radius})")]
    SingularLog { radius: f64 },

    /// The state is not a valid density matrix.
    #[error("unphysical state: {0}")]
    Unphysical(String),

    /// An analytic identity or bound failed beyond its tolerance.
    #[error("invariant failure: {0}")]
    Invariant(String),
}
