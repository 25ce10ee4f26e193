use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("asymmetric band: upper half-width {upper} differs from lower half-width {lower}")]
    AsymmetricBand { upper: f64, lower: f64 },

    #[error("band too wide: gamma = {gamma} is outside the small-gamma regime (gamma < {limit})")]
    BandTooWide { gamma: f64, limit: f64 },

    #[error("{what} = {value} is outside the admissible domain [{lo}, {hi}]")]
    Domain {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("no root: {reason}")]
    NoRoot { reason: String },

    #[error("{solver} did not converge after {iterations} iterations (residuals {residuals:?})")]
    NoConvergence {
        solver: &'static str,
        iterations: usize,
        residuals: Vec<f64>,
    },

    #[error("time step too large: {bound}")]
    StepTooLarge { bound: String },

    #[error("grid Peclet condition violated: max |mu| dx = {cell_peclet} > sigma^2 = {limit}; use dx <= {suggested_dx}")]
    Peclet {
        cell_peclet: f64,
        limit: f64,
        suggested_dx: f64,
    },

    #[error("claim payoff violates the Neumann condition: dY/dx = {slope} at x = {at}")]
    ClaimNotNeumann { at: f64, slope: f64 },

    #[error("{0}")]
    Unsupported(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
