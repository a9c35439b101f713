use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("{operation} is not available for the {model} reservoir")]
    Unsupported {
        operation: &'static str,
        model: &'static str,
    },

    #[error("{operation} requires resonant driving (delta = 0), got delta = {delta}")]
    RequiresResonance { operation: &'static str, delta: f64 },

    #[error("frequency {omega} is outside the domain of {function}: {reason}")]
    Domain {
        function: &'static str,
        omega: f64,
        reason: &'static str,
    },

    #[error("near-singular denominator at omega = {omega}: D = {value}")]
    IllConditioned { omega: f64, value: Complex64 },

    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("ode integration failed: {0}")]
    Integration(String),

    #[error("correlation envelope {envelope:e} at tau_max = {tau_max} exceeds tolerance {tolerance:e}")]
    InsufficientTau {
        tau_max: f64,
        envelope: f64,
        tolerance: f64,
    },

    #[error("quadrature did not converge on [{a}, {b}]: estimate {estimate:e} after {depth} bisections")]
    Quadrature {
        a: f64,
        b: f64,
        estimate: f64,
        depth: u32,
    },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for conditioning failures, as opposed to bad input.
    pub fn is_conditioning(&self) -> bool {
        matches!(
            self,
            Error::IllConditioned { .. }
                | Error::Integration(_)
                | Error::InsufficientTau { .. }
                | Error::Quadrature { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
