use thiserror::Error;

use crate::field::PortId;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("angular frequency must be finite and strictly positive, got {0}")]
    InvalidFrequency(f64),

    #[error("cannot combine fields at different frequencies ({left} vs {right} rad/s)")]
    FrequencyMismatch { left: f64, right: f64 },

    #[error("temperature must be finite and non-negative, got {0} K")]
    InvalidTemperature(f64),

    #[error("temperature of port {port} must be finite and non-negative, got {value} K")]
    InvalidPortTemperature { port: PortId, value: f64 },

    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },

    #[error("{name} must be finite, got {value}")]
    NonFinite { name: &'static str, value: f64 },

    #[error("invalid sweep: {0}")]
    InvalidSweep(String),

    #[error("circuit system is singular at omega = {0} rad/s")]
    SingularCircuit(f64),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
