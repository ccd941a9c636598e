use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("{field} = {value} is outside {range}")]
    InvalidParameter {
        field: &'static str,
        value: f64,
        range: &'static str,
    },
    #[error("mean photon number must be non-negative, got {0}")]
    NegativeIntensity(f64),
    #[error("QBER undefined: zero gain at intensity {intensity}")]
    ZeroGain { intensity: f64 },
}

/// A single violated ordering constraint on the decoy intensities.
#[derive(Debug, Clone, PartialEq)]
pub enum IntensityViolation {
    NonFinite,
    Nu3NotPositive {
        nu3: f64,
    },
    Nu3NotBelowNu2 {
        nu3: f64,
        nu2: f64,
    },
    Nu2AboveTwoThirdsMu {
        nu2: f64,
        limit: f64,
    },
    Nu1NotAboveTwoThirdsMu {
        nu1: f64,
        limit: f64,
    },
    Nu1AboveThreeQuartersMu {
        nu1: f64,
        limit: f64,
    },
    Nu1PlusNu2NotAboveMu {
        sum: f64,
        mu: f64,
    },
    Nu2PlusNu3NotBelowMu {
        sum: f64,
        mu: f64,
    },
    /// `nu1 - nu2 - (nu1^3 - nu2^3) / mu^2` away from zero.
    CubicResidual {
        residual: f64,
        tolerance: f64,
    },
}

impl fmt::Display for IntensityViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use IntensityViolation::*;
        match self {
            NonFinite => write!(f, "intensities must be finite"),
            Nu3NotPositive { nu3 } => write!(f, "0 < nu3 violated (nu3 = {nu3})"),
            Nu3NotBelowNu2 { nu3, nu2 } => write!(f, "nu3 < nu2 violated ({nu3} >= {nu2})"),
            Nu2AboveTwoThirdsMu { nu2, limit } => {
                write!(f, "nu2 <= 2mu/3 violated ({nu2} > {limit})")
            }
            Nu1NotAboveTwoThirdsMu { nu1, limit } => {
                write!(f, "2mu/3 < nu1 violated ({nu1} <= {limit})")
            }
            Nu1AboveThreeQuartersMu { nu1, limit } => {
                write!(f, "nu1 <= 3mu/4 violated ({nu1} > {limit})")
            }
            Nu1PlusNu2NotAboveMu { sum, mu } => {
                write!(f, "nu1 + nu2 > mu violated ({sum} <= {mu})")
            }
            Nu2PlusNu3NotBelowMu { sum, mu } => {
                write!(f, "nu2 + nu3 < mu violated ({sum} >= {mu})")
            }
            CubicResidual {
                residual,
                tolerance,
            } => write!(
                f,
                "nu1 - nu2 = (nu1^3 - nu2^3)/mu^2 violated (residual {residual:e}, tolerance {tolerance:e})"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundsError {
    #[error("invalid intensity set: {}", join(.0))]
    Intensities(Vec<IntensityViolation>),
    #[error("signal mean photon number must be positive, got {0}")]
    NonPositiveMu(f64),
    #[error("background estimate needs the vacuum tally, got intensity {0}")]
    NotVacuum(f64),
    #[error("degenerate intensities: {0}")]
    Degenerate(&'static str),
}

fn join(violations: &[IntensityViolation]) -> String {
    violations
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RateError {
    #[error("binary entropy argument {0} outside [0, 1]")]
    EntropyDomain(f64),
    #[error("untagged fraction undefined for zero signal gain")]
    ZeroGain,
    #[error("transmittance {0} outside (0, 1]")]
    InvalidTransmittance(f64),
    #[error(transparent)]
    Root(#[from] RootError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RootError {
    #[error("no sign change on [{lo}, {hi}]: f(lo) = {f_lo:e}, f(hi) = {f_hi:e}")]
    NoSignChange {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },
    #[error("function returned a non-finite value at x = {x}")]
    NonFinite { x: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error(transparent)]
    Rate(#[from] RateError),
    #[error("invalid distance range {start}:{stop}:{step}")]
    InvalidRange { start: f64, stop: f64, step: f64 },
    #[error("optimal mu is only defined for sarg04-no-decoy")]
    OptimalMuUnsupported,
    #[error("{protocol} is never secure: rate at 0 km is {rate:e}")]
    NeverSecure { protocol: String, rate: f64 },
    #[error("{protocol} rate still positive at {distance_km} km")]
    NoCutoff { protocol: String, distance_km: f64 },
}
