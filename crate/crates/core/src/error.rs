// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A constructor or operation received a value outside its domain.
    #[error("invalid {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error(
        "photonic coupling has a pole at v*k = omega0 (v*k = {vk}, omega0 = {omega0}); \
         pass a finite detuning, e.g. via a target effective strength"
    )]
    Pole { vk: f64, omega0: f64 },

    #[error("linear system is numerically singular (condition estimate {condition:e})")]
    SingularSystem { condition: f64 },

    #[error("reflection phase is undefined: the closed-form argument vanishes")]
    DegeneratePhase,

    #[error("matrix is not unitary: max |U^dag U - 1| = {deviation:e}")]
    NotUnitary { deviation: f64 },

    #[error("fidelity routes disagree: chi route {chi}, trace route {trace}")]
    RouteMismatch { chi: f64, trace: f64 },

    #[error("wavepacket is not admissible: {condition}")]
    Inadmissible { condition: String },

    #[error("spatial grid too coarse: spacing {spacing} exceeds required {required}")]
    GridTooCoarse { spacing: f64, required: f64 },

    #[error("position x = {x} lies beyond the mirror at x3 = {x3}")]
    OutOfDomain { x: f64, x3: f64 },

    #[error("{0} must not be empty")]
    Empty(&'static str),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for failures of the numerics themselves, as opposed to rejected
    /// inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::SingularSystem { .. } | Error::DegeneratePhase | Error::RouteMismatch { .. }
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classification_and_messages() {
        assert!(Error::SingularSystem { condition: 1e18 }.is_numerical());
        assert!(!Error::invalid("k", "must be > 0").is_numerical());
        assert_eq!(
            Error::invalid("k", "must be > 0").to_string(),
            "invalid k: must be > 0"
        );
        assert_eq!(Error::Empty("grid").to_string(), "grid must not be empty");
    }
}
