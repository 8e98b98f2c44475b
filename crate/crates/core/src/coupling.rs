// SPDX-License-Identifier: Apache-2.0

//! Particle-center coupling models and their dimensionless strength.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How the flying particle couples to an active center.
///
/// Both variants reduce, at wave vector `k`, to a contact potential of
/// dimensionless strength `γ(k)`:
///
/// - `Massive`: `γ = mΓ/k`.
/// - `Photonic`: `γ = J̃²/(v(vk − ω₀))` with `J̃ = √2·J`, i.e. a contact
///   potential of height `J̃²/(vk − ω₀)` seen by a particle of mass `k/v`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CouplingModel {
    Massive {
        mass: f64,
        barrier: f64,
    },
    Photonic {
        velocity: f64,
        omega0: f64,
        coupling: f64,
    },
}

impl CouplingModel {
    pub fn massive(mass: f64, barrier: f64) -> Result<Self> {
        if !mass.is_finite() || mass <= 0.0 {
            return Err(Error::invalid("mass", format!("must be > 0, got {mass}")));
        }
        if !barrier.is_finite() || barrier < 0.0 {
            return Err(Error::invalid(
                "barrier height",
                format!("must be finite and >= 0, got {barrier}"),
            ));
        }
        Ok(CouplingModel::Massive { mass, barrier })
    }

    /// Massive model whose dimensionless strength equals `gamma` at `k0`,
    /// i.e. `Γ = γ·k₀/m`.
    pub fn massive_from_gamma(gamma: f64, k0: f64, mass: f64) -> Result<Self> {
        if !k0.is_finite() || k0 <= 0.0 {
            return Err(Error::invalid("k0", format!("must be > 0, got {k0}")));
        }
        if !gamma.is_finite() || gamma < 0.0 {
            return Err(Error::invalid(
                "gamma",
                format!("must be finite and >= 0, got {gamma}"),
            ));
        }
        CouplingModel::massive(mass, gamma * k0 / mass)
    }

    pub fn photonic(velocity: f64, omega0: f64, coupling: f64) -> Result<Self> {
        if !velocity.is_finite() || velocity <= 0.0 {
            return Err(Error::invalid(
                "group velocity",
                format!("must be > 0, got {velocity}"),
            ));
        }
        if !omega0.is_finite() || omega0 < 0.0 {
            return Err(Error::invalid(
                "omega0",
                format!("must be >= 0, got {omega0}"),
            ));
        }
        if !coupling.is_finite() || coupling < 0.0 {
            return Err(Error::invalid("J", format!("must be >= 0, got {coupling}")));
        }
        Ok(CouplingModel::Photonic {
            velocity,
            omega0,
            coupling,
        })
    }

    /// Dimensionless strength `γ(k)`.
    pub fn gamma(&self, k: f64) -> Result<f64> {
        check_wavevector(k)?;
        match *self {
            CouplingModel::Massive { mass, barrier } => Ok(mass * barrier / k),
            CouplingModel::Photonic {
                velocity,
                omega0,
                coupling,
            } => {
                let detuning = photonic_detuning(velocity, omega0, k)?;
                Ok(2.0 * coupling * coupling / (velocity * detuning))
            }
        }
    }

    /// Contact-potential height at `k` (constant for the massive model).
    pub fn barrier_height(&self, k: f64) -> Result<f64> {
        check_wavevector(k)?;
        match *self {
            CouplingModel::Massive { barrier, .. } => Ok(barrier),
            CouplingModel::Photonic {
                velocity,
                omega0,
                coupling,
            } => {
                let detuning = photonic_detuning(velocity, omega0, k)?;
                Ok(2.0 * coupling * coupling / detuning)
            }
        }
    }

    /// Energy of the stationary state at `k`.
    pub fn energy(&self, k: f64) -> f64 {
        match *self {
            CouplingModel::Massive { mass, .. } => k * k / (2.0 * mass),
            CouplingModel::Photonic { velocity, .. } => velocity * k,
        }
    }

    /// Group velocity `dE/dk` at `k`.
    pub fn group_velocity(&self, k: f64) -> f64 {
        match *self {
            CouplingModel::Massive { mass, .. } => k / mass,
            CouplingModel::Photonic { velocity, .. } => velocity,
        }
    }
}

pub(crate) fn check_wavevector(k: f64) -> Result<()> {
    if !k.is_finite() || k <= 0.0 {
        return Err(Error::invalid(
            "wave vector",
            format!("must be > 0, got {k}"),
        ));
    }
    Ok(())
}

/// `vk − ω₀`, rejecting the resonance pole.
pub(crate) fn photonic_detuning(velocity: f64, omega0: f64, k: f64) -> Result<f64> {
    let vk = velocity * k;
    let detuning = vk - omega0;
    if detuning == 0.0 || detuning.abs() <= 4.0 * f64::EPSILON * vk.abs().max(omega0.abs()) {
        return Err(Error::Pole { vk, omega0 });
    }
    Ok(detuning)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn massive_gamma_is_m_gamma_over_k() {
        let m = CouplingModel::massive(2.0, 3.0).unwrap();
        assert_eq!(m.gamma(4.0).unwrap(), 1.5);
        assert_eq!(m.barrier_height(4.0).unwrap(), 3.0);
        let g = CouplingModel::massive_from_gamma(1e3, 2.0, 0.5).unwrap();
        assert!((g.gamma(2.0).unwrap() - 1e3).abs() < 1e-9);
    }

    #[test]
    fn photonic_gamma_and_pole() {
        // J̃ = 1 means J = 1/√2.
        let p = CouplingModel::photonic(1.0, 0.9, std::f64::consts::FRAC_1_SQRT_2).unwrap();
        assert!((p.barrier_height(1.0).unwrap() - 10.0).abs() < 1e-12);
        assert!((p.gamma(1.0).unwrap() - 10.0).abs() < 1e-12);
        let at_pole = CouplingModel::photonic(2.0, 1.0, 0.3).unwrap();
        assert!(matches!(at_pole.gamma(0.5), Err(Error::Pole { .. })));
    }

    #[test]
    fn rejects_invalid_inputs() {
        assert!(CouplingModel::massive(0.0, 1.0).is_err());
        assert!(CouplingModel::massive(1.0, -1.0).is_err());
        assert!(CouplingModel::photonic(0.0, 1.0, 1.0).is_err());
        assert!(CouplingModel::photonic(1.0, 1.0, -1.0).is_err());
        let m = CouplingModel::massive(1.0, 1.0).unwrap();
        assert!(m.gamma(0.0).is_err());
        assert!(m.gamma(-1.0).is_err());
    }
}
