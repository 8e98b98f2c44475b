// SPDX-License-Identifier: Apache-2.0

//! Gate duration from energy-time uncertainty and the decoherence working
//! condition. All values are order-of-magnitude estimates (`ΔE·Δτ ∼ 1`).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::coupling::CouplingModel;
use crate::error::{Error, Result};
use crate::wavepacket::GaussianPacket;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 2.997_924_58e8;

/// `Δτ_min·v·k₀`: shortest duration for which a packet keeps `F ≳ 95%`.
pub const MIN_DURATION_FACTOR: f64 = 10.0;

/// Durations in the units of the inputs (`1/(v·k)`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DurationReport {
    /// `Δτ = 1/(v_g·dk)`.
    pub dtau: f64,
    /// `Δτ_min = 10/(v_g·k₀)`.
    pub dtau_min: f64,
    /// Decoherence time must greatly exceed this.
    pub td_bound: f64,
    /// Group velocity at `k₀`.
    pub group_velocity: f64,
}

/// `v_g` is `v` for the photonic dispersion and `k₀/m` for the massive one.
pub fn gate_duration(packet: &GaussianPacket, model: &CouplingModel) -> DurationReport {
    let v = model.group_velocity(packet.k0());
    let dtau_min = MIN_DURATION_FACTOR / (v * packet.k0());
    DurationReport {
        dtau: 1.0 / (v * packet.dk()),
        dtau_min,
        td_bound: dtau_min,
        group_velocity: v,
    }
}

/// `10/(v·k₀)` with `k₀ = 2π/λ₀`; SI in, seconds out.
pub fn working_condition(velocity: f64, lambda0: f64) -> Result<f64> {
    if !(velocity > 0.0 && velocity.is_finite()) {
        return Err(Error::invalid(
            "velocity",
            format!("must be > 0, got {velocity}"),
        ));
    }
    if !(lambda0 > 0.0 && lambda0.is_finite()) {
        return Err(Error::invalid(
            "wavelength",
            format!("must be > 0, got {lambda0}"),
        ));
    }
    Ok(MIN_DURATION_FACTOR / (velocity * 2.0 * PI / lambda0))
}

/// Waveguide material with refractive index and operating wavelength.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaterialPreset {
    pub name: &'static str,
    pub refractive_index: f64,
    /// Metres.
    pub wavelength: f64,
}

impl MaterialPreset {
    pub fn velocity(&self) -> f64 {
        SPEED_OF_LIGHT / self.refractive_index
    }

    pub fn td_bound(&self) -> f64 {
        working_condition(self.velocity(), self.wavelength).expect("preset values are valid")
    }
}

pub const GAAS: MaterialPreset = MaterialPreset {
    name: "gaas",
    refractive_index: 3.4,
    wavelength: 900e-9,
};

pub const DIAMOND: MaterialPreset = MaterialPreset {
    name: "diamond",
    refractive_index: 2.4,
    wavelength: 640e-9,
};

pub fn preset(name: &str) -> Option<MaterialPreset> {
    [GAAS, DIAMOND]
        .into_iter()
        .find(|p| p.name.eq_ignore_ascii_case(name))
}
