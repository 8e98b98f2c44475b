// SPDX-License-Identifier: Apache-2.0

//! Scattering-mediated controlled-Z gate between two static qubits.
//!
//! A flying particle (a massive electron or a guided photon) is sent down a
//! one-dimensional wire towards two scattering centers placed in front of a
//! perfect mirror. Each center couples to the particle only when its qubit is
//! in `|0⟩`, so every computational basis state of the pair sees its own
//! static potential and the particle comes back with a configuration
//! dependent phase. The mirror removes the transmission channel, which makes
//! the reflection operator a diagonal unitary gate on the two qubits.
//!
//! Modules, bottom-up:
//!
//! - [`system`] and [`coupling`]: qubit configurations, wire geometry and the
//!   coupling models (massive contact potentials or Λ-type atoms).
//! - [`scattering`]: stationary boundary-value solver, closed-form reflection
//!   amplitude, reflection gate and open-wire scattering.
//! - [`photonic`]: the waveguide/Λ-atom setup solved on its own terms and
//!   checked against the massive one.
//! - [`gate`]: CZ geometries, ideal large-coupling gate, Pauli process matrix
//!   and process fidelity sweeps.
//! - [`wavepacket`] and [`timing`]: finite-bandwidth packets, spectral time
//!   evolution, packet-averaged fidelity, gate duration and decoherence
//!   working condition.
//! - [`table`] and [`cli`]: tabular export and the command-line front end.
//!
//! Units: `ħ = 1`, lengths in units of `1/k₀`, energies and rates relative to
//! `k₀` (the SI working-condition helpers are the only exception).

// `!(a <= b)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod coupling;
pub mod error;
pub mod gate;
pub mod linalg;
pub mod photonic;
pub mod quadrature;
pub mod scattering;
pub mod system;
pub mod table;
pub mod timing;
pub mod tolerances;
pub mod wavepacket;

pub use num_complex::Complex64;

pub use coupling::CouplingModel;
pub use error::{Error, Result};
pub use gate::{CzRegime, FidelityCurve, ProcessMatrix};
pub use photonic::{GroundDoubletState, LambdaAtomParams};
pub use scattering::{OpenLineResult, ReflectionGate, ScatteringSolution};
pub use system::{Geometry, SpinConfig};
pub use timing::DurationReport;
pub use wavepacket::{GaussianPacket, PacketEvolution};
