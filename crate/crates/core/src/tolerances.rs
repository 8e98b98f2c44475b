// SPDX-License-Identifier: Apache-2.0

//! Numerical thresholds shared by the solvers, the checks and the tests.

/// Max boundary-condition violation accepted from a stationary solve.
pub const BC_RESIDUAL: f64 = 1e-10;

/// `| |r| - 1 |` for mirrored reflection amplitudes.
pub const UNIT_MODULUS: f64 = 1e-10;

/// `R R^dag + T T^dag = 1` on the open wire.
pub const COMPLETENESS: f64 = 1e-12;

/// Closed form against stationary solver, phase agreement.
pub const ORACLE_PHASE: f64 = 1e-8;

/// Photonic against massive reflection amplitudes.
pub const EQUIVALENCE: f64 = 1e-8;

/// Inputs to the process-matrix construction must be unitary to this level.
pub const UNITARITY_INPUT: f64 = 1e-8;

/// The two process-fidelity routes must agree to this level.
pub const FIDELITY_ROUTES: f64 = 1e-10;

/// Ground-doublet states must be normalized to this level.
pub const STATE_NORM: f64 = 1e-12;

/// Systems with a 1-norm condition estimate above this are rejected.
pub const MAX_CONDITION: f64 = 1e13;

/// Default "infinite" coupling surrogate. The CZ infidelity falls off as
/// `1/γ²` and the gate-entry deviation as `1/γ`.
pub const DEFAULT_GAMMA: f64 = 1e3;

/// Default Gauss-Legendre node count over `k₀ ± 5Δk`.
pub const DEFAULT_K_NODES: usize = 401;

/// Half-width of the spectral window in units of `Δk`.
pub const SPECTRAL_HALF_WIDTH: f64 = 5.0;

/// Default fidelity threshold for the tolerance window of a sweep.
pub const DEFAULT_FIDELITY_THRESHOLD: f64 = 0.95;

/// Wavepacket norm conservation.
pub const NORM_DRIFT: f64 = 1e-6;
