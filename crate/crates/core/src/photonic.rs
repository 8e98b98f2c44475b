// SPDX-License-Identifier: Apache-2.0

//! Photon in a mirrored waveguide scattering off two Λ-type atoms.
//!
//! Each atom has a degenerate ground doublet `{|g₀⟩, |g₁⟩}` coupled with
//! rate `J` to one excited state `|e⟩`. In the basis
//! `|φ±⟩ = (|g₀⟩ ± |g₁⟩)/√2` only `|φ⁺⟩` couples, with rate `J̃ = √2·J`, and
//! `|φ⁻⟩` is dark. Logical `|0⟩ = |φ⁺⟩`, `|1⟩ = |φ⁻⟩`.
//!
//! In the single-excitation sector the field has right- and left-moving
//! parts `ψ±` and each active atom an excited amplitude `εᵢ`. Integrating the
//! first-order field equations across an atom gives
//! `Δψ± = ∓(i/v)·J̃·εᵢ`, and the atomic equation gives
//! `(vk − ω₀)·εᵢ = J̃·ψ(xᵢ)`. Eliminating `εᵢ` leaves five field amplitudes,
//! which are solved here directly in that form, without going through the
//! massive-particle derivative jump.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coupling::{check_wavevector, photonic_detuning, CouplingModel};
use crate::error::{Error, Result};
use crate::linalg::solve_dense;
use crate::scattering::{solve_stationary_state, solve_stationary_state_gamma, ScatteringSolution};
use crate::system::{Geometry, SpinConfig};
use crate::tolerances::{BC_RESIDUAL, EQUIVALENCE, STATE_NORM};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaAtomParams {
    /// Group velocity `v` of the guided mode.
    pub velocity: f64,
    /// Gap `ω₀` between the ground doublet and `|e⟩`.
    pub omega0: f64,
    /// Per-branch coupling `J`.
    pub coupling: f64,
}

impl LambdaAtomParams {
    pub fn new(velocity: f64, omega0: f64, coupling: f64) -> Result<Self> {
        // Reuse the model's validation.
        CouplingModel::photonic(velocity, omega0, coupling)?;
        Ok(LambdaAtomParams {
            velocity,
            omega0,
            coupling,
        })
    }

    /// `J̃ = √2·J`, the `|φ⁺⟩ ↔ |e⟩` rate.
    pub fn effective_rate(&self) -> f64 {
        std::f64::consts::SQRT_2 * self.coupling
    }

    pub fn model(&self) -> CouplingModel {
        CouplingModel::Photonic {
            velocity: self.velocity,
            omega0: self.omega0,
            coupling: self.coupling,
        }
    }

    /// Detuning `vk − ω₀` that produces the effective strength `gamma`:
    /// `J̃²/(v·γ)`.
    pub fn detuning_for_gamma(&self, gamma: f64) -> Result<f64> {
        if !gamma.is_finite() || gamma == 0.0 {
            return Err(Error::invalid(
                "gamma_eff",
                format!("must be finite and nonzero, got {gamma}"),
            ));
        }
        let jt = self.effective_rate();
        if jt == 0.0 {
            return Err(Error::invalid(
                "gamma_eff",
                "J = 0 gives gamma_eff = 0 at every detuning",
            ));
        }
        Ok(jt * jt / (self.velocity * gamma))
    }

    /// Wave vector at which the effective strength equals `gamma`.
    pub fn wavevector_for_gamma(&self, gamma: f64) -> Result<f64> {
        let k = (self.omega0 + self.detuning_for_gamma(gamma)?) / self.velocity;
        check_wavevector(k)?;
        Ok(k)
    }
}

/// Ground-doublet state `g₀|g₀⟩ + g₁|g₁⟩` of one atom.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroundDoubletState {
    pub g0: Complex64,
    pub g1: Complex64,
}

impl GroundDoubletState {
    pub fn new(g0: Complex64, g1: Complex64) -> Result<Self> {
        let norm = g0.norm_sqr() + g1.norm_sqr();
        if !((norm - 1.0).abs() <= STATE_NORM) {
            return Err(Error::invalid(
                "ground doublet state",
                format!("must be normalized, |g0|^2 + |g1|^2 = {norm}"),
            ));
        }
        Ok(GroundDoubletState { g0, g1 })
    }

    /// Builds a state from bright/dark amplitudes `(c₊, c₋)`.
    pub fn from_bright_dark(c_plus: Complex64, c_minus: Complex64) -> Result<Self> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        GroundDoubletState::new((c_plus + c_minus) * s, (c_plus - c_minus) * s)
    }
}

/// Amplitudes on `{|φ⁺⟩ = |0⟩, |φ⁻⟩ = |1⟩}`.
pub fn bright_dark_transform(state: &GroundDoubletState) -> (Complex64, Complex64) {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ((state.g0 + state.g1) * s, (state.g0 - state.g1) * s)
}

/// Inverse of [`bright_dark_transform`].
pub fn inverse_bright_dark_transform(
    c_plus: Complex64,
    c_minus: Complex64,
) -> (Complex64, Complex64) {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ((c_plus + c_minus) * s, (c_plus - c_minus) * s)
}

/// Effective contact parameters of the photonic setup at one wave vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveCoupling {
    /// `Γ_eff = J̃²/(vk − ω₀)`.
    pub barrier: f64,
    /// `m_eff = k/v`.
    pub mass: f64,
    /// `γ_eff = m_eff·Γ_eff/k = J̃²/(v(vk − ω₀))`.
    pub gamma: f64,
}

pub fn effective_coupling(params: &LambdaAtomParams, k: f64) -> Result<EffectiveCoupling> {
    check_wavevector(k)?;
    let detuning = photonic_detuning(params.velocity, params.omega0, k)?;
    let jt = params.effective_rate();
    let barrier = jt * jt / detuning;
    let mass = k / params.velocity;
    Ok(EffectiveCoupling {
        barrier,
        mass,
        gamma: mass * barrier / k,
    })
}

/// Solves the photonic single-excitation stationary state.
///
/// The returned amplitudes follow the same plane-wave layout as
/// [`ScatteringSolution`], with `ψ₊` carried by `(1, a₁, a₂)` and `ψ₋` by
/// `(r, b₁, b₂)`; `excitations` holds `(ε₁, ε₂)`.
pub fn photonic_stationary_state(
    config: SpinConfig,
    params: &LambdaAtomParams,
    geometry: &Geometry,
    k: f64,
) -> Result<ScatteringSolution> {
    check_wavevector(k)?;
    let v = params.velocity;
    let detuning = photonic_detuning(v, params.omega0, k)?;
    let jt = params.effective_rate();
    let (d1, d2) = config.activity();
    // Jump of ψ± across atom ℓ is ∓i·s_ℓ·ψ(x_ℓ), with s_ℓ = J̃²δ/(v(vk − ω₀)).
    let s1 = jt * jt * d1 / (v * detuning);
    let s2 = jt * jt * d2 / (v * detuning);
    let e2 = Complex64::cis(k * geometry.x2());
    let e3 = Complex64::cis(k * geometry.x3());

    // Unknowns: r, a1, b1, a2, b2. ψ(0) = 1 + r and ψ(x2) = a1 e2 + b1 ē2.
    let rows = vec![
        // Δψ₊ at x1: a1 − 1 = −i s1 (1 + r)
        vec![I * s1, ONE, ZERO, ZERO, ZERO],
        // Δψ₋ at x1: b1 − r = i s1 (1 + r)
        vec![-(ONE + I * s1), ZERO, ONE, ZERO, ZERO],
        // Δψ₊ at x2: (a2 − a1) e2 = −i s2 ψ(x2)
        vec![ZERO, (I * s2 - ONE) * e2, I * s2 * e2.conj(), e2, ZERO],
        // Δψ₋ at x2: (b2 − b1) ē2 = i s2 ψ(x2)
        vec![
            ZERO,
            -I * s2 * e2,
            -(ONE + I * s2) * e2.conj(),
            ZERO,
            e2.conj(),
        ],
        // Mirror: ψ₊(x3) + ψ₋(x3) = 0
        vec![ZERO, ZERO, ZERO, e3, e3.conj()],
    ];
    let rhs = vec![ONE - I * s1, I * s1, ZERO, ZERO, ZERO];
    let dense = solve_dense(&rows, &rhs)?;
    let x = dense.x;

    let (r, a1, b1, a2, b2) = (x[0], x[1], x[2], x[3], x[4]);
    let psi1 = ONE + r;
    let psi2 = a1 * e2 + b1 * e2.conj();
    let eps1 = jt * d1 * psi1 / detuning;
    let eps2 = jt * d2 * psi2 / detuning;

    let mut solution = ScatteringSolution {
        config,
        k,
        r,
        a1,
        b1,
        a2,
        b2,
        excitations: Some([eps1, eps2]),
        residual: 0.0,
    };
    solution.residual = photonic_residual(&solution, params, geometry)?;
    if !(solution.residual < BC_RESIDUAL) {
        return Err(Error::SingularSystem {
            condition: dense.condition,
        });
    }
    Ok(solution)
}

/// Largest violation of the seven un-eliminated equations: four field jumps
/// driven by `εᵢ`, the mirror, and two atomic equations. Measured relative to
/// the size of the terms, as for the massive residual.
pub fn photonic_residual(
    solution: &ScatteringSolution,
    params: &LambdaAtomParams,
    geometry: &Geometry,
) -> Result<f64> {
    let s = solution;
    let k = s.k;
    let v = params.velocity;
    let detuning = photonic_detuning(v, params.omega0, k)?;
    let jt = params.effective_rate();
    let (d1, d2) = s.config.activity();
    let [eps1, eps2] = s.excitations.unwrap_or([ZERO, ZERO]);
    let e2 = Complex64::cis(k * geometry.x2());
    let e3 = Complex64::cis(k * geometry.x3());

    let field = [
        (s.a1 - ONE) + I * jt * d1 * eps1 / v,
        (s.b1 - s.r) - I * jt * d1 * eps1 / v,
        (s.a2 - s.a1) * e2 + I * jt * d2 * eps2 / v,
        (s.b2 - s.b1) * e2.conj() - I * jt * d2 * eps2 / v,
        s.a2 * e3 + s.b2 * e3.conj(),
    ];
    let psi1 = ONE + s.r;
    let psi2 = s.a1 * e2 + s.b1 * e2.conj();
    let amplitude = [s.a1, s.b1, s.a2, s.b2, eps1 * jt / v, eps2 * jt / v]
        .iter()
        .map(|z| z.norm())
        .fold(1.0, f64::max);
    let atom_scale = 1.0_f64.max(jt).max(detuning.abs()) * amplitude;
    let atoms = [
        (detuning * eps1 - jt * d1 * psi1) / atom_scale,
        (detuning * eps2 - jt * d2 * psi2) / atom_scale,
    ];
    Ok(field
        .iter()
        .map(|z| z.norm() / amplitude)
        .chain(atoms.iter().map(|z| z.norm()))
        .fold(0.0, f64::max))
}

/// Outcome of comparing photonic and massive reflection amplitudes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub max_deviation: f64,
    pub worst_k: f64,
    pub worst_config: SpinConfig,
    pub points: usize,
}

impl EquivalenceReport {
    pub fn passed(&self) -> bool {
        self.max_deviation < EQUIVALENCE
    }
}

/// Compares the photonic amplitudes with the massive ones at
/// `m = k/v`, `Γ = J̃²/(vk − ω₀)` over every grid point and configuration.
pub fn verify_equivalence(
    params: &LambdaAtomParams,
    geometry: &Geometry,
    k_grid: &[f64],
) -> Result<EquivalenceReport> {
    if k_grid.is_empty() {
        return Err(Error::Empty("wave-vector grid"));
    }
    // Validate the whole grid before computing anything.
    for &k in k_grid {
        check_wavevector(k)?;
        photonic_detuning(params.velocity, params.omega0, k)?;
    }

    let mut report = EquivalenceReport {
        max_deviation: 0.0,
        worst_k: k_grid[0],
        worst_config: SpinConfig::ALL[0],
        points: k_grid.len(),
    };
    for &k in k_grid {
        let eff = effective_coupling(params, k)?;
        for config in SpinConfig::ALL {
            let photonic = photonic_stationary_state(config, params, geometry, k)?;
            let massive = if eff.barrier >= 0.0 {
                let model = CouplingModel::massive(eff.mass, eff.barrier)?;
                solve_stationary_state(config, &model, geometry, k)?
            } else {
                // Red detuning gives an attractive contact, outside the
                // massive model's Γ ≥ 0 domain.
                solve_stationary_state_gamma(config, eff.mass * eff.barrier / k, geometry, k)?
            };
            let deviation = (photonic.r - massive.r).norm();
            if deviation > report.max_deviation {
                report.max_deviation = deviation;
                report.worst_k = k;
                report.worst_config = config;
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn regime() -> Geometry {
        Geometry::new(PI, 1.5 * PI).unwrap()
    }

    #[test]
    fn bright_dark_examples() {
        let (p, m) = bright_dark_transform(&GroundDoubletState::new(ONE, ZERO).unwrap());
        assert!((p - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
        assert!((m - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);

        let dark = GroundDoubletState::new(c(FRAC_1_SQRT_2, 0.0), c(-FRAC_1_SQRT_2, 0.0)).unwrap();
        let (p, m) = bright_dark_transform(&dark);
        assert!(p.norm() < 1e-15);
        assert!((m - ONE).norm() < 1e-15);

        assert!(GroundDoubletState::new(ONE, ONE).is_err());
    }

    #[test]
    fn effective_coupling_substitution() {
        // J̃ = 1, v = 1, k = 1, ω0 = 0.9
        let params = LambdaAtomParams::new(1.0, 0.9, FRAC_1_SQRT_2).unwrap();
        let eff = effective_coupling(&params, 1.0).unwrap();
        assert!((eff.barrier - 10.0).abs() < 1e-12);
        assert!((eff.gamma - 10.0).abs() < 1e-12);
        assert!((eff.mass - 1.0).abs() < 1e-15);

        let silent = LambdaAtomParams::new(1.0, 0.9, 0.0).unwrap();
        assert_eq!(effective_coupling(&silent, 1.0).unwrap().barrier, 0.0);
    }

    #[test]
    fn gamma_diverges_towards_resonance() {
        let params = LambdaAtomParams::new(1.0, 1.0, 0.2).unwrap();
        let mut last = 0.0;
        for detuning in [1e-1, 1e-2, 1e-4, 1e-6, 1e-8] {
            let g = effective_coupling(&params, 1.0 + detuning).unwrap().gamma;
            assert!(g > last);
            last = g;
        }
        assert!(last > 1e6);
        assert!(matches!(
            effective_coupling(&params, 1.0),
            Err(Error::Pole { .. })
        ));
    }

    #[test]
    fn gamma_to_detuning_helper_round_trips() {
        let params = LambdaAtomParams::new(1.3, 0.8, 0.4).unwrap();
        for gamma in [0.5, 10.0, 1e3, -4.0] {
            let k = params.wavevector_for_gamma(gamma).unwrap();
            let eff = effective_coupling(&params, k).unwrap();
            assert!((eff.gamma - gamma).abs() < 1e-9 * gamma.abs());
        }
    }

    #[test]
    fn dark_atoms_decouple() {
        let g = regime();
        let base = photonic_stationary_state(
            SpinConfig::ALL[3],
            &LambdaAtomParams::new(1.0, 0.95, 0.1).unwrap(),
            &g,
            1.0,
        )
        .unwrap();
        assert_eq!(base.excitations, Some([ZERO, ZERO]));
        assert!((base.r + Complex64::cis(2.0 * g.x3())).norm() < 1e-12);
        for j in [0.0, 0.3, 2.0, 17.0] {
            let params = LambdaAtomParams::new(1.0, 0.95, j).unwrap();
            let s = photonic_stationary_state(SpinConfig::ALL[3], &params, &g, 1.0).unwrap();
            assert!((s.r - base.r).norm() < 1e-14);
        }
        // Atom 1 dark: its excitation vanishes whatever J is.
        let params = LambdaAtomParams::new(1.0, 0.95, 0.7).unwrap();
        let s = photonic_stationary_state(SpinConfig::ALL[2], &params, &g, 1.0).unwrap();
        assert_eq!(s.excitations.unwrap()[0], ZERO);
        assert!(s.excitations.unwrap()[1].norm() > 0.0);
    }

    #[test]
    fn excitation_amplitudes_follow_atomic_equation() {
        let g = Geometry::new(1.1, 2.6).unwrap();
        let params = LambdaAtomParams::new(0.8, 1.0, 0.35).unwrap();
        let k = 1.4;
        let detuning = params.velocity * k - params.omega0;
        let s = photonic_stationary_state(SpinConfig::ALL[0], &params, &g, k).unwrap();
        let [e1, e2] = s.excitations.unwrap();
        let psi1 = ONE + s.r;
        let psi2 = s.a1 * Complex64::cis(k * g.x2()) + s.b1 * Complex64::cis(-k * g.x2());
        assert!((e1 * detuning - params.effective_rate() * psi1).norm() < 1e-10);
        assert!((e2 * detuning - params.effective_rate() * psi2).norm() < 1e-10);
        assert!((s.r.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn equivalence_on_a_small_grid() {
        let params = LambdaAtomParams::new(1.0, 0.9, 0.5).unwrap();
        let grid: Vec<f64> = (0..11)
            .map(|i| 0.5 + 0.1 * i as f64)
            .filter(|k| (k - 0.9).abs() > 1e-6)
            .collect();
        let report = verify_equivalence(&params, &regime(), &grid).unwrap();
        assert!(report.passed(), "{report:?}");
    }

    #[test]
    fn equivalence_rejects_empty_and_pole_grids() {
        let params = LambdaAtomParams::new(1.0, 1.0, 0.5).unwrap();
        assert_eq!(
            verify_equivalence(&params, &regime(), &[]),
            Err(Error::Empty("wave-vector grid"))
        );
        assert!(matches!(
            verify_equivalence(&params, &regime(), &[0.5, 1.0, 1.5]),
            Err(Error::Pole { .. })
        ));
    }
}
