// SPDX-License-Identifier: Apache-2.0

//! Stationary scattering of the flying particle off the two centers.
//!
//! For a configuration `α` the particle sees contact potentials of strength
//! `Γ δ_{αᵢ0}` at `x₁ = 0` and `x₂`. Left of the first center the stationary
//! state is `e^{ikx} + r e^{-ikx}`; between the centers and between center 2
//! and the mirror it is `aᵢ e^{ikx} + bᵢ e^{-ikx}`. The five amplitudes follow
//! from continuity at both centers, the derivative jumps
//! `ΔΨ'(xᵢ) = 2mΓ δ_{αᵢ0} Ψ(xᵢ)` and the hard wall `Ψ(x₃) = 0`.
//!
//! All derivative conditions are divided by `k`, so the systems depend on the
//! coupling only through `γ = mΓ/k`.

use nalgebra::Matrix4;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coupling::{check_wavevector, CouplingModel};
use crate::error::{Error, Result};
use crate::linalg::solve_dense;
use crate::system::{Geometry, SpinConfig};
use crate::tolerances::BC_RESIDUAL;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// An active contact potential `strength · δ(x − position)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaBarrier {
    pub position: f64,
    pub strength: f64,
}

/// Contact potentials seen by the particle in configuration `config` at wave
/// vector `k`. The photonic model contributes its effective height
/// `J̃²/(vk − ω₀)`, which is why `k` is needed.
pub fn effective_potential(
    config: SpinConfig,
    model: &CouplingModel,
    geometry: &Geometry,
    k: f64,
) -> Result<Vec<DeltaBarrier>> {
    let strength = model.barrier_height(k)?;
    let mut barriers = Vec::with_capacity(2);
    if config.center1_active() {
        barriers.push(DeltaBarrier {
            position: geometry.x1(),
            strength,
        });
    }
    if config.center2_active() {
        barriers.push(DeltaBarrier {
            position: geometry.x2(),
            strength,
        });
    }
    Ok(barriers)
}

/// Stationary state of one configuration at one wave vector.
///
/// Amplitudes multiply plane waves without the `1/√(2π)` normalization:
/// `x < 0`: `e^{ikx} + r e^{-ikx}`; `0 ≤ x < x₂`: `a₁ e^{ikx} + b₁ e^{-ikx}`;
/// `x₂ ≤ x ≤ x₃`: `a₂ e^{ikx} + b₂ e^{-ikx}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScatteringSolution {
    pub config: SpinConfig,
    pub k: f64,
    pub r: Complex64,
    pub a1: Complex64,
    pub b1: Complex64,
    pub a2: Complex64,
    pub b2: Complex64,
    /// Excited-state amplitudes `ε₁, ε₂` (photonic setup only).
    pub excitations: Option<[Complex64; 2]>,
    /// Largest boundary-condition violation of the returned amplitudes.
    pub residual: f64,
}

impl ScatteringSolution {
    /// Right- and left-moving parts `(Ψ₊(x), Ψ₋(x))`.
    pub fn components(&self, geometry: &Geometry, x: f64) -> Result<(Complex64, Complex64)> {
        if x > geometry.x3() {
            return Err(Error::OutOfDomain {
                x,
                x3: geometry.x3(),
            });
        }
        let (plus, minus) = self.region_amplitudes(geometry, x);
        let phase = Complex64::cis(self.k * x);
        Ok((plus * phase, minus * phase.conj()))
    }

    /// Coefficients of `e^{ikx}` and `e^{-ikx}` in the region containing `x`.
    pub(crate) fn region_amplitudes(&self, geometry: &Geometry, x: f64) -> (Complex64, Complex64) {
        if x < geometry.x1() {
            (ONE, self.r)
        } else if x < geometry.x2() {
            (self.a1, self.b1)
        } else {
            (self.a2, self.b2)
        }
    }

    /// `dΨ/dx` at `x`, taken from the region containing `x`.
    pub fn derivative(&self, geometry: &Geometry, x: f64) -> Result<Complex64> {
        let (plus, minus) = self.components(geometry, x)?;
        Ok(I * self.k * (plus - minus))
    }
}

/// `Ψ(x) = Ψ₊(x) + Ψ₋(x)` for `x ≤ x₃`.
pub fn wavefunction_eval(
    solution: &ScatteringSolution,
    geometry: &Geometry,
    x: f64,
) -> Result<Complex64> {
    let (plus, minus) = solution.components(geometry, x)?;
    Ok(plus + minus)
}

/// Solves the stationary problem for `config` under `model`.
pub fn solve_stationary_state(
    config: SpinConfig,
    model: &CouplingModel,
    geometry: &Geometry,
    k: f64,
) -> Result<ScatteringSolution> {
    let gamma = model.gamma(k)?;
    solve_stationary_state_gamma(config, gamma, geometry, k)
}

/// Same as [`solve_stationary_state`] with the dimensionless strength given
/// directly. Negative `gamma` describes attractive contacts.
pub fn solve_stationary_state_gamma(
    config: SpinConfig,
    gamma: f64,
    geometry: &Geometry,
    k: f64,
) -> Result<ScatteringSolution> {
    check_wavevector(k)?;
    if !gamma.is_finite() {
        return Err(Error::invalid(
            "gamma",
            format!("must be finite, got {gamma}"),
        ));
    }
    let (d1, d2) = config.activity();
    let g1 = 2.0 * gamma * d1;
    let g2 = 2.0 * gamma * d2;
    let e2 = Complex64::cis(k * geometry.x2());
    let e3 = Complex64::cis(k * geometry.x3());

    // Unknowns: r, a1, b1, a2, b2.
    let rows = vec![
        // Ψ continuous at x1 = 0.
        vec![ONE, -ONE, -ONE, ZERO, ZERO],
        // Ψ continuous at x2.
        vec![ZERO, e2, e2.conj(), -e2, -e2.conj()],
        // Hard wall at x3.
        vec![ZERO, ZERO, ZERO, e3, e3.conj()],
        // Derivative jump at x1.
        vec![I - g1, I, -I, ZERO, ZERO],
        // Derivative jump at x2.
        vec![
            ZERO,
            -(I + g2) * e2,
            (I - g2) * e2.conj(),
            I * e2,
            -I * e2.conj(),
        ],
    ];
    let rhs = vec![-ONE, ZERO, ZERO, I + g1, ZERO];
    let dense = solve_dense(&rows, &rhs)?;
    let x = dense.x;

    let mut solution = ScatteringSolution {
        config,
        k,
        r: x[0],
        a1: x[1],
        b1: x[2],
        a2: x[3],
        b2: x[4],
        excitations: None,
        residual: 0.0,
    };
    solution.residual = boundary_residual(&solution, gamma, geometry);
    if !(solution.residual < BC_RESIDUAL) {
        return Err(Error::SingularSystem {
            condition: dense.condition,
        });
    }
    Ok(solution)
}

/// Substitutes a solution back into the five boundary conditions and returns
/// the largest violation (derivative conditions measured in units of `k`),
/// relative to the size of the terms involved. Near cavity resonances the
/// interior amplitudes grow far beyond 1 and absolute rounding grows with
/// them.
pub fn boundary_residual(solution: &ScatteringSolution, gamma: f64, geometry: &Geometry) -> f64 {
    let k = solution.k;
    let (d1, d2) = solution.config.activity();
    let x2 = geometry.x2();
    let psi = |plus: Complex64, minus: Complex64, x: f64| {
        plus * Complex64::cis(k * x) + minus * Complex64::cis(-k * x)
    };
    let dpsi = |plus: Complex64, minus: Complex64, x: f64| {
        I * (plus * Complex64::cis(k * x) - minus * Complex64::cis(-k * x))
    };
    let s = solution;

    let left0 = psi(ONE, s.r, 0.0);
    let mid0 = psi(s.a1, s.b1, 0.0);
    let mid2 = psi(s.a1, s.b1, x2);
    let right2 = psi(s.a2, s.b2, x2);
    let wall = psi(s.a2, s.b2, geometry.x3());
    let jump0 = dpsi(s.a1, s.b1, 0.0) - dpsi(ONE, s.r, 0.0) - 2.0 * gamma * d1 * left0;
    let jump2 = dpsi(s.a2, s.b2, x2) - dpsi(s.a1, s.b1, x2) - 2.0 * gamma * d2 * mid2;

    let amplitude = [s.a1, s.b1, s.a2, s.b2]
        .iter()
        .map(|z| z.norm())
        .fold(1.0, f64::max);
    let scale = (1.0 + 2.0 * gamma.abs()) * amplitude;
    [
        (left0 - mid0).norm(),
        (mid2 - right2).norm(),
        wall.norm(),
        jump0.norm(),
        jump2.norm(),
    ]
    .into_iter()
    .fold(0.0, f64::max)
        / scale
}

/// Closed-form reflection amplitude, evaluated literally:
///
/// `r = −exp{2i·arg[e^{−ikx₃₁} − 2γδ_{α₂0}(cos kx₂₁ − (i + 2γδ_{α₁0}) sin kx₂₁) sin kx₃₂ − 2γδ_{α₁0} sin kx₃₁]}`
///
/// This expression uses the opposite phase convention to the stationary
/// solver; see [`closed_form_solver_convention`].
pub fn reflection_amplitude_closed_form(
    config: SpinConfig,
    gamma: f64,
    geometry: &Geometry,
    k: f64,
) -> Result<Complex64> {
    check_wavevector(k)?;
    if !gamma.is_finite() {
        return Err(Error::invalid(
            "gamma",
            format!("must be finite, got {gamma}"),
        ));
    }
    let (d1, d2) = config.activity();
    let (kx21, kx32, kx31) = (k * geometry.x21(), k * geometry.x32(), k * geometry.x31());
    let bracket = Complex64::from(kx21.cos()) - (I + 2.0 * gamma * d1) * kx21.sin();
    let z = Complex64::cis(-kx31)
        - 2.0 * gamma * d2 * bracket * kx32.sin()
        - 2.0 * gamma * d1 * kx31.sin();
    mirrored_phase(z)
}

/// `−exp(2i·arg z)`, undefined for `z = 0`.
fn mirrored_phase(z: Complex64) -> Result<Complex64> {
    if z.norm() == 0.0 {
        return Err(Error::DegeneratePhase);
    }
    Ok(-Complex64::cis(2.0 * z.arg()))
}

/// The closed form mapped onto the stationary solver's convention (`r` is the
/// coefficient of `e^{−ikx}` left of the centers).
///
/// The two agree when the literal expression is evaluated at `−γ` and
/// complex conjugated. With all couplings off this gives the bare-mirror
/// value `−e^{2ikx₃}`.
pub fn closed_form_solver_convention(
    config: SpinConfig,
    gamma: f64,
    geometry: &Geometry,
    k: f64,
) -> Result<Complex64> {
    Ok(reflection_amplitude_closed_form(config, -gamma, geometry, k)?.conj())
}

/// Diagonal reflection operator `diag(r₀₀, r₀₁, r₁₀, r₁₁)` on the two qubits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReflectionGate {
    pub entries: [Complex64; 4],
}

impl ReflectionGate {
    pub fn new(entries: [Complex64; 4]) -> Self {
        ReflectionGate { entries }
    }

    pub fn entry(&self, config: SpinConfig) -> Complex64 {
        self.entries[config.index()]
    }

    /// `max_α |1 − |r_α||`.
    pub fn unitarity_deviation(&self) -> f64 {
        self.entries
            .iter()
            .map(|r| (1.0 - r.norm()).abs())
            .fold(0.0, f64::max)
    }

    /// Entries divided by `r₀₀`, removing the global phase.
    pub fn phase_stripped(&self) -> [Complex64; 4] {
        let reference = self.entries[0];
        self.entries.map(|r| r / reference)
    }

    /// Largest elementwise distance of the phase-stripped entries from `target`.
    pub fn stripped_distance(&self, target: [Complex64; 4]) -> f64 {
        self.phase_stripped()
            .iter()
            .zip(target)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn matrix(&self) -> Matrix4<Complex64> {
        Matrix4::from_diagonal(&nalgebra::Vector4::from(self.entries))
    }
}

/// Assembles the reflection gate from the four per-configuration solves.
pub fn reflection_gate(
    model: &CouplingModel,
    geometry: &Geometry,
    k: f64,
) -> Result<ReflectionGate> {
    let mut entries = [ZERO; 4];
    for config in SpinConfig::ALL {
        entries[config.index()] = solve_stationary_state(config, model, geometry, k)?.r;
    }
    Ok(ReflectionGate::new(entries))
}

/// Reflection and transmission amplitudes on the open (mirrorless) wire.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OpenLineResult {
    /// `(r_α, t_α)` in basis order.
    pub amplitudes: [(Complex64, Complex64); 4],
}

impl OpenLineResult {
    pub fn reflection_operator(&self) -> Matrix4<Complex64> {
        Matrix4::from_diagonal(&nalgebra::Vector4::from(self.amplitudes.map(|(r, _)| r)))
    }

    pub fn transmission_operator(&self) -> Matrix4<Complex64> {
        Matrix4::from_diagonal(&nalgebra::Vector4::from(self.amplitudes.map(|(_, t)| t)))
    }

    /// `max |R R^dag + T T^dag − 1|` over all matrix elements.
    pub fn completeness_deviation(&self) -> f64 {
        let r = self.reflection_operator();
        let t = self.transmission_operator();
        let sum = r * r.adjoint() + t * t.adjoint() - Matrix4::identity();
        sum.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Two-barrier scattering on the infinite wire: `e^{ikx} + r e^{-ikx}` on the
/// left, `t e^{ikx}` right of center 2.
pub fn open_line_scattering(
    config: SpinConfig,
    model: &CouplingModel,
    x2: f64,
    k: f64,
) -> Result<(Complex64, Complex64)> {
    if !x2.is_finite() || x2 <= 0.0 {
        return Err(Error::invalid(
            "geometry",
            format!("x2 must be > 0, got {x2}"),
        ));
    }
    let gamma = model.gamma(k)?;
    let (d1, d2) = config.activity();
    let g1 = 2.0 * gamma * d1;
    let g2 = 2.0 * gamma * d2;
    let e2 = Complex64::cis(k * x2);

    // Unknowns: r, a1, b1, t.
    let rows = vec![
        vec![ONE, -ONE, -ONE, ZERO],
        vec![I - g1, I, -I, ZERO],
        vec![ZERO, e2, e2.conj(), -e2],
        vec![ZERO, -I * e2, I * e2.conj(), (I - g2) * e2],
    ];
    let rhs = vec![-ONE, I + g1, ZERO, ZERO];
    let x = solve_dense(&rows, &rhs)?.x;
    Ok((x[0], x[3]))
}

pub fn open_line_operators(model: &CouplingModel, x2: f64, k: f64) -> Result<OpenLineResult> {
    let mut amplitudes = [(ZERO, ZERO); 4];
    for config in SpinConfig::ALL {
        amplitudes[config.index()] = open_line_scattering(config, model, x2, k)?;
    }
    Ok(OpenLineResult { amplitudes })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    fn cfg(a1: u8, a2: u8) -> SpinConfig {
        SpinConfig::new(a1, a2).unwrap()
    }

    fn regime_geometry() -> Geometry {
        Geometry::new(PI, 1.5 * PI).unwrap()
    }

    #[test]
    fn effective_potential_lists_active_centers() {
        let model = CouplingModel::massive(1.0, 2.0).unwrap();
        let g = Geometry::new(PI, 2.0 * PI).unwrap();
        assert!(effective_potential(cfg(1, 1), &model, &g, 1.0)
            .unwrap()
            .is_empty());
        assert_eq!(
            effective_potential(cfg(0, 1), &model, &g, 1.0).unwrap(),
            vec![DeltaBarrier {
                position: 0.0,
                strength: 2.0
            }]
        );
        assert_eq!(
            effective_potential(cfg(0, 0), &model, &g, 1.0).unwrap(),
            vec![
                DeltaBarrier {
                    position: 0.0,
                    strength: 2.0
                },
                DeltaBarrier {
                    position: PI,
                    strength: 2.0
                }
            ]
        );
        let photonic = CouplingModel::photonic(1.0, 1.0, 0.5).unwrap();
        assert!(matches!(
            effective_potential(cfg(0, 0), &photonic, &g, 1.0),
            Err(Error::Pole { .. })
        ));
    }

    #[test]
    fn inactive_centers_give_bare_mirror() {
        let g = regime_geometry();
        let k = 1.0;
        let bare = -Complex64::cis(2.0 * k * g.x3());
        for barrier in [0.0, 1.0, 1e3] {
            let model = CouplingModel::massive(1.0, barrier).unwrap();
            let s = solve_stationary_state(cfg(1, 1), &model, &g, k).unwrap();
            assert!((s.r - bare).norm() < 1e-12);
            assert!((s.r.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn convention_reconciliation_is_frozen() {
        // Bare mirror: literal closed form gives -e^{-2ikx3}, the solver -e^{+2ikx3}.
        let g = Geometry::new(1.3, 4.1).unwrap();
        let k = 0.7;
        let literal = reflection_amplitude_closed_form(cfg(1, 1), 0.0, &g, k).unwrap();
        assert!((literal + Complex64::cis(-2.0 * k * g.x3())).norm() < 1e-14);
        let mapped = closed_form_solver_convention(cfg(1, 1), 0.0, &g, k).unwrap();
        assert!((mapped + Complex64::cis(2.0 * k * g.x3())).norm() < 1e-14);

        // With coupling on, neither the literal value nor its conjugate match;
        // conjugation at reversed coupling sign does.
        for config in SpinConfig::ALL {
            let gamma = 2.5;
            let s = solve_stationary_state_gamma(config, gamma, &g, k).unwrap();
            let mapped = closed_form_solver_convention(config, gamma, &g, k).unwrap();
            assert!((s.r - mapped).norm() < 1e-12, "{config}");
        }
        let s = solve_stationary_state_gamma(cfg(0, 0), 2.5, &g, k).unwrap();
        let literal = reflection_amplitude_closed_form(cfg(0, 0), 2.5, &g, k).unwrap();
        assert!((s.r - literal).norm() > 1e-3);
        assert!((s.r - literal.conj()).norm() > 1e-3);
    }

    #[test]
    fn closed_form_only_first_term_when_uncoupled() {
        let g = Geometry::new(0.5, 1.5 * PI).unwrap();
        let r = reflection_amplitude_closed_form(cfg(1, 1), 7.0, &g, 1.0).unwrap();
        let expected = -Complex64::cis(2.0 * Complex64::cis(-1.5 * PI).arg());
        assert!((r - expected).norm() < 1e-15);
        assert!((r.norm() - 1.0).abs() <= 2.0 * f64::EPSILON);
    }

    #[test]
    fn degenerate_phase_is_reported() {
        assert_eq!(mirrored_phase(ZERO), Err(Error::DegeneratePhase));
        assert!((mirrored_phase(I).unwrap() - ONE).norm() < 1e-15);
    }

    #[test]
    fn residual_reports_violated_conditions() {
        let g = regime_geometry();
        let mut s = solve_stationary_state_gamma(cfg(0, 0), 3.0, &g, 1.1).unwrap();
        assert!(s.residual < 1e-12);
        s.r += Complex64::new(1e-3, 0.0);
        assert!(boundary_residual(&s, 3.0, &g) > 1e-4);
    }

    #[test]
    fn wavefunction_vanishes_at_mirror_and_is_continuous() {
        let g = Geometry::new(1.7, 3.9).unwrap();
        let s = solve_stationary_state_gamma(cfg(0, 0), 4.0, &g, 1.3).unwrap();
        assert!(wavefunction_eval(&s, &g, g.x3()).unwrap().norm() < 1e-10);
        for xc in [0.0, g.x2()] {
            let h = 1e-9;
            let left = wavefunction_eval(&s, &g, xc - h).unwrap();
            let right = wavefunction_eval(&s, &g, xc + h).unwrap();
            assert!((left - right).norm() < 1e-8);
        }
        assert!(matches!(
            wavefunction_eval(&s, &g, g.x3() + 0.1),
            Err(Error::OutOfDomain { .. })
        ));
    }

    #[test]
    fn free_region_far_left_is_incident_plus_reflected() {
        let g = regime_geometry();
        let model = CouplingModel::massive(1.0, 0.0).unwrap();
        let s = solve_stationary_state(cfg(1, 1), &model, &g, 1.0).unwrap();
        let x = -37.25;
        let expected = Complex64::cis(x) + s.r * Complex64::cis(-x);
        assert!((wavefunction_eval(&s, &g, x).unwrap() - expected).norm() < 1e-12);
    }

    #[test]
    fn derivative_jump_matches_contact_strength() {
        let g = Geometry::new(2.2, 3.0).unwrap();
        let (gamma, k) = (1.7, 0.9);
        let s = solve_stationary_state_gamma(cfg(0, 0), gamma, &g, k).unwrap();
        for xc in [0.0, g.x2()] {
            let h = 1e-10;
            let jump = s.derivative(&g, xc + h).unwrap() - s.derivative(&g, xc - h).unwrap();
            let psi = wavefunction_eval(&s, &g, xc).unwrap();
            // ΔΨ' = 2mΓΨ = 2γkΨ
            assert!((jump - 2.0 * gamma * k * psi).norm() < 1e-8);
        }
    }

    #[test]
    fn zero_coupling_gate_is_scalar() {
        let model = CouplingModel::massive(1.0, 0.0).unwrap();
        let gate = reflection_gate(&model, &Geometry::new(0.8, 2.9).unwrap(), 1.4).unwrap();
        for r in gate.entries {
            assert!((r - gate.entries[0]).norm() < 1e-12);
        }
    }

    #[test]
    fn strong_coupling_gate_is_cz() {
        let model = CouplingModel::massive_from_gamma(1e3, 1.0, 1.0).unwrap();
        let gate = reflection_gate(&model, &regime_geometry(), 1.0).unwrap();
        let cz = [ONE, ONE, ONE, -ONE];
        assert!(gate.stripped_distance(cz) < 1e-2);
        assert!(gate.unitarity_deviation() < 1e-10);
        // r11 is the bare mirror: -e^{2i·3π/2} = +1.
        assert!((gate.entries[3] - ONE).norm() < 1e-12);
    }

    #[test]
    fn open_line_free_and_single_delta() {
        let free = CouplingModel::massive(1.0, 0.0).unwrap();
        let (r, t) = open_line_scattering(cfg(1, 1), &free, 2.0, 1.0).unwrap();
        assert!(r.norm() < 1e-14);
        assert!((t - ONE).norm() < 1e-14);

        let (m, barrier, k) = (1.5, 0.8, 1.2);
        let model = CouplingModel::massive(m, barrier).unwrap();
        let gamma = m * barrier / k;
        let (r, t) = open_line_scattering(cfg(0, 1), &model, 2.0, k).unwrap();
        let denom = ONE + I * gamma;
        assert!((r - (-I * gamma) / denom).norm() < 1e-13);
        assert!((t - ONE / denom).norm() < 1e-13);
        assert!((r.norm_sqr() + t.norm_sqr() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn open_line_operators_are_complete() {
        let model = CouplingModel::massive(1.0, 2.3).unwrap();
        let result = open_line_operators(&model, 1.9, 0.85).unwrap();
        assert!(result.completeness_deviation() < 1e-12);
    }
}
