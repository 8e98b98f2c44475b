// SPDX-License-Identifier: Apache-2.0

//! CZ geometries, the large-coupling gate, Pauli process matrices and
//! process fidelity.
//!
//! Pauli product basis: `A_m = σ_a ⊗ σ_b` with `m = 4a + b` and
//! `σ = (1, X, Y, Z)`; qubit 1 is the left factor. Operators are expanded as
//! `U = Σ_m c_m A_m` with `c_m = Tr(A_m† U)/4` and `χ_mn = c_m c_n*`.

use std::f64::consts::PI;

use nalgebra::{Matrix2, Matrix4, SMatrix};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coupling::CouplingModel;
use crate::error::{Error, Result};
use crate::scattering::{reflection_gate, ReflectionGate};
use crate::system::Geometry;
use crate::tolerances::{FIDELITY_ROUTES, UNITARITY_INPUT};

const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Phase-stripped CZ entries `(1, 1, 1, −1)`.
pub const CZ_DIAGONAL: [Complex64; 4] = [ONE, ONE, ONE, Complex64 { re: -1.0, im: 0.0 }];

/// Geometry with `k₀x₂₁ = nπ` and `k₀x₃₂ = (n′ + ½)π`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CzRegime {
    pub n: u32,
    pub n_prime: u32,
    pub k0: f64,
    pub geometry: Geometry,
}

pub fn cz_regime(n: u32, n_prime: u32, k0: f64) -> Result<CzRegime> {
    if n == 0 {
        return Err(Error::invalid("regime", "n must be >= 1 so that x2 > x1"));
    }
    if !k0.is_finite() || k0 <= 0.0 {
        return Err(Error::invalid("k0", format!("must be > 0, got {k0}")));
    }
    let x2 = n as f64 * PI / k0;
    let x3 = x2 + (n_prime as f64 + 0.5) * PI / k0;
    Ok(CzRegime {
        n,
        n_prime,
        k0,
        geometry: Geometry::new(x2, x3)?,
    })
}

/// Finds `(n, n′, k₀)` reproducing `geometry`, if one exists with
/// `n ≤ max_n`. Used to flag closed-form fidelities on non-regime layouts.
pub fn match_regime(geometry: &Geometry, max_n: u32) -> Option<CzRegime> {
    let ratio = geometry.x32() / geometry.x21();
    (1..=max_n).find_map(|n| {
        let n_prime = ratio * n as f64 - 0.5;
        let rounded = n_prime.round();
        if rounded < 0.0 || (n_prime - rounded).abs() > 1e-9 * (1.0 + n_prime.abs()) {
            return None;
        }
        let k0 = n as f64 * PI / geometry.x21();
        cz_regime(n, rounded as u32, k0).ok()
    })
}

impl CzRegime {
    /// Ideal gate at `k₀`.
    pub fn cz_gate(&self) -> ReflectionGate {
        ReflectionGate::new(CZ_DIAGONAL)
    }
}

/// The `γ → ∞` gate at arbitrary `k`: `diag(1, 1, e^{2ikx₂}, e^{2ikx₃})`.
pub fn ideal_gate_limit(k: f64, geometry: &Geometry) -> Result<ReflectionGate> {
    if !k.is_finite() || k < 0.0 {
        return Err(Error::invalid(
            "wave vector",
            format!("must be >= 0, got {k}"),
        ));
    }
    Ok(ReflectionGate::new([
        ONE,
        ONE,
        Complex64::cis(2.0 * k * geometry.x2()),
        Complex64::cis(2.0 * k * geometry.x3()),
    ]))
}

pub type Matrix16 = SMatrix<Complex64, 16, 16>;

/// Process matrix `χ` in the Pauli product basis.
#[derive(Debug, Clone, PartialEq)]
pub struct ProcessMatrix {
    pub chi: Matrix16,
}

impl ProcessMatrix {
    pub fn trace(&self) -> Complex64 {
        self.chi.trace()
    }

    /// `max |χ − χ†|`.
    pub fn hermiticity_deviation(&self) -> f64 {
        (self.chi - self.chi.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let hermitian = (self.chi + self.chi.adjoint()) * Complex64::new(0.5, 0.0);
        let mut values: Vec<f64> = hermitian.symmetric_eigenvalues().iter().copied().collect();
        values.sort_by(f64::total_cmp);
        values
    }

    /// `Tr(χ_a χ_b)`.
    pub fn overlap(&self, other: &ProcessMatrix) -> f64 {
        (self.chi * other.chi).trace().re
    }
}

fn pauli(index: usize) -> Matrix2<Complex64> {
    let i = Complex64::new(0.0, 1.0);
    match index {
        0 => Matrix2::new(ONE, ZERO, ZERO, ONE),
        1 => Matrix2::new(ZERO, ONE, ONE, ZERO),
        2 => Matrix2::new(ZERO, -i, i, ZERO),
        3 => Matrix2::new(ONE, ZERO, ZERO, -ONE),
        _ => unreachable!("Pauli index out of range"),
    }
}

/// `σ_a ⊗ σ_b` for `m = 4a + b`.
pub fn pauli_product(m: usize) -> Matrix4<Complex64> {
    assert!(m < 16, "Pauli product index out of range");
    let (a, b) = (pauli(m / 4), pauli(m % 4));
    Matrix4::from_fn(|r, c| a[(r / 2, c / 2)] * b[(r % 2, c % 2)])
}

/// `max |U†U − 1|`.
pub fn unitarity_deviation(u: &Matrix4<Complex64>) -> f64 {
    (u.adjoint() * u - Matrix4::identity())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

/// Expansion coefficients `c_m = Tr(A_m† U)/4`.
pub fn pauli_coefficients(u: &Matrix4<Complex64>) -> [Complex64; 16] {
    std::array::from_fn(|m| (pauli_product(m).adjoint() * u).trace() / 4.0)
}

pub fn pauli_chi(gate: &Matrix4<Complex64>) -> Result<ProcessMatrix> {
    let deviation = unitarity_deviation(gate);
    if !(deviation <= UNITARITY_INPUT) {
        return Err(Error::NotUnitary { deviation });
    }
    let c = pauli_coefficients(gate);
    Ok(ProcessMatrix {
        chi: Matrix16::from_fn(|m, n| c[m] * c[n].conj()),
    })
}

/// `Tr(χ_ref χ_gate)`, checked against `|Tr(ref† gate)|²/16`.
pub fn process_fidelity(gate: &Matrix4<Complex64>, reference: &Matrix4<Complex64>) -> Result<f64> {
    let chi = pauli_chi(reference)?.overlap(&pauli_chi(gate)?);
    let trace = (reference.adjoint() * gate).trace().norm_sqr() / 16.0;
    if !((chi - trace).abs() <= FIDELITY_ROUTES) {
        return Err(Error::RouteMismatch { chi, trace });
    }
    Ok(chi)
}

/// `[3 + 2cos(2kx₂) − cos(2kx₃₂) − 2cos(2kx₃)]/8`: the large-coupling gate
/// at `k` against CZ. Meaningful for regime geometries, see [`match_regime`].
pub fn fidelity_closed_form(k: f64, geometry: &Geometry) -> f64 {
    let c = |x: f64| (2.0 * k * x).cos();
    (3.0 + 2.0 * c(geometry.x2()) - c(geometry.x32()) - 2.0 * c(geometry.x3())) / 8.0
}

/// One sweep sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FidelityPoint {
    pub k_over_k0: f64,
    /// Closed-form fidelity of the large-coupling gate.
    pub closed: f64,
    /// Same gate through the process matrix.
    pub chi: f64,
    /// Gate from the boundary-value solver at finite coupling.
    pub finite_gamma: Option<f64>,
}

impl FidelityPoint {
    /// The fidelity the curve reports: finite-coupling when available.
    pub fn fidelity(&self) -> f64 {
        self.finite_gamma.unwrap_or(self.closed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelityCurve {
    pub regime: CzRegime,
    pub gamma: Option<f64>,
    pub points: Vec<FidelityPoint>,
}

impl FidelityCurve {
    pub fn samples(&self) -> usize {
        self.points.len()
    }

    /// Largest `|F_closed − F_chi|` over the curve.
    pub fn route_discrepancy(&self) -> f64 {
        self.points
            .iter()
            .map(|p| (p.closed - p.chi).abs())
            .fold(0.0, f64::max)
    }

    /// Widest `w` such that every sample with `|k/k₀ − 1| ≤ w` has
    /// `F ≥ threshold`. `None` if the sample nearest `k₀` already fails.
    pub fn window_half_width(&self, threshold: f64) -> Option<f64> {
        let mut by_distance: Vec<(f64, f64)> = self
            .points
            .iter()
            .map(|p| ((p.k_over_k0 - 1.0).abs(), p.fidelity()))
            .collect();
        by_distance.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut width = None;
        for (d, f) in by_distance {
            if f < threshold {
                break;
            }
            width = Some(d);
        }
        width
    }

    /// True if `F` does not increase moving away from `k₀` on either side,
    /// within `|k/k₀ − 1| ≤ half_width`.
    pub fn monotone_decay_within(&self, half_width: f64) -> bool {
        let mut inside: Vec<&FidelityPoint> = self
            .points
            .iter()
            .filter(|p| (p.k_over_k0 - 1.0).abs() <= half_width)
            .collect();
        inside.sort_by(|a, b| a.k_over_k0.total_cmp(&b.k_over_k0));
        let slack = 1e-12;
        inside.windows(2).all(|w| {
            let (a, b) = (w[0], w[1]);
            if b.k_over_k0 <= 1.0 {
                b.fidelity() + slack >= a.fidelity()
            } else if a.k_over_k0 >= 1.0 {
                a.fidelity() + slack >= b.fidelity()
            } else {
                true
            }
        })
    }
}

/// Samples `F` over `k/k₀ ∈ [lo, hi]`. With `gamma`, a massive model of unit
/// mass whose strength is `gamma` at `k₀` supplies the finite-coupling gate.
pub fn fidelity_sweep(
    regime: &CzRegime,
    range: (f64, f64),
    samples: usize,
    gamma: Option<f64>,
) -> Result<FidelityCurve> {
    let (lo, hi) = range;
    if !lo.is_finite() || !hi.is_finite() || lo < 0.0 || hi < lo {
        return Err(Error::invalid(
            "sweep range",
            format!("need 0 <= lo <= hi, got [{lo}, {hi}]"),
        ));
    }
    if samples < 2 && !(samples == 1 && lo == hi) {
        return Err(Error::invalid(
            "samples",
            format!("need >= 2 (or 1 for a collapsed range), got {samples}"),
        ));
    }
    let model = match gamma {
        Some(g) => {
            if lo <= 0.0 {
                return Err(Error::invalid(
                    "sweep range",
                    "finite-coupling sweeps need lo > 0",
                ));
            }
            Some(CouplingModel::massive_from_gamma(g, regime.k0, 1.0)?)
        }
        None => None,
    };
    let cz = regime.cz_gate().matrix();
    let geometry = &regime.geometry;

    let mut points = Vec::with_capacity(samples);
    for i in 0..samples {
        let x = if samples == 1 {
            lo
        } else {
            lo + (hi - lo) * i as f64 / (samples - 1) as f64
        };
        let k = x * regime.k0;
        let ideal = ideal_gate_limit(k, geometry)?;
        let finite_gamma = match &model {
            Some(m) => Some(process_fidelity(
                &reflection_gate(m, geometry, k)?.matrix(),
                &cz,
            )?),
            None => None,
        };
        points.push(FidelityPoint {
            k_over_k0: x,
            closed: fidelity_closed_form(k, geometry),
            chi: process_fidelity(&ideal.matrix(), &cz)?,
            finite_gamma,
        });
    }
    Ok(FidelityCurve {
        regime: *regime,
        gamma,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn default_regime() -> CzRegime {
        cz_regime(1, 0, 1.0).unwrap()
    }

    #[test]
    fn regime_geometry() {
        let r = default_regime();
        assert_eq!(r.geometry.x2(), PI);
        assert!((r.geometry.x3() - 1.5 * PI).abs() < 1e-15);
        let r = cz_regime(2, 1, 1.0).unwrap();
        assert!((r.geometry.x3() - 3.5 * PI).abs() < 1e-14);
        assert!(cz_regime(0, 0, 1.0).is_err());
        assert!(cz_regime(1, 0, 0.0).is_err());
    }

    #[test]
    fn regime_matching() {
        let r = cz_regime(3, 2, 0.7).unwrap();
        let m = match_regime(&r.geometry, 16).unwrap();
        assert!((m.k0 - 0.7).abs() < 1e-12);
        assert_eq!((m.n, m.n_prime), (3, 2));
        assert!(match_regime(&Geometry::new(1.0, 2.0).unwrap(), 16).is_none());
    }

    #[test]
    fn ideal_gate_limits() {
        let r = default_regime();
        let g = ideal_gate_limit(1.0, &r.geometry).unwrap();
        for (a, b) in g.entries.iter().zip(CZ_DIAGONAL) {
            assert!((a - b).norm() < 1e-14);
        }
        let g = ideal_gate_limit(0.0, &r.geometry).unwrap();
        assert!(g.entries.iter().all(|e| (e - ONE).norm() == 0.0));
    }

    #[test]
    fn pauli_products_are_orthogonal() {
        for m in 0..16 {
            for n in 0..16 {
                let t = (pauli_product(m).adjoint() * pauli_product(n)).trace();
                let expected = if m == n { 4.0 } else { 0.0 };
                assert!((t - Complex64::new(expected, 0.0)).norm() < 1e-15);
            }
        }
        // σ_X ⊗ σ_Z: qubit 1 is the left factor.
        let xz = pauli_product(4 + 3);
        assert_eq!(xz[(0, 2)], ONE);
        assert_eq!(xz[(1, 3)], -ONE);
    }

    #[test]
    fn chi_of_identity_and_cz() {
        let chi = pauli_chi(&Matrix4::identity()).unwrap();
        for (idx, z) in chi.chi.iter().enumerate() {
            let expected = if idx == 0 { 1.0 } else { 0.0 };
            assert!((z - Complex64::new(expected, 0.0)).norm() < 1e-15);
        }
        let c = pauli_coefficients(&default_regime().cz_gate().matrix());
        for (m, v) in [(0, 0.5), (3, 0.5), (12, 0.5), (15, -0.5)] {
            assert!((c[m] - Complex64::new(v, 0.0)).norm() < 1e-15);
        }
        let chi = pauli_chi(&default_regime().cz_gate().matrix()).unwrap();
        assert!((chi.trace() - ONE).norm() < 1e-14);
        assert!(chi.hermiticity_deviation() < 1e-15);
        let eig = chi.eigenvalues();
        assert!((eig[15] - 1.0).abs() < 1e-12);
        assert!(eig[..15].iter().all(|e| e.abs() < 1e-12));
    }

    #[test]
    fn chi_rejects_non_unitary() {
        let m = Matrix4::identity() * Complex64::new(1.1, 0.0);
        assert!(matches!(pauli_chi(&m), Err(Error::NotUnitary { .. })));
    }

    #[test]
    fn fidelity_examples() {
        let cz = default_regime().cz_gate().matrix();
        assert!((process_fidelity(&Matrix4::identity(), &cz).unwrap() - 0.25).abs() < 1e-15);
        assert!((process_fidelity(&cz, &cz).unwrap() - 1.0).abs() < 1e-14);

        let g = default_regime().geometry;
        assert!((fidelity_closed_form(1.0, &g) - 1.0).abs() < 1e-15);
        assert!((fidelity_closed_form(0.0, &g) - 0.25).abs() < 1e-15);
        assert!((fidelity_closed_form(1.05, &g) - 0.958976802695).abs() < 1e-11);
        assert!((fidelity_closed_form(0.95, &g) - 0.958976802695).abs() < 1e-11);
    }

    #[test]
    fn closed_form_matches_chi_route() {
        let r = cz_regime(2, 3, 1.7).unwrap();
        let cz = r.cz_gate().matrix();
        for i in 0..50 {
            let k = 0.02 + 0.07 * i as f64;
            let chi =
                process_fidelity(&ideal_gate_limit(k, &r.geometry).unwrap().matrix(), &cz).unwrap();
            assert!((chi - fidelity_closed_form(k, &r.geometry)).abs() < 1e-12);
        }
    }

    #[test]
    fn sweep_window_and_monotonicity() {
        let curve = fidelity_sweep(&default_regime(), (0.8, 1.2), 401, None).unwrap();
        let w = curve.window_half_width(0.95).unwrap();
        assert!((w - 0.055).abs() < 1e-9, "{w}");
        assert!(curve.monotone_decay_within(w));
        assert!(curve.route_discrepancy() < 1e-12);
        assert!(curve.points.iter().all(|p| (0.0..=1.0).contains(&p.closed)));
    }

    #[test]
    fn sweep_sample_rules() {
        let r = default_regime();
        let single = fidelity_sweep(&r, (1.0, 1.0), 1, None).unwrap();
        assert_eq!(single.samples(), 1);
        assert!((single.points[0].fidelity() - 1.0).abs() < 1e-15);
        assert!(fidelity_sweep(&r, (0.9, 1.1), 1, None).is_err());
        assert!(fidelity_sweep(&r, (1.1, 0.9), 10, None).is_err());
        assert!(fidelity_sweep(&r, (0.0, 1.1), 10, Some(10.0)).is_err());
    }

    #[test]
    fn finite_coupling_converges_to_ideal() {
        let curve = fidelity_sweep(&default_regime(), (1.0, 1.0), 1, Some(1e3)).unwrap();
        let p = curve.points[0];
        assert!((p.finite_gamma.unwrap() - p.closed).abs() < 1e-4);

        let r = default_regime();
        let model = CouplingModel::massive_from_gamma(1e4, 1.0, 1.0).unwrap();
        let finite = reflection_gate(&model, &r.geometry, 1.0).unwrap();
        assert!(finite.stripped_distance(CZ_DIAGONAL) < 1e-3);
    }
}
