// SPDX-License-Identifier: Apache-2.0

//! Gaussian packets synthesized from exact stationary states.
//!
//! A packet `φ(x) = (πΔx²)^{-1/4} e^{−(x−x₀)²/(2Δx²)} e^{ik₀x}` with
//! `Δx = 1/Δk` has the transform
//! `φ̃(k) = (πΔk²)^{-1/4} e^{−(k−k₀)²/(2Δk²)} e^{−i(k−k₀)x₀}`. Sent towards the
//! centers, it evolves as
//!
//! `Ψ_α(x, t) = ∫ dk φ̃(k) e^{−iE(k)t} ψ_{kα}(x)/√(2π)`,
//!
//! evaluated with Gauss-Legendre nodes on `[k₀ − 5Δk, k₀ + 5Δk]`. Norms and
//! overlaps use composite Gauss-Legendre panels split at `0`, `x₂` and `x₃`,
//! so the kinks of the stationary states never fall inside a panel.

use std::f64::consts::PI;

use nalgebra::Matrix4;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coupling::CouplingModel;
use crate::error::{Error, Result};
use crate::gate::{fidelity_closed_form, process_fidelity, CzRegime, CZ_DIAGONAL};
use crate::photonic::{photonic_stationary_state, LambdaAtomParams};
use crate::quadrature::{composite, gauss_legendre, graded_rule, narrow_peaks, Rule};
use crate::scattering::{reflection_gate, solve_stationary_state, ScatteringSolution};
use crate::system::{Geometry, SpinConfig};
use crate::tolerances::{DEFAULT_K_NODES, SPECTRAL_HALF_WIDTH, STATE_NORM};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Gauss-Legendre points per spatial panel.
const PANEL_DEGREE: usize = 20;
/// Packet widths kept beyond the outermost packet center.
const SPATIAL_MARGIN: f64 = 8.0;
/// Gauss-Legendre points per panel of a resonance-graded spectral rule.
const RESONANCE_PANEL_DEGREE: usize = 20;
/// Lowest spectral node as a fraction of `k₀`.
const MIN_K_FRACTION: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianPacket {
    x0: f64,
    k0: f64,
    dk: f64,
}

/// Same as [`GaussianPacket::new`].
pub fn gaussian_packet(x0: f64, k0: f64, dk: f64) -> Result<GaussianPacket> {
    GaussianPacket::new(x0, k0, dk)
}

impl GaussianPacket {
    /// Requires `x₀ < 0`, `|x₀| ≥ 3Δx` and `k₀ ≥ 3Δk`.
    pub fn new(x0: f64, k0: f64, dk: f64) -> Result<Self> {
        if !(dk.is_finite() && dk > 0.0) {
            return Err(Error::invalid("dk", format!("must be > 0, got {dk}")));
        }
        if !(k0.is_finite() && k0 > 0.0) {
            return Err(Error::invalid("k0", format!("must be > 0, got {k0}")));
        }
        if !x0.is_finite() {
            return Err(Error::invalid("x0", format!("must be finite, got {x0}")));
        }
        let dx = 1.0 / dk;
        // Relative slack so that edge cases such as k0 = 0.3, dk = 0.1 pass.
        let edge = 3.0 * (1.0 - 1e-12);
        if !(x0 < 0.0 && x0.abs() >= edge * dx) {
            return Err(Error::Inadmissible {
                condition: format!(
                    "packet must start outside the scattering region, |x1 - x0| >= 3*dx \
                     (x0 = {x0}, dx = 1/dk = {dx}, need x0 <= {})",
                    -3.0 * dx
                ),
            });
        }
        if k0 < edge * dk {
            return Err(Error::Inadmissible {
                condition: format!(
                    "packet must be right-moving, k0 >= 3*dk (k0 = {k0}, dk = {dk})"
                ),
            });
        }
        Ok(GaussianPacket { x0, k0, dk })
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn k0(&self) -> f64 {
        self.k0
    }

    pub fn dk(&self) -> f64 {
        self.dk
    }

    pub fn dx(&self) -> f64 {
        1.0 / self.dk
    }

    /// `φ(x)`.
    pub fn amplitude(&self, x: f64) -> Complex64 {
        let dx = self.dx();
        let u = (x - self.x0) / dx;
        Complex64::cis(self.k0 * x) * ((PI * dx * dx).powf(-0.25) * (-0.5 * u * u).exp())
    }

    /// `φ̃(k)`.
    pub fn spectrum(&self, k: f64) -> Complex64 {
        let u = (k - self.k0) / self.dk;
        Complex64::cis(-(k - self.k0) * self.x0)
            * ((PI * self.dk * self.dk).powf(-0.25) * (-0.5 * u * u).exp())
    }

    /// `∫_{k≤0} |φ̃|² dk = erfc(k₀/Δk)/2`.
    pub fn negative_k_weight(&self) -> f64 {
        0.5 * libm::erfc(self.k0 / self.dk)
    }

    /// Spectral interval used by the synthesis.
    pub fn spectral_window(&self) -> (f64, f64) {
        let lo = (self.k0 - SPECTRAL_HALF_WIDTH * self.dk).max(MIN_K_FRACTION * self.k0);
        (lo, self.k0 + SPECTRAL_HALF_WIDTH * self.dk)
    }

    /// Weight of `|φ̃|²` outside [`spectral_window`](Self::spectral_window).
    pub fn truncated_weight(&self) -> f64 {
        let (lo, hi) = self.spectral_window();
        0.5 * libm::erfc((self.k0 - lo) / self.dk) + 0.5 * libm::erfc((hi - self.k0) / self.dk)
    }
}

/// Analytic `⟨ψ_{kα}|φ⟩ ≈ φ̃(k)`, the same for every configuration.
pub fn spectral_overlap(packet: &GaussianPacket, k: f64) -> Complex64 {
    packet.spectrum(k)
}

/// `∫ ψ*_{kα}(x) φ(x) dx / √(2π)` by quadrature over `x ≤ x₃`. For the
/// photonic setup the packet lives in the right-moving channel.
pub fn numerical_overlap(
    packet: &GaussianPacket,
    config: SpinConfig,
    model: &CouplingModel,
    geometry: &Geometry,
    k: f64,
) -> Result<Complex64> {
    let solution = stationary_state(config, model, geometry, k)?;
    let lo = packet.x0 - 12.0 * packet.dx();
    let panel = (2.0 * PI / (k + packet.k0)).min(packet.dx());
    let rule = composite(
        &[lo, 0.0, geometry.x2(), geometry.x3()],
        panel,
        PANEL_DEGREE,
    )?;
    let photonic = matches!(model, CouplingModel::Photonic { .. });
    let mut sum = ZERO;
    for (x, w) in rule.iter() {
        let (plus, minus) = solution.components(geometry, x)?;
        let psi = if photonic { plus } else { plus + minus };
        sum += psi.conj() * packet.amplitude(x) * w;
    }
    Ok(sum / (2.0 * PI).sqrt())
}

/// Largest `|numerical − analytic|` overlap over `k_grid` and all
/// configurations.
pub fn overlap_discrepancy(
    packet: &GaussianPacket,
    model: &CouplingModel,
    geometry: &Geometry,
    k_grid: &[f64],
) -> Result<f64> {
    if k_grid.is_empty() {
        return Err(Error::Empty("wave-vector grid"));
    }
    let mut worst: f64 = 0.0;
    for &k in k_grid {
        let analytic = spectral_overlap(packet, k);
        for config in SpinConfig::ALL {
            let numeric = numerical_overlap(packet, config, model, geometry, k)?;
            worst = worst.max((numeric - analytic).norm());
        }
    }
    Ok(worst)
}

fn stationary_state(
    config: SpinConfig,
    model: &CouplingModel,
    geometry: &Geometry,
    k: f64,
) -> Result<ScatteringSolution> {
    match *model {
        CouplingModel::Massive { .. } => solve_stationary_state(config, model, geometry, k),
        CouplingModel::Photonic {
            velocity,
            omega0,
            coupling,
        } => photonic_stationary_state(
            config,
            &LambdaAtomParams::new(velocity, omega0, coupling)?,
            geometry,
            k,
        ),
    }
}

/// Spatial sampling of an evolution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Left end of the exported grid; chosen from packet travel when `None`.
    pub x_min: Option<f64>,
    /// Uniform export spacing; the largest admissible one when `None`.
    pub spacing: Option<f64>,
    /// Gauss-Legendre nodes in `k`.
    pub k_nodes: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            x_min: None,
            spacing: None,
            k_nodes: DEFAULT_K_NODES,
        }
    }
}

/// Largest admissible export spacing `2π/(20(k₀ + 3Δk))`.
pub fn max_grid_spacing(packet: &GaussianPacket) -> f64 {
    2.0 * PI / (20.0 * (packet.k0 + 3.0 * packet.dk))
}

/// Packet width at time `t` under the model's dispersion.
fn packet_width(packet: &GaussianPacket, model: &CouplingModel, t: f64) -> f64 {
    let dx = packet.dx();
    match *model {
        CouplingModel::Massive { mass, .. } => dx * (1.0 + (t / (mass * dx * dx)).powi(2)).sqrt(),
        CouplingModel::Photonic { .. } => dx,
    }
}

/// Time at which the reflected packet center is `3Δx` left of the first
/// center: `(|x₀| + 2x₃ + 3Δx)/v_g`.
pub fn scattering_complete_time(
    packet: &GaussianPacket,
    model: &CouplingModel,
    geometry: &Geometry,
) -> f64 {
    (packet.x0.abs() + 2.0 * geometry.x3() + 3.0 * packet.dx()) / model.group_velocity(packet.k0)
}

fn auto_x_min(
    packet: &GaussianPacket,
    model: &CouplingModel,
    geometry: &Geometry,
    t_max: f64,
) -> f64 {
    let v = model.group_velocity(packet.k0);
    let returning = 2.0 * geometry.x3() - packet.x0 - v * t_max;
    packet.x0.min(returning) - SPATIAL_MARGIN * packet_width(packet, model, t_max)
}

/// Spectral rule for one branch with its stationary states.
struct Branch {
    k: Vec<f64>,
    /// `w_j φ̃(k_j)/√(2π)`.
    amplitude: Vec<Complex64>,
    energy: Vec<f64>,
    states: Vec<ScatteringSolution>,
}

/// `Σ |interior amplitudes|²`, large at cavity resonances.
fn interior_intensity(s: &ScatteringSolution) -> f64 {
    let atomic: f64 = s
        .excitations
        .map_or(0.0, |e| e.iter().map(|z| z.norm_sqr()).sum());
    s.a1.norm_sqr() + s.b1.norm_sqr() + s.a2.norm_sqr() + s.b2.norm_sqr() + atomic
}

/// Gauss-Legendre rule on the spectral window, graded around cavity
/// resonances narrower than a few background node spacings. Strong
/// couplings trap the particle between two centers (or a center and the
/// mirror) at sharp resonances that a uniform rule would step over.
fn spectral_rule(
    packet: &GaussianPacket,
    model: &CouplingModel,
    geometry: &Geometry,
    configs: &[SpinConfig],
    k_nodes: usize,
) -> Result<Rule> {
    if k_nodes < 2 {
        return Err(Error::invalid(
            "k_nodes",
            format!("need >= 2, got {k_nodes}"),
        ));
    }
    let (lo, hi) = packet.spectral_window();
    let intensity = |k: f64| -> Result<f64> {
        configs
            .iter()
            .map(|&c| stationary_state(c, model, geometry, k).map(|s| interior_intensity(&s)))
            .sum()
    };
    let spacing = (hi - lo) / k_nodes as f64;
    let peaks = narrow_peaks(intensity, lo, hi, 4 * k_nodes + 1, 10.0 * spacing, 2.0)?;
    graded_rule(lo, hi, k_nodes, &peaks, RESONANCE_PANEL_DEGREE)
}

impl Branch {
    fn new(
        packet: &GaussianPacket,
        model: &CouplingModel,
        geometry: &Geometry,
        config: SpinConfig,
        k_nodes: usize,
    ) -> Result<(Self, Rule)> {
        let rule = spectral_rule(packet, model, geometry, &[config], k_nodes)?;
        let norm = (2.0 * PI).sqrt();
        let branch = Branch {
            amplitude: rule
                .iter()
                .map(|(k, w)| packet.spectrum(k) * (w / norm))
                .collect(),
            energy: rule.nodes.iter().map(|&k| model.energy(k)).collect(),
            states: rule
                .nodes
                .iter()
                .map(|&k| stationary_state(config, model, geometry, k))
                .collect::<Result<Vec<_>>>()?,
            k: rule.nodes.clone(),
        };
        Ok((branch, rule))
    }

    fn coefficients(&self, t: f64) -> Vec<Complex64> {
        self.amplitude
            .iter()
            .zip(&self.energy)
            .map(|(a, &e)| a * Complex64::cis(-e * t))
            .collect()
    }
}

/// Stationary-state synthesis for a set of configurations.
struct Synthesis {
    geometry: Geometry,
    photonic: bool,
    branches: Vec<Branch>,
    /// Per-branch spectral rules.
    rules: Vec<Rule>,
}

impl Synthesis {
    fn new(
        packet: &GaussianPacket,
        model: &CouplingModel,
        geometry: &Geometry,
        configs: &[SpinConfig],
        k_nodes: usize,
    ) -> Result<Self> {
        let (branches, rules) = configs
            .iter()
            .map(|&c| Branch::new(packet, model, geometry, c, k_nodes))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .unzip();
        Ok(Synthesis {
            geometry: *geometry,
            photonic: matches!(model, CouplingModel::Photonic { .. }),
            branches,
            rules,
        })
    }

    /// `(Ψ₊, Ψ₋)` at every `x`, indexed `[time][config][x]`.
    fn fields(&self, xs: &[f64], times: &[f64]) -> Vec<Vec<Vec<(Complex64, Complex64)>>> {
        let mut out = vec![vec![Vec::with_capacity(xs.len()); self.branches.len()]; times.len()];
        for (ci, branch) in self.branches.iter().enumerate() {
            let coeffs: Vec<Vec<Complex64>> =
                times.iter().map(|&t| branch.coefficients(t)).collect();
            let mut phases = vec![ZERO; branch.k.len()];
            for &x in xs {
                for (p, &k) in phases.iter_mut().zip(&branch.k) {
                    *p = Complex64::cis(k * x);
                }
                for (ti, c) in coeffs.iter().enumerate() {
                    let mut plus = ZERO;
                    let mut minus = ZERO;
                    for ((s, cj), p) in branch.states.iter().zip(c).zip(&phases) {
                        let (a, b) = s.region_amplitudes(&self.geometry, x);
                        plus += cj * a * p;
                        minus += cj * b * p.conj();
                    }
                    out[ti][ci].push((plus, minus));
                }
            }
        }
        out
    }

    fn excitations(&self, config: usize, t: f64) -> [Complex64; 2] {
        let branch = &self.branches[config];
        let mut eps = [ZERO; 2];
        for (s, c) in branch.states.iter().zip(branch.coefficients(t)) {
            if let Some([e1, e2]) = s.excitations {
                eps[0] += c * e1;
                eps[1] += c * e2;
            }
        }
        eps
    }

    /// Field overlaps `⟨Ψ_β|Ψ_α⟩` at each time, indexed `[time]` with entry
    /// `(α, β)`. Atomic excitations are not included.
    fn field_overlaps(&self, rule: &Rule, times: &[f64]) -> Vec<Vec<Vec<Complex64>>> {
        let fields = self.fields(&rule.nodes, times);
        let n = self.branches.len();
        fields
            .iter()
            .map(|per_config| {
                let mut m = vec![vec![ZERO; n]; n];
                for (a, row) in m.iter_mut().enumerate() {
                    for (b, entry) in row.iter_mut().enumerate() {
                        *entry = rule
                            .weights
                            .iter()
                            .zip(per_config[a].iter().zip(&per_config[b]))
                            .map(|(&w, (&(pa, ma), &(pb, mb)))| {
                                if self.photonic {
                                    (pb.conj() * pa + mb.conj() * ma) * w
                                } else {
                                    (pb + mb).conj() * (pa + ma) * w
                                }
                            })
                            .sum();
                    }
                }
                m
            })
            .collect()
    }
}

fn validate_times(times: &[f64]) -> Result<f64> {
    if times.is_empty() {
        return Err(Error::Empty("time list"));
    }
    if let Some(t) = times.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
        return Err(Error::invalid(
            "time",
            format!("must be finite and >= 0, got {t}"),
        ));
    }
    Ok(times.iter().copied().fold(0.0, f64::max))
}

/// Quadrature rule over `[x_min, x₃]` resolving the fastest spectral node.
fn spatial_rule(packet: &GaussianPacket, geometry: &Geometry, x_min: f64) -> Result<Rule> {
    let (_, k_hi) = packet.spectral_window();
    let panel = (2.0 * PI / k_hi).min(packet.dx());
    composite(
        &[x_min, 0.0, geometry.x2(), geometry.x3()],
        panel,
        PANEL_DEGREE,
    )
}

/// One time slice of a branch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub t: f64,
    /// Right-moving part on the export grid.
    pub plus: Vec<Complex64>,
    /// Left-moving part on the export grid.
    pub minus: Vec<Complex64>,
    /// Atomic excitation amplitudes (zero for the massive model).
    pub excitations: [Complex64; 2],
    /// Total norm, including atomic excitations.
    pub norm: f64,
}

impl Snapshot {
    /// `Ψ = Ψ₊ + Ψ₋` on the export grid.
    pub fn field(&self) -> Vec<Complex64> {
        self.plus
            .iter()
            .zip(&self.minus)
            .map(|(p, m)| p + m)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PacketEvolution {
    pub config: SpinConfig,
    /// Uniform export grid ending at `x₃`.
    pub grid: Vec<f64>,
    pub snapshots: Vec<Snapshot>,
    /// Spectral nodes and weights, graded around narrow resonances.
    pub k_nodes: Vec<f64>,
    pub k_weights: Vec<f64>,
    /// `Σ w_j |φ̃(k_j)|²`.
    pub spectral_weight: f64,
    /// `max_t |Ψ(x₃, t)|`.
    pub wall_amplitude: f64,
}

impl PacketEvolution {
    /// `max_t |N(t) − N(0)|`.
    pub fn norm_drift(&self) -> f64 {
        let n0 = self.snapshots[0].norm;
        self.snapshots
            .iter()
            .map(|s| (s.norm - n0).abs())
            .fold(0.0, f64::max)
    }

    /// `max_t |N(t) − 1|`.
    pub fn norm_error(&self) -> f64 {
        self.snapshots
            .iter()
            .map(|s| (s.norm - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

fn export_grid(
    packet: &GaussianPacket,
    model: &CouplingModel,
    geometry: &Geometry,
    grid: &GridSpec,
    t_max: f64,
) -> Result<(f64, Vec<f64>)> {
    let required = max_grid_spacing(packet);
    let spacing = grid.spacing.unwrap_or(required);
    if !(spacing > 0.0) {
        return Err(Error::invalid(
            "grid spacing",
            format!("must be > 0, got {spacing}"),
        ));
    }
    if spacing > required {
        return Err(Error::GridTooCoarse { spacing, required });
    }
    let x_min = match grid.x_min {
        Some(x) if !(x < packet.x0) => {
            return Err(Error::invalid(
                "grid x_min",
                format!(
                    "must lie left of the packet center x0 = {}, got {x}",
                    packet.x0
                ),
            ))
        }
        Some(x) => x,
        None => auto_x_min(packet, model, geometry, t_max),
    };
    let x3 = geometry.x3();
    let intervals = ((x3 - x_min) / spacing).ceil() as usize;
    let h = (x3 - x_min) / intervals as f64;
    let xs = (0..=intervals)
        .map(|i| {
            if i == intervals {
                x3
            } else {
                x_min + h * i as f64
            }
        })
        .collect();
    Ok((x_min, xs))
}

/// Evolves the packet in one configuration and samples it at `times`.
pub fn evolve(
    packet: &GaussianPacket,
    config: SpinConfig,
    model: &CouplingModel,
    geometry: &Geometry,
    times: &[f64],
    grid: &GridSpec,
) -> Result<PacketEvolution> {
    let t_max = validate_times(times)?;
    let (x_min, xs) = export_grid(packet, model, geometry, grid, t_max)?;
    let mut synthesis = Synthesis::new(packet, model, geometry, &[config], grid.k_nodes)?;
    let rule = spatial_rule(packet, geometry, x_min)?;

    let overlaps = synthesis.field_overlaps(&rule, times);
    let fields = synthesis.fields(&xs, times);
    let wall = synthesis.fields(&[geometry.x3()], times);

    let snapshots = times
        .iter()
        .enumerate()
        .map(|(ti, &t)| {
            let excitations = synthesis.excitations(0, t);
            let atomic: f64 = excitations.iter().map(|e| e.norm_sqr()).sum();
            let (plus, minus) = fields[ti][0].iter().copied().unzip();
            Snapshot {
                t,
                plus,
                minus,
                excitations,
                norm: overlaps[ti][0][0].re + atomic,
            }
        })
        .collect();
    let wall_amplitude = wall
        .iter()
        .map(|per_config| {
            let (p, m) = per_config[0][0];
            (p + m).norm()
        })
        .fold(0.0, f64::max);

    let k_rule = synthesis.rules.swap_remove(0);
    let spectral_weight = k_rule.integrate(|k| packet.spectrum(k).norm_sqr());
    Ok(PacketEvolution {
        config,
        grid: xs,
        snapshots,
        k_nodes: k_rule.nodes,
        k_weights: k_rule.weights,
        spectral_weight,
        wall_amplitude,
    })
}

/// `‖Ψ_α(·, 0) − φ‖₂` over `x ≤ x₃`: how well the spectral synthesis
/// reproduces the initial packet.
pub fn reconstruction_error(
    packet: &GaussianPacket,
    config: SpinConfig,
    model: &CouplingModel,
    geometry: &Geometry,
    k_nodes: usize,
) -> Result<f64> {
    let synthesis = Synthesis::new(packet, model, geometry, &[config], k_nodes)?;
    let x_min = auto_x_min(packet, model, geometry, 0.0);
    let rule = spatial_rule(packet, geometry, x_min)?;
    let fields = synthesis.fields(&rule.nodes, &[0.0]);
    let mut sum = 0.0;
    for ((&x, &w), &(plus, minus)) in rule.nodes.iter().zip(&rule.weights).zip(&fields[0][0]) {
        let phi = packet.amplitude(x);
        sum += w * if synthesis.photonic {
            (plus - phi).norm_sqr() + minus.norm_sqr()
        } else {
            (plus + minus - phi).norm_sqr()
        };
    }
    Ok(sum.sqrt())
}

/// Reduced qubit state after letting `Σ_α c_α |α⟩ ⊗ |φ⟩` evolve for `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalState {
    pub t: f64,
    /// `ρ_αβ = c_α c_β* ⟨Ψ_β|Ψ_α⟩` from field overlaps.
    pub rho: Matrix4<Complex64>,
    /// Field branches `Ψ_α` on the export grid.
    pub grid: Vec<f64>,
    pub branches: Vec<Vec<Complex64>>,
}

impl ConditionalState {
    pub fn purity(&self) -> f64 {
        (self.rho * self.rho).trace().re
    }

    pub fn trace(&self) -> f64 {
        self.rho.trace().re
    }

    /// `max |ρ − ρ†|`.
    pub fn hermiticity_deviation(&self) -> f64 {
        (self.rho - self.rho.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let h = (self.rho + self.rho.adjoint()) * Complex64::new(0.5, 0.0);
        h.symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// `⟨χ|ρ|χ⟩` for a pure qubit state `χ`.
    pub fn overlap_with(&self, target: &[Complex64; 4]) -> f64 {
        let v = nalgebra::Vector4::from(*target);
        (v.adjoint() * self.rho * v)[(0, 0)].re
    }
}

fn check_qubit_state(state: &[Complex64; 4]) -> Result<()> {
    let norm: f64 = state.iter().map(|c| c.norm_sqr()).sum();
    if !((norm - 1.0).abs() <= STATE_NORM) {
        return Err(Error::invalid(
            "qubit state",
            format!("must be normalized, norm^2 = {norm}"),
        ));
    }
    Ok(())
}

pub fn conditional_evolution(
    packet: &GaussianPacket,
    qubit_state: &[Complex64; 4],
    model: &CouplingModel,
    geometry: &Geometry,
    t: f64,
) -> Result<ConditionalState> {
    check_qubit_state(qubit_state)?;
    let times = [t];
    validate_times(&times)?;
    let (x_min, xs) = export_grid(packet, model, geometry, &GridSpec::default(), t)?;
    let synthesis = Synthesis::new(packet, model, geometry, &SpinConfig::ALL, DEFAULT_K_NODES)?;
    let rule = spatial_rule(packet, geometry, x_min)?;
    let m = &synthesis.field_overlaps(&rule, &times)[0];
    let c = qubit_state;
    let rho = Matrix4::from_fn(|a, b| c[a] * c[b].conj() * m[a][b]);
    let fields = synthesis.fields(&xs, &times);
    let branches = fields[0]
        .iter()
        .zip(c)
        .map(|(f, ca)| f.iter().map(|(p, mi)| (p + mi) * ca).collect())
        .collect();
    Ok(ConditionalState {
        t,
        rho,
        grid: xs,
        branches,
    })
}

/// Branch-overlap fidelity against CZ at time `t`:
/// `(1/16) Σ_αβ u₀α* u₀β ⟨Ψ_β|Ψ_α⟩` with `u₀ = (1, 1, 1, −1)`.
pub fn time_domain_fidelity(
    packet: &GaussianPacket,
    model: &CouplingModel,
    geometry: &Geometry,
    t: f64,
) -> Result<f64> {
    let times = [t];
    validate_times(&times)?;
    let x_min = auto_x_min(packet, model, geometry, t);
    let synthesis = Synthesis::new(packet, model, geometry, &SpinConfig::ALL, DEFAULT_K_NODES)?;
    let rule = spatial_rule(packet, geometry, x_min)?;
    let m = &synthesis.field_overlaps(&rule, &times)[0];
    let u0 = CZ_DIAGONAL;
    let mut sum = ZERO;
    for a in 0..4 {
        for b in 0..4 {
            sum += u0[a].conj() * u0[b] * m[a][b];
        }
    }
    Ok(sum.re / 16.0)
}

/// Packet-averaged process fidelity and its spectral bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PacketFidelity {
    /// `Σ w_j |φ̃(k_j)|² F(k_j) / Σ w_j |φ̃(k_j)|²`.
    pub value: f64,
    /// `|φ̃|²` weight outside the spectral window.
    pub truncated_weight: f64,
}

/// Averages the process fidelity against CZ over `|φ̃(k)|²`. Without `gamma`
/// the large-coupling gate is used; with it, a unit-mass massive model whose
/// strength is `gamma` at `k₀`.
pub fn packet_gate_fidelity(
    packet: &GaussianPacket,
    regime: &CzRegime,
    gamma: Option<f64>,
) -> Result<PacketFidelity> {
    packet_gate_fidelity_with_nodes(packet, regime, gamma, DEFAULT_K_NODES)
}

pub fn packet_gate_fidelity_with_nodes(
    packet: &GaussianPacket,
    regime: &CzRegime,
    gamma: Option<f64>,
    k_nodes: usize,
) -> Result<PacketFidelity> {
    if (packet.k0 - regime.k0).abs() > 1e-12 * regime.k0 {
        return Err(Error::invalid(
            "packet",
            format!(
                "must be centered at the regime k0 = {}, got {}",
                regime.k0, packet.k0
            ),
        ));
    }
    let model = gamma
        .map(|g| CouplingModel::massive_from_gamma(g, regime.k0, 1.0))
        .transpose()?;
    let rule = match &model {
        Some(m) => spectral_rule(packet, m, &regime.geometry, &SpinConfig::ALL, k_nodes)?,
        None => {
            let (lo, hi) = packet.spectral_window();
            gauss_legendre(lo, hi, k_nodes)?
        }
    };
    let cz = regime.cz_gate().matrix();
    let mut weighted = 0.0;
    let mut total = 0.0;
    for (k, w) in rule.iter() {
        let p = w * packet.spectrum(k).norm_sqr();
        let f = match &model {
            Some(m) => process_fidelity(&reflection_gate(m, &regime.geometry, k)?.matrix(), &cz)?,
            None => fidelity_closed_form(k, &regime.geometry),
        };
        weighted += p * f;
        total += p;
    }
    Ok(PacketFidelity {
        value: weighted / total,
        truncated_weight: packet.truncated_weight(),
    })
}
