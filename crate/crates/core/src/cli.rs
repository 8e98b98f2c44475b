// SPDX-License-Identifier: Apache-2.0

//! Command-line front end.
//!
//! Every command reads an optional JSON config, validates all of it, computes
//! a [`SweepTable`] and only then writes it (to `--out` or stdout). Summary
//! lines go to stderr. Exit codes: 0 success, 1 I/O failure, 2 invalid
//! config, 3 numerical failure, 4 a computed check missed its threshold.

use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Deserialize;

use crate::coupling::CouplingModel;
use crate::error::Error;
use crate::gate::{cz_regime, fidelity_sweep, match_regime, CzRegime};
use crate::photonic::{verify_equivalence, LambdaAtomParams};
use crate::scattering::{reflection_gate, solve_stationary_state};
use crate::system::{Geometry, SpinConfig};
use crate::table::SweepTable;
use crate::timing::{gate_duration, working_condition, MaterialPreset, DIAMOND, GAAS};
use crate::tolerances::{DEFAULT_FIDELITY_THRESHOLD, DEFAULT_GAMMA, NORM_DRIFT};
use crate::wavepacket::{
    evolve, packet_gate_fidelity, scattering_complete_time, time_domain_fidelity, GaussianPacket,
    GridSpec,
};

pub const EXIT_IO: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_THRESHOLD: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "czscatter",
    version,
    about = "Scattering-mediated CZ gate simulator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON config file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Overrides the sample count of sweeps and snapshot lists.
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Dimensionless coupling at k0 for a unit-mass massive model.
    #[arg(long, global = true)]
    pub gamma: Option<f64>,
    /// CZ regime as `n,n'`.
    #[arg(long, global = true, value_parser = parse_regime)]
    pub regime: Option<(u32, u32)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Stationary reflection amplitudes for all four configurations.
    Solve,
    /// Reflection gate with phase-stripped phases.
    Gate,
    /// Process fidelity against CZ over k/k0.
    FidelitySweep,
    /// Packet evolution snapshots and packet-averaged fidelity.
    Wavepacket,
    /// Gate duration estimate for a packet.
    Duration,
    /// Decoherence-time bound in seconds.
    WorkingCondition,
    /// Photonic versus massive reflection amplitudes.
    Equivalence,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

fn parse_regime(s: &str) -> std::result::Result<(u32, u32), String> {
    let (n, np) = s
        .split_once(',')
        .ok_or_else(|| format!("expected n,n' but got {s:?}"))?;
    let parse = |v: &str| v.trim().parse::<u32>().map_err(|e| format!("{v:?}: {e}"));
    Ok((parse(n)?, parse(np)?))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = if e.is_numerical() || matches!(e, Error::NotUnitary { .. }) {
            EXIT_NUMERICAL
        } else {
            EXIT_INVALID
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

fn invalid(message: impl Into<String>) -> CliError {
    CliError {
        code: EXIT_INVALID,
        message: message.into(),
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
pub enum Units {
    #[default]
    #[serde(rename = "k0_units")]
    K0Units,
    #[serde(rename = "SI")]
    Si,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegimeSpec {
    pub n: u32,
    #[serde(default)]
    pub n_prime: u32,
    #[serde(default = "one")]
    pub k0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangeSpec {
    pub lo: f64,
    pub hi: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PacketSpec {
    pub x0: f64,
    pub k0: f64,
    pub dk: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomSpec {
    pub velocity: f64,
    pub omega0: f64,
    pub coupling: f64,
}

const DEFAULT_SWEEP: RangeSpec = RangeSpec {
    lo: 0.8,
    hi: 1.2,
    samples: 401,
};

fn one() -> f64 {
    1.0
}

/// Parameters shared by all commands; each command reads what it needs.
#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub units: Units,
    /// Copied into the metadata when present; never generated.
    pub timestamp: Option<String>,
    pub regime: Option<RegimeSpec>,
    pub geometry: Option<Geometry>,
    pub model: Option<CouplingModel>,
    pub gamma: Option<f64>,
    pub k: Option<f64>,
    pub sweep: Option<RangeSpec>,
    pub packet: Option<PacketSpec>,
    /// Evolution times; evenly spaced up to scattering completion if absent.
    pub times: Option<Vec<f64>>,
    pub snapshots: Option<usize>,
    pub k_nodes: Option<usize>,
    pub threshold: Option<f64>,
    pub atoms: Option<AtomSpec>,
    pub k_grid: Option<RangeSpec>,
    pub preset: Option<String>,
    /// m/s.
    pub velocity: Option<f64>,
    /// m.
    pub wavelength: Option<f64>,
}

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError {
            code: EXIT_IO,
            message: format!("cannot read config {}: {e}", path.display()),
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| invalid(format!("invalid config: {e}")))
    }

    fn apply_flags(&mut self, cli: &Cli) {
        if let Some((n, n_prime)) = cli.regime {
            let k0 = self.regime.map_or(1.0, |r| r.k0);
            self.regime = Some(RegimeSpec { n, n_prime, k0 });
        }
        if let Some(g) = cli.gamma {
            self.gamma = Some(g);
        }
        if let Some(s) = cli.samples {
            let sweep = self.sweep.get_or_insert(DEFAULT_SWEEP);
            sweep.samples = s;
            if let Some(g) = &mut self.k_grid {
                g.samples = s;
            }
            self.snapshots = Some(s);
        }
    }

    fn regime(&self) -> CliResult<CzRegime> {
        let r = self.regime.unwrap_or(RegimeSpec {
            n: 1,
            n_prime: 0,
            k0: 1.0,
        });
        Ok(cz_regime(r.n, r.n_prime, r.k0)?)
    }

    /// Explicit geometry, or the regime's.
    fn geometry(&self) -> CliResult<Geometry> {
        match (self.geometry, self.regime) {
            (Some(_), Some(_)) => Err(invalid("give either geometry or regime, not both")),
            (Some(g), None) => Ok(g),
            (None, _) => Ok(self.regime()?.geometry),
        }
    }

    fn k0(&self) -> f64 {
        self.regime.map_or(1.0, |r| r.k0)
    }

    /// Explicit model, or a unit-mass massive model with strength `gamma` at `k₀`.
    fn model(&self) -> CliResult<CouplingModel> {
        match (self.model, self.gamma) {
            (Some(_), Some(_)) => Err(invalid("give either model or gamma, not both")),
            (Some(m), None) => Ok(validate_model(m)?),
            (None, g) => Ok(CouplingModel::massive_from_gamma(
                g.unwrap_or(DEFAULT_GAMMA),
                self.k0(),
                1.0,
            )?),
        }
    }

    fn threshold(&self) -> CliResult<f64> {
        let t = self.threshold.unwrap_or(DEFAULT_FIDELITY_THRESHOLD);
        if !(0.0..=1.0).contains(&t) {
            return Err(invalid(format!(
                "invalid threshold: must lie in [0, 1], got {t}"
            )));
        }
        Ok(t)
    }

    fn packet(&self) -> CliResult<GaussianPacket> {
        let p = self.packet.unwrap_or(PacketSpec {
            x0: -120.0,
            k0: self.k0(),
            dk: 0.05 * self.k0(),
        });
        Ok(GaussianPacket::new(p.x0, p.k0, p.dk)?)
    }

    fn require_k0_units(&self, command: &str) -> CliResult<()> {
        if self.units == Units::Si {
            return Err(invalid(format!(
                "invalid units: {command} works in k0 units; SI is only used by working-condition"
            )));
        }
        Ok(())
    }
}

fn validate_model(m: CouplingModel) -> crate::Result<CouplingModel> {
    match m {
        CouplingModel::Massive { mass, barrier } => CouplingModel::massive(mass, barrier),
        CouplingModel::Photonic {
            velocity,
            omega0,
            coupling,
        } => CouplingModel::photonic(velocity, omega0, coupling),
    }
}

fn model_meta(table: &mut SweepTable, model: &CouplingModel) {
    table.set_meta(
        "model",
        serde_json::to_string(model).expect("model serializes"),
    );
}

/// A command's output: a table plus summary lines and an optional failed check.
#[derive(Debug)]
pub struct Outcome {
    pub table: SweepTable,
    pub summary: Vec<String>,
    pub failed_check: Option<String>,
    /// Extra files written next to `--out`, keyed by file-name suffix.
    pub parts: Vec<(String, Part)>,
}

#[derive(Debug)]
pub enum Part {
    /// Rendered in the run's `--format`.
    Table(SweepTable),
    Json(serde_json::Value),
}

fn base_table<S: Into<String>>(
    command: &str,
    config: &RunConfig,
    columns: impl IntoIterator<Item = S>,
) -> SweepTable {
    let mut t = SweepTable::new(columns)
        .with_meta("command", command)
        .with_meta("tool_version", env!("CARGO_PKG_VERSION"));
    let units = match config.units {
        Units::K0Units => "k0_units (hbar = 1, lengths in 1/k0)",
        Units::Si => "SI",
    };
    t.set_meta("units", units);
    if let Some(ts) = &config.timestamp {
        t.set_meta("timestamp", ts);
    }
    t
}

fn geometry_meta(table: &mut SweepTable, geometry: &Geometry) {
    table.set_meta("x2", geometry.x2());
    table.set_meta("x3", geometry.x3());
    if let Some(r) = match_regime(geometry, 64) {
        table.set_meta(
            "regime",
            format!("n={}, n'={}, k0={}", r.n, r.n_prime, r.k0),
        );
    } else {
        table.set_meta(
            "regime",
            "none (geometry does not satisfy the CZ conditions)",
        );
    }
}

pub fn cmd_solve(config: &RunConfig) -> CliResult<Outcome> {
    config.require_k0_units("solve")?;
    let geometry = config.geometry()?;
    let model = config.model()?;
    let k = config.k.unwrap_or(config.k0());
    let mut table = base_table(
        "solve",
        config,
        [
            "alpha1",
            "alpha2",
            "re_r",
            "im_r",
            "abs_r",
            "arg_r_rad",
            "arg_r_deg",
            "stripped_rad",
            "stripped_deg",
            "residual",
        ],
    );
    geometry_meta(&mut table, &geometry);
    model_meta(&mut table, &model);
    table.set_meta("k", k);
    let solutions = SpinConfig::ALL
        .iter()
        .map(|&c| solve_stationary_state(c, &model, &geometry, k))
        .collect::<crate::Result<Vec<_>>>()?;
    let r00 = solutions[0].r;
    let mut summary = Vec::new();
    for (c, s) in SpinConfig::ALL.iter().zip(&solutions) {
        let stripped = stripped_phase(s.r / r00);
        table.push_row(vec![
            c.alpha1() as f64,
            c.alpha2() as f64,
            s.r.re,
            s.r.im,
            s.r.norm(),
            s.r.arg(),
            s.r.arg().to_degrees(),
            stripped,
            stripped.to_degrees(),
            s.residual,
        ])?;
        summary.push(format!(
            "{c}: |r| = {:.12}, arg r = {:.6} rad ({:.4} deg), residual = {:e}",
            s.r.norm(),
            s.r.arg(),
            s.r.arg().to_degrees(),
            s.residual
        ));
    }
    Ok(Outcome {
        table,
        summary,
        failed_check: None,
        parts: Vec::new(),
    })
}

/// Phase-stripped phases wrapped to `[0, 2π)`.
fn stripped_phase(z: Complex64) -> f64 {
    let a = z.arg();
    if a < -1e-12 {
        a + 2.0 * PI
    } else {
        a.max(0.0)
    }
}

pub fn cmd_gate(config: &RunConfig) -> CliResult<Outcome> {
    config.require_k0_units("gate")?;
    let geometry = config.geometry()?;
    let model = config.model()?;
    let k = config.k.unwrap_or(config.k0());
    let gate = reflection_gate(&model, &geometry, k)?;
    let mut table = base_table(
        "gate",
        config,
        ["alpha1", "alpha2", "re_r", "im_r", "stripped_phase"],
    );
    geometry_meta(&mut table, &geometry);
    model_meta(&mut table, &model);
    table.set_meta("k", k);
    table.set_meta("unitarity_deviation", gate.unitarity_deviation());
    let stripped = gate.phase_stripped();
    for c in SpinConfig::ALL {
        let r = gate.entry(c);
        table.push_row(vec![
            c.alpha1() as f64,
            c.alpha2() as f64,
            r.re,
            r.im,
            stripped_phase(stripped[c.index()]),
        ])?;
    }
    let summary = vec![format!(
        "stripped phases / pi: {}",
        stripped
            .iter()
            .map(|z| format!("{:.6}", stripped_phase(*z) / PI))
            .collect::<Vec<_>>()
            .join(", ")
    )];
    Ok(Outcome {
        table,
        summary,
        failed_check: None,
        parts: Vec::new(),
    })
}

pub fn cmd_fidelity_sweep(config: &RunConfig) -> CliResult<Outcome> {
    config.require_k0_units("fidelity-sweep")?;
    if config.geometry.is_some() || config.model.is_some() {
        return Err(invalid(
            "fidelity-sweep takes a regime and optional gamma, not geometry/model",
        ));
    }
    let regime = config.regime()?;
    let range = config.sweep.unwrap_or(DEFAULT_SWEEP);
    let threshold = config.threshold()?;
    let curve = fidelity_sweep(&regime, (range.lo, range.hi), range.samples, config.gamma)?;
    let mut columns = vec!["k_over_k0", "F_closed", "F_chi"];
    if config.gamma.is_some() {
        columns.push("F_finite_gamma");
    }
    let mut table = base_table("fidelity-sweep", config, columns);
    geometry_meta(&mut table, &regime.geometry);
    table.set_meta(
        "gamma",
        config
            .gamma
            .map_or("none (large-coupling limit)".to_string(), |g| g.to_string()),
    );
    table.set_meta("samples", curve.samples());
    let discrepancy = curve.route_discrepancy();
    table.set_meta("max_abs_F_closed_minus_F_chi", discrepancy);
    for p in &curve.points {
        let mut row = vec![p.k_over_k0, p.closed, p.chi];
        if let Some(f) = p.finite_gamma {
            row.push(f);
        }
        table.push_row(row)?;
    }
    let window = curve.window_half_width(threshold);
    let window_text = window.map_or("none".to_string(), |w| w.to_string());
    table.set_meta("window_threshold", threshold);
    table.set_meta("window_half_width", &window_text);
    let mut summary = vec![format!(
        "widest symmetric window with F >= {threshold}: |k/k0 - 1| <= {window_text}"
    )];
    summary.push(format!("max |F_closed - F_chi| = {discrepancy:e}"));
    if let Some(w) = window {
        summary.push(format!(
            "monotone decay within window: {}",
            curve.monotone_decay_within(w)
        ));
    }
    Ok(Outcome {
        table,
        summary,
        failed_check: None,
        parts: Vec::new(),
    })
}

pub fn cmd_wavepacket(config: &RunConfig) -> CliResult<Outcome> {
    config.require_k0_units("wavepacket")?;
    let regime = config.regime()?;
    let geometry = config.geometry()?;
    let model = config.model()?;
    let packet = config.packet()?;
    let threshold = config.threshold()?;
    let t_end = scattering_complete_time(&packet, &model, &geometry);
    let times = match &config.times {
        Some(t) => t.clone(),
        None => {
            let n = config.snapshots.unwrap_or(5);
            if n < 2 {
                return Err(invalid(format!("invalid snapshots: need >= 2, got {n}")));
            }
            (0..n).map(|i| t_end * i as f64 / (n - 1) as f64).collect()
        }
    };
    let grid = GridSpec {
        k_nodes: config.k_nodes.unwrap_or(GridSpec::default().k_nodes),
        ..GridSpec::default()
    };
    let branches = SpinConfig::ALL
        .iter()
        .map(|&c| evolve(&packet, c, &model, &geometry, &times, &grid))
        .collect::<crate::Result<Vec<_>>>()?;

    let gamma_k0 = match model {
        CouplingModel::Massive { .. } => Some(model.gamma(packet.k0())?),
        CouplingModel::Photonic { .. } => None,
    };
    let packet_f =
        if (packet.k0() - regime.k0).abs() <= 1e-12 * regime.k0 && geometry == regime.geometry {
            Some(packet_gate_fidelity(&packet, &regime, gamma_k0)?.value)
        } else {
            None
        };
    let f_td = time_domain_fidelity(&packet, &model, &geometry, t_end)?;
    let duration = gate_duration(&packet, &model);

    let mut columns = vec!["t".to_string(), "x".to_string()];
    for c in SpinConfig::ALL {
        columns.push(format!("re_psi_{}{}", c.alpha1(), c.alpha2()));
        columns.push(format!("im_psi_{}{}", c.alpha1(), c.alpha2()));
    }
    let mut table = base_table("wavepacket", config, columns);
    geometry_meta(&mut table, &geometry);
    model_meta(&mut table, &model);
    table.set_meta(
        "packet",
        format!(
            "x0={}, k0={}, dk={}, dx={}",
            packet.x0(),
            packet.k0(),
            packet.dk(),
            packet.dx()
        ),
    );

    let norm_drift = branches.iter().map(|b| b.norm_drift()).fold(0.0, f64::max);
    let wall = branches
        .iter()
        .map(|b| b.wall_amplitude)
        .fold(0.0, f64::max);
    table.set_meta("norm_drift", norm_drift);
    table.set_meta("wall_amplitude", wall);
    table.set_meta("F_time_domain", f_td);
    if let Some(f) = packet_f {
        table.set_meta("F_wp", f);
    }
    table.set_meta("dtau_order_of_magnitude", duration.dtau);
    table.set_meta("scattering_complete_time", t_end);

    let fields: Vec<Vec<Vec<Complex64>>> = branches
        .iter()
        .map(|b| b.snapshots.iter().map(|s| s.field()).collect())
        .collect();
    let mut parts = Vec::new();
    for (ti, &t) in times.iter().enumerate() {
        let mut snapshot = SweepTable {
            metadata: table.metadata.clone(),
            columns: table.columns[1..].to_vec(),
            rows: Vec::new(),
        };
        snapshot.set_meta("t", t);
        for (xi, &x) in branches[0].grid.iter().enumerate() {
            let mut row = vec![x];
            for f in &fields {
                row.push(f[ti][xi].re);
                row.push(f[ti][xi].im);
            }
            snapshot.push_row(row.clone())?;
            row.insert(0, t);
            table.push_row(row)?;
        }
        parts.push((format!("t{ti:03}"), Part::Table(snapshot)));
    }
    let mut report = serde_json::Map::new();
    report.insert("norm_drift".into(), norm_drift.into());
    report.insert("wall_amplitude".into(), wall.into());
    report.insert("F_time_domain".into(), f_td.into());
    report.insert("F_wp".into(), packet_f.into());
    report.insert("dtau_order_of_magnitude".into(), duration.dtau.into());
    report.insert("dtau_min".into(), duration.dtau_min.into());
    report.insert("scattering_complete_time".into(), t_end.into());
    report.insert("times".into(), times.clone().into());
    parts.push(("summary.json".into(), Part::Json(report.into())));

    let mut summary = vec![
        format!("norm drift: {norm_drift:e}"),
        format!("max |psi(x3, t)|: {wall:e}"),
        format!("time-domain fidelity at t = {t_end}: {f_td}"),
        format!("gate duration (order of magnitude): {}", duration.dtau),
    ];
    if let Some(f) = packet_f {
        summary.push(format!("packet-averaged fidelity F_wp: {f}"));
    }
    if let Some(f) = packet_f {
        summary.push(format!("F_wp >= {threshold}: {}", f >= threshold));
    }
    Ok(Outcome {
        table,
        summary,
        failed_check: (norm_drift > NORM_DRIFT)
            .then(|| format!("norm drift {norm_drift:e} exceeds {NORM_DRIFT:e}")),
        parts,
    })
}

pub fn cmd_duration(config: &RunConfig) -> CliResult<Outcome> {
    config.require_k0_units("duration")?;
    let model = config.model()?;
    let packet = config.packet()?;
    let r = gate_duration(&packet, &model);
    let mut table = base_table(
        "duration",
        config,
        ["dtau", "dtau_min", "td_bound", "group_velocity"],
    )
    .with_meta("estimate", "order-of-magnitude (energy-time uncertainty)");
    model_meta(&mut table, &model);
    table.set_meta(
        "packet",
        format!("x0={}, k0={}, dk={}", packet.x0(), packet.k0(), packet.dk()),
    );
    table.push_row(vec![r.dtau, r.dtau_min, r.td_bound, r.group_velocity])?;
    Ok(Outcome {
        table,
        summary: vec![format!("dtau = {}, dtau_min = {}", r.dtau, r.dtau_min)],
        failed_check: None,
        parts: Vec::new(),
    })
}

pub fn cmd_working_condition(config: &RunConfig) -> CliResult<Outcome> {
    let presets: Vec<MaterialPreset> = match (&config.preset, config.velocity, config.wavelength) {
        (Some(_), Some(_), _) | (Some(_), _, Some(_)) => {
            return Err(invalid(
                "give either preset or velocity/wavelength, not both",
            ))
        }
        (Some(name), None, None) => vec![crate::timing::preset(name).ok_or_else(|| {
            invalid(format!(
                "invalid preset: unknown material {name:?} (gaas, diamond)"
            ))
        })?],
        (None, None, None) => vec![GAAS, DIAMOND],
        (None, Some(_), None) | (None, None, Some(_)) => {
            return Err(invalid("velocity and wavelength must be given together"))
        }
        (None, Some(v), Some(l)) => {
            if config.units != Units::Si {
                return Err(invalid(
                    "invalid units: velocity/wavelength are read in SI; set \"units\": \"SI\"",
                ));
            }
            working_condition(v, l)?;
            vec![MaterialPreset {
                name: "custom",
                refractive_index: crate::timing::SPEED_OF_LIGHT / v,
                wavelength: l,
            }]
        }
    };
    let mut table = base_table(
        "working-condition",
        config,
        ["velocity_m_per_s", "wavelength_m", "td_bound_s"],
    )
    .with_meta(
        "rows",
        presets
            .iter()
            .map(|p| p.name)
            .collect::<Vec<_>>()
            .join(", "),
    )
    .with_meta(
        "estimate",
        "decoherence time must greatly exceed td_bound_s",
    );
    table.set_meta("units", "SI");
    let mut summary = Vec::new();
    for p in &presets {
        let bound = p.td_bound();
        table.push_row(vec![p.velocity(), p.wavelength, bound])?;
        summary.push(format!("{}: T_d >> {bound:e} s", p.name));
    }
    Ok(Outcome {
        table,
        summary,
        failed_check: None,
        parts: Vec::new(),
    })
}

pub fn cmd_equivalence(config: &RunConfig) -> CliResult<Outcome> {
    config.require_k0_units("equivalence")?;
    let atoms = config.atoms.unwrap_or(AtomSpec {
        velocity: 1.0,
        omega0: 0.95,
        coupling: 0.1,
    });
    let params = LambdaAtomParams::new(atoms.velocity, atoms.omega0, atoms.coupling)?;
    let geometry = config.geometry()?;
    let grid = config.k_grid.unwrap_or(RangeSpec {
        lo: 0.7,
        hi: 1.3,
        samples: 101,
    });
    if grid.samples < 1 || !(grid.lo > 0.0 && grid.hi >= grid.lo) {
        return Err(invalid(
            "invalid k_grid: need 0 < lo <= hi and samples >= 1",
        ));
    }
    let ks: Vec<f64> = (0..grid.samples)
        .map(|i| {
            if grid.samples == 1 {
                grid.lo
            } else {
                grid.lo + (grid.hi - grid.lo) * i as f64 / (grid.samples - 1) as f64
            }
        })
        .collect();
    let overall = verify_equivalence(&params, &geometry, &ks)?;
    let mut table = base_table(
        "equivalence",
        config,
        ["k", "detuning", "gamma_eff", "max_abs_dr"],
    );
    geometry_meta(&mut table, &geometry);
    table.set_meta(
        "atoms",
        format!(
            "v={}, omega0={}, J={}",
            atoms.velocity, atoms.omega0, atoms.coupling
        ),
    );
    for &k in &ks {
        let point = verify_equivalence(&params, &geometry, &[k])?;
        let eff = crate::photonic::effective_coupling(&params, k)?;
        table.push_row(vec![
            k,
            atoms.velocity * k - atoms.omega0,
            eff.gamma,
            point.max_deviation,
        ])?;
    }
    table.set_meta("max_abs_dr", overall.max_deviation);
    Ok(Outcome {
        table,
        summary: vec![format!(
            "max |r_photonic - r_massive| = {:e} (worst at k = {}, {})",
            overall.max_deviation, overall.worst_k, overall.worst_config
        )],
        failed_check: (!overall.passed())
            .then(|| "photonic and massive amplitudes disagree".to_string()),
        parts: Vec::new(),
    })
}

pub fn execute(command: Command, config: &RunConfig) -> CliResult<Outcome> {
    match command {
        Command::Solve => cmd_solve(config),
        Command::Gate => cmd_gate(config),
        Command::FidelitySweep => cmd_fidelity_sweep(config),
        Command::Wavepacket => cmd_wavepacket(config),
        Command::Duration => cmd_duration(config),
        Command::WorkingCondition => cmd_working_condition(config),
        Command::Equivalence => cmd_equivalence(config),
    }
}

fn render(table: &SweepTable, format: Format) -> String {
    match format {
        Format::Csv => table.to_csv(),
        Format::Json => table.to_json(),
    }
}

fn extension(format: Format) -> &'static str {
    match format {
        Format::Csv => "csv",
        Format::Json => "json",
    }
}

/// `dir/run.csv` + `t000.csv` -> `dir/run.t000.csv`.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map_or_else(|| "out".into(), |s| s.to_string_lossy().into_owned());
    path.with_file_name(format!("{stem}.{suffix}"))
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| CliError {
        code: EXIT_IO,
        message: format!("cannot write {}: {e}", path.display()),
    })
}

/// Runs a parsed command line. Returns the summary lines on success.
pub fn run(cli: &Cli) -> CliResult<Vec<String>> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    config.apply_flags(cli);
    let outcome = execute(cli.command, &config)?;
    let text = render(&outcome.table, cli.format);
    match &cli.out {
        Some(path) => {
            write_file(path, &text)?;
            for (suffix, part) in &outcome.parts {
                let (name, body) = match part {
                    Part::Table(t) => (
                        format!("{suffix}.{}", extension(cli.format)),
                        render(t, cli.format),
                    ),
                    Part::Json(v) => (suffix.clone(), format!("{v:#}\n")),
                };
                write_file(&sibling(path, &name), &body)?;
            }
        }
        None => print!("{text}"),
    }
    if let Some(check) = outcome.failed_check {
        return Err(CliError {
            code: EXIT_THRESHOLD,
            message: format!("{}\ncheck failed: {check}", outcome.summary.join("\n")),
        });
    }
    Ok(outcome.summary)
}
