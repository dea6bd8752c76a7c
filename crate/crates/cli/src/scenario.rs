//! Scenario files: TOML with the sections `[params]`, `[initial]`,
//! `[numerics]`, `[monitors]`, `[thresholds]`, `[sweep]` and `[output]`.
//! Every field except the two densities has a default.

use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use twophase_core::energetics::PhysicalParams;
use twophase_core::harmonic::MAX_ORDER;
use twophase_core::linear::Branch;

/// Environment variable that relocates relative output directories.
pub const OUT_ENV: &str = "TWOPHASE_OUT";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    StaticGraph,
    StaticCurve,
    Simulate,
    LinearSweep,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::StaticGraph => "static-graph",
            Kind::StaticCurve => "static-curve",
            Kind::Simulate => "simulate",
            Kind::LinearSweep => "linear-sweep",
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default = "default_kind")]
    pub kind: Kind,
    /// Seed for randomly generated initial data and test fields.
    #[serde(default)]
    pub seed: u64,
    pub params: Params,
    #[serde(default)]
    pub initial: Initial,
    #[serde(default)]
    pub numerics: Numerics,
    #[serde(default)]
    pub monitors: Monitors,
    #[serde(default)]
    pub thresholds: Thresholds,
    #[serde(default)]
    pub sweep: Sweep,
    #[serde(default)]
    pub output: Output,
}

fn default_kind() -> Kind {
    Kind::Simulate
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub rho_plus: f64,
    pub rho_minus: f64,
    #[serde(default = "one")]
    pub g: f64,
    #[serde(default)]
    pub sigma: f64,
    #[serde(default = "infinite")]
    pub h_plus: f64,
    #[serde(default = "infinite")]
    pub h_minus: f64,
}

impl Params {
    pub fn physical(&self) -> twophase_core::Result<PhysicalParams> {
        PhysicalParams::new(self.rho_plus, self.rho_minus, self.g, self.sigma, self.h_plus, self.h_minus)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BranchName {
    Oscillatory,
    Progressive,
    Growing,
    Decaying,
}

impl From<BranchName> for Branch {
    fn from(b: BranchName) -> Self {
        match b {
            BranchName::Oscillatory => Branch::Oscillatory,
            BranchName::Progressive => Branch::Progressive,
            BranchName::Growing => Branch::Growing,
            BranchName::Decaying => Branch::Decaying,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeEntry {
    pub k: u32,
    pub amplitude: f64,
    #[serde(default)]
    pub phase: f64,
    #[serde(default = "oscillatory")]
    pub branch: BranchName,
}

fn oscillatory() -> BranchName {
    BranchName::Oscillatory
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomGraph {
    #[serde(default = "four")]
    pub band: usize,
    #[serde(default = "one")]
    pub max_slope: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Circle {
    pub radius: f64,
    #[serde(default = "pi")]
    pub x0: f64,
    #[serde(default)]
    pub y0: f64,
}

/// Initial data: at most one of `file`, `random`, `circle`; otherwise the
/// superposition of linear `modes`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Initial {
    #[serde(default = "default_modes")]
    pub modes: Vec<ModeEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub random: Option<RandomGraph>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub circle: Option<Circle>,
}

fn default_modes() -> Vec<ModeEntry> {
    vec![ModeEntry {
        k: 1,
        amplitude: 0.01,
        phase: 0.0,
        branch: BranchName::Oscillatory,
    }]
}

impl Default for Initial {
    fn default() -> Self {
        Self {
            modes: default_modes(),
            file: None,
            random: None,
            circle: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Numerics {
    #[serde(default = "default_grid")]
    pub modes: usize,
    #[serde(default = "three")]
    pub order: usize,
    /// Time step; chosen from the linear wave speeds when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default = "one")]
    pub t_final: f64,
    #[serde(default = "one_usize")]
    pub stride: usize,
    #[serde(default = "default_n0")]
    pub n0: f64,
    #[serde(default)]
    pub depth_margin: f64,
    /// Random harmonic fields in the trace-estimate sweep.
    #[serde(default = "default_fields")]
    pub trace_fields: usize,
}

impl Default for Numerics {
    fn default() -> Self {
        Self {
            modes: default_grid(),
            order: 3,
            dt: None,
            t_final: 1.0,
            stride: 1,
            n0: default_n0(),
            depth_margin: 0.0,
            trace_fields: default_fields(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Monitors {
    #[serde(default = "yes")]
    pub conservation: bool,
    #[serde(default = "yes")]
    pub virial: bool,
    #[serde(default = "yes")]
    pub growth_margin: bool,
    #[serde(default = "yes")]
    pub slope_envelope: bool,
    #[serde(default)]
    pub pressure: bool,
    #[serde(default = "yes")]
    pub trace_ratio: bool,
    #[serde(default = "yes")]
    pub tubular: bool,
}

impl Default for Monitors {
    fn default() -> Self {
        Self {
            conservation: true,
            virial: true,
            growth_margin: true,
            slope_envelope: true,
            pressure: false,
            trace_ratio: true,
            tubular: true,
        }
    }
}

/// PASS thresholds. Relative ones are scaled as noted.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Thresholds {
    /// `|E|` at or below this counts as zero energy.
    #[serde(default = "tol_energy")]
    pub energy_tolerance: f64,
    #[serde(default = "tol_1e10")]
    pub curvature_identity: f64,
    #[serde(default = "tol_1e12")]
    pub surface_chain: f64,
    #[serde(default = "tol_1e10")]
    pub mass_crosscheck: f64,
    /// Relative to `max(|E|, 1)`.
    #[serde(default = "tol_1e6")]
    pub virial_residual: f64,
    /// Relative to `max(|E(0)|, |E_k(0)| + |E_p(0)|)`.
    #[serde(default = "tol_1e7")]
    pub energy_drift: f64,
    #[serde(default = "tol_1e11")]
    pub mass_drift: f64,
    /// Lowest accepted `I(t) − I(0) − |E|t`.
    #[serde(default = "tol_margin")]
    pub growth_margin: f64,
    #[serde(default = "tol_1e6")]
    pub pressure_residual: f64,
    /// Largest relative change of the trace ratio under grid doubling.
    #[serde(default = "tol_trace")]
    pub trace_ratio_change: f64,
    #[serde(default = "tol_1e8")]
    pub dispersion: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            energy_tolerance: tol_energy(),
            curvature_identity: 1e-10,
            surface_chain: 1e-12,
            mass_crosscheck: 1e-10,
            virial_residual: 1e-6,
            energy_drift: 1e-7,
            mass_drift: 1e-11,
            growth_margin: tol_margin(),
            pressure_residual: 1e-6,
            trace_ratio_change: tol_trace(),
            dispersion: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    #[serde(default = "default_ks")]
    pub ks: Vec<u32>,
    #[serde(default = "default_sigmas")]
    pub sigmas: Vec<f64>,
    #[serde(default = "default_sigmas")]
    pub velocity_jumps: Vec<f64>,
}

impl Default for Sweep {
    fn default() -> Self {
        Self {
            ks: default_ks(),
            sigmas: default_sigmas(),
            velocity_jumps: default_sigmas(),
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Output {
    /// Artifact directory. Relative paths resolve against `$TWOPHASE_OUT`
    /// when set, otherwise against the scenario file's directory. Defaults
    /// to the scenario file stem.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
}

fn one() -> f64 {
    1.0
}
fn one_usize() -> usize {
    1
}
fn three() -> usize {
    3
}
fn four() -> usize {
    4
}
fn pi() -> f64 {
    PI
}
fn infinite() -> f64 {
    f64::INFINITY
}
fn yes() -> bool {
    true
}
fn default_grid() -> usize {
    256
}
fn default_n0() -> f64 {
    128.0
}
fn default_fields() -> usize {
    20
}
fn default_ks() -> Vec<u32> {
    (1..=8).collect()
}
fn default_sigmas() -> Vec<f64> {
    vec![0.0]
}
fn tol_energy() -> f64 {
    1e-12
}
fn tol_1e6() -> f64 {
    1e-6
}
fn tol_1e7() -> f64 {
    1e-7
}
fn tol_1e8() -> f64 {
    1e-8
}
fn tol_1e10() -> f64 {
    1e-10
}
fn tol_1e11() -> f64 {
    1e-11
}
fn tol_1e12() -> f64 {
    1e-12
}
fn tol_margin() -> f64 {
    -1e-6
}
fn tol_trace() -> f64 {
    0.2
}

/// Problems found while reading or checking a scenario; these map to exit
/// code 2 and are raised before any artifact is written.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn bad(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let s: Scenario = toml::from_str(text).map_err(|e| bad(format!("parse error: {e}")))?;
        Ok(s)
    }

    /// Read, parse and check a scenario file. Relative data paths are
    /// resolved against the file's directory.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| bad(format!("{}: {e}", path.display())))?;
        let mut s = Self::parse(&text).map_err(|e| bad(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        if let Some(f) = &s.initial.file {
            if f.is_relative() {
                s.initial.file = Some(base.join(f));
            }
        }
        if s.output.dir.is_none() {
            let stem = path.file_stem().map_or_else(|| "out".into(), |v| v.to_string_lossy().into_owned());
            s.output.dir = Some(PathBuf::from(stem));
        }
        let dir = s.output.dir.take().unwrap();
        s.output.dir = Some(resolve_output(&dir, base, std::env::var_os(OUT_ENV).map(PathBuf::from)));
        s.check()?;
        Ok(s)
    }

    /// Range and consistency checks that do not touch the numerics.
    pub fn check(&self) -> Result<(), ConfigError> {
        self.params.physical().map_err(|e| bad(format!("[params] {e}")))?;
        let n = &self.numerics;
        if !(16..=4096).contains(&n.modes) || !n.modes.is_multiple_of(2) {
            return Err(bad(format!("[numerics] modes must be even and within 16..=4096, got {}", n.modes)));
        }
        if !(1..=MAX_ORDER).contains(&n.order) {
            return Err(bad(format!("[numerics] order must be within 1..={MAX_ORDER}, got {}", n.order)));
        }
        if let Some(dt) = n.dt {
            if !(dt.is_finite() && dt > 0.0) {
                return Err(bad(format!("[numerics] dt must be positive, got {dt}")));
            }
        }
        if !(n.t_final.is_finite() && n.t_final > 0.0) {
            return Err(bad(format!("[numerics] t_final must be positive, got {}", n.t_final)));
        }
        if n.stride == 0 {
            return Err(bad("[numerics] stride must be at least 1"));
        }
        if !(n.n0.is_finite() && n.n0 >= 1.0) {
            return Err(bad(format!("[numerics] n0 must be at least 1, got {}", n.n0)));
        }
        if !(n.depth_margin.is_finite() && n.depth_margin >= 0.0) {
            return Err(bad(format!("[numerics] depth_margin must be non-negative, got {}", n.depth_margin)));
        }
        let i = &self.initial;
        let sources = [i.file.is_some(), i.random.is_some(), i.circle.is_some()].iter().filter(|b| **b).count();
        if sources > 1 {
            return Err(bad("[initial] give at most one of file, random, circle"));
        }
        if let Some(f) = &i.file {
            if !f.is_file() {
                return Err(bad(format!("[initial] file {} does not exist", f.display())));
            }
        }
        for m in &i.modes {
            if m.k == 0 || 3 * m.k as usize >= n.modes {
                return Err(bad(format!("[initial] mode k = {} must satisfy 1 <= k < modes/3", m.k)));
            }
            if !(m.amplitude.is_finite() && m.phase.is_finite()) {
                return Err(bad("[initial] mode amplitude and phase must be finite"));
            }
        }
        if let Some(r) = &i.random {
            if r.band == 0 || 3 * r.band >= n.modes || !(r.max_slope > 0.05 && r.max_slope.is_finite()) {
                return Err(bad("[initial] random needs 1 <= band < modes/3 and max_slope > 0.05"));
            }
        }
        if let Some(c) = &i.circle {
            if !(c.radius.is_finite() && c.radius > 0.0 && c.radius < PI) {
                return Err(bad(format!("[initial] circle radius must lie in (0, π), got {}", c.radius)));
            }
        }
        match self.kind {
            Kind::StaticCurve => {}
            _ if i.circle.is_some() => {
                return Err(bad(format!("[initial] circle is only valid for static-curve, not {}", self.kind)))
            }
            _ => {}
        }
        if self.kind == Kind::Simulate && i.random.is_none() && i.file.is_none() && i.modes.is_empty() {
            return Err(bad("[initial] simulate needs at least one mode, a file or random data"));
        }
        if self.kind == Kind::LinearSweep {
            let s = &self.sweep;
            if s.ks.is_empty() || s.sigmas.is_empty() || s.velocity_jumps.is_empty() || s.ks.contains(&0) {
                return Err(bad("[sweep] ks, sigmas and velocity_jumps must be non-empty and ks positive"));
            }
        }
        Ok(())
    }

    pub fn output_dir(&self) -> PathBuf {
        self.output.dir.clone().unwrap_or_else(|| PathBuf::from("out"))
    }

    /// The scenario with all defaults filled in, as TOML.
    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("scenario serializes")
    }
}

pub fn resolve_output(dir: &Path, config_dir: &Path, env_root: Option<PathBuf>) -> PathBuf {
    if dir.is_absolute() {
        dir.to_path_buf()
    } else if let Some(root) = env_root {
        root.join(dir)
    } else {
        config_dir.join(dir)
    }
}
