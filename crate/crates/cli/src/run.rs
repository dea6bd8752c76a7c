//! Scenario execution and artifact output.

use std::f64::consts::TAU;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;
use twophase_core::dynamics::{
    default_dt, pressure_jump_residual, rhs, run_monitored, sample_diagnostics, RunConfig, StepOptions, WaveState,
};
use twophase_core::energetics::{
    curvature_identity_check, mass, mass_crosscheck, potential_energy, rs_nonnegativity_check, trace_estimate_ratio,
    trace_estimate_ratio_curve, DiagnosticsRecord, EnergyCondition, PhysicalParams,
};
use twophase_core::geometry::{
    epsilon_of_state, length_curvature_bound, tubular_map_check, ArcCurve, GraphInterface, Orientation, TubularGrid,
    TubularMap,
};
use twophase_core::harmonic::{LayerField, LayerSpec, Side};
use twophase_core::linear::{criteria_sweep, dispersion, make_linear_state, write_sweep_csv, ModeSpec};
use twophase_core::{io, spectral};

use crate::report::{Check, Report};
use crate::scenario::{ConfigError, Kind, Scenario};

pub const SCHEMA_VERSION: u32 = 1;

/// How a run ended, mapped to the process exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
    ConfigError,
    Halted,
}

impl Outcome {
    pub fn code(self) -> i32 {
        match self {
            Outcome::Pass => 0,
            Outcome::Fail => 1,
            Outcome::ConfigError => 2,
            Outcome::Halted => 3,
        }
    }
}

/// Initial data resolved from a scenario, built before anything is written.
pub enum Prepared {
    Graph { state: WaveState, warnings: Vec<String> },
    Curve(ArcCurve),
    Sweep,
}

fn config_err(e: impl std::fmt::Display) -> ConfigError {
    ConfigError(format!("[initial] {e}"))
}

/// Band-limited random graph with `‖η′‖∞` drawn from `[0.05, max_slope]`.
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, band: usize, max_slope: f64) -> twophase_core::Result<GraphInterface> {
    let modes: Vec<(f64, f64, f64)> = (1..=band)
        .map(|k| {
            let k = k as f64;
            (k, rng.random_range(-1.0..1.0) / k, rng.random_range(-1.0..1.0) / k)
        })
        .collect();
    let raw = GraphInterface::from_fn(n, |x| modes.iter().map(|(k, a, b)| a * (k * x).cos() + b * (k * x).sin()).sum())?;
    let scale = rng.random_range(0.05..=max_slope) / raw.slope_inf()?;
    let mut g = GraphInterface::new(raw.samples().iter().map(|v| scale * v).collect())?;
    g.project_zero_mass();
    Ok(g)
}

fn graph_state(s: &Scenario, p: &PhysicalParams) -> Result<(WaveState, Vec<String>), ConfigError> {
    let n = s.numerics.modes;
    let init = &s.initial;
    if let Some(f) = &init.file {
        let g = io::load_graph(f).map_err(config_err)?;
        let eta = spectral::resample(g.samples(), n);
        return Ok((WaveState::from_samples(0.0, eta, vec![0.0; n]).map_err(config_err)?, Vec::new()));
    }
    if let Some(r) = &init.random {
        let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
        let g = random_graph(&mut rng, n, r.band, r.max_slope).map_err(config_err)?;
        return Ok((WaveState::new(0.0, g, vec![0.0; n]).map_err(config_err)?, Vec::new()));
    }
    let mut eta = vec![0.0; n];
    let mut psi = vec![0.0; n];
    let mut warnings = Vec::new();
    for m in &init.modes {
        let spec = ModeSpec {
            k: m.k,
            amplitude: m.amplitude,
            phase: m.phase,
            branch: m.branch.into(),
        };
        let ls = make_linear_state(&spec, p, n).map_err(config_err)?;
        for j in 0..n {
            eta[j] += ls.state.eta.samples()[j];
            psi[j] += ls.state.psi[j];
        }
        warnings.extend(ls.warning);
    }
    Ok((WaveState::from_samples(0.0, eta, psi).map_err(config_err)?, warnings))
}

/// Resolve the initial data; every failure here is a configuration error.
pub fn prepare(s: &Scenario) -> Result<Prepared, ConfigError> {
    let p = s.params.physical().map_err(|e| ConfigError(format!("[params] {e}")))?;
    let n = s.numerics.modes;
    match s.kind {
        Kind::LinearSweep => Ok(Prepared::Sweep),
        Kind::StaticGraph | Kind::Simulate => {
            let (state, warnings) = graph_state(s, &p)?;
            let clearance = state.eta.clearance(p.h_plus, p.h_minus);
            if clearance <= s.numerics.depth_margin {
                return Err(ConfigError(format!(
                    "[initial] interface leaves the fluid layers: clearance {clearance:.3e}"
                )));
            }
            Ok(Prepared::Graph { state, warnings })
        }
        Kind::StaticCurve => {
            let init = &s.initial;
            let curve = if let Some(f) = &init.file {
                io::load_curve_onto(f, Some(n)).map_err(config_err)?
            } else if let Some(c) = &init.circle {
                ArcCurve::circle(c.x0, c.y0, c.radius, n, Orientation::Positive).map_err(config_err)?
            } else {
                let (state, _) = graph_state(s, &p)?;
                ArcCurve::from_graph(&state.eta, n).map_err(config_err)?
            };
            Ok(Prepared::Curve(curve))
        }
    }
}

#[derive(Serialize)]
struct Derived {
    atwood: f64,
    rho_bar_plus: f64,
    rho_bar_minus: f64,
    sigma_tilde: f64,
    rayleigh_taylor: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    initial_energy: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    energy_condition: Option<&'static str>,
}

const OPEN_NOTE: &str = "surface tension with positive energy: whether the virial lower bound holds here is still open";

fn initial_energy(prep: &Prepared, p: &PhysicalParams, s: &Scenario) -> Option<f64> {
    match prep {
        Prepared::Graph { state, .. } => {
            let mut st = state.clone();
            sample_diagnostics(&mut st, p, &step_options(s)).ok().map(|r| r.e)
        }
        Prepared::Curve(c) => potential_energy(c, p).ok().map(|e| e.total()),
        Prepared::Sweep => None,
    }
}

fn derived(p: &PhysicalParams, energy: Option<f64>, tol: f64) -> Derived {
    Derived {
        atwood: p.atwood(),
        rho_bar_plus: p.rho_bar_plus(),
        rho_bar_minus: p.rho_bar_minus(),
        sigma_tilde: p.sigma_tilde(),
        rayleigh_taylor: p.is_rayleigh_taylor(),
        initial_energy: energy,
        energy_condition: energy.map(|e| p.energy_condition(e, tol).label()),
    }
}

/// The fully defaulted scenario plus derived quantities, for `validate`.
pub fn validate_echo(s: &Scenario) -> Result<String, ConfigError> {
    let prep = prepare(s)?;
    let p = s.params.physical().map_err(|e| ConfigError(e.to_string()))?;
    let energy = initial_energy(&prep, &p, s);
    let d = derived(&p, energy, s.thresholds.energy_tolerance);
    let mut out = s.to_toml();
    out.push_str("\n# derived (not part of the input)\n[derived]\n");
    out.push_str(&toml::to_string(&d).expect("derived serializes"));
    if let Some(e) = energy {
        if p.energy_condition(e, s.thresholds.energy_tolerance) == EnergyCondition::Open {
            out.push_str(&format!("# energy condition NA: {OPEN_NOTE}\n"));
        }
    }
    if let Prepared::Graph { warnings, .. } = &prep {
        for w in warnings {
            out.push_str(&format!("# warning: {w}\n"));
        }
    }
    Ok(out)
}

fn step_options(s: &Scenario) -> StepOptions {
    StepOptions {
        depth_margin: s.numerics.depth_margin,
        ..StepOptions::new(s.numerics.order)
    }
}

/// Everything a finished (or halted) run leaves behind.
pub struct Artifacts {
    pub report: Report,
    pub records: Option<Vec<DiagnosticsRecord>>,
    pub sweep_csv: Option<Vec<u8>>,
    pub summary: serde_json::Value,
    pub derived: serde_json::Value,
}

impl Artifacts {
    pub fn write(&self, s: &Scenario, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        if let Some(records) = &self.records {
            let mut w = csv::Writer::from_path(dir.join("diagnostics.csv"))?;
            for r in records {
                w.serialize(r)?;
            }
            w.flush()?;
        }
        if let Some(bytes) = &self.sweep_csv {
            fs::write(dir.join("sweep.csv"), bytes)?;
        }
        let monitors = json!({
            "schema_version": SCHEMA_VERSION,
            "kind": s.kind.to_string(),
            "seed": s.seed,
            "params": s.params,
            "derived": self.derived,
            "checks": self.report.checks,
            "halt": self.report.halt,
            "summary": self.summary,
        });
        fs::write(dir.join("monitors.json"), serde_json::to_string_pretty(&monitors)? + "\n")?;
        fs::write(dir.join("report.txt"), self.report.render())?;
        Ok(())
    }
}

/// Run a checked scenario and write its artifacts.
pub fn run(s: &Scenario) -> Result<Outcome> {
    let prep = prepare(s)?;
    let p = s.params.physical()?;
    let energy = initial_energy(&prep, &p, s);
    let mut art = match prep {
        Prepared::Graph { state, warnings } => match s.kind {
            Kind::StaticGraph => static_graph(s, &p, state, warnings)?,
            _ => simulate(s, &p, state, warnings)?,
        },
        Prepared::Curve(c) => static_curve(s, &p, c)?,
        Prepared::Sweep => linear_sweep(s, &p)?,
    };
    art.derived = serde_json::to_value(derived(&p, energy, s.thresholds.energy_tolerance))?;
    art.write(s, &s.output_dir())?;
    Ok(if art.report.halt.is_some() {
        Outcome::Halted
    } else if art.report.failed() {
        Outcome::Fail
    } else {
        Outcome::Pass
    })
}

fn header(s: &Scenario, p: &PhysicalParams) -> Report {
    let mut r = Report::default();
    r.note(format!("twophase {} report, schema {SCHEMA_VERSION}", s.kind));
    r.note(format!(
        "rho+ = {}, rho- = {}, g = {}, sigma = {}, H+ = {}, H- = {}, A = {:.6}",
        p.rho_plus, p.rho_minus, p.g, p.sigma, p.h_plus, p.h_minus, p.atwood()
    ));
    r
}

fn surface_checks<'a>(
    r: &mut Report,
    s: &Scenario,
    p: &PhysicalParams,
    iface: impl Into<twophase_core::geometry::Interface<'a>> + Copy,
    spans_period: bool,
) -> Result<()> {
    let t = &s.thresholds;
    let ci = curvature_identity_check(iface)?;
    r.push(Check::at_most(
        "curvature identity",
        ci.residual,
        t.curvature_identity,
        format!("lhs {:.12e}, rhs {:.12e}", ci.lhs, ci.rhs),
    ));
    if !spans_period {
        r.push(Check::na("surface remainder chain", "closed loops do not span the period"));
        return Ok(());
    }
    let chain = rs_nonnegativity_check(iface, p)?;
    r.push(Check::flag(
        "surface remainder chain",
        chain.holds(t.surface_chain),
        Some(chain.r_s),
        format!(
            "{:.12e} >= {:.12e} >= {:.12e}",
            chain.surface_sum, chain.twice_abs_normal, chain.floor
        ),
    ));
    Ok(())
}

fn random_field(rng: &mut ChaCha8Rng, layer: LayerSpec, band: usize, reach: f64) -> twophase_core::Result<LayerField> {
    let mut coeffs = vec![Complex64::new(rng.random_range(-1.0..1.0), 0.0)];
    for k in 1..=band {
        let w = 1.0 / (k * k) as f64;
        coeffs.push(Complex64::new(rng.random_range(-w..w), rng.random_range(-w..w)));
    }
    Ok(LayerField::from_coefficients(layer, 0.0, coeffs)?.with_reach(reach))
}

fn trace_sweep_graph(s: &Scenario, p: &PhysicalParams, g: &GraphInterface) -> Result<Check> {
    let name = "trace estimate ratio";
    let n = g.n_modes();
    let fine = GraphInterface::new(spectral::resample(g.samples(), 2 * n))?;
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed ^ 0x7472_6163);
    let (mut max_ratio, mut change) = (0.0_f64, 0.0_f64);
    let band = 8.min(n / 3 - 1);
    for i in 0..s.numerics.trace_fields {
        let (layer, reach) = if i % 2 == 0 {
            (p.lower_layer(), fine.samples().iter().copied().fold(f64::MIN, f64::max) + 1e-9)
        } else {
            (p.upper_layer(), fine.samples().iter().copied().fold(f64::MAX, f64::min) - 1e-9)
        };
        let band = rng.random_range(1..=band);
        let field = random_field(&mut rng, layer, band, reach)?;
        let a = trace_estimate_ratio(g, &field)?;
        let b = trace_estimate_ratio(&fine, &field)?;
        max_ratio = max_ratio.max(a).max(b);
        if b > 0.0 {
            change = change.max((a - b).abs() / b);
        }
    }
    Ok(Check::at_most(
            name,
            change,
            s.thresholds.trace_ratio_change,
            format!(
                "relative change under grid doubling; max ratio {max_ratio:.6e} over {} fields",
                s.numerics.trace_fields
            ),
        ))
}

fn static_graph(s: &Scenario, p: &PhysicalParams, state: WaveState, warnings: Vec<String>) -> Result<Artifacts> {
    let mut r = header(s, p);
    for w in &warnings {
        r.note(format!("warning: {w}"));
    }
    let g = state.eta.clone();
    surface_checks(&mut r, s, p, &g, true)?;
    let mc = mass_crosscheck(&g, &p.lower_layer(), &p.upper_layer())?;
    r.push(Check::at_most(
        "mass surface/volume cross-check",
        mc.residual,
        s.thresholds.mass_crosscheck,
        format!("surface {:.12e}", mc.surface),
    ));
    if s.monitors.trace_ratio {
        r.push(trace_sweep_graph(s, p, &g)?);
    } else {
        r.push(Check::na("trace estimate ratio", "disabled in [monitors]"));
    }
    let mut st = state;
    let rec = sample_diagnostics(&mut st, p, &step_options(s))?;
    let summary = json!({ "modes": g.n_modes(), "slope_inf": rec.slope_inf, "mass": rec.mass, "energy": rec.e });
    Ok(Artifacts {
        report: r,
        records: Some(vec![rec]),
        sweep_csv: None,
        summary,
        derived: serde_json::Value::Null,
    })
}

fn static_curve(s: &Scenario, p: &PhysicalParams, c: ArcCurve) -> Result<Artifacts> {
    let mut r = header(s, p);
    r.note(format!("curve: {} nodes, length {:.12e}, winding {}", c.n(), c.length(), c.winding()));
    surface_checks(&mut r, s, p, &c, c.winding().abs() == 1)?;
    let n0 = s.numerics.n0;
    if s.monitors.tubular {
        let map = TubularMap::admissible(c.clone(), n0)?;
        let grid = TubularGrid {
            s_nodes: c.n(),
            r_nodes: 9,
        };
        r.push(match tubular_map_check(&map, grid) {
            Ok(rep) => Check::flag(
                "tubular neighbourhood",
                rep.jacobian_in_band(),
                Some(rep.epsilon),
                format!(
                    "half-width {:.6e}, jacobian in [{:.6}, {:.6}], min separation ratio {:.4}",
                    rep.epsilon, rep.min_jacobian, rep.max_jacobian, rep.min_separation_ratio
                ),
            ),
            Err(e) => Check::flag("tubular neighbourhood", false, None, e.to_string()),
        });
    } else {
        r.push(Check::na("tubular neighbourhood", "disabled in [monitors]"));
    }
    if p.h_plus.is_finite() && p.h_minus.is_finite() {
        match length_curvature_bound(&c, p.h_plus, p.h_minus, n0) {
            Ok(b) => r.push(Check::at_least(
                "length curvature bound slack",
                b.slack,
                0.0,
                format!("L eps = {:.6e} against {:.6e}", b.length * b.epsilon, b.bound),
            )),
            Err(e) => r.push(Check::flag("length curvature bound slack", false, None, e.to_string())),
        }
    } else {
        r.push(Check::na("length curvature bound slack", "needs finite depths"));
    }
    if !s.monitors.trace_ratio {
        r.push(Check::na("trace estimate ratio", "disabled in [monitors]"));
    } else if c.winding().abs() != 1 {
        r.push(Check::na("trace estimate ratio", "needs a curve winding once around the period"));
    } else {
        r.push(trace_sweep_curve(s, p, &c)?);
    }
    let pe = potential_energy(&c, p)?;
    let chain = rs_nonnegativity_check(&c, p)?;
    let rec = DiagnosticsRecord {
        mass: mass(&c)?,
        e_p: pe.total(),
        e: pe.total(),
        r_s: chain.r_s,
        curv_inf: Some(c.curvature_inf()?),
        ..Default::default()
    };
    let summary = json!({ "nodes": c.n(), "length": c.length(), "winding": c.winding(), "curvature_inf": rec.curv_inf });
    Ok(Artifacts {
        report: r,
        records: Some(vec![rec]),
        sweep_csv: None,
        summary,
        derived: serde_json::Value::Null,
    })
}

fn trace_sweep_curve(s: &Scenario, p: &PhysicalParams, c: &ArcCurve) -> Result<Check> {
    let orient = |c: ArcCurve| if c.orientation() == Orientation::Positive { c } else { c.reversed() };
    let coarse = orient(c.clone());
    let fine = orient(ArcCurve::reparametrize(c.alpha(), c.beta(), c.winding(), 2 * c.n())?);
    let (lo, hi) = fine.beta_range();
    let d0 = (lo + p.h_plus).min(p.h_minus - hi);
    let ea = epsilon_of_state(&coarse, d0, s.numerics.n0)?;
    let eb = epsilon_of_state(&fine, d0, s.numerics.n0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed ^ 0x6375_7276);
    let (mut max_ratio, mut change) = (0.0_f64, 0.0_f64);
    for _ in 0..s.numerics.trace_fields {
        let band = rng.random_range(1..=8);
        let layer = LayerSpec::new(Side::Lower, p.h_plus)?;
        let field = random_field(&mut rng, layer, band, hi + 1e-9)?;
        let a = trace_estimate_ratio_curve(&coarse, &field, ea)?;
        let b = trace_estimate_ratio_curve(&fine, &field, eb)?;
        max_ratio = max_ratio.max(a).max(b);
        if b > 0.0 {
            change = change.max((a - b).abs() / b);
        }
    }
    Ok(Check::at_most(
            "trace estimate ratio",
            change,
            s.thresholds.trace_ratio_change,
            format!(
                "relative change under grid doubling; max ratio {max_ratio:.6e} over {} fields",
                s.numerics.trace_fields
            ),
        ))
}

fn simulate(s: &Scenario, p: &PhysicalParams, state: WaveState, warnings: Vec<String>) -> Result<Artifacts> {
    let mut r = header(s, p);
    for w in &warnings {
        r.note(format!("warning: {w}"));
    }
    let nm = &s.numerics;
    let dt = match nm.dt {
        Some(dt) => dt,
        None => default_dt(p, nm.modes)?,
    };
    let cfg = RunConfig {
        stride: nm.stride,
        step: step_options(s),
        energy_tolerance: s.thresholds.energy_tolerance,
        ..RunConfig::new(nm.t_final, dt, nm.order)
    };
    let pressure = if s.monitors.pressure {
        Some(pressure_jump_residual(&state, p, cfg.schedule()?.1, nm.order).map(|v| spectral::sup_norm(&v)))
    } else {
        None
    };
    let rep = run_monitored(&state, p, &cfg)?;
    r.note(format!(
        "{} steps of dt = {:.6e} to t = {:.6}, {} samples, energy condition {}",
        rep.steps,
        rep.dt,
        rep.final_state.t,
        rep.records.len(),
        rep.energy_condition.label()
    ));
    let t = &s.thresholds;
    let e0 = rep.records.first().map_or(0.0, |x| x.e);

    if s.monitors.conservation {
        // E(0) nearly cancels for growing modes, so scale by |E_k| + |E_p| too.
        let scale = rep.records.first().map_or(0.0, |x| x.e.abs().max(x.e_k.abs() + x.e_p.abs()));
        let drift = if scale > 0.0 { rep.max_energy_drift() / scale } else { rep.max_energy_drift() };
        r.push(Check::at_most(
            "energy conservation",
            drift,
            t.energy_drift,
            "max |E(t) - E(0)| / max(|E(0)|, |E_k(0)| + |E_p(0)|)",
        ));
        r.push(Check::at_most("mass conservation", rep.max_mass_drift(), t.mass_drift, "max |M(t) - M(0)|"));
    } else {
        r.push(Check::na("energy conservation", "disabled in [monitors]"));
    }

    if !s.monitors.virial {
        r.push(Check::na("virial identity residual", "disabled in [monitors]"));
    } else if let Some(v) = rep.max_virial_residual().filter(|_| rep.records.len() >= 5) {
        let tol = t.virial_residual * e0.abs().max(1.0);
        r.push(Check::at_most(
            "virial identity residual",
            v,
            tol,
            "max |dI/dt / 2 - (Etilde_k - E_p + R)| over samples",
        ));
    } else {
        r.push(Check::na("virial identity residual", "needs at least 5 samples"));
    }

    let why_not = if !p.is_rayleigh_taylor() {
        Some("stable stratification".to_string())
    } else if rep.energy_condition == EnergyCondition::Open {
        Some(OPEN_NOTE.to_string())
    } else if rep.energy_condition == EnergyCondition::Violated {
        Some("energy condition violated".to_string())
    } else {
        None
    };
    if !s.monitors.growth_margin {
        r.push(Check::na("virial lower bound margin", "disabled in [monitors]"));
    } else if let Some(w) = &why_not {
        r.push(Check::na("virial lower bound margin", w.clone()));
    } else if let Some(m) = rep.min_growth_margin() {
        r.push(Check::at_least("virial lower bound margin", m, t.growth_margin, "min over samples of I(t) - I(0) - |E|t"));
    }
    if !s.monitors.slope_envelope {
        r.push(Check::na("slope growth envelope", "disabled in [monitors]"));
    } else if let Some(w) = &why_not {
        r.push(Check::na("slope growth envelope", w.clone()));
    } else {
        let c = rep.slope_envelope.unwrap_or(f64::INFINITY);
        r.push(Check::flag(
            "slope growth envelope",
            c.is_finite(),
            Some(c),
            format!(
                "smallest C with |E|t + I(0) <= C s sqrt(1+s) sqrt(|E| + |A|g s^2); growth integral constant {:.6e}",
                rep.growth_integral_constant.unwrap_or(f64::NAN)
            ),
        ));
    }
    match pressure {
        None => r.push(Check::na("pressure jump residual", "disabled in [monitors]")),
        Some(Ok(v)) => r.push(Check::at_most("pressure jump residual", v, t.pressure_residual, "initial state, probe step dt")),
        Some(Err(e)) => r.push(Check::flag("pressure jump residual", false, None, e.to_string())),
    }
    r.push(Check::na("late-time virial growth exponent", "needs global-in-time solutions; out of scope"));
    r.push(Check::na("overlapping interface curvature growth", "graph interfaces only; out of scope"));
    r.halt = rep.halt.clone();

    let summary = json!({
        "dt": rep.dt,
        "steps": rep.steps,
        "samples": rep.records.len(),
        "t_end": rep.final_state.t,
        "energy_condition": rep.energy_condition.label(),
        "growth_bound_applicable": rep.growth_bound_applicable,
        "max_virial_residual": rep.max_virial_residual(),
        "max_relative_energy_drift": rep.max_relative_energy_drift(),
        "max_mass_drift": rep.max_mass_drift(),
        "max_abs_mass": rep.max_abs_mass(),
        "min_growth_margin": rep.min_growth_margin(),
        "slope_envelope": rep.slope_envelope,
        "growth_integral_constant": rep.growth_integral_constant,
        "max_trace_iterations": rep.max_trace_iterations,
        "series": {
            "t": rep.times(),
            "dI_dt": rep.di_dt,
            "virial_residual": rep.virial_residual,
            "energy_drift": rep.energy_drift,
            "mass_drift": rep.mass_drift,
            "growth_margin": rep.growth_margin,
        },
    });
    Ok(Artifacts {
        report: r,
        records: Some(rep.records),
        sweep_csv: None,
        summary,
        derived: serde_json::Value::Null,
    })
}

/// `ω²` from a centred finite difference of the evolution operator about
/// the flat state, for comparison with the closed-form dispersion relation.
fn linearized_omega_sq(k: u32, p: &PhysicalParams, n: usize, order: usize) -> Result<f64> {
    let delta = 1e-6;
    let cosk: Vec<f64> = spectral::grid(n, TAU).iter().map(|x| (k as f64 * x).cos()).collect();
    let zero = vec![0.0; n];
    let column = |eta: &[f64], psi: &[f64]| -> Result<(f64, f64)> {
        let at = |sign: f64| {
            WaveState::from_samples(
                0.0,
                eta.iter().map(|v| sign * delta * v).collect(),
                psi.iter().map(|v| sign * delta * v).collect(),
            )
        };
        let (a, b) = (rhs(&at(1.0)?, p, order)?, rhs(&at(-1.0)?, p, order)?);
        let proj = |u: &[f64], v: &[f64]| {
            let d: Vec<f64> = (0..n).map(|j| (u[j] - v[j]) / (2.0 * delta) * cosk[j]).collect();
            2.0 * spectral::mean(&d)
        };
        Ok((proj(&a.eta_t, &b.eta_t), proj(&a.psi_t, &b.psi_t)))
    };
    let (_, psi_from_eta) = column(&cosk, &zero)?;
    let (eta_from_psi, _) = column(&zero, &cosk)?;
    Ok(-psi_from_eta * eta_from_psi)
}

fn linear_sweep(s: &Scenario, p: &PhysicalParams) -> Result<Artifacts> {
    let mut r = header(s, p);
    let sw = &s.sweep;
    let rows = criteria_sweep(p, &sw.ks, &sw.sigmas, &sw.velocity_jumps)?;
    let mut csv = Vec::new();
    write_sweep_csv(&rows, &mut csv)?;

    let n = s.numerics.modes;
    let mut worst = 0.0_f64;
    let mut checked = 0;
    for &sigma in &sw.sigmas {
        let q = PhysicalParams { sigma, ..*p };
        for &k in sw.ks.iter().filter(|k| 3 * **k as usize <= n) {
            let exact = dispersion(k as f64, &q)?;
            let fd = linearized_omega_sq(k, &q, n, s.numerics.order)?;
            worst = worst.max((fd - exact).abs() / exact.abs().max(1e-300));
            checked += 1;
        }
    }
    if checked > 0 {
        r.push(Check::at_most(
            "linearized dispersion",
            worst,
            s.thresholds.dispersion,
            format!("max relative gap over {checked} (k, sigma) pairs"),
        ));
    } else {
        r.push(Check::na("linearized dispersion", "no wavenumber resolved on the grid"));
    }
    let unstable = rows.iter().filter(|x| x.growth_rate.is_some()).count();
    let max_rate = rows.iter().filter_map(|x| x.growth_rate).fold(0.0_f64, f64::max);
    r.note(format!("{} rows, {unstable} unstable, largest growth rate {max_rate:.6e}", rows.len()));
    if sw.sigmas.contains(&0.0) {
        r.note("Kelvin column empty where sigma = 0 (criterion needs surface tension)");
    }
    let summary = json!({ "rows": rows.len(), "unstable": unstable, "max_growth_rate": max_rate });
    Ok(Artifacts {
        report: r,
        records: None,
        sweep_csv: Some(csv),
        summary,
        derived: serde_json::Value::Null,
    })
}
