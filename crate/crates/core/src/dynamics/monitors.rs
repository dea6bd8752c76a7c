//! Time integration with per-sample diagnostics: conservation drifts, the
//! virial identity residual and the growth lower bounds that follow from it.

use serde::Serialize;

use crate::dynamics::integrate::{step_with, StepOptions};
use crate::dynamics::rhs::dealiased_curvature;
use crate::dynamics::state::WaveState;
use crate::energetics::{self, DiagnosticsRecord, EnergyCondition, PhysicalParams};
use crate::error::{Error, Result};
use crate::spectral;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub t_final: f64,
    pub dt: f64,
    /// Diagnostics every `stride` steps.
    pub stride: usize,
    pub step: StepOptions,
    /// Energies below this magnitude count as zero in the energy condition.
    pub energy_tolerance: f64,
}

impl RunConfig {
    pub fn new(t_final: f64, dt: f64, order: usize) -> Self {
        Self {
            t_final,
            dt,
            stride: 1,
            step: StepOptions::new(order),
            energy_tolerance: 1e-12,
        }
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.stride = stride;
        self
    }

    /// Number of steps and the step actually used: the requested step is
    /// shortened so that a whole number of sampling intervals covers
    /// `[0, t_final]`.
    pub fn schedule(&self) -> Result<(usize, f64)> {
        if !(self.t_final.is_finite() && self.t_final > 0.0) {
            return Err(Error::InvalidInput(format!("final time must be positive, got {}", self.t_final)));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidInput(format!("time step must be positive, got {}", self.dt)));
        }
        if self.stride == 0 {
            return Err(Error::InvalidInput("sample stride must be at least 1".into()));
        }
        let samples = (self.t_final / (self.dt * self.stride as f64) - 1e-9).ceil().max(1.0) as usize;
        let steps = samples * self.stride;
        Ok((steps, self.t_final / steps as f64))
    }
}

/// Summary of a monitored run. Series are indexed like `records`.
#[derive(Debug, Clone, Serialize)]
pub struct MonitorReport {
    pub records: Vec<DiagnosticsRecord>,
    pub dt: f64,
    pub steps: usize,
    /// `dI/dt` by fourth-order finite differences; empty with fewer than five samples.
    pub di_dt: Vec<f64>,
    /// `|½ dI/dt − (Ẽ_k − E_p + R)|`.
    pub virial_residual: Vec<f64>,
    pub mass_drift: Vec<f64>,
    pub energy_drift: Vec<f64>,
    #[serde(serialize_with = "serialize_condition")]
    pub energy_condition: EnergyCondition,
    /// True when `ρ⁺ ≤ ρ⁻` and the energy condition holds, so that
    /// `I(t) ≥ I(0) + |E|t` is expected.
    pub growth_bound_applicable: bool,
    /// `I(t) − I(0) − |E(0)| t`.
    pub growth_margin: Vec<f64>,
    /// Smallest `C` with `|E|t + I(0) ≤ C s√(1+s)√(|E| + |A|g s²)` over the
    /// samples, `s = ‖η′‖∞`.
    pub slope_envelope: Option<f64>,
    /// Smallest `C` with `∫₀ᵗF ≤ C(√(1+s)F(t) + 1)` over the samples.
    pub growth_integral_constant: Option<f64>,
    /// Largest trace-solver iteration count seen at a sample.
    pub max_trace_iterations: usize,
    pub halt: Option<String>,
    #[serde(skip)]
    pub final_state: WaveState,
}

fn serialize_condition<S: serde::Serializer>(c: &EnergyCondition, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(c.label())
}

impl MonitorReport {
    pub fn max_virial_residual(&self) -> Option<f64> {
        self.virial_residual.iter().copied().reduce(f64::max)
    }

    pub fn max_mass_drift(&self) -> f64 {
        self.mass_drift.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_energy_drift(&self) -> f64 {
        self.energy_drift.iter().copied().fold(0.0, f64::max)
    }

    /// Largest `|E(t) − E(0)| / |E(0)|`.
    pub fn max_relative_energy_drift(&self) -> f64 {
        let e0 = self.records.first().map_or(0.0, |r| r.e.abs());
        if e0 == 0.0 {
            self.max_energy_drift()
        } else {
            self.max_energy_drift() / e0
        }
    }

    pub fn min_growth_margin(&self) -> Option<f64> {
        self.growth_margin.iter().copied().reduce(f64::min)
    }

    /// Largest `|M(t)|`.
    pub fn max_abs_mass(&self) -> f64 {
        self.records.iter().fold(0.0, |m, r| m.max(r.mass.abs()))
    }

    pub fn times(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.t).collect()
    }
}

/// Fourth-order derivative of uniformly spaced samples, centered in the
/// interior and one-sided at the two points nearest each end.
pub fn fd_derivative(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len();
    if n < 5 {
        return Vec::new();
    }
    let f = values;
    (0..n)
        .map(|i| {
            let d = if i == 0 {
                -25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]
            } else if i == 1 {
                -3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]
            } else if i == n - 2 {
                3.0 * f[n - 1] + 10.0 * f[n - 2] - 18.0 * f[n - 3] + 6.0 * f[n - 4] - f[n - 5]
            } else if i == n - 1 {
                25.0 * f[n - 1] - 48.0 * f[n - 2] + 36.0 * f[n - 3] - 16.0 * f[n - 4] + 3.0 * f[n - 5]
            } else {
                f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]
            };
            d / (12.0 * h)
        })
        .collect()
}

/// Diagnostics of one state, computing its traces if needed.
pub fn sample_diagnostics(state: &mut WaveState, params: &PhysicalParams, opts: &StepOptions) -> Result<DiagnosticsRecord> {
    if state.cached_traces().is_none() {
        let traces = opts.solver.solve(state, params)?;
        state.set_traces(traces);
    }
    let traces = state.cached_traces().expect("traces just stored");
    let mut rec = energetics::diagnostics(state.t, &state.eta, &traces.phi_plus, &traces.phi_minus, params)?;
    rec.curv_inf = Some(spectral::sup_norm(&dealiased_curvature(state.eta.samples())));
    Ok(rec)
}

/// Derived series of a sampled trajectory; pure in its inputs.
pub struct DerivedSeries {
    pub di_dt: Vec<f64>,
    pub virial_residual: Vec<f64>,
    pub mass_drift: Vec<f64>,
    pub energy_drift: Vec<f64>,
    pub growth_margin: Vec<f64>,
    pub slope_envelope: Option<f64>,
    pub growth_integral_constant: Option<f64>,
}

pub fn derive_series(records: &[DiagnosticsRecord], sample_dt: f64, params: &PhysicalParams) -> DerivedSeries {
    let Some(first) = records.first() else {
        return DerivedSeries {
            di_dt: Vec::new(),
            virial_residual: Vec::new(),
            mass_drift: Vec::new(),
            energy_drift: Vec::new(),
            growth_margin: Vec::new(),
            slope_envelope: None,
            growth_integral_constant: None,
        };
    };
    let is: Vec<f64> = records.iter().map(|r| r.i).collect();
    let di_dt = fd_derivative(&is, sample_dt);
    let virial_residual = di_dt
        .iter()
        .zip(records)
        .map(|(d, r)| (0.5 * d - r.virial_rhs()).abs())
        .collect();
    let e0 = first.e;
    let i0 = first.i;
    let t0 = first.t;
    let mass_drift = records.iter().map(|r| (r.mass - first.mass).abs()).collect();
    let energy_drift = records.iter().map(|r| (r.e - e0).abs()).collect();
    let growth_margin = records.iter().map(|r| r.i - i0 - e0.abs() * (r.t - t0)).collect();

    let ag = params.atwood().abs() * params.g;
    let mut envelope = 0.0_f64;
    for r in records {
        let num = e0.abs() * (r.t - t0) + i0;
        if num <= 0.0 {
            continue;
        }
        let s = r.slope_inf.unwrap_or(0.0);
        let den = s * (1.0 + s).sqrt() * (e0.abs() + ag * s * s).sqrt();
        envelope = envelope.max(if den > 0.0 { num / den } else { f64::INFINITY });
    }

    let mut integral = 0.0;
    let mut gic = 0.0_f64;
    for (j, r) in records.iter().enumerate() {
        if j > 0 {
            let prev = &records[j - 1];
            integral += 0.5 * (r.f + prev.f) * (r.t - prev.t);
        }
        let s = r.slope_inf.unwrap_or(0.0);
        gic = gic.max(integral / ((1.0 + s).sqrt() * r.f + 1.0));
    }

    DerivedSeries {
        di_dt,
        virial_residual,
        mass_drift,
        energy_drift,
        growth_margin,
        slope_envelope: Some(envelope),
        growth_integral_constant: Some(gic),
    }
}

/// Integrate from `initial` to `config.t_final`, recording diagnostics every
/// `config.stride` steps. A failing step or diagnostic ends the run early and
/// is reported in `halt`; the report then covers the samples taken so far.
pub fn run_monitored(initial: &WaveState, params: &PhysicalParams, config: &RunConfig) -> Result<MonitorReport> {
    params.validate()?;
    let (steps, dt) = config.schedule()?;
    let mut state = initial.clone();
    let mut records = Vec::new();
    let mut halt = None;
    let mut max_iter = 0;
    let mut taken = 0;

    match sample_diagnostics(&mut state, params, &config.step) {
        Ok(r) => records.push(r),
        Err(e) => halt = Some(format!("initial diagnostics failed: {e}")),
    }
    let t0 = state.t;
    if halt.is_none() {
        for n in 1..=steps {
            match step_with(&state, params, dt, &config.step) {
                Ok(mut next) => {
                    next.t = t0 + n as f64 * dt;
                    state = next;
                    taken = n;
                }
                Err(e) => {
                    halt = Some(format!("step {n} at t = {:.6}: {e}", state.t));
                    break;
                }
            }
            if n % config.stride == 0 {
                match sample_diagnostics(&mut state, params, &config.step) {
                    Ok(r) => {
                        max_iter = max_iter.max(state.cached_traces().map_or(0, |t| t.iterations));
                        records.push(r);
                    }
                    Err(e) => {
                        halt = Some(format!("diagnostics at t = {:.6}: {e}", state.t));
                        break;
                    }
                }
            }
        }
    }

    let energy_condition = records
        .first()
        .map_or(EnergyCondition::Violated, |r| params.energy_condition(r.e, config.energy_tolerance));
    let derived = derive_series(&records, dt * config.stride as f64, params);
    Ok(MonitorReport {
        records,
        dt,
        steps: taken,
        di_dt: derived.di_dt,
        virial_residual: derived.virial_residual,
        mass_drift: derived.mass_drift,
        energy_drift: derived.energy_drift,
        energy_condition,
        growth_bound_applicable: params.is_rayleigh_taylor() && energy_condition == EnergyCondition::Satisfied,
        growth_margin: derived.growth_margin,
        slope_envelope: derived.slope_envelope,
        growth_integral_constant: derived.growth_integral_constant,
        max_trace_iterations: max_iter,
        halt,
        final_state: state,
    })
}

/// Monitored run with one diagnostics sample per step.
pub fn run_with_monitors(
    initial: &WaveState,
    params: &PhysicalParams,
    t_final: f64,
    dt: f64,
    order: usize,
) -> Result<MonitorReport> {
    run_monitored(initial, params, &RunConfig::new(t_final, dt, order))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fd_derivative_is_exact_for_quartics() {
        let h = 0.1;
        let f: Vec<f64> = (0..9).map(|i| (i as f64 * h).powi(4) - 2.0 * (i as f64 * h)).collect();
        let d = fd_derivative(&f, h);
        for (i, v) in d.iter().enumerate() {
            let x = i as f64 * h;
            assert!((v - (4.0 * x.powi(3) - 2.0)).abs() < 1e-11, "{i}: {v}");
        }
    }

    #[test]
    fn schedule_rounds_to_whole_samples() {
        let c = RunConfig::new(1.0, 0.3, 3).with_stride(2);
        let (steps, dt) = c.schedule().unwrap();
        assert_eq!(steps, 4);
        assert!((dt - 0.25).abs() < 1e-15);
    }
}
