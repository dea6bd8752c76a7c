use crate::dynamics::rhs::rhs_with;
use crate::dynamics::state::WaveState;
use crate::dynamics::traces::{TraceSolver, DYNAMICS_TAIL_THRESHOLD};
use crate::energetics::PhysicalParams;
use crate::error::{Error, Result};
use crate::geometry::GraphInterface;
use crate::linear;
use crate::spectral;

pub const DEFAULT_ORDER: usize = 3;
pub const DEFAULT_MODES: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOptions {
    pub solver: TraceSolver,
    /// Spectral tail ratio of `η` or `ψ` that aborts the run.
    pub tail_threshold: f64,
    /// Required clearance `min(H⁺, H⁻) − max|η|`.
    pub depth_margin: f64,
}

impl StepOptions {
    pub fn new(order: usize) -> Self {
        Self {
            solver: TraceSolver::new(order),
            tail_threshold: DYNAMICS_TAIL_THRESHOLD,
            depth_margin: 0.0,
        }
    }
}

fn axpy(base: &WaveState, dt: f64, k_eta: &[f64], k_psi: &[f64]) -> Result<WaveState> {
    let eta = base.eta.samples().iter().zip(k_eta).map(|(a, b)| a + dt * b).collect();
    let psi = base.psi.iter().zip(k_psi).map(|(a, b)| a + dt * b).collect();
    WaveState::new(base.t + dt, GraphInterface::new(eta)?, psi)
}

/// One classical Runge–Kutta step followed by zero-mass projection and the
/// resolution and depth checks.
pub fn step_with(state: &WaveState, params: &PhysicalParams, dt: f64, opts: &StepOptions) -> Result<WaveState> {
    if !(dt.is_finite() && dt != 0.0) {
        return Err(Error::InvalidInput(format!("time step must be finite and non-zero, got {dt}")));
    }
    state.eta.check_depth_margin(params.h_plus, params.h_minus, opts.depth_margin)?;
    let (k1, _) = rhs_with(state, params, &opts.solver)?;
    let s2 = axpy(state, 0.5 * dt, &k1.eta_t, &k1.psi_t)?;
    let (k2, _) = rhs_with(&s2, params, &opts.solver)?;
    let s3 = axpy(state, 0.5 * dt, &k2.eta_t, &k2.psi_t)?;
    let (k3, _) = rhs_with(&s3, params, &opts.solver)?;
    let s4 = axpy(state, dt, &k3.eta_t, &k3.psi_t)?;
    let (k4, _) = rhs_with(&s4, params, &opts.solver)?;
    let combine = |a: &[f64], b: &[f64], c: &[f64], d: &[f64]| -> Vec<f64> {
        (0..a.len()).map(|j| (a[j] + 2.0 * b[j] + 2.0 * c[j] + d[j]) / 6.0).collect()
    };
    let mut next = axpy(
        state,
        dt,
        &combine(&k1.eta_t, &k2.eta_t, &k3.eta_t, &k4.eta_t),
        &combine(&k1.psi_t, &k2.psi_t, &k3.psi_t, &k4.psi_t),
    )?;
    next.project_zero_mass();

    for (what, v) in [("elevation after step", next.eta.samples()), ("ψ after step", &next.psi[..])] {
        let tail = spectral::tail_ratio(v);
        if tail > opts.tail_threshold {
            return Err(Error::RefinementNeeded {
                what,
                tail,
                threshold: opts.tail_threshold,
            });
        }
    }
    next.eta.check_depth_margin(params.h_plus, params.h_minus, opts.depth_margin)?;
    Ok(next)
}

pub fn step(state: &WaveState, params: &PhysicalParams, dt: f64, order: usize) -> Result<WaveState> {
    step_with(state, params, dt, &StepOptions::new(order))
}

/// `min(0.25·h_x / c_max, 2/ω_max)` over the resolved wavenumbers, where
/// `c_max` is the largest linear phase speed and `ω_max` the largest
/// `√|ω²|`. The second bound keeps the stiffest mode well inside the
/// classical Runge–Kutta stability region.
pub fn default_dt(params: &PhysicalParams, n: usize) -> Result<f64> {
    let hx = std::f64::consts::TAU / n as f64;
    let kmax = (n / 2).saturating_sub(1).max(1);
    let mut cmax = 0.0_f64;
    let mut wmax = 0.0_f64;
    for k in 1..=kmax {
        let w = linear::dispersion(k as f64, params)?.abs().sqrt();
        cmax = cmax.max(w / k as f64);
        wmax = wmax.max(w);
    }
    let mut dt = f64::INFINITY;
    if cmax > 0.0 {
        dt = dt.min(0.25 * hx / cmax);
    }
    if wmax > 0.0 {
        dt = dt.min(2.0 / wmax);
    }
    if dt.is_infinite() {
        dt = 0.1;
    }
    Ok(dt)
}
