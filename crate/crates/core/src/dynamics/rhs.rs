use std::f64::consts::TAU;

use crate::dynamics::state::{Traces, WaveState};
use crate::dynamics::traces::TraceSolver;
use crate::energetics::PhysicalParams;
use crate::error::Result;
use crate::spectral;

/// Time derivatives of `(η, ψ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tendency {
    pub eta_t: Vec<f64>,
    pub psi_t: Vec<f64>,
}

/// `ρ̲⁻Q⁻ − ρ̲⁺Q⁺` with `Q = ½φ_x² − ½(η_t + η′φ_x)²/(1+η′²)`, the velocity
/// part of the Bernoulli jump. Evaluated on the padded grid.
pub(crate) fn bernoulli_velocity_jump(
    eta_x: &[f64],
    phi_plus_x: &[f64],
    phi_minus_x: &[f64],
    eta_t: &[f64],
    params: &PhysicalParams,
) -> Vec<f64> {
    let (rp, rm) = (params.rho_bar_plus(), params.rho_bar_minus());
    spectral::dealiased_map(&[eta_x, phi_plus_x, phi_minus_x, eta_t], |v| {
        let (ex, pp, pm, et) = (v[0], v[1], v[2], v[3]);
        let w = 1.0 + ex * ex;
        let q = |p: f64| 0.5 * p * p - 0.5 * (et + ex * p).powi(2) / w;
        rm * q(pm) - rp * q(pp)
    })
}

/// Curvature with the nonlinearity evaluated on the padded grid.
pub(crate) fn dealiased_curvature(eta: &[f64]) -> Vec<f64> {
    let d1 = spectral::derivative(eta, TAU);
    let d2 = spectral::second_derivative(eta, TAU);
    spectral::dealiased_map(&[&d1, &d2], |v| -v[1] / (1.0 + v[0] * v[0]).powf(1.5))
}

pub(crate) fn tendency_from_traces(state: &WaveState, traces: &Traces, params: &PhysicalParams) -> Tendency {
    let eta = state.eta.samples();
    let eta_t = traces.normal_velocity.clone();
    let eta_x = spectral::derivative(eta, TAU);
    let ppx = spectral::derivative(&traces.phi_plus, TAU);
    let pmx = spectral::derivative(&traces.phi_minus, TAU);
    let mut psi_t = bernoulli_velocity_jump(&eta_x, &ppx, &pmx, &eta_t, params);
    let ag = params.atwood() * params.g;
    for (p, e) in psi_t.iter_mut().zip(eta) {
        *p -= ag * e;
    }
    let st = params.sigma_tilde();
    if st != 0.0 {
        for (p, k) in psi_t.iter_mut().zip(dealiased_curvature(eta)) {
            *p -= st * k;
        }
    }
    Tendency { eta_t, psi_t }
}

/// Right-hand side of the two-layer system in `(η, ψ)` variables:
/// `η_t = G⁺φ⁺` and
/// `ψ_t = −Agη − σ̃κ + ρ̲⁻Q⁻ − ρ̲⁺Q⁺`.
pub fn rhs(state: &WaveState, params: &PhysicalParams, order: usize) -> Result<Tendency> {
    rhs_with(state, params, &TraceSolver::new(order)).map(|(t, _)| t)
}

pub fn rhs_with(state: &WaveState, params: &PhysicalParams, solver: &TraceSolver) -> Result<(Tendency, Traces)> {
    let traces = solver.solve(state, params)?;
    Ok((tendency_from_traces(state, &traces, params), traces))
}
