//! Linear theory about the flat interface: dispersion relation, growth
//! rates, the Kelvin and Lannes stability criteria, and single-mode initial
//! data for the time integrator.

use std::f64::consts::TAU;
use std::io::Write;

use serde::Serialize;

use crate::dynamics::WaveState;
use crate::energetics::PhysicalParams;
use crate::error::{Error, Result};
use crate::geometry::GraphInterface;
use crate::harmonic::flat_symbol;

/// Effective flat symbol `S(k) = 1/(ρ̲⁺/g⁺ + ρ̲⁻/g⁻)` with
/// `g± = k tanh(kH±)`, so that the linearized system reads
/// `η_t = S ψ`, `ψ_t = −(Ag + σ̃k²) η`.
pub fn effective_symbol(k: f64, params: &PhysicalParams) -> Result<f64> {
    if !k.is_finite() || k == 0.0 {
        return Err(Error::InvalidInput(format!("undefined mode: wavenumber must be non-zero, got {k}")));
    }
    let gp = flat_symbol(k, params.h_plus);
    let gm = flat_symbol(k, params.h_minus);
    Ok(1.0 / (params.rho_bar_plus() / gp + params.rho_bar_minus() / gm))
}

/// `ω²(k) = (Ag + σ̃k²) S(k)`; negative values are growth rates squared.
pub fn dispersion(k: f64, params: &PhysicalParams) -> Result<f64> {
    params.validate()?;
    let s = effective_symbol(k, params)?;
    Ok((params.atwood() * params.g + params.sigma_tilde() * k * k) * s)
}

/// `√(−ω²)` for an unstable mode, `None` otherwise.
pub fn growth_rate(k: f64, params: &PhysicalParams) -> Result<Option<f64>> {
    let w2 = dispersion(k, params)?;
    Ok((w2 < 0.0).then(|| (-w2).sqrt()))
}

/// Smallest surface tension making mode `k` neutrally stable,
/// `g(ρ⁻−ρ⁺)/k²`; zero for stable stratification.
pub fn critical_sigma(k: f64, params: &PhysicalParams) -> Result<f64> {
    if !k.is_finite() || k == 0.0 {
        return Err(Error::InvalidInput(format!("undefined mode: wavenumber must be non-zero, got {k}")));
    }
    Ok((params.g * (params.rho_minus - params.rho_plus) / (k * k)).max(0.0))
}

/// Outcome of an inequality-type stability criterion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Criterion {
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs − rhs`; positive means stable.
    pub margin: f64,
    pub stable: bool,
}

impl Criterion {
    fn new(lhs: f64, rhs: f64) -> Self {
        Self {
            lhs,
            rhs,
            margin: lhs - rhs,
            stable: lhs > rhs,
        }
    }
}

fn shear_coefficient(params: &PhysicalParams) -> Result<f64> {
    params.validate()?;
    if params.sigma <= 0.0 {
        return Err(Error::Inapplicable("requires surface tension σ > 0".into()));
    }
    let reduced = params.rho_plus * params.rho_minus / params.total_density();
    Ok(reduced * reduced / (4.0 * params.sigma))
}

/// `g(ρ⁺−ρ⁻) > (1/4σ)(ρ⁺ρ⁻/(ρ⁺+ρ⁻))²|⟦u⟧|⁴`.
pub fn kelvin_criterion(params: &PhysicalParams, velocity_jump: f64) -> Result<Criterion> {
    let c = shear_coefficient(params)?;
    Ok(Criterion::new(
        params.g * (params.rho_plus - params.rho_minus),
        c * velocity_jump.powi(4),
    ))
}

/// `⟦−∂_yP⟧ > (1/4σ)(ρ⁺ρ⁻/(ρ⁺+ρ⁻))² c(η) ‖⟦V⟧‖⁴_∞` with the shape constant
/// `c(η)` supplied by the caller.
pub fn lannes_criterion(
    pressure_jump_deriv: f64,
    c_eta: f64,
    jump_sup: f64,
    params: &PhysicalParams,
) -> Result<Criterion> {
    let c = shear_coefficient(params)?;
    if !(c_eta.is_finite() && c_eta >= 0.0) {
        return Err(Error::InvalidInput(format!("shape constant must be non-negative, got {c_eta}")));
    }
    Ok(Criterion::new(pressure_jump_deriv, c * c_eta * jump_sup.abs().powi(4)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// `η = a cos(kx + φ)`, `ψ = 0`: both branches with equal weight.
    Oscillatory,
    /// Wave travelling towards `+x`; needs `ω² > 0`.
    Progressive,
    /// Pure `e^{λt}` growth; needs `ω² < 0`.
    Growing,
    Decaying,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSpec {
    pub k: u32,
    pub amplitude: f64,
    pub phase: f64,
    pub branch: Branch,
}

impl ModeSpec {
    pub fn new(k: u32, amplitude: f64, branch: Branch) -> Self {
        Self {
            k,
            amplitude,
            phase: 0.0,
            branch,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LinearState {
    pub state: WaveState,
    pub omega_sq: f64,
    /// Set when the amplitude exceeds `0.02·min(H⁺, H⁻, 1)`.
    pub warning: Option<String>,
}

/// Single-mode eigenvector of the linearized system sampled on `n` points.
pub fn make_linear_state(mode: &ModeSpec, params: &PhysicalParams, n: usize) -> Result<LinearState> {
    if mode.k == 0 {
        return Err(Error::InvalidInput("undefined mode: k must be at least 1".into()));
    }
    if 3 * mode.k as usize >= n {
        return Err(Error::InvalidInput(format!(
            "mode k = {} is not resolved without aliasing on {n} points",
            mode.k
        )));
    }
    if !(mode.amplitude.is_finite() && mode.phase.is_finite()) {
        return Err(Error::InvalidInput("amplitude and phase must be finite".into()));
    }
    let k = mode.k as f64;
    let w2 = dispersion(k, params)?;
    let s = effective_symbol(k, params)?;
    let a = mode.amplitude;
    // ψ = c_cos a cos(kx+φ) + c_sin a sin(kx+φ)
    let (c_cos, c_sin) = match mode.branch {
        Branch::Oscillatory => (0.0, 0.0),
        Branch::Progressive => {
            if w2 <= 0.0 {
                return Err(Error::InvalidInput(format!("no propagating branch at k = {}: ω² = {w2:.6e}", mode.k)));
            }
            (0.0, w2.sqrt() / s)
        }
        Branch::Growing | Branch::Decaying => {
            if w2 >= 0.0 {
                return Err(Error::InvalidInput(format!(
                    "no growing branch at k = {}: configuration is stable (ω² = {w2:.6e})",
                    mode.k
                )));
            }
            let lambda = (-w2).sqrt();
            let sign = if mode.branch == Branch::Growing { 1.0 } else { -1.0 };
            (sign * lambda / s, 0.0)
        }
    };
    let x = crate::spectral::grid(n, TAU);
    let theta: Vec<f64> = x.iter().map(|x| k * x + mode.phase).collect();
    let eta = GraphInterface::new(theta.iter().map(|t| a * t.cos()).collect())?;
    let psi = theta.iter().map(|t| a * (c_cos * t.cos() + c_sin * t.sin())).collect();
    let limit = 0.02 * params.h_plus.min(params.h_minus).min(1.0);
    let warning = (a.abs() > limit).then(|| {
        format!(
            "amplitude {a} exceeds the linear-validity threshold {limit}; nonlinear effects are not negligible"
        )
    });
    Ok(LinearState {
        state: WaveState::new(0.0, eta, psi)?,
        omega_sq: w2,
        warning,
    })
}

/// One row of a linear stability table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub k: u32,
    pub sigma: f64,
    pub velocity_jump: f64,
    pub omega_sq: f64,
    pub growth_rate: Option<f64>,
    pub critical_sigma: f64,
    pub kelvin_margin: Option<f64>,
}

/// Dispersion and Kelvin margins over `k ∈ ks`, `σ ∈ sigmas`,
/// `⟦u⟧ ∈ jumps`. The Kelvin column is empty where `σ = 0`.
pub fn criteria_sweep(base: &PhysicalParams, ks: &[u32], sigmas: &[f64], jumps: &[f64]) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::with_capacity(ks.len() * sigmas.len() * jumps.len());
    for &sigma in sigmas {
        let p = PhysicalParams { sigma, ..*base };
        p.validate()?;
        for &u in jumps {
            let kelvin = if sigma > 0.0 {
                Some(kelvin_criterion(&p, u)?.margin)
            } else {
                None
            };
            for &k in ks {
                let kf = k as f64;
                rows.push(SweepRow {
                    k,
                    sigma,
                    velocity_jump: u,
                    omega_sq: dispersion(kf, &p)?,
                    growth_rate: growth_rate(kf, &p)?,
                    critical_sigma: critical_sigma(kf, &p)?,
                    kelvin_margin: kelvin,
                });
            }
        }
    }
    Ok(rows)
}

pub fn write_sweep_csv(rows: &[SweepRow], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(rp: f64, rm: f64, sigma: f64, h: f64) -> PhysicalParams {
        PhysicalParams::new(rp, rm, 1.0, sigma, h, h).unwrap()
    }

    #[test]
    fn rayleigh_taylor_deep_water_rate() {
        let r = growth_rate(1.0, &p(1.0, 2.0, 0.0, f64::INFINITY)).unwrap().unwrap();
        assert!((r - (1.0_f64 / 3.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn equal_densities_are_neutral() {
        assert_eq!(dispersion(3.0, &p(1.0, 1.0, 0.0, 1.0)).unwrap(), 0.0);
    }

    #[test]
    fn coth_form() {
        // ω²(ρ⁺coth(kH⁺) + ρ⁻coth(kH⁻))/k = g(ρ⁺−ρ⁻) + σk²
        let params = PhysicalParams::new(1.3, 0.7, 2.0, 0.2, 0.8, 1.7).unwrap();
        for k in 1..6 {
            let k = k as f64;
            let w2 = dispersion(k, &params).unwrap();
            let coth = |x: f64| 1.0 / x.tanh();
            let lhs = w2 * (params.rho_plus * coth(k * params.h_plus) + params.rho_minus * coth(k * params.h_minus)) / k;
            let rhs = params.g * (params.rho_plus - params.rho_minus) + params.sigma * k * k;
            assert!((lhs - rhs).abs() < 1e-12 * rhs.abs().max(1.0));
        }
    }

    #[test]
    fn critical_sigma_changes_sign() {
        let base = p(1.0, 2.0, 0.0, 1.0);
        let sc = critical_sigma(2.0, &base).unwrap();
        let below = PhysicalParams { sigma: 0.9 * sc, ..base };
        let above = PhysicalParams { sigma: 1.1 * sc, ..base };
        assert!(dispersion(2.0, &below).unwrap() < 0.0);
        assert!(dispersion(2.0, &above).unwrap() > 0.0);
    }

    #[test]
    fn zero_wavenumber_is_rejected() {
        assert!(dispersion(0.0, &p(1.0, 2.0, 0.0, 1.0)).is_err());
    }

    #[test]
    fn kelvin_examples() {
        let params = PhysicalParams::new(2.0, 1.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        let c = kelvin_criterion(&params, 0.0).unwrap();
        assert!(c.stable && c.margin == 1.0);
        let c = kelvin_criterion(&params, 2.0).unwrap();
        assert!((c.rhs - 16.0 / 9.0).abs() < 1e-15 && !c.stable);
        assert!(matches!(
            kelvin_criterion(&PhysicalParams { sigma: 0.0, ..params }, 1.0),
            Err(Error::Inapplicable(_))
        ));
    }

    #[test]
    fn lannes_examples() {
        let params = PhysicalParams::new(2.0, 1.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        let c = lannes_criterion(1.0, 1.0, 2.0, &params).unwrap();
        assert!((c.margin - (1.0 - 16.0 / 9.0)).abs() < 1e-15 && !c.stable);
        assert!(lannes_criterion(0.3, 0.0, 5.0, &params).unwrap().stable);
        assert!(!lannes_criterion(-0.1, 1.0, 0.0, &params).unwrap().stable);
    }

    #[test]
    fn zero_amplitude_gives_zero_state() {
        let s = make_linear_state(&ModeSpec::new(1, 0.0, Branch::Oscillatory), &p(2.0, 1.0, 0.0, 1.0), 16).unwrap();
        assert!(s.state.eta.samples().iter().chain(&s.state.psi).all(|v| *v == 0.0));
        assert!(s.warning.is_none());
    }

    #[test]
    fn growing_mode_needs_instability() {
        assert!(make_linear_state(&ModeSpec::new(1, 1e-3, Branch::Growing), &p(2.0, 1.0, 0.0, 1.0), 16).is_err());
        let s = make_linear_state(&ModeSpec::new(1, 1e-3, Branch::Growing), &p(1.0, 2.0, 0.0, 1.0), 16).unwrap();
        assert!(s.omega_sq < 0.0);
    }

    #[test]
    fn large_amplitude_warns() {
        let s = make_linear_state(&ModeSpec::new(1, 0.1, Branch::Oscillatory), &p(2.0, 1.0, 0.0, 1.0), 16).unwrap();
        assert!(s.warning.is_some());
    }
}
