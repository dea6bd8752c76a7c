use std::f64::consts::TAU;

use super::diagnostics::DiagnosticsRecord;
use super::params::PhysicalParams;
use crate::error::{Error, Result};
use crate::geometry::{ArcCurve, GraphInterface, Interface, Orientation};
use crate::harmonic::{region_quadrature, volume_quadratures, Integrand, LayerField, LayerSpec, Side};
use crate::spectral;

/// Boundary integrals of the interface used by several functionals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceTerms {
    /// `Area(Σ)`, the length of the curve.
    pub area: f64,
    /// `∫_Σ |n·(0,1)|² dS`.
    pub ny_sq: f64,
    /// `∫_Σ |n·(0,1)| dS`.
    pub ny_abs: f64,
    /// `∫_Σ n·(0,y²) dS`.
    pub y_sq: f64,
    /// `∫_Σ n·(0,y) dS`.
    pub mass: f64,
}

pub fn surface_terms<'a>(interface: impl Into<Interface<'a>>) -> Result<SurfaceTerms> {
    match interface.into() {
        Interface::Graph(g) => {
            let eta = g.samples();
            let ds = g.surface_element()?;
            let ny_sq: Vec<f64> = ds.iter().map(|d| 1.0 / d).collect();
            Ok(SurfaceTerms {
                area: spectral::integrate(&ds, TAU),
                ny_sq: spectral::integrate(&ny_sq, TAU),
                ny_abs: TAU,
                y_sq: spectral::integrate(&eta.iter().map(|e| e * e).collect::<Vec<_>>(), TAU),
                mass: spectral::integrate(eta, TAU),
            })
        }
        Interface::Curve(c) => {
            let (da, _) = c.tangent();
            let l = c.length();
            let b = c.beta();
            let over = |f: &dyn Fn(usize) -> f64| spectral::integrate(&(0..c.n()).map(f).collect::<Vec<_>>(), l);
            Ok(SurfaceTerms {
                area: l,
                ny_sq: over(&|j| da[j] * da[j]),
                ny_abs: over(&|j| da[j].abs()),
                y_sq: over(&|j| b[j] * b[j] * da[j]),
                mass: over(&|j| b[j] * da[j]),
            })
        }
    }
}

/// `M = ∫_Σ n·(0,y) dS`: `∫η dx` for graphs, `∫β α_s ds` for curves.
pub fn mass<'a>(interface: impl Into<Interface<'a>>) -> Result<f64> {
    match interface.into() {
        Interface::Graph(g) => Ok(spectral::integrate(g.samples(), TAU)),
        Interface::Curve(c) => Ok(surface_terms(c)?.mass),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassCrosscheck {
    pub surface: f64,
    /// `∬_{Ω⁺_h} dxdy − 2πh⁺`.
    pub volume_plus: f64,
    /// `−(∬_{Ω⁻_h} dxdy − 2πh⁻)`.
    pub volume_minus: f64,
    pub residual: f64,
}

/// Compare the surface form of the mass with the volume form in each
/// (possibly truncated) layer.
pub fn mass_crosscheck(graph: &GraphInterface, lower: &LayerSpec, upper: &LayerSpec) -> Result<MassCrosscheck> {
    let surface = mass(graph)?;
    let eta = graph.samples();
    let h_plus = lower.integration_depth(lower.reach(eta))?;
    let h_minus = upper.integration_depth(upper.reach(eta))?;
    let volume_plus = region_quadrature(lower, graph, |_, _| 1.0)? - TAU * h_plus;
    let volume_minus = -(region_quadrature(upper, graph, |_, _| 1.0)? - TAU * h_minus);
    Ok(MassCrosscheck {
        surface,
        volume_plus,
        volume_minus,
        residual: (surface - volume_plus).abs().max((surface - volume_minus).abs()),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialEnergy {
    /// `(Ag/2) ∫_Σ n·(0,y²) dS`.
    pub grav: f64,
    /// `σ/(ρ⁺+ρ⁻) (Area(Σ) − 2π)`.
    pub surf: f64,
}

impl PotentialEnergy {
    pub fn total(&self) -> f64 {
        self.grav + self.surf
    }
}

pub fn potential_energy<'a>(interface: impl Into<Interface<'a>>, params: &PhysicalParams) -> Result<PotentialEnergy> {
    let s = surface_terms(interface)?;
    Ok(PotentialEnergy {
        grav: 0.5 * params.atwood() * params.g * s.y_sq,
        surf: params.sigma_tilde() * (s.area - TAU),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureIdentity {
    /// `∫_Σ n·(0,y) κ dS`.
    pub lhs: f64,
    /// `Area(Σ) − ∫_Σ |n·(0,1)|² dS`.
    pub rhs: f64,
    pub residual: f64,
}

pub fn curvature_identity_check<'a>(interface: impl Into<Interface<'a>>) -> Result<CurvatureIdentity> {
    let interface = interface.into();
    let lhs = match interface {
        Interface::Graph(g) => {
            let kappa = g.curvature()?;
            let f: Vec<f64> = g.samples().iter().zip(&kappa).map(|(e, k)| e * k).collect();
            spectral::integrate(&f, TAU)
        }
        Interface::Curve(c) => {
            let kappa = c.curvature()?;
            let (da, _) = c.tangent();
            let f: Vec<f64> = (0..c.n()).map(|j| c.beta()[j] * da[j] * kappa[j]).collect();
            spectral::integrate(&f, c.length())
        }
    };
    let s = surface_terms(interface)?;
    let rhs = s.area - s.ny_sq;
    Ok(CurvatureIdentity {
        lhs,
        rhs,
        residual: (lhs - rhs).abs(),
    })
}

/// Terms of `∫(1+|n_y|²)dS ≥ 2∫|n_y|dS ≥ 2(2π)` and the resulting `R_s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RsChain {
    pub surface_sum: f64,
    pub twice_abs_normal: f64,
    pub floor: f64,
    pub r_s: f64,
}

impl RsChain {
    pub fn holds(&self, tol: f64) -> bool {
        self.surface_sum >= self.twice_abs_normal - tol && self.twice_abs_normal >= self.floor - tol && self.r_s >= -tol
    }
}

pub fn rs_nonnegativity_check<'a>(interface: impl Into<Interface<'a>>, params: &PhysicalParams) -> Result<RsChain> {
    let s = surface_terms(interface)?;
    let surface_sum = s.area + s.ny_sq;
    let floor = 2.0 * TAU;
    Ok(RsChain {
        surface_sum,
        twice_abs_normal: 2.0 * s.ny_abs,
        floor,
        r_s: 0.5 * params.sigma_tilde() * (surface_sum - floor),
    })
}

/// `ψ = ρ̲⁺ φ⁺|_Σ − ρ̲⁻ φ⁻|_Σ`.
pub fn psi_trace(phi_plus: &[f64], phi_minus: &[f64], params: &PhysicalParams) -> Result<Vec<f64>> {
    if phi_plus.len() != phi_minus.len() {
        return Err(Error::GridMismatch {
            left: phi_plus.len(),
            right: phi_minus.len(),
        });
    }
    let (a, b) = (params.rho_bar_plus(), params.rho_bar_minus());
    Ok(phi_plus.iter().zip(phi_minus).map(|(p, m)| a * p - b * m).collect())
}

/// `I = ∫_Σ n·(0, yψ) dS`: `∫ηψ dx` for graphs, `∫β α_s ψ ds` for curves
/// (with `ψ` sampled at the curve nodes).
pub fn virial_functional<'a>(interface: impl Into<Interface<'a>>, psi: &[f64]) -> Result<f64> {
    match interface.into() {
        Interface::Graph(g) => {
            check_len(g.n_modes(), psi.len())?;
            let f: Vec<f64> = g.samples().iter().zip(psi).map(|(e, p)| e * p).collect();
            Ok(spectral::integrate(&f, TAU))
        }
        Interface::Curve(c) => {
            check_len(c.n(), psi.len())?;
            let (da, _) = c.tangent();
            let f: Vec<f64> = (0..c.n()).map(|j| c.beta()[j] * da[j] * psi[j]).collect();
            Ok(spectral::integrate(&f, c.length()))
        }
    }
}

fn check_len(left: usize, right: usize) -> Result<()> {
    if left != right {
        return Err(Error::GridMismatch { left, right });
    }
    Ok(())
}

/// Gradient integrals of one layer's field.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LayerEnergies {
    /// `∬ |∂_xφ|²`.
    pub grad_x_sq: f64,
    /// `∬ |∂_yφ|²`.
    pub grad_y_sq: f64,
    /// `∫_Γ |∂_xφ|² dx` on the flat bottom (zero for infinite layers).
    pub bottom_grad_x_sq: f64,
    pub truncation_bound: f64,
}

pub fn layer_energies(field: &LayerField, graph: &GraphInterface) -> Result<LayerEnergies> {
    let q = volume_quadratures(field, graph, &[Integrand::GradXSq, Integrand::GradYSq])?;
    let layer = field.layer();
    let bottom_grad_x_sq = if layer.is_infinite() {
        0.0
    } else {
        let y = match layer.side {
            Side::Lower => -layer.depth,
            Side::Upper => layer.depth,
        };
        let m = 2 * field.bandwidth() + 2;
        let vals: Vec<f64> = spectral::grid(m, TAU)
            .iter()
            .map(|&x| field.grad(x, y).map(|(gx, _)| gx * gx))
            .collect::<Result<_>>()?;
        spectral::integrate(&vals, TAU)
    };
    Ok(LayerEnergies {
        grad_x_sq: q[0].value,
        grad_y_sq: q[1].value,
        bottom_grad_x_sq,
        truncation_bound: q[0].truncation_bound + q[1].truncation_bound,
    })
}

/// Energy functionals of a graph state.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Energies {
    pub e_k: f64,
    pub e_p_grav: f64,
    pub e_p_surf: f64,
    pub etilde_k: f64,
    pub r_b_plus: f64,
    pub r_b_minus: f64,
    pub r_s: f64,
    /// Bound on the kinetic energy lost to truncating infinite layers.
    pub truncation_bound: f64,
}

impl Energies {
    pub fn e_p(&self) -> f64 {
        self.e_p_grav + self.e_p_surf
    }

    pub fn e(&self) -> f64 {
        self.e_k + self.e_p()
    }
}

/// Harmonic extensions of both traces, for the layers with nonzero density.
pub fn layer_fields(
    graph: &GraphInterface,
    phi_plus: &[f64],
    phi_minus: &[f64],
    params: &PhysicalParams,
) -> Result<(Option<LayerField>, Option<LayerField>)> {
    let plus = if params.rho_plus > 0.0 {
        Some(LayerField::from_graph_trace(params.lower_layer(), graph, phi_plus)?)
    } else {
        None
    };
    let minus = if params.rho_minus > 0.0 {
        Some(LayerField::from_graph_trace(params.upper_layer(), graph, phi_minus)?)
    } else {
        None
    };
    Ok((plus, minus))
}

pub fn energies(
    graph: &GraphInterface,
    phi_plus: &[f64],
    phi_minus: &[f64],
    params: &PhysicalParams,
) -> Result<Energies> {
    check_len(graph.n_modes(), phi_plus.len())?;
    check_len(graph.n_modes(), phi_minus.len())?;
    let (fp, fm) = layer_fields(graph, phi_plus, phi_minus, params)?;
    let lp = fp.map(|f| layer_energies(&f, graph)).transpose()?.unwrap_or_default();
    let lm = fm.map(|f| layer_energies(&f, graph)).transpose()?.unwrap_or_default();
    let (rp, rm) = (params.rho_bar_plus(), params.rho_bar_minus());
    let pot = potential_energy(graph, params)?;
    let chain = rs_nonnegativity_check(graph, params)?;
    let bottom = |rho: f64, h: f64, l: &LayerEnergies| if h.is_finite() { 0.25 * rho * h * l.bottom_grad_x_sq } else { 0.0 };
    Ok(Energies {
        e_k: 0.5 * (rp * (lp.grad_x_sq + lp.grad_y_sq) + rm * (lm.grad_x_sq + lm.grad_y_sq)),
        e_p_grav: pot.grav,
        e_p_surf: pot.surf,
        etilde_k: rp * (0.25 * lp.grad_x_sq + 0.75 * lp.grad_y_sq) + rm * (0.25 * lm.grad_x_sq + 0.75 * lm.grad_y_sq),
        r_b_plus: bottom(rp, params.h_plus, &lp),
        r_b_minus: bottom(rm, params.h_minus, &lm),
        r_s: chain.r_s,
        truncation_bound: 0.5 * (rp * lp.truncation_bound + rm * lm.truncation_bound),
    })
}

/// `F = |E| + |A| g ‖η‖²`.
pub fn growth_functional(energy: f64, graph: &GraphInterface, params: &PhysicalParams) -> f64 {
    let eta_sq = spectral::integrate(&graph.samples().iter().map(|e| e * e).collect::<Vec<_>>(), TAU);
    energy.abs() + params.atwood().abs() * params.g * eta_sq
}

/// Full diagnostics of a graph state from its per-layer traces.
pub fn diagnostics(
    t: f64,
    graph: &GraphInterface,
    phi_plus: &[f64],
    phi_minus: &[f64],
    params: &PhysicalParams,
) -> Result<DiagnosticsRecord> {
    let en = energies(graph, phi_plus, phi_minus, params)?;
    let psi = psi_trace(phi_plus, phi_minus, params)?;
    let e = en.e();
    Ok(DiagnosticsRecord {
        t,
        mass: mass(graph)?,
        e_k: en.e_k,
        e_p: en.e_p(),
        e,
        etilde_k: en.etilde_k,
        r_b_plus: en.r_b_plus,
        r_b_minus: en.r_b_minus,
        r_s: en.r_s,
        i: virial_functional(graph, &psi)?,
        f: growth_functional(e, graph, params),
        slope_inf: Some(graph.slope_inf()?),
        curv_inf: None,
    })
}

/// `‖φ|_Σ − m‖_{L²} / (√(1+‖η′‖∞) ‖∇φ‖_{L²(Ω)})` with `m` the mean trace.
pub fn trace_estimate_ratio(graph: &GraphInterface, field: &LayerField) -> Result<f64> {
    let trace = field.trace_on(graph)?;
    let m = spectral::mean(&trace);
    let num = spectral::l2_norm(&trace.iter().map(|v| v - m).collect::<Vec<_>>(), TAU);
    if num == 0.0 {
        return Ok(0.0);
    }
    let q = volume_quadratures(field, graph, &[Integrand::GradSq])?;
    let energy = q[0].value;
    if energy <= 0.0 {
        return Err(Error::Degenerate("non-constant trace with zero Dirichlet energy".into()));
    }
    Ok(num / ((1.0 + graph.slope_inf()?).sqrt() * energy.sqrt()))
}

/// `‖f‖_{L²(Σ)} / (L ε^{−1/2} ‖∇F‖_{L²(Ω)})` for an interface curve that
/// wraps once around the torus, with `f` the de-meaned trace of `F`.
///
/// The Dirichlet energy is obtained from Green's identity on the curve,
/// `∬|∇F|² = ±∫_Σ F ∂_nF ds`, since the bottom flux term vanishes.
pub fn trace_estimate_ratio_curve(curve: &ArcCurve, field: &LayerField, epsilon: f64) -> Result<f64> {
    if curve.winding().abs() != 1 {
        return Err(Error::Unsupported("curve trace estimate needs a curve winding once".into()));
    }
    let (nx, ny) = curve.normal();
    let mut trace = Vec::with_capacity(curve.n());
    let mut flux = Vec::with_capacity(curve.n());
    for j in 0..curve.n() {
        let s = field.sample(curve.alpha()[j], curve.beta()[j])?;
        trace.push(s.phi);
        flux.push(s.phi * (nx[j] * s.phi_x + ny[j] * s.phi_y));
    }
    let l = curve.length();
    let m = spectral::mean(&trace);
    let num = spectral::l2_norm(&trace.iter().map(|v| v - m).collect::<Vec<_>>(), l);
    if num == 0.0 {
        return Ok(0.0);
    }
    // The curve normal points out of the lower fluid for positive orientation.
    let outward = match (field.layer().side, curve.orientation()) {
        (Side::Lower, Orientation::Positive) | (Side::Upper, Orientation::Negative) => 1.0,
        _ => -1.0,
    };
    let energy = outward * spectral::integrate(&flux, l);
    if energy <= 0.0 {
        return Err(Error::Degenerate("non-constant trace with zero Dirichlet energy".into()));
    }
    Ok(num * epsilon.sqrt() / (l * energy.sqrt()))
}
