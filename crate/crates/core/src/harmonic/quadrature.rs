//! Volume integrals over a layer bounded by a graph interface.
//!
//! Trapezoid rule in x; in y, composite Gauss–Legendre panels whose widths
//! double away from the interface, where harmonic fields vary fastest.

use std::f64::consts::{PI, TAU};

use once_cell::sync::Lazy;

use crate::error::{Error, Result};
use crate::geometry::GraphInterface;
use crate::harmonic::layer::{FieldSample, LayerField, LayerSpec, Scratch, Side};

pub const GL_NODES: usize = 64;
const FIRST_PANEL: f64 = 0.25;

static GAUSS_LEGENDRE: Lazy<(Vec<f64>, Vec<f64>)> = Lazy::new(|| gauss_legendre(GL_NODES));

/// Nodes and weights on `[−1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Integrand selector for [`volume_quadrature`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Integrand {
    GradSq,
    GradXSq,
    GradYSq,
    Y,
    One,
    /// `∂_y(yφ) = φ + yφ_y`.
    DyYPhi,
}

impl Integrand {
    fn eval(self, y: f64, s: &FieldSample) -> f64 {
        match self {
            Integrand::GradSq => s.phi_x * s.phi_x + s.phi_y * s.phi_y,
            Integrand::GradXSq => s.phi_x * s.phi_x,
            Integrand::GradYSq => s.phi_y * s.phi_y,
            Integrand::Y => y,
            Integrand::One => 1.0,
            Integrand::DyYPhi => s.phi + y * s.phi_y,
        }
    }

    fn needs_field(self) -> bool {
        !matches!(self, Integrand::Y | Integrand::One)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    /// Bound on the part of the integral discarded by truncating an infinite
    /// layer. Zero for finite layers and for integrands that are defined on
    /// the truncated region itself (`Y`, `One`, `DyYPhi`).
    pub truncation_bound: f64,
}

/// Quadrature nodes of one column: heights and weights (including `dx`).
fn column_nodes(side: Side, eta: f64, h: f64, dx: f64, ys: &mut Vec<f64>, ws: &mut Vec<f64>) {
    let (gx, gw) = &*GAUSS_LEGENDRE;
    ys.clear();
    ws.clear();
    let total = match side {
        Side::Lower => eta + h,
        Side::Upper => h - eta,
    };
    let dir = match side {
        Side::Lower => -1.0,
        Side::Upper => 1.0,
    };
    let (mut a, mut width) = (0.0, FIRST_PANEL);
    while a < total {
        let b = (a + width).min(total);
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        for (x, w) in gx.iter().zip(gw) {
            ys.push(eta + dir * (mid + half * x));
            ws.push(w * half * dx);
        }
        a = b;
        width *= 2.0;
    }
}

fn check_inside(layer: &LayerSpec, interface: &GraphInterface, h: f64) -> Result<()> {
    for (x, &e) in interface.x_grid().iter().zip(interface.samples()) {
        let inside = match layer.side {
            Side::Lower => e > -h,
            Side::Upper => e < h,
        };
        if !inside {
            return Err(Error::Domain { x: *x, y: e });
        }
    }
    Ok(())
}

/// Integrate a field quantity over the layer between the interface and the
/// bottom (or lid, or truncation line for infinite layers).
pub fn volume_quadrature(field: &LayerField, interface: &GraphInterface, integrand: Integrand) -> Result<Quadrature> {
    Ok(volume_quadratures(field, interface, &[integrand])?[0])
}

/// Several integrands in one sweep over the quadrature nodes.
pub fn volume_quadratures(
    field: &LayerField,
    interface: &GraphInterface,
    integrands: &[Integrand],
) -> Result<Vec<Quadrature>> {
    let n = interface.require_1d()?;
    let layer = *field.layer();
    let eta = interface.samples();
    let h = layer.integration_depth(layer.reach(eta))?;
    check_inside(&layer, interface, h)?;
    let dx = TAU / n as f64;
    let xs = interface.x_grid();
    let mut scratch = Scratch::new(field.coefficients().len());
    let (mut ys, mut ws) = (Vec::new(), Vec::new());
    let mut samples = Vec::new();
    let mut totals = vec![0.0; integrands.len()];
    let need_field = integrands.iter().any(|i| i.needs_field());
    for (x, &e) in xs.iter().zip(eta) {
        column_nodes(layer.side, e, h, dx, &mut ys, &mut ws);
        samples.clear();
        samples.resize(ys.len(), FieldSample::default());
        if need_field {
            field.column_unchecked(*x, &ys, &mut samples, &mut scratch);
        }
        for (total, integrand) in totals.iter_mut().zip(integrands) {
            *total += ys
                .iter()
                .zip(&ws)
                .zip(&samples)
                .map(|((y, w), s)| w * integrand.eval(*y, s))
                .sum::<f64>();
        }
    }
    let tail = if layer.is_infinite() {
        field.tail_energy(h)
    } else {
        0.0
    };
    Ok(totals
        .into_iter()
        .zip(integrands)
        .map(|(value, integrand)| Quadrature {
            value,
            truncation_bound: match integrand {
                Integrand::GradSq => tail,
                Integrand::GradXSq | Integrand::GradYSq => 0.5 * tail,
                _ => 0.0,
            },
        })
        .collect())
}

/// Integrate a plain function of position over the layer region.
pub fn region_quadrature(
    layer: &LayerSpec,
    interface: &GraphInterface,
    f: impl Fn(f64, f64) -> f64,
) -> Result<f64> {
    let n = interface.require_1d()?;
    let eta = interface.samples();
    let h = layer.integration_depth(layer.reach(eta))?;
    check_inside(layer, interface, h)?;
    let dx = TAU / n as f64;
    let (mut ys, mut ws) = (Vec::new(), Vec::new());
    let mut total = 0.0;
    for (x, &e) in interface.x_grid().iter().zip(eta) {
        column_nodes(layer.side, e, h, dx, &mut ys, &mut ws);
        total += ys.iter().zip(&ws).map(|(y, w)| w * f(*x, *y)).sum::<f64>();
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(GL_NODES);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        let m: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(10)).sum();
        assert!((m - 2.0 / 11.0).abs() < 1e-14);
    }

    #[test]
    fn half_plane_dirichlet_energy() {
        let trace: Vec<f64> = spectral::grid(32, TAU).iter().map(|x| x.cos()).collect();
        let f = LayerField::extend(&trace, LayerSpec::lower(f64::INFINITY).unwrap(), 0.0).unwrap();
        let q = volume_quadrature(&f, &GraphInterface::flat(32), Integrand::GradSq).unwrap();
        assert!((q.value - PI).abs() < 1e-12);
        assert!(q.truncation_bound < 1e-14);
    }

    #[test]
    fn rectangle_area() {
        let h = 1.7;
        let f = LayerField::extend(&[0.0; 16], LayerSpec::lower(h).unwrap(), 0.0).unwrap();
        let q = volume_quadrature(&f, &GraphInterface::flat(16), Integrand::One).unwrap();
        assert!((q.value - TAU * h).abs() < 1e-13);
    }

    #[test]
    fn interface_below_the_bottom_is_rejected() {
        let layer = LayerSpec::lower(0.5).unwrap();
        let g = GraphInterface::from_fn(16, |x| -0.8 + 0.1 * x.cos()).unwrap();
        assert!(region_quadrature(&layer, &g, |_, _| 1.0).is_err());
    }
}
