use super::curve::{chord_arc_constant, epsilon_of_state, torus_dx, ArcCurve};
use crate::error::{Error, Result};
use crate::spectral;

pub const DEFAULT_N0: f64 = 128.0;

/// Normal coordinates `Φ(s, r) = γ(s) + r·n(s)` on `|r| ≤ ε`.
#[derive(Debug, Clone)]
pub struct TubularMap {
    base: ArcCurve,
    epsilon: f64,
    n0: f64,
}

/// Sampling density of the injectivity check.
#[derive(Debug, Clone, Copy)]
pub struct TubularGrid {
    pub s_nodes: usize,
    pub r_nodes: usize,
}

impl Default for TubularGrid {
    fn default() -> Self {
        Self {
            s_nodes: 256,
            r_nodes: 9,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TubularReport {
    pub epsilon: f64,
    pub min_jacobian: f64,
    pub max_jacobian: f64,
    /// Smallest `|Φ(p) − Φ(q)| / |p − q|` over non-adjacent grid pairs.
    pub min_separation_ratio: f64,
    /// `4/(N0‖κ‖∞)`; infinite for straight curves.
    pub width_bound: f64,
    pub pairs_checked: usize,
}

impl TubularReport {
    pub fn jacobian_in_band(&self) -> bool {
        self.min_jacobian >= 0.5 - 1e-12 && self.max_jacobian <= 1.5 + 1e-12
    }
}

impl TubularMap {
    pub fn new(base: ArcCurve, epsilon: f64, n0: f64) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(Error::InvalidInput(format!("tube half-width must be positive, got {epsilon}")));
        }
        Ok(Self { base, epsilon, n0 })
    }

    /// Tube whose half-width is `c0/(N0(‖κ‖∞+1))`.
    pub fn admissible(base: ArcCurve, n0: f64) -> Result<Self> {
        let epsilon = epsilon_of_state(&base, f64::INFINITY, n0)?;
        Self::new(base, epsilon, n0)
    }

    pub fn base(&self) -> &ArcCurve {
        &self.base
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn n0(&self) -> f64 {
        self.n0
    }

    /// Largest half-width with `|rκ| ≤ 1/2` guaranteed, `c0/(N0‖κ‖∞)`.
    pub fn sharp_epsilon(curve: &ArcCurve, n0: f64) -> Result<f64> {
        let c0 = chord_arc_constant(curve)?.c0;
        Ok(c0 / (n0 * curve.curvature_inf()?))
    }
}

/// Check the Jacobian `1 + rκ` over a grid and search for pairs of distinct
/// grid points that the map sends (nearly) to the same place.
pub fn tubular_map_check(map: &TubularMap, grid: TubularGrid) -> Result<TubularReport> {
    let curve = &map.base;
    let ns = grid.s_nodes.max(8);
    let nr = grid.r_nodes.max(2) | 1;
    let length = curve.length();
    let kappa = spectral::resample(&curve.curvature()?, ns);
    let alpha = curve_alpha_resampled(curve, ns);
    let beta = spectral::resample(curve.beta(), ns);
    let (nx, ny) = {
        let (nx, ny) = curve.normal();
        (spectral::resample(&nx, ns), spectral::resample(&ny, ns))
    };
    let hs = length / ns as f64;
    let hr = 2.0 * map.epsilon / (nr - 1) as f64;
    let r_at = |j: usize| -map.epsilon + j as f64 * hr;

    let mut min_j = f64::INFINITY;
    let mut max_j = f64::NEG_INFINITY;
    for i in 0..ns {
        for j in 0..nr {
            let r = r_at(j);
            let jac = 1.0 + r * kappa[i];
            if jac <= 0.0 {
                return Err(Error::JacobianDegenerate {
                    s: i as f64 * hs,
                    r,
                    j: jac,
                });
            }
            min_j = min_j.min(jac);
            max_j = max_j.max(jac);
        }
    }

    let points: Vec<(f64, f64, usize, usize)> = (0..ns)
        .flat_map(|i| (0..nr).map(move |j| (i, j)))
        .map(|(i, j)| {
            let r = r_at(j);
            (alpha[i] + r * nx[i], beta[i] + r * ny[i], i, j)
        })
        .collect();
    let threshold = 0.5 * (hs * min_j).min(hr);
    let mut min_ratio = f64::INFINITY;
    let mut pairs = 0usize;
    for (a, p) in points.iter().enumerate() {
        for q in &points[a + 1..] {
            let di = {
                let d = p.2.abs_diff(q.2);
                d.min(ns - d)
            };
            let dj = p.3.abs_diff(q.3);
            if di <= 1 && dj <= 1 {
                continue;
            }
            pairs += 1;
            let dist = torus_dx(p.0 - q.0).hypot(p.1 - q.1);
            let param = (di as f64 * hs).hypot(dj as f64 * hr);
            min_ratio = min_ratio.min(dist / param);
            if dist < threshold {
                return Err(Error::Collision {
                    s1: p.2 as f64 * hs,
                    r1: r_at(p.3),
                    s2: q.2 as f64 * hs,
                    r2: r_at(q.3),
                    distance: dist,
                });
            }
        }
    }
    let kappa_inf = spectral::sup_norm(&kappa);
    Ok(TubularReport {
        epsilon: map.epsilon,
        min_jacobian: min_j,
        max_jacobian: max_j,
        min_separation_ratio: min_ratio,
        width_bound: 4.0 / (map.n0 * kappa_inf),
        pairs_checked: pairs,
    })
}

fn curve_alpha_resampled(curve: &ArcCurve, ns: usize) -> Vec<f64> {
    let slope = std::f64::consts::TAU * curve.winding() as f64 / curve.length();
    let periodic: Vec<f64> = curve
        .alpha()
        .iter()
        .zip(curve.s_grid())
        .map(|(a, s)| a - slope * s)
        .collect();
    spectral::resample(&periodic, ns)
        .into_iter()
        .zip(spectral::grid(ns, curve.length()))
        .map(|(a, s)| a + slope * s)
        .collect()
}
