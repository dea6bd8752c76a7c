use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::spectral;

/// Spectral tail ratio above which an interface is considered under-resolved.
pub const TAIL_THRESHOLD: f64 = 1e-8;

/// Periodic elevation `y = η(x)` sampled on a uniform grid of the torus.
///
/// Samples are stored row-major with one extent per axis in `shape`; every
/// differential operation is implemented for one horizontal dimension and
/// reports `Unsupported` otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphInterface {
    samples: Vec<f64>,
    shape: Vec<usize>,
}

impl GraphInterface {
    pub fn new(samples: Vec<f64>) -> Result<Self> {
        let n = samples.len();
        Self::with_shape(samples, vec![n])
    }

    pub fn with_shape(samples: Vec<f64>, shape: Vec<usize>) -> Result<Self> {
        if shape.is_empty() || shape.iter().any(|&n| n < 4) {
            return Err(Error::InvalidInput(format!(
                "interface grid needs at least 4 samples per axis, got {shape:?}"
            )));
        }
        let total: usize = shape.iter().product();
        if total != samples.len() {
            return Err(Error::GridMismatch {
                left: samples.len(),
                right: total,
            });
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("interface samples must be finite".into()));
        }
        Ok(Self { samples, shape })
    }

    /// Sample `f` on the uniform one-dimensional grid of `n` points.
    pub fn from_fn(n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(spectral::grid(n, TAU).into_iter().map(f).collect())
    }

    pub fn flat(n: usize) -> Self {
        Self {
            samples: vec![0.0; n.max(4)],
            shape: vec![n.max(4)],
        }
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn n_modes(&self) -> usize {
        self.samples.len()
    }

    pub fn period(&self) -> f64 {
        TAU
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn x_grid(&self) -> Vec<f64> {
        spectral::grid(self.samples.len(), TAU)
    }

    pub(crate) fn require_1d(&self) -> Result<usize> {
        if self.shape.len() == 1 {
            Ok(self.samples.len())
        } else {
            Err(Error::Unsupported(format!(
                "operation implemented for one horizontal dimension, interface has {}",
                self.shape.len()
            )))
        }
    }

    pub fn mean(&self) -> f64 {
        spectral::mean(&self.samples)
    }

    pub fn sup_abs(&self) -> f64 {
        spectral::sup_norm(&self.samples)
    }

    pub fn tail_ratio(&self) -> Result<f64> {
        self.require_1d()?;
        Ok(spectral::tail_ratio(&self.samples))
    }

    pub fn check_resolved(&self, threshold: f64) -> Result<()> {
        let tail = self.tail_ratio()?;
        if tail > threshold {
            return Err(Error::RefinementNeeded {
                what: "interface elevation",
                tail,
                threshold,
            });
        }
        Ok(())
    }

    pub fn slope(&self) -> Result<Vec<f64>> {
        self.require_1d()?;
        Ok(spectral::derivative(&self.samples, TAU))
    }

    pub fn slope_inf(&self) -> Result<f64> {
        Ok(spectral::sup_norm(&self.slope()?))
    }

    /// `κ = −η″/(1+η′²)^{3/2}`, so that a crest (η″ < 0) has positive curvature
    /// and the tangent turns as `τ_s = −κ n` with the upward normal.
    pub fn curvature(&self) -> Result<Vec<f64>> {
        self.check_resolved(TAIL_THRESHOLD)?;
        self.curvature_unchecked()
    }

    pub(crate) fn curvature_unchecked(&self) -> Result<Vec<f64>> {
        let d1 = self.slope()?;
        let d2 = spectral::second_derivative(&self.samples, TAU);
        Ok(d1
            .iter()
            .zip(&d2)
            .map(|(p, q)| -q / (1.0 + p * p).powf(1.5))
            .collect())
    }

    /// Upward unit normal `(−η′, 1)/√(1+η′²)` as separate component arrays.
    pub fn normal(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        let d1 = self.slope()?;
        Ok(d1
            .iter()
            .map(|p| {
                let w = (1.0 + p * p).sqrt();
                (-p / w, 1.0 / w)
            })
            .unzip())
    }

    /// Surface element `√(1+η′²)` per unit `dx`.
    pub fn surface_element(&self) -> Result<Vec<f64>> {
        Ok(self.slope()?.iter().map(|p| (1.0 + p * p).sqrt()).collect())
    }

    pub fn area(&self) -> Result<f64> {
        Ok(spectral::integrate(&self.surface_element()?, TAU))
    }

    /// Smallest distance from the interface to either solid boundary, using
    /// `min(H⁺, H⁻) − max|η|`.
    pub fn clearance(&self, h_plus: f64, h_minus: f64) -> f64 {
        h_plus.min(h_minus) - self.sup_abs()
    }

    pub fn check_depth_margin(&self, h_plus: f64, h_minus: f64, d0: f64) -> Result<()> {
        let clearance = self.clearance(h_plus, h_minus);
        if clearance < d0 {
            return Err(Error::DepthMargin {
                clearance,
                required: d0,
            });
        }
        Ok(())
    }

    /// Shift the samples to zero mean.
    pub fn project_zero_mass(&mut self) {
        let m = self.mean();
        for v in &mut self.samples {
            *v -= m;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_curvature_vanishes() {
        let g = GraphInterface::flat(32);
        assert!(g.curvature().unwrap().iter().all(|k| *k == 0.0));
    }

    #[test]
    fn cosine_crest_curvature() {
        let a = 0.3;
        let g = GraphInterface::from_fn(64, |x| a * x.cos()).unwrap();
        assert!((g.curvature().unwrap()[0] - a).abs() < 1e-12);
    }

    #[test]
    fn rough_interface_needs_refinement() {
        let g = GraphInterface::from_fn(16, |x| (7.0 * x).cos()).unwrap();
        assert!(matches!(g.curvature(), Err(Error::RefinementNeeded { .. })));
    }

    #[test]
    fn two_dimensional_layout_is_stored_but_not_differentiated() {
        let g = GraphInterface::with_shape(vec![0.0; 64], vec![8, 8]).unwrap();
        assert_eq!(g.dim(), 2);
        assert!(matches!(g.curvature(), Err(Error::Unsupported(_))));
    }

    #[test]
    fn depth_margin() {
        let g = GraphInterface::from_fn(32, |x| 0.5 * x.cos()).unwrap();
        assert!(g.check_depth_margin(1.0, 1.0, 0.4).is_ok());
        assert!(matches!(
            g.check_depth_margin(1.0, 0.8, 0.4),
            Err(Error::DepthMargin { .. })
        ));
    }
}
