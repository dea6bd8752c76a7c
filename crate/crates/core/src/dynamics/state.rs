use crate::error::{Error, Result};
use crate::geometry::GraphInterface;
use crate::spectral;

/// Per-layer Dirichlet traces on the interface, with the solver's report.
#[derive(Debug, Clone, PartialEq)]
pub struct Traces {
    pub phi_plus: Vec<f64>,
    pub phi_minus: Vec<f64>,
    /// Shared normal velocity `G⁺φ⁺ = −G⁻φ⁻`, i.e. `η_t`.
    pub normal_velocity: Vec<f64>,
    pub iterations: usize,
    /// Relative residual of `G⁺φ⁺ + G⁻φ⁻ = 0` at exit.
    pub residual: f64,
}

/// Graph-case state `(η, ψ)` at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveState {
    pub t: f64,
    pub eta: GraphInterface,
    pub psi: Vec<f64>,
    traces: Option<Traces>,
}

impl WaveState {
    pub fn new(t: f64, eta: GraphInterface, psi: Vec<f64>) -> Result<Self> {
        let n = eta.require_1d()?;
        if psi.len() != n {
            return Err(Error::GridMismatch {
                left: n,
                right: psi.len(),
            });
        }
        if !t.is_finite() || psi.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("state must be finite".into()));
        }
        Ok(Self {
            t,
            eta,
            psi,
            traces: None,
        })
    }

    pub fn from_samples(t: f64, eta: Vec<f64>, psi: Vec<f64>) -> Result<Self> {
        Self::new(t, GraphInterface::new(eta)?, psi)
    }

    pub fn flat(n: usize) -> Self {
        let eta = GraphInterface::flat(n);
        let n = eta.n_modes();
        Self {
            t: 0.0,
            eta,
            psi: vec![0.0; n],
            traces: None,
        }
    }

    pub fn n_modes(&self) -> usize {
        self.psi.len()
    }

    /// `|mean(η)|`.
    pub fn mass_defect(&self) -> f64 {
        self.eta.mean().abs()
    }

    pub fn project_zero_mass(&mut self) {
        self.eta.project_zero_mass();
        self.traces = None;
    }

    /// Traces from the most recent recovery, if still valid for this state.
    pub fn cached_traces(&self) -> Option<&Traces> {
        self.traces.as_ref()
    }

    pub(crate) fn set_traces(&mut self, traces: Traces) {
        self.traces = Some(traces);
    }

    /// Time-reversed state `(η, −ψ)`.
    pub fn reversed(&self) -> Self {
        Self {
            t: self.t,
            eta: self.eta.clone(),
            psi: self.psi.iter().map(|v| -v).collect(),
            traces: None,
        }
    }

    /// Largest spectral tail ratio of `η` and `ψ`.
    pub fn tail_ratio(&self) -> f64 {
        spectral::tail_ratio(self.eta.samples()).max(spectral::tail_ratio(&self.psi))
    }

    /// Resample both fields to `n` points.
    pub fn resampled(&self, n: usize) -> Result<Self> {
        Self::from_samples(
            self.t,
            spectral::resample(self.eta.samples(), n),
            spectral::resample(&self.psi, n),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mismatched_lengths_are_rejected() {
        assert!(WaveState::from_samples(0.0, vec![0.0; 8], vec![0.0; 6]).is_err());
    }

    #[test]
    fn reversal_flips_psi_only() {
        let s = WaveState::from_samples(1.0, vec![0.1, 0.0, -0.1, 0.0], vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let r = s.reversed();
        assert_eq!(r.eta, s.eta);
        assert_eq!(r.psi, vec![-1.0, -2.0, -3.0, -4.0]);
    }
}
