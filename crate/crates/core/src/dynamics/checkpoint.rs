use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::state::WaveState;
use crate::error::{Error, Result};
use crate::spectral;

pub const CHECKPOINT_VERSION: u32 = 1;

/// JSON checkpoint of a state. Spectra are normalized FFT coefficients
/// stored as flat `[re₀, im₀, re₁, im₁, …]` arrays.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub version: u32,
    pub t: f64,
    pub modes: usize,
    pub eta_spectrum: Vec<f64>,
    pub psi_spectrum: Vec<f64>,
}

fn flatten(c: &[Complex64]) -> Vec<f64> {
    c.iter().flat_map(|z| [z.re, z.im]).collect()
}

fn unflatten(v: &[f64], modes: usize, what: &str) -> Result<Vec<Complex64>> {
    if v.len() != 2 * modes {
        return Err(Error::Io(format!(
            "checkpoint {what} spectrum has {} entries, expected {}",
            v.len(),
            2 * modes
        )));
    }
    Ok(v.chunks_exact(2).map(|p| Complex64::new(p[0], p[1])).collect())
}

impl Checkpoint {
    pub fn from_state(state: &WaveState) -> Self {
        Self {
            version: CHECKPOINT_VERSION,
            t: state.t,
            modes: state.n_modes(),
            eta_spectrum: flatten(&spectral::fft(state.eta.samples())),
            psi_spectrum: flatten(&spectral::fft(&state.psi)),
        }
    }

    pub fn to_state(&self) -> Result<WaveState> {
        if self.version != CHECKPOINT_VERSION {
            return Err(Error::Io(format!(
                "unsupported checkpoint version {} (expected {CHECKPOINT_VERSION})",
                self.version
            )));
        }
        let eta = spectral::ifft(&unflatten(&self.eta_spectrum, self.modes, "eta")?);
        let psi = spectral::ifft(&unflatten(&self.psi_spectrum, self.modes, "psi")?);
        WaveState::from_samples(self.t, eta, psi)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, serde_json::to_string(self)?)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let s = WaveState::from_samples(
            2.5,
            (0..16).map(|j| 0.01 * (j as f64).sin()).collect(),
            (0..16).map(|j| (j as f64 * 0.3).cos()).collect(),
        )
        .unwrap();
        let json = serde_json::to_string(&Checkpoint::from_state(&s)).unwrap();
        let back: Checkpoint = serde_json::from_str(&json).unwrap();
        let r = back.to_state().unwrap();
        assert_eq!(r.t, 2.5);
        for (a, b) in r.psi.iter().zip(&s.psi) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn wrong_version_is_rejected() {
        let mut c = Checkpoint::from_state(&WaveState::flat(8));
        c.version = 99;
        assert!(c.to_state().is_err());
    }
}
