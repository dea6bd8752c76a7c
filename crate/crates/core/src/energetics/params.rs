use crate::error::{Error, Result};
use crate::harmonic::LayerSpec;

/// Physical constants of the two-fluid system. The `+` fluid lies below the
/// interface (bottom at `y = −H⁺`), the `−` fluid above it (lid at `y = H⁻`).
/// Infinite depths are `f64::INFINITY`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    pub rho_plus: f64,
    pub rho_minus: f64,
    pub g: f64,
    pub sigma: f64,
    pub h_plus: f64,
    pub h_minus: f64,
}

/// Sign condition on the total energy under which the virial lower bound
/// `I(t) ≥ I(0) + |E|t` is available.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnergyCondition {
    Satisfied,
    Violated,
    /// Surface tension with positive energy: no bound is known.
    Open,
}

impl EnergyCondition {
    pub fn label(self) -> &'static str {
        match self {
            EnergyCondition::Satisfied => "satisfied",
            EnergyCondition::Violated => "violated",
            EnergyCondition::Open => "open (surface tension with positive energy)",
        }
    }
}

impl PhysicalParams {
    pub fn new(rho_plus: f64, rho_minus: f64, g: f64, sigma: f64, h_plus: f64, h_minus: f64) -> Result<Self> {
        let p = Self {
            rho_plus,
            rho_minus,
            g,
            sigma,
            h_plus,
            h_minus,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let nonneg = [
            ("rho_plus", self.rho_plus),
            ("rho_minus", self.rho_minus),
            ("g", self.g),
            ("sigma", self.sigma),
        ];
        for (name, v) in nonneg {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidInput(format!("{name} must be finite and non-negative, got {v}")));
            }
        }
        if self.rho_plus + self.rho_minus <= 0.0 {
            return Err(Error::InvalidInput(
                "densities must satisfy ρ⁺+ρ⁻>0 (rho_plus + rho_minus > 0)".into(),
            ));
        }
        for (name, v) in [("h_plus", self.h_plus), ("h_minus", self.h_minus)] {
            if v.is_nan() || v <= 0.0 {
                return Err(Error::InvalidInput(format!("{name} must be positive or infinite, got {v}")));
            }
        }
        Ok(())
    }

    pub fn total_density(&self) -> f64 {
        self.rho_plus + self.rho_minus
    }

    pub fn atwood(&self) -> f64 {
        (self.rho_plus - self.rho_minus) / self.total_density()
    }

    pub fn rho_bar_plus(&self) -> f64 {
        self.rho_plus / self.total_density()
    }

    pub fn rho_bar_minus(&self) -> f64 {
        self.rho_minus / self.total_density()
    }

    /// Surface tension normalized by the total density.
    pub fn sigma_tilde(&self) -> f64 {
        self.sigma / self.total_density()
    }

    /// Heavier (or equally dense) fluid on top.
    pub fn is_rayleigh_taylor(&self) -> bool {
        self.rho_plus <= self.rho_minus
    }

    pub fn lower_layer(&self) -> LayerSpec {
        LayerSpec::lower(self.h_plus).expect("validated depth")
    }

    pub fn upper_layer(&self) -> LayerSpec {
        LayerSpec::upper(self.h_minus).expect("validated depth")
    }

    /// `E ≠ 0` without surface tension, `E < 0` with it. `tol` decides when
    /// an energy counts as zero.
    pub fn energy_condition(&self, energy: f64, tol: f64) -> EnergyCondition {
        if self.sigma == 0.0 {
            if energy.abs() > tol {
                EnergyCondition::Satisfied
            } else {
                EnergyCondition::Violated
            }
        } else if energy < -tol {
            EnergyCondition::Satisfied
        } else if energy > tol {
            EnergyCondition::Open
        } else {
            EnergyCondition::Violated
        }
    }
}
