use serde::{Deserialize, Serialize};

/// All functionals of one time slice.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DiagnosticsRecord {
    pub t: f64,
    #[serde(rename = "M")]
    pub mass: f64,
    #[serde(rename = "E_k")]
    pub e_k: f64,
    #[serde(rename = "E_p")]
    pub e_p: f64,
    #[serde(rename = "E")]
    pub e: f64,
    #[serde(rename = "Etilde_k")]
    pub etilde_k: f64,
    #[serde(rename = "R_b_plus")]
    pub r_b_plus: f64,
    #[serde(rename = "R_b_minus")]
    pub r_b_minus: f64,
    #[serde(rename = "R_s")]
    pub r_s: f64,
    #[serde(rename = "I")]
    pub i: f64,
    #[serde(rename = "F")]
    pub f: f64,
    pub slope_inf: Option<f64>,
    pub curv_inf: Option<f64>,
}

impl DiagnosticsRecord {
    /// `R = R_b⁺ + R_b⁻ + R_s`.
    pub fn remainder(&self) -> f64 {
        self.r_b_plus + self.r_b_minus + self.r_s
    }

    /// Right-hand side of the virial identity, `Ẽ_k − E_p + R`.
    pub fn virial_rhs(&self) -> f64 {
        self.etilde_k - self.e_p + self.remainder()
    }
}

pub const CSV_HEADER: [&str; 13] = [
    "t", "M", "E_k", "E_p", "E", "Etilde_k", "R_b_plus", "R_b_minus", "R_s", "I", "F", "slope_inf", "curv_inf",
];
