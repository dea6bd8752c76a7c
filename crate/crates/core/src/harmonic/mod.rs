//! Laplace's equation in one fluid layer: harmonic extensions, the
//! Dirichlet–Neumann operator of a graph interface, and volume quadrature.

pub mod dno;
pub mod layer;
pub mod quadrature;

pub use dno::{dno_apply, flat_dno, DnoExpansion, PreparedDno, MAX_ORDER};
pub use layer::{flat_symbol, FieldSample, LayerField, LayerSpec, Side, TRUNCATION_OFFSET};
pub use quadrature::{region_quadrature, volume_quadrature, volume_quadratures, Integrand, Quadrature};

use crate::error::Result;

/// `sup_x |y^p ∂^α φ|` over the heights `ys` of an infinite-layer field.
pub fn decay_profile(field: &LayerField, power: i32, alpha: (u32, u32), ys: &[f64]) -> Result<Vec<f64>> {
    field.decay_profile(power, alpha, ys)
}

/// Harmonic extension of a trace given on the flat line `y = y0`.
pub fn extend(trace: &[f64], layer: LayerSpec, y0: f64) -> Result<LayerField> {
    LayerField::extend(trace, layer, y0)
}
