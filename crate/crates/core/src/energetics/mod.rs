//! Mass, energy and virial functionals of an interface and its potentials,
//! plus the static identities they satisfy.

pub mod diagnostics;
pub mod functionals;
pub mod params;

pub use diagnostics::{DiagnosticsRecord, CSV_HEADER};
pub use functionals::{
    curvature_identity_check, diagnostics, energies, growth_functional, layer_energies, layer_fields, mass,
    mass_crosscheck, potential_energy, psi_trace, rs_nonnegativity_check, surface_terms, trace_estimate_ratio,
    trace_estimate_ratio_curve, virial_functional, CurvatureIdentity, Energies, LayerEnergies, MassCrosscheck,
    PotentialEnergy, RsChain, SurfaceTerms,
};
pub use params::{EnergyCondition, PhysicalParams};
