//! Time evolution of a graph interface between two potential-flow layers in
//! the variables `(η, ψ)`, with `ψ = ρ̲⁺φ⁺ − ρ̲⁻φ⁻` on the interface.

pub mod checkpoint;
pub mod integrate;
pub mod monitors;
pub mod pressure;
pub mod rhs;
pub mod state;
pub mod traces;

pub use checkpoint::{Checkpoint, CHECKPOINT_VERSION};
pub use integrate::{default_dt, step, step_with, StepOptions, DEFAULT_MODES, DEFAULT_ORDER};
pub use monitors::{
    derive_series, fd_derivative, run_monitored, run_with_monitors, sample_diagnostics, DerivedSeries, MonitorReport,
    RunConfig,
};
pub use pressure::{pressure_jump, pressure_jump_residual, PressureJump};
pub use rhs::{rhs, rhs_with, Tendency};
pub use state::{Traces, WaveState};
pub use traces::{recover_traces, TraceSolver, DYNAMICS_TAIL_THRESHOLD, TRACE_MAX_ITERATIONS, TRACE_TOLERANCE};
