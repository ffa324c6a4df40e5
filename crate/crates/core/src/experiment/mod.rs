//! Monte-Carlo sweeps over random schedules, the aperture-rank probe and
//! result rendering.
//!
//! Every trial draws from streams keyed by `(master_seed, code label, n,
//! trial)`, so results do not depend on how many worker threads run them.

pub mod aperture;
pub mod config;
pub mod plot;
pub mod sweep;

pub use aperture::{aperture_rank_experiment, ApertureResult};
pub use config::{fig2, fig3, grid, preset, CodeDescriptor, ConfigError, ExperimentConfig, Mode, StopRule};
pub use plot::{bound_markers, emit_plot, BoundMarker};
pub use sweep::{overhead, run_point, run_sweep, run_sweep_with_progress, run_trial, PointEstimate, SweepTable, TrialSetup};
