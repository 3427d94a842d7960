//! Experiment configuration, Monte Carlo runs, presets and result files.

pub mod config;
pub mod output;
pub mod presets;
pub mod sim;

pub use config::{ChannelConfig, ExperimentConfig, Grid, Harvest, PointSpec, StopRule, JITTER};
pub use output::{
    emit, emit_theory, load_config, read_rows, result_rows, write_rows, Manifest, ResultRow,
    TheoryRow,
};
pub use presets::{preset, PRESET_NAMES};
pub use sim::{run_grid, run_point, substream, theory_grid, PointFailure, PointResult, RunResult};
