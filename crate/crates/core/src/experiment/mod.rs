//! Configuration files, sweeps, model comparison and distribution tables.

pub mod config;
pub mod dist;
pub mod sweep;

pub use config::{emit_config, load_config, parse_config};
pub use dist::{emit_distribution_tables, DistTables, DistanceRow};
pub use sweep::{compare_models, parse_grid, run_sweep, Comparison, Row, SweepSpec};
