//! Uplink connection probability of a 3D radiosonde network.
//!
//! Distance laws and samplers live in [`geometry`] and [`propagation`], the
//! link model in [`channel`], the quadrature-based CP in [`analytic`] and the
//! simulator in [`montecarlo`]. [`experiment`] drives sweeps for the CLI.

pub mod analytic;
pub mod channel;
pub mod error;
pub mod experiment;
pub mod geometry;
pub mod montecarlo;
pub mod params;
pub mod propagation;
pub mod quadrature;

pub use analytic::{cp_exact, cp_upper_bound, CpResult, Method};
pub use error::{Error, Result};
pub use params::{CaseName, NetworkParams, SpatialCase};
