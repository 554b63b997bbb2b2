//! Three-state lattice market simulator with trust-weighted herding,
//! fundamentalist traders and short consultation rounds, plus the
//! diagnostics used to check its output against historical index returns.
//!
//! The numerical core is generic over [`Real`] (`f32` or `f64`); the
//! `*64` aliases below fix it to `f64`, which the harness uses.

pub mod dynamics;
pub mod error;
pub mod harness;
pub mod lattice;
pub mod market;
pub mod scalar;
pub mod stats;

pub use dynamics::{
    apply_spin_rule, fundamentalist_override, local_field, rescale_thresholds, simulate,
    trust_weight, FieldMode, FieldSnapshot, Simulation, SpinHistory, StepOutcome,
};
pub use error::{Error, Result};
pub use lattice::{init_grid, neighbors, AgentGrid, SimConfig, Spin};
pub use market::{clear_price, log_return, PriceSeries};
pub use scalar::Real;

pub type Simulation64 = Simulation<f64>;
pub type AgentGrid64 = AgentGrid<f64>;
pub type PriceSeries64 = PriceSeries<f64>;
pub type AutocorrCurve64 = stats::AutocorrCurve<f64>;
pub type PowerLawFit64 = stats::PowerLawFit<f64>;
pub type Histogram64 = stats::Histogram<f64>;

pub type Simulation32 = Simulation<f32>;
pub type AgentGrid32 = AgentGrid<f32>;
pub type PriceSeries32 = PriceSeries<f32>;
