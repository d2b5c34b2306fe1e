//! Desk-scale simulator for an oscillating thermo-visco-elasto-plastic beam
//! with Prandtl-Ishlinskii hysteresis, cyclic-fatigue accumulation and
//! melting-driven fatigue recovery.
//!
//! The crate integrates the space-discrete beam system with a first-order
//! semi-implicit splitting and verifies, at runtime, the structural
//! properties of the model: discrete energy balance, nonnegative entropy
//! production (up to O(dt)), a closed-form temperature floor, exact box
//! constraints on the phase fraction, the fatigue field and every stop
//! memory, and mesh convergence of the interpolated fields.
//!
//! Entry points:
//! - [`config::load_config`] reads and validates a TOML scenario;
//! - [`integrator::run`] integrates it and returns snapshots plus per-step
//!   diagnostics;
//! - [`output::export_series`] writes CSV/JSON/SVG artifacts;
//! - the `beamsim` binary exposes the `simulate`, `verify`, `converge` and
//!   `floor` subcommands on top of these.
//!
//! The `examples/` directory exercises each capability in isolation.

pub mod beam;
pub mod config;
pub mod diagnostics;
pub mod error;
pub mod expr;
pub mod hysteresis;
pub mod integrator;
pub mod output;
pub mod phase;
pub mod prandtl;
pub mod state;

pub use beam::{Grid, PhysicalParams};
pub use config::{load_config, SimulationConfig, ValidatedConfig};
pub use error::{Error, Result};
pub use hysteresis::{stop_init, stop_step, ConstraintInterval, StopState};
pub use integrator::{run, step, temperature_floor, StepReport, Trajectory};
pub use prandtl::{make_yield_grid, DensityModel, NodePiMemory, YieldGrid};
pub use state::{BeamState, ModelContext};
