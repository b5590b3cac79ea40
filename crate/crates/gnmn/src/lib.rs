//! Simulation engine for epidemics on geometric networks of mobile nodes.
//!
//! Individuals live in a bounded square, move under a random-waypoint
//! process with rest periods, and form a contact network from pairwise
//! distances gated by a threshold. On top of that network the crate runs
//! per-node SIR dynamics whose infection term decays with distance through
//! a Gaussian kernel, and computes the associated epidemiological metrics
//! (basic reproduction number, critical infection rate, epidemic size,
//! spreading speed).
//!
//! Modules:
//! - [`geometry`]: planar points, distances, and the mobility process
//! - [`network`]: contact snapshots, edge estimates, degree statistics
//! - [`dynamics`]: distance-modulated network SIR and the classical baseline
//! - [`metrics`]: closed-form metrics over a network state
//! - [`ingest`]: census/migration CSV loading and survey sampling
//! - [`scenario`]: turning a [`config::ScenarioConfig`] into initial state
//! - [`engine`]: the per-tick simulation loop and trajectory recording
//!
//! Every run is deterministic given `(config, seed)`, including under
//! internal parallelism: all floating-point reductions use a fixed order.

pub mod config;
pub mod dynamics;
pub mod engine;
pub mod geometry;
pub mod ingest;
pub mod metrics;
pub mod network;
mod parallel;
pub mod scenario;
pub mod trajectory;

pub use config::ScenarioConfig;
pub use engine::{run_scenario, SimulationRun};
pub use trajectory::TrajectoryRecord;
