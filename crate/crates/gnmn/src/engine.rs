//! The per-tick simulation loop.
//!
//! Each tick advances mobility, rebuilds the contact snapshot on the new
//! positions, recomputes the mean degree, steps the compartments, and
//! records aggregates plus per-tick metrics. Tick zero records the initial
//! configuration before any motion. The spreading-speed column is filled
//! after the loop since it differentiates the recorded series.
//!
//! Metric columns that are undefined for a configuration (for example the
//! reproduction number with `mu = 0`) are recorded as NaN rather than
//! aborting the run.

use thiserror::Error;

use crate::config::ScenarioConfig;
use crate::dynamics::{self, CompartmentState, DynamicsError, EpidemicParams};
use crate::geometry::{self, Point2D};
use crate::metrics::{self, MetricsError, MetricsReport};
use crate::network::{self, ContactSnapshot, NetworkError};
use crate::scenario::{self, Scenario, ScenarioError};
use crate::trajectory::{TickRow, TrajectoryRecord};

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

/// Full result of a simulation run.
pub struct SimulationRun {
    pub trajectory: TrajectoryRecord,
    /// Per-tick snapshots, kept only when requested.
    pub snapshots: Option<Vec<ContactSnapshot>>,
    /// Ticks where the clamp-and-rescale guard engaged, with node counts.
    pub clamp_events: Vec<(u32, usize)>,
    pub final_state: CompartmentState,
}

impl SimulationRun {
    /// Metrics bundle: initial-geometry `r0` and `beta_critical` plus the
    /// recorded series.
    pub fn metrics_report(&self) -> MetricsReport {
        let first = self.trajectory.rows.first();
        let n = self.trajectory.n as f64;
        // Undo the susceptible scaling of the recorded R_t to recover the
        // initial-geometry R0.
        let r0 = first
            .map(|row| {
                if row.s > 0.0 {
                    row.r_t * n / row.s
                } else {
                    f64::NAN
                }
            })
            .unwrap_or(f64::NAN);
        let beta_critical = first.map(|row| row.beta_critical).unwrap_or(f64::NAN);
        let spreading_speed_series = self
            .trajectory
            .rows
            .iter()
            .map(|r| r.spreading_speed)
            .collect();
        MetricsReport {
            r0,
            beta_critical,
            epidemic_size: metrics::epidemic_size(&self.trajectory),
            spreading_speed_series,
            r_t_series: metrics::r_t_series(&self.trajectory),
        }
    }
}

fn nan_on_error(value: Result<f64, MetricsError>) -> f64 {
    value.unwrap_or(f64::NAN)
}

/// Run the distance-modulated network SIR from a prepared scenario.
pub fn run_network_sir(
    scenario: Scenario,
    config: &ScenarioConfig,
    record_snapshots: bool,
) -> Result<SimulationRun, EngineError> {
    let Scenario {
        mut mobility,
        mut compartments,
        mut rng,
    } = scenario;
    let params = EpidemicParams::from_config(config);
    let n = compartments.n();
    let area = config.area();
    let horizon = config.horizon;

    let mut rows: Vec<TickRow> = Vec::with_capacity(horizon as usize + 1);
    let mut kept_snapshots = record_snapshots.then(Vec::new);
    let mut clamp_events = Vec::new();

    let record =
        |tick: u32,
         positions: &[Point2D],
         state: &CompartmentState,
         snapshot: ContactSnapshot,
         k_mean: f64,
         rows: &mut Vec<TickRow>,
         kept: &mut Option<Vec<ContactSnapshot>>| {
            let (s, i, r) = state.totals();
            let (r0_res, bc_res) = metrics::tick_metrics(positions, &params, k_mean, config.r_critical);
            let r_t = match r0_res {
                Ok(v) => v * s / n as f64,
                Err(_) => f64::NAN,
            };
            rows.push(TickRow {
                tick,
                s,
                i,
                r,
                k_mean,
                r_t,
                beta_critical: nan_on_error(bc_res),
                spreading_speed: 0.0,
            });
            if let Some(list) = kept {
                list.push(snapshot);
            }
        };

    let positions = geometry::positions(&mobility);
    let snapshot = network::build_snapshot(&positions, params.d_t, 0);
    let k_mean = network::average_degree(&positions, area)?.mean;
    record(
        0,
        &positions,
        &compartments,
        snapshot,
        k_mean,
        &mut rows,
        &mut kept_snapshots,
    );

    for tick in 1..=horizon {
        geometry::step_mobility(&mut mobility, config, &mut rng);
        let positions = geometry::positions(&mobility);
        let snapshot = network::build_snapshot(&positions, params.d_t, tick);
        let k_mean = network::average_degree(&positions, area)?.mean;
        let step = dynamics::step_network_sir(&compartments, &snapshot, k_mean, &params)?;
        if step.clamped > 0 {
            clamp_events.push((tick, step.clamped));
        }
        compartments = step.state;
        record(
            tick,
            &positions,
            &compartments,
            snapshot,
            k_mean,
            &mut rows,
            &mut kept_snapshots,
        );
    }

    let mut trajectory = TrajectoryRecord {
        n,
        area,
        dt: params.dt,
        rows,
    };
    if trajectory.rows.len() >= 2 {
        let speeds = metrics::spreading_speed(&trajectory, area)?;
        for (row, v) in trajectory.rows.iter_mut().zip(speeds) {
            row.spreading_speed = v;
        }
    }

    Ok(SimulationRun {
        trajectory,
        snapshots: kept_snapshots,
        clamp_events,
        final_state: compartments,
    })
}

/// Build the scenario from the config and run it.
pub fn run_scenario(
    config: &ScenarioConfig,
    record_snapshots: bool,
) -> Result<SimulationRun, EngineError> {
    let scenario = scenario::build(config)?;
    run_network_sir(scenario, config, record_snapshots)
}

/// Mobility and snapshots only, no epidemic: what the degree-distribution
/// command consumes. Returns one snapshot per tick including tick zero.
pub fn run_mobility_snapshots(config: &ScenarioConfig) -> Result<Vec<ContactSnapshot>, EngineError> {
    let Scenario {
        mut mobility,
        mut rng,
        ..
    } = scenario::build(config)?;
    let d_t = config.d_t();
    let mut snapshots = Vec::with_capacity(config.horizon as usize + 1);
    snapshots.push(network::build_snapshot(
        &geometry::positions(&mobility),
        d_t,
        0,
    ));
    for tick in 1..=config.horizon {
        geometry::step_mobility(&mut mobility, config, &mut rng);
        snapshots.push(network::build_snapshot(
            &geometry::positions(&mobility),
            d_t,
            tick,
        ));
    }
    Ok(snapshots)
}
