//! Initial state construction from a scenario configuration.
//!
//! The static and migrated cohorts share one mobility law. Placement is
//! uniform over the square; optionally the migrated cohort starts inside a
//! disc (an entry cluster) and disperses from there. The first
//! `seeded_infected()` migrated nodes start fully infectious, modeling
//! inbound carriers.

use std::f64::consts::TAU;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::config::{ConfigError, ScenarioConfig};
use crate::dynamics::CompartmentState;
use crate::geometry::{self, GeometryError, MobilityState, Point2D};

#[derive(Debug, Error, PartialEq)]
pub enum ScenarioError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Everything a run starts from. The RNG stream continues into the
/// mobility process, so the whole run is a pure function of the config.
pub struct Scenario {
    pub mobility: Vec<MobilityState>,
    pub compartments: CompartmentState,
    pub rng: ChaCha8Rng,
}

pub fn build(config: &ScenarioConfig) -> Result<Scenario, ScenarioError> {
    config.validate()?;
    let n = config.n_total();
    let mut rng = geometry::mobility_rng(config.seed);
    let mut mobility = geometry::init_mobility_with(config, &mut rng, n)?;

    if let Some(cluster) = config.migrated_cluster() {
        for state in mobility.iter_mut().skip(config.n_static) {
            let u: f64 = rng.random_range(0.0..=1.0);
            let angle: f64 = rng.random_range(0.0..TAU);
            let radius = cluster.radius * u.sqrt();
            let p = Point2D::new(
                cluster.x + radius * angle.cos(),
                cluster.y + radius * angle.sin(),
            );
            state.position = p;
            state.waypoint = p;
        }
    }

    let mut compartments = CompartmentState::fully_susceptible(n);
    for node in config.n_static..config.n_static + config.seeded_infected() {
        compartments.seed_infected(node);
    }
    Ok(Scenario {
        mobility,
        compartments,
        rng,
    })
}
