//! Scenario configuration: one flat document driving a whole run.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("side_length must be > 0 (got {0})")]
    BadSideLength(f64),
    #[error("connectivity_radius must be > 0 (got {0})")]
    BadConnectivityRadius(f64),
    #[error("threshold_distance must be >= 0 (got {0})")]
    BadThreshold(f64),
    #[error("sigma must be > 0 (got {0})")]
    BadSigma(f64),
    #[error("speed range is empty or negative: [{0}, {1}]")]
    BadSpeedRange(f64, f64),
    #[error("rest range is empty: [{0}, {1}]")]
    BadRestRange(u32, u32),
    #[error("travel_seconds_per_day must be > 0 (got {0})")]
    BadTravelSeconds(f64),
    #[error("beta and mu must be >= 0 (got beta={0}, mu={1})")]
    BadRates(f64, f64),
    #[error("dt must be > 0 (got {0})")]
    BadDt(f64),
    #[error("horizon must be >= 1")]
    BadHorizon,
    #[error("population is empty (n_static + n_migrated = 0)")]
    EmptyPopulation,
    #[error("r_critical must be > 0 (got {0})")]
    BadRCritical(f64),
    #[error("migrated_infected_fraction must be in [0, 1] (got {0})")]
    BadInfectedFraction(f64),
    #[error("migrated cluster fields must be given together (x, y, radius)")]
    PartialCluster,
    #[error("migrated cluster (center ({0}, {1}), radius {2}) leaves the area")]
    ClusterOutOfBounds(f64, f64, f64),
}

/// Flat scenario description. Geometry and mobility defaults follow the
/// survey parameters this model family is usually driven with: a 25 km
/// square, 2 m connectivity radius, speeds of 1-50 m/s and rest times of
/// 2-115 days.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Side length `a` of the square area, meters.
    #[serde(default = "default_side_length")]
    pub side_length: f64,
    /// Connectivity radius `r`, meters.
    #[serde(default = "default_connectivity_radius")]
    pub connectivity_radius: f64,
    /// Threshold distance `d_T`, meters. Defaults to `connectivity_radius`.
    #[serde(default)]
    pub threshold_distance: Option<f64>,
    /// Dispersion `sigma` of the distance kernel, meters.
    #[serde(default = "default_sigma")]
    pub sigma: f64,
    /// Speed range, m/s.
    #[serde(default = "default_v_min")]
    pub v_min: f64,
    #[serde(default = "default_v_max")]
    pub v_max: f64,
    /// Rest-time range, whole days.
    #[serde(default = "default_t_rest_min")]
    pub t_rest_min: u32,
    #[serde(default = "default_t_rest_max")]
    pub t_rest_max: u32,
    /// Seconds of travel budgeted per one-day tick.
    #[serde(default = "default_travel_seconds_per_day")]
    pub travel_seconds_per_day: f64,
    /// Infection rate per day.
    pub beta: f64,
    /// Recovery rate per day.
    pub mu: f64,
    /// Integration step, days.
    #[serde(default = "default_dt")]
    pub dt: f64,
    /// Simulation horizon, days.
    pub horizon: u32,
    /// Cohort sizes.
    pub n_static: usize,
    #[serde(default)]
    pub n_migrated: usize,
    /// RNG seed; fixes the entire run.
    pub seed: u64,
    /// Outbreak threshold used by the critical-rate metric.
    #[serde(default = "default_r_critical")]
    pub r_critical: f64,
    /// Fraction of the migrated cohort seeded infected (ceil-rounded).
    #[serde(default = "default_migrated_infected_fraction")]
    pub migrated_infected_fraction: f64,
    /// Optional disc placement for the migrated cohort (an entry cluster).
    /// All three fields must be set together; default is uniform placement.
    #[serde(default)]
    pub migrated_cluster_x: Option<f64>,
    #[serde(default)]
    pub migrated_cluster_y: Option<f64>,
    #[serde(default)]
    pub migrated_cluster_radius: Option<f64>,
}

fn default_side_length() -> f64 {
    25_000.0
}
fn default_connectivity_radius() -> f64 {
    2.0
}
fn default_sigma() -> f64 {
    1.0
}
fn default_v_min() -> f64 {
    1.0
}
fn default_v_max() -> f64 {
    50.0
}
fn default_t_rest_min() -> u32 {
    2
}
fn default_t_rest_max() -> u32 {
    115
}
fn default_travel_seconds_per_day() -> f64 {
    3600.0
}
fn default_dt() -> f64 {
    1.0
}
fn default_r_critical() -> f64 {
    1.0
}
fn default_migrated_infected_fraction() -> f64 {
    0.01
}

/// Disc placement for the migrated cohort.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusterSpec {
    pub x: f64,
    pub y: f64,
    pub radius: f64,
}

impl ScenarioConfig {
    /// Effective threshold distance: explicit `threshold_distance` or the
    /// connectivity radius.
    pub fn d_t(&self) -> f64 {
        self.threshold_distance
            .unwrap_or(self.connectivity_radius)
    }

    /// Area `A = a^2`, square meters.
    pub fn area(&self) -> f64 {
        self.side_length * self.side_length
    }

    pub fn n_total(&self) -> usize {
        self.n_static + self.n_migrated
    }

    pub fn migrated_cluster(&self) -> Option<ClusterSpec> {
        match (
            self.migrated_cluster_x,
            self.migrated_cluster_y,
            self.migrated_cluster_radius,
        ) {
            (Some(x), Some(y), Some(radius)) => Some(ClusterSpec { x, y, radius }),
            _ => None,
        }
    }

    /// Number of migrated nodes seeded infected at t = 0.
    pub fn seeded_infected(&self) -> usize {
        let raw = (self.migrated_infected_fraction * self.n_migrated as f64).ceil() as usize;
        raw.min(self.n_migrated)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.side_length > 0.0) {
            return Err(ConfigError::BadSideLength(self.side_length));
        }
        if !(self.connectivity_radius > 0.0) {
            return Err(ConfigError::BadConnectivityRadius(self.connectivity_radius));
        }
        // d_T = 0 is meaningful: it switches every pairwise coupling off.
        if !(self.d_t() >= 0.0) {
            return Err(ConfigError::BadThreshold(self.d_t()));
        }
        if !(self.sigma > 0.0) {
            return Err(ConfigError::BadSigma(self.sigma));
        }
        if !(self.v_min >= 0.0) || !(self.v_max >= self.v_min) {
            return Err(ConfigError::BadSpeedRange(self.v_min, self.v_max));
        }
        if self.t_rest_max < self.t_rest_min {
            return Err(ConfigError::BadRestRange(self.t_rest_min, self.t_rest_max));
        }
        if !(self.travel_seconds_per_day > 0.0) {
            return Err(ConfigError::BadTravelSeconds(self.travel_seconds_per_day));
        }
        if !(self.beta >= 0.0) || !(self.mu >= 0.0) {
            return Err(ConfigError::BadRates(self.beta, self.mu));
        }
        if !(self.dt > 0.0) {
            return Err(ConfigError::BadDt(self.dt));
        }
        if self.horizon == 0 {
            return Err(ConfigError::BadHorizon);
        }
        if self.n_total() == 0 {
            return Err(ConfigError::EmptyPopulation);
        }
        if !(self.r_critical > 0.0) {
            return Err(ConfigError::BadRCritical(self.r_critical));
        }
        if !(0.0..=1.0).contains(&self.migrated_infected_fraction) {
            return Err(ConfigError::BadInfectedFraction(
                self.migrated_infected_fraction,
            ));
        }
        let any_cluster = self.migrated_cluster_x.is_some()
            || self.migrated_cluster_y.is_some()
            || self.migrated_cluster_radius.is_some();
        match self.migrated_cluster() {
            None if any_cluster => return Err(ConfigError::PartialCluster),
            Some(c) => {
                let a = self.side_length;
                if !(c.radius >= 0.0)
                    || c.x - c.radius < 0.0
                    || c.x + c.radius > a
                    || c.y - c.radius < 0.0
                    || c.y + c.radius > a
                {
                    return Err(ConfigError::ClusterOutOfBounds(c.x, c.y, c.radius));
                }
            }
            None => {}
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> ScenarioConfig {
        ScenarioConfig::from_json(
            r#"{"beta": 0.1, "mu": 0.05, "horizon": 10, "n_static": 5, "seed": 1}"#,
        )
        .unwrap()
    }

    #[test]
    fn defaults_follow_survey_table() {
        let c = base();
        assert_eq!(c.side_length, 25_000.0);
        assert_eq!(c.connectivity_radius, 2.0);
        assert_eq!(c.d_t(), 2.0);
        assert_eq!(c.v_min, 1.0);
        assert_eq!(c.v_max, 50.0);
        assert_eq!(c.t_rest_min, 2);
        assert_eq!(c.t_rest_max, 115);
        assert_eq!(c.area(), 625_000_000.0);
        c.validate().unwrap();
    }

    #[test]
    fn explicit_threshold_overrides_radius() {
        let mut c = base();
        c.threshold_distance = Some(0.0);
        assert_eq!(c.d_t(), 0.0);
        c.validate().unwrap();
    }

    #[test]
    fn rejects_inverted_ranges() {
        let mut c = base();
        c.v_min = 10.0;
        c.v_max = 1.0;
        assert_eq!(c.validate(), Err(ConfigError::BadSpeedRange(10.0, 1.0)));

        let mut c = base();
        c.t_rest_min = 9;
        c.t_rest_max = 3;
        assert_eq!(c.validate(), Err(ConfigError::BadRestRange(9, 3)));
    }

    #[test]
    fn rejects_empty_population() {
        let mut c = base();
        c.n_static = 0;
        c.n_migrated = 0;
        assert_eq!(c.validate(), Err(ConfigError::EmptyPopulation));
    }

    #[test]
    fn rejects_partial_cluster() {
        let mut c = base();
        c.migrated_cluster_x = Some(100.0);
        assert_eq!(c.validate(), Err(ConfigError::PartialCluster));
    }

    #[test]
    fn rejects_cluster_leaving_area() {
        let mut c = base();
        c.migrated_cluster_x = Some(10.0);
        c.migrated_cluster_y = Some(10.0);
        c.migrated_cluster_radius = Some(50.0);
        assert!(matches!(
            c.validate(),
            Err(ConfigError::ClusterOutOfBounds(..))
        ));
    }

    #[test]
    fn rejects_unknown_fields() {
        let err = ScenarioConfig::from_json(
            r#"{"beta": 0.1, "mu": 0.05, "horizon": 10, "n_static": 5, "seed": 1, "betta": 2}"#,
        );
        assert!(err.is_err());
    }

    #[test]
    fn seeded_infected_rounds_up() {
        let mut c = base();
        c.n_migrated = 100;
        assert_eq!(c.seeded_infected(), 1);
        c.migrated_infected_fraction = 0.0;
        assert_eq!(c.seeded_infected(), 0);
        c.migrated_infected_fraction = 1.0;
        assert_eq!(c.seeded_infected(), 100);
    }
}
