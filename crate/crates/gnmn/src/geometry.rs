//! Planar geometry and the random-waypoint-with-rest mobility process.
//!
//! Nodes live in the square `[0, a] x [0, a]`. Each node alternates between
//! resting at a halting point for a whole number of days and traveling in a
//! straight line toward a uniformly drawn waypoint at a per-leg speed. One
//! tick is one day; daily motion is bounded by
//! `speed * travel_seconds_per_day`, so a tick never moves a node farther
//! than that. Waypoints are drawn inside the square, so positions never
//! need reflection or wrapping.
//!
//! All draws come from a caller-provided seeded stream and are consumed in
//! node-index order, which makes every trajectory reproducible from
//! `(config, seed)` alone.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::ScenarioConfig;

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("node count must be >= 1")]
    EmptyPopulation,
    #[error("speed range is empty or negative: [{0}, {1}]")]
    BadSpeedRange(f64, f64),
    #[error("rest range is empty: [{0}, {1}]")]
    BadRestRange(u32, u32),
}

/// A position in the bounded square, meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2D {
    pub x: f64,
    pub y: f64,
}

impl Point2D {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

/// Euclidean distance `d_ij` between two points, meters.
#[inline]
pub fn euclidean_distance(p: Point2D, q: Point2D) -> f64 {
    let dx = p.x - q.x;
    let dy = p.y - q.y;
    (dx * dx + dy * dy).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Resting,
    Traveling,
}

/// Kinematic state of one node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MobilityState {
    pub position: Point2D,
    /// Destination of the current or next leg. While resting this holds the
    /// halting point itself.
    pub waypoint: Point2D,
    /// Speed for the current leg, m/s.
    pub speed: f64,
    /// Remaining rest, whole days. Meaningful while resting.
    pub rest_remaining: u32,
    pub phase: Phase,
}

/// Deterministic mobility stream for a given scenario seed.
pub fn mobility_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Place `n` nodes i.i.d. uniform over the square, each starting at rest
/// with a uniform integer rest time and a uniform per-leg speed.
///
/// Identical `(config, seed, n)` produce bitwise-identical output.
pub fn init_mobility(
    config: &ScenarioConfig,
    seed: u64,
    n: usize,
) -> Result<Vec<MobilityState>, GeometryError> {
    let mut rng = mobility_rng(seed);
    init_mobility_with(config, &mut rng, n)
}

/// As [`init_mobility`] but drawing from an existing stream.
pub fn init_mobility_with(
    config: &ScenarioConfig,
    rng: &mut ChaCha8Rng,
    n: usize,
) -> Result<Vec<MobilityState>, GeometryError> {
    if n == 0 {
        return Err(GeometryError::EmptyPopulation);
    }
    if !(config.v_min >= 0.0) || config.v_max < config.v_min {
        return Err(GeometryError::BadSpeedRange(config.v_min, config.v_max));
    }
    if config.t_rest_max < config.t_rest_min {
        return Err(GeometryError::BadRestRange(
            config.t_rest_min,
            config.t_rest_max,
        ));
    }
    let a = config.side_length;
    let mut states = Vec::with_capacity(n);
    for _ in 0..n {
        let position = Point2D::new(rng.random_range(0.0..=a), rng.random_range(0.0..=a));
        let rest_remaining = rng.random_range(config.t_rest_min..=config.t_rest_max);
        let speed = rng.random_range(config.v_min..=config.v_max);
        states.push(MobilityState {
            position,
            waypoint: position,
            speed,
            rest_remaining,
            phase: Phase::Resting,
        });
    }
    Ok(states)
}

/// Advance every node by one tick (one day).
///
/// Resting nodes burn one rest day; on reaching zero they draw a fresh
/// waypoint and speed and switch to traveling (motion starts next tick).
/// Traveling nodes advance by `min(remaining leg, speed * travel_seconds)`
/// toward their waypoint; on arrival they switch to resting with a fresh
/// rest draw. Nodes are processed in index order so the stream is
/// reproducible.
pub fn step_mobility(states: &mut [MobilityState], config: &ScenarioConfig, rng: &mut ChaCha8Rng) {
    let a = config.side_length;
    for node in states.iter_mut() {
        match node.phase {
            Phase::Resting => {
                node.rest_remaining = node.rest_remaining.saturating_sub(1);
                if node.rest_remaining == 0 {
                    node.waypoint =
                        Point2D::new(rng.random_range(0.0..=a), rng.random_range(0.0..=a));
                    node.speed = rng.random_range(config.v_min..=config.v_max);
                    node.phase = Phase::Traveling;
                }
            }
            Phase::Traveling => {
                let leg = euclidean_distance(node.position, node.waypoint);
                let step = node.speed * config.travel_seconds_per_day;
                if leg <= step {
                    node.position = node.waypoint;
                    node.phase = Phase::Resting;
                    node.rest_remaining =
                        rng.random_range(config.t_rest_min..=config.t_rest_max);
                } else {
                    let t = step / leg;
                    node.position = Point2D::new(
                        (node.position.x + t * (node.waypoint.x - node.position.x))
                            .clamp(0.0, a),
                        (node.position.y + t * (node.waypoint.y - node.position.y))
                            .clamp(0.0, a),
                    );
                }
            }
        }
    }
}

/// Positions of a slice of mobility states, in node order.
pub fn positions(states: &[MobilityState]) -> Vec<Point2D> {
    states.iter().map(|s| s.position).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config() -> ScenarioConfig {
        ScenarioConfig::from_json(
            r#"{"beta": 0.0, "mu": 0.0, "horizon": 10, "n_static": 1, "seed": 0}"#,
        )
        .unwrap()
    }

    #[test]
    fn distance_identity_and_pythagorean() {
        let o = Point2D::new(0.0, 0.0);
        assert_eq!(euclidean_distance(o, o), 0.0);
        assert_eq!(euclidean_distance(o, Point2D::new(3.0, 4.0)), 5.0);
    }

    #[test]
    fn distance_matches_high_precision_evaluation() {
        // sqrt(4.7^2 + 7.4^2) evaluated with 40-digit arithmetic.
        let d = euclidean_distance(Point2D::new(1.2, 0.7), Point2D::new(5.9, 8.1));
        assert!((d - 8.766413177577247).abs() < 1e-12);
    }

    #[test]
    fn init_single_node_inside_bounds() {
        let c = config();
        let states = init_mobility(&c, 7, 1).unwrap();
        assert_eq!(states.len(), 1);
        let p = states[0].position;
        assert!(p.x >= 0.0 && p.x <= c.side_length);
        assert!(p.y >= 0.0 && p.y <= c.side_length);
        assert_eq!(states[0].phase, Phase::Resting);
    }

    #[test]
    fn init_is_deterministic() {
        let c = config();
        let a = init_mobility(&c, 42, 50).unwrap();
        let b = init_mobility(&c, 42, 50).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn init_rejects_empty_and_inverted() {
        let mut c = config();
        assert_eq!(init_mobility(&c, 1, 0), Err(GeometryError::EmptyPopulation));
        c.v_min = 5.0;
        c.v_max = 1.0;
        assert_eq!(
            init_mobility(&c, 1, 3),
            Err(GeometryError::BadSpeedRange(5.0, 1.0))
        );
    }

    #[test]
    fn survey_scale_init_respects_ranges() {
        // 7724 sampled individuals, 25 km square, speeds 1-50 m/s,
        // rest 2-115 days.
        let c = config();
        let states = init_mobility(&c, 11, 7724).unwrap();
        assert_eq!(states.len(), 7724);
        for s in &states {
            assert!(s.position.x >= 0.0 && s.position.x <= 25_000.0);
            assert!(s.position.y >= 0.0 && s.position.y <= 25_000.0);
            assert!(s.speed >= 1.0 && s.speed <= 50.0);
            assert!((2..=115).contains(&s.rest_remaining));
        }
    }

    #[test]
    fn resting_node_burns_one_day_without_moving() {
        let c = config();
        let mut states = vec![MobilityState {
            position: Point2D::new(10.0, 20.0),
            waypoint: Point2D::new(10.0, 20.0),
            speed: 3.0,
            rest_remaining: 5,
            phase: Phase::Resting,
        }];
        let mut rng = mobility_rng(1);
        step_mobility(&mut states, &c, &mut rng);
        assert_eq!(states[0].rest_remaining, 4);
        assert_eq!(states[0].position, Point2D::new(10.0, 20.0));
        assert_eq!(states[0].phase, Phase::Resting);
    }

    #[test]
    fn short_leg_arrives_and_rests() {
        let c = config();
        let mut states = vec![MobilityState {
            position: Point2D::new(0.0, 0.0),
            waypoint: Point2D::new(100.0, 0.0),
            speed: 1.0,
            rest_remaining: 0,
            phase: Phase::Traveling,
        }];
        let mut rng = mobility_rng(1);
        step_mobility(&mut states, &c, &mut rng);
        assert_eq!(states[0].position, Point2D::new(100.0, 0.0));
        assert_eq!(states[0].phase, Phase::Resting);
        assert!((2..=115).contains(&states[0].rest_remaining));
    }

    #[test]
    fn long_leg_advances_by_daily_budget() {
        // 1 m/s for 3600 s moves exactly 3600 m along the x axis.
        let c = config();
        let mut states = vec![MobilityState {
            position: Point2D::new(0.0, 0.0),
            waypoint: Point2D::new(10_000.0, 0.0),
            speed: 1.0,
            rest_remaining: 0,
            phase: Phase::Traveling,
        }];
        let mut rng = mobility_rng(1);
        step_mobility(&mut states, &c, &mut rng);
        assert_eq!(states[0].position, Point2D::new(3600.0, 0.0));
        assert_eq!(states[0].phase, Phase::Traveling);
    }

    #[test]
    fn rest_expiry_draws_waypoint_and_starts_travel() {
        let c = config();
        let mut states = vec![MobilityState {
            position: Point2D::new(5.0, 5.0),
            waypoint: Point2D::new(5.0, 5.0),
            speed: 1.0,
            rest_remaining: 1,
            phase: Phase::Resting,
        }];
        let mut rng = mobility_rng(9);
        step_mobility(&mut states, &c, &mut rng);
        assert_eq!(states[0].phase, Phase::Traveling);
        assert_eq!(states[0].position, Point2D::new(5.0, 5.0));
        assert!(states[0].speed >= c.v_min && states[0].speed <= c.v_max);
    }
}
