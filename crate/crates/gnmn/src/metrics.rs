//! Closed-form epidemiological metrics over a network state.
//!
//! The basic reproduction number on current geometry is
//!
//! ```text
//! R0 = (beta / mu) * (1 / <k>) * exp(-d_T^2 / (2 sigma^2))
//!      * (1/N) * sum_i sum_j exp(-d_ij^2 / (2 sigma^2))
//! ```
//!
//! with the double sum running over all ordered pairs including `j = i`
//! (each self term contributes one). The critical infection rate inverts
//! that relation at a chosen outbreak threshold, so substituting
//! `beta = beta_critical` back gives `R0 = r_critical` identically.
//! Epidemic size integrates the infectious aggregate by the trapezoidal
//! rule; spreading speed differentiates it by central differences.

use serde::Serialize;
use thiserror::Error;

use crate::dynamics::EpidemicParams;
use crate::geometry::{euclidean_distance, Point2D};
use crate::parallel;
use crate::trajectory::TrajectoryRecord;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("mean degree must be > 0")]
    ZeroMeanDegree,
    #[error("recovery rate must be > 0")]
    ZeroRecoveryRate,
    #[error("sigma must be > 0")]
    ZeroSigma,
    #[error("no finite threshold: the distance sum underflowed to zero")]
    NoFiniteThreshold,
    #[error("need at least {needed} ticks, trajectory has {got}")]
    TooShort { needed: usize, got: usize },
    #[error("area must be > 0")]
    ZeroArea,
    #[error("need at least one node")]
    EmptyPositions,
}

/// `sum_i sum_j exp(-d_ij^2 / (2 sigma^2))` over all ordered pairs,
/// self pairs included. Fixed reduction order regardless of parallelism.
pub fn gaussian_pair_sum(positions: &[Point2D], sigma: f64) -> f64 {
    let n = positions.len();
    let two_sigma_sq = 2.0 * sigma * sigma;
    let parts = parallel::per_node(n, |i| {
        let mut acc = 0.0;
        for j in 0..n {
            let d = euclidean_distance(positions[i], positions[j]);
            acc += (-d * d / two_sigma_sq).exp();
        }
        acc
    });
    parallel::total(&parts)
}

fn r0_from_sum(
    beta: f64,
    mu: f64,
    sigma: f64,
    d_t: f64,
    k_mean: f64,
    n: usize,
    pair_sum: f64,
) -> Result<f64, MetricsError> {
    if !(mu > 0.0) {
        return Err(MetricsError::ZeroRecoveryRate);
    }
    if !(k_mean > 0.0) {
        return Err(MetricsError::ZeroMeanDegree);
    }
    if !(sigma > 0.0) {
        return Err(MetricsError::ZeroSigma);
    }
    let gate = (-d_t * d_t / (2.0 * sigma * sigma)).exp();
    Ok(beta / mu / k_mean * gate * pair_sum / n as f64)
}

fn beta_critical_from_sum(
    mu: f64,
    sigma: f64,
    d_t: f64,
    k_mean: f64,
    r_critical: f64,
    n: usize,
    pair_sum: f64,
) -> Result<f64, MetricsError> {
    if !(mu > 0.0) {
        return Err(MetricsError::ZeroRecoveryRate);
    }
    if !(sigma > 0.0) {
        return Err(MetricsError::ZeroSigma);
    }
    let gate = (-d_t * d_t / (2.0 * sigma * sigma)).exp();
    let denom = gate * pair_sum / n as f64;
    if !(denom > 0.0) {
        return Err(MetricsError::NoFiniteThreshold);
    }
    Ok(r_critical * mu * k_mean / denom)
}

/// Basic reproduction number on the given geometry.
pub fn r0(positions: &[Point2D], params: &EpidemicParams, k_mean: f64) -> Result<f64, MetricsError> {
    if positions.is_empty() {
        return Err(MetricsError::EmptyPositions);
    }
    let pair_sum = gaussian_pair_sum(positions, params.sigma);
    r0_from_sum(
        params.beta,
        params.mu,
        params.sigma,
        params.d_t,
        k_mean,
        positions.len(),
        pair_sum,
    )
}

/// Smallest infection rate at which `R0` reaches `r_critical` on the given
/// geometry.
pub fn beta_critical(
    positions: &[Point2D],
    mu: f64,
    sigma: f64,
    d_t: f64,
    k_mean: f64,
    r_critical: f64,
) -> Result<f64, MetricsError> {
    if positions.is_empty() {
        return Err(MetricsError::EmptyPositions);
    }
    let pair_sum = gaussian_pair_sum(positions, sigma);
    beta_critical_from_sum(mu, sigma, d_t, k_mean, r_critical, positions.len(), pair_sum)
}

/// Both geometry metrics from one shared pair scan; what the engine calls
/// once per tick.
pub(crate) fn tick_metrics(
    positions: &[Point2D],
    params: &EpidemicParams,
    k_mean: f64,
    r_critical: f64,
) -> (Result<f64, MetricsError>, Result<f64, MetricsError>) {
    let pair_sum = gaussian_pair_sum(positions, params.sigma);
    let n = positions.len();
    (
        r0_from_sum(
            params.beta,
            params.mu,
            params.sigma,
            params.d_t,
            k_mean,
            n,
            pair_sum,
        ),
        beta_critical_from_sum(
            params.mu,
            params.sigma,
            params.d_t,
            k_mean,
            r_critical,
            n,
            pair_sum,
        ),
    )
}

/// Time integral of the infectious aggregate (individual-days), composite
/// trapezoidal rule over the recorded ticks.
pub fn epidemic_size(trajectory: &TrajectoryRecord) -> f64 {
    let infected = trajectory.infected();
    if infected.len() < 2 {
        return 0.0;
    }
    let mut total = 0.0;
    for pair in infected.windows(2) {
        total += 0.5 * (pair[0] + pair[1]) * trajectory.dt;
    }
    total
}

/// Per-tick spreading speed `(1/N) * d I / dt * (1/A)` in individuals per
/// day per square meter; central differences inside, one-sided at the ends.
pub fn spreading_speed(trajectory: &TrajectoryRecord, area: f64) -> Result<Vec<f64>, MetricsError> {
    if !(area > 0.0) {
        return Err(MetricsError::ZeroArea);
    }
    let infected = trajectory.infected();
    let len = infected.len();
    if len < 2 {
        return Err(MetricsError::TooShort {
            needed: 2,
            got: len,
        });
    }
    let dt = trajectory.dt;
    let scale = 1.0 / (trajectory.n as f64 * area);
    let mut out = Vec::with_capacity(len);
    out.push((infected[1] - infected[0]) / dt * scale);
    for k in 1..len - 1 {
        out.push((infected[k + 1] - infected[k - 1]) / (2.0 * dt) * scale);
    }
    out.push((infected[len - 1] - infected[len - 2]) / dt * scale);
    Ok(out)
}

/// The recorded effective reproduction number series.
pub fn r_t_series(trajectory: &TrajectoryRecord) -> Vec<(u32, f64)> {
    trajectory.rows.iter().map(|r| (r.tick, r.r_t)).collect()
}

/// Bundle exported as `metrics.json` for a run: initial-geometry `r0` and
/// `beta_critical`, plus the run-level series.
#[derive(Debug, Clone, Serialize)]
pub struct MetricsReport {
    pub r0: f64,
    pub beta_critical: f64,
    pub epidemic_size: f64,
    pub spreading_speed_series: Vec<f64>,
    pub r_t_series: Vec<(u32, f64)>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trajectory::TickRow;

    fn params(beta: f64, mu: f64, sigma: f64, d_t: f64) -> EpidemicParams {
        EpidemicParams {
            beta,
            mu,
            sigma,
            d_t,
            dt: 1.0,
        }
    }

    fn two_nodes() -> Vec<Point2D> {
        vec![Point2D::new(0.0, 0.0), Point2D::new(1.0, 0.0)]
    }

    // Independent evaluation of the double sum, one scalar accumulator.
    fn oracle_r0(pts: &[Point2D], beta: f64, mu: f64, sigma: f64, d_t: f64, k_mean: f64) -> f64 {
        let n = pts.len() as f64;
        let mut double = 0.0;
        for p in pts {
            for q in pts {
                let d = euclidean_distance(*p, *q);
                double += (-d * d / (2.0 * sigma * sigma)).exp();
            }
        }
        beta / mu / k_mean * (-d_t * d_t / (2.0 * sigma * sigma)).exp() * double / n
    }

    #[test]
    fn r0_two_node_hand_value() {
        // N=2 at distance 1, beta=0.5, mu=0.25, sigma=1, d_T=1, <k>=0.5:
        // R0 = 4 (e^{-1/2} + e^{-1}) = 3.897640403536303.
        let got = r0(&two_nodes(), &params(0.5, 0.25, 1.0, 1.0), 0.5).unwrap();
        assert!((got - 3.897640403536303).abs() < 1e-12);
        let want = oracle_r0(&two_nodes(), 0.5, 0.25, 1.0, 1.0, 0.5);
        assert!((got - want).abs() < 1e-12);
    }

    #[test]
    fn r0_is_linear_in_beta() {
        let pts = two_nodes();
        let base = r0(&pts, &params(0.5, 0.25, 1.0, 1.0), 0.5).unwrap();
        let doubled = r0(&pts, &params(1.0, 0.25, 1.0, 1.0), 0.5).unwrap();
        assert_eq!(r0(&pts, &params(0.0, 0.25, 1.0, 1.0), 0.5).unwrap(), 0.0);
        assert!((doubled - 2.0 * base).abs() < 1e-12);
    }

    #[test]
    fn r0_rejects_degenerate_inputs() {
        let pts = two_nodes();
        assert_eq!(
            r0(&pts, &params(0.5, 0.25, 1.0, 1.0), 0.0),
            Err(MetricsError::ZeroMeanDegree)
        );
        assert_eq!(
            r0(&pts, &params(0.5, 0.0, 1.0, 1.0), 0.5),
            Err(MetricsError::ZeroRecoveryRate)
        );
    }

    #[test]
    fn beta_critical_two_node_hand_value() {
        // Same configuration, r_critical = 1:
        // beta_c = 0.25 * 0.5 / (e^{-1/2} * 0.5 * (2 + 2 e^{-1/2}))
        //        = 0.1282827424372842.
        let got = beta_critical(&two_nodes(), 0.25, 1.0, 1.0, 0.5, 1.0).unwrap();
        assert!((got - 0.1282827424372842).abs() < 1e-12);
    }

    #[test]
    fn beta_critical_inverts_r0() {
        let pts = two_nodes();
        let bc = beta_critical(&pts, 0.25, 1.0, 1.0, 0.5, 1.0).unwrap();
        let back = r0(&pts, &params(bc, 0.25, 1.0, 1.0), 0.5).unwrap();
        assert!((back - 1.0).abs() < 1e-9);
    }

    #[test]
    fn beta_critical_linear_in_mu() {
        let pts = two_nodes();
        let b1 = beta_critical(&pts, 0.25, 1.0, 1.0, 0.5, 1.0).unwrap();
        let b2 = beta_critical(&pts, 0.5, 1.0, 1.0, 0.5, 1.0).unwrap();
        assert!((b2 - 2.0 * b1).abs() < 1e-12);
    }

    #[test]
    fn beta_critical_detects_underflow() {
        // Pairs much farther than sigma and a threshold huge next to
        // sigma: every exponential underflows to zero.
        let pts = vec![Point2D::new(0.0, 0.0), Point2D::new(1e9, 0.0)];
        let err = beta_critical(&pts, 0.25, 1e-3, 1e9, 0.5, 1.0).unwrap_err();
        assert_eq!(err, MetricsError::NoFiniteThreshold);
    }

    fn traj_from_infected(infected: &[f64], n: usize, dt: f64) -> TrajectoryRecord {
        TrajectoryRecord {
            n,
            area: 1.0,
            dt,
            rows: infected
                .iter()
                .enumerate()
                .map(|(k, &i)| TickRow {
                    tick: k as u32,
                    s: 0.0,
                    i,
                    r: 0.0,
                    k_mean: 0.0,
                    r_t: 0.0,
                    beta_critical: 0.0,
                    spreading_speed: 0.0,
                })
                .collect(),
        }
    }

    #[test]
    fn epidemic_size_constant_integrand() {
        // n nodes at constant fraction c for T days: n * c * T.
        let n = 5;
        let c = 0.3;
        let rows: Vec<f64> = vec![n as f64 * c; 11]; // T = 10
        let traj = traj_from_infected(&rows, n, 1.0);
        assert!((epidemic_size(&traj) - n as f64 * c * 10.0).abs() < 1e-12);
    }

    #[test]
    fn epidemic_size_single_tick_is_zero() {
        let traj = traj_from_infected(&[4.2], 5, 1.0);
        assert_eq!(epidemic_size(&traj), 0.0);
    }

    #[test]
    fn epidemic_size_linear_decay() {
        // One node, I(t) = 1 - t/T: integral T/2, trapezoid is exact.
        let t_end = 20usize;
        let rows: Vec<f64> = (0..=t_end)
            .map(|t| 1.0 - t as f64 / t_end as f64)
            .collect();
        let traj = traj_from_infected(&rows, 1, 1.0);
        assert!((epidemic_size(&traj) - t_end as f64 / 2.0).abs() < 1e-12);
    }

    #[test]
    fn spreading_speed_constant_is_zero() {
        let traj = traj_from_infected(&[2.0, 2.0, 2.0, 2.0], 4, 1.0);
        let v = spreading_speed(&traj, 100.0).unwrap();
        assert!(v.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn spreading_speed_uniform_growth() {
        // dI_i/dt = g for every node collapses to g / A.
        let n = 4;
        let g = 0.25;
        let rows: Vec<f64> = (0..6).map(|t| n as f64 * g * t as f64).collect();
        let traj = traj_from_infected(&rows, n, 1.0);
        let area = 50.0;
        let v = spreading_speed(&traj, area).unwrap();
        for x in v {
            assert!((x - g / area).abs() < 1e-15);
        }
    }

    #[test]
    fn spreading_speed_stencil_by_hand() {
        // One node, I = (0, 1, 0), dt = 1: forward 1/A, central 0,
        // backward -1/A.
        let traj = traj_from_infected(&[0.0, 1.0, 0.0], 1, 1.0);
        let area = 8.0;
        let v = spreading_speed(&traj, area).unwrap();
        assert_eq!(v, vec![1.0 / area, 0.0, -1.0 / area]);
    }

    #[test]
    fn spreading_speed_needs_two_ticks() {
        let traj = traj_from_infected(&[1.0], 1, 1.0);
        assert_eq!(
            spreading_speed(&traj, 1.0),
            Err(MetricsError::TooShort { needed: 2, got: 1 })
        );
    }
}
