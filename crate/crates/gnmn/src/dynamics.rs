//! Epidemic state evolution.
//!
//! Two models live here. The classical well-mixed SIR baseline integrates
//! `dS = -beta*S*I`, `dI = beta*S*I - mu*I`, `dR = mu*I` with RK4. The
//! network model keeps per-node compartment fractions and couples nodes
//! through the contact snapshot: node `i` feels an infection force
//!
//! ```text
//! force_i = beta * <k> * s_i * sum_{j in contact(i)} exp(-d_ij^2 / (2 sigma^2)) * i_j
//! ```
//!
//! advanced by one explicit Euler step per tick. The Gaussian factor
//! multiplies the infectious fraction of the neighbor; pairs beyond the
//! threshold distance never appear in the snapshot, so the indicator is
//! already applied. Neighbor sums run in ascending node order and node
//! updates are independent, which keeps results bit-identical under any
//! level of parallelism.

use rayon::prelude::*;
use thiserror::Error;

use crate::config::ScenarioConfig;
use crate::network::ContactSnapshot;

#[derive(Debug, Error, PartialEq)]
pub enum DynamicsError {
    #[error("state covers {state} nodes but snapshot covers {snapshot}")]
    MismatchedNodes { state: usize, snapshot: usize },
    #[error("mean degree must be > 0 when beta > 0")]
    ZeroMeanDegree,
    #[error("integration unstable at tick {tick} (node {node} left [-0.1, 1.1]); reduce dt or beta")]
    Unstable { tick: u32, node: usize },
    #[error("rates must be >= 0 (got beta={beta}, mu={mu})")]
    NegativeRate { beta: f64, mu: f64 },
    #[error("initial fractions must sum to 1 (got {0})")]
    BadInitialSum(f64),
    #[error("dt must be > 0")]
    BadDt,
}

/// Distance attenuation: `exp(-d^2 / (2 sigma^2))` inside the threshold,
/// zero beyond it.
#[inline]
pub fn kernel(d: f64, sigma: f64, d_t: f64) -> f64 {
    if d > d_t {
        0.0
    } else {
        (-d * d / (2.0 * sigma * sigma)).exp()
    }
}

/// Epidemic parameters of one run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpidemicParams {
    /// Infection rate per day.
    pub beta: f64,
    /// Recovery rate per day.
    pub mu: f64,
    /// Kernel dispersion, meters.
    pub sigma: f64,
    /// Threshold distance, meters.
    pub d_t: f64,
    /// Integration step, days.
    pub dt: f64,
}

impl EpidemicParams {
    pub fn from_config(config: &ScenarioConfig) -> Self {
        Self {
            beta: config.beta,
            mu: config.mu,
            sigma: config.sigma,
            d_t: config.d_t(),
            dt: config.dt,
        }
    }
}

/// Per-node compartment fractions at one tick. Invariant: each node's
/// `s + i + r` stays within 1e-9 of one.
#[derive(Debug, Clone, PartialEq)]
pub struct CompartmentState {
    pub s: Vec<f64>,
    pub i: Vec<f64>,
    pub r: Vec<f64>,
    pub tick: u32,
}

impl CompartmentState {
    pub fn fully_susceptible(n: usize) -> Self {
        Self {
            s: vec![1.0; n],
            i: vec![0.0; n],
            r: vec![0.0; n],
            tick: 0,
        }
    }

    pub fn n(&self) -> usize {
        self.s.len()
    }

    /// Move a node entirely into the infectious compartment.
    pub fn seed_infected(&mut self, node: usize) {
        self.s[node] = 0.0;
        self.i[node] = 1.0;
        self.r[node] = 0.0;
    }

    /// Aggregate (S, I, R) in individuals (one node = one individual).
    pub fn totals(&self) -> (f64, f64, f64) {
        let s: f64 = self.s.iter().sum();
        let i: f64 = self.i.iter().sum();
        let r: f64 = self.r.iter().sum();
        (s, i, r)
    }

    /// Largest per-node deviation of `s + i + r` from one.
    pub fn conservation_error(&self) -> f64 {
        (0..self.n())
            .map(|k| (self.s[k] + self.i[k] + self.r[k] - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// Outcome of one network step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepResult {
    pub state: CompartmentState,
    /// Nodes whose fractions needed the clamp-and-rescale guard.
    pub clamped: usize,
}

/// Neighbor lists in compressed form, weights pre-evaluated through the
/// kernel. Both directions of every pair are present and each node's
/// neighbors are in ascending order.
struct Adjacency {
    offsets: Vec<u32>,
    neighbor: Vec<u32>,
    weight: Vec<f64>,
}

fn adjacency(snapshot: &ContactSnapshot, sigma: f64, d_t: f64) -> Adjacency {
    let n = snapshot.n;
    let mut counts = vec![0u32; n + 1];
    for p in &snapshot.pairs {
        counts[p.i as usize + 1] += 1;
        counts[p.j as usize + 1] += 1;
    }
    for k in 0..n {
        counts[k + 1] += counts[k];
    }
    let offsets = counts;
    let total = offsets[n] as usize;
    let mut neighbor = vec![0u32; total];
    let mut weight = vec![0.0f64; total];
    let mut cursor: Vec<u32> = offsets[..n].to_vec();
    // Pairs are sorted by (i, j); scanning them once appends each node's
    // partners in ascending order (all x < k arrive before all j > k).
    for p in &snapshot.pairs {
        let w = kernel(p.distance, sigma, d_t);
        let ci = cursor[p.i as usize] as usize;
        neighbor[ci] = p.j;
        weight[ci] = w;
        cursor[p.i as usize] += 1;
        let cj = cursor[p.j as usize] as usize;
        neighbor[cj] = p.i;
        weight[cj] = w;
        cursor[p.j as usize] += 1;
    }
    Adjacency {
        offsets,
        neighbor,
        weight,
    }
}

/// One explicit Euler step of the distance-modulated network SIR.
///
/// Negative overshoot is clamped to zero and the triple rescaled to sum
/// one; the guard only engages when a clamp happened or the sum drifted
/// beyond 1e-12, so unperturbed trajectories keep their exact floating
/// point values. A pre-clamp fraction outside `[-0.1, 1.1]` aborts with
/// [`DynamicsError::Unstable`].
pub fn step_network_sir(
    state: &CompartmentState,
    snapshot: &ContactSnapshot,
    k_mean: f64,
    params: &EpidemicParams,
) -> Result<StepResult, DynamicsError> {
    let n = state.n();
    if snapshot.n != n {
        return Err(DynamicsError::MismatchedNodes {
            state: n,
            snapshot: snapshot.n,
        });
    }
    if params.beta > 0.0 && !(k_mean > 0.0) {
        return Err(DynamicsError::ZeroMeanDegree);
    }
    let adj = adjacency(snapshot, params.sigma, params.d_t);
    let scale = params.beta * k_mean;
    let force: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|node| {
            let lo = adj.offsets[node] as usize;
            let hi = adj.offsets[node + 1] as usize;
            let mut acc = 0.0;
            for k in lo..hi {
                acc += adj.weight[k] * state.i[adj.neighbor[k] as usize];
            }
            scale * state.s[node] * acc
        })
        .collect();

    let dt = params.dt;
    let mu = params.mu;
    let tick = state.tick + 1;
    let mut s = vec![0.0; n];
    let mut i = vec![0.0; n];
    let mut r = vec![0.0; n];
    let mut clamped = 0usize;
    for node in 0..n {
        let s1 = state.s[node] - dt * force[node];
        let i1 = state.i[node] + dt * (force[node] - mu * state.i[node]);
        let r1 = state.r[node] + dt * mu * state.i[node];
        for v in [s1, i1, r1] {
            if !(-0.1..=1.1).contains(&v) {
                return Err(DynamicsError::Unstable { tick, node });
            }
        }
        let (mut s2, mut i2, mut r2) = (s1, i1, r1);
        let mut hit = false;
        if s2 < 0.0 {
            s2 = 0.0;
            hit = true;
        }
        if i2 < 0.0 {
            i2 = 0.0;
            hit = true;
        }
        if r2 < 0.0 {
            r2 = 0.0;
            hit = true;
        }
        let sum = s2 + i2 + r2;
        if hit || (sum - 1.0).abs() > 1e-12 {
            if sum > 0.0 {
                s2 /= sum;
                i2 /= sum;
                r2 /= sum;
            }
            if hit {
                clamped += 1;
            }
        }
        s[node] = s2;
        i[node] = i2;
        r[node] = r2;
    }
    Ok(StepResult {
        state: CompartmentState { s, i, r, tick },
        clamped,
    })
}

/// One recorded point of the classical baseline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SirPoint {
    pub t: f64,
    pub s: f64,
    pub i: f64,
    pub r: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalTrajectory {
    pub dt: f64,
    pub points: Vec<SirPoint>,
}

impl ClassicalTrajectory {
    pub fn last(&self) -> SirPoint {
        *self.points.last().expect("trajectory has at least t = 0")
    }
}

/// RK4 integration of the classical well-mixed SIR over `horizon` days.
pub fn run_classical_sir(
    s0: f64,
    i0: f64,
    r0: f64,
    beta: f64,
    mu: f64,
    dt: f64,
    horizon: f64,
) -> Result<ClassicalTrajectory, DynamicsError> {
    if beta < 0.0 || mu < 0.0 {
        return Err(DynamicsError::NegativeRate { beta, mu });
    }
    if !(dt > 0.0) {
        return Err(DynamicsError::BadDt);
    }
    let sum = s0 + i0 + r0;
    if (sum - 1.0).abs() > 1e-9 {
        return Err(DynamicsError::BadInitialSum(sum));
    }
    let deriv = |s: f64, i: f64| -> (f64, f64, f64) {
        let f = beta * s * i;
        (-f, f - mu * i, mu * i)
    };
    let steps = (horizon / dt).round().max(1.0) as usize;
    let mut points = Vec::with_capacity(steps + 1);
    let (mut s, mut i, mut r) = (s0, i0, r0);
    points.push(SirPoint { t: 0.0, s, i, r });
    for k in 1..=steps {
        let (k1s, k1i, k1r) = deriv(s, i);
        let (k2s, k2i, k2r) = deriv(s + 0.5 * dt * k1s, i + 0.5 * dt * k1i);
        let (k3s, k3i, k3r) = deriv(s + 0.5 * dt * k2s, i + 0.5 * dt * k2i);
        let (k4s, k4i, k4r) = deriv(s + dt * k3s, i + dt * k3i);
        s += dt / 6.0 * (k1s + 2.0 * k2s + 2.0 * k3s + k4s);
        i += dt / 6.0 * (k1i + 2.0 * k2i + 2.0 * k3i + k4i);
        r += dt / 6.0 * (k1r + 2.0 * k2r + 2.0 * k3r + k4r);
        points.push(SirPoint {
            t: k as f64 * dt,
            s,
            i,
            r,
        });
    }
    Ok(ClassicalTrajectory { dt, points })
}
