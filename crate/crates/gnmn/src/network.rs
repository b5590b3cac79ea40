//! Contact structure over node positions.
//!
//! A [`ContactSnapshot`] lists every unordered pair within the threshold
//! distance `d_T`, in canonical `(i, j)` order with `i < j`. The boundary is
//! inclusive: a pair exactly at `d_T` is in contact. Snapshots are what the
//! epidemic dynamics couple through; the edge estimate and the average
//! degree are evaluated on the raw (ungated) pairwise distances.
//!
//! [`build_snapshot`] uses a uniform hash grid of cell size `d_T` when that
//! pays off and falls back to the quadratic scan otherwise;
//! [`build_snapshot_brute_force`] is the semantic reference and always
//! available for cross-checking.

use std::collections::HashMap;
use std::io::{self, Write};

use rayon::prelude::*;
use thiserror::Error;

use crate::geometry::{euclidean_distance, Point2D};
use crate::parallel;

#[derive(Debug, Error, PartialEq)]
pub enum NetworkError {
    #[error("threshold distance must be > 0 for the edge estimate")]
    ZeroThreshold,
    #[error("area must be > 0")]
    ZeroArea,
    #[error("need at least one node")]
    EmptyPositions,
    #[error("positions and speeds differ in length ({0} vs {1})")]
    MismatchedSpeeds(usize, usize),
    #[error("bin width must be >= 1")]
    ZeroBinWidth,
    #[error("need at least one snapshot")]
    NoSnapshots,
    #[error("snapshots disagree on node count")]
    MismatchedSnapshots,
}

/// One in-contact pair, `i < j`, both within `d_T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContactPair {
    pub i: u32,
    pub j: u32,
    pub distance: f64,
}

/// All pairs within the threshold distance at one tick, sorted by `(i, j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContactSnapshot {
    pub n: usize,
    pub tick: u32,
    pub pairs: Vec<ContactPair>,
}

/// Quadratic reference construction of a snapshot.
pub fn build_snapshot_brute_force(positions: &[Point2D], d_t: f64, tick: u32) -> ContactSnapshot {
    let n = positions.len();
    let pairs: Vec<ContactPair> = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            let pi = positions[i];
            (i + 1..n).filter_map(move |j| {
                let d = euclidean_distance(pi, positions[j]);
                (d <= d_t).then_some(ContactPair {
                    i: i as u32,
                    j: j as u32,
                    distance: d,
                })
            })
        })
        .collect();
    ContactSnapshot { n, tick, pairs }
}

/// Snapshot construction, grid-accelerated for small `d_T`.
///
/// Output is identical to [`build_snapshot_brute_force`]: same pairs, same
/// canonical order, same distances.
pub fn build_snapshot(positions: &[Point2D], d_t: f64, tick: u32) -> ContactSnapshot {
    let n = positions.len();
    if !(d_t > 0.0) || n < 256 {
        return build_snapshot_brute_force(positions, d_t, tick);
    }
    let (mut min_x, mut min_y, mut max_x, mut max_y) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
    for p in positions {
        min_x = min_x.min(p.x);
        min_y = min_y.min(p.y);
        max_x = max_x.max(p.x);
        max_y = max_y.max(p.y);
    }
    let cells_x = ((max_x - min_x) / d_t).floor() as u64 + 1;
    let cells_y = ((max_y - min_y) / d_t).floor() as u64 + 1;
    if cells_x * cells_y < 16 {
        // too few cells for the grid to beat the scan
        return build_snapshot_brute_force(positions, d_t, tick);
    }

    let cell_of = |p: &Point2D| -> (u64, u64) {
        (
            ((p.x - min_x) / d_t).floor() as u64,
            ((p.y - min_y) / d_t).floor() as u64,
        )
    };
    let mut grid: HashMap<(u64, u64), Vec<u32>> = HashMap::new();
    for (idx, p) in positions.iter().enumerate() {
        grid.entry(cell_of(p)).or_default().push(idx as u32);
    }

    let mut pairs = Vec::new();
    let mut row = Vec::new();
    for i in 0..n {
        let pi = positions[i];
        let (cx, cy) = cell_of(&pi);
        row.clear();
        for gx in cx.saturating_sub(1)..=cx + 1 {
            for gy in cy.saturating_sub(1)..=cy + 1 {
                let Some(bucket) = grid.get(&(gx, gy)) else {
                    continue;
                };
                for &j in bucket {
                    if (j as usize) <= i {
                        continue;
                    }
                    let d = euclidean_distance(pi, positions[j as usize]);
                    if d <= d_t {
                        row.push(ContactPair {
                            i: i as u32,
                            j,
                            distance: d,
                        });
                    }
                }
            }
        }
        row.sort_unstable_by_key(|p| p.j);
        pairs.extend_from_slice(&row);
    }
    ContactSnapshot { n, tick, pairs }
}

/// Estimated total number of connections:
/// `E = sum_i (sum_j d_ij / A) * (v_i * T / d_T)` with the inner sum over
/// `j != i` and `T` in seconds.
pub fn estimate_edges(
    positions: &[Point2D],
    speeds: &[f64],
    area: f64,
    d_t: f64,
    horizon_seconds: f64,
) -> Result<f64, NetworkError> {
    if !(d_t > 0.0) {
        return Err(NetworkError::ZeroThreshold);
    }
    if !(area > 0.0) {
        return Err(NetworkError::ZeroArea);
    }
    if speeds.len() != positions.len() {
        return Err(NetworkError::MismatchedSpeeds(
            positions.len(),
            speeds.len(),
        ));
    }
    let n = positions.len();
    let parts = parallel::per_node(n, |i| {
        let mut sum_d = 0.0;
        for j in 0..n {
            if j != i {
                sum_d += euclidean_distance(positions[i], positions[j]);
            }
        }
        (sum_d / area) * (speeds[i] * horizon_seconds / d_t)
    });
    Ok(parallel::total(&parts))
}

/// Per-node degree as modeled from pairwise distances,
/// `<k_i> = N * sum_{j != i} d_ij / A`, plus the population mean.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeSummary {
    pub per_node: Vec<f64>,
    pub mean: f64,
}

/// Evaluate the degree model on current positions. The length/area scaling
/// is kept verbatim; the result is treated as a dimensionless model
/// quantity.
pub fn average_degree(positions: &[Point2D], area: f64) -> Result<DegreeSummary, NetworkError> {
    if !(area > 0.0) {
        return Err(NetworkError::ZeroArea);
    }
    let n = positions.len();
    if n == 0 {
        return Err(NetworkError::EmptyPositions);
    }
    let per_node = parallel::per_node(n, |i| {
        let mut sum_d = 0.0;
        for j in 0..n {
            if j != i {
                sum_d += euclidean_distance(positions[i], positions[j]);
            }
        }
        n as f64 * sum_d / area
    });
    let mean = parallel::total(&per_node) / n as f64;
    Ok(DegreeSummary { per_node, mean })
}

/// One histogram bin over the degree range `[lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistogramBin {
    pub lo: u64,
    pub hi: u64,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegreeHistogram {
    pub bins: Vec<HistogramBin>,
    pub mean_degree: f64,
}

/// Histogram of contact degrees accumulated across snapshots: a node's
/// degree is the total count of pairs incident to it over the whole run.
pub fn degree_histogram(
    snapshots: &[ContactSnapshot],
    bin_width: u64,
) -> Result<DegreeHistogram, NetworkError> {
    if bin_width == 0 {
        return Err(NetworkError::ZeroBinWidth);
    }
    let Some(first) = snapshots.first() else {
        return Err(NetworkError::NoSnapshots);
    };
    let n = first.n;
    if snapshots.iter().any(|s| s.n != n) {
        return Err(NetworkError::MismatchedSnapshots);
    }
    if n == 0 {
        return Err(NetworkError::EmptyPositions);
    }
    let mut degree = vec![0u64; n];
    for snap in snapshots {
        for p in &snap.pairs {
            degree[p.i as usize] += 1;
            degree[p.j as usize] += 1;
        }
    }
    let max_bin = degree.iter().map(|&d| d / bin_width).max().unwrap_or(0);
    let mut counts = vec![0u64; max_bin as usize + 1];
    for &d in &degree {
        counts[(d / bin_width) as usize] += 1;
    }
    let bins = counts
        .iter()
        .enumerate()
        .map(|(k, &c)| HistogramBin {
            lo: k as u64 * bin_width,
            hi: (k as u64 + 1) * bin_width,
            probability: c as f64 / n as f64,
        })
        .collect();
    let mean_degree = degree.iter().map(|&d| d as f64).sum::<f64>() / n as f64;
    Ok(DegreeHistogram {
        bins,
        mean_degree,
    })
}

/// Write a snapshot as `tick,i,j,d_ij` rows (ids 0-based, meters to six
/// decimal places).
pub fn write_snapshot_csv<W: Write>(w: &mut W, snapshot: &ContactSnapshot) -> io::Result<()> {
    writeln!(w, "tick,i,j,d_ij")?;
    for p in &snapshot.pairs {
        writeln!(w, "{},{},{},{:.6}", snapshot.tick, p.i, p.j, p.distance)?;
    }
    Ok(())
}

/// Write the degree histogram as `bin_lo,bin_hi,probability`.
pub fn write_histogram_csv<W: Write>(w: &mut W, hist: &DegreeHistogram) -> io::Result<()> {
    writeln!(w, "bin_lo,bin_hi,probability")?;
    for b in &hist.bins {
        writeln!(w, "{},{},{:.9}", b.lo, b.hi, b.probability)?;
    }
    Ok(())
}
