//! Order-fixed reductions.
//!
//! Parallel work is split per node index and the per-node partials are
//! folded sequentially in index order, so totals do not depend on the
//! number of worker threads.

use rayon::prelude::*;

/// Evaluate `f(i)` for every node index in parallel, preserving order.
pub(crate) fn per_node<F>(n: usize, f: F) -> Vec<f64>
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

/// Sequential left-to-right sum of per-node partials.
pub(crate) fn total(parts: &[f64]) -> f64 {
    parts.iter().sum()
}
