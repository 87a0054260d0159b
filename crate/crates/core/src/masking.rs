//! Observation masks: which (ground motion, material) cells get simulated.
//!
//! Every column is drawn independently from its own stream
//! `seed::derive(seed, &[MASK_COLUMN, j])`. The stratified sampler consumes
//! that stream cluster by cluster, so a single cluster spanning all rows
//! reproduces the uniform mask bit for bit.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::index;

use crate::cluster::ClusterAssignment;
use crate::data::{column_budget, ObservationMask};
use crate::seed::{self, stream};
use crate::{Error, Result};

/// How the observed rows of each column are chosen.
#[derive(Debug, Clone, PartialEq)]
pub enum SamplingStrategy {
    Uniform,
    ClusterStratified(ClusterAssignment),
}

impl SamplingStrategy {
    pub fn mask(&self, n_rows: usize, n_cols: usize, cr: f64, seed: u64) -> Result<ObservationMask> {
        match self {
            SamplingStrategy::Uniform => uniform_mask(n_rows, n_cols, cr, seed),
            SamplingStrategy::ClusterStratified(a) => {
                if a.n_points() != n_rows {
                    return Err(Error::dims(
                        alloc::format!("{n_rows} labels"),
                        alloc::format!("{}", a.n_points()),
                    ));
                }
                stratified_mask(a, n_cols, cr, seed)
            }
        }
    }
}

fn checked_budget(n_rows: usize, cr: f64) -> Result<usize> {
    if !(cr > 0.0 && cr <= 1.0) {
        return Err(Error::invalid(alloc::format!("compression ratio {cr} outside (0, 1]")));
    }
    let b = column_budget(n_rows, cr);
    if b == 0 || b > n_rows {
        return Err(Error::invalid(alloc::format!(
            "budget {b} for {n_rows} rows at cr {cr} is not in [1, {n_rows}]"
        )));
    }
    Ok(b)
}

/// Each column observes `round(n_rows * cr)` distinct rows drawn uniformly.
pub fn uniform_mask(n_rows: usize, n_cols: usize, cr: f64, seed: u64) -> Result<ObservationMask> {
    let b = checked_budget(n_rows, cr)?;
    let mut flags = vec![false; n_rows * n_cols];
    for j in 0..n_cols {
        let mut rng = seed::rng(seed::derive(seed, &[stream::MASK_COLUMN, j as u64]));
        for i in index::sample(&mut rng, n_rows, b) {
            flags[i * n_cols + j] = true;
        }
    }
    ObservationMask::new(n_rows, n_cols, flags, cr)
}

/// Splits `budget` across clusters of the given sizes.
///
/// Shares proportional to size are floored and the leftover units go to the
/// largest remainders (ties to the lower index), never past a cluster's size.
/// When the budget covers every non-empty cluster, each empty quota is then
/// raised to one by taking a unit from the cluster furthest above its share.
pub fn stratum_quotas(sizes: &[usize], budget: usize) -> Result<Vec<usize>> {
    let total: usize = sizes.iter().sum();
    if budget > total {
        return Err(Error::invalid(alloc::format!(
            "budget {budget} exceeds {total} points"
        )));
    }
    if total == 0 {
        return Ok(vec![0; sizes.len()]);
    }
    // Integer arithmetic: share_c = budget * s_c / total exactly.
    let mut quotas: Vec<usize> = sizes.iter().map(|&s| budget * s / total).collect();
    let rem: Vec<usize> = sizes.iter().map(|&s| budget * s % total).collect();
    let mut order: Vec<usize> = (0..sizes.len()).collect();
    order.sort_by(|&a, &b| rem[b].cmp(&rem[a]).then(a.cmp(&b)));
    let mut left = budget - quotas.iter().sum::<usize>();
    while left > 0 {
        let before = left;
        for &c in &order {
            if left == 0 {
                break;
            }
            if quotas[c] < sizes[c] {
                quotas[c] += 1;
                left -= 1;
            }
        }
        debug_assert!(left < before);
    }

    let non_empty = sizes.iter().filter(|&&s| s > 0).count();
    if budget >= non_empty {
        // surplus_c = quota_c - share_c, scaled by total to stay integral.
        let surplus = |q: &[usize], c: usize| (q[c] * total) as i128 - (budget * sizes[c]) as i128;
        while let Some(empty) = (0..sizes.len()).find(|&c| sizes[c] > 0 && quotas[c] == 0) {
            let donor = (0..sizes.len())
                .filter(|&c| quotas[c] > 1)
                .max_by(|&a, &b| surplus(&quotas, a).cmp(&surplus(&quotas, b)).then(b.cmp(&a)))
                .expect("budget >= non-empty clusters leaves a donor");
            quotas[donor] -= 1;
            quotas[empty] = 1;
        }
    }
    Ok(quotas)
}

/// Per column, draws each cluster's quota uniformly from its members.
pub fn stratified_mask(
    assignment: &ClusterAssignment,
    n_cols: usize,
    cr: f64,
    seed: u64,
) -> Result<ObservationMask> {
    let n_rows = assignment.n_points();
    let b = checked_budget(n_rows, cr)?;
    let members = assignment.members();
    let sizes: Vec<usize> = members.iter().map(Vec::len).collect();
    let quotas = stratum_quotas(&sizes, b)?;
    let mut flags = vec![false; n_rows * n_cols];
    for j in 0..n_cols {
        let mut rng = seed::rng(seed::derive(seed, &[stream::MASK_COLUMN, j as u64]));
        for (group, &q) in members.iter().zip(&quotas) {
            if q == 0 {
                continue;
            }
            for p in index::sample(&mut rng, group.len(), q) {
                flags[group[p] * n_cols + j] = true;
            }
        }
    }
    ObservationMask::new(n_rows, n_cols, flags, cr)
}
