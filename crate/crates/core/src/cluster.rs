//! Feature standardization and k-medoids (PAM: greedy BUILD, then best-swap
//! passes until no swap lowers the cost).
//!
//! Ties are always broken towards the lowest index, so results depend only on
//! the input order.

use alloc::vec;
use alloc::vec::Vec;

use crate::data::FeatureTable;
use crate::linalg::Dense;
use crate::{Error, Result};

/// Per-column z-score with population variance; zero-variance columns become
/// zeros.
pub fn standardize(features: &FeatureTable) -> Result<FeatureTable> {
    let v = features.values();
    if v.rows() < 2 {
        return Err(Error::invalid("standardization needs at least two rows"));
    }
    features.with_values(standardize_columns(v))
}

pub(crate) fn standardize_columns(v: &Dense) -> Dense {
    let (n, d) = v.shape();
    let mut out = Dense::zeros(n, d);
    for j in 0..d {
        let col = v.column(j);
        let (mean, std) = mean_std(&col);
        let scale = col.iter().fold(0.0f64, |m, x| m.max(libm::fabs(*x)));
        if std <= 1e-12 * scale || std == 0.0 {
            continue;
        }
        for i in 0..n {
            out[(i, j)] = (col[i] - mean) / std;
        }
    }
    out
}

/// Mean and population standard deviation.
pub(crate) fn mean_std(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, libm::sqrt(var))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Distance {
    #[default]
    Euclidean,
    Manhattan,
}

impl Distance {
    pub fn between(self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Distance::Euclidean => libm::sqrt(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()),
            Distance::Manhattan => a.iter().zip(b).map(|(x, y)| libm::fabs(x - y)).sum(),
        }
    }
}

/// Result of k-medoids.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ClusterAssignment {
    /// Row indices of the medoids, ascending. Cluster `c` is `medoids[c]`.
    pub medoids: Vec<usize>,
    /// Cluster of every row.
    pub labels: Vec<usize>,
    /// Sum of point-to-medoid distances.
    pub cost: f64,
    /// Cost after BUILD, then after each applied swap.
    pub trace: Vec<f64>,
}

impl ClusterAssignment {
    /// Builds an assignment from explicit labels, e.g. for fixtures.
    /// `medoids` is left empty and `cost` at zero.
    pub fn from_labels(labels: Vec<usize>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::invalid("empty label list"));
        }
        Ok(ClusterAssignment {
            medoids: Vec::new(),
            labels,
            cost: 0.0,
            trace: Vec::new(),
        })
    }

    pub fn n_points(&self) -> usize {
        self.labels.len()
    }

    /// Number of clusters (one past the largest label).
    pub fn k(&self) -> usize {
        self.labels.iter().max().map_or(0, |m| m + 1)
    }

    /// Row indices of each cluster, ascending.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.k()];
        for (i, &c) in self.labels.iter().enumerate() {
            out[c].push(i);
        }
        out
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.members().iter().map(Vec::len).collect()
    }
}

/// Pairwise distance matrix.
pub fn distance_matrix(points: &Dense, distance: Distance) -> Dense {
    let n = points.rows();
    let mut d = Dense::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let v = distance.between(points.row(i), points.row(j));
            d[(i, j)] = v;
            d[(j, i)] = v;
        }
    }
    d
}

fn total_cost(dist: &Dense, medoids: &[usize]) -> f64 {
    (0..dist.rows())
        .map(|i| medoids.iter().map(|&m| dist[(i, m)]).fold(f64::INFINITY, f64::min))
        .sum()
}

/// PAM on the rows of `features` (used as given; standardize first if the
/// dimensions have different units).
pub fn kmedoids(features: &FeatureTable, k: usize, distance: Distance) -> Result<ClusterAssignment> {
    let n = features.n_rows();
    if n == 0 {
        return Err(Error::invalid("empty feature table"));
    }
    if k == 0 || k > n {
        return Err(Error::invalid(alloc::format!("k = {k} must be in [1, {n}]")));
    }
    let dist = distance_matrix(features.values(), distance);
    Ok(pam(&dist, k))
}

/// PAM on a precomputed symmetric dissimilarity matrix.
pub fn pam(dist: &Dense, k: usize) -> ClusterAssignment {
    let n = dist.rows();
    assert!(k >= 1 && k <= n);

    // BUILD: start from the most central point, then repeatedly add the
    // point with the largest cost reduction.
    let mut medoids: Vec<usize> = Vec::with_capacity(k);
    let mut nearest = vec![f64::INFINITY; n];
    let mut is_medoid = vec![false; n];
    for _ in 0..k {
        let mut best = (f64::INFINITY, usize::MAX);
        for c in (0..n).filter(|&c| !is_medoid[c]) {
            let cost: f64 = (0..n).map(|i| nearest[i].min(dist[(i, c)])).sum();
            if cost < best.0 {
                best = (cost, c);
            }
        }
        let c = best.1;
        medoids.push(c);
        is_medoid[c] = true;
        for i in 0..n {
            nearest[i] = nearest[i].min(dist[(i, c)]);
        }
    }
    let mut cost = total_cost(dist, &medoids);
    let mut trace = vec![cost];

    // SWAP: evaluate every (medoid, non-medoid) exchange, apply the best one
    // while it strictly lowers the cost.
    loop {
        let mut best = (cost, usize::MAX, usize::MAX);
        for slot in 0..k {
            for h in (0..n).filter(|&h| !is_medoid[h]) {
                let mut trial = medoids.clone();
                trial[slot] = h;
                let c = total_cost(dist, &trial);
                if c < best.0 {
                    best = (c, slot, h);
                }
            }
        }
        if best.1 == usize::MAX || !(best.0 < cost - 1e-12 * cost.abs()) {
            break;
        }
        is_medoid[medoids[best.1]] = false;
        is_medoid[best.2] = true;
        medoids[best.1] = best.2;
        cost = best.0;
        trace.push(cost);
    }

    medoids.sort_unstable();
    let labels = (0..n)
        .map(|i| {
            if let Some(c) = medoids.iter().position(|&m| m == i) {
                return c;
            }
            let mut best = (f64::INFINITY, 0);
            for (c, &m) in medoids.iter().enumerate() {
                if dist[(i, m)] < best.0 {
                    best = (dist[(i, m)], c);
                }
            }
            best.1
        })
        .collect();
    ClusterAssignment {
        medoids,
        labels,
        cost,
        trace,
    }
}

/// Default cluster count for `n` ground motions: `max(2, round(n / 10))`.
pub fn default_k(n: usize) -> usize {
    libm::round(n as f64 / 10.0).max(2.0) as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::FeatureAxis;
    use alloc::vec::Vec;

    fn table(rows: &[Vec<f64>]) -> FeatureTable {
        FeatureTable::unnamed(FeatureAxis::GroundMotion, Dense::from_rows(rows).unwrap()).unwrap()
    }

    fn one_d(xs: &[f64]) -> FeatureTable {
        table(&xs.iter().map(|&x| vec![x]).collect::<Vec<_>>())
    }

    /// Exhaustive optimum over all k-subsets.
    fn brute_force(dist: &Dense, k: usize) -> (f64, Vec<usize>) {
        let n = dist.rows();
        let mut best = (f64::INFINITY, Vec::new());
        let mut combo: Vec<usize> = (0..k).collect();
        loop {
            let c = total_cost(dist, &combo);
            if c < best.0 {
                best = (c, combo.clone());
            }
            let mut i = k;
            while i > 0 && combo[i - 1] == n - k + i - 1 {
                i -= 1;
            }
            if i == 0 {
                return best;
            }
            combo[i - 1] += 1;
            for j in i..k {
                combo[j] = combo[j - 1] + 1;
            }
        }
    }

    #[test]
    fn standardize_rules() {
        let t = table(&[vec![0.0, 3.0, 1.0], vec![10.0, 3.0, -1.0]]);
        let z = standardize(&t).unwrap();
        assert_eq!(z.values().column(0), vec![-1.0, 1.0]);
        assert_eq!(z.values().column(1), vec![0.0, 0.0]);
        assert!((z.values()[(0, 2)] - 1.0).abs() < 1e-12 && (z.values()[(1, 2)] + 1.0).abs() < 1e-12);
        assert!(standardize(&table(&[vec![1.0]])).is_err());
    }

    #[test]
    fn k_equals_n_gives_zero_cost() {
        let a = kmedoids(&one_d(&[0.0, 1.0, 5.0, 9.0]), 4, Distance::Euclidean).unwrap();
        assert_eq!(a.medoids, vec![0, 1, 2, 3]);
        assert_eq!(a.labels, vec![0, 1, 2, 3]);
        assert_eq!(a.cost, 0.0);
    }

    #[test]
    fn two_blobs_match_brute_force() {
        let t = one_d(&[0.0, 0.1, 0.2, 10.0, 10.1, 10.2]);
        let a = kmedoids(&t, 2, Distance::Euclidean).unwrap();
        let (opt, set) = brute_force(&distance_matrix(t.values(), Distance::Euclidean), 2);
        assert!((a.cost - opt).abs() < 1e-12);
        assert_eq!(a.medoids, set);
        assert_eq!(a.medoids, vec![1, 4]);
        assert_eq!(a.labels, vec![0, 0, 0, 1, 1, 1]);
    }

    #[test]
    fn repeated_point_and_outlier() {
        let t = one_d(&[2.0, 2.0, 2.0, 2.0, 2.0, 40.0]);
        let a = kmedoids(&t, 2, Distance::Manhattan).unwrap();
        assert_eq!(a.medoids, vec![0, 5]);
        assert_eq!(a.cost, 0.0);
    }

    #[test]
    fn invalid_k() {
        let t = one_d(&[0.0, 1.0]);
        assert!(kmedoids(&t, 3, Distance::Euclidean).is_err());
        assert!(kmedoids(&t, 0, Distance::Euclidean).is_err());
    }

    #[test]
    fn default_k_rule() {
        assert_eq!(default_k(100), 10);
        assert_eq!(default_k(8), 2);
        assert_eq!(default_k(26), 3);
    }
}
