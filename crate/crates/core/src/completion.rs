//! Low-rank completion by regularized alternating least squares.
//!
//! Minimizes
//!
//! ```text
//! sum over observed (i, j) of (X_ij - a_i . b_j)^2 + lambda (|A|_F^2 + |B|_F^2)
//! ```
//!
//! by solving exactly for every row of `A` with `B` fixed, then every column
//! of `B` with `A` fixed. Each half-sweep is an exact block minimization, so
//! the objective never increases.
//!
//! The matrix is divided by the root mean square of its observed entries
//! before fitting and multiplied back afterwards. It is deliberately not
//! centered: subtracting a mean raises the rank of a low-rank matrix by one.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::index;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::data::{EdpMatrix, Factorization, ObservationMask};
use crate::linalg::{Cholesky, Dense};
use crate::seed::{self, stream};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct CompletionConfig {
    pub rank: usize,
    /// Ridge weight on the scaled problem. `None` uses
    /// `0.01 * mean(observed^2)` of the scaled matrix, which is `0.01`.
    pub lambda: Option<f64>,
    pub max_sweeps: usize,
    /// Stop once the relative objective decrease of a sweep falls below this.
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for CompletionConfig {
    fn default() -> Self {
        CompletionConfig {
            rank: 3,
            lambda: None,
            max_sweeps: 500,
            tolerance: 1e-8,
            seed: 0,
        }
    }
}

impl CompletionConfig {
    pub fn with_rank(mut self, rank: usize) -> Self {
        self.rank = rank;
        self
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = Some(lambda);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn validate(&self, rows: usize, cols: usize) -> Result<()> {
        if self.rank < 1 || self.rank >= rows.min(cols) {
            return Err(Error::invalid(alloc::format!(
                "rank {} must satisfy 1 <= R < min({rows}, {cols})",
                self.rank
            )));
        }
        if let Some(l) = self.lambda {
            if !(l >= 0.0) || !l.is_finite() {
                return Err(Error::invalid(alloc::format!("lambda {l} must be finite and >= 0")));
            }
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::invalid("tolerance must be positive"));
        }
        if self.max_sweeps == 0 {
            return Err(Error::invalid("max_sweeps must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Completion {
    /// `A * B` in the units of the input matrix.
    pub estimate: Dense,
    /// Factors in input units (the scale is folded into `A`).
    pub factorization: Factorization,
    /// Objective of the scaled problem after each sweep.
    pub trace: Vec<f64>,
    /// Root mean square of the observed entries, the divisor used for fitting.
    pub scale: f64,
    /// Ridge weight actually used on the scaled problem.
    pub lambda: f64,
}

impl Completion {
    pub fn sweeps(&self) -> usize {
        self.trace.len()
    }
}

/// Completes `matrix` from the cells `mask` marks observed.
pub fn als_complete(matrix: &EdpMatrix, mask: &ObservationMask, config: &CompletionConfig) -> Result<Completion> {
    let v = matrix.values();
    if (mask.rows(), mask.cols()) != v.shape() {
        return Err(Error::dims(
            alloc::format!("mask {:?}", v.shape()),
            alloc::format!("{:?}", (mask.rows(), mask.cols())),
        ));
    }
    als_core(v, mask.flags(), config)
}

/// Completion on raw values and a row-major observed-flag slice.
pub fn als_core(values: &Dense, observed: &[bool], config: &CompletionConfig) -> Result<Completion> {
    let (n, m) = values.shape();
    config.validate(n, m)?;
    if observed.len() != n * m {
        return Err(Error::dims(alloc::format!("{} flags", n * m), alloc::format!("{}", observed.len())));
    }
    let r = config.rank;

    let mut sum_sq = 0.0;
    let mut count = 0usize;
    for (p, &o) in observed.iter().enumerate() {
        if o {
            let x = values.as_slice()[p];
            if !x.is_finite() {
                return Err(Error::NonFinite { row: p / m, col: p % m });
            }
            sum_sq += x * x;
            count += 1;
        }
    }
    if count == 0 {
        return Err(Error::invalid("mask observes no cells"));
    }
    let rms = libm::sqrt(sum_sq / count as f64);
    let scale = if rms > 0.0 { rms } else { 1.0 };
    let x = values.map(|t| t / scale);
    // After scaling the mean squared observed entry is 1 (or the data is all
    // zero), so the default weight is simply 0.01.
    let lambda = config.lambda.unwrap_or(1e-2);

    let row_obs: Vec<Vec<usize>> = (0..n).map(|i| (0..m).filter(|&j| observed[i * m + j]).collect()).collect();
    let col_obs: Vec<Vec<usize>> = (0..m).map(|j| (0..n).filter(|&i| observed[i * m + j]).collect()).collect();

    let mut rng = seed::rng(seed::derive(config.seed, &[stream::FACTOR_INIT]));
    let std = 1.0 / libm::sqrt(r as f64);
    let mut gauss = || std * rng.sample::<f64, _>(StandardNormal);
    // A is n x r, B is stored transposed (m x r) so both updates read rows.
    let mut a = Dense::from_fn(n, r, |_, _| gauss());
    let mut bt = Dense::from_fn(m, r, |_, _| gauss());

    let objective = |a: &Dense, bt: &Dense| -> f64 {
        let mut f = 0.0;
        for (i, cols) in row_obs.iter().enumerate() {
            for &j in cols {
                let d = x[(i, j)] - dot(a.row(i), bt.row(j));
                f += d * d;
            }
        }
        let reg: f64 = a.as_slice().iter().chain(bt.as_slice()).map(|t| t * t).sum();
        f + lambda * reg
    };

    let mut trace = Vec::new();
    let mut prev = f64::INFINITY;
    for _ in 0..config.max_sweeps {
        for (i, cols) in row_obs.iter().enumerate() {
            let sol = ridge_solve(&bt, cols, |j| x[(i, j)], lambda, r).map_err(|e| factor_error(e, "row", i))?;
            a.row_mut(i).copy_from_slice(&sol);
        }
        for (j, rows) in col_obs.iter().enumerate() {
            let sol = ridge_solve(&a, rows, |i| x[(i, j)], lambda, r).map_err(|e| factor_error(e, "column", j))?;
            bt.row_mut(j).copy_from_slice(&sol);
        }
        let f = objective(&a, &bt);
        trace.push(f);
        if f == 0.0 || (prev - f) < config.tolerance * prev {
            break;
        }
        prev = f;
    }

    let a_out = a.map(|t| t * scale);
    let factorization = Factorization::new(a_out, bt.transpose())?;
    let estimate = factorization.product();
    if let Some((row, col)) = estimate.first_non_finite() {
        return Err(Error::NonFinite { row, col });
    }
    Ok(Completion {
        estimate,
        factorization,
        trace,
        scale,
        lambda,
    })
}

fn factor_error(e: Error, axis: &str, index: usize) -> Error {
    match e {
        Error::Singular(msg) => Error::Singular(alloc::format!("{axis} {index}: {msg}")),
        other => other,
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solves `(F_S^T F_S + lambda I) w = F_S^T y_S` over the rows `S` of `f`.
fn ridge_solve(f: &Dense, support: &[usize], y: impl Fn(usize) -> f64, lambda: f64, r: usize) -> Result<Vec<f64>> {
    let mut g = Dense::zeros(r, r);
    let mut rhs = vec![0.0; r];
    for &k in support {
        let row = f.row(k);
        let yk = y(k);
        for p in 0..r {
            rhs[p] += row[p] * yk;
            for q in 0..=p {
                g[(p, q)] += row[p] * row[q];
            }
        }
    }
    for p in 0..r {
        g[(p, p)] += lambda;
        for q in 0..p {
            g[(q, p)] = g[(p, q)];
        }
    }
    if support.is_empty() && lambda == 0.0 {
        return Err(Error::Singular("no observed entries and zero regularization".into()));
    }
    if support.is_empty() {
        return Ok(vec![0.0; r]);
    }
    let chol = Cholesky::factor(&g)?;
    chol.solve_in_place(&mut rhs);
    Ok(rhs)
}

/// Picks the rank from `grid` with the smallest error on a seeded holdout of
/// the observed cells. Errors within a relative `1e-9` count as ties and go
/// to the smaller rank.
pub fn select_rank(
    matrix: &EdpMatrix,
    mask: &ObservationMask,
    grid: &[usize],
    holdout_fraction: f64,
    base: &CompletionConfig,
    seed: u64,
) -> Result<usize> {
    if grid.is_empty() {
        return Err(Error::invalid("empty rank grid"));
    }
    if !(holdout_fraction > 0.0 && holdout_fraction <= 0.5) {
        return Err(Error::invalid(alloc::format!("holdout fraction {holdout_fraction} outside (0, 0.5]")));
    }
    let v = matrix.values();
    let (n, m) = v.shape();
    if (mask.rows(), mask.cols()) != (n, m) {
        return Err(Error::dims(alloc::format!("mask {:?}", (n, m)), alloc::format!("{:?}", (mask.rows(), mask.cols()))));
    }
    let mut ranks = grid.to_vec();
    ranks.sort_unstable();
    ranks.dedup();
    if ranks.len() == 1 {
        return Ok(ranks[0]);
    }

    let cells: Vec<(usize, usize)> = mask.observed_cells().collect();
    let h = libm::floor(cells.len() as f64 * holdout_fraction + 0.5) as usize;
    if h == 0 {
        return Err(Error::invalid("holdout is empty"));
    }
    let mut rng = seed::rng(seed::derive(seed, &[stream::HOLDOUT]));
    let held: Vec<(usize, usize)> = index::sample(&mut rng, cells.len(), h).into_iter().map(|p| cells[p]).collect();
    let mut train = mask.flags().to_vec();
    for &(i, j) in &held {
        train[i * m + j] = false;
    }
    if let Some(j) = (0..m).find(|&j| (0..n).all(|i| !train[i * m + j])) {
        return Err(Error::invalid(alloc::format!("holdout empties column {j}")));
    }

    let mut best: Option<(f64, usize)> = None;
    for &rank in &ranks {
        let fit = als_core(v, &train, &base.clone().with_rank(rank))?;
        let err: f64 = held
            .iter()
            .map(|&(i, j)| {
                let d = v[(i, j)] - fit.estimate[(i, j)];
                d * d
            })
            .sum();
        match best {
            Some((e, _)) if !(err < e * (1.0 - 1e-9)) => {}
            _ => best = Some((err, rank)),
        }
    }
    Ok(best.expect("grid is non-empty").1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::EdpKind;
    use crate::masking::uniform_mask;
    use proptest::prelude::*;
    use rand::Rng;

    fn low_rank(n: usize, m: usize, r: usize, seed: u64) -> Dense {
        let mut rng = seed::rng(seed);
        let u = Dense::from_fn(n, r, |_, _| rng.sample::<f64, _>(StandardNormal));
        let w = Dense::from_fn(r, m, |_, _| rng.sample::<f64, _>(StandardNormal));
        u.matmul(&w).unwrap()
    }

    fn edp(values: Dense) -> EdpMatrix {
        EdpMatrix::with_default_ids(EdpKind::TopDisplacement, values).unwrap()
    }

    fn rel_err(a: &Dense, b: &Dense) -> f64 {
        let num: f64 = a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| (x - y) * (x - y)).sum();
        libm::sqrt(num) / a.frobenius_norm()
    }

    fn assert_monotone(trace: &[f64]) {
        for w in trace.windows(2) {
            assert!(w[1] <= w[0] + 1e-12 * w[0].abs().max(1.0), "{} > {}", w[1], w[0]);
        }
    }

    #[test]
    fn fully_observed_rank_one() {
        let x = low_rank(20, 8, 1, 3);
        let cfg = CompletionConfig::default().with_rank(1).with_lambda(1e-10);
        let c = als_complete(&edp(x.clone()), &ObservationMask::full(20, 8), &cfg).unwrap();
        assert!(rel_err(&x, &c.estimate) < 1e-8, "{}", rel_err(&x, &c.estimate));
        assert_monotone(&c.trace);
    }

    #[test]
    fn two_by_two_closed_form() {
        // Observed 1, 2, 2; the hidden cell of a rank-1 matrix is 2 * 2 / 1.
        let x = Dense::from_rows(&[vec![1.0, 2.0], vec![2.0, 0.0]]).unwrap();
        let flags = vec![true, true, true, false];
        let cfg = CompletionConfig::default().with_rank(1).with_lambda(1e-10);
        let c = als_core(&x, &flags, &CompletionConfig { max_sweeps: 5000, tolerance: 1e-15, ..cfg }).unwrap();
        assert!((c.estimate[(1, 1)] - 4.0).abs() < 1e-6, "{}", c.estimate[(1, 1)]);
    }

    #[test]
    fn zero_observations_give_zero_estimate() {
        let x = Dense::zeros(6, 4);
        let mask = uniform_mask(6, 4, 0.5, 1).unwrap();
        let c = als_complete(&edp(x), &mask, &CompletionConfig::default().with_rank(2)).unwrap();
        assert!(c.estimate.as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn full_rank_minus_one_reconstruction() {
        let x = low_rank(12, 6, 5, 8);
        let cfg = CompletionConfig { tolerance: 1e-14, max_sweeps: 5000, ..CompletionConfig::default().with_rank(5).with_lambda(1e-12) };
        let c = als_complete(&edp(x.clone()), &ObservationMask::full(12, 6), &cfg).unwrap();
        assert!(rel_err(&x, &c.estimate) < 1e-6, "{}", rel_err(&x, &c.estimate));
    }

    #[test]
    fn empty_row_without_regularization_is_singular() {
        let x = low_rank(4, 3, 1, 0);
        let mut flags = vec![true; 12];
        flags[0] = false;
        flags[1] = false;
        flags[2] = false;
        let cfg = CompletionConfig::default().with_rank(1).with_lambda(0.0);
        assert!(als_core(&x, &flags, &cfg).is_err());
        let c = als_core(&x, &flags, &CompletionConfig::default().with_rank(1)).unwrap();
        assert!(c.estimate.is_finite());
        assert!(c.estimate.row(0).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn rank_bounds_checked() {
        let x = edp(low_rank(5, 3, 1, 0));
        let mask = ObservationMask::full(5, 3);
        assert!(als_complete(&x, &mask, &CompletionConfig::default().with_rank(3)).is_err());
        assert!(als_complete(&x, &mask, &CompletionConfig::default().with_rank(0)).is_err());
    }

    #[test]
    fn scale_does_not_change_relative_fit() {
        let x = low_rank(30, 8, 2, 5);
        let mask = uniform_mask(30, 8, 0.6, 2).unwrap();
        let cfg = CompletionConfig::default().with_rank(2);
        let a = als_complete(&edp(x.clone()), &mask, &cfg).unwrap();
        let b = als_complete(&edp(x.map(|v| v * 1e6)), &mask, &cfg).unwrap();
        assert!(rel_err(&a.estimate, &b.estimate.map(|v| v * 1e-6)) < 1e-9);
        assert_eq!(a.trace.len(), b.trace.len());
    }

    #[test]
    fn select_rank_finds_true_rank() {
        let x = edp(low_rank(40, 10, 2, 11));
        let mask = uniform_mask(40, 10, 0.8, 4).unwrap();
        let base = CompletionConfig::default().with_lambda(1e-8);
        assert_eq!(select_rank(&x, &mask, &[1, 2, 3], 0.2, &base, 1).unwrap(), 2);
        assert_eq!(select_rank(&x, &mask, &[3], 0.2, &base, 1).unwrap(), 3);
        assert!(select_rank(&x, &mask, &[], 0.2, &base, 1).is_err());
        assert!(select_rank(&x, &mask, &[1, 2], 0.7, &base, 1).is_err());
    }

    #[test]
    fn select_rank_ties_go_low() {
        // All-zero data: every rank fits the holdout perfectly.
        let x = edp(Dense::zeros(10, 5));
        let mask = uniform_mask(10, 5, 0.8, 0).unwrap();
        assert_eq!(select_rank(&x, &mask, &[3, 1, 2], 0.2, &CompletionConfig::default(), 0).unwrap(), 1);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn trace_monotone_and_deterministic(seed: u64, cr in 0.3f64..=1.0, rank in 1usize..4) {
            let x = low_rank(25, 6, 2, seed);
            let mask = uniform_mask(25, 6, cr, seed ^ 1).unwrap();
            let cfg = CompletionConfig::default().with_rank(rank).with_seed(seed);
            let c = als_complete(&edp(x.clone()), &mask, &cfg).unwrap();
            assert_monotone(&c.trace);
            prop_assert!(c.estimate.is_finite());
            let again = als_complete(&edp(x), &mask, &cfg).unwrap();
            prop_assert_eq!(c.estimate, again.estimate);
        }
    }
}
