//! Side-information regression of response cells on ground-motion and
//! material features, and the two-estimate ensemble.
//!
//! A cell `(i, j)` is described by the z-scored ground-motion row `i`
//! followed by the z-scored material row `j`. Targets are standardized with
//! the mean and standard deviation of the training cells.

use alloc::vec;
use alloc::vec::Vec;

use crate::cluster::{mean_std, standardize_columns};
use crate::data::{EdpMatrix, FeatureTable, ObservationMask};
use crate::linalg::{Cholesky, Dense};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum RegressionModel {
    /// Ridge on the features with an unpenalized intercept.
    LinearRidge,
    /// Kernel ridge with a Gaussian kernel.
    #[default]
    KernelRidgeRbf,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct RegressionConfig {
    pub model: RegressionModel,
    pub lambda: f64,
    /// RBF length scale `h` in `exp(-|x - x'|^2 / (2 h^2))`; `None` takes the
    /// median pairwise distance between training points.
    pub bandwidth: Option<f64>,
}

impl Default for RegressionConfig {
    fn default() -> Self {
        RegressionConfig {
            model: RegressionModel::KernelRidgeRbf,
            lambda: 1e-2,
            bandwidth: None,
        }
    }
}

impl RegressionConfig {
    fn validate(&self) -> Result<()> {
        if !(self.lambda >= 0.0) || !self.lambda.is_finite() {
            return Err(Error::invalid(alloc::format!("lambda {} must be finite and >= 0", self.lambda)));
        }
        if let Some(h) = self.bandwidth {
            if !(h > 0.0) || !h.is_finite() {
                return Err(Error::invalid(alloc::format!("bandwidth {h} must be positive")));
            }
        }
        Ok(())
    }
}

/// Trains on the observed cells and predicts every cell of the matrix.
pub fn fit_predict(
    gm_features: &FeatureTable,
    material_features: &FeatureTable,
    matrix: &EdpMatrix,
    mask: &ObservationMask,
    config: &RegressionConfig,
) -> Result<Dense> {
    let (n, m) = matrix.values().shape();
    if (mask.rows(), mask.cols()) != (n, m) {
        return Err(Error::dims(alloc::format!("mask {:?}", (n, m)), alloc::format!("{:?}", (mask.rows(), mask.cols()))));
    }
    let cells: Vec<(usize, usize)> = mask.observed_cells().collect();
    fit_predict_cells(gm_features, material_features, matrix.values(), &cells, config)
}

/// As [`fit_predict`], with an explicit list of training cells.
pub fn fit_predict_cells(
    gm_features: &FeatureTable,
    material_features: &FeatureTable,
    values: &Dense,
    cells: &[(usize, usize)],
    config: &RegressionConfig,
) -> Result<Dense> {
    config.validate()?;
    let (n, m) = values.shape();
    if gm_features.n_rows() != n {
        return Err(Error::dims(alloc::format!("{n} ground-motion rows"), alloc::format!("{}", gm_features.n_rows())));
    }
    if material_features.n_rows() != m {
        return Err(Error::dims(alloc::format!("{m} material rows"), alloc::format!("{}", material_features.n_rows())));
    }
    if cells.len() < 2 {
        return Err(Error::invalid("regression needs at least two observed cells"));
    }
    for t in [gm_features.values(), material_features.values()] {
        if let Some((row, col)) = t.first_non_finite() {
            return Err(Error::NonFinite { row, col });
        }
    }
    let zg = standardize_columns(gm_features.values());
    let zm = standardize_columns(material_features.values());
    let feature = |i: usize, j: usize| -> Vec<f64> {
        let mut f = zg.row(i).to_vec();
        f.extend_from_slice(zm.row(j));
        f
    };

    let y: Vec<f64> = cells.iter().map(|&(i, j)| values[(i, j)]).collect();
    if let Some(p) = y.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { row: cells[p].0, col: cells[p].1 });
    }
    let (mu, sd) = mean_std(&y);
    if sd == 0.0 {
        return Ok(Dense::filled(n, m, mu));
    }
    let ys: Vec<f64> = y.iter().map(|v| (v - mu) / sd).collect();
    let train: Vec<Vec<f64>> = cells.iter().map(|&(i, j)| feature(i, j)).collect();

    let predict: alloc::boxed::Box<dyn Fn(&[f64]) -> f64> = match config.model {
        RegressionModel::LinearRidge => {
            let (w, b) = linear_ridge(&train, &ys, config.lambda)?;
            alloc::boxed::Box::new(move |x: &[f64]| b + x.iter().zip(&w).map(|(a, c)| a * c).sum::<f64>())
        }
        RegressionModel::KernelRidgeRbf => {
            let h = match config.bandwidth {
                Some(h) => h,
                None => median_distance(&train)?,
            };
            let alpha = kernel_ridge(&train, &ys, h, config.lambda)?;
            let gamma = 1.0 / (2.0 * h * h);
            let train = train.clone();
            alloc::boxed::Box::new(move |x: &[f64]| {
                train.iter().zip(&alpha).map(|(t, a)| a * libm::exp(-gamma * sq_dist(t, x))).sum()
            })
        }
    };

    let mut out = Dense::zeros(n, m);
    for i in 0..n {
        for j in 0..m {
            out[(i, j)] = mu + sd * predict(&feature(i, j));
        }
    }
    if let Some((row, col)) = out.first_non_finite() {
        return Err(Error::NonFinite { row, col });
    }
    Ok(out)
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Ridge with an unpenalized intercept, solved on centered data.
fn linear_ridge(x: &[Vec<f64>], y: &[f64], lambda: f64) -> Result<(Vec<f64>, f64)> {
    let n = x.len();
    let d = x[0].len();
    let mean: Vec<f64> = (0..d).map(|k| x.iter().map(|r| r[k]).sum::<f64>() / n as f64).collect();
    let ybar = y.iter().sum::<f64>() / n as f64;
    // Features constant over the training cells carry no information and
    // would make the unregularized system singular.
    let active: Vec<usize> = (0..d)
        .filter(|&k| x.iter().any(|r| (r[k] - mean[k]).abs() > 1e-12 * (1.0 + mean[k].abs())))
        .collect();
    let da = active.len();
    let mut w = vec![0.0; d];
    if da > 0 {
        let mut g = Dense::zeros(da, da);
        let mut rhs = vec![0.0; da];
        for (r, &yk) in x.iter().zip(y) {
            let c: Vec<f64> = active.iter().map(|&k| r[k] - mean[k]).collect();
            for p in 0..da {
                rhs[p] += c[p] * (yk - ybar);
                for q in 0..=p {
                    g[(p, q)] += c[p] * c[q];
                }
            }
        }
        for p in 0..da {
            g[(p, p)] += lambda;
            for q in 0..p {
                g[(q, p)] = g[(p, q)];
            }
        }
        let sol = Cholesky::factor(&g)?.solve(&rhs);
        for (&k, v) in active.iter().zip(sol) {
            w[k] = v;
        }
    }
    let b = ybar - mean.iter().zip(&w).map(|(a, c)| a * c).sum::<f64>();
    Ok((w, b))
}

/// Median of all pairwise Euclidean distances.
fn median_distance(x: &[Vec<f64>]) -> Result<f64> {
    let mut d = Vec::with_capacity(x.len() * (x.len() - 1) / 2);
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            d.push(libm::sqrt(sq_dist(&x[i], &x[j])));
        }
    }
    let k = d.len();
    let mid = k / 2;
    let (_, upper, _) = d.select_nth_unstable_by(mid, f64::total_cmp);
    let upper = *upper;
    let med = if k % 2 == 1 {
        upper
    } else {
        let lower = d[..mid].iter().copied().fold(f64::NEG_INFINITY, f64::max);
        0.5 * (lower + upper)
    };
    if !(med > 0.0) {
        return Err(Error::invalid("median heuristic bandwidth is zero: training points coincide"));
    }
    Ok(med)
}

/// Solves `(K + lambda I) alpha = y`.
fn kernel_ridge(x: &[Vec<f64>], y: &[f64], h: f64, lambda: f64) -> Result<Vec<f64>> {
    let n = x.len();
    let gamma = 1.0 / (2.0 * h * h);
    let mut k = Dense::zeros(n, n);
    for i in 0..n {
        k[(i, i)] = 1.0 + lambda;
        for j in 0..i {
            let v = libm::exp(-gamma * sq_dist(&x[i], &x[j]));
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
    }
    Ok(Cholesky::factor(&k)?.solve(y))
}

/// Cellwise mean of two estimates.
pub fn ensemble(a: &Dense, b: &Dense) -> Result<Dense> {
    if a.shape() != b.shape() {
        return Err(Error::dims(alloc::format!("{:?}", a.shape()), alloc::format!("{:?}", b.shape())));
    }
    let data = a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| 0.5 * (x + y)).collect();
    Dense::from_vec(a.rows(), a.cols(), data)
}
