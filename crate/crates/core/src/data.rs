//! Shared data model: response matrices, observation masks, side-information
//! tables, factorizations, and the masked relative error.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::linalg::Dense;
use crate::{Error, Result};

/// Which engineering demand parameter a matrix holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum EdpKind {
    /// Peak absolute roof displacement, metres.
    TopDisplacement,
    /// Peak absolute base shear, newtons.
    BaseShear,
}

impl EdpKind {
    pub const ALL: [EdpKind; 2] = [EdpKind::TopDisplacement, EdpKind::BaseShear];

    /// Tag used in file headers and reports.
    pub fn tag(self) -> &'static str {
        match self {
            EdpKind::TopDisplacement => "top_displacement",
            EdpKind::BaseShear => "base_shear",
        }
    }

    pub fn unit(self) -> &'static str {
        match self {
            EdpKind::TopDisplacement => "m",
            EdpKind::BaseShear => "N",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.tag() == tag)
    }
}

impl fmt::Display for EdpKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

fn check_unique(ids: &[String]) -> Result<()> {
    let mut seen = BTreeSet::new();
    for id in ids {
        if !seen.insert(id.as_str()) {
            return Err(Error::DuplicateId(id.clone()));
        }
    }
    Ok(())
}

fn check_finite(values: &Dense) -> Result<()> {
    match values.first_non_finite() {
        Some((row, col)) => Err(Error::NonFinite { row, col }),
        None => Ok(()),
    }
}

/// N x M table of one EDP: rows are ground motions, columns material samples.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EdpMatrix {
    kind: EdpKind,
    values: Dense,
    row_ids: Vec<String>,
    col_ids: Vec<String>,
}

impl EdpMatrix {
    pub fn new(kind: EdpKind, values: Dense, row_ids: Vec<String>, col_ids: Vec<String>) -> Result<Self> {
        let (n, m) = values.shape();
        if n < 2 || m < 2 {
            return Err(Error::invalid(alloc::format!(
                "EDP matrix must be at least 2x2, got {n}x{m}"
            )));
        }
        if row_ids.len() != n || col_ids.len() != m {
            return Err(Error::dims(
                alloc::format!("{n} row ids and {m} column ids"),
                alloc::format!("{} and {}", row_ids.len(), col_ids.len()),
            ));
        }
        check_unique(&row_ids)?;
        check_unique(&col_ids)?;
        check_finite(&values)?;
        Ok(EdpMatrix {
            kind,
            values,
            row_ids,
            col_ids,
        })
    }

    /// Builds a matrix with generated ids `g0..` and `m0..`.
    pub fn with_default_ids(kind: EdpKind, values: Dense) -> Result<Self> {
        let row_ids = (0..values.rows()).map(|i| alloc::format!("g{i}")).collect();
        let col_ids = (0..values.cols()).map(|j| alloc::format!("m{j}")).collect();
        Self::new(kind, values, row_ids, col_ids)
    }

    pub fn kind(&self) -> EdpKind {
        self.kind
    }

    pub fn values(&self) -> &Dense {
        &self.values
    }

    pub fn row_ids(&self) -> &[String] {
        &self.row_ids
    }

    pub fn col_ids(&self) -> &[String] {
        &self.col_ids
    }

    pub fn n_rows(&self) -> usize {
        self.values.rows()
    }

    pub fn n_cols(&self) -> usize {
        self.values.cols()
    }
}

/// Number of observed rows per column: `n * cr` rounded half-up.
pub fn column_budget(n_rows: usize, cr: f64) -> usize {
    libm::floor(n_rows as f64 * cr + 0.5) as usize
}

/// Which cells of an N x M matrix were simulated.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ObservationMask {
    rows: usize,
    cols: usize,
    flags: Vec<bool>,
    cr: f64,
}

impl ObservationMask {
    /// Validates that every column observes exactly `column_budget(rows, cr)`
    /// cells.
    pub fn new(rows: usize, cols: usize, flags: Vec<bool>, cr: f64) -> Result<Self> {
        if !(cr > 0.0 && cr <= 1.0) {
            return Err(Error::invalid(alloc::format!("compression ratio {cr} outside (0, 1]")));
        }
        if flags.len() != rows * cols {
            return Err(Error::dims(
                alloc::format!("{} flags", rows * cols),
                alloc::format!("{}", flags.len()),
            ));
        }
        let budget = column_budget(rows, cr);
        if budget < 1 {
            return Err(Error::invalid(alloc::format!(
                "budget round({rows} * {cr}) is zero"
            )));
        }
        let mask = ObservationMask { rows, cols, flags, cr };
        for j in 0..cols {
            let count = mask.column_count(j);
            if count != budget {
                return Err(Error::invalid(alloc::format!(
                    "column {j} observes {count} cells, budget is {budget}"
                )));
            }
        }
        Ok(mask)
    }

    /// Builds a mask from flags whose columns share one observation count,
    /// recovering `cr` as `count / rows`.
    pub fn from_flags(rows: usize, cols: usize, flags: Vec<bool>) -> Result<Self> {
        if rows == 0 || cols == 0 || flags.len() != rows * cols {
            return Err(Error::dims(
                alloc::format!("{} flags", rows * cols),
                alloc::format!("{}", flags.len()),
            ));
        }
        let count = (0..rows).filter(|&i| flags[i * cols]).count();
        Self::new(rows, cols, flags, count as f64 / rows as f64)
    }

    pub fn full(rows: usize, cols: usize) -> Self {
        ObservationMask {
            rows,
            cols,
            flags: alloc::vec![true; rows * cols],
            cr: 1.0,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn cr(&self) -> f64 {
        self.cr
    }

    pub fn budget(&self) -> usize {
        column_budget(self.rows, self.cr)
    }

    #[inline]
    pub fn is_observed(&self, i: usize, j: usize) -> bool {
        self.flags[i * self.cols + j]
    }

    pub fn flags(&self) -> &[bool] {
        &self.flags
    }

    pub fn column_count(&self, j: usize) -> usize {
        (0..self.rows).filter(|&i| self.is_observed(i, j)).count()
    }

    pub fn row_count(&self, i: usize) -> usize {
        (0..self.cols).filter(|&j| self.is_observed(i, j)).count()
    }

    pub fn observed_count(&self) -> usize {
        self.flags.iter().filter(|&&f| f).count()
    }

    /// Observed cells in row-major order.
    pub fn observed_cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.flags
            .iter()
            .enumerate()
            .filter(|(_, &f)| f)
            .map(move |(p, _)| (p / self.cols, p % self.cols))
    }
}

/// Which axis of the response matrix a feature table describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum FeatureAxis {
    GroundMotion,
    Material,
}

impl FeatureAxis {
    pub fn tag(self) -> &'static str {
        match self {
            FeatureAxis::GroundMotion => "ground_motion",
            FeatureAxis::Material => "material",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        [FeatureAxis::GroundMotion, FeatureAxis::Material]
            .into_iter()
            .find(|a| a.tag() == tag)
    }
}

/// Side information: one row per ground motion (IMs) or per material sample.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FeatureTable {
    axis: FeatureAxis,
    values: Dense,
    row_ids: Vec<String>,
    dim_names: Vec<String>,
}

impl FeatureTable {
    pub fn new(axis: FeatureAxis, values: Dense, row_ids: Vec<String>, dim_names: Vec<String>) -> Result<Self> {
        if values.cols() < 1 {
            return Err(Error::invalid("feature table needs at least one dimension"));
        }
        if dim_names.len() != values.cols() || row_ids.len() != values.rows() {
            return Err(Error::dims(
                alloc::format!("{} row ids and {} names", values.rows(), values.cols()),
                alloc::format!("{} and {}", row_ids.len(), dim_names.len()),
            ));
        }
        check_unique(&dim_names)?;
        check_unique(&row_ids)?;
        check_finite(&values)?;
        Ok(FeatureTable {
            axis,
            values,
            row_ids,
            dim_names,
        })
    }

    /// Generated row ids (`r0..`) and dimension names (`x0..`).
    pub fn unnamed(axis: FeatureAxis, values: Dense) -> Result<Self> {
        let row_ids = (0..values.rows()).map(|i| alloc::format!("r{i}")).collect();
        let dims = (0..values.cols()).map(|j| alloc::format!("x{j}")).collect();
        Self::new(axis, values, row_ids, dims)
    }

    pub fn axis(&self) -> FeatureAxis {
        self.axis
    }

    pub fn values(&self) -> &Dense {
        &self.values
    }

    pub fn row_ids(&self) -> &[String] {
        &self.row_ids
    }

    pub fn dim_names(&self) -> &[String] {
        &self.dim_names
    }

    pub fn n_rows(&self) -> usize {
        self.values.rows()
    }

    pub fn n_dims(&self) -> usize {
        self.values.cols()
    }

    /// Same table with new values; the caller keeps the shape.
    pub fn with_values(&self, values: Dense) -> Result<Self> {
        Self::new(self.axis, values, self.row_ids.clone(), self.dim_names.clone())
    }
}

/// Low-rank factor pair with `a * b` approximating the response matrix.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Factorization {
    a: Dense,
    b: Dense,
}

impl Factorization {
    pub fn new(a: Dense, b: Dense) -> Result<Self> {
        let rank = a.cols();
        if b.rows() != rank {
            return Err(Error::dims(
                alloc::format!("B with {rank} rows"),
                alloc::format!("{}", b.rows()),
            ));
        }
        if rank < 1 || rank >= a.rows().min(b.cols()) {
            return Err(Error::invalid(alloc::format!(
                "rank {rank} must satisfy 1 <= R < min({}, {})",
                a.rows(),
                b.cols()
            )));
        }
        check_finite(&a)?;
        check_finite(&b)?;
        Ok(Factorization { a, b })
    }

    pub fn a(&self) -> &Dense {
        &self.a
    }

    pub fn b(&self) -> &Dense {
        &self.b
    }

    pub fn rank(&self) -> usize {
        self.a.cols()
    }

    pub fn product(&self) -> Dense {
        self.a.matmul(&self.b).expect("shapes checked at construction")
    }
}

/// Relative Frobenius error over the cells the mask leaves unobserved.
pub fn masked_relative_error(truth: &EdpMatrix, estimate: &Dense, mask: &ObservationMask) -> Result<f64> {
    let shape = truth.values().shape();
    if estimate.shape() != shape || (mask.rows(), mask.cols()) != shape {
        return Err(Error::dims(
            alloc::format!("{shape:?}"),
            alloc::format!("estimate {:?}, mask {:?}", estimate.shape(), (mask.rows(), mask.cols())),
        ));
    }
    let mut num = 0.0;
    let mut den = 0.0;
    let mut hidden = 0usize;
    for i in 0..shape.0 {
        for j in 0..shape.1 {
            if mask.is_observed(i, j) {
                continue;
            }
            hidden += 1;
            let t = truth.values()[(i, j)];
            let d = t - estimate[(i, j)];
            num += d * d;
            den += t * t;
        }
    }
    if hidden == 0 {
        return Err(Error::NothingUnobserved);
    }
    if den == 0.0 {
        return Err(Error::ZeroDenominator);
    }
    Ok(libm::sqrt(num / den))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    fn mat(rows: &[Vec<f64>]) -> EdpMatrix {
        EdpMatrix::with_default_ids(EdpKind::TopDisplacement, Dense::from_rows(rows).unwrap()).unwrap()
    }

    #[test]
    fn identical_estimate_scores_zero() {
        let t = mat(&[vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 6.0]]);
        let m = ObservationMask::new(3, 2, vec![true, false, false, true, false, false], 1.0 / 3.0).unwrap();
        assert_eq!(masked_relative_error(&t, t.values(), &m).unwrap(), 0.0);
    }

    #[test]
    fn zero_estimate_scores_one() {
        let t = mat(&[vec![2.0, 2.0], vec![2.0, 2.0], vec![2.0, 2.0]]);
        // Budget round(3 * 0.2) = 1 per column; a fully hidden mask is not a
        // valid ObservationMask, so hide everything but one cell per column
        // and compare against the all-zero estimate on the rest.
        let m = ObservationMask::new(3, 2, vec![true, true, false, false, false, false], 0.2).unwrap();
        let e = masked_relative_error(&t, &Dense::zeros(3, 2), &m).unwrap();
        assert!((e - 1.0).abs() < 1e-15);
    }

    #[test]
    fn single_hidden_cell() {
        let t = mat(&[vec![1.0, 2.0], vec![3.0, 4.0]]);
        let m = ObservationMask {
            rows: 2,
            cols: 2,
            flags: vec![true, true, true, false],
            cr: 1.0,
        };
        let est = Dense::from_rows(&[vec![1.0, 2.0], vec![3.0, 3.0]]).unwrap();
        let e = masked_relative_error(&t, &est, &m).unwrap();
        assert!((e - 0.25).abs() < 1e-15);
    }

    #[test]
    fn zero_denominator_is_distinct() {
        let t = mat(&[vec![1.0, 1.0], vec![0.0, 0.0]]);
        let m = ObservationMask::new(2, 2, vec![true, true, false, false], 0.5).unwrap();
        assert_eq!(
            masked_relative_error(&t, &Dense::zeros(2, 2), &m),
            Err(Error::ZeroDenominator)
        );
        let full = ObservationMask::full(2, 2);
        assert_eq!(
            masked_relative_error(&t, &Dense::zeros(2, 2), &full),
            Err(Error::NothingUnobserved)
        );
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let t = mat(&[vec![1.0, 1.0], vec![2.0, 2.0]]);
        let m = ObservationMask::full(2, 2);
        assert!(matches!(
            masked_relative_error(&t, &Dense::zeros(3, 2), &m),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn matrix_invariants_enforced() {
        assert!(EdpMatrix::with_default_ids(EdpKind::BaseShear, Dense::zeros(1, 3)).is_err());
        let mut v = Dense::zeros(2, 2);
        v[(1, 0)] = f64::NAN;
        assert_eq!(
            EdpMatrix::with_default_ids(EdpKind::BaseShear, v),
            Err(Error::NonFinite { row: 1, col: 0 })
        );
        let dup = EdpMatrix::new(
            EdpKind::BaseShear,
            Dense::zeros(2, 2),
            vec!["a".into(), "a".into()],
            vec!["x".into(), "y".into()],
        );
        assert_eq!(dup, Err(Error::DuplicateId("a".into())));
    }

    #[test]
    fn mask_budget_enforced() {
        assert!(ObservationMask::new(4, 1, vec![true, true, false, false], 0.5).is_ok());
        assert!(ObservationMask::new(4, 1, vec![true, false, false, false], 0.5).is_err());
        // round(4 * 0.1) = 0 is not a usable budget.
        assert!(ObservationMask::new(4, 1, vec![false; 4], 0.1).is_err());
        assert_eq!(column_budget(100, 0.2), 20);
        assert_eq!(column_budget(100, 0.3), 30);
        assert_eq!(column_budget(5, 0.5), 3);
    }

    #[test]
    fn factorization_rank_bound() {
        assert!(Factorization::new(Dense::zeros(4, 3), Dense::zeros(3, 3)).is_err());
        let f = Factorization::new(Dense::filled(4, 1, 1.0), Dense::filled(1, 3, 2.0)).unwrap();
        assert_eq!(f.product(), Dense::filled(4, 3, 2.0));
    }

    proptest! {
        #[test]
        fn error_is_scale_invariant(
            vals in prop::collection::vec(0.1f64..10.0, 12),
            noise in prop::collection::vec(-1.0f64..1.0, 12),
            scale in prop::sample::select(vec![-3.5, -1.0, 1e-3, 2.0, 1e4]),
        ) {
            let truth = EdpMatrix::with_default_ids(EdpKind::BaseShear, Dense::from_vec(4, 3, vals.clone()).unwrap()).unwrap();
            let est = Dense::from_vec(4, 3, vals.iter().zip(&noise).map(|(v, n)| v + n).collect()).unwrap();
            let mask = ObservationMask::new(4, 3, vec![true, false, true, false, true, false, true, false, true, false, true, false], 0.5).unwrap();
            let e1 = masked_relative_error(&truth, &est, &mask).unwrap();
            let truth2 = EdpMatrix::with_default_ids(EdpKind::BaseShear, truth.values().map(|x| x * scale)).unwrap();
            let e2 = masked_relative_error(&truth2, &est.map(|x| x * scale), &mask).unwrap();
            prop_assert!((e1 - e2).abs() <= 1e-12 * e1.max(1e-300));
            prop_assert_eq!(masked_relative_error(&truth, truth.values(), &mask).unwrap(), 0.0);
        }
    }
}
