//! The compression-ratio sweep.
//!
//! For every `(cr, trial)` unit two masks are drawn: a uniform one and a
//! cluster-stratified one. Masks are shared by both EDP kinds (one
//! simulation yields both responses), and the stratified mask is shared by
//! `stratified` and `stratified_plus_regression`, so the ensemble is scored
//! on exactly the cells plain stratified completion saw.
//!
//! Seeds, with `u = derive(seed, [TRIAL, cr_index, trial])`:
//!
//! | stream                  | seed                                   |
//! |-------------------------|----------------------------------------|
//! | uniform mask            | `derive(u, [MASK_COLUMN, 0])`          |
//! | stratified mask         | `derive(u, [STRATUM, 0])`              |
//! | factor init, uniform    | `derive(u, [FACTOR_INIT, 0])`          |
//! | factor init, stratified | `derive(u, [FACTOR_INIT, 1])`          |
//!
//! Each mask seed is then split per column inside the sampler.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use edpfill_core::cluster::{kmedoids, standardize, ClusterAssignment};
use edpfill_core::completion::als_complete;
use edpfill_core::data::{column_budget, masked_relative_error, EdpKind, ObservationMask};
use edpfill_core::masking::{stratified_mask, stratum_quotas, uniform_mask};
use edpfill_core::regression::{ensemble, fit_predict};
use edpfill_core::seed::{self, stream};
use edpfill_core::Dense;

use crate::config::{ExperimentConfig, Method};
use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// One scored completion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialError {
    pub edp: EdpKind,
    pub method: Method,
    pub cr: f64,
    pub trial: usize,
    pub error: f64,
}

/// Statistics of one `(edp, method, cr)` group. `std` is the sample
/// standard deviation (zero for a single trial).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub trials: usize,
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

impl Stats {
    pub fn of(values: &[f64]) -> Stats {
        let n = values.len();
        let mean = values.iter().sum::<f64>() / n as f64;
        let var = if n > 1 {
            values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        Stats {
            trials: n,
            mean,
            std: var.sqrt(),
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

/// Grouping key; CRs are referred to by position in first-seen order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct GroupKey {
    pub edp: usize,
    pub method: Method,
    pub cr_index: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fingerprint {
    pub seed: u64,
    pub config_hash: String,
    pub dataset_hash: String,
}

/// Cluster bookkeeping so the stratification can be audited.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterSummary {
    pub k: usize,
    pub sizes: Vec<usize>,
    pub medoids: Vec<usize>,
    /// Per-column quota of every cluster, for each CR of the grid.
    pub quotas: Vec<(f64, Vec<usize>)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub cr_grid: Vec<f64>,
    pub methods: Vec<Method>,
    pub trials: usize,
    /// Sorted by edp, method, cr, trial.
    pub raw: Vec<TrialError>,
    pub fingerprint: Fingerprint,
    pub clusters: Option<ClusterSummary>,
    /// CR values at which nothing was left unobserved; their errors are
    /// recorded as zero.
    pub degenerate_crs: Vec<f64>,
    /// Largest sweep-to-sweep increase of the ALS objective over every
    /// completion of the run; zero when every trace descends.
    pub max_objective_increase: f64,
}

impl ErrorReport {
    /// Summary statistics per `(edp, method, cr)`, in report order.
    pub fn summary(&self) -> Vec<(EdpKind, Method, f64, Stats)> {
        summarize(&self.raw)
    }

    pub fn stats(&self, edp: EdpKind, method: Method, cr: f64) -> Option<Stats> {
        let v: Vec<f64> = self
            .raw
            .iter()
            .filter(|r| r.edp == edp && r.method == method && r.cr == cr)
            .map(|r| r.error)
            .collect();
        (!v.is_empty()).then(|| Stats::of(&v))
    }
}

/// Groups raw errors by `(edp, method, cr)` keeping first-seen CR order.
pub fn summarize(raw: &[TrialError]) -> Vec<(EdpKind, Method, f64, Stats)> {
    let mut crs: Vec<f64> = Vec::new();
    for r in raw {
        if !crs.contains(&r.cr) {
            crs.push(r.cr);
        }
    }
    let mut groups: BTreeMap<GroupKey, Vec<f64>> = BTreeMap::new();
    for r in raw {
        let key = GroupKey {
            edp: EdpKind::ALL.iter().position(|k| *k == r.edp).expect("known kind"),
            method: r.method,
            cr_index: crs.iter().position(|c| *c == r.cr).expect("cr seen"),
        };
        groups.entry(key).or_default().push(r.error);
    }
    groups
        .into_iter()
        .map(|(k, v)| (EdpKind::ALL[k.edp], k.method, crs[k.cr_index], Stats::of(&v)))
        .collect()
}

/// Stratification of the records: k-medoids on z-scored IMs.
pub fn cluster_records(config: &ExperimentConfig, dataset: &Dataset) -> Result<ClusterAssignment> {
    let z = standardize(&dataset.ims)?;
    Ok(kmedoids(&z, config.cluster_k(), config.cluster.distance)?)
}

struct TrialMasks {
    uniform: ObservationMask,
    stratified: ObservationMask,
}

fn trial_seed(config: &ExperimentConfig, cr_index: usize, trial: usize) -> u64 {
    seed::derive(config.seed, &[stream::TRIAL, cr_index as u64, trial as u64])
}

fn masks(assignment: &ClusterAssignment, cols: usize, cr: f64, unit: u64) -> Result<TrialMasks> {
    Ok(TrialMasks {
        uniform: uniform_mask(assignment.n_points(), cols, cr, seed::derive(unit, &[stream::MASK_COLUMN, 0]))?,
        stratified: stratified_mask(assignment, cols, cr, seed::derive(unit, &[stream::STRATUM, 0]))?,
    })
}

fn max_increase(trace: &[f64]) -> f64 {
    trace.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
}

fn score(dataset: &Dataset, kind: EdpKind, estimate: &Dense, mask: &ObservationMask) -> Result<f64> {
    match masked_relative_error(dataset.edp.get(kind), estimate, mask) {
        Ok(e) => Ok(e),
        Err(edpfill_core::Error::NothingUnobserved) => Ok(0.0),
        Err(e) => Err(e.into()),
    }
}

fn run_unit(
    config: &ExperimentConfig,
    dataset: &Dataset,
    assignment: &ClusterAssignment,
    cr_index: usize,
    trial: usize,
) -> Result<(Vec<TrialError>, f64)> {
    let cr = config.cr_grid[cr_index];
    let unit = trial_seed(config, cr_index, trial);
    let m = dataset.materials.n_rows();
    let masks = masks(assignment, m, cr, unit)?;
    let wants = |x: Method| config.methods.contains(&x);
    let mut out = Vec::new();
    let mut rise = 0.0f64;
    for kind in EdpKind::ALL {
        let matrix = dataset.edp.get(kind);
        let context = |method: Method, e: Error| Error::Trial {
            edp: kind,
            method,
            cr,
            trial,
            source: Box::new(e),
        };
        let mut push = |method: Method, error: f64| {
            out.push(TrialError {
                edp: kind,
                method,
                cr,
                trial,
                error,
            })
        };
        if wants(Method::Uniform) {
            let cfg = config.completion.with_seed(seed::derive(unit, &[stream::FACTOR_INIT, 0]));
            let est = als_complete(matrix, &masks.uniform, &cfg).map_err(|e| context(Method::Uniform, e.into()))?;
            rise = rise.max(max_increase(&est.trace));
            let err = score(dataset, kind, &est.estimate, &masks.uniform).map_err(|e| context(Method::Uniform, e))?;
            push(Method::Uniform, err);
        }
        if wants(Method::Stratified) || wants(Method::StratifiedPlusRegression) {
            let cfg = config.completion.with_seed(seed::derive(unit, &[stream::FACTOR_INIT, 1]));
            let est = als_complete(matrix, &masks.stratified, &cfg).map_err(|e| context(Method::Stratified, e.into()))?;
            rise = rise.max(max_increase(&est.trace));
            if wants(Method::Stratified) {
                let err = score(dataset, kind, &est.estimate, &masks.stratified).map_err(|e| context(Method::Stratified, e))?;
                push(Method::Stratified, err);
            }
            if wants(Method::StratifiedPlusRegression) {
                let method = Method::StratifiedPlusRegression;
                let reg = fit_predict(&dataset.ims, &dataset.materials, matrix, &masks.stratified, &config.regression)
                    .map_err(|e| context(method, e.into()))?;
                let combined = ensemble(&est.estimate, &reg).map_err(|e| context(method, e.into()))?;
                let err = score(dataset, kind, &combined, &masks.stratified).map_err(|e| context(method, e))?;
                push(method, err);
            }
        }
    }
    Ok((out, rise))
}

/// Runs every `(cr, trial)` unit in parallel and reduces the results in key
/// order. Any failing unit aborts the run.
pub fn run_experiment(config: &ExperimentConfig, dataset: &Dataset) -> Result<ErrorReport> {
    config.validate()?;
    if dataset.records.len() != config.n_records || dataset.materials.n_rows() != config.n_materials {
        return Err(Error::Config(format!(
            "dataset is {}x{}, config expects {}x{}",
            dataset.records.len(),
            dataset.materials.n_rows(),
            config.n_records,
            config.n_materials
        )));
    }
    let assignment = cluster_records(config, dataset)?;
    let units: Vec<(usize, usize)> = (0..config.cr_grid.len())
        .flat_map(|c| (0..config.trials).map(move |t| (c, t)))
        .collect();
    let results: Vec<(Vec<TrialError>, f64)> = units
        .par_iter()
        .map(|&(c, t)| run_unit(config, dataset, &assignment, c, t))
        .collect::<Result<_>>()?;

    let method_rank = |m: Method| config.methods.iter().position(|x| *x == m).unwrap_or(usize::MAX);
    let mut keyed: BTreeMap<(usize, usize, usize, usize), TrialError> = BTreeMap::new();
    let mut max_objective_increase = 0.0f64;
    for ((c, t), (rows, rise)) in units.iter().zip(results) {
        max_objective_increase = max_objective_increase.max(rise);
        for r in rows {
            let e = EdpKind::ALL.iter().position(|k| *k == r.edp).expect("known kind");
            keyed.insert((e, method_rank(r.method), *c, *t), r);
        }
    }

    let n = config.n_records;
    let sizes = assignment.sizes();
    let quotas = config
        .cr_grid
        .iter()
        .map(|&cr| Ok((cr, stratum_quotas(&sizes, column_budget(n, cr))?)))
        .collect::<Result<Vec<_>>>()?;
    let degenerate_crs = config.cr_grid.iter().copied().filter(|&cr| column_budget(n, cr) == n).collect();

    Ok(ErrorReport {
        cr_grid: config.cr_grid.clone(),
        methods: config.methods.clone(),
        trials: config.trials,
        raw: keyed.into_values().collect(),
        fingerprint: Fingerprint {
            seed: config.seed,
            config_hash: config.hash(),
            dataset_hash: dataset.fingerprint(),
        },
        clusters: Some(ClusterSummary {
            k: assignment.k(),
            sizes,
            medoids: assignment.medoids.clone(),
            quotas,
        }),
        degenerate_crs,
        max_objective_increase,
    })
}
