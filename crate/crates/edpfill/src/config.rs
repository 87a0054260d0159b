//! JSON experiment configuration.
//!
//! Every field is optional; missing fields take the defaults below. Example:
//!
//! ```json
//! {
//!   "seed": 7,
//!   "n_records": 100,
//!   "n_materials": 10,
//!   "cr_grid": [0.1, 0.2, 0.3, 0.4, 0.5],
//!   "trials": 50,
//!   "methods": ["uniform", "stratified", "stratified_plus_regression"],
//!   "completion": { "rank": 3, "lambda": null, "max_sweeps": 500, "tolerance": 1e-8 },
//!   "regression": { "model": "kernel_ridge_rbf", "lambda": 0.01, "bandwidth": null },
//!   "cluster": { "k": null, "distance": "euclidean" },
//!   "materials": { "cov": null },
//!   "ground_motions": { "dt": 0.01, "families": [ ... ] },
//!   "structure": { "masses": [...], "stiffnesses": [...], "yield_drifts": [...], "story_height": 3.5 }
//! }
//! ```
//!
//! `completion.lambda = null` selects the data-scaled default, `cluster.k =
//! null` selects `max(2, round(n_records / 10))`, `materials.cov = null`
//! selects [`default_cov`].

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use edpfill_core::cluster::{default_k, Distance};
use edpfill_core::completion::CompletionConfig;
use edpfill_core::regression::RegressionConfig;
use edpfill_core::structsim::{MaterialSample, StructureModel, GLOBAL_PARAMS};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Uniform,
    Stratified,
    StratifiedPlusRegression,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Uniform, Method::Stratified, Method::StratifiedPlusRegression];

    pub fn tag(self) -> &'static str {
        match self {
            Method::Uniform => "uniform",
            Method::Stratified => "stratified",
            Method::StratifiedPlusRegression => "stratified_plus_regression",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.tag() == tag)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.tag())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CompletionSettings {
    pub rank: usize,
    pub lambda: Option<f64>,
    pub max_sweeps: usize,
    pub tolerance: f64,
}

impl Default for CompletionSettings {
    fn default() -> Self {
        let c = CompletionConfig::default();
        CompletionSettings {
            rank: c.rank,
            lambda: c.lambda,
            max_sweeps: c.max_sweeps,
            tolerance: c.tolerance,
        }
    }
}

impl CompletionSettings {
    pub fn with_seed(&self, seed: u64) -> CompletionConfig {
        CompletionConfig {
            rank: self.rank,
            lambda: self.lambda,
            max_sweeps: self.max_sweeps,
            tolerance: self.tolerance,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClusterSettings {
    pub k: Option<usize>,
    pub distance: Distance,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MaterialSettings {
    /// Coefficient of variation per material parameter.
    pub cov: Option<Vec<f64>>,
}

/// Default coefficients of variation: 10% on masses, 15% on global stiffness
/// and strength, 20% on the hardening and damping ratios, 10% on every
/// per-story multiplier.
pub fn default_cov(n_stories: usize) -> Vec<f64> {
    let mut c = vec![0.10, 0.15, 0.15, 0.20, 0.20, 0.10];
    debug_assert_eq!(c.len(), GLOBAL_PARAMS);
    c.extend(std::iter::repeat_n(0.10, 2 * n_stories));
    c
}

/// A closed interval `[lo, hi]` sampled uniformly.
pub type Range = [f64; 2];

/// One population of synthetic records. Parameters are drawn uniformly from
/// the ranges; `weight` sets the share of the suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroundMotionFamily {
    pub name: String,
    pub weight: f64,
    /// Record length, s.
    pub duration: Range,
    pub peak_time_fraction: Range,
    pub envelope_shape: Range,
    /// Band-pass centre frequency, Hz.
    pub filter_frequency: Range,
    pub filter_damping: Range,
    /// Peak ground acceleration, m/s^2.
    pub target_pga: Range,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GroundMotionSettings {
    pub dt: f64,
    pub families: Vec<GroundMotionFamily>,
}

impl Default for GroundMotionSettings {
    /// Four families with distinct frequency content and intensity, so the
    /// suite has cluster structure; the near-fault family is the rare one.
    fn default() -> Self {
        let fam = |name: &str, weight, duration, peak_time_fraction, envelope_shape, filter_frequency, filter_damping, target_pga| {
            GroundMotionFamily {
                name: name.to_string(),
                weight,
                duration,
                peak_time_fraction,
                envelope_shape,
                filter_frequency,
                filter_damping,
                target_pga,
            }
        };
        GroundMotionSettings {
            dt: 0.01,
            families: vec![
                fam("moderate_broadband", 0.4, [15.0, 30.0], [0.15, 0.35], [1.5, 3.0], [2.0, 5.0], [0.3, 0.6], [1.0, 3.0]),
                fam("soft_soil", 0.3, [25.0, 40.0], [0.2, 0.4], [1.5, 3.0], [0.6, 1.5], [0.2, 0.4], [0.8, 2.5]),
                fam("rock_high_frequency", 0.2, [8.0, 15.0], [0.1, 0.3], [1.5, 3.0], [6.0, 10.0], [0.3, 0.6], [1.5, 4.0]),
                fam("near_fault_pulse", 0.1, [8.0, 14.0], [0.2, 0.35], [3.0, 5.0], [0.4, 1.0], [0.1, 0.25], [4.0, 8.0]),
            ],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub n_records: usize,
    pub n_materials: usize,
    pub cr_grid: Vec<f64>,
    pub trials: usize,
    pub methods: Vec<Method>,
    pub completion: CompletionSettings,
    pub regression: RegressionConfig,
    pub cluster: ClusterSettings,
    pub materials: MaterialSettings,
    pub ground_motions: GroundMotionSettings,
    pub structure: StructureModel,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: 0,
            n_records: 100,
            n_materials: 10,
            cr_grid: vec![0.1, 0.2, 0.3, 0.4, 0.5],
            trials: 50,
            methods: Method::ALL.to_vec(),
            completion: CompletionSettings::default(),
            regression: RegressionConfig::default(),
            cluster: ClusterSettings::default(),
            materials: MaterialSettings::default(),
            ground_motions: GroundMotionSettings::default(),
            structure: StructureModel::reference(),
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let config: ExperimentConfig =
            serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.n_records < 2 || self.n_materials < 2 {
            return bad(format!(
                "need at least 2 records and 2 materials, got {} and {}",
                self.n_records, self.n_materials
            ));
        }
        if self.cr_grid.is_empty() || self.cr_grid.iter().any(|c| !(*c > 0.0 && *c <= 1.0)) {
            return bad(format!("cr_grid {:?} must be non-empty with values in (0, 1]", self.cr_grid));
        }
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.methods.is_empty() {
            return bad("methods must not be empty".into());
        }
        if self.ground_motions.families.is_empty()
            || self.ground_motions.families.iter().any(|f| !(f.weight > 0.0))
        {
            return bad("ground_motions.families must be non-empty with positive weights".into());
        }
        for f in &self.ground_motions.families {
            let ranges = [
                f.duration,
                f.peak_time_fraction,
                f.envelope_shape,
                f.filter_frequency,
                f.filter_damping,
                f.target_pga,
            ];
            if ranges.iter().any(|r| !(r[0] <= r[1]) || !r[0].is_finite() || !r[1].is_finite()) {
                return bad(format!("family `{}` has an empty or non-finite range", f.name));
            }
        }
        let smaller = self.n_records.min(self.n_materials);
        if self.completion.rank < 1 || self.completion.rank >= smaller {
            return bad(format!("completion.rank = {} must lie in [1, {smaller})", self.completion.rank));
        }
        if let Some(k) = self.cluster.k {
            if k < 1 || k > self.n_records {
                return bad(format!("cluster.k = {k} outside [1, {}]", self.n_records));
            }
        }
        self.structure.validate()?;
        let cov = self.material_cov();
        if cov.len() != GLOBAL_PARAMS + 2 * self.structure.n_stories() {
            return bad(format!(
                "materials.cov has {} entries, the structure has {} parameters",
                cov.len(),
                GLOBAL_PARAMS + 2 * self.structure.n_stories()
            ));
        }
        Ok(())
    }

    pub fn cluster_k(&self) -> usize {
        self.cluster.k.unwrap_or_else(|| default_k(self.n_records))
    }

    pub fn material_cov(&self) -> Vec<f64> {
        self.materials
            .cov
            .clone()
            .unwrap_or_else(|| default_cov(self.structure.n_stories()))
    }

    pub fn nominal_material(&self) -> MaterialSample {
        MaterialSample::nominal(self.structure.n_stories())
    }

    /// SHA-256 of the canonical JSON serialization, hex encoded.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        hex(&Sha256::digest(bytes))
    }
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let c = ExperimentConfig::default();
        c.validate().unwrap();
        assert_eq!(c.material_cov().len(), 18);
        assert_eq!(c.cluster_k(), 10);
    }

    #[test]
    fn partial_json_fills_defaults() {
        let c: ExperimentConfig = serde_json::from_str(r#"{"seed": 3, "trials": 2, "methods": ["uniform"]}"#).unwrap();
        assert_eq!(c.seed, 3);
        assert_eq!(c.trials, 2);
        assert_eq!(c.methods, vec![Method::Uniform]);
        assert_eq!(c.n_records, 100);
    }

    #[test]
    fn unknown_keys_and_bad_values_rejected() {
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"sed": 3}"#).is_err());
        let c = ExperimentConfig {
            cr_grid: vec![0.0],
            ..ExperimentConfig::default()
        };
        assert!(c.validate().is_err());
        let c = ExperimentConfig {
            materials: MaterialSettings { cov: Some(vec![0.1; 3]) },
            ..ExperimentConfig::default()
        };
        assert!(c.validate().is_err());
    }

    #[test]
    fn hash_tracks_content() {
        let a = ExperimentConfig::default();
        let mut b = a.clone();
        assert_eq!(a.hash(), b.hash());
        b.seed = 1;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }

    #[test]
    fn json_round_trip() {
        let a = ExperimentConfig::default();
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(serde_json::from_str::<ExperimentConfig>(&s).unwrap(), a);
    }
}
