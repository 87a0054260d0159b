//! Desk-scale nonlinear structural simulator: a shear building whose stories
//! are bilinear kinematic-hardening springs, with Rayleigh damping and
//! Newmark average-acceleration integration.
//!
//! # Material parameters
//!
//! A [`MaterialSample`] for an `n`-story model carries `6 + 2n` parameters,
//! in this order:
//!
//! | index       | name                  | meaning                                          |
//! |-------------|-----------------------|--------------------------------------------------|
//! | 0           | `mass_scale`          | multiplies every floor mass                      |
//! | 1           | `stiffness_scale`     | multiplies every story stiffness                 |
//! | 2           | `strength_scale`      | multiplies every story yield force               |
//! | 3           | `post_yield_ratio`    | hardening stiffness / elastic stiffness          |
//! | 4           | `damping_ratio`       | Rayleigh damping ratio at modes 1 and 2          |
//! | 5           | `top_mass_factor`     | extra multiplier on the roof mass                |
//! | 6..6+n      | `story_stiffness_k`   | per-story stiffness multiplier, k = 1..n         |
//! | 6+n..6+2n   | `story_strength_k`    | per-story yield-force multiplier, k = 1..n       |
//!
//! The default six-story model therefore has 18 parameters.

mod hysteresis;
mod newmark;

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

pub use hysteresis::{BilinearSpring, SpringState};
pub use newmark::{
    sdof_peak_displacement, sdof_response, DampingStiffness, History, IntegrationOptions, Response, ShearBuilding,
    COLLAPSE_HEIGHT_FACTOR,
};

use crate::data::{EdpKind, EdpMatrix, FeatureAxis, FeatureTable};
use crate::gm::GroundMotionRecord;
use crate::linalg::{symmetric_eigen, Dense};
use crate::lowdisc::{gaussian_transform, lhs_sample, SamplerConfig, Scheme};
use crate::{Error, Result};

/// Number of global (non per-story) material parameters.
pub const GLOBAL_PARAMS: usize = 6;
/// Lower truncation of sampled parameters, as a fraction of nominal.
pub const POSITIVITY_FLOOR: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MaterialSample {
    pub mass_scale: f64,
    pub stiffness_scale: f64,
    pub strength_scale: f64,
    pub post_yield_ratio: f64,
    pub damping_ratio: f64,
    pub top_mass_factor: f64,
    pub story_stiffness: Vec<f64>,
    pub story_strength: Vec<f64>,
}

impl MaterialSample {
    /// Unit scales, 5% hardening, 5% damping.
    pub fn nominal(n_stories: usize) -> Self {
        MaterialSample {
            mass_scale: 1.0,
            stiffness_scale: 1.0,
            strength_scale: 1.0,
            post_yield_ratio: 0.05,
            damping_ratio: 0.05,
            top_mass_factor: 1.0,
            story_stiffness: vec![1.0; n_stories],
            story_strength: vec![1.0; n_stories],
        }
    }

    pub fn n_stories(&self) -> usize {
        self.story_stiffness.len()
    }

    pub fn n_params(&self) -> usize {
        GLOBAL_PARAMS + 2 * self.n_stories()
    }

    pub fn parameter_names(n_stories: usize) -> Vec<String> {
        let mut names: Vec<String> = [
            "mass_scale",
            "stiffness_scale",
            "strength_scale",
            "post_yield_ratio",
            "damping_ratio",
            "top_mass_factor",
        ]
        .iter()
        .map(|s| String::from(*s))
        .collect();
        names.extend((1..=n_stories).map(|k| alloc::format!("story_stiffness_{k}")));
        names.extend((1..=n_stories).map(|k| alloc::format!("story_strength_{k}")));
        names
    }

    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = vec![
            self.mass_scale,
            self.stiffness_scale,
            self.strength_scale,
            self.post_yield_ratio,
            self.damping_ratio,
            self.top_mass_factor,
        ];
        v.extend_from_slice(&self.story_stiffness);
        v.extend_from_slice(&self.story_strength);
        v
    }

    pub fn from_slice(values: &[f64], n_stories: usize) -> Result<Self> {
        if values.len() != GLOBAL_PARAMS + 2 * n_stories {
            return Err(Error::dims(
                alloc::format!("{} material parameters", GLOBAL_PARAMS + 2 * n_stories),
                alloc::format!("{}", values.len()),
            ));
        }
        let s = MaterialSample {
            mass_scale: values[0],
            stiffness_scale: values[1],
            strength_scale: values[2],
            post_yield_ratio: values[3],
            damping_ratio: values[4],
            top_mass_factor: values[5],
            story_stiffness: values[GLOBAL_PARAMS..GLOBAL_PARAMS + n_stories].to_vec(),
            story_strength: values[GLOBAL_PARAMS + n_stories..].to_vec(),
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.story_strength.len() != self.story_stiffness.len() {
            return Err(Error::dims(
                alloc::format!("{} story strength multipliers", self.story_stiffness.len()),
                alloc::format!("{}", self.story_strength.len()),
            ));
        }
        let scales = [self.mass_scale, self.stiffness_scale, self.strength_scale, self.top_mass_factor];
        if scales
            .iter()
            .chain(&self.story_stiffness)
            .chain(&self.story_strength)
            .any(|x| !(*x > 0.0) || !x.is_finite())
        {
            return Err(Error::invalid("material scales must be positive and finite"));
        }
        if !(0.0..1.0).contains(&self.post_yield_ratio) {
            return Err(Error::invalid(alloc::format!(
                "post-yield ratio {} outside [0, 1)",
                self.post_yield_ratio
            )));
        }
        if !(self.damping_ratio > 0.0 && self.damping_ratio < 0.2) {
            return Err(Error::invalid(alloc::format!(
                "damping ratio {} outside (0, 0.2)",
                self.damping_ratio
            )));
        }
        Ok(())
    }
}

/// Nominal shear-building geometry in SI units.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StructureModel {
    /// Floor masses, kg, base to roof.
    pub masses: Vec<f64>,
    /// Story elastic stiffnesses, N/m.
    pub stiffnesses: Vec<f64>,
    /// Story yield drifts, m. `f64::INFINITY` makes a story elastic.
    pub yield_drifts: Vec<f64>,
    /// Story height, m.
    pub story_height: f64,
    #[cfg_attr(feature = "serde", serde(default))]
    pub damping_stiffness: DampingStiffness,
}

impl StructureModel {
    pub fn new(masses: Vec<f64>, stiffnesses: Vec<f64>, yield_drifts: Vec<f64>, story_height: f64) -> Result<Self> {
        let m = StructureModel {
            masses,
            stiffnesses,
            yield_drifts,
            story_height,
            damping_stiffness: DampingStiffness::Tangent,
        };
        m.validate()?;
        Ok(m)
    }

    /// Six-story reference building used by the experiment harness:
    /// 4e5 kg floors, stiffness tapering linearly from 7.5e8 N/m at the base
    /// to 4.5e8 N/m at the roof, 3.5 m stories, yield drift 0.3% of the story
    /// height. The fundamental period is about 0.62 s.
    pub fn reference() -> Self {
        let n = 6;
        let stiffnesses = (0..n).map(|k| 7.5e8 * (1.0 - 0.4 * k as f64 / (n - 1) as f64)).collect();
        StructureModel {
            masses: vec![4.0e5; n],
            stiffnesses,
            yield_drifts: vec![0.003 * 3.5; n],
            story_height: 3.5,
            damping_stiffness: DampingStiffness::Tangent,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.masses.len();
        // A single story is allowed for oscillator-level checks.
        if n < 1 || self.stiffnesses.len() != n || self.yield_drifts.len() != n {
            return Err(Error::dims(
                alloc::format!("matching per-story lists of length >= 1 (masses {n})"),
                alloc::format!("stiffnesses {}, yield drifts {}", self.stiffnesses.len(), self.yield_drifts.len()),
            ));
        }
        let positive = |x: &f64| *x > 0.0;
        if !self.masses.iter().all(|x| positive(x) && x.is_finite())
            || !self.stiffnesses.iter().all(|x| positive(x) && x.is_finite())
            || !self.yield_drifts.iter().all(positive)
            || !(self.story_height > 0.0)
        {
            return Err(Error::invalid("structure model values must be positive"));
        }
        Ok(())
    }

    pub fn n_stories(&self) -> usize {
        self.masses.len()
    }

    pub fn height(&self) -> f64 {
        self.story_height * self.n_stories() as f64
    }

    fn floor_masses(&self, material: &MaterialSample) -> Vec<f64> {
        let n = self.n_stories();
        let mut m: Vec<f64> = self.masses.iter().map(|x| x * material.mass_scale).collect();
        m[n - 1] *= material.top_mass_factor;
        m
    }

    fn story_stiffness(&self, material: &MaterialSample) -> Vec<f64> {
        self.stiffnesses
            .iter()
            .zip(&material.story_stiffness)
            .map(|(k, s)| k * material.stiffness_scale * s)
            .collect()
    }

    fn check_material(&self, material: &MaterialSample) -> Result<()> {
        material.validate()?;
        if material.n_stories() != self.n_stories() {
            return Err(Error::dims(
                alloc::format!("material for {} stories", self.n_stories()),
                alloc::format!("{}", material.n_stories()),
            ));
        }
        Ok(())
    }

    /// Circular frequencies of the initial-stiffness model, ascending.
    pub fn natural_frequencies(&self, material: &MaterialSample) -> Result<Vec<f64>> {
        self.validate()?;
        self.check_material(material)?;
        let m = self.floor_masses(material);
        let k = self.story_stiffness(material);
        let n = m.len();
        let mut a = Dense::zeros(n, n);
        for s in 0..n {
            // Story s connects floor s-1 (or ground) and floor s.
            a[(s, s)] += k[s];
            if s > 0 {
                a[(s - 1, s - 1)] += k[s];
                a[(s - 1, s)] -= k[s];
                a[(s, s - 1)] -= k[s];
            }
        }
        let scaled = Dense::from_fn(n, n, |i, j| a[(i, j)] / libm::sqrt(m[i] * m[j]));
        let eig = symmetric_eigen(&scaled)?;
        if let Some(bad) = eig.values.iter().find(|&&l| !(l > 0.0)) {
            return Err(Error::EigenFailure(alloc::format!("non-positive eigenvalue {bad:e}")));
        }
        Ok(eig.values.iter().map(|l| libm::sqrt(*l)).collect())
    }

    /// Rayleigh coefficients `(a0, a1)` matching `damping_ratio` at the
    /// nominal model's first two modes (the first mode twice when n = 1).
    pub fn rayleigh_coefficients(&self, damping_ratio: f64) -> Result<(f64, f64)> {
        let w = self.natural_frequencies(&MaterialSample::nominal(self.n_stories()))?;
        let w1 = w[0];
        let w2 = *w.get(1).unwrap_or(&w1);
        Ok((damping_ratio * 2.0 * w1 * w2 / (w1 + w2), damping_ratio * 2.0 / (w1 + w2)))
    }

    /// Assembles the integrable system for one material sample.
    pub fn assemble(&self, material: &MaterialSample) -> Result<ShearBuilding> {
        self.check_material(material)?;
        let (a0, a1) = self.rayleigh_coefficients(material.damping_ratio)?;
        let k = self.story_stiffness(material);
        let springs = (0..self.n_stories())
            .map(|s| BilinearSpring {
                k0: k[s],
                fy: self.stiffnesses[s]
                    * self.yield_drifts[s]
                    * material.strength_scale
                    * material.story_strength[s],
                alpha: material.post_yield_ratio,
            })
            .collect();
        Ok(ShearBuilding {
            masses: self.floor_masses(material),
            springs,
            rayleigh_mass: a0,
            rayleigh_stiffness: a1,
            damping_stiffness: self.damping_stiffness,
            height: self.height(),
        })
    }
}

/// Peak responses of one simulation.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EdpPair {
    pub max_top_disp: f64,
    pub max_base_shear: f64,
}

impl EdpPair {
    pub fn get(&self, kind: EdpKind) -> f64 {
        match kind {
            EdpKind::TopDisplacement => self.max_top_disp,
            EdpKind::BaseShear => self.max_base_shear,
        }
    }
}

/// Latin hypercube draws of `count` material samples with Gaussian marginals
/// (mean = nominal, std = cov * nominal), each value floored at 5% of its
/// nominal.
pub fn sample_materials(nominal: &MaterialSample, cov: &[f64], count: usize, seed: u64) -> Result<FeatureTable> {
    nominal.validate()?;
    let means = nominal.to_vec();
    let p = means.len();
    if cov.len() != p {
        return Err(Error::dims(alloc::format!("{p} coefficients of variation"), alloc::format!("{}", cov.len())));
    }
    if cov.iter().any(|c| !(*c >= 0.0)) {
        return Err(Error::invalid("coefficients of variation must be >= 0"));
    }
    let stds: Vec<f64> = means.iter().zip(cov).map(|(m, c)| m * c).collect();
    let u = lhs_sample(&SamplerConfig::new(Scheme::LatinHypercube, count, p, seed)?)?;
    let mut values = gaussian_transform(&u, &means, &stds)?;
    for i in 0..count {
        for j in 0..p {
            let floor = POSITIVITY_FLOOR * means[j];
            if values[(i, j)] < floor {
                values[(i, j)] = floor;
            }
        }
    }
    let row_ids = (0..count).map(|j| alloc::format!("m{j}")).collect();
    FeatureTable::new(FeatureAxis::Material, values, row_ids, MaterialSample::parameter_names(nominal.n_stories()))
}

/// The first `count` undamped periods (seconds, descending) of the
/// initial-stiffness model.
pub fn modal_periods(model: &StructureModel, material: &MaterialSample, count: usize) -> Result<Vec<f64>> {
    if count > model.n_stories() {
        return Err(Error::invalid(alloc::format!(
            "{count} periods requested from a {}-story model",
            model.n_stories()
        )));
    }
    let w = model.natural_frequencies(material)?;
    Ok(w.iter().take(count).map(|w| 2.0 * PI / w).collect())
}

/// Runs one (record, material) simulation.
pub fn newmark_nonlinear(model: &StructureModel, material: &MaterialSample, record: &GroundMotionRecord) -> Result<EdpPair> {
    let t1 = modal_periods(model, &MaterialSample::nominal(model.n_stories()), 1)?[0];
    if record.dt() > t1 / 50.0 {
        return Err(Error::invalid(alloc::format!(
            "record dt {} exceeds T1/50 = {} of the nominal model",
            record.dt(),
            t1 / 50.0
        )));
    }
    let system = model.assemble(material)?;
    Ok(system.integrate(record.accel(), record.dt(), &IntegrationOptions::default())?.edp)
}

/// Both EDP matrices for the full record x material cross product.
#[derive(Debug, Clone, PartialEq)]
pub struct EdpMatrices {
    pub top_displacement: EdpMatrix,
    pub base_shear: EdpMatrix,
    /// Cells whose run hit the collapse sentinel; their values are capped.
    pub collapsed: Vec<(usize, usize)>,
}

impl EdpMatrices {
    pub fn get(&self, kind: EdpKind) -> &EdpMatrix {
        match kind {
            EdpKind::TopDisplacement => &self.top_displacement,
            EdpKind::BaseShear => &self.base_shear,
        }
    }
}

/// Simulates cell `(i, j)`; collapse is turned into capped values and the
/// flag, any other failure is tagged with the cell coordinates.
pub fn simulate_cell(
    model: &StructureModel,
    materials: &[MaterialSample],
    records: &[GroundMotionRecord],
    i: usize,
    j: usize,
) -> core::result::Result<(EdpPair, bool), Error> {
    match newmark_nonlinear(model, &materials[j], &records[i]) {
        Ok(p) => Ok((p, false)),
        Err(Error::Collapse { peak_base_shear, .. }) => Ok((
            EdpPair {
                max_top_disp: COLLAPSE_HEIGHT_FACTOR * model.height(),
                max_base_shear: peak_base_shear,
            },
            true,
        )),
        Err(e) => Err(Error::Cell { row: i, col: j, source: Box::new(e) }),
    }
}

/// Decodes the rows of a material feature table.
pub fn decode_materials(model: &StructureModel, materials: &FeatureTable) -> Result<Vec<MaterialSample>> {
    (0..materials.n_rows())
        .map(|j| MaterialSample::from_slice(materials.values().row(j), model.n_stories()))
        .collect()
}

/// Assembles per-cell results (row-major, `records x materials`) into the two
/// EDP matrices.
pub fn assemble_edp_matrices(
    records: &[GroundMotionRecord],
    materials: &FeatureTable,
    cells: Vec<(EdpPair, bool)>,
) -> Result<EdpMatrices> {
    let (n, m) = (records.len(), materials.n_rows());
    if cells.len() != n * m {
        return Err(Error::dims(alloc::format!("{} cells", n * m), alloc::format!("{}", cells.len())));
    }
    let mut top = Dense::zeros(n, m);
    let mut shear = Dense::zeros(n, m);
    let mut collapsed = Vec::new();
    for (p, (pair, flag)) in cells.into_iter().enumerate() {
        let (i, j) = (p / m, p % m);
        top[(i, j)] = pair.max_top_disp;
        shear[(i, j)] = pair.max_base_shear;
        if flag {
            collapsed.push((i, j));
        }
    }
    let row_ids: Vec<String> = records.iter().map(|r| String::from(r.id())).collect();
    let col_ids = materials.row_ids().to_vec();
    Ok(EdpMatrices {
        top_displacement: EdpMatrix::new(EdpKind::TopDisplacement, top, row_ids.clone(), col_ids.clone())?,
        base_shear: EdpMatrix::new(EdpKind::BaseShear, shear, row_ids, col_ids)?,
        collapsed,
    })
}

/// Sequential full cross product. The std companion fans the same cells out
/// over threads and assembles with [`assemble_edp_matrices`].
pub fn build_edp_matrices(records: &[GroundMotionRecord], materials: &FeatureTable, model: &StructureModel) -> Result<EdpMatrices> {
    let samples = decode_materials(model, materials)?;
    let mut cells = Vec::with_capacity(records.len() * samples.len());
    for i in 0..records.len() {
        for j in 0..samples.len() {
            cells.push(simulate_cell(model, &samples, records, i, j)?);
        }
    }
    assemble_edp_matrices(records, materials, cells)
}
