//! Ground-truth dataset: a synthetic record suite crossed with sampled
//! material models, with every cell simulated.

use rand::Rng;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use edpfill_core::data::{EdpKind, FeatureTable};
use edpfill_core::gm::{extract_ims, im_table, synth_record, GmSynthParams, GroundMotionRecord, MODAL_PERIODS};
use edpfill_core::seed::{self, stream};
use edpfill_core::structsim::{
    assemble_edp_matrices, decode_materials, modal_periods, sample_materials, simulate_cell, EdpMatrices,
    StructureModel,
};

use crate::config::{ExperimentConfig, GroundMotionFamily, GroundMotionSettings, Range};
use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub records: Vec<GroundMotionRecord>,
    /// Family name of every record.
    pub families: Vec<String>,
    pub synth_params: Vec<GmSynthParams>,
    pub modal_periods: Vec<f64>,
    pub ims: FeatureTable,
    pub materials: FeatureTable,
    pub edp: EdpMatrices,
}

impl Dataset {
    /// SHA-256 over the bit patterns of both EDP matrices.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        for kind in EdpKind::ALL {
            for v in self.edp.get(kind).values().as_slice() {
                h.update(v.to_bits().to_le_bytes());
            }
        }
        crate::config::hex(&h.finalize())
    }
}

/// Splits `n` records across families by weight (largest remainder, ties to
/// the earlier family).
pub fn family_counts(families: &[GroundMotionFamily], n: usize) -> Vec<usize> {
    let total: f64 = families.iter().map(|f| f.weight).sum();
    let shares: Vec<f64> = families.iter().map(|f| n as f64 * f.weight / total).collect();
    let mut counts: Vec<usize> = shares.iter().map(|s| s.floor() as usize).collect();
    let mut order: Vec<usize> = (0..families.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = shares[a] - shares[a].floor();
        let rb = shares[b] - shares[b].floor();
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    let left = n - counts.iter().sum::<usize>();
    for &f in order.iter().take(left) {
        counts[f] += 1;
    }
    counts
}

fn draw(rng: &mut impl Rng, r: Range) -> f64 {
    if r[0] == r[1] {
        r[0]
    } else {
        rng.random_range(r[0]..=r[1])
    }
}

/// Synthesis parameters for every record, family by family. Record `i`
/// draws from the stream `derive(seed, [GROUND_MOTION, i])`.
pub fn suite_params(settings: &GroundMotionSettings, n: usize, seed: u64) -> Vec<(String, GmSynthParams)> {
    let counts = family_counts(&settings.families, n);
    let mut out = Vec::with_capacity(n);
    for (fam, &count) in settings.families.iter().zip(&counts) {
        for _ in 0..count {
            let i = out.len() as u64;
            let mut rng = seed::rng(seed::derive(seed, &[stream::GROUND_MOTION, i]));
            let p = GmSynthParams {
                duration: draw(&mut rng, fam.duration),
                peak_time_fraction: draw(&mut rng, fam.peak_time_fraction),
                envelope_shape: draw(&mut rng, fam.envelope_shape),
                filter_frequency: draw(&mut rng, fam.filter_frequency),
                filter_damping: draw(&mut rng, fam.filter_damping),
                target_pga: draw(&mut rng, fam.target_pga),
                dt: settings.dt,
                seed: rng.random(),
            };
            out.push((fam.name.clone(), p));
        }
    }
    out
}

pub fn record_id(i: usize) -> String {
    format!("g{i:03}")
}

pub fn material_id(j: usize) -> String {
    format!("m{j}")
}

/// Synthesizes the record suite in parallel.
pub fn synth_suite(settings: &GroundMotionSettings, n: usize, seed: u64) -> Result<Vec<(String, GmSynthParams, GroundMotionRecord)>> {
    suite_params(settings, n, seed)
        .into_par_iter()
        .enumerate()
        .map(|(i, (fam, p))| {
            let r = synth_record(record_id(i), &p)?;
            Ok((fam, p, r))
        })
        .collect()
}

/// Periods of the first five modes of the nominal structure.
pub fn nominal_periods(model: &StructureModel) -> Result<Vec<f64>> {
    let nominal = edpfill_core::structsim::MaterialSample::nominal(model.n_stories());
    Ok(modal_periods(model, &nominal, MODAL_PERIODS)?)
}

/// IM table for `records`, computed in parallel.
pub fn feature_table(records: &[GroundMotionRecord], periods: &[f64]) -> Result<FeatureTable> {
    let ims = records
        .par_iter()
        .map(|r| extract_ims(r, periods))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(im_table(records, &ims)?)
}

/// Simulates the full record x material cross product in parallel. Cells
/// are collected in row-major order, so the result does not depend on
/// scheduling.
pub fn simulate_all(records: &[GroundMotionRecord], materials: &FeatureTable, model: &StructureModel) -> Result<EdpMatrices> {
    let samples = decode_materials(model, materials)?;
    let m = samples.len();
    let cells = (0..records.len() * m)
        .into_par_iter()
        .map(|p| simulate_cell(model, &samples, records, p / m, p % m))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(assemble_edp_matrices(records, materials, cells)?)
}

pub fn build_dataset(config: &ExperimentConfig) -> Result<Dataset> {
    config.validate()?;
    let suite = synth_suite(&config.ground_motions, config.n_records, config.seed)?;
    let mut families = Vec::with_capacity(suite.len());
    let mut synth_params = Vec::with_capacity(suite.len());
    let mut records = Vec::with_capacity(suite.len());
    for (f, p, r) in suite {
        families.push(f);
        synth_params.push(p);
        records.push(r);
    }
    let periods = nominal_periods(&config.structure)?;
    let ims = feature_table(&records, &periods)?;
    let materials = sample_materials(
        &config.nominal_material(),
        &config.material_cov(),
        config.n_materials,
        seed::derive(config.seed, &[stream::MATERIAL]),
    )?;
    let edp = simulate_all(&records, &materials, &config.structure)?;
    Ok(Dataset {
        records,
        families,
        synth_params,
        modal_periods: periods,
        ims,
        materials,
        edp,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_counts_follow_weights() {
        let s = GroundMotionSettings::default();
        assert_eq!(family_counts(&s.families, 100), vec![40, 30, 20, 10]);
        assert_eq!(family_counts(&s.families, 7).iter().sum::<usize>(), 7);
        assert_eq!(family_counts(&s.families, 2), vec![1, 1, 0, 0]);
    }

    #[test]
    fn suite_params_respect_ranges() {
        let s = GroundMotionSettings::default();
        let ps = suite_params(&s, 50, 4);
        for (name, p) in &ps {
            let f = s.families.iter().find(|f| &f.name == name).unwrap();
            assert!(p.target_pga >= f.target_pga[0] && p.target_pga <= f.target_pga[1]);
            assert!(p.filter_frequency >= f.filter_frequency[0] && p.filter_frequency <= f.filter_frequency[1]);
            p.validate().unwrap();
        }
        assert_eq!(ps, suite_params(&s, 50, 4));
        assert_ne!(ps, suite_params(&s, 50, 5));
    }
}
