//! Small end-to-end runs through the public API: records, features,
//! materials, simulation, masks, completion, regression and the ensemble.

use edpfill_core::cluster::{kmedoids, standardize, Distance};
use edpfill_core::completion::{als_complete, CompletionConfig};
use edpfill_core::data::{column_budget, masked_relative_error, EdpKind};
use edpfill_core::gm::{extract_ims, im_table, synth_record, GmSynthParams, IM_NAMES, MODAL_PERIODS};
use edpfill_core::masking::{stratified_mask, uniform_mask};
use edpfill_core::regression::{ensemble, fit_predict, RegressionConfig};
use edpfill_core::structsim::{build_edp_matrices, modal_periods, sample_materials, MaterialSample, StructureModel};

fn small_model() -> StructureModel {
    let n = 5;
    let k = (0..n).map(|s| 5.0e8 - 4.0e7 * s as f64).collect();
    StructureModel::new(vec![3.0e5; n], k, vec![0.01; n], 3.5).unwrap()
}

struct World {
    ims: edpfill_core::data::FeatureTable,
    materials: edpfill_core::data::FeatureTable,
    edp: edpfill_core::structsim::EdpMatrices,
}

fn world(seed: u64) -> World {
    let model = small_model();
    let records: Vec<_> = (0..16)
        .map(|i| {
            let p = GmSynthParams {
                duration: 6.0,
                filter_frequency: 1.0 + 0.4 * i as f64,
                target_pga: 0.5 + 0.1 * i as f64,
                seed: seed + i as u64,
                ..GmSynthParams::default()
            };
            synth_record(format!("r{i}"), &p).unwrap()
        })
        .collect();
    let nominal = MaterialSample::nominal(model.n_stories());
    let periods = modal_periods(&model, &nominal, MODAL_PERIODS).unwrap();
    let ims: Vec<_> = records.iter().map(|r| extract_ims(r, &periods).unwrap()).collect();
    let ims = im_table(&records, &ims).unwrap();
    let cov = vec![0.1; nominal.n_params()];
    let materials = sample_materials(&nominal, &cov, 5, seed).unwrap();
    let edp = build_edp_matrices(&records, &materials, &model).unwrap();
    World { ims, materials, edp }
}

#[test]
fn shapes_line_up() {
    let w = world(1);
    assert_eq!((w.ims.n_rows(), w.ims.n_dims()), (16, IM_NAMES.len()));
    assert_eq!(w.materials.n_rows(), 5);
    for kind in EdpKind::ALL {
        let m = w.edp.get(kind);
        assert_eq!((m.n_rows(), m.n_cols()), (16, 5));
        assert!(m.values().as_slice().iter().all(|v| v.is_finite() && *v > 0.0));
    }
}

#[test]
fn same_seed_same_world() {
    let a = world(7);
    let b = world(7);
    assert_eq!(a.edp, b.edp);
    assert_eq!(a.materials, b.materials);
    assert_ne!(world(8).edp, a.edp);
}

#[test]
fn completion_regression_and_ensemble() {
    let w = world(3);
    let truth = w.edp.get(EdpKind::TopDisplacement);
    let mask = uniform_mask(16, 5, 0.5, 11).unwrap();
    for j in 0..5 {
        assert_eq!(mask.column_count(j), column_budget(16, 0.5));
    }
    let cfg = CompletionConfig::default().with_rank(2).with_seed(5);
    let est = als_complete(truth, &mask, &cfg).unwrap();
    for w2 in est.trace.windows(2) {
        assert!(w2[1] <= w2[0] + 1e-12);
    }
    let reg = fit_predict(&w.ims, &w.materials, truth, &mask, &RegressionConfig::default()).unwrap();
    let both = ensemble(&est.estimate, &reg).unwrap();
    for ((a, b), c) in est.estimate.as_slice().iter().zip(reg.as_slice()).zip(both.as_slice()) {
        assert_eq!(*c, 0.5 * (a + b));
    }
    for e in [&est.estimate, &reg, &both] {
        let err = masked_relative_error(truth, e, &mask).unwrap();
        assert!(err.is_finite() && err >= 0.0);
    }
}

#[test]
fn stratified_masks_honour_budgets() {
    let w = world(2);
    let z = standardize(&w.ims).unwrap();
    let assignment = kmedoids(&z, 3, Distance::Euclidean).unwrap();
    for cr in [0.1, 0.2, 0.3, 0.4, 0.5] {
        let mask = stratified_mask(&assignment, 5, cr, 99).unwrap();
        for j in 0..5 {
            assert_eq!(mask.column_count(j), column_budget(16, cr));
        }
    }
}
