use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use edpfill::config::{ExperimentConfig, Method};
use edpfill::core::cluster::{kmedoids, standardize, Distance};
use edpfill::core::completion::als_complete;
use edpfill::core::data::{column_budget, EdpKind};
use edpfill::core::lowdisc::{self, SamplerConfig, Scheme};
use edpfill::core::masking::{stratified_mask, uniform_mask};
use edpfill::core::regression::{ensemble, fit_predict, RegressionModel};
use edpfill::core::seed::{self, stream};
use edpfill::core::structsim::sample_materials;
use edpfill::csvio;
use edpfill::dataset::{self, build_dataset, material_id};
use edpfill::experiment::{cluster_records, run_experiment};
use edpfill::report;

#[derive(Parser)]
#[command(name = "edpfill", version, about = "Estimate full structural response matrices from a budget of simulations")]
struct Cli {
    /// Master seed; overrides the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// JSON experiment config; missing keys take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize the ground-motion suite as `time,accel` CSV files.
    SynthGm {
        #[arg(long)]
        count: Option<usize>,
    },
    /// Intensity measures of every record in a directory.
    Features {
        #[arg(long)]
        records: PathBuf,
    },
    /// Sample material parameter sets around the nominal model.
    SampleMaterials {
        #[arg(long)]
        count: Option<usize>,
    },
    /// Simulate every record x material pair.
    Simulate {
        #[arg(long)]
        records: PathBuf,
        #[arg(long)]
        materials: PathBuf,
    },
    /// k-medoids clustering of a feature table.
    Cluster {
        #[arg(long)]
        features: PathBuf,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, value_enum)]
        distance: Option<DistanceArg>,
    },
    /// Design points or observation masks.
    #[command(subcommand)]
    Sample(SampleCommand),
    /// Low-rank completion of a partially observed matrix.
    Complete {
        #[command(flatten)]
        input: MatrixInput,
        #[command(flatten)]
        als: AlsFlags,
    },
    /// Regression estimate from side features, optionally averaged with a completion.
    Regress {
        #[command(flatten)]
        input: MatrixInput,
        /// Ground-motion feature table (IMs).
        #[arg(long)]
        ims: PathBuf,
        #[arg(long)]
        materials: PathBuf,
        #[arg(long, value_enum)]
        model: Option<ModelArg>,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        bandwidth: Option<f64>,
        /// Completion estimate to average with the regression.
        #[arg(long)]
        completion: Option<PathBuf>,
    },
    /// Build the dataset and run the full CR sweep.
    Experiment {
        #[arg(long)]
        trials: Option<usize>,
        /// Also write every synthesized record.
        #[arg(long)]
        save_records: bool,
    },
    /// Summary and charts from a tidy error CSV.
    Report {
        #[arg(long)]
        tidy: PathBuf,
    },
}

#[derive(Subcommand)]
enum SampleCommand {
    /// Points in the unit hypercube.
    Points {
        #[arg(long, value_enum, default_value = "lhs")]
        scheme: SchemeArg,
        #[arg(long)]
        count: usize,
        #[arg(long)]
        dims: usize,
    },
    /// Observation mask with a fixed per-column budget.
    Mask {
        /// Matrix whose shape and ids the mask takes.
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        cr: f64,
        /// Cluster file; switches to stratified sampling.
        #[arg(long)]
        clusters: Option<PathBuf>,
    },
}

#[derive(Args)]
struct MatrixInput {
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long)]
    mask: PathBuf,
}

#[derive(Args)]
struct AlsFlags {
    #[arg(long)]
    rank: Option<usize>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    max_sweeps: Option<usize>,
    #[arg(long)]
    tolerance: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Lhs,
    Halton,
    Sobol,
    Uniform,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Scheme {
        match s {
            SchemeArg::Lhs => Scheme::LatinHypercube,
            SchemeArg::Halton => Scheme::Halton,
            SchemeArg::Sobol => Scheme::Sobol,
            SchemeArg::Uniform => Scheme::PlainUniform,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum DistanceArg {
    Euclidean,
    Manhattan,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Linear,
    Kernel,
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn run(cli: Cli) -> Result<()> {
    let mut config = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = cli.seed {
        config.seed = s;
    }
    let out = cli.out.as_path();
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;

    match cli.command {
        Command::SynthGm { count } => synth_gm(&config, count.unwrap_or(config.n_records), out),
        Command::Features { records } => {
            let records = csvio::read_record_dir(&records)?;
            let periods = dataset::nominal_periods(&config.structure)?;
            let table = dataset::feature_table(&records, &periods)?;
            write_done(out.join("ims.csv"), |p| csvio::write_features(&table, p))
        }
        Command::SampleMaterials { count } => {
            let table = sample_materials(
                &config.nominal_material(),
                &config.material_cov(),
                count.unwrap_or(config.n_materials),
                seed::derive(config.seed, &[stream::MATERIAL]),
            )?;
            write_done(out.join("materials.csv"), |p| csvio::write_features(&table, p))
        }
        Command::Simulate { records, materials } => {
            let records = csvio::read_record_dir(&records)?;
            let materials = csvio::read_features(&materials)?;
            let edp = dataset::simulate_all(&records, &materials, &config.structure)?;
            if !edp.collapsed.is_empty() {
                eprintln!("{} cells hit the collapse cap", edp.collapsed.len());
            }
            for kind in EdpKind::ALL {
                write_done(out.join(format!("{}.csv", kind.tag())), |p| csvio::write_matrix(edp.get(kind), p))?;
            }
            Ok(())
        }
        Command::Cluster { features, k, distance } => {
            let table = csvio::read_features(&features)?;
            let k = k.unwrap_or_else(|| edpfill::core::cluster::default_k(table.n_rows()));
            let distance = match distance {
                Some(DistanceArg::Euclidean) => Distance::Euclidean,
                Some(DistanceArg::Manhattan) => Distance::Manhattan,
                None => config.cluster.distance,
            };
            let assignment = kmedoids(&standardize(&table)?, k, distance)?;
            println!("k = {k}, cost = {}, sizes = {:?}", assignment.cost, assignment.sizes());
            write_done(out.join("clusters.csv"), |p| csvio::write_clusters(&assignment, table.row_ids(), p))
        }
        Command::Sample(cmd) => sample(&config, cmd, out),
        Command::Complete { input, als } => complete(&config, &input, &als, out),
        Command::Regress {
            input,
            ims,
            materials,
            model,
            lambda,
            bandwidth,
            completion,
        } => {
            let mut cfg = config.regression.clone();
            if let Some(m) = model {
                cfg.model = match m {
                    ModelArg::Linear => RegressionModel::LinearRidge,
                    ModelArg::Kernel => RegressionModel::KernelRidgeRbf,
                };
            }
            if let Some(l) = lambda {
                cfg.lambda = l;
            }
            if bandwidth.is_some() {
                cfg.bandwidth = bandwidth;
            }
            let matrix = csvio::read_matrix(&input.matrix)?;
            let mask = csvio::read_mask(&input.mask)?;
            let ims = csvio::read_features(&ims)?;
            let materials = csvio::read_features(&materials)?;
            let estimate = fit_predict(&ims, &materials, &matrix, &mask, &cfg)?;
            write_done(out.join("regression.csv"), |p| csvio::write_estimate(&matrix, &estimate, p))?;
            if let Some(path) = &completion {
                let other = csvio::read_matrix(path)?;
                let combined = ensemble(other.values(), &estimate)?;
                write_done(out.join("ensemble.csv"), |p| csvio::write_estimate(&matrix, &combined, p))?;
            }
            let meta = json!({
                "regression": cfg,
                "features": "ground-motion and material columns z-scored (population std) over their own rows, then concatenated",
                "targets": "observed cells z-scored before fitting, predictions mapped back",
                "ensemble_with": completion,
            });
            write_json(&out.join("regress.json"), &meta)
        }
        Command::Experiment { trials, save_records } => {
            if let Some(t) = trials {
                config.trials = t;
            }
            experiment(&config, save_records, out)
        }
        Command::Report { tidy } => {
            let raw = report::read_tidy(&tidy)?;
            for p in report::emit_from_raw(&raw, out)? {
                println!("wrote {}", p.display());
            }
            Ok(())
        }
    }
}

fn write_done(path: PathBuf, write: impl FnOnce(&Path) -> edpfill::Result<()>) -> Result<()> {
    write(&path)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn synth_gm(config: &ExperimentConfig, count: usize, out: &Path) -> Result<()> {
    let suite = dataset::synth_suite(&config.ground_motions, count, config.seed)?;
    let dir = out.join("records");
    fs::create_dir_all(&dir)?;
    let mut meta = Vec::with_capacity(suite.len());
    for (family, params, record) in &suite {
        csvio::write_record(record, dir.join(format!("{}.csv", record.id())))?;
        meta.push(json!({ "id": record.id(), "family": family, "params": params }));
    }
    println!("wrote {} records to {}", suite.len(), dir.display());
    write_json(&out.join("records.json"), &meta)
}

fn sample(config: &ExperimentConfig, cmd: SampleCommand, out: &Path) -> Result<()> {
    match cmd {
        SampleCommand::Points { scheme, count, dims } => {
            let cfg = SamplerConfig::new(scheme.into(), count, dims, config.seed)?;
            let points = lowdisc::sample(&cfg)?;
            write_done(out.join("points.csv"), |p| csvio::write_points(&points, p))
        }
        SampleCommand::Mask { matrix, cr, clusters } => {
            let matrix = csvio::read_matrix(&matrix)?;
            let (n, m) = (matrix.n_rows(), matrix.n_cols());
            let mask = match clusters {
                Some(path) => {
                    let assignment = csvio::read_clusters(&path)?;
                    if assignment.n_points() != n {
                        bail!("{} labels {} points, the matrix has {n} rows", path.display(), assignment.n_points());
                    }
                    stratified_mask(&assignment, m, cr, seed::derive(config.seed, &[stream::STRATUM, 0]))?
                }
                None => uniform_mask(n, m, cr, seed::derive(config.seed, &[stream::MASK_COLUMN, 0]))?,
            };
            println!("{} of {n} cells observed per column", column_budget(n, cr));
            write_done(out.join("mask.csv"), |p| {
                csvio::write_mask(&mask, matrix.row_ids(), matrix.col_ids(), p)
            })
        }
    }
}

fn complete(config: &ExperimentConfig, input: &MatrixInput, als: &AlsFlags, out: &Path) -> Result<()> {
    let mut settings = config.completion.clone();
    if let Some(r) = als.rank {
        settings.rank = r;
    }
    if als.lambda.is_some() {
        settings.lambda = als.lambda;
    }
    if let Some(s) = als.max_sweeps {
        settings.max_sweeps = s;
    }
    if let Some(t) = als.tolerance {
        settings.tolerance = t;
    }
    let matrix = csvio::read_matrix(&input.matrix)?;
    let mask = csvio::read_mask(&input.mask)?;
    let cfg = settings.with_seed(seed::derive(config.seed, &[stream::FACTOR_INIT, 0]));
    let result = als_complete(&matrix, &mask, &cfg)?;
    write_done(out.join("estimate.csv"), |p| csvio::write_estimate(&matrix, &result.estimate, p))?;

    let trace_path = out.join("trace.csv");
    let mut w = csv::Writer::from_path(&trace_path)?;
    w.write_record(["sweep", "objective"])?;
    for (k, v) in result.trace.iter().enumerate() {
        w.write_record([(k + 1).to_string(), v.to_string()])?;
    }
    w.flush()?;
    println!("wrote {} ({} sweeps)", trace_path.display(), result.sweeps());

    let meta = json!({
        "rank": cfg.rank,
        "lambda": result.lambda,
        "max_sweeps": cfg.max_sweeps,
        "tolerance": cfg.tolerance,
        "seed": cfg.seed,
        "sweeps": result.sweeps(),
        "standardization": "divided by the root mean square of observed entries, no centering",
        "scale": result.scale,
    });
    write_json(&out.join("complete.json"), &meta)
}

fn experiment(config: &ExperimentConfig, save_records: bool, out: &Path) -> Result<()> {
    let start = Instant::now();
    let data = build_dataset(config)?;
    println!(
        "dataset: {} records x {} materials simulated in {:.1?}",
        data.records.len(),
        data.materials.n_rows(),
        start.elapsed()
    );
    let dir = out.join("dataset");
    fs::create_dir_all(&dir)?;
    csvio::write_features(&data.ims, dir.join("ims.csv"))?;
    csvio::write_features(&data.materials, dir.join("materials.csv"))?;
    for kind in EdpKind::ALL {
        csvio::write_matrix(data.edp.get(kind), dir.join(format!("{}.csv", kind.tag())))?;
    }
    let assignment = cluster_records(config, &data)?;
    csvio::write_clusters(&assignment, data.ims.row_ids(), dir.join("clusters.csv"))?;
    if save_records {
        for r in &data.records {
            csvio::write_record(r, dir.join("records").join(format!("{}.csv", r.id())))?;
        }
    }
    let materials: Vec<String> = (0..data.materials.n_rows()).map(material_id).collect();
    write_json(
        &dir.join("dataset.json"),
        &json!({
            "seed": config.seed,
            "families": data.families,
            "synth_params": data.synth_params,
            "modal_periods": data.modal_periods,
            "materials": materials,
            "collapsed_cells": data.edp.collapsed,
            "fingerprint": data.fingerprint(),
        }),
    )?;
    write_json(&out.join("config.json"), config)?;

    let sweep = Instant::now();
    let rep = run_experiment(config, &data)?;
    println!(
        "sweep: {} CRs x {} trials x {} methods in {:.1?}",
        config.cr_grid.len(),
        config.trials,
        config.methods.len(),
        sweep.elapsed()
    );
    for p in report::emit_report(&rep, out)? {
        println!("wrote {}", p.display());
    }
    for kind in EdpKind::ALL {
        println!("{kind}:");
        for m in Method::ALL.iter().filter(|m| config.methods.contains(m)) {
            let means: Vec<String> = config
                .cr_grid
                .iter()
                .filter_map(|&cr| rep.stats(kind, *m, cr))
                .map(|s| format!("{:.3}", s.mean))
                .collect();
            println!("  {m:<28} {}", means.join("  "));
        }
    }
    Ok(())
}
