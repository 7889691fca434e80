//! Subcommand implementations. Each command reads its config (every field
//! optional), runs the pipeline step, and writes deterministic outputs under
//! the requested directory.

use std::path::{Path, PathBuf};

use cephalo_core::augment::{augment, LabeledSet, Method};
use cephalo_core::eval::{
    forward_selection, mfc_baseline, mfc_baseline_runs, rater_agreement, run_experiment,
    CVConfig, ExperimentConfig, SelectionConfig,
};
use cephalo_core::features::{
    build_feature_matrix, ceph_family_specs, coord_family_specs, FeatureMatrix, FeatureSpec,
    Family, GrowthLabel, Standardizer,
};
use cephalo_core::models::{fit, ClassifierConfig};
use cephalo_core::rng::derive_seed;
use cephalo_core::stats::{self, StatsError};
use cephalo_core::synth::{default_registry, generate_cohort};

use crate::config::{
    self, load, parse_model, resolve_columns, AugmentConfigFile, EvaluateConfigFile,
    FeaturesConfigFile, SelectConfigFile, SweepConfigFile, SynthConfigFile,
};
use crate::csv_io;
use crate::error::CliError;
use crate::report;
use crate::svg;

fn ensure_out(out: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(out).map_err(|e| CliError::file(out, e.to_string()))
}

/// `synth`: generate a cohort, its truth table, and the landmark registry.
pub fn synth(seed: Option<u64>, config: Option<&Path>, out: &Path) -> Result<(), CliError> {
    ensure_out(out)?;
    let file: SynthConfigFile = load(config)?;
    let cohort_config = file.to_cohort_config(seed);
    let (cohort, truth) = generate_cohort(&cohort_config)?;
    csv_io::write_landmark_csv(&out.join("landmarks.csv"), &cohort)?;
    csv_io::write_truth_csv(&out.join("truth.csv"), &truth)?;
    csv_io::write_registry(&out.join("registry.txt"), &default_registry())?;
    Ok(())
}

/// `features`: landmark CSV to feature-matrix CSV plus a build report.
pub fn features(
    input: &Path,
    registry_path: Option<&Path>,
    config: Option<&Path>,
    out: &Path,
) -> Result<(), CliError> {
    ensure_out(out)?;
    let file: FeaturesConfigFile = load(config)?;
    let cohort = csv_io::parse_landmark_csv(input)?;
    let registry = match registry_path {
        Some(p) => csv_io::parse_registry(p)?,
        None => default_registry(),
    };
    let families = file.families()?;
    let tags = file.tags()?;
    let mut specs: Vec<FeatureSpec> = Vec::new();
    for &tag in &tags {
        for &family in &families {
            match family {
                Family::Ceph => specs.extend(ceph_family_specs(tag)),
                Family::Proc | Family::Trans => {
                    specs.extend(coord_family_specs(family, &registry, tag))
                }
            }
        }
    }
    let opts = file.build_options()?;
    let (matrix, build_report) = build_feature_matrix(&cohort, &registry, &specs, &opts)?;
    csv_io::write_feature_csv(&out.join("features.csv"), &matrix)?;
    report::write_build_report(&out.join("build_report.json"), &build_report)?;
    Ok(())
}

/// Baseline comparison p-value, decided by the means when both run lists are
/// constant.
fn p_against_baseline(runs: &[f64], baseline_runs: &[f64]) -> Result<f64, CliError> {
    match stats::t_test(runs, baseline_runs) {
        Ok(t) => Ok(t.p),
        Err(StatsError::DegenerateVariance(_)) => {
            Ok(if stats::mean(runs) == stats::mean(baseline_runs) {
                1.0
            } else {
                0.0
            })
        }
        Err(e) => Err(CliError::Eval(e.into())),
    }
}

/// `evaluate`: run one experiment, write the report and a final model fitted
/// on the full matrix.
pub fn evaluate(
    input: &Path,
    config: Option<&Path>,
    seed: Option<u64>,
    out: &Path,
) -> Result<(), CliError> {
    ensure_out(out)?;
    let file: EvaluateConfigFile = load(config)?;
    let matrix = csv_io::parse_feature_csv(input)?;
    let cfg = file.to_experiment(&matrix, seed)?;
    let result = run_experiment(&cfg, &matrix)?;
    let labels = matrix.label_vec()?;
    let baseline = mfc_baseline(&labels);
    let baseline_runs = mfc_baseline_runs(&cfg.cv, &labels)?;
    let p = p_against_baseline(&result.runs, &baseline_runs)?;
    let feature_names: Vec<String> = cfg
        .feature_columns
        .iter()
        .map(|&c| csv_io::encode_column(&matrix.columns[c]))
        .collect::<Result<_, _>>()?;
    report::write_experiment_report(
        &out.join("report.json"),
        &result,
        feature_names,
        baseline,
        p,
    )?;

    // final model fitted on the whole matrix, for downstream prediction
    let mut classifier = cfg.classifier.clone();
    classifier.seed = derive_seed(cfg.cv.master_seed, &[3]);
    let x = matrix.select_rows(&cfg.feature_columns);
    let x = if cfg.standardize {
        Standardizer::fit_rows(&x)?.transform_rows(&x)?
    } else {
        x
    };
    let model = fit(&classifier, &x, &labels)?;
    crate::model_io::save_model(&out.join("model.json"), &model)?;
    Ok(())
}

/// `select`: staged forward feature selection; one ranked CSV per stage plus
/// a JSON summary.
pub fn select(
    input: &Path,
    config: Option<&Path>,
    seed: Option<u64>,
    out: &Path,
) -> Result<(), CliError> {
    ensure_out(out)?;
    let file: SelectConfigFile = load(config)?;
    let matrix = csv_io::parse_feature_csv(input)?;
    let menu: Vec<ClassifierConfig> = file
        .models
        .iter()
        .map(|m| Ok(ClassifierConfig::new(parse_model(m)?)))
        .collect::<Result<_, CliError>>()?;
    let always_include = resolve_columns(&matrix, &file.always_include)?;
    let candidates: Vec<usize> = if file.candidates.is_empty() {
        (0..matrix.n_cols())
            .filter(|c| !always_include.contains(c) && !matrix.columns[*c].is_age())
            .collect()
    } else {
        resolve_columns(&matrix, &file.candidates)?
    };
    let cv = CVConfig::new(file.folds, file.repeats, seed.unwrap_or(file.seed));
    let sel = SelectionConfig {
        max_stages: file.max_stages,
        top_n: file.top_n,
        alpha: file.alpha,
        always_include,
        standardize: file.standardize,
    };
    let stages = forward_selection(&matrix, &candidates, &menu, &cv, &sel)?;
    let column_names: Vec<String> = matrix
        .columns
        .iter()
        .map(|m| csv_io::encode_column(m))
        .collect::<Result<_, _>>()?;
    for stage in &stages {
        report::write_stage_table(&out.join(format!("stage{}.csv", stage.stage)), stage)?;
    }
    report::write_selection_report(&out.join("selection.json"), &stages, &column_names)?;
    Ok(())
}

/// `augment`: dump one augmented training set and its scatter plot.
pub fn augment_cmd(
    input: &Path,
    config: Option<&Path>,
    seed: Option<u64>,
    out: &Path,
) -> Result<(), CliError> {
    ensure_out(out)?;
    let file: AugmentConfigFile = load(config)?;
    let matrix = csv_io::parse_feature_csv(input)?;
    if file.features.len() < 2 {
        return Err(CliError::Config(String::from(
            "augment needs at least two feature columns (the scatter axes)",
        )));
    }
    let columns = resolve_columns(&matrix, &file.features)?;
    let labels = matrix.label_vec()?;
    let mut rows = matrix.select_rows(&columns);
    if file.standardize {
        rows = Standardizer::fit_rows(&rows)?.transform_rows(&rows)?;
    }
    let set = LabeledSet::from_originals(rows, labels)?;
    let plan = file.plan_fields().to_plan(seed.unwrap_or(file.seed))?;
    let (augmented, _) = augment(&set, &plan)?;
    let metas: Vec<cephalo_core::features::ColumnMeta> = columns
        .iter()
        .map(|&c| matrix.columns[c].clone())
        .collect();
    csv_io::write_augmented_csv(&out.join("augmented.csv"), &augmented, &metas)?;
    let x_name = csv_io::encode_column(&metas[0])?;
    let y_name = csv_io::encode_column(&metas[1])?;
    svg::write_augment_scatter(&out.join("augmented.svg"), &augmented, &x_name, &y_name)?;
    Ok(())
}

/// `sweep`: accuracy-versus-factor curves per method. The no-augmentation
/// baseline is always computed and reported as the first row (`none`, factor
/// 1); the gaussian method expands into one labeled series per noise level.
pub fn sweep(
    input: &Path,
    config: Option<&Path>,
    seed: Option<u64>,
    out: &Path,
) -> Result<(), CliError> {
    ensure_out(out)?;
    let file: SweepConfigFile = load(config)?;
    let matrix = csv_io::parse_feature_csv(input)?;
    if file.features.is_empty() {
        return Err(CliError::Config(String::from(
            "features list must name at least one column",
        )));
    }
    let columns = resolve_columns(&matrix, &file.features)?;
    let master_seed = seed.unwrap_or(file.seed);
    let classifier = ClassifierConfig::new(parse_model(&file.model)?);
    let base_experiment = |plan: cephalo_core::augment::AugmentationPlan| {
        let mut cfg = ExperimentConfig::new(
            classifier.clone(),
            columns.clone(),
            CVConfig::new(file.folds, file.repeats, master_seed),
        );
        cfg.standardize = file.standardize;
        cfg.plan = plan;
        cfg
    };
    let plan_for = |method: Method, factor: f64, sigma: f64| {
        let mut plan = cephalo_core::augment::AugmentationPlan::with_method(
            method,
            factor,
            master_seed,
        );
        plan.k_neighbors = file.k_neighbors;
        plan.m_neighbors = file.m_neighbors;
        plan.enn_k = file.enn_k;
        plan.clusters = file.clusters;
        plan.noise_sigma = sigma;
        plan
    };

    let mut rows: Vec<(String, f64, f64, f64)> = Vec::new();
    let mut series: Vec<(String, Vec<(f64, f64)>)> = Vec::new();

    // no-augmentation baseline, reported separately as factor 1
    let baseline = run_experiment(
        &base_experiment(plan_for(Method::None, 1.0, 0.0)),
        &matrix,
    )?;
    rows.push((String::from("none"), 1.0, baseline.mean, baseline.sd));
    series.push((String::from("none"), vec![(1.0, baseline.mean)]));

    for method in file.methods()? {
        if method == Method::None {
            continue;
        }
        // the gaussian method sweeps its configured noise level; a zero level
        // still runs (plain duplication) but is usually overridden in config
        let sigmas: Vec<f64> = if method == Method::Gaussian {
            vec![file.noise_sigma]
        } else {
            vec![0.0]
        };
        for sigma in sigmas {
            let label = if method == Method::Gaussian {
                format!("{}:{sigma}", method.label())
            } else {
                method.label().to_string()
            };
            let mut points = Vec::new();
            for &factor in &file.factors {
                let result =
                    run_experiment(&base_experiment(plan_for(method, factor, sigma)), &matrix)?;
                rows.push((label.clone(), factor, result.mean, result.sd));
                points.push((factor, result.mean));
            }
            series.push((label, points));
        }
    }

    let sweep_path = out.join("sweep.csv");
    let mut writer =
        csv::Writer::from_path(&sweep_path).map_err(|e| CliError::file(&sweep_path, e.to_string()))?;
    writer
        .write_record(csv_io::SWEEP_HEADER)
        .map_err(|e| CliError::file(&sweep_path, e.to_string()))?;
    for (method, factor, mean, sd) in &rows {
        writer
            .write_record([
                method.clone(),
                factor.to_string(),
                mean.to_string(),
                sd.to_string(),
            ])
            .map_err(|e| CliError::file(&sweep_path, e.to_string()))?;
    }
    writer
        .flush()
        .map_err(|e| CliError::file(&sweep_path, e.to_string()))?;

    svg::write_line_chart(
        &out.join("sweep.svg"),
        "accuracy vs augmentation factor",
        "augmentation factor",
        "mean accuracy",
        &series,
    )?;
    Ok(())
}

/// `agreement`: two prediction files against a truth table, joined by
/// subject id.
pub fn agreement(
    pred_a: &Path,
    pred_b: &Path,
    truth: &Path,
    out: &Path,
) -> Result<(), CliError> {
    ensure_out(out)?;
    let truth_rows = csv_io::parse_truth_csv(truth)?;
    let a_rows = csv_io::parse_prediction_csv(pred_a)?;
    let b_rows = csv_io::parse_prediction_csv(pred_b)?;
    let lookup = |rows: &[(String, GrowthLabel)],
                  path: &Path|
     -> Result<std::collections::BTreeMap<String, GrowthLabel>, CliError> {
        let mut map = std::collections::BTreeMap::new();
        for (id, label) in rows {
            if map.insert(id.clone(), *label).is_some() {
                return Err(CliError::file(path, format!("duplicate subject {id:?}")));
            }
        }
        Ok(map)
    };
    let map_a = lookup(&a_rows, pred_a)?;
    let map_b = lookup(&b_rows, pred_b)?;
    let mut va = Vec::with_capacity(truth_rows.len());
    let mut vb = Vec::with_capacity(truth_rows.len());
    let mut vt = Vec::with_capacity(truth_rows.len());
    for (id, label, _) in &truth_rows {
        let la = map_a
            .get(id)
            .ok_or_else(|| CliError::file(pred_a, format!("missing subject {id:?}")))?;
        let lb = map_b
            .get(id)
            .ok_or_else(|| CliError::file(pred_b, format!("missing subject {id:?}")))?;
        va.push(*la);
        vb.push(*lb);
        vt.push(*label);
    }
    let result = rater_agreement(&va, &vb, &vt)?;
    report::write_agreement_report(&out.join("agreement.json"), vt.len(), &result)?;
    Ok(())
}

/// Command-line surface shared by `main` and the integration tests.
#[derive(Debug)]
pub enum Command {
    Synth,
    Features,
    Evaluate,
    Select,
    Augment,
    Sweep,
    Agreement,
}

#[allow(clippy::too_many_arguments)]
pub fn dispatch(
    command: Command,
    input: Option<PathBuf>,
    registry: Option<PathBuf>,
    pred_a: Option<PathBuf>,
    pred_b: Option<PathBuf>,
    truth: Option<PathBuf>,
    seed: Option<u64>,
    config_path: Option<PathBuf>,
    out: PathBuf,
) -> Result<(), CliError> {
    let need_input = |input: &Option<PathBuf>| -> Result<PathBuf, CliError> {
        input
            .clone()
            .ok_or_else(|| CliError::Config(String::from("--input is required")))
    };
    let config = config_path.as_deref();
    match command {
        Command::Synth => synth(seed, config, &out),
        Command::Features => features(&need_input(&input)?, registry.as_deref(), config, &out),
        Command::Evaluate => evaluate(&need_input(&input)?, config, seed, &out),
        Command::Select => select(&need_input(&input)?, config, seed, &out),
        Command::Augment => augment_cmd(&need_input(&input)?, config, seed, &out),
        Command::Sweep => sweep(&need_input(&input)?, config, seed, &out),
        Command::Agreement => {
            let a = pred_a.ok_or_else(|| CliError::Config(String::from("--pred-a is required")))?;
            let b = pred_b.ok_or_else(|| CliError::Config(String::from("--pred-b is required")))?;
            let t = truth.ok_or_else(|| CliError::Config(String::from("--truth is required")))?;
            agreement(&a, &b, &t, &out)
        }
    }
}

// config module is re-exported so integration tests can build configs directly
pub use config as config_types;
