//! JSON report documents, all versioned with `"schema": 1`, embedding the
//! resolved config and seeds for provenance.

use std::path::Path;

use cephalo_core::eval::{reference, ExperimentResult, StageResult};
use cephalo_core::features::BuildReport;
use serde::Serialize;

use crate::csv_io::STAGE_HEADER;
use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize)]
struct BuildReportDoc<'a> {
    schema: u32,
    dropped_subjects: Vec<&'a str>,
    n_rows: usize,
    n_cols: usize,
}

pub fn write_build_report(path: &Path, report: &BuildReport) -> Result<(), CliError> {
    let doc = BuildReportDoc {
        schema: SCHEMA_VERSION,
        dropped_subjects: report.dropped.iter().map(|d| d.subject_id.as_str()).collect(),
        n_rows: report.n_rows,
        n_cols: report.n_cols,
    };
    write_json(path, &doc)
}

#[derive(Serialize)]
pub struct ExperimentConfigDoc {
    pub model: String,
    pub features: Vec<String>,
    pub standardize: bool,
    pub method: String,
    pub factor: f64,
    pub folds: usize,
    pub repeats: usize,
    pub master_seed: u64,
}

#[derive(Serialize)]
struct ExperimentReportDoc {
    schema: u32,
    config: ExperimentConfigDoc,
    runs: Vec<f64>,
    mean: f64,
    sd: f64,
    baseline: f64,
    p_vs_baseline: f64,
    reference_baseline_raw: f64,
    reference_baseline_standardized: f64,
}

pub fn write_experiment_report(
    path: &Path,
    result: &ExperimentResult,
    feature_names: Vec<String>,
    baseline: f64,
    p_vs_baseline: f64,
) -> Result<(), CliError> {
    let cfg = &result.config;
    let doc = ExperimentReportDoc {
        schema: SCHEMA_VERSION,
        config: ExperimentConfigDoc {
            model: cfg.classifier.kind.describe(),
            features: feature_names,
            standardize: cfg.standardize,
            method: cfg.plan.method.label().to_string(),
            factor: cfg.plan.factor,
            folds: cfg.cv.folds,
            repeats: cfg.cv.repeats,
            master_seed: cfg.cv.master_seed,
        },
        runs: result.runs.clone(),
        mean: result.mean,
        sd: result.sd,
        baseline,
        p_vs_baseline,
        reference_baseline_raw: reference::BASELINE_ACCURACY_RAW,
        reference_baseline_standardized: reference::BASELINE_ACCURACY_STANDARDIZED,
    };
    write_json(path, &doc)
}

#[derive(Serialize)]
struct AgreementDoc {
    schema: u32,
    n: usize,
    accuracy_a: f64,
    accuracy_b: f64,
    consistency: f64,
    reference: AgreementReference,
}

#[derive(Serialize)]
struct AgreementReference {
    expert_a_accuracy: f64,
    expert_b_accuracy: f64,
    expert_consistency: f64,
}

pub fn write_agreement_report(
    path: &Path,
    n: usize,
    agreement: &cephalo_core::eval::RaterAgreement,
) -> Result<(), CliError> {
    let doc = AgreementDoc {
        schema: SCHEMA_VERSION,
        n,
        accuracy_a: agreement.accuracy_a,
        accuracy_b: agreement.accuracy_b,
        consistency: agreement.consistency,
        reference: AgreementReference {
            expert_a_accuracy: reference::EXPERT_A_ACCURACY,
            expert_b_accuracy: reference::EXPERT_B_ACCURACY,
            expert_consistency: reference::EXPERT_CONSISTENCY,
        },
    };
    write_json(path, &doc)
}

#[derive(Serialize)]
struct SelectionDoc<'a> {
    schema: u32,
    stages: Vec<SelectionStageDoc<'a>>,
}

#[derive(Serialize)]
struct SelectionStageDoc<'a> {
    stage: usize,
    fixed: Vec<&'a str>,
    p_vs_previous: Option<f64>,
    significantly_better: Option<bool>,
    best_model: &'a str,
    best_feature: &'a str,
    best_mean: f64,
    best_sd: f64,
}

pub fn write_selection_report(
    path: &Path,
    stages: &[StageResult],
    column_names: &[String],
) -> Result<(), CliError> {
    let doc = SelectionDoc {
        schema: SCHEMA_VERSION,
        stages: stages
            .iter()
            .map(|s| SelectionStageDoc {
                stage: s.stage,
                fixed: s.fixed.iter().map(|&c| column_names[c].as_str()).collect(),
                p_vs_previous: s.p_vs_previous,
                significantly_better: s.significantly_better,
                best_model: &s.entries[0].model,
                best_feature: &s.entries[0].column_name,
                best_mean: s.entries[0].mean,
                best_sd: s.entries[0].sd,
            })
            .collect(),
    };
    write_json(path, &doc)
}

/// One ranked table per stage, mirroring the study's top-model table layout.
pub fn write_stage_table(path: &Path, stage: &StageResult) -> Result<(), CliError> {
    let mut writer = csv::Writer::from_path(path).map_err(|e| CliError::file(path, e.to_string()))?;
    writer
        .write_record(STAGE_HEADER)
        .map_err(|e| CliError::file(path, e.to_string()))?;
    for (rank, entry) in stage.entries.iter().enumerate() {
        writer
            .write_record([
                (rank + 1).to_string(),
                entry.model.clone(),
                entry.column_name.clone(),
                entry.family.map_or_else(String::new, |f| f.label().to_string()),
                entry.tag.map_or_else(String::new, |t| t.label().to_string()),
                entry.mean.to_string(),
                entry.sd.to_string(),
            ])
            .map_err(|e| CliError::file(path, e.to_string()))?;
    }
    writer.flush().map_err(|e| CliError::file(path, e.to_string()))?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, doc: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(doc)
        .map_err(|e| CliError::file(path, e.to_string()))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CliError::file(path, e.to_string()))?;
    Ok(())
}
