//! End-to-end run on the simulator: sweep, metrics, confusion report,
//! policy and intervention, all written to one directory.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::Result;
use crate::io::{self, report, Artifact, RunManifest};
use crate::metrics::{confusion_rates, evaluate, ConfusionCurves, MetricCurves};
use crate::policy::{build_policy, AugPolicy};
use crate::sim::{class_embeddings, class_taxonomy, intervention_experiment, sweep, InterventionTable, SimConfig};
use crate::taxonomy::{confusion_report, ConfusionReport, ReportConfig};

pub const PREDICTIONS: &str = "predictions.jsonl";
pub const LABELS: &str = "labels.jsonl";
pub const MULTILABELS: &str = "multilabels.jsonl";
pub const TRAIN_COUNTS: &str = "train_counts.tsv";
pub const TAXONOMY: &str = "taxonomy.tsv";
pub const EMBEDDINGS: &str = "embeddings.tsv";
pub const METRICS: &str = "metrics.json";
pub const CONFUSIONS: &str = "confusions.json";
pub const REPORT: &str = "report.json";
pub const POLICY: &str = "policy.json";
pub const INTERVENTION: &str = "intervention.json";
pub const MARKDOWN: &str = "report.md";

#[derive(Clone, Debug)]
pub struct PipelineOutput {
    pub dir: PathBuf,
    pub metrics: MetricCurves,
    pub confusions: ConfusionCurves,
    pub report: ConfusionReport,
    pub policy: AugPolicy,
    pub intervention: InterventionTable,
}

#[derive(Serialize)]
struct PipelineParams<'a> {
    sim: &'a SimConfig,
    report: &'a ReportConfig,
}

pub fn run_pipeline(config: &SimConfig, report_config: &ReportConfig, dir: &Path) -> Result<PipelineOutput> {
    config.validate()?;
    fs::create_dir_all(dir)?;
    let params = PipelineParams {
        sim: config,
        report: report_config,
    };
    let base = RunManifest::new("pipeline", &params)?;

    log::info!("sweeping {} strengths x {} seeds", config.grid.len(), config.seeds);
    let out = sweep(config)?;
    let tree = class_taxonomy(config)?;
    let table = class_embeddings(config)?;
    io::write_file(&dir.join(PREDICTIONS), |w| io::write_prediction_log(&out.log, w))?;
    io::write_file(&dir.join(LABELS), |w| io::write_original_labels(&out.annotations, w))?;
    io::write_file(&dir.join(MULTILABELS), |w| io::write_multilabel(&out.annotations, w))?;
    io::write_file(&dir.join(TRAIN_COUNTS), |w| {
        io::write_counts(out.annotations.train_counts().expect("simulator records counts"), w)
    })?;
    io::write_file(&dir.join(TAXONOMY), |w| io::write_taxonomy(&tree, w))?;
    io::write_file(&dir.join(EMBEDDINGS), |w| io::write_embeddings(&table, w))?;

    let mut inputs = base.clone();
    for name in [PREDICTIONS, LABELS, MULTILABELS, TRAIN_COUNTS, TAXONOMY, EMBEDDINGS] {
        inputs = inputs.with_input(name, &dir.join(name))?;
    }

    let metrics = evaluate(&out.log, &out.annotations)?;
    let confusions = confusion_rates(&out.log, &out.annotations)?;
    let report = confusion_report(&confusions, &metrics, &out.annotations, Some(&tree), Some(&table), report_config)?;
    let policy = build_policy(&metrics, config.intervention.m, config.intervention.mode)?;
    log::info!("retraining for the intervention comparison");
    let intervention = intervention_experiment(config, &out, Some(&policy))?;

    emit(dir, METRICS, "metrics", &inputs, &metrics)?;
    emit(dir, CONFUSIONS, "confusions", &inputs, &confusions)?;
    emit(dir, REPORT, "confusion_report", &inputs, &report)?;
    emit(dir, POLICY, "policy", &inputs, &policy)?;
    emit(dir, INTERVENTION, "intervention", &inputs, &intervention)?;

    let m = Some(&inputs);
    let markdown = [
        report::render_confusion_report(&report, m),
        report::render_metrics(&metrics, None),
        report::render_policy(&policy, None),
        report::render_intervention(&intervention, None),
    ]
    .join("\n");
    fs::write(dir.join(MARKDOWN), markdown)?;

    Ok(PipelineOutput {
        dir: dir.to_path_buf(),
        metrics,
        confusions,
        report,
        policy,
        intervention,
    })
}

fn emit<T: Serialize>(dir: &Path, name: &str, kind: &str, manifest: &RunManifest, data: &T) -> Result<()> {
    io::write_artifact(&dir.join(name), &Artifact::new(kind, manifest.clone(), data))
}
