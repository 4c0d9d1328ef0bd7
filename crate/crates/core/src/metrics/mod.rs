//! Per-class evaluation statistics computed from prediction logs.
//!
//! All statistics are counted per trained model (one `(strength, seed)`
//! cell), averaged over seeds, and only then turned into Δ statistics.
//! The strongest augmentation is the smallest strength in the grid.

mod confusion;
mod curves;
mod tally;

use std::collections::BTreeMap;

pub use confusion::{ConfusionCurves, PairCurve};
pub use curves::{
    accuracy_drop, affected_classes, group_average, AccuracyDrop, ClassCurve, CurvePoint, MetricCurves, SeedStat,
    Selector,
};
pub use tally::{tally, ClassIndex, MultilabelCounts, SeedTable, Tally};

use crate::data::{AnnotationSet, PredictionLog};
use crate::error::{Error, Result};
use crate::types::{ClassId, LabelMode};

/// Accuracy, FP and FN curves for every class of the annotation universe.
pub fn evaluate(log: &PredictionLog, ann: &AnnotationSet) -> Result<MetricCurves> {
    Ok(MetricCurves::from_tally(&tally(log, ann)?))
}

/// Per-class accuracy curves (seed mean and standard error) in one label mode.
pub fn per_class_accuracy(
    log: &PredictionLog,
    ann: &AnnotationSet,
    mode: LabelMode,
) -> Result<BTreeMap<ClassId, Vec<Option<SeedStat>>>> {
    if mode == LabelMode::Multilabel && ann.multilabel().is_none() {
        return Err(Error::Input("multi-label accuracy requires multi-label annotations".into()));
    }
    let curves = evaluate(log, ann)?;
    Ok(curves
        .classes
        .into_iter()
        .map(|c| {
            let stats = c
                .points
                .iter()
                .map(|p| match mode {
                    LabelMode::Original => p.acc_original,
                    LabelMode::Multilabel => p.acc_real,
                })
                .collect();
            (c.class, stats)
        })
        .collect())
}

/// Seed-mean FP and FN counts per class and strength.
#[derive(Clone, Debug, PartialEq)]
pub struct FpFnCurve {
    pub fp: Vec<f64>,
    pub fn_: Vec<f64>,
    pub delta_fp: Option<f64>,
}

pub fn fp_fn_counts(log: &PredictionLog, ann: &AnnotationSet, mode: LabelMode) -> Result<BTreeMap<ClassId, FpFnCurve>> {
    let curves = evaluate(log, ann)?;
    curves.require_mode(mode)?;
    Ok(curves
        .classes
        .into_iter()
        .map(|c| {
            let fp = c.points.iter().map(|p| p.false_positives(mode).unwrap_or(0.0)).collect();
            let fn_ = c.points.iter().map(|p| p.false_negatives(mode).unwrap_or(0.0)).collect();
            let delta_fp = c.delta_fp(mode);
            (c.class, FpFnCurve { fp, fn_, delta_fp })
        })
        .collect())
}

pub fn confusion_rates(log: &PredictionLog, ann: &AnnotationSet) -> Result<ConfusionCurves> {
    Ok(ConfusionCurves::from_tally(&tally(log, ann)?))
}

/// Classes with fewer than `threshold` training examples, in id order.
pub fn underrepresented_classes(ann: &AnnotationSet, threshold: u64) -> Result<Vec<ClassId>> {
    let counts = ann
        .train_counts()
        .ok_or_else(|| Error::Input("training counts are required to find underrepresented classes".into()))?;
    Ok(counts
        .iter()
        .filter(|&(_, &n)| n < threshold)
        .map(|(c, _)| c.clone())
        .collect())
}
