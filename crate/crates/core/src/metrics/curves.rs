use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::tally::Tally;
use crate::error::{Error, Result};
use crate::types::{ClassId, LabelMode, Strength};

/// Mean and standard error of a per-seed statistic.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedStat {
    pub mean: f64,
    pub stderr: f64,
    pub n: usize,
}

impl SeedStat {
    /// `None` for an empty slice. The standard error uses the unbiased
    /// sample variance and is zero for a single seed.
    pub fn from_values(values: &[f64]) -> Option<Self> {
        let n = values.len();
        if n == 0 {
            return None;
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let stderr = if n > 1 {
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        } else {
            0.0
        };
        Some(SeedStat { mean, stderr, n })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub strength: Strength,
    /// Number of seeds evaluated at this strength.
    pub seeds: usize,
    pub acc_original: Option<SeedStat>,
    pub acc_real: Option<SeedStat>,
    /// Seed-mean counts.
    pub fp_original: f64,
    pub fn_original: f64,
    pub fp_real: Option<f64>,
    pub fn_real: Option<f64>,
}

impl CurvePoint {
    pub fn accuracy(&self, mode: LabelMode) -> Option<f64> {
        match mode {
            LabelMode::Original => self.acc_original.map(|s| s.mean),
            LabelMode::Multilabel => self.acc_real.map(|s| s.mean),
        }
    }

    pub fn false_positives(&self, mode: LabelMode) -> Option<f64> {
        match mode {
            LabelMode::Original => Some(self.fp_original),
            LabelMode::Multilabel => self.fp_real,
        }
    }

    pub fn false_negatives(&self, mode: LabelMode) -> Option<f64> {
        match mode {
            LabelMode::Original => Some(self.fn_original),
            LabelMode::Multilabel => self.fn_real,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassCurve {
    pub class: ClassId,
    /// One point per grid strength, ascending.
    pub points: Vec<CurvePoint>,
    pub delta_acc_original: Option<f64>,
    pub delta_acc_real: Option<f64>,
    pub delta_fp_original: Option<f64>,
    pub delta_fp_real: Option<f64>,
}

impl ClassCurve {
    pub fn delta_acc(&self, mode: LabelMode) -> Option<f64> {
        match mode {
            LabelMode::Original => self.delta_acc_original,
            LabelMode::Multilabel => self.delta_acc_real,
        }
    }

    pub fn delta_fp(&self, mode: LabelMode) -> Option<f64> {
        match mode {
            LabelMode::Original => self.delta_fp_original,
            LabelMode::Multilabel => self.delta_fp_real,
        }
    }

    pub fn accuracy_curve(&self, mode: LabelMode) -> Vec<Option<f64>> {
        self.points.iter().map(|p| p.accuracy(mode)).collect()
    }
}

/// Per-class accuracy, FP and FN as functions of augmentation strength.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricCurves {
    /// Ascending; the first entry is the strongest augmentation.
    pub strengths: Vec<Strength>,
    pub multilabel: bool,
    pub classes: Vec<ClassCurve>,
}

impl MetricCurves {
    pub fn from_tally(tally: &Tally) -> Self {
        let multilabel = tally.has_multilabel();
        let classes = tally
            .classes
            .ids()
            .iter()
            .enumerate()
            .map(|(k, id)| {
                let points: Vec<CurvePoint> = tally
                    .strengths
                    .iter()
                    .map(|&s| point_for(tally, k, s, multilabel))
                    .collect();
                let acc = |mode| points.iter().map(|p| p.accuracy(mode)).collect::<Vec<_>>();
                let fp = |mode| points.iter().map(|p| p.false_positives(mode)).collect::<Vec<_>>();
                ClassCurve {
                    class: id.clone(),
                    delta_acc_original: drop_from_peak(&acc(LabelMode::Original)),
                    delta_acc_real: drop_from_peak(&acc(LabelMode::Multilabel)),
                    delta_fp_original: growth_over_floor(&fp(LabelMode::Original)),
                    delta_fp_real: growth_over_floor(&fp(LabelMode::Multilabel)),
                    points,
                }
            })
            .collect();
        MetricCurves {
            strengths: tally.strengths.clone(),
            multilabel,
            classes,
        }
    }

    pub fn strongest(&self) -> Option<Strength> {
        self.strengths.first().copied()
    }

    pub fn class(&self, id: &ClassId) -> Option<&ClassCurve> {
        self.classes
            .binary_search_by(|c| c.class.cmp(id))
            .ok()
            .map(|i| &self.classes[i])
    }

    pub fn class_ids(&self) -> impl Iterator<Item = &ClassId> {
        self.classes.iter().map(|c| &c.class)
    }

    pub(crate) fn require_mode(&self, mode: LabelMode) -> Result<()> {
        if mode == LabelMode::Multilabel && !self.multilabel {
            return Err(Error::Input(
                "multi-label metrics requested but no multi-label annotations were supplied".into(),
            ));
        }
        Ok(())
    }
}

fn point_for(tally: &Tally, k: usize, s: Strength, multilabel: bool) -> CurvePoint {
    let tables: Vec<_> = tally.at(s).collect();
    let n = tables.len() as f64;
    let mean_count = |f: &dyn Fn(&super::tally::SeedTable) -> u64| tables.iter().map(|t| f(t) as f64).sum::<f64>() / n;
    let accs = |mode| -> Vec<f64> { tables.iter().filter_map(|t| t.accuracy(k, mode)).collect() };

    CurvePoint {
        strength: s,
        seeds: tables.len(),
        acc_original: SeedStat::from_values(&accs(LabelMode::Original)),
        acc_real: if multilabel {
            SeedStat::from_values(&accs(LabelMode::Multilabel))
        } else {
            None
        },
        fp_original: mean_count(&|t| t.false_positives[k]),
        fn_original: mean_count(&|t| t.support[k] - t.correct[k]),
        fp_real: multilabel.then(|| mean_count(&|t| t.multilabel.as_ref().map_or(0, |m| m.false_positives[k]))),
        fn_real: multilabel.then(|| mean_count(&|t| t.multilabel.as_ref().map_or(0, |m| m.false_negatives[k]))),
    }
}

/// `max_s v(s) - v(strongest)`; `None` when the strongest value is missing
/// or the grid has a single point.
pub(crate) fn drop_from_peak(curve: &[Option<f64>]) -> Option<f64> {
    if curve.len() < 2 {
        return None;
    }
    let at_strongest = curve[0]?;
    let peak = curve.iter().flatten().copied().fold(at_strongest, f64::max);
    Some(peak - at_strongest)
}

/// `v(strongest) - min_s v(s)`, the mirror image of [`drop_from_peak`].
pub(crate) fn growth_over_floor(curve: &[Option<f64>]) -> Option<f64> {
    if curve.len() < 2 {
        return None;
    }
    let at_strongest = curve[0]?;
    let floor = curve.iter().flatten().copied().fold(at_strongest, f64::min);
    Some(at_strongest - floor)
}

/// Per-class accuracy drops for both label modes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AccuracyDrop {
    pub original: Option<f64>,
    pub real: Option<f64>,
}

/// Δa for every class: peak seed-mean accuracy over the grid minus the
/// seed-mean accuracy at the strongest strength.
pub fn accuracy_drop(curves: &MetricCurves) -> Result<BTreeMap<ClassId, AccuracyDrop>> {
    if curves.strengths.len() < 2 {
        return Err(Error::Undefined(
            "accuracy drop needs at least two strengths in the grid".into(),
        ));
    }
    Ok(curves
        .classes
        .iter()
        .map(|c| {
            (
                c.class.clone(),
                AccuracyDrop {
                    original: c.delta_acc_original,
                    real: c.delta_acc_real,
                },
            )
        })
        .collect())
}

/// How to pick the classes most hurt by augmentation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Selector {
    TopN(usize),
    /// Classes whose drop strictly exceeds the threshold.
    MinDrop(f64),
}

/// Classes sorted by Δa (descending, ties by class id), truncated by `selector`.
/// Classes whose drop is undefined are skipped.
pub fn affected_classes(curves: &MetricCurves, selector: Selector, mode: LabelMode) -> Result<Vec<ClassId>> {
    if curves.classes.is_empty() {
        return Err(Error::Undefined("no classes in metric curves".into()));
    }
    curves.require_mode(mode)?;
    let mut ranked: Vec<(&ClassId, f64)> = curves
        .classes
        .iter()
        .filter_map(|c| c.delta_acc(mode).map(|d| (&c.class, d)))
        .collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    let picked = match selector {
        Selector::TopN(n) => ranked.into_iter().take(n).map(|(c, _)| c.clone()).collect(),
        Selector::MinDrop(t) => ranked
            .into_iter()
            .filter(|&(_, d)| d > t)
            .map(|(c, _)| c.clone())
            .collect(),
    };
    Ok(picked)
}

/// Unweighted mean of per-class seed-mean accuracy over `class_set`, one
/// value per grid strength. Classes without an accuracy at a strength are
/// left out of that strength's mean.
pub fn group_average(curves: &MetricCurves, class_set: &[ClassId], mode: LabelMode) -> Result<Vec<Option<f64>>> {
    if class_set.is_empty() {
        return Err(Error::InvalidParam("group average over an empty class set".into()));
    }
    curves.require_mode(mode)?;
    let members: Vec<&ClassCurve> = class_set
        .iter()
        .map(|id| {
            curves
                .class(id)
                .ok_or_else(|| Error::Input(format!("class `{id}` is not in the metric curves")))
        })
        .collect::<Result<_>>()?;
    Ok((0..curves.strengths.len())
        .map(|i| {
            let vals: Vec<f64> = members.iter().filter_map(|c| c.points[i].accuracy(mode)).collect();
            (!vals.is_empty()).then(|| vals.iter().sum::<f64>() / vals.len() as f64)
        })
        .collect())
}
