//! Class-conditional augmentation policies.
//!
//! A policy assigns every class an augmentation strength. Most classes use
//! the default (the strongest strength of the sweep); a few selected classes
//! are overridden, either to the strength minimising their FP + FN count or,
//! for the removal baseline, to no augmentation at all.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::MetricCurves;
use crate::types::{ClassId, LabelMode, Strength};

/// What a policy does to one class.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClassAug {
    Strength(Strength),
    /// Deterministic resize only.
    NoAugmentation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyKind {
    Uniform,
    FpFn,
    RemoveAugmentation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    pub kind: PolicyKind,
    /// Number of classes requested for intervention.
    pub m: usize,
    pub selection_metric: String,
    pub label_mode: Option<LabelMode>,
    /// Classes picked for intervention, in selection order. Includes
    /// classes whose optimal strength equals the default.
    pub selected: Vec<ClassId>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AugPolicy {
    pub default_strength: Strength,
    /// `null` means no augmentation.
    pub overrides: BTreeMap<ClassId, Option<Strength>>,
    pub provenance: Provenance,
}

impl AugPolicy {
    /// The same strength for every class.
    pub fn uniform(strength: Strength) -> Self {
        AugPolicy {
            default_strength: strength,
            overrides: BTreeMap::new(),
            provenance: Provenance {
                kind: PolicyKind::Uniform,
                m: 0,
                selection_metric: "none".into(),
                label_mode: None,
                selected: Vec::new(),
            },
        }
    }

    pub fn strength_for(&self, class: &ClassId) -> ClassAug {
        match self.overrides.get(class) {
            Some(Some(s)) => ClassAug::Strength(*s),
            Some(None) => ClassAug::NoAugmentation,
            None => ClassAug::Strength(self.default_strength),
        }
    }

    /// Checks that every strength the policy uses lies on `grid`.
    pub fn check_grid(&self, grid: &[Strength]) -> Result<()> {
        let used = std::iter::once(self.default_strength).chain(self.overrides.values().flatten().copied());
        for s in used {
            if !grid.contains(&s) {
                return Err(Error::InvalidParam(format!("policy strength {s} is not on the evaluated grid")));
            }
        }
        Ok(())
    }
}

/// `argmin_s FP(s) + FN(s)` over the grid, using seed-mean counts. Ties go
/// to the strongest strength.
pub fn optimal_strength(curves: &MetricCurves, class: &ClassId, mode: LabelMode) -> Result<Strength> {
    curves.require_mode(mode)?;
    let curve = curves
        .class(class)
        .ok_or_else(|| Error::Input(format!("no metric curve for class `{class}`")))?;
    let mut best: Option<(Strength, f64)> = None;
    for p in &curve.points {
        let total = match (p.false_positives(mode), p.false_negatives(mode)) {
            (Some(fp), Some(fn_)) => fp + fn_,
            _ => {
                return Err(Error::Undefined(format!(
                    "FP/FN for class `{class}` missing at strength {}",
                    p.strength
                )))
            }
        };
        if best.is_none_or(|(_, b)| total < b) {
            best = Some((p.strength, total));
        }
    }
    best.map(|(s, _)| s)
        .ok_or_else(|| Error::Undefined(format!("empty strength grid for class `{class}`")))
}

/// The `m` classes whose false positives grow the most under the strongest
/// augmentation (ΔFP descending, ties by class id).
pub fn select_intervention_classes(curves: &MetricCurves, m: usize, mode: LabelMode) -> Result<Vec<ClassId>> {
    curves.require_mode(mode)?;
    if m > curves.classes.len() {
        return Err(Error::InvalidParam(format!(
            "m = {m} exceeds the number of classes ({})",
            curves.classes.len()
        )));
    }
    if m == 0 {
        return Ok(Vec::new());
    }
    let mut ranked: Vec<(&ClassId, f64)> = curves
        .classes
        .iter()
        .map(|c| {
            c.delta_fp(mode)
                .map(|d| (&c.class, d))
                .ok_or_else(|| Error::Undefined(format!("ΔFP undefined for class `{}`", c.class)))
        })
        .collect::<Result<_>>()?;
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    Ok(ranked.into_iter().take(m).map(|(c, _)| c.clone()).collect())
}

/// Strongest augmentation for every class except the top-`m` ΔFP classes,
/// which get their FP + FN optimal strength.
pub fn build_policy(curves: &MetricCurves, m: usize, mode: LabelMode) -> Result<AugPolicy> {
    let default = curves
        .strongest()
        .ok_or_else(|| Error::Undefined("metric curves have an empty strength grid".into()))?;
    let selected = select_intervention_classes(curves, m, mode)?;
    let mut overrides = BTreeMap::new();
    for c in &selected {
        let s = optimal_strength(curves, c, mode)?;
        if s != default {
            overrides.insert(c.clone(), Some(s));
        }
    }
    Ok(AugPolicy {
        default_strength: default,
        overrides,
        provenance: Provenance {
            kind: PolicyKind::FpFn,
            m,
            selection_metric: "delta_fp".into(),
            label_mode: Some(mode),
            selected,
        },
    })
}

/// Baseline that switches augmentation off for `affected` and keeps
/// `default` for everyone else.
pub fn baseline_remove_augmentation(affected: &[ClassId], default: Strength) -> AugPolicy {
    AugPolicy {
        default_strength: default,
        overrides: affected.iter().map(|c| (c.clone(), None)).collect(),
        provenance: Provenance {
            kind: PolicyKind::RemoveAugmentation,
            m: affected.len(),
            selection_metric: "delta_acc".into(),
            label_mode: None,
            selected: affected.to_vec(),
        },
    }
}
