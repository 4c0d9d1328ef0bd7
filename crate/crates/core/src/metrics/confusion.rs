use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::curves::{drop_from_peak, growth_over_floor};
use super::tally::Tally;
use crate::types::{ClassId, Strength};

/// Confusion-rate curve of one ordered class pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairCurve {
    pub from: ClassId,
    pub to: ClassId,
    /// Seed-mean CR(from -> to) per grid strength.
    pub cr: Vec<Option<f64>>,
    /// CR at the strongest strength minus its minimum over the grid.
    pub delta_cr: Option<f64>,
    /// Maximum CR over the grid minus CR at the strongest strength.
    pub delta_cr_star: Option<f64>,
    /// `delta_cr_star` of the reverse pair (to -> from).
    pub reverse_delta_cr_star: Option<f64>,
}

/// Confusion curves for every ordered pair that is confused at least once,
/// in either direction, somewhere in the log.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfusionCurves {
    pub strengths: Vec<Strength>,
    /// Sorted by (from, to).
    pub pairs: Vec<PairCurve>,
}

impl ConfusionCurves {
    pub fn from_tally(tally: &Tally) -> Self {
        let mut active: BTreeSet<(usize, usize)> = BTreeSet::new();
        for t in &tally.tables {
            for &(k, l) in t.confusions.keys() {
                active.insert((k, l));
                active.insert((l, k));
            }
        }
        let curve = |k: usize, l: usize| -> Vec<Option<f64>> {
            tally
                .strengths
                .iter()
                .map(|&s| {
                    let rates: Vec<f64> = tally.at(s).filter_map(|t| t.confusion_rate(k, l)).collect();
                    (!rates.is_empty()).then(|| rates.iter().sum::<f64>() / rates.len() as f64)
                })
                .collect()
        };
        let ids = tally.classes.ids();
        let pairs = active
            .into_iter()
            .map(|(k, l)| {
                let cr = curve(k, l);
                let reverse = curve(l, k);
                PairCurve {
                    from: ids[k].clone(),
                    to: ids[l].clone(),
                    delta_cr: growth_over_floor(&cr),
                    delta_cr_star: drop_from_peak(&cr),
                    reverse_delta_cr_star: drop_from_peak(&reverse),
                    cr,
                }
            })
            .collect();
        ConfusionCurves {
            strengths: tally.strengths.clone(),
            pairs,
        }
    }

    pub fn pair(&self, from: &ClassId, to: &ClassId) -> Option<&PairCurve> {
        self.pairs
            .binary_search_by(|p| (&p.from, &p.to).cmp(&(from, to)))
            .ok()
            .map(|i| &self.pairs[i])
    }

    /// Pairs starting at `from` with ΔCR at or above `min_delta_cr`, largest
    /// growth first (ties by partner id).
    pub fn partners_of(&self, from: &ClassId, min_delta_cr: f64) -> Vec<&PairCurve> {
        let mut out: Vec<&PairCurve> = self
            .pairs
            .iter()
            .filter(|p| &p.from == from && p.delta_cr.is_some_and(|d| d >= min_delta_cr))
            .collect();
        out.sort_by(|a, b| {
            b.delta_cr
                .unwrap_or(0.0)
                .total_cmp(&a.delta_cr.unwrap_or(0.0))
                .then_with(|| a.to.cmp(&b.to))
        });
        out
    }

    /// Keeps only pairs whose ΔCR reaches `min_delta_cr`.
    pub fn filtered(&self, min_delta_cr: f64) -> ConfusionCurves {
        ConfusionCurves {
            strengths: self.strengths.clone(),
            pairs: self
                .pairs
                .iter()
                .filter(|p| p.delta_cr.is_some_and(|d| d >= min_delta_cr))
                .cloned()
                .collect(),
        }
    }
}
