//! Raw per-model counting. Everything else in [`crate::metrics`] is derived
//! from these tables.

use std::collections::{BTreeMap, HashMap};

use crate::data::{AnnotationSet, PredictionLog};
use crate::error::{Error, Result};
use crate::types::{ClassId, LabelMode, Strength};

/// Dense index over the class universe, in sorted id order.
#[derive(Clone, Debug)]
pub struct ClassIndex {
    ids: Vec<ClassId>,
    pos: HashMap<ClassId, usize>,
}

impl ClassIndex {
    pub fn new<'a, I: IntoIterator<Item = &'a ClassId>>(ids: I) -> Self {
        let mut ids: Vec<ClassId> = ids.into_iter().cloned().collect();
        ids.sort();
        ids.dedup();
        let pos = ids.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect();
        ClassIndex { ids, pos }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn get(&self, id: &ClassId) -> Option<usize> {
        self.pos.get(id).copied()
    }

    pub fn id(&self, i: usize) -> &ClassId {
        &self.ids[i]
    }

    pub fn ids(&self) -> &[ClassId] {
        &self.ids
    }
}

/// Multi-label counts of one model; present only when annotations carry a
/// multi-label map. Samples with an empty label set are left out entirely.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MultilabelCounts {
    /// Samples of class k (by original label) with a non-empty label set.
    pub support: Vec<u64>,
    /// ... of which the prediction falls inside the label set.
    pub correct: Vec<u64>,
    pub false_positives: Vec<u64>,
    pub false_negatives: Vec<u64>,
}

/// Counts for a single trained model, i.e. one (strength, seed) cell.
#[derive(Clone, Debug, PartialEq)]
pub struct SeedTable {
    pub strength: Strength,
    pub seed: u64,
    /// |X_k|: evaluated samples whose original label is k.
    pub support: Vec<u64>,
    /// Samples of class k predicted as k.
    pub correct: Vec<u64>,
    /// Off-diagonal confusion counts, (true, predicted) -> count.
    pub confusions: BTreeMap<(usize, usize), u64>,
    /// Samples predicted as k whose original label is not k.
    pub false_positives: Vec<u64>,
    pub multilabel: Option<MultilabelCounts>,
}

impl SeedTable {
    fn new(strength: Strength, seed: u64, n: usize, multilabel: bool) -> Self {
        SeedTable {
            strength,
            seed,
            support: vec![0; n],
            correct: vec![0; n],
            confusions: BTreeMap::new(),
            false_positives: vec![0; n],
            multilabel: multilabel.then(|| MultilabelCounts {
                support: vec![0; n],
                correct: vec![0; n],
                false_positives: vec![0; n],
                false_negatives: vec![0; n],
            }),
        }
    }

    /// Per-class accuracy; `None` when the class has no scorable samples.
    pub fn accuracy(&self, k: usize, mode: LabelMode) -> Option<f64> {
        let (correct, support) = match mode {
            LabelMode::Original => (self.correct[k], self.support[k]),
            LabelMode::Multilabel => {
                let ml = self.multilabel.as_ref()?;
                (ml.correct[k], ml.support[k])
            }
        };
        (support > 0).then(|| correct as f64 / support as f64)
    }

    pub fn false_positives(&self, k: usize, mode: LabelMode) -> Option<u64> {
        match mode {
            LabelMode::Original => Some(self.false_positives[k]),
            LabelMode::Multilabel => self.multilabel.as_ref().map(|m| m.false_positives[k]),
        }
    }

    pub fn false_negatives(&self, k: usize, mode: LabelMode) -> Option<u64> {
        match mode {
            LabelMode::Original => Some(self.support[k] - self.correct[k]),
            LabelMode::Multilabel => self.multilabel.as_ref().map(|m| m.false_negatives[k]),
        }
    }

    pub fn confusion_count(&self, from: usize, to: usize) -> u64 {
        if from == to {
            self.correct[from]
        } else {
            self.confusions.get(&(from, to)).copied().unwrap_or(0)
        }
    }

    /// Fraction of class-`from` samples predicted as `to`.
    pub fn confusion_rate(&self, from: usize, to: usize) -> Option<f64> {
        let n = self.support[from];
        (n > 0).then(|| self.confusion_count(from, to) as f64 / n as f64)
    }
}

/// Every [`SeedTable`] of a log, ordered by (strength, seed).
#[derive(Clone, Debug)]
pub struct Tally {
    pub classes: ClassIndex,
    pub strengths: Vec<Strength>,
    pub tables: Vec<SeedTable>,
}

impl Tally {
    /// Tables at one strength, in seed order.
    pub fn at(&self, strength: Strength) -> impl Iterator<Item = &SeedTable> {
        self.tables.iter().filter(move |t| t.strength == strength)
    }

    pub fn has_multilabel(&self) -> bool {
        self.tables.first().is_some_and(|t| t.multilabel.is_some())
    }
}

/// Counts every record of `log` against `ann`.
///
/// Fails on samples without an original label and on predictions outside
/// the annotation's class universe.
pub fn tally(log: &PredictionLog, ann: &AnnotationSet) -> Result<Tally> {
    let classes = ClassIndex::new(ann.classes());
    let n = classes.len();
    let with_ml = ann.multilabel().is_some();
    let mut tables: BTreeMap<(Strength, u64), SeedTable> = BTreeMap::new();

    for (line, r) in log.records().iter().enumerate() {
        let truth = ann.label_of(&r.sample).ok_or_else(|| {
            Error::Input(format!("record {}: sample `{}` has no annotation", line + 1, r.sample))
        })?;
        let k = classes.get(truth).expect("original labels are part of the universe");
        let pred = classes.get(&r.pred).ok_or_else(|| {
            Error::Input(format!(
                "record {}: predicted class `{}` is not in the class universe",
                line + 1,
                r.pred
            ))
        })?;

        let t = tables
            .entry((r.strength, r.seed))
            .or_insert_with(|| SeedTable::new(r.strength, r.seed, n, with_ml));
        t.support[k] += 1;
        if pred == k {
            t.correct[k] += 1;
        } else {
            *t.confusions.entry((k, pred)).or_insert(0) += 1;
            t.false_positives[pred] += 1;
        }

        if let Some(ml) = t.multilabel.as_mut() {
            let labels = match ann.labels_of(&r.sample).flatten() {
                Some(set) if !set.is_empty() => set,
                _ => continue,
            };
            ml.support[k] += 1;
            let hit = labels.contains(&r.pred);
            if hit {
                ml.correct[k] += 1;
            } else {
                ml.false_positives[pred] += 1;
                for label in labels {
                    if let Some(j) = classes.get(label) {
                        ml.false_negatives[j] += 1;
                    }
                }
            }
        }
    }

    let strengths = log.strengths();
    Ok(Tally {
        classes,
        strengths,
        tables: tables.into_values().collect(),
    })
}
