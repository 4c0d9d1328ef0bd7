//! Prediction logs and annotation sets, the two inputs every analysis starts from.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{ClassId, Strength};

/// One model prediction on one validation sample.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub run: String,
    #[serde(rename = "s")]
    pub strength: Strength,
    pub seed: u64,
    pub sample: String,
    pub pred: ClassId,
}

/// All predictions of a strength sweep, keyed by (strength, seed, sample).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PredictionLog {
    records: Vec<PredictionRecord>,
}

impl PredictionLog {
    /// Builds a log, rejecting any repeated (strength, seed, sample) triple.
    pub fn new(records: Vec<PredictionRecord>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(records.len());
        for (i, r) in records.iter().enumerate() {
            if !seen.insert((r.strength, r.seed, r.sample.as_str())) {
                return Err(Error::Input(format!(
                    "record {} repeats (s={}, seed={}, sample={})",
                    i + 1,
                    r.strength,
                    r.seed,
                    r.sample
                )));
            }
        }
        Ok(PredictionLog { records })
    }

    pub fn records(&self) -> &[PredictionRecord] {
        &self.records
    }

    pub fn into_records(self) -> Vec<PredictionRecord> {
        self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Strength grid, ascending (strongest first).
    pub fn strengths(&self) -> Vec<Strength> {
        let set: BTreeSet<Strength> = self.records.iter().map(|r| r.strength).collect();
        set.into_iter().collect()
    }

    /// The strongest augmentation present, i.e. the smallest strength value.
    pub fn strongest(&self) -> Option<Strength> {
        self.records.iter().map(|r| r.strength).min()
    }

    /// Seeds evaluated at each strength.
    pub fn seeds(&self) -> BTreeMap<Strength, BTreeSet<u64>> {
        let mut out: BTreeMap<Strength, BTreeSet<u64>> = BTreeMap::new();
        for r in &self.records {
            out.entry(r.strength).or_default().insert(r.seed);
        }
        out
    }
}

/// Original single labels plus optional multi-label sets and training counts.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct AnnotationSet {
    classes: BTreeSet<ClassId>,
    original: BTreeMap<String, ClassId>,
    multilabel: Option<BTreeMap<String, BTreeSet<ClassId>>>,
    train_counts: Option<BTreeMap<ClassId, u64>>,
}

impl AnnotationSet {
    /// The class universe is the union of every class mentioned in any of
    /// the three maps; [`AnnotationSet::declare_classes`] can extend it.
    pub fn new(
        original: BTreeMap<String, ClassId>,
        multilabel: Option<BTreeMap<String, BTreeSet<ClassId>>>,
        train_counts: Option<BTreeMap<ClassId, u64>>,
    ) -> Result<Self> {
        if let Some(ml) = &multilabel {
            if let Some(sample) = ml.keys().find(|s| !original.contains_key(*s)) {
                return Err(Error::Input(format!(
                    "sample `{sample}` has multi-label annotations but no original label"
                )));
            }
        }
        let mut classes: BTreeSet<ClassId> = original.values().cloned().collect();
        if let Some(ml) = &multilabel {
            classes.extend(ml.values().flatten().cloned());
        }
        if let Some(tc) = &train_counts {
            classes.extend(tc.keys().cloned());
        }
        Ok(AnnotationSet {
            classes,
            original,
            multilabel,
            train_counts,
        })
    }

    pub fn declare_classes<I: IntoIterator<Item = ClassId>>(&mut self, classes: I) {
        self.classes.extend(classes);
    }

    pub fn classes(&self) -> &BTreeSet<ClassId> {
        &self.classes
    }

    pub fn original(&self) -> &BTreeMap<String, ClassId> {
        &self.original
    }

    pub fn multilabel(&self) -> Option<&BTreeMap<String, BTreeSet<ClassId>>> {
        self.multilabel.as_ref()
    }

    pub fn train_counts(&self) -> Option<&BTreeMap<ClassId, u64>> {
        self.train_counts.as_ref()
    }

    pub fn label_of(&self, sample: &str) -> Option<&ClassId> {
        self.original.get(sample)
    }

    /// Multi-label set of a sample. Samples missing from the map have an
    /// empty set. `None` only when no multi-label map was supplied.
    pub fn labels_of(&self, sample: &str) -> Option<Option<&BTreeSet<ClassId>>> {
        self.multilabel.as_ref().map(|ml| ml.get(sample))
    }
}
