use std::collections::{BTreeMap, BTreeSet};

use crate::data::AnnotationSet;
use crate::error::{Error, Result};
use crate::types::ClassId;

/// Inverted multi-label index: class -> samples whose label set contains it.
#[derive(Clone, Debug)]
pub struct LabelOverlap<'a> {
    carriers: BTreeMap<&'a ClassId, BTreeSet<&'a str>>,
}

impl<'a> LabelOverlap<'a> {
    pub fn new(ann: &'a AnnotationSet) -> Result<Self> {
        let ml = ann
            .multilabel()
            .ok_or_else(|| Error::Input("label overlap needs multi-label annotations".into()))?;
        let mut carriers: BTreeMap<&ClassId, BTreeSet<&str>> = BTreeMap::new();
        for (sample, labels) in ml {
            for l in labels {
                carriers.entry(l).or_default().insert(sample.as_str());
            }
        }
        Ok(LabelOverlap { carriers })
    }

    fn count(&self, k: &ClassId) -> usize {
        self.carriers.get(k).map_or(0, BTreeSet::len)
    }

    fn joint(&self, k: &ClassId, l: &ClassId) -> usize {
        match (self.carriers.get(k), self.carriers.get(l)) {
            (Some(a), Some(b)) => a.intersection(b).count(),
            _ => 0,
        }
    }

    /// Fraction of samples labelled `k` that are also labelled `l`.
    pub fn co_occurrence(&self, k: &ClassId, l: &ClassId) -> Option<f64> {
        let n = self.count(k);
        (n > 0).then(|| self.joint(k, l) as f64 / n as f64)
    }

    pub fn iou(&self, k: &ClassId, l: &ClassId) -> Option<f64> {
        let both = self.joint(k, l);
        let either = self.count(k) + self.count(l) - both;
        (either > 0).then(|| both as f64 / either as f64)
    }
}

/// C_kl over the multi-label sets of `ann`; `None` when no sample carries `k`.
pub fn co_occurrence(ann: &AnnotationSet, k: &ClassId, l: &ClassId) -> Result<Option<f64>> {
    Ok(LabelOverlap::new(ann)?.co_occurrence(k, l))
}

/// Intersection over union of the samples carrying `k` and `l`.
pub fn iou(ann: &AnnotationSet, k: &ClassId, l: &ClassId) -> Result<Option<f64>> {
    Ok(LabelOverlap::new(ann)?.iou(k, l))
}
