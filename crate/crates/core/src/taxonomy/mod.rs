//! Overlap and semantic-similarity scores for confused class pairs, and the
//! four-way confusion categories built from them.

mod embedding;
mod overlap;
mod tree;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use embedding::{cosine, EmbeddingTable};
pub use overlap::{co_occurrence, iou, LabelOverlap};
pub use tree::{TaxonomyTree, VIRTUAL_ROOT};

use crate::data::AnnotationSet;
use crate::error::{Error, Result};
use crate::metrics::{affected_classes, ConfusionCurves, MetricCurves, Selector};
use crate::types::{ClassId, LabelMode};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Ambiguous,
    CoOccurring,
    FineGrained,
    Unrelated,
}

impl Category {
    pub const ALL: [Category; 4] = [
        Category::Ambiguous,
        Category::CoOccurring,
        Category::FineGrained,
        Category::Unrelated,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Category::Ambiguous => "ambiguous",
            Category::CoOccurring => "co_occurring",
            Category::FineGrained => "fine_grained",
            Category::Unrelated => "unrelated",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            Category::Ambiguous => "Ambiguous",
            Category::CoOccurring => "Co-occurring",
            Category::FineGrained => "Fine-grained",
            Category::Unrelated => "Semantically unrelated",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CategoryThresholds {
    pub t_c: f64,
    pub t_iou: f64,
    pub t_wn: f64,
    pub t_emb: f64,
}

impl Default for CategoryThresholds {
    fn default() -> Self {
        CategoryThresholds {
            t_c: 0.3,
            t_iou: 0.15,
            t_wn: 0.8,
            t_emb: 0.35,
        }
    }
}

/// Scores of an ordered pair (k, l). Any score may be missing.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PairScores {
    pub c_kl: Option<f64>,
    pub iou: Option<f64>,
    pub wn_sim: Option<f64>,
    pub embed_sim: Option<f64>,
}

/// Overlap is high when either overlap score reaches its threshold, semantic
/// similarity when either similarity does. Needs at least one score of each
/// kind.
pub fn categorize_pair(scores: &PairScores, t: &CategoryThresholds) -> Result<Category> {
    if scores.c_kl.is_none() && scores.iou.is_none() {
        return Err(Error::Undefined("no label-overlap score for the pair".into()));
    }
    if scores.wn_sim.is_none() && scores.embed_sim.is_none() {
        return Err(Error::Undefined("no semantic-similarity score for the pair".into()));
    }
    let reaches = |v: Option<f64>, th: f64| v.is_some_and(|v| v >= th);
    let overlap = reaches(scores.c_kl, t.t_c) || reaches(scores.iou, t.t_iou);
    let sem = reaches(scores.wn_sim, t.t_wn) || reaches(scores.embed_sim, t.t_emb);
    Ok(match (overlap, sem) {
        (true, true) => Category::Ambiguous,
        (true, false) => Category::CoOccurring,
        (false, true) => Category::FineGrained,
        (false, false) => Category::Unrelated,
    })
}

/// Settings of [`confusion_report`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ReportConfig {
    pub affected_original: Selector,
    /// Ignored when the annotations have no multi-label map.
    pub affected_real: Selector,
    /// Classes under this taxonomy node are left out of the report.
    pub exclude_subtree: Option<String>,
    pub min_delta_cr: f64,
    pub thresholds: CategoryThresholds,
}

impl Default for ReportConfig {
    fn default() -> Self {
        ReportConfig {
            affected_original: Selector::MinDrop(0.05),
            affected_real: Selector::MinDrop(0.04),
            exclude_subtree: None,
            min_delta_cr: 0.025,
            thresholds: CategoryThresholds::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartnerRow {
    pub partner: ClassId,
    /// ΔCR of class -> partner.
    pub delta_cr: f64,
    /// ΔCR* of partner -> class.
    pub delta_cr_star: Option<f64>,
    pub scores: PairScores,
    pub category: Option<Category>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportEntry {
    pub class: ClassId,
    pub delta_acc_original: Option<f64>,
    pub delta_acc_real: Option<f64>,
    pub partners: Vec<PartnerRow>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CategoryCounts {
    pub ambiguous: usize,
    pub co_occurring: usize,
    pub fine_grained: usize,
    pub unrelated: usize,
    /// Pairs lacking the scores needed for a category.
    pub uncategorized: usize,
}

impl CategoryCounts {
    pub fn get(&self, c: Category) -> usize {
        match c {
            Category::Ambiguous => self.ambiguous,
            Category::CoOccurring => self.co_occurring,
            Category::FineGrained => self.fine_grained,
            Category::Unrelated => self.unrelated,
        }
    }

    fn bump(&mut self, c: Option<Category>) {
        match c {
            Some(Category::Ambiguous) => self.ambiguous += 1,
            Some(Category::CoOccurring) => self.co_occurring += 1,
            Some(Category::FineGrained) => self.fine_grained += 1,
            Some(Category::Unrelated) => self.unrelated += 1,
            None => self.uncategorized += 1,
        }
    }

    pub fn categorized(&self) -> usize {
        self.ambiguous + self.co_occurring + self.fine_grained + self.unrelated
    }

    /// Share of each category among categorized pairs.
    pub fn fraction(&self, c: Category) -> Option<f64> {
        let n = self.categorized();
        (n > 0).then(|| self.get(c) as f64 / n as f64)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfusionReport {
    pub config: ReportConfig,
    pub entries: Vec<ReportEntry>,
    pub distribution: CategoryCounts,
}

impl ConfusionReport {
    pub fn rows(&self) -> impl Iterator<Item = (&ReportEntry, &PartnerRow)> {
        self.entries.iter().flat_map(|e| e.partners.iter().map(move |p| (e, p)))
    }
}

/// Lists, for every affected class, the partners it is increasingly
/// confused with, along with the pair scores and category.
///
/// Affected classes are the union of the original-label and (when present)
/// multi-label selections. Overlap scores need a multi-label map; without a
/// tree or embedding table the matching similarity is left out.
pub fn confusion_report(
    conf: &ConfusionCurves,
    metrics: &MetricCurves,
    ann: &AnnotationSet,
    tree: Option<&TaxonomyTree>,
    table: Option<&EmbeddingTable>,
    config: &ReportConfig,
) -> Result<ConfusionReport> {
    let mut affected = affected_classes(metrics, config.affected_original, LabelMode::Original)?;
    if metrics.multilabel {
        for c in affected_classes(metrics, config.affected_real, LabelMode::Multilabel)? {
            if !affected.contains(&c) {
                affected.push(c);
            }
        }
    }
    if let Some(node) = &config.exclude_subtree {
        let tree = tree.ok_or_else(|| Error::InvalidParam("excluding a subtree needs a taxonomy".into()))?;
        let excluded = tree.subtree_members(node)?;
        affected.retain(|c| !excluded.contains(c.as_str()));
    }

    let overlap = ann.multilabel().map(|_| LabelOverlap::new(ann)).transpose()?;
    let mut distribution = CategoryCounts::default();
    let mut entries = Vec::with_capacity(affected.len());
    for class in affected {
        let curve = metrics
            .class(&class)
            .ok_or_else(|| Error::Input(format!("class `{class}` missing from metric curves")))?;
        let mut partners = Vec::new();
        for pair in conf.partners_of(&class, config.min_delta_cr) {
            let l = &pair.to;
            let scores = PairScores {
                c_kl: overlap.as_ref().and_then(|o| o.co_occurrence(&class, l)),
                iou: overlap.as_ref().and_then(|o| o.iou(&class, l)),
                wn_sim: tree.map(|t| t.wu_palmer(class.as_str(), l.as_str())).transpose()?,
                embed_sim: match table {
                    Some(t) => t.similarity(class.as_str(), l.as_str())?,
                    None => None,
                },
            };
            let category = categorize_pair(&scores, &config.thresholds).ok();
            distribution.bump(category);
            partners.push(PartnerRow {
                partner: l.clone(),
                delta_cr: pair.delta_cr.unwrap_or(0.0),
                delta_cr_star: pair.reverse_delta_cr_star,
                scores,
                category,
            });
        }
        entries.push(ReportEntry {
            class,
            delta_acc_original: curve.delta_acc_original,
            delta_acc_real: curve.delta_acc_real,
            partners,
        });
    }
    Ok(ConfusionReport {
        config: config.clone(),
        entries,
        distribution,
    })
}
