use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dataset::{generate_dataset, prototypes, Dataset};
use super::train::train_classifier;
use super::SimConfig;
use crate::data::{AnnotationSet, PredictionLog, PredictionRecord};
use crate::error::Result;
use crate::metrics::{affected_classes, evaluate, Selector};
use crate::policy::{baseline_remove_augmentation, build_policy, AugPolicy, ClassAug};
use crate::taxonomy::{EmbeddingTable, TaxonomyTree};
use crate::types::{ClassId, LabelMode, Strength};

#[derive(Clone, Debug, PartialEq)]
pub struct SweepOutput {
    pub log: PredictionLog,
    pub annotations: AnnotationSet,
}

fn predict_all(config: &SimConfig, train: &Dataset, val: &Dataset, crops: &[f64], seed: u64) -> Result<Vec<usize>> {
    let model = train_classifier(train, crops, config, seed)?;
    Ok(val.samples.iter().map(|s| model.predict(&s.features)).collect())
}

fn annotations(config: &SimConfig, val: &Dataset) -> Result<AnnotationSet> {
    let names = config.class_ids();
    let original = val
        .samples
        .iter()
        .map(|s| (s.id.clone(), names[s.label].clone()))
        .collect();
    let multilabel = val
        .samples
        .iter()
        .map(|s| (s.id.clone(), s.labels.iter().map(|&j| names[j].clone()).collect()))
        .collect();
    let counts = (0..names.len())
        .map(|k| (names[k].clone(), config.train_count(k) as u64))
        .collect();
    AnnotationSet::new(original, Some(multilabel), Some(counts))
}

/// Trains one model per (strength, seed) with uniform augmentation and logs
/// its predictions on the validation set. Runs are independent and may
/// execute in parallel; the log is assembled in (strength, seed, sample)
/// order.
pub fn sweep(config: &SimConfig) -> Result<SweepOutput> {
    config.validate()?;
    let (train, val) = generate_dataset(config)?;
    let names = config.class_ids();
    let k = names.len();
    let jobs: Vec<(Strength, u64)> = config
        .grid
        .iter()
        .flat_map(|&s| (0..config.seeds as u64).map(move |seed| (s, seed)))
        .collect();
    let runs: Vec<Vec<PredictionRecord>> = jobs
        .par_iter()
        .map(|&(s, seed)| {
            let preds = predict_all(config, &train, &val, &vec![s.fraction(); k], seed)?;
            log::debug!("sweep run s={s} seed={seed} done");
            Ok(val
                .samples
                .iter()
                .zip(preds)
                .map(|(x, p)| PredictionRecord {
                    run: format!("sim-s{s}-seed{seed}"),
                    strength: s,
                    seed,
                    sample: x.id.clone(),
                    pred: names[p].clone(),
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    Ok(SweepOutput {
        log: PredictionLog::new(runs.into_iter().flatten().collect())?,
        annotations: annotations(config, &val)?,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InterventionRow {
    pub name: String,
    pub policy: AugPolicy,
    /// Seed-mean accuracy of each class.
    pub per_class: BTreeMap<ClassId, f64>,
    pub affected: f64,
    pub remaining: Option<f64>,
    pub overall: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InterventionTable {
    pub affected: Vec<ClassId>,
    pub rows: Vec<InterventionRow>,
}

impl InterventionTable {
    pub fn row(&self, name: &str) -> Option<&InterventionRow> {
        self.rows.iter().find(|r| r.name == name)
    }
}

fn mean(v: impl Iterator<Item = f64>) -> Option<f64> {
    let (n, s) = v.fold((0usize, 0.0), |(n, s), x| (n + 1, s + x));
    (n > 0).then(|| s / n as f64)
}

fn run_policy(
    config: &SimConfig,
    train: &Dataset,
    val: &Dataset,
    name: &str,
    policy: AugPolicy,
    affected: &[ClassId],
) -> Result<InterventionRow> {
    let names = config.class_ids();
    let universe: BTreeSet<&ClassId> = names.iter().collect();
    for c in policy.overrides.keys().filter(|c| !universe.contains(c)) {
        log::warn!("policy `{name}` overrides unknown class `{c}`");
    }
    let crops: Vec<f64> = names
        .iter()
        .map(|c| match policy.strength_for(c) {
            ClassAug::Strength(s) => s.fraction(),
            ClassAug::NoAugmentation => 1.0,
        })
        .collect();
    let per_seed: Vec<Vec<usize>> = (0..config.seeds as u64)
        .into_par_iter()
        .map(|seed| predict_all(config, train, val, &crops, seed))
        .collect::<Result<_>>()?;

    let mut per_class = BTreeMap::new();
    for (k, id) in names.iter().enumerate() {
        let accs = per_seed.iter().filter_map(|preds| {
            let (mut n, mut hit) = (0usize, 0usize);
            for (x, &p) in val.samples.iter().zip(preds) {
                if x.label == k {
                    n += 1;
                    hit += usize::from(p == k);
                }
            }
            (n > 0).then(|| hit as f64 / n as f64)
        });
        if let Some(a) = mean(accs) {
            per_class.insert(id.clone(), a);
        }
    }
    let group = |inside: bool| mean(per_class.iter().filter(|(c, _)| affected.contains(c) == inside).map(|(_, a)| *a));
    Ok(InterventionRow {
        name: name.to_string(),
        affected: group(true).unwrap_or(f64::NAN),
        remaining: group(false),
        overall: mean(per_class.values().copied()).unwrap_or(f64::NAN),
        per_class,
        policy,
    })
}

/// Retrains with three policies and compares them on the most affected
/// classes: uniform strongest augmentation, the removal baseline, and the
/// FP + FN policy (or `policy`, when given).
pub fn intervention_experiment(
    config: &SimConfig,
    sweep: &SweepOutput,
    policy: Option<&AugPolicy>,
) -> Result<InterventionTable> {
    config.validate()?;
    let curves = evaluate(&sweep.log, &sweep.annotations)?;
    let iv = &config.intervention;
    let affected = affected_classes(&curves, Selector::TopN(iv.affected), LabelMode::Original)?;
    let strongest = config.strongest();
    let fp_fn = match policy {
        Some(p) => p.clone(),
        None => build_policy(&curves, iv.m, iv.mode)?,
    };
    let (train, val) = generate_dataset(config)?;
    let candidates = [
        ("uniform", AugPolicy::uniform(strongest)),
        ("remove_augmentation", baseline_remove_augmentation(&affected, strongest)),
        ("fp_fn_policy", fp_fn),
    ];
    let rows = candidates
        .into_iter()
        .map(|(name, p)| run_policy(config, &train, &val, name, p, &affected))
        .collect::<Result<_>>()?;
    Ok(InterventionTable { affected, rows })
}

/// Class embedding = mean prototype of the class's defining blocks.
pub fn class_embeddings(config: &SimConfig) -> Result<EmbeddingTable> {
    let protos = prototypes(config);
    let vectors = config
        .classes
        .iter()
        .map(|c| {
            let defining: Vec<&Vec<f64>> = c
                .placements
                .iter()
                .filter(|p| p.presence >= 1.0)
                .map(|p| &protos[&p.block])
                .collect();
            let mut v = vec![0.0; config.block_dim];
            for p in &defining {
                v.iter_mut().zip(p.iter()).for_each(|(a, b)| *a += b);
            }
            let n = defining.len().max(1) as f64;
            v.iter_mut().for_each(|a| *a /= n);
            (c.name.to_string(), v)
        })
        .collect();
    EmbeddingTable::new(vectors)
}

/// Two-level taxonomy: classes sharing a defining block hang under a common
/// `shares-<block>` node, the rest directly under `object`.
pub fn class_taxonomy(config: &SimConfig) -> Result<TaxonomyTree> {
    let defining: Vec<BTreeSet<&str>> = config
        .classes
        .iter()
        .map(|c| {
            c.placements
                .iter()
                .filter(|p| p.presence >= 1.0)
                .map(|p| p.block.as_str())
                .collect()
        })
        .collect();
    let mut edges: Vec<(String, String)> = Vec::new();
    let mut groups = BTreeSet::new();
    for (i, c) in config.classes.iter().enumerate() {
        let shared = config.blocks.iter().find(|b| {
            defining[i].contains(b.as_str())
                && defining.iter().enumerate().any(|(j, d)| j != i && d.contains(b.as_str()))
        });
        let parent = match shared {
            Some(b) => {
                let g = format!("shares-{b}");
                groups.insert(g.clone());
                g
            }
            None => "object".to_string(),
        };
        edges.push((c.name.to_string(), parent));
    }
    edges.extend(groups.into_iter().map(|g| (g, "object".to_string())));
    TaxonomyTree::from_edges(&edges, Some("object"))
}
