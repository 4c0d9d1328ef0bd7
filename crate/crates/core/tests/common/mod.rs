//! Random log generation and brute-force re-counting shared by the
//! integration tests.
#![allow(dead_code)]

pub mod labelled_pairs;

use std::collections::{BTreeMap, BTreeSet};

use augbias::metrics::{confusion_rates, evaluate, tally};
use augbias::{AnnotationSet, ClassId, LabelMode, PredictionLog, PredictionRecord, Strength};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const GRID: [f64; 6] = [8.0, 25.0, 40.0, 60.0, 70.0, 100.0];
pub const TOL: f64 = 1e-12;

pub struct Case {
    pub log: PredictionLog,
    pub ann: AnnotationSet,
}

pub fn class(i: usize) -> ClassId {
    ClassId::new(format!("c{i:02}"))
}

/// A log with at most 20 classes, 500 samples, 4 strengths and 3 seeds per
/// strength. Some classes have no samples, some samples lack a multi-label
/// set or have an empty one, and each run sees a random subset of samples.
pub fn random_case(seed: u64) -> Case {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_classes = rng.random_range(1..=20);
    let n_samples = rng.random_range(1..=500);
    let with_ml = rng.random_bool(0.8);

    let mut original = BTreeMap::new();
    let mut multi = BTreeMap::new();
    for i in 0..n_samples {
        let id = format!("x{i:03}");
        let k = rng.random_range(0..n_classes);
        original.insert(id.clone(), class(k));
        if with_ml && !rng.random_bool(0.1) {
            let mut set = BTreeSet::new();
            if rng.random_bool(0.85) {
                set.insert(class(k));
            }
            while rng.random_bool(0.3) {
                set.insert(class(rng.random_range(0..n_classes)));
            }
            multi.insert(id, set);
        }
    }
    let mut ann = AnnotationSet::new(original, with_ml.then_some(multi), None).unwrap();
    ann.declare_classes((0..n_classes).map(class));

    let n_strengths = rng.random_range(1..=4);
    let strengths: Vec<f64> = sample(&mut rng, GRID.len(), n_strengths).into_iter().map(|i| GRID[i]).collect();
    let samples: Vec<(String, ClassId)> = ann.original().iter().map(|(s, c)| (s.clone(), c.clone())).collect();
    let mut records = Vec::new();
    for &s in &strengths {
        let n_seeds = rng.random_range(1..=3);
        for seed in sample(&mut rng, 10, n_seeds) {
            let skill = rng.random_range(0.0..1.0);
            let coverage = rng.random_range(0.3..=1.0);
            for (id, truth) in &samples {
                if !rng.random_bool(coverage) {
                    continue;
                }
                let pred = if rng.random_bool(skill) {
                    truth.clone()
                } else {
                    class(rng.random_range(0..n_classes))
                };
                records.push(PredictionRecord {
                    run: format!("s{s}-{seed}"),
                    strength: Strength::new(s).unwrap(),
                    seed: seed as u64,
                    sample: id.clone(),
                    pred,
                });
            }
        }
    }
    Case {
        log: PredictionLog::new(records).unwrap(),
        ann,
    }
}

/// Raw counts of one (strength, seed) cell for one class.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CellCounts {
    pub support: u64,
    pub correct: u64,
    pub fp: u64,
    pub fn_: u64,
    pub ml_support: u64,
    pub ml_correct: u64,
    pub ml_fp: u64,
    pub ml_fn: u64,
}

fn ml_set<'a>(ann: &'a AnnotationSet, sample: &str) -> Option<&'a BTreeSet<ClassId>> {
    ann.multilabel()?.get(sample).filter(|s| !s.is_empty())
}

fn cell(log: &PredictionLog, s: Strength, seed: u64) -> impl Iterator<Item = &PredictionRecord> {
    log.records().iter().filter(move |r| r.strength == s && r.seed == seed)
}

pub fn cells(log: &PredictionLog) -> Vec<(Strength, u64)> {
    let set: BTreeSet<(Strength, u64)> = log.records().iter().map(|r| (r.strength, r.seed)).collect();
    set.into_iter().collect()
}

pub fn count_cell(log: &PredictionLog, ann: &AnnotationSet, s: Strength, seed: u64, k: &ClassId) -> CellCounts {
    let mut c = CellCounts::default();
    for r in cell(log, s, seed) {
        let truth = ann.label_of(&r.sample).unwrap();
        if truth == k {
            c.support += 1;
            if &r.pred == k {
                c.correct += 1;
            } else {
                c.fn_ += 1;
            }
        } else if &r.pred == k {
            c.fp += 1;
        }
        if let Some(set) = ml_set(ann, &r.sample) {
            if truth == k {
                c.ml_support += 1;
                if set.contains(&r.pred) {
                    c.ml_correct += 1;
                }
            }
            if &r.pred == k && !set.contains(k) {
                c.ml_fp += 1;
            }
            if set.contains(k) && !set.contains(&r.pred) {
                c.ml_fn += 1;
            }
        }
    }
    c
}

pub fn count_confusion(log: &PredictionLog, ann: &AnnotationSet, s: Strength, seed: u64, k: &ClassId, l: &ClassId) -> u64 {
    cell(log, s, seed)
        .filter(|r| ann.label_of(&r.sample) == Some(k) && &r.pred == l)
        .count() as u64
}

fn mean(v: &[f64]) -> Option<f64> {
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

fn peak_drop(curve: &[Option<f64>]) -> Option<f64> {
    if curve.len() < 2 {
        return None;
    }
    let first = curve[0]?;
    let max = curve.iter().flatten().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    Some(max - first)
}

fn floor_rise(curve: &[Option<f64>]) -> Option<f64> {
    if curve.len() < 2 {
        return None;
    }
    let first = curve[0]?;
    let min = curve.iter().flatten().fold(f64::INFINITY, |a, &b| a.min(b));
    Some(first - min)
}

fn close(a: Option<f64>, b: Option<f64>) -> bool {
    match (a, b) {
        (None, None) => true,
        (Some(x), Some(y)) => (x - y).abs() <= TOL,
        _ => false,
    }
}

/// Compares every metric of the library against a re-count from raw
/// records. Returns the first mismatch.
pub fn check_against_oracle(case: &Case) -> Result<(), String> {
    let Case { log, ann } = case;
    let curves = evaluate(log, ann).map_err(|e| e.to_string())?;
    let conf = confusion_rates(log, ann).map_err(|e| e.to_string())?;
    let t = tally(log, ann).map_err(|e| e.to_string())?;
    let classes: Vec<ClassId> = ann.classes().iter().cloned().collect();
    let strengths: Vec<Strength> = log.records().iter().map(|r| r.strength).collect::<BTreeSet<_>>().into_iter().collect();
    let seeds_at = |s: Strength| -> Vec<u64> {
        log.records().iter().filter(|r| r.strength == s).map(|r| r.seed).collect::<BTreeSet<_>>().into_iter().collect()
    };
    let has_ml = ann.multilabel().is_some();

    if curves.strengths != strengths {
        return Err(format!("strength grid {:?} != {:?}", curves.strengths, strengths));
    }
    if curves.classes.len() != classes.len() {
        return Err("class count differs".into());
    }

    // Per-seed integer counts.
    for table in &t.tables {
        for (i, k) in classes.iter().enumerate() {
            let want = count_cell(log, ann, table.strength, table.seed, k);
            let got = CellCounts {
                support: table.support[i],
                correct: table.correct[i],
                fp: table.false_positives(i, LabelMode::Original).unwrap(),
                fn_: table.false_negatives(i, LabelMode::Original).unwrap(),
                ml_support: table.multilabel.as_ref().map_or(0, |m| m.support[i]),
                ml_correct: table.multilabel.as_ref().map_or(0, |m| m.correct[i]),
                ml_fp: table.false_positives(i, LabelMode::Multilabel).unwrap_or(0),
                ml_fn: table.false_negatives(i, LabelMode::Multilabel).unwrap_or(0),
            };
            if got != want {
                return Err(format!("counts of {k} at {}/{}: {got:?} != {want:?}", table.strength, table.seed));
            }
            for (j, l) in classes.iter().enumerate() {
                let want = count_confusion(log, ann, table.strength, table.seed, k, l);
                if table.confusion_count(i, j) != want {
                    return Err(format!("confusion {k}->{l} at {}/{}", table.strength, table.seed));
                }
            }
        }
    }

    // Seed means and deltas.
    for (k, cc) in classes.iter().zip(&curves.classes) {
        if &cc.class != k {
            return Err(format!("class order: {} != {k}", cc.class));
        }
        let mut acc = Vec::new();
        let mut acc_ml = Vec::new();
        let mut fp = Vec::new();
        let mut fp_ml = Vec::new();
        for (si, &s) in strengths.iter().enumerate() {
            let counts: Vec<CellCounts> = seeds_at(s).into_iter().map(|seed| count_cell(log, ann, s, seed, k)).collect();
            let a: Vec<f64> = counts.iter().filter(|c| c.support > 0).map(|c| c.correct as f64 / c.support as f64).collect();
            let a_ml: Vec<f64> = counts
                .iter()
                .filter(|c| c.ml_support > 0)
                .map(|c| c.ml_correct as f64 / c.ml_support as f64)
                .collect();
            let avg = |f: fn(&CellCounts) -> u64| mean(&counts.iter().map(|c| f(c) as f64).collect::<Vec<_>>()).unwrap();
            let p = &cc.points[si];
            let a_mean = mean(&a);
            let a_ml_mean = if has_ml { mean(&a_ml) } else { None };
            if !close(p.accuracy(LabelMode::Original), a_mean) {
                return Err(format!("acc {k}@{s}: {:?} != {a_mean:?}", p.accuracy(LabelMode::Original)));
            }
            if !close(p.accuracy(LabelMode::Multilabel), a_ml_mean) {
                return Err(format!("ReaL acc {k}@{s}"));
            }
            let checks = [
                (p.false_positives(LabelMode::Original), Some(avg(|c| c.fp)), "FP"),
                (p.false_negatives(LabelMode::Original), Some(avg(|c| c.fn_)), "FN"),
                (p.false_positives(LabelMode::Multilabel), has_ml.then(|| avg(|c| c.ml_fp)), "FP real"),
                (p.false_negatives(LabelMode::Multilabel), has_ml.then(|| avg(|c| c.ml_fn)), "FN real"),
            ];
            for (got, want, what) in checks {
                if !close(got, want) {
                    return Err(format!("{what} {k}@{s}: {got:?} != {want:?}"));
                }
            }
            acc.push(a_mean);
            acc_ml.push(a_ml_mean);
            fp.push(Some(avg(|c| c.fp)));
            fp_ml.push(has_ml.then(|| avg(|c| c.ml_fp)));
        }
        let deltas = [
            (cc.delta_acc(LabelMode::Original), peak_drop(&acc), "Δa"),
            (cc.delta_acc(LabelMode::Multilabel), peak_drop(&acc_ml), "Δa real"),
            (cc.delta_fp(LabelMode::Original), floor_rise(&fp), "ΔFP"),
            (cc.delta_fp(LabelMode::Multilabel), floor_rise(&fp_ml), "ΔFP real"),
        ];
        for (got, want, what) in deltas {
            if !close(got, want) {
                return Err(format!("{what} {k}: {got:?} != {want:?}"));
            }
        }
    }

    // Confusion-rate curves of every ordered pair.
    let cr_curve = |k: &ClassId, l: &ClassId| -> Vec<Option<f64>> {
        strengths
            .iter()
            .map(|&s| {
                let rates: Vec<f64> = seeds_at(s)
                    .into_iter()
                    .filter_map(|seed| {
                        let n = count_cell(log, ann, s, seed, k).support;
                        (n > 0).then(|| count_confusion(log, ann, s, seed, k, l) as f64 / n as f64)
                    })
                    .collect();
                mean(&rates)
            })
            .collect()
    };
    let confused = |k: &ClassId, l: &ClassId| {
        log.records()
            .iter()
            .any(|r| ann.label_of(&r.sample) == Some(k) && &r.pred == l)
    };
    let mut expected_pairs = 0;
    for k in &classes {
        for l in &classes {
            if k == l {
                continue;
            }
            let active = confused(k, l) || confused(l, k);
            match (active, conf.pair(k, l)) {
                (false, None) => {}
                (false, Some(_)) => return Err(format!("unexpected pair {k}->{l}")),
                (true, None) => return Err(format!("missing pair {k}->{l}")),
                (true, Some(p)) => {
                    expected_pairs += 1;
                    let cr = cr_curve(k, l);
                    let back = cr_curve(l, k);
                    if cr.len() != p.cr.len() || cr.iter().zip(&p.cr).any(|(a, b)| !close(*a, *b)) {
                        return Err(format!("CR {k}->{l}: {:?} != {cr:?}", p.cr));
                    }
                    let deltas = [
                        (p.delta_cr, floor_rise(&cr), "ΔCR"),
                        (p.delta_cr_star, peak_drop(&cr), "ΔCR*"),
                        (p.reverse_delta_cr_star, peak_drop(&back), "reverse ΔCR*"),
                    ];
                    for (got, want, what) in deltas {
                        if !close(got, want) {
                            return Err(format!("{what} {k}->{l}: {got:?} != {want:?}"));
                        }
                    }
                }
            }
        }
    }
    if expected_pairs != conf.pairs.len() {
        return Err("pair list has extra entries".into());
    }
    Ok(())
}

/// FN = |X_k|(1 - a_k) and Σ_{l≠k} CR_{k→l} = 1 - a_k in every cell.
pub fn check_identities(case: &Case) -> Result<(), String> {
    let t = tally(&case.log, &case.ann).map_err(|e| e.to_string())?;
    let n = t.classes.len();
    for table in &t.tables {
        for k in 0..n {
            let Some(a) = table.accuracy(k, LabelMode::Original) else {
                continue;
            };
            let support = table.support[k];
            let fn_ = table.false_negatives(k, LabelMode::Original).unwrap();
            if fn_ + table.correct[k] != support {
                return Err(format!("FN count identity fails for class {k}"));
            }
            if (fn_ as f64 - support as f64 * (1.0 - a)).abs() > 1e-9 {
                return Err(format!("FN rate identity fails for class {k}"));
            }
            let off: u64 = (0..n).filter(|&l| l != k).map(|l| table.confusion_count(k, l)).sum();
            if off != support - table.correct[k] {
                return Err(format!("confusion count identity fails for class {k}"));
            }
            let rates: f64 = (0..n)
                .filter(|&l| l != k)
                .map(|l| table.confusion_rate(k, l).unwrap())
                .sum();
            if (rates - (1.0 - a)).abs() > 1e-12 {
                return Err(format!("CR sum {rates} != 1 - {a} for class {k}"));
            }
        }
    }
    Ok(())
}

/// Structural equality of two serialisable values with numbers compared to
/// within [`TOL`].
pub fn approx_eq<T: serde::Serialize>(a: &T, b: &T) -> bool {
    fn walk(a: &serde_json::Value, b: &serde_json::Value) -> bool {
        use serde_json::Value::*;
        match (a, b) {
            (Number(x), Number(y)) => (x.as_f64().unwrap() - y.as_f64().unwrap()).abs() <= TOL,
            (Array(x), Array(y)) => x.len() == y.len() && x.iter().zip(y).all(|(x, y)| walk(x, y)),
            (Object(x), Object(y)) => x.len() == y.len() && x.iter().all(|(k, v)| y.get(k).is_some_and(|w| walk(v, w))),
            _ => a == b,
        }
    }
    walk(&serde_json::to_value(a).unwrap(), &serde_json::to_value(b).unwrap())
}

/// Curves with small integer FP/FN counts so that ties in ΔFP and in
/// FP + FN are frequent.
pub fn random_curves(seed: u64) -> augbias::metrics::MetricCurves {
    use augbias::metrics::{ClassCurve, CurvePoint, MetricCurves};
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_grid = rng.random_range(2..=GRID.len());
    let mut grid: Vec<f64> = sample(&mut rng, GRID.len(), n_grid).into_iter().map(|i| GRID[i]).collect();
    grid.sort_by(f64::total_cmp);
    let strengths: Vec<Strength> = grid.iter().map(|&p| Strength::new(p).unwrap()).collect();
    let n_classes = rng.random_range(1..=15);
    let classes = (0..n_classes)
        .map(|k| {
            let fp: Vec<f64> = strengths.iter().map(|_| rng.random_range(0..5) as f64).collect();
            let fn_: Vec<f64> = strengths.iter().map(|_| rng.random_range(0..5) as f64).collect();
            let floor = fp.iter().copied().fold(f64::INFINITY, f64::min);
            ClassCurve {
                class: class(k),
                points: strengths
                    .iter()
                    .enumerate()
                    .map(|(i, &s)| CurvePoint {
                        strength: s,
                        seeds: 1,
                        acc_original: None,
                        acc_real: None,
                        fp_original: fp[i],
                        fn_original: fn_[i],
                        fp_real: None,
                        fn_real: None,
                    })
                    .collect(),
                delta_acc_original: None,
                delta_acc_real: None,
                delta_fp_original: Some(fp[0] - floor),
                delta_fp_real: None,
            }
        })
        .collect();
    MetricCurves {
        strengths,
        multilabel: false,
        classes,
    }
}

/// Selection and overrides by exhaustive comparison: a class ranks before
/// another when its ΔFP is larger, or equal with a smaller id; s* is the
/// first grid point whose FP + FN no other point beats.
pub fn policy_oracle(
    curves: &augbias::metrics::MetricCurves,
    m: usize,
) -> (Vec<ClassId>, BTreeMap<ClassId, Option<Strength>>) {
    let dfp = |c: &augbias::metrics::ClassCurve| c.delta_fp(LabelMode::Original).unwrap();
    let mut selected = Vec::new();
    let mut left: Vec<&augbias::metrics::ClassCurve> = curves.classes.iter().collect();
    while selected.len() < m {
        let best = left
            .iter()
            .copied()
            .find(|a| left.iter().all(|b| dfp(a) > dfp(b) || (dfp(a) == dfp(b) && a.class <= b.class)))
            .unwrap();
        selected.push(best.class.clone());
        left.retain(|c| c.class != best.class);
    }
    let mut overrides = BTreeMap::new();
    for id in &selected {
        let c = curves.class(id).unwrap();
        let total = |i: usize| c.points[i].fp_original + c.points[i].fn_original;
        let n = c.points.len();
        let star = (0..n).find(|&i| (0..n).all(|j| total(i) <= total(j))).unwrap();
        if star != 0 {
            overrides.insert(id.clone(), Some(curves.strengths[star]));
        }
    }
    (selected, overrides)
}
