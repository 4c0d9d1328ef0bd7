mod common;

use augbias::metrics::{accuracy_drop, evaluate};
use augbias::sim::{
    crop_mask, generate_dataset, intervention_experiment, sweep, train_classifier, Dataset, SimConfig,
};
use augbias::{ClassId, LabelMode, Strength};
use common::{check_against_oracle, check_identities, Case};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn small(mut cfg: SimConfig) -> SimConfig {
    cfg.train_per_class = 60;
    cfg.val_per_class = 30;
    cfg.seeds = 2;
    cfg.trainer.epochs = 20;
    cfg
}

fn grid(values: &[f64]) -> Vec<Strength> {
    values.iter().map(|&v| Strength::new(v).unwrap()).collect()
}

#[test]
fn one_by_one_sweep_logs_every_val_sample_once() {
    let mut cfg = small(SimConfig::canonical());
    cfg.grid = grid(&[40.0]);
    cfg.seeds = 1;
    let out = sweep(&cfg).unwrap();
    assert_eq!(out.log.len(), 3 * cfg.val_per_class);
    assert_eq!(out.annotations.original().len(), 3 * cfg.val_per_class);
}

#[test]
fn sweep_is_deterministic_and_consistent() {
    let cfg = small(SimConfig::canonical());
    let a = sweep(&cfg).unwrap();
    let b = sweep(&cfg).unwrap();
    assert_eq!(a, b);
    let case = Case {
        log: a.log,
        ann: a.annotations,
    };
    check_identities(&case).unwrap();
    check_against_oracle(&case).unwrap();
}

#[test]
fn crop_keeps_expected_share_of_canvas() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let l = 64;
    for s in [0.08, 0.4, 0.7] {
        let n = 20_000;
        let mut kept = 0.0;
        for _ in 0..n {
            let mut x = vec![1.0; l];
            crop_mask(&mut x, l, s, &mut rng).unwrap();
            let ones: Vec<usize> = (0..l).filter(|&i| x[i] == 1.0).collect();
            assert!(!ones.is_empty());
            // The kept slots form one contiguous window.
            assert_eq!(ones.last().unwrap() - ones[0] + 1, ones.len());
            kept += ones.len() as f64 / l as f64;
        }
        let mean = kept / n as f64;
        assert!((mean - (s + 1.0) / 2.0).abs() < 0.01, "s = {s}: mean kept share {mean}");
    }
    let mut x: Vec<f64> = (0..32).map(f64::from).collect();
    let before = x.clone();
    crop_mask(&mut x, 16, 1.0, &mut rng).unwrap();
    assert_eq!(x, before);
}

fn separable() -> SimConfig {
    let mut cfg = SimConfig::canonical();
    cfg.classes[0].placements.retain(|p| p.block == "A");
    cfg.classes[1].placements.retain(|p| p.block == "B");
    cfg.grid = grid(&[100.0]);
    cfg.seeds = 1;
    cfg
}

fn centroid_predictions(train: &Dataset, val: &Dataset, k: usize) -> Vec<usize> {
    let f = train.samples[0].features.len();
    let mut sums = vec![vec![0.0; f]; k];
    let mut counts = vec![0.0; k];
    for s in &train.samples {
        counts[s.label] += 1.0;
        for (a, b) in sums[s.label].iter_mut().zip(&s.features) {
            *a += b;
        }
    }
    val.samples
        .iter()
        .map(|s| {
            (0..k)
                .map(|c| {
                    let d: f64 = sums[c].iter().zip(&s.features).map(|(m, x)| (m / counts[c] - x).powi(2)).sum();
                    (c, d)
                })
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap()
                .0
        })
        .collect()
}

#[test]
fn separable_classes_match_nearest_centroid() {
    let cfg = separable();
    let (train, val) = generate_dataset(&cfg).unwrap();
    let model = train_classifier(&train, &[1.0, 1.0, 1.0], &cfg, 0).unwrap();
    assert!(model.accuracy(&val) >= 0.99, "accuracy {}", model.accuracy(&val));
    let oracle = centroid_predictions(&train, &val, 3);
    let agree = val
        .samples
        .iter()
        .zip(&oracle)
        .filter(|(s, &o)| model.predict(&s.features) == o)
        .count();
    assert!(agree as f64 / val.len() as f64 >= 0.99);
}

#[test]
fn training_diverges_loudly() {
    let mut cfg = separable();
    cfg.trainer.learning_rate = 1e306;
    cfg.noise_sigma = 50.0;
    let (train, _) = generate_dataset(&cfg).unwrap();
    let err = train_classifier(&train, &[1.0, 1.0, 1.0], &cfg, 0).unwrap_err();
    assert!(!err.is_validation());
}

#[test]
fn distractor_is_stable_across_root_seeds() {
    let mut accs = Vec::new();
    for root in 0..4 {
        let mut cfg = SimConfig::canonical();
        cfg.grid = grid(&[100.0]);
        cfg.root_seed = root;
        let out = sweep(&cfg).unwrap();
        let curves = evaluate(&out.log, &out.annotations).unwrap();
        let dist = curves.class(&ClassId::new("DIST")).unwrap();
        accs.push(dist.points[0].accuracy(LabelMode::Original).unwrap());
    }
    let spread = accs.iter().copied().fold(f64::MIN, f64::max) - accs.iter().copied().fold(f64::MAX, f64::min);
    assert!(spread < 0.03, "DIST accuracy {accs:?}");
}

fn drops_with_counts(whole: usize, part: usize) -> (f64, f64) {
    let mut cfg = SimConfig::canonical();
    cfg.classes[0].train = Some(whole);
    cfg.classes[1].train = Some(part);
    let out = sweep(&cfg).unwrap();
    let drops = accuracy_drop(&evaluate(&out.log, &out.annotations).unwrap()).unwrap();
    (
        drops[&ClassId::new("WHOLE")].original.unwrap(),
        drops[&ClassId::new("PART")].original.unwrap(),
    )
}

#[test]
fn scarce_class_of_confused_pair_degrades_more() {
    let (whole_scarce_w, whole_scarce_p) = drops_with_counts(50, 200);
    let (part_scarce_w, part_scarce_p) = drops_with_counts(200, 50);
    assert!(
        whole_scarce_w > part_scarce_w,
        "WHOLE drop: scarce {whole_scarce_w}, plentiful {part_scarce_w}"
    );
    assert!(
        part_scarce_p > whole_scarce_p,
        "PART drop: scarce {part_scarce_p}, plentiful {whole_scarce_p}"
    );
}

#[test]
fn zero_class_policy_equals_uniform() {
    let mut cfg = small(SimConfig::canonical());
    cfg.intervention.m = 0;
    let out = sweep(&cfg).unwrap();
    let table = intervention_experiment(&cfg, &out, None).unwrap();
    let uniform = table.row("uniform").unwrap();
    let policy = table.row("fp_fn_policy").unwrap();
    assert!(policy.policy.overrides.is_empty());
    assert_eq!(uniform.per_class, policy.per_class);
}

#[test]
fn config_files_round_trip() {
    let cfg = SimConfig::canonical();
    assert_eq!(SimConfig::from_toml(&toml::to_string(&cfg).unwrap()).unwrap(), cfg);
    assert_eq!(SimConfig::from_json(&serde_json::to_string(&cfg).unwrap()).unwrap(), cfg);
    let mut bad = cfg.clone();
    bad.grid.clear();
    assert!(SimConfig::from_json(&serde_json::to_string(&bad).unwrap()).is_err());
}
