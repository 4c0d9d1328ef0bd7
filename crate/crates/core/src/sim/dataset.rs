use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

use super::SimConfig;
use crate::error::{Error, Result};

pub(crate) const STREAM_PROTOTYPES: u64 = 1;
pub(crate) const STREAM_TRAIN: u64 = 2;
pub(crate) const STREAM_VAL: u64 = 3;

pub(crate) fn stream_rng(root: u64, stream: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(root);
    rng.set_stream(stream);
    rng
}

/// Prototype vector per block name.
pub type Prototypes = BTreeMap<String, Vec<f64>>;

/// Draws every block prototype from N(0, 1), in the order blocks are listed.
pub fn prototypes(config: &SimConfig) -> Prototypes {
    let mut rng = stream_rng(config.root_seed, STREAM_PROTOTYPES);
    config
        .blocks
        .iter()
        .map(|b| {
            let v = (0..config.block_dim).map(|_| rng.sample(StandardNormal)).collect();
            (b.clone(), v)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimSample {
    pub id: String,
    /// Index into the config's class list.
    pub label: usize,
    /// `canvas_length * block_dim` values, slot-major.
    pub features: Vec<f64>,
    /// Classes whose defining blocks are all present in this sample.
    pub labels: BTreeSet<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub samples: Vec<SimSample>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Training and validation sets. Each sample places its class's blocks on a
/// Gaussian-noise canvas; optional blocks appear with their presence
/// probability.
pub fn generate_dataset(config: &SimConfig) -> Result<(Dataset, Dataset)> {
    config.validate()?;
    let protos = prototypes(config);
    let counts: Vec<usize> = (0..config.classes.len()).map(|k| config.train_count(k)).collect();
    let train = draw(config, &protos, &counts, "train", STREAM_TRAIN)?;
    let val = draw(config, &protos, &vec![config.val_per_class; counts.len()], "val", STREAM_VAL)?;
    Ok((train, val))
}

fn draw(config: &SimConfig, protos: &Prototypes, counts: &[usize], split: &str, stream: u64) -> Result<Dataset> {
    let mut rng = stream_rng(config.root_seed, stream);
    let noise = Normal::new(0.0, config.noise_sigma).map_err(|e| Error::InvalidParam(e.to_string()))?;
    let d = config.block_dim;
    let required: Vec<BTreeSet<(&str, usize)>> = config
        .classes
        .iter()
        .map(|c| {
            c.placements
                .iter()
                .filter(|p| p.presence >= 1.0)
                .map(|p| (p.block.as_str(), p.slot))
                .collect()
        })
        .collect();

    let mut samples = Vec::with_capacity(counts.iter().sum());
    for (k, class) in config.classes.iter().enumerate() {
        for i in 0..counts[k] {
            let mut features: Vec<f64> = (0..config.features()).map(|_| noise.sample(&mut rng)).collect();
            let mut present = BTreeSet::new();
            for p in &class.placements {
                if p.presence >= 1.0 || rng.random::<f64>() < p.presence {
                    let proto = &protos[&p.block];
                    for (f, v) in features[p.slot * d..(p.slot + 1) * d].iter_mut().zip(proto) {
                        *f += p.amplitude * v;
                    }
                    present.insert((p.block.as_str(), p.slot));
                }
            }
            let mut labels: BTreeSet<usize> = required
                .iter()
                .enumerate()
                .filter(|(_, req)| req.is_subset(&present))
                .map(|(j, _)| j)
                .collect();
            labels.insert(k);
            samples.push(SimSample {
                id: format!("{split}-{}-{i:04}", class.name),
                label: k,
                features,
                labels,
            });
        }
    }
    Ok(Dataset { samples })
}

/// Zeroes every slot outside a random window. The window covers a fraction
/// `u ~ U[s, 1]` of the canvas (at least one slot) at a uniform offset.
/// `s = 1` leaves the sample untouched and draws nothing.
pub fn crop_mask<R: Rng + ?Sized>(features: &mut [f64], canvas_length: usize, s: f64, rng: &mut R) -> Result<()> {
    if !(s > 0.0 && s <= 1.0) {
        return Err(Error::InvalidParam(format!("crop strength must lie in (0, 1], got {s}")));
    }
    if canvas_length == 0 || !features.len().is_multiple_of(canvas_length) {
        return Err(Error::InvalidParam("feature length is not a multiple of the canvas".into()));
    }
    if s >= 1.0 {
        return Ok(());
    }
    let (start, len) = crop_window(canvas_length, s, rng);
    let d = features.len() / canvas_length;
    for slot in (0..start).chain(start + len..canvas_length) {
        features[slot * d..(slot + 1) * d].fill(0.0);
    }
    Ok(())
}

pub(crate) fn crop_window<R: Rng + ?Sized>(canvas_length: usize, s: f64, rng: &mut R) -> (usize, usize) {
    let u = s + (1.0 - s) * rng.random::<f64>();
    let len = ((canvas_length as f64 * u).round() as usize).clamp(1, canvas_length);
    let start = rng.random_range(0..=canvas_length - len);
    (start, len)
}
