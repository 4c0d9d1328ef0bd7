//! Desk-scale simulator of augmentation-induced class bias.
//!
//! Samples are canvases of `L` slots, each holding a `d`-dimensional block.
//! A class is a composition of prototype blocks placed at fixed slots. The
//! 1-D analogue of random-resized-crop zeroes every slot outside a random
//! window, so a crop of a composite class can look exactly like a class made
//! of one of its parts.

mod dataset;
mod experiment;
mod train;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

pub use dataset::{crop_mask, generate_dataset, prototypes, Dataset, Prototypes, SimSample};
pub use experiment::{
    class_embeddings, class_taxonomy, intervention_experiment, sweep, InterventionRow, InterventionTable, SweepOutput,
};
pub use train::{train_classifier, SoftmaxClassifier};

use crate::error::{Error, Result};
use crate::types::{ClassId, LabelMode, Strength};

/// One block of a class composition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Placement {
    pub block: String,
    pub slot: usize,
    /// Probability that a sample contains the block. Blocks with presence 1
    /// define the class for the synthetic multi-label annotations.
    #[serde(default = "one")]
    pub presence: f64,
    #[serde(default = "one")]
    pub amplitude: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassSpec {
    pub name: ClassId,
    pub placements: Vec<Placement>,
    /// Overrides the global per-class training count.
    #[serde(default)]
    pub train: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainerConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub label_smoothing: f64,
}

impl Default for TrainerConfig {
    fn default() -> Self {
        TrainerConfig {
            epochs: 100,
            learning_rate: 0.05,
            batch_size: 32,
            label_smoothing: 0.1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterventionConfig {
    /// Classes handed to the FP + FN policy.
    pub m: usize,
    /// Number of most-affected classes the removal baseline switches off.
    pub affected: usize,
    pub mode: LabelMode,
}

impl Default for InterventionConfig {
    fn default() -> Self {
        InterventionConfig {
            m: 1,
            affected: 1,
            mode: LabelMode::Original,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub canvas_length: usize,
    pub block_dim: usize,
    pub noise_sigma: f64,
    /// Prototype names; vectors are drawn from N(0, 1) with the root seed.
    pub blocks: Vec<String>,
    pub classes: Vec<ClassSpec>,
    pub train_per_class: usize,
    pub val_per_class: usize,
    pub grid: Vec<Strength>,
    pub seeds: usize,
    pub root_seed: u64,
    #[serde(default)]
    pub trainer: TrainerConfig,
    #[serde(default)]
    pub intervention: InterventionConfig,
}

impl SimConfig {
    /// The co-occurrence scenario: WHOLE = {A, B}, PART = {B} with an
    /// occasional faint A and a context block, DIST = {C}.
    pub fn canonical() -> Self {
        let p = |block: &str, slot, presence, amplitude| Placement {
            block: block.into(),
            slot,
            presence,
            amplitude,
        };
        let class = |name: &str, placements| ClassSpec {
            name: name.into(),
            placements,
            train: None,
        };
        SimConfig {
            canvas_length: 16,
            block_dim: 8,
            noise_sigma: 0.3,
            blocks: ["A", "B", "C", "G"].map(String::from).to_vec(),
            classes: vec![
                class("WHOLE", vec![p("A", 0, 1.0, 1.0), p("B", 8, 1.0, 1.0)]),
                class(
                    "PART",
                    vec![p("B", 8, 1.0, 1.0), p("A", 0, 0.3, 0.3), p("G", 14, 0.6, 1.0)],
                ),
                class("DIST", vec![p("C", 4, 1.0, 1.0)]),
            ],
            train_per_class: 200,
            val_per_class: 100,
            grid: [8.0, 40.0, 70.0, 100.0]
                .map(|s| Strength::new(s).expect("static grid"))
                .to_vec(),
            seeds: 5,
            root_seed: 0,
            trainer: TrainerConfig::default(),
            intervention: InterventionConfig::default(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: SimConfig = toml::from_str(text).map_err(|e| Error::InvalidParam(format!("simulator config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: SimConfig =
            serde_json::from_str(text).map_err(|e| Error::InvalidParam(format!("simulator config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn class_ids(&self) -> Vec<ClassId> {
        self.classes.iter().map(|c| c.name.clone()).collect()
    }

    pub fn strongest(&self) -> Strength {
        *self.grid.iter().min().expect("validated grid is non-empty")
    }

    pub fn train_count(&self, class: usize) -> usize {
        self.classes[class].train.unwrap_or(self.train_per_class)
    }

    pub fn features(&self) -> usize {
        self.canvas_length * self.block_dim
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParam(m));
        if self.canvas_length == 0 || self.block_dim == 0 {
            return bad("canvas length and block dimension must be positive".into());
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return bad(format!("noise sigma must be finite and non-negative, got {}", self.noise_sigma));
        }
        if self.classes.len() < 2 {
            return bad("the simulator needs at least two classes".into());
        }
        let names: BTreeSet<&ClassId> = self.classes.iter().map(|c| &c.name).collect();
        if names.len() != self.classes.len() {
            return bad("class names must be unique".into());
        }
        let blocks: BTreeSet<&str> = self.blocks.iter().map(String::as_str).collect();
        if blocks.len() != self.blocks.len() {
            return bad("block names must be unique".into());
        }
        for (i, c) in self.classes.iter().enumerate() {
            if c.placements.is_empty() {
                return bad(format!("class `{}` has no blocks", c.name));
            }
            for p in &c.placements {
                if !blocks.contains(p.block.as_str()) {
                    return bad(format!("class `{}` uses unknown block `{}`", c.name, p.block));
                }
                if p.slot >= self.canvas_length {
                    return bad(format!(
                        "class `{}` places `{}` at slot {} outside a canvas of {}",
                        c.name, p.block, p.slot, self.canvas_length
                    ));
                }
                if !(0.0..=1.0).contains(&p.presence) || !p.amplitude.is_finite() {
                    return bad(format!("class `{}` has an invalid presence or amplitude", c.name));
                }
            }
            if self.train_count(i) == 0 {
                return bad(format!("class `{}` needs at least one training sample", c.name));
            }
        }
        if self.val_per_class == 0 {
            return bad("validation count must be at least one".into());
        }
        if self.grid.is_empty() || self.seeds == 0 {
            return bad("the strength grid and the seed count must be non-empty".into());
        }
        let t = &self.trainer;
        if t.batch_size == 0 || !(t.learning_rate > 0.0 && t.learning_rate.is_finite()) {
            return bad("trainer needs a positive batch size and learning rate".into());
        }
        if !(0.0..1.0).contains(&t.label_smoothing) {
            return bad(format!("label smoothing must lie in [0, 1), got {}", t.label_smoothing));
        }
        if self.intervention.m > self.classes.len() || self.intervention.affected > self.classes.len() {
            return bad("intervention sizes exceed the number of classes".into());
        }
        Ok(())
    }
}
