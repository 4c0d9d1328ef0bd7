//! Image transforms driven by augmentation policies.

mod color;
mod image;
mod mixup;
mod rrc;

use std::collections::BTreeSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

pub use color::{brightness, contrast, hue, luma, saturation, ColorJitter};
pub use image::{CropRect, Image, CHANNELS};
pub use mixup::{mixup, sample_lambda};
pub use rrc::{rrc_apply, rrc_sample, RrcParams};

use crate::error::Result;
use crate::policy::{AugPolicy, ClassAug};
use crate::types::{ClassId, Strength};

/// Transform chain run for every augmented sample: crop, flip, jitter.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TransformConfig {
    /// `s_low` is replaced by the class strength.
    pub rrc: RrcParams,
    pub flip_prob: f64,
    pub jitter: Option<ColorJitter>,
}

impl Default for TransformConfig {
    fn default() -> Self {
        TransformConfig {
            rrc: RrcParams::default(),
            flip_prob: 0.5,
            jitter: None,
        }
    }
}

/// Augments a sample with the chain configured for `strength`.
pub fn augment<R: Rng + ?Sized>(img: &Image, strength: Strength, cfg: &TransformConfig, rng: &mut R) -> Result<Image> {
    let params = cfg.rrc.with_strength(strength);
    let rect = rrc_sample(&params, img.height(), img.width(), rng)?;
    let mut out = rrc_apply(img, rect, params.out_resolution)?;
    if rng.random::<f64>() < cfg.flip_prob {
        out = out.hflip();
    }
    if let Some(j) = &cfg.jitter {
        out = j.apply(&out, rng)?;
    }
    Ok(out)
}

/// Per-class dispatch of [`augment`] through a policy.
#[derive(Clone, Debug)]
pub struct ClassConditionalAugmenter {
    policy: AugPolicy,
    config: TransformConfig,
    classes: BTreeSet<ClassId>,
}

impl ClassConditionalAugmenter {
    pub fn new(policy: AugPolicy, config: TransformConfig, classes: BTreeSet<ClassId>) -> Self {
        ClassConditionalAugmenter { policy, config, classes }
    }

    pub fn policy(&self) -> &AugPolicy {
        &self.policy
    }

    /// What the policy does to `label`. Unknown labels get the default
    /// strength and a warning.
    pub fn resolve(&self, label: &ClassId) -> ClassAug {
        if !self.classes.contains(label) {
            log::warn!("class `{label}` is not in the class universe; using the default strength");
            return ClassAug::Strength(self.policy.default_strength);
        }
        self.policy.strength_for(label)
    }

    pub fn apply<R: Rng + ?Sized>(&self, img: &Image, label: &ClassId, rng: &mut R) -> Result<Image> {
        match self.resolve(label) {
            ClassAug::Strength(s) => augment(img, s, &self.config, rng),
            ClassAug::NoAugmentation => img.resize(self.config.rrc.out_resolution, self.config.rrc.out_resolution),
        }
    }
}

/// One-shot form of [`ClassConditionalAugmenter::apply`].
pub fn apply_policy<R: Rng + ?Sized>(
    img: &Image,
    label: &ClassId,
    policy: &AugPolicy,
    classes: &BTreeSet<ClassId>,
    config: &TransformConfig,
    rng: &mut R,
) -> Result<Image> {
    ClassConditionalAugmenter::new(policy.clone(), config.clone(), classes.clone()).apply(img, label, rng)
}
