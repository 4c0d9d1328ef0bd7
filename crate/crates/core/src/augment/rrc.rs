use rand::Rng;
use serde::{Deserialize, Serialize};

use super::image::{CropRect, Image};
use crate::error::{Error, Result};
use crate::types::Strength;

const MAX_ATTEMPTS: usize = 10;

/// Random-resized-crop parameters. `s_low` is the augmentation strength.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RrcParams {
    pub s_low: f64,
    pub s_up: f64,
    pub r_low: f64,
    pub r_up: f64,
    pub out_resolution: usize,
}

impl Default for RrcParams {
    fn default() -> Self {
        RrcParams {
            s_low: 0.08,
            s_up: 1.0,
            r_low: 3.0 / 4.0,
            r_up: 4.0 / 3.0,
            out_resolution: 176,
        }
    }
}

impl RrcParams {
    pub fn with_strength(self, s: Strength) -> Self {
        RrcParams {
            s_low: s.fraction(),
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.s_low > 0.0
            && self.s_low <= self.s_up
            && self.s_up <= 1.0
            && self.r_low > 0.0
            && self.r_low <= self.r_up
            && self.r_up.is_finite()
            && self.out_resolution > 0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParam(format!("invalid crop parameters {self:?}")))
        }
    }
}

/// Draws a crop window for an `h` x `w` image.
///
/// The scale is drawn once; the aspect ratio is redrawn until the window
/// fits, at most ten times. After that the largest centred window whose
/// aspect lies in `[r_low, r_up]` is used.
pub fn rrc_sample<R: Rng + ?Sized>(params: &RrcParams, h: usize, w: usize, rng: &mut R) -> Result<CropRect> {
    params.validate()?;
    if h == 0 || w == 0 {
        return Err(Error::InvalidParam("cannot crop an empty image".into()));
    }
    let area = (h * w) as f64;
    let scale = uniform(rng, params.s_low, params.s_up);
    for _ in 0..MAX_ATTEMPTS {
        let r = uniform(rng, params.r_low, params.r_up);
        let cw = (scale * area * r).sqrt().round() as usize;
        let ch = (scale * area / r).sqrt().round() as usize;
        if cw >= 1 && ch >= 1 && cw <= w && ch <= h {
            let top = rng.random_range(0..=h - ch);
            let left = rng.random_range(0..=w - cw);
            return Ok(CropRect {
                top,
                left,
                height: ch,
                width: cw,
            });
        }
    }
    Ok(center_fallback(params, h, w))
}

fn center_fallback(params: &RrcParams, h: usize, w: usize) -> CropRect {
    let ratio = w as f64 / h as f64;
    let (ch, cw) = if ratio < params.r_low {
        (((w as f64 / params.r_low).round() as usize).clamp(1, h), w)
    } else if ratio > params.r_up {
        (h, ((h as f64 * params.r_up).round() as usize).clamp(1, w))
    } else {
        (h, w)
    };
    CropRect {
        top: (h - ch) / 2,
        left: (w - cw) / 2,
        height: ch,
        width: cw,
    }
}

fn uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

/// Crops `img` to `rect` and resizes to `out_resolution` squared.
pub fn rrc_apply(img: &Image, rect: CropRect, out_resolution: usize) -> Result<Image> {
    img.crop(rect)?.resize(out_resolution, out_resolution)
}
