use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::image::{Image, CHANNELS};
use crate::error::{Error, Result};

const LUMA: [f64; 3] = [0.299, 0.587, 0.114];

/// Brightness, contrast, saturation and hue jitter of intensity `c`,
/// applied as a whole with probability `p`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ColorJitter {
    pub intensity: f64,
    pub p: f64,
}

impl Default for ColorJitter {
    fn default() -> Self {
        ColorJitter { intensity: 0.1, p: 0.5 }
    }
}

impl ColorJitter {
    pub fn new(intensity: f64, p: f64) -> Result<Self> {
        let j = ColorJitter { intensity, p };
        j.validate()?;
        Ok(j)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.intensity) || !(0.0..=1.0).contains(&self.p) {
            return Err(Error::InvalidParam(format!(
                "colorjitter needs intensity in [0, 1) and p in [0, 1], got {} and {}",
                self.intensity, self.p
            )));
        }
        Ok(())
    }

    pub fn apply<R: Rng + ?Sized>(&self, img: &Image, rng: &mut R) -> Result<Image> {
        self.validate()?;
        let mut out = img.clone();
        if rng.random::<f64>() >= self.p {
            return Ok(out);
        }
        let c = self.intensity;
        let mut order = [0u8, 1, 2, 3];
        order.shuffle(rng);
        for op in order {
            let f = 1.0 + c * (2.0 * rng.random::<f64>() - 1.0);
            match op {
                0 => brightness(&mut out, f),
                1 => contrast(&mut out, f),
                2 => saturation(&mut out, f),
                _ => hue(&mut out, f - 1.0),
            }
        }
        Ok(out)
    }
}

pub fn luma(px: &[f64]) -> f64 {
    LUMA[0] * px[0] + LUMA[1] * px[1] + LUMA[2] * px[2]
}

pub fn brightness(img: &mut Image, f: f64) {
    if f == 1.0 {
        return;
    }
    img.data_mut().iter_mut().for_each(|v| *v = (*v * f).clamp(0.0, 1.0));
}

/// Blends towards the mean luma of the whole image.
pub fn contrast(img: &mut Image, f: f64) {
    if f == 1.0 {
        return;
    }
    let data = img.data_mut();
    let n = data.len() / CHANNELS;
    let mean = data.chunks_exact(CHANNELS).map(luma).sum::<f64>() / n as f64;
    data.iter_mut().for_each(|v| *v = ((*v - mean) * f + mean).clamp(0.0, 1.0));
}

/// Blends each pixel towards its own luma.
pub fn saturation(img: &mut Image, f: f64) {
    if f == 1.0 {
        return;
    }
    for px in img.data_mut().chunks_exact_mut(CHANNELS) {
        let l = luma(px);
        px.iter_mut().for_each(|v| *v = ((*v - l) * f + l).clamp(0.0, 1.0));
    }
}

/// Rotates hue by `shift` turns of the colour circle.
pub fn hue(img: &mut Image, shift: f64) {
    if shift == 0.0 {
        return;
    }
    for px in img.data_mut().chunks_exact_mut(CHANNELS) {
        let (h, s, v) = rgb_to_hsv(px[0], px[1], px[2]);
        let (r, g, b) = hsv_to_rgb((h + shift).rem_euclid(1.0), s, v);
        px[0] = r.clamp(0.0, 1.0);
        px[1] = g.clamp(0.0, 1.0);
        px[2] = b.clamp(0.0, 1.0);
    }
}

fn rgb_to_hsv(r: f64, g: f64, b: f64) -> (f64, f64, f64) {
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    let d = max - min;
    let h = if d == 0.0 {
        0.0
    } else if max == r {
        ((g - b) / d).rem_euclid(6.0) / 6.0
    } else if max == g {
        ((b - r) / d + 2.0) / 6.0
    } else {
        ((r - g) / d + 4.0) / 6.0
    };
    let s = if max == 0.0 { 0.0 } else { d / max };
    (h, s, max)
}

fn hsv_to_rgb(h: f64, s: f64, v: f64) -> (f64, f64, f64) {
    let h6 = h * 6.0;
    let i = h6.floor();
    let f = h6 - i;
    let p = v * (1.0 - s);
    let q = v * (1.0 - s * f);
    let t = v * (1.0 - s * (1.0 - f));
    match (i as i64).rem_euclid(6) {
        0 => (v, t, p),
        1 => (q, v, p),
        2 => (p, v, t),
        3 => (p, q, v),
        4 => (t, p, v),
        _ => (v, p, q),
    }
}
