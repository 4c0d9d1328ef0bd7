use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::dataset::{crop_mask, stream_rng, Dataset};
use super::SimConfig;
use crate::error::{Error, Result};

const STREAM_TRAINING: u64 = 1 << 32;

/// Multinomial logistic regression on the flattened canvas.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SoftmaxClassifier {
    pub classes: usize,
    pub features: usize,
    /// Row-major, one row per class.
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

impl SoftmaxClassifier {
    pub fn zeros(classes: usize, features: usize) -> Self {
        SoftmaxClassifier {
            classes,
            features,
            weights: vec![0.0; classes * features],
            bias: vec![0.0; classes],
        }
    }

    pub fn logits(&self, x: &[f64]) -> Vec<f64> {
        self.weights
            .chunks_exact(self.features)
            .zip(&self.bias)
            .map(|(w, b)| w.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + b)
            .collect()
    }

    /// Arg-max class; the lowest index wins ties.
    pub fn predict(&self, x: &[f64]) -> usize {
        let z = self.logits(x);
        let mut best = 0;
        for (k, v) in z.iter().enumerate() {
            if *v > z[best] {
                best = k;
            }
        }
        best
    }

    pub fn accuracy(&self, data: &Dataset) -> f64 {
        let hits = data.samples.iter().filter(|s| self.predict(&s.features) == s.label).count();
        hits as f64 / data.len() as f64
    }
}

fn softmax_in_place(z: &mut [f64]) {
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for v in z.iter_mut() {
        *v = (*v - max).exp();
        sum += *v;
    }
    z.iter_mut().for_each(|v| *v /= sum);
}

/// Minibatch SGD on label-smoothed cross-entropy from a zero start.
///
/// Every sample is re-cropped each epoch with the crop strength of its class
/// (`crop_strengths[label]`, a fraction in (0, 1]). `seed` selects the
/// shuffling and cropping stream, so equal seeds give identical weights.
pub fn train_classifier(
    train: &Dataset,
    crop_strengths: &[f64],
    config: &SimConfig,
    seed: u64,
) -> Result<SoftmaxClassifier> {
    let k = config.classes.len();
    let f = config.features();
    if crop_strengths.len() != k {
        return Err(Error::InvalidParam(format!(
            "expected {k} crop strengths, got {}",
            crop_strengths.len()
        )));
    }
    let t = &config.trainer;
    let mut model = SoftmaxClassifier::zeros(k, f);
    let mut rng = stream_rng(config.root_seed, STREAM_TRAINING + seed);
    let mut order: Vec<usize> = (0..train.len()).collect();
    let off = t.label_smoothing / k as f64;
    let on = 1.0 - t.label_smoothing + off;

    let mut x = vec![0.0; f];
    let mut grad_w = vec![0.0; k * f];
    let mut grad_b = vec![0.0; k];
    for epoch in 0..t.epochs {
        order.shuffle(&mut rng);
        let mut loss = 0.0;
        for batch in order.chunks(t.batch_size) {
            grad_w.fill(0.0);
            grad_b.fill(0.0);
            for &i in batch {
                let sample = &train.samples[i];
                x.copy_from_slice(&sample.features);
                crop_mask(&mut x, config.canvas_length, crop_strengths[sample.label], &mut rng)?;
                let mut p = model.logits(&x);
                softmax_in_place(&mut p);
                for (c, pc) in p.iter().enumerate() {
                    let target = if c == sample.label { on } else { off };
                    loss -= target * pc.max(f64::MIN_POSITIVE).ln();
                    let g = pc - target;
                    grad_b[c] += g;
                    for (gw, xv) in grad_w[c * f..(c + 1) * f].iter_mut().zip(&x) {
                        *gw += g * xv;
                    }
                }
            }
            let step = t.learning_rate / batch.len() as f64;
            for (w, g) in model.weights.iter_mut().zip(&grad_w) {
                *w -= step * g;
            }
            for (b, g) in model.bias.iter_mut().zip(&grad_b) {
                *b -= step * g;
            }
        }
        let mean_loss = loss / train.len() as f64;
        if !mean_loss.is_finite() || model.weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::Diverged(format!(
                "epoch {epoch}: mean loss {mean_loss}, learning rate {}",
                t.learning_rate
            )));
        }
    }
    Ok(model)
}
