use rand::Rng;
use rand_distr::{Beta, Distribution};

use crate::error::{Error, Result};

/// Draws a mixing weight from Beta(alpha, alpha).
pub fn sample_lambda<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> Result<f64> {
    let beta = Beta::new(alpha, alpha)
        .map_err(|e| Error::InvalidParam(format!("mixup alpha {alpha}: {e}")))?;
    Ok(beta.sample(rng))
}

/// Convex combination `lambda * a + (1 - lambda) * b` of inputs and targets.
pub fn mixup(x_i: &[f64], x_j: &[f64], y_i: &[f64], y_j: &[f64], lambda: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::InvalidParam(format!("mixup lambda must lie in [0, 1], got {lambda}")));
    }
    if x_i.len() != x_j.len() || y_i.len() != y_j.len() {
        return Err(Error::InvalidParam("mixup operands differ in shape".into()));
    }
    let mix = |a: &[f64], b: &[f64]| -> Vec<f64> { a.iter().zip(b).map(|(u, v)| lambda * u + (1.0 - lambda) * v).collect() };
    Ok((mix(x_i, x_j), mix(y_i, y_j)))
}
