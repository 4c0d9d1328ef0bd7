use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Word or class-name vectors of a fixed dimension.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct EmbeddingTable {
    dim: usize,
    vectors: BTreeMap<String, Vec<f64>>,
}

impl EmbeddingTable {
    pub fn new(vectors: BTreeMap<String, Vec<f64>>) -> Result<Self> {
        let dim = vectors.values().next().map_or(0, Vec::len);
        for (k, v) in &vectors {
            if v.len() != dim {
                return Err(Error::Input(format!(
                    "embedding for `{k}` has dimension {}, expected {dim}",
                    v.len()
                )));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::Input(format!("embedding for `{k}` has non-finite entries")));
            }
        }
        Ok(EmbeddingTable { dim, vectors })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.vectors.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }

    /// Vector of a class name: the exact entry if there is one, otherwise the
    /// mean of the vectors of its words (split on spaces, `_` and `-`).
    /// Unknown words are skipped; `None` when no word is known.
    pub fn class_vector(&self, name: &str) -> Option<Vec<f64>> {
        if let Some(v) = self.vectors.get(name) {
            return Some(v.clone());
        }
        let words: Vec<&Vec<f64>> = name
            .split([' ', '_', '-'])
            .filter(|w| !w.is_empty())
            .filter_map(|w| self.vectors.get(w))
            .collect();
        if words.is_empty() {
            return None;
        }
        let mut mean = vec![0.0; self.dim];
        for w in &words {
            for (m, x) in mean.iter_mut().zip(w.iter()) {
                *m += x;
            }
        }
        let n = words.len() as f64;
        mean.iter_mut().for_each(|m| *m /= n);
        Some(mean)
    }

    /// Cosine similarity of two class names; `None` when either is fully
    /// out of vocabulary.
    pub fn similarity(&self, a: &str, b: &str) -> Result<Option<f64>> {
        match (self.class_vector(a), self.class_vector(b)) {
            (Some(u), Some(v)) => cosine(&u, &v).map(Some),
            _ => Ok(None),
        }
    }
}

pub fn cosine(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::InvalidParam(format!(
            "vectors of different dimension ({} vs {})",
            u.len(),
            v.len()
        )));
    }
    let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
    let nu = u.iter().map(|a| a * a).sum::<f64>();
    let nv = v.iter().map(|a| a * a).sum::<f64>();
    if nu == 0.0 || nv == 0.0 {
        return Err(Error::Undefined("cosine similarity of a zero vector".into()));
    }
    Ok((dot / (nu * nv).sqrt()).clamp(-1.0, 1.0))
}
