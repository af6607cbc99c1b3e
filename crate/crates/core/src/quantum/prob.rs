//! Probability vectors over measurement outcomes and shot sampling.

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::SimRng;

const SUM_TOL: f64 = 1e-9;

/// A probability distribution over 2 or 4 computational-basis outcomes.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbVector {
    probs: Vec<f64>,
}

impl ProbVector {
    /// Builds a probability vector; entries must be non-negative and sum
    /// to one within `1e-9`. The stored entries are renormalised exactly.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.len() != 2 && probs.len() != 4 {
            return Err(Error::shape(format!(
                "probability vector length must be 2 or 4, got {}",
                probs.len()
            )));
        }
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::invalid(
                "probabilities must be finite and non-negative".to_string(),
            ));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > SUM_TOL {
            return Err(Error::invalid(format!(
                "probabilities sum to {sum}, expected 1"
            )));
        }
        Ok(Self {
            probs: probs.into_iter().map(|p| p / sum).collect(),
        })
    }

    /// The uniform distribution over `len` outcomes.
    pub fn uniform(len: usize) -> Self {
        assert!(len == 2 || len == 4);
        Self {
            probs: vec![1.0 / len as f64; len],
        }
    }

    /// All mass on a single outcome.
    pub fn point_mass(len: usize, index: usize) -> Self {
        assert!(len == 2 || len == 4);
        assert!(index < len);
        let mut probs = vec![0.0; len];
        probs[index] = 1.0;
        Self { probs }
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self) -> &[f64] {
        &self.probs
    }

    pub fn get(&self, index: usize) -> f64 {
        self.probs[index]
    }
}

/// Draws a multinomial sample of `shots` outcomes.
///
/// Each shot consumes one uniform variate from `rng` and is binned by the
/// cumulative distribution, so the result is bit-identical for identical
/// generator states.
pub fn sample_counts(p: &ProbVector, shots: u64, rng: &mut SimRng) -> Vec<u64> {
    let mut cumulative = Vec::with_capacity(p.len());
    let mut acc = 0.0;
    for &prob in p.values() {
        acc += prob;
        cumulative.push(acc);
    }
    let last = cumulative.len() - 1;
    cumulative[last] = 1.0;

    let mut counts = vec![0u64; p.len()];
    for _ in 0..shots {
        let x: f64 = rng.random();
        let bin = cumulative.iter().position(|&c| x < c).unwrap_or(last);
        counts[bin] += 1;
    }
    counts
}
