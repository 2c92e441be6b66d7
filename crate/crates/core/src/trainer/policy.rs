//! Position-factorized softmax policy over fixed-length token sequences.
//!
//! The distribution over a sequence is the product of independent
//! per-position softmaxes, so log-probabilities, KL divergences, and their
//! gradients all have closed forms.

use crate::trainer::TrainError;
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeqPolicy {
    vocab_size: usize,
    seq_len: usize,
    /// Row-major seq_len x vocab_size logits.
    logits: Vec<f64>,
}

impl SeqPolicy {
    pub fn uniform(vocab_size: usize, seq_len: usize) -> Self {
        Self {
            vocab_size,
            seq_len,
            logits: vec![0.0; vocab_size * seq_len],
        }
    }

    pub fn from_logits(
        vocab_size: usize,
        seq_len: usize,
        logits: Vec<f64>,
    ) -> Result<Self, TrainError> {
        if logits.len() != vocab_size * seq_len {
            return Err(TrainError::ShapeMismatch(format!(
                "{} logits for {seq_len}x{vocab_size}",
                logits.len()
            )));
        }
        Ok(Self {
            vocab_size,
            seq_len,
            logits,
        })
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    pub fn seq_len(&self) -> usize {
        self.seq_len
    }

    pub fn logits(&self) -> &[f64] {
        &self.logits
    }

    fn row(&self, t: usize) -> &[f64] {
        &self.logits[t * self.vocab_size..(t + 1) * self.vocab_size]
    }

    /// Log-softmax of position `t`'s logits.
    pub fn log_probs_at(&self, t: usize) -> Vec<f64> {
        let row = self.row(t);
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let log_z = row.iter().map(|x| (x - max).exp()).sum::<f64>().ln() + max;
        row.iter().map(|x| x - log_z).collect()
    }

    pub fn probs_at(&self, t: usize) -> Vec<f64> {
        self.log_probs_at(t).iter().map(|lp| lp.exp()).collect()
    }

    fn check_sequence(&self, y: &[usize]) -> Result<(), TrainError> {
        if y.len() != self.seq_len {
            return Err(TrainError::BadSequence(format!(
                "length {} != {}",
                y.len(),
                self.seq_len
            )));
        }
        self.check_prefix(y)
    }

    fn check_prefix(&self, y: &[usize]) -> Result<(), TrainError> {
        if y.len() > self.seq_len {
            return Err(TrainError::BadSequence(format!(
                "length {} > {}",
                y.len(),
                self.seq_len
            )));
        }
        if let Some(tok) = y.iter().find(|t| **t >= self.vocab_size) {
            return Err(TrainError::BadSequence(format!(
                "token {tok} >= vocab {}",
                self.vocab_size
            )));
        }
        Ok(())
    }

    /// Log-probability of a full sequence.
    pub fn seq_logprob(&self, y: &[usize]) -> Result<f64, TrainError> {
        self.check_sequence(y)?;
        Ok(y.iter()
            .enumerate()
            .map(|(t, tok)| self.log_probs_at(t)[*tok])
            .sum())
    }

    /// Log-probability of the first `y.len()` positions; used by the SFT
    /// loss on encodings shorter than the policy horizon.
    pub fn prefix_logprob(&self, y: &[usize]) -> Result<f64, TrainError> {
        self.check_prefix(y)?;
        Ok(y.iter()
            .enumerate()
            .map(|(t, tok)| self.log_probs_at(t)[*tok])
            .sum())
    }

    /// Samples one sequence; `temperature` rescales logits before the
    /// per-position softmax.
    pub fn sample(&self, temperature: f64, rng: &mut impl Rng) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.seq_len);
        for t in 0..self.seq_len {
            let row = self.row(t);
            let scaled: Vec<f64> = row.iter().map(|x| x / temperature.max(1e-12)).collect();
            let max = scaled.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let weights: Vec<f64> = scaled.iter().map(|x| (x - max).exp()).collect();
            let total: f64 = weights.iter().sum();
            let mut draw = rng.random::<f64>() * total;
            let mut chosen = self.vocab_size - 1;
            for (v, w) in weights.iter().enumerate() {
                draw -= w;
                if draw <= 0.0 {
                    chosen = v;
                    break;
                }
            }
            out.push(chosen);
        }
        out
    }

    /// One gradient-ascent step of size `lr` along `grad`.
    pub fn ascended(&self, grad: &[f64], lr: f64) -> Result<Self, TrainError> {
        if grad.len() != self.logits.len() {
            return Err(TrainError::ShapeMismatch(format!(
                "gradient length {} != {}",
                grad.len(),
                self.logits.len()
            )));
        }
        let logits = self
            .logits
            .iter()
            .zip(grad)
            .map(|(x, g)| x + lr * g)
            .collect();
        Ok(Self {
            vocab_size: self.vocab_size,
            seq_len: self.seq_len,
            logits,
        })
    }

    pub(crate) fn check_same_shape(&self, other: &Self) -> Result<(), TrainError> {
        if self.vocab_size != other.vocab_size || self.seq_len != other.seq_len {
            return Err(TrainError::ShapeMismatch(format!(
                "{}x{} vs {}x{}",
                self.seq_len, self.vocab_size, other.seq_len, other.vocab_size
            )));
        }
        Ok(())
    }
}
