//! Losses over tabular policies and their analytic gradients.
//!
//! Everything here is exact: the KL is summed over the full per-position
//! distributions rather than estimated from samples, and every gradient
//! has a closed form checked against central finite differences in the
//! tests.

use crate::trainer::policy::SeqPolicy;
use crate::trainer::TrainError;
use serde::Serialize;

/// SFT negative log-likelihood, split into its two terms: the reasoning
/// tokens and the final label token.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SftLoss {
    pub total: f64,
    pub reasoning_nll: f64,
    pub label_nll: f64,
}

/// NLL of an encoded warm-up sequence (reasoning tokens ++ label token).
///
/// The encoding may be shorter than the policy horizon; positions past the
/// encoding contribute nothing.
pub fn sft_loss(policy: &SeqPolicy, tokens: &[usize]) -> Result<SftLoss, TrainError> {
    if tokens.is_empty() {
        return Err(TrainError::BadSequence("empty encoding".into()));
    }
    let total = -policy.prefix_logprob(tokens)?;
    let label_t = tokens.len() - 1;
    let label_nll = -policy.log_probs_at(label_t)[tokens[label_t]];
    Ok(SftLoss {
        total,
        reasoning_nll: total - label_nll,
        label_nll,
    })
}

/// Gradient of `sft_loss(...).total` with respect to the policy logits.
pub fn sft_grad(policy: &SeqPolicy, tokens: &[usize]) -> Result<Vec<f64>, TrainError> {
    sft_loss(policy, tokens)?; // validate
    let v = policy.vocab_size();
    let mut grad = vec![0.0; v * policy.seq_len()];
    for (t, tok) in tokens.iter().enumerate() {
        let probs = policy.probs_at(t);
        for u in 0..v {
            grad[t * v + u] = probs[u] - if u == *tok { 1.0 } else { 0.0 };
        }
    }
    Ok(grad)
}

/// Exact KL divergence `KL(p || q)` summed over positions.
pub fn kl_exact(p: &SeqPolicy, q: &SeqPolicy) -> Result<f64, TrainError> {
    p.check_same_shape(q)?;
    let mut total = 0.0;
    for t in 0..p.seq_len() {
        let lp = p.log_probs_at(t);
        let lq = q.log_probs_at(t);
        total += lp
            .iter()
            .zip(&lq)
            .map(|(a, b)| (a.exp()) * (a - b))
            .sum::<f64>();
    }
    Ok(total)
}

/// Gradient of `kl_exact(p || q)` with respect to p's logits.
///
/// Per position: d/dtheta_u = p_u * ((log p_u - log q_u) - KL_t).
pub fn kl_grad(p: &SeqPolicy, q: &SeqPolicy) -> Result<Vec<f64>, TrainError> {
    p.check_same_shape(q)?;
    let v = p.vocab_size();
    let mut grad = vec![0.0; v * p.seq_len()];
    for t in 0..p.seq_len() {
        let lp = p.log_probs_at(t);
        let lq = q.log_probs_at(t);
        let probs: Vec<f64> = lp.iter().map(|x| x.exp()).collect();
        let kl_t: f64 = probs
            .iter()
            .zip(lp.iter().zip(&lq))
            .map(|(pr, (a, b))| pr * (a - b))
            .sum();
        for u in 0..v {
            grad[t * v + u] = probs[u] * ((lp[u] - lq[u]) - kl_t);
        }
    }
    Ok(grad)
}

/// One rollout sample with its precomputed advantage.
#[derive(Debug, Clone, PartialEq)]
pub struct AdvSample {
    pub sequence: Vec<usize>,
    pub advantage: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurrogateConfig {
    pub clip_eps: f64,
    pub kl_beta: f64,
}

/// The clipped objective, reported term by term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SurrogateValue {
    /// surrogate - kl_beta * kl; the quantity to maximize.
    pub objective: f64,
    /// Mean over samples of min(ratio * A, clip(ratio) * A).
    pub surrogate: f64,
    pub kl: f64,
    /// Fraction of samples whose ratio fell outside the clip interval.
    pub clip_fraction: f64,
}

/// Clipped surrogate objective with the KL penalty subtracted.
///
/// Ratios are sequence-level: `exp(logprob_new(y) - logprob_old(y))`. The
/// KL penalty is measured against `reference`, which the training loop
/// keeps fixed at the initial policy while `old` tracks the rollout
/// snapshot.
pub fn clipped_surrogate(
    new: &SeqPolicy,
    old: &SeqPolicy,
    reference: &SeqPolicy,
    samples: &[AdvSample],
    cfg: &SurrogateConfig,
) -> Result<SurrogateValue, TrainError> {
    new.check_same_shape(old)?;
    new.check_same_shape(reference)?;
    if samples.is_empty() {
        return Err(TrainError::BadSequence("no samples".into()));
    }
    let lo = 1.0 - cfg.clip_eps;
    let hi = 1.0 + cfg.clip_eps;
    let mut surrogate = 0.0;
    let mut clipped = 0usize;
    for s in samples {
        let ratio = (new.seq_logprob(&s.sequence)? - old.seq_logprob(&s.sequence)?).exp();
        let unclipped = ratio * s.advantage;
        let capped = ratio.clamp(lo, hi) * s.advantage;
        surrogate += unclipped.min(capped);
        if ratio < lo || ratio > hi {
            clipped += 1;
        }
    }
    surrogate /= samples.len() as f64;
    let kl = kl_exact(new, reference)?;
    Ok(SurrogateValue {
        objective: surrogate - cfg.kl_beta * kl,
        surrogate,
        kl,
        clip_fraction: clipped as f64 / samples.len() as f64,
    })
}

/// Gradient of the clipped objective with respect to `new`'s logits.
///
/// A sample contributes `ratio * A * grad_logprob` while the unclipped
/// branch is active and nothing once the min saturates at the clip.
pub fn surrogate_grad(
    new: &SeqPolicy,
    old: &SeqPolicy,
    reference: &SeqPolicy,
    samples: &[AdvSample],
    cfg: &SurrogateConfig,
) -> Result<Vec<f64>, TrainError> {
    new.check_same_shape(old)?;
    new.check_same_shape(reference)?;
    if samples.is_empty() {
        return Err(TrainError::BadSequence("no samples".into()));
    }
    let v = new.vocab_size();
    let lo = 1.0 - cfg.clip_eps;
    let hi = 1.0 + cfg.clip_eps;
    let mut grad = vec![0.0; v * new.seq_len()];
    let scale = 1.0 / samples.len() as f64;
    for s in samples {
        let ratio = (new.seq_logprob(&s.sequence)? - old.seq_logprob(&s.sequence)?).exp();
        let unclipped = ratio * s.advantage;
        let capped = ratio.clamp(lo, hi) * s.advantage;
        if unclipped <= capped {
            let coeff = scale * ratio * s.advantage;
            for (t, tok) in s.sequence.iter().enumerate() {
                let probs = new.probs_at(t);
                for u in 0..v {
                    let indicator = if u == *tok { 1.0 } else { 0.0 };
                    grad[t * v + u] += coeff * (indicator - probs[u]);
                }
            }
        }
    }
    if cfg.kl_beta != 0.0 {
        let kl_g = kl_grad(new, reference)?;
        for (g, k) in grad.iter_mut().zip(&kl_g) {
            *g -= cfg.kl_beta * k;
        }
    }
    Ok(grad)
}
