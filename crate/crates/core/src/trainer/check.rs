//! Numerical oracles: central finite differences against the analytic
//! gradients, runnable from tests and from the CLI.

use crate::advantage::equivalence_oracle as adv_equivalence;
use crate::advantage::AdvConfig;
use crate::seeding::substream;
use crate::trainer::loss::{
    clipped_surrogate, kl_exact, kl_grad, sft_grad, sft_loss, surrogate_grad, AdvSample,
    SurrogateConfig,
};
use crate::trainer::policy::SeqPolicy;
use crate::trainer::TrainError;
use rand::Rng;
use serde::Serialize;

/// Central finite difference of `f` at `policy`, one logit at a time.
pub fn fd_gradient<F: Fn(&SeqPolicy) -> f64>(policy: &SeqPolicy, h: f64, f: F) -> Vec<f64> {
    let v = policy.vocab_size();
    let l = policy.seq_len();
    let mut grad = vec![0.0; v * l];
    for i in 0..v * l {
        let mut plus = policy.logits().to_vec();
        plus[i] += h;
        let mut minus = policy.logits().to_vec();
        minus[i] -= h;
        let fp = f(&SeqPolicy::from_logits(v, l, plus).expect("same shape"));
        let fm = f(&SeqPolicy::from_logits(v, l, minus).expect("same shape"));
        grad[i] = (fp - fm) / (2.0 * h);
    }
    grad
}

/// Norm-wise relative error between two gradients.
pub fn gradient_relative_error(analytic: &[f64], numeric: &[f64]) -> f64 {
    let diff: f64 = analytic
        .iter()
        .zip(numeric)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    let norm: f64 = numeric.iter().map(|x| x * x).sum::<f64>().sqrt();
    diff / norm.max(1e-8)
}

/// Worst relative errors seen across the randomized gradient checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GradientOracleReport {
    pub instances: usize,
    pub max_sft_rel_err: f64,
    pub max_kl_rel_err: f64,
    pub max_surrogate_rel_err: f64,
}

impl GradientOracleReport {
    pub fn max(&self) -> f64 {
        self.max_sft_rel_err
            .max(self.max_kl_rel_err)
            .max(self.max_surrogate_rel_err)
    }
}

const FD_STEP: f64 = 1e-5;

fn random_policy(v: usize, l: usize, spread: f64, rng: &mut impl Rng) -> SeqPolicy {
    let logits = (0..v * l)
        .map(|_| (rng.random::<f64>() - 0.5) * spread)
        .collect();
    SeqPolicy::from_logits(v, l, logits).expect("consistent shape")
}

/// Checks the three analytic gradients on `instances` randomized tiny
/// problems (V <= 5, L <= 3, G = 4 samples per surrogate).
pub fn gradient_oracle(seed: u64, instances: usize) -> Result<GradientOracleReport, TrainError> {
    let mut rng = substream(seed, "gradient-oracle");
    let mut report = GradientOracleReport {
        instances,
        max_sft_rel_err: 0.0,
        max_kl_rel_err: 0.0,
        max_surrogate_rel_err: 0.0,
    };
    for _ in 0..instances {
        let v = 2 + (rng.random::<u32>() % 4) as usize; // 2..=5
        let l = 1 + (rng.random::<u32>() % 3) as usize; // 1..=3

        let policy = random_policy(v, l, 4.0, &mut rng);
        let len = 1 + (rng.random::<u32>() as usize % l);
        let tokens: Vec<usize> = (0..len).map(|_| rng.random_range(0..v)).collect();
        let analytic = sft_grad(&policy, &tokens)?;
        let numeric = fd_gradient(&policy, FD_STEP, |p| sft_loss(p, &tokens).unwrap().total);
        report.max_sft_rel_err = report
            .max_sft_rel_err
            .max(gradient_relative_error(&analytic, &numeric));

        let reference = random_policy(v, l, 3.0, &mut rng);
        let analytic = kl_grad(&policy, &reference)?;
        let numeric = fd_gradient(&policy, FD_STEP, |p| kl_exact(p, &reference).unwrap());
        report.max_kl_rel_err = report
            .max_kl_rel_err
            .max(gradient_relative_error(&analytic, &numeric));

        let old = random_policy(v, l, 2.0, &mut rng);
        let new = random_policy(v, l, 2.0, &mut rng);
        let samples: Vec<AdvSample> = (0..4)
            .map(|_| AdvSample {
                sequence: (0..l).map(|_| rng.random_range(0..v)).collect(),
                advantage: (rng.random::<f64>() - 0.5) * 4.0,
            })
            .collect();
        let cfg = SurrogateConfig {
            clip_eps: 0.2,
            kl_beta: 1e-4,
        };
        let analytic = surrogate_grad(&new, &old, &reference, &samples, &cfg)?;
        let numeric = fd_gradient(&new, FD_STEP, |p| {
            clipped_surrogate(p, &old, &reference, &samples, &cfg)
                .unwrap()
                .objective
        });
        report.max_surrogate_rel_err = report
            .max_surrogate_rel_err
            .max(gradient_relative_error(&analytic, &numeric));
    }
    Ok(report)
}

/// Worst pointwise/pairwise disagreement across random reward vectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquivalenceOracleReport {
    pub vectors: usize,
    pub group_size: usize,
    pub max_abs_diff: f64,
}

/// Runs the advantage equivalence oracle on `vectors` random reward
/// vectors of size `group_size`, at both eps = 0 and the given eps.
pub fn equivalence_sweep(
    seed: u64,
    vectors: usize,
    group_size: usize,
    eps: f64,
) -> Result<EquivalenceOracleReport, TrainError> {
    let mut rng = substream(seed, "equivalence-oracle");
    let mut max_abs_diff = 0.0f64;
    for _ in 0..vectors {
        let rewards: Vec<f64> = (0..group_size).map(|_| rng.random::<f64>()).collect();
        for e in [0.0, eps] {
            let report = adv_equivalence(&rewards, &AdvConfig::with_eps(e))?;
            max_abs_diff = max_abs_diff.max(report.max_abs_diff);
        }
    }
    Ok(EquivalenceOracleReport {
        vectors,
        group_size,
        max_abs_diff,
    })
}
