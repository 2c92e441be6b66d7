use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use pairadv_core::advantage::{
    build_preference_matrix, grpo_advantage, pairwise_advantage, AdvConfig, MatrixConfig,
    PreferenceMatrix,
};
use pairadv_core::model::{BinaryChoice, Judgment, LabelKind, PreferenceLabel};
use pairadv_core::seeding::substream;
use pairadv_core::trainer::{sft_grad, surrogate_grad, AdvSample, SeqPolicy, SurrogateConfig};
use rand::Rng;
use std::hint::black_box;

fn random_rewards(g: usize, seed: u64) -> Vec<f64> {
    let mut rng = substream(seed, "bench-rewards");
    (0..g).map(|_| rng.random::<f64>()).collect()
}

fn bench_advantages(c: &mut Criterion) {
    let mut group = c.benchmark_group("advantage");
    for g in [8usize, 64] {
        let rewards = random_rewards(g, g as u64);
        let matrix = PreferenceMatrix::from_reward_differences("bench", &rewards);
        let cfg = AdvConfig::default();
        group.bench_function(format!("grpo_g{g}"), |b| {
            b.iter(|| grpo_advantage(black_box(&rewards), &cfg).unwrap())
        });
        group.bench_function(format!("pairwise_g{g}"), |b| {
            b.iter(|| pairwise_advantage(black_box(&matrix), &cfg).unwrap())
        });
    }
    group.finish();
}

fn bench_matrix_build(c: &mut Criterion) {
    let g = 16usize;
    let rewards = random_rewards(g, 7);
    let mut stub = move |a: usize, b: usize| -> Result<Judgment, std::convert::Infallible> {
        Ok(Judgment {
            reasoning: String::new(),
            reasoning_len: 200,
            label: PreferenceLabel::Binary(if rewards[a] >= rewards[b] {
                BinaryChoice::A
            } else {
                BinaryChoice::B
            }),
        })
    };
    c.bench_function("matrix_build_g16", |b| {
        b.iter_batched(
            || substream(3, "bench-roles"),
            |mut rng| {
                build_preference_matrix(
                    "bench",
                    g,
                    LabelKind::Binary,
                    &MatrixConfig::default(),
                    &mut rng,
                    &mut stub,
                )
                .unwrap()
            },
            BatchSize::SmallInput,
        )
    });
}

fn bench_policy_grads(c: &mut Criterion) {
    let mut rng = substream(11, "bench-policy");
    let v = 32usize;
    let l = 16usize;
    let logits: Vec<f64> = (0..v * l)
        .map(|_| (rng.random::<f64>() - 0.5) * 4.0)
        .collect();
    let policy = SeqPolicy::from_logits(v, l, logits).unwrap();
    let tokens: Vec<usize> = (0..l).map(|_| rng.random_range(0..v)).collect();
    c.bench_function("sft_grad_32x16", |b| {
        b.iter(|| sft_grad(black_box(&policy), black_box(&tokens)).unwrap())
    });

    let old = SeqPolicy::uniform(v, l);
    let samples: Vec<AdvSample> = (0..8)
        .map(|_| AdvSample {
            sequence: (0..l).map(|_| rng.random_range(0..v)).collect(),
            advantage: rng.random::<f64>() - 0.5,
        })
        .collect();
    let cfg = SurrogateConfig {
        clip_eps: 0.2,
        kl_beta: 1e-4,
    };
    c.bench_function("surrogate_grad_8x32x16", |b| {
        b.iter(|| surrogate_grad(black_box(&policy), &old, &old, &samples, &cfg).unwrap())
    });
}

criterion_group!(
    benches,
    bench_advantages,
    bench_matrix_build,
    bench_policy_grads
);
criterion_main!(benches);
