//! Acceptance suite: one test per criterion, each printing a pass line.
//!
//! Run with `cargo test -p pairadv-cli --test acceptance -- --nocapture`
//! to see the per-criterion lines.

use pairadv_core::advantage::{
    equivalence_oracle, grpo_advantage, pairwise_advantage, AdvConfig, PreferenceMatrix,
};
use pairadv_core::curation::{
    build_warmup_dataset, select_warmup_trajectory, CurationConfig, Selection, SelectionStrategy,
};
use pairadv_core::judge::{majority_vote, SimJudgeConfig, VoteConfig};
use pairadv_core::model::{
    BinaryChoice, Judgment, LabelKind, PreferenceExample, PreferenceLabel, TokenConvention,
    TrajectoryRecord,
};
use pairadv_core::rewards::{binary_reward, multiclass_reward};
use pairadv_core::seeding::substream;
use pairadv_core::template::{format_answer, parse_judgment, render_prompt};
use pairadv_core::trainer::{
    gradient_oracle, train_rlhf, AdvMode, PairwiseJudgeConfig, SyntheticTask, TrainConfig,
};
use rand::Rng;
use std::time::Instant;

fn pass(n: usize, name: &str) {
    println!("acceptance {n} ({name}): pass");
}

// 1. Pointwise and pairwise advantages coincide when d_ij = r_i - r_j,
//    across 1000 random vectors per G in {2,3,4,8,16} and eps in {0, 1e-6},
//    to 1e-9, in under a second.
#[test]
fn acceptance_1_advantage_equivalence() {
    let start = Instant::now();
    let mut rng = substream(1, "acceptance-equivalence");
    let mut worst = 0.0f64;
    for &g in &[2usize, 3, 4, 8, 16] {
        for _ in 0..1000 {
            let rewards: Vec<f64> = (0..g).map(|_| rng.random::<f64>()).collect();
            for eps in [0.0, 1e-6] {
                let report = equivalence_oracle(&rewards, &AdvConfig::with_eps(eps)).unwrap();
                worst = worst.max(report.max_abs_diff);
            }
        }
    }
    let elapsed = start.elapsed();
    assert!(worst <= 1e-9, "max_abs_diff {worst}");
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    pass(1, "advantage equivalence");
}

// 2. Hand-algebra fixtures reproduced by BOTH estimators to 1e-9.
#[test]
fn acceptance_2_hand_algebra_fixtures() {
    let tol = 1e-9;
    // r = (1, 0): mean 0.5, Bessel std sqrt(0.5), advantages
    // +-1/sqrt(2) = +-0.70710678...
    let expected_two = [
        std::f64::consts::FRAC_1_SQRT_2,
        -std::f64::consts::FRAC_1_SQRT_2,
    ];
    // r = (1, 0.5, 0): mean 0.5, Bessel std 0.5, advantages (1, 0, -1).
    let expected_three = [1.0, 0.0, -1.0];
    for (rewards, expected) in [
        (vec![1.0, 0.0], &expected_two[..]),
        (vec![1.0, 0.5, 0.0], &expected_three[..]),
    ] {
        let cfg = AdvConfig::with_eps(0.0);
        let pointwise = grpo_advantage(&rewards, &cfg).unwrap();
        let matrix = PreferenceMatrix::from_reward_differences("fixture", &rewards);
        let pairwise = pairwise_advantage(&matrix, &cfg).unwrap();
        for i in 0..rewards.len() {
            assert!(
                (pointwise[i] - expected[i]).abs() <= tol,
                "pointwise {pointwise:?}"
            );
            assert!(
                (pairwise[i] - expected[i]).abs() <= tol,
                "pairwise {pairwise:?}"
            );
        }
    }
    pass(2, "hand-algebra fixtures");
}

// 3. The full binary and 6x6 multiclass reward grids.
#[test]
fn acceptance_3_reward_tables() {
    for (p, g, want) in [
        (BinaryChoice::A, BinaryChoice::A, 1.0),
        (BinaryChoice::A, BinaryChoice::B, 0.0),
        (BinaryChoice::B, BinaryChoice::A, 0.0),
        (BinaryChoice::B, BinaryChoice::B, 1.0),
    ] {
        let r = binary_reward(&PreferenceLabel::Binary(p), &PreferenceLabel::Binary(g)).unwrap();
        assert_eq!(r, want, "binary ({p:?}, {g:?})");
    }
    let values = [-3i8, -2, -1, 1, 2, 3];
    for p in values {
        for g in values {
            let want = if p == g {
                1.0
            } else if (p < 0) == (g < 0) {
                0.5
            } else {
                0.0
            };
            let r = multiclass_reward(
                &PreferenceLabel::Multiclass(p),
                &PreferenceLabel::Multiclass(g),
            )
            .unwrap();
            assert_eq!(r, want, "multiclass ({p}, {g})");
        }
    }
    pass(3, "reward tables");
}

// 4. 10^4 randomized matrices: skew symmetry, zero diagonal, advantages
//    summing to zero, scale invariance at eps = 0.
#[test]
fn acceptance_4_matrix_invariants() {
    let mut rng = substream(4, "acceptance-matrices");
    for _ in 0..10_000 {
        let g = 2 + (rng.random::<u32>() % 7) as usize;
        let mut matrix = PreferenceMatrix::zeros("inv", g);
        for i in 0..g {
            for j in (i + 1)..g {
                matrix.set_pair(i, j, (rng.random::<f64>() - 0.5) * 10.0);
            }
        }
        matrix.verify().expect("construction preserves invariants");
        for i in 0..g {
            assert_eq!(matrix.entry(i, i), 0.0);
            for j in 0..g {
                assert_eq!(matrix.entry(i, j), -matrix.entry(j, i));
            }
        }
        let adv = pairwise_advantage(&matrix, &AdvConfig::default()).unwrap();
        assert!(adv.iter().sum::<f64>().abs() <= 1e-9);
        let cfg0 = AdvConfig::with_eps(0.0);
        let base = pairwise_advantage(&matrix, &cfg0).unwrap();
        let scaled = pairwise_advantage(&matrix.scaled(11.0), &cfg0).unwrap();
        for (b, s) in base.iter().zip(&scaled) {
            assert!((b - s).abs() <= 1e-9);
        }
    }
    pass(4, "matrix invariants");
}

fn synthetic_example(id: &str) -> PreferenceExample {
    PreferenceExample {
        id: id.to_string(),
        context: "c".into(),
        response_a: "a".into(),
        response_b: "b".into(),
        gold_label: PreferenceLabel::Binary(BinaryChoice::B),
    }
}

fn trajectory(id: &str, len: usize, correct: bool) -> TrajectoryRecord {
    TrajectoryRecord {
        example_id: id.to_string(),
        reasoning: "t".into(),
        reasoning_len: len,
        predicted_label: PreferenceLabel::Binary(if correct {
            BinaryChoice::B
        } else {
            BinaryChoice::A
        }),
    }
}

// 5. Curation selection properties on randomized corpora, and the
//    discard rate matching (1-p)^10 within 3 binomial sigma over 10^4
//    instances.
#[test]
fn acceptance_5_curation() {
    let mut rng = substream(5, "acceptance-curation");
    // Selection properties on randomized per-example trajectory sets.
    for _ in 0..500 {
        let ex = synthetic_example("e");
        let trajs: Vec<TrajectoryRecord> = (0..10)
            .map(|_| trajectory("e", rng.random_range(1..4000), rng.random_bool(0.5)))
            .collect();
        for strategy in [
            SelectionStrategy::LongestCorrect,
            SelectionStrategy::ShortestCorrect,
        ] {
            let cfg = CurationConfig {
                strategy,
                ..CurationConfig::default()
            };
            match select_warmup_trajectory(&ex, &trajs, &cfg).unwrap() {
                Selection::Kept(w) => {
                    assert_eq!(w.chosen.predicted_label, ex.gold_label);
                    for t in trajs.iter().filter(|t| t.predicted_label == ex.gold_label) {
                        match strategy {
                            SelectionStrategy::LongestCorrect => {
                                assert!(t.reasoning_len <= w.chosen.reasoning_len)
                            }
                            SelectionStrategy::ShortestCorrect => {
                                assert!(t.reasoning_len >= w.chosen.reasoning_len)
                            }
                        }
                    }
                }
                Selection::Discarded => {
                    assert!(trajs.iter().all(|t| t.predicted_label != ex.gold_label))
                }
            }
        }
    }

    // Analytic binomial oracle for the discard rate.
    let p = 0.3f64;
    let m = 10usize;
    let n = 10_000usize;
    let mut examples = Vec::with_capacity(n);
    let mut trajs = Vec::with_capacity(n * m);
    for i in 0..n {
        let id = format!("e{i}");
        examples.push(synthetic_example(&id));
        for _ in 0..m {
            trajs.push(trajectory(
                &id,
                rng.random_range(1..4000),
                rng.random_bool(p),
            ));
        }
    }
    let (kept, report) =
        build_warmup_dataset(&examples, &trajs, &CurationConfig::default()).unwrap();
    assert_eq!(report.kept + report.discarded, n);
    assert_eq!(kept.len(), report.kept);
    let expected = (1.0 - p).powi(m as i32);
    let sigma = (expected * (1.0 - expected) / n as f64).sqrt();
    assert!(
        (report.discard_rate - expected).abs() <= 3.0 * sigma,
        "discard rate {} vs (1-p)^10 = {expected}",
        report.discard_rate
    );
    pass(5, "curation");
}

// Exact binomial voted accuracy with half-weighted ties.
fn choose(n: u64, k: u64) -> f64 {
    let mut out = 1.0f64;
    for i in 0..k {
        out = out * (n - i) as f64 / (i + 1) as f64;
    }
    out
}

fn binomial_vote_accuracy(p: f64, m: u64) -> f64 {
    (0..=m)
        .map(|k| {
            let prob = choose(m, k) * p.powi(k as i32) * (1.0 - p).powi((m - k) as i32);
            if 2 * k > m {
                prob
            } else if 2 * k == m {
                0.5 * prob
            } else {
                0.0
            }
        })
        .sum()
}

// 6. Simulated majority voting at p = 0.8, m = 16 matches the binomial
//    prediction within 3 sigma over 10^5 trials; analytic accuracy is
//    monotone over odd m.
#[test]
fn acceptance_6_voting() {
    let p = 0.8f64;
    let m = 16usize;
    let trials = 100_000usize;
    let expected = binomial_vote_accuracy(p, m as u64);
    let gold = PreferenceLabel::Binary(BinaryChoice::B);
    let wrong = PreferenceLabel::Binary(BinaryChoice::A);
    let mut rng = substream(6, "acceptance-voting");
    let cfg = VoteConfig::default();
    let mut hits = 0usize;
    for _ in 0..trials {
        let ballot: Vec<Judgment> = (0..m)
            .map(|_| Judgment {
                reasoning: String::new(),
                reasoning_len: 1,
                label: if rng.random_bool(p) { gold } else { wrong },
            })
            .collect();
        if majority_vote(&ballot, &cfg, &mut rng).unwrap() == gold {
            hits += 1;
        }
    }
    let freq = hits as f64 / trials as f64;
    let sigma = (expected * (1.0 - expected) / trials as f64).sqrt();
    assert!(
        (freq - expected).abs() <= 3.0 * sigma,
        "simulated {freq} vs binomial {expected} (3 sigma {})",
        3.0 * sigma
    );
    let mut last = 0.0;
    for odd_m in (1..=15u64).step_by(2) {
        let acc = binomial_vote_accuracy(p, odd_m);
        assert!(acc > last, "m={odd_m}: {acc} <= {last}");
        last = acc;
    }
    pass(6, "voting");
}

// 7. Analytic gradients of the SFT loss, exact KL, and the full clipped
//    objective match central finite differences within 1e-4 relative
//    error on 100 randomized tiny instances.
#[test]
fn acceptance_7_gradient_checks() {
    let report = gradient_oracle(7, 100).unwrap();
    assert!(
        report.max_sft_rel_err <= 1e-4,
        "sft {}",
        report.max_sft_rel_err
    );
    assert!(
        report.max_kl_rel_err <= 1e-4,
        "kl {}",
        report.max_kl_rel_err
    );
    assert!(
        report.max_surrogate_rel_err <= 1e-4,
        "surrogate {}",
        report.max_surrogate_rel_err
    );
    pass(7, "gradient checks");
}

fn rlhf_config(seed: u64) -> TrainConfig {
    TrainConfig {
        group_size: 4,
        rollout_batch: 8,
        steps: 500,
        seed,
        ..TrainConfig::default()
    }
}

fn pairwise_judge(p_max: f64, kappa: f64) -> PairwiseJudgeConfig {
    PairwiseJudgeConfig {
        sim: SimJudgeConfig {
            p_max,
            kappa,
            ..SimJudgeConfig::default()
        },
        ..PairwiseJudgeConfig::default()
    }
}

// 8. Desk-scale pairwise RLHF: over 5 seeds on the V=8, L=4 task with
//    G=4, an accurate judge (p_max 0.95) gains >= 0.3 mean true reward
//    within 500 steps, a pure-noise judge gains <= 0.05, and the
//    pointwise-oracle and perfect-judge runs end within 0.05 of each
//    other. Total runtime under two minutes.
#[test]
fn acceptance_8_end_to_end_pairwise_rlhf() {
    let start = Instant::now();
    let seeds = [1u64, 2, 3, 4, 5];
    let mut accurate_gain = 0.0;
    let mut noise_gain = 0.0;
    let mut perfect_final = 0.0;
    let mut pointwise_final = 0.0;
    for &seed in &seeds {
        let mut task_rng = substream(seed, "task");
        let task = SyntheticTask::random(8, 4, &mut task_rng);
        let cfg = rlhf_config(seed);

        let accurate = train_rlhf(
            &task,
            Some(&pairwise_judge(0.95, 8.0)),
            &cfg,
            AdvMode::PairwiseMatrix,
        )
        .unwrap();
        accurate_gain += accurate.final_mean_true_reward() - accurate.initial_mean_true_reward();

        let noise = train_rlhf(
            &task,
            Some(&pairwise_judge(0.5, 8.0)),
            &cfg,
            AdvMode::PairwiseMatrix,
        )
        .unwrap();
        noise_gain += noise.final_mean_true_reward() - noise.initial_mean_true_reward();

        let perfect = train_rlhf(
            &task,
            Some(&pairwise_judge(1.0, 1e6)),
            &cfg,
            AdvMode::PairwiseMatrix,
        )
        .unwrap();
        perfect_final += perfect.final_mean_true_reward();

        let pointwise = train_rlhf(&task, None, &cfg, AdvMode::PointwiseRule).unwrap();
        pointwise_final += pointwise.final_mean_true_reward();
    }
    let n = seeds.len() as f64;
    accurate_gain /= n;
    noise_gain /= n;
    perfect_final /= n;
    pointwise_final /= n;
    let elapsed = start.elapsed();

    assert!(
        accurate_gain >= 0.3,
        "accurate-judge gain {accurate_gain} < 0.3"
    );
    assert!(noise_gain <= 0.05, "noise-judge gain {noise_gain} > 0.05");
    assert!(
        (perfect_final - pointwise_final).abs() <= 0.05,
        "perfect-judge {perfect_final} vs pointwise {pointwise_final}"
    );
    assert!(elapsed.as_secs_f64() < 120.0, "took {elapsed:?}");
    pass(8, "end-to-end pairwise rlhf");
}

fn strip_newline(raw: &str) -> &str {
    raw.strip_suffix('\n').unwrap_or(raw)
}

// 9. Rendered prompts byte-match the checked-in transcriptions, and
//    parsing inverts formatting on all eight labels.
#[test]
fn acceptance_9_template_goldens() {
    let ex = PreferenceExample {
        id: "golden".into(),
        context: "What is 2+2?".into(),
        response_a: "2+2 equals 4.".into(),
        response_b: "The answer is 5.".into(),
        gold_label: PreferenceLabel::Binary(BinaryChoice::A),
    };
    let binary = render_prompt(LabelKind::Binary, &ex).unwrap();
    assert_eq!(
        binary.system_text,
        strip_newline(include_str!("../../core/tests/golden/binary_system.golden"))
    );
    let multiclass = render_prompt(LabelKind::Multiclass, &ex).unwrap();
    assert_eq!(
        multiclass.system_text,
        strip_newline(include_str!(
            "../../core/tests/golden/multiclass_system.golden"
        ))
    );
    let user_golden = strip_newline(include_str!("../../core/tests/golden/user_rendered.golden"));
    assert_eq!(binary.user_text, user_golden);
    assert_eq!(multiclass.user_text, user_golden);

    for label in PreferenceLabel::all_valid() {
        let raw = format_answer(&label);
        let judgment = parse_judgment(label.kind(), &raw, TokenConvention::Whitespace).unwrap();
        assert_eq!(judgment.label, label);
    }
    pass(9, "template goldens");
}

mod determinism {
    use super::pass;
    use std::fs;
    use std::path::{Path, PathBuf};
    use std::process::Command;

    fn bin() -> &'static str {
        env!("CARGO_BIN_EXE_pairadv")
    }

    fn run(args: &[&str], cwd: &Path) {
        let output = Command::new(bin())
            .args(args)
            .current_dir(cwd)
            .output()
            .expect("spawn pairadv");
        assert!(
            output.status.success(),
            "pairadv {args:?} failed:\n{}{}",
            String::from_utf8_lossy(&output.stdout),
            String::from_utf8_lossy(&output.stderr)
        );
    }

    fn assert_identical(dir_a: &Path, dir_b: &Path, files: &[&str]) {
        for file in files {
            let a = fs::read(dir_a.join(file)).unwrap_or_else(|_| panic!("missing {file}"));
            let b = fs::read(dir_b.join(file)).unwrap_or_else(|_| panic!("missing {file}"));
            assert_eq!(a, b, "{file} differs between identical runs");
        }
    }

    fn scratch() -> PathBuf {
        let dir = std::env::temp_dir().join(format!(
            "pairadv-acceptance-{}-{}",
            std::process::id(),
            std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .unwrap()
                .as_nanos()
        ));
        fs::create_dir_all(&dir).unwrap();
        dir
    }

    // 10. Reruns with the same resolved config are bit-identical across
    //     every dataset, matrix, and metric output.
    #[test]
    fn acceptance_10_cli_determinism() {
        let dir = scratch();
        let examples = dir.join("examples.jsonl");
        let mut lines = String::new();
        for i in 0..6 {
            let value = if i % 2 == 0 { "A" } else { "B" };
            lines.push_str(&format!(
                r#"{{"id":"e{i}","context":"question {i}","response_a":"first answer {i}","response_b":"second answer {i}","gold_label":{{"kind":"binary","value":"{value}"}}}}"#,
            ));
            lines.push('\n');
        }
        fs::write(&examples, lines).unwrap();

        let trajectories = dir.join("trajectories.jsonl");
        let mut lines = String::new();
        for i in 0..6 {
            for j in 0..3 {
                // Example e3 gets only wrong predictions.
                let value = match (i, (i + j) % 2 == 0) {
                    (3, _) => "A",
                    (_, true) if i % 2 == 0 => "A",
                    (_, true) => "B",
                    (_, false) if i % 2 == 0 => "B",
                    (_, false) => "A",
                };
                let words = vec!["w"; 5 + 7 * j].join(" ");
                lines.push_str(&format!(
                    r#"{{"example_id":"e{i}","reasoning":"{words}","predicted_label":{{"kind":"binary","value":"{value}"}}}}"#,
                ));
                lines.push('\n');
            }
        }
        fs::write(&trajectories, lines).unwrap();

        let groups = dir.join("groups.jsonl");
        fs::write(
            &groups,
            concat!(
                r#"{"group_id":"g0","prompt":"pick","responses":["one","two","three","four"],"true_rewards":[0.9,0.7,0.4,0.1]}"#,
                "\n",
                r#"{"group_id":"g1","prompt":"pick","responses":["x","y"],"true_rewards":[0.3,0.6]}"#,
                "\n"
            ),
        )
        .unwrap();

        let runs: Vec<(&str, Vec<String>, Vec<&str>)> = vec![
            (
                "curate",
                vec![
                    "curate".into(),
                    "--examples".into(),
                    examples.display().to_string(),
                    "--trajectories".into(),
                    trajectories.display().to_string(),
                ],
                vec!["config.resolved.json", "warmup.jsonl"],
            ),
            (
                "judge",
                vec![
                    "judge".into(),
                    "--dataset".into(),
                    examples.display().to_string(),
                    "--vote".into(),
                    "5".into(),
                ],
                vec!["config.resolved.json", "judgments.jsonl"],
            ),
            (
                "matrix",
                vec![
                    "matrix".into(),
                    "--groups".into(),
                    groups.display().to_string(),
                ],
                vec!["config.resolved.json", "matrices.jsonl"],
            ),
            (
                "train",
                vec![
                    "train".into(),
                    "--adv".into(),
                    "pairwise".into(),
                    "--steps".into(),
                    "40".into(),
                ],
                vec!["config.resolved.json", "metrics.csv"],
            ),
        ];

        for (name, args, outputs) in &runs {
            let out_a = dir.join(format!("{name}-a"));
            let out_b = dir.join(format!("{name}-b"));
            for out in [&out_a, &out_b] {
                let mut full: Vec<String> = args.clone();
                full.extend([
                    "--seed".to_string(),
                    "1234".to_string(),
                    "--out".to_string(),
                    out.display().to_string(),
                ]);
                let arg_refs: Vec<&str> = full.iter().map(|s| s.as_str()).collect();
                run(&arg_refs, &dir);
            }
            assert_identical(&out_a, &out_b, outputs);
        }

        fs::remove_dir_all(&dir).ok();
        pass(10, "cli determinism");
    }
}
