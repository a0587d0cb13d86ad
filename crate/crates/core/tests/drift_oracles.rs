//! Monte Carlo drift against exhaustive enumeration on tiny populations.

use jumplab::algorithms::{AlgorithmConfig, InitPolicy};
use jumplab::bitpop::Population;
use jumplab::experiments::{
    enumerate_drift_exact, enumerate_generation_exact, one_step_drift, random_plateau_population,
    runtime_campaign, with_threads, Conditioning, ExactOperator,
};
use jumplab::fitness::FitnessSpec;
use jumplab::variation::{CrossoverKind, MutationSpec};

fn fixture() -> Population {
    random_plateau_population(8, 2, 4, 17).unwrap()
}

fn config(
    mutation: MutationSpec,
    p_c: f64,
    lambda_c: usize,
    crossover: CrossoverKind,
) -> AlgorithmConfig {
    let mut cfg = AlgorithmConfig::ga(
        FitnessSpec::JumpPrime { n: 8, k: 2 },
        4,
        1.0,
        p_c,
        lambda_c,
        0,
        u64::MAX,
    );
    cfg.mutation = mutation;
    cfg.crossover = crossover;
    cfg.init = InitPolicy::PlateauRandom;
    cfg
}

#[test]
fn three_sigma_coverage_over_repeated_invocations() {
    let pop = fixture();
    let cfg = config(
        MutationSpec::StandardBit { chi: 1.0 },
        0.5,
        2,
        CrossoverKind::Uniform,
    );
    let exact = enumerate_generation_exact(&pop, &cfg)
        .unwrap()
        .expected_next_s;
    let invocations = 60;
    let covered = (0..invocations)
        .filter(|&seed| {
            let r = one_step_drift(&pop, &cfg, 2_000, Conditioning::All, seed).unwrap();
            (r.mean_next_s - exact).abs() <= 3.0 * r.stderr
        })
        .count();
    assert!(
        covered as f64 >= 0.95 * invocations as f64,
        "{covered}/{invocations} intervals cover {exact}"
    );
}

#[test]
fn branch_conditioned_drift_matches_enumeration() {
    let pop = fixture();
    let spec = FitnessSpec::JumpPrime { n: 8, k: 2 };
    let cases = [
        (
            MutationSpec::StandardBit { chi: 1.0 },
            CrossoverKind::Uniform,
            3,
        ),
        (
            MutationSpec::PairedFlip { ell: 1 },
            CrossoverKind::Balanced,
            2,
        ),
        (
            MutationSpec::FixedRadius { radius: 2 },
            CrossoverKind::Boring,
            4,
        ),
    ];
    for (i, (mutation, crossover, lambda_c)) in cases.into_iter().enumerate() {
        let cfg = config(mutation, 0.4, lambda_c, crossover);
        let seed = 100 + i as u64;
        let ops = [
            (
                Conditioning::MutationOnly,
                ExactOperator::Mutation { mutation },
            ),
            (
                Conditioning::CrossoverOnly,
                ExactOperator::Crossover {
                    crossover,
                    mutation,
                    lambda_c,
                },
            ),
        ];
        for (conditioning, op) in ops {
            let exact = enumerate_drift_exact(&pop, &spec, &op)
                .unwrap()
                .expected_next_s;
            let r = one_step_drift(&pop, &cfg, 100_000, conditioning, seed).unwrap();
            let z = (r.mean_next_s - exact) / r.stderr.max(1e-12);
            assert!(
                z.abs() <= 4.0,
                "{mutation:?} {crossover:?} {conditioning:?}: z={z}"
            );
        }
        let exact = enumerate_generation_exact(&pop, &cfg)
            .unwrap()
            .expected_next_s;
        let r = one_step_drift(&pop, &cfg, 100_000, Conditioning::All, seed).unwrap();
        assert!(
            (r.mean_next_s - exact).abs() <= 4.0 * r.stderr,
            "{mutation:?} unconditioned: {} vs {exact}",
            r.mean_next_s
        );
    }
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let pop = fixture();
    let cfg = config(
        MutationSpec::StandardBit { chi: 1.0 },
        0.5,
        2,
        CrossoverKind::Uniform,
    );
    let one = with_threads(Some(1), || {
        one_step_drift(&pop, &cfg, 35_000, Conditioning::All, 9)
    })
    .unwrap()
    .unwrap();
    let three = with_threads(Some(3), || {
        one_step_drift(&pop, &cfg, 35_000, Conditioning::All, 9)
    })
    .unwrap()
    .unwrap();
    assert_eq!(one, three);

    let run_cfg = AlgorithmConfig::ga(
        FitnessSpec::Jump { n: 12, k: 2 },
        4,
        1.0,
        0.2,
        3,
        5,
        1_000_000,
    );
    let a = with_threads(Some(1), || runtime_campaign(&run_cfg, 6))
        .unwrap()
        .unwrap();
    let b = with_threads(Some(2), || runtime_campaign(&run_cfg, 6))
        .unwrap()
        .unwrap();
    assert_eq!(a.records, b.records);
}
