mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::*;
use modbound::brute::brute_force_max;
use modbound::corpus;
use modbound::optimizer::{optimize, refine, OptimizerConfig};
use modbound::{Partition, ScoreMatrix};

#[test]
fn parity_with_exhaustive_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut hits = 0;
    let trials = 100;
    for i in 0..trials {
        let n = 4 + i % 6;
        let density = [0.25, 0.4, 0.6][i % 3];
        let net = random_network(&mut rng, n, density, i % 2 == 0, i % 5 == 0);
        let sm = ScoreMatrix::from_network(&net).unwrap();
        let found = optimize(
            &sm,
            &OptimizerConfig {
                seed: i as u64,
                ..Default::default()
            },
        );
        let (max, _) = brute_force_max(&sm, 12).unwrap();
        assert!(found.modularity <= max);
        assert_eq!(sm.modularity(&found.partition).unwrap(), found.modularity);
        if found.modularity == max {
            hits += 1;
        }
    }
    assert!(
        hits * 100 >= trials * 95,
        "optimum reached on {hits} of {trials}"
    );
}

#[test]
fn deterministic_for_a_seed() {
    let net = corpus::LES_MISERABLES.network().unwrap();
    let sm = ScoreMatrix::from_network(&net).unwrap();
    let cfg = OptimizerConfig {
        seed: 5,
        ..Default::default()
    };
    assert_eq!(optimize(&sm, &cfg), optimize(&sm, &cfg));
}

#[test]
fn dyad_and_path() {
    let dyad = network(2, &[(0, 1, q(1, 1))], false).unwrap();
    let sm = ScoreMatrix::from_network(&dyad).unwrap();
    let best = optimize(&sm, &OptimizerConfig::default());
    assert_eq!(best.partition.num_communities(), 1);
    assert_eq!(
        refine(&sm, &best.partition, &OptimizerConfig::default()),
        best
    );

    let path = network(3, &[(0, 1, q(1, 1)), (1, 2, q(1, 1))], false).unwrap();
    let sm = ScoreMatrix::from_network(&path).unwrap();
    let r = refine(&sm, &Partition::singletons(3), &OptimizerConfig::default());
    assert_eq!(r.modularity, q(0, 1));
}

#[test]
fn bundled_optima() {
    for (entry, expected) in [
        (corpus::KARATE, 0.419790),
        (corpus::KNOKI, 0.0816327),
        (corpus::LES_MISERABLES, 0.566688),
    ] {
        let sm = ScoreMatrix::from_network(&entry.network().unwrap()).unwrap();
        let best = optimize(&sm, &OptimizerConfig::default());
        let q = modbound::rational::to_f64(&best.modularity);
        assert!((q - expected).abs() < 1e-6, "{}: {q}", entry.name);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn refine_never_decreases(net in arb_network(9, true), raw in prop::collection::vec(0usize..9, 9)) {
        let sm = ScoreMatrix::from_network(&net).unwrap();
        let start = Partition::new(&raw[..net.node_count()]);
        let before = sm.modularity(&start).unwrap();
        let after = refine(&sm, &start, &OptimizerConfig::default());
        prop_assert!(after.modularity >= before);
        prop_assert_eq!(sm.modularity(&after.partition).unwrap(), after.modularity);
    }
}
