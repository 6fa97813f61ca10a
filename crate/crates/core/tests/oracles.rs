mod common;

use dualkit::ged::ged;
use dualkit::graph::{build_graph, GraphMode};
use dualkit::metrics::canonical_graph;
use dualkit::tol::Tolerance;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn isomorphism_oracle_agrees_with_cged() {
    let tol = Tolerance::default();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut positives = 0;
    for _ in 0..200 {
        let lp = common::random_small_lp(&mut rng);
        let kind = common::REWRITES[common::below(&mut rng, 5)];
        let other = common::rewrite(&lp, kind, &mut rng);
        let (ga, gb) = (canonical_graph(&lp, &tol), canonical_graph(&other, &tol));
        assert!(common::isomorphic(&ga, &gb, tol.atol, tol.rtol), "{kind:?}");
        let third = canonical_graph(&common::random_small_lp(&mut rng), &tol);
        let iso = common::isomorphic(&ga, &third, tol.atol, tol.rtol);
        assert_eq!(iso, ged(&ga, &third).unwrap().total == 0.0);
        positives += usize::from(!iso);
    }
    assert!(positives > 100);
}

#[test]
fn brute_force_handles_infinite_features() {
    let tol = Tolerance::default();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..100 {
        let a = build_graph(&common::random_small_lp(&mut rng), GraphMode::NgedCompat).unwrap();
        let b = build_graph(&common::random_small_lp(&mut rng), GraphMode::NgedCompat).unwrap();
        assert_eq!(
            common::brute_force_ged(&a, &b, tol.atol, tol.rtol),
            ged(&a, &b).unwrap().total
        );
    }
}
