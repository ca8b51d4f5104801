use locsys_core::codec::decode;
use locsys_core::verify::{ensure, run_law, verify, Outcome, Trial};
use locsys_core::Error;

#[test]
fn generator_suite_passes_for_any_seed() {
    for seed in [0, 1, 99, u64::MAX - 3] {
        assert!(verify("pushout-product-generators", seed, 5, 3).unwrap().passed());
    }
}

#[test]
fn triangle_identities_seed_one() {
    let r = verify("triangle-identities", 1, 50, 3).unwrap();
    assert_eq!(r.trials, 50);
    assert!(r.passed(), "{:?}", r.failures);
}

#[test]
fn projection_formula_seed_seven() {
    assert!(verify("projection-formula", 7, 25, 3).unwrap().passed());
}

/// Claims every complex is acyclic, which random complexes refute.
fn corrupted(t: &mut Trial) -> Outcome {
    let c = locsys_core::chain::ChainComplex::random(locsys_core::Field::Prime(2), 0, 1, 2, &mut t.rng);
    t.witness(locsys_core::codec::Document::Complex(c.clone()));
    ensure(locsys_core::chain::homology(&c).is_zero(), "nonzero homology")
}

#[test]
fn corrupted_law_is_caught_with_reproducers() {
    let r = run_law("corrupted", corrupted, 3, 30, 1);
    assert!(!r.passed());
    let seeds: Vec<u64> = r.failures.iter().map(|f| f.seed).collect();
    assert!(seeds.windows(2).all(|w| w[0] < w[1]));
    for f in &r.failures {
        let doc = decode(f.counterexample.as_deref().unwrap()).unwrap();
        assert_eq!(doc.kind(), "complex");
        // each failure reruns alone from its own seed
        assert_eq!(run_law("corrupted", corrupted, f.seed, 1, 1).failures.len(), 1);
    }
    let json = r.to_json();
    assert_eq!(json["failures"].as_array().unwrap().len(), r.failures.len());
}

#[test]
fn unknown_suite() {
    assert!(matches!(verify("frobnicate", 0, 1, 1), Err(Error::UnknownSuite(_))));
}
