//! Seeded property suite for the engine: every case draws fresh random
//! homogeneous states from the proptest seed.

use chiral::engine::laws::{
    commutator_sides, derivation_sides, random_state, translation_sides,
};
use chiral::engine::nth_product;
use chiral::states::System;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn systems() -> impl Strategy<Value = System> {
    prop_oneof![
        (1usize..=2).prop_map(System::heisenberg),
        (1usize..=2).prop_map(System::clifford),
        (1usize..=2).prop_map(System::omega),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn commutator_formula(sys in systems(), seed in any::<u64>(), wa in 0i32..=2, wb in 0i32..=2,
                          ws in 0i32..=2, m in -2i64..=2, n in -2i64..=2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_state(sys, wa, &mut rng);
        let b = random_state(sys, wb, &mut rng);
        let s = random_state(sys, ws, &mut rng);
        let (l, r) = commutator_sides(&a, &b, m, n, &s);
        prop_assert_eq!(l, r, "a = {}, b = {}, s = {}", a, b, s);
    }

    #[test]
    fn translation_covariance(sys in systems(), seed in any::<u64>(), wa in 0i32..=2,
                              ws in 0i32..=3, n in -2i64..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_state(sys, wa, &mut rng);
        let s = random_state(sys, ws, &mut rng);
        let (l, r) = translation_sides(&a, n, &s);
        prop_assert_eq!(l, r);
    }

    #[test]
    fn zero_modes_are_derivations(sys in systems(), seed in any::<u64>(), wa in 1i32..=2,
                                  wb in 0i32..=2, wc in 0i32..=2, n in -2i64..=2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_state(sys, wa, &mut rng);
        let b = random_state(sys, wb, &mut rng);
        let c = random_state(sys, wc, &mut rng);
        let (l, r) = derivation_sides(&a, &b, n, &c);
        prop_assert_eq!(l, r);
    }

    #[test]
    fn factors_embed_in_omega(n in 1usize..=2, fermionic in any::<bool>(), seed in any::<u64>(),
                              wa in 0i32..=2, wb in 0i32..=2, k in -2i64..=3) {
        let factor = if fermionic { System::clifford(n) } else { System::heisenberg(n) };
        let omega = System::omega(n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_state(factor, wa, &mut rng);
        let b = random_state(factor, wb, &mut rng);
        let alone = nth_product(&a, k, &b).with_system(omega);
        let inside = nth_product(&a.with_system(omega), k, &b.with_system(omega));
        prop_assert_eq!(alone, inside);
    }

    #[test]
    fn locality_bound(sys in systems(), seed in any::<u64>(), wa in 0i32..=2, wb in 0i32..=2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_state(sys, wa, &mut rng);
        let b = random_state(sys, wb, &mut rng);
        let poles = chiral::engine::ope(&a, &b);
        let top = poles.keys().max().copied().unwrap_or(0) as i32;
        prop_assert!(top <= wa + wb);
    }
}
