use g2rm_jacobian::curve::{CurveFixture, Jacobian};
use num_bigint::BigUint;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::{Arc, OnceLock};

fn jacobians() -> &'static [Jacobian; 2] {
    static J: OnceLock<[Jacobian; 2]> = OnceLock::new();
    J.get_or_init(|| {
        let s = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures/p211_curve.json")).unwrap();
        let c = Arc::new(CurveFixture::parse(&s).unwrap().curve().unwrap());
        [c.jacobian(1).unwrap(), c.jacobian(2).unwrap()]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn abelian_group_axioms(seed in any::<u64>(), k in 0usize..2) {
        let j = &jacobians()[k];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b, c) = (j.random(&mut rng), j.random(&mut rng), j.random(&mut rng));
        prop_assert_eq!(j.add(&a, &b), j.add(&b, &a));
        prop_assert_eq!(j.add(&j.add(&a, &b), &c), j.add(&a, &j.add(&b, &c)));
        prop_assert_eq!(j.add(&a, &j.zero()), a.clone());
        prop_assert!(j.is_zero(&j.add(&a, &j.neg(&a))));
        prop_assert!(j.is_zero(&j.mul(&a, j.order())));
    }

    #[test]
    fn scalar_multiplication_is_linear(seed in any::<u64>(), m in 0u64..5000, n in 0u64..5000) {
        let j = &jacobians()[0];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = j.random(&mut rng);
        let (bm, bn) = (BigUint::from(m), BigUint::from(n));
        prop_assert_eq!(j.mul(&a, &(&bm + &bn)), j.add(&j.mul(&a, &bm), &j.mul(&a, &bn)));
        prop_assert_eq!(j.mul(&j.mul(&a, &bm), &bn), j.mul(&a, &(&bm * &bn)));
    }

    #[test]
    fn frobenius_is_a_homomorphism_fixing_rational_classes(seed in any::<u64>()) {
        let [j1, j2] = jacobians();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b) = (j2.random(&mut rng), j2.random(&mut rng));
        prop_assert_eq!(j2.frobenius(&j2.add(&a, &b)), j2.add(&j2.frobenius(&a), &j2.frobenius(&b)));
        // pi^2 = 1 on J(F_{q^2})
        prop_assert_eq!(j2.frobenius(&j2.frobenius(&a)), a);
        let r = j1.random(&mut rng);
        prop_assert_eq!(j1.frobenius(&r), r);
    }
}
