//! Pairing invariants on the p = 211 fixture curve over `F_{211^2}` and `F_{211^6}`.

use g2rm_jacobian::curve::{HyperellipticCurve, Jacobian};
use g2rm_jacobian::pairing::{is_primitive, root_order_exp, tate, weil};
use g2rm_jacobian::torsion::sylow;
use g2rm_jacobian::zeta::weil_from_traces;
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

fn jac(k: usize) -> Jacobian {
    let c = HyperellipticCurve::new(211, &[56, 164, 62, 130, 109, 79, 31], weil_from_traces(211, 9, -17)).unwrap();
    Arc::new(c).jacobian(k).unwrap()
}

#[test]
fn tate_pairing_invariants_on_two_hundred_inputs() {
    let j = jac(2);
    let fl = j.field().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let s = sylow(&j, 3, &mut rng, 400).unwrap();
    // mu_{3^n} in F_{211^2} bounds the usable torsion level
    let n = g2rm_jacobian::zeta::valuation(&(fl.size() - 1u32), 3);
    let m = BigUint::from(3u32).pow(n);
    let tors: Vec<_> = s.torsion(n).into_iter().map(|g| g.0).collect();
    for _ in 0..200 {
        let coeffs: Vec<u64> = (0..tors.len()).map(|_| rng.gen_range(0..27)).collect();
        let p = j.combination(&coeffs, &tors);
        let qd = j.random(&mut rng);
        let t = tate(&j, &p, &qd, &m, &mut rng).unwrap();
        // output in mu_m
        assert!(root_order_exp(&fl, &t, 3, n).is_some());
        // bilinear in the first argument
        let a = rng.gen_range(1..9u64);
        assert_eq!(tate(&j, &j.mul_u64(&p, a), &qd, &m, &mut rng).unwrap(), fl.pow_u64(&t, a));
        // Galois equivariant: the q-power Frobenius of the base field F_211
        let g = tate(&j, &j.frobenius(&p), &j.frobenius(&qd), &m, &mut rng).unwrap();
        assert_eq!(g, fl.pow_u64(&t, 211));
        assert!(fl.is_one(&tate(&j, &p, &j.zero(), &m, &mut rng).unwrap()));
    }
}

#[test]
fn weil_pairing_invariants_on_full_three_torsion() {
    let j = jac(6);
    let fl = j.field().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    let s = sylow(&j, 3, &mut rng, 400).unwrap();
    let b = s.free_torsion(1).unwrap();
    let m = BigUint::from(3u32);
    let mut nontrivial = 0;
    for _ in 0..200 {
        let x: Vec<u64> = (0..4).map(|_| rng.gen_range(0..3)).collect();
        let y: Vec<u64> = (0..4).map(|_| rng.gen_range(0..3)).collect();
        let (p, q) = (j.combination(&x, &b), j.combination(&y, &b));
        let e = weil(&j, &p, &q, &m, &mut rng).unwrap();
        assert!(root_order_exp(&fl, &e, 3, 1).is_some());
        assert!(fl.is_one(&weil(&j, &p, &p, &m, &mut rng).unwrap()));
        assert!(fl.is_one(&fl.mul(&e, &weil(&j, &q, &p, &m, &mut rng).unwrap())));
        let e2 = weil(&j, &j.frobenius(&p), &j.frobenius(&q), &m, &mut rng).unwrap();
        assert_eq!(e2, fl.pow_u64(&e, 211));
        if is_primitive(&fl, &e, 3, 1) {
            nontrivial += 1;
        }
    }
    assert!(nontrivial > 0);
}
