//! Random curves over tiny prime fields, checked against exhaustive enumeration.

use g2rm_jacobian::curve::HyperellipticCurve;
use g2rm_jacobian::pairing::{rank_mod, weil_matrix};
use g2rm_jacobian::torsion::{sylow, torsion_basis};
use g2rm_jacobian::zeta::valuation;
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashSet;
use std::sync::Arc;

fn random_curves(p: u64, count: usize, rng: &mut ChaCha8Rng) -> Vec<Arc<HyperellipticCurve>> {
    let mut out = Vec::new();
    while out.len() < count {
        let deg = if rng.gen_bool(0.5) { 5 } else { 6 };
        let mut f: Vec<u64> = (0..deg).map(|_| rng.gen_range(0..p)).collect();
        f.push(rng.gen_range(1..p));
        if let Ok(c) = HyperellipticCurve::from_point_counts(p, &f) {
            out.push(Arc::new(c));
        }
    }
    out
}

#[test]
fn weil_polynomial_from_counts_matches_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for p in [7u64, 11, 13, 17] {
        for c in random_curves(p, 4, &mut rng) {
            c.verify_weil().unwrap();
            let j = c.jacobian(1).unwrap();
            assert_eq!(BigUint::from(j.enumerate().unwrap().len()), c.group_order(1));
            // curve counts over F_{p^3} follow from the same polynomial
            let n3 = g2rm_jacobian::zeta::curve_points(c.weil(), p, 3);
            assert_eq!(num_bigint::BigInt::from(c.count_points(3).unwrap()), n3);
        }
    }
}

#[test]
fn group_order_kills_fifty_random_divisors() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for c in random_curves(31, 3, &mut rng) {
        for k in [1, 2, 3] {
            let j = c.jacobian(k).unwrap();
            for _ in 0..50 {
                let d = j.random(&mut rng);
                assert!(j.is_zero(&j.mul(&d, j.order())));
            }
        }
    }
}

#[test]
fn sylow_subgroups_match_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for p in [7u64, 11, 13] {
        for c in random_curves(p, 3, &mut rng) {
            let j = c.jacobian(1).unwrap();
            let all: HashSet<_> = j.enumerate().unwrap().into_iter().collect();
            for ell in [2u64, 3, 5, 7] {
                let part: Vec<_> = all.iter().filter(|d| j.ell_order(d, ell, 16).is_some()).collect();
                let s = sylow(&j, ell, &mut rng, 400).unwrap();
                assert_eq!(BigUint::from(ell).pow(s.log_order()), BigUint::from(part.len()));
                assert_eq!(s.log_order(), valuation(j.order(), ell));
                assert!(part.iter().all(|d| s.contains(d)));
                // J[l] by enumeration against the rank of the basis
                let l_tors = all.iter().filter(|d| j.is_zero(&j.mul_u64(d, ell))).count();
                assert_eq!(l_tors as u64, ell.pow(s.rank() as u32));
            }
        }
    }
}

#[test]
fn full_torsion_basis_is_certified_by_weil_pairing() {
    // J[3] of the p = 211 fixture curve is rational over F_{211^6}
    let c = Arc::new(
        HyperellipticCurve::new(211, &[56, 164, 62, 130, 109, 79, 31], g2rm_jacobian::zeta::weil_from_traces(211, 9, -17))
            .unwrap(),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    let j = c.jacobian(6).unwrap();
    let b = torsion_basis(&j, 3, 1, &mut rng).unwrap();
    assert_eq!(rank_mod(&weil_matrix(&j, &b, 3, 1, &mut rng).unwrap(), 3), 4);
    // J[9] is not rational there
    assert!(torsion_basis(&j, 3, 2, &mut rng).is_err());
    // over F_{211^2} only part of J[3] is rational
    let j2 = c.jacobian(2).unwrap();
    assert!(torsion_basis(&j2, 3, 1, &mut rng).is_err());
}
