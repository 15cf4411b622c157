use g2rm_jacobian::curve::CurveFixture;
use g2rm_jacobian::lab::{IdealContext, LabConfig, RealAction, TorsionLab};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

fn lab(seed: u64) -> TorsionLab<ChaCha8Rng> {
    let s = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures/p211_curve.json")).unwrap();
    let fx = CurveFixture::parse(&s).unwrap();
    let cm = fx.cm_fixture().unwrap().unwrap();
    let ctx = IdealContext::new(&cm.weil, cm.ell).unwrap();
    TorsionLab::new(Arc::new(fx.curve().unwrap()), ctx, LabConfig::default(), ChaCha8Rng::seed_from_u64(seed)).unwrap()
}

#[test]
fn torsion_fields_and_frobenius_depths() {
    let mut l = lab(3);
    assert_eq!(l.ctx.actions, [RealAction { a: 17, b: 1 }, RealAction { a: 26, b: -1 }]);
    assert_eq!(l.ctx.depth, [1, 1]);
    assert_eq!(l.ideal_torsion_degree(0, 1).unwrap(), 6);
    assert_eq!(l.ideal_torsion_degree(1, 1).unwrap(), 1);
    assert_eq!(l.full_torsion_degree(1).unwrap(), 6);

    // J[l1] is cut out over F_{q^6} by a Jordan block, J[l2] is fixed pointwise.
    let n1 = l.nu_from_frobenius(0).unwrap();
    assert_eq!(n1.nu, 0);
    assert_eq!(n1.levels[0].scalar, None);
    assert_eq!((n1.levels[0].stable_subgroups, n1.levels[0].total_subgroups), (1, 4));
    let n2 = l.nu_from_frobenius(1).unwrap();
    assert_eq!(n2.nu, 1);
    assert_eq!(n2.levels[0].scalar, Some(1));
    assert_eq!(n2.levels[0].stable_subgroups, 4);
}

#[test]
fn weil_pairing_isotropy_of_ideal_torsion() {
    let mut l = lab(4);
    let iso = l.weil_isotropy().unwrap();
    assert!(iso.direct_sum);
    assert_eq!((iso.pairs, iso.trivial), (16, 16));
}

#[test]
fn self_pairing_exponent_and_degenerate_kernels() {
    let mut l = lab(5);
    for i in 0..2 {
        let nu = l.nu_from_frobenius(i).unwrap().nu;
        let sp = l.self_pairing(i, nu).unwrap();
        assert_eq!(sp.measured_k, sp.predicted_k, "l{}", i + 1);
        assert_eq!(sp.form_k, sp.measured_k);
        assert_eq!(sp.degenerate_measured, sp.degenerate_form);
        assert!(sp.degenerate_measured.len() <= 2);
    }
}

#[test]
fn numerator_test_agrees_with_frobenius_depth() {
    let mut l = lab(6);
    for i in 0..2 {
        let nu = l.nu_from_frobenius(i).unwrap().nu;
        let el = l.el_theta(i, 1).unwrap();
        assert_eq!(el.e, 1);
        assert_eq!(el.member, nu >= 1, "l{}", i + 1);
        // dividing by alpha_i^2 is never integral here
        assert!(!l.el_theta(i, 2).unwrap().member);
    }
    // 3 pi / 3 is an endomorphism, pi / 3 is not
    assert!(l.el_test(&[0, 3, 0, 0].map(Into::into), 1).unwrap().member);
    assert!(!l.el_test(&[0, 1, 0, 0].map(Into::into), 1).unwrap().member);
}
