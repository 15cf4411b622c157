//! Miller functions on the Jacobian and the Tate and Weil pairings built from them.
//!
//! `f_{m,D}` has divisor `m E_D - E_{[mD]}` up to points at infinity, where `E_D`
//! is the effective part of the reduced representative. Functions are evaluated
//! on `A = E_{D+R} - E_R` for a random `R`, a degree-zero divisor in the class of
//! `D` with support away from infinity. A bad offset is retried.

use crate::curve::{Divisor, Jacobian};
use crate::field::{Fe, FiniteField};
use g2rm_core::pairingmodel::ladic_log;
use num_bigint::BigUint;
use num_traits::Zero;
use rand::Rng;
use thiserror::Error;

pub const MAX_RETRIES: usize = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PairingError {
    #[error("{m} does not divide the order of the multiplicative group of the field")]
    NoRootsOfUnity { m: BigUint },
    #[error("no usable offset divisor after {0} attempts")]
    DegenerateSupport(usize),
    #[error("argument is not killed by {0}")]
    NotTorsion(BigUint),
    #[error("value is not an l^n-th root of unity")]
    NoLog,
}

/// Values `f_{m,D}(E)` for each effective `E`, or `None` if some `E` meets a zero or pole.
pub fn miller(jac: &Jacobian, d: &Divisor, m: &BigUint, at: &[&Divisor]) -> Option<(Divisor, Vec<Fe>)> {
    let fl = jac.field();
    let mut vals = vec![fl.one(); at.len()];
    if m.is_zero() {
        return Some((jac.zero(), vals));
    }
    let mut t = d.clone();
    for i in (0..m.bits() - 1).rev() {
        let (t2, line) = jac.add_with_function(&t, &t, true);
        let line = line.expect("tracked");
        for (v, e) in vals.iter_mut().zip(at) {
            *v = fl.mul(&fl.sqr(v), &line.eval_effective(fl, e)?);
        }
        t = t2;
        if m.bit(i) {
            let (t3, line) = jac.add_with_function(&t, d, true);
            let line = line.expect("tracked");
            for (v, e) in vals.iter_mut().zip(at) {
                *v = fl.mul(v, &line.eval_effective(fl, e)?);
            }
            t = t3;
        }
    }
    Some((t, vals))
}

/// A random offset `R` with `deg E_{D+R} = deg E_R`.
fn offset<R: Rng>(jac: &Jacobian, d: &Divisor, rng: &mut R) -> (Divisor, Divisor) {
    loop {
        let r = jac.random(rng);
        let dr = jac.add(d, &r);
        if dr.u.degree() == r.u.degree() {
            return (dr, r);
        }
    }
}

/// `f_{m,D}(E_a) / f_{m,D}(E_b)`.
fn miller_ratio(jac: &Jacobian, d: &Divisor, m: &BigUint, ea: &Divisor, eb: &Divisor) -> Option<Fe> {
    let fl = jac.field();
    let (_, v) = miller(jac, d, m, &[ea, eb])?;
    Some(fl.mul(&v[0], &fl.inv(&v[1])?))
}

fn final_exponent(fl: &FiniteField, m: &BigUint) -> Result<BigUint, PairingError> {
    let qm1 = fl.size() - 1u32;
    if !(&qm1 % m).is_zero() {
        return Err(PairingError::NoRootsOfUnity { m: m.clone() });
    }
    Ok(qm1 / m)
}

/// Reduced Tate pairing `t_m(P, Q) = f_{m,P}(A_Q)^{(|F|-1)/m}` for `P` in `J[m]`.
pub fn tate<R: Rng>(jac: &Jacobian, p: &Divisor, q: &Divisor, m: &BigUint, rng: &mut R) -> Result<Fe, PairingError> {
    let fl = jac.field();
    let exp = final_exponent(fl, m)?;
    if !jac.is_zero(&jac.mul(p, m)) {
        return Err(PairingError::NotTorsion(m.clone()));
    }
    if jac.is_zero(p) || jac.is_zero(q) {
        return Ok(fl.one());
    }
    for _ in 0..MAX_RETRIES {
        let (qr, r) = offset(jac, q, rng);
        if let Some(v) = miller_ratio(jac, p, m, &qr, &r) {
            return Ok(fl.pow(&v, &exp));
        }
    }
    Err(PairingError::DegenerateSupport(MAX_RETRIES))
}

/// Weil pairing `e_m(P, Q) = f_P(A_Q) / f_Q(A_P)` on `J[m]`, with `div f_P = m A_P`.
pub fn weil<R: Rng>(jac: &Jacobian, p: &Divisor, q: &Divisor, m: &BigUint, rng: &mut R) -> Result<Fe, PairingError> {
    let fl = jac.field();
    final_exponent(fl, m)?;
    for d in [p, q] {
        if !jac.is_zero(&jac.mul(d, m)) {
            return Err(PairingError::NotTorsion(m.clone()));
        }
    }
    if jac.is_zero(p) || jac.is_zero(q) {
        return Ok(fl.one());
    }
    for _ in 0..MAX_RETRIES {
        let (pr, r1) = offset(jac, p, rng);
        let (qr, r2) = offset(jac, q, rng);
        let eval = || -> Option<Fe> {
            // f_P = f_{m,P+R1} / f_{m,R1}, evaluated on A_Q = E_{Q+R2} - E_{R2}
            let fp = fl.mul(&miller_ratio(jac, &pr, m, &qr, &r2)?, &fl.inv(&miller_ratio(jac, &r1, m, &qr, &r2)?)?);
            let fq = fl.mul(&miller_ratio(jac, &qr, m, &pr, &r1)?, &fl.inv(&miller_ratio(jac, &r2, m, &pr, &r1)?)?);
            Some(fl.mul(&fp, &fl.inv(&fq)?))
        };
        if let Some(v) = eval() {
            return Ok(v);
        }
    }
    Err(PairingError::DegenerateSupport(MAX_RETRIES))
}

/// The group `mu_{l^n}` inside a finite field, with a fixed generator.
#[derive(Clone, Debug)]
pub struct RootsOfUnity {
    ell: u64,
    n: u32,
    zeta: Fe,
}

impl RootsOfUnity {
    /// The generator is `t^{(|F|-1)/l^n}` for the first `t = x + c` of full order.
    pub fn new(fl: &FiniteField, ell: u64, n: u32) -> Result<Self, PairingError> {
        let m = BigUint::from(ell).pow(n);
        let exp = final_exponent(fl, &m)?;
        let base = if fl.degree() == 1 { fl.zero() } else { fl.gen() };
        for c in 1..fl.p() {
            let t = fl.add(&base, &fl.from_u64(c));
            let z = fl.pow(&t, &exp);
            if n == 0 || !fl.is_one(&fl.pow(&z, &BigUint::from(ell).pow(n - 1))) {
                return Ok(Self { ell, n, zeta: z });
            }
        }
        Err(PairingError::NoRootsOfUnity { m })
    }

    pub fn generator(&self) -> &Fe {
        &self.zeta
    }

    /// `x` with `zeta^x = h`.
    pub fn log(&self, fl: &FiniteField, h: &Fe) -> Result<u64, PairingError> {
        if self.n == 0 {
            return if fl.is_one(h) { Ok(0) } else { Err(PairingError::NoLog) };
        }
        ladic_log(&self.zeta, h, self.ell, self.n, |g, e| fl.pow_u64(g, e), |a, b| fl.mul(a, b), |a, b| a == b)
            .map_err(|_| PairingError::NoLog)
    }
}

/// Exponent `k` of the order `l^k` of a root of unity.
pub fn root_order_exp(fl: &FiniteField, h: &Fe, ell: u64, max: u32) -> Option<u32> {
    let mut cur = h.clone();
    for k in 0..=max {
        if fl.is_one(&cur) {
            return Some(k);
        }
        cur = fl.pow_u64(&cur, ell);
    }
    None
}

/// Matrix of `log e_m(B_i, B_j)`; a basis of `J[m]` gives a matrix of full rank mod `l`.
pub fn weil_matrix<R: Rng>(
    jac: &Jacobian,
    basis: &[Divisor],
    ell: u64,
    n: u32,
    rng: &mut R,
) -> Result<Vec<Vec<u64>>, PairingError> {
    let fl = jac.field();
    let mu = RootsOfUnity::new(fl, ell, n)?;
    let m = BigUint::from(ell).pow(n);
    let mut out = vec![vec![0; basis.len()]; basis.len()];
    for i in 0..basis.len() {
        for j in i + 1..basis.len() {
            let x = mu.log(fl, &weil(jac, &basis[i], &basis[j], &m, rng)?)?;
            out[i][j] = x;
            out[j][i] = (ell.pow(n) - x) % ell.pow(n);
        }
    }
    Ok(out)
}

/// Rank of an integer matrix over `F_l`.
pub fn rank_mod(m: &[Vec<u64>], ell: u64) -> usize {
    let mut a: Vec<Vec<u64>> = m.iter().map(|r| r.iter().map(|x| x % ell).collect()).collect();
    let cols = a.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..a.len()).find(|&r| a[r][c] != 0) else { continue };
        a.swap(rank, p);
        let inv = g2rm_core::pairingmodel::inv_mod(a[rank][c], ell).expect("prime modulus");
        for r in 0..a.len() {
            if r != rank && a[r][c] != 0 {
                let f = a[r][c] * inv % ell;
                for k in 0..cols {
                    a[r][k] = (a[r][k] + ell * ell - f * a[rank][k] % ell) % ell;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// `true` iff `h` is a primitive `m`-th root of unity for `m = l^n`.
pub fn is_primitive(fl: &FiniteField, h: &Fe, ell: u64, n: u32) -> bool {
    root_order_exp(fl, h, ell, n) == Some(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::HyperellipticCurve;
    use crate::torsion::sylow;
    use crate::zeta::weil_from_traces;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn ex1() -> Arc<HyperellipticCurve> {
        Arc::new(HyperellipticCurve::new(211, &[56, 164, 62, 130, 109, 79, 31], weil_from_traces(211, 9, -17)).unwrap())
    }

    #[test]
    fn miller_function_ends_at_multiple() {
        let c = ex1();
        let j = c.jacobian(1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let d = j.random(&mut rng);
        let e = j.random(&mut rng);
        for m in [1u32, 2, 3, 17, 255] {
            let (t, _) = miller(&j, &d, &BigUint::from(m), &[&e]).unwrap_or((j.mul(&d, &BigUint::from(m)), vec![]));
            assert_eq!(t, j.mul(&d, &BigUint::from(m)));
        }
    }

    #[test]
    fn weil_pairing_on_full_three_torsion() {
        let c = ex1();
        let j = c.jacobian(6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let s = sylow(&j, 3, &mut rng, 400).unwrap();
        let b = s.free_torsion(1).unwrap();
        assert_eq!(b.len(), 4);
        let m = BigUint::from(3u32);
        let fl = j.field();
        // alternating and bilinear
        for p in &b {
            assert!(fl.is_one(&weil(&j, p, p, &m, &mut rng).unwrap()));
        }
        let e01 = weil(&j, &b[0], &b[1], &m, &mut rng).unwrap();
        let e10 = weil(&j, &b[1], &b[0], &m, &mut rng).unwrap();
        assert!(fl.is_one(&fl.mul(&e01, &e10)));
        let e02 = weil(&j, &b[0], &b[2], &m, &mut rng).unwrap();
        let sum = j.add(&b[1], &b[2]);
        assert_eq!(weil(&j, &b[0], &sum, &m, &mut rng).unwrap(), fl.mul(&e01, &e02));
        // offset independence
        assert_eq!(weil(&j, &b[0], &b[1], &m, &mut rng).unwrap(), e01);
        // non-degenerate on a basis
        let w = weil_matrix(&j, &b, 3, 1, &mut rng).unwrap();
        assert_eq!(rank_mod(&w, 3), 4);
    }

    #[test]
    fn tate_pairing_is_bilinear_and_offset_free() {
        let c = ex1();
        let j = c.jacobian(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = sylow(&j, 3, &mut rng, 400).unwrap();
        let m = BigUint::from(3u32);
        let fl = j.field();
        let t3 = s.torsion(1);
        let p = &t3[0].0;
        let q1 = j.random(&mut rng);
        let q2 = j.random(&mut rng);
        let a = tate(&j, p, &q1, &m, &mut rng).unwrap();
        assert_eq!(tate(&j, p, &q1, &m, &mut rng).unwrap(), a);
        let b = tate(&j, p, &q2, &m, &mut rng).unwrap();
        assert_eq!(tate(&j, p, &j.add(&q1, &q2), &m, &mut rng).unwrap(), fl.mul(&a, &b));
        // 3 Q lies in 3 J, so pairs trivially
        assert!(fl.is_one(&tate(&j, p, &j.mul_u64(&q1, 3), &m, &mut rng).unwrap()));
        let p2 = j.mul_u64(p, 2);
        assert_eq!(tate(&j, &p2, &q1, &m, &mut rng).unwrap(), fl.sqr(&a));
    }

    #[test]
    fn roots_of_unity_logs() {
        let fl = FiniteField::new(211, 6).unwrap();
        let mu = RootsOfUnity::new(&fl, 3, 2).unwrap();
        let z = mu.generator().clone();
        assert!(is_primitive(&fl, &z, 3, 2));
        for x in 0..9u64 {
            assert_eq!(mu.log(&fl, &fl.pow_u64(&z, x)).unwrap(), x);
        }
        assert!(RootsOfUnity::new(&fl, 3, 3).is_err());
    }
}
