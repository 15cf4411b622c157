//! Self-pairing data at a prime `l` above `ell`: the exponent `k`, the binary
//! quadratic form `S(a, b)` of self-pairing logarithms and its projective roots.
//!
//! With `T(R, R) = zeta^{S(a, b)}` for `R = aP + bQ` and `zeta` of order `ell^n`,
//! the exponent `k` satisfies `S = 0 mod ell^{n-k}` identically while `S / ell^{n-k}`
//! is a nonzero form over `F_ell`. Its roots are the cyclic subgroups whose
//! self-pairing drops below order `ell^k`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PairingError {
    #[error("self-pairing form vanishes identically (k = 0)")]
    Degenerate,
    #[error("pairing exponent k is zero; orientation needs the multi-chain search")]
    KZero,
    #[error("discrete logarithm does not exist in the subgroup of order {0}^{1}")]
    NoLog(u64, u32),
}

/// `k = 2n - nu_r` when `nu_r < 2n`, and `0` otherwise.
pub fn k_from_valuation(n: u32, nu_r: u32) -> u32 {
    if nu_r < 2 * n {
        2 * n - nu_r
    } else {
        0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairingProfile {
    pub n: u32,
    pub nu_r: u32,
    pub k: u32,
    pub r: u32,
}

impl PairingProfile {
    pub fn new(n: u32, nu_r: u32, r: u32) -> Self {
        Self { n, nu_r, k: k_from_valuation(n, nu_r), r }
    }
}

/// A point of `P^1(F_ell)`, normalized to `(1 : x2)` or `(0 : 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ProjPoint {
    pub x1: u64,
    pub x2: u64,
}

pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    if r0 != 1 {
        return None;
    }
    Some(s0.rem_euclid(m as i128) as u64)
}

impl ProjPoint {
    pub fn new(x1: u64, x2: u64, ell: u64) -> Option<Self> {
        let (x1, x2) = (x1 % ell, x2 % ell);
        if x1 != 0 {
            let inv = inv_mod(x1, ell)?;
            Some(Self { x1: 1, x2: x2 * inv % ell })
        } else if x2 != 0 {
            Some(Self { x1: 0, x2: 1 })
        } else {
            None
        }
    }
}

/// All `ell + 1` points of `P^1(F_ell)` in ascending order.
pub fn proj_points(ell: u64) -> Vec<ProjPoint> {
    let mut v = vec![ProjPoint { x1: 0, x2: 1 }];
    v.extend((0..ell).map(|b| ProjPoint { x1: 1, x2: b }));
    v
}

/// Coefficients `(lambda_PP, lambda_PQ + lambda_QP, lambda_QQ)` modulo `ell^n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelfPairingPoly {
    pub ell: u64,
    pub n: u32,
    pub coeffs: [u64; 3],
}

fn vall(mut x: u64, ell: u64, cap: u32) -> u32 {
    if x == 0 {
        return cap;
    }
    let mut v = 0;
    while x % ell == 0 && v < cap {
        x /= ell;
        v += 1;
    }
    v
}

impl SelfPairingPoly {
    pub fn new(ell: u64, n: u32, coeffs: [i64; 3]) -> Self {
        let m = ell.pow(n) as i64;
        Self { ell, n, coeffs: coeffs.map(|c| c.rem_euclid(m) as u64) }
    }

    pub fn from_lambdas(ell: u64, n: u32, pp: u64, pq: u64, qp: u64, qq: u64) -> Self {
        let m = ell.pow(n);
        Self { ell, n, coeffs: [pp % m, (pq + qp) % m, qq % m] }
    }

    pub fn modulus(&self) -> u64 {
        self.ell.pow(self.n)
    }

    /// `S(a, b)` modulo `ell^n`.
    pub fn eval(&self, a: u64, b: u64) -> u64 {
        let m = self.modulus() as u128;
        let (a, b) = (a as u128 % m, b as u128 % m);
        let [c0, c1, c2] = self.coeffs.map(|c| c as u128);
        ((c0 * a % m * a + c1 * a % m * b + c2 * b % m * b) % m) as u64
    }

    /// Largest `j <= n` with every coefficient divisible by `ell^j`.
    pub fn vanishing_order(&self) -> u32 {
        self.coeffs.iter().map(|&c| vall(c, self.ell, self.n)).min().unwrap_or(self.n)
    }

    /// The exponent `k = n - vanishing_order`.
    pub fn implied_k(&self) -> u32 {
        self.n - self.vanishing_order()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// `S / ell^{n-k}` reduced modulo `ell`.
    pub fn normalized(&self) -> Result<[u64; 3], PairingError> {
        if self.is_zero() {
            return Err(PairingError::Degenerate);
        }
        let s = self.ell.pow(self.vanishing_order());
        Ok(self.coeffs.map(|c| (c / s) % self.ell))
    }

    /// Whether the normalized form vanishes at `p`, i.e. `T(R, R)` has order below `ell^k`.
    pub fn is_root(&self, p: ProjPoint) -> Result<bool, PairingError> {
        let [c0, c1, c2] = self.normalized()?;
        let l = self.ell;
        Ok((c0 * p.x1 % l * p.x1 + c1 * p.x1 % l * p.x2 + c2 * p.x2 % l * p.x2) % l == 0)
    }
}

/// Projective roots of the normalized form: at most two cyclic subgroups of
/// order `ell` have a degenerate self-pairing.
pub fn degenerate_subgroups(s: &SelfPairingPoly) -> Result<Vec<ProjPoint>, PairingError> {
    let mut out = Vec::new();
    for p in proj_points(s.ell) {
        if s.is_root(p)? {
            out.push(p);
        }
    }
    debug_assert!(out.len() <= 2);
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Orientation {
    Descending,
    NotDescending,
}

/// Descending iff the self-pairing restricted to the subgroup is non-degenerate.
pub fn classify_direction(
    profile: &PairingProfile,
    subgroup: ProjPoint,
    s: &SelfPairingPoly,
) -> Result<Orientation, PairingError> {
    if profile.k == 0 {
        return Err(PairingError::KZero);
    }
    Ok(if s.is_root(subgroup)? { Orientation::NotDescending } else { Orientation::Descending })
}

/// Discrete log of `h` to base `g` of order `ell^n`, one `ell`-adic digit at a time.
/// `pow(x, e)` and `mul` act in the ambient group and `eq` compares elements.
pub fn ladic_log<G: Clone>(
    g: &G,
    h: &G,
    ell: u64,
    n: u32,
    pow: impl Fn(&G, u64) -> G,
    mul: impl Fn(&G, &G) -> G,
    eq: impl Fn(&G, &G) -> bool,
) -> Result<u64, PairingError> {
    let order = ell.pow(n);
    let gamma = pow(g, ell.pow(n - 1)); // order ell
    let g_inv = pow(g, order - 1);
    let mut x = 0u64;
    for j in 0..n {
        // h * g^{-x} has order dividing ell^{n-j}
        let hk = mul(h, &pow(&g_inv, x));
        let probe = pow(&hk, ell.pow(n - 1 - j));
        let mut digit = None;
        let mut acc = pow(g, 0);
        for d in 0..ell {
            if eq(&acc, &probe) {
                digit = Some(d);
                break;
            }
            acc = mul(&acc, &gamma);
        }
        let d = digit.ok_or(PairingError::NoLog(ell, n))?;
        x += d * ell.pow(j);
    }
    if eq(&pow(g, x), h) {
        Ok(x)
    } else {
        Err(PairingError::NoLog(ell, n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k_formula() {
        assert_eq!(k_from_valuation(3, 4), 2);
        assert_eq!(k_from_valuation(2, 5), 0);
        for n in 0..6 {
            assert_eq!(k_from_valuation(n, n), n);
        }
    }

    #[test]
    fn roots_of_small_forms() {
        let s = SelfPairingPoly::new(3, 1, [1, 0, 0]);
        assert_eq!(degenerate_subgroups(&s).unwrap(), vec![ProjPoint { x1: 0, x2: 1 }]);
        let s = SelfPairingPoly::new(3, 1, [1, 0, -1]);
        assert_eq!(
            degenerate_subgroups(&s).unwrap(),
            vec![ProjPoint { x1: 1, x2: 1 }, ProjPoint { x1: 1, x2: 2 }]
        );
        // a^2 + b^2 over F_3: -1 is not a square.
        let s = SelfPairingPoly::new(3, 1, [1, 0, 1]);
        assert!(degenerate_subgroups(&s).unwrap().is_empty());
        assert_eq!(degenerate_subgroups(&SelfPairingPoly::new(3, 2, [0, 0, 0])), Err(PairingError::Degenerate));
    }

    #[test]
    fn normalization_detects_k() {
        // n = 3, S = 9 * (a^2 - b^2): k = 1.
        let s = SelfPairingPoly::new(3, 3, [9, 0, -9]);
        assert_eq!(s.implied_k(), 1);
        assert_eq!(s.normalized().unwrap(), [1, 0, 2]);
        let prof = PairingProfile::new(3, 5, 1);
        assert_eq!(prof.k, 1);
        let root = ProjPoint::new(1, 1, 3).unwrap();
        let non = ProjPoint::new(0, 1, 3).unwrap();
        assert_eq!(classify_direction(&prof, root, &s).unwrap(), Orientation::NotDescending);
        assert_eq!(classify_direction(&prof, non, &s).unwrap(), Orientation::Descending);
        assert_eq!(classify_direction(&PairingProfile::new(2, 5, 1), non, &s), Err(PairingError::KZero));
    }

    #[test]
    fn proj_normalization() {
        assert_eq!(ProjPoint::new(2, 4, 5), Some(ProjPoint { x1: 1, x2: 2 }));
        assert_eq!(ProjPoint::new(0, 3, 5), Some(ProjPoint { x1: 0, x2: 1 }));
        assert_eq!(ProjPoint::new(5, 10, 5), None);
        assert_eq!(proj_points(3).len(), 4);
    }

    #[test]
    fn ladic_log_in_integers_mod() {
        // Subgroup of order 27 in (Z/109)^*: 108 = 4 * 27.
        let p = 109u64;
        let g = (2..p).map(|x| mod_pow(x, 4, p)).find(|&y| mod_pow(y, 9, p) != 1).unwrap();
        for e in [0u64, 1, 5, 13, 26] {
            let h = mod_pow(g, e, p);
            let x = ladic_log(&g, &h, 3, 3, |a, k| mod_pow(*a, k, p), |a, b| a * b % p, |a, b| a == b).unwrap();
            assert_eq!(x, e);
        }
    }

    fn mod_pow(mut b: u64, mut e: u64, m: u64) -> u64 {
        let mut r = 1;
        b %= m;
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % m;
            }
            b = b * b % m;
            e >>= 1;
        }
        r
    }
}
