//! Finite fields `F_{p^k} = F_p[x]/(m(x))` with a deterministic modulus: the
//! smallest monic irreducible of degree `k`, ordered by its coefficient vector
//! read as a base-`p` integer with the constant term least significant.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::Rng;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("characteristic {0} is too large (limit 2^62)")]
    TooLarge(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("degree {small} does not divide degree {big}")]
    NotSubfield { small: usize, big: usize },
    #[error("fields have different characteristic")]
    Characteristic,
}

pub(crate) fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub(crate) fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, p);
        }
        b = mul_mod(b, b, p);
        e >>= 1;
    }
    r
}

pub(crate) fn inv_mod(a: u64, p: u64) -> u64 {
    debug_assert!(a % p != 0);
    pow_mod(a, p - 2, p)
}

pub fn is_prime(n: u64) -> bool {
    g2rm_core::realquad::is_prime_u64(n)
}

/// Dense polynomials over `F_p`, constant term first, no trailing zeros.
pub(crate) mod fp_poly {
    use super::{inv_mod, mul_mod};

    pub fn trim(mut a: Vec<u64>) -> Vec<u64> {
        while a.last() == Some(&0) {
            a.pop();
        }
        a
    }

    pub fn sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let n = a.len().max(b.len());
        let mut out = vec![0; n];
        for (i, o) in out.iter_mut().enumerate() {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            *o = (x + p - y) % p;
        }
        trim(out)
    }

    pub fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u128; a.len() + b.len() - 1];
        let pp = p as u128;
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x as u128 * y as u128) % pp;
            }
        }
        trim(out.into_iter().map(|c| c as u64).collect())
    }

    /// `(q, r)` with `a = q b + r`.
    pub fn divrem(a: &[u64], b: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
        let b = trim(b.to_vec());
        assert!(!b.is_empty(), "division by zero polynomial");
        let mut r = trim(a.to_vec());
        if r.len() < b.len() {
            return (Vec::new(), r);
        }
        let inv = inv_mod(*b.last().unwrap(), p);
        let mut q = vec![0; r.len() - b.len() + 1];
        while r.len() >= b.len() {
            let shift = r.len() - b.len();
            let c = mul_mod(*r.last().unwrap(), inv, p);
            q[shift] = c;
            for (i, &y) in b.iter().enumerate() {
                r[shift + i] = (r[shift + i] + p - mul_mod(c, y, p)) % p;
            }
            r = trim(r);
        }
        (trim(q), r)
    }

    pub fn rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        divrem(a, b, p).1
    }

    pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
        while !b.is_empty() {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        monic(&a, p)
    }

    pub fn monic(a: &[u64], p: u64) -> Vec<u64> {
        match a.last() {
            None => Vec::new(),
            Some(&c) => {
                let inv = inv_mod(c, p);
                a.iter().map(|&x| mul_mod(x, inv, p)).collect()
            }
        }
    }

    /// `base^e mod m` with `e` given as base-2^64 limbs, least significant first.
    pub fn powmod(base: &[u64], e: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        let mut r = vec![1];
        let b = rem(base, m, p);
        for &limb in e.iter().rev() {
            for bit in (0..64).rev() {
                r = rem(&mul(&r, &r, p), m, p);
                if (limb >> bit) & 1 == 1 {
                    r = rem(&mul(&r, &b, p), m, p);
                }
            }
        }
        trim(r)
    }

    pub fn derivative(a: &[u64], p: u64) -> Vec<u64> {
        trim(a.iter().enumerate().skip(1).map(|(i, &c)| mul_mod(c, i as u64 % p, p)).collect())
    }

    pub fn eval(a: &[u64], x: u64, p: u64) -> u64 {
        a.iter().rev().fold(0, |acc, &c| (mul_mod(acc, x, p) + c) % p)
    }

    /// Rabin's test: `x^{p^k} = x mod f` and `gcd(x^{p^{k/r}} - x, f) = 1` for primes `r | k`.
    pub fn is_irreducible(f: &[u64], p: u64) -> bool {
        let k = f.len() - 1;
        if k == 0 {
            return false;
        }
        if k == 1 {
            return true;
        }
        let x = vec![0, 1];
        let frob = |g: &[u64]| powmod(g, &[p], f, p);
        let mut powers = vec![x.clone()];
        for _ in 0..k {
            let next = frob(powers.last().unwrap());
            powers.push(next);
        }
        if trim(sub(&powers[k], &x, p)) != Vec::<u64>::new() {
            return false;
        }
        let mut r = 2;
        let mut kk = k;
        while kk > 1 {
            if kk % r == 0 {
                while kk % r == 0 {
                    kk /= r;
                }
                let g = gcd(f, &sub(&powers[k / r], &x, p), p);
                if g.len() != 1 {
                    return false;
                }
            }
            r += 1;
        }
        true
    }
}

/// Smallest monic irreducible polynomial of degree `k` over `F_p`.
pub fn smallest_irreducible(p: u64, k: usize) -> Vec<u64> {
    let mut c = vec![0u64; k];
    loop {
        let mut f = c.clone();
        f.push(1);
        if fp_poly::is_irreducible(&f, p) {
            return f;
        }
        // increment the base-p counter, constant term first
        let mut i = 0;
        loop {
            assert!(i < k, "no irreducible polynomial of degree {k}");
            c[i] += 1;
            if c[i] < p {
                break;
            }
            c[i] = 0;
            i += 1;
        }
    }
}

/// An element of `F_{p^k}`: `k` coefficients in the polynomial basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fe(pub Vec<u64>);

/// Counters for multiplications in the extension and in the prime field.
#[derive(Debug, Default)]
pub struct OpCounter {
    ext_mults: AtomicU64,
    base_mults: AtomicU64,
    inversions: AtomicU64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize)]
pub struct OpCount {
    pub ext_mults: u64,
    pub base_mults: u64,
    pub inversions: u64,
}

impl std::ops::Sub for OpCount {
    type Output = OpCount;
    fn sub(self, o: OpCount) -> OpCount {
        OpCount {
            ext_mults: self.ext_mults - o.ext_mults,
            base_mults: self.base_mults - o.base_mults,
            inversions: self.inversions - o.inversions,
        }
    }
}

#[derive(Debug)]
pub struct FiniteField {
    p: u64,
    k: usize,
    modulus: Vec<u64>,
    /// `x^{p i} mod m` for `i < k`, the columns of the Frobenius map.
    frob: Vec<Vec<u64>>,
    size: BigUint,
    ops: OpCounter,
}

pub type Field = Arc<FiniteField>;

impl FiniteField {
    pub fn new(p: u64, k: usize) -> Result<Field, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if p >= 1 << 62 {
            return Err(FieldError::TooLarge(p));
        }
        if k == 0 {
            return Err(FieldError::ZeroDegree);
        }
        let modulus = smallest_irreducible(p, k);
        let xp = fp_poly::powmod(&[0, 1], &[p], &modulus, p);
        let mut frob = vec![vec![1]];
        for i in 1..k {
            let next = fp_poly::rem(&fp_poly::mul(&frob[i - 1], &xp, p), &modulus, p);
            frob.push(next);
        }
        let frob = frob
            .into_iter()
            .map(|mut c| {
                c.resize(k, 0);
                c
            })
            .collect();
        Ok(Arc::new(Self { p, k, modulus, frob, size: BigUint::from(p).pow(k as u32), ops: OpCounter::default() }))
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    /// `p^k`.
    pub fn size(&self) -> &BigUint {
        &self.size
    }

    pub fn ops(&self) -> OpCount {
        OpCount {
            ext_mults: self.ops.ext_mults.load(Ordering::Relaxed),
            base_mults: self.ops.base_mults.load(Ordering::Relaxed),
            inversions: self.ops.inversions.load(Ordering::Relaxed),
        }
    }

    pub fn zero(&self) -> Fe {
        Fe(vec![0; self.k])
    }

    pub fn one(&self) -> Fe {
        self.from_u64(1)
    }

    pub fn from_u64(&self, c: u64) -> Fe {
        let mut v = vec![0; self.k];
        v[0] = c % self.p;
        Fe(v)
    }

    pub fn from_i64(&self, c: i64) -> Fe {
        self.from_u64(c.rem_euclid(self.p as i64) as u64)
    }

    /// Element with the given coordinates, reduced modulo `p`; missing entries are zero.
    pub fn from_coeffs(&self, c: &[u64]) -> Fe {
        let mut v: Vec<u64> = c.iter().map(|&x| x % self.p).collect();
        if v.len() > self.k {
            v = fp_poly::rem(&fp_poly::trim(v), &self.modulus, self.p);
        }
        v.resize(self.k, 0);
        Fe(v)
    }

    /// The generator `x` of the polynomial basis.
    pub fn gen(&self) -> Fe {
        self.from_coeffs(&[0, 1])
    }

    pub fn is_zero(&self, a: &Fe) -> bool {
        a.0.iter().all(|&c| c == 0)
    }

    pub fn is_one(&self, a: &Fe) -> bool {
        a.0[0] == 1 && a.0[1..].iter().all(|&c| c == 0)
    }

    /// The value in `F_p` if `a` lies in the prime field.
    pub fn as_prime(&self, a: &Fe) -> Option<u64> {
        a.0[1..].iter().all(|&c| c == 0).then_some(a.0[0])
    }

    pub fn add(&self, a: &Fe, b: &Fe) -> Fe {
        let p = self.p;
        Fe(a.0.iter().zip(&b.0).map(|(&x, &y)| (x + y) % p).collect())
    }

    pub fn sub(&self, a: &Fe, b: &Fe) -> Fe {
        let p = self.p;
        Fe(a.0.iter().zip(&b.0).map(|(&x, &y)| (x + p - y) % p).collect())
    }

    pub fn neg(&self, a: &Fe) -> Fe {
        let p = self.p;
        Fe(a.0.iter().map(|&x| (p - x) % p).collect())
    }

    pub fn scale(&self, a: &Fe, c: u64) -> Fe {
        let p = self.p;
        Fe(a.0.iter().map(|&x| mul_mod(x, c, p)).collect())
    }

    pub fn mul(&self, a: &Fe, b: &Fe) -> Fe {
        let (p, k) = (self.p, self.k);
        self.ops.ext_mults.fetch_add(1, Ordering::Relaxed);
        self.ops.base_mults.fetch_add((k * k) as u64, Ordering::Relaxed);
        if k == 1 {
            return Fe(vec![mul_mod(a.0[0], b.0[0], p)]);
        }
        let pp = p as u128;
        let mut t = vec![0u128; 2 * k - 1];
        for (i, &x) in a.0.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.0.iter().enumerate() {
                t[i + j] = (t[i + j] + x as u128 * y as u128) % pp;
            }
        }
        // reduce by the monic modulus from the top
        for i in (k..2 * k - 1).rev() {
            let c = t[i];
            if c == 0 {
                continue;
            }
            t[i] = 0;
            for j in 0..k {
                let m = self.modulus[j] as u128;
                t[i - k + j] = (t[i - k + j] + (pp - c) * m) % pp;
            }
        }
        Fe(t[..k].iter().map(|&c| c as u64).collect())
    }

    pub fn sqr(&self, a: &Fe) -> Fe {
        self.mul(a, a)
    }

    pub fn inv(&self, a: &Fe) -> Option<Fe> {
        if self.is_zero(a) {
            return None;
        }
        self.ops.inversions.fetch_add(1, Ordering::Relaxed);
        let p = self.p;
        if self.k == 1 {
            return Some(Fe(vec![inv_mod(a.0[0], p)]));
        }
        // extended Euclid in F_p[x]: s a = g mod m
        let (mut r0, mut r1) = (self.modulus.clone(), fp_poly::trim(a.0.clone()));
        let (mut s0, mut s1) = (Vec::new(), vec![1u64]);
        while !r1.is_empty() {
            let (q, r) = fp_poly::divrem(&r0, &r1, p);
            let s = fp_poly::sub(&s0, &fp_poly::mul(&q, &s1, p), p);
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
        }
        debug_assert_eq!(r0.len(), 1);
        let c = inv_mod(r0[0], p);
        let mut v: Vec<u64> = s0.iter().map(|&x| mul_mod(x, c, p)).collect();
        v.resize(self.k, 0);
        Some(Fe(v))
    }

    pub fn pow(&self, a: &Fe, e: &BigUint) -> Fe {
        let mut r = self.one();
        for i in (0..e.bits()).rev() {
            r = self.sqr(&r);
            if e.bit(i) {
                r = self.mul(&r, a);
            }
        }
        r
    }

    pub fn pow_u64(&self, a: &Fe, e: u64) -> Fe {
        self.pow(a, &BigUint::from(e))
    }

    /// `a^p`, a linear map in the polynomial basis.
    pub fn frobenius(&self, a: &Fe) -> Fe {
        let p = self.p;
        let mut out = vec![0u128; self.k];
        for (i, &c) in a.0.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (o, &f) in out.iter_mut().zip(&self.frob[i]) {
                *o = (*o + c as u128 * f as u128) % p as u128;
            }
        }
        Fe(out.into_iter().map(|c| c as u64).collect())
    }

    pub fn frobenius_pow(&self, a: &Fe, j: usize) -> Fe {
        (0..j % self.k).fold(a.clone(), |acc, _| self.frobenius(&acc))
    }

    pub fn random<R: Rng>(&self, rng: &mut R) -> Fe {
        Fe((0..self.k).map(|_| rng.gen_range(0..self.p)).collect())
    }

    /// Euler criterion; zero counts as a square.
    pub fn is_square(&self, a: &Fe) -> bool {
        if self.is_zero(a) {
            return true;
        }
        let e = (&self.size - 1u32) >> 1;
        self.is_one(&self.pow(a, &e))
    }

    /// A square root by Tonelli-Shanks, or `None` for a non-square.
    pub fn sqrt(&self, a: &Fe) -> Option<Fe> {
        if self.is_zero(a) {
            return Some(self.zero());
        }
        if !self.is_square(a) {
            return None;
        }
        let qm1 = &self.size - 1u32;
        let s = qm1.trailing_zeros().unwrap_or(0);
        let t = &qm1 >> s;
        // deterministic non-residue: the first non-square among 2, 3, ..., then x + c
        let z = (2..self.p)
            .map(|c| self.from_u64(c))
            .chain((0..self.p).map(|c| self.from_coeffs(&[c, 1])))
            .find(|c| !self.is_square(c))
            .expect("a non-square exists in odd characteristic");
        let mut m = s;
        let mut c = self.pow(&z, &t);
        let mut tt = self.pow(a, &t);
        let mut r = self.pow(a, &((&t + 1u32) >> 1));
        while !self.is_one(&tt) {
            let mut i = 0;
            let mut x = tt.clone();
            while !self.is_one(&x) {
                x = self.sqr(&x);
                i += 1;
            }
            let mut b = c.clone();
            for _ in 0..(m - i - 1) {
                b = self.sqr(&b);
            }
            m = i;
            c = self.sqr(&b);
            tt = self.mul(&tt, &c);
            r = self.mul(&r, &b);
        }
        Some(r)
    }

    /// Multiplicative order of a nonzero element, given that it divides `p^k - 1`.
    pub fn mult_order(&self, a: &Fe) -> BigUint {
        let n = &self.size - 1u32;
        let mut ord = n.clone();
        for (r, _) in factor_biguint(&n) {
            while (&ord % &r).is_zero() && self.is_one(&self.pow(a, &(&ord / &r))) {
                ord /= &r;
            }
        }
        ord
    }

    /// Little-endian hex of the coefficients, `p`-adic digits separated by commas.
    pub fn to_hex(&self, a: &Fe) -> String {
        a.0.iter().map(|c| format!("{c:x}")).collect::<Vec<_>>().join(",")
    }

    pub fn from_hex(&self, s: &str) -> Option<Fe> {
        let v: Result<Vec<u64>, _> = s.split(',').map(|t| u64::from_str_radix(t.trim(), 16)).collect();
        let v = v.ok()?;
        (v.len() == self.k && v.iter().all(|&c| c < self.p)).then(|| Fe(v))
    }
}

/// Trial division followed by Pollard rho on the cofactor.
pub fn factor_biguint(n: &BigUint) -> Vec<(BigUint, u32)> {
    let mut out: Vec<(BigUint, u32)> = Vec::new();
    let mut n = n.clone();
    let push = |out: &mut Vec<(BigUint, u32)>, f: BigUint| {
        if let Some(e) = out.iter_mut().find(|(g, _)| *g == f) {
            e.1 += 1;
        } else {
            out.push((f, 1));
        }
    };
    for d in 2u32..10_000 {
        let db = BigUint::from(d);
        while !n.is_zero() && (&n % &db).is_zero() {
            n /= &db;
            push(&mut out, db.clone());
        }
    }
    let mut stack = vec![n];
    while let Some(m) = stack.pop() {
        if m.is_one() || m.is_zero() {
            continue;
        }
        if is_probable_prime(&m) {
            push(&mut out, m);
            continue;
        }
        let d = pollard_rho(&m);
        stack.push(&m / &d);
        stack.push(d);
    }
    out.sort();
    out
}

fn is_probable_prime(n: &BigUint) -> bool {
    let two = BigUint::from(2u32);
    if n < &two {
        return false;
    }
    for b in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let b = BigUint::from(b);
        if &b == n {
            return true;
        }
        if (n % &b).is_zero() {
            return false;
        }
    }
    let nm1 = n - 1u32;
    let s = nm1.trailing_zeros().unwrap_or(0);
    let d = &nm1 >> s;
    'witness: for a in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x.is_one() || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == nm1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_rho(n: &BigUint) -> BigUint {
    let mut c = BigUint::one();
    loop {
        let f = |x: &BigUint| (x * x + &c) % n;
        let (mut x, mut y, mut d) = (BigUint::from(2u32), BigUint::from(2u32), BigUint::one());
        while d.is_one() {
            x = f(&x);
            y = f(&f(&y));
            let diff = if x > y { &x - &y } else { &y - &x };
            d = diff.gcd(n);
        }
        if &d != n {
            return d;
        }
        c += 1u32;
    }
}

/// An embedding `F_{p^a} -> F_{p^b}` for `a | b`, sending the generator of the
/// small field to a root of its modulus in the big one.
#[derive(Clone, Debug)]
pub struct Embedding {
    small: Field,
    big: Field,
    /// Images of `1, x, ..., x^{a-1}`.
    images: Vec<Fe>,
}

impl Embedding {
    pub fn new(small: &Field, big: &Field) -> Result<Self, FieldError> {
        if small.p != big.p {
            return Err(FieldError::Characteristic);
        }
        if big.k % small.k != 0 {
            return Err(FieldError::NotSubfield { small: small.k, big: big.k });
        }
        let root = smallest_root(big, small.modulus());
        let mut images = vec![big.one()];
        for i in 1..small.k {
            let next = big.mul(&images[i - 1], &root);
            images.push(next);
        }
        Ok(Self { small: small.clone(), big: big.clone(), images })
    }

    pub fn small(&self) -> &Field {
        &self.small
    }

    pub fn big(&self) -> &Field {
        &self.big
    }

    pub fn apply(&self, a: &Fe) -> Fe {
        let big = &self.big;
        a.0.iter().zip(&self.images).fold(big.zero(), |acc, (&c, img)| big.add(&acc, &big.scale(img, c)))
    }
}

/// The smallest root (in coefficient order) of a polynomial over `F_p` that
/// splits in `big`. Roots are found among the `p`-power conjugates of one root,
/// which Cantor-Zassenhaus splitting produces.
fn smallest_root(big: &Field, f: &[u64]) -> Fe {
    use crate::poly::Poly;
    let coeffs: Vec<Fe> = f.iter().map(|&c| big.from_u64(c)).collect();
    let mut stack = vec![Poly::new(big, coeffs)];
    let mut roots = Vec::new();
    let mut seed = 1u64;
    let exp = (big.size() - 1u32) >> 1;
    while let Some(g) = stack.pop() {
        match g.degree() {
            None | Some(0) => continue,
            Some(1) => {
                let g = g.monic(big);
                roots.push(big.neg(&g.c[0]));
                continue;
            }
            _ => {}
        }
        loop {
            // deterministic splitting elements x + s, then s x^2 + x + 1
            seed += 1;
            let s = big.from_coeffs(&seed_to_digits(seed, big.p(), big.degree()));
            let t = Poly::new(big, vec![s, big.one()]);
            let h = t.powmod(big, &exp, &g);
            let h1 = h.sub(big, &Poly::constant(big, big.one()));
            let d = g.gcd(big, &h1);
            let dd = d.degree().unwrap_or(0);
            if dd > 0 && Some(dd) != g.degree() {
                let (q, _) = g.divrem(big, &d);
                stack.push(d);
                stack.push(q);
                break;
            }
        }
    }
    roots.sort();
    roots.into_iter().next().expect("polynomial splits in the big field")
}

fn seed_to_digits(mut s: u64, p: u64, k: usize) -> Vec<u64> {
    let mut v = Vec::with_capacity(k);
    for _ in 0..k {
        v.push(s % p);
        s /= p;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn moduli_are_irreducible_and_minimal() {
        for (p, k) in [(211, 1), (211, 2), (211, 6), (3, 4), (7, 3), (13, 12)] {
            let f = FiniteField::new(p, k).unwrap();
            assert!(fp_poly::is_irreducible(f.modulus(), p));
            assert_eq!(f.modulus().len(), k + 1);
        }
        // x^2 + 1 is irreducible mod 3 and nothing smaller is
        assert_eq!(smallest_irreducible(3, 2), vec![1, 0, 1]);
        assert_eq!(smallest_irreducible(2, 3), vec![1, 1, 0, 1]);
    }

    #[test]
    fn field_axioms_on_random_elements() {
        let f = FiniteField::new(211, 6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let (a, b, c) = (f.random(&mut rng), f.random(&mut rng), f.random(&mut rng));
            assert_eq!(f.mul(&a, &f.add(&b, &c)), f.add(&f.mul(&a, &b), &f.mul(&a, &c)));
            assert_eq!(f.mul(&f.mul(&a, &b), &c), f.mul(&a, &f.mul(&b, &c)));
            if !f.is_zero(&a) {
                assert!(f.is_one(&f.mul(&a, &f.inv(&a).unwrap())));
            }
            assert_eq!(f.frobenius(&a), f.pow_u64(&a, 211));
            assert_eq!(f.frobenius(&f.mul(&a, &b)), f.mul(&f.frobenius(&a), &f.frobenius(&b)));
            let sq = f.sqr(&a);
            let r = f.sqrt(&sq).unwrap();
            assert_eq!(f.sqr(&r), sq);
        }
        assert_eq!(f.frobenius_pow(&f.gen(), 6), f.gen());
    }

    #[test]
    fn sqrt_in_prime_field_with_high_two_adicity() {
        // 257 - 1 = 2^8
        let f = FiniteField::new(257, 1).unwrap();
        for a in 1..257 {
            let x = f.from_u64(a);
            match f.sqrt(&x) {
                Some(r) => assert_eq!(f.sqr(&r), x),
                None => assert!(!f.is_square(&x)),
            }
        }
    }

    #[test]
    fn embeddings_are_ring_maps_and_compose() {
        let f2 = FiniteField::new(211, 2).unwrap();
        let f6 = FiniteField::new(211, 6).unwrap();
        let f3 = FiniteField::new(211, 3).unwrap();
        let e = Embedding::new(&f2, &f6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let (a, b) = (f2.random(&mut rng), f2.random(&mut rng));
            assert_eq!(e.apply(&f2.mul(&a, &b)), f6.mul(&e.apply(&a), &e.apply(&b)));
            assert_eq!(e.apply(&f2.add(&a, &b)), f6.add(&e.apply(&a), &e.apply(&b)));
            // the image is fixed by the square of Frobenius
            let x = e.apply(&a);
            assert_eq!(f6.frobenius_pow(&x, 2), x);
        }
        assert!(matches!(Embedding::new(&f2, &f3), Err(FieldError::NotSubfield { .. })));
        let f1 = FiniteField::new(211, 1).unwrap();
        let e12 = Embedding::new(&f1, &f2).unwrap();
        let e16 = Embedding::new(&f1, &f6).unwrap();
        let c = f1.from_u64(77);
        assert_eq!(e.apply(&e12.apply(&c)), e16.apply(&c));
    }

    #[test]
    fn hex_round_trip() {
        let f = FiniteField::new(211, 3).unwrap();
        let a = f.from_coeffs(&[5, 210, 17]);
        assert_eq!(f.to_hex(&a), "5,d2,11");
        assert_eq!(f.from_hex("5,d2,11"), Some(a));
        assert_eq!(f.from_hex("5,d3,11"), None);
    }

    #[test]
    fn orders_and_factoring() {
        let f = FiniteField::new(211, 2).unwrap();
        let g = f.gen();
        let o = f.mult_order(&g);
        assert!((&(f.size() - 1u32) % &o).is_zero());
        let n = BigUint::from(1977054561u64);
        let fac = factor_biguint(&n);
        let prod = fac.iter().fold(BigUint::one(), |a, (p, e)| a * p.pow(*e));
        assert_eq!(prod, n);
        assert!(fac.iter().any(|(p, e)| *p == BigUint::from(3u32) && *e == 7));
    }
}
