//! Exact arithmetic in a real quadratic field `K0 = Q(sqrt d)` and its maximal order.
//!
//! Elements are written `a + b*omega` where `omega = (1 + sqrt d)/2` when
//! `d = 1 mod 4` and `omega = sqrt d` otherwise. Then `omega^2 = t*omega - n`
//! with `(t, n) = (1, (1 - d)/4)` or `(0, -d)`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{hnf, solve_in_hnf, IntMatrix};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RealQuadError {
    #[error("d = {0} must be a squarefree integer greater than 1")]
    BadDiscriminant(i64),
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("no generator found with |b| <= {bound}")]
    SearchBoundExceeded { bound: u64 },
    #[error("continued fraction period exceeded {0} steps")]
    PeriodBoundExceeded(usize),
    #[error("element is not integral")]
    NotIntegral,
    #[error("zero has no inverse or valuation")]
    Zero,
    #[error("value does not fit the JSON integer range")]
    JsonRange,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OmegaKind {
    /// `omega = (1 + sqrt d)/2`, used when `d = 1 mod 4`.
    HalfInteger,
    /// `omega = sqrt d`.
    Root,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RealQuadField {
    d: i64,
    omega_kind: OmegaKind,
}

fn is_squarefree(d: i64) -> bool {
    let mut m = d;
    let mut p = 2i64;
    while p * p <= m {
        if m % (p * p) == 0 {
            return false;
        }
        if m % p == 0 {
            m /= p;
        }
        p += 1;
    }
    true
}

pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            return false;
        }
        p += 1;
    }
    true
}

impl RealQuadField {
    pub fn new(d: i64) -> Result<Self, RealQuadError> {
        if d < 2 || !is_squarefree(d) {
            return Err(RealQuadError::BadDiscriminant(d));
        }
        let omega_kind = if d % 4 == 1 { OmegaKind::HalfInteger } else { OmegaKind::Root };
        Ok(Self { d, omega_kind })
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn omega_kind(&self) -> OmegaKind {
        self.omega_kind
    }

    /// Trace of omega.
    pub fn t(&self) -> BigInt {
        match self.omega_kind {
            OmegaKind::HalfInteger => BigInt::one(),
            OmegaKind::Root => BigInt::zero(),
        }
    }

    /// Norm of omega.
    pub fn n(&self) -> BigInt {
        match self.omega_kind {
            OmegaKind::HalfInteger => BigInt::from((1 - self.d) / 4),
            OmegaKind::Root => BigInt::from(-self.d),
        }
    }

    /// Field discriminant.
    pub fn discriminant(&self) -> BigInt {
        match self.omega_kind {
            OmegaKind::HalfInteger => BigInt::from(self.d),
            OmegaKind::Root => BigInt::from(4 * self.d),
        }
    }

    pub fn elem(&self, a: BigRational, b: BigRational) -> RealQuadElem {
        RealQuadElem { field: *self, a, b }
    }

    pub fn int(&self, a: i64, b: i64) -> RealQuadElem {
        self.elem(BigRational::from_integer(a.into()), BigRational::from_integer(b.into()))
    }

    pub fn from_ints(&self, a: BigInt, b: BigInt) -> RealQuadElem {
        self.elem(BigRational::from_integer(a), BigRational::from_integer(b))
    }

    pub fn zero(&self) -> RealQuadElem {
        self.int(0, 0)
    }

    pub fn one(&self) -> RealQuadElem {
        self.int(1, 0)
    }

    pub fn omega(&self) -> RealQuadElem {
        self.int(0, 1)
    }

    /// `(A + B sqrt d)/C` with integer `A, B` and `C > 0`.
    pub fn from_surd(&self, a: BigInt, b: BigInt, c: BigInt) -> RealQuadElem {
        let c = BigRational::from_integer(c);
        let a = BigRational::from_integer(a) / &c;
        let b = BigRational::from_integer(b) / &c;
        match self.omega_kind {
            // sqrt d = 2 omega - 1
            OmegaKind::HalfInteger => self.elem(a - &b, b * BigRational::from_integer(2.into())),
            OmegaKind::Root => self.elem(a, b),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RealQuadElem {
    field: RealQuadField,
    pub a: BigRational,
    pub b: BigRational,
}

impl RealQuadElem {
    pub fn field(&self) -> RealQuadField {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_integral(&self) -> bool {
        self.a.is_integer() && self.b.is_integer()
    }

    /// Integer coordinates, if integral.
    pub fn int_coords(&self) -> Result<(BigInt, BigInt), RealQuadError> {
        if !self.is_integral() {
            return Err(RealQuadError::NotIntegral);
        }
        Ok((self.a.to_integer(), self.b.to_integer()))
    }

    pub fn conj(&self) -> RealQuadElem {
        let t = BigRational::from_integer(self.field.t());
        self.field.elem(&self.a + &self.b * t, -self.b.clone())
    }

    pub fn norm(&self) -> BigRational {
        let t = BigRational::from_integer(self.field.t());
        let n = BigRational::from_integer(self.field.n());
        &self.a * &self.a + &self.a * &self.b * t + &self.b * &self.b * n
    }

    pub fn trace(&self) -> BigRational {
        let t = BigRational::from_integer(self.field.t());
        &self.a * BigRational::from_integer(2.into()) + &self.b * t
    }

    pub fn inverse(&self) -> Result<RealQuadElem, RealQuadError> {
        let nrm = self.norm();
        if nrm.is_zero() {
            return Err(RealQuadError::Zero);
        }
        let c = self.conj();
        Ok(self.field.elem(c.a / &nrm, c.b / nrm))
    }

    pub fn scale(&self, s: &BigRational) -> RealQuadElem {
        self.field.elem(&self.a * s, &self.b * s)
    }

    pub fn pow(&self, e: u32) -> RealQuadElem {
        let mut acc = self.field.one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// `(A, B, C)` with `self = (A + B sqrt d)/C`, `C > 0`.
    pub fn surd(&self) -> (BigInt, BigInt, BigInt) {
        let (a, b) = match self.field.omega_kind {
            OmegaKind::HalfInteger => {
                let half = BigRational::new(1.into(), 2.into());
                (&self.a + &self.b * &half, &self.b * half)
            }
            OmegaKind::Root => (self.a.clone(), self.b.clone()),
        };
        let c = a.denom().lcm(b.denom());
        let big_a = a.numer() * (&c / a.denom());
        let big_b = b.numer() * (&c / b.denom());
        (big_a, big_b, c)
    }

    /// Both real embeddings positive. Exact integer comparison.
    pub fn is_totally_positive(&self) -> bool {
        let (a, b, _c) = self.surd();
        let d = BigInt::from(self.field.d);
        a.is_positive() && &a * &a > &b * &b * d
    }

    fn sort_key(&self) -> (bool, BigRational, BigRational, BigRational) {
        (
            !self.is_totally_positive(),
            self.a.abs() + self.b.abs(),
            self.a.clone(),
            self.b.clone(),
        )
    }
}

impl fmt::Display for RealQuadElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w = match self.field.omega_kind {
            OmegaKind::HalfInteger => "w",
            OmegaKind::Root => "sqrt(d)",
        };
        if self.b.is_zero() {
            write!(f, "{}", self.a)
        } else if self.a.is_zero() {
            write!(f, "{}*{}", self.b, w)
        } else if self.b.is_negative() {
            write!(f, "{} - {}*{}", self.a, -self.b.clone(), w)
        } else {
            write!(f, "{} + {}*{}", self.a, self.b, w)
        }
    }
}

impl<'a> Add<&'a RealQuadElem> for &'a RealQuadElem {
    type Output = RealQuadElem;
    fn add(self, o: &RealQuadElem) -> RealQuadElem {
        debug_assert_eq!(self.field, o.field);
        self.field.elem(&self.a + &o.a, &self.b + &o.b)
    }
}

impl<'a> Sub<&'a RealQuadElem> for &'a RealQuadElem {
    type Output = RealQuadElem;
    fn sub(self, o: &RealQuadElem) -> RealQuadElem {
        debug_assert_eq!(self.field, o.field);
        self.field.elem(&self.a - &o.a, &self.b - &o.b)
    }
}

impl<'a> Mul<&'a RealQuadElem> for &'a RealQuadElem {
    type Output = RealQuadElem;
    fn mul(self, o: &RealQuadElem) -> RealQuadElem {
        debug_assert_eq!(self.field, o.field);
        let t = BigRational::from_integer(self.field.t());
        let n = BigRational::from_integer(self.field.n());
        let bb = &self.b * &o.b;
        let a = &self.a * &o.a - &bb * n;
        let b = &self.a * &o.b + &o.a * &self.b + bb * t;
        self.field.elem(a, b)
    }
}

impl Neg for &RealQuadElem {
    type Output = RealQuadElem;
    fn neg(self) -> RealQuadElem {
        self.field.elem(-self.a.clone(), -self.b.clone())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<RealQuadElem> for RealQuadElem {
            type Output = RealQuadElem;
            fn $m(self, o: RealQuadElem) -> RealQuadElem {
                (&self).$m(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// Ideal of `O_K0`, held in Hermite form `Z*a + Z*(b + c*omega)` with `c | a, c | b`.
#[derive(Clone, Debug)]
pub struct RealQuadIdeal {
    field: RealQuadField,
    repr: IdealRepr,
    a: BigInt,
    b: BigInt,
    c: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IdealRepr {
    Principal(RealQuadElem),
    TwoElement(BigInt, RealQuadElem),
}

impl PartialEq for RealQuadIdeal {
    fn eq(&self, o: &Self) -> bool {
        self.field == o.field && self.a == o.a && self.b == o.b && self.c == o.c
    }
}
impl Eq for RealQuadIdeal {}

impl RealQuadIdeal {
    fn from_generators(field: RealQuadField, gens: &[RealQuadElem], repr: IdealRepr) -> Result<Self, RealQuadError> {
        let w = field.omega();
        let mut rows: IntMatrix = Vec::new();
        for g in gens {
            for x in [g.clone(), g * &w] {
                let (a, b) = x.int_coords()?;
                // Column order (omega, 1) so the HNF reads (c, b) / (0, a).
                rows.push(vec![b, a]);
            }
        }
        let h = hnf(&rows);
        if h.len() != 2 {
            return Err(RealQuadError::Zero);
        }
        Ok(Self { field, repr, c: h[0][0].clone(), b: h[0][1].clone(), a: h[1][1].clone() })
    }

    pub fn principal(g: &RealQuadElem) -> Result<Self, RealQuadError> {
        if g.is_zero() {
            return Err(RealQuadError::Zero);
        }
        Self::from_generators(g.field, std::slice::from_ref(g), IdealRepr::Principal(g.clone()))
    }

    pub fn two_element(field: RealQuadField, l: BigInt, g: &RealQuadElem) -> Result<Self, RealQuadError> {
        let lg = field.from_ints(l.clone(), BigInt::zero());
        Self::from_generators(field, &[lg, g.clone()], IdealRepr::TwoElement(l, g.clone()))
    }

    pub fn field(&self) -> RealQuadField {
        self.field
    }

    pub fn repr(&self) -> &IdealRepr {
        &self.repr
    }

    /// `(a, b, c)` of the Hermite basis `{a, b + c omega}`.
    pub fn hermite(&self) -> (&BigInt, &BigInt, &BigInt) {
        (&self.a, &self.b, &self.c)
    }

    pub fn norm(&self) -> BigInt {
        &self.a * &self.c
    }

    pub fn is_unit_ideal(&self) -> bool {
        self.norm().is_one()
    }

    fn basis_rows(&self) -> IntMatrix {
        vec![vec![self.c.clone(), self.b.clone()], vec![BigInt::zero(), self.a.clone()]]
    }

    pub fn contains(&self, x: &RealQuadElem) -> bool {
        match x.int_coords() {
            Ok((a, b)) => solve_in_hnf(&self.basis_rows(), &[b, a]).is_some(),
            Err(_) => false,
        }
    }

    fn z_basis(&self) -> [RealQuadElem; 2] {
        [
            self.field.from_ints(self.a.clone(), BigInt::zero()),
            self.field.from_ints(self.b.clone(), self.c.clone()),
        ]
    }

    pub fn mul(&self, o: &RealQuadIdeal) -> RealQuadIdeal {
        let mut gens = Vec::with_capacity(4);
        for x in self.z_basis() {
            for y in o.z_basis() {
                gens.push(&x * &y);
            }
        }
        let repr = match (&self.repr, &o.repr) {
            (IdealRepr::Principal(g), IdealRepr::Principal(h)) => IdealRepr::Principal(g * h),
            _ => IdealRepr::TwoElement(self.norm() * o.norm(), gens[0].clone()),
        };
        Self::from_generators(self.field, &gens, repr).expect("product of nonzero ideals")
    }

    pub fn pow(&self, e: u32) -> RealQuadIdeal {
        let mut acc = RealQuadIdeal::principal(&self.field.one()).expect("unit ideal");
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Exact valuation of a nonzero integral element at this (prime) ideal.
    pub fn valuation(&self, x: &RealQuadElem) -> Result<u32, RealQuadError> {
        if x.is_zero() {
            return Err(RealQuadError::Zero);
        }
        if !x.is_integral() {
            return Err(RealQuadError::NotIntegral);
        }
        if self.is_unit_ideal() {
            return Err(RealQuadError::Zero);
        }
        let mut v = 0;
        let mut power = self.clone();
        while power.contains(x) {
            v += 1;
            power = power.mul(self);
        }
        Ok(v)
    }

    /// Residue of an integral element modulo a prime of norm `l`, as an integer in `[0, l)`.
    /// Only valid for degree-one primes, where `omega = r mod self` for `r = -b`.
    pub fn residue(&self, x: &RealQuadElem) -> Option<BigInt> {
        if !self.c.is_one() {
            return None;
        }
        let (a, b) = x.int_coords().ok()?;
        // omega - r lies in the ideal with r = -b mod a.
        let r = (-&self.b).mod_floor(&self.a);
        Some((a + b * r).mod_floor(&self.a))
    }
}

impl fmt::Display for RealQuadIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            IdealRepr::Principal(g) => write!(f, "({g})"),
            IdealRepr::TwoElement(l, g) => write!(f, "({l}, {g})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SplittingResult {
    Split(RealQuadIdeal, RealQuadIdeal),
    Inert,
    Ramified(RealQuadIdeal),
}

fn legendre(a: &BigInt, p: u64) -> i32 {
    let pb = BigInt::from(p);
    let a = a.mod_floor(&pb);
    if a.is_zero() {
        return 0;
    }
    let e = BigInt::from((p - 1) / 2);
    if a.modpow(&e, &pb).is_one() {
        1
    } else {
        -1
    }
}

/// Roots of `x^2 - t x + n` modulo `l`, ascending.
fn omega_roots(field: &RealQuadField, l: u64) -> Vec<u64> {
    let lb = BigInt::from(l);
    let t = field.t().mod_floor(&lb);
    let n = field.n().mod_floor(&lb);
    (0..l)
        .filter(|&r| {
            let r = BigInt::from(r);
            (&r * &r - &t * &r + &n).mod_floor(&lb).is_zero()
        })
        .collect()
}

/// Decomposition of an odd rational prime in `O_K0`. Split primes come back
/// ordered: `l1 = (l, omega - r1)` with `r1` the smaller root.
pub fn factor_rational_prime(field: &RealQuadField, l: u64) -> Result<SplittingResult, RealQuadError> {
    if l == 2 || !is_prime_u64(l) {
        return Err(RealQuadError::NotOddPrime(l));
    }
    let lb = BigInt::from(l);
    let ideal_at = |r: u64| {
        let g = field.from_ints(-BigInt::from(r), BigInt::one());
        RealQuadIdeal::two_element(*field, lb.clone(), &g).expect("nonzero")
    };
    match legendre(&field.discriminant(), l) {
        1 => {
            let roots = omega_roots(field, l);
            debug_assert_eq!(roots.len(), 2);
            Ok(SplittingResult::Split(ideal_at(roots[0]), ideal_at(roots[1])))
        }
        0 => {
            let roots = omega_roots(field, l);
            Ok(SplittingResult::Ramified(ideal_at(roots[0])))
        }
        _ => Ok(SplittingResult::Inert),
    }
}

/// Configuration for the generator search.
#[derive(Clone, Copy, Debug)]
pub struct SearchConfig {
    /// Bound on `|b|` is `multiplier * sqrt(N(I) * sqrt d)`, at least 16, raised to
    /// the size where some associate is certain to appear.
    pub multiplier: u64,
    /// Powers of the fundamental unit tried during canonicalization.
    pub unit_window: i32,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self { multiplier: 8, unit_window: 3 }
    }
}

/// Canonical generator of a principal ideal.
pub fn principal_generator(ideal: &RealQuadIdeal) -> Result<RealQuadElem, RealQuadError> {
    principal_generator_with(ideal, SearchConfig::default())
}

pub fn principal_generator_with(ideal: &RealQuadIdeal, cfg: SearchConfig) -> Result<RealQuadElem, RealQuadError> {
    let field = ideal.field;
    if let IdealRepr::Principal(g) = &ideal.repr {
        return canonicalize(g, cfg);
    }
    let norm = ideal.norm();
    let sqrt_d = BigInt::from(field.d).sqrt() + 1u32;
    let bound_sq = &norm * &sqrt_d;
    let bound = (bound_sq.sqrt() + 1u32) * cfg.multiplier;
    // Some associate has both embeddings below sqrt(N eps), so |b| <= 2 sqrt(N eps / d).
    let eps = fundamental_unit(&field)?.unit;
    let eps_size = eps.trace().abs().ceil().to_integer() + 1u32;
    let complete = (&norm * eps_size * 4u32 / BigInt::from(field.d)).sqrt() + 2u32;
    let bound = bound.max(complete).to_u64().unwrap_or(u64::MAX).max(16);
    let t = field.t();
    let n = field.n();
    // For fixed b, N(a + b omega) = s N(I) is a monic quadratic in a.
    for bb in 0..=bound {
        for b in [BigInt::from(bb), -BigInt::from(bb)] {
            if bb == 0 && b.is_negative() {
                continue;
            }
            for s in [1i32, -1] {
                let target: BigInt = &norm * s;
                // a^2 + (b t) a + (b^2 n - target) = 0
                let p = &b * &t;
                let disc: BigInt = &p * &p - (&b * &b * &n - &target) * BigInt::from(4);
                if disc.is_negative() {
                    continue;
                }
                let root = disc.sqrt();
                if &root * &root != disc {
                    continue;
                }
                for sr in [root.clone(), -root.clone()] {
                    let num = -&p + sr;
                    if !num.is_even() {
                        continue;
                    }
                    let x = field.from_ints(num / 2, b.clone());
                    if ideal.contains(&x) {
                        return canonicalize(&x, cfg);
                    }
                }
            }
        }
    }
    Err(RealQuadError::SearchBoundExceeded { bound })
}

/// Pick the associate `+-eps^k x` with the smallest key: totally positive
/// first, then smallest `|a| + |b|`, then lexicographic `(a, b)`.
pub fn canonicalize(x: &RealQuadElem, cfg: SearchConfig) -> Result<RealQuadElem, RealQuadError> {
    let eps = fundamental_unit(&x.field)?.unit;
    let eps_inv = eps.inverse()?;
    let mut best = x.clone();
    let mut up = x.clone();
    let mut down = x.clone();
    let mut cands = vec![x.clone()];
    for _ in 0..cfg.unit_window {
        up = &up * &eps;
        down = &down * &eps_inv;
        cands.push(up.clone());
        cands.push(down.clone());
    }
    for c in cands {
        for s in [c.clone(), -&c] {
            if s.sort_key() < best.sort_key() {
                best = s;
            }
        }
    }
    Ok(best)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitInfo {
    /// The fundamental unit greater than one.
    pub unit: RealQuadElem,
    pub norm: i32,
    /// With class number one, the narrow class group is trivial iff the unit has norm -1.
    pub narrow_class_trivial: bool,
}

pub const DEFAULT_PERIOD_BOUND: usize = 10_000;

pub fn fundamental_unit(field: &RealQuadField) -> Result<UnitInfo, RealQuadError> {
    fundamental_unit_with(field, DEFAULT_PERIOD_BOUND)
}

/// Fundamental unit from the continued fraction of omega: the first convergent
/// `h/k` with `N(h - k omega) = +-1` gives the unit `conj(h - k omega)`.
pub fn fundamental_unit_with(field: &RealQuadField, period_bound: usize) -> Result<UnitInfo, RealQuadError> {
    let d = BigInt::from(field.d);
    let isqrt = d.sqrt();
    // omega = (P + sqrt D)/Q
    let (mut p, mut q) = match field.omega_kind {
        OmegaKind::HalfInteger => (BigInt::one(), BigInt::from(2)),
        OmegaKind::Root => (BigInt::zero(), BigInt::one()),
    };
    let (mut h_prev, mut h) = (BigInt::zero(), BigInt::one());
    let (mut k_prev, mut k) = (BigInt::one(), BigInt::zero());
    for _ in 0..period_bound {
        let a = if q.is_positive() {
            (&p + &isqrt).div_floor(&q)
        } else {
            (&p + &isqrt + 1u32).div_floor(&q)
        };
        let h_next = &a * &h + &h_prev;
        let k_next = &a * &k + &k_prev;
        h_prev = std::mem::replace(&mut h, h_next);
        k_prev = std::mem::replace(&mut k, k_next);
        let x = field.from_ints(h.clone(), -k.clone());
        let nrm = x.norm();
        if nrm.abs().is_one() {
            let unit = x.conj();
            let norm = if nrm.is_positive() { 1 } else { -1 };
            return Ok(UnitInfo { unit, norm, narrow_class_trivial: norm == -1 });
        }
        p = &a * &q - &p;
        q = (&d - &p * &p) / &q;
    }
    Err(RealQuadError::PeriodBoundExceeded(period_bound))
}

pub fn is_totally_positive(x: &RealQuadElem) -> bool {
    x.is_totally_positive()
}

/// JSON field descriptor `{"d": int}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct FieldJson {
    pub d: i64,
}

/// JSON element `{"a": [num, den], "b": [num, den]}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ElemJson {
    pub a: [i64; 2],
    pub b: [i64; 2],
}

fn rat_to_pair(x: &BigRational) -> Result<[i64; 2], RealQuadError> {
    Ok([
        x.numer().to_i64().ok_or(RealQuadError::JsonRange)?,
        x.denom().to_i64().ok_or(RealQuadError::JsonRange)?,
    ])
}

impl RealQuadField {
    pub fn to_json(&self) -> FieldJson {
        FieldJson { d: self.d }
    }

    pub fn from_json(j: &FieldJson) -> Result<Self, RealQuadError> {
        Self::new(j.d)
    }

    pub fn elem_from_json(&self, j: &ElemJson) -> Result<RealQuadElem, RealQuadError> {
        if j.a[1] == 0 || j.b[1] == 0 {
            return Err(RealQuadError::Zero);
        }
        Ok(self.elem(
            BigRational::new(j.a[0].into(), j.a[1].into()),
            BigRational::new(j.b[0].into(), j.b[1].into()),
        ))
    }
}

impl RealQuadElem {
    pub fn to_json(&self) -> Result<ElemJson, RealQuadError> {
        Ok(ElemJson { a: rat_to_pair(&self.a)?, b: rat_to_pair(&self.b)? })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn rejects_bad_d() {
        assert!(RealQuadField::new(12).is_err());
        assert!(RealQuadField::new(1).is_err());
        assert!(RealQuadField::new(-5).is_err());
    }

    #[test]
    fn omega_relation() {
        for d in [2, 3, 5, 13, 1837] {
            let f = RealQuadField::new(d).unwrap();
            let w = f.omega();
            let lhs = &w * &w;
            let rhs = &w.scale(&BigRational::from_integer(f.t())) - &f.from_ints(f.n(), BigInt::zero());
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn split_1837_at_3() {
        let f = RealQuadField::new(1837).unwrap();
        let SplittingResult::Split(l1, l2) = factor_rational_prime(&f, 3).unwrap() else {
            panic!("3 should split");
        };
        assert_eq!(l1.norm(), BigInt::from(3));
        assert_eq!(l2.norm(), BigInt::from(3));
        assert_ne!(l1, l2);
        let three = RealQuadIdeal::principal(&f.int(3, 0)).unwrap();
        assert_eq!(l1.mul(&l2), three);
        let g = principal_generator(&l1).unwrap();
        // (43 + sqrt 1837)/2 = 21 + omega
        assert_eq!(g, f.int(21, 1));
        assert_eq!(g, f.from_surd(43.into(), 1.into(), 2.into()));
    }

    #[test]
    fn ramified_and_inert() {
        let f = RealQuadField::new(1837).unwrap();
        assert!(matches!(factor_rational_prime(&f, 1837), Err(_)));
        let f = RealQuadField::new(1837).unwrap();
        // 1837 = 11 * 167
        assert!(matches!(factor_rational_prime(&f, 11).unwrap(), SplittingResult::Ramified(_)));
        let f13 = RealQuadField::new(13).unwrap();
        assert_eq!(factor_rational_prime(&f13, 5).unwrap(), SplittingResult::Inert);
        assert!(matches!(factor_rational_prime(&f13, 3).unwrap(), SplittingResult::Split(..)));
    }

    #[test]
    fn rejects_two_and_composites() {
        let f = RealQuadField::new(13).unwrap();
        assert_eq!(factor_rational_prime(&f, 2), Err(RealQuadError::NotOddPrime(2)));
        assert_eq!(factor_rational_prime(&f, 9), Err(RealQuadError::NotOddPrime(9)));
    }

    #[test]
    fn inert_prime_generator_is_itself() {
        let f = RealQuadField::new(13).unwrap();
        let i = RealQuadIdeal::two_element(f, 5.into(), &f.int(5, 0)).unwrap();
        assert_eq!(i.norm(), BigInt::from(25));
        assert_eq!(principal_generator(&i).unwrap(), f.int(5, 0));
    }

    #[test]
    fn units() {
        let u5 = fundamental_unit(&RealQuadField::new(5).unwrap()).unwrap();
        assert_eq!(u5.unit, RealQuadField::new(5).unwrap().omega());
        assert_eq!(u5.norm, -1);
        assert!(u5.narrow_class_trivial);
        let f3 = RealQuadField::new(3).unwrap();
        let u3 = fundamental_unit(&f3).unwrap();
        assert_eq!(u3.unit, f3.int(2, 1));
        assert_eq!(u3.norm, 1);
        let f = RealQuadField::new(1837).unwrap();
        let u = fundamental_unit(&f).unwrap();
        assert_eq!(u.unit, f.int(14045261, 671055));
        assert!(!u.narrow_class_trivial);
    }

    #[test]
    fn total_positivity() {
        let f = RealQuadField::new(1837).unwrap();
        assert!(f.from_surd(43.into(), 1.into(), 2.into()).is_totally_positive());
        assert!(!f.int(-1, 0).is_totally_positive());
        assert!(!f.from_surd(0.into(), 1.into(), 1.into()).is_totally_positive());
    }

    #[test]
    fn valuation_multiplicative() {
        let f = RealQuadField::new(13).unwrap();
        let SplittingResult::Split(l1, _) = factor_rational_prime(&f, 3).unwrap() else { panic!() };
        let g = principal_generator(&l1).unwrap();
        let x = f.int(7, 2);
        let v = l1.valuation(&x).unwrap();
        assert_eq!(l1.valuation(&(&g * &x)).unwrap(), v + 1);
    }

    #[test]
    fn json_round_trip() {
        let f = RealQuadField::new(5).unwrap();
        let x = f.elem(q(3, 2), q(-1, 4));
        let j = x.to_json().unwrap();
        let s = serde_json::to_string(&j).unwrap();
        assert_eq!(s, r#"{"a":[3,2],"b":[-1,4]}"#);
        let back: ElemJson = serde_json::from_str(&s).unwrap();
        assert_eq!(f.elem_from_json(&back).unwrap(), x);
        let fj = serde_json::to_string(&f.to_json()).unwrap();
        assert_eq!(fj, r#"{"d":5}"#);
    }
}
