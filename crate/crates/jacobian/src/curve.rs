//! Genus-2 curves `y^2 = f(x)` over `F_p` and their Jacobians over `F_{p^k}`
//! in Mumford representation, with Cantor's composition and reduction.
//!
//! A sextic `f` is moved to an odd-degree model by sending a rational root `r`
//! to infinity: `x = r + 1/z`, `y = w / z^3`. The two Jacobians are isomorphic
//! over `F_p`, so Frobenius and all torsion data agree.

use crate::field::{fp_poly, Fe, Field, FieldError, FiniteField};
use crate::poly::Poly;
use crate::zeta;
use g2rm_core::cmorder::{CMFixture, CMFixtureJson};
use num_bigint::{BigInt, BigUint};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CurveError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("f must have degree 5 or 6, found {0}")]
    BadDegree(usize),
    #[error("f is not squarefree over F_p")]
    NotSquarefree,
    #[error("sextic without a rational root; no odd-degree model over F_p")]
    NoRationalRoot,
    #[error("Weil polynomial disagrees with the curve: {0}")]
    WeilMismatch(String),
    #[error("malformed curve fixture: {0}")]
    Fixture(String),
    #[error("exhaustive count needs p < 2^16, got {0}")]
    TooLargeForEnumeration(u64),
}

/// `{p, f_coeffs, weil_poly, d, eta_minpoly, cm, notes}`; coefficient lists are constant term first.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CurveFixture {
    #[serde(default = "curve_schema")]
    pub schema: String,
    pub p: u64,
    pub f_coeffs: Vec<u64>,
    pub weil_poly: [i64; 5],
    pub d: i64,
    pub eta_minpoly: [i64; 5],
    /// CM data pinning the Weil number and the labelling of the primes above `ell`.
    #[serde(default)]
    pub cm: Option<CMFixtureJson>,
    #[serde(default)]
    pub slow: bool,
    #[serde(default)]
    pub notes: String,
}

pub const CURVE_SCHEMA: &str = "g2-curve/1";

fn curve_schema() -> String {
    CURVE_SCHEMA.to_string()
}

impl CurveFixture {
    pub fn parse(s: &str) -> Result<Self, CurveError> {
        let fx: CurveFixture = serde_json::from_str(s).map_err(|e| CurveError::Fixture(e.to_string()))?;
        if fx.schema != CURVE_SCHEMA {
            return Err(CurveError::Fixture(format!("unknown schema {}", fx.schema)));
        }
        Ok(fx)
    }

    pub fn weil(&self) -> [BigInt; 5] {
        self.weil_poly.map(BigInt::from)
    }

    /// The CM data, checked against `d`, `eta_minpoly` and `weil_poly`.
    pub fn cm_fixture(&self) -> Result<Option<CMFixture>, CurveError> {
        let Some(j) = &self.cm else { return Ok(None) };
        let cm = CMFixture::from_json(j).map_err(|e| CurveError::Fixture(e.to_string()))?;
        if cm.field.base().d() != self.d {
            return Err(CurveError::Fixture("cm.field.d differs from d".into()));
        }
        if cm.field.quartic() != &self.eta_minpoly.map(BigInt::from) {
            return Err(CurveError::Fixture("cm quartic differs from eta_minpoly".into()));
        }
        if cm.weil.weil_polynomial() != self.weil() {
            return Err(CurveError::WeilMismatch("cm Weil number has another characteristic polynomial".into()));
        }
        if cm.weil.q() != &BigInt::from(self.p) {
            return Err(CurveError::Fixture("cm Weil number has another q".into()));
        }
        Ok(Some(cm))
    }

    pub fn curve(&self) -> Result<HyperellipticCurve, CurveError> {
        HyperellipticCurve::new(self.p, &self.f_coeffs, self.weil())
    }
}

#[derive(Clone, Debug)]
pub struct HyperellipticCurve {
    p: u64,
    original: Vec<u64>,
    model: Vec<u64>,
    root: Option<u64>,
    weil: [BigInt; 5],
}

impl HyperellipticCurve {
    pub fn new(p: u64, f: &[u64], weil: [BigInt; 5]) -> Result<Self, CurveError> {
        if !crate::field::is_prime(p) || p == 2 {
            return Err(FieldError::NotPrime(p).into());
        }
        let original = fp_poly::trim(f.iter().map(|&c| c % p).collect());
        let deg = original.len().saturating_sub(1);
        if deg != 5 && deg != 6 {
            return Err(CurveError::BadDegree(deg));
        }
        if fp_poly::gcd(&original, &fp_poly::derivative(&original, p), p).len() != 1 {
            return Err(CurveError::NotSquarefree);
        }
        let (model, root) = if deg == 5 {
            (original.clone(), None)
        } else {
            let r = (0..p).find(|&r| fp_poly::eval(&original, r, p) == 0).ok_or(CurveError::NoRationalRoot)?;
            (odd_model(&original, r, p), Some(r))
        };
        debug_assert_eq!(model.len(), 6);
        Ok(Self { p, original, model, root, weil })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn original(&self) -> &[u64] {
        &self.original
    }

    /// The quintic used for arithmetic.
    pub fn model(&self) -> &[u64] {
        &self.model
    }

    /// The rational root sent to infinity, for sextic input.
    pub fn root(&self) -> Option<u64> {
        self.root
    }

    pub fn weil(&self) -> &[BigInt; 5] {
        &self.weil
    }

    pub fn group_order(&self, k: u32) -> BigUint {
        zeta::group_order(&self.weil, k)
    }

    /// `#C(F_p)` on the input model, by Legendre symbols.
    pub fn count_points_fp(&self) -> u64 {
        let p = self.p;
        let chi = |a: u64| -> u64 {
            if a == 0 {
                1
            } else if crate::field::pow_mod(a, (p - 1) / 2, p) == 1 {
                2
            } else {
                0
            }
        };
        let affine: u64 = (0..p).map(|x| chi(fp_poly::eval(&self.original, x, p))).sum();
        let lead = *self.original.last().unwrap();
        let infinity = if self.original.len() == 6 { 1 } else { chi(lead) };
        affine + infinity
    }

    /// `#C(F_{p^k})` by enumerating the `x`-line of the odd model, for `p^k < 2^22`.
    pub fn count_points(&self, k: usize) -> Result<u64, CurveError> {
        let fl = FiniteField::new(self.p, k)?;
        if fl.size() >= &BigUint::from(1u64 << 22) {
            return Err(CurveError::TooLargeForEnumeration(self.p));
        }
        let f = Poly::from_u64s(&fl, &self.model);
        let mut x = vec![0u64; k];
        let mut total = 1;
        loop {
            let y2 = f.eval(&fl, &Fe(x.clone()));
            total += if fl.is_zero(&y2) {
                1
            } else if fl.is_square(&y2) {
                2
            } else {
                0
            };
            // next coefficient vector in base p
            let mut i = 0;
            while i < k && x[i] == self.p - 1 {
                x[i] = 0;
                i += 1;
            }
            if i == k {
                break;
            }
            x[i] += 1;
        }
        Ok(total)
    }

    /// A curve whose Weil polynomial is read off `#C(F_p)` and `#C(F_{p^2})`.
    pub fn from_point_counts(p: u64, f: &[u64]) -> Result<Self, CurveError> {
        let placeholder = zeta::weil_from_traces(p as i64, 0, 0);
        let mut c = Self::new(p, f, placeholder)?;
        let n1 = c.count_points(1)? as i64;
        let n2 = c.count_points(2)? as i64;
        c.weil = zeta::weil_from_counts(p as i64, n1, n2);
        Ok(c)
    }

    /// `#J(F_p)` by enumerating every reduced Mumford pair `(u, v)` on the odd model.
    pub fn count_jacobian_fp(&self) -> Result<u64, CurveError> {
        let p = self.p;
        if p >= 1 << 16 {
            return Err(CurveError::TooLargeForEnumeration(p));
        }
        let f = &self.model;
        let sol1 = |a: u64| -> u64 {
            let y2 = fp_poly::eval(f, a, p);
            if y2 == 0 {
                1
            } else if crate::field::pow_mod(y2, (p - 1) / 2, p) == 1 {
                2
            } else {
                0
            }
        };
        let lin: Vec<u64> = (0..p).map(sol1).collect();
        let mut total = 1 + lin.iter().sum::<u64>();
        // u = (x - a)(x - b), a < b
        let s: u64 = lin.iter().sum();
        let sq: u64 = lin.iter().map(|x| x * x).sum();
        total += (s * s - sq) / 2;
        // u = (x - a)^2 needs f(a) a nonzero square (Hensel lift of v)
        total += (0..p).filter(|&a| lin[a as usize] == 2).count() as u64 * 2;
        // irreducible u = x^2 + s x + t
        let e = [(p * p - 1) / 2];
        let nonres = |a: u64| a != 0 && crate::field::pow_mod(a, (p - 1) / 2, p) != 1;
        for s in 0..p {
            for t in 0..p {
                let disc = (crate::field::mul_mod(s, s, p) + p - crate::field::mul_mod(4, t, p)) % p;
                if !nonres(disc) {
                    continue;
                }
                let u = [t, s, 1];
                let r = fp_poly::rem(f, &u, p);
                total += if r.is_empty() {
                    1
                } else if fp_poly::powmod(&r, &e, &u, p) == vec![1] {
                    2
                } else {
                    0
                };
            }
        }
        Ok(total)
    }

    /// Compare the Weil polynomial with `#C(F_p)` and, when feasible, `#J(F_p)`.
    pub fn verify_weil(&self) -> Result<(), CurveError> {
        let c = self.count_points_fp();
        let expect = zeta::curve_points(&self.weil, self.p, 1);
        if BigInt::from(c) != expect {
            return Err(CurveError::WeilMismatch(format!("#C(F_p) = {c}, Weil polynomial gives {expect}")));
        }
        if self.p < 1 << 16 {
            let j = self.count_jacobian_fp()?;
            let n = self.group_order(1);
            if BigUint::from(j) != n {
                return Err(CurveError::WeilMismatch(format!("#J(F_p) = {j}, Weil polynomial gives {n}")));
            }
        }
        Ok(())
    }

    pub fn jacobian(self: &Arc<Self>, k: usize) -> Result<Jacobian, CurveError> {
        let field = FiniteField::new(self.p, k)?;
        Ok(Jacobian::new(self.clone(), field))
    }
}

/// `g(z) = z^6 f(r + 1/z) = sum f_i (r z + 1)^i z^{6-i}`, of degree 5 since `f(r) = 0`.
fn odd_model(f: &[u64], r: u64, p: u64) -> Vec<u64> {
    let mut out = vec![0u64; 7];
    let lin = [1, r];
    let mut pw = vec![1u64];
    for (i, &fi) in f.iter().enumerate() {
        // pw = (r z + 1)^i, shifted by z^{6-i}
        for (j, &c) in pw.iter().enumerate() {
            let idx = j + 6 - i;
            out[idx] = (out[idx] + crate::field::mul_mod(fi, c, p)) % p;
        }
        pw = fp_poly::mul(&pw, &lin, p);
        pw.resize(i + 2, 0);
    }
    fp_poly::trim(out)
}

/// Square root in `F[x]/(u)` for irreducible quadratic `u`, by Tonelli-Shanks.
fn sqrt_mod<R: Rng>(fl: &FiniteField, a: &Poly, u: &Poly, rng: &mut R) -> Option<Poly> {
    if a.is_zero() {
        return Some(Poly::zero());
    }
    let one = Poly::one(fl);
    let order = fl.size() * fl.size() - 1u32;
    let half = &order >> 1;
    if a.powmod(fl, &half, u) != one {
        return None;
    }
    let s = order.trailing_zeros().expect("nonzero");
    let t = &order >> s;
    let z = loop {
        let c = Poly::new(fl, vec![fl.random(rng), fl.random(rng)]);
        if !c.is_zero() && c.powmod(fl, &half, u) != one {
            break c.powmod(fl, &t, u);
        }
    };
    let mulm = |x: &Poly, y: &Poly| x.mul(fl, y).rem(fl, u);
    let mut m = s;
    let mut c = z;
    let mut x = a.powmod(fl, &((&t + 1u32) >> 1), u);
    let mut b = a.powmod(fl, &t, u);
    while b != one {
        let mut i = 0;
        let mut b2 = b.clone();
        while b2 != one {
            b2 = mulm(&b2, &b2);
            i += 1;
        }
        let mut g = c.clone();
        for _ in 0..m - i - 1 {
            g = mulm(&g, &g);
        }
        x = mulm(&x, &g);
        c = mulm(&g, &g);
        b = mulm(&b, &c);
        m = i;
    }
    Some(x)
}

/// A reduced divisor class: `u` monic of degree at most 2, `deg v < deg u`, `u | v^2 - f`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Divisor {
    pub u: Poly,
    pub v: Poly,
}

/// The function `c` with `D1 + D2 = D3 + div(c)` produced by one Cantor addition:
/// `c = d(x) * prod (y - v_s(x)) / u'_s(x)` over the reduction steps.
#[derive(Clone, Debug)]
pub struct LineFunction {
    pub d: Poly,
    pub steps: Vec<(Poly, Poly)>,
}

impl LineFunction {
    /// `c(E) = prod over the points of E` for an effective `E` in Mumford form, or
    /// `None` when `E` meets a zero or pole of a factor.
    pub fn eval_effective(&self, f: &FiniteField, e: &Divisor) -> Option<Fe> {
        let mut num = self.d.resultant_at(f, &e.u);
        let mut den = f.one();
        for (v, up) in &self.steps {
            num = f.mul(&num, &e.v.sub(f, v).resultant_at(f, &e.u));
            den = f.mul(&den, &up.resultant_at(f, &e.u));
        }
        if f.is_zero(&num) || f.is_zero(&den) {
            return None;
        }
        Some(f.mul(&num, &f.inv(&den)?))
    }
}

#[derive(Clone, Debug)]
pub struct Jacobian {
    curve: Arc<HyperellipticCurve>,
    field: Field,
    f: Poly,
    order: BigUint,
}

impl Jacobian {
    pub fn new(curve: Arc<HyperellipticCurve>, field: Field) -> Self {
        let f = Poly::from_u64s(&field, curve.model());
        let order = curve.group_order(field.degree() as u32);
        Self { curve, field, f, order }
    }

    pub fn curve(&self) -> &Arc<HyperellipticCurve> {
        &self.curve
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    /// Extension degree `k` of the base field `F_{p^k}`.
    pub fn degree(&self) -> usize {
        self.field.degree()
    }

    pub fn f(&self) -> &Poly {
        &self.f
    }

    /// `#J(F_{p^k})`.
    pub fn order(&self) -> &BigUint {
        &self.order
    }

    pub fn zero(&self) -> Divisor {
        Divisor { u: Poly::one(&self.field), v: Poly::zero() }
    }

    pub fn is_zero(&self, d: &Divisor) -> bool {
        d.u.degree() == Some(0)
    }

    pub fn is_valid(&self, d: &Divisor) -> bool {
        let fl = &self.field;
        let monic = d.u.lead().is_some_and(|l| fl.is_one(l));
        let du = d.u.deg0();
        let small = d.v.degree().map_or(true, |dv| dv < du);
        monic && du <= 2 && small && d.v.sqr(fl).sub(fl, &self.f).rem(fl, &d.u).is_zero()
    }

    /// The divisor `P - infinity` of an affine point.
    pub fn point(&self, x: &Fe, y: &Fe) -> Option<Divisor> {
        let fl = &self.field;
        if fl.sqr(y) != self.f.eval(fl, x) {
            return None;
        }
        Some(Divisor { u: Poly::linear(fl, x), v: Poly::constant(fl, y.clone()) })
    }

    pub fn random_point<R: Rng>(&self, rng: &mut R) -> Divisor {
        let fl = &self.field;
        loop {
            let x = fl.random(rng);
            if let Some(y) = fl.sqrt(&self.f.eval(fl, &x)) {
                let y = if rng.gen::<bool>() { fl.neg(&y) } else { y };
                return self.point(&x, &y).expect("on curve");
            }
        }
    }

    /// A sum of two random points, or a random class whose `u` is irreducible.
    /// Both kinds are needed: sums of rational points need not generate `J(F)`.
    pub fn random<R: Rng>(&self, rng: &mut R) -> Divisor {
        if rng.gen::<bool>() {
            loop {
                if let Some(d) = self.random_irreducible(rng) {
                    return d;
                }
            }
        }
        let a = self.random_point(rng);
        let b = self.random_point(rng);
        self.add(&a, &b)
    }

    /// `(u, v)` with `u` a random irreducible quadratic, when `f mod u` is a square.
    fn random_irreducible<R: Rng>(&self, rng: &mut R) -> Option<Divisor> {
        let fl = &self.field;
        let (s, t) = (fl.random(rng), fl.random(rng));
        let disc = fl.sub(&fl.sqr(&s), &fl.scale(&t, 4));
        if fl.is_square(&disc) {
            return None;
        }
        let u = Poly::new(fl, vec![t, s, fl.one()]);
        let v = sqrt_mod(fl, &self.f.rem(fl, &u), &u, rng)?;
        let v = if rng.gen::<bool>() { v.neg(fl) } else { v };
        Some(Divisor { u, v })
    }

    pub fn neg(&self, d: &Divisor) -> Divisor {
        Divisor { u: d.u.clone(), v: d.v.neg(&self.field).rem(&self.field, &d.u) }
    }

    pub fn add(&self, a: &Divisor, b: &Divisor) -> Divisor {
        self.add_with_function(a, b, false).0
    }

    /// Cantor addition; with `track` the line function is recorded.
    pub fn add_with_function(&self, a: &Divisor, b: &Divisor, track: bool) -> (Divisor, Option<LineFunction>) {
        let fl = &self.field;
        let (d0, e1, e2) = a.u.xgcd(fl, &b.u);
        let vs = a.v.add(fl, &b.v);
        let (d, c1, c2) = d0.xgcd(fl, &vs);
        let (s1, s2, s3) = (c1.mul(fl, &e1), c1.mul(fl, &e2), c2);
        let mut u = a.u.mul(fl, &b.u).div_exact(fl, &d.sqr(fl));
        let num = s1
            .mul(fl, &a.u)
            .mul(fl, &b.v)
            .add(fl, &s2.mul(fl, &b.u).mul(fl, &a.v))
            .add(fl, &s3.mul(fl, &a.v.mul(fl, &b.v).add(fl, &self.f)));
        let mut v = num.div_exact(fl, &d).rem(fl, &u);
        let mut steps = Vec::new();
        while u.deg0() > 2 {
            let up = self.f.sub(fl, &v.sqr(fl)).div_exact(fl, &u);
            if track {
                steps.push((v.clone(), up.clone()));
            }
            let up_monic = up.monic(fl);
            v = v.neg(fl).rem(fl, &up_monic);
            u = up_monic;
        }
        let u = u.monic(fl);
        let v = v.rem(fl, &u);
        let line = track.then(|| LineFunction { d, steps });
        (Divisor { u, v }, line)
    }

    pub fn sub(&self, a: &Divisor, b: &Divisor) -> Divisor {
        self.add(a, &self.neg(b))
    }

    pub fn double(&self, a: &Divisor) -> Divisor {
        self.add(a, a)
    }

    pub fn mul(&self, a: &Divisor, n: &BigUint) -> Divisor {
        let mut r = self.zero();
        for i in (0..n.bits()).rev() {
            r = self.double(&r);
            if n.bit(i) {
                r = self.add(&r, a);
            }
        }
        r
    }

    pub fn mul_u64(&self, a: &Divisor, n: u64) -> Divisor {
        self.mul(a, &BigUint::from(n))
    }

    pub fn mul_i64(&self, a: &Divisor, n: i64) -> Divisor {
        let r = self.mul_u64(a, n.unsigned_abs());
        if n < 0 {
            self.neg(&r)
        } else {
            r
        }
    }

    /// `sum c_i D_i`.
    pub fn combination(&self, coeffs: &[u64], basis: &[Divisor]) -> Divisor {
        coeffs.iter().zip(basis).fold(self.zero(), |acc, (&c, d)| self.add(&acc, &self.mul_u64(d, c)))
    }

    /// The `p`-power Frobenius on coordinates.
    pub fn frobenius(&self, d: &Divisor) -> Divisor {
        let fl = &self.field;
        Divisor { u: d.u.frobenius(fl), v: d.v.frobenius(fl) }
    }

    pub fn frobenius_pow(&self, d: &Divisor, j: usize) -> Divisor {
        let j = j % self.degree();
        (0..j).fold(d.clone(), |acc, _| self.frobenius(&acc))
    }

    /// Verschiebung `q pi^{-1}`, with `pi^{-1} = pi^{k-1}` on `J(F_{q^k})`.
    pub fn verschiebung(&self, d: &Divisor) -> Divisor {
        let k = self.degree();
        self.mul_u64(&self.frobenius_pow(d, k - 1), self.curve.p())
    }

    /// Action of `a + b pi + c pi^2 + d pi^3` with integer coefficients.
    pub fn apply_pi_poly(&self, coeffs: &[BigInt], d: &Divisor) -> Divisor {
        let mut acc = self.zero();
        let mut cur = d.clone();
        for c in coeffs {
            let term = self.mul(&cur, &c.magnitude().clone());
            let term = if c.sign() == num_bigint::Sign::Minus { self.neg(&term) } else { term };
            acc = self.add(&acc, &term);
            cur = self.frobenius(&cur);
        }
        acc
    }

    /// Action of `a + b (pi + pi-bar)`.
    pub fn apply_real(&self, a: i64, b: i64, d: &Divisor) -> Divisor {
        let tr = self.add(&self.frobenius(d), &self.verschiebung(d));
        self.add(&self.mul_i64(d, a), &self.mul_i64(&tr, b))
    }

    /// Smallest `e` with `l^e D = 0`, searching up to `max`.
    pub fn ell_order(&self, d: &Divisor, l: u64, max: u32) -> Option<u32> {
        let mut cur = d.clone();
        for e in 0..=max {
            if self.is_zero(&cur) {
                return Some(e);
            }
            cur = self.mul_u64(&cur, l);
        }
        None
    }

    /// Every element of `J(F_p)`, for a prime field with `p < 2^8`.
    pub fn enumerate(&self) -> Result<Vec<Divisor>, CurveError> {
        let fl = &self.field;
        let p = fl.p();
        if fl.degree() != 1 || p >= 1 << 8 {
            return Err(CurveError::TooLargeForEnumeration(p));
        }
        let mut all = vec![self.zero()];
        for a in 0..p {
            for b in 0..p {
                if let Some(d) = self.point(&fl.from_u64(a), &fl.from_u64(b)) {
                    all.push(d);
                }
            }
        }
        for s in 0..p {
            for t in 0..p {
                let u = Poly::from_u64s(fl, &[t, s, 1]);
                for v0 in 0..p {
                    for v1 in 0..p {
                        let d = Divisor { u: u.clone(), v: Poly::from_u64s(fl, &[v0, v1]) };
                        if self.is_valid(&d) {
                            all.push(d);
                        }
                    }
                }
            }
        }
        Ok(all)
    }

    /// Field element in the hex encoding used by the CLI.
    pub fn divisor_hex(&self, d: &Divisor) -> (Vec<String>, Vec<String>) {
        let fl = &self.field;
        (d.u.c.iter().map(|c| fl.to_hex(c)).collect(), d.v.c.iter().map(|c| fl.to_hex(c)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zeta::weil_from_traces;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn ex1_curve() -> Arc<HyperellipticCurve> {
        Arc::new(HyperellipticCurve::new(211, &[56, 164, 62, 130, 109, 79, 31], weil_from_traces(211, 9, -17)).unwrap())
    }

    #[test]
    fn odd_model_is_quintic_and_counts_agree() {
        let c = ex1_curve();
        assert_eq!(c.root(), Some(81));
        assert_eq!(c.model().len(), 6);
        assert_eq!(c.count_points_fp(), 203);
        assert_eq!(c.count_jacobian_fp().unwrap(), 42597);
        c.verify_weil().unwrap();
        // the quadratic twist has another Weil polynomial
        let twist = HyperellipticCurve::new(211, c.original(), weil_from_traces(211, -9, -17)).unwrap();
        assert!(twist.verify_weil().is_err());
    }

    #[test]
    fn group_law_on_random_divisors() {
        let c = ex1_curve();
        let j = c.jacobian(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let (a, b, d) = (j.random(&mut rng), j.random(&mut rng), j.random(&mut rng));
            assert!(j.is_valid(&a));
            assert_eq!(j.add(&a, &j.zero()), a);
            assert!(j.is_zero(&j.add(&a, &j.neg(&a))));
            assert_eq!(j.add(&a, &b), j.add(&b, &a));
            assert_eq!(j.add(&j.add(&a, &b), &d), j.add(&a, &j.add(&b, &d)));
            assert!(j.is_valid(&j.add(&a, &b)));
        }
    }

    #[test]
    fn group_order_kills_random_divisors() {
        let c = ex1_curve();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for k in [1, 2, 3] {
            let j = c.jacobian(k).unwrap();
            for _ in 0..10 {
                let d = j.random(&mut rng);
                assert!(j.is_zero(&j.mul(&d, j.order())));
            }
        }
    }

    #[test]
    fn frobenius_satisfies_weil_polynomial() {
        let c = ex1_curve();
        let j = c.jacobian(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5 {
            let d = j.random(&mut rng);
            assert!(j.is_zero(&j.apply_pi_poly(c.weil(), &d)));
            // pi^3 = 1 on J(F_{q^3})
            assert_eq!(j.frobenius_pow(&d, 3), d);
            // pi pi-bar = q
            assert_eq!(j.verschiebung(&j.frobenius(&d)), j.mul_u64(&d, 211));
        }
    }

    #[test]
    fn rejects_bad_input() {
        let w = weil_from_traces(211, 0, 0);
        assert!(matches!(HyperellipticCurve::new(211, &[1, 0, 1], w.clone()), Err(CurveError::BadDegree(2))));
        // (x - 1)^2 (x^3 + 1) is not squarefree
        let f = fp_poly::mul(&fp_poly::mul(&[210, 1], &[210, 1], 211), &[1, 0, 0, 1], 211);
        assert!(matches!(HyperellipticCurve::new(211, &f, w.clone()), Err(CurveError::NotSquarefree)));
    }
}
