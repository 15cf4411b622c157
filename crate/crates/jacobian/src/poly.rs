//! Univariate polynomials over `F_{p^k}`, constant term first, no trailing zeros.

use crate::field::{Fe, FiniteField};
use num_bigint::BigUint;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly {
    pub c: Vec<Fe>,
}

impl Poly {
    pub fn new(f: &FiniteField, c: Vec<Fe>) -> Self {
        let mut p = Self { c };
        p.trim(f);
        p
    }

    pub fn zero() -> Self {
        Self { c: Vec::new() }
    }

    pub fn constant(f: &FiniteField, a: Fe) -> Self {
        Self::new(f, vec![a])
    }

    pub fn one(f: &FiniteField) -> Self {
        Self::constant(f, f.one())
    }

    /// `x - a`.
    pub fn linear(f: &FiniteField, a: &Fe) -> Self {
        Self { c: vec![f.neg(a), f.one()] }
    }

    pub fn from_u64s(f: &FiniteField, c: &[u64]) -> Self {
        Self::new(f, c.iter().map(|&x| f.from_u64(x)).collect())
    }

    fn trim(&mut self, f: &FiniteField) {
        while self.c.last().is_some_and(|x| f.is_zero(x)) {
            self.c.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    /// Degree with the zero polynomial counted as degree zero.
    pub fn deg0(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn lead(&self) -> Option<&Fe> {
        self.c.last()
    }

    pub fn coeff(&self, f: &FiniteField, i: usize) -> Fe {
        self.c.get(i).cloned().unwrap_or_else(|| f.zero())
    }

    pub fn add(&self, f: &FiniteField, o: &Poly) -> Poly {
        let n = self.c.len().max(o.c.len());
        Poly::new(f, (0..n).map(|i| f.add(&self.coeff(f, i), &o.coeff(f, i))).collect())
    }

    pub fn sub(&self, f: &FiniteField, o: &Poly) -> Poly {
        let n = self.c.len().max(o.c.len());
        Poly::new(f, (0..n).map(|i| f.sub(&self.coeff(f, i), &o.coeff(f, i))).collect())
    }

    pub fn neg(&self, f: &FiniteField) -> Poly {
        Poly { c: self.c.iter().map(|x| f.neg(x)).collect() }
    }

    pub fn scale(&self, f: &FiniteField, a: &Fe) -> Poly {
        Poly::new(f, self.c.iter().map(|x| f.mul(x, a)).collect())
    }

    pub fn mul(&self, f: &FiniteField, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![f.zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if f.is_zero(a) {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                out[i + j] = f.add(&out[i + j], &f.mul(a, b));
            }
        }
        Poly::new(f, out)
    }

    pub fn sqr(&self, f: &FiniteField) -> Poly {
        self.mul(f, self)
    }

    /// `(q, r)` with `self = q d + r` and `deg r < deg d`.
    pub fn divrem(&self, f: &FiniteField, d: &Poly) -> (Poly, Poly) {
        let dl = d.lead().expect("division by zero polynomial");
        let dd = d.c.len() - 1;
        if self.c.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let inv = f.inv(dl).expect("nonzero leading coefficient");
        let mut r = self.c.clone();
        let mut q = vec![f.zero(); r.len() - dd];
        for i in (0..q.len()).rev() {
            let c = f.mul(&r[i + dd], &inv);
            if f.is_zero(&c) {
                continue;
            }
            for (j, b) in d.c.iter().enumerate() {
                r[i + j] = f.sub(&r[i + j], &f.mul(&c, b));
            }
            q[i] = c;
        }
        r.truncate(dd);
        (Poly::new(f, q), Poly::new(f, r))
    }

    pub fn rem(&self, f: &FiniteField, d: &Poly) -> Poly {
        self.divrem(f, d).1
    }

    /// Exact quotient; panics in debug builds if the remainder is nonzero.
    pub fn div_exact(&self, f: &FiniteField, d: &Poly) -> Poly {
        let (q, r) = self.divrem(f, d);
        debug_assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    pub fn monic(&self, f: &FiniteField) -> Poly {
        match self.lead() {
            None => Poly::zero(),
            Some(l) => self.scale(f, &f.inv(l).expect("nonzero")),
        }
    }

    /// `(g, s, t)` with `g = s a + t b` monic (or zero when both inputs are zero).
    pub fn xgcd(&self, f: &FiniteField, b: &Poly) -> (Poly, Poly, Poly) {
        let (mut r0, mut r1) = (self.clone(), b.clone());
        let (mut s0, mut s1) = (Poly::one(f), Poly::zero());
        let (mut t0, mut t1) = (Poly::zero(), Poly::one(f));
        while !r1.is_zero() {
            let (q, r) = r0.divrem(f, &r1);
            let s = s0.sub(f, &q.mul(f, &s1));
            let t = t0.sub(f, &q.mul(f, &t1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
            t0 = t1;
            t1 = t;
        }
        match r0.lead() {
            None => (r0, s0, t0),
            Some(l) => {
                let inv = f.inv(l).expect("nonzero");
                (r0.scale(f, &inv), s0.scale(f, &inv), t0.scale(f, &inv))
            }
        }
    }

    pub fn gcd(&self, f: &FiniteField, b: &Poly) -> Poly {
        self.xgcd(f, b).0
    }

    pub fn eval(&self, f: &FiniteField, x: &Fe) -> Fe {
        self.c.iter().rev().fold(f.zero(), |acc, c| f.add(&f.mul(&acc, x), c))
    }

    pub fn derivative(&self, f: &FiniteField) -> Poly {
        Poly::new(f, self.c.iter().enumerate().skip(1).map(|(i, c)| f.scale(c, i as u64 % f.p())).collect())
    }

    /// Coefficient-wise Frobenius `x -> x^p`.
    pub fn frobenius(&self, f: &FiniteField) -> Poly {
        Poly { c: self.c.iter().map(|x| f.frobenius(x)).collect() }
    }

    pub fn powmod(&self, f: &FiniteField, e: &BigUint, m: &Poly) -> Poly {
        let base = self.rem(f, m);
        let mut r = Poly::one(f).rem(f, m);
        for i in (0..e.bits()).rev() {
            r = r.sqr(f).rem(f, m);
            if e.bit(i) {
                r = r.mul(f, &base).rem(f, m);
            }
        }
        r
    }

    /// `prod g(x_i)` over the roots `x_i` of a monic `u` of degree at most two.
    pub fn resultant_at(&self, f: &FiniteField, u: &Poly) -> Fe {
        let r = self.rem(f, u);
        match u.degree() {
            Some(0) => f.one(),
            Some(1) => r.eval(f, &f.neg(&u.c[0])),
            Some(2) => {
                let (a0, a1) = (&u.c[0], &u.c[1]);
                let r0 = r.coeff(f, 0);
                let r1 = r.coeff(f, 1);
                // r(x1) r(x2) = r0^2 - a1 r0 r1 + a0 r1^2
                let t = f.sub(&f.sqr(&r0), &f.mul(&f.mul(a1, &r0), &r1));
                f.add(&t, &f.mul(a0, &f.sqr(&r1)))
            }
            _ => panic!("resultant_at needs a monic polynomial of degree at most two"),
        }
    }
}
