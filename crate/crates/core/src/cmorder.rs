//! Quartic CM fields `K = K0(eta)`, the lattice of `O_K0`-orders
//! `O_K0[m eta]`, conductor valuations and Frobenius data.
//!
//! Elements of `K` are pairs `x + y*eta` with `x, y` in `K0`, where
//! `eta^2 - t*eta + n = 0`. The descriptor promises `O_K = O_K0 + O_K0*eta`,
//! which is verified at load time.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{hnf, solve_in_hnf, IntMatrix};
use crate::realquad::{
    factor_rational_prime, is_prime_u64, principal_generator, ElemJson, RealQuadElem, RealQuadError,
    RealQuadField, RealQuadIdeal, SplittingResult,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CmError {
    #[error(transparent)]
    RealQuad(#[from] RealQuadError),
    #[error("eta minimal polynomial must have integral coefficients")]
    NotIntegral,
    #[error("eta^2 - t eta + n does not define a totally imaginary extension")]
    NotTotallyImaginary,
    #[error("quartic polynomial is not the minimal polynomial of 2 eta - t")]
    QuarticMismatch,
    #[error("field is Galois over Q ({0}); only primitive quartic CM fields are supported")]
    NotPrimitive(&'static str),
    #[error("O_K0[eta] is not maximal at the prime above {0}")]
    NotMaximal(u64),
    #[error("field discriminant witness {witness} does not match computed {computed}")]
    DiscriminantMismatch { witness: BigInt, computed: BigInt },
    #[error("{0} is not split in K0")]
    NotSplit(u64),
    #[error("prime ideal must have prime norm")]
    NotDegreeOne,
    #[error("zero element")]
    Zero,
    #[error("element does not lie in the order")]
    NotInOrder,
    #[error("Z[pi, pi-bar] does not contain O_K0")]
    NotOk0Order,
    #[error("pi * conj(pi) = {0}, expected the rational integer q")]
    BadRelativeNorm(String),
    #[error("element is not invertible modulo the prime above {0}")]
    NotInvertible(u64),
    #[error("denominator is not a power of {0}")]
    NotEllPower(u64),
    #[error("descriptor: {0}")]
    Descriptor(String),
}

/// Position of an order in the local lattice at a split prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LatticePosition {
    pub nu1: u32,
    pub nu2: u32,
}

impl LatticePosition {
    pub fn new(nu1: u32, nu2: u32) -> Self {
        Self { nu1, nu2 }
    }

    pub fn get(&self, i: usize) -> u32 {
        if i == 0 {
            self.nu1
        } else {
            self.nu2
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CMElem {
    pub x: RealQuadElem,
    pub y: RealQuadElem,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CMField {
    base: RealQuadField,
    t: RealQuadElem,
    n: RealQuadElem,
    quartic: [BigInt; 5],
}

fn is_rational_square(x: &BigRational) -> bool {
    if x.is_negative() {
        return false;
    }
    let p = x.numer() * x.denom();
    let r = p.sqrt();
    &r * &r == p
}

fn prime_factors(n: &BigInt) -> Vec<u64> {
    let mut m = n.abs().to_u64().expect("descriptor norms fit in u64");
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= m {
        if m % p == 0 {
            out.push(p);
            while m % p == 0 {
                m /= p;
            }
        }
        p += 1;
    }
    if m > 1 {
        out.push(m);
    }
    out
}

/// All prime ideals of `O_K0` above a rational prime `p`, including `p = 2`.
pub fn primes_above(field: &RealQuadField, p: u64) -> Vec<RealQuadIdeal> {
    let pb = BigInt::from(p);
    let t = field.t().mod_floor(&pb);
    let n = field.n().mod_floor(&pb);
    let roots: Vec<u64> = (0..p)
        .filter(|&r| {
            let r = BigInt::from(r);
            (&r * &r - &t * &r + &n).mod_floor(&pb).is_zero()
        })
        .collect();
    let disc_zero = field.discriminant().mod_floor(&pb).is_zero();
    let at = |r: u64| {
        RealQuadIdeal::two_element(*field, pb.clone(), &field.from_ints(-BigInt::from(r), BigInt::one()))
            .expect("nonzero")
    };
    if roots.is_empty() {
        vec![RealQuadIdeal::principal(&field.from_ints(pb.clone(), BigInt::zero())).expect("nonzero")]
    } else if disc_zero || roots.len() == 1 {
        vec![at(roots[0])]
    } else {
        roots.into_iter().map(at).collect()
    }
}

impl CMField {
    /// `eta^2 - t eta + n = 0`; `quartic` lists coefficients from the constant term up.
    pub fn new(
        base: RealQuadField,
        t: RealQuadElem,
        n: RealQuadElem,
        quartic: [BigInt; 5],
    ) -> Result<Self, CmError> {
        if !t.is_integral() || !n.is_integral() {
            return Err(CmError::NotIntegral);
        }
        let f = Self { base, t, n, quartic };
        let delta = f.delta();
        if !(-&delta).is_totally_positive() {
            return Err(CmError::NotTotallyImaginary);
        }
        // 2 eta - t = sqrt(delta) has char poly x^4 - Tr(delta) x^2 + N(delta).
        let want = [
            delta.norm().to_integer(),
            BigInt::zero(),
            -delta.trace().to_integer(),
            BigInt::zero(),
            BigInt::one(),
        ];
        if f.quartic != want {
            return Err(CmError::QuarticMismatch);
        }
        let nd = delta.norm();
        if is_rational_square(&nd) {
            return Err(CmError::NotPrimitive("biquadratic"));
        }
        if is_rational_square(&(nd * BigRational::from_integer(base.d().into()))) {
            return Err(CmError::NotPrimitive("cyclic"));
        }
        f.check_maximal()?;
        Ok(f)
    }

    fn check_maximal(&self) -> Result<(), CmError> {
        let delta = self.delta();
        let nd = delta.norm().to_integer();
        let mut ps = prime_factors(&nd);
        if !ps.contains(&2) {
            ps.push(2);
        }
        for p in ps {
            for prime in primes_above(&self.base, p) {
                let v = prime.valuation(&delta)?;
                if v < 2 && p != 2 {
                    continue;
                }
                let pi = principal_generator(&prime)?;
                let pi_inv = pi.inverse()?;
                let pi2_inv = (&pi * &pi).inverse()?;
                for x in residue_reps(&self.base, &prime) {
                    let tr = &(&x.scale(&BigRational::from_integer(2.into())) + &self.t) * &pi_inv;
                    let nm = &(&(&x * &x) + &(&(&x * &self.t) + &self.n)) * &pi2_inv;
                    if tr.is_integral() && nm.is_integral() {
                        return Err(CmError::NotMaximal(p));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn base(&self) -> &RealQuadField {
        &self.base
    }

    /// Trace of eta over `K0`.
    pub fn eta_trace(&self) -> &RealQuadElem {
        &self.t
    }

    /// Norm of eta over `K0`.
    pub fn eta_norm(&self) -> &RealQuadElem {
        &self.n
    }

    pub fn quartic(&self) -> &[BigInt; 5] {
        &self.quartic
    }

    /// Relative discriminant `t^2 - 4n` of `eta`.
    pub fn delta(&self) -> RealQuadElem {
        &(&self.t * &self.t) - &self.n.scale(&BigRational::from_integer(4.into()))
    }

    /// Absolute discriminant of `O_K0[eta]`: `disc(K0)^2 * N(delta)`.
    pub fn discriminant(&self) -> BigInt {
        let dk = self.base.discriminant();
        &dk * &dk * self.delta().norm().to_integer()
    }

    pub fn elem(&self, x: RealQuadElem, y: RealQuadElem) -> CMElem {
        CMElem { x, y }
    }

    pub fn from_k0(&self, x: &RealQuadElem) -> CMElem {
        CMElem { x: x.clone(), y: self.base.zero() }
    }

    pub fn zero(&self) -> CMElem {
        self.from_k0(&self.base.zero())
    }

    pub fn one(&self) -> CMElem {
        self.from_k0(&self.base.one())
    }

    pub fn eta(&self) -> CMElem {
        CMElem { x: self.base.zero(), y: self.base.one() }
    }

    /// Primitive generator `2 eta - t`, a root of the quartic.
    pub fn generator(&self) -> CMElem {
        CMElem { x: -&self.t, y: self.base.int(2, 0) }
    }

    pub fn add(&self, a: &CMElem, b: &CMElem) -> CMElem {
        CMElem { x: &a.x + &b.x, y: &a.y + &b.y }
    }

    pub fn sub(&self, a: &CMElem, b: &CMElem) -> CMElem {
        CMElem { x: &a.x - &b.x, y: &a.y - &b.y }
    }

    pub fn neg(&self, a: &CMElem) -> CMElem {
        CMElem { x: -&a.x, y: -&a.y }
    }

    pub fn mul(&self, a: &CMElem, b: &CMElem) -> CMElem {
        let yy = &a.y * &b.y;
        CMElem {
            x: &(&a.x * &b.x) - &(&self.n * &yy),
            y: &(&(&a.x * &b.y) + &(&b.x * &a.y)) + &(&self.t * &yy),
        }
    }

    pub fn mul_k0(&self, s: &RealQuadElem, a: &CMElem) -> CMElem {
        CMElem { x: s * &a.x, y: s * &a.y }
    }

    pub fn pow(&self, a: &CMElem, e: u32) -> CMElem {
        let mut acc = self.one();
        for _ in 0..e {
            acc = self.mul(&acc, a);
        }
        acc
    }

    /// Complex conjugation: `eta -> t - eta`.
    pub fn conj(&self, a: &CMElem) -> CMElem {
        CMElem { x: &a.x + &(&a.y * &self.t), y: -&a.y }
    }

    pub fn rel_norm(&self, a: &CMElem) -> RealQuadElem {
        &(&(&a.x * &a.x) + &(&(&a.x * &a.y) * &self.t)) + &(&(&a.y * &a.y) * &self.n)
    }

    pub fn rel_trace(&self, a: &CMElem) -> RealQuadElem {
        &a.x.scale(&BigRational::from_integer(2.into())) + &(&a.y * &self.t)
    }

    pub fn inverse(&self, a: &CMElem) -> Result<CMElem, CmError> {
        let nrm = self.rel_norm(a);
        if nrm.is_zero() {
            return Err(CmError::Zero);
        }
        let ninv = nrm.inverse()?;
        Ok(self.mul_k0(&ninv, &self.conj(a)))
    }

    pub fn is_integral(&self, a: &CMElem) -> bool {
        a.x.is_integral() && a.y.is_integral()
    }

    pub fn is_zero(&self, a: &CMElem) -> bool {
        a.x.is_zero() && a.y.is_zero()
    }

    /// Coordinates over the Z-basis `(1, omega, eta, omega*eta)` of `O_K`.
    pub fn z_coords(&self, a: &CMElem) -> Option<[BigInt; 4]> {
        let (x0, x1) = a.x.int_coords().ok()?;
        let (y0, y1) = a.y.int_coords().ok()?;
        Some([x0, x1, y0, y1])
    }

    pub fn rational_coords(&self, a: &CMElem) -> [BigRational; 4] {
        [a.x.a.clone(), a.x.b.clone(), a.y.a.clone(), a.y.b.clone()]
    }

    pub fn from_z_coords(&self, c: &[BigInt]) -> CMElem {
        CMElem {
            x: self.base.from_ints(c[0].clone(), c[1].clone()),
            y: self.base.from_ints(c[2].clone(), c[3].clone()),
        }
    }

    /// `sum c_i g^i` for the primitive generator `g = 2 eta - t`.
    pub fn from_power_basis(&self, coords: &[BigRational; 4]) -> CMElem {
        let g = self.generator();
        let mut acc = self.zero();
        let mut gp = self.one();
        for c in coords {
            let term = self.mul_k0(&self.base.elem(c.clone(), BigRational::zero()), &gp);
            acc = self.add(&acc, &term);
            gp = self.mul(&gp, &g);
        }
        acc
    }

    /// Coordinates of `a` over the power basis `1, b, b^2, b^3` of a primitive element `b`.
    pub fn power_basis_coords(&self, a: &CMElem, b: &CMElem) -> Option<[BigRational; 4]> {
        let mut cols = Vec::with_capacity(4);
        let mut p = self.one();
        for _ in 0..4 {
            cols.push(self.rational_coords(&p));
            p = self.mul(&p, b);
        }
        let rhs = self.rational_coords(a);
        // Solve sum_j c_j cols[j] = rhs.
        let mut m: Vec<Vec<BigRational>> = (0..4)
            .map(|i| {
                let mut row: Vec<BigRational> = (0..4).map(|j| cols[j][i].clone()).collect();
                row.push(rhs[i].clone());
                row
            })
            .collect();
        let sol = solve_rational(&mut m)?;
        Some([sol[0].clone(), sol[1].clone(), sol[2].clone(), sol[3].clone()])
    }
}

/// Gaussian elimination over Q on an augmented `n x (n+1)` matrix.
fn solve_rational(m: &mut [Vec<BigRational>]) -> Option<Vec<BigRational>> {
    let n = m.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, piv);
        let inv = BigRational::one() / m[col][col].clone();
        for x in m[col].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                let src = m[col].clone();
                for (x, y) in m[r].iter_mut().zip(src.iter()) {
                    *x = &*x - &f * y;
                }
            }
        }
    }
    Some(m.iter().map(|r| r[n].clone()).collect())
}

/// Representatives of `O_K0 / p` for a prime ideal `p`.
fn residue_reps(field: &RealQuadField, prime: &RealQuadIdeal) -> Vec<RealQuadElem> {
    let (a, _, c) = prime.hermite();
    let a = a.to_i64().expect("small prime");
    if c.is_one() {
        (0..a).map(|x| field.int(x, 0)).collect()
    } else {
        // Inert: p O_K0 with residue field of size p^2.
        let p = a;
        (0..p).flat_map(|x| (0..p).map(move |y| (x, y))).map(|(x, y)| field.int(x, y)).collect()
    }
}

/// An `O_K0`-order `O_K0[m eta]` with conductor `m O_K0`.
#[derive(Clone, Debug)]
pub struct CMOrder {
    field: CMField,
    m: RealQuadElem,
    conductor: RealQuadIdeal,
    z_basis: IntMatrix,
}

impl PartialEq for CMOrder {
    fn eq(&self, o: &Self) -> bool {
        self.field == o.field && self.z_basis == o.z_basis
    }
}

impl CMOrder {
    pub fn maximal(field: &CMField) -> Self {
        Self::from_conductor(field, &field.base.one()).expect("unit conductor")
    }

    /// `O_K0 + O_K0 m eta`, the order whose conductor is `m O_K0`.
    pub fn from_conductor(field: &CMField, m: &RealQuadElem) -> Result<Self, CmError> {
        if m.is_zero() {
            return Err(CmError::Zero);
        }
        if !m.is_integral() {
            return Err(CmError::NotIntegral);
        }
        let conductor = RealQuadIdeal::principal(m)?;
        let w = field.base.omega();
        let gens = [
            field.one(),
            field.from_k0(&w),
            CMElem { x: field.base.zero(), y: m.clone() },
            CMElem { x: field.base.zero(), y: m * &w },
        ];
        let rows: IntMatrix = gens.iter().map(|g| field.z_coords(g).expect("integral").to_vec()).collect();
        Ok(Self { field: field.clone(), m: m.clone(), conductor, z_basis: hnf(&rows) })
    }

    pub fn field(&self) -> &CMField {
        &self.field
    }

    pub fn conductor_generator(&self) -> &RealQuadElem {
        &self.m
    }

    pub fn conductor(&self) -> &RealQuadIdeal {
        &self.conductor
    }

    /// Hermite basis of the order as a Z-lattice in `O_K` coordinates.
    pub fn z_basis(&self) -> &IntMatrix {
        &self.z_basis
    }

    /// Index `[O_K : O]`.
    pub fn index(&self) -> BigInt {
        self.conductor.norm()
    }

    pub fn contains(&self, a: &CMElem) -> bool {
        if !a.x.is_integral() {
            return false;
        }
        match self.m.inverse() {
            Ok(minv) => (&a.y * &minv).is_integral(),
            Err(_) => false,
        }
    }

    /// Membership through the Z-basis alone.
    pub fn lattice_contains(&self, a: &CMElem) -> bool {
        self.field.z_coords(a).is_some_and(|c| solve_in_hnf(&self.z_basis, &c).is_some())
    }

    /// `x` in `f_O ∩ O_K0`: `x b` lies in the order for every Z-basis element `b` of `O_K`.
    pub fn in_conductor(&self, x: &RealQuadElem) -> bool {
        let f = &self.field;
        x.is_integral()
            && (0..4).all(|i| {
                let mut e = [BigInt::zero(), BigInt::zero(), BigInt::zero(), BigInt::zero()];
                e[i] = BigInt::one();
                self.lattice_contains(&f.mul_k0(x, &f.from_z_coords(&e)))
            })
    }

    /// `x` in `f_{eta,O} ∩ O_K0`: `x eta` lies in the order.
    pub fn in_eta_conductor(&self, x: &RealQuadElem) -> bool {
        x.is_integral() && self.lattice_contains(&self.field.mul_k0(x, &self.field.eta()))
    }

    /// Z-lattice `I * O` for an ideal `I` of `O_K0`, in Hermite form.
    pub fn ideal_lattice(&self, ideal: &RealQuadIdeal) -> IntMatrix {
        let (a, b, c) = ideal.hermite();
        let ib = [
            self.field.base.from_ints(a.clone(), BigInt::zero()),
            self.field.base.from_ints(b.clone(), c.clone()),
        ];
        let mut rows = Vec::with_capacity(8);
        for s in &ib {
            for r in &self.z_basis {
                let e = self.field.from_z_coords(r);
                let p = self.field.mul_k0(s, &e);
                rows.push(self.field.z_coords(&p).expect("integral").to_vec());
            }
        }
        hnf(&rows)
    }

    /// Position at a split prime: the valuations of the conductor at `l1, l2`.
    pub fn position(&self, l: u64) -> Result<LatticePosition, CmError> {
        conductor_valuations(self, l)
    }
}

/// `max { k : theta in l^k O }`, computed with lattice membership tests.
pub fn ideal_valuation(theta: &CMElem, l: &RealQuadIdeal, order: &CMOrder) -> Result<u32, CmError> {
    let field = &order.field;
    if field.is_zero(theta) {
        return Err(CmError::Zero);
    }
    if !order.contains(theta) {
        return Err(CmError::NotInOrder);
    }
    if l.is_unit_ideal() {
        return Err(CmError::Zero);
    }
    let coords = field.z_coords(theta).ok_or(CmError::NotInOrder)?;
    let mut k = 0;
    let mut power = l.clone();
    loop {
        let lat = order.ideal_lattice(&power);
        if solve_in_hnf(&lat, &coords).is_none() {
            return Ok(k);
        }
        k += 1;
        power = power.mul(l);
    }
}

fn split_primes(field: &RealQuadField, l: u64) -> Result<(RealQuadIdeal, RealQuadIdeal), CmError> {
    match factor_rational_prime(field, l)? {
        SplittingResult::Split(a, b) => Ok((a, b)),
        _ => Err(CmError::NotSplit(l)),
    }
}

pub fn conductor_valuations(order: &CMOrder, l: u64) -> Result<LatticePosition, CmError> {
    let (l1, l2) = split_primes(&order.field.base, l)?;
    Ok(LatticePosition { nu1: l1.valuation(&order.m)?, nu2: l2.valuation(&order.m)? })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum KSplitting {
    Split,
    Ramified,
    Inert,
}

/// How a degree-one prime `l` of `O_K0` decomposes in `O_K`, read off the
/// factorization of the eta polynomial over `O_K0 / l`.
pub fn splitting_in_k(l: &RealQuadIdeal, field: &CMField) -> Result<KSplitting, CmError> {
    let (a, _, c) = l.hermite();
    if !c.is_one() {
        return Err(CmError::NotDegreeOne);
    }
    let p = a.to_u64().ok_or(CmError::NotDegreeOne)?;
    if !is_prime_u64(p) || p == 2 {
        return Err(CmError::NotDegreeOne);
    }
    let t = l.residue(&field.t).ok_or(CmError::NotIntegral)?;
    let n = l.residue(&field.n).ok_or(CmError::NotIntegral)?;
    let pb = BigInt::from(p);
    let disc: BigInt = (&t * &t - &n * BigInt::from(4)).mod_floor(&pb);
    if disc.is_zero() {
        return Ok(KSplitting::Ramified);
    }
    let e = BigInt::from((p - 1) / 2);
    Ok(if disc.modpow(&e, &pb).is_one() { KSplitting::Split } else { KSplitting::Inert })
}

/// Frobenius as an element of `O_K` with `pi * conj(pi) = q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeilNumber {
    field: CMField,
    pi: CMElem,
    q: BigInt,
}

impl WeilNumber {
    pub fn new(field: &CMField, pi: CMElem, q: BigInt) -> Result<Self, CmError> {
        if !field.is_integral(&pi) {
            return Err(CmError::NotIntegral);
        }
        let nrm = field.rel_norm(&pi);
        if nrm != field.base.from_ints(q.clone(), BigInt::zero()) {
            return Err(CmError::BadRelativeNorm(nrm.to_string()));
        }
        Ok(Self { field: field.clone(), pi, q })
    }

    pub fn from_power_basis(field: &CMField, coords: &[BigRational; 4], q: BigInt) -> Result<Self, CmError> {
        Self::new(field, field.from_power_basis(coords), q)
    }

    pub fn field(&self) -> &CMField {
        &self.field
    }

    pub fn pi(&self) -> &CMElem {
        &self.pi
    }

    pub fn pi_bar(&self) -> CMElem {
        self.field.conj(&self.pi)
    }

    pub fn q(&self) -> &BigInt {
        &self.q
    }

    /// Coordinates over the power basis of the primitive generator `2 eta - t`.
    pub fn coords(&self) -> [BigRational; 4] {
        self.field
            .power_basis_coords(&self.pi, &self.field.generator())
            .expect("generator is primitive")
    }

    /// `pi - conj(pi)`.
    pub fn pi_minus_pi_bar(&self) -> CMElem {
        self.field.sub(&self.pi, &self.pi_bar())
    }

    /// Characteristic polynomial `x^4 - a1 x^3 + a2 x^2 - q a1 x + q^2`, constant term first.
    pub fn weil_polynomial(&self) -> [BigInt; 5] {
        let s = self.field.rel_trace(&self.pi);
        let a1 = s.trace().to_integer();
        let a2 = s.norm().to_integer() + &self.q * 2;
        [&self.q * &self.q, -(&self.q * &a1), a2, -a1, BigInt::one()]
    }

    /// Z-lattice spanned by `pi^i pi-bar^j`, `0 <= i, j <= 3`.
    pub fn z_pi_pi_bar_lattice(&self) -> IntMatrix {
        let f = &self.field;
        let pb = self.pi_bar();
        let mut rows = Vec::new();
        let mut pi_i = f.one();
        for _ in 0..4 {
            let mut m = pi_i.clone();
            for _ in 0..4 {
                rows.push(f.z_coords(&m).expect("integral").to_vec());
                m = f.mul(&m, &pb);
            }
            pi_i = f.mul(&pi_i, &self.pi);
        }
        hnf(&rows)
    }

    /// True when `Z[pi, pi-bar]` contains `O_K0`.
    pub fn is_ok0_order(&self) -> bool {
        let lat = self.z_pi_pi_bar_lattice();
        let w = self.field.from_k0(&self.field.base.omega());
        solve_in_hnf(&lat, &self.field.z_coords(&w).expect("integral")).is_some()
    }

    /// The smallest `O_K0`-order containing `pi`, namely `O_K0[pi] = O_K0 + O_K0 y eta`.
    pub fn rm_order(&self) -> Result<CMOrder, CmError> {
        CMOrder::from_conductor(&self.field, &self.pi.y)
    }
}

/// `Z[pi, pi-bar]` as a `CMOrder`, with an error if it is not an `O_K0`-order.
pub fn frobenius_order(pi: &WeilNumber) -> Result<CMOrder, CmError> {
    if !pi.is_ok0_order() {
        return Err(CmError::NotOk0Order);
    }
    let order = pi.rm_order()?;
    debug_assert_eq!(order.z_basis, pi.z_pi_pi_bar_lattice());
    Ok(order)
}

/// Valuation data of `pi - pi-bar` at the two primes above `l`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrobeniusValuations {
    /// `h_i = nu_{l_i, O_K}(pi - pi-bar)`.
    pub depth: LatticePosition,
    /// `nu_{l_i, O}(pi - pi-bar)` in the order `O = O_K0[pi]`, which is always zero.
    pub in_order: LatticePosition,
    /// `nu_{l_i}` of the conductor of `O_K0[pi]`.
    pub conductor: LatticePosition,
}

pub fn frobenius_valuations(pi: &WeilNumber, l: u64) -> Result<FrobeniusValuations, CmError> {
    let (l1, l2) = split_primes(&pi.field.base, l)?;
    let ok = CMOrder::maximal(&pi.field);
    let order = pi.rm_order()?;
    let d = pi.pi_minus_pi_bar();
    let depth = LatticePosition::new(ideal_valuation(&d, &l1, &ok)?, ideal_valuation(&d, &l2, &ok)?);
    let in_order = LatticePosition::new(ideal_valuation(&d, &l1, &order)?, ideal_valuation(&d, &l2, &order)?);
    let conductor = conductor_valuations(&order, l)?;
    Ok(FrobeniusValuations { depth, in_order, conductor })
}

/// Multiplicative order of `a` in `(O / l O)^*` for a degree-one prime `l`,
/// where `O = O_K0[m eta]` and `a` lies in `O`.
pub fn order_mod_prime(a: &CMElem, l: &RealQuadIdeal, order: &CMOrder) -> Result<u64, CmError> {
    let field = &order.field;
    let (p, _, c) = l.hermite();
    if !c.is_one() {
        return Err(CmError::NotDegreeOne);
    }
    let p = p.to_u64().ok_or(CmError::NotDegreeOne)?;
    if !order.contains(a) {
        return Err(CmError::NotInOrder);
    }
    // Work in F_p[e]/(e^2 - t' e + n') with e = m eta.
    let m = &order.m;
    let tp = l.residue(&(m * &field.t)).ok_or(CmError::NotIntegral)?.to_u64().unwrap();
    let np = l.residue(&(&(m * m) * &field.n)).ok_or(CmError::NotIntegral)?.to_u64().unwrap();
    let y_over_m = &a.y * &m.inverse()?;
    let ax = l.residue(&a.x).ok_or(CmError::NotIntegral)?.to_u64().unwrap();
    let ay = l.residue(&y_over_m).ok_or(CmError::NotIntegral)?.to_u64().unwrap();
    let mul = |(x1, y1): (u64, u64), (x2, y2): (u64, u64)| {
        let yy = y1 * y2 % p;
        ((x1 * x2 + (p - np) * yy) % p, (x1 * y2 + x2 * y1 + tp * yy) % p)
    };
    let base = (ax, ay);
    let mut acc = base;
    for k in 1..=(p * p) {
        if acc == (1, 0) {
            return Ok(k);
        }
        acc = mul(acc, base);
        if acc == (0, 0) {
            break;
        }
    }
    Err(CmError::NotInvertible(p))
}

/// `(u, u1, u2)` with `u_i` the order of `pi` modulo `l_i O_K` and `u = lcm(u1, u2)`.
pub fn extension_degrees(pi: &WeilNumber, l: u64) -> Result<(u64, u64, u64), CmError> {
    let (l1, l2) = split_primes(&pi.field.base, l)?;
    let ok = CMOrder::maximal(&pi.field);
    let u1 = order_mod_prime(&pi.pi, &l1, &ok)?;
    let u2 = order_mod_prime(&pi.pi, &l2, &ok)?;
    Ok((u1.lcm(&u2), u1, u2))
}

/// Degree of the field of definition of `J[l]` for a Jacobian whose
/// endomorphism ring is locally `O`: the order of `pi` in `(O / l O)^*`.
pub fn torsion_field_degree(pi: &WeilNumber, l: &RealQuadIdeal, order: &CMOrder) -> Result<u64, CmError> {
    order_mod_prime(&pi.pi, l, order)
}

/// Level data of a working field `F_{q^r}` at a prime `l`: with `pi^r = A + B eta`,
/// `cap = nu_l(A - 1)` bounds the rational torsion depth and
/// `delta = nu_l(B) - nu_l(y_pi)` is the offset of `nu(pi^r - pi-bar^r)` over `nu(pi - pi-bar)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelData {
    pub cap: u32,
    pub delta: u32,
}

pub fn level_data(pi: &WeilNumber, l: &RealQuadIdeal, r: u32) -> Result<LevelData, CmError> {
    let f = &pi.field;
    let pr = f.pow(&pi.pi, r);
    let a1 = &pr.x - &f.base.one();
    let cap = if a1.is_zero() { u32::MAX } else { l.valuation(&a1)? };
    let delta = l.valuation(&pr.y)? - l.valuation(&pi.pi.y)?;
    Ok(LevelData { cap, delta })
}

/// Write `theta` as `(a + b pi + c pi^2 + d pi^3) / l^e` after multiplying by a
/// power of `q` to clear the denominators coprime to `l`. Returns the numerator
/// coefficients, `e` and the power of `q` used.
pub fn el_form(pi: &WeilNumber, theta: &CMElem, l: u64) -> Result<([BigInt; 4], u32, u32), CmError> {
    let coords = pi.field.power_basis_coords(theta, &pi.pi).ok_or(CmError::Zero)?;
    let den = coords.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let lb = BigInt::from(l);
    let mut e = 0u32;
    let mut rest = den.clone();
    while (&rest % &lb).is_zero() {
        rest /= &lb;
        e += 1;
    }
    // The remaining denominator must divide a power of q.
    let mut qpow = 0u32;
    let mut scale = BigInt::one();
    while !(&scale % &rest).is_zero() {
        scale *= &pi.q;
        qpow += 1;
        if qpow > 64 {
            return Err(CmError::NotEllPower(l));
        }
    }
    let le = lb.pow(e);
    let mut out: [BigInt; 4] = Default::default();
    for (o, c) in out.iter_mut().zip(coords.iter()) {
        let v = c * BigRational::from_integer(&scale * &le);
        if !v.is_integer() {
            return Err(CmError::NotEllPower(l));
        }
        *o = v.to_integer();
    }
    Ok((out, e, qpow))
}

// JSON descriptors

/// `{"schema": "cm-field/1", "d": ..., "eta_trace": elem, "eta_norm": elem, "quartic": [c0..c4], "disc": int?}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct CMFieldJson {
    pub schema: String,
    pub d: i64,
    pub eta_trace: ElemJson,
    pub eta_norm: ElemJson,
    pub quartic: [i64; 5],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub disc: Option<i64>,
}

pub const CM_FIELD_SCHEMA: &str = "cm-field/1";

impl CMField {
    pub fn from_json(j: &CMFieldJson) -> Result<Self, CmError> {
        if j.schema != CM_FIELD_SCHEMA {
            return Err(CmError::Descriptor(format!("unknown schema {}", j.schema)));
        }
        let base = RealQuadField::new(j.d)?;
        let t = base.elem_from_json(&j.eta_trace)?;
        let n = base.elem_from_json(&j.eta_norm)?;
        let quartic = j.quartic.map(BigInt::from);
        let f = CMField::new(base, t, n, quartic)?;
        if let Some(w) = j.disc {
            let w = BigInt::from(w);
            let c = f.discriminant();
            if w != c {
                return Err(CmError::DiscriminantMismatch { witness: w, computed: c });
            }
        }
        Ok(f)
    }

    pub fn to_json(&self) -> Result<CMFieldJson, CmError> {
        Ok(CMFieldJson {
            schema: CM_FIELD_SCHEMA.to_string(),
            d: self.base.d(),
            eta_trace: self.t.to_json()?,
            eta_norm: self.n.to_json()?,
            quartic: [0, 1, 2, 3, 4].map(|i| self.quartic[i].to_i64().unwrap_or(0)),
            disc: self.discriminant().to_i64(),
        })
    }
}

/// Weil number given either by power-basis coordinates of `2 eta - t`
/// (`[[num, den]; 4]`) or directly as `x + y eta`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct WeilJson {
    pub q: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub power_basis: Option<[[i64; 2]; 4]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<ElemJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<ElemJson>,
}

impl WeilNumber {
    pub fn from_json(field: &CMField, j: &WeilJson) -> Result<Self, CmError> {
        let q = BigInt::from(j.q);
        match (&j.power_basis, &j.x, &j.y) {
            (Some(pb), None, None) => {
                if pb.iter().any(|c| c[1] == 0) {
                    return Err(CmError::Descriptor("zero denominator".into()));
                }
                let coords = pb.map(|c| BigRational::new(c[0].into(), c[1].into()));
                Self::from_power_basis(field, &coords, q)
            }
            (None, Some(x), Some(y)) => {
                let pi = field.elem(field.base.elem_from_json(x)?, field.base.elem_from_json(y)?);
                Self::new(field, pi, q)
            }
            _ => Err(CmError::Descriptor("give either power_basis or x and y".into())),
        }
    }
}

/// A CM fixture: field, Weil number and the prime under study.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct CMFixtureJson {
    pub field: CMFieldJson,
    pub weil: WeilJson,
    pub ell: u64,
    #[serde(default)]
    pub notes: String,
}

pub struct CMFixture {
    pub field: CMField,
    pub weil: WeilNumber,
    pub ell: u64,
}

impl CMFixture {
    pub fn from_json(j: &CMFixtureJson) -> Result<Self, CmError> {
        let field = CMField::from_json(&j.field)?;
        let weil = WeilNumber::from_json(&field, &j.weil)?;
        Ok(Self { field, weil, ell: j.ell })
    }

    pub fn parse(s: &str) -> Result<Self, CmError> {
        let j: CMFixtureJson = serde_json::from_str(s).map_err(|e| CmError::Descriptor(e.to_string()))?;
        Self::from_json(&j)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    /// `eta^2 - omega eta + 125` over Q(sqrt 1837).
    fn ex1_field() -> CMField {
        let base = RealQuadField::new(1837).unwrap();
        CMField::new(base, base.int(0, 1), base.int(125, 0), [1181, 0, 81, 0, 1].map(BigInt::from)).unwrap()
    }

    #[test]
    fn example_field_validates() {
        let f = ex1_field();
        assert_eq!(f.delta(), f.base().int(-41, 1));
        assert_eq!(f.discriminant(), BigInt::from(1837i64 * 1837 * 1181));
    }

    #[test]
    fn rejects_galois_and_wrong_quartic() {
        let base = RealQuadField::new(5).unwrap();
        // eta = i: K = Q(sqrt5, i) is biquadratic.
        let e = CMField::new(base, base.int(0, 0), base.int(1, 0), [1, 0, 2, 0, 1].map(BigInt::from))
            .map(|_| ())
            .unwrap_err();
        assert!(matches!(e, CmError::QuarticMismatch | CmError::NotPrimitive(_)));
        let f = ex1_field();
        let bad = CMField::new(*f.base(), f.eta_trace().clone(), f.eta_norm().clone(), [1181, 0, 80, 0, 1].map(BigInt::from));
        assert_eq!(bad.unwrap_err(), CmError::QuarticMismatch);
    }

    #[test]
    fn rejects_non_maximal_eta() {
        // 3 eta has eta-polynomial x^2 - 3 omega x + 1125; O_K0[3 eta] is not maximal.
        let base = RealQuadField::new(1837).unwrap();
        let res = CMField::new(base, base.int(0, 3), base.int(1125, 0), [95661, 0, 729, 0, 1].map(BigInt::from));
        assert_eq!(res.unwrap_err(), CmError::NotMaximal(3));
    }

    #[test]
    fn p211_weil_number() {
        let f = ex1_field();
        let pi = WeilNumber::from_power_basis(&f, &[r(45, 2), r(3, 2), r(1, 2), r(0, 1)], 211.into()).unwrap();
        assert_eq!(pi.pi().x, f.base().int(2, -1));
        assert_eq!(pi.pi().y, f.base().int(3, 0));
        let wp = pi.weil_polynomial();
        assert_eq!(wp, [44521, -1899, -17, -9, 1].map(BigInt::from));
        assert!(pi.is_ok0_order());
        let o = frobenius_order(&pi).unwrap();
        assert_eq!(conductor_valuations(&o, 3).unwrap(), LatticePosition::new(1, 1));
        let fv = frobenius_valuations(&pi, 3).unwrap();
        assert_eq!(fv.depth, LatticePosition::new(1, 1));
        assert_eq!(fv.in_order, LatticePosition::new(0, 0));
        let coords = pi.coords();
        assert_eq!(coords, [r(45, 2), r(3, 2), r(1, 2), r(0, 1)]);
    }

    #[test]
    fn maximal_order_conductor() {
        let f = ex1_field();
        let ok = CMOrder::maximal(&f);
        assert_eq!(conductor_valuations(&ok, 3).unwrap(), LatticePosition::new(0, 0));
        assert_eq!(conductor_valuations(&ok, 5), Err(CmError::NotSplit(5)));
    }

    #[test]
    fn extension_degrees_p211() {
        let f = ex1_field();
        let pi = WeilNumber::new(&f, f.elem(f.base().int(2, -1), f.base().int(3, 0)), 211.into()).unwrap();
        // pi = 2 - omega mod 3: residues 2 at l1 (omega = 0) and 1 at l2 (omega = 1).
        assert_eq!(extension_degrees(&pi, 3).unwrap(), (2, 2, 1));
        let (l1, l2) = split_primes(f.base(), 3).unwrap();
        // At the bottom of the l1 lattice the 3-part of pi is a Jordan block of order 6.
        let floor1 = CMOrder::from_conductor(&f, &principal_generator(&l1).unwrap()).unwrap();
        assert_eq!(torsion_field_degree(&pi, &l1, &floor1).unwrap(), 6);
        assert_eq!(torsion_field_degree(&pi, &l2, &CMOrder::maximal(&f)).unwrap(), 1);
    }

    #[test]
    fn splitting_p211() {
        let f = ex1_field();
        let (l1, l2) = split_primes(f.base(), 3).unwrap();
        assert_eq!(splitting_in_k(&l1, &f).unwrap(), KSplitting::Split);
        assert_eq!(splitting_in_k(&l2, &f).unwrap(), KSplitting::Inert);
    }

    #[test]
    fn valuation_errors() {
        let f = ex1_field();
        let ok = CMOrder::maximal(&f);
        let (l1, _) = split_primes(f.base(), 3).unwrap();
        assert_eq!(ideal_valuation(&f.zero(), &l1, &ok), Err(CmError::Zero));
        let half = f.elem(f.base().elem(r(1, 2), r(0, 1)), f.base().zero());
        assert_eq!(ideal_valuation(&half, &l1, &ok), Err(CmError::NotInOrder));
        let o3 = CMOrder::from_conductor(&f, &f.base().int(3, 0)).unwrap();
        assert_eq!(ideal_valuation(&f.eta(), &l1, &o3), Err(CmError::NotInOrder));
    }

    #[test]
    fn el_form_round_trip() {
        let f = ex1_field();
        let pi = WeilNumber::new(&f, f.elem(f.base().int(2, -1), f.base().int(3, 0)), 211.into()).unwrap();
        let theta = f.eta();
        let (c, e, qp) = el_form(&pi, &theta, 3).unwrap();
        // Rebuild and compare with q^qp * theta * 3^e.
        let mut acc = f.zero();
        let mut p = f.one();
        for ci in &c {
            acc = f.add(&acc, &f.mul_k0(&f.base().from_ints(ci.clone(), BigInt::zero()), &p));
            p = f.mul(&p, pi.pi());
        }
        let s = BigInt::from(211).pow(qp) * BigInt::from(3).pow(e);
        assert_eq!(acc, f.mul_k0(&f.base().from_ints(s, BigInt::zero()), &theta));
    }
    fn fixture(name: &str) -> CMFixture {
        let path = format!("{}/../../fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
        CMFixture::parse(&std::fs::read_to_string(path).unwrap()).unwrap()
    }

    #[test]
    fn p85201_weil_number() {
        let fx = fixture("p85201.json");
        let (f, pi) = (&fx.field, &fx.weil);
        assert_eq!(pi.q(), &BigInt::from(85201));
        let ok = CMOrder::maximal(f);
        let d = pi.pi_minus_pi_bar();
        let (l1, l2) = split_primes(f.base(), 3).unwrap();
        assert_eq!(ideal_valuation(&d, &l1, &ok).unwrap(), 2);
        assert_eq!(ideal_valuation(&d, &l2, &ok).unwrap(), 1);
        assert_eq!(splitting_in_k(&l1, f).unwrap(), KSplitting::Inert);
        assert_eq!(splitting_in_k(&l2, f).unwrap(), KSplitting::Split);
        // Z[pi, pi-bar] misses O_K0 here, so positions are read in O_K0[pi].
        assert!(!pi.is_ok0_order());
        assert_eq!(frobenius_order(pi).unwrap_err(), CmError::NotOk0Order);
        let fv = frobenius_valuations(pi, 3).unwrap();
        assert_eq!(fv.depth, LatticePosition::new(2, 1));
        assert_eq!(fv.in_order, LatticePosition::new(0, 0));
        assert_eq!(fv.conductor, fv.depth);
    }

    #[test]
    fn p211_fixture_matches() {
        let fx = fixture("p211.json");
        assert_eq!(fx.field, ex1_field());
        let fv = frobenius_valuations(&fx.weil, 3).unwrap();
        assert_eq!(fv.depth, LatticePosition::new(1, 1));
        assert!(fx.weil.is_ok0_order());
    }

    #[test]
    fn eta_conductor_agrees_on_k0() {
        let f = ex1_field();
        let b = *f.base();
        let m = b.int(21, 1);
        let o = CMOrder::from_conductor(&f, &m).unwrap();
        for a in -4..=4 {
            for c in -4..=4 {
                let x = b.int(a, c);
                assert_eq!(o.in_conductor(&x), o.in_eta_conductor(&x));
                assert_eq!(o.in_conductor(&x), o.conductor().contains(&x));
            }
        }
        // Off O_K0 the two sets differ: eta-bar * eta = n lies in O_K0.
        let eta_bar = f.conj(&f.eta());
        assert!(o.lattice_contains(&f.mul(&eta_bar, &f.eta())));
        assert!(!o.lattice_contains(&eta_bar));
    }
}
