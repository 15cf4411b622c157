//! Structure of finite abelian `l`-subgroups of `J(F_{q^k})`.
//!
//! A basis `g_1..g_r` with orders `l^{e_j}` is kept so that the order-`l`
//! elements `tau_j = l^{e_j - 1} g_j` are independent; then the subgroup is the
//! direct sum of the `<g_j>`. New elements are reduced against the basis one
//! `l`-adic layer at a time, and an element that reaches higher than the basis
//! allows is swapped in. The Sylow subgroup is certified complete when the
//! product of the orders equals the `l`-part of `#J(F_{q^k})`.

use crate::curve::{Divisor, Jacobian};
use crate::zeta::valuation;
use num_bigint::BigUint;
use rand::Rng;
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TorsionError {
    #[error("l-Sylow subgroup not spanned after {0} random samples")]
    SamplingExhausted(usize),
    #[error("J[l^{requested}] is not rational: the group has invariants {invariants:?}")]
    RationalDepth { requested: u32, invariants: Vec<u32> },
}

#[derive(Clone, Debug)]
pub struct EllGroup {
    jac: Jacobian,
    ell: u64,
    gens: Vec<(Divisor, u32)>,
    /// Every combination `sum c_j tau_j` with its coefficients.
    span: HashMap<Divisor, Vec<u64>>,
    /// Upper bound on element orders, as an exponent of `l`.
    max_exp: u32,
}

impl EllGroup {
    pub fn new(jac: &Jacobian, ell: u64) -> Self {
        let max_exp = valuation(jac.order(), ell);
        let mut g = Self { jac: jac.clone(), ell, gens: Vec::new(), span: HashMap::new(), max_exp };
        g.rebuild();
        g
    }

    pub fn jacobian(&self) -> &Jacobian {
        &self.jac
    }

    pub fn ell(&self) -> u64 {
        self.ell
    }

    pub fn gens(&self) -> &[(Divisor, u32)] {
        &self.gens
    }

    /// Exponents `e_j`, largest first.
    pub fn invariants(&self) -> Vec<u32> {
        let mut v: Vec<u32> = self.gens.iter().map(|g| g.1).collect();
        v.sort_unstable_by(|a, b| b.cmp(a));
        v
    }

    pub fn rank(&self) -> usize {
        self.gens.len()
    }

    /// `log_l` of the group order.
    pub fn log_order(&self) -> u32 {
        self.gens.iter().map(|g| g.1).sum()
    }

    fn rebuild(&mut self) {
        let j = &self.jac;
        let r = self.gens.len();
        let mut span = HashMap::new();
        span.insert(j.zero(), vec![0u64; r]);
        for (idx, (g, e)) in self.gens.iter().enumerate() {
            let tau = j.mul(g, &BigUint::from(self.ell).pow(e - 1));
            let prev: Vec<(Divisor, Vec<u64>)> = span.into_iter().collect();
            span = HashMap::with_capacity(prev.len() * self.ell as usize);
            for (d, c) in prev {
                let mut cur = d;
                for t in 0..self.ell {
                    let mut cc = c.clone();
                    cc[idx] = t;
                    let next = j.add(&cur, &tau);
                    span.insert(cur, cc);
                    cur = next;
                }
            }
        }
        self.span = span;
    }

    /// Smallest `s` with `l^s h = 0`, if at most the group exponent bound.
    pub fn order_exp(&self, h: &Divisor) -> Option<u32> {
        self.jac.ell_order(h, self.ell, self.max_exp)
    }

    fn l_pow(&self, e: u32) -> BigUint {
        BigUint::from(self.ell).pow(e)
    }

    /// Add `h` to the generated subgroup.
    pub fn insert(&mut self, h: &Divisor) {
        let j = self.jac.clone();
        let mut h = h.clone();
        loop {
            if j.is_zero(&h) {
                return;
            }
            let s = self.order_exp(&h).expect("element of l-power order");
            let t = j.mul(&h, &self.l_pow(s - 1));
            let Some(c) = self.span.get(&t).cloned() else {
                self.gens.push((h, s));
                self.rebuild();
                return;
            };
            let mut h2 = h.clone();
            let mut low = Vec::new();
            for (idx, &cj) in c.iter().enumerate() {
                if cj == 0 {
                    continue;
                }
                let (g, e) = &self.gens[idx];
                if *e >= s {
                    let m = self.l_pow(e - s) * cj;
                    h2 = j.sub(&h2, &j.mul(g, &m));
                } else {
                    low.push(idx);
                }
            }
            match low.first() {
                None => h = h2,
                Some(&idx) => {
                    let old = std::mem::replace(&mut self.gens[idx], (h2, s));
                    self.rebuild();
                    h = old.0;
                }
            }
        }
    }

    /// Coordinates `x_j mod l^{e_j}` with `h = sum x_j g_j`, or `None` if `h` is outside.
    pub fn coords(&self, h: &Divisor) -> Option<Vec<BigUint>> {
        let j = &self.jac;
        let mut x = vec![BigUint::from(0u32); self.gens.len()];
        let mut h = h.clone();
        loop {
            if j.is_zero(&h) {
                break;
            }
            let s = self.order_exp(&h)?;
            let t = j.mul(&h, &self.l_pow(s - 1));
            let c = self.span.get(&t)?;
            for (idx, &cj) in c.iter().enumerate() {
                if cj == 0 {
                    continue;
                }
                let (g, e) = &self.gens[idx];
                if *e < s {
                    return None;
                }
                let m = self.l_pow(e - s) * cj;
                h = j.sub(&h, &j.mul(g, &m));
                x[idx] += m;
            }
        }
        for (xi, (_, e)) in x.iter_mut().zip(&self.gens) {
            *xi %= self.l_pow(*e);
        }
        Some(x)
    }

    pub fn contains(&self, h: &Divisor) -> bool {
        self.coords(h).is_some()
    }

    /// Generators of the `l^n`-torsion subgroup with their exponents `min(e_j, n)`.
    pub fn torsion(&self, n: u32) -> Vec<(Divisor, u32)> {
        self.gens
            .iter()
            .map(|(g, e)| {
                let shift = e.saturating_sub(n);
                (self.jac.mul(g, &self.l_pow(shift)), (*e).min(n))
            })
            .collect()
    }

    /// A basis of the `l^n`-torsion when it is free over `Z/l^n`.
    pub fn free_torsion(&self, n: u32) -> Result<Vec<Divisor>, TorsionError> {
        if self.gens.iter().any(|g| g.1 < n) {
            return Err(TorsionError::RationalDepth { requested: n, invariants: self.invariants() });
        }
        Ok(self.torsion(n).into_iter().map(|g| g.0).collect())
    }

    /// The image of the subgroup under a group endomorphism.
    pub fn image(&self, f: impl Fn(&Divisor) -> Divisor) -> EllGroup {
        let mut out = EllGroup::new(&self.jac, self.ell);
        for (g, _) in &self.gens {
            out.insert(&f(g));
        }
        out
    }
}

/// The full `l`-Sylow subgroup of `J(F_{q^k})`, from cofactor multiples of random divisors.
pub fn sylow<R: Rng>(jac: &Jacobian, ell: u64, rng: &mut R, max_samples: usize) -> Result<EllGroup, TorsionError> {
    let a = valuation(jac.order(), ell);
    let cofactor = jac.order() / BigUint::from(ell).pow(a);
    let mut g = EllGroup::new(jac, ell);
    let mut samples = 0;
    while g.log_order() < a {
        if samples == max_samples {
            return Err(TorsionError::SamplingExhausted(samples));
        }
        samples += 1;
        let d = jac.mul(&jac.random(rng), &cofactor);
        g.insert(&d);
    }
    Ok(g)
}

/// Basis of `J[l^n]` over `F_{q^k}` when it is fully rational (rank 4 over `Z/l^n`).
pub fn torsion_basis<R: Rng>(jac: &Jacobian, ell: u64, n: u32, rng: &mut R) -> Result<Vec<Divisor>, TorsionError> {
    let s = sylow(jac, ell, rng, 400)?;
    let basis = s.free_torsion(n)?;
    if basis.len() < 4 {
        return Err(TorsionError::RationalDepth { requested: n, invariants: s.invariants() });
    }
    Ok(basis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::HyperellipticCurve;
    use crate::zeta::weil_from_traces;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashSet;
    use std::sync::Arc;

    fn ex1() -> Arc<HyperellipticCurve> {
        Arc::new(HyperellipticCurve::new(211, &[56, 164, 62, 130, 109, 79, 31], weil_from_traces(211, 9, -17)).unwrap())
    }

    #[test]
    fn sylow_structure_over_small_extensions() {
        let c = ex1();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for k in [1, 2] {
            let j = c.jacobian(k).unwrap();
            let s = sylow(&j, 3, &mut rng, 200).unwrap();
            assert_eq!(s.log_order(), valuation(j.order(), 3));
            for (g, e) in s.gens() {
                assert_eq!(s.order_exp(g), Some(*e));
            }
            // coordinates round-trip
            for _ in 0..10 {
                let cof = j.order() / BigUint::from(3u32).pow(s.log_order());
                let h = j.mul(&j.random(&mut rng), &cof);
                let x = s.coords(&h).unwrap();
                let back = s.gens().iter().zip(&x).fold(j.zero(), |acc, ((g, _), c)| j.add(&acc, &j.mul(g, c)));
                assert_eq!(back, h);
            }
        }
    }

    #[test]
    fn sylow_matches_exhaustive_enumeration() {
        let c = Arc::new(HyperellipticCurve::from_point_counts(13, &[1, 3, 0, 5, 0, 1]).unwrap());
        let j = c.jacobian(1).unwrap();
        let all: HashSet<_> = j.enumerate().unwrap().into_iter().collect();
        assert_eq!(BigUint::from(all.len()), *j.order());
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for ell in [2u64, 3, 5, 7] {
            let part: Vec<_> = all.iter().filter(|d| j.ell_order(d, ell, 20).is_some()).collect();
            let s = sylow(&j, ell, &mut rng, 200).unwrap();
            assert_eq!(BigUint::from(ell).pow(s.log_order()), BigUint::from(part.len()), "l = {ell}");
            assert!(part.iter().all(|d| s.contains(d)));
        }
    }
}
