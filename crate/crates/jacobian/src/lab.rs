//! Measurements at a split prime `ell = l1 l2` of the real multiplication field:
//! ideal torsion `J[l_i^n]` and its field of definition, the Frobenius-scalar
//! depth `nu_{l_i,J}(pi - pi-bar)`, Tate self-pairing exponents, Weil isotropy
//! of `J[l1] x J[l2]` and the numerator test for endomorphism membership.
//!
//! The ideal `l_i = (alpha_i)` acts through `alpha_i = a + b (pi + pi-bar)`, and
//! the `l_i`-primary part of a finite `ell`-group is the image of `alpha_{i'}^E`
//! for `ell^E` its exponent.

use crate::curve::{CurveError, Divisor, HyperellipticCurve, Jacobian};
use crate::frobenius::{cyclic_subgroup_scan, frobenius_matrix, reduce_poly, FrobError, FrobMatrix};
use crate::pairing::{root_order_exp, tate, weil, PairingError, RootsOfUnity};
use crate::torsion::{sylow, EllGroup, TorsionError};
use crate::field::OpCount;
use crate::zeta::{char_poly_power, discriminant, valuation};
use g2rm_core::cmorder::{frobenius_valuations, CMElem, CmError, WeilNumber};
use g2rm_core::pairingmodel::{degenerate_subgroups, k_from_valuation, proj_points, ProjPoint, SelfPairingPoly};
use g2rm_core::realquad::{factor_rational_prime, principal_generator, RealQuadElem, RealQuadIdeal, SplittingResult};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use serde::Serialize;
use std::collections::HashMap;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Torsion(#[from] TorsionError),
    #[error(transparent)]
    Pairing(#[from] PairingError),
    #[error(transparent)]
    Frob(#[from] FrobError),
    #[error("CM arithmetic: {0}")]
    Cm(#[from] CmError),
    #[error("{0} does not split into two principal primes of the real subfield")]
    NotSplit(u64),
    #[error("pi + pi-bar does not generate O_K0 locally at {0}")]
    RealAction(u64),
    #[error("q = {0} is not the characteristic of the curve")]
    PrimePowerQ(BigInt),
    #[error("torsion field degree exceeds the configured bound {0}")]
    TorsionFieldTooLarge(usize),
}

/// `a + b (pi + pi-bar)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RealAction {
    pub a: i64,
    pub b: i64,
}

#[derive(Clone, Debug)]
pub struct IdealContext {
    pub ell: u64,
    pub weil: WeilNumber,
    pub primes: [RealQuadIdeal; 2],
    pub generators: [RealQuadElem; 2],
    pub actions: [RealAction; 2],
    /// `h_i = nu_{l_i, O_K}(pi - pi-bar)`, the upper bound for the scalar depth.
    pub depth: [u32; 2],
}

impl IdealContext {
    pub fn new(weil: &WeilNumber, ell: u64) -> Result<Self, LabError> {
        let base = weil.field().base();
        let SplittingResult::Split(l1, l2) = factor_rational_prime(base, ell).map_err(|_| LabError::NotSplit(ell))? else {
            return Err(LabError::NotSplit(ell));
        };
        let g1 = principal_generator(&l1).map_err(|_| LabError::NotSplit(ell))?;
        let g2 = principal_generator(&l2).map_err(|_| LabError::NotSplit(ell))?;
        let (tx, ty) = weil.field().rel_trace(weil.pi()).int_coords().map_err(|_| LabError::RealAction(ell))?;
        if (&ty % BigInt::from(ell)).is_zero() {
            return Err(LabError::RealAction(ell));
        }
        // y g = (a' y - b' x) + b' (pi + pi-bar) for g = a' + b' omega and pi + pi-bar = x + y omega
        let action = |g: &RealQuadElem| -> Result<RealAction, LabError> {
            let (ga, gb) = g.int_coords().map_err(|_| LabError::RealAction(ell))?;
            let a = (&ga * &ty - &gb * &tx).to_i64().ok_or(LabError::RealAction(ell))?;
            let b = gb.to_i64().ok_or(LabError::RealAction(ell))?;
            Ok(RealAction { a, b })
        };
        let fv = frobenius_valuations(weil, ell)?;
        Ok(Self {
            ell,
            weil: weil.clone(),
            actions: [action(&g1)?, action(&g2)?],
            primes: [l1, l2],
            generators: [g1, g2],
            depth: [fv.depth.get(0), fv.depth.get(1)],
        })
    }

    /// `pi^r + pi-bar^r` in `O_K0`.
    pub fn trace_of_power(&self, r: usize) -> RealQuadElem {
        let f = self.weil.field();
        f.rel_trace(&f.pow(self.weil.pi(), r as u32))
    }

    /// Necessary condition for `pi^r = 1` on `J[l_i^n]`: trace `2` and determinant `1` modulo `l_i^n`.
    pub fn degree_admissible(&self, i: usize, r: usize, n: u32) -> bool {
        let m = BigUint::from(self.ell).pow(n);
        let q = self.weil.q().magnitude();
        if !(q.modpow(&BigUint::from(r), &m)).is_one() && !m.is_one() {
            return false;
        }
        let base = self.weil.field().base();
        let t = &self.trace_of_power(r) - &base.int(2, 0);
        t.is_zero() || self.primes[i].valuation(&t).is_ok_and(|v| v >= n)
    }

    /// `nu_{l_i}(s_r)` for `s_r = (pi^r - pi-bar^r) / (pi - pi-bar)` in `O_K0`.
    pub fn power_offset(&self, i: usize, r: usize) -> Result<u32, LabError> {
        let f = self.weil.field();
        let pr = f.pow(self.weil.pi(), r as u32);
        let num = f.sub(&pr, &f.conj(&pr));
        let s = f.mul(&num, &f.inverse(&self.weil.pi_minus_pi_bar())?);
        debug_assert!(s.y.is_zero());
        Ok(self.primes[i].valuation(&s.x).map_err(|_| CmError::Zero)?)
    }

    /// `(pi - pi-bar) / alpha_i^m` as an element of `K`.
    pub fn theta(&self, i: usize, m: u32) -> Result<CMElem, LabError> {
        let f = self.weil.field();
        let a = f.pow(&f.from_k0(&self.generators[i]), m);
        Ok(f.mul(&self.weil.pi_minus_pi_bar(), &f.inverse(&a)?))
    }
}

#[derive(Clone, Copy, Debug)]
pub struct LabConfig {
    /// Largest extension degree `r` of `F_q` to build.
    pub max_degree: usize,
    pub max_samples: usize,
    /// Exhaust `J[l^n]` in the self-pairing scan up to this many elements, else sample.
    pub exhaustive_limit: u64,
}

impl Default for LabConfig {
    fn default() -> Self {
        Self { max_degree: 24, max_samples: 400, exhaustive_limit: 729 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct NuLevel {
    pub n: u32,
    pub degree: usize,
    pub matrix: Vec<Vec<u64>>,
    pub scalar: Option<u64>,
    pub stable_subgroups: usize,
    pub total_subgroups: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct NuReport {
    pub i: usize,
    pub nu: u32,
    pub bound: u32,
    pub levels: Vec<NuLevel>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SelfPairingReport {
    pub i: usize,
    pub degree: usize,
    pub n: u32,
    pub nu_r: u32,
    pub predicted_k: u32,
    pub measured_k: u32,
    pub form_k: u32,
    pub lambdas: [u64; 4],
    pub samples: usize,
    pub degenerate_measured: Vec<ProjPoint>,
    pub degenerate_form: Vec<ProjPoint>,
}

#[derive(Clone, Debug, Serialize)]
pub struct IsotropyReport {
    pub degree: usize,
    pub pairs: usize,
    pub trivial: usize,
    pub direct_sum: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ElOutcome {
    pub member: bool,
    pub e: u32,
    pub degree: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct CostLine {
    pub degree: usize,
    pub ops: OpCount,
    pub miller_iterations: u64,
}

/// Operation counts of the two local endomorphism ring strategies at `ell`.
#[derive(Clone, Debug, Serialize)]
pub struct CostReport {
    pub ell: u64,
    /// Degree of the field of definition of `J[ell]`.
    pub u: usize,
    /// Largest `n` with `J[ell^n]` rational over `F_{q^u}`.
    pub n: u32,
    /// `nu_ell([O_K : Z[pi]])`, the torsion level the numerator test may need.
    pub u_prime: u32,
    /// `u ell^{u' - n}` when `u' > n`.
    pub el_degree_formula: usize,
    pub el_degree_measured: usize,
    pub ours: CostLine,
    pub el: CostLine,
    /// `el.base_mults / ours.base_mults`.
    pub ratio: f64,
}

/// Caches Jacobians and Sylow subgroups over the extensions `F_{q^r}` it visits.
pub struct TorsionLab<R: Rng> {
    pub curve: Arc<HyperellipticCurve>,
    pub ctx: IdealContext,
    pub cfg: LabConfig,
    rng: R,
    jacs: HashMap<usize, Jacobian>,
    sylows: HashMap<usize, EllGroup>,
    primaries: HashMap<(usize, usize), EllGroup>,
}

impl<R: Rng> TorsionLab<R> {
    pub fn new(curve: Arc<HyperellipticCurve>, ctx: IdealContext, cfg: LabConfig, rng: R) -> Result<Self, LabError> {
        if ctx.weil.q() != &BigInt::from(curve.p()) {
            return Err(LabError::PrimePowerQ(ctx.weil.q().clone()));
        }
        Ok(Self { curve, ctx, cfg, rng, jacs: HashMap::new(), sylows: HashMap::new(), primaries: HashMap::new() })
    }

    pub fn rng(&mut self) -> &mut R {
        &mut self.rng
    }

    pub fn ell(&self) -> u64 {
        self.ctx.ell
    }

    pub fn jacobian(&mut self, r: usize) -> Result<Jacobian, LabError> {
        if r > self.cfg.max_degree {
            return Err(LabError::TorsionFieldTooLarge(self.cfg.max_degree));
        }
        if let Some(j) = self.jacs.get(&r) {
            return Ok(j.clone());
        }
        let j = self.curve.jacobian(r)?;
        self.jacs.insert(r, j.clone());
        Ok(j)
    }

    /// The `ell`-Sylow subgroup of `J(F_{q^r})`.
    pub fn sylow(&mut self, r: usize) -> Result<EllGroup, LabError> {
        if let Some(s) = self.sylows.get(&r) {
            return Ok(s.clone());
        }
        let j = self.jacobian(r)?;
        let s = sylow(&j, self.ctx.ell, &mut self.rng, self.cfg.max_samples)?;
        self.sylows.insert(r, s.clone());
        Ok(s)
    }

    /// The `l_i`-primary part of `J(F_{q^r})[ell^infinity]`.
    pub fn primary(&mut self, i: usize, r: usize) -> Result<EllGroup, LabError> {
        if let Some(s) = self.primaries.get(&(i, r)) {
            return Ok(s.clone());
        }
        let s = self.sylow(r)?;
        let e = s.invariants().first().copied().unwrap_or(0);
        let act = self.ctx.actions[1 - i];
        let j = s.jacobian().clone();
        let p = s.image(|d| (0..e).fold(d.clone(), |acc, _| j.apply_real(act.a, act.b, &acc)));
        self.primaries.insert((i, r), p.clone());
        Ok(p)
    }

    /// Largest `n` with `J[l_i^n]` inside `J(F_{q^r})`.
    pub fn ideal_depth(&mut self, i: usize, r: usize) -> Result<u32, LabError> {
        let p = self.primary(i, r)?;
        let inv = p.invariants();
        Ok(if inv.len() >= 2 { inv[1] } else { 0 })
    }

    /// Smallest `r` with `J[l_i^n]` rational over `F_{q^r}`; levels above one
    /// only move by a factor of `ell` from the level below.
    pub fn ideal_torsion_degree(&mut self, i: usize, n: u32) -> Result<usize, LabError> {
        let ell = self.ctx.ell as usize;
        let candidates: Vec<usize> = if n <= 1 {
            let gl2 = (ell * ell - 1) * (ell * ell - ell);
            (1..=gl2).filter(|d| gl2 % d == 0).collect()
        } else {
            let r = self.ideal_torsion_degree(i, n - 1)?;
            vec![r, r * ell]
        };
        for r in candidates {
            if r > self.cfg.max_degree {
                return Err(LabError::TorsionFieldTooLarge(self.cfg.max_degree));
            }
            if !self.ctx.degree_admissible(i, r, n) {
                continue;
            }
            if self.ideal_depth(i, r)? >= n {
                return Ok(r);
            }
        }
        Err(LabError::TorsionFieldTooLarge(self.cfg.max_degree))
    }

    /// A basis of `J[l_i^n]` over `F_{q^r}`.
    pub fn ideal_basis(&mut self, i: usize, n: u32, r: usize) -> Result<[Divisor; 2], LabError> {
        let p = self.primary(i, r)?;
        let b = p.free_torsion(n)?;
        if b.len() != 2 {
            return Err(TorsionError::RationalDepth { requested: n, invariants: p.invariants() }.into());
        }
        Ok([b[0].clone(), b[1].clone()])
    }

    /// Frobenius matrix on `J[l_i^n]`, computed where that group is rational.
    pub fn ideal_frobenius(&mut self, i: usize, n: u32) -> Result<(usize, FrobMatrix), LabError> {
        let r = self.ideal_torsion_degree(i, n)?;
        let b = self.ideal_basis(i, n, r)?;
        let j = self.jacobian(r)?;
        Ok((r, frobenius_matrix(&j, &b, self.ctx.ell, n)?))
    }

    /// Frobenius matrix on the full `J[ell^n]`.
    pub fn full_frobenius(&mut self, n: u32) -> Result<(usize, FrobMatrix), LabError> {
        let r = self.full_torsion_degree(n)?;
        let b = self.sylow(r)?.free_torsion(n)?;
        let j = self.jacobian(r)?;
        Ok((r, frobenius_matrix(&j, &b, self.ctx.ell, n)?))
    }

    /// Smallest `r` with `J[ell^n]` rational over `F_{q^r}`.
    pub fn full_torsion_degree(&mut self, n: u32) -> Result<usize, LabError> {
        let ell = self.ctx.ell;
        let m = ell.pow(n);
        for r in 1..=self.cfg.max_degree {
            // char poly of pi^r must be (x - 1)^4 mod ell^n
            let cp = reduce_poly(&char_poly_power(self.curve.weil(), r as u32), m);
            let binom = [1i64, -4, 6, -4, 1].map(|c| c.rem_euclid(m as i64) as u64);
            if cp != binom {
                continue;
            }
            if valuation(&self.curve.group_order(r as u32), ell) < 4 * n {
                continue;
            }
            let s = self.sylow(r)?;
            if s.rank() >= 4 && s.invariants()[3] >= n {
                return Ok(r);
            }
        }
        Err(LabError::TorsionFieldTooLarge(self.cfg.max_degree))
    }

    /// Largest `n <= h_i` with a scalar Frobenius matrix on `J[l_i^n]`.
    pub fn nu_from_frobenius(&mut self, i: usize) -> Result<NuReport, LabError> {
        let bound = self.ctx.depth[i];
        let mut levels = Vec::new();
        let mut nu = 0;
        for n in 1..=bound.max(1) {
            let (r, fm) = self.ideal_frobenius(i, n)?;
            let j = self.jacobian(r)?;
            let basis = [fm.basis[0].clone(), fm.basis[1].clone()];
            let (stable, total) = cyclic_subgroup_scan(&j, &basis, self.ctx.ell, n);
            let scalar = fm.scalar();
            levels.push(NuLevel {
                n,
                degree: r,
                matrix: fm.m.clone(),
                scalar,
                stable_subgroups: stable,
                total_subgroups: total,
            });
            if scalar.is_none() || n > bound {
                break;
            }
            nu = n;
        }
        Ok(NuReport { i, nu, bound, levels })
    }

    /// Tate self-pairing on `J[l_i^n]` over the field of definition of `J[l_i]`.
    pub fn self_pairing(&mut self, i: usize, nu: u32) -> Result<SelfPairingReport, LabError> {
        let ell = self.ctx.ell;
        let r = self.ideal_torsion_degree(i, 1)?;
        let n = self.ideal_depth(i, r)?;
        let [p, q] = self.ideal_basis(i, n, r)?;
        let j = self.jacobian(r)?;
        let fl = j.field().clone();
        let m = BigUint::from(ell).pow(n);
        let mu = RootsOfUnity::new(&fl, ell, n)?;
        let rng = &mut self.rng;
        let mut lam = |a: &Divisor, b: &Divisor| -> Result<u64, LabError> { Ok(mu.log(&fl, &tate(&j, a, b, &m, rng)?)?) };
        let lambdas = [lam(&p, &p)?, lam(&p, &q)?, lam(&q, &p)?, lam(&q, &q)?];
        let form = SelfPairingPoly::from_lambdas(ell, n, lambdas[0], lambdas[1], lambdas[2], lambdas[3]);
        let nu_r = nu + self.ctx.power_offset(i, r)?;
        let md = ell.pow(n);
        let coeffs: Vec<(u64, u64)> = if md * md <= self.cfg.exhaustive_limit {
            (0..md).flat_map(|a| (0..md).map(move |b| (a, b))).collect()
        } else {
            (0..200).map(|_| (self.rng.gen_range(0..md), self.rng.gen_range(0..md))).collect()
        };
        let mut measured_k = 0;
        for &(a, b) in &coeffs {
            let x = j.combination(&[a, b], &[p.clone(), q.clone()]);
            let t = tate(&j, &x, &x, &m, &mut self.rng)?;
            measured_k = measured_k.max(root_order_exp(&fl, &t, ell, n).expect("pairing value in mu_{l^n}"));
        }
        let mut degenerate_measured = Vec::new();
        for pp in proj_points(ell) {
            let x = j.combination(&[pp.x1, pp.x2], &[p.clone(), q.clone()]);
            let t = tate(&j, &x, &x, &m, &mut self.rng)?;
            if root_order_exp(&fl, &t, ell, n).expect("pairing value in mu_{l^n}") < measured_k {
                degenerate_measured.push(pp);
            }
        }
        let degenerate_form = if form.is_zero() { proj_points(ell) } else { degenerate_subgroups(&form).expect("nonzero form") };
        Ok(SelfPairingReport {
            i,
            degree: r,
            n,
            nu_r,
            predicted_k: k_from_valuation(n, nu_r),
            measured_k,
            form_k: form.implied_k(),
            lambdas,
            samples: coeffs.len(),
            degenerate_measured,
            degenerate_form,
        })
    }

    /// Weil pairing `W_ell` on every pair of cyclic generators of `J[l1] x J[l2]`.
    pub fn weil_isotropy(&mut self) -> Result<IsotropyReport, LabError> {
        let ell = self.ctx.ell;
        let r1 = self.ideal_torsion_degree(0, 1)?;
        let r2 = self.ideal_torsion_degree(1, 1)?;
        let r = r1.lcm(&r2);
        let b1 = self.ideal_basis(0, 1, r)?;
        let b2 = self.ideal_basis(1, 1, r)?;
        let j = self.jacobian(r)?;
        let mut sum = EllGroup::new(&j, ell);
        for d in b1.iter().chain(&b2) {
            sum.insert(d);
        }
        let direct_sum = sum.rank() == 4 && sum.invariants().iter().all(|&e| e == 1);
        let gens = |b: &[Divisor; 2]| -> Vec<Divisor> { proj_points(ell).iter().map(|pp| j.combination(&[pp.x1, pp.x2], b)).collect() };
        let (g1, g2) = (gens(&b1), gens(&b2));
        let m = BigUint::from(ell);
        let fl = j.field().clone();
        let mut trivial = 0;
        for p in &g1 {
            for q in &g2 {
                if fl.is_one(&weil(&j, p, q, &m, &mut self.rng)?) {
                    trivial += 1;
                }
            }
        }
        Ok(IsotropyReport { degree: r, pairs: g1.len() * g2.len(), trivial, direct_sum })
    }

    /// Whether `(a + b pi + c pi^2 + d pi^3)` kills `J[ell^e]`, i.e. whether the
    /// element it defines after division by `ell^e` is an endomorphism.
    pub fn el_test(&mut self, numerator: &[BigInt; 4], e: u32) -> Result<ElOutcome, LabError> {
        if e == 0 {
            return Ok(ElOutcome { member: true, e, degree: 0 });
        }
        let r = self.full_torsion_degree(e)?;
        let basis = self.sylow(r)?.free_torsion(e)?;
        let j = self.jacobian(r)?;
        let member = basis.iter().all(|d| j.is_zero(&j.apply_pi_poly(numerator, d)));
        Ok(ElOutcome { member, e, degree: r })
    }

    /// Counts field operations for the Sylow basis plus one Tate pairing per ideal at
    /// degree `u`, against the Sylow basis plus the numerator test at the degree
    /// carrying `J[ell^{u'}]`.
    pub fn cost_report(&mut self) -> Result<CostReport, LabError> {
        let ell = self.ctx.ell;
        let u = self.full_torsion_degree(1)?;
        let n = self.sylow(u)?.invariants()[3];
        let weil = self.curve.weil().clone();
        let disc = discriminant(&weil);
        let index_sq = (&disc / self.ctx.weil.field().discriminant()).magnitude().clone();
        let u_prime = valuation(&index_sq, ell) / 2;
        let el_degree_formula = if u_prime > n { u * (ell as usize).pow(u_prime - n) } else { u };
        let el_degree_measured = if u_prime > n { self.full_torsion_degree(u_prime)? } else { u };

        let jac = self.curve.jacobian(u)?;
        let before = jac.field().ops();
        let s = sylow(&jac, ell, &mut self.rng, self.cfg.max_samples)?;
        let mut miller_iterations = 0;
        for i in 0..2 {
            let act = self.ctx.actions[1 - i];
            let e = s.invariants()[0];
            let prim = s.image(|d| (0..e).fold(d.clone(), |acc, _| jac.apply_real(act.a, act.b, &acc)));
            let p = &prim.torsion(1)[0].0;
            let m = BigUint::from(ell);
            tate(&jac, p, p, &m, &mut self.rng)?;
            miller_iterations += m.bits();
        }
        let ours = CostLine { degree: u, ops: jac.field().ops() - before, miller_iterations };

        let jac = self.curve.jacobian(el_degree_measured)?;
        let before = jac.field().ops();
        let s = sylow(&jac, ell, &mut self.rng, self.cfg.max_samples)?;
        let basis = s.free_torsion(u_prime.max(1))?;
        let theta = self.ctx.theta(0, u_prime.max(1))?;
        let (num, _, _) = g2rm_core::cmorder::el_form(&self.ctx.weil, &theta, ell)?;
        for d in &basis {
            jac.apply_pi_poly(&num, d);
        }
        let el = CostLine { degree: el_degree_measured, ops: jac.field().ops() - before, miller_iterations: 0 };
        let ratio = el.ops.base_mults as f64 / ours.ops.base_mults.max(1) as f64;
        Ok(CostReport { ell, u, n, u_prime, el_degree_formula, el_degree_measured, ours, el, ratio })
    }

    /// Membership of `(pi - pi-bar) / alpha_i^m` in `End(J)`, by the numerator test.
    pub fn el_theta(&mut self, i: usize, m: u32) -> Result<ElOutcome, LabError> {
        let theta = self.ctx.theta(i, m)?;
        let (num, e, _) = g2rm_core::cmorder::el_form(&self.ctx.weil, &theta, self.ctx.ell)?;
        self.el_test(&num, e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::CurveFixture;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn lab() -> TorsionLab<ChaCha8Rng> {
        let s = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures/p211_curve.json")).unwrap();
        let fx = CurveFixture::parse(&s).unwrap();
        let cm = fx.cm_fixture().unwrap().unwrap();
        let ctx = IdealContext::new(&cm.weil, cm.ell).unwrap();
        TorsionLab::new(Arc::new(fx.curve().unwrap()), ctx, LabConfig::default(), ChaCha8Rng::seed_from_u64(11)).unwrap()
    }

    #[test]
    fn example_actions_and_depths() {
        let l = lab();
        assert_eq!(l.ctx.actions[0], RealAction { a: 17, b: 1 });
        assert!(l.ctx.primes[0].contains(&l.ctx.generators[0]));
    }

    #[test]
    fn primary_parts_split_the_three_torsion() {
        let mut l = lab();
        let r = 6;
        let s = l.sylow(r).unwrap();
        let p1 = l.primary(0, r).unwrap();
        let p2 = l.primary(1, r).unwrap();
        assert_eq!(p1.log_order() + p2.log_order(), s.log_order());
        let j = l.jacobian(r).unwrap();
        // alpha_i kills J[l_i]
        for (i, p) in [(0, &p1), (1, &p2)] {
            let a = l.ctx.actions[i];
            for d in p.torsion(1) {
                assert!(j.is_zero(&j.apply_real(a.a, a.b, &d.0)));
            }
        }
    }
}
