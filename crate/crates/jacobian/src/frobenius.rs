//! Matrices of the `q`-power Frobenius on rational `l^n`-torsion.

use crate::curve::{Divisor, Jacobian};
use crate::torsion::EllGroup;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FrobError {
    #[error("basis element {0} does not have order l^n or the basis is dependent")]
    BadBasis(usize),
    #[error("Frobenius image of basis element {0} left the torsion subgroup")]
    NotStable(usize),
}

/// `m[i][j]` is the `i`-th coordinate of `pi(B_j)`, modulo `l^n`.
#[derive(Clone, Debug, Serialize)]
pub struct FrobMatrix {
    pub ell: u64,
    pub n: u32,
    pub m: Vec<Vec<u64>>,
    #[serde(skip)]
    pub basis: Vec<Divisor>,
}

/// The matrix of `pi` on a free `Z/l^n`-basis of a Frobenius-stable subgroup.
pub fn frobenius_matrix(jac: &Jacobian, basis: &[Divisor], ell: u64, n: u32) -> Result<FrobMatrix, FrobError> {
    let mut g = EllGroup::new(jac, ell);
    for (idx, b) in basis.iter().enumerate() {
        g.insert(b);
        if g.rank() != idx + 1 || g.gens()[idx].0 != *b || g.gens()[idx].1 != n {
            return Err(FrobError::BadBasis(idx));
        }
    }
    let modulus = ell.pow(n);
    let d = basis.len();
    let mut m = vec![vec![0u64; d]; d];
    for (j, b) in basis.iter().enumerate() {
        let c = g.coords(&jac.frobenius(b)).ok_or(FrobError::NotStable(j))?;
        for (i, x) in c.iter().enumerate() {
            m[i][j] = (x % modulus).to_u64().expect("reduced");
        }
    }
    Ok(FrobMatrix { ell, n, m, basis: basis.to_vec() })
}

impl FrobMatrix {
    pub fn modulus(&self) -> u64 {
        self.ell.pow(self.n)
    }

    pub fn dim(&self) -> usize {
        self.m.len()
    }

    /// `Some(lambda)` when the matrix is `lambda I`.
    pub fn scalar(&self) -> Option<u64> {
        let lambda = self.m.first()?.first().copied()?;
        for (i, row) in self.m.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                if x != if i == j { lambda } else { 0 } {
                    return None;
                }
            }
        }
        Some(lambda)
    }

    /// Largest `j <= n` with the matrix scalar modulo `l^j`.
    pub fn scalar_depth(&self) -> u32 {
        (0..=self.n).rev().find(|&j| self.reduce(j).scalar().is_some()).unwrap_or(0)
    }

    /// The same matrix modulo `l^j` for `j <= n` (the basis is then only nominal).
    pub fn reduce(&self, j: u32) -> FrobMatrix {
        let md = self.ell.pow(j);
        FrobMatrix {
            ell: self.ell,
            n: j,
            m: self.m.iter().map(|r| r.iter().map(|x| x % md).collect()).collect(),
            basis: self.basis.clone(),
        }
    }

    /// `det(x I - M)` modulo `l^n`, constant term first.
    pub fn char_poly(&self) -> Vec<u64> {
        let md = self.modulus();
        let d = self.dim();
        let entries: Vec<Vec<Vec<u64>>> = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| {
                        let c = (md - self.m[i][j] % md) % md;
                        if i == j { vec![c, 1 % md] } else { vec![c] }
                    })
                    .collect()
            })
            .collect();
        let cols: Vec<usize> = (0..d).collect();
        let mut p = det_poly(&entries, 0, &cols, md);
        p.resize(d + 1, 0);
        p
    }

    /// Whether `pi(B_j) = sum_i m[i][j] B_i` holds in the group.
    pub fn reproduces(&self, jac: &Jacobian) -> bool {
        self.basis.iter().enumerate().all(|(j, b)| {
            let coeffs: Vec<u64> = self.m.iter().map(|row| row[j]).collect();
            jac.combination(&coeffs, &self.basis) == jac.frobenius(b)
        })
    }
}

fn poly_mul(a: &[u64], b: &[u64], md: u64) -> Vec<u64> {
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = ((out[i + j] as u128 + *x as u128 * *y as u128) % md as u128) as u64;
        }
    }
    out
}

fn poly_addsub(a: &mut Vec<u64>, b: &[u64], md: u64, negate: bool) {
    if a.len() < b.len() {
        a.resize(b.len(), 0);
    }
    for (x, y) in a.iter_mut().zip(b) {
        *x = if negate { (*x + md - y % md) % md } else { (*x + y) % md };
    }
}

/// Laplace expansion along row `row` over the remaining columns.
fn det_poly(e: &[Vec<Vec<u64>>], row: usize, cols: &[usize], md: u64) -> Vec<u64> {
    if cols.is_empty() {
        return vec![1 % md];
    }
    let mut acc = vec![0u64];
    for (k, &c) in cols.iter().enumerate() {
        let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
        let minor = det_poly(e, row + 1, &rest, md);
        let term = poly_mul(&e[row][c], &minor, md);
        poly_addsub(&mut acc, &term, md, k % 2 == 1);
    }
    acc
}

/// Reduce an integer polynomial modulo `m`, constant term first.
pub fn reduce_poly(p: &[BigInt], m: u64) -> Vec<u64> {
    let mb = BigInt::from(m);
    p.iter().map(|c| c.mod_floor(&mb).to_u64().expect("reduced")).collect()
}

/// Brute-force count of Frobenius-stable cyclic subgroups of order `l^n` in the
/// span of a two-element basis of order `l^n`: returns `(stable, total)`.
pub fn cyclic_subgroup_scan(jac: &Jacobian, basis: &[Divisor; 2], ell: u64, n: u32) -> (usize, usize) {
    let md = ell.pow(n);
    let mut gens: Vec<(u64, u64)> = (0..md).map(|b| (1, b)).collect();
    gens.extend((0..ell.pow(n - 1)).map(|a| (ell * a, 1)));
    let stable = gens
        .iter()
        .filter(|&&(a, b)| {
            let r = jac.combination(&[a, b], basis);
            let fr = jac.frobenius(&r);
            let mut cur = jac.zero();
            (0..md).any(|_| {
                let hit = cur == fr;
                cur = jac.add(&cur, &r);
                hit
            })
        })
        .count();
    (stable, gens.len())
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

    #[test]
    fn char_poly_of_small_matrices() {
        let f = FrobMatrix { ell: 3, n: 2, m: vec![vec![1, 2], vec![3, 4]], basis: vec![] };
        // x^2 - 5x - 2 mod 9
        assert_eq!(f.char_poly(), vec![7, 4, 1]);
        let s = FrobMatrix { ell: 3, n: 2, m: vec![vec![4, 0], vec![0, 4]], basis: vec![] };
        assert_eq!(s.scalar(), Some(4));
        assert_eq!(s.scalar_depth(), 2);
        let t = FrobMatrix { ell: 3, n: 2, m: vec![vec![4, 3], vec![0, 1]], basis: vec![] };
        assert_eq!(t.scalar_depth(), 1);
    }

    #[test]
    fn full_three_torsion_matrix_matches_weil_polynomial() {
        let w = weil_from_traces(211, 9, -17);
        let c = Arc::new(HyperellipticCurve::new(211, &[56, 164, 62, 130, 109, 79, 31], w.clone()).unwrap());
        let j = c.jacobian(6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s = sylow(&j, 3, &mut rng, 400).unwrap();
        let b = s.free_torsion(1).unwrap();
        let fm = frobenius_matrix(&j, &b, 3, 1).unwrap();
        assert!(fm.reproduces(&j));
        assert_eq!(fm.char_poly(), reduce_poly(&w, 3));
        assert!(fm.scalar().is_none());
    }
}
