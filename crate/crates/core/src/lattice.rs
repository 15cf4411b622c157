//! Integer lattices: Hermite and Smith normal forms over `BigInt`.
//!
//! Matrices are row-major and a lattice is the Z-span of the rows.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type IntMatrix = Vec<Vec<BigInt>>;

pub fn to_big(rows: &[Vec<i64>]) -> IntMatrix {
    rows.iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect()
}

pub fn identity(n: usize) -> IntMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

fn row_combine(rows: &mut IntMatrix, i: usize, j: usize, a: &BigInt, b: &BigInt, c: &BigInt, d: &BigInt) {
    // (row_i, row_j) <- (a row_i + b row_j, c row_i + d row_j)
    let ri = rows[i].clone();
    let rj = rows[j].clone();
    for k in 0..ri.len() {
        rows[i][k] = a * &ri[k] + b * &rj[k];
        rows[j][k] = c * &ri[k] + d * &rj[k];
    }
}

fn row_sub_mul(rows: &mut IntMatrix, target: usize, src: usize, q: &BigInt) {
    if q.is_zero() {
        return;
    }
    let s = rows[src].clone();
    for (x, y) in rows[target].iter_mut().zip(s.iter()) {
        *x -= q * y;
    }
}

/// Row Hermite normal form with the unimodular transform: `U * m = H`.
///
/// `H` keeps all rows (zero rows at the bottom) so that `U` stays square.
/// Pivots are positive and entries above a pivot lie in `[0, pivot)`.
pub fn hnf_with_transform(m: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let nrows = m.len();
    let ncols = if nrows == 0 { 0 } else { m[0].len() };
    let mut h = m.clone();
    let mut u = identity(nrows);
    let mut pivot_row = 0;
    for col in 0..ncols {
        if pivot_row >= nrows {
            break;
        }
        // Fold every row below the pivot into the pivot row via extended gcd.
        for r in (pivot_row + 1)..nrows {
            if h[r][col].is_zero() {
                continue;
            }
            if h[pivot_row][col].is_zero() {
                h.swap(pivot_row, r);
                u.swap(pivot_row, r);
                continue;
            }
            let a = h[pivot_row][col].clone();
            let b = h[r][col].clone();
            let e = a.extended_gcd(&b);
            let (g, x, y) = (e.gcd, e.x, e.y);
            let (ag, bg) = (&a / &g, &b / &g);
            let neg_bg = -bg;
            row_combine(&mut h, pivot_row, r, &x, &y, &neg_bg, &ag);
            row_combine(&mut u, pivot_row, r, &x, &y, &neg_bg, &ag);
        }
        if h[pivot_row][col].is_zero() {
            continue;
        }
        if h[pivot_row][col].is_negative() {
            for x in h[pivot_row].iter_mut() {
                *x = -x.clone();
            }
            for x in u[pivot_row].iter_mut() {
                *x = -x.clone();
            }
        }
        let p = h[pivot_row][col].clone();
        for r in 0..pivot_row {
            let q = h[r][col].div_floor(&p);
            row_sub_mul(&mut h, r, pivot_row, &q);
            row_sub_mul(&mut u, r, pivot_row, &q);
        }
        pivot_row += 1;
    }
    (h, u)
}

/// Row HNF with zero rows removed.
pub fn hnf(m: &IntMatrix) -> IntMatrix {
    let (h, _) = hnf_with_transform(m);
    h.into_iter().filter(|r| r.iter().any(|x| !x.is_zero())).collect()
}

/// Basis of `{x : x * m = 0}` (left kernel), as rows.
pub fn left_kernel(m: &IntMatrix) -> IntMatrix {
    let (h, u) = hnf_with_transform(m);
    h.iter()
        .zip(u)
        .filter(|(r, _)| r.iter().all(|x| x.is_zero()))
        .map(|(_, t)| t)
        .collect()
}

/// Coordinates of `v` in the HNF basis `basis`, if `v` lies in the lattice.
pub fn solve_in_hnf(basis: &IntMatrix, v: &[BigInt]) -> Option<Vec<BigInt>> {
    let mut rest: Vec<BigInt> = v.to_vec();
    let mut coords = Vec::with_capacity(basis.len());
    for row in basis {
        let col = row.iter().position(|x| !x.is_zero())?;
        let (q, r) = rest[col].div_rem(&row[col]);
        if !r.is_zero() {
            return None;
        }
        for (x, y) in rest.iter_mut().zip(row.iter()) {
            *x -= &q * y;
        }
        coords.push(q);
    }
    if rest.iter().all(|x| x.is_zero()) {
        Some(coords)
    } else {
        None
    }
}

/// Absolute determinant of a full-rank square lattice basis (index in Z^n).
pub fn index_in_zn(basis: &IntMatrix) -> Option<BigInt> {
    let h = hnf(basis);
    let n = h.first().map(|r| r.len()).unwrap_or(0);
    if h.len() != n {
        return None;
    }
    let mut d = BigInt::one();
    for (i, row) in h.iter().enumerate() {
        if row[i].is_zero() {
            return None;
        }
        d *= &row[i];
    }
    Some(d)
}

/// Lattice `{x in Z^n : x * m = 0 mod modulus}` where `m` is `n x c`.
pub fn congruence_lattice(m: &IntMatrix, modulus: &BigInt) -> IntMatrix {
    let n = m.len();
    let c = if n == 0 { 0 } else { m[0].len() };
    // Stack [m ; modulus * I_c] and take the left kernel, keep the first n coords.
    let mut stacked = m.clone();
    for j in 0..c {
        let mut row = vec![BigInt::zero(); c];
        row[j] = modulus.clone();
        stacked.push(row);
    }
    let ker = left_kernel(&stacked);
    let proj: IntMatrix = ker.into_iter().map(|r| r[..n].to_vec()).collect();
    hnf(&proj)
}

/// Smith normal form `U * m * V = D`.
pub struct Smith {
    pub diag: Vec<BigInt>,
    pub u: IntMatrix,
    pub v: IntMatrix,
}

pub fn smith(m: &IntMatrix) -> Smith {
    let nrows = m.len();
    let ncols = if nrows == 0 { 0 } else { m[0].len() };
    let mut d = m.clone();
    let mut u = identity(nrows);
    let mut v = identity(ncols);
    let rank_bound = nrows.min(ncols);
    for t in 0..rank_bound {
        // Pick the smallest nonzero entry in the remaining block as pivot.
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..nrows {
                for j in t..ncols {
                    if !d[i][j].is_zero()
                        && best.map_or(true, |(bi, bj)| d[i][j].abs() < d[bi][bj].abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else {
                return finish_smith(d, u, v, t);
            };
            d.swap(t, bi);
            u.swap(t, bi);
            swap_cols(&mut d, t, bj);
            swap_cols(&mut v, t, bj);
            let p = d[t][t].clone();
            let mut clean = true;
            for i in (t + 1)..nrows {
                let q = d[i][t].div_floor(&p);
                row_sub_mul(&mut d, i, t, &q);
                row_sub_mul(&mut u, i, t, &q);
                if !d[i][t].is_zero() {
                    clean = false;
                }
            }
            for j in (t + 1)..ncols {
                let q = d[t][j].div_floor(&p);
                col_sub_mul(&mut d, j, t, &q);
                col_sub_mul(&mut v, j, t, &q);
                if !d[t][j].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // Divisibility: fold any entry not divisible by the pivot into row t.
            let mut fixed = true;
            'outer: for i in (t + 1)..nrows {
                for j in (t + 1)..ncols {
                    if !(&d[i][j] % &p).is_zero() {
                        for k in 0..ncols {
                            let x = d[i][k].clone();
                            d[t][k] += x;
                        }
                        let ui = u[i].clone();
                        for (x, y) in u[t].iter_mut().zip(ui) {
                            *x += y;
                        }
                        fixed = false;
                        break 'outer;
                    }
                }
            }
            if fixed {
                break;
            }
        }
        if d[t][t].is_negative() {
            for x in d[t].iter_mut() {
                *x = -x.clone();
            }
            for x in u[t].iter_mut() {
                *x = -x.clone();
            }
        }
    }
    finish_smith(d, u, v, rank_bound)
}

fn finish_smith(d: IntMatrix, u: IntMatrix, v: IntMatrix, rank: usize) -> Smith {
    let n = d.len().min(d.first().map_or(0, |r| r.len()));
    let diag = (0..n)
        .map(|i| if i < rank { d[i][i].clone() } else { BigInt::zero() })
        .collect();
    Smith { diag, u, v }
}

fn swap_cols(m: &mut IntMatrix, a: usize, b: usize) {
    if a == b {
        return;
    }
    for row in m.iter_mut() {
        row.swap(a, b);
    }
}

fn col_sub_mul(m: &mut IntMatrix, target: usize, src: usize, q: &BigInt) {
    if q.is_zero() {
        return;
    }
    for row in m.iter_mut() {
        let s = row[src].clone();
        row[target] -= q * s;
    }
}

pub fn mat_mul(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let n = a.len();
    let k = b.len();
    let m = if k == 0 { 0 } else { b[0].len() };
    let mut out = vec![vec![BigInt::zero(); m]; n];
    for i in 0..n {
        for t in 0..k {
            if a[i][t].is_zero() {
                continue;
            }
            for j in 0..m {
                out[i][j] += &a[i][t] * &b[t][j];
            }
        }
    }
    out
}

/// Inverse of a unimodular matrix, via the HNF transform of `m`.
pub fn unimodular_inverse(m: &IntMatrix) -> Option<IntMatrix> {
    let (h, u) = hnf_with_transform(m);
    // U m = H with m unimodular means H = I, so U is the inverse.
    if h == identity(m.len()) {
        Some(u)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(rows: &[Vec<i64>]) -> IntMatrix {
        to_big(rows)
    }

    #[test]
    fn hnf_small() {
        let h = hnf(&b(&[vec![2, 4], vec![3, 5]]));
        assert_eq!(h, b(&[vec![1, 1], vec![0, 2]]));
    }

    #[test]
    fn kernel_is_annihilated() {
        let m = b(&[vec![1, 2], vec![2, 4], vec![3, 1]]);
        let k = left_kernel(&m);
        assert_eq!(k.len(), 1);
        let prod = mat_mul(&k, &m);
        assert!(prod.iter().flatten().all(|x| x.is_zero()));
    }

    #[test]
    fn congruence_lattice_index() {
        // x0 + 2 x1 = 0 mod 6 has index 6 in Z^2.
        let m = b(&[vec![1], vec![2]]);
        let l = congruence_lattice(&m, &BigInt::from(6));
        assert_eq!(index_in_zn(&l), Some(BigInt::from(6)));
    }

    #[test]
    fn smith_diag_and_transform() {
        let m = b(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]);
        let s = smith(&m);
        assert_eq!(s.diag, vec![BigInt::from(2), BigInt::from(6), BigInt::from(12)]);
        let d = mat_mul(&mat_mul(&s.u, &m), &s.v);
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { s.diag[i].clone() } else { BigInt::zero() };
                assert_eq!(d[i][j], want);
            }
        }
    }

    #[test]
    fn solve_membership() {
        let basis = hnf(&b(&[vec![3, 0], vec![1, 2]]));
        assert!(solve_in_hnf(&basis, &[BigInt::from(4), BigInt::from(2)]).is_some());
        assert!(solve_in_hnf(&basis, &[BigInt::from(1), BigInt::from(0)]).is_none());
    }
}
