//! Group orders from the Weil polynomial via power sums of its roots.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};

/// Power sums `s_m = sum alpha_i^m` for `m = 0..=len`, from a monic quartic
/// given constant term first.
pub fn power_sums(weil: &[BigInt; 5], len: usize) -> Vec<BigInt> {
    assert!(weil[4].is_one(), "Weil polynomial must be monic");
    let c = &weil[..4];
    let mut s = vec![BigInt::from(4)];
    for m in 1..=len {
        // Newton: s_m = -(sum_{j=1}^{min(m,4)} c_{4-j} s_{m-j}) - [m <= 4] m c_{4-m}
        let mut acc = BigInt::zero();
        for j in 1..=(if m <= 4 { m - 1 } else { 4 }) {
            acc += &c[4 - j] * &s[m - j];
        }
        if m <= 4 {
            acc += &c[4 - m] * BigInt::from(m);
        }
        s.push(-acc);
    }
    s
}

/// Characteristic polynomial of `pi^k`, constant term first.
pub fn char_poly_power(weil: &[BigInt; 5], k: u32) -> [BigInt; 5] {
    let k = k as usize;
    let s = power_sums(weil, 4 * k);
    let p: Vec<BigInt> = (1..=4).map(|j| s[j * k].clone()).collect();
    let e1 = p[0].clone();
    let e2: BigInt = (&e1 * &p[0] - &p[1]) / 2;
    let e3: BigInt = (&e2 * &p[0] - &e1 * &p[1] + &p[2]) / 3;
    let e4 = (&e3 * &p[0] - &e2 * &p[1] + &e1 * &p[2] - &p[3]) / 4;
    [e4, -e3, e2, -e1, BigInt::one()]
}

/// `#J(F_{q^k}) = prod (1 - alpha_i^k)`.
pub fn group_order(weil: &[BigInt; 5], k: u32) -> BigUint {
    let c = char_poly_power(weil, k);
    let v: BigInt = c.iter().sum();
    assert!(v.is_positive(), "group order must be positive");
    v.to_biguint().unwrap()
}

/// `#C(F_{q^k}) = q^k + 1 - sum alpha_i^k`.
pub fn curve_points(weil: &[BigInt; 5], q: u64, k: u32) -> BigInt {
    let s = power_sums(weil, k as usize);
    BigInt::from(q).pow(k) + 1 - &s[k as usize]
}

/// Largest `e` with `l^e | n`.
pub fn valuation(n: &BigUint, l: u64) -> u32 {
    let lb = BigUint::from(l);
    let mut n = n.clone();
    let mut e = 0;
    while !n.is_zero() && (&n % &lb).is_zero() {
        n /= &lb;
        e += 1;
    }
    e
}

/// `q`-Weil polynomial from the first two coefficients: `x^4 - a1 x^3 + a2 x^2 - q a1 x + q^2`.
pub fn weil_from_traces(q: i64, a1: i64, a2: i64) -> [BigInt; 5] {
    let q = BigInt::from(q);
    [&q * &q, -(&q * a1), BigInt::from(a2), BigInt::from(-a1), BigInt::one()]
}

/// Weil polynomial from `N_k = #C(F_{q^k})` for `k = 1, 2`.
pub fn weil_from_counts(q: i64, n1: i64, n2: i64) -> [BigInt; 5] {
    let a1 = q + 1 - n1;
    let s2 = q * q + 1 - n2;
    // s2 = a1^2 - 2 a2
    weil_from_traces(q, a1, (a1 * a1 - s2) / 2)
}

/// Discriminant of a monic integer polynomial (constant term first), as
/// `(-1)^{n(n-1)/2} Res(f, f')` by a fraction-free Sylvester determinant.
pub fn discriminant(f: &[BigInt]) -> BigInt {
    let n = f.len() - 1;
    let df: Vec<BigInt> = f.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect();
    let size = 2 * n - 1;
    let mut m = vec![vec![BigInt::zero(); size]; size];
    // rows of f shifted n - 1 times, then rows of f' shifted n times, leading coefficient first
    for r in 0..n - 1 {
        for (j, c) in f.iter().rev().enumerate() {
            m[r][r + j] = c.clone();
        }
    }
    for r in 0..n {
        for (j, c) in df.iter().rev().enumerate() {
            m[n - 1 + r][r + j] = c.clone();
        }
    }
    let res = bareiss(m);
    if (n * (n - 1) / 2) % 2 == 1 {
        -res
    } else {
        res
    }
}

fn bareiss(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if m[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&r| !m[r][k].is_zero()) else { return BigInt::zero() };
            m.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}
