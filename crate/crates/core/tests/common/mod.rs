//! Independent reference computations for cross-checking the library.
#![allow(dead_code)]

use std::collections::{BTreeSet, VecDeque};

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use sqd_core::IntMatrix;

pub fn to_i64(m: &IntMatrix) -> Vec<Vec<i64>> {
    m.rows()
        .iter()
        .map(|r| r.iter().map(|x| x.to_string().parse().unwrap()).collect())
        .collect()
}

/// Laplace expansion along the first row.
pub fn det_laplace(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    if n == 1 {
        return m[0][0].clone();
    }
    let mut total = BigInt::zero();
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<BigInt>> = m[1..]
            .iter()
            .map(|r| r.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, x)| x.clone()).collect())
            .collect();
        let term = &m[0][j] * det_laplace(&minor);
        if j % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

/// Ascending coefficients of `det(tI - A)` by evaluation at `t = 0..=d`
/// and Lagrange interpolation.
pub fn char_poly_oracle(a: &IntMatrix) -> Vec<BigInt> {
    let d = a.dim();
    let xs: Vec<i64> = (0..=d as i64).collect();
    let ys: Vec<BigInt> = xs
        .iter()
        .map(|&t| {
            let m: Vec<Vec<BigInt>> = (0..d)
                .map(|i| {
                    (0..d)
                        .map(|j| {
                            let diag = if i == j { BigInt::from(t) } else { BigInt::zero() };
                            diag - a.get(i, j)
                        })
                        .collect()
                })
                .collect();
            det_laplace(&m)
        })
        .collect();
    let mut coeffs = vec![BigRational::zero(); d + 1];
    for (i, &xi) in xs.iter().enumerate() {
        // basis polynomial ∏_{j≠i} (t - x_j)/(x_i - x_j)
        let mut basis = vec![BigRational::one()];
        let mut denom = BigRational::one();
        for (j, &xj) in xs.iter().enumerate() {
            if i == j {
                continue;
            }
            let mut next = vec![BigRational::zero(); basis.len() + 1];
            for (k, c) in basis.iter().enumerate() {
                next[k + 1] += c;
                next[k] -= c * BigRational::from_integer(BigInt::from(xj));
            }
            basis = next;
            denom *= BigRational::from_integer(BigInt::from(xi - xj));
        }
        for (k, c) in basis.iter().enumerate() {
            coeffs[k] += c * BigRational::from_integer(ys[i].clone()) / &denom;
        }
    }
    coeffs
        .into_iter()
        .map(|c| {
            assert!(c.is_integer());
            c.to_integer()
        })
        .collect()
}

pub fn mat_pow_naive(a: &IntMatrix, n: u32) -> Vec<Vec<BigInt>> {
    let d = a.dim();
    let mut acc: Vec<Vec<BigInt>> = (0..d)
        .map(|i| (0..d).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect();
    for _ in 0..n {
        acc = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| (0..d).map(|k| &acc[i][k] * a.get(k, j)).sum())
                    .collect()
            })
            .collect();
    }
    acc
}

/// Points `x/q` in `(Z/q)^d` with `Aᵀx ≡ x`.
pub fn fixed_points_oracle(a: &IntMatrix, q: i64) -> u64 {
    let m = to_i64(a);
    let d = m.len();
    let total = (q as u64).pow(d as u32);
    let mut count = 0;
    for idx in 0..total {
        let mut x = vec![0i64; d];
        let mut r = idx;
        for c in x.iter_mut() {
            *c = (r % q as u64) as i64;
            r /= q as u64;
        }
        let fixed = (0..d).all(|i| {
            let s: i64 = (0..d).map(|j| m[j][i] * x[j]).sum();
            (s - x[i]).rem_euclid(q) == 0
        });
        if fixed {
            count += 1;
        }
    }
    count
}

/// Orbit of `x/q` under the transposes of the generators and their inverses.
pub fn orbit_oracle(gens: &[IntMatrix], x: Vec<i64>, q: i64) -> BTreeSet<Vec<i64>> {
    let mut mats: Vec<Vec<Vec<i64>>> = Vec::new();
    for g in gens {
        mats.push(to_i64(g));
        mats.push(to_i64(&g.inverse().unwrap()));
    }
    let d = x.len();
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::new();
    let x: Vec<i64> = x.iter().map(|c| c.rem_euclid(q)).collect();
    seen.insert(x.clone());
    queue.push_back(x);
    while let Some(p) = queue.pop_front() {
        for m in &mats {
            let y: Vec<i64> = (0..d)
                .map(|i| (0..d).map(|j| m[j][i] * p[j]).sum::<i64>().rem_euclid(q))
                .collect();
            if seen.insert(y.clone()) {
                queue.push_back(y);
            }
        }
    }
    seen
}

/// Eigenvalues via nalgebra's real Schur form.
pub fn eigenvalues_oracle(a: &IntMatrix) -> Vec<nalgebra::Complex<f64>> {
    let d = a.dim();
    let rows = to_i64(a);
    let m = DMatrix::from_fn(d, d, |i, j| rows[i][j] as f64);
    m.complex_eigenvalues().iter().cloned().collect()
}

/// A monic integer polynomial of degree ≤ 3 with constant term ±1 is
/// reducible over Z iff it has a root at 1 or −1.
pub fn unimodular_small_reducible(coeffs: &[BigInt]) -> bool {
    assert!(coeffs.len() <= 4);
    let eval = |x: i64| -> BigInt {
        coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * BigInt::from(x) + c)
    };
    coeffs.len() > 2 && (eval(1).is_zero() || eval(-1).is_zero())
}

/// `min_{1≤n≤N} ||n c||` in f64.
pub fn min_multiple_distance(c: f64, n_max: u64) -> (u64, f64) {
    let mut best = (0, f64::INFINITY);
    for n in 1..=n_max {
        let x = n as f64 * c;
        let d = (x - x.round()).abs();
        if d < best.1 {
            best = (n, d);
        }
    }
    best
}
