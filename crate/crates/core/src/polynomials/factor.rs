//! Factorization of monic integer polynomials by bounded divisor search.
//!
//! A monic divisor `g` of degree `k` is pinned down by its values at `k`
//! integer points once monicity is imposed, and each value must divide the
//! corresponding value of `f`. Candidates are interpolated from divisor
//! tuples, filtered by the Mignotte coefficient bound, and confirmed by exact
//! division. Searching degrees in increasing order means the first divisor
//! found is irreducible.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::poly::{IntPoly, MonicIntPoly};
use crate::error::{Error, Result};

/// Evaluation values larger than this are not factored by trial division.
const TRIAL_DIVISION_LIMIT: u64 = 1_000_000_000_000;
/// Upper bound on interpolated candidates per degree.
const CANDIDATE_BUDGET: u64 = 20_000_000;

/// Irreducible factorization over Z: monic factors with multiplicities,
/// sorted by degree then coefficients.
pub fn factor_over_z(p: &MonicIntPoly) -> Result<Vec<(MonicIntPoly, u32)>> {
    if p.degree() == 0 {
        return Err(Error::ConstantPolynomial);
    }
    let f = p.as_poly();
    let g = f.gcd(&f.derivative());
    let squarefree = f.exact_div(&g).expect("gcd divides");
    let squarefree = MonicIntPoly::new(squarefree.primitive_part()).expect("monic");

    let mut irreducibles = Vec::new();
    let mut stack = vec![squarefree];
    while let Some(q) = stack.pop() {
        if q.degree() == 0 {
            continue;
        }
        match smallest_divisor(&q)? {
            None => irreducibles.push(q),
            Some(d) => {
                let rest = q.div_exact(&d).expect("divisor divides");
                irreducibles.push(d);
                stack.push(rest);
            }
        }
    }

    let mut out = Vec::new();
    for q in irreducibles {
        let mut mult = 0u32;
        let mut rem = p.clone();
        while let Some(next) = rem.div_exact(&q) {
            mult += 1;
            rem = next;
        }
        debug_assert!(mult > 0);
        out.push((q, mult));
    }
    out.sort_by(|a, b| {
        a.0.degree()
            .cmp(&b.0.degree())
            .then_with(|| a.0.coeffs().cmp(b.0.coeffs()))
    });
    Ok(out)
}

pub fn is_irreducible(p: &MonicIntPoly) -> Result<bool> {
    let f = factor_over_z(p)?;
    Ok(f.len() == 1 && f[0].1 == 1)
}

/// Smallest-degree proper monic divisor of a squarefree monic polynomial.
fn smallest_divisor(f: &MonicIntPoly) -> Result<Option<MonicIntPoly>> {
    let m = f.degree();
    if m <= 1 {
        return Ok(None);
    }
    let poly = f.as_poly();
    let radius = (m as i64) + 8;
    let mut points: Vec<(usize, i64, u64)> = Vec::new();
    for a in -radius..=radius {
        let v = poly.eval_i64(a);
        if v.is_zero() {
            let lin = MonicIntPoly::new(IntPoly::linear_root(&BigInt::from(a))).unwrap();
            return Ok(Some(lin));
        }
        if let Some(mag) = v.abs().to_u64().filter(|&x| x <= TRIAL_DIVISION_LIMIT) {
            points.push((divisor_count(mag), a, mag));
        }
    }
    points.sort_by_key(|&(tau, a, _)| (tau, a.unsigned_abs(), a));
    let norm_sq = poly.norm_sq();

    for k in 1..=m / 2 {
        if points.len() < k {
            return Err(Error::DeskScaleExceeded(format!(
                "not enough small evaluation points to search degree-{k} divisors of {f}"
            )));
        }
        let chosen = &points[..k];
        let budget: u64 = chosen
            .iter()
            .map(|&(tau, _, _)| 2 * tau as u64)
            .try_fold(1u64, |acc, x| acc.checked_mul(x))
            .unwrap_or(u64::MAX);
        if budget > CANDIDATE_BUDGET {
            return Err(Error::DeskScaleExceeded(format!(
                "{budget} candidate divisors of degree {k} for {f}"
            )));
        }
        if let Some(g) = search_degree(poly, chosen, &norm_sq)? {
            return Ok(Some(g));
        }
    }
    Ok(None)
}

fn search_degree(
    f: &IntPoly,
    points: &[(usize, i64, u64)],
    norm_sq: &BigInt,
) -> Result<Option<MonicIntPoly>> {
    let k = points.len();
    let xs: Vec<BigInt> = points.iter().map(|p| BigInt::from(p.1)).collect();
    let value_sets: Vec<Vec<BigInt>> = points
        .iter()
        .map(|&(_, _, mag)| {
            divisors(mag)
                .into_iter()
                .flat_map(|d| [BigInt::from(d), -BigInt::from(d)])
                .collect()
        })
        .collect();

    // Lagrange data: basis numerators prod_{j != i}(x - x_j) and denominators
    let mut basis = Vec::with_capacity(k);
    let mut denoms = Vec::with_capacity(k);
    for i in 0..k {
        let mut num = IntPoly::one();
        let mut den = BigInt::one();
        for j in 0..k {
            if i != j {
                num = &num * &IntPoly::linear_root(&xs[j]);
                den *= &xs[i] - &xs[j];
            }
        }
        basis.push(num);
        denoms.push(den);
    }
    let common = denoms.iter().fold(BigInt::one(), |l, d| l.lcm(d));
    let scaled_basis: Vec<IntPoly> = basis
        .iter()
        .zip(&denoms)
        .map(|(b, d)| b.scale(&(&common / d)))
        .collect();
    let mut anchor = IntPoly::one();
    for x in &xs {
        anchor = &anchor * &IntPoly::linear_root(x);
    }
    // Mignotte: |g_j| <= C(k, j) * ||f||_2
    let bounds_sq: Vec<BigInt> = (0..=k)
        .map(|j| {
            let c = binomial(k as u64, j as u64);
            &c * &c * norm_sq
        })
        .collect();

    let mut idx = vec![0usize; k];
    loop {
        let mut numer = IntPoly::zero();
        for i in 0..k {
            numer = &numer + &scaled_basis[i].scale(&value_sets[i][idx[i]]);
        }
        if numer.coeffs().iter().all(|c| c.is_multiple_of(&common)) {
            let h = IntPoly::new(numer.coeffs().iter().map(|c| c / &common).collect());
            let g = &anchor + &h;
            let within = g
                .coeffs()
                .iter()
                .enumerate()
                .all(|(j, c)| c * c <= bounds_sq[j]);
            if within && g.degree() == Some(k) {
                if f.exact_div(&g).is_some() {
                    return Ok(Some(MonicIntPoly::new(g).expect("monic by construction")));
                }
            }
        }
        // odometer
        let mut pos = 0;
        loop {
            if pos == k {
                return Ok(None);
            }
            idx[pos] += 1;
            if idx[pos] < value_sets[pos].len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

fn binomial(n: u64, k: u64) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

fn prime_factors(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn divisor_count(n: u64) -> usize {
    prime_factors(n)
        .iter()
        .map(|&(_, e)| e as usize + 1)
        .product()
}

fn divisors(n: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for (p, e) in prime_factors(n) {
        let len = out.len();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                out.push(out[i] * pk);
            }
        }
    }
    out.sort_unstable();
    out
}
