//! `min_{1 ≤ n ≤ N} max_i ||p_i(n)||` for real polynomials without constant
//! term, by exhaustive search in 128-bit fixed point.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::to_rational;

use super::RealPoly;

pub const COOK_GRID: [u64; 3] = [100, 1_000, 10_000];

const MAX_POLYS: usize = 8;
const MAX_DEGREE: usize = 8;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CookGridPoint {
    pub n_max: u64,
    pub n_star: u64,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CookResult {
    pub n_max: u64,
    pub n_star: u64,
    pub value: f64,
    /// Least-squares slope of `log min` against `log N` over the grid.
    pub exponent_fit: Option<f64>,
    pub grid: Vec<CookGridPoint>,
}

fn frac_fixed(c: &crate::numeric::Real) -> u128 {
    let q = to_rational(c);
    let scaled = (&q - q.floor()) * BigRational::from_integer(BigInt::one() << 128);
    let m = scaled.round().to_integer().mod_floor(&(BigInt::one() << 128));
    m.to_u128().expect("below 2^128")
}

pub fn cook_search(polys: &[RealPoly], n_max: u64) -> Result<CookResult> {
    if polys.is_empty() {
        return Err(Error::EmptyFamily);
    }
    if polys.len() > MAX_POLYS {
        return Err(Error::schema("polys", format!("at most {MAX_POLYS} polynomials")));
    }
    if n_max == 0 {
        return Err(Error::schema("n", "N must be at least 1"));
    }
    let mut fixed = Vec::with_capacity(polys.len());
    for (i, p) in polys.iter().enumerate() {
        if p.degree() > MAX_DEGREE {
            return Err(Error::schema(format!("polys[{i}]"), format!("degree above {MAX_DEGREE}")));
        }
        if !crate::numeric::is_zero_real(&p.coeffs[0]) {
            return Err(Error::ConstantTerm);
        }
        fixed.push(p.coeffs.iter().skip(1).map(frac_fixed).collect::<Vec<u128>>());
    }
    let scan_to = n_max.max(*COOK_GRID.last().unwrap());
    let mut best = (0u64, u128::MAX);
    let mut grid = Vec::new();
    let mut result = None;
    for n in 1..=scan_to {
        let nn = n as u128;
        let mut worst = 0u128;
        for coeffs in &fixed {
            let mut pow = 1u128;
            let mut acc = 0u128;
            for c in coeffs {
                pow = pow.wrapping_mul(nn);
                acc = acc.wrapping_add(c.wrapping_mul(pow));
            }
            worst = worst.max(acc.min(acc.wrapping_neg()));
        }
        if worst < best.1 {
            best = (n, worst);
        }
        let value = best.1 as f64 / 2f64.powi(128);
        if COOK_GRID.contains(&n) {
            grid.push(CookGridPoint { n_max: n, n_star: best.0, value });
        }
        if n == n_max {
            result = Some((best.0, value));
        }
    }
    let (n_star, value) = result.expect("scanned through N");
    let exponent_fit = if grid.iter().any(|g| g.value == 0.0) {
        None
    } else {
        let pts: Vec<(f64, f64)> = grid
            .iter()
            .map(|g| ((g.n_max as f64).ln(), g.value.ln()))
            .collect();
        let k = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        Some(sxy / sxx)
    };
    Ok(CookResult {
        n_max,
        n_star,
        value,
        exponent_fit,
        grid,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{parse_real_expr, real_i64};

    fn poly(exprs: &[&str]) -> RealPoly {
        RealPoly::new(exprs.iter().map(|e| parse_real_expr(e, 256).unwrap()).collect())
    }

    #[test]
    fn sqrt2_multiples() {
        let r = cook_search(&[poly(&["0", "sqrt(2)"])], 100).unwrap();
        assert_eq!(r.n_star, 70);
        assert!((r.value - 0.005050633883346).abs() < 1e-9);
        let fit = r.exponent_fit.unwrap();
        assert!(fit < -0.8 && fit > -1.3, "{fit}");
    }

    #[test]
    fn rejects_constant_term() {
        assert!(matches!(
            cook_search(&[RealPoly::new(vec![real_i64(1, 64), real_i64(1, 64)])], 10),
            Err(Error::ConstantTerm)
        ));
        assert!(matches!(cook_search(&[], 10), Err(Error::EmptyFamily)));
    }

    #[test]
    fn rational_coefficient_hits_zero() {
        let r = cook_search(&[poly(&["0", "1/8", "0"])], 20).unwrap();
        assert_eq!((r.n_star, r.value), (8, 0.0));
        assert!(r.exponent_fit.is_none());
    }
}
