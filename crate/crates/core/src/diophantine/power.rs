//! Closed forms for powers of unipotent matrices: `(I + N)^n = Σ_k C(n, k) N^k`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::IntMatrix;
use crate::numeric::{real_rational, Real};
use crate::snf::smith_rect;

use super::RealPoly;

/// `Σ_k c_k C(n, k)`; integer-valued on integers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BinomialPoly {
    #[serde(serialize_with = "crate::serde_util::bigints_as_strings")]
    pub coeffs: Vec<BigInt>,
}

pub fn binomial(n: i64, k: usize) -> BigInt {
    // generalized: n (n-1) ... (n-k+1) / k!, exact for any integer n
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k as i64 {
        num *= BigInt::from(n - i);
        den *= BigInt::from(i + 1);
    }
    num / den
}

impl BinomialPoly {
    pub fn eval(&self, n: i64) -> BigInt {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| c * binomial(n, k))
            .sum()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Ascending monomial coefficients.
    pub fn to_monomial(&self) -> Vec<BigRational> {
        let deg = self.coeffs.len();
        let mut out = vec![BigRational::zero(); deg.max(1)];
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            // C(x, k) = x (x-1) ... (x-k+1) / k!
            let mut falling = vec![BigInt::one()];
            let mut fact = BigInt::one();
            for i in 0..k {
                let mut next = vec![BigInt::zero(); falling.len() + 1];
                for (j, f) in falling.iter().enumerate() {
                    next[j + 1] += f;
                    next[j] -= f * BigInt::from(i);
                }
                falling = next;
                fact *= BigInt::from(i + 1);
            }
            for (j, f) in falling.iter().enumerate() {
                out[j] += BigRational::new(f * c, fact.clone());
            }
        }
        out
    }
}

/// Entry `(i, j)` of `A^n` as a binomial-basis polynomial in `n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PowerPolys {
    pub dim: usize,
    pub entries: Vec<Vec<BinomialPoly>>,
    pub upper_unitriangular: bool,
}

impl PowerPolys {
    pub fn p(&self, i: usize, j: usize) -> &BinomialPoly {
        &self.entries[i][j]
    }

    pub fn eval(&self, n: i64) -> IntMatrix {
        IntMatrix::new(
            self.entries
                .iter()
                .map(|row| row.iter().map(|p| p.eval(n)).collect())
                .collect(),
        )
        .expect("square")
    }
}

pub fn is_upper_unitriangular(a: &IntMatrix) -> bool {
    let d = a.dim();
    (0..d).all(|i| {
        a.get(i, i).is_one() && (0..i).all(|j| a.get(i, j).is_zero())
    })
}

pub fn unipotent_power_polys(a: &IntMatrix) -> Result<PowerPolys> {
    let d = a.dim();
    let n = a - &IntMatrix::identity(d);
    if !n.pow(d as i64)?.is_zero() {
        return Err(Error::NotUnipotent);
    }
    let mut powers = vec![IntMatrix::identity(d)];
    for _ in 1..d {
        let next = powers.last().unwrap() * &n;
        if next.is_zero() {
            break;
        }
        powers.push(next);
    }
    let entries = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| BinomialPoly {
                    coeffs: powers.iter().map(|p| p.get(i, j).clone()).collect(),
                })
                .collect()
        })
        .collect();
    Ok(PowerPolys {
        dim: d,
        entries,
        upper_unitriangular: is_upper_unitriangular(a),
    })
}

/// `T = P⁻¹ A P` upper unitriangular with `P ∈ GL(d, Z)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UnipotentNormalForm {
    pub p: IntMatrix,
    pub p_inv: IntMatrix,
    pub t: IntMatrix,
}

/// Conjugates a unipotent integer matrix to upper unitriangular form over Z
/// using a basis adapted to the saturated flag `ker N ⊂ ker N² ⊂ ...`.
pub fn unipotent_normal_form(a: &IntMatrix) -> Result<UnipotentNormalForm> {
    let d = a.dim();
    if !(a - &IntMatrix::identity(d)).pow(d as i64)?.is_zero() {
        return Err(Error::NotUnipotent);
    }
    let p = flag_basis(a);
    let p_inv = p.inverse()?;
    let t = &(&p_inv * a) * &p;
    debug_assert!(is_upper_unitriangular(&t));
    if !is_upper_unitriangular(&t) {
        return Err(Error::NotUpperUnitriangular);
    }
    Ok(UnipotentNormalForm { p, p_inv, t })
}

fn flag_basis(a: &IntMatrix) -> IntMatrix {
    let d = a.dim();
    let n = a - &IntMatrix::identity(d);
    let s = smith_rect(n.rows(), d);
    let zero_cols: Vec<usize> = (0..d)
        .filter(|&j| s.d[j][j].is_zero())
        .collect();
    let r = zero_cols.len();
    let order: Vec<usize> = zero_cols
        .iter()
        .copied()
        .chain((0..d).filter(|j| !zero_cols.contains(j)))
        .collect();
    let p1 = IntMatrix::new(
        (0..d)
            .map(|i| order.iter().map(|&j| s.v[i][j].clone()).collect())
            .collect(),
    )
    .expect("square");
    if r == d {
        return p1;
    }
    let a1 = &(&p1.inverse().expect("unimodular") * a) * &p1;
    let sub = IntMatrix::new(
        (r..d)
            .map(|i| (r..d).map(|j| a1.get(i, j).clone()).collect())
            .collect(),
    )
    .expect("square");
    let w = flag_basis(&sub);
    let mut block = IntMatrix::identity(d);
    for i in 0..d - r {
        for j in 0..d - r {
            block.set(r + i, r + j, w.get(i, j).clone());
        }
    }
    &p1 * &block
}

/// `q_i(x) = Σ_{j>i} p_ij(x) θ_j` for `i = 1..d-1`, so that
/// `(Aⁿθ)_i = θ_i + q_i(n)`. Requires upper unitriangular `A`.
pub fn orbit_phase_polys(a: &IntMatrix, theta: &[Real]) -> Result<Vec<RealPoly>> {
    let d = a.dim();
    if theta.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: theta.len(),
        });
    }
    if !is_upper_unitriangular(a) {
        return Err(Error::NotUpperUnitriangular);
    }
    let polys = unipotent_power_polys(a)?;
    let prec = theta.iter().map(|t| t.precision()).max().unwrap_or(64).max(64);
    let mut out = Vec::with_capacity(d.saturating_sub(1));
    for i in 0..d.saturating_sub(1) {
        let mut coeffs: Vec<Real> = vec![Real::ZERO.with_precision(prec).value(); d];
        for j in i + 1..d {
            for (k, c) in polys.p(i, j).to_monomial().iter().enumerate() {
                if !c.is_zero() {
                    coeffs[k] = &coeffs[k] + real_rational(c, prec) * &theta[j];
                }
            }
        }
        out.push(RealPoly::new(coeffs));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{real_i64, to_f64};

    #[test]
    fn jordan_blocks() {
        let p = unipotent_power_polys(&IntMatrix::from_i64(&[[1, 1], [0, 1]])).unwrap();
        assert_eq!(p.p(0, 1).eval(7), BigInt::from(7));
        let j3 = IntMatrix::from_i64(&[[1, 1, 0], [0, 1, 1], [0, 0, 1]]);
        let p = unipotent_power_polys(&j3).unwrap();
        for n in 0..=50 {
            assert_eq!(p.p(0, 2).eval(n), BigInt::from(n * (n - 1) / 2));
            assert_eq!(p.eval(n), j3.pow(n).unwrap());
        }
        assert!(unipotent_power_polys(&IntMatrix::from_i64(&[[2, 1], [1, 1]])).is_err());
    }

    #[test]
    fn monomial_conversion() {
        // C(x,2) = x^2/2 - x/2
        let b = BinomialPoly {
            coeffs: vec![BigInt::zero(), BigInt::zero(), BigInt::one()],
        };
        let m = b.to_monomial();
        assert_eq!(m[1], BigRational::new((-1).into(), 2.into()));
        assert_eq!(m[2], BigRational::new(1.into(), 2.into()));
    }

    #[test]
    fn normal_form_of_lower_block() {
        let a = IntMatrix::from_i64(&[[1, 0, 0], [2, 1, 0], [1, 3, 1]]);
        let nf = unipotent_normal_form(&a).unwrap();
        assert!(is_upper_unitriangular(&nf.t));
        assert_eq!(&(&nf.p * &nf.t) * &nf.p_inv, a);
    }

    #[test]
    fn phase_polys() {
        let half = real_i64(1, 128) / real_i64(2, 128);
        let q = orbit_phase_polys(
            &IntMatrix::from_i64(&[[1, 1], [0, 1]]),
            &[real_i64(0, 128), half],
        )
        .unwrap();
        assert_eq!(q.len(), 1);
        assert_eq!(to_f64(&q[0].coeffs[1]), 0.5);
        assert!(crate::numeric::is_zero_real(&q[0].coeffs[0]));
    }
}
