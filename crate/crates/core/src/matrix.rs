//! Exact square integer matrices.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::polynomials::{IntPoly, MonicIntPoly};
use crate::serde_util::BigIntStr;

/// Square matrix of arbitrary-precision integers, row-major.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct IntMatrix {
    dim: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: Vec<Vec<BigInt>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::NotSquare { rows: 0, cols: 0 });
        }
        for r in &rows {
            if r.len() != dim {
                return Err(Error::NotSquare {
                    rows: dim,
                    cols: r.len(),
                });
            }
        }
        Ok(IntMatrix {
            dim,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    /// Panics on ragged input; intended for literals.
    pub fn from_i64<R: AsRef<[i64]>>(rows: &[R]) -> Self {
        Self::new(
            rows.iter()
                .map(|r| r.as_ref().iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
        .expect("square matrix literal")
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zero(dim);
        for i in 0..dim {
            m.entries[i * dim + i] = BigInt::one();
        }
        m
    }

    pub fn zero(dim: usize) -> Self {
        assert!(dim >= 1);
        IntMatrix {
            dim,
            entries: vec![BigInt::zero(); dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.entries[i * self.dim + j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.entries[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.dim).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.entries
    }

    pub fn transpose(&self) -> Self {
        let d = self.dim;
        let mut out = Self::zero(d);
        for i in 0..d {
            for j in 0..d {
                out.entries[j * d + i] = self.entries[i * d + j].clone();
            }
        }
        out
    }

    pub fn trace(&self) -> BigInt {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.dim)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        IntMatrix {
            dim: self.dim,
            entries: self.entries.iter().map(|x| x * k).collect(),
        }
    }

    pub fn commutes_with(&self, other: &IntMatrix) -> bool {
        self.dim == other.dim && self * other == other * self
    }

    pub fn apply(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Max absolute entry.
    pub fn height(&self) -> BigInt {
        self.entries.iter().map(|x| x.abs()).max().unwrap()
    }

    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim)
            .map(|i| {
                self.row(i)
                    .iter()
                    .map(|x| x.to_f64().unwrap_or(f64::NAN))
                    .collect()
            })
            .collect()
    }

    /// Fraction-free Gaussian elimination (Bareiss).
    pub fn determinant(&self) -> BigInt {
        let d = self.dim;
        let mut a = self.rows();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..d {
            if a[k][k].is_zero() {
                let Some(p) = (k + 1..d).find(|&i| !a[i][k].is_zero()) else {
                    return BigInt::zero();
                };
                a.swap(k, p);
                sign = -sign;
            }
            for i in k + 1..d {
                for j in k + 1..d {
                    let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = v / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        sign * &a[d - 1][d - 1]
    }

    pub fn is_unimodular(&self) -> bool {
        self.determinant().abs().is_one()
    }

    /// `det(tI - M)` via the Faddeev-LeVerrier recursion, which stays in Z:
    /// each trace is divisible by its step index.
    pub fn char_poly(&self) -> MonicIntPoly {
        let d = self.dim;
        let mut coeffs = vec![BigInt::zero(); d + 1];
        coeffs[d] = BigInt::one();
        let mut aux = Self::zero(d);
        for k in 1..=d {
            let mut next = self * &aux;
            for i in 0..d {
                next.entries[i * d + i] += &coeffs[d - k + 1];
            }
            aux = next;
            let tr = (self * &aux).trace();
            let c = -(tr / BigInt::from(k));
            coeffs[d - k] = c;
        }
        MonicIntPoly::new(IntPoly::new(coeffs)).expect("leading coefficient is 1")
    }

    /// Evaluate a polynomial at this matrix (Horner).
    pub fn eval_poly(&self, p: &IntPoly) -> Self {
        let mut acc = Self::zero(self.dim);
        for c in p.coeffs().iter().rev() {
            acc = &acc * self;
            for i in 0..self.dim {
                acc.entries[i * self.dim + i] += c;
            }
        }
        acc
    }

    /// Inverse of a unimodular matrix via Cayley-Hamilton.
    pub fn inverse(&self) -> Result<Self> {
        let cp = self.char_poly();
        let c0 = cp.coeffs()[0].clone();
        if !c0.abs().is_one() {
            return Err(Error::NotUnimodular {
                det: self.determinant().to_string(),
            });
        }
        // M^{-1} = -(M^{d-1} + c_{d-1} M^{d-2} + ... + c_1 I) / c_0
        let tail = IntPoly::new(cp.coeffs()[1..].to_vec());
        let adj = self.eval_poly(&tail);
        Ok(adj.scale(&(-c0)))
    }

    /// Exact power; negative exponents require a unimodular matrix.
    pub fn pow(&self, k: i64) -> Result<Self> {
        let base = if k < 0 { self.inverse()? } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut sq = base;
        let mut acc = Self::identity(self.dim);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &sq;
            }
            e >>= 1;
            if e > 0 {
                sq = &sq * &sq;
            }
        }
        Ok(acc)
    }

    pub fn rank(&self) -> usize {
        crate::snf::smith_normal_form(self).rank()
    }
}

impl Mul for &IntMatrix {
    type Output = IntMatrix;
    fn mul(self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let d = self.dim;
        let mut out = IntMatrix::zero(d);
        for i in 0..d {
            for k in 0..d {
                let a = &self.entries[i * d + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..d {
                    out.entries[i * d + j] += a * &rhs.entries[k * d + j];
                }
            }
        }
        out
    }
}

impl Add for &IntMatrix {
    type Output = IntMatrix;
    fn add(self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        IntMatrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &IntMatrix {
    type Output = IntMatrix;
    fn sub(self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        IntMatrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for i in 0..self.dim {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str("[")?;
            for (j, x) in self.row(i).iter().enumerate() {
                if j > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{x}")?;
            }
            f.write_str("]")?;
        }
        f.write_str("]")
    }
}

impl Serialize for IntMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = (0..self.dim)
            .map(|i| self.row(i).iter().map(|x| x.to_string()).collect())
            .collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<BigIntStr>> = Vec::deserialize(d)?;
        IntMatrix::new(
            rows.into_iter()
                .map(|r| r.into_iter().map(|x| x.0).collect())
                .collect(),
        )
        .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn char_poly_examples() {
        assert_eq!(
            IntMatrix::identity(2).char_poly(),
            MonicIntPoly::from_i64s(&[1, -2, 1]).unwrap()
        );
        let m_alpha = IntMatrix::from_i64(&[[0, 0, 1], [1, 0, 2], [0, 1, -1]]);
        assert_eq!(
            m_alpha.char_poly(),
            MonicIntPoly::from_i64s(&[-1, -2, 1, 1]).unwrap()
        );
        assert_eq!(
            IntMatrix::from_i64(&[[2, 1], [1, 1]]).char_poly(),
            MonicIntPoly::from_i64s(&[1, -3, 1]).unwrap()
        );
    }

    #[test]
    fn powers_and_inverse() {
        let m = IntMatrix::from_i64(&[[1, 1], [0, 1]]);
        assert_eq!(m.pow(0).unwrap(), IntMatrix::identity(2));
        assert_eq!(m.pow(5).unwrap(), IntMatrix::from_i64(&[[1, 5], [0, 1]]));
        let h = IntMatrix::from_i64(&[[2, 1], [1, 1]]);
        assert_eq!(h.pow(-1).unwrap(), IntMatrix::from_i64(&[[1, -1], [-1, 2]]));
    }

    #[test]
    fn negative_power_needs_unimodular() {
        let m = IntMatrix::from_i64(&[[2, 0], [0, 1]]);
        assert!(matches!(m.pow(-1), Err(Error::NotUnimodular { .. })));
        assert_eq!(m.pow(3).unwrap(), IntMatrix::from_i64(&[[8, 0], [0, 1]]));
    }

    #[test]
    fn determinant_with_pivoting() {
        let m = IntMatrix::from_i64(&[[0, 1, 2], [1, 0, 3], [4, -3, 8]]);
        assert_eq!(m.determinant(), BigInt::from(-2));
        assert_eq!(IntMatrix::from_i64(&[[1, 2], [2, 4]]).determinant(), BigInt::zero());
    }

    #[test]
    fn ragged_rejected() {
        let rows = vec![vec![BigInt::one(), BigInt::zero()], vec![BigInt::one()]];
        assert!(IntMatrix::new(rows).is_err());
    }

    #[test]
    fn json_uses_strings() {
        let m = IntMatrix::from_i64(&[[1, -2], [3, 4]]);
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"[["1","-2"],["3","4"]]"#);
        let back: IntMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        let lenient: IntMatrix = serde_json::from_str("[[1,-2],[3,4]]").unwrap();
        assert_eq!(lenient, m);
    }
}
