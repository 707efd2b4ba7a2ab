//! Irreducibility of `char_poly(M^n)` for every `n >= 1`.
//!
//! For irreducible `p = char_poly(M)` with roots `λ_i`, the roots of
//! `char_poly(M^n)` are the `λ_i^n`, and these are Galois conjugates; the
//! power stays irreducible iff they are pairwise distinct, i.e. iff no ratio
//! `λ_i / λ_j` with `i != j` is an `n`-th root of unity. The ratios are the
//! roots of a single integer polynomial obtained by a resultant, so "for all
//! n" reduces to a finite cyclotomic divisibility sweep.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::cyclotomic::{cyclotomic_via_kernel, indices_with_totient_at_most};
use super::factor::is_irreducible;
use super::poly::{IntPoly, MonicIntPoly};
use crate::error::{Error, Result};
use crate::matrix::IntMatrix;

pub const DEFAULT_DIRECT_BOUND: u32 = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PowersVerdict {
    Holds,
    FailsAtN,
    Undetermined,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PowersIrreducibilityCertificate {
    pub verdict: PowersVerdict,
    pub witness_n: Option<u32>,
    pub ratio_test_passed: bool,
    /// Highest power factored directly (at least 1: the base is always checked).
    pub checked_up_to: u32,
    /// Orders `k` of roots of unity found among the ratios `λ_i/λ_j`, `i != j`.
    pub ratio_root_of_unity_orders: Vec<u64>,
    pub note: String,
}

/// Monic polynomial whose roots are all `λ_i / λ_j` (including `i = j`).
///
/// Computed as `Res_x(p(x), p(t x))`, which equals `(∏ λ_i)^d ∏ (t - λ_j/λ_i)`;
/// requires `p(0) = ±1` so the scaling is a sign. The resultant is evaluated
/// at `d^2 + 1` integer points through a Sylvester determinant and
/// interpolated exactly.
pub fn ratio_polynomial(p: &MonicIntPoly) -> Result<MonicIntPoly> {
    let d = p.degree();
    let c0 = p.coeffs()[0].clone();
    if !c0.abs().is_one() {
        return Err(Error::NotUnimodular {
            det: c0.to_string(),
        });
    }
    let deg = d * d;
    let xs: Vec<BigInt> = (0..=deg as i64).map(BigInt::from).collect();
    let ys: Vec<BigInt> = xs.iter().map(|t| resultant_at(p, t)).collect();
    let interp = interpolate(&xs, &ys)?;
    // (-1)^d c0 is ±1, and so is its d-th power
    let mut scale = if d % 2 == 0 { c0.clone() } else { -c0.clone() };
    scale = num_traits::pow(scale, d);
    let r = interp.scale(&scale);
    MonicIntPoly::new(r).map_err(|_| Error::Numerical("ratio resultant not monic".into()))
}

fn resultant_at(p: &MonicIntPoly, t: &BigInt) -> BigInt {
    let d = p.degree();
    // q(x) = p(t x): coefficient of x^k is c_k t^k, formal degree d
    let mut tk = BigInt::one();
    let mut q = Vec::with_capacity(d + 1);
    for c in p.coeffs() {
        q.push(c * &tk);
        tk *= t;
    }
    let a: Vec<BigInt> = p.coeffs().to_vec();
    let n = 2 * d;
    let mut rows = vec![vec![BigInt::zero(); n]; n];
    // d rows of a's coefficients (degree d) and d rows of q's (formal degree d)
    for i in 0..d {
        for k in 0..=d {
            rows[i][i + (d - k)] = a[k].clone();
            rows[d + i][i + (d - k)] = q[k].clone();
        }
    }
    IntMatrix::new(rows).unwrap().determinant()
}

fn interpolate(xs: &[BigInt], ys: &[BigInt]) -> Result<IntPoly> {
    let n = xs.len();
    let mut acc: Vec<BigRational> = vec![BigRational::zero(); n];
    for i in 0..n {
        let mut basis = vec![BigRational::one()];
        let mut denom = BigInt::one();
        for j in 0..n {
            if i == j {
                continue;
            }
            let mut next = vec![BigRational::zero(); basis.len() + 1];
            for (k, b) in basis.iter().enumerate() {
                next[k + 1] += b;
                next[k] -= b * BigRational::from_integer(xs[j].clone());
            }
            basis = next;
            denom *= &xs[i] - &xs[j];
        }
        let w = BigRational::new(ys[i].clone(), denom);
        for (k, b) in basis.iter().enumerate() {
            acc[k] += b * &w;
        }
    }
    let coeffs = acc
        .into_iter()
        .map(|c| {
            if c.is_integer() {
                Ok(c.to_integer())
            } else {
                Err(Error::Numerical("non-integral interpolation".into()))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(IntPoly::new(coeffs))
}

enum RatioOutcome {
    Clean,
    RootsOfUnity(Vec<u64>),
    Undetermined(String),
}

fn ratio_test(p: &MonicIntPoly) -> Result<RatioOutcome> {
    let d = p.degree();
    let r = ratio_polynomial(p)?;
    let t_minus_1 = MonicIntPoly::from_i64s(&[-1, 1]).unwrap();
    let mut reduced = r;
    for _ in 0..d {
        reduced = reduced
            .div_exact(&t_minus_1)
            .ok_or_else(|| Error::Numerical("ratio polynomial lacks (t-1)^d".into()))?;
    }
    if reduced.degree() == 0 {
        return Ok(RatioOutcome::Clean);
    }
    if reduced.as_poly().eval(&BigInt::one()).is_zero() {
        return Ok(RatioOutcome::Undetermined(
            "ratio 1 occurs off the diagonal (repeated roots)".into(),
        ));
    }
    let mut orders = Vec::new();
    for k in indices_with_totient_at_most((d * d) as u64) {
        if k == 1 {
            continue;
        }
        if cyclotomic_via_kernel(k).divides(&reduced) {
            orders.push(k);
        }
    }
    if orders.is_empty() {
        Ok(RatioOutcome::Clean)
    } else {
        Ok(RatioOutcome::RootsOfUnity(orders))
    }
}

/// Certificate for "char_poly(M^n) is irreducible for every n >= 1".
///
/// Direct factorization covers `1..=direct_bound` (the base power is always
/// checked); the ratio test covers all `n`.
pub fn all_powers_irreducible(
    m: &IntMatrix,
    direct_bound: u32,
) -> Result<PowersIrreducibilityCertificate> {
    let det = m.determinant();
    if !det.abs().is_one() {
        return Err(Error::NotUnimodular {
            det: det.to_string(),
        });
    }
    let checked_up_to = direct_bound.max(1);
    let base = m.char_poly();
    if !is_irreducible(&base)? {
        return Ok(PowersIrreducibilityCertificate {
            verdict: PowersVerdict::FailsAtN,
            witness_n: Some(1),
            ratio_test_passed: false,
            checked_up_to: 1,
            ratio_root_of_unity_orders: Vec::new(),
            note: format!("characteristic polynomial {base} is reducible"),
        });
    }
    let mut power = m.clone();
    for n in 2..=checked_up_to {
        power = &power * m;
        let cp = power.char_poly();
        if !is_irreducible(&cp)? {
            return Ok(PowersIrreducibilityCertificate {
                verdict: PowersVerdict::FailsAtN,
                witness_n: Some(n),
                ratio_test_passed: false,
                checked_up_to: n,
                ratio_root_of_unity_orders: Vec::new(),
                note: format!("characteristic polynomial of power {n} is reducible: {cp}"),
            });
        }
    }

    match ratio_test(&base)? {
        RatioOutcome::Clean => Ok(PowersIrreducibilityCertificate {
            verdict: PowersVerdict::Holds,
            witness_n: None,
            ratio_test_passed: true,
            checked_up_to,
            ratio_root_of_unity_orders: Vec::new(),
            note: if direct_bound == 0 {
                "ratio test only; no powers beyond the base factored directly".into()
            } else {
                "direct factorization and ratio test agree".into()
            },
        }),
        RatioOutcome::Undetermined(why) => Ok(PowersIrreducibilityCertificate {
            verdict: PowersVerdict::Undetermined,
            witness_n: None,
            ratio_test_passed: false,
            checked_up_to,
            ratio_root_of_unity_orders: Vec::new(),
            note: why,
        }),
        RatioOutcome::RootsOfUnity(orders) => {
            let k = orders[0];
            let witness_cp = m.pow(k as i64)?.char_poly();
            let confirmed = !is_irreducible(&witness_cp)?;
            Ok(PowersIrreducibilityCertificate {
                verdict: if confirmed {
                    PowersVerdict::FailsAtN
                } else {
                    PowersVerdict::Undetermined
                },
                witness_n: confirmed.then_some(k as u32),
                ratio_test_passed: false,
                checked_up_to,
                ratio_root_of_unity_orders: orders,
                note: if confirmed {
                    format!("ratio of roots is a primitive {k}-th root of unity; power {k} factors")
                } else {
                    format!("ratio test flags order {k} but direct factorization disagrees")
                },
            })
        }
    }
}
