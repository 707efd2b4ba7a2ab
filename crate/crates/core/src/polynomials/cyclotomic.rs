//! Cyclotomic polynomials and the quasi-unipotence test.

use std::collections::BTreeMap;

use num_integer::Integer;
use num_traits::{One, Signed};
use serde::Serialize;

use super::factor::factor_over_z;
use super::poly::{IntPoly, MonicIntPoly};
use crate::error::{Error, Result};
use crate::matrix::IntMatrix;

pub fn totient(n: u64) -> u64 {
    assert!(n >= 1);
    let mut m = n;
    let mut out = n;
    let mut p = 2u64;
    while p * p <= m {
        if m % p == 0 {
            while m % p == 0 {
                m /= p;
            }
            out -= out / p;
        }
        p += 1;
    }
    if m > 1 {
        out -= out / m;
    }
    out
}

/// `Φ_n`, computed by dividing `t^n - 1` by `Φ_d` for every proper divisor `d`.
pub fn cyclotomic(n: u64) -> MonicIntPoly {
    assert!(n >= 1, "cyclotomic index must be positive");
    let mut memo = BTreeMap::new();
    cyclotomic_by_division(n, &mut memo)
}

fn cyclotomic_by_division(n: u64, memo: &mut BTreeMap<u64, MonicIntPoly>) -> MonicIntPoly {
    if let Some(p) = memo.get(&n) {
        return p.clone();
    }
    let mut acc = &IntPoly::monomial(n as usize) - &IntPoly::one();
    for d in 1..n {
        if n % d == 0 {
            let phi_d = cyclotomic_by_division(d, memo);
            let (q, r) = acc.div_rem_unit_lead(phi_d.as_poly());
            debug_assert!(r.is_zero());
            acc = q;
        }
    }
    let out = MonicIntPoly::new(acc).expect("cyclotomic polynomials are monic");
    memo.insert(n, out.clone());
    out
}

/// `Φ_n` from the squarefree kernel: `Φ_{mp}(x) = Φ_m(x^p) / Φ_m(x)` for a
/// new prime `p`, and `Φ_n(x) = Φ_rad(n)(x^{n / rad(n)})`. Intermediate
/// degrees stay near `φ(n)`, which keeps large-index sweeps cheap.
pub fn cyclotomic_via_kernel(n: u64) -> MonicIntPoly {
    assert!(n >= 1);
    let primes = prime_divisors(n);
    let mut phi = IntPoly::from_i64s(&[-1, 1]);
    let mut rad = 1u64;
    for p in primes {
        let lifted = phi.compose_power(p as usize);
        let (q, r) = lifted.div_rem_unit_lead(&phi);
        debug_assert!(r.is_zero());
        phi = q;
        rad *= p;
    }
    MonicIntPoly::new(phi.compose_power((n / rad) as usize)).expect("monic")
}

fn prime_divisors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Every `n` with `φ(n) <= max_degree`, ascending. Uses `φ(n) >= sqrt(n/2)`
/// to bound the scan at `2 * max_degree^2`.
pub fn indices_with_totient_at_most(max_degree: u64) -> Vec<u64> {
    let limit = (2 * max_degree * max_degree).max(2);
    (1..=limit).filter(|&n| totient(n) <= max_degree).collect()
}

/// Outcome of the quasi-unipotence test for one matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuasiUnipotenceCertificate {
    pub quasi_unipotent: bool,
    pub char_poly: MonicIntPoly,
    /// `(n, multiplicity)` for each `Φ_n` dividing the characteristic polynomial.
    pub cyclotomic_factors: Vec<(u64, u32)>,
    /// A non-cyclotomic irreducible factor when not quasi-unipotent.
    pub witness_factor: Option<MonicIntPoly>,
}

impl QuasiUnipotenceCertificate {
    /// lcm of the cyclotomic indices: `M^k` is unipotent for this `k`.
    pub fn unipotent_exponent(&self) -> Option<u64> {
        self.quasi_unipotent.then(|| {
            self.cyclotomic_factors
                .iter()
                .fold(1u64, |l, &(n, _)| l.lcm(&n))
        })
    }
}

/// True iff every eigenvalue is a root of unity, i.e. the characteristic
/// polynomial is a product of `Φ_n` with `φ(n) <= d`.
pub fn is_quasi_unipotent(m: &IntMatrix) -> Result<QuasiUnipotenceCertificate> {
    let det = m.determinant();
    if !det.abs().is_one() {
        return Err(Error::NotUnimodular {
            det: det.to_string(),
        });
    }
    let cp = m.char_poly();
    let mut rest = cp.clone();
    let mut found = Vec::new();
    for n in indices_with_totient_at_most(m.dim() as u64) {
        if rest.degree() == 0 {
            break;
        }
        let phi = cyclotomic_via_kernel(n);
        let mut mult = 0;
        while let Some(q) = rest.div_exact(&phi) {
            rest = q;
            mult += 1;
        }
        if mult > 0 {
            found.push((n, mult));
        }
    }
    if rest.degree() == 0 {
        return Ok(QuasiUnipotenceCertificate {
            quasi_unipotent: true,
            char_poly: cp,
            cyclotomic_factors: found,
            witness_factor: None,
        });
    }
    let witness = match factor_over_z(&rest) {
        Ok(f) => f[0].0.clone(),
        Err(Error::DeskScaleExceeded(_)) => rest,
        Err(e) => return Err(e),
    };
    Ok(QuasiUnipotenceCertificate {
        quasi_unipotent: false,
        char_poly: cp,
        cyclotomic_factors: found,
        witness_factor: Some(witness),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cyclotomics() {
        assert_eq!(cyclotomic(1), MonicIntPoly::from_i64s(&[-1, 1]).unwrap());
        assert_eq!(cyclotomic(4), MonicIntPoly::from_i64s(&[1, 0, 1]).unwrap());
        assert_eq!(cyclotomic(6), MonicIntPoly::from_i64s(&[1, -1, 1]).unwrap());
    }

    #[test]
    fn kernel_route_agrees_with_division() {
        for n in 1..=120 {
            assert_eq!(cyclotomic_via_kernel(n), cyclotomic(n), "n = {n}");
        }
    }

    #[test]
    fn totient_values() {
        let phi: Vec<u64> = (1..=12).map(totient).collect();
        assert_eq!(phi, vec![1, 1, 2, 2, 4, 2, 6, 4, 6, 4, 10, 4]);
        assert_eq!(indices_with_totient_at_most(2), vec![1, 2, 3, 4, 6]);
    }

    #[test]
    fn quasi_unipotent_examples() {
        let id = is_quasi_unipotent(&IntMatrix::identity(3)).unwrap();
        assert!(id.quasi_unipotent);
        assert_eq!(id.cyclotomic_factors, vec![(1, 3)]);

        let rot = is_quasi_unipotent(&IntMatrix::from_i64(&[[0, -1], [1, 0]])).unwrap();
        assert!(rot.quasi_unipotent);
        assert_eq!(rot.cyclotomic_factors, vec![(4, 1)]);
        assert_eq!(rot.unipotent_exponent(), Some(4));

        let hyp = is_quasi_unipotent(&IntMatrix::from_i64(&[[2, 1], [1, 1]])).unwrap();
        assert!(!hyp.quasi_unipotent);
        assert_eq!(
            hyp.witness_factor,
            Some(MonicIntPoly::from_i64s(&[1, -3, 1]).unwrap())
        );
    }

    #[test]
    fn non_unimodular_rejected() {
        assert!(matches!(
            is_quasi_unipotent(&IntMatrix::from_i64(&[[2, 0], [0, 1]])),
            Err(Error::NotUnimodular { .. })
        ));
    }
}
