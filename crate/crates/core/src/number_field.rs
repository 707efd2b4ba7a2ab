//! The order `Z[α]` of a monic cubic: multiplication matrices, norms, a
//! box search for units, and the two-unit `Z³ ⋊ Z²` example.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::berend::{berend_verdict, BerendBounds, BerendReport, ConditionStatus};
use crate::classifier::{is_virtually_nilpotent, VnCertificate};
use crate::error::{Error, Result};
use crate::matrix::IntMatrix;
use crate::numeric::{display_digits, distinct_roots, format_real, real_int, to_f64, Cx, Real};
use crate::polynomials::{is_irreducible, MonicIntPoly};
use crate::spec::{validate_spec, ActionSpec};

pub const DEFAULT_UNIT_BOUND: i64 = 5;
const LOG_MINOR_MARGIN: f64 = 1e-10;

/// `a + bα + cα²`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct OrderElement {
    #[serde(serialize_with = "crate::serde_util::bigints_as_strings")]
    pub coords: Vec<BigInt>,
    #[serde(skip)]
    pub defining_poly: MonicIntPoly,
}

impl OrderElement {
    pub fn new(coords: [BigInt; 3], defining_poly: &MonicIntPoly) -> Result<Self> {
        if defining_poly.degree() != 3 {
            return Err(Error::NotCubic(defining_poly.degree()));
        }
        Ok(OrderElement {
            coords: coords.to_vec(),
            defining_poly: defining_poly.clone(),
        })
    }

    pub fn from_i64(coords: [i64; 3], defining_poly: &MonicIntPoly) -> Result<Self> {
        Self::new(coords.map(BigInt::from), defining_poly)
    }

    pub fn mul(&self, other: &OrderElement) -> OrderElement {
        let m = multiplication_matrix(self);
        OrderElement {
            coords: m.apply(&other.coords),
            defining_poly: self.defining_poly.clone(),
        }
    }

    /// `log|σ_i(e)|` for each root `σ_i(α)` of the defining polynomial.
    pub fn log_embedding(&self, prec: usize) -> Result<Vec<Real>> {
        let roots = distinct_roots(&self.defining_poly, prec)?;
        Ok(roots
            .iter()
            .map(|r| {
                let mut v = Cx::zero(prec);
                let mut p = Cx::one(prec);
                for c in &self.coords {
                    v = &v + &p.scale(&real_int(c, prec));
                    p = &p * r;
                }
                v.abs().ln()
            })
            .collect())
    }
}

/// Companion matrix of `α` in the basis `(1, α, α²)`.
pub fn companion(p: &MonicIntPoly) -> IntMatrix {
    let c = p.coeffs();
    let z = BigInt::zero;
    IntMatrix::new(vec![
        vec![z(), z(), -c[0].clone()],
        vec![BigInt::one(), z(), -c[1].clone()],
        vec![z(), BigInt::one(), -c[2].clone()],
    ])
    .expect("3x3")
}

pub fn multiplication_matrix(e: &OrderElement) -> IntMatrix {
    let c = companion(&e.defining_poly);
    let c2 = &c * &c;
    &(&IntMatrix::identity(3).scale(&e.coords[0]) + &c.scale(&e.coords[1])) + &c2.scale(&e.coords[2])
}

pub fn norm(e: &OrderElement) -> BigInt {
    multiplication_matrix(e).determinant()
}

/// Discriminant of `t³ + bt² + ct + d`; positive iff three distinct real roots.
pub fn cubic_discriminant(p: &MonicIntPoly) -> BigInt {
    let k = p.coeffs();
    let (d, c, b) = (&k[0], &k[1], &k[2]);
    let i = |n: i64| BigInt::from(n);
    b * b * c * c - i(4) * c * c * c - i(4) * b * b * b * d - i(27) * d * d + i(18) * b * c * d
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Unit {
    pub element: OrderElement,
    #[serde(serialize_with = "crate::serde_util::bigint_as_string")]
    pub norm: BigInt,
    pub log_embedding: Vec<String>,
    #[serde(skip)]
    pub log_values: Vec<f64>,
}

/// Units of `Z[α]` with coordinates in `[-bound, bound]³`, excluding `±1`,
/// in lexicographic order of coordinates.
pub fn find_units(p: &MonicIntPoly, bound: i64, prec: usize) -> Result<Vec<Unit>> {
    if p.degree() != 3 {
        return Err(Error::NotCubic(p.degree()));
    }
    let mut out = Vec::new();
    for a in -bound..=bound {
        for b in -bound..=bound {
            for c in -bound..=bound {
                if b == 0 && c == 0 && a.abs() == 1 {
                    continue;
                }
                let e = OrderElement::from_i64([a, b, c], p)?;
                let n = norm(&e);
                if !n.abs().is_one() {
                    continue;
                }
                let logs = e.log_embedding(prec)?;
                out.push(Unit {
                    norm: n,
                    log_embedding: logs.iter().map(|l| format_real(l, display_digits(prec))).collect(),
                    log_values: logs.iter().map(to_f64).collect(),
                    element: e,
                });
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstructedExample {
    pub poly: MonicIntPoly,
    #[serde(serialize_with = "crate::serde_util::bigint_as_string")]
    pub discriminant: BigInt,
    pub units: [Unit; 2],
    /// `log|σ₁(u)| log|σ₂(v)| − log|σ₂(u)| log|σ₁(v)|`.
    pub log_minor: f64,
    pub units_found: usize,
    pub spec: ActionSpec,
    pub berend: BerendReport,
    pub vn_certificate: VnCertificate,
    pub verified: bool,
    pub notes: Vec<String>,
}

fn weight(u: &Unit) -> BigInt {
    u.element.coords.iter().map(|c| c.abs()).sum()
}

fn selection_key(u: &Unit) -> (BigInt, Vec<BigInt>) {
    (weight(u), u.element.coords.iter().rev().cloned().collect())
}

pub fn construct_example(p: &MonicIntPoly, bound: i64, bounds: BerendBounds) -> Result<ConstructedExample> {
    if p.degree() != 3 {
        return Err(Error::NotCubic(p.degree()));
    }
    if !is_irreducible(p)? {
        return Err(Error::ReduciblePolynomial);
    }
    let disc = cubic_discriminant(p);
    if !disc.is_positive() {
        return Err(Error::NotTotallyReal { unit_rank: 1 });
    }
    let prec = bounds.precision_bits;
    let all = find_units(p, bound, prec)?;
    let units_found = all.len();
    // one representative of ±u: last nonzero coordinate positive
    let mut candidates: Vec<Unit> = all
        .into_iter()
        .filter(|u| u.element.coords.iter().rev().find(|c| !c.is_zero()).is_some_and(|c| c.is_positive()))
        .collect();
    candidates.sort_by_key(selection_key);
    let mut chosen = None;
    'outer: for i in 0..candidates.len() {
        for j in i + 1..candidates.len() {
            let (x, y) = (&candidates[i].log_values, &candidates[j].log_values);
            let minor = x[0] * y[1] - x[1] * y[0];
            if minor.abs() > LOG_MINOR_MARGIN {
                chosen = Some((i, j, minor));
                break 'outer;
            }
        }
    }
    let (i, j, log_minor) = chosen.ok_or(Error::NoIndependentUnits { bound: bound as u32 })?;
    let (u, v) = (candidates[i].clone(), candidates[j].clone());
    let mu = multiplication_matrix(&u.element);
    let mv = multiplication_matrix(&v.element);
    let spec = ActionSpec::new(vec![mu, mv])?;
    // round trip through the JSON validator
    let spec = validate_spec(&serde_json::to_value(&spec).expect("spec serializes"))?;
    let berend = berend_verdict(&spec, bounds)?;
    let vn = is_virtually_nilpotent(&spec, prec)?;
    let commute = spec.generators[0].commutes_with(&spec.generators[1]);
    let verified = commute && berend.all_conditions == ConditionStatus::Satisfied && !vn.virtually_nilpotent;
    Ok(ConstructedExample {
        poly: p.clone(),
        discriminant: disc,
        units: [u, v],
        log_minor,
        units_found,
        spec,
        berend,
        vn_certificate: vn,
        verified,
        notes: vec!["order-level construction: units of Z[alpha], not of the maximal order".into()],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> MonicIntPoly {
        MonicIntPoly::from_i64s(&[-1, -2, 1, 1]).unwrap()
    }

    #[test]
    fn alpha_matrix_and_inverse() {
        let alpha = OrderElement::from_i64([0, 1, 0], &p()).unwrap();
        assert_eq!(
            multiplication_matrix(&alpha),
            IntMatrix::from_i64(&[[0, 0, 1], [1, 0, 2], [0, 1, -1]])
        );
        let inv = OrderElement::from_i64([-2, 1, 1], &p()).unwrap();
        assert!((&multiplication_matrix(&alpha) * &multiplication_matrix(&inv)).is_identity());
        assert_eq!(norm(&OrderElement::from_i64([2, 0, 0], &p()).unwrap()), BigInt::from(8));
        assert_eq!(norm(&alpha), BigInt::one());
        assert_eq!(norm(&OrderElement::from_i64([-1, 1, 0], &p()).unwrap()), BigInt::one());
    }

    #[test]
    fn unit_search() {
        let units = find_units(&p(), 2, 128).unwrap();
        let has = |c: [i64; 3]| units.iter().any(|u| u.element.coords == c.map(BigInt::from).to_vec());
        assert!(has([0, 1, 0]) && has([-1, 1, 0]));
        assert!(find_units(&p(), 0, 128).unwrap().is_empty());
        let cube_root = MonicIntPoly::from_i64s(&[-2, 0, 0, 1]).unwrap();
        let units = find_units(&cube_root, 2, 128).unwrap();
        assert!(units.iter().any(|u| u.element.coords == [-1, 1, 0].map(BigInt::from).to_vec()));
    }

    #[test]
    fn construction() {
        let ex = construct_example(&p(), DEFAULT_UNIT_BOUND, BerendBounds::default()).unwrap();
        assert!(ex.verified);
        assert_eq!(ex.units[0].element.coords, [0, 1, 0].map(BigInt::from).to_vec());
        assert_eq!(ex.units[1].element.coords, [-1, 1, 0].map(BigInt::from).to_vec());
        let reducible = MonicIntPoly::from_i64s(&[0, -1, 0, 1]).unwrap();
        assert!(matches!(
            construct_example(&reducible, 2, BerendBounds::default()),
            Err(Error::ReduciblePolynomial)
        ));
        let cube_root = MonicIntPoly::from_i64s(&[-2, 0, 0, 1]).unwrap();
        assert!(matches!(
            construct_example(&cube_root, 2, BerendBounds::default()),
            Err(Error::NotTotallyReal { unit_rank: 1 })
        ));
    }
}
