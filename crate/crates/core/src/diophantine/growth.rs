//! Witness sequences `t_n = max{|Re λⁿ|, |a Re λⁿ − b Im λⁿ|}` for a
//! non-real expanding eigenvalue `λ` with eigenvector `w`, `w_{k1} = 1`,
//! `w_{k2} = a + bi`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::IntMatrix;
use crate::numeric::{
    abs, display_digits, distinct_roots, eigenvector, epsilon, format_real, to_f64, ComplexValue, Cx,
    Real,
};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthSequence {
    pub eigenvalue: ComplexValue,
    /// 1-based coordinates `(k1, k2)`.
    pub coordinates: (usize, usize),
    pub a: String,
    pub b: String,
    pub r: f64,
    pub c: f64,
    pub terms: Vec<String>,
    /// Largest relative error of `|Re λⁿ|² + |Im λⁿ|² = |λ|^{2n}`.
    pub modulus_identity_error: f64,
    #[serde(skip)]
    pub values: Vec<Real>,
}

/// Eigenvalue of largest modulus among the non-real ones with modulus > 1
/// (positive imaginary part), its eigenvector normalized at `k1`, and `k2`.
pub fn expanding_complex_eigen(a: &IntMatrix, prec: usize) -> Result<(Cx, Vec<Cx>, usize, usize)> {
    let roots = distinct_roots(&a.char_poly(), prec)?;
    let lambda = roots
        .into_iter()
        .filter(|z| !z.is_real() && !crate::numeric::is_negative(&z.im))
        .filter(|z| to_f64(&z.abs()) > 1.0 + 1e-12)
        .max_by(|x, y| {
            to_f64(&x.abs())
                .partial_cmp(&to_f64(&y.abs()))
                .unwrap_or(std::cmp::Ordering::Equal)
        })
        .ok_or(Error::NoComplexExpandingEigenvalue)?;
    let w = eigenvector(a, &lambda, prec);
    let k1 = w
        .iter()
        .position(|c| c.is_real() && to_f64(&abs(&(&c.re - &Real::ONE))) < 1e-30)
        .unwrap_or(0);
    let k2 = (0..w.len())
        .max_by(|&i, &j| {
            to_f64(&abs(&w[i].im))
                .partial_cmp(&to_f64(&abs(&w[j].im)))
                .unwrap_or(std::cmp::Ordering::Equal)
        })
        .unwrap();
    if abs(&w[k2].im) < epsilon(prec / 2, prec) {
        return Err(Error::DegenerateEigenvector);
    }
    Ok((lambda, w, k1, k2))
}

pub fn eigen_growth_sequence(a: &IntMatrix, n_max: usize, prec: usize) -> Result<GrowthSequence> {
    let (lambda, w, k1, k2) = expanding_complex_eigen(a, prec)?;
    let (wa, wb) = (w[k2].re.clone(), w[k2].im.clone());
    let r_real = lambda.abs();
    let r = to_f64(&r_real);
    let mut power = Cx::one(prec);
    let mut r_pow = Real::ONE.with_precision(prec).value();
    let mut values = Vec::with_capacity(n_max);
    let mut c: f64 = 1.0;
    let mut identity_err: f64 = 0.0;
    for _ in 0..n_max {
        power = &power * &lambda;
        r_pow = &r_pow * &r_real;
        let t1 = abs(&power.re);
        let t2 = abs(&(&wa * &power.re - &wb * &power.im));
        let t = if t1 > t2 { t1 } else { t2 };
        let ratio = to_f64(&(&t / &r_pow));
        c = c.max(ratio).max(1.0 / ratio);
        let rel = to_f64(&abs(&(&power.norm_sq() / &(&r_pow * &r_pow) - &Real::ONE)));
        identity_err = identity_err.max(rel);
        values.push(t);
    }
    let digits = display_digits(prec);
    Ok(GrowthSequence {
        eigenvalue: ComplexValue::from_cx(&lambda, digits),
        coordinates: (k1 + 1, k2 + 1),
        a: format_real(&wa, digits),
        b: format_real(&wb, digits),
        r,
        c,
        terms: values.iter().map(|v| format_real(v, digits)).collect(),
        modulus_identity_error: identity_err,
        values,
    })
}
