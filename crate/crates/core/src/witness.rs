//! Non-SQD witnesses for a single non-quasi-unipotent generator: a point
//! `θ = ξ·v` on the expanding eigendirection of `Aᵀ` whose forward orbit
//! stays `ε`-far from `Z` in one coordinate, never returns `ε/2`-close to
//! `θ`, and whose backward orbit tends to `0`.

use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::diophantine::{
    badly_approximable, expanding_complex_eigen, BadlyApproxCertificate, BuilderOptions, Growth,
    Term,
};
use crate::error::{Error, Result};
use crate::matrix::IntMatrix;
use crate::numeric::{
    abs, display_digits, distinct_roots, eigenvector, format_real, real_rational, to_f64,
    to_rational, ComplexValue, Cx, Real,
};
use crate::torus::{hadwin_recurrence_test, HadwinReport, TorusPoint};

pub const DEFAULT_WITNESS_HORIZON: usize = 200;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WitnessChecks {
    /// `min_n max_k ||(Aᵀⁿθ)_k||` over the horizon.
    pub min_forward_band: f64,
    pub forward_band: bool,
    pub final_backward_distance: f64,
    /// `|λ|^{-N}`, the predicted backward distance scale.
    pub backward_bound: f64,
    pub backward_to_zero: bool,
    pub min_return_distance: f64,
    pub no_recurrence: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NonSqdWitness {
    pub kind: &'static str,
    pub eigenvalue: ComplexValue,
    /// 1-based coordinates carrying the sequence.
    pub coordinates: Vec<usize>,
    pub sequence: String,
    pub growth_r: f64,
    pub growth_c: f64,
    pub horizon: usize,
    pub working_precision_bits: usize,
    pub epsilon: f64,
    pub certificate: BadlyApproxCertificate,
    pub theta: TorusPoint,
    pub checks: WitnessChecks,
    pub passed: bool,
    pub hadwin: HadwinReport,
}

fn modulus(z: &Cx) -> f64 {
    to_f64(&z.abs())
}

fn max_real(a: Real, b: Real) -> Real {
    if a > b {
        a
    } else {
        b
    }
}

pub fn non_sqd_witness(a: &IntMatrix, horizon: usize, prec: usize) -> Result<NonSqdWitness> {
    let d = a.dim();
    let b = a.transpose();
    let roots = distinct_roots(&b.char_poly(), 128)?;
    let moduli: Vec<f64> = roots.iter().map(modulus).collect();
    let top = moduli.iter().cloned().fold(0.0, f64::max);
    if top <= 1.0 + 1e-12 {
        return Err(Error::NoExpandingEigenvalue);
    }
    // error growth of the exact orbit relative to the ideal one
    let rho = moduli.iter().map(|&m| m.max(1.0 / m)).fold(1.0, f64::max);
    let work = prec.max((horizon as f64 * rho.log2()).ceil() as usize + 96);
    let top_is_real = roots
        .iter()
        .zip(&moduli)
        .any(|(z, &m)| z.is_real() && (m - top).abs() < 1e-9 * top);

    let (lambda, v, coords, kind) = if top_is_real {
        let lambda = roots
            .iter()
            .filter(|z| z.is_real())
            .max_by(|x, y| modulus(x).partial_cmp(&modulus(y)).unwrap())
            .unwrap();
        let lambda = distinct_roots(&b.char_poly(), work)?
            .into_iter()
            .filter(|z| z.is_real())
            .min_by(|x, y| {
                (to_f64(&x.re) - to_f64(&lambda.re))
                    .abs()
                    .partial_cmp(&(to_f64(&y.re) - to_f64(&lambda.re)).abs())
                    .unwrap()
            })
            .unwrap();
        let w = eigenvector(&b, &lambda, work);
        let k = w
            .iter()
            .position(|c| to_f64(&abs(&(&c.re - &Real::ONE))) < 1e-30)
            .unwrap_or(0);
        (lambda, w.into_iter().map(|c| c.re).collect::<Vec<_>>(), vec![k], "real_eigenvalue")
    } else {
        let (lambda, w, k1, k2) = expanding_complex_eigen(&b, work)?;
        (lambda, w.into_iter().map(|c| c.re).collect(), vec![k1, k2], "complex_eigenvalue")
    };

    // forward terms (Bⁿv)_k and return terms (Bⁿv - v)_k, maximized over the carrying coordinates
    let mut terms = Vec::with_capacity(2 * horizon);
    let mut power = Cx::one(work);
    let (wa, wb) = if coords.len() == 2 {
        // v_{k2} = a, and (Bⁿ Re w)_{k2} = a Re λⁿ - b Im λⁿ
        let w = expanding_complex_eigen(&b, work)?.1;
        (w[coords[1]].re.clone(), w[coords[1]].im.clone())
    } else {
        (Real::ZERO, Real::ZERO)
    };
    let one = Real::ONE.with_precision(work).value();
    let r = lambda.abs();
    let mut r_pow = one.clone();
    let mut c_fit: f64 = 1.0;
    for n in 1..=horizon {
        power = &power * &lambda;
        r_pow = &r_pow * &r;
        let (fwd, ret) = if coords.len() == 1 {
            (abs(&power.re), abs(&(&power.re - &one)))
        } else {
            let x2 = &wa * &power.re - &wb * &power.im;
            (
                max_real(abs(&power.re), abs(&x2)),
                max_real(abs(&(&power.re - &one)), abs(&(&x2 - &wa))),
            )
        };
        for (value, index) in [(fwd, n), (ret, n)] {
            let q = to_rational(&value);
            let ratio = to_f64(&(&value / &r_pow));
            c_fit = c_fit.max(ratio).max(1.0 / ratio);
            terms.push(Term {
                index,
                value: q,
                slack: BigRational::zero(),
            });
        }
    }
    let growth = Growth::Sandwich {
        c: c_fit * (1.0 + 1e-9),
        r: to_f64(&r),
    };
    let certificate = badly_approximable(&terms, growth, None, kind, &BuilderOptions::default())?;
    let xi = real_rational(&certificate.xi_exact, work);
    let theta = TorusPoint::exact(v.iter().map(|x| to_rational(&(&xi * x))).collect());
    let eps = certificate.epsilon_decimal;
    let hadwin = hadwin_recurrence_test(a, &theta, horizon as u64, eps / 2.0)?;

    let tol = 1e-9;
    let min_forward_band = hadwin
        .forward_coordinate_distance
        .iter()
        .map(|row| coords.iter().map(|&k| row[k]).fold(0.0, f64::max))
        .fold(f64::INFINITY, f64::min);
    let final_backward = *hadwin.backward_distance_to_zero.last().unwrap_or(&0.0);
    let backward_bound = to_f64(&r).powi(-(horizon as i32)) * d as f64;
    let checks = WitnessChecks {
        min_forward_band,
        forward_band: min_forward_band >= eps - tol,
        final_backward_distance: final_backward,
        backward_bound,
        backward_to_zero: final_backward <= backward_bound + tol,
        min_return_distance: hadwin.min_return_distance,
        no_recurrence: hadwin.recurrence.is_none(),
    };
    let digits = display_digits(prec);
    Ok(NonSqdWitness {
        kind,
        eigenvalue: ComplexValue::from_cx(&lambda, digits),
        coordinates: coords.iter().map(|k| k + 1).collect(),
        sequence: if coords.len() == 1 {
            format!("|lambda|^n and |lambda^n - 1|, lambda = {}", format_real(&lambda.re, 12))
        } else {
            "max(|Re lambda^n|, |a Re lambda^n - b Im lambda^n|) and its return analogue".into()
        },
        growth_r: to_f64(&r),
        growth_c: c_fit,
        horizon,
        working_precision_bits: work,
        epsilon: eps,
        passed: checks.forward_band && checks.backward_to_zero && checks.no_recurrence,
        checks,
        certificate,
        theta,
        hadwin,
    })
}
