//! High-precision real and complex arithmetic: polynomial roots by Aberth
//! iteration and null vectors by fully pivoted elimination.

use std::cmp::Ordering;
use std::ops::{Add, Div, Mul, Neg, Sub};

use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;
use dashu_int::IBig;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::IntMatrix;
use crate::polynomials::MonicIntPoly;

pub type Real = FBig<HalfEven, 2>;

pub const DEFAULT_PRECISION_BITS: usize = 256;

pub fn ibig(x: &BigInt) -> IBig {
    x.to_string().parse().expect("decimal integer")
}

pub fn bigint(x: &IBig) -> BigInt {
    x.to_string().parse().expect("decimal integer")
}

pub fn real_int(x: &BigInt, prec: usize) -> Real {
    Real::from(ibig(x)).with_precision(prec).value()
}

pub fn real_i64(x: i64, prec: usize) -> Real {
    Real::from(IBig::from(x)).with_precision(prec).value()
}

pub fn real_rational(q: &BigRational, prec: usize) -> Real {
    real_int(q.numer(), prec) / real_int(q.denom(), prec)
}

pub fn real_f64(x: f64, prec: usize) -> Real {
    Real::try_from(x)
        .expect("finite float")
        .with_precision(prec)
        .value()
}

/// Exact value of a binary float as a rational.
pub fn to_rational(x: &Real) -> BigRational {
    let repr = x.repr();
    let m = bigint(repr.significand());
    let e = repr.exponent();
    if e >= 0 {
        BigRational::from_integer(m << e as usize)
    } else {
        BigRational::new(m, BigInt::one() << (-e) as usize)
    }
}

pub fn to_f64(x: &Real) -> f64 {
    x.to_f64().value()
}

pub fn abs(x: &Real) -> Real {
    if x.repr().significand() < &IBig::ZERO {
        -x.clone()
    } else {
        x.clone()
    }
}

pub fn is_negative(x: &Real) -> bool {
    x.repr().significand() < &IBig::ZERO
}

pub fn is_zero_real(x: &Real) -> bool {
    x.repr().significand() == &IBig::ZERO
}

pub fn zero(prec: usize) -> Real {
    real_i64(0, prec)
}

/// `2^-bits` at the given precision.
pub fn epsilon(bits: usize, prec: usize) -> Real {
    Real::from_parts(IBig::ONE, -(bits as isize))
        .with_precision(prec)
        .value()
}

/// Scientific-notation string with `digits` significant decimal digits.
pub fn format_real(x: &Real, digits: usize) -> String {
    let q = to_rational(x);
    format_rational(&q, digits)
}

pub fn format_rational(q: &BigRational, digits: usize) -> String {
    if q.is_zero() {
        return "0".into();
    }
    let neg = q.numer().sign() == num_bigint::Sign::Minus;
    let mut num = q.numer().magnitude().clone();
    let den = q.denom().magnitude().clone();
    // scale into [10^(digits-1), 10^digits)
    let ten = num_bigint::BigUint::from(10u32);
    let mut exp10: i64 = 0;
    let lo = ten.pow(digits as u32 - 1);
    let hi = ten.pow(digits as u32);
    let mut den_scaled = den.clone();
    while &num < &(&den_scaled * &lo) {
        num *= &ten;
        exp10 -= 1;
    }
    while &num >= &(&den_scaled * &hi) {
        den_scaled *= &ten;
        exp10 += 1;
    }
    // round half up
    let two = num_bigint::BigUint::from(2u32);
    let mut mant = (&num * &two + &den_scaled) / (&den_scaled * &two);
    if mant >= hi {
        mant /= &ten;
        exp10 += 1;
    }
    let s = mant.to_string();
    let point = exp10 + digits as i64 - 1;
    let frac = s[1..].trim_end_matches('0');
    let body = if frac.is_empty() {
        s[..1].to_string()
    } else {
        format!("{}.{}", &s[..1], frac)
    };
    format!("{}{}e{}", if neg { "-" } else { "" }, body, point)
}

/// Decimal digits worth printing for a given binary precision, capped at 50.
pub fn display_digits(prec: usize) -> usize {
    ((prec as f64 * std::f64::consts::LOG10_2) as usize)
        .saturating_sub(2)
        .clamp(6, 50)
}

/// Printable complex number.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComplexValue {
    pub re: String,
    pub im: String,
    pub modulus: String,
}

impl ComplexValue {
    pub fn from_cx(z: &Cx, digits: usize) -> Self {
        ComplexValue {
            re: format_real(&z.re, digits),
            im: format_real(&z.im, digits),
            modulus: format_real(&z.abs(), digits),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Cx {
    pub re: Real,
    pub im: Real,
}

impl Cx {
    pub fn new(re: Real, im: Real) -> Self {
        Cx { re, im }
    }

    pub fn real(re: Real) -> Self {
        let im = zero(re.precision());
        Cx { re, im }
    }

    pub fn zero(prec: usize) -> Self {
        Cx::real(zero(prec))
    }

    pub fn one(prec: usize) -> Self {
        Cx::real(real_i64(1, prec))
    }

    pub fn from_c64(z: Complex64, prec: usize) -> Self {
        Cx::new(real_f64(z.re, prec), real_f64(z.im, prec))
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(to_f64(&self.re), to_f64(&self.im))
    }

    pub fn precision(&self) -> usize {
        self.re.precision().max(self.im.precision())
    }

    pub fn conj(&self) -> Self {
        Cx::new(self.re.clone(), -self.im.clone())
    }

    pub fn norm_sq(&self) -> Real {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn abs(&self) -> Real {
        self.norm_sq().sqrt()
    }

    pub fn scale(&self, k: &Real) -> Self {
        Cx::new(&self.re * k, &self.im * k)
    }

    pub fn is_real(&self) -> bool {
        self.im.repr().significand() == &IBig::ZERO
    }

    pub fn powi(&self, n: u32) -> Self {
        let mut acc = Cx::one(self.precision());
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }
}

impl Add for &Cx {
    type Output = Cx;
    fn add(self, o: &Cx) -> Cx {
        Cx::new(&self.re + &o.re, &self.im + &o.im)
    }
}

impl Sub for &Cx {
    type Output = Cx;
    fn sub(self, o: &Cx) -> Cx {
        Cx::new(&self.re - &o.re, &self.im - &o.im)
    }
}

impl Mul for &Cx {
    type Output = Cx;
    fn mul(self, o: &Cx) -> Cx {
        Cx::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }
}

impl Div for &Cx {
    type Output = Cx;
    fn div(self, o: &Cx) -> Cx {
        let n = o.norm_sq();
        let p = self * &o.conj();
        Cx::new(p.re / &n, p.im / n)
    }
}

impl Neg for &Cx {
    type Output = Cx;
    fn neg(self) -> Cx {
        Cx::new(-self.re.clone(), -self.im.clone())
    }
}

fn horner(coeffs: &[Cx], z: &Cx) -> Cx {
    let mut acc = coeffs.last().unwrap().clone();
    for c in coeffs.iter().rev().skip(1) {
        acc = &(&acc * z) + c;
    }
    acc
}

fn horner_f64(coeffs: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(*coeffs.last().unwrap(), 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev().skip(1) {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

fn aberth_f64(coeffs: &[f64]) -> Vec<Complex64> {
    let m = coeffs.len() - 1;
    // Fujiwara-style radius
    let radius = (0..m)
        .map(|i| coeffs[i].abs().powf(1.0 / (m - i) as f64))
        .fold(0.0f64, f64::max)
        * 2.0
        + 1e-3;
    let mut z: Vec<Complex64> = (0..m)
        .map(|k| {
            let ang = 2.0 * std::f64::consts::PI * k as f64 / m as f64 + 0.4;
            Complex64::from_polar(radius, ang)
        })
        .collect();
    for _ in 0..2000 {
        let mut worst = 0.0f64;
        for k in 0..m {
            let (p, dp) = horner_f64(coeffs, z[k]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let s: Complex64 = (0..m)
                .filter(|&j| j != k)
                .map(|j| Complex64::new(1.0, 0.0) / (z[k] - z[j]))
                .sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            z[k] -= w;
            worst = worst.max(w.norm() / (1.0 + z[k].norm()));
        }
        if worst < 1e-15 {
            break;
        }
    }
    z
}

/// Roots of a squarefree monic polynomial to `prec` bits, sorted by real part
/// then imaginary part. Roots whose imaginary part is below the working
/// tolerance are snapped to the real axis when the polynomial has real
/// coefficients and the root count parity allows it.
pub fn poly_roots(p: &MonicIntPoly, prec: usize) -> Result<Vec<Cx>> {
    let m = p.degree();
    if m == 0 {
        return Ok(Vec::new());
    }
    let poly = p.as_poly();
    if !poly.gcd(&poly.derivative()).degree().is_some_and(|d| d == 0) {
        return Err(Error::Numerical("polynomial has repeated roots".into()));
    }
    let work = prec + 64;
    let coeffs_f: Vec<f64> = p
        .coeffs()
        .iter()
        .map(|c| c.to_string().parse::<f64>().unwrap())
        .collect();
    let start = aberth_f64(&coeffs_f);
    let coeffs: Vec<Cx> = p
        .coeffs()
        .iter()
        .map(|c| Cx::real(real_int(c, work)))
        .collect();
    let dcoeffs: Vec<Cx> = (1..=m)
        .map(|k| Cx::real(real_int(&(&p.coeffs()[k] * BigInt::from(k)), work)))
        .collect();
    let mut z: Vec<Cx> = start.iter().map(|&s| Cx::from_c64(s, work)).collect();
    let tol = to_f64(&epsilon(prec + 8, 64));
    let one = Cx::one(work);
    let mut converged = false;
    for _ in 0..200 {
        let mut worst = 0.0f64;
        for k in 0..m {
            let pv = horner(&coeffs, &z[k]);
            if pv.norm_sq().repr().significand() == &IBig::ZERO {
                continue;
            }
            let dv = horner(&dcoeffs, &z[k]);
            let ratio = &pv / &dv;
            let mut s = Cx::zero(work);
            for j in 0..m {
                if j != k {
                    s = &s + &(&one / &(&z[k] - &z[j]));
                }
            }
            let w = &ratio / &(&one - &(&ratio * &s));
            z[k] = &z[k] - &w;
            let rel = to_f64(&w.abs()) / (1.0 + to_f64(&z[k].abs()));
            worst = worst.max(rel);
        }
        if worst < tol {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Numerical(format!(
            "root refinement did not converge for {p}"
        )));
    }
    // snap real roots: pair each root with its conjugate partner
    let snap = to_f64(&epsilon(prec / 2, 64));
    let mut out: Vec<Cx> = z
        .into_iter()
        .map(|r| {
            let scale = 1.0 + to_f64(&r.abs());
            let r = Cx::new(
                r.re.with_precision(prec).value(),
                r.im.with_precision(prec).value(),
            );
            if to_f64(&abs(&r.im)) < snap * scale {
                Cx::real(r.re)
            } else {
                r
            }
        })
        .collect();
    out.sort_by(|a, b| cmp_cx(a, b));
    Ok(out)
}

/// Distinct roots of any monic polynomial, via its squarefree part.
pub fn distinct_roots(p: &MonicIntPoly, prec: usize) -> Result<Vec<Cx>> {
    let poly = p.as_poly();
    let g = poly.gcd(&poly.derivative());
    if g.degree().unwrap_or(0) == 0 {
        return poly_roots(p, prec);
    }
    let sf = poly.exact_div(&g).expect("gcd divides").primitive_part();
    poly_roots(&MonicIntPoly::new(sf)?, prec)
}

fn cmp_cx(a: &Cx, b: &Cx) -> Ordering {
    a.re.partial_cmp(&b.re)
        .unwrap_or(Ordering::Equal)
        .then_with(|| a.im.partial_cmp(&b.im).unwrap_or(Ordering::Equal))
}

/// Nonzero `v` with `(M - λ I) v ≈ 0`, normalized so its largest
/// coordinate is 1.
pub fn eigenvector(m: &IntMatrix, lambda: &Cx, prec: usize) -> Vec<Cx> {
    let d = m.dim();
    let work = lambda.precision().max(prec);
    let mut a: Vec<Vec<Cx>> = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    let e = Cx::real(real_int(m.get(i, j), work));
                    if i == j {
                        &e - lambda
                    } else {
                        e
                    }
                })
                .collect()
        })
        .collect();
    null_vector(&mut a)
}

/// Kernel vector of a numerically rank-deficient square matrix by complete
/// pivoting; the last pivot is treated as zero.
pub fn null_vector(a: &mut [Vec<Cx>]) -> Vec<Cx> {
    let d = a.len();
    let prec = a[0][0].precision();
    let mut perm: Vec<usize> = (0..d).collect();
    for k in 0..d.saturating_sub(1) {
        let mut best = (k, k);
        let mut best_val = -1.0f64;
        for i in k..d {
            for j in k..d {
                let v = to_f64(&a[i][j].norm_sq());
                if v > best_val {
                    best_val = v;
                    best = (i, j);
                }
            }
        }
        a.swap(k, best.0);
        for row in a.iter_mut() {
            row.swap(k, best.1);
        }
        perm.swap(k, best.1);
        let pivot = a[k][k].clone();
        for i in k + 1..d {
            let f = &a[i][k] / &pivot;
            for j in k..d {
                let t = &f * &a[k][j];
                a[i][j] = &a[i][j] - &t;
            }
        }
    }
    let mut x = vec![Cx::zero(prec); d];
    x[d - 1] = Cx::one(prec);
    for k in (0..d - 1).rev() {
        let mut s = Cx::zero(prec);
        for j in k + 1..d {
            s = &s + &(&a[k][j] * &x[j]);
        }
        x[k] = &(-&s) / &a[k][k];
    }
    let mut v = vec![Cx::zero(prec); d];
    for (k, &col) in perm.iter().enumerate() {
        v[col] = x[k].clone();
    }
    // normalize by the largest coordinate
    let big = (0..d)
        .max_by(|&i, &j| {
            to_f64(&v[i].norm_sq())
                .partial_cmp(&to_f64(&v[j].norm_sq()))
                .unwrap_or(Ordering::Equal)
        })
        .unwrap();
    let pivot = v[big].clone();
    v.iter().map(|c| c / &pivot).collect()
}

/// `max_i |(M v - λ v)_i| / max_i |v_i|`.
pub fn eigen_residual(m: &IntMatrix, lambda: &Cx, v: &[Cx]) -> f64 {
    let d = m.dim();
    let prec = lambda.precision();
    let mut worst = 0.0f64;
    let mut vmax = 0.0f64;
    for i in 0..d {
        let mut s = Cx::zero(prec);
        for j in 0..d {
            let e = Cx::real(real_int(m.get(i, j), prec));
            s = &s + &(&e * &v[j]);
        }
        let r = &s - &(lambda * &v[i]);
        worst = worst.max(to_f64(&r.abs()));
        vmax = vmax.max(to_f64(&v[i].abs()));
    }
    worst / vmax.max(f64::MIN_POSITIVE)
}

/// Exact rational from `"p/q"`, an integer, or a decimal such as `"-0.125"`
/// or `"1e-3"`.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let t = text.trim();
    let bad = || Error::schema("number", format!("not a rational number: {text:?}"));
    if let Some((p, q)) = t.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(p, q));
    }
    let (mant, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    if int.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigInt = format!("0{int}{frac}").parse().map_err(|_| bad())?;
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut q = if scale >= 0 {
        BigRational::from_integer(digits * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(digits, num_traits::pow(ten, (-scale) as usize))
    };
    if neg {
        q = -q;
    }
    Ok(q)
}

/// Evaluates a small real expression: numbers (as in [`parse_rational`]),
/// `+ - * /`, parentheses, `sqrt(..)` and `pi`.
pub fn parse_real_expr(text: &str, prec: usize) -> Result<Real> {
    let mut p = ExprParser {
        s: text.as_bytes(),
        i: 0,
        prec: prec + 16,
        text,
    };
    let v = p.expr()?;
    p.skip_ws();
    if p.i != p.s.len() {
        return Err(p.err());
    }
    Ok(v.with_precision(prec).value())
}

struct ExprParser<'a> {
    s: &'a [u8],
    i: usize,
    prec: usize,
    text: &'a str,
}

impl ExprParser<'_> {
    fn err(&self) -> Error {
        Error::schema(
            "expression",
            format!("cannot parse {:?} at offset {}", self.text, self.i),
        )
    }

    fn skip_ws(&mut self) {
        while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.i).copied()
    }

    fn expr(&mut self) -> Result<Real> {
        let mut acc = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.i += 1;
            let t = self.term()?;
            acc = if c == b'+' { acc + t } else { acc - t };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Real> {
        let mut acc = self.unary()?;
        while let Some(c @ (b'*' | b'/')) = self.peek() {
            self.i += 1;
            let t = self.unary()?;
            if c == b'/' && t.repr().significand() == &IBig::ZERO {
                return Err(self.err());
            }
            acc = if c == b'*' { acc * t } else { acc / t };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Real> {
        match self.peek() {
            Some(b'-') => {
                self.i += 1;
                Ok(-self.unary()?)
            }
            Some(b'+') => {
                self.i += 1;
                self.unary()
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Real> {
        match self.peek() {
            Some(b'(') => {
                self.i += 1;
                let v = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err());
                }
                self.i += 1;
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let start = self.i;
                while self.i < self.s.len()
                    && (self.s[self.i].is_ascii_digit() || self.s[self.i] == b'.')
                {
                    self.i += 1;
                }
                if self.i < self.s.len() && matches!(self.s[self.i], b'e' | b'E') {
                    let save = self.i;
                    self.i += 1;
                    if self.i < self.s.len() && matches!(self.s[self.i], b'+' | b'-') {
                        self.i += 1;
                    }
                    let digits_start = self.i;
                    while self.i < self.s.len() && self.s[self.i].is_ascii_digit() {
                        self.i += 1;
                    }
                    if self.i == digits_start {
                        self.i = save;
                    }
                }
                let q = parse_rational(&self.text[start..self.i]).map_err(|_| self.err())?;
                Ok(real_rational(&q, self.prec))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.i;
                while self.i < self.s.len() && self.s[self.i].is_ascii_alphabetic() {
                    self.i += 1;
                }
                match &self.text[start..self.i] {
                    "pi" => {
                        // pi = 4 atan(1) via Machin's formula
                        Ok(machin_pi(self.prec))
                    }
                    "sqrt" => {
                        let arg = self.primary()?;
                        if is_negative(&arg) {
                            return Err(self.err());
                        }
                        Ok(arg.sqrt())
                    }
                    _ => Err(self.err()),
                }
            }
            _ => Err(self.err()),
        }
    }
}

fn atan_inv(k: i64, prec: usize) -> Real {
    // atan(1/k) = sum (-1)^j / ((2j+1) k^(2j+1))
    let k2 = real_i64(k * k, prec);
    let mut power = real_i64(1, prec) / real_i64(k, prec);
    let mut acc = power.clone();
    let tiny = epsilon(prec + 4, prec);
    let mut j = 1i64;
    loop {
        power = power / &k2;
        let term = &power / real_i64(2 * j + 1, prec);
        if abs(&term) < tiny {
            break;
        }
        if j % 2 == 1 {
            acc -= term;
        } else {
            acc += term;
        }
        j += 1;
    }
    acc
}

fn machin_pi(prec: usize) -> Real {
    (atan_inv(5, prec) * real_i64(16, prec)) - (atan_inv(239, prec) * real_i64(4, prec))
}
