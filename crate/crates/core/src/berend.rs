//! The three orbit-dichotomy conditions for a commuting family of
//! unimodular matrices: all-powers irreducibility of some generator, an
//! expanding eigenvalue on every common eigenvector, and a multiplicatively
//! independent pair.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::IntMatrix;
use crate::numeric::{
    display_digits, eigen_residual, eigenvector, format_real, poly_roots, real_int, to_f64,
    ComplexValue, Cx, Real,
};
use crate::polynomials::{all_powers_irreducible, PowersIrreducibilityCertificate, PowersVerdict};
use crate::spec::ActionSpec;

pub const DEFAULT_WORD_BOUND: u32 = 3;
pub const DEFAULT_COINCIDENCE_BOUND: u32 = 20;
/// A word passes condition (2) when its eigenvalue modulus exceeds `1 + MODULUS_MARGIN`.
pub const MODULUS_MARGIN: f64 = 1e-12;
/// Minimum |det| of a 2x2 log-modulus minor accepted as independence evidence.
pub const LOG_DET_MARGIN: f64 = 1e-10;
pub const RESIDUAL_TOLERANCE: f64 = 1e-30;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionStatus {
    Satisfied,
    Failed,
    Undetermined,
}

/// Simultaneous eigenvectors of the generators, taken from a generator
/// with simple spectrum.
#[derive(Clone, Debug)]
pub struct EigenData {
    pub simple_generator: usize,
    pub eigenvectors: Vec<Vec<Cx>>,
    /// `eigenvalues[i][g]` is the eigenvalue of generator `g` on eigenvector `i`.
    pub eigenvalues: Vec<Vec<Cx>>,
    /// Worst relative residual `|Gv - λv| / |v|` over generators, per eigenvector.
    pub residuals: Vec<f64>,
    pub precision_bits: usize,
}

impl EigenData {
    /// `|1 - |λ||` per eigenvector and generator.
    pub fn modulus_margins(&self) -> Vec<Vec<f64>> {
        self.eigenvalues
            .iter()
            .map(|row| row.iter().map(|l| (1.0 - to_f64(&l.abs())).abs()).collect())
            .collect()
    }

    /// `ln |λ|` per eigenvector and generator, at working precision.
    pub fn log_moduli(&self) -> Vec<Vec<Real>> {
        self.eigenvalues
            .iter()
            .map(|row| row.iter().map(|l| l.norm_sq().ln() / 2).collect())
            .collect()
    }

    pub fn summary(&self) -> EigenSummary {
        let digits = display_digits(self.precision_bits);
        EigenSummary {
            simple_generator: self.simple_generator,
            eigenvalues: self
                .eigenvalues
                .iter()
                .map(|row| row.iter().map(|l| ComplexValue::from_cx(l, digits)).collect())
                .collect(),
            max_residual: self.residuals.iter().cloned().fold(0.0, f64::max),
            modulus_margins: self.modulus_margins(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EigenSummary {
    pub simple_generator: usize,
    pub eigenvalues: Vec<Vec<ComplexValue>>,
    pub max_residual: f64,
    pub modulus_margins: Vec<Vec<f64>>,
}

pub fn common_eigen_structure(spec: &ActionSpec, prec: usize) -> Result<EigenData> {
    let simple = spec
        .generators
        .iter()
        .position(|g| {
            let p = g.char_poly();
            let f = p.as_poly();
            f.gcd(&f.derivative()).degree() == Some(0)
        })
        .ok_or(Error::NoSimpleSpectrum)?;
    let base = &spec.generators[simple];
    let roots = poly_roots(&base.char_poly(), prec)?;
    let mut eigenvectors = Vec::new();
    let mut eigenvalues = Vec::new();
    let mut residuals = Vec::new();
    for lambda in &roots {
        let v = eigenvector(base, lambda, prec);
        // v is normalized so its largest coordinate is exactly 1
        let k = (0..v.len())
            .max_by(|&i, &j| {
                to_f64(&v[i].norm_sq())
                    .partial_cmp(&to_f64(&v[j].norm_sq()))
                    .unwrap()
            })
            .unwrap();
        let mut row = Vec::new();
        let mut worst = 0.0f64;
        for (g, m) in spec.generators.iter().enumerate() {
            let mu = if g == simple {
                lambda.clone()
            } else {
                let mut s = Cx::zero(lambda.precision());
                for j in 0..v.len() {
                    let e = Cx::real(real_int(m.get(k, j), lambda.precision()));
                    s = &s + &(&e * &v[j]);
                }
                &s / &v[k]
            };
            let r = eigen_residual(m, &mu, &v);
            worst = worst.max(r);
            row.push(mu);
        }
        if worst > RESIDUAL_TOLERANCE {
            return Err(Error::Numerical(format!(
                "common eigenvector residual {worst:e} exceeds {RESIDUAL_TOLERANCE:e}"
            )));
        }
        eigenvectors.push(v);
        eigenvalues.push(row);
        residuals.push(worst);
    }
    Ok(EigenData {
        simple_generator: simple,
        eigenvectors,
        eigenvalues,
        residuals,
        precision_bits: prec,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GeneratorPowers {
    pub generator: usize,
    pub certificate: Option<PowersIrreducibilityCertificate>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Condition1 {
    pub status: ConditionStatus,
    pub chosen_generator: Option<usize>,
    pub generators: Vec<GeneratorPowers>,
}

pub fn check_condition_one(spec: &ActionSpec, direct_bound: u32) -> Condition1 {
    let mut generators = Vec::new();
    let mut chosen = None;
    let mut undetermined = false;
    for (i, g) in spec.generators.iter().enumerate() {
        match all_powers_irreducible(g, direct_bound) {
            Ok(c) => {
                match c.verdict {
                    PowersVerdict::Holds => chosen = Some(i),
                    PowersVerdict::Undetermined => undetermined = true,
                    PowersVerdict::FailsAtN => {}
                }
                generators.push(GeneratorPowers {
                    generator: i,
                    certificate: Some(c),
                    error: None,
                });
            }
            Err(e) => {
                undetermined = true;
                generators.push(GeneratorPowers {
                    generator: i,
                    certificate: None,
                    error: Some(e.to_string()),
                });
            }
        }
        if chosen.is_some() {
            break;
        }
    }
    let status = if chosen.is_some() {
        ConditionStatus::Satisfied
    } else if undetermined {
        ConditionStatus::Undetermined
    } else {
        ConditionStatus::Failed
    };
    Condition1 {
        status,
        chosen_generator: chosen,
        generators,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Condition2Row {
    pub eigenvector: usize,
    pub best_modulus: String,
    pub best_log_modulus: f64,
    /// Exponent vector of the achieving word.
    pub word: Vec<i64>,
    pub status: ConditionStatus,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Condition2 {
    pub status: ConditionStatus,
    pub word_bound: u32,
    pub rows: Vec<Condition2Row>,
}

fn words(n: usize, bound: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut w = vec![-bound; n];
    loop {
        if w.iter().any(|&x| x != 0) {
            out.push(w.clone());
        }
        let mut pos = n;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            if w[pos] < bound {
                w[pos] += 1;
                break;
            }
            w[pos] = -bound;
        }
    }
}

pub fn check_condition_two(spec: &ActionSpec, eig: &EigenData, word_bound: u32) -> Condition2 {
    let logs = eig.log_moduli();
    let all_words = words(spec.n, word_bound as i64);
    let fail_below = 2f64.powi(-(eig.precision_bits as i32) / 2);
    let digits = display_digits(eig.precision_bits);
    let mut rows = Vec::new();
    for (i, row) in logs.iter().enumerate() {
        let mut best: Option<(Real, &Vec<i64>)> = None;
        for w in &all_words {
            let mut acc = Real::ZERO;
            for (g, &e) in w.iter().enumerate() {
                if e != 0 {
                    acc += &row[g] * Real::from(e);
                }
            }
            if best.as_ref().is_none_or(|(b, _)| acc > *b) {
                best = Some((acc, w));
            }
        }
        let (log_best, word) = best.expect("at least one word");
        let lb = to_f64(&log_best);
        let status = if lb > MODULUS_MARGIN.ln_1p() {
            ConditionStatus::Satisfied
        } else if lb.abs() <= fail_below {
            ConditionStatus::Failed
        } else {
            ConditionStatus::Undetermined
        };
        rows.push(Condition2Row {
            eigenvector: i,
            best_modulus: format_real(&log_best.exp(), digits),
            best_log_modulus: lb,
            word: word.clone(),
            status,
        });
    }
    let status = aggregate(rows.iter().map(|r| r.status));
    Condition2 {
        status,
        word_bound,
        rows,
    }
}

fn aggregate(it: impl Iterator<Item = ConditionStatus>) -> ConditionStatus {
    let mut out = ConditionStatus::Satisfied;
    for s in it {
        match s {
            ConditionStatus::Failed => return ConditionStatus::Failed,
            ConditionStatus::Undetermined => out = ConditionStatus::Undetermined,
            ConditionStatus::Satisfied => {}
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Condition3 {
    IndependentVerifiedToBound {
        pair: (usize, usize),
        bound: u32,
        log_det: f64,
    },
    /// `σ_first^n = σ_second^m` with `(n, m) != (0, 0)`.
    DependentWithWitness {
        pair: (usize, usize),
        n: i64,
        m: i64,
    },
    Undetermined {
        reason: String,
    },
}

impl Condition3 {
    pub fn status(&self) -> ConditionStatus {
        match self {
            Condition3::IndependentVerifiedToBound { .. } => ConditionStatus::Satisfied,
            Condition3::DependentWithWitness { .. } => ConditionStatus::Failed,
            Condition3::Undetermined { .. } => ConditionStatus::Undetermined,
        }
    }
}

/// Exact search for `a^n = b^m` with `0 < max(|n|, |m|) <= bound`, preferring
/// the smallest exponents and nonnegative `n`.
pub fn find_coincidence(a: &IntMatrix, b: &IntMatrix, bound: u32) -> Result<Option<(i64, i64)>> {
    let bound = bound as i64;
    let mut b_powers: BTreeMap<Vec<BigInt>, Vec<i64>> = BTreeMap::new();
    for m in -bound..=bound {
        b_powers
            .entry(b.pow(m)?.entries().to_vec())
            .or_default()
            .push(m);
    }
    let mut hits = Vec::new();
    for n in -bound..=bound {
        if let Some(ms) = b_powers.get(a.pow(n)?.entries()) {
            for &m in ms {
                if n != 0 || m != 0 {
                    hits.push((n, m));
                }
            }
        }
    }
    hits.sort_by_key(|&(n, m)| (n.abs().max(m.abs()), n.abs() + m.abs(), n < 0, m < 0, n.abs()));
    Ok(hits.first().copied())
}

/// Largest |det| over 2x2 minors of the log-modulus matrix for a generator pair.
pub fn log_det_certificate(eig: &EigenData, i: usize, j: usize) -> f64 {
    let logs = eig.log_moduli();
    let mut best = 0.0f64;
    for p in 0..logs.len() {
        for q in p + 1..logs.len() {
            let det = &logs[p][i] * &logs[q][j] - &logs[p][j] * &logs[q][i];
            best = best.max(to_f64(&det).abs());
        }
    }
    best
}

pub fn check_condition_three(
    spec: &ActionSpec,
    eig: Option<&EigenData>,
    bound: u32,
) -> Result<Condition3> {
    if spec.n == 1 {
        // any two elements of a cyclic group are dependent; σ^1 = σ^1
        return Ok(Condition3::DependentWithWitness {
            pair: (0, 0),
            n: 1,
            m: 1,
        });
    }
    let mut first_dependent = None;
    let mut reasons = Vec::new();
    for i in 0..spec.n {
        for j in i + 1..spec.n {
            if let Some((n, m)) = find_coincidence(&spec.generators[i], &spec.generators[j], bound)?
            {
                first_dependent.get_or_insert(Condition3::DependentWithWitness {
                    pair: (i, j),
                    n,
                    m,
                });
                continue;
            }
            let Some(eig) = eig else {
                reasons.push(format!("pair ({i},{j}): no eigen data for log certificate"));
                continue;
            };
            let log_det = log_det_certificate(eig, i, j);
            if log_det > LOG_DET_MARGIN {
                return Ok(Condition3::IndependentVerifiedToBound {
                    pair: (i, j),
                    bound,
                    log_det,
                });
            }
            reasons.push(format!(
                "pair ({i},{j}): no coincidence up to {bound} but log determinant {log_det:e} <= {LOG_DET_MARGIN:e}"
            ));
        }
    }
    if reasons.is_empty() {
        Ok(first_dependent.expect("at least one pair"))
    } else {
        Ok(Condition3::Undetermined {
            reason: reasons.join("; "),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BerendReport {
    pub all_conditions: ConditionStatus,
    pub condition1: Condition1,
    pub condition2: Option<Condition2>,
    pub condition3: Condition3,
    pub eigen: Option<EigenSummary>,
    pub bounds: BerendBounds,
    pub notes: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BerendBounds {
    pub direct_bound: u32,
    pub word_bound: u32,
    pub coincidence_bound: u32,
    pub precision_bits: usize,
}

impl Default for BerendBounds {
    fn default() -> Self {
        BerendBounds {
            direct_bound: crate::polynomials::DEFAULT_DIRECT_BOUND,
            word_bound: DEFAULT_WORD_BOUND,
            coincidence_bound: DEFAULT_COINCIDENCE_BOUND,
            precision_bits: crate::numeric::DEFAULT_PRECISION_BITS,
        }
    }
}

/// Runs all three conditions. Σ is the group generated by the spec
/// (inverses included).
pub fn berend_verdict(spec: &ActionSpec, bounds: BerendBounds) -> Result<BerendReport> {
    let mut notes = vec![
        "condition (1) is checked on the generators only".to_string(),
        format!(
            "condition (2) searches words with exponents in [-{0}, {0}]",
            bounds.word_bound
        ),
    ];
    let c1 = check_condition_one(spec, bounds.direct_bound);
    let eig = match common_eigen_structure(spec, bounds.precision_bits) {
        Ok(e) => Some(e),
        Err(Error::NoSimpleSpectrum) => {
            notes.push("no generator has simple spectrum; condition (2) not evaluated".into());
            None
        }
        Err(e) => return Err(e),
    };
    let c2 = eig
        .as_ref()
        .map(|e| check_condition_two(spec, e, bounds.word_bound));
    let c3 = check_condition_three(spec, eig.as_ref(), bounds.coincidence_bound)?;
    let c2_status = c2
        .as_ref()
        .map(|c| c.status)
        .unwrap_or(ConditionStatus::Undetermined);
    let all = aggregate([c1.status, c2_status, c3.status()].into_iter());
    Ok(BerendReport {
        all_conditions: all,
        condition1: c1,
        condition2: c2,
        condition3: c3,
        eigen: eig.as_ref().map(EigenData::summary),
        bounds,
        notes,
    })
}
