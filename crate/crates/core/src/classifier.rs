//! The verdict: virtually nilpotent, Berend, not strongly quasidiagonal, or
//! inconclusive, with certificates and citation tags.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::berend::{berend_verdict, BerendBounds, BerendReport, ConditionStatus};
use crate::error::Result;
use crate::matrix::IntMatrix;
use crate::numeric::{display_digits, distinct_roots, to_f64, ComplexValue, DEFAULT_PRECISION_BITS};
use crate::polynomials::{is_quasi_unipotent, QuasiUnipotenceCertificate, DEFAULT_DIRECT_BOUND};
use crate::snf::smith_normal_form;
use crate::spec::ActionSpec;
use crate::witness::{non_sqd_witness, NonSqdWitness, DEFAULT_WITNESS_HORIZON};

const VN_JUSTIFICATION: &str = "commuting quasi-unipotent unimodular matrices generate only \
quasi-unipotent elements, since eigenvalue characters of a commuting family multiply roots of \
unity; a unimodular integer matrix that is not quasi-unipotent has an eigenvalue of modulus \
greater than 1 (Kronecker), so the group has exponential growth and is not virtually nilpotent \
(Wolf)";

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FixedPointCount {
    Finite(BigInt),
    Infinite,
}

impl Serialize for FixedPointCount {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            FixedPointCount::Finite(n) => s.serialize_str(&n.to_string()),
            FixedPointCount::Infinite => s.serialize_str("infinite"),
        }
    }
}

/// Solutions of `(Aᵀ − I)θ ≡ 0 mod 1` on `T^d`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FixedPointData {
    pub matrix: IntMatrix,
    pub count: FixedPointCount,
    pub fixed_subtorus_dim: usize,
    #[serde(serialize_with = "crate::serde_util::bigint_as_string")]
    pub component_count: BigInt,
    #[serde(serialize_with = "crate::serde_util::bigints_as_strings")]
    pub invariant_factors: Vec<BigInt>,
}

pub fn fixed_point_data(a: &IntMatrix) -> FixedPointData {
    let d = a.dim();
    let m = &a.transpose() - &IntMatrix::identity(d);
    let factors: Vec<BigInt> = smith_normal_form(&m)
        .invariant_factors()
        .into_iter()
        .map(|f| f.abs())
        .collect();
    let dim = factors.iter().filter(|f| f.is_zero()).count();
    let components: BigInt = factors
        .iter()
        .filter(|f| !f.is_zero())
        .fold(BigInt::one(), |acc, f| acc * f);
    FixedPointData {
        matrix: a.clone(),
        count: if dim == 0 {
            FixedPointCount::Finite(components.clone())
        } else {
            FixedPointCount::Infinite
        },
        fixed_subtorus_dim: dim,
        component_count: components,
        invariant_factors: factors,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GeneratorQuasiUnipotence {
    pub generator: usize,
    pub certificate: QuasiUnipotenceCertificate,
    /// Largest-modulus root of the non-cyclotomic factor.
    pub witness_eigenvalue: Option<ComplexValue>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VnCertificate {
    pub virtually_nilpotent: bool,
    pub generators: Vec<GeneratorQuasiUnipotence>,
    pub justification: &'static str,
}

pub fn is_virtually_nilpotent(spec: &ActionSpec, prec: usize) -> Result<VnCertificate> {
    let mut generators = Vec::with_capacity(spec.n);
    for (i, g) in spec.generators.iter().enumerate() {
        let certificate = is_quasi_unipotent(g)?;
        let witness_eigenvalue = match &certificate.witness_factor {
            Some(f) => distinct_roots(f, prec)?
                .into_iter()
                .max_by(|x, y| {
                    to_f64(&x.abs())
                        .partial_cmp(&to_f64(&y.abs()))
                        .unwrap()
                        .then_with(|| y.im.partial_cmp(&x.im).unwrap())
                })
                .map(|z| ComplexValue::from_cx(&z, display_digits(prec))),
            None => None,
        };
        generators.push(GeneratorQuasiUnipotence {
            generator: i,
            certificate,
            witness_eigenvalue,
        });
    }
    Ok(VnCertificate {
        virtually_nilpotent: generators.iter().all(|g| g.certificate.quasi_unipotent),
        generators,
        justification: VN_JUSTIFICATION,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ClassifyOptions {
    pub direct_bound: u32,
    pub word_bound: u32,
    pub coincidence_bound: u32,
    pub witness: bool,
    pub witness_horizon: usize,
    pub precision_bits: usize,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        let b = BerendBounds::default();
        ClassifyOptions {
            direct_bound: DEFAULT_DIRECT_BOUND,
            word_bound: b.word_bound,
            coincidence_bound: b.coincidence_bound,
            witness: false,
            witness_horizon: DEFAULT_WITNESS_HORIZON,
            precision_bits: DEFAULT_PRECISION_BITS,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    VirtuallyNilpotentSqd,
    BerendSqd,
    NotSqd,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::VirtuallyNilpotentSqd => "virtually_nilpotent_sqd",
            Verdict::BerendSqd => "berend_sqd",
            Verdict::NotSqd => "not_sqd",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerdictReport {
    pub verdict: Verdict,
    pub d: usize,
    pub n: usize,
    pub generators: Vec<IntMatrix>,
    pub vn_certificate: VnCertificate,
    pub fixed_points: Vec<FixedPointData>,
    pub berend_report: Option<BerendReport>,
    pub witness: Option<NonSqdWitness>,
    pub citations: Vec<&'static str>,
    pub notes: Vec<String>,
    pub options: ClassifyOptions,
}

pub fn classify(spec: &ActionSpec, options: &ClassifyOptions) -> Result<VerdictReport> {
    let prec = options.precision_bits;
    let vn = is_virtually_nilpotent(spec, prec)?;
    let fixed_points: Vec<FixedPointData> = spec.generators.iter().map(fixed_point_data).collect();
    let mut notes = Vec::new();
    let mut berend_report = None;
    let mut witness = None;
    let (verdict, mut citations) = if vn.virtually_nilpotent {
        let tags = if spec.n == 1 {
            vec!["Thm3.5", "Thm3.5(1)=>(2)", "Thm3.2"]
        } else {
            notes.push("virtually nilpotent groups are strongly quasidiagonal by prior work".into());
            vec!["VN=>SQD"]
        };
        (Verdict::VirtuallyNilpotentSqd, tags)
    } else if spec.n == 1 {
        if options.witness {
            match non_sqd_witness(&spec.generators[0], options.witness_horizon, prec) {
                Ok(w) => {
                    if !w.passed {
                        notes.push("witness checks did not all pass within the horizon".into());
                    }
                    witness = Some(w);
                }
                Err(e) => notes.push(format!("witness construction failed: {e}")),
            }
        }
        (Verdict::NotSqd, vec!["Thm3.5", "Thm3.5(3)=>(1)", "Lem3.4"])
    } else {
        let report = berend_verdict(
            spec,
            BerendBounds {
                direct_bound: options.direct_bound,
                word_bound: options.word_bound,
                coincidence_bound: options.coincidence_bound,
                precision_bits: prec,
            },
        )?;
        let out = if report.all_conditions == ConditionStatus::Satisfied {
            (
                Verdict::BerendSqd,
                vec!["Thm2.3", "Thm2.3(1)", "Thm2.3(2)", "Thm2.3(3)", "Lem2.2"],
            )
        } else {
            notes.push(
                "acting rank >= 2 without Berend's conditions and not virtually nilpotent: undecided"
                    .into(),
            );
            (Verdict::Inconclusive, vec![])
        };
        berend_report = Some(report);
        out
    };
    if spec.generators.iter().any(|g| !g.is_identity()) {
        citations.push("Lem2.1");
    }
    Ok(VerdictReport {
        verdict,
        d: spec.d,
        n: spec.n,
        generators: spec.generators.clone(),
        vn_certificate: vn,
        fixed_points,
        berend_report,
        witness,
        citations,
        notes,
        options: *options,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torus::count_fixed_points_brute;

    fn single(rows: &[[i64; 2]; 2]) -> ActionSpec {
        ActionSpec::single(IntMatrix::from_i64(rows)).unwrap()
    }

    #[test]
    fn dichotomy() {
        let opts = ClassifyOptions::default();
        let r = classify(&single(&[[1, 1], [0, 1]]), &opts).unwrap();
        assert_eq!(r.verdict, Verdict::VirtuallyNilpotentSqd);
        let r = classify(&single(&[[2, 1], [1, 1]]), &opts).unwrap();
        assert_eq!(r.verdict, Verdict::NotSqd);
        let w = r.vn_certificate.generators[0].witness_eigenvalue.as_ref().unwrap();
        assert!(w.re.starts_with("2.618033988749894848204586834365638117720"));
    }

    #[test]
    fn fixed_points() {
        let f = fixed_point_data(&IntMatrix::identity(3));
        assert_eq!((f.count.clone(), f.fixed_subtorus_dim), (FixedPointCount::Infinite, 3));
        let f = fixed_point_data(&IntMatrix::from_i64(&[[1, 1], [0, 1]]));
        assert_eq!((f.count, f.fixed_subtorus_dim), (FixedPointCount::Infinite, 1));
        let a = IntMatrix::from_i64(&[[2, 1], [1, 1]]);
        assert_eq!(fixed_point_data(&a).count, FixedPointCount::Finite(BigInt::one()));
        for q in 1..=12 {
            assert_eq!(count_fixed_points_brute(&a, q), 1);
        }
        let a = IntMatrix::from_i64(&[[3, 2], [4, 3]]);
        assert_eq!(fixed_point_data(&a).count, FixedPointCount::Finite(BigInt::from(4)));
        assert_eq!(count_fixed_points_brute(&a, 4), 4);
    }
}
