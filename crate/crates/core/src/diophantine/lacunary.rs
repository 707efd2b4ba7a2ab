//! Nested-interval construction of `ξ` with `||t_n ξ|| ≥ ε` for all `n ≤ N`,
//! for sequences growing geometrically.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::format_rational;
use crate::torus::dist_to_z;

/// A term known up to `slack`: `|t_true - value| ≤ slack` (scaled by
/// `ξ ≤ 1`). Integer sequences use zero slack.
#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub index: usize,
    pub value: BigRational,
    pub slack: BigRational,
}

impl Term {
    pub fn exact(index: usize, value: BigRational) -> Self {
        Term {
            index,
            value,
            slack: BigRational::zero(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Growth {
    /// `t_{n+1} ≥ ratio · t_n`.
    Lacunary { ratio: BigRational },
    /// `C⁻¹ rⁿ ≤ t_n ≤ C rⁿ`.
    Sandwich { c: f64, r: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct BuilderOptions {
    pub eps_start: BigRational,
    pub shrink: BigRational,
    pub eps_floor: BigRational,
    /// Interval nodes expanded per ε before shrinking.
    pub node_budget: u64,
    /// Children enumerated per node.
    pub max_children: usize,
}

impl Default for BuilderOptions {
    fn default() -> Self {
        BuilderOptions {
            eps_start: BigRational::new(9.into(), 20.into()),
            shrink: BigRational::new(3.into(), 4.into()),
            eps_floor: BigRational::new(1.into(), 1_000_000.into()),
            node_budget: 200_000,
            max_children: 4096,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Attempt {
    pub epsilon: String,
    pub reached_depth: usize,
    pub nodes: u64,
    pub success: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BadlyApproxCertificate {
    pub sequence_id: String,
    /// Exact `p/q`.
    pub xi: String,
    pub xi_decimal: String,
    pub epsilon: String,
    pub epsilon_decimal: f64,
    pub verified_to: usize,
    /// `min_n ||t_n ξ||` over the verified terms (computed values).
    pub min_distance: String,
    pub exact_terms: bool,
    pub nodes_explored: u64,
    pub attempts: Vec<Attempt>,
    #[serde(skip)]
    pub xi_exact: BigRational,
    #[serde(skip)]
    pub epsilon_exact: BigRational,
}

fn ceil(q: &BigRational) -> BigInt {
    q.ceil().to_integer()
}

fn floor(q: &BigRational) -> BigInt {
    q.floor().to_integer()
}

struct Node {
    depth: usize,
    lo: BigRational,
    hi: BigRational,
}

fn children(node: &Node, term: &Term, eps: &BigRational, cap: usize) -> Vec<Node> {
    let e = eps + &term.slack;
    let half = BigRational::new(1.into(), 2.into());
    if e >= half {
        return Vec::new();
    }
    let t = &term.value;
    let one = BigRational::one();
    let k_min = ceil(&(&node.lo * t - &one + &e));
    let k_max = floor(&(&node.hi * t - &e));
    let mut out = Vec::new();
    let mut k = k_min;
    while k <= k_max && out.len() < cap {
        let kq = BigRational::from_integer(k.clone());
        let a = (&kq + &e) / t;
        let b = (&kq + &one - &e) / t;
        let lo = if a > node.lo { a } else { node.lo.clone() };
        let hi = if b < node.hi { b } else { node.hi.clone() };
        if lo <= hi {
            out.push(Node {
                depth: node.depth + 1,
                lo,
                hi,
            });
        }
        k += 1;
    }
    // longest first, then leftmost
    out.sort_by(|x, y| {
        (&y.hi - &y.lo)
            .cmp(&(&x.hi - &x.lo))
            .then_with(|| x.lo.cmp(&y.lo))
    });
    out
}

/// Depth-first search at fixed ε; returns the final interval midpoint.
fn search(terms: &[Term], eps: &BigRational, options: &BuilderOptions) -> (Option<BigRational>, Attempt) {
    let mut stack = vec![Node {
        depth: 0,
        lo: BigRational::zero(),
        hi: BigRational::one(),
    }];
    let mut nodes = 0u64;
    let mut reached = 0;
    let mut found = None;
    while let Some(node) = stack.pop() {
        reached = reached.max(node.depth);
        if node.depth == terms.len() {
            found = Some((&node.lo + &node.hi) / BigRational::from_integer(2.into()));
            break;
        }
        nodes += 1;
        if nodes > options.node_budget {
            break;
        }
        let mut kids = children(&node, &terms[node.depth], eps, options.max_children);
        kids.reverse();
        stack.extend(kids);
    }
    let attempt = Attempt {
        epsilon: eps.to_string(),
        reached_depth: reached,
        nodes,
        success: found.is_some(),
    };
    (found, attempt)
}

/// Exact check of `||t ξ|| ≥ ε + slack` for every term; returns the
/// smallest `||t ξ||`.
pub fn verify_badly_approximable(terms: &[Term], xi: &BigRational, eps: &BigRational) -> Option<BigRational> {
    let mut min: Option<BigRational> = None;
    for t in terms {
        let dist = dist_to_z(&(&t.value * xi));
        if dist < eps + &t.slack {
            return None;
        }
        if min.as_ref().is_none_or(|m| &dist < m) {
            min = Some(dist);
        }
    }
    min
}

fn check_growth(terms: &[Term], growth: &Growth) -> Result<()> {
    for t in terms {
        if !t.value.is_positive() {
            return Err(Error::NonPositiveTerm { index: t.index });
        }
    }
    match growth {
        Growth::Lacunary { ratio } => {
            if ratio <= &BigRational::one() {
                return Err(Error::NotLacunary {
                    ratio: ratio.to_string(),
                    index: 0,
                });
            }
            for w in terms.windows(2) {
                if w[1].value < ratio * &w[0].value {
                    return Err(Error::NotLacunary {
                        ratio: ratio.to_string(),
                        index: w[0].index,
                    });
                }
            }
        }
        Growth::Sandwich { c, r } => {
            let (lc, lr) = (c.ln(), r.ln());
            for t in terms {
                let lt = log_rational(&t.value);
                if (lt - t.index as f64 * lr).abs() > lc + 1e-9 {
                    return Err(Error::NotLacunary {
                        ratio: format!("sandwich(C={c}, r={r})"),
                        index: t.index,
                    });
                }
            }
        }
    }
    Ok(())
}

fn log_rational(q: &BigRational) -> f64 {
    let bits = |x: &BigInt| x.bits() as i64;
    let shift_n = (bits(q.numer()) - 60).max(0);
    let shift_d = (bits(q.denom()) - 60).max(0);
    let n = (q.numer() >> shift_n as usize).to_f64().unwrap_or(f64::NAN);
    let d = (q.denom() >> shift_d as usize).to_f64().unwrap_or(f64::NAN);
    n.ln() - d.ln() + (shift_n - shift_d) as f64 * std::f64::consts::LN_2
}

/// Largest ε on the ladder `ε₀ (3/4)^j` for which the nested-interval search
/// reaches every term, with `ξ` re-verified exactly.
pub fn badly_approximable(
    terms: &[Term],
    growth: Growth,
    eps_target: Option<&BigRational>,
    sequence_id: &str,
    options: &BuilderOptions,
) -> Result<BadlyApproxCertificate> {
    check_growth(terms, &growth)?;
    let mut sorted = terms.to_vec();
    sorted.sort_by(|a, b| a.value.cmp(&b.value).then(a.index.cmp(&b.index)));
    let mut eps = eps_target.cloned().unwrap_or_else(|| options.eps_start.clone());
    let mut attempts = Vec::new();
    let mut nodes_total = 0;
    while eps >= options.eps_floor {
        let (found, attempt) = search(&sorted, &eps, options);
        nodes_total += attempt.nodes;
        attempts.push(attempt);
        if let Some(xi) = found {
            let min = verify_badly_approximable(&sorted, &xi, &eps)
                .ok_or_else(|| Error::Numerical("nested-interval point failed exact verification".into()))?;
            return Ok(BadlyApproxCertificate {
                sequence_id: sequence_id.to_string(),
                xi: xi.to_string(),
                xi_decimal: format_rational(&xi, 30),
                epsilon: eps.to_string(),
                epsilon_decimal: eps.to_f64().unwrap_or(0.0),
                verified_to: terms.len(),
                min_distance: format_rational(&min, 12),
                exact_terms: sorted.iter().all(|t| t.slack.is_zero()),
                nodes_explored: nodes_total,
                attempts,
                xi_exact: xi,
                epsilon_exact: eps,
            });
        }
        eps = &eps * &options.shrink;
    }
    Err(Error::SearchExhausted {
        floor: format_rational(&options.eps_floor, 6),
    })
}

/// Integer sequence `t_1..t_N` with `t_{n+1} ≥ r t_n`.
pub fn lacunary_badly_approximable(
    terms: &[BigInt],
    ratio: &BigRational,
    eps_target: Option<&BigRational>,
    sequence_id: &str,
) -> Result<BadlyApproxCertificate> {
    let terms: Vec<Term> = terms
        .iter()
        .enumerate()
        .map(|(i, t)| Term::exact(i + 1, BigRational::from_integer(t.clone())))
        .collect();
    badly_approximable(
        &terms,
        Growth::Lacunary { ratio: ratio.clone() },
        eps_target,
        sequence_id,
        &BuilderOptions::default(),
    )
}
