//! The dual action on `T^d`: `θ ↦ Aᵀθ mod 1`, which is the pull-back of
//! characters under `x ↦ Ax` (`⟨Ax, θ⟩ = ⟨x, Aᵀθ⟩`).

use std::collections::{BTreeSet, HashSet, VecDeque};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::matrix::IntMatrix;
use crate::numeric::{format_rational, parse_rational, parse_real_expr, to_rational, Real};
use crate::spec::ActionSpec;

/// Fractional bits in fixed-precision mode.
pub const FIXED_BITS: u32 = 128;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TorusPoint {
    /// Reduced fractions in `[0, 1)`.
    Exact(Vec<BigRational>),
    /// `x / 2^128` for each coordinate `x`.
    Fixed(Vec<u128>),
}

fn frac(q: &BigRational) -> BigRational {
    q - q.floor()
}

/// Distance from `q` to the nearest integer.
pub fn dist_to_z(q: &BigRational) -> BigRational {
    let f = frac(q);
    let g = BigRational::one() - &f;
    if f < g {
        f
    } else {
        g
    }
}

fn fixed_dist(x: u128) -> f64 {
    let d = x.min(x.wrapping_neg());
    d as f64 / 2f64.powi(FIXED_BITS as i32)
}

fn fixed_to_rational(x: u128) -> BigRational {
    BigRational::new(BigInt::from(x), BigInt::one() << FIXED_BITS)
}

fn bigint_mod_2_128(x: &BigInt) -> u128 {
    let m: BigInt = x.mod_floor(&(BigInt::one() << FIXED_BITS));
    m.to_u128().expect("reduced below 2^128")
}

impl TorusPoint {
    pub fn exact(coords: Vec<BigRational>) -> Self {
        TorusPoint::Exact(coords.iter().map(frac).collect())
    }

    /// Rounds each real coordinate mod 1 to the nearest multiple of `2^-128`.
    pub fn fixed_from_reals(coords: &[Real]) -> Self {
        TorusPoint::Fixed(
            coords
                .iter()
                .map(|x| {
                    let q = frac(&to_rational(x)) * BigRational::from_integer(BigInt::one() << FIXED_BITS);
                    bigint_mod_2_128(&q.round().to_integer())
                })
                .collect(),
        )
    }

    /// `"1/5,0"` in exact mode; real expressions such as `"sqrt(2)-1, 0"` in
    /// fixed mode.
    pub fn parse(text: &str, exact: bool) -> Result<Self> {
        let parts: Vec<&str> = text.split(',').map(str::trim).collect();
        if parts.iter().any(|p| p.is_empty()) {
            return Err(Error::InvalidPoint(format!("empty coordinate in {text:?}")));
        }
        if exact {
            let coords = parts
                .iter()
                .map(|p| parse_rational(p).map_err(|_| Error::InvalidPoint(format!("{p:?} is not rational"))))
                .collect::<Result<Vec<_>>>()?;
            Ok(TorusPoint::exact(coords))
        } else {
            let coords = parts
                .iter()
                .map(|p| parse_real_expr(p, 2 * FIXED_BITS as usize))
                .collect::<Result<Vec<_>>>()?;
            Ok(TorusPoint::fixed_from_reals(&coords))
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            TorusPoint::Exact(c) => c.len(),
            TorusPoint::Fixed(c) => c.len(),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, TorusPoint::Exact(_))
    }

    pub fn to_rationals(&self) -> Vec<BigRational> {
        match self {
            TorusPoint::Exact(c) => c.clone(),
            TorusPoint::Fixed(c) => c.iter().map(|&x| fixed_to_rational(x)).collect(),
        }
    }

    pub fn to_f64s(&self) -> Vec<f64> {
        match self {
            TorusPoint::Exact(c) => c.iter().map(|q| q.to_f64().unwrap_or(0.0)).collect(),
            TorusPoint::Fixed(c) => c
                .iter()
                .map(|&x| x as f64 / 2f64.powi(FIXED_BITS as i32))
                .collect(),
        }
    }

    /// `||θ_i||` per coordinate.
    pub fn coordinate_distances(&self) -> Vec<f64> {
        match self {
            TorusPoint::Exact(c) => c
                .iter()
                .map(|q| dist_to_z(q).to_f64().unwrap_or(0.0))
                .collect(),
            TorusPoint::Fixed(c) => c.iter().map(|&x| fixed_dist(x)).collect(),
        }
    }

    /// Max-metric distance to the origin.
    pub fn dist_to_zero(&self) -> f64 {
        self.coordinate_distances().into_iter().fold(0.0, f64::max)
    }

    /// Max-metric torus distance; points must share mode and dimension.
    pub fn distance(&self, other: &TorusPoint) -> f64 {
        match (self, other) {
            (TorusPoint::Exact(a), TorusPoint::Exact(b)) => a
                .iter()
                .zip(b)
                .map(|(x, y)| dist_to_z(&(x - y)).to_f64().unwrap_or(0.0))
                .fold(0.0, f64::max),
            (TorusPoint::Fixed(a), TorusPoint::Fixed(b)) => a
                .iter()
                .zip(b)
                .map(|(x, y)| fixed_dist(x.wrapping_sub(*y)))
                .fold(0.0, f64::max),
            _ => {
                let a = self.to_rationals();
                let b = other.to_rationals();
                a.iter()
                    .zip(&b)
                    .map(|(x, y)| dist_to_z(&(x - y)).to_f64().unwrap_or(0.0))
                    .fold(0.0, f64::max)
            }
        }
    }

    /// Least common denominator of exact coordinates.
    pub fn common_denominator(&self) -> Option<BigInt> {
        match self {
            TorusPoint::Exact(c) => Some(c.iter().fold(BigInt::one(), |l, q| l.lcm(q.denom()))),
            TorusPoint::Fixed(_) => None,
        }
    }

    pub fn coordinate_strings(&self) -> Vec<String> {
        match self {
            TorusPoint::Exact(c) => c.iter().map(|q| q.to_string()).collect(),
            TorusPoint::Fixed(c) => c
                .iter()
                .map(|&x| format_rational(&fixed_to_rational(x), 20))
                .collect(),
        }
    }
}

impl Serialize for TorusPoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            mode: &'static str,
            coords: Vec<String>,
        }
        Repr {
            mode: if self.is_exact() {
                "exact_rational"
            } else {
                "fixed_precision"
            },
            coords: self.coordinate_strings(),
        }
        .serialize(s)
    }
}

/// `Aᵀθ mod 1`, exact in both modes (fixed mode works modulo `2^128`).
pub fn dual_apply(a: &IntMatrix, theta: &TorusPoint) -> Result<TorusPoint> {
    let d = a.dim();
    if theta.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: theta.dim(),
        });
    }
    Ok(match theta {
        TorusPoint::Exact(c) => TorusPoint::Exact(
            (0..d)
                .map(|i| {
                    let s: BigRational = (0..d)
                        .map(|j| BigRational::from_integer(a.get(j, i).clone()) * &c[j])
                        .sum();
                    frac(&s)
                })
                .collect(),
        ),
        TorusPoint::Fixed(c) => TorusPoint::Fixed(FixedAction::new(a).apply(c)),
    })
}

/// Precomputed transpose entries modulo `2^128`.
#[derive(Clone, Debug)]
struct FixedAction {
    d: usize,
    at: Vec<u128>,
}

impl FixedAction {
    fn new(a: &IntMatrix) -> Self {
        let d = a.dim();
        let mut at = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                at.push(bigint_mod_2_128(a.get(j, i)));
            }
        }
        FixedAction { d, at }
    }

    fn apply(&self, x: &[u128]) -> Vec<u128> {
        (0..self.d)
            .map(|i| {
                (0..self.d).fold(0u128, |acc, j| {
                    acc.wrapping_add(self.at[i * self.d + j].wrapping_mul(x[j]))
                })
            })
            .collect()
    }
}

/// Residue-vector action on `(Z/q)^d` for exact points.
#[derive(Clone, Debug)]
struct ResidueAction {
    d: usize,
    at: Vec<BigInt>,
    q: BigInt,
}

impl ResidueAction {
    fn new(a: &IntMatrix, q: &BigInt) -> Self {
        let d = a.dim();
        let mut at = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                at.push(a.get(j, i).mod_floor(q));
            }
        }
        ResidueAction { d, at, q: q.clone() }
    }

    fn apply(&self, x: &[BigInt]) -> Vec<BigInt> {
        (0..self.d)
            .map(|i| {
                let s: BigInt = (0..self.d).map(|j| &self.at[i * self.d + j] * &x[j]).sum();
                s.mod_floor(&self.q)
            })
            .collect()
    }
}

fn residues(theta: &[BigRational], q: &BigInt) -> Vec<BigInt> {
    theta
        .iter()
        .map(|c| (c * BigRational::from_integer(q.clone())).to_integer().mod_floor(q))
        .collect()
}

fn from_residues(x: &[BigInt], q: &BigInt) -> TorusPoint {
    TorusPoint::Exact(x.iter().map(|n| BigRational::new(n.clone(), q.clone())).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Period {
    pub preperiod: u64,
    pub cycle: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrbitRecord {
    pub finite: bool,
    pub size: Option<u64>,
    /// Visited points, sorted, when the orbit is finite and exactly enumerated.
    pub points: Vec<TorusPoint>,
    /// Under the first generator.
    pub period: Option<Period>,
    pub coverage: Option<f64>,
    pub boxes_visited: Option<u64>,
    pub boxes_total: Option<u64>,
    pub iterations: Option<u64>,
    pub common_denominator: Option<String>,
}

fn exact_coords(theta: &TorusPoint) -> Result<&Vec<BigRational>> {
    match theta {
        TorusPoint::Exact(c) => Ok(c),
        TorusPoint::Fixed(_) => Err(Error::InvalidPoint(
            "rational orbits need an exact rational point".into(),
        )),
    }
}

/// Breadth-first closure of `θ` under all generators and their inverses,
/// inside `(Z/q)^d`.
pub fn rational_orbit(spec: &ActionSpec, theta: &TorusPoint, cap: usize) -> Result<OrbitRecord> {
    let coords = exact_coords(theta)?;
    if coords.len() != spec.d {
        return Err(Error::DimensionMismatch {
            expected: spec.d,
            found: coords.len(),
        });
    }
    let q = theta.common_denominator().unwrap();
    let mut actions = Vec::new();
    for g in &spec.generators {
        actions.push(ResidueAction::new(g, &q));
        actions.push(ResidueAction::new(&g.inverse()?, &q));
    }
    let start = residues(coords, &q);
    let mut seen: BTreeSet<Vec<BigInt>> = BTreeSet::new();
    seen.insert(start.clone());
    let mut queue = VecDeque::from([start.clone()]);
    while let Some(x) = queue.pop_front() {
        for act in &actions {
            let y = act.apply(&x);
            if !seen.contains(&y) {
                if seen.len() >= cap {
                    return Err(Error::OrbitCapExceeded { cap });
                }
                seen.insert(y.clone());
                queue.push_back(y);
            }
        }
    }
    // cycle of the first generator through θ; invertibility rules out a tail
    let first = &actions[0];
    let mut x = first.apply(&start);
    let mut cycle = 1u64;
    while x != start {
        x = first.apply(&x);
        cycle += 1;
    }
    Ok(OrbitRecord {
        finite: true,
        size: Some(seen.len() as u64),
        points: seen.iter().map(|x| from_residues(x, &q)).collect(),
        period: Some(Period {
            preperiod: 0,
            cycle,
        }),
        coverage: None,
        boxes_visited: None,
        boxes_total: None,
        iterations: None,
        common_denominator: Some(q.to_string()),
    })
}

enum Walker {
    Fixed {
        x: Vec<u128>,
        actions: Vec<FixedAction>,
    },
    Exact {
        x: Vec<i128>,
        actions: Vec<Vec<i128>>,
        q: i128,
        d: usize,
    },
}

impl Walker {
    fn new(spec: &ActionSpec, theta: &TorusPoint) -> Result<Self> {
        let mut mats = Vec::new();
        for g in &spec.generators {
            mats.push(g.clone());
            mats.push(g.inverse()?);
        }
        match theta {
            TorusPoint::Fixed(c) => Ok(Walker::Fixed {
                x: c.clone(),
                actions: mats.iter().map(FixedAction::new).collect(),
            }),
            TorusPoint::Exact(c) => {
                let q = theta.common_denominator().unwrap();
                let too_big = || {
                    Error::InvalidPoint(
                        "denominator too large for the exact density probe; use fixed mode".into(),
                    )
                };
                let qi = q.to_i128().filter(|&v| v < 1 << 40).ok_or_else(too_big)?;
                let d = spec.d;
                let actions = mats
                    .iter()
                    .map(|m| {
                        ResidueAction::new(m, &q)
                            .at
                            .iter()
                            .map(|v| v.to_i128().unwrap())
                            .collect()
                    })
                    .collect();
                let x = residues(c, &q).iter().map(|v| v.to_i128().unwrap()).collect();
                Ok(Walker::Exact {
                    x,
                    actions,
                    q: qi,
                    d,
                })
            }
        }
    }

    fn step(&mut self, action: usize) {
        match self {
            Walker::Fixed { x, actions } => *x = actions[action].apply(x),
            Walker::Exact { x, actions, q, d } => {
                let at = &actions[action];
                *x = (0..*d)
                    .map(|i| (0..*d).fold(0i128, |acc, j| (acc + at[i * *d + j] * x[j]) % *q))
                    .collect();
            }
        }
    }

    /// Box index with `k` bits per coordinate.
    fn box_id(&self, k: u32) -> u64 {
        let mut id = 0u64;
        match self {
            Walker::Fixed { x, .. } => {
                for &c in x {
                    id = (id << k) | (c >> (FIXED_BITS - k)) as u64;
                }
            }
            Walker::Exact { x, q, .. } => {
                for &c in x {
                    id = (id << k) | ((c << k) / *q) as u64;
                }
            }
        }
        id
    }
}

/// Coverage of `ε = 2^-eps_bits` boxes by `iters` orbit steps. Acting rank 1
/// iterates the generator forward; higher rank takes a seeded random walk
/// with steps `±e_i`.
pub fn density_diagnostic(
    spec: &ActionSpec,
    theta: &TorusPoint,
    iters: u64,
    eps_bits: u32,
    seed: u64,
) -> Result<OrbitRecord> {
    if eps_bits == 0 {
        return Err(Error::schema("eps", "box size must be 1/2^k with k >= 1"));
    }
    if theta.dim() != spec.d {
        return Err(Error::DimensionMismatch {
            expected: spec.d,
            found: theta.dim(),
        });
    }
    let total_bits = eps_bits as u64 * spec.d as u64;
    if total_bits > 40 {
        return Err(Error::schema("eps", "too many boxes (eps^-d > 2^40)"));
    }
    let boxes_total = 1u64 << total_bits;
    let mut walker = Walker::new(spec, theta)?;
    let mut bitmap = vec![false; if total_bits <= 26 { boxes_total as usize } else { 0 }];
    let mut set: HashSet<u64> = HashSet::new();
    let mut visited = 0u64;
    let mut mark = |id: u64| {
        if bitmap.is_empty() {
            if set.insert(id) {
                visited += 1;
            }
        } else if !bitmap[id as usize] {
            bitmap[id as usize] = true;
            visited += 1;
        }
    };
    mark(walker.box_id(eps_bits));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..iters {
        let action = if spec.n == 1 {
            0
        } else {
            let g = rng.random_range(0..spec.n);
            2 * g + usize::from(rng.random_bool(0.5))
        };
        walker.step(action);
        mark(walker.box_id(eps_bits));
    }
    let mut record = if theta.is_exact() {
        let mut r = rational_orbit(spec, theta, 1 << 22)?;
        r.points.clear();
        r
    } else {
        OrbitRecord {
            finite: false,
            size: None,
            points: Vec::new(),
            period: None,
            coverage: None,
            boxes_visited: None,
            boxes_total: None,
            iterations: None,
            common_denominator: None,
        }
    };
    record.coverage = Some(visited as f64 / boxes_total as f64);
    record.boxes_visited = Some(visited);
    record.boxes_total = Some(boxes_total);
    record.iterations = Some(iters);
    Ok(record)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HadwinReport {
    pub iterations: u64,
    pub delta: f64,
    /// Least `n <= N` with `dist(Aᵀⁿθ, θ) < δ`.
    pub recurrence: Option<u64>,
    pub min_return_distance: f64,
    pub min_return_at: u64,
    /// `dist(A⁻ᵀⁿθ, 0)` for `n = 1..=N`.
    pub backward_distance_to_zero: Vec<f64>,
    /// `||(Aᵀⁿθ)_i||` for `n = 1..=N`, per coordinate.
    pub forward_coordinate_distance: Vec<Vec<f64>>,
}

pub fn hadwin_recurrence_test(
    a: &IntMatrix,
    theta: &TorusPoint,
    iters: u64,
    delta: f64,
) -> Result<HadwinReport> {
    let inv = a.inverse()?;
    let mut fwd = theta.clone();
    let mut bwd = theta.clone();
    let mut recurrence = None;
    let mut min_return = f64::INFINITY;
    let mut min_at = 0;
    let mut backward = Vec::with_capacity(iters as usize);
    let mut forward = Vec::with_capacity(iters as usize);
    for n in 1..=iters {
        fwd = dual_apply(a, &fwd)?;
        bwd = dual_apply(&inv, &bwd)?;
        let r = fwd.distance(theta);
        if r < min_return {
            min_return = r;
            min_at = n;
        }
        if recurrence.is_none() && r < delta {
            recurrence = Some(n);
        }
        backward.push(bwd.dist_to_zero());
        forward.push(fwd.coordinate_distances());
    }
    Ok(HadwinReport {
        iterations: iters,
        delta,
        recurrence,
        min_return_distance: min_return,
        min_return_at: min_at,
        backward_distance_to_zero: backward,
        forward_coordinate_distance: forward,
    })
}

/// One CSV row per step of a single-generator or random-walk orbit:
/// `step,word,coord_1..coord_d`, where `word` is the exponent vector.
pub fn orbit_csv(spec: &ActionSpec, theta: &TorusPoint, steps: u64, seed: u64) -> Result<String> {
    let mut mats = Vec::new();
    for g in &spec.generators {
        mats.push(g.clone());
        mats.push(g.inverse()?);
    }
    let mut out = String::from("step,word");
    for i in 1..=spec.d {
        out.push_str(&format!(",coord_{i}"));
    }
    out.push('\n');
    let mut x = theta.clone();
    let mut word = vec![0i64; spec.n];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for step in 0..=steps {
        let w: Vec<String> = word.iter().map(i64::to_string).collect();
        out.push_str(&format!("{step},{}", w.join(" ")));
        for c in x.coordinate_strings() {
            out.push(',');
            out.push_str(&c);
        }
        out.push('\n');
        if step == steps {
            break;
        }
        let (g, inverse) = if spec.n == 1 {
            (0, false)
        } else {
            (rng.random_range(0..spec.n), rng.random_bool(0.5))
        };
        word[g] += if inverse { -1 } else { 1 };
        x = dual_apply(&mats[2 * g + usize::from(inverse)], &x)?;
    }
    Ok(out)
}

/// Number of exact rational points with denominator dividing `q` fixed by
/// the dual action of `a`, by exhaustive scan of `(Z/q)^d`.
pub fn count_fixed_points_brute(a: &IntMatrix, q: u64) -> u64 {
    let d = a.dim();
    let qb = BigInt::from(q);
    let act = ResidueAction::new(a, &qb);
    let mut x = vec![BigInt::zero(); d];
    let mut count = 0;
    loop {
        if act.apply(&x) == x {
            count += 1;
        }
        let mut pos = 0;
        loop {
            if pos == d {
                return count;
            }
            x[pos] += 1;
            if x[pos] < qb {
                break;
            }
            x[pos] = BigInt::zero();
            pos += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(q))
    }

    #[test]
    fn dual_apply_examples() {
        let t = TorusPoint::exact(vec![r(1, 3), r(1, 2)]);
        assert_eq!(dual_apply(&IntMatrix::identity(2), &t).unwrap(), t);
        assert_eq!(
            dual_apply(&IntMatrix::from_i64(&[[1, 1], [0, 1]]), &t).unwrap(),
            TorusPoint::exact(vec![r(1, 3), r(5, 6)])
        );
        let t = TorusPoint::exact(vec![r(1, 5), r(2, 5)]);
        assert_eq!(
            dual_apply(&IntMatrix::from_i64(&[[2, 1], [1, 1]]), &t).unwrap(),
            TorusPoint::exact(vec![r(4, 5), r(3, 5)])
        );
    }

    #[test]
    fn fixed_mode_matches_exact_on_dyadics() {
        let a = IntMatrix::from_i64(&[[2, 1], [1, 1]]);
        let e = TorusPoint::exact(vec![r(3, 8), r(5, 16)]);
        let f = TorusPoint::Fixed(vec![3u128 << 125, 5u128 << 124]);
        let e2 = dual_apply(&a, &dual_apply(&a, &e).unwrap()).unwrap();
        let f2 = dual_apply(&a, &dual_apply(&a, &f).unwrap()).unwrap();
        assert_eq!(f2.to_rationals(), e2.to_rationals());
    }

    #[test]
    fn origin_orbit() {
        let spec = ActionSpec::single(IntMatrix::from_i64(&[[2, 1], [1, 1]])).unwrap();
        let o = rational_orbit(&spec, &TorusPoint::exact(vec![r(0, 1), r(0, 1)]), 10).unwrap();
        assert_eq!(o.size, Some(1));
    }

    #[test]
    fn golden_orbit_mod_five() {
        let spec = ActionSpec::single(IntMatrix::from_i64(&[[2, 1], [1, 1]])).unwrap();
        let o = rational_orbit(&spec, &TorusPoint::exact(vec![r(1, 5), r(0, 1)]), 100).unwrap();
        assert!(o.finite);
        assert_eq!(o.size, Some(o.period.unwrap().cycle));
        assert!(rational_orbit(&spec, &TorusPoint::exact(vec![r(1, 5), r(0, 1)]), 2).is_err());
    }

    #[test]
    fn parse_points() {
        let p = TorusPoint::parse("1/5, 0", true).unwrap();
        assert_eq!(p, TorusPoint::exact(vec![r(1, 5), r(0, 1)]));
        let f = TorusPoint::parse("sqrt(2)-1, 0.5", false).unwrap();
        let v = f.to_f64s();
        assert!((v[0] - (2f64.sqrt() - 1.0)).abs() < 1e-15);
        assert_eq!(v[1], 0.5);
        assert!(TorusPoint::parse("1/0", true).is_err());
    }

    #[test]
    fn recurrence_for_identity() {
        let t = TorusPoint::exact(vec![r(1, 7), r(2, 7)]);
        let h = hadwin_recurrence_test(&IntMatrix::identity(2), &t, 5, 1e-3).unwrap();
        assert_eq!(h.recurrence, Some(1));
    }

    #[test]
    fn brute_fixed_points() {
        // det(Aᵀ - I) = -1 for the golden square: only the origin
        assert_eq!(count_fixed_points_brute(&IntMatrix::from_i64(&[[2, 1], [1, 1]]), 7), 1);
        assert_eq!(count_fixed_points_brute(&IntMatrix::identity(2), 3), 9);
    }
}
