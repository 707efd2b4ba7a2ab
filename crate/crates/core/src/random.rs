//! Seeded generators for test batteries: unimodular and unipotent matrices,
//! lacunary sequences and polynomial families.

use num_bigint::BigInt;
use num_integer::Integer;
use rand::Rng;

use crate::diophantine::RealPoly;
use crate::error::Result;
use crate::matrix::IntMatrix;
use crate::numeric::parse_real_expr;

/// Product of elementary row operations `r_i += c r_j` with `|c| ≤ 3`,
/// with an occasional row negation.
pub fn random_unimodular<R: Rng>(rng: &mut R, d: usize) -> IntMatrix {
    let mut m = IntMatrix::identity(d);
    if d == 1 {
        return if rng.random_bool(0.5) { m.scale(&BigInt::from(-1)) } else { m };
    }
    for _ in 0..2 * d + 4 {
        let i = rng.random_range(0..d);
        let mut j = rng.random_range(0..d - 1);
        if j >= i {
            j += 1;
        }
        let c = loop {
            let c: i64 = rng.random_range(-3..=3);
            if c != 0 {
                break BigInt::from(c);
            }
        };
        for k in 0..d {
            let v = m.get(i, k) + &c * m.get(j, k);
            m.set(i, k, v);
        }
    }
    if rng.random_bool(0.25) {
        let i = rng.random_range(0..d);
        for k in 0..d {
            let v = -m.get(i, k);
            m.set(i, k, v);
        }
    }
    m
}

/// Upper unitriangular with entries above the diagonal in `[-3, 3]`.
pub fn random_unipotent_upper<R: Rng>(rng: &mut R, d: usize) -> IntMatrix {
    let mut m = IntMatrix::identity(d);
    for i in 0..d {
        for j in i + 1..d {
            m.set(i, j, BigInt::from(rng.random_range(-3i64..=3)));
        }
    }
    m
}

/// `t_1 ∈ [1, 10]`, `t_{n+1} = ⌈3 t_n / 2⌉ + ⌊t_n u / 1000⌋` with `u ∈ [0, 1000]`.
pub fn random_lacunary<R: Rng>(rng: &mut R, len: usize) -> Vec<BigInt> {
    let mut out = Vec::with_capacity(len);
    let mut t = BigInt::from(rng.random_range(1u32..=10));
    for _ in 0..len {
        out.push(t.clone());
        let u = BigInt::from(rng.random_range(0u32..=1000));
        let grown: BigInt = &t * 3u32;
        t = Integer::div_ceil(&grown, &BigInt::from(2)) + (&t * u) / 1000u32;
    }
    out
}

/// `R ≤ 3` polynomials of degree `≤ 3` without constant term; each
/// coefficient is `s·sqrt(m)/k` with `m` not a square. Returns the
/// coefficient expressions too.
pub fn random_cook_family<R: Rng>(rng: &mut R, prec: usize) -> Result<(Vec<RealPoly>, Vec<Vec<String>>)> {
    let r = rng.random_range(1..=3);
    let mut polys = Vec::with_capacity(r);
    let mut exprs = Vec::with_capacity(r);
    for _ in 0..r {
        let deg = rng.random_range(1..=3);
        let mut e = vec!["0".to_string()];
        for _ in 0..deg {
            let m = loop {
                let m: u32 = rng.random_range(2..=50);
                if m.isqrt() * m.isqrt() != m {
                    break m;
                }
            };
            let s: i32 = loop {
                let s = rng.random_range(-5..=5);
                if s != 0 {
                    break s;
                }
            };
            let k: u32 = rng.random_range(1..=7);
            e.push(format!("{s}*sqrt({m})/{k}"));
        }
        polys.push(RealPoly::new(
            e.iter().map(|x| parse_real_expr(x, prec)).collect::<Result<Vec<_>>>()?,
        ));
        exprs.push(e);
    }
    Ok((polys, exprs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generators_have_the_promised_shape() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for d in 1..=4 {
            assert!(random_unimodular(&mut rng, d).is_unimodular());
            let u = random_unipotent_upper(&mut rng, d);
            assert!(crate::diophantine::is_upper_unitriangular(&u));
        }
        let t = random_lacunary(&mut rng, 50);
        for w in t.windows(2) {
            assert!(&w[1] * 2 >= &w[0] * 3);
        }
        let (p, e) = random_cook_family(&mut rng, 128).unwrap();
        assert_eq!(p.len(), e.len());
    }
}
