//! Smith normal form over Z with unimodular transforms.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::matrix::IntMatrix;

type Rows = Vec<Vec<BigInt>>;

/// `U * M * V = D` with `U`, `V` unimodular and `D` diagonal,
/// nonnegative, `d1 | d2 | ...`, zeros last.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SmithDecomposition {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

impl SmithDecomposition {
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        (0..self.d.dim()).map(|i| self.d.get(i, i).clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors()
            .iter()
            .filter(|x| !x.is_zero())
            .count()
    }
}

pub fn smith_normal_form(m: &IntMatrix) -> SmithDecomposition {
    let rect = smith_rect(m.rows(), m.dim());
    SmithDecomposition {
        u: IntMatrix::new(rect.u).unwrap(),
        d: IntMatrix::new(rect.d).unwrap(),
        v: IntMatrix::new(rect.v).unwrap(),
    }
}

/// Rectangular variant used internally (lattice bases are d x m).
pub(crate) struct RectSmith {
    pub u: Rows,
    pub d: Rows,
    pub v: Rows,
}

fn identity_rows(n: usize) -> Rows {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect()
}

pub(crate) fn smith_rect(mut a: Rows, cols: usize) -> RectSmith {
    let rows = a.len();
    let mut u = identity_rows(rows);
    let mut v = identity_rows(cols);

    // row_i -= q * row_t, mirrored on U
    fn row_axpy(a: &mut Rows, i: usize, t: usize, q: &BigInt) {
        let (src, dst) = if i < t {
            let (lo, hi) = a.split_at_mut(t);
            (&hi[0], &mut lo[i])
        } else {
            let (lo, hi) = a.split_at_mut(i);
            (&lo[t], &mut hi[0])
        };
        for (x, y) in dst.iter_mut().zip(src.iter()) {
            *x -= q * y;
        }
    }
    fn col_axpy(a: &mut Rows, j: usize, t: usize, q: &BigInt) {
        for row in a.iter_mut() {
            let s = row[t].clone();
            row[j] -= q * s;
        }
    }
    fn swap_cols(a: &mut Rows, i: usize, j: usize) {
        for row in a.iter_mut() {
            row.swap(i, j);
        }
    }

    let steps = rows.min(cols);
    for t in 0..steps {
        loop {
            // smallest nonzero |entry| in the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if a[i][j].is_zero() {
                        continue;
                    }
                    if best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return finish(a, u, v);
            };
            a.swap(t, pi);
            u.swap(t, pi);
            swap_cols(&mut a, t, pj);
            swap_cols(&mut v, t, pj);

            let mut dirty = false;
            for i in t + 1..rows {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = a[i][t].div_floor(&a[t][t]);
                row_axpy(&mut a, i, t, &q);
                row_axpy(&mut u, i, t, &q);
                dirty |= !a[i][t].is_zero();
            }
            for j in t + 1..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = a[t][j].div_floor(&a[t][t]);
                col_axpy(&mut a, j, t, &q);
                col_axpy(&mut v, j, t, &q);
                dirty |= !a[t][j].is_zero();
            }
            if dirty {
                continue;
            }
            // divisibility: fold an offending row into row t and retry
            let offending = (t + 1..rows).find(|&i| {
                (t + 1..cols).any(|j| !a[i][j].is_multiple_of(&a[t][t]))
            });
            match offending {
                Some(i) => {
                    let neg_one = -BigInt::one();
                    row_axpy(&mut a, t, i, &neg_one);
                    row_axpy(&mut u, t, i, &neg_one);
                }
                None => break,
            }
        }
        if a[t][t].is_negative() {
            for x in a[t].iter_mut() {
                *x = -x.clone();
            }
            for x in u[t].iter_mut() {
                *x = -x.clone();
            }
        }
    }
    finish(a, u, v)
}

fn finish(a: Rows, u: Rows, v: Rows) -> RectSmith {
    RectSmith { u, d: a, v }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(m: &IntMatrix) -> Vec<i64> {
        smith_normal_form(m)
            .invariant_factors()
            .iter()
            .map(|x| x.try_into().unwrap())
            .collect()
    }

    #[test]
    fn examples() {
        let s = smith_normal_form(&IntMatrix::identity(3));
        assert_eq!(s.d, IntMatrix::identity(3));
        assert_eq!(diag(&IntMatrix::from_i64(&[[2, 0], [0, 3]])), vec![1, 6]);
        assert_eq!(diag(&IntMatrix::from_i64(&[[0, 1], [0, 0]])), vec![1, 0]);
        assert_eq!(diag(&IntMatrix::zero(2)), vec![0, 0]);
    }

    #[test]
    fn reconstruction() {
        let m = IntMatrix::from_i64(&[[2, 4, 4], [-6, 6, 12], [10, -4, -16]]);
        let s = smith_normal_form(&m);
        assert_eq!(&(&s.u * &m) * &s.v, s.d);
        assert_eq!(diag(&m), vec![2, 6, 12]);
        assert!(s.u.determinant().abs().is_one());
        assert!(s.v.determinant().abs().is_one());
    }

    #[test]
    fn rectangular() {
        let a = vec![
            vec![BigInt::from(1)],
            vec![BigInt::from(2)],
            vec![BigInt::from(3)],
        ];
        let r = smith_rect(a.clone(), 1);
        assert_eq!(r.d[0][0], BigInt::one());
        assert!(r.d[1][0].is_zero() && r.d[2][0].is_zero());
        // U * a * V
        let ua: Vec<BigInt> = r
            .u
            .iter()
            .map(|row| row.iter().zip(&a).map(|(x, y)| x * &y[0]).sum::<BigInt>() * &r.v[0][0])
            .collect();
        assert_eq!(ua, vec![BigInt::one(), BigInt::zero(), BigInt::zero()]);
    }
}
