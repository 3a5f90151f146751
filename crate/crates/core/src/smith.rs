//! Smith normal form over the integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::matrix::IntMatrix;

/// `U * M * V = D` with `U`, `V` unimodular and `D` diagonal, nonnegative,
/// `d_1 | d_2 | ...`.
#[derive(Clone, Debug, Serialize)]
pub struct SmithForm {
    pub u: IntMatrix,
    pub v: IntMatrix,
    pub d: IntMatrix,
}

impl SmithForm {
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.dim()).map(|i| self.d.get(i, i).clone()).collect()
    }
}

type Rows = Vec<Vec<BigInt>>;

fn to_rows(m: &IntMatrix) -> Rows {
    let d = m.dim();
    (0..d).map(|i| (0..d).map(|j| m.get(i, j).clone()).collect()).collect()
}

fn from_rows(r: Rows) -> IntMatrix {
    let d = r.len();
    IntMatrix::new(d, r.into_iter().flatten().collect()).expect("square")
}

fn identity_rows(d: usize) -> Rows {
    (0..d)
        .map(|i| (0..d).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

/// Deterministic Smith normal form: pivots are chosen as the entry of least
/// absolute value in the trailing block, first in row-major order.
pub fn smith_normal_form(m: &IntMatrix) -> SmithForm {
    let n = m.dim();
    let mut a = to_rows(m);
    let mut u = identity_rows(n);
    let mut v = identity_rows(n);

    for t in 0..n {
        loop {
            // pivot: smallest nonzero |a[i][j]| with i, j >= t
            let mut best: Option<(usize, usize)> = None;
            for i in t..n {
                for j in t..n {
                    if a[i][j].is_zero() {
                        continue;
                    }
                    match best {
                        Some((bi, bj)) if a[i][j].abs() >= a[bi][bj].abs() => {}
                        _ => best = Some((i, j)),
                    }
                }
            }
            let Some((pi, pj)) = best else { break };
            a.swap(t, pi);
            u.swap(t, pi);
            for row in a.iter_mut() {
                row.swap(t, pj);
            }
            for row in v.iter_mut() {
                row.swap(t, pj);
            }

            let mut clean = true;
            // clear column t below the pivot
            for i in t + 1..n {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = a[i][t].div_floor(&a[t][t]);
                for j in 0..n {
                    let at = a[t][j].clone();
                    a[i][j] -= &q * at;
                    let ut = u[t][j].clone();
                    u[i][j] -= &q * ut;
                }
                if !a[i][t].is_zero() {
                    clean = false;
                }
            }
            // clear row t right of the pivot
            for j in t + 1..n {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = a[t][j].div_floor(&a[t][t]);
                for i in 0..n {
                    let at = a[i][t].clone();
                    a[i][j] -= &q * at;
                    let vt = v[i][t].clone();
                    v[i][j] -= &q * vt;
                }
                if !a[t][j].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // divisibility: fold any offending row into row t and retry
            let p = a[t][t].clone();
            let offending = (t + 1..n).find(|&i| (t + 1..n).any(|j| !a[i][j].is_multiple_of(&p)));
            match offending {
                Some(i) => {
                    for j in 0..n {
                        let ai = a[i][j].clone();
                        a[t][j] += ai;
                        let ui = u[i][j].clone();
                        u[t][j] += ui;
                    }
                }
                None => break,
            }
        }
        if a[t][t].is_negative() {
            for j in 0..n {
                a[t][j] = -&a[t][j];
                u[t][j] = -&u[t][j];
            }
        }
    }

    SmithForm { u: from_rows(u), v: from_rows(v), d: from_rows(a) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn diag(m: &IntMatrix) -> Vec<i64> {
        smith_normal_form(m)
            .diagonal()
            .iter()
            .map(|x| i64::try_from(x).unwrap())
            .collect()
    }

    fn check(m: &IntMatrix) {
        let s = smith_normal_form(m);
        assert_eq!(s.u.mul(m).mul(&s.v), s.d, "U M V != D for {m}");
        assert_eq!(s.u.det().abs(), BigInt::one());
        assert_eq!(s.v.det().abs(), BigInt::one());
        let dg = s.diagonal();
        for i in 0..m.dim() {
            for j in 0..m.dim() {
                if i != j {
                    assert!(s.d.get(i, j).is_zero());
                }
            }
            assert!(!dg[i].is_negative());
        }
        for w in dg.windows(2) {
            if !w[0].is_zero() {
                assert!(w[1].is_multiple_of(&w[0]), "{:?}", dg);
            } else {
                assert!(w[1].is_zero());
            }
        }
    }

    #[test]
    fn worked_examples() {
        assert_eq!(diag(&IntMatrix::from_rows([[4, 3], [3, 1]])), vec![1, 5]);
        assert_eq!(diag(&IntMatrix::identity(2)), vec![1, 1]);
        assert_eq!(diag(&IntMatrix::from_rows([[2, 0], [0, 2]])), vec![2, 2]);
        assert_eq!(diag(&IntMatrix::from_rows([[12, 8], [8, 4]])), vec![4, 4]);
        assert_eq!(diag(&IntMatrix::from_rows([[2, 0, 0], [0, 3, 0], [0, 0, 4]])), vec![1, 2, 12]);
        check(&IntMatrix::from_rows([[0, 0], [0, 0]]));
        check(&IntMatrix::from_rows([[0, 6], [4, 0]]));
    }

    #[test]
    fn deterministic() {
        let m = IntMatrix::from_rows([[33, 21], [21, 12]]);
        let a = smith_normal_form(&m);
        let b = smith_normal_form(&m);
        assert_eq!(a.u, b.u);
        assert_eq!(a.v, b.v);
    }

    proptest! {
        #[test]
        fn random_2x2(e in prop::array::uniform4(-60i64..60)) {
            check(&IntMatrix::from_rows([[e[0], e[1]], [e[2], e[3]]]));
        }

        #[test]
        fn random_3x3(e in prop::array::uniform9(-25i64..25)) {
            check(&IntMatrix::from_rows([[e[0], e[1], e[2]], [e[3], e[4], e[5]], [e[6], e[7], e[8]]]));
        }
    }
}
