//! The n-periodic lattice `P_n = (A^n - I)^{-1} Z^d mod 1`.
//!
//! Points are listed exactly as integer numerators over one common
//! denominator. Enumeration walks the Smith box `prod [0, d_i)` and maps back
//! through `V`, so every point appears once and no floating-point
//! deduplication is involved.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::torus_distance;
use crate::matrix::IntMatrix;
use crate::smith::{smith_normal_form, SmithForm};
use crate::spectral::{count_h_n, Block3d};
use crate::surd::QuadraticSurd;

/// Listing cap used when callers do not supply one.
pub const DEFAULT_CAP: u64 = 10_000_000;

/// Scan bound of the brute-force oracle.
pub const ORACLE_BOUND: u64 = 10_000;

/// Group structure of `P_n` without a listing.
#[derive(Clone, Debug, Serialize)]
pub struct PeriodicStructure {
    pub n: u32,
    /// Smith invariants `d_1 | d_2 (| d_3)` of `A^n - I`.
    #[serde(serialize_with = "crate::bigser::many")]
    pub invariants: Vec<BigInt>,
    #[serde(serialize_with = "crate::bigser::one")]
    pub count: BigInt,
}

pub fn periodic_structure(a: &IntMatrix, n: u32) -> Result<PeriodicStructure> {
    let m = a.pow(n).minus_identity();
    let snf = smith_normal_form(&m);
    let invariants = snf.diagonal();
    if invariants.iter().any(|d| d.is_zero()) {
        return Err(Error::Singular { n });
    }
    let count = invariants.iter().product();
    Ok(PeriodicStructure { n, invariants, count })
}

/// A point of the torus with rational coordinates `numerators[i] / denominator`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RationalPoint {
    pub numerators: Vec<u64>,
    pub denominator: u64,
}

impl RationalPoint {
    pub fn to_f64(&self) -> Vec<f64> {
        let q = self.denominator as f64;
        self.numerators.iter().map(|&p| p as f64 / q).collect()
    }

    /// Coordinates as reduced `"p/q"` strings.
    pub fn strings(&self) -> Vec<String> {
        self.numerators
            .iter()
            .map(|&p| {
                let g = p.gcd(&self.denominator).max(1);
                format!("{}/{}", p / g, self.denominator / g)
            })
            .collect()
    }
}

/// Exact listing of `P_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodicPointSet {
    pub n: u32,
    pub dim: usize,
    pub invariants: Vec<BigInt>,
    /// Common denominator of all listed coordinates.
    pub denominator: u64,
    numerators: Vec<u32>,
    pub count: BigInt,
}

impl PeriodicPointSet {
    pub fn len(&self) -> usize {
        self.numerators.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.numerators.is_empty()
    }

    pub fn point(&self, i: usize) -> &[u32] {
        &self.numerators[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[u32]> + '_ {
        self.numerators.chunks_exact(self.dim)
    }

    pub fn point_f64(&self, i: usize) -> Vec<f64> {
        let q = self.denominator as f64;
        self.point(i).iter().map(|&p| p as f64 / q).collect()
    }

    pub fn points_f64(&self) -> Vec<Vec<f64>> {
        (0..self.len()).map(|i| self.point_f64(i)).collect()
    }

    pub fn rational_point(&self, i: usize) -> RationalPoint {
        RationalPoint {
            numerators: self.point(i).iter().map(|&p| p as u64).collect(),
            denominator: self.denominator,
        }
    }

    /// Coordinates of point `i` as reduced `"p/q"` strings.
    pub fn point_strings(&self, i: usize) -> Vec<String> {
        self.rational_point(i).strings()
    }

    /// Set equality as rationals, independent of the chosen denominators.
    pub fn same_points(&self, other: &PeriodicPointSet) -> bool {
        if self.dim != other.dim || self.len() != other.len() {
            return false;
        }
        let l = self.denominator.lcm(&other.denominator);
        let scaled = |s: &PeriodicPointSet| {
            let f = (l / s.denominator) as u128;
            let mut v: Vec<Vec<u128>> =
                s.points().map(|p| p.iter().map(|&x| x as u128 * f).collect()).collect();
            v.sort_unstable();
            v
        };
        scaled(self) == scaled(other)
    }

    /// Checks `(A^n - I) x in Z^d` exactly for every listed point.
    pub fn verify(&self, a: &IntMatrix) -> bool {
        let m = a.pow(self.n).minus_identity();
        let q = BigInt::from(self.denominator);
        self.points().all(|p| {
            let v: Vec<BigInt> = p.iter().map(|&x| BigInt::from(x)).collect();
            m.apply(&v).iter().all(|y| y.is_multiple_of(&q))
        })
    }

    /// `x -> -x mod 1` maps the set onto itself.
    pub fn is_symmetric(&self) -> bool {
        let q = self.denominator as u32;
        let mut neg: Vec<Vec<u32>> = self
            .points()
            .map(|p| p.iter().map(|&x| if x == 0 { 0 } else { q - x }).collect())
            .collect();
        neg.sort_unstable();
        let orig: Vec<Vec<u32>> = self.points().map(|p| p.to_vec()).collect();
        neg == orig
    }

    /// Number of points within torus distance `radius` of `center`.
    pub fn count_in_ball(&self, center: &[f64], radius: f64) -> u64 {
        let q = self.denominator as f64;
        let d = self.dim;
        self.numerators
            .par_chunks_exact(d)
            .filter(|p| {
                let x: Vec<f64> = p.iter().map(|&v| v as f64 / q).collect();
                torus_distance(&x, center) <= radius
            })
            .count() as u64
    }
}

fn sort_points(dim: usize, numerators: &mut Vec<u32>) {
    let mut rows: Vec<&[u32]> = numerators.chunks_exact(dim).collect();
    rows.sort_unstable();
    *numerators = rows.concat();
}

/// Lists `P_n` when `H_n <= cap`; otherwise fails with `CapExceeded`
/// carrying the count.
pub fn enumerate_periodic(a: &IntMatrix, n: u32, cap: u64) -> Result<PeriodicPointSet> {
    let m = a.pow(n).minus_identity();
    let snf: SmithForm = smith_normal_form(&m);
    let inv = snf.diagonal();
    if inv.iter().any(|d| d.is_zero()) {
        return Err(Error::Singular { n });
    }
    let count: BigInt = inv.iter().product();
    let cap = cap.min(u32::MAX as u64);
    if count > BigInt::from(cap) {
        return Err(Error::CapExceeded { count, cap });
    }
    let dim = a.dim();
    let q = inv.last().expect("dim >= 2").to_u64().expect("below cap");
    let inv_u: Vec<u64> = inv.iter().map(|d| d.to_u64().expect("below cap")).collect();
    let qb = BigInt::from(q);
    let v: Vec<u128> = snf
        .v
        .entries()
        .iter()
        .map(|e| e.mod_floor(&qb).to_u128().expect("reduced"))
        .collect();
    // y_j = k_j / d_j = k_j (q / d_j) / q
    let step: Vec<u128> = inv_u.iter().map(|&d| (q / d) as u128).collect();
    let total = count.to_usize().expect("below cap");
    let mut numerators = Vec::with_capacity(total * dim);
    let mut k = vec![0u64; dim];
    let q128 = q as u128;
    for _ in 0..total {
        for i in 0..dim {
            let mut acc = 0u128;
            for j in 0..dim {
                acc = (acc + v[i * dim + j] * ((k[j] as u128 * step[j]) % q128)) % q128;
            }
            numerators.push(acc as u32);
        }
        // odometer over the Smith box
        for j in (0..dim).rev() {
            k[j] += 1;
            if k[j] < inv_u[j] {
                break;
            }
            k[j] = 0;
        }
    }
    sort_points(dim, &mut numerators);
    Ok(PeriodicPointSet { n, dim, invariants: inv, denominator: q, numerators, count })
}

/// Independent oracle: scans every `(i_1, ..., i_d) / q`, `q = |det(A^n - I)|`,
/// and keeps those with `(A^n - I) x in Z^d`.
pub fn brute_force_periodic(a: &IntMatrix, n: u32) -> Result<PeriodicPointSet> {
    let m = a.pow(n).minus_identity();
    let det = m.det().abs();
    if det.is_zero() {
        return Err(Error::Singular { n });
    }
    if det > BigInt::from(ORACLE_BOUND) {
        return Err(Error::OracleTooLarge { count: det, bound: ORACLE_BOUND });
    }
    let q = det.to_i64().expect("below bound");
    let dim = a.dim();
    let me: Vec<i64> = m.entries().iter().map(|e| e.mod_floor(&det).to_i64().unwrap()).collect();
    let mut numerators = Vec::new();
    let total = (q as u64).pow(dim as u32);
    let mut x = vec![0i64; dim];
    for _ in 0..total {
        let ok = (0..dim).all(|i| (0..dim).map(|j| me[i * dim + j] * x[j]).sum::<i64>() % q == 0);
        if ok {
            numerators.extend(x.iter().map(|&v| v as u32));
        }
        for j in (0..dim).rev() {
            x[j] += 1;
            if x[j] < q {
                break;
            }
            x[j] = 0;
        }
    }
    let found = numerators.len() / dim;
    let invariants = smith_normal_form(&m).diagonal();
    Ok(PeriodicPointSet {
        n,
        dim,
        invariants,
        denominator: q as u64,
        numerators,
        count: BigInt::from(found),
    })
}

/// Convenience: `count_in_ball` after enumerating with the default cap.
pub fn count_in_ball(a: &IntMatrix, n: u32, center: &[f64], radius: f64) -> Result<u64> {
    Ok(enumerate_periodic(a, n, DEFAULT_CAP)?.count_in_ball(center, radius))
}

/// The explicit 3D grid `(i_1/(m^n - 1), i_2/S_n, i_3/S_n)` used for the
/// block family, compared against the true periodic lattice.
#[derive(Clone, Debug, Serialize)]
pub struct Grid3dReport {
    pub n: u32,
    #[serde(serialize_with = "crate::bigser::one")]
    pub m_n_minus_1: BigInt,
    #[serde(serialize_with = "crate::bigser::one")]
    pub s_n: BigInt,
    /// `(m^n - 1) * S_n^2`
    #[serde(serialize_with = "crate::bigser::one")]
    pub grid_count: BigInt,
    /// `|det(A^n - I)|`
    #[serde(serialize_with = "crate::bigser::one")]
    pub det_count: BigInt,
    /// Every grid point is `n`-periodic.
    pub grid_within_periodic: bool,
    /// Every `n`-periodic point lies on the grid.
    pub periodic_within_grid: bool,
    pub notes: Vec<String>,
}

/// `S_n`: `sum_{j=-k}^{k} lambda^j` for `n = 2k+1`, and
/// `sqrt(tr^2 - 4) (lambda^k - lambda^{-k})` for `n = 2k`.
pub fn s_n(block: &Block3d, n: u32) -> Result<BigInt> {
    let lam = &block.lambda;
    let inv = lam.conj(); // det B = 1
    let k = n / 2;
    let val = if n % 2 == 1 {
        let mut acc = QuadraticSurd::from_int(1);
        for j in 1..=k {
            acc = acc + lam.pow(j) + inv.pow(j);
        }
        acc
    } else {
        let t = block.block.trace();
        let root = QuadraticSurd::sqrt(&t * &t - 4);
        &root * &(lam.pow(k) - inv.pow(k))
    };
    if !val.is_integer() {
        return Err(Error::Internal(format!("S_{n} = {val} is not an integer")));
    }
    Ok(val.p().clone())
}

pub fn grid_3d(block: &Block3d, n: u32) -> Result<Grid3dReport> {
    let mn1 = block.m.pow(n) - BigInt::one();
    let sn = s_n(block, n)?;
    let det_count = count_h_n(&block.matrix, n)?;
    let grid_count = &mn1 * &sn * &sn;
    // block part of A^n - I
    let bm = block.block.pow(n).minus_identity();
    let bdet = bm.det();
    // grid within P_n  <=>  (B^n - I) / S_n integral
    let grid_within = bm.entries().iter().all(|e| e.is_multiple_of(&sn));
    // P_n within grid  <=>  S_n (B^n - I)^{-1} integral  <=>  S_n adj / det integral
    let adj = [bm.get(1, 1).clone(), -bm.get(0, 1), -bm.get(1, 0), bm.get(0, 0).clone()];
    let periodic_within = adj.iter().all(|e| (e * &sn).is_multiple_of(&bdet));
    let mut notes = vec![format!(
        "S_n grows like lambda^(n/2); a stated asymptotic S_n ~ lambda^(-n/2) is read as a sign typo"
    )];
    if grid_count != det_count {
        notes.push(format!(
            "grid count {grid_count} differs from |det(A^n - I)| = {det_count}"
        ));
    }
    Ok(Grid3dReport {
        n,
        m_n_minus_1: mn1,
        s_n: sn,
        grid_count,
        det_count,
        grid_within_periodic: grid_within,
        periodic_within_grid: periodic_within,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::validate_block3d;

    fn cat() -> IntMatrix {
        IntMatrix::from_rows([[2, 1], [1, 1]])
    }

    #[test]
    fn cat_fixed_and_period_two() {
        let p1 = enumerate_periodic(&cat(), 1, DEFAULT_CAP).unwrap();
        assert_eq!(p1.len(), 1);
        assert_eq!(p1.point(0), &[0, 0]);

        let p2 = enumerate_periodic(&cat(), 2, DEFAULT_CAP).unwrap();
        assert_eq!(p2.len(), 5);
        assert_eq!(p2.denominator, 5);
        assert!(p2.points().any(|p| p == [1, 2]));
        assert!(p2.verify(&cat()));
        assert_eq!(p2.point_strings(0), vec!["0/1", "0/1"]);
    }

    #[test]
    fn cap_semantics() {
        match enumerate_periodic(&cat(), 2, 3) {
            Err(Error::CapExceeded { count, cap }) => {
                assert_eq!(count, BigInt::from(5));
                assert_eq!(cap, 3);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn brute_force_agrees() {
        for n in 1..=5 {
            let e = enumerate_periodic(&cat(), n, DEFAULT_CAP).unwrap();
            let b = brute_force_periodic(&cat(), n).unwrap();
            assert!(e.same_points(&b), "n = {n}");
        }
        assert_eq!(brute_force_periodic(&cat(), 4).unwrap().len(), 45);
        assert!(matches!(brute_force_periodic(&cat(), 12), Err(Error::OracleTooLarge { .. })));
    }

    #[test]
    fn ball_counts_edge_cases() {
        let p = enumerate_periodic(&cat(), 6, DEFAULT_CAP).unwrap();
        assert_eq!(p.count_in_ball(&[0.3, 0.6], 0.75), 320);
        assert_eq!(p.count_in_ball(&[0.0, 0.0], 1e-9), 1);
    }

    #[test]
    fn singular_power() {
        // eigenvalues -1 +- ... : [[0,1],[-1,-1]] has order 3
        let a = IntMatrix::from_rows([[0, 1], [-1, -1]]);
        assert!(matches!(enumerate_periodic(&a, 3, DEFAULT_CAP), Err(Error::Singular { n: 3 })));
    }

    #[test]
    fn s_n_values_and_grid() {
        let b = validate_block3d(&IntMatrix::from_rows([[3, 0, 0], [0, 2, 1], [0, 1, 1]])).unwrap();
        let want = [1, 5, 4, 15, 11];
        for (n, &s) in (1..).zip(want.iter()) {
            assert_eq!(s_n(&b, n).unwrap(), BigInt::from(s), "S_{n}");
        }
        for n in [1, 3, 5, 7] {
            let g = grid_3d(&b, n).unwrap();
            assert!(g.grid_within_periodic && g.periodic_within_grid, "odd n = {n}");
            assert_eq!(g.grid_count, g.det_count);
        }
        for n in [2, 4, 6] {
            let g = grid_3d(&b, n).unwrap();
            assert!(g.periodic_within_grid, "even n = {n}");
            assert!(g.grid_count >= g.det_count);
        }
    }
}
