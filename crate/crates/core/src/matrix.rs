//! Square integer matrices with arbitrary-precision entries.
//!
//! Literal syntax is `"a,b;c,d"` (rows separated by `;`) or a JSON array of
//! arrays such as `[[2,1],[1,1]]`. Both parse to the same value.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct IntMatrix {
    dim: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(dim: usize, entries: Vec<BigInt>) -> Result<Self> {
        if !(2..=3).contains(&dim) {
            return Err(Error::Parse(format!("dimension {dim} not supported (2 or 3)")));
        }
        if entries.len() != dim * dim {
            return Err(Error::Parse(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                entries.len()
            )));
        }
        Ok(IntMatrix { dim, entries })
    }

    /// Builds a matrix from small integer rows. Panics on ragged input.
    pub fn from_rows<const D: usize>(rows: [[i64; D]; D]) -> Self {
        let entries = rows.iter().flat_map(|r| r.iter().map(|&x| BigInt::from(x))).collect();
        IntMatrix::new(D, entries).expect("from_rows: dimension must be 2 or 3")
    }

    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![BigInt::zero(); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = BigInt::one();
        }
        IntMatrix { dim, entries }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.dim + j]
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.entries
    }

    pub fn trace(&self) -> BigInt {
        (0..self.dim).map(|i| self.get(i, i).clone()).sum()
    }

    pub fn det(&self) -> BigInt {
        let g = |i, j| self.get(i, j);
        match self.dim {
            2 => g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0),
            3 => {
                g(0, 0) * (g(1, 1) * g(2, 2) - g(1, 2) * g(2, 1))
                    - g(0, 1) * (g(1, 0) * g(2, 2) - g(1, 2) * g(2, 0))
                    + g(0, 2) * (g(1, 0) * g(2, 1) - g(1, 1) * g(2, 0))
            }
            _ => unreachable!("dimension checked at construction"),
        }
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let d = self.dim;
        let mut entries = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                let mut acc = BigInt::zero();
                for k in 0..d {
                    acc += self.get(i, k) * other.get(k, j);
                }
                entries.push(acc);
            }
        }
        IntMatrix { dim: d, entries }
    }

    /// `A^n` by binary exponentiation; `n = 0` yields the identity.
    pub fn pow(&self, n: u32) -> IntMatrix {
        let mut result = IntMatrix::identity(self.dim);
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// `self - I`.
    pub fn minus_identity(&self) -> IntMatrix {
        let mut m = self.clone();
        for i in 0..self.dim {
            m.entries[i * self.dim + i] -= 1;
        }
        m
    }

    /// Matrix-vector product over the integers.
    pub fn apply(&self, v: &[BigInt]) -> Vec<BigInt> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j) * &v[j]).sum())
            .collect()
    }

    /// Entries reduced into `Z / 2^128`, row-major. Wrapping `u128` arithmetic on
    /// these reproduces the integer product modulo `2^128` exactly.
    pub fn to_wrapping_u128(&self) -> Vec<u128> {
        let modulus = BigInt::one() << 128;
        self.entries
            .iter()
            .map(|e| {
                let r: BigInt = ((e % &modulus) + &modulus) % &modulus;
                r.to_u128().expect("reduced below 2^128")
            })
            .collect()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.to_f64().unwrap_or(f64::NAN)).collect()
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.dim).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> BigInt {
        self.entries.iter().map(|e| e.abs()).max().unwrap_or_default()
    }

    fn parse_literal(s: &str) -> Result<Vec<Vec<BigInt>>> {
        s.split(';')
            .map(|row| {
                row.split(',')
                    .map(|x| {
                        x.trim()
                            .parse::<BigInt>()
                            .map_err(|e| Error::Parse(format!("bad entry {:?}: {e}", x.trim())))
                    })
                    .collect()
            })
            .collect()
    }

    fn parse_json(s: &str) -> Result<Vec<Vec<BigInt>>> {
        let value: serde_json::Value =
            serde_json::from_str(s).map_err(|e| Error::Parse(format!("bad JSON matrix: {e}")))?;
        let rows = value
            .as_array()
            .ok_or_else(|| Error::Parse("JSON matrix must be an array of arrays".into()))?;
        rows.iter()
            .map(|row| {
                row.as_array()
                    .ok_or_else(|| Error::Parse("JSON matrix row must be an array".into()))?
                    .iter()
                    .map(|x| match x {
                        serde_json::Value::Number(n) if n.is_i64() || n.is_u64() => {
                            Ok(n.to_string().parse::<BigInt>().expect("integer JSON number"))
                        }
                        serde_json::Value::String(s) => s
                            .trim()
                            .parse::<BigInt>()
                            .map_err(|e| Error::Parse(format!("bad entry {s:?}: {e}"))),
                        other => Err(Error::Parse(format!("non-integer entry {other}"))),
                    })
                    .collect()
            })
            .collect()
    }
}

impl FromStr for IntMatrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let rows = if s.starts_with('[') {
            IntMatrix::parse_json(s)?
        } else {
            IntMatrix::parse_literal(s)?
        };
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::Parse(format!("matrix {s:?} is not square")));
        }
        IntMatrix::new(dim, rows.into_iter().flatten().collect())
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.dim {
            if i > 0 {
                f.write_str(";")?;
            }
            for j in 0..self.dim {
                if j > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
        }
        Ok(())
    }
}

impl Serialize for IntMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for IntMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cat() -> IntMatrix {
        IntMatrix::from_rows([[2, 1], [1, 1]])
    }

    #[test]
    fn powers_by_hand() {
        assert_eq!(cat().pow(2), IntMatrix::from_rows([[5, 3], [3, 2]]));
        assert_eq!(cat().pow(3), IntMatrix::from_rows([[13, 8], [8, 5]]));
        assert_eq!(cat().pow(1), cat());
        assert_eq!(cat().pow(0), IntMatrix::identity(2));
    }

    #[test]
    fn literal_and_json_agree() {
        let a: IntMatrix = "2,1;1,1".parse().unwrap();
        let b: IntMatrix = "[[2,1],[1,1]]".parse().unwrap();
        let c: IntMatrix = " [[\"2\", 1], [1, \"1\"]] ".parse().unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
        assert_eq!(a.to_string(), "2,1;1,1");
    }

    #[test]
    fn rejects_ragged_and_garbage() {
        assert!("1,2;3".parse::<IntMatrix>().is_err());
        assert!("1,x;3,4".parse::<IntMatrix>().is_err());
        assert!("[[1.5,0],[0,1]]".parse::<IntMatrix>().is_err());
        assert!("5".parse::<IntMatrix>().is_err());
    }

    #[test]
    fn det_and_trace() {
        let m = IntMatrix::from_rows([[3, 0, 0], [0, 2, 1], [0, 1, 1]]);
        assert_eq!(m.det(), BigInt::from(3));
        assert_eq!(m.trace(), BigInt::from(6));
        assert_eq!(cat().pow(2).minus_identity().det(), BigInt::from(-5));
    }

    #[test]
    fn wrapping_reduction_matches_big_product() {
        let a = cat().pow(120);
        let w = a.to_wrapping_u128();
        let x = [BigInt::from(123_456_789u64), BigInt::from(987_654_321u64)];
        let exact = a.apply(&x);
        let modulus = BigInt::one() << 128;
        for i in 0..2 {
            let got = w[i * 2]
                .wrapping_mul(123_456_789)
                .wrapping_add(w[i * 2 + 1].wrapping_mul(987_654_321));
            let want = ((&exact[i] % &modulus) + &modulus) % &modulus;
            assert_eq!(BigInt::from(got), want);
        }
    }
}
