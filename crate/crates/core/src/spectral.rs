//! Eigen-structure of hyperbolic integer matrices, carried exactly in the
//! quadratic field `Q(sqrt(D))`, `D = tr(A)^2 - 4 det(A)`.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Rejection, Result};
use crate::matrix::IntMatrix;
use crate::surd::QuadraticSurd;

/// Spectral data of an accepted 2x2 matrix `[[a, b], [c, d]]` with
/// `|lambda2| > 1 > |lambda1| > 0`.
#[derive(Clone, Debug, Serialize)]
pub struct SpectralData {
    pub matrix: IntMatrix,
    #[serde(serialize_with = "crate::bigser::one")]
    pub trace: BigInt,
    #[serde(serialize_with = "crate::bigser::one")]
    pub det: BigInt,
    #[serde(serialize_with = "crate::bigser::one")]
    pub discriminant: BigInt,
    pub lambda1: QuadraticSurd,
    pub lambda2: QuadraticSurd,
    /// Slope of the unstable eigenvector `(1, gamma)`.
    pub gamma: QuadraticSurd,
    /// Slope of the stable eigenvector `(1, beta)`.
    pub beta: QuadraticSurd,
    /// `c1^2 = (1 + beta^2)(1 + gamma^2) / (beta - gamma)^2`, exact.
    pub c1_squared: QuadraticSurd,
    pub c1: f64,
    pub log_abs_lambda1: f64,
    pub log_abs_lambda2: f64,
}

impl SpectralData {
    pub fn has_negative_eigenvalue(&self) -> bool {
        self.lambda1.signum() == Ordering::Less || self.lambda2.signum() == Ordering::Less
    }

    /// `|lambda_1^n - 1|`, exact.
    pub fn stable_factor(&self, n: u32) -> QuadraticSurd {
        (self.lambda1.pow(n) - QuadraticSurd::from_int(1)).abs()
    }

    /// `|lambda_2^n - 1|`, exact.
    pub fn unstable_factor(&self, n: u32) -> QuadraticSurd {
        (self.lambda2.pow(n) - QuadraticSurd::from_int(1)).abs()
    }

    /// `sin` of the angle between the eigendirections, `1 / c1`.
    pub fn sin_angle(&self) -> f64 {
        1.0 / self.c1
    }

    /// Unit vector along `(1, gamma)`.
    pub fn unstable_axis(&self) -> [f64; 2] {
        unit(self.gamma.to_f64())
    }

    /// Unit vector along `(1, beta)`.
    pub fn stable_axis(&self) -> [f64; 2] {
        unit(self.beta.to_f64())
    }
}

fn unit(slope: f64) -> [f64; 2] {
    let n = slope.hypot(1.0);
    [1.0 / n, slope / n]
}

/// Example 1.1 family: `diag(m, B)` with `B` unimodular, `tr B > 2` and
/// `m^2 > lambda`, where `lambda > 1` is the expanding eigenvalue of `B`.
#[derive(Clone, Debug, Serialize)]
pub struct Block3d {
    pub matrix: IntMatrix,
    #[serde(serialize_with = "crate::bigser::one")]
    pub m: BigInt,
    pub block: IntMatrix,
    pub lambda: QuadraticSurd,
    pub log_m: f64,
    pub log_lambda: f64,
}

impl Block3d {
    /// `m > lambda` selects the five-candidate dimension formula.
    pub fn m_exceeds_lambda(&self) -> bool {
        QuadraticSurd::from_int(self.m.clone()) > self.lambda
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Hyperbolic {
    Planar(SpectralData),
    Block3d(Block3d),
}

/// Accepts 2x2 hyperbolic matrices and the supported 3x3 block family.
pub fn classify(a: &IntMatrix) -> Result<Hyperbolic> {
    match a.dim() {
        2 => validate_hyperbolic(a).map(Hyperbolic::Planar),
        3 => validate_block3d(a).map(Hyperbolic::Block3d),
        d => Err(Rejection::UnsupportedDimension(d).into()),
    }
}

/// Checks `|lambda2| > 1 > |lambda1| > 0` for a 2x2 integer matrix and returns
/// its exact spectral data.
pub fn validate_hyperbolic(a: &IntMatrix) -> Result<SpectralData> {
    if a.dim() != 2 {
        return Err(Rejection::UnsupportedDimension(a.dim()).into());
    }
    let t = a.trace();
    let det = a.det();
    if det.is_zero() {
        return Err(Rejection::Singular.into());
    }
    // char poly x^2 - t x + det at x = 1 and x = -1
    if (BigInt::from(1) - &t + &det).is_zero() || (BigInt::from(1) + &t + &det).is_zero() {
        return Err(Rejection::EigenvalueOnUnitCircle.into());
    }
    let disc = &t * &t - BigInt::from(4) * &det;
    if disc.is_negative() {
        // complex pair of modulus sqrt(det)
        return Err(if det == BigInt::from(1) {
            Rejection::EigenvalueOnUnitCircle
        } else {
            Rejection::NoContractingEigenvalue
        }
        .into());
    }
    let two = BigInt::from(2);
    let plus = QuadraticSurd::new(t.clone(), 1.into(), disc.clone(), two.clone());
    let minus = QuadraticSurd::new(t.clone(), (-1).into(), disc.clone(), two);
    let (lambda2, lambda1) = if plus.abs() >= minus.abs() { (plus, minus) } else { (minus, plus) };
    let one = QuadraticSurd::from_int(1);
    match lambda1.abs().cmp(&one) {
        Ordering::Less => {}
        Ordering::Equal => return Err(Rejection::EigenvalueOnUnitCircle.into()),
        Ordering::Greater => return Err(Rejection::NoContractingEigenvalue.into()),
    }
    if lambda2.abs() <= one {
        return Err(Rejection::NoExpandingEigenvalue.into());
    }
    if lambda1.is_rational() {
        return Err(Error::Internal(format!(
            "accepted matrix {a} has rational eigenvalue {lambda1}"
        )));
    }
    let (aa, b, c) = (a.get(0, 0), a.get(0, 1), a.get(1, 0));
    if b.is_zero() || c.is_zero() {
        return Err(Error::Internal(format!(
            "accepted matrix {a} is triangular; an integer eigenvalue in (0, 1) would be required"
        )));
    }
    let a_s = QuadraticSurd::from_int(aa.clone());
    let gamma = (&lambda2 - &a_s).div_int(b);
    let beta = (&lambda1 - &a_s).div_int(b);
    let one_plus_sq = |x: &QuadraticSurd| &one + &(x * x);
    let diff = &beta - &gamma;
    let c1_squared = (&one_plus_sq(&beta) * &one_plus_sq(&gamma))
        .checked_div(&(&diff * &diff))
        .ok_or_else(|| Error::Internal("coincident eigendirections".into()))?;
    let c1 = c1_squared.to_f64().sqrt();
    let log_abs_lambda1 = lambda1.abs().to_f64().ln();
    let log_abs_lambda2 = lambda2.abs().to_f64().ln();
    Ok(SpectralData {
        matrix: a.clone(),
        trace: t,
        det,
        discriminant: disc,
        lambda1,
        lambda2,
        gamma,
        beta,
        c1_squared,
        c1,
        log_abs_lambda1,
        log_abs_lambda2,
    })
}

/// Same as [`validate_hyperbolic`]; named for call sites that already know
/// the matrix is accepted.
pub fn eigen_data(a: &IntMatrix) -> Result<SpectralData> {
    validate_hyperbolic(a)
}

pub fn validate_block3d(a: &IntMatrix) -> Result<Block3d> {
    let bad = |why: &str| Error::Rejected(Rejection::Unsupported3d(why.to_string()));
    if a.dim() != 3 {
        return Err(Rejection::UnsupportedDimension(a.dim()).into());
    }
    let off = [(0, 1), (0, 2), (1, 0), (2, 0)];
    if off.iter().any(|&(i, j)| !a.get(i, j).is_zero()) {
        return Err(bad("general 3x3 eigen-structure (cubic fields) is not handled; expected diag(m, B)"));
    }
    let m = a.get(0, 0).clone();
    if m <= BigInt::from(1) {
        return Err(bad("requires m > 1"));
    }
    let block = IntMatrix::new(
        2,
        vec![a.get(1, 1).clone(), a.get(1, 2).clone(), a.get(2, 1).clone(), a.get(2, 2).clone()],
    )?;
    if block.det() != BigInt::from(1) {
        return Err(bad("requires det B = 1"));
    }
    let t = block.trace();
    if t <= BigInt::from(2) {
        return Err(bad("requires an eigenvalue of B strictly larger than 1 (tr B > 2)"));
    }
    let disc = &t * &t - BigInt::from(4);
    let lambda = QuadraticSurd::new(t, 1.into(), disc, 2.into());
    if QuadraticSurd::from_int(&m * &m) <= lambda {
        return Err(bad("requires m > lambda^(1/2)"));
    }
    Ok(Block3d {
        matrix: a.clone(),
        log_m: m.to_f64().unwrap_or(f64::INFINITY).ln(),
        log_lambda: lambda.to_f64().ln(),
        m,
        block,
        lambda,
    })
}

/// `H_n = |det(A^n - I)|`, exact.
pub fn count_h_n(a: &IntMatrix, n: u32) -> Result<BigInt> {
    let d = a.pow(n).minus_identity().det();
    if d.is_zero() {
        return Err(Error::Singular { n });
    }
    Ok(d.abs())
}

/// `prod |lambda_j^n - 1|` evaluated in the quadratic field; agrees with
/// [`count_h_n`].
pub fn count_h_n_spectral(s: &SpectralData, n: u32) -> Result<BigInt> {
    let prod = &s.stable_factor(n) * &s.unstable_factor(n);
    if !prod.is_integer() {
        return Err(Error::Internal(format!("eigenvalue product {prod} is not an integer")));
    }
    if prod.is_zero() {
        return Err(Error::Singular { n });
    }
    Ok(prod.p().clone())
}

/// Natural log of a positive surd without overflowing double precision.
pub fn ln_surd(x: &QuadraticSurd) -> f64 {
    let f = x.to_f64();
    if f.is_finite() && f > 0.0 {
        return f.ln();
    }
    ln_bigint(&x.floor())
}

/// Natural log of a positive integer of any size.
pub fn ln_bigint(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap_or(f64::NAN).ln();
    }
    let shift = bits - 64;
    (x >> shift).to_f64().unwrap_or(f64::NAN).ln() + shift as f64 * std::f64::consts::LN_2
}

/// `(l_{1,n}, l_{2,n}) = ((1/n) log|lambda_1^n - 1|, (1/n) log|lambda_2^n - 1|)`.
pub fn growth_exponents(s: &SpectralData, n: u32) -> Result<(f64, f64)> {
    let f1 = s.stable_factor(n);
    let f2 = s.unstable_factor(n);
    if f1.is_zero() || f2.is_zero() {
        return Err(Error::Singular { n });
    }
    Ok((ln_surd(&f1) / n as f64, ln_surd(&f2) / n as f64))
}
