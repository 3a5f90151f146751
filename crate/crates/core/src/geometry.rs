//! Geometry of `R_n = { x : |T^n x - x| < e^{-n tau} }`.
//!
//! Each component of `R_n` is the ellipse `(A^n - I)^{-1} B(0, e^{-n tau})`
//! translated to a periodic point. It contains the parallelogram `E` with
//! vertices `c + (+-lambda_{n,2} u +- lambda_{n,1} v) / 2` and sits inside the
//! parallelogram `E~` with vertices `c + c1 (+-lambda_{n,2} u +- lambda_{n,1} v)`,
//! where `u = (1, gamma)/|.|` and `v = (1, beta)/|.|` are the unit
//! eigendirections.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::IntMatrix;
use crate::periodic::RationalPoint;
use crate::spectral::{growth_exponents, ln_surd, SpectralData};

/// Guard band on the strict inequality `|T^n x - x| < e^{-n tau}`.
pub const DEFAULT_GUARD: f64 = 1e-12;

/// Euclidean norm of `x - y` after reducing each coordinate into `[-1/2, 1/2)`.
pub fn torus_distance(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| {
            let d = a - b;
            let r = d - (d + 0.5).floor();
            r * r
        })
        .sum::<f64>()
        .sqrt()
}

/// Smallest `n >= 1` with `e^{-tau n} < 1/2`; from there on the components
/// of `R_n` are pairwise disjoint ellipses.
pub fn min_disjoint_n(tau: f64) -> u32 {
    assert!(tau > 0.0, "tau must be positive");
    let mut n = ((std::f64::consts::LN_2 / tau).floor() as u32).saturating_add(1).max(1);
    while (-tau * n as f64).exp() >= 0.5 {
        n += 1;
    }
    while n > 1 && (-tau * (n - 1) as f64).exp() < 0.5 {
        n -= 1;
    }
    n
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Membership {
    Inside,
    Outside,
    /// Within the guard band of the boundary.
    Uncertain,
}

impl Membership {
    pub fn is_inside(self) -> bool {
        self == Membership::Inside
    }
}

/// Membership test for `R_n` with `A^n` held exactly modulo `2^128`.
///
/// A query point `x` is read as the exact dyadic rational its doubles encode
/// (quantized to `2^-128` when smaller than about `2^-75`), so `A^n x - x mod 1`
/// is computed without rounding; only the final norm is in floating point.
#[derive(Clone, Debug)]
pub struct RecurrenceTest {
    dim: usize,
    n: u32,
    radius: f64,
    guard: f64,
    wrapped: Vec<u128>,
}

const TWO_M128: f64 = 2.938_735_877_055_718_8e-39; // 2^-128

fn to_fixed_128(x: f64) -> u128 {
    let x = x - x.floor();
    if x == 0.0 {
        return 0;
    }
    let bits = x.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i32;
    let frac = (bits & ((1u64 << 52) - 1)) as u128;
    let (mant, e) = if exp == 0 { (frac, -1074) } else { (frac | (1u128 << 52), exp - 1075) };
    let shift = e + 128;
    if shift >= 0 {
        mant << shift
    } else if shift > -128 {
        mant >> (-shift)
    } else {
        0
    }
}

impl RecurrenceTest {
    pub fn new(a: &IntMatrix, tau: f64, n: u32) -> Self {
        RecurrenceTest::with_guard(a, tau, n, DEFAULT_GUARD)
    }

    pub fn with_guard(a: &IntMatrix, tau: f64, n: u32, guard: f64) -> Self {
        RecurrenceTest {
            dim: a.dim(),
            n,
            radius: (-tau * n as f64).exp(),
            guard,
            wrapped: a.pow(n).to_wrapping_u128(),
        }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Torus distance between `T^n x` and `x`.
    pub fn displacement(&self, x: &[f64]) -> f64 {
        let d = self.dim;
        let mut fixed = [0u128; 3];
        for (f, &xi) in fixed.iter_mut().zip(x) {
            *f = to_fixed_128(xi);
        }
        let mut sum = 0.0;
        for i in 0..d {
            let mut y = 0u128;
            for j in 0..d {
                y = y.wrapping_add(self.wrapped[i * d + j].wrapping_mul(fixed[j]));
            }
            // two's complement reading puts the difference in [-1/2, 1/2)
            let diff = y.wrapping_sub(fixed[i]) as i128;
            let r = diff as f64 * TWO_M128;
            sum += r * r;
        }
        sum.sqrt()
    }

    pub fn classify(&self, x: &[f64]) -> Membership {
        let dist = self.displacement(x);
        if (dist - self.radius).abs() <= self.guard {
            Membership::Uncertain
        } else if dist < self.radius {
            Membership::Inside
        } else {
            Membership::Outside
        }
    }
}

/// One-off membership query; see [`RecurrenceTest`] for batches.
pub fn contains(a: &IntMatrix, tau: f64, n: u32, x: &[f64]) -> Membership {
    RecurrenceTest::new(a, tau, n).classify(x)
}

/// Shape data shared by every component of `R_n`.
#[derive(Clone, Debug, Serialize)]
pub struct ComponentShape {
    pub n: u32,
    pub tau: f64,
    pub radius: f64,
    /// `lambda_{n,1} = e^{-tau n} / |1 - lambda_1^n|`, along the stable axis.
    pub semi_axis_major: f64,
    /// `lambda_{n,2} = e^{-tau n} / |lambda_2^n - 1|`, along the unstable axis.
    pub semi_axis_minor: f64,
    pub axis_unstable: [f64; 2],
    pub axis_stable: [f64; 2],
    pub c1: f64,
    /// Signs of `lambda_2^n - 1` and `lambda_1^n - 1`.
    signs: [f64; 2],
}

/// A component `R_{n,i}` with its inscribed and circumscribed parallelograms.
#[derive(Clone, Debug, Serialize)]
pub struct RecurrenceComponent {
    pub center: Vec<String>,
    pub center_f64: [f64; 2],
    #[serde(flatten)]
    pub shape: ComponentShape,
    pub inscribed: [[f64; 2]; 4],
    pub circumscribed: [[f64; 2]; 4],
}

impl ComponentShape {
    pub fn new(s: &SpectralData, tau: f64, n: u32) -> Result<Self> {
        if s.has_negative_eigenvalue() && n % 2 == 1 {
            return Err(Error::OddPowerWithNegativeEigenvalue { n });
        }
        if n < min_disjoint_n(tau) {
            return Err(Error::Domain(format!(
                "n = {n} is below the disjointness threshold {} for tau = {tau}",
                min_disjoint_n(tau)
            )));
        }
        let f1 = s.stable_factor(n);
        let f2 = s.unstable_factor(n);
        let ln_r = -tau * n as f64;
        let sign = |x: &crate::surd::QuadraticSurd| {
            if x.signum() == std::cmp::Ordering::Less {
                -1.0
            } else {
                1.0
            }
        };
        let one = crate::surd::QuadraticSurd::from_int(1);
        Ok(ComponentShape {
            n,
            tau,
            radius: ln_r.exp(),
            semi_axis_major: (ln_r - ln_surd(&f1)).exp(),
            semi_axis_minor: (ln_r - ln_surd(&f2)).exp(),
            axis_unstable: s.unstable_axis(),
            axis_stable: s.stable_axis(),
            c1: s.c1,
            signs: [sign(&(s.lambda2.pow(n) - &one)), sign(&(s.lambda1.pow(n) - &one))],
        })
    }

    /// Coordinates of a displacement `w` in the `(u, v)` eigenbasis.
    pub fn eigen_coords(&self, w: [f64; 2]) -> (f64, f64) {
        let [u0, u1] = self.axis_unstable;
        let [v0, v1] = self.axis_stable;
        let det = u0 * v1 - u1 * v0;
        ((w[0] * v1 - w[1] * v0) / det, (u0 * w[1] - u1 * w[0]) / det)
    }

    /// Displacement coordinates scaled so that `E~` is `[-c1, c1]^2` and `E`
    /// is `[-1/2, 1/2]^2`.
    pub fn normalized(&self, w: [f64; 2]) -> (f64, f64) {
        let (a, b) = self.eigen_coords(w);
        (a / self.semi_axis_minor, b / self.semi_axis_major)
    }

    /// `|(A^n - I) w| / e^{-n tau}` for a displacement `w`; below one inside
    /// the ellipse.
    pub fn ellipse_value(&self, w: [f64; 2]) -> f64 {
        let (xi, eta) = self.normalized(w);
        let cos = self.axis_unstable[0] * self.axis_stable[0]
            + self.axis_unstable[1] * self.axis_stable[1];
        let s = self.signs[0] * self.signs[1];
        (xi * xi + eta * eta + 2.0 * s * xi * eta * cos).max(0.0).sqrt()
    }

    fn vertices(&self, scale: f64, center: [f64; 2]) -> [[f64; 2]; 4] {
        let a = scale * self.semi_axis_minor;
        let b = scale * self.semi_axis_major;
        let (u, v) = (self.axis_unstable, self.axis_stable);
        let corner = |su: f64, sv: f64| {
            [
                center[0] + su * a * u[0] + sv * b * v[0],
                center[1] + su * a * u[1] + sv * b * v[1],
            ]
        };
        [corner(1.0, 1.0), corner(-1.0, 1.0), corner(-1.0, -1.0), corner(1.0, -1.0)]
    }

    pub fn inscribed_vertices(&self, center: [f64; 2]) -> [[f64; 2]; 4] {
        self.vertices(0.5, center)
    }

    pub fn circumscribed_vertices(&self, center: [f64; 2]) -> [[f64; 2]; 4] {
        self.vertices(self.c1, center)
    }

    /// Area of one inscribed parallelogram, `sin(theta) e^{-2 n tau} / H_n`.
    pub fn inscribed_area(&self) -> f64 {
        let sin = 1.0 / self.c1;
        sin * self.semi_axis_major * self.semi_axis_minor
    }
}

pub fn component_geometry(
    s: &SpectralData,
    tau: f64,
    n: u32,
    center: &RationalPoint,
) -> Result<RecurrenceComponent> {
    let shape = ComponentShape::new(s, tau, n)?;
    let c = center.to_f64();
    let c = [c[0], c[1]];
    Ok(RecurrenceComponent {
        center: center.strings(),
        center_f64: c,
        inscribed: shape.inscribed_vertices(c),
        circumscribed: shape.circumscribed_vertices(c),
        shape,
    })
}

/// Whether a point lies in a convex quadrilateral given counter- or
/// clockwise, with a relative tolerance.
pub fn in_parallelogram(vertices: &[[f64; 2]; 4], p: [f64; 2], tol: f64) -> bool {
    // parallelogram centred at the vertex mean with half-edge vectors
    let c = [
        (vertices[0][0] + vertices[2][0]) / 2.0,
        (vertices[0][1] + vertices[2][1]) / 2.0,
    ];
    let e1 = [(vertices[0][0] - vertices[1][0]) / 2.0, (vertices[0][1] - vertices[1][1]) / 2.0];
    let e2 = [(vertices[0][0] - vertices[3][0]) / 2.0, (vertices[0][1] - vertices[3][1]) / 2.0];
    let det = e1[0] * e2[1] - e1[1] * e2[0];
    let w = [p[0] - c[0], p[1] - c[1]];
    let s = (w[0] * e2[1] - w[1] * e2[0]) / det;
    let t = (e1[0] * w[1] - e1[1] * w[0]) / det;
    s.abs() <= 1.0 + tol && t.abs() <= 1.0 + tol
}

/// Whether the circumscribed parallelograms around all points of `P_n` are
/// pairwise disjoint on the torus.
///
/// In the image space of `A^n - I` every `E~` becomes the same parallelogram
/// `P = c1 r {s u + t v : |s|, |t| <= 1}` around an integer point, so the
/// family is disjoint exactly when no nonzero integer vector lies in the
/// interior of `2P`.
pub fn circumscribed_disjoint(shape: &ComponentShape) -> bool {
    let h = 2.0 * shape.c1 * shape.radius;
    let bound = (2.0 * h).ceil() as i64 + 1;
    let (u, v) = (shape.axis_unstable, shape.axis_stable);
    let det = u[0] * v[1] - u[1] * v[0];
    for k0 in -bound..=bound {
        for k1 in -bound..=bound {
            if k0 == 0 && k1 == 0 {
                continue;
            }
            let (k0, k1) = (k0 as f64, k1 as f64);
            let s = (k0 * v[1] - k1 * v[0]) / det;
            let t = (u[0] * k1 - u[1] * k0) / det;
            if s.abs() < h && t.abs() < h {
                return false;
            }
        }
    }
    true
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Regime {
    /// `tau > log|lambda_2| / 2`
    Case1,
    /// `tau < log|lambda_2| / 2`
    Case2,
    /// `tau = log|lambda_2| / 2`; handled by continuity from Case 1.
    Case3,
}

/// Tolerance on `tau = log|lambda_2| / 2` when selecting Case 3.
pub const REGIME_TIE_TOL: f64 = 1e-12;

pub fn regime(log_lambda2: f64, tau: f64) -> Regime {
    let half = 0.5 * log_lambda2;
    if (tau - half).abs() <= REGIME_TIE_TOL * half.max(1.0) {
        Regime::Case3
    } else if tau > half {
        Regime::Case1
    } else {
        Regime::Case2
    }
}

/// Sizes of the pairwise disjoint cells containing the components of `R_n`,
/// measured along each eigendirection.
#[derive(Clone, Debug, Serialize)]
pub struct SeparationProfile {
    pub n: u32,
    pub tau: f64,
    pub regime: Regime,
    pub direction_unstable: [f64; 2],
    pub direction_stable: [f64; 2],
    pub gap_unstable: f64,
    pub gap_stable: f64,
    /// Separation constant used for the cells.
    pub c2: f64,
}

/// Cases 1 and 3 use cells with side lengths `2 |lambda_2^n - 1|^{-1/2}`
/// (unstable) and `4 c2^{-1} |lambda_2^n - 1|^{-1/2} / |1 - lambda_1^n|`
/// (stable). Case 2 uses `(2/3) / |1 - lambda_1^n|` (stable) and
/// `2 c3 e^{n (tau - l_{2,n})}` with `c3 = c1 c2 / 2` (unstable).
pub fn separation_profile(s: &SpectralData, tau: f64, n: u32, c2: f64) -> Result<SeparationProfile> {
    let (l1, l2) = growth_exponents(s, n)?;
    let nf = n as f64;
    let reg = regime(s.log_abs_lambda2, tau);
    let (gap_unstable, gap_stable) = match reg {
        Regime::Case1 | Regime::Case3 => {
            let root = (-0.5 * nf * l2).exp();
            (2.0 * root, 4.0 / c2 * root * (-nf * l1).exp())
        }
        Regime::Case2 => {
            let c3 = 0.5 * s.c1 * c2;
            (2.0 * c3 * (nf * (tau - l2)).exp(), 2.0 / 3.0 * (-nf * l1).exp())
        }
    };
    Ok(SeparationProfile {
        n,
        tau,
        regime: reg,
        direction_unstable: s.unstable_axis(),
        direction_stable: s.stable_axis(),
        gap_unstable,
        gap_stable,
        c2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::periodic::{enumerate_periodic, DEFAULT_CAP};
    use crate::spectral::validate_hyperbolic;

    fn cat() -> IntMatrix {
        IntMatrix::from_rows([[2, 1], [1, 1]])
    }

    #[test]
    fn torus_distance_examples() {
        assert!((torus_distance(&[0.9, 0.0], &[0.1, 0.0]) - 0.2).abs() < 1e-15);
        assert_eq!(torus_distance(&[0.3, 0.7], &[0.3, 0.7]), 0.0);
        let d = torus_distance(&[0.75, 0.75], &[0.25, 0.25]);
        assert!((d - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn disjointness_threshold() {
        assert_eq!(min_disjoint_n(std::f64::consts::LN_2), 2);
        assert_eq!(min_disjoint_n(1.0), 1);
        assert_eq!(min_disjoint_n(0.1), 7);
        for tau in [0.05, 0.3, 0.69, 0.7, 2.0, 10.0] {
            let n = min_disjoint_n(tau);
            assert!((-tau * n as f64).exp() < 0.5);
            assert!(n == 1 || (-tau * (n - 1) as f64).exp() >= 0.5);
        }
    }

    #[test]
    fn membership_examples() {
        assert_eq!(contains(&cat(), 1.0, 5, &[0.0, 0.0]), Membership::Inside);
        assert_eq!(contains(&cat(), 3.0, 2, &[0.2, 0.4]), Membership::Inside);
        assert_eq!(contains(&cat(), 1.0, 1, &[0.5, 0.5]), Membership::Outside);
        let t = RecurrenceTest::new(&cat(), 1.0, 1);
        assert!((t.displacement(&[0.5, 0.5]) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn membership_at_high_power_matches_exact_rational_orbit() {
        // x = (1/3, 1/7) is not dyadic, but the test reads the double exactly;
        // compare with a big-integer evaluation of the same dyadic point.
        use num_bigint::BigInt;
        use num_integer::Integer;
        let x = [1.0 / 3.0, 1.0 / 7.0];
        let n = 60;
        let t = RecurrenceTest::new(&cat(), 0.1, n);
        let scale = BigInt::from(1) << 1100;
        let to_big = |v: f64| {
            let (m, e, _) = num_traits::float::FloatCore::integer_decode(v);
            BigInt::from(m) << (1100 + e as i32) as usize
        };
        let xb: Vec<BigInt> = x.iter().map(|&v| to_big(v)).collect();
        let y = cat().pow(n).apply(&xb);
        let mut sum = 0.0;
        for i in 0..2 {
            let mut d = (&y[i] - &xb[i]).mod_floor(&scale);
            if d >= &scale / 2 {
                d -= &scale;
            }
            let r = num_traits::ToPrimitive::to_f64(&(d >> 1000usize)).unwrap() / 2f64.powi(100);
            sum += r * r;
        }
        assert!((t.displacement(&x) - sum.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn component_example_values() {
        let s = validate_hyperbolic(&cat()).unwrap();
        let p = enumerate_periodic(&cat(), 3, DEFAULT_CAP).unwrap();
        let c = component_geometry(&s, 1.0, 3, &p.rational_point(0)).unwrap();
        let lam2 = s.lambda2.to_f64();
        let want = (-3.0f64).exp() / (lam2.powi(3) - 1.0);
        assert!((c.shape.semi_axis_minor - want).abs() < 1e-15);
        assert!((c.shape.semi_axis_minor - 2.938e-3).abs() < 1e-6);
        let dot = c.shape.axis_unstable[0] * c.shape.axis_stable[0]
            + c.shape.axis_unstable[1] * c.shape.axis_stable[1];
        assert!(dot.abs() < 1e-15);
        let area = |v: &[[f64; 2]; 4]| {
            let e1 = [v[0][0] - v[1][0], v[0][1] - v[1][1]];
            let e2 = [v[0][0] - v[3][0], v[0][1] - v[3][1]];
            (e1[0] * e2[1] - e1[1] * e2[0]).abs()
        };
        let ratio = area(&c.inscribed) / area(&c.circumscribed);
        assert!((ratio - 1.0 / (4.0 * s.c1 * s.c1)).abs() < 1e-12);
    }

    #[test]
    fn odd_power_with_negative_eigenvalue() {
        let s = validate_hyperbolic(&IntMatrix::from_rows([[2, 1], [1, 0]])).unwrap();
        assert!(matches!(
            ComponentShape::new(&s, 1.0, 3),
            Err(Error::OddPowerWithNegativeEigenvalue { n: 3 })
        ));
        assert!(ComponentShape::new(&s, 1.0, 4).is_ok());
    }

    #[test]
    fn regimes() {
        let s = validate_hyperbolic(&cat()).unwrap();
        let l = s.log_abs_lambda2;
        assert_eq!(regime(l, l), Regime::Case1);
        assert_eq!(regime(l, 0.3), Regime::Case2);
        assert_eq!(regime(l, 0.5 * l), Regime::Case3);
        let p = separation_profile(&s, l, 8, 0.05).unwrap();
        assert!(p.gap_unstable > 0.0 && p.gap_stable > 0.0);
        let want = 2.0 / (s.lambda2.to_f64().powi(8) - 1.0).sqrt();
        assert!((p.gap_unstable - want).abs() < 1e-12);
        let p = separation_profile(&s, 0.3, 8, 0.05).unwrap();
        assert_eq!(p.regime, Regime::Case2);
        assert!(p.gap_unstable > 0.0 && p.gap_stable > 0.6);
    }
}
