//! Exact arithmetic in a real quadratic field.
//!
//! A [`QuadraticSurd`] is `(p + q*sqrt(r)) / den` with integer `p`, `q`, a
//! non-negative integer radicand `r`, and `den > 0`. Values are kept in lowest
//! terms. Binary operations require both operands to share the radicand
//! (rationals adapt to the other operand).

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct QuadraticSurd {
    p: BigInt,
    q: BigInt,
    r: BigInt,
    den: BigInt,
}

impl QuadraticSurd {
    /// `(p + q*sqrt(r)) / den`. Panics if `den == 0` or `r < 0`.
    pub fn new(p: BigInt, q: BigInt, r: BigInt, den: BigInt) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        assert!(!r.is_negative(), "negative radicand");
        let mut s = QuadraticSurd { p, q, r, den };
        s.normalize();
        s
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        QuadraticSurd::new(n.into(), BigInt::zero(), BigInt::zero(), BigInt::one())
    }

    pub fn rational(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Self {
        QuadraticSurd::new(num.into(), BigInt::zero(), BigInt::zero(), den.into())
    }

    /// `sqrt(r)` itself.
    pub fn sqrt(r: impl Into<BigInt>) -> Self {
        QuadraticSurd::new(BigInt::zero(), BigInt::one(), r.into(), BigInt::one())
    }

    fn normalize(&mut self) {
        if self.den.is_negative() {
            self.p = -&self.p;
            self.q = -&self.q;
            self.den = -&self.den;
        }
        if !self.q.is_zero() {
            let s = self.r.sqrt();
            if &s * &s == self.r {
                self.p += &self.q * s;
                self.q = BigInt::zero();
            }
        }
        if self.q.is_zero() {
            self.r = BigInt::zero();
        }
        let g = self.p.gcd(&self.q).gcd(&self.den);
        if !g.is_one() && !g.is_zero() {
            self.p /= &g;
            self.q /= &g;
            self.den /= &g;
        }
    }

    pub fn p(&self) -> &BigInt {
        &self.p
    }
    pub fn q(&self) -> &BigInt {
        &self.q
    }
    pub fn radicand(&self) -> &BigInt {
        &self.r
    }
    pub fn den(&self) -> &BigInt {
        &self.den
    }

    pub fn is_rational(&self) -> bool {
        self.q.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.p.is_zero() && self.q.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.q.is_zero() && self.den.is_one()
    }

    fn common_radicand(&self, other: &Self) -> BigInt {
        match (self.q.is_zero(), other.q.is_zero()) {
            (true, _) => other.r.clone(),
            (_, true) => self.r.clone(),
            _ => {
                assert_eq!(self.r, other.r, "surds from different quadratic fields");
                self.r.clone()
            }
        }
    }

    /// Galois conjugate `(p - q*sqrt(r)) / den`.
    pub fn conj(&self) -> Self {
        QuadraticSurd {
            p: self.p.clone(),
            q: -&self.q,
            r: self.r.clone(),
            den: self.den.clone(),
        }
    }

    /// Field norm `x * conj(x)` as a reduced fraction `(num, den)`, `den > 0`.
    pub fn norm(&self) -> (BigInt, BigInt) {
        let num = &self.p * &self.p - &self.q * &self.q * &self.r;
        let den = &self.den * &self.den;
        let g = num.gcd(&den);
        if g.is_zero() {
            (num, den)
        } else {
            (num / &g, den / g)
        }
    }

    pub fn recip(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        // 1/x = den * conj(p + q sqrt r) / (p^2 - q^2 r)
        let n = &self.p * &self.p - &self.q * &self.q * &self.r;
        Some(QuadraticSurd::new(
            &self.p * &self.den,
            -&self.q * &self.den,
            self.r.clone(),
            n,
        ))
    }

    pub fn checked_div(&self, other: &Self) -> Option<Self> {
        other.recip().map(|inv| self * &inv)
    }

    pub fn div_int(&self, k: &BigInt) -> Self {
        QuadraticSurd::new(self.p.clone(), self.q.clone(), self.r.clone(), &self.den * k)
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut result = QuadraticSurd::from_int(1);
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Exact sign.
    pub fn signum(&self) -> Ordering {
        sign_of(&self.p, &self.q, &self.r)
    }

    pub fn abs(&self) -> Self {
        if self.signum() == Ordering::Less {
            -self
        } else {
            self.clone()
        }
    }

    /// `floor(x * 2^k)` computed exactly.
    pub fn floor_scaled(&self, k: u32) -> BigInt {
        let a = &self.p << k;
        // floor(q * sqrt(r) * 2^k)
        let t = &self.q * &self.q * &self.r << (2 * k);
        let s = t.sqrt();
        let fs = if !self.q.is_negative() {
            s
        } else if &s * &s == t {
            -s
        } else {
            -s - 1
        };
        (a + fs).div_floor(&self.den)
    }

    pub fn floor(&self) -> BigInt {
        self.floor_scaled(0)
    }

    /// Nearest integer, ties rounded up.
    pub fn round(&self) -> BigInt {
        (self + &QuadraticSurd::rational(1, 2)).floor()
    }

    /// Fractional part `x - floor(x)` in `[0, 1)`.
    pub fn fract(&self) -> Self {
        self - &QuadraticSurd::from_int(self.floor())
    }

    /// Distance to the nearest integer.
    pub fn dist_to_int(&self) -> Self {
        (self - &QuadraticSurd::from_int(self.round())).abs()
    }

    /// Correctly bracketed double-precision shadow: the result is within one
    /// unit in the last place of the exact value.
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let mut k: u32 = 64;
        loop {
            let n = self.floor_scaled(k);
            if n.bits() >= 62 || k > 4096 {
                let bits = n.bits();
                let shift = bits.saturating_sub(64);
                let m = (n >> shift).to_f64().unwrap_or(f64::NAN);
                return m * 2f64.powi(shift as i32 - k as i32);
            }
            k += 64;
        }
    }

    /// Exact comparison with a double, read as the dyadic rational it encodes.
    pub fn cmp_f64(&self, x: f64) -> Ordering {
        assert!(x.is_finite(), "comparison with non-finite float");
        let (num, den) = dyadic(x);
        // (p + q sqrt r)/d  vs  num/den  <=>  p*den - num*d + q*den*sqrt r  vs 0
        let pp = &self.p * &den - &num * &self.den;
        let qq = &self.q * &den;
        sign_of(&pp, &qq, &self.r)
    }
}

/// `x = num / den` exactly, `den` a power of two.
fn dyadic(x: f64) -> (BigInt, BigInt) {
    if x == 0.0 {
        return (BigInt::zero(), BigInt::one());
    }
    let bits = x.to_bits();
    let sign = if bits >> 63 == 1 { -1 } else { 1 };
    let exp = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    let (mant, e) = if exp == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), exp - 1075)
    };
    let m = BigInt::from(mant) * sign;
    if e >= 0 {
        (m << e as usize, BigInt::one())
    } else {
        (m, BigInt::one() << (-e) as usize)
    }
}

/// Sign of `a + b*sqrt(r)`.
fn sign_of(a: &BigInt, b: &BigInt, r: &BigInt) -> Ordering {
    let sa = a.sign();
    let sb = if r.is_zero() { Sign::NoSign } else { b.sign() };
    match (sa, sb) {
        (Sign::NoSign, Sign::NoSign) => Ordering::Equal,
        (Sign::NoSign, s) | (s, Sign::NoSign) => sign_to_ord(s),
        (x, y) if x == y => sign_to_ord(x),
        (x, _) => {
            // opposite signs: compare a^2 with b^2 r
            let a2 = a * a;
            let b2r = b * b * r;
            match a2.cmp(&b2r) {
                Ordering::Greater => sign_to_ord(x),
                Ordering::Less => sign_to_ord(x).reverse(),
                Ordering::Equal => Ordering::Equal,
            }
        }
    }
}

fn sign_to_ord(s: Sign) -> Ordering {
    match s {
        Sign::Minus => Ordering::Less,
        Sign::NoSign => Ordering::Equal,
        Sign::Plus => Ordering::Greater,
    }
}

impl PartialOrd for QuadraticSurd {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QuadraticSurd {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum()
    }
}

impl<'a> Add<&'a QuadraticSurd> for &'a QuadraticSurd {
    type Output = QuadraticSurd;
    fn add(self, o: &QuadraticSurd) -> QuadraticSurd {
        let r = self.common_radicand(o);
        QuadraticSurd::new(
            &self.p * &o.den + &o.p * &self.den,
            &self.q * &o.den + &o.q * &self.den,
            r,
            &self.den * &o.den,
        )
    }
}

impl<'a> Sub<&'a QuadraticSurd> for &'a QuadraticSurd {
    type Output = QuadraticSurd;
    fn sub(self, o: &QuadraticSurd) -> QuadraticSurd {
        self + &(-o)
    }
}

impl<'a> Mul<&'a QuadraticSurd> for &'a QuadraticSurd {
    type Output = QuadraticSurd;
    fn mul(self, o: &QuadraticSurd) -> QuadraticSurd {
        let r = self.common_radicand(o);
        QuadraticSurd::new(
            &self.p * &o.p + &self.q * &o.q * &r,
            &self.p * &o.q + &self.q * &o.p,
            r,
            &self.den * &o.den,
        )
    }
}

impl Neg for &QuadraticSurd {
    type Output = QuadraticSurd;
    fn neg(self) -> QuadraticSurd {
        QuadraticSurd {
            p: -&self.p,
            q: -&self.q,
            r: self.r.clone(),
            den: self.den.clone(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<QuadraticSurd> for QuadraticSurd {
            type Output = QuadraticSurd;
            fn $m(self, o: QuadraticSurd) -> QuadraticSurd {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&'a QuadraticSurd> for QuadraticSurd {
            type Output = QuadraticSurd;
            fn $m(self, o: &QuadraticSurd) -> QuadraticSurd {
                (&self).$m(o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for QuadraticSurd {
    type Output = QuadraticSurd;
    fn neg(self) -> QuadraticSurd {
        -&self
    }
}

impl fmt::Display for QuadraticSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body = if self.q.is_zero() {
            format!("{}", self.p)
        } else {
            let qs = if self.q.is_one() {
                String::new()
            } else if self.q == -BigInt::one() {
                "-".to_string()
            } else {
                format!("{}*", self.q)
            };
            if self.p.is_zero() {
                format!("{qs}sqrt({})", self.r)
            } else if self.q.is_negative() {
                let qs = if self.q == -BigInt::one() {
                    String::new()
                } else {
                    format!("{}*", -&self.q)
                };
                format!("{} - {qs}sqrt({})", self.p, self.r)
            } else {
                format!("{} + {qs}sqrt({})", self.p, self.r)
            }
        };
        if self.den.is_one() {
            f.write_str(&body)
        } else if self.q.is_zero() || self.p.is_zero() {
            write!(f, "{body}/{}", self.den)
        } else {
            write!(f, "({body})/{}", self.den)
        }
    }
}

/// JSON view: exact components as decimal strings plus the float shadow.
#[derive(Serialize)]
struct SurdView {
    exact: String,
    p: String,
    q: String,
    radicand: String,
    den: String,
    approx: f64,
}

impl Serialize for QuadraticSurd {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        SurdView {
            exact: self.to_string(),
            p: self.p.to_string(),
            q: self.q.to_string(),
            radicand: self.r.to_string(),
            den: self.den.to_string(),
            approx: self.to_f64(),
        }
        .serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn golden() -> QuadraticSurd {
        QuadraticSurd::new(1.into(), 1.into(), 5.into(), 2.into())
    }

    #[test]
    fn golden_ratio_identities() {
        let phi = golden();
        // phi^2 = phi + 1
        assert_eq!(phi.pow(2), &phi + &QuadraticSurd::from_int(1));
        assert_eq!(phi.conj(), QuadraticSurd::new(1.into(), (-1).into(), 5.into(), 2.into()));
        assert_eq!(phi.norm(), (BigInt::from(-1), BigInt::from(1)));
        assert_eq!(phi.floor(), BigInt::from(1));
        assert_eq!(phi.conj().floor(), BigInt::from(-1));
        assert_eq!(phi.recip().unwrap(), &phi - &QuadraticSurd::from_int(1));
        assert_eq!(phi.to_string(), "(1 + sqrt(5))/2");
    }

    #[test]
    fn perfect_square_radicand_folds() {
        let x = QuadraticSurd::new(1.into(), 3.into(), 4.into(), 2.into());
        assert!(x.is_rational());
        assert_eq!(x, QuadraticSurd::rational(7, 2));
    }

    #[test]
    fn float_shadow_survives_cancellation() {
        // conj(phi)^60 is about 3e-13 while p and q are about 1e12
        let small = golden().conj().pow(60);
        let f = small.to_f64();
        let want = (-(0.5f64 * (5f64.sqrt() - 1.0))).powi(60);
        assert!(((f - want) / want).abs() < 1e-12, "{f} vs {want}");
        assert_eq!(small.cmp_f64(f.next_down()), Ordering::Greater);
        assert_eq!(small.cmp_f64(f.next_up()), Ordering::Less);
    }

    #[test]
    fn dist_to_int_of_sqrt2() {
        let x = QuadraticSurd::sqrt(2);
        let d = x.dist_to_int().to_f64();
        assert!((d - (2f64.sqrt() - 1.0)).abs() < 1e-15);
        let y = QuadraticSurd::new(3.into(), 1.into(), 2.into(), 2.into()); // 2.207
        assert!((y.dist_to_int().to_f64() - 0.2071067811865476).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn shadow_within_one_ulp(p in -1_000_000i64..1_000_000, q in -1000i64..1000,
                                 r in 2i64..200, den in 1i64..1000, n in 1u32..30) {
            let x = QuadraticSurd::new(p.into(), q.into(), r.into(), den.into()).pow(n);
            prop_assume!(!x.is_zero());
            let f = x.to_f64();
            prop_assume!(f.is_finite() && f != 0.0);
            // exact value lies strictly within one ulp of the shadow
            prop_assert_eq!(x.cmp_f64(f.next_down()), Ordering::Greater);
            prop_assert_eq!(x.cmp_f64(f.next_up()), Ordering::Less);
        }

        #[test]
        fn field_axioms(a in -50i64..50, b in -50i64..50, c in -50i64..50, d in -50i64..50, r in 2i64..30) {
            let x = QuadraticSurd::new(a.into(), b.into(), r.into(), 3.into());
            let y = QuadraticSurd::new(c.into(), d.into(), r.into(), 7.into());
            prop_assert_eq!(&(&x * &y) * &y.conj(), &x * &QuadraticSurd::rational(y.norm().0, y.norm().1));
            if let Some(q) = x.checked_div(&y) {
                prop_assert_eq!(&q * &y, x.clone());
            }
            let f = x.fract();
            prop_assert!(f >= QuadraticSurd::from_int(0) && f < QuadraticSurd::from_int(1));
        }
    }
}
