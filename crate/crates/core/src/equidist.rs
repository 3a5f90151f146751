//! Equidistribution of `(n alpha)` and Diophantine constants of quadratic
//! surds.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectral::SpectralData;
use crate::surd::QuadraticSurd;

/// Default number of partial quotients in a profile.
pub const DEFAULT_DEPTH: usize = 64;

/// Scan bound used for the separation constant.
pub const SEPARATION_SCAN: u64 = 1_000_000;

#[derive(Clone, Debug, Serialize)]
pub struct CountingReport {
    pub a: f64,
    pub b: f64,
    pub n: u64,
    pub count: u64,
    pub ratio: f64,
}

/// Generator of `{n alpha}` for `n = 1, 2, ...`.
///
/// Each term is floored exactly in integer arithmetic and then converted with
/// the conjugate trick, so the error is a few ulps regardless of `n`.
struct FractionalParts {
    alpha: QuadraticSurd,
    // alpha = (p + q sqrt(r)) / den with everything small enough for i128
    fast: Option<(i128, i128, i128, i128)>,
    n: u64,
}

impl FractionalParts {
    fn new(alpha: &QuadraticSurd) -> Self {
        let fast = (|| {
            let p = alpha.p().to_i128()?;
            let q = alpha.q().to_i128()?;
            let r = alpha.radicand().to_i128()?;
            let d = alpha.den().to_i128()?;
            Some((p, q, r, d))
        })();
        FractionalParts { alpha: alpha.clone(), fast, n: 0 }
    }

    fn fract_at(&self, n: u64) -> f64 {
        match self.fast {
            Some((p, q, r, d)) => match fast_fract(p, q, r, d, n as i128) {
                Some(x) => x,
                None => self.slow_fract(n),
            },
            None => self.slow_fract(n),
        }
    }

    fn slow_fract(&self, n: u64) -> f64 {
        let x = (&self.alpha * &QuadraticSurd::from_int(n)).fract();
        x.to_f64().min(BELOW_ONE)
    }
}

const BELOW_ONE: f64 = 1.0 - f64::EPSILON / 2.0;

/// `{n (p + q sqrt r) / d}` in `i128`, or `None` on overflow.
fn fast_fract(p: i128, q: i128, r: i128, d: i128, n: i128) -> Option<f64> {
    let a = n.checked_mul(p)?;
    let nq = n.checked_mul(q)?;
    let s2 = nq.checked_mul(nq)?.checked_mul(r)?; // (n q sqrt r)^2
    let t = s2.isqrt();
    let exact = t * t == s2;
    let floor = if q >= 0 {
        a.checked_add(t)?.div_euclid(d)
    } else if exact {
        a.checked_sub(t)?.div_euclid(d)
    } else {
        a.checked_sub(t)?.checked_sub(1)?.div_euclid(d)
    };
    // d * fract = A + sgn(q) sqrt(s2)
    let big_a = a.checked_sub(floor.checked_mul(d)?)?;
    let root = (s2 as f64).sqrt();
    let num = if q == 0 || big_a == 0 || (big_a > 0) == (q > 0) {
        big_a as f64 + q.signum() as f64 * root
    } else {
        // opposite signs: rationalize to avoid cancellation
        let diff = big_a.checked_mul(big_a)?.checked_sub(s2)?;
        diff as f64 / (big_a as f64 - q.signum() as f64 * root)
    };
    Some((num / d as f64).clamp(0.0, BELOW_ONE))
}

impl Iterator for FractionalParts {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        self.n += 1;
        Some(self.fract_at(self.n))
    }
}

/// `{n alpha}` for `n = 1..=count`.
pub fn fractional_parts(alpha: &QuadraticSurd, count: u64) -> Vec<f64> {
    FractionalParts::new(alpha).take(count as usize).collect()
}

pub fn counting_function(alpha: &QuadraticSurd, a: f64, b: f64, n: u64) -> Result<CountingReport> {
    if !(0.0 <= a && a < b && b <= 1.0) {
        return Err(Error::Domain(format!("need 0 <= a < b <= 1, got [{a}, {b})")));
    }
    if n == 0 {
        return Err(Error::Domain("N must be at least 1".into()));
    }
    let count = FractionalParts::new(alpha)
        .take(n as usize)
        .filter(|&x| a <= x && x < b)
        .count() as u64;
    Ok(CountingReport { a, b, n, count, ratio: count as f64 / n as f64 })
}

/// Star discrepancy of a point set in `[0, 1)`.
pub fn star_discrepancy_of(points: &[f64]) -> f64 {
    let mut xs = points.to_vec();
    xs.sort_unstable_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let i = i as f64;
            ((i + 1.0) / n - x).max(x - i / n)
        })
        .fold(0.0, f64::max)
}

/// `D*_N` of `({n alpha})_{n <= N}`.
pub fn star_discrepancy(alpha: &QuadraticSurd, n: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("N must be at least 1".into()));
    }
    Ok(star_discrepancy_of(&fractional_parts(alpha, n)))
}

/// Exact regular continued fraction of a quadratic irrational, using complete
/// quotients `(P + sqrt(D)) / Q` with `Q | D - P^2`.
#[derive(Clone, Debug)]
struct CfState {
    p: BigInt,
    q: BigInt,
    d: BigInt,
    root: BigInt,
}

impl CfState {
    fn new(alpha: &QuadraticSurd) -> Result<Self> {
        if alpha.is_rational() {
            return Err(Error::RationalInput);
        }
        let den = alpha.den();
        let d = alpha.q() * alpha.q() * alpha.radicand() * den * den;
        let (p, q) = if alpha.q().is_positive() {
            (alpha.p() * den, den * den)
        } else {
            (-(alpha.p() * den), -(den * den))
        };
        let root = d.sqrt();
        Ok(CfState { p, q, d, root })
    }

    fn key(&self) -> (BigInt, BigInt) {
        (self.p.clone(), self.q.clone())
    }

    fn step(&mut self) -> BigInt {
        // D is never a square here, so sqrt(D) lies strictly between root and root + 1
        let a = if self.q.is_positive() {
            (&self.p + &self.root).div_floor(&self.q)
        } else {
            (-&self.p - &self.root - BigInt::one()).div_floor(&-&self.q)
        };
        let p_next = &a * &self.q - &self.p;
        let q_next = (&self.d - &p_next * &p_next) / &self.q;
        self.p = p_next;
        self.q = q_next;
        a
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Convergent {
    #[serde(serialize_with = "crate::bigser::one")]
    pub p: BigInt,
    #[serde(serialize_with = "crate::bigser::one")]
    pub q: BigInt,
}

#[derive(Clone, Debug, Serialize)]
pub struct DiophantineProfile {
    pub alpha: QuadraticSurd,
    #[serde(serialize_with = "crate::bigser::many")]
    pub partial_quotients: Vec<BigInt>,
    /// Number of quotients before the period starts, when one was detected.
    pub preperiod: Option<usize>,
    pub period_length: Option<usize>,
    pub convergents: Vec<Convergent>,
    /// Minimum of `q ||q alpha||` over `q = 1` and the listed convergents.
    pub c_star: f64,
}

impl DiophantineProfile {
    pub fn period(&self) -> Option<&[BigInt]> {
        let (s, l) = (self.preperiod?, self.period_length?);
        self.partial_quotients.get(s..s + l)
    }
}

fn convergents_of(quotients: &[BigInt]) -> Vec<Convergent> {
    let (mut p0, mut q0) = (BigInt::one(), BigInt::zero());
    let (mut p1, mut q1) = (quotients[0].clone(), BigInt::one());
    let mut out = vec![Convergent { p: p1.clone(), q: q1.clone() }];
    for a in &quotients[1..] {
        let p2 = a * &p1 + &p0;
        let q2 = a * &q1 + &q0;
        (p0, q0, p1, q1) = (p1, q1, p2.clone(), q2.clone());
        out.push(Convergent { p: p2, q: q2 });
    }
    out
}

fn q_dist(alpha: &QuadraticSurd, q: &BigInt) -> f64 {
    let qa = alpha * &QuadraticSurd::from_int(q.clone());
    q.to_f64().unwrap_or(f64::INFINITY) * qa.dist_to_int().to_f64()
}

pub fn continued_fraction(alpha: &QuadraticSurd, depth: usize) -> Result<DiophantineProfile> {
    if depth == 0 {
        return Err(Error::Domain("depth must be at least 1".into()));
    }
    let mut state = CfState::new(alpha)?;
    let mut seen = std::collections::HashMap::new();
    let mut quotients = Vec::with_capacity(depth);
    let mut period = None;
    for k in 0..depth {
        if period.is_none() {
            if let Some(&start) = seen.get(&state.key()) {
                period = Some((start, k - start));
            } else {
                seen.insert(state.key(), k);
            }
        }
        quotients.push(state.step());
    }
    if period.is_none() && seen.contains_key(&state.key()) {
        let start = seen[&state.key()];
        period = Some((start, depth - start));
    }
    let convergents = convergents_of(&quotients);
    let c_star = std::iter::once(BigInt::one())
        .chain(convergents.iter().map(|c| c.q.clone()))
        .map(|q| q_dist(alpha, &q))
        .fold(f64::INFINITY, f64::min);
    Ok(DiophantineProfile {
        alpha: alpha.clone(),
        partial_quotients: quotients,
        preperiod: period.map(|p| p.0),
        period_length: period.map(|p| p.1),
        convergents,
        c_star,
    })
}

/// Denominators of all convergents with `q <= bound`, together with `q = 1`.
fn convergent_denominators(alpha: &QuadraticSurd, bound: &BigInt) -> Result<Vec<BigInt>> {
    let mut state = CfState::new(alpha)?;
    state.step();
    let (mut q0, mut q1) = (BigInt::zero(), BigInt::one());
    let mut out = vec![BigInt::one()];
    loop {
        let a = state.step();
        let q2 = a * &q1 + &q0;
        if &q2 > bound {
            return Ok(out);
        }
        out.push(q2.clone());
        (q0, q1) = (q1, q2);
    }
}

/// `min_{1 <= q <= Q} q ||q alpha||`.
///
/// For `q_k <= q < q_{k+1}` the convergent satisfies `||q_k alpha|| <= ||q alpha||`,
/// so only `q = 1` and convergent denominators need to be scanned.
pub fn badly_approximable_constant(alpha: &QuadraticSurd, q_max: u64) -> Result<f64> {
    if q_max == 0 {
        return Err(Error::Domain("Q must be at least 1".into()));
    }
    Ok(convergent_denominators(alpha, &BigInt::from(q_max))?
        .iter()
        .map(|q| q_dist(alpha, q))
        .fold(f64::INFINITY, f64::min))
}

/// `q ||q alpha||` minimized over the convergents in the last two periods
/// below `Q`: an estimate of `liminf_{q -> inf} q ||q alpha||`.
pub fn liminf_proxy(alpha: &QuadraticSurd, q_max: u64) -> Result<f64> {
    let profile = continued_fraction(alpha, DEFAULT_DEPTH)?;
    let window = 2 * profile.period_length.unwrap_or(DEFAULT_DEPTH / 4).max(1);
    let qs = convergent_denominators(alpha, &BigInt::from(q_max))?;
    let tail = &qs[qs.len().saturating_sub(window)..];
    Ok(tail.iter().map(|q| q_dist(alpha, q)).fold(f64::INFINITY, f64::min))
}

/// `c2 = c* / (4 sqrt(1 + gamma^2))` with `c*` scanned up to `q <= 10^6`.
pub fn separation_constant(s: &SpectralData) -> Result<f64> {
    let c_star = badly_approximable_constant(&s.gamma, SEPARATION_SCAN)?;
    let g = s.gamma.to_f64();
    Ok(c_star / (4.0 * (1.0 + g * g).sqrt()))
}
