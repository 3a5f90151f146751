//! Box counting over finite unions of `R_n` and Monte-Carlo estimates of the
//! normalized measures `mu_n = mu|_{E_n} / mu(E_n)`.
//!
//! Random streams are `ChaCha8` keyed by `(seed, chunk index)`, and every
//! parallel reduction is an integer tally, so results do not depend on the
//! number of worker threads.

use std::sync::atomic::{AtomicU64, Ordering};

use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dimension::ols;
use crate::error::{Error, Result};
use crate::geometry::{
    min_disjoint_n, regime, torus_distance, ComponentShape, Membership, RecurrenceTest, Regime,
};
use crate::matrix::IntMatrix;
use crate::periodic::{enumerate_periodic, PeriodicPointSet};
use crate::spectral::{classify, count_h_n, growth_exponents, Hyperbolic};

/// Upper bound on periodic points enumerated by one estimator call.
pub const POINT_BUDGET: u64 = 1_000_000;
/// Upper bound on probe evaluations by one box count.
pub const PROBE_BUDGET: u64 = 1 << 31;
/// Finest level supported by exact occupancy (a `4^j`-bit grid).
pub const EXACT_MAX_LEVEL: u32 = 14;
/// Samples drawn per random stream.
const CHUNK: usize = 4096;
/// Below this `R^2` a fit carries a quality warning.
pub const R2_WARN: f64 = 0.98;
/// Minimum hits per radius bucket in a measure scan.
pub const MIN_BUCKET_HITS: u64 = 30;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Occupancy {
    /// A box counts when one of `per_axis^d` centred probes passes the
    /// membership test.
    Probes { per_axis: u32 },
    /// A box counts when it meets some component; planar only.
    Exact,
}

impl Default for Occupancy {
    fn default() -> Self {
        Occupancy::Probes { per_axis: 3 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BoxCountConfig {
    pub n_start: u32,
    pub n_end: u32,
    pub j_min: u32,
    pub j_max: u32,
    /// Fit levels; defaults to dropping the two coarsest and the finest level.
    pub window: Option<(u32, u32)>,
    pub occupancy: Occupancy,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Warning {
    /// The finest box is wider than the thinnest component axis.
    Resolution { finest_scale: f64, thinnest_axis: f64 },
    LowRSquared { r_squared: f64 },
}

#[derive(Clone, Debug, Serialize)]
pub struct BoxCountReport {
    pub matrix: IntMatrix,
    pub tau: f64,
    pub n_range: [u32; 2],
    pub occupancy: Occupancy,
    pub levels: Vec<u32>,
    pub scales: Vec<f64>,
    pub counts: Vec<u64>,
    pub fit_window: [u32; 2],
    pub fitted_slope: f64,
    pub r_squared: f64,
    pub warnings: Vec<Warning>,
}

impl BoxCountReport {
    pub fn has_resolution_warning(&self) -> bool {
        self.warnings.iter().any(|w| matches!(w, Warning::Resolution { .. }))
    }
}

/// Thinnest semi-axis among the components of `R_n`, `n in [lo, hi]`.
fn thinnest_axis(h: &Hyperbolic, tau: f64, hi: u32) -> f64 {
    let n = hi as f64;
    let log_expand = match h {
        Hyperbolic::Planar(s) => s.log_abs_lambda2,
        Hyperbolic::Block3d(b) => b.log_m.max(b.log_lambda),
    };
    (-n * tau - n * log_expand - (-(-n * log_expand).exp()).ln_1p()).exp()
}

/// Occupied-box counts of `R_N u ... u R_M` at dyadic scales `2^-j`.
pub fn box_count(a: &IntMatrix, tau: f64, cfg: &BoxCountConfig) -> Result<BoxCountReport> {
    let h = classify(a)?;
    let d = a.dim() as u32;
    if !(tau.is_finite() && tau > 0.0) {
        return Err(Error::Domain(format!("tau must be positive, got {tau}")));
    }
    if cfg.n_start > cfg.n_end || cfg.n_start < min_disjoint_n(tau) {
        return Err(Error::Domain(format!(
            "need {} <= N <= M, got N = {}, M = {}",
            min_disjoint_n(tau),
            cfg.n_start,
            cfg.n_end
        )));
    }
    if cfg.j_min > cfg.j_max {
        return Err(Error::Domain("need jmin <= jmax".into()));
    }
    let window = cfg.window.unwrap_or_else(|| {
        if cfg.j_max - cfg.j_min >= 4 {
            (cfg.j_min + 2, cfg.j_max - 1)
        } else {
            (cfg.j_min, cfg.j_max)
        }
    });
    if window.0 < cfg.j_min || window.1 > cfg.j_max || window.1 < window.0 + 1 {
        return Err(Error::InsufficientSamples(format!(
            "fit window {}..{} needs two levels inside {}..{}",
            window.0, window.1, cfg.j_min, cfg.j_max
        )));
    }

    let levels: Vec<u32> = (cfg.j_min..=cfg.j_max).collect();
    let counts = match cfg.occupancy {
        Occupancy::Probes { per_axis } => {
            let total: u64 = levels
                .iter()
                .map(|&j| (1u64 << (d * j)).saturating_mul((per_axis as u64).pow(d)))
                .sum::<u64>()
                .saturating_mul((cfg.n_end - cfg.n_start + 1) as u64);
            if total > PROBE_BUDGET || d * cfg.j_max > 60 {
                return Err(Error::BudgetExceeded(format!(
                    "{total} probe tests exceed the budget of {PROBE_BUDGET}"
                )));
            }
            let tests: Vec<RecurrenceTest> =
                (cfg.n_start..=cfg.n_end).map(|n| RecurrenceTest::new(a, tau, n)).collect();
            levels.iter().map(|&j| probe_count(&tests, d, j, per_axis.max(1))).collect()
        }
        Occupancy::Exact => {
            if d != 2 {
                return Err(Error::Domain("exact occupancy is implemented for 2x2 matrices".into()));
            }
            if cfg.j_max > EXACT_MAX_LEVEL {
                return Err(Error::BudgetExceeded(format!(
                    "exact occupancy supports jmax <= {EXACT_MAX_LEVEL}"
                )));
            }
            let mut total = 0u64;
            for n in cfg.n_start..=cfg.n_end {
                total = total.saturating_add(count_h_n(a, n)?.to_u64().unwrap_or(u64::MAX));
            }
            if total > POINT_BUDGET {
                return Err(Error::BudgetExceeded(format!(
                    "{total} periodic points exceed the budget of {POINT_BUDGET}"
                )));
            }
            exact_counts(a, tau, cfg.n_start, cfg.n_end, cfg.j_min, cfg.j_max)?
        }
    };

    let scales: Vec<f64> = levels.iter().map(|&j| 0.5f64.powi(j as i32)).collect();
    let (x, y): (Vec<f64>, Vec<f64>) = levels
        .iter()
        .zip(&counts)
        .filter(|(j, _)| (window.0..=window.1).contains(*j))
        .map(|(&j, &c)| (j as f64 * std::f64::consts::LN_2, (c.max(1) as f64).ln()))
        .unzip();
    let (slope, r2) = ols(&x, &y);
    let mut warnings = Vec::new();
    let finest = 0.5f64.powi(cfg.j_max as i32);
    let thin = thinnest_axis(&h, tau, cfg.n_end);
    if finest > thin {
        warnings.push(Warning::Resolution { finest_scale: finest, thinnest_axis: thin });
    }
    if !(r2 >= R2_WARN) {
        warnings.push(Warning::LowRSquared { r_squared: r2 });
    }
    Ok(BoxCountReport {
        matrix: a.clone(),
        tau,
        n_range: [cfg.n_start, cfg.n_end],
        occupancy: cfg.occupancy,
        levels,
        scales,
        counts,
        fit_window: [window.0, window.1],
        fitted_slope: slope,
        r_squared: r2,
        warnings,
    })
}

fn probe_count(tests: &[RecurrenceTest], d: u32, j: u32, per_axis: u32) -> u64 {
    let side = 1u64 << j;
    let boxes = 1u64 << (d * j);
    let delta = 1.0 / side as f64;
    let offsets: Vec<f64> = (0..per_axis).map(|p| (p as f64 + 0.5) / per_axis as f64).collect();
    let probes = (per_axis as u64).pow(d);
    (0..boxes)
        .into_par_iter()
        .filter(|&b| {
            let idx = [b % side, (b / side) % side, b / (side * side)];
            (0..probes).any(|p| {
                let mut x = [0.0; 3];
                let mut rem = p;
                for k in 0..d as usize {
                    let o = offsets[(rem % per_axis as u64) as usize];
                    rem /= per_axis as u64;
                    x[k] = (idx[k] as f64 + o) * delta;
                }
                let x = &x[..d as usize];
                tests.iter().any(|t| t.classify(x) != Membership::Outside)
            })
        })
        .count() as u64
}

/// `R_n = {x : |M x - k| < r for some k in Z^2}` with `M = A^n - I`; each
/// component is the ellipse `w^T Q w < r^2`, `Q = M^T M`, around a periodic
/// point.
struct PlanarEllipse {
    q11: f64,
    q12: f64,
    det2: f64,
    r2: f64,
    /// Half height in `y`.
    half_y: f64,
    /// `y` offsets of the leftmost and rightmost points.
    y_left: f64,
}

impl PlanarEllipse {
    fn new(a: &IntMatrix, tau: f64, n: u32) -> Self {
        let m = a.pow(n).minus_identity().to_f64();
        let (m11, m12, m21, m22) = (m[0], m[1], m[2], m[3]);
        let q11 = m11 * m11 + m21 * m21;
        let q12 = m11 * m12 + m21 * m22;
        let q22 = m12 * m12 + m22 * m22;
        let det = m11 * m22 - m12 * m21;
        let r = (-tau * n as f64).exp();
        // Q^{-1} = adj(Q) / det^2
        let (i11, i12) = (q22 / (det * det), -q12 / (det * det));
        PlanarEllipse {
            q11,
            q12,
            det2: det * det,
            r2: r * r,
            half_y: r * q11.sqrt() / det.abs(),
            y_left: -r * i12 / i11.sqrt(),
        }
    }

    /// Left and right `x` offsets of the boundary at height `eta`.
    fn x_at(&self, eta: f64) -> (f64, f64) {
        let disc = (self.r2 * self.q11 - eta * eta * self.det2).max(0.0).sqrt();
        ((-self.q12 * eta - disc) / self.q11, (-self.q12 * eta + disc) / self.q11)
    }

    /// `x` extent of the ellipse over `eta in [lo, hi]`, if nonempty.
    fn x_range(&self, lo: f64, hi: f64) -> Option<(f64, f64)> {
        let (lo, hi) = (lo.max(-self.half_y), hi.min(self.half_y));
        if lo > hi {
            return None;
        }
        let left = self.x_at(self.y_left.clamp(lo, hi)).0;
        let right = self.x_at((-self.y_left).clamp(lo, hi)).1;
        Some((left, right))
    }
}

struct Bitset {
    side: u64,
    words: Vec<AtomicU64>,
}

impl Bitset {
    fn new(level: u32) -> Self {
        let side = 1u64 << level;
        let words = (0..(side * side).div_ceil(64)).map(|_| AtomicU64::new(0)).collect();
        Bitset { side, words }
    }

    fn set(&self, x: u64, y: u64) {
        let i = y * self.side + x;
        self.words[(i / 64) as usize].fetch_or(1 << (i % 64), Ordering::Relaxed);
    }

    fn get(&self, x: u64, y: u64) -> bool {
        let i = y * self.side + x;
        self.words[(i / 64) as usize].load(Ordering::Relaxed) & (1 << (i % 64)) != 0
    }

    fn count(&self) -> u64 {
        self.words.iter().map(|w| w.load(Ordering::Relaxed).count_ones() as u64).sum()
    }

    fn coarsen(&self) -> Bitset {
        let level = self.side.trailing_zeros() - 1;
        let out = Bitset::new(level);
        (0..out.side).into_par_iter().for_each(|y| {
            for x in 0..out.side {
                let hit = (0..2).any(|dy| (0..2).any(|dx| self.get(2 * x + dx, 2 * y + dy)));
                if hit {
                    out.set(x, y);
                }
            }
        });
        out
    }
}

fn mark_component(grid: &Bitset, e: &PlanarEllipse, cx: f64, cy: f64) {
    let side = grid.side as f64;
    let delta = 1.0 / side;
    let row_lo = ((cy - e.half_y) * side).floor() as i64;
    let row_hi = ((cy + e.half_y) * side).floor() as i64;
    for row in row_lo..=row_hi {
        let y0 = row as f64 * delta - cy;
        let Some((l, r)) = e.x_range(y0, y0 + delta) else { continue };
        let c_lo = ((cx + l) * side).floor() as i64;
        let c_hi = ((cx + r) * side).floor() as i64;
        let wy = row.rem_euclid(grid.side as i64) as u64;
        let span = (c_hi - c_lo + 1).min(grid.side as i64);
        for c in c_lo..c_lo + span {
            grid.set(c.rem_euclid(grid.side as i64) as u64, wy);
        }
    }
}

fn exact_counts(a: &IntMatrix, tau: f64, n_lo: u32, n_hi: u32, j_min: u32, j_max: u32) -> Result<Vec<u64>> {
    let grid = Bitset::new(j_max);
    for n in n_lo..=n_hi {
        let points = enumerate_periodic(a, n, POINT_BUDGET)?;
        let e = PlanarEllipse::new(a, tau, n);
        (0..points.len()).into_par_iter().for_each(|i| {
            let c = points.point_f64(i);
            mark_component(&grid, &e, c[0], c[1]);
        });
    }
    let mut counts = vec![grid.count()];
    let mut g = grid;
    for _ in j_min..j_max {
        g = g.coarsen();
        counts.push(g.count());
    }
    counts.reverse();
    Ok(counts)
}

/// Uniform samples of `E_n`, the union of inscribed parallelograms.
pub struct ESampler {
    points: PeriodicPointSet,
    shape: ComponentShape,
}

impl ESampler {
    pub fn new(a: &IntMatrix, tau: f64, n: u32) -> Result<Self> {
        let s = crate::spectral::validate_hyperbolic(a)?;
        let shape = ComponentShape::new(&s, tau, n)?;
        let points = enumerate_periodic(a, n, POINT_BUDGET)?;
        Ok(ESampler { points, shape })
    }

    pub fn shape(&self) -> &ComponentShape {
        &self.shape
    }

    pub fn periodic_points(&self) -> &PeriodicPointSet {
        &self.points
    }

    /// Component index and point, from one draw of the stream.
    fn draw(&self, rng: &mut ChaCha8Rng) -> (usize, [f64; 2]) {
        let i = rng.random_range(0..self.points.len());
        let c = self.points.point_f64(i);
        let s: f64 = rng.random::<f64>() - 0.5;
        let t: f64 = rng.random::<f64>() - 0.5;
        let a = s * self.shape.semi_axis_minor;
        let b = t * self.shape.semi_axis_major;
        let (u, v) = (self.shape.axis_unstable, self.shape.axis_stable);
        let x = c[0] + a * u[0] + b * v[0];
        let y = c[1] + a * u[1] + b * v[1];
        (i, [x - x.floor(), y - y.floor()])
    }

    /// `k` samples with component indices; identical for a given seed
    /// whatever the thread count.
    pub fn sample_indexed(&self, k: usize, seed: u64) -> Vec<(usize, [f64; 2])> {
        (0..k.div_ceil(CHUNK))
            .into_par_iter()
            .flat_map_iter(|c| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(c as u64);
                let len = CHUNK.min(k - c * CHUNK);
                (0..len).map(move |_| self.draw(&mut rng)).collect::<Vec<_>>()
            })
            .collect()
    }

    pub fn sample(&self, k: usize, seed: u64) -> Vec<[f64; 2]> {
        self.sample_indexed(k, seed).into_iter().map(|p| p.1).collect()
    }
}

/// `k` i.i.d. uniform points of `E_n`.
pub fn sample_e_n(a: &IntMatrix, tau: f64, n: u32, k: usize, seed: u64) -> Result<Vec<[f64; 2]>> {
    Ok(ESampler::new(a, tau, n)?.sample(k, seed))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
    pub hits: u64,
    pub samples: u64,
}

impl Estimate {
    fn from_hits(hits: u64, samples: u64) -> Self {
        let p = hits as f64 / samples as f64;
        Estimate { value: p, stderr: (p * (1.0 - p) / samples as f64).sqrt(), hits, samples }
    }
}

fn ball_hits(samples: &[[f64; 2]], center: &[f64], r: f64) -> u64 {
    if r <= 0.0 {
        return 0;
    }
    samples.par_iter().filter(|x| torus_distance(&x[..], center) <= r).count() as u64
}

/// Minimum sample count accepted by [`mu_n_ball`].
pub const MIN_SAMPLES: usize = 1000;

/// Fraction of `k` samples of `E_n` within torus distance `r` of `center`.
pub fn mu_n_ball(a: &IntMatrix, tau: f64, n: u32, center: &[f64], r: f64, k: usize, seed: u64) -> Result<Estimate> {
    if k < MIN_SAMPLES {
        return Err(Error::InsufficientSamples(format!("need at least {MIN_SAMPLES} samples, got {k}")));
    }
    let samples = sample_e_n(a, tau, n, k, seed)?;
    Ok(Estimate::from_hits(ball_hits(&samples, center, r), k as u64))
}

/// Where measure-scan balls are centred.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Centers {
    /// Uniform on the torus.
    Uniform { count: usize },
    /// Drawn from `mu_n` itself.
    OnSupport { count: usize },
    Explicit { points: Vec<[f64; 2]> },
}

#[derive(Clone, Debug, Serialize)]
pub struct MeasureScanConfig {
    pub centers: Centers,
    pub radii: Vec<f64>,
    pub samples: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BallEstimate {
    pub center: [f64; 2],
    pub radius: f64,
    pub mu: Estimate,
    /// Lebesgue measure of the ball (exact for `r <= 1/2`).
    pub lebesgue: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct MeasureScanReport {
    pub n: u32,
    pub tau: f64,
    pub regime: Regime,
    pub balls: Vec<BallEstimate>,
    /// Radii whose total hits fell below the bucket minimum; left out of the fit.
    pub dropped_radii: Vec<f64>,
    pub fitted_local_exponent: f64,
    pub r_squared: f64,
    /// `min{(l1 + l2)/(tau + l1), 2 l2/(tau + l2)}` in Case 1, `2 l2/(tau + l2)` in Case 2,
    /// with `l_i = (1/n) log|lambda_i^n - 1|`.
    pub predicted_exponent: f64,
}

fn disc_area(r: f64) -> f64 {
    // area of a Euclidean disc intersected with the unit square's torus
    // fundamental domain; exact while the disc does not wrap onto itself
    if r <= 0.5 {
        std::f64::consts::PI * r * r
    } else if r >= std::f64::consts::FRAC_1_SQRT_2 {
        1.0
    } else {
        // disc of radius r centred in the unit square, minus the four caps
        let h = 0.5;
        let theta = (h / r).acos();
        let cap = r * r * (theta - theta.sin() * theta.cos());
        std::f64::consts::PI * r * r - 4.0 * cap
    }
}

/// `mu_n(B(x, r))` across centres and radii, with the local exponent fitted
/// from the mean of `log mu` against `log r`.
pub fn measure_scan(a: &IntMatrix, tau: f64, n: u32, cfg: &MeasureScanConfig) -> Result<MeasureScanReport> {
    if cfg.samples < MIN_SAMPLES {
        return Err(Error::InsufficientSamples(format!(
            "need at least {MIN_SAMPLES} samples, got {}",
            cfg.samples
        )));
    }
    let sampler = ESampler::new(a, tau, n)?;
    let s = crate::spectral::validate_hyperbolic(a)?;
    let samples = sampler.sample(cfg.samples, cfg.seed);
    let centers: Vec<[f64; 2]> = match &cfg.centers {
        Centers::Explicit { points } => points.clone(),
        Centers::Uniform { count } => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(u64::MAX);
            (0..*count).map(|_| [rng.random(), rng.random()]).collect()
        }
        Centers::OnSupport { count } => sampler.sample(*count, cfg.seed ^ 0x9e37_79b9_7f4a_7c15),
    };
    let mut balls = Vec::with_capacity(centers.len() * cfg.radii.len());
    for &r in &cfg.radii {
        for c in &centers {
            let mu = Estimate::from_hits(ball_hits(&samples, c, r), cfg.samples as u64);
            let leb = disc_area(r);
            balls.push(BallEstimate { center: *c, radius: r, mu, lebesgue: leb, ratio: mu.value / leb });
        }
    }

    let mut dropped = Vec::new();
    let (mut x, mut y) = (Vec::new(), Vec::new());
    for &r in &cfg.radii {
        let bucket: Vec<&BallEstimate> = balls.iter().filter(|b| b.radius == r).collect();
        let hits: u64 = bucket.iter().map(|b| b.mu.hits).sum();
        if hits < MIN_BUCKET_HITS || bucket.iter().any(|b| b.mu.hits == 0) {
            dropped.push(r);
            continue;
        }
        let mean_log = bucket.iter().map(|b| b.mu.value.ln()).sum::<f64>() / bucket.len() as f64;
        x.push(r.ln());
        y.push(mean_log);
    }
    let distinct = {
        let mut v = x.clone();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v.len()
    };
    if distinct < 2 {
        return Err(Error::InsufficientSamples(format!(
            "{distinct} usable radius bucket(s); an exponent fit needs two distinct radii"
        )));
    }
    let (slope, r2) = ols(&x, &y);
    let (l1, l2) = growth_exponents(&s, n)?;
    let reg = regime(s.log_abs_lambda2, tau);
    let unstable = 2.0 * l2 / (tau + l2);
    let predicted = match reg {
        Regime::Case2 => unstable,
        _ => ((l1 + l2) / (tau + l1)).min(unstable),
    };
    Ok(MeasureScanReport {
        n,
        tau,
        regime: reg,
        balls,
        dropped_radii: dropped,
        fitted_local_exponent: slope,
        r_squared: r2,
        predicted_exponent: predicted,
    })
}

/// `count / (pi r^2 H_n)` for `P_n` in balls of radius `r` around `centers`.
pub fn periodic_ball_ratios(a: &IntMatrix, n: u32, r: f64, centers: &[[f64; 2]]) -> Result<Vec<f64>> {
    let points = enumerate_periodic(a, n, POINT_BUDGET)?;
    let h = points.len() as f64;
    Ok(centers
        .iter()
        .map(|c| points.count_in_ball(c, r) as f64 / (disc_area(r) * h))
        .collect())
}

/// `count` uniform points of the torus from the `(seed, stream)` generator.
pub fn uniform_points(count: usize, seed: u64, stream: u64) -> Vec<[f64; 2]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    (0..count).map(|_| [rng.random(), rng.random()]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::contains;

    fn cat() -> IntMatrix {
        IntMatrix::from_rows([[2, 1], [1, 1]])
    }

    #[test]
    fn samples_lie_in_r_n() {
        let (tau, n) = (0.7, 6);
        let pts = sample_e_n(&cat(), tau, n, 5000, 3).unwrap();
        assert!(pts.iter().all(|x| contains(&cat(), tau, n, x) == Membership::Inside));
    }

    #[test]
    fn sampling_is_thread_independent() {
        let a = sample_e_n(&cat(), 0.5, 5, 10_000, 42).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| sample_e_n(&cat(), 0.5, 5, 10_000, 42).unwrap());
        assert_eq!(a, b);
        let c = sample_e_n(&cat(), 0.5, 5, 10_000, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn component_means_hit_centres() {
        let sampler = ESampler::new(&cat(), 0.4, 4).unwrap();
        let draws = sampler.sample_indexed(100_000, 9);
        let shape = sampler.shape();
        let c = sampler.periodic_points().point_f64(0);
        let mine: Vec<[f64; 2]> = draws.iter().filter(|d| d.0 == 0).map(|d| d.1).collect();
        for k in 0..2 {
            let offs: Vec<f64> = mine
                .iter()
                .map(|x| {
                    let d = x[k] - c[k];
                    d - d.round()
                })
                .collect();
            let mean = offs.iter().sum::<f64>() / offs.len() as f64;
            // coordinate spread of a uniform parallelogram, bounded by its extent
            let extent = shape.semi_axis_major + shape.semi_axis_minor;
            let sigma = extent / (12f64.sqrt() * (offs.len() as f64).sqrt());
            assert!(mean.abs() < 3.0 * sigma, "{mean} vs {sigma}");
        }
    }

    #[test]
    fn trivial_balls() {
        let e = mu_n_ball(&cat(), 1.0, 3, &[0.3, 0.3], 0.75, 2000, 1).unwrap();
        assert_eq!(e.value, 1.0);
        let e = mu_n_ball(&cat(), 1.0, 3, &[0.3, 0.3], 0.0, 2000, 1).unwrap();
        assert_eq!(e.value, 0.0);
        assert!(matches!(mu_n_ball(&cat(), 1.0, 3, &[0.3, 0.3], 0.1, 10, 1), Err(Error::InsufficientSamples(_))));
    }

    #[test]
    fn disc_area_is_continuous() {
        let below = disc_area(0.5);
        let above = disc_area(0.5 + 1e-12);
        assert!((below - above).abs() < 1e-9);
        assert!((disc_area(std::f64::consts::FRAC_1_SQRT_2 - 1e-12) - 1.0).abs() < 1e-5);
    }

    #[test]
    fn exact_row_ranges_cover_probe_hits() {
        // every probe inside R_n must sit in a box marked by exact occupancy
        let (tau, n) = (0.4, 4);
        let cfg = |occupancy| BoxCountConfig { n_start: n, n_end: n, j_min: 2, j_max: 7, window: None, occupancy };
        let exact = box_count(&cat(), tau, &cfg(Occupancy::Exact)).unwrap();
        let probes = box_count(&cat(), tau, &cfg(Occupancy::Probes { per_axis: 5 })).unwrap();
        for (e, p) in exact.counts.iter().zip(&probes.counts) {
            assert!(e >= p, "{:?} {:?}", exact.counts, probes.counts);
        }
        for w in exact.counts.windows(2) {
            assert!(w[0] <= w[1]);
        }
    }

    #[test]
    fn point_like_components_count_once() {
        // tiny, well separated components: one box each at coarse scales
        let tau = 6.0;
        let cfg = BoxCountConfig { n_start: 3, n_end: 3, j_min: 6, j_max: 9, window: Some((6, 9)), occupancy: Occupancy::Exact };
        let r = box_count(&cat(), tau, &cfg).unwrap();
        assert!(r.counts.iter().all(|&c| (16..=64).contains(&c)), "{:?}", r.counts);
        assert!(r.fitted_slope.abs() < 0.2);
    }
}
