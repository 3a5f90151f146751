use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use torrec::geometry::{
    circumscribed_disjoint, component_geometry, in_parallelogram, min_disjoint_n, ComponentShape,
    Membership, RecurrenceTest,
};
use torrec::periodic::{enumerate_periodic, DEFAULT_CAP};
use torrec::spectral::validate_hyperbolic;
use torrec::IntMatrix;

fn family() -> Vec<IntMatrix> {
    vec![
        IntMatrix::from_rows([[2, 1], [1, 1]]),
        IntMatrix::from_rows([[3, 1], [1, 1]]),
        IntMatrix::from_rows([[3, 2], [1, 1]]),
        IntMatrix::from_rows([[5, 3], [1, 1]]),
        IntMatrix::from_rows([[2, 1], [1, 0]]),
    ]
}

/// `(A^n - I)` as floats together with its inverse.
fn float_map(a: &IntMatrix, n: u32) -> ([f64; 4], [f64; 4]) {
    let m = a.pow(n).minus_identity().to_f64();
    let det = m[0] * m[3] - m[1] * m[2];
    (
        [m[0], m[1], m[2], m[3]],
        [m[3] / det, -m[1] / det, -m[2] / det, m[0] / det],
    )
}

fn apply(m: &[f64; 4], w: [f64; 2]) -> [f64; 2] {
    [m[0] * w[0] + m[1] * w[1], m[2] * w[0] + m[3] * w[1]]
}

fn powers(s: &torrec::spectral::SpectralData, lo: u32, hi: u32) -> Vec<u32> {
    (lo..=hi).filter(|n| !(s.has_negative_eigenvalue() && n % 2 == 1)).collect()
}

#[test]
fn ellipse_is_sandwiched_between_parallelograms() {
    for a in family() {
        let s = validate_hyperbolic(&a).unwrap();
        for tau in [0.2, 0.5 * s.log_abs_lambda2, s.log_abs_lambda2, 1.7] {
            let n0 = min_disjoint_n(tau);
            for n in powers(&s, n0, n0 + 5) {
                let (m, minv) = float_map(&a, n);
                let p = enumerate_periodic(&a, n, DEFAULT_CAP).unwrap();
                let c = component_geometry(&s, tau, n, &p.rational_point(p.len() / 2)).unwrap();
                let r = c.shape.radius;
                let center = c.center_f64;
                // boundary of E lies in the closed ellipse
                for k in 0..4 {
                    let (v0, v1) = (c.inscribed[k], c.inscribed[(k + 1) % 4]);
                    for t in 0..=64 {
                        let f = t as f64 / 64.0;
                        let w = [
                            v0[0] + f * (v1[0] - v0[0]) - center[0],
                            v0[1] + f * (v1[1] - v0[1]) - center[1],
                        ];
                        let y = apply(&m, w);
                        let norm = (y[0] * y[0] + y[1] * y[1]).sqrt();
                        assert!(norm <= r * (1.0 + 1e-9), "{a} n={n} tau={tau}: {norm} > {r}");
                    }
                }
                // boundary of the ellipse lies in the closed E~
                for t in 0..256 {
                    let phi = t as f64 * std::f64::consts::TAU / 256.0;
                    let w = apply(&minv, [r * phi.cos(), r * phi.sin()]);
                    let x = [center[0] + w[0], center[1] + w[1]];
                    assert!(in_parallelogram(&c.circumscribed, x, 1e-9), "{a} n={n} tau={tau} phi={phi}");
                }
            }
        }
    }
}

#[test]
fn membership_agrees_with_component_shapes() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for a in family() {
        let s = validate_hyperbolic(&a).unwrap();
        for tau in [0.3, s.log_abs_lambda2] {
            let n0 = min_disjoint_n(tau);
            for n in powers(&s, n0, n0 + 4) {
                let shape = ComponentShape::new(&s, tau, n).unwrap();
                let test = RecurrenceTest::new(&a, tau, n);
                let (m, minv) = float_map(&a, n);
                let p = enumerate_periodic(&a, n, DEFAULT_CAP).unwrap();
                let diam = 2.0 * shape.c1 * (shape.semi_axis_major + shape.semi_axis_minor);
                for _ in 0..2000 {
                    let i = rng.random_range(0..p.len());
                    let c = p.point_f64(i);
                    let x = [
                        c[0] + 3.0 * diam * rng.random_range(-1.0..1.0),
                        c[1] + 3.0 * diam * rng.random_range(-1.0..1.0),
                    ];
                    let w = [x[0] - c[0], x[1] - c[1]];
                    let (xi, eta) = shape.normalized(w);
                    let member = test.classify(&x);
                    if xi.abs() < 0.5 - 1e-9 && eta.abs() < 0.5 - 1e-9 {
                        assert_eq!(member, Membership::Inside, "{a} n={n} x={x:?}");
                    }
                    if member == Membership::Inside {
                        // displacement to the nearest component centre
                        let y = apply(&m, x);
                        let k = [y[0].round(), y[1].round()];
                        let w = apply(&minv, [y[0] - k[0], y[1] - k[1]]);
                        let (xi, eta) = shape.normalized(w);
                        assert!(xi.abs() <= shape.c1 + 1e-9 && eta.abs() <= shape.c1 + 1e-9);
                    }
                }
            }
        }
    }
}

#[test]
fn monte_carlo_measure_law() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let a = IntMatrix::from_rows([[2, 1], [1, 1]]);
    let s = validate_hyperbolic(&a).unwrap();
    for (tau, n) in [(0.4, 3), (0.3, 4), (0.25, 5)] {
        let shape = ComponentShape::new(&s, tau, n).unwrap();
        let test = RecurrenceTest::new(&a, tau, n);
        let samples = 400_000;
        let mut hits_r = 0u32;
        let mut hits_e = 0u32;
        let (m, minv) = float_map(&a, n);
        for _ in 0..samples {
            let x = [rng.random::<f64>(), rng.random::<f64>()];
            if test.classify(&x) == Membership::Inside {
                hits_r += 1;
                let y = apply(&m, x);
                let w = apply(&minv, [y[0] - y[0].round(), y[1] - y[1].round()]);
                let (xi, eta) = shape.normalized(w);
                if xi.abs() <= 0.5 && eta.abs() <= 0.5 {
                    hits_e += 1;
                }
            }
        }
        let r2 = shape.radius * shape.radius;
        for (hits, want) in [(hits_r, std::f64::consts::PI * r2), (hits_e, r2 / shape.c1)] {
            let got = hits as f64 / samples as f64;
            let sigma = (want * (1.0 - want) / samples as f64).sqrt();
            assert!((got - want).abs() < 5.0 * sigma, "tau={tau} n={n}: {got} vs {want}");
        }
    }
}

fn project(poly: &[[f64; 2]; 4], axis: [f64; 2]) -> (f64, f64) {
    poly.iter()
        .map(|p| p[0] * axis[0] + p[1] * axis[1])
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)))
}

/// Pairwise separating-axis check over all components and torus translates.
fn brute_disjoint(a: &IntMatrix, tau: f64, n: u32) -> bool {
    let s = validate_hyperbolic(a).unwrap();
    let p = enumerate_periodic(a, n, DEFAULT_CAP).unwrap();
    let polys: Vec<[[f64; 2]; 4]> = (0..p.len())
        .map(|i| component_geometry(&s, tau, n, &p.rational_point(i)).unwrap().circumscribed)
        .collect();
    let axes: Vec<[f64; 2]> = [s.unstable_axis(), s.stable_axis()]
        .iter()
        .map(|d| [-d[1], d[0]])
        .collect();
    for i in 0..polys.len() {
        for j in i..polys.len() {
            for z0 in -2..=2 {
                for z1 in -2..=2 {
                    if i == j && z0 == 0 && z1 == 0 {
                        continue;
                    }
                    let mut q = polys[j];
                    for v in q.iter_mut() {
                        v[0] += z0 as f64;
                        v[1] += z1 as f64;
                    }
                    let separated = axes.iter().any(|&ax| {
                        let (a0, a1) = project(&polys[i], ax);
                        let (b0, b1) = project(&q, ax);
                        a1 <= b0 || b1 <= a0
                    });
                    if !separated {
                        return false;
                    }
                }
            }
        }
    }
    true
}

#[test]
fn lattice_criterion_matches_pairwise_check() {
    for a in family() {
        let s = validate_hyperbolic(&a).unwrap();
        for tau in [0.15, 0.35, 0.5 * s.log_abs_lambda2, s.log_abs_lambda2, 2.0] {
            let n0 = min_disjoint_n(tau);
            for n in powers(&s, n0, n0 + 2) {
                if torrec::spectral::count_h_n(&a, n).unwrap() > 400.into() {
                    continue;
                }
                let shape = ComponentShape::new(&s, tau, n).unwrap();
                assert_eq!(
                    circumscribed_disjoint(&shape),
                    brute_disjoint(&a, tau, n),
                    "{a} tau={tau} n={n}"
                );
            }
        }
    }
}

#[test]
fn circumscribed_parallelograms_disjoint_for_cat_map() {
    let a = IntMatrix::from_rows([[2, 1], [1, 1]]);
    let s = validate_hyperbolic(&a).unwrap();
    for tau in [0.5 * s.log_abs_lambda2, s.log_abs_lambda2, 1.0, 0.3] {
        for n in min_disjoint_n(tau)..min_disjoint_n(tau) + 12 {
            let shape = ComponentShape::new(&s, tau, n).unwrap();
            assert!(circumscribed_disjoint(&shape), "tau={tau} n={n}");
        }
    }
}
