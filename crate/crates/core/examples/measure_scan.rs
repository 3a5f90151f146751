//! Monte-Carlo `mu_n` on balls: ratios against Lebesgue and the fitted local exponent.
//!
//! `cargo run --release --example measure_scan`

use torrec::estimators::{measure_scan, periodic_ball_ratios, uniform_points, Centers, MeasureScanConfig};
use torrec::IntMatrix;

fn main() -> torrec::Result<()> {
    let a = IntMatrix::from_rows([[2, 1], [1, 1]]);
    let l = ((3.0 + 5f64.sqrt()) / 2.0).ln();
    let centers = uniform_points(100, 1, 0);
    let ratios = periodic_ball_ratios(&a, 10, 0.2, &centers)?;
    let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0f64), |(lo, hi), &r| (lo.min(r), hi.max(r)));
    println!("periodic points of period 10 in balls of radius 0.2: ratios in [{lo:.4}, {hi:.4}]");
    for tau in [0.5 * l, 2.0 * l] {
        let cfg = MeasureScanConfig {
            centers: Centers::OnSupport { count: 40 },
            radii: vec![0.02, 0.04, 0.08, 0.16],
            samples: 200_000,
            seed: 7,
        };
        let r = measure_scan(&a, tau, 12, &cfg)?;
        println!(
            "tau = {tau:.4}: {:?}, local exponent {:.3} (R^2 {:.3}), predicted {:.3}, dropped {:?}",
            r.regime, r.fitted_local_exponent, r.r_squared, r.predicted_exponent, r.dropped_radii
        );
    }
    Ok(())
}
