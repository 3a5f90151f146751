//! Box-counting slopes of `R_3 u ... u R_9` for the cat map, next to the
//! closed-form dimension.
//!
//! `cargo run --release --example box_counting [exact|probes]`

use torrec::dimension::dim_2d;
use torrec::estimators::{box_count, BoxCountConfig, Occupancy};
use torrec::spectral::validate_hyperbolic;
use torrec::IntMatrix;

fn main() -> torrec::Result<()> {
    let occupancy = match std::env::args().nth(1).as_deref() {
        Some("exact") => Occupancy::Exact,
        _ => Occupancy::default(),
    };
    let a: IntMatrix = "2,1;1,1".parse()?;
    let l = validate_hyperbolic(&a)?.log_abs_lambda2;
    for tau in [2.0 * l, 0.5 * l] {
        let cfg = BoxCountConfig { n_start: 3, n_end: 9, j_min: 4, j_max: 11, window: None, occupancy };
        let t = std::time::Instant::now();
        let r = box_count(&a, tau, &cfg)?;
        println!("tau = {tau:.4}  target s0 = {:.4}", dim_2d(l, tau)?.value);
        for (j, c) in r.levels.iter().zip(&r.counts) {
            println!("  j = {j:2}  boxes = {c}");
        }
        println!(
            "  slope {:.4} over j in {:?}, R^2 = {:.4}, {:.1?}",
            r.fitted_slope, r.fit_window, r.r_squared, t.elapsed()
        );
        for w in &r.warnings {
            println!("  warning: {w:?}");
        }
    }
    Ok(())
}
