//! Covering counts per strategy and partial Hausdorff sums either side of
//! the dimension.

use torrec::dimension::{covering_counts, covering_exponent, dim_2d, hausdorff_partial_sum, strategies_for};
use torrec::spectral::classify;
use torrec::IntMatrix;

fn main() -> torrec::Result<()> {
    let a = IntMatrix::from_rows([[2, 1], [1, 1]]);
    let h = classify(&a)?;
    let l = ((3.0 + 5f64.sqrt()) / 2.0).ln();
    for tau in [0.5 * l, 2.0 * l] {
        let s0 = dim_2d(l, tau)?.value;
        println!("tau = {tau:.4}, s0 = {s0:.4}");
        for st in strategies_for(&h) {
            let row = covering_counts(&h, tau, 20, st)?;
            let e = covering_exponent(&h, tau, st, 10, 30)?;
            println!(
                "  {:>10}: n = 20 radius {:.3e} count {:.3e}; exponent {e:.4}",
                st.name(),
                row.radius(),
                row.count()
            );
        }
        for s in [s0 - 0.1, s0 + 0.1] {
            let r = hausdorff_partial_sum(&h, tau, s, 10, 40)?;
            println!("  s = {s:.3}: sum {:.4e}, ratio {:.4}, {:?}", r.partial_sum, r.ratio, r.classification);
        }
    }
    Ok(())
}
