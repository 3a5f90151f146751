//! Closed-form dimensions across tau, planar and three-dimensional.

use torrec::dimension::{dim_2d, dim_3d_example, generic_upper_bound, LogConvention};

fn main() -> torrec::Result<()> {
    let l = ((3.0 + 5f64.sqrt()) / 2.0).ln();
    println!("{:>6} {:>8} {:>26} {:>8} {:>8}", "tau", "dim", "branch", "bound", "m=3");
    for i in 1..=12 {
        let tau = 0.25 * i as f64;
        let d = dim_2d(l, tau)?;
        let g = generic_upper_bound(&[0.0, l], tau, LogConvention::Growth)?;
        let d3 = dim_3d_example(3, l, tau)?;
        println!("{tau:6.2} {:8.5} {:>26} {:8.5} {:8.5}", d.value, d.branch, g.value, d3.value);
    }
    Ok(())
}
