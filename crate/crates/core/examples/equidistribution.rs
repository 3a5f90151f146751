//! Continued fraction, badly-approximable constant and discrepancy of `(n gamma)`.

use torrec::equidist::{
    badly_approximable_constant, continued_fraction, counting_function, liminf_proxy, separation_constant,
    star_discrepancy,
};
use torrec::spectral::validate_hyperbolic;
use torrec::IntMatrix;

fn main() -> torrec::Result<()> {
    let a = IntMatrix::from_rows([[3, 1], [1, 1]]);
    let s = validate_hyperbolic(&a)?;
    let cf = continued_fraction(&s.gamma, 12)?;
    let quotients: Vec<String> = cf.partial_quotients.iter().map(|q| q.to_string()).collect();
    println!("gamma = {} = [{}]", s.gamma, quotients.join("; "));
    println!("period length {:?}, preperiod {:?}", cf.period().map(|p| p.len()), cf.preperiod);
    println!("min q||q gamma||, q <= 1e9: {:.9}", badly_approximable_constant(&s.gamma, 1_000_000_000)?);
    println!("liminf proxy: {:.9}", liminf_proxy(&s.gamma, 1_000_000_000)?);
    println!("separation constant c2 = {:.6}", separation_constant(&s)?);
    for k in 2..=6 {
        let n = 10u64.pow(k);
        let d = star_discrepancy(&s.gamma, n)?;
        let c = counting_function(&s.gamma, 0.25, 0.5, n)?;
        println!("N = 1e{k}: D* = {d:.3e}, N D*/log N = {:.4}, count in [1/4, 1/2) = {}", n as f64 * d / (n as f64).ln(), c.count);
    }
    Ok(())
}
