//! Shape of one component of `R_n` and the separation of its translates.

use torrec::equidist::separation_constant;
use torrec::geometry::{
    circumscribed_disjoint, component_geometry, min_disjoint_n, regime, separation_profile, ComponentShape,
};
use torrec::periodic::{enumerate_periodic, DEFAULT_CAP};
use torrec::spectral::validate_hyperbolic;
use torrec::IntMatrix;

fn main() -> torrec::Result<()> {
    let a = IntMatrix::from_rows([[2, 1], [1, 1]]);
    let s = validate_hyperbolic(&a)?;
    let c2 = separation_constant(&s)?;
    for tau in [0.5 * s.log_abs_lambda2, 2.0 * s.log_abs_lambda2] {
        let n = min_disjoint_n(tau).max(4);
        let points = enumerate_periodic(&a, n, DEFAULT_CAP)?;
        let c = component_geometry(&s, tau, n, &points.rational_point(1))?;
        println!("tau = {tau:.4}, n = {n}, {:?}", regime(s.log_abs_lambda2, tau));
        println!("  centre {:?}", c.center);
        println!(
            "  semi-axes {:.3e} (stable), {:.3e} (unstable)",
            c.shape.semi_axis_major, c.shape.semi_axis_minor
        );
        println!("  inscribed {:?}", c.inscribed);
        println!("  circumscribed {:?}", c.circumscribed);
        let shape = ComponentShape::new(&s, tau, n)?;
        println!("  circumscribed parallelograms disjoint: {}", circumscribed_disjoint(&shape));
        println!("  {:?}", separation_profile(&s, tau, n, c2)?);
    }
    Ok(())
}
