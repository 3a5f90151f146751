//! Periodic points of the cat map: the exact lattice, its group structure
//! and agreement with the brute-force oracle.

use torrec::periodic::{brute_force_periodic, enumerate_periodic, periodic_structure, DEFAULT_CAP};
use torrec::IntMatrix;

fn main() -> torrec::Result<()> {
    let a = IntMatrix::from_rows([[2, 1], [1, 1]]);
    for n in 1..=8 {
        let set = enumerate_periodic(&a, n, DEFAULT_CAP)?;
        let structure = periodic_structure(&a, n)?;
        let oracle = brute_force_periodic(&a, n)?;
        let invariants: Vec<String> = structure.invariants.iter().map(|d| d.to_string()).collect();
        println!(
            "n = {n}: {:5} points, Z/{} , oracle agrees: {}",
            set.len(),
            invariants.join(" x Z/"),
            set.same_points(&oracle)
        );
    }
    let set = enumerate_periodic(&a, 2, DEFAULT_CAP)?;
    for i in 0..set.len() {
        println!("  {}", set.point_strings(i).join(", "));
    }
    Ok(())
}
