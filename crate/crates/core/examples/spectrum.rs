//! Validate a few matrices and print their exact spectral data.
//!
//! `cargo run --example spectrum -- "3,1;1,1"`

use torrec::spectral::{classify, count_h_n, Hyperbolic};
use torrec::IntMatrix;

fn main() {
    let given: Vec<String> = std::env::args().skip(1).collect();
    let inputs = if given.is_empty() {
        ["2,1;1,1", "2,1;1,0", "1,1;0,1", "5,0,0;0,2,1;0,1,1"].map(String::from).to_vec()
    } else {
        given
    };
    for text in inputs {
        let a: IntMatrix = match text.parse() {
            Ok(a) => a,
            Err(e) => {
                println!("{text}: {e}");
                continue;
            }
        };
        match classify(&a) {
            Ok(Hyperbolic::Planar(s)) => {
                println!("{a}: lambda1 = {}, lambda2 = {}", s.lambda1, s.lambda2);
                println!("    gamma = {}, c1 = {:.6}", s.gamma, s.c1);
                let h: Vec<String> = (1..=6).map(|n| count_h_n(&a, n).unwrap().to_string()).collect();
                println!("    H_1..6 = {}", h.join(", "));
            }
            Ok(Hyperbolic::Block3d(b)) => {
                println!("{a}: m = {}, lambda = {}, log m = {:.6}", b.m, b.lambda, b.log_m);
            }
            Err(e) => println!("{a}: {e}"),
        }
    }
}
