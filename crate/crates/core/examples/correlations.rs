//! Concurrence and quantum discord of the Werner-state qubit pair as the
//! decoherence factor |D| drops from 1 to 0.
//!
//!     cargo run --example correlations

use resetcorr::correlations::{concurrence, quantum_discord, werner_classical_term};

fn main() {
    let a_values = [0.2, 1.0 / 3.0, 0.6, 0.9, 1.0];
    print!("{:>6}", "|D|");
    for a in a_values {
        print!("  C(a={a:.2})  QD(a={a:.2})");
    }
    println!();
    for i in (0..=10).rev() {
        let d = i as f64 / 10.0;
        print!("{d:>6.2}");
        for a in a_values {
            print!("  {:>9.5}  {:>10.5}", concurrence(a, d), quantum_discord(a, d));
        }
        println!();
    }
    println!();
    // Below a = 1/3 the pair is never entangled, yet discord survives.
    for a in a_values {
        println!("a = {a:.3}: classical term f(a) = {:.5}", werner_classical_term(a));
    }
}
