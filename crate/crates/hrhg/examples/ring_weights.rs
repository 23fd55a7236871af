//! Monte Carlo behind the constant matching weights: how often a ring of
//! binned outcomes around a node with m infinitely squeezed neighbors
//! violates the joint parity.
//!
//! ```text
//! cargo run --release --example ring_weights
//! ```

use hrhg::experiment::ring_parity_violation;

fn main() -> Result<(), hrhg::Error> {
    let trials = 1_000_000;
    println!("{:>2} {:>10} (+- stderr)", "m", "violation");
    for m in 1..=4 {
        let p = ring_parity_violation(m, trials, 123)?;
        let se = (p * (1.0 - p) / trials as f64).sqrt();
        println!("{m:>2} {p:>10.5} (+- {se:.5})");
    }
    println!("\nreference weights used by the matching graph: 1/4, 1/3, 2/5");
    Ok(())
}
