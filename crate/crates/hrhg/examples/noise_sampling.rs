//! Sample homodyne outcomes and compare their statistics against the
//! analytic momentum covariance.
//!
//! ```text
//! cargo run --release --example noise_sampling
//! ```

use hrhg::lattice::{build_lattice, BoundaryConvention, SignConvention};
use hrhg::noise::{assign_states, momentum_covariance, sample_homodyne};

fn main() -> Result<(), hrhg::Error> {
    let lattice = build_lattice(3, BoundaryConvention::Open, SignConvention::AllPlus)?;
    let delta = hrhg::delta_from_db(12.0);
    let seed = 7;
    let assignment = assign_states(&lattice, 0.1, seed, 0)?;
    println!(
        "d = 3 lattice, 12 dB, p0 = 0.1: {} of {} nodes swapped out",
        assignment.swapped_count(),
        assignment.len()
    );

    let cov = momentum_covariance(&lattice, &assignment, delta)?;
    let trials = 20_000u64;
    let probe = [(0usize, 0usize), (0, 2), (5, 5)];
    let mut acc = [0.0f64; 3];
    for t in 0..trials {
        let s = sample_homodyne(&lattice, &assignment, delta, seed, t)?;
        for (k, &(i, j)) in probe.iter().enumerate() {
            acc[k] += s.p[i] * s.p[j];
        }
    }
    println!("covariance entries, empirical vs analytic over {trials} samples:");
    for (k, &(i, j)) in probe.iter().enumerate() {
        println!(
            "  Sigma[{i}][{j}]: {:+.5} vs {:+.5}",
            acc[k] / trials as f64,
            cov.get(i, j)
        );
    }
    Ok(())
}
