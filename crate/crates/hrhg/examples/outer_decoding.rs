//! One noisy memory trial decoded step by step: sample, bin, syndrome,
//! matching graph, minimum-weight matching, recovery.
//!
//! ```text
//! cargo run --release --example outer_decoding
//! ```

use hrhg::inner::{decode_inner, InnerVariant};
use hrhg::lattice::{build_lattice, BoundaryConvention, SignConvention};
use hrhg::noise::{assign_states, sample_homodyne};
use hrhg::outer::{
    apply_recovery, build_decoding_graph, dump_matching_graph, matching_graph, mwpm, recovery,
    syndrome, WeightMode,
};

fn main() -> Result<(), hrhg::Error> {
    let lattice = build_lattice(
        3,
        BoundaryConvention::PeriodicTransverse,
        SignConvention::AllPlus,
    )?;
    let delta = hrhg::delta_from_db(10.8);
    let (seed, trial) = (41, 2);

    let assignment = assign_states(&lattice, 0.05, seed, trial)?;
    let sample = sample_homodyne(&lattice, &assignment, delta, seed, trial)?;
    let bits = decode_inner(&lattice, &assignment, &sample, InnerVariant::StandardOnly)?;
    let graph = build_decoding_graph(&lattice, &assignment, &sample, delta, WeightMode::Analog)?;
    let syn = syndrome(&lattice, &bits)?;
    println!("{} unsatisfied checks", syn.defects.len());

    let mg = matching_graph(&graph, &syn)?;
    println!("\nmatching-graph dump (first lines):");
    for line in dump_matching_graph(&mg).lines().take(10) {
        println!("  {line}");
    }

    let matching = mwpm(&mg)?;
    println!("\nmatched {} pairs, total weight {}", matching.pairs.len(), matching.total_weight);
    let rec = recovery(&graph, &mg, &matching);
    println!("recovery flips {} qubits", rec.flips.len());

    let fixed = apply_recovery(&lattice, &bits, &rec);
    assert!(syndrome(&lattice, &fixed)?.defects.is_empty());
    let parity = lattice
        .correlation_surface()
        .iter()
        .fold(0u8, |acc, &q| acc ^ fixed.bits[q]);
    println!(
        "post-recovery syndrome clean; logical readout parity {} ({})",
        parity,
        if parity == 0 { "success" } else { "failure" }
    );
    Ok(())
}
