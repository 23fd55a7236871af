//! Construct RHG lattices and inspect their structure.
//!
//! ```text
//! cargo run --release --example build_lattice
//! ```

use hrhg::lattice::{build_lattice, BoundaryConvention, Parity, SignConvention};

fn main() -> Result<(), hrhg::Error> {
    for (d, boundary) in [
        (3usize, BoundaryConvention::Open),
        (3, BoundaryConvention::PeriodicTransverse),
        (5, BoundaryConvention::PeriodicTransverse),
    ] {
        let lattice = build_lattice(d, boundary, SignConvention::AllPlus)?;
        let duals = lattice
            .nodes()
            .iter()
            .filter(|n| n.parity == Parity::Dual)
            .count();
        println!(
            "d = {d}, {boundary:?}: {} nodes ({} primal, {duals} dual), {} checks, surface of {} qubits",
            lattice.node_count(),
            lattice.primal_qubits().len(),
            lattice.stabilizers().len(),
            lattice.correlation_surface().len(),
        );
    }

    // The line-oriented export: `node <id> <x> <y> <z> <P|D>` then
    // `edge <i> <j> <sign>`.
    let small = build_lattice(2, BoundaryConvention::Open, SignConvention::AllPlus)?;
    println!("\nd = 2 export excerpt:");
    for line in small.export_text().lines().take(8) {
        println!("  {line}");
    }
    Ok(())
}
