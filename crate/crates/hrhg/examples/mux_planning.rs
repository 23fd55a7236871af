//! Multiplexer sizing for probabilistic heralded sources.
//!
//! ```text
//! cargo run --release --example mux_planning
//! ```

use hrhg::mux::plan_mux;

fn main() -> Result<(), hrhg::Error> {
    println!(
        "{:>8} {:>8} {:>9} {:>6} {:>9}",
        "p_gbs", "p0", "devices", "depth", "switches"
    );
    for (p_gbs, p0) in [
        (0.021, 0.01),
        (0.021, 0.05),
        (0.021, 0.133),
        (0.004, 0.01),
        (0.5, 0.5),
    ] {
        let plan = plan_mux(p_gbs, p0)?;
        println!(
            "{:>8} {:>8} {:>9} {:>6} {:>9}",
            plan.p_gbs, plan.p0, plan.n_gbs, plan.depth, plan.switches
        );
    }
    Ok(())
}
