//! Logical failure-rate estimation at a single noise point.
//!
//! ```text
//! cargo run --release --example memory_failure_rate
//! ```

use hrhg::experiment::{estimate_rate_cfg, TrialConfig};

fn main() -> Result<(), hrhg::Error> {
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get());
    println!("{:>3} {:>9} {:>9} {:>10}", "d", "p_fail", "stderr", "failures");
    for d in [3usize, 5] {
        let mut cfg = TrialConfig::new(d, hrhg::delta_from_db(11.5), 0.0);
        cfg.master_seed = 2;
        let batch = estimate_rate_cfg(&cfg, 4000, workers)?;
        println!(
            "{d:>3} {:>9.4} {:>9.4} {:>10}{}",
            batch.p_fail,
            batch.stderr,
            batch.failures,
            if batch.low_confidence {
                "  (fewer than 25 failures)"
            } else {
                ""
            }
        );
    }
    Ok(())
}
