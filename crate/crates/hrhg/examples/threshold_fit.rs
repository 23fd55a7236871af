//! Small squeezing-threshold scan with the finite-size scaling fit. A desk
//! demo of the full pipeline; production runs use larger trial counts.
//!
//! ```text
//! cargo run --release --example threshold_fit
//! ```

use hrhg::experiment::{estimate_rate_cfg, TrialConfig};
use hrhg::fit::{fit_threshold, FitPoint, SweepAxis};

fn main() -> Result<(), hrhg::Error> {
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get());
    let trials = 2_000;
    let mut points = Vec::new();
    println!("sweeping squeezing at p0 = 0, {trials} trials per point");
    for d in [3usize, 5, 7] {
        for i in 0..5 {
            let db = 10.2 + 0.3 * i as f64;
            let mut cfg = TrialConfig::new(d, hrhg::delta_from_db(db), 0.0);
            cfg.master_seed = 99;
            let b = estimate_rate_cfg(&cfg, trials, workers)?;
            println!("  d={d} {db:.1} dB: p_fail {:.4}", b.p_fail);
            points.push(FitPoint::from_batch(SweepAxis::DeltaDb, &b));
        }
    }
    let est = fit_threshold(SweepAxis::DeltaDb, &points, 100, 1)?;
    println!(
        "\nfitted crossing {:.2} dB (95% CI {:.2}..{:.2}), nu = {:.2}",
        est.x_c, est.ci_low, est.ci_high, est.nu
    );
    Ok(())
}
