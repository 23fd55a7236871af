//! Multiplexing arithmetic for probabilistic heralded state sources: how
//! many devices and switches a target supply probability costs.

use serde::Serialize;

use crate::error::{Error, Result};

/// Hardware requirements for one multiplexed source bank.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MuxPlan {
    /// Per-device heralding probability.
    pub p_gbs: f64,
    /// Target swap-out probability: the bank fails to supply a state with
    /// probability at most `p0`.
    pub p0: f64,
    /// Minimal device count with `(1 - p_gbs)^n <= p0`.
    pub n_gbs: u64,
    /// Binary switch-tree depth `ceil(log2(n_gbs + 1))`.
    pub depth: u32,
    /// Total 2x2 switches, `2^depth - 1`.
    pub switches: u64,
}

/// Size the multiplexer for the requested supply probability.
pub fn plan_mux(p_gbs: f64, p0: f64) -> Result<MuxPlan> {
    if !(p_gbs > 0.0 && p_gbs < 1.0) {
        return Err(Error::InvalidProbability("p_gbs", p_gbs));
    }
    if !(p0 > 0.0 && p0 < 1.0) {
        return Err(Error::InvalidProbability("p0", p0));
    }
    let fail = 1.0 - p_gbs;
    let mut n = if p0 >= fail {
        1
    } else {
        (p0.ln() / fail.ln()).ceil() as u64
    };
    // Guard the closed form against floating-point edges: enforce
    // (1-p)^(n-1) > p0 >= (1-p)^n exactly as evaluated.
    while fail.powi(n as i32) > p0 {
        n += 1;
    }
    while n > 1 && fail.powi(n as i32 - 1) <= p0 {
        n -= 1;
    }
    let depth = (n + 1).next_power_of_two().trailing_zeros();
    Ok(MuxPlan {
        p_gbs,
        p0,
        n_gbs: n,
        depth,
        switches: (1u64 << depth) - 1,
    })
}
