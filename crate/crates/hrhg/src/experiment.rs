//! Memory trials: sample, decode, recover, and score against the X
//! correlation surface; batch estimation of logical failure rates; the
//! ring-parity Monte Carlo behind the constant matching weights.

use std::sync::Mutex;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::inner::{decode_inner, InnerVariant};
use crate::lattice::{build_lattice, BoundaryConvention, Lattice, SignConvention};
use crate::noise::{assign_states, sample_homodyne};
use crate::outer::{
    apply_recovery, build_decoding_graph, matching_graph, mwpm, recovery, syndrome, WeightMode,
};
use crate::rng::{Purpose, Stream};
use crate::ROOT_PI;

/// Everything that determines a single trial.
#[derive(Debug, Clone, Copy)]
pub struct TrialConfig {
    pub d: usize,
    /// Noise variance parameter; 0 selects the infinite-squeezing mode.
    pub delta: f64,
    pub p0: f64,
    pub inner: InnerVariant,
    pub weights: WeightMode,
    pub boundary: BoundaryConvention,
    pub signs: SignConvention,
    pub master_seed: u64,
    pub trial_index: u64,
}

impl TrialConfig {
    /// Threshold-run defaults: standard binning, analog weights, transverse
    /// torus, all-plus signs.
    pub fn new(d: usize, delta: f64, p0: f64) -> Self {
        TrialConfig {
            d,
            delta,
            p0,
            inner: InnerVariant::StandardOnly,
            weights: WeightMode::Analog,
            boundary: BoundaryConvention::PeriodicTransverse,
            signs: SignConvention::AllPlus,
            master_seed: 0,
            trial_index: 0,
        }
    }

    pub fn delta_db(&self) -> f64 {
        crate::db_from_delta(self.delta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrialOutcome {
    Success,
    Failure,
}

/// One full error-correction trial. Success iff the residual operator
/// (decoded bits xor recovery flips) has even parity over the correlation
/// surface; an unsatisfied check after recovery aborts as a bug.
pub fn run_trial(lattice: &Lattice, cfg: &TrialConfig) -> Result<TrialOutcome> {
    run_trial_injected(lattice, cfg, &[], &[])
}

/// `run_trial` with extra bit flips injected before decoding, for the
/// frame-consistency checks.
///
/// `inject_rings` lists dual nodes whose full primal neighborhood is
/// flipped; these are cluster-state stabilizers, so they leave the syndrome
/// and the trial outcome exactly unchanged. `inject_stabilizers` flips
/// six-body check qubit sets instead; those act as genuine extra errors
/// around the cell, which the decoder absorbs on otherwise clean trials.
pub fn run_trial_injected(
    lattice: &Lattice,
    cfg: &TrialConfig,
    inject_rings: &[usize],
    inject_stabilizers: &[usize],
) -> Result<TrialOutcome> {
    if lattice.distance() != cfg.d {
        return Err(Error::DimensionMismatch {
            expected: cfg.d,
            got: lattice.distance(),
        });
    }
    if lattice.boundary() != cfg.boundary || lattice.sign_convention() != cfg.signs {
        return Err(Error::Invariant(
            "lattice conventions disagree with the trial config".to_string(),
        ));
    }
    let assignment = assign_states(lattice, cfg.p0, cfg.master_seed, cfg.trial_index)?;
    let sample = sample_homodyne(
        lattice,
        &assignment,
        cfg.delta,
        cfg.master_seed,
        cfg.trial_index,
    )?;
    let mut bits = decode_inner(lattice, &assignment, &sample, cfg.inner)?;
    for &u in inject_rings {
        if lattice.node(u)?.parity != crate::lattice::Parity::Dual {
            return Err(Error::InvalidNode(u));
        }
        for &(q, _) in lattice.neighbors(u)? {
            bits.bits[q] ^= 1;
        }
    }
    for &s in inject_stabilizers {
        let stab = lattice
            .stabilizers()
            .get(s)
            .ok_or(Error::InvalidNode(s))?;
        for &q in &stab.qubits {
            bits.bits[q] ^= 1;
        }
    }
    let dg = build_decoding_graph(lattice, &assignment, &sample, cfg.delta, cfg.weights)?;
    let syn = syndrome(lattice, &bits)?;
    let mg = matching_graph(&dg, &syn)?;
    let matching = mwpm(&mg)?;
    let rec = recovery(&dg, &mg, &matching);
    let fixed = apply_recovery(lattice, &bits, &rec);
    if !syndrome(lattice, &fixed)?.defects.is_empty() {
        return Err(Error::Invariant(
            "post-recovery syndrome not empty".to_string(),
        ));
    }
    let parity = lattice
        .correlation_surface()
        .iter()
        .fold(0u8, |acc, &q| acc ^ fixed.bits[q]);
    Ok(if parity == 0 {
        TrialOutcome::Success
    } else {
        TrialOutcome::Failure
    })
}

/// Aggregated Monte Carlo batch.
#[derive(Debug, Clone, Serialize)]
pub struct TrialBatch {
    pub d: usize,
    pub p0: f64,
    pub delta: f64,
    /// Squeezing in dB; absent in the infinite-squeezing mode.
    pub delta_db: Option<f64>,
    pub inner: &'static str,
    pub weights: &'static str,
    pub trials: u64,
    pub failures: u64,
    pub p_fail: f64,
    pub stderr: f64,
    pub master_seed: u64,
    /// Fewer than 25 failure events seen.
    pub low_confidence: bool,
}

impl TrialBatch {
    fn from_counts(cfg: &TrialConfig, trials: u64, failures: u64) -> TrialBatch {
        let p = failures as f64 / trials as f64;
        TrialBatch {
            d: cfg.d,
            p0: cfg.p0,
            delta: cfg.delta,
            delta_db: (cfg.delta > 0.0).then(|| cfg.delta_db()),
            inner: cfg.inner.token(),
            weights: cfg.weights.token(),
            trials,
            failures,
            p_fail: p,
            stderr: (p * (1.0 - p) / trials as f64).sqrt(),
            master_seed: cfg.master_seed,
            low_confidence: failures < 25,
        }
    }
}

/// Run `trials` independent trials of `cfg` across a worker pool. Trials are
/// keyed by index, so the tally is identical for any worker count.
pub fn estimate_rate(
    lattice: &Lattice,
    cfg: &TrialConfig,
    trials: u64,
    workers: usize,
) -> Result<TrialBatch> {
    if trials == 0 {
        return Err(Error::InsufficientData("trials must be positive".into()));
    }
    let workers = workers.max(1).min(trials as usize);
    let failures = Mutex::new(0u64);
    let first_err: Mutex<Option<Error>> = Mutex::new(None);
    std::thread::scope(|scope| {
        let chunk = trials.div_ceil(workers as u64);
        for w in 0..workers as u64 {
            let lo = w * chunk;
            let hi = ((w + 1) * chunk).min(trials);
            if lo >= hi {
                continue;
            }
            let failures = &failures;
            let first_err = &first_err;
            scope.spawn(move || {
                let mut local = 0u64;
                for t in lo..hi {
                    let mut c = *cfg;
                    c.trial_index = t;
                    match run_trial(lattice, &c) {
                        Ok(TrialOutcome::Failure) => local += 1,
                        Ok(TrialOutcome::Success) => {}
                        Err(e) => {
                            *first_err.lock().unwrap() = Some(e);
                            return;
                        }
                    }
                }
                *failures.lock().unwrap() += local;
            });
        }
    });
    if let Some(e) = first_err.into_inner().unwrap() {
        return Err(e);
    }
    let failures = failures.into_inner().unwrap();
    Ok(TrialBatch::from_counts(cfg, trials, failures))
}

/// Convenience: build the lattice for `cfg` and estimate.
pub fn estimate_rate_cfg(cfg: &TrialConfig, trials: u64, workers: usize) -> Result<TrialBatch> {
    let lattice = build_lattice(cfg.d, cfg.boundary, cfg.signs)?;
    estimate_rate(&lattice, cfg, trials, workers)
}

/// Monte Carlo for the parity-violation probability of a node ring with `m`
/// infinitely squeezed neighbors: draw `m` uniform displacements over one
/// period, bin their sum and each separately, and count odd total parity.
pub fn ring_parity_violation(m: usize, trials: u64, master_seed: u64) -> Result<f64> {
    if !(1..=4).contains(&m) {
        return Err(Error::InsufficientData(format!(
            "ring size m must be in 1..=4, got {m}"
        )));
    }
    if trials == 0 {
        return Err(Error::InsufficientData("trials must be positive".into()));
    }
    let mut violations = 0u64;
    for t in 0..trials {
        let mut s = Stream::keyed(master_seed, Purpose::RingParity, t, m as u64);
        let mut sum = 0.0f64;
        let mut parity = 0u8;
        for _ in 0..m {
            let disp = s.uniform() * 2.0 * ROOT_PI;
            sum += disp;
            parity ^= crate::inner::standard_bin(disp);
        }
        parity ^= crate::inner::standard_bin(sum);
        violations += parity as u64;
    }
    Ok(violations as f64 / trials as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inner::BitOutcome;
    use crate::outer;

    fn lat(d: usize) -> Lattice {
        build_lattice(
            d,
            BoundaryConvention::PeriodicTransverse,
            SignConvention::AllPlus,
        )
        .unwrap()
    }

    #[test]
    fn zero_noise_always_succeeds() {
        let l = lat(3);
        for t in 0..20 {
            let mut cfg = TrialConfig::new(3, 0.0, 0.0);
            cfg.master_seed = 5;
            cfg.trial_index = t;
            assert_eq!(run_trial(&l, &cfg).unwrap(), TrialOutcome::Success);
        }
    }

    #[test]
    fn ring_injection_is_invisible() {
        // Cluster-stabilizer flips preserve the syndrome, so the outcome is
        // exactly unchanged on arbitrary noisy trials.
        let l = lat(3);
        let duals: Vec<usize> = l
            .nodes()
            .iter()
            .filter(|n| n.parity == crate::lattice::Parity::Dual)
            .map(|n| n.id)
            .collect();
        for t in 0..30 {
            let mut cfg = TrialConfig::new(3, crate::delta_from_db(11.0), 0.08);
            cfg.master_seed = 9;
            cfg.trial_index = t;
            let plain = run_trial(&l, &cfg).unwrap();
            let ring = duals[(t as usize * 13) % duals.len()];
            let ring2 = duals[(t as usize * 29 + 5) % duals.len()];
            let injected = run_trial_injected(&l, &cfg, &[ring, ring2], &[]).unwrap();
            assert_eq!(plain, injected, "trial {t} rings {ring},{ring2}");
        }
    }

    #[test]
    fn cell_injection_on_clean_trials_succeeds() {
        // With no other noise, a flipped six-body check away from the sinks
        // reads as a local error cluster the decoder removes completely. (On
        // sink-adjacent cells of small codes the six flips exceed the
        // correction guarantee and legitimately flush to the boundary.)
        let l = lat(5);
        let interior: Vec<usize> = l
            .stabilizers()
            .iter()
            .filter(|s| s.center.x > 1 && s.center.x < l.x_max() - 1)
            .map(|s| s.id)
            .collect();
        assert!(!interior.is_empty());
        for (t, &stab) in interior.iter().enumerate() {
            let mut cfg = TrialConfig::new(5, 0.0, 0.0);
            cfg.master_seed = 10;
            cfg.trial_index = t as u64;
            let out = run_trial_injected(&l, &cfg, &[], &[stab]).unwrap();
            assert_eq!(out, TrialOutcome::Success, "stab {stab}");
        }
    }

    #[test]
    fn spanning_chain_bypassing_decoder_fails_parity() {
        // A syndrome-free chain crossing the surface once flips the logical
        // readout; the decoder sees nothing to correct.
        let l = lat(3);
        let chain = l.spanning_chain(1, 1).unwrap();
        let mut bits = BitOutcome {
            bits: vec![0; l.node_count()],
        };
        for &q in &chain {
            bits.bits[q] = 1;
        }
        assert!(outer::syndrome(&l, &bits).unwrap().defects.is_empty());
        let parity = l
            .correlation_surface()
            .iter()
            .fold(0u8, |acc, &q| acc ^ bits.bits[q]);
        assert_eq!(parity, 1);
    }

    #[test]
    fn estimate_rate_rejects_zero_trials() {
        let l = lat(2);
        let cfg = TrialConfig::new(2, 0.05, 0.0);
        assert!(estimate_rate(&l, &cfg, 0, 2).is_err());
    }

    #[test]
    fn estimate_rate_deterministic_across_worker_counts() {
        let l = lat(2);
        let mut cfg = TrialConfig::new(2, crate::delta_from_db(9.0), 0.1);
        cfg.master_seed = 31;
        let a = estimate_rate(&l, &cfg, 400, 1).unwrap();
        let b = estimate_rate(&l, &cfg, 400, 3).unwrap();
        assert_eq!(a.failures, b.failures);
        let c = estimate_rate(&l, &cfg, 400, 2).unwrap();
        assert_eq!(a.failures, c.failures);
        // stderr formula.
        let p = a.p_fail;
        assert!((a.stderr - (p * (1.0 - p) / 400.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn noisier_delta_fails_more() {
        let l = lat(3);
        let mut hot = TrialConfig::new(3, crate::delta_from_db(8.0), 0.0);
        hot.master_seed = 77;
        let mut cold = hot;
        cold.delta = crate::delta_from_db(13.0);
        let ph = estimate_rate(&l, &hot, 300, 2).unwrap().p_fail;
        let pc = estimate_rate(&l, &cold, 300, 2).unwrap().p_fail;
        assert!(
            ph > pc,
            "8 dB should fail more than 13 dB: {ph} vs {pc}"
        );
    }

    #[test]
    fn ring_parity_values() {
        assert_eq!(ring_parity_violation(1, 20_000, 3).unwrap(), 0.0);
        let p2 = ring_parity_violation(2, 40_000, 3).unwrap();
        assert!((p2 - 0.25).abs() < 0.01, "m=2: {p2}");
        let p3 = ring_parity_violation(3, 40_000, 3).unwrap();
        assert!((p3 - 1.0 / 3.0).abs() < 0.012, "m=3: {p3}");
        let p4 = ring_parity_violation(4, 40_000, 3).unwrap();
        assert!((p4 - 0.4).abs() < 0.012, "m=4: {p4}");
        assert!(ring_parity_violation(0, 10, 1).is_err());
        assert!(ring_parity_violation(5, 10, 1).is_err());
    }

    #[test]
    fn sign_convention_failure_rates_agree() {
        // The per-dual gauge convention must reproduce the all-plus failure
        // statistics within Monte Carlo error under standard binning.
        let trials = 600;
        let mut cfg = TrialConfig::new(3, crate::delta_from_db(10.0), 0.05);
        cfg.master_seed = 99;
        let l_plus = lat(3);
        let a = estimate_rate(&l_plus, &cfg, trials, 2).unwrap();
        let l_gauge = build_lattice(
            3,
            BoundaryConvention::PeriodicTransverse,
            SignConvention::DualParity,
        )
        .unwrap();
        cfg.signs = SignConvention::DualParity;
        let b = estimate_rate(&l_gauge, &cfg, trials, 2).unwrap();
        let sigma = (a.stderr.powi(2) + b.stderr.powi(2)).sqrt().max(1e-6);
        assert!(
            (a.p_fail - b.p_fail).abs() <= 3.0 * sigma,
            "{} vs {} (sigma {sigma})",
            a.p_fail,
            b.p_fail
        );
    }

    #[test]
    fn batch_serializes() {
        let cfg = TrialConfig::new(3, 0.1, 0.05);
        let b = TrialBatch::from_counts(&cfg, 100, 7);
        let json = serde_json::to_string(&b).unwrap();
        assert!(json.contains("\"failures\":7"));
        let cfg0 = TrialConfig::new(3, 0.0, 0.2);
        let b0 = TrialBatch::from_counts(&cfg0, 10, 1);
        assert!(serde_json::to_string(&b0).unwrap().contains("\"delta_db\":null"));
    }
}
