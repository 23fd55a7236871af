//! Hybrid-state noise model: state assignment, covariance propagation through
//! the CZ pattern, and homodyne sampling.
//!
//! Each node starts as an ideal codeword state plus Gaussian displacement
//! noise: variance `delta/2` in both quadratures for GKP nodes, and
//! `1/(2*delta)` in q (with `delta/2` in p) for swapped-out p-squeezed nodes.
//! The CZ pattern maps `p -> p + A q`, so the measured momenta pick up the
//! neighbors' q displacements and the momentum covariance becomes
//! `delta/2 * I + A Sigma_x A^T`. Sampling works directly in the Heisenberg
//! picture with the ideal outcome fixed at the zero vector, making the noise
//! displacement itself the error at each node.

use crate::error::{Error, Result};
use crate::lattice::{Lattice, NodeId};
use crate::rng::{Purpose, Stream};
use crate::ROOT_PI;

/// Noise parameters of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseConfig {
    /// Peak-width variance parameter, `delta >= 0`; `0` selects the
    /// infinite-squeezing degenerate mode.
    pub delta: f64,
    /// Swap-out probability.
    pub p0: f64,
}

impl NoiseConfig {
    pub fn new(delta: f64, p0: f64) -> Result<Self> {
        if !delta.is_finite() || delta < 0.0 {
            return Err(Error::InvalidDelta(delta));
        }
        if !(0.0..=1.0).contains(&p0) {
            return Err(Error::InvalidProbability("p0", p0));
        }
        Ok(NoiseConfig { delta, p0 })
    }

    pub fn from_db(delta_db: f64, p0: f64) -> Result<Self> {
        Self::new(crate::delta_from_db(delta_db), p0)
    }

    pub fn delta_db(&self) -> f64 {
        crate::db_from_delta(self.delta)
    }
}

/// Kind of state occupying a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateKind {
    Gkp,
    PSqueezed,
}

/// Per-node state assignment, reproducible from its seed.
#[derive(Debug, Clone)]
pub struct StateAssignment {
    kinds: Vec<StateKind>,
    master_seed: u64,
    trial: u64,
}

impl StateAssignment {
    pub fn kind(&self, id: NodeId) -> StateKind {
        self.kinds[id]
    }

    pub fn kinds(&self) -> &[StateKind] {
        &self.kinds
    }

    pub fn len(&self) -> usize {
        self.kinds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kinds.is_empty()
    }

    pub fn seed(&self) -> (u64, u64) {
        (self.master_seed, self.trial)
    }

    pub fn swapped_count(&self) -> usize {
        self.kinds
            .iter()
            .filter(|&&k| k == StateKind::PSqueezed)
            .count()
    }

    /// Assignment built from an explicit kind vector (tests and worked
    /// examples).
    pub fn from_kinds(kinds: Vec<StateKind>) -> Self {
        StateAssignment {
            kinds,
            master_seed: 0,
            trial: 0,
        }
    }
}

/// Draw independent Bernoulli(p0) swap-outs for every node.
pub fn assign_states(
    lattice: &Lattice,
    p0: f64,
    master_seed: u64,
    trial: u64,
) -> Result<StateAssignment> {
    if !(0.0..=1.0).contains(&p0) {
        return Err(Error::InvalidProbability("p0", p0));
    }
    let kinds = (0..lattice.node_count())
        .map(|id| {
            let mut s = Stream::keyed(master_seed, Purpose::Assign, trial, id as u64);
            if s.uniform() < p0 {
                StateKind::PSqueezed
            } else {
                StateKind::Gkp
            }
        })
        .collect();
    Ok(StateAssignment {
        kinds,
        master_seed,
        trial,
    })
}

/// Sparse symmetric momentum covariance over all modes.
#[derive(Debug, Clone)]
pub struct MomentumCovariance {
    n: usize,
    /// Row-wise `(col, value)` entries with `col >= row` (upper triangle).
    rows: Vec<Vec<(usize, f64)>>,
}

impl MomentumCovariance {
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Entry lookup (symmetric).
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (r, c) = if i <= j { (i, j) } else { (j, i) };
        self.rows[r]
            .iter()
            .find(|&&(col, _)| col == c)
            .map_or(0.0, |&(_, v)| v)
    }

    pub fn upper_rows(&self) -> &[Vec<(usize, f64)>] {
        &self.rows
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut m = vec![vec![0.0; self.n]; self.n];
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, v) in row {
                m[i][j] = v;
                m[j][i] = v;
            }
        }
        m
    }
}

fn q_variance(kind: StateKind, delta: f64) -> f64 {
    match kind {
        StateKind::Gkp => delta / 2.0,
        StateKind::PSqueezed => 1.0 / (2.0 * delta),
    }
}

/// Analytic momentum covariance `delta/2 * I + A Sigma_x A^T` for the lattice
/// under the given assignment.
pub fn momentum_covariance(
    lattice: &Lattice,
    assignment: &StateAssignment,
    delta: f64,
) -> Result<MomentumCovariance> {
    if !delta.is_finite() || delta <= 0.0 {
        return Err(Error::InvalidDelta(delta));
    }
    if assignment.len() != lattice.node_count() {
        return Err(Error::DimensionMismatch {
            expected: lattice.node_count(),
            got: assignment.len(),
        });
    }
    let n = lattice.node_count();
    let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for i in 0..n {
        // Diagonal: own p noise plus every neighbor's q noise.
        let mut diag = delta / 2.0;
        for &(j, _) in lattice.neighbors(i)? {
            diag += q_variance(assignment.kind(j), delta);
        }
        rows[i].push((i, diag));
        // Off-diagonal: modes sharing a neighbor j pick up correlated noise
        // sign(i,j) * sign(k,j) * var_q(j). Two-hop sparsity only.
        let mut acc: std::collections::BTreeMap<usize, f64> = Default::default();
        for &(j, sij) in lattice.neighbors(i)? {
            for &(k, skj) in lattice.neighbors(j)? {
                if k > i {
                    *acc.entry(k).or_default() +=
                        (sij as f64) * (skj as f64) * q_variance(assignment.kind(j), delta);
                }
            }
        }
        for (k, v) in acc {
            if v != 0.0 {
                rows[i].push((k, v));
            }
        }
    }
    Ok(MomentumCovariance { n, rows })
}

/// Homodyne outcomes for one trial, indexed by node id.
#[derive(Debug, Clone)]
pub struct HomodyneSample {
    pub p: Vec<f64>,
}

impl HomodyneSample {
    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }
}

/// Sample momenta in the Heisenberg picture: per-node displacements
/// `(xi_q, xi_p)` from the initial covariance, then `p_i = xi_p_i +
/// sum_j sign(i,j) xi_q_j`.
///
/// At `delta = 0` the GKP displacements vanish and each p-squeezed q
/// displacement is drawn uniformly over one `2*sqrt(pi)` period, the
/// distributional limit that binning can see.
pub fn sample_homodyne(
    lattice: &Lattice,
    assignment: &StateAssignment,
    delta: f64,
    master_seed: u64,
    trial: u64,
) -> Result<HomodyneSample> {
    if !delta.is_finite() || delta < 0.0 {
        return Err(Error::InvalidDelta(delta));
    }
    if assignment.len() != lattice.node_count() {
        return Err(Error::DimensionMismatch {
            expected: lattice.node_count(),
            got: assignment.len(),
        });
    }
    let n = lattice.node_count();
    let mut xi_q = vec![0.0; n];
    let mut xi_p = vec![0.0; n];
    for id in 0..n {
        let mut s = Stream::keyed(master_seed, Purpose::Displacement, trial, id as u64);
        if delta == 0.0 {
            if assignment.kind(id) == StateKind::PSqueezed {
                xi_q[id] = s.uniform() * 2.0 * ROOT_PI;
            }
        } else {
            xi_q[id] = s.normal(q_variance(assignment.kind(id), delta).sqrt());
            xi_p[id] = s.normal((delta / 2.0).sqrt());
        }
    }
    let mut p = xi_p;
    for id in 0..n {
        let mut acc = 0.0;
        for &(j, sign) in lattice.neighbors(id)? {
            acc += sign as f64 * xi_q[j];
        }
        p[id] += acc;
    }
    Ok(HomodyneSample { p })
}

/// Small dense symmetric matrix with a Cholesky-based quadratic form, used
/// for responsibilities on few-mode systems.
#[derive(Debug, Clone)]
pub struct DenseSym {
    n: usize,
    m: Vec<Vec<f64>>,
    chol: Vec<Vec<f64>>,
}

impl DenseSym {
    pub fn new(m: Vec<Vec<f64>>) -> Result<Self> {
        let n = m.len();
        for row in &m {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: row.len(),
                });
            }
        }
        let mut l = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..=i {
                let mut sum = m[i][j];
                for k in 0..j {
                    sum -= l[i][k] * l[j][k];
                }
                if i == j {
                    if sum <= 0.0 {
                        return Err(Error::SingularCovariance);
                    }
                    l[i][j] = sum.sqrt();
                } else {
                    l[i][j] = sum / l[j][j];
                }
            }
        }
        Ok(DenseSym { n, m, chol: l })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.m[i][j]
    }

    /// `v^T M^{-1} v` via forward substitution on the Cholesky factor.
    pub fn quadform_inv(&self, v: &[f64]) -> Result<f64> {
        if v.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: v.len(),
            });
        }
        let mut w = vec![0.0; self.n];
        for i in 0..self.n {
            let mut sum = v[i];
            for k in 0..i {
                sum -= self.chol[i][k] * w[k];
            }
            w[i] = sum / self.chol[i][i];
        }
        Ok(w.iter().map(|x| x * x).sum())
    }
}

/// Gaussian responsibility of the lattice point `n*sqrt(pi)` for outcome `p`:
/// `exp[-1/2 (n*sqrt(pi) - p)^T Sigma^{-1} (n*sqrt(pi) - p)]`, all peaks
/// weighted equally.
pub fn responsibility(p: &[f64], n: &[i64], sigma: &DenseSym) -> Result<f64> {
    if p.len() != n.len() {
        return Err(Error::DimensionMismatch {
            expected: p.len(),
            got: n.len(),
        });
    }
    let resid: Vec<f64> = n
        .iter()
        .zip(p.iter())
        .map(|(&ni, &pi)| ni as f64 * ROOT_PI - pi)
        .collect();
    Ok((-0.5 * sigma.quadform_inv(&resid)?).exp())
}

/// The standalone star system from the worked five-mode example: one
/// p-squeezed center connected to `k` GKP neighbors with the given signs.
pub fn star_covariance(delta: f64, signs: &[i8]) -> Result<DenseSym> {
    if delta <= 0.0 {
        return Err(Error::InvalidDelta(delta));
    }
    let k = signs.len();
    let n = k + 1;
    let mut m = vec![vec![0.0; n]; n];
    // Center: own p noise + k GKP neighbor q noises.
    m[0][0] = delta / 2.0 + k as f64 * delta / 2.0;
    for i in 1..=k {
        m[i][i] = delta / 2.0 + 1.0 / (2.0 * delta);
        for j in (i + 1)..=k {
            let v = signs[i - 1] as f64 * signs[j - 1] as f64 / (2.0 * delta);
            m[i][j] = v;
            m[j][i] = v;
        }
    }
    DenseSym::new(m)
}

/// Sample the star system directly: `p_center = xi_p + sum_j s_j xi_q_j`,
/// `p_j = xi_p_j + s_j xi_q_center`.
pub fn sample_star(delta: f64, signs: &[i8], stream: &mut Stream) -> Vec<f64> {
    let k = signs.len();
    let xi_q_center = stream.normal((1.0 / (2.0 * delta)).sqrt());
    let mut p = vec![0.0; k + 1];
    p[0] = stream.normal((delta / 2.0).sqrt());
    for j in 0..k {
        let xi_q_j = stream.normal((delta / 2.0).sqrt());
        p[0] += signs[j] as f64 * xi_q_j;
        p[j + 1] = stream.normal((delta / 2.0).sqrt()) + signs[j] as f64 * xi_q_center;
    }
    p
}

/// Export sampled outcomes as debug CSV rows `trial_id,node_id,p_value`.
pub fn sample_csv(trial: u64, sample: &HomodyneSample) -> String {
    let mut out = String::with_capacity(sample.len() * 24);
    for (id, v) in sample.p.iter().enumerate() {
        out.push_str(&format!("{trial},{id},{v}\n"));
    }
    out
}
