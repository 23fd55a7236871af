//! Inner decoder: real homodyne outcomes to qubit bits.
//!
//! `standard_bin` rounds each outcome to the nearest `sqrt(pi)` multiple and
//! reads its parity. The correlation-aware variant improves on this around
//! isolated swapped-out nodes: the center's big q displacement pushes all of
//! its neighbors' momenta jointly, so an integer change of basis decouples
//! one noisy direction from well-resolved ones, and parity consistency rules
//! recover the joint shift instead of four independent errors. The module
//! also provides per-qubit error probabilities consumed by the outer decoder.

use crate::error::{Error, Result};
use crate::lattice::{Lattice, NodeId};
use crate::noise::{HomodyneSample, StateAssignment, StateKind};
use crate::ROOT_PI;

/// Bit outcomes per node, same indexing as the homodyne sample.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitOutcome {
    pub bits: Vec<u8>,
}

/// Inner decoding strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InnerVariant {
    /// Standard binning on every node.
    #[default]
    StandardOnly,
    /// Neighborhood decoding around isolated swapped-out nodes, standard
    /// binning elsewhere.
    Algorithm2,
}

impl InnerVariant {
    pub fn token(&self) -> &'static str {
        match self {
            InnerVariant::StandardOnly => "standard",
            InnerVariant::Algorithm2 => "algorithm2",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(InnerVariant::StandardOnly),
            "algorithm2" => Ok(InnerVariant::Algorithm2),
            other => Err(Error::Config(format!("unknown inner decoder `{other}`"))),
        }
    }
}

/// Index of the nearest integer multiple of `sqrt(pi)`; exact ties break
/// toward the even multiple.
fn bin_index(z: f64) -> i64 {
    let x = z / ROOT_PI;
    let lo = x.floor();
    let frac = x - lo;
    let lo = lo as i64;
    if frac > 0.5 {
        lo + 1
    } else if frac < 0.5 {
        lo
    } else if lo % 2 == 0 {
        lo
    } else {
        lo + 1
    }
}

/// Standard binning: parity of the nearest `sqrt(pi)` multiple.
pub fn standard_bin(z: f64) -> u8 {
    (bin_index(z).rem_euclid(2)) as u8
}

/// Nearest integer to `x` congruent to an allowed residue mod `modulus`;
/// ties break toward the even candidate, then the smaller.
fn nearest_with_residues(x: f64, residues: &[i64], modulus: i64) -> i64 {
    let mut best: Option<(f64, i64)> = None;
    for &r in residues {
        let base = ((x - r as f64) / modulus as f64).round() as i64;
        for cand in [r + modulus * (base - 1), r + modulus * base, r + modulus * (base + 1)] {
            let dist = (cand as f64 - x).abs();
            let better = match best {
                None => true,
                Some((bd, bc)) => {
                    dist < bd - 1e-12
                        || ((dist - bd).abs() <= 1e-12
                            && (cand.rem_euclid(2), cand) < (bc.rem_euclid(2), bc))
                }
            };
            if better {
                best = Some((dist, cand));
            }
        }
    }
    best.expect("residue list nonempty").1
}

/// Change-of-basis frame around an isolated swapped-out node.
///
/// Row 0 passes the center through; rows 1..=k act on the neighbors with an
/// integer block whose first row is the sign vector (the one noisy joint
/// quadrature) and whose remaining rows are sign-adjusted low-noise
/// combinations. For k = 4 the block is a Hadamard matrix, `H H^T = 4 I`.
#[derive(Debug, Clone)]
pub struct NeighborhoodFrame {
    pub center: NodeId,
    pub neighbors: Vec<NodeId>,
    pub signs: Vec<i8>,
    /// `(k+1) x (k+1)` integer change of basis.
    pub t_matrix: Vec<Vec<i64>>,
}

/// Unsigned neighbor block rows for each supported degree.
fn base_block(k: usize) -> Vec<Vec<i64>> {
    match k {
        4 => vec![
            vec![1, 1, 1, 1],
            vec![1, 1, -1, -1],
            vec![1, -1, 1, -1],
            vec![1, -1, -1, 1],
        ],
        3 => vec![vec![1, 1, 1], vec![1, 1, -1], vec![1, -1, 1]],
        2 => vec![vec![1, 1], vec![1, -1]],
        _ => panic!("frame degree {k} unsupported"),
    }
}

impl NeighborhoodFrame {
    /// Frame over `k in 2..=4` neighbors with CZ signs.
    pub fn new(center: NodeId, neighbors: Vec<NodeId>, signs: Vec<i8>) -> Result<Self> {
        let k = neighbors.len();
        if !(2..=4).contains(&k) || signs.len() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                got: signs.len(),
            });
        }
        let block = base_block(k);
        let mut t = vec![vec![0i64; k + 1]; k + 1];
        t[0][0] = 1;
        for i in 0..k {
            for j in 0..k {
                t[i + 1][j + 1] = block[i][j] * signs[j] as i64;
            }
        }
        Ok(NeighborhoodFrame {
            center,
            neighbors,
            signs,
            t_matrix: t,
        })
    }

    fn degree(&self) -> usize {
        self.neighbors.len()
    }

    /// Apply the basis change to real data.
    fn forward(&self, p: &[f64]) -> Vec<f64> {
        let n = self.degree() + 1;
        (0..n)
            .map(|i| (0..n).map(|j| self.t_matrix[i][j] as f64 * p[j]).sum())
            .collect()
    }

    /// Invert the basis change on an integer vector; `None` when the
    /// consistency rules were not met.
    fn invert(&self, n_prime: &[i64]) -> Option<Vec<i64>> {
        let k = self.degree();
        let block = base_block(k);
        // Solve block^T-scaled systems exactly: for k in {2, 4} the block is
        // orthogonal with norm k; k = 3 uses the explicit inverse rows.
        let mut m = vec![0i64; k];
        match k {
            4 | 2 => {
                for j in 0..k {
                    let mut acc = 0i64;
                    for (i, row) in block.iter().enumerate() {
                        acc += row[j] * n_prime[i + 1];
                    }
                    if acc.rem_euclid(k as i64) != 0 {
                        return None;
                    }
                    m[j] = acc / k as i64;
                }
            }
            3 => {
                let pairs = [
                    n_prime[2] + n_prime[3],
                    n_prime[1] - n_prime[3],
                    n_prime[1] - n_prime[2],
                ];
                for (j, v) in pairs.iter().enumerate() {
                    if v.rem_euclid(2) != 0 {
                        return None;
                    }
                    m[j] = v / 2;
                }
            }
            _ => unreachable!(),
        }
        let mut out = vec![0i64; k + 1];
        out[0] = n_prime[0];
        for j in 0..k {
            out[j + 1] = self.signs[j] as i64 * m[j];
        }
        Some(out)
    }
}

/// Neighborhood decoding: change basis, bin the decoupled center, round the
/// best-resolved low-noise coordinate, propagate its parity to the others,
/// constrain the noisy coordinate so the basis inverts over the integers,
/// then reduce mod 2.
pub fn algorithm2_decode(frame: &NeighborhoodFrame, p: &[f64]) -> Result<Vec<u8>> {
    let k = frame.degree();
    if p.len() != k + 1 {
        return Err(Error::DimensionMismatch {
            expected: k + 1,
            got: p.len(),
        });
    }
    let p_prime = frame.forward(p);
    let mut n_prime = vec![0i64; k + 1];
    n_prime[0] = bin_index(p_prime[0]);

    // Most confident of the low-noise coordinates (rows 2..=k).
    let mut best_i = 2usize;
    let mut best_dist = f64::INFINITY;
    for i in 2..=k {
        let x = p_prime[i] / ROOT_PI;
        let dist = (x - x.round()).abs();
        if dist < best_dist {
            best_dist = dist;
            best_i = i;
        }
    }
    n_prime[best_i] = bin_index(p_prime[best_i]);
    let rho = n_prime[best_i].rem_euclid(2);

    // Remaining low-noise coordinates share the parity.
    for i in 2..=k {
        if i != best_i {
            n_prime[i] = nearest_with_residues(p_prime[i] / ROOT_PI, &[rho], 2);
        }
    }

    // Noisy coordinate: the residue that makes T invertible over Z.
    n_prime[1] = match k {
        4 => {
            let s: i64 = n_prime[2] + n_prime[3] + n_prime[4];
            nearest_with_residues(p_prime[1] / ROOT_PI, &[(-s).rem_euclid(4)], 4)
        }
        3 | 2 => nearest_with_residues(p_prime[1] / ROOT_PI, &[rho], 2),
        _ => unreachable!(),
    };

    let n = frame
        .invert(&n_prime)
        .ok_or_else(|| Error::Invariant("consistency rules left a non-integer point".into()))?;
    Ok(n.iter().map(|v| (v.rem_euclid(2)) as u8).collect())
}

/// Per-qubit heuristic error probability.
///
/// Constant for two or more swapped neighbors; otherwise the probability
/// that standard binning with effective variance parameter `delta_tilde`
/// lands on the wrong parity, folded so the value stays in `(0, 1/2]`. Sums
/// run over peaks within 4 of the nearest one.
pub fn weight(z: f64, m: usize, delta_tilde: f64) -> f64 {
    match m {
        4.. => 0.4,
        3 => 1.0 / 3.0,
        2 => 0.25,
        _ => {
            if delta_tilde <= 0.0 {
                return 0.0;
            }
            let n0 = bin_index(z);
            let own = n0.rem_euclid(2);
            // Stabilize by factoring out the dominant term.
            let expo =
                |n: i64| -> f64 { -(z - n as f64 * ROOT_PI) * (z - n as f64 * ROOT_PI) / delta_tilde };
            let peak = expo(n0);
            let mut wrong = 0.0;
            let mut all = 0.0;
            for n in (n0 - 4)..=(n0 + 4) {
                let t = (expo(n) - peak).exp();
                all += t;
                if n.rem_euclid(2) != own {
                    wrong += t;
                }
            }
            wrong / all
        }
    }
}

/// Effective binning variance parameter for a primal qubit: own p noise plus
/// one q-noise share per GKP neighbor. A single swapped neighbor is excluded
/// because its joint shift acts as a stabilizer, not an error.
pub fn delta_tilde(
    lattice: &Lattice,
    assignment: &StateAssignment,
    delta: f64,
    node: NodeId,
) -> Result<f64> {
    let gkp = lattice
        .neighbors(node)?
        .iter()
        .filter(|&&(j, _)| assignment.kind(j) == StateKind::Gkp)
        .count();
    Ok(delta * (1.0 + gkp as f64))
}

/// Number of swapped-out neighbors of a node.
pub fn swapped_neighbors(
    lattice: &Lattice,
    assignment: &StateAssignment,
    node: NodeId,
) -> Result<usize> {
    Ok(lattice
        .neighbors(node)?
        .iter()
        .filter(|&&(j, _)| assignment.kind(j) == StateKind::PSqueezed)
        .count())
}

/// A swapped node is isolated when nothing within graph distance 2 is also
/// swapped; only those get a neighborhood frame, which keeps frames disjoint.
fn is_isolated_center(lattice: &Lattice, assignment: &StateAssignment, u: NodeId) -> bool {
    let Ok(nbrs) = lattice.neighbors(u) else {
        return false;
    };
    for &(j, _) in nbrs {
        if assignment.kind(j) == StateKind::PSqueezed {
            return false;
        }
        for &(w, _) in lattice.neighbors(j).unwrap() {
            if w != u && assignment.kind(w) == StateKind::PSqueezed {
                return false;
            }
        }
    }
    true
}

/// Decode every node's outcome to a bit.
pub fn decode_inner(
    lattice: &Lattice,
    assignment: &StateAssignment,
    sample: &HomodyneSample,
    variant: InnerVariant,
) -> Result<BitOutcome> {
    if sample.len() != lattice.node_count() {
        return Err(Error::DimensionMismatch {
            expected: lattice.node_count(),
            got: sample.len(),
        });
    }
    let mut bits: Vec<u8> = sample.p.iter().map(|&z| standard_bin(z)).collect();
    if variant == InnerVariant::Algorithm2 {
        for u in 0..lattice.node_count() {
            if assignment.kind(u) != StateKind::PSqueezed
                || !is_isolated_center(lattice, assignment, u)
            {
                continue;
            }
            let row = lattice.neighbors(u)?;
            if row.len() < 2 {
                // Degenerate frames reduce to standard binning.
                continue;
            }
            let neighbors: Vec<NodeId> = row.iter().map(|e| e.0).collect();
            let signs: Vec<i8> = row.iter().map(|e| e.1).collect();
            let frame = NeighborhoodFrame::new(u, neighbors.clone(), signs)?;
            let mut p = Vec::with_capacity(row.len() + 1);
            p.push(sample.p[u]);
            p.extend(neighbors.iter().map(|&j| sample.p[j]));
            let decoded = algorithm2_decode(&frame, &p)?;
            bits[u] = decoded[0];
            for (slot, &j) in neighbors.iter().enumerate() {
                bits[j] = decoded[slot + 1];
            }
        }
    }
    Ok(BitOutcome { bits })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_lattice, BoundaryConvention, Coord, SignConvention};
    use crate::noise::sample_star;
    use crate::rng::{Purpose, Stream};

    #[test]
    fn standard_bin_values() {
        assert_eq!(standard_bin(0.0), 0);
        assert_eq!(standard_bin(ROOT_PI), 1);
        assert_eq!(standard_bin(0.6 * ROOT_PI), 1);
        assert_eq!(standard_bin(-0.6 * ROOT_PI), 1);
        assert_eq!(standard_bin(2.2 * ROOT_PI), 0);
        // Exact ties go to the even multiple.
        assert_eq!(standard_bin(0.5 * ROOT_PI), 0);
        assert_eq!(standard_bin(1.5 * ROOT_PI), 0);
    }

    #[test]
    fn standard_bin_periodic_and_even() {
        let mut s = Stream::keyed(5, Purpose::Test, 0, 0);
        for _ in 0..2000 {
            let z = (s.uniform() - 0.5) * 20.0;
            assert_eq!(standard_bin(z), standard_bin(z + 2.0 * ROOT_PI));
            assert_eq!(standard_bin(z), standard_bin(-z));
        }
    }

    #[test]
    fn frame_hadamard_property() {
        let f = NeighborhoodFrame::new(0, vec![1, 2, 3, 4], vec![1, -1, 1, -1]).unwrap();
        // Lower-right block times its transpose is 4I.
        for i in 1..=4 {
            for j in 1..=4 {
                let dot: i64 = (1..=4).map(|c| f.t_matrix[i][c] * f.t_matrix[j][c]).sum();
                assert_eq!(dot, if i == j { 4 } else { 0 });
            }
        }
    }

    #[test]
    fn frame_roundtrip_integrality() {
        // T^-1 (T n) = n for integer points, any degree and signs.
        let mut s = Stream::keyed(6, Purpose::Test, 0, 0);
        for k in 2..=4usize {
            let signs: Vec<i8> = (0..k).map(|i| if i % 2 == 0 { 1 } else { -1 }).collect();
            let f = NeighborhoodFrame::new(0, (1..=k).collect(), signs).unwrap();
            for _ in 0..200 {
                let n: Vec<i64> = (0..=k).map(|_| (s.next_u64() % 9) as i64 - 4).collect();
                let forwarded: Vec<i64> = (0..=k)
                    .map(|i| (0..=k).map(|j| f.t_matrix[i][j] * n[j]).sum())
                    .collect();
                assert_eq!(f.invert(&forwarded).unwrap(), n);
            }
        }
    }

    #[test]
    fn worked_five_mode_example() {
        let f = NeighborhoodFrame::new(0, vec![1, 2, 3, 4], vec![1, 1, 1, 1]).unwrap();
        let p = [
            0.0,
            0.8 * ROOT_PI,
            0.8 * ROOT_PI,
            0.8 * ROOT_PI,
            0.8 * ROOT_PI,
        ];
        // Change of basis sends this to (0, 3.2*sqrt(pi), 0, 0, 0); the mod-4
        // rule forces the noisy coordinate to 4, giving the four-ring.
        let bits = algorithm2_decode(&f, &p).unwrap();
        assert_eq!(bits, vec![0, 1, 1, 1, 1]);
    }

    #[test]
    fn sub_threshold_center_shift_decodes_to_zero() {
        let f = NeighborhoodFrame::new(0, vec![1, 2, 3, 4], vec![1, 1, 1, 1]).unwrap();
        let p = [0.45 * ROOT_PI, 0.0, 0.0, 0.0, 0.0];
        assert_eq!(algorithm2_decode(&f, &p).unwrap(), vec![0, 0, 0, 0, 0]);
    }

    #[test]
    fn ring_shift_invariance() {
        // Shifting the center's q displacement by a full period changes the
        // neighbor bits by the complete ring or not at all.
        let delta = crate::delta_from_db(12.0);
        let signs = [1i8, 1, 1, 1];
        let f = NeighborhoodFrame::new(0, vec![1, 2, 3, 4], signs.to_vec()).unwrap();
        let mut s = Stream::keyed(8, Purpose::Test, 0, 0);
        for _ in 0..500 {
            let p = sample_star(delta, &signs, &mut s);
            let mut shifted = p.clone();
            for j in 1..=4 {
                shifted[j] += signs[j - 1] as f64 * 2.0 * ROOT_PI;
            }
            let a = algorithm2_decode(&f, &p).unwrap();
            let b = algorithm2_decode(&f, &shifted).unwrap();
            let xor: Vec<u8> = a.iter().zip(&b).map(|(x, y)| x ^ y).collect();
            assert!(
                xor == vec![0, 0, 0, 0, 0] || xor == vec![0, 1, 1, 1, 1],
                "xor {xor:?}"
            );
        }
    }

    #[test]
    fn weight_constants_and_reference_value() {
        assert_eq!(weight(1.23, 4, 0.5), 0.4);
        assert!((weight(-3.0, 3, 0.1) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(weight(0.0, 2, 0.9), 0.25);
        // Midpoint between parities.
        assert!((weight(0.5 * ROOT_PI, 0, 0.37) - 0.5).abs() < 1e-9);
        // z = 0, delta_tilde = 0.5: two odd terms exp(-2*pi) against a
        // denominator just above 1.
        let expect = {
            let odd = 2.0 * (-2.0 * std::f64::consts::PI).exp()
                + 2.0 * (-18.0 * std::f64::consts::PI).exp();
            let even = 1.0
                + 2.0 * (-8.0 * std::f64::consts::PI).exp()
                + 2.0 * (-32.0 * std::f64::consts::PI).exp();
            odd / (odd + even)
        };
        assert!((weight(0.0, 0, 0.5) - expect).abs() < 1e-12);
        assert!((expect - 0.00373).abs() < 2e-5);
    }

    #[test]
    fn weight_periodic_symmetric_bounded() {
        let mut s = Stream::keyed(9, Purpose::Test, 0, 0);
        for _ in 0..2000 {
            let z = (s.uniform() - 0.5) * 12.0;
            let dt = 0.05 + s.uniform();
            let w = weight(z, 0, dt);
            assert!(w > 0.0 && w <= 0.5 + 1e-12, "w {w}");
            let wp = weight(z + 2.0 * ROOT_PI, 0, dt);
            assert!((w - wp).abs() < 1e-9);
            // Symmetry about the nearest peak center.
            let n0 = (z / ROOT_PI).round();
            let mirrored = 2.0 * n0 * ROOT_PI - z;
            assert!((w - weight(mirrored, 0, dt)).abs() < 1e-9);
        }
    }

    #[test]
    fn delta_tilde_counting() {
        let l = build_lattice(3, BoundaryConvention::Open, SignConvention::AllPlus).unwrap();
        let delta = 0.08;
        // All GKP: interior qubit has 4 GKP neighbors.
        let a = StateAssignment::from_kinds(vec![StateKind::Gkp; l.node_count()]);
        let q = l.node_at(Coord::new(2, 3, 3)).unwrap();
        assert_eq!(l.neighbors(q).unwrap().len(), 4);
        assert!((delta_tilde(&l, &a, delta, q).unwrap() - 5.0 * delta).abs() < 1e-15);
        // One swapped neighbor drops out of the count.
        let mut kinds = vec![StateKind::Gkp; l.node_count()];
        kinds[l.neighbors(q).unwrap()[0].0] = StateKind::PSqueezed;
        let a1 = StateAssignment::from_kinds(kinds);
        assert_eq!(swapped_neighbors(&l, &a1, q).unwrap(), 1);
        assert!((delta_tilde(&l, &a1, delta, q).unwrap() - 4.0 * delta).abs() < 1e-15);
        // Boundary qubits: a corner with 2 neighbors, an edge with 3.
        let b = l.node_at(Coord::new(0, 1, 1)).unwrap();
        assert_eq!(l.neighbors(b).unwrap().len(), 2);
        assert!((delta_tilde(&l, &a, delta, b).unwrap() - 3.0 * delta).abs() < 1e-15);
        let c = l.node_at(Coord::new(2, 1, 3)).unwrap();
        assert_eq!(l.neighbors(c).unwrap().len(), 3);
        assert!((delta_tilde(&l, &a, delta, c).unwrap() - 4.0 * delta).abs() < 1e-15);
    }

    #[test]
    fn decode_inner_agrees_without_swapouts() {
        let l = build_lattice(3, BoundaryConvention::Open, SignConvention::AllPlus).unwrap();
        let a = crate::noise::assign_states(&l, 0.0, 17, 0).unwrap();
        let s = crate::noise::sample_homodyne(&l, &a, 0.1, 17, 0).unwrap();
        let std = decode_inner(&l, &a, &s, InnerVariant::StandardOnly).unwrap();
        let alg = decode_inner(&l, &a, &s, InnerVariant::Algorithm2).unwrap();
        assert_eq!(std, alg);
        for (&bit, &z) in std.bits.iter().zip(&s.p) {
            assert_eq!(bit, standard_bin(z));
        }
    }

    #[test]
    fn small_outcomes_decode_to_zero() {
        let l = build_lattice(2, BoundaryConvention::Open, SignConvention::AllPlus).unwrap();
        let a = crate::noise::assign_states(&l, 0.3, 23, 1).unwrap();
        let p = vec![0.3; l.node_count()];
        let s = HomodyneSample { p };
        for v in [InnerVariant::StandardOnly, InnerVariant::Algorithm2] {
            let out = decode_inner(&l, &a, &s, v).unwrap();
            assert!(out.bits.iter().all(|&b| b == 0));
        }
    }

    #[test]
    fn frames_claim_disjoint_nodes() {
        // Plant two swapped nodes far apart; both get frames and the decoded
        // vector is well formed.
        let l = build_lattice(3, BoundaryConvention::Open, SignConvention::AllPlus).unwrap();
        let mut kinds = vec![StateKind::Gkp; l.node_count()];
        let u = l.node_at(Coord::new(2, 1, 1)).unwrap();
        let v = l.node_at(Coord::new(2, 5, 5)).unwrap();
        kinds[u] = StateKind::PSqueezed;
        kinds[v] = StateKind::PSqueezed;
        let a = StateAssignment::from_kinds(kinds);
        assert!(is_isolated_center(&l, &a, u));
        assert!(is_isolated_center(&l, &a, v));
        let s = crate::noise::sample_homodyne(&l, &a, 0.05, 31, 2).unwrap();
        let out = decode_inner(&l, &a, &s, InnerVariant::Algorithm2).unwrap();
        assert_eq!(out.bits.len(), l.node_count());
    }

    #[test]
    fn adjacent_swapouts_are_not_isolated() {
        let l = build_lattice(3, BoundaryConvention::Open, SignConvention::AllPlus).unwrap();
        let u = l.node_at(Coord::new(2, 3, 3)).unwrap();
        let w = l.neighbors(u).unwrap()[0].0;
        let mut kinds = vec![StateKind::Gkp; l.node_count()];
        kinds[u] = StateKind::PSqueezed;
        kinds[w] = StateKind::PSqueezed;
        let a = StateAssignment::from_kinds(kinds);
        assert!(!is_isolated_center(&l, &a, u));
        assert!(!is_isolated_center(&l, &a, w));
    }
}
