//! Outer (qubit-level) decoder: decoding graph, syndrome, shortest-path
//! matching graph, minimum-weight perfect matching and recovery extraction.
//!
//! Vertices of the decoding graph are the six-body checks plus the two x
//! boundaries; arcs correspond one-to-one with primal qubits. Arc weights are
//! `-log w` of the per-qubit error probability, integerized at a fixed scale
//! so shortest paths and the matching are exact integer computations and
//! reproducible across runs.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::inner::{delta_tilde, swapped_neighbors, weight, BitOutcome};
use crate::lattice::{ArcEnd, Lattice};
use crate::matching::min_weight_perfect_matching;
use crate::noise::{HomodyneSample, StateAssignment};

/// Fixed-point scale for integerized arc weights.
pub const WEIGHT_SCALE: f64 = 1e6;
/// Probability clamp keeping `-log w` finite.
pub const W_MIN: f64 = 1e-15;

/// Arc weight assignment policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WeightMode {
    /// Every arc costs the same.
    Uniform,
    /// `-log w(z, m, delta_tilde)` from the homodyne record.
    #[default]
    Analog,
}

impl WeightMode {
    pub fn token(&self) -> &'static str {
        match self {
            WeightMode::Uniform => "uniform",
            WeightMode::Analog => "analog",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(WeightMode::Uniform),
            "analog" => Ok(WeightMode::Analog),
            other => Err(Error::Config(format!("unknown weight mode `{other}`"))),
        }
    }
}

/// Weighted decoding graph for one trial.
#[derive(Debug, Clone)]
pub struct DecodingGraph {
    n_cells: usize,
    /// Per arc: its one or two cell ends and integer weight.
    arcs: Vec<(ArcEnd, ArcEnd, u64)>,
    /// Cell -> incident `(arc, far end)`.
    adjacency: Vec<Vec<(usize, ArcEnd)>>,
}

impl DecodingGraph {
    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn arc_weight(&self, arc: usize) -> u64 {
        self.arcs[arc].2
    }

    pub fn arc_ends(&self, arc: usize) -> (ArcEnd, ArcEnd) {
        (self.arcs[arc].0, self.arcs[arc].1)
    }
}

/// Assign arc weights from the trial record.
pub fn build_decoding_graph(
    lattice: &Lattice,
    assignment: &StateAssignment,
    sample: &HomodyneSample,
    delta: f64,
    mode: WeightMode,
) -> Result<DecodingGraph> {
    if sample.len() != lattice.node_count() {
        return Err(Error::DimensionMismatch {
            expected: lattice.node_count(),
            got: sample.len(),
        });
    }
    let n_cells = lattice.stabilizers().len();
    let mut arcs = Vec::with_capacity(lattice.primal_qubits().len());
    for (arc, &q) in lattice.primal_qubits().iter().enumerate() {
        let w_int = match mode {
            WeightMode::Uniform => WEIGHT_SCALE as u64,
            WeightMode::Analog => {
                let m = swapped_neighbors(lattice, assignment, q)?;
                let dt = delta_tilde(lattice, assignment, delta, q)?;
                let w = weight(sample.p[q], m, dt).clamp(W_MIN, 0.5);
                (-w.ln() * WEIGHT_SCALE).round() as u64
            }
        };
        let (a, b) = lattice.arc_ends()[arc];
        arcs.push((a, b, w_int));
    }
    let mut adjacency = vec![Vec::new(); n_cells];
    for (idx, &(a, b, _)) in arcs.iter().enumerate() {
        if let ArcEnd::Cell(c) = a {
            adjacency[c].push((idx, b));
        }
        if let ArcEnd::Cell(c) = b {
            adjacency[c].push((idx, a));
        }
    }
    Ok(DecodingGraph {
        n_cells,
        arcs,
        adjacency,
    })
}

/// Decoding graph from explicit per-arc integer weights (one per primal
/// qubit, arc order). Useful for decoder experiments and oracles.
pub fn decoding_graph_from_weights(lattice: &Lattice, weights: &[u64]) -> Result<DecodingGraph> {
    if weights.len() != lattice.primal_qubits().len() {
        return Err(Error::DimensionMismatch {
            expected: lattice.primal_qubits().len(),
            got: weights.len(),
        });
    }
    let n_cells = lattice.stabilizers().len();
    let arcs: Vec<(ArcEnd, ArcEnd, u64)> = lattice
        .arc_ends()
        .iter()
        .zip(weights)
        .map(|(&(a, b), &w)| (a, b, w))
        .collect();
    let mut adjacency = vec![Vec::new(); n_cells];
    for (idx, &(a, b, _)) in arcs.iter().enumerate() {
        if let ArcEnd::Cell(c) = a {
            adjacency[c].push((idx, b));
        }
        if let ArcEnd::Cell(c) = b {
            adjacency[c].push((idx, a));
        }
    }
    Ok(DecodingGraph {
        n_cells,
        arcs,
        adjacency,
    })
}

/// Unsatisfied checks of a bit record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Syndrome {
    /// Stabilizer ids with odd qubit parity, ascending.
    pub defects: Vec<usize>,
}

pub fn syndrome(lattice: &Lattice, bits: &BitOutcome) -> Result<Syndrome> {
    if bits.bits.len() != lattice.node_count() {
        return Err(Error::DimensionMismatch {
            expected: lattice.node_count(),
            got: bits.bits.len(),
        });
    }
    let defects = lattice
        .stabilizers()
        .iter()
        .filter(|s| s.qubits.iter().fold(0u8, |acc, &q| acc ^ bits.bits[q]) == 1)
        .map(|s| s.id)
        .collect();
    Ok(Syndrome { defects })
}

/// Shortest-path closure over the defects: pairwise distances, per-defect
/// boundary distances, and the arc paths realizing them.
#[derive(Debug, Clone)]
pub struct MatchingGraph {
    pub defects: Vec<usize>,
    /// Dense defect-by-defect distance matrix.
    pub pair_dist: Vec<Vec<u64>>,
    /// Distance from each defect to its nearest boundary.
    pub boundary_dist: Vec<u64>,
    /// Arc paths between defect pairs, populated for i < j.
    pair_paths: Vec<Vec<Vec<usize>>>,
    /// Arc path from each defect to its nearest boundary.
    boundary_paths: Vec<Vec<usize>>,
}

struct ShortestPaths {
    dist: Vec<u64>,
    /// Arc taken into each cell.
    pred: Vec<Option<(usize, usize)>>,
    boundary_dist: u64,
    /// Last cell and arc on the best boundary route.
    boundary_hop: Option<(usize, usize)>,
}

/// Dijkstra from one source cell over the decoding graph; the two x sinks
/// count as a single absorbing boundary.
fn dijkstra(dg: &DecodingGraph, source: usize) -> ShortestPaths {
    let mut dist = vec![u64::MAX; dg.n_cells];
    let mut pred: Vec<Option<(usize, usize)>> = vec![None; dg.n_cells];
    let mut boundary_dist = u64::MAX;
    let mut boundary_hop = None;
    let mut heap: BinaryHeap<Reverse<(u64, usize)>> = BinaryHeap::new();
    dist[source] = 0;
    heap.push(Reverse((0, source)));
    while let Some(Reverse((d, u))) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        for &(arc, far) in &dg.adjacency[u] {
            let nd = d + dg.arcs[arc].2;
            match far {
                ArcEnd::Cell(v) => {
                    if nd < dist[v] {
                        dist[v] = nd;
                        pred[v] = Some((u, arc));
                        heap.push(Reverse((nd, v)));
                    }
                }
                ArcEnd::XLow | ArcEnd::XHigh => {
                    if nd < boundary_dist {
                        boundary_dist = nd;
                        boundary_hop = Some((u, arc));
                    }
                }
            }
        }
    }
    ShortestPaths {
        dist,
        pred,
        boundary_dist,
        boundary_hop,
    }
}

fn trace_path(sp: &ShortestPaths, mut cell: usize, source: usize) -> Vec<usize> {
    let mut arcs = Vec::new();
    while cell != source {
        let (prev, arc) = sp.pred[cell].expect("path exists in a connected graph");
        arcs.push(arc);
        cell = prev;
    }
    arcs
}

/// Defect-sourced shortest paths; errors when the decoding graph leaves a
/// defect unreachable (a construction bug, not noise).
pub fn matching_graph(dg: &DecodingGraph, syn: &Syndrome) -> Result<MatchingGraph> {
    let m = syn.defects.len();
    let mut pair_dist = vec![vec![0u64; m]; m];
    let mut boundary_dist = vec![0u64; m];
    let mut pair_paths: Vec<Vec<Vec<usize>>> = vec![vec![Vec::new(); m]; m];
    let mut boundary_paths: Vec<Vec<usize>> = vec![Vec::new(); m];
    for (i, &src) in syn.defects.iter().enumerate() {
        let sp = dijkstra(dg, src);
        for (j, &dst) in syn.defects.iter().enumerate() {
            if i < j {
                if sp.dist[dst] == u64::MAX {
                    return Err(Error::Invariant(format!(
                        "decoding graph disconnected between cells {src} and {dst}"
                    )));
                }
                pair_dist[i][j] = sp.dist[dst];
                pair_dist[j][i] = sp.dist[dst];
                let mut arcs = trace_path(&sp, dst, src);
                arcs.sort_unstable();
                pair_paths[i][j] = arcs;
            }
        }
        let Some((hop_cell, hop_arc)) = sp.boundary_hop else {
            return Err(Error::Invariant(format!(
                "no boundary route from cell {src}"
            )));
        };
        boundary_dist[i] = sp.boundary_dist;
        let mut arcs = trace_path(&sp, hop_cell, src);
        arcs.push(hop_arc);
        arcs.sort_unstable();
        boundary_paths[i] = arcs;
    }
    Ok(MatchingGraph {
        defects: syn.defects.clone(),
        pair_dist,
        boundary_dist,
        pair_paths,
        boundary_paths,
    })
}

/// Matched partner of a defect.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatchPartner {
    /// Index into the defect list.
    Defect(usize),
    Boundary,
}

/// Minimum-weight pairing of the defects.
#[derive(Debug, Clone)]
pub struct Matching {
    /// `(defect index, partner)`, each defect listed once.
    pub pairs: Vec<(usize, MatchPartner)>,
    pub total_weight: u64,
}

/// Run exact minimum-weight perfect matching over defects plus one virtual
/// boundary partner per defect (boundary-boundary edges are free).
pub fn mwpm(mg: &MatchingGraph) -> Result<Matching> {
    let m = mg.defects.len();
    if m == 0 {
        return Ok(Matching {
            pairs: Vec::new(),
            total_weight: 0,
        });
    }
    // Vertices: 0..m defects, m..2m boundary partners.
    let mut edges: Vec<(usize, usize, u64)> = Vec::with_capacity(m * m + m);
    for i in 0..m {
        for j in (i + 1)..m {
            edges.push((i, j, mg.pair_dist[i][j]));
        }
        edges.push((i, m + i, mg.boundary_dist[i]));
        for j in (i + 1)..m {
            edges.push((m + i, m + j, 0));
        }
    }
    let mate = min_weight_perfect_matching(2 * m, &edges)?;
    let mut pairs = Vec::new();
    let mut total = 0u64;
    for i in 0..m {
        let p = mate[i];
        if p >= m {
            if p != m + i {
                return Err(Error::Invariant(format!(
                    "defect {i} matched to foreign boundary partner {p}"
                )));
            }
            pairs.push((i, MatchPartner::Boundary));
            total += mg.boundary_dist[i];
        } else if i < p {
            pairs.push((i, MatchPartner::Defect(p)));
            total += mg.pair_dist[i][p];
        }
    }
    Ok(Matching {
        pairs,
        total_weight: total,
    })
}

/// Qubit flips reversing the matched error.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Recovery {
    /// Arc indices whose qubits get toggled.
    pub flips: Vec<usize>,
}

/// Symmetric difference of the matched pairs' shortest paths.
pub fn recovery(dg: &DecodingGraph, mg: &MatchingGraph, matching: &Matching) -> Recovery {
    let mut toggle = vec![0u8; dg.arc_count()];
    for &(i, partner) in &matching.pairs {
        let path = match partner {
            MatchPartner::Defect(j) => {
                let (a, b) = (i.min(j), i.max(j));
                &mg.pair_paths[a][b]
            }
            MatchPartner::Boundary => &mg.boundary_paths[i],
        };
        for &arc in path {
            toggle[arc] ^= 1;
        }
    }
    Recovery {
        flips: toggle
            .iter()
            .enumerate()
            .filter_map(|(arc, &t)| (t == 1).then_some(arc))
            .collect(),
    }
}

/// Apply recovery flips to a bit record.
pub fn apply_recovery(lattice: &Lattice, bits: &BitOutcome, rec: &Recovery) -> BitOutcome {
    let mut out = bits.clone();
    for &arc in &rec.flips {
        let q = lattice.primal_qubits()[arc];
        out.bits[q] ^= 1;
    }
    out
}

/// Debug dump: `defect <stab_id>` lines then `pair <u> <v> <weight>` lines
/// over defect ids (`b<i>` marks a boundary partner).
pub fn dump_matching_graph(mg: &MatchingGraph) -> String {
    let mut out = String::new();
    for &d in &mg.defects {
        writeln!(out, "defect {d}").unwrap();
    }
    let m = mg.defects.len();
    for i in 0..m {
        for j in (i + 1)..m {
            writeln!(
                out,
                "pair {} {} {}",
                mg.defects[i], mg.defects[j], mg.pair_dist[i][j]
            )
            .unwrap();
        }
        writeln!(out, "pair {} b{} {}", mg.defects[i], i, mg.boundary_dist[i]).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inner::{decode_inner, InnerVariant};
    use crate::lattice::{build_lattice, BoundaryConvention, Coord, SignConvention};
    use crate::noise::{assign_states, sample_homodyne, StateAssignment, StateKind};
    use crate::rng::{Purpose, Stream};

    fn lat(d: usize) -> Lattice {
        build_lattice(d, BoundaryConvention::Open, SignConvention::AllPlus).unwrap()
    }

    fn all_gkp(l: &Lattice) -> StateAssignment {
        StateAssignment::from_kinds(vec![StateKind::Gkp; l.node_count()])
    }

    fn zero_sample(l: &Lattice) -> HomodyneSample {
        HomodyneSample {
            p: vec![0.0; l.node_count()],
        }
    }

    fn uniform_graph(l: &Lattice) -> DecodingGraph {
        build_decoding_graph(l, &all_gkp(l), &zero_sample(l), 0.1, WeightMode::Uniform).unwrap()
    }

    #[test]
    fn arc_count_matches_primal_qubits() {
        for d in [2, 3, 4] {
            let l = lat(d);
            let dg = uniform_graph(&l);
            assert_eq!(dg.arc_count(), l.primal_qubits().len());
            assert!((0..dg.arc_count()).all(|a| dg.arc_weight(a) == WEIGHT_SCALE as u64));
        }
    }

    #[test]
    fn analog_weight_values() {
        let l = lat(3);
        let mut kinds = vec![StateKind::Gkp; l.node_count()];
        // Give one interior qubit four swapped neighbors: weight 2/5.
        let q = l.node_at(Coord::new(2, 3, 3)).unwrap();
        for &(j, _) in l.neighbors(q).unwrap() {
            kinds[j] = StateKind::PSqueezed;
        }
        let a = StateAssignment::from_kinds(kinds);
        let delta = crate::delta_from_db(15.0);
        let dg = build_decoding_graph(&l, &a, &zero_sample(&l), delta, WeightMode::Analog).unwrap();
        let arc = l.arc_of(q).unwrap();
        let expect = (-(0.4f64.ln()) * WEIGHT_SCALE).round() as u64;
        assert_eq!(dg.arc_weight(arc), expect);
        assert_eq!(expect, 916_291);
        // A clean qubit sitting exactly on a peak at 15 dB is expensive.
        let clean = l.node_at(Coord::new(4, 3, 3)).unwrap();
        let arc2 = l.arc_of(clean).unwrap();
        assert!(dg.arc_weight(arc2) > (10.0 * WEIGHT_SCALE) as u64);
    }

    #[test]
    fn syndrome_cases() {
        let l = lat(3);
        let zero = BitOutcome {
            bits: vec![0; l.node_count()],
        };
        assert!(syndrome(&l, &zero).unwrap().defects.is_empty());

        // One interior qubit flips exactly its two containing cells.
        let q = l.node_at(Coord::new(2, 3, 3)).unwrap();
        let mut bits = zero.clone();
        bits.bits[q] = 1;
        let syn = syndrome(&l, &bits).unwrap();
        assert_eq!(syn.defects.len(), 2);
        for &c in &syn.defects {
            assert!(l.stabilizers()[c].qubits.contains(&q));
        }

        // A four-ring around a dual edge is syndrome free.
        let mut ring_bits = zero.clone();
        let dual = l.node_at(Coord::new(3, 4, 3)).unwrap();
        let ring = l.neighbors(dual).unwrap();
        assert_eq!(ring.len(), 4);
        for &(j, _) in ring {
            ring_bits.bits[j] = 1;
        }
        assert!(syndrome(&l, &ring_bits).unwrap().defects.is_empty());
    }

    /// Independent Bellman-Ford over (cells + boundary) for oracle checks.
    fn bellman_ford(dg: &DecodingGraph, source: usize) -> (Vec<u64>, u64) {
        let n = dg.n_cells();
        let mut dist = vec![u64::MAX; n];
        let mut bdist = u64::MAX;
        dist[source] = 0;
        for _ in 0..=n {
            let mut changed = false;
            for arc in 0..dg.arc_count() {
                let (a, b) = dg.arc_ends(arc);
                let w = dg.arc_weight(arc);
                match (a, b) {
                    (ArcEnd::Cell(u), ArcEnd::Cell(v)) => {
                        if dist[u] != u64::MAX && dist[u] + w < dist[v] {
                            dist[v] = dist[u] + w;
                            changed = true;
                        }
                        if dist[v] != u64::MAX && dist[v] + w < dist[u] {
                            dist[u] = dist[v] + w;
                            changed = true;
                        }
                    }
                    (ArcEnd::Cell(u), _) => {
                        if dist[u] != u64::MAX && dist[u] + w < bdist {
                            bdist = dist[u] + w;
                            changed = true;
                        }
                    }
                    _ => unreachable!(),
                }
            }
            if !changed {
                break;
            }
        }
        (dist, bdist)
    }

    #[test]
    fn matching_graph_distances_match_bellman_ford() {
        let l = lat(3);
        let a = assign_states(&l, 0.1, 400, 0).unwrap();
        let delta = crate::delta_from_db(11.0);
        let s = sample_homodyne(&l, &a, delta, 400, 0).unwrap();
        let bits = decode_inner(&l, &a, &s, InnerVariant::StandardOnly).unwrap();
        let dg = build_decoding_graph(&l, &a, &s, delta, WeightMode::Analog).unwrap();
        let syn = syndrome(&l, &bits).unwrap();
        assert!(!syn.defects.is_empty(), "want a nontrivial instance");
        let mg = matching_graph(&dg, &syn).unwrap();
        for (i, &src) in syn.defects.iter().enumerate() {
            let (dist, bdist) = bellman_ford(&dg, src);
            for (j, &dst) in syn.defects.iter().enumerate() {
                if i != j {
                    assert_eq!(mg.pair_dist[i][j], dist[dst]);
                }
            }
            assert_eq!(mg.boundary_dist[i], bdist);
        }
        // Triangle inequality on all triples.
        let m = syn.defects.len();
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    if i != j && j != k && i != k {
                        assert!(mg.pair_dist[i][k] <= mg.pair_dist[i][j] + mg.pair_dist[j][k]);
                    }
                }
            }
        }
    }

    #[test]
    fn uniform_pair_weight_is_hop_count() {
        // Two defects from one flipped interior qubit sit one arc apart.
        let l = lat(3);
        let q = l.node_at(Coord::new(2, 3, 3)).unwrap();
        let mut bits = BitOutcome {
            bits: vec![0; l.node_count()],
        };
        bits.bits[q] = 1;
        let dg = uniform_graph(&l);
        let syn = syndrome(&l, &bits).unwrap();
        let mg = matching_graph(&dg, &syn).unwrap();
        assert_eq!(mg.pair_dist[0][1], WEIGHT_SCALE as u64);
        let matching = mwpm(&mg).unwrap();
        assert_eq!(matching.pairs.len(), 1);
        assert_eq!(matching.pairs[0], (0, MatchPartner::Defect(1)));
        // Recovery flips exactly the shared qubit.
        let rec = recovery(&dg, &mg, &matching);
        assert_eq!(rec.flips.len(), 1);
        assert_eq!(l.primal_qubits()[rec.flips[0]], q);
        let fixed = apply_recovery(&l, &bits, &rec);
        assert!(syndrome(&l, &fixed).unwrap().defects.is_empty());
    }

    #[test]
    fn defects_near_boundary_match_boundary() {
        // Flip two x-boundary qubits in opposite corners: each lone defect
        // is one arc from its sink but far from the other defect.
        let l = lat(3);
        let d = l.distance() as i32;
        let qa = l.node_at(Coord::new(0, 1, 1)).unwrap();
        let qb = l
            .node_at(Coord::new(l.x_max(), 2 * d - 1, 2 * d - 1))
            .unwrap();
        let mut bits = BitOutcome {
            bits: vec![0; l.node_count()],
        };
        bits.bits[qa] = 1;
        bits.bits[qb] = 1;
        let dg = uniform_graph(&l);
        let syn = syndrome(&l, &bits).unwrap();
        assert_eq!(syn.defects.len(), 2);
        let mg = matching_graph(&dg, &syn).unwrap();
        let matching = mwpm(&mg).unwrap();
        assert_eq!(matching.pairs.len(), 2);
        assert!(matching
            .pairs
            .iter()
            .all(|&(_, p)| p == MatchPartner::Boundary));
        let rec = recovery(&dg, &mg, &matching);
        let fixed = apply_recovery(&l, &bits, &rec);
        assert!(syndrome(&l, &fixed).unwrap().defects.is_empty());
    }

    #[test]
    fn empty_matching_empty_recovery() {
        let l = lat(2);
        let dg = uniform_graph(&l);
        let syn = Syndrome {
            defects: Vec::new(),
        };
        let mg = matching_graph(&dg, &syn).unwrap();
        let matching = mwpm(&mg).unwrap();
        assert!(matching.pairs.is_empty());
        assert!(recovery(&dg, &mg, &matching).flips.is_empty());
    }

    #[test]
    fn post_recovery_syndrome_always_empty() {
        // Random bit patterns on a d=3 lattice; decode and verify closure.
        let l = lat(3);
        let dg = uniform_graph(&l);
        let mut s = Stream::keyed(42, Purpose::Test, 9, 9);
        for _ in 0..50 {
            let mut bits = BitOutcome {
                bits: vec![0; l.node_count()],
            };
            for &q in l.primal_qubits() {
                bits.bits[q] = (s.next_u64() & 1) as u8;
            }
            let syn = syndrome(&l, &bits).unwrap();
            let mg = matching_graph(&dg, &syn).unwrap();
            let matching = mwpm(&mg).unwrap();
            let rec = recovery(&dg, &mg, &matching);
            let fixed = apply_recovery(&l, &bits, &rec);
            assert!(syndrome(&l, &fixed).unwrap().defects.is_empty());
        }
    }

    #[test]
    fn mwpm_weight_not_worse_than_greedy() {
        let l = lat(3);
        let a = assign_states(&l, 0.12, 77, 3).unwrap();
        let delta = crate::delta_from_db(10.5);
        let s = sample_homodyne(&l, &a, delta, 77, 3).unwrap();
        let bits = decode_inner(&l, &a, &s, InnerVariant::StandardOnly).unwrap();
        let dg = build_decoding_graph(&l, &a, &s, delta, WeightMode::Analog).unwrap();
        let syn = syndrome(&l, &bits).unwrap();
        let mg = matching_graph(&dg, &syn).unwrap();
        let best = mwpm(&mg).unwrap().total_weight;
        // Greedy: repeatedly take the globally cheapest available pairing.
        let m = mg.defects.len();
        let mut used = vec![false; m];
        let mut greedy = 0u64;
        loop {
            let mut pick: Option<(u64, usize, Option<usize>)> = None;
            for i in 0..m {
                if used[i] {
                    continue;
                }
                if pick.is_none() || mg.boundary_dist[i] < pick.unwrap().0 {
                    pick = Some((mg.boundary_dist[i], i, None));
                }
                for j in (i + 1)..m {
                    if !used[j] && (pick.is_none() || mg.pair_dist[i][j] < pick.unwrap().0) {
                        pick = Some((mg.pair_dist[i][j], i, Some(j)));
                    }
                }
            }
            match pick {
                None => break,
                Some((w, i, j)) => {
                    greedy += w;
                    used[i] = true;
                    if let Some(j) = j {
                        used[j] = true;
                    }
                }
            }
        }
        assert!(best <= greedy, "mwpm {best} greedy {greedy}");
    }

    #[test]
    fn dump_format_shape() {
        let l = lat(2);
        let q = l.node_at(Coord::new(2, 1, 1)).unwrap();
        let mut bits = BitOutcome {
            bits: vec![0; l.node_count()],
        };
        bits.bits[q] = 1;
        let dg = uniform_graph(&l);
        let syn = syndrome(&l, &bits).unwrap();
        let mg = matching_graph(&dg, &syn).unwrap();
        let dump = dump_matching_graph(&mg);
        assert!(dump.lines().any(|l| l.starts_with("defect ")));
        assert!(dump.lines().any(|l| l.starts_with("pair ")));
    }
}
