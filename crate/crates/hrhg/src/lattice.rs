//! RHG cluster-state lattice: geometry, stabilizers, boundaries and the X
//! correlation surface.
//!
//! Doubled coordinates are used throughout: nodes live on the faces and edges
//! of a cubic lattice, a point carrying a node iff exactly one or exactly two
//! of its coordinates are odd. Two-odd points sit on cube faces and form the
//! primal sublattice; one-odd points sit on cube edges and form the dual
//! sublattice. Cluster edges connect face nodes to the edge nodes bordering
//! them, i.e. pairs at unit distance with opposite roles.
//!
//! The simulated block spans `x in [0, 2d]`, `y, z in [1, 2d-1]`. The two
//! x-boundary planes hold dangling primal qubits and act as the matching
//! sinks; the y and z directions end in truncated stabilizer cells instead,
//! so no chain can terminate there. Six-body X stabilizers sit on every cube
//! with an all-odd center; cells against the y/z walls lose one or two faces
//! (five- and four-body checks).

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Dense node index, stable for a fixed `(d, conventions)`.
pub type NodeId = usize;

/// Position in the doubled coordinate system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coord {
    pub x: i32,
    pub y: i32,
    pub z: i32,
}

impl Coord {
    pub fn new(x: i32, y: i32, z: i32) -> Self {
        Coord { x, y, z }
    }

    /// Number of odd coordinates; 2 for primal, 1 for dual, anything else is
    /// not a node.
    pub fn odd_count(&self) -> u32 {
        (self.x & 1) as u32 + (self.y & 1) as u32 + (self.z & 1) as u32
    }

    fn offset(&self, dx: i32, dy: i32, dz: i32) -> Coord {
        Coord::new(self.x + dx, self.y + dy, self.z + dz)
    }

    /// The six unit-distance neighbor positions.
    fn unit_neighbors(&self) -> [Coord; 6] {
        [
            self.offset(-1, 0, 0),
            self.offset(1, 0, 0),
            self.offset(0, -1, 0),
            self.offset(0, 1, 0),
            self.offset(0, 0, -1),
            self.offset(0, 0, 1),
        ]
    }
}

/// Sublattice role of a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Primal,
    Dual,
}

/// A cluster node.
#[derive(Debug, Clone)]
pub struct Node {
    pub id: NodeId,
    pub coord: Coord,
    pub parity: Parity,
}

/// Boundary convention of the simulated block. The x direction always ends
/// in the two matching-sink data planes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BoundaryConvention {
    /// y and z end in truncated stabilizer cells.
    #[default]
    Open,
    /// y and z wrap with period 2d, so every check is a full six-body cell
    /// and all sizes share the bulk noise statistics. This is the convention
    /// the threshold runs use.
    PeriodicTransverse,
}

/// CZ sign convention on cluster edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SignConvention {
    /// Every CZ gate is +1.
    #[default]
    AllPlus,
    /// Flips every edge incident to dual nodes with coordinate sum congruent
    /// to 3 mod 4. Acting per dual node, this is gauge-equivalent to
    /// `AllPlus` under momentum binning, which the failure statistics tests
    /// rely on.
    DualParity,
}

impl SignConvention {
    fn sign(&self, _primal: Coord, dual: Coord) -> i8 {
        match self {
            SignConvention::AllPlus => 1,
            SignConvention::DualParity => {
                if (dual.x + dual.y + dual.z).rem_euclid(4) == 3 {
                    -1
                } else {
                    1
                }
            }
        }
    }
}

/// Six-body (or boundary-truncated) X parity check on primal qubits.
#[derive(Debug, Clone)]
pub struct Stabilizer {
    pub id: usize,
    /// All-odd center of the cell the check surrounds.
    pub center: Coord,
    /// Member primal qubits, ascending node id. 6 in the bulk, 4-5 against
    /// the y/z walls.
    pub qubits: Vec<NodeId>,
}

/// Second endpoint of a decoding-graph arc.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArcEnd {
    /// Stabilizer cell index.
    Cell(usize),
    /// The x = 0 matching sink.
    XLow,
    /// The x = 2d matching sink.
    XHigh,
}

impl ArcEnd {
    pub fn is_boundary(&self) -> bool {
        !matches!(self, ArcEnd::Cell(_))
    }
}

/// Immutable RHG lattice; safe to share across trial workers.
#[derive(Debug, Clone)]
pub struct Lattice {
    d: usize,
    boundary: BoundaryConvention,
    signs: SignConvention,
    nodes: Vec<Node>,
    index: HashMap<Coord, NodeId>,
    adj_offsets: Vec<usize>,
    adj: Vec<(NodeId, i8)>,
    stabilizers: Vec<Stabilizer>,
    /// Primal node ids, ascending; position in this list is the arc index.
    primal: Vec<NodeId>,
    /// node id -> arc index.
    arc_of_node: Vec<Option<usize>>,
    /// Per arc: the one or two stabilizers containing the qubit, boundary
    /// sink as the second end where the lattice dangles.
    arc_ends: Vec<(ArcEnd, ArcEnd)>,
    surface: Vec<NodeId>,
}

/// Doubled-coordinate x extent of the block. The two x-boundary planes are
/// data slices acting as matching sinks, with d-1 check layers between them,
/// so a sink-to-sink chain carries exactly d qubits.
pub fn x_extent(d: usize) -> i32 {
    2 * d as i32 - 2
}

/// Construct the RHG lattice for code distance `d`.
pub fn build_lattice(
    d: usize,
    boundary: BoundaryConvention,
    signs: SignConvention,
) -> Result<Lattice> {
    if d < 2 {
        return Err(Error::InvalidDistance(d));
    }
    let dd = d as i32;
    let xm = x_extent(d);

    // Canonical in-volume representative of a position, or None when it
    // falls outside the block.
    let canon = move |mut c: Coord| -> Option<Coord> {
        if c.x < 0 || c.x > xm {
            return None;
        }
        match boundary {
            BoundaryConvention::Open => {
                if !(1..2 * dd).contains(&c.y) || !(1..2 * dd).contains(&c.z) {
                    return None;
                }
            }
            BoundaryConvention::PeriodicTransverse => {
                // 2d is even, so wrapping preserves coordinate parity.
                c.y = c.y.rem_euclid(2 * dd);
                c.z = c.z.rem_euclid(2 * dd);
            }
        }
        Some(c)
    };
    let y_range = match boundary {
        BoundaryConvention::Open => 1..2 * dd,
        BoundaryConvention::PeriodicTransverse => 0..2 * dd,
    };

    // Enumerate nodes in lexicographic coordinate order for stable ids.
    let mut nodes = Vec::new();
    let mut index = HashMap::new();
    for x in 0..=xm {
        for y in y_range.clone() {
            for z in y_range.clone() {
                let c = Coord::new(x, y, z);
                let parity = match c.odd_count() {
                    2 => Parity::Primal,
                    1 => Parity::Dual,
                    _ => continue,
                };
                let id = nodes.len();
                index.insert(c, id);
                nodes.push(Node {
                    id,
                    coord: c,
                    parity,
                });
            }
        }
    }

    // Signed adjacency in CSR form, neighbor ids ascending.
    let mut adj_offsets = Vec::with_capacity(nodes.len() + 1);
    let mut adj = Vec::new();
    adj_offsets.push(0);
    for node in &nodes {
        let mut row: Vec<(NodeId, i8)> = Vec::with_capacity(4);
        for nb in node.coord.unit_neighbors() {
            let Some(nb) = canon(nb) else { continue };
            if let Some(&j) = index.get(&nb) {
                let (p, u) = match node.parity {
                    Parity::Primal => (node.coord, nb),
                    Parity::Dual => (nb, node.coord),
                };
                row.push((j, signs.sign(p, u)));
            }
        }
        row.sort_unstable_by_key(|e| e.0);
        adj.extend_from_slice(&row);
        adj_offsets.push(adj.len());
    }

    // Stabilizer cells on all-odd centers.
    let mut stabilizers = Vec::new();
    for a in (1..xm).step_by(2) {
        for b in (1..2 * dd).step_by(2) {
            for c in (1..2 * dd).step_by(2) {
                let center = Coord::new(a, b, c);
                let mut qubits: Vec<NodeId> = center
                    .unit_neighbors()
                    .iter()
                    .filter_map(|&f| canon(f).and_then(|f| index.get(&f).copied()))
                    .collect();
                qubits.sort_unstable();
                let id = stabilizers.len();
                stabilizers.push(Stabilizer { id, center, qubits });
            }
        }
    }

    // Arcs: one per primal qubit.
    let primal: Vec<NodeId> = nodes
        .iter()
        .filter(|n| n.parity == Parity::Primal)
        .map(|n| n.id)
        .collect();
    let mut arc_of_node = vec![None; nodes.len()];
    for (arc, &id) in primal.iter().enumerate() {
        arc_of_node[id] = Some(arc);
    }
    let mut cells_of: Vec<Vec<usize>> = vec![Vec::new(); nodes.len()];
    for s in &stabilizers {
        for &q in &s.qubits {
            cells_of[q].push(s.id);
        }
    }
    let mut arc_ends = Vec::with_capacity(primal.len());
    for &id in &primal {
        let coord = nodes[id].coord;
        let ends = match cells_of[id].as_slice() {
            [a, b] => (ArcEnd::Cell(*a), ArcEnd::Cell(*b)),
            [a] => {
                let sink = if coord.x == 0 {
                    ArcEnd::XLow
                } else if coord.x == xm {
                    ArcEnd::XHigh
                } else {
                    return Err(Error::Invariant(format!(
                        "dangling primal qubit off the x boundary at {coord:?}"
                    )));
                };
                (ArcEnd::Cell(*a), sink)
            }
            other => {
                return Err(Error::Invariant(format!(
                    "primal qubit at {coord:?} in {} stabilizers",
                    other.len()
                )))
            }
        };
        arc_ends.push(ends);
    }

    // X correlation surface: transverse sheets of primal data qubits. Every
    // dual node neighbors a sheet an even number of times, so the joint X
    // parity over the surface is a stabilizer product of the cluster state,
    // while a chain of Z flips connecting the two x sinks crosses it an odd
    // number of times. For odd d all d sheets are taken together, which in
    // addition gives even overlap with every six-body check; the parities
    // agree with the single-sheet readout on every syndrome-free record.
    let x_planes: Vec<i32> = if d % 2 == 1 {
        (0..=xm).step_by(2).collect()
    } else {
        vec![2 * (xm / 4).max(1)]
    };
    let mut surface: Vec<NodeId> = Vec::new();
    for x0 in x_planes {
        for y in (1..2 * dd).step_by(2) {
            for z in (1..2 * dd).step_by(2) {
                let c = Coord::new(x0, y, z);
                surface.push(*index.get(&c).expect("surface qubit exists"));
            }
        }
    }
    surface.sort_unstable();

    Ok(Lattice {
        d,
        boundary,
        signs,
        nodes,
        index,
        adj_offsets,
        adj,
        stabilizers,
        primal,
        arc_of_node,
        arc_ends,
        surface,
    })
}

impl Lattice {
    pub fn distance(&self) -> usize {
        self.d
    }

    /// Largest x coordinate of the block.
    pub fn x_max(&self) -> i32 {
        x_extent(self.d)
    }

    pub fn boundary(&self) -> BoundaryConvention {
        self.boundary
    }

    pub fn sign_convention(&self) -> SignConvention {
        self.signs
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> Result<&Node> {
        self.nodes.get(id).ok_or(Error::InvalidNode(id))
    }

    pub fn node_at(&self, coord: Coord) -> Option<NodeId> {
        self.index.get(&coord).copied()
    }

    /// Signed adjacency row, neighbor ids ascending.
    pub fn neighbors(&self, id: NodeId) -> Result<&[(NodeId, i8)]> {
        if id >= self.nodes.len() {
            return Err(Error::InvalidNode(id));
        }
        Ok(&self.adj[self.adj_offsets[id]..self.adj_offsets[id + 1]])
    }

    pub fn stabilizers(&self) -> &[Stabilizer] {
        &self.stabilizers
    }

    /// Primal node ids in arc order.
    pub fn primal_qubits(&self) -> &[NodeId] {
        &self.primal
    }

    /// Arc index of a node, if it is primal.
    pub fn arc_of(&self, id: NodeId) -> Option<usize> {
        self.arc_of_node.get(id).copied().flatten()
    }

    /// The one or two stabilizer cells of each arc, sink second.
    pub fn arc_ends(&self) -> &[(ArcEnd, ArcEnd)] {
        &self.arc_ends
    }

    /// Primal qubits of the X correlation surface, ascending node id.
    pub fn correlation_surface(&self) -> &[NodeId] {
        &self.surface
    }

    /// A straight chain of primal qubits connecting the two x sinks at the
    /// given transverse position; crosses the correlation surface once.
    pub fn spanning_chain(&self, y: i32, z: i32) -> Result<Vec<NodeId>> {
        if y % 2 == 0 || z % 2 == 0 {
            return Err(Error::Invariant(format!(
                "spanning chain needs odd (y, z), got ({y}, {z})"
            )));
        }
        let mut chain = Vec::new();
        for x in (0..=self.x_max()).step_by(2) {
            let id = self
                .node_at(Coord::new(x, y, z))
                .ok_or(Error::Invariant(format!("chain qubit missing at x={x}")))?;
            chain.push(id);
        }
        Ok(chain)
    }

    /// Line-oriented text export: `node <id> <x> <y> <z> <P|D>` then
    /// `edge <i> <j> <+1|-1>` with i < j.
    pub fn export_text(&self) -> String {
        let mut out = String::new();
        for n in &self.nodes {
            let tag = match n.parity {
                Parity::Primal => 'P',
                Parity::Dual => 'D',
            };
            writeln!(
                out,
                "node {} {} {} {} {}",
                n.id, n.coord.x, n.coord.y, n.coord.z, tag
            )
            .unwrap();
        }
        for n in &self.nodes {
            for &(j, s) in self.adj[self.adj_offsets[n.id]..self.adj_offsets[n.id + 1]].iter() {
                if n.id < j {
                    writeln!(out, "edge {} {} {}", n.id, j, if s > 0 { "+1" } else { "-1" })
                        .unwrap();
                }
            }
        }
        out
    }
}
