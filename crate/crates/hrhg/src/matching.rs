//! Exact maximum-weight matching in general graphs (Edmonds' blossom
//! algorithm, primal-dual formulation), plus the minimum-weight perfect
//! matching wrapper the outer decoder uses.
//!
//! The implementation follows the classic O(V^3) structure: repeated stages
//! grow alternating trees from free vertices, shrink odd cycles into
//! blossoms, and adjust dual variables until an augmenting path appears.
//! Weights are integers and are doubled internally so every dual update
//! stays integral; the whole computation is exact and deterministic for a
//! fixed edge order.

use crate::error::{Error, Result};

const NONE: usize = usize::MAX;

struct Matcher {
    nvertex: usize,
    nedge: usize,
    /// `(u, v, 2 * weight)`.
    edges: Vec<(usize, usize, i64)>,
    max_cardinality: bool,
    /// endpoint[p]: vertex at endpoint p; endpoints 2k, 2k+1 belong to edge k.
    endpoint: Vec<usize>,
    /// Remote endpoints of edges incident to each vertex.
    neighbend: Vec<Vec<usize>>,
    /// mate[v]: remote endpoint of the matched edge, or NONE.
    mate: Vec<usize>,
    /// 0 free, 1 S, 2 T (+4 breadcrumb during scans); indexed by vertex or
    /// blossom.
    label: Vec<u8>,
    labelend: Vec<usize>,
    inblossom: Vec<usize>,
    blossomparent: Vec<usize>,
    blossomchilds: Vec<Vec<usize>>,
    blossombase: Vec<usize>,
    blossomendps: Vec<Vec<usize>>,
    bestedge: Vec<usize>,
    blossombestedges: Vec<Vec<usize>>,
    unusedblossoms: Vec<usize>,
    dualvar: Vec<i64>,
    allowedge: Vec<bool>,
    queue: Vec<usize>,
}

impl Matcher {
    fn new(nvertex: usize, raw_edges: &[(usize, usize, i64)], max_cardinality: bool) -> Matcher {
        let nedge = raw_edges.len();
        let edges: Vec<(usize, usize, i64)> =
            raw_edges.iter().map(|&(u, v, w)| (u, v, 2 * w)).collect();
        let maxweight = edges.iter().map(|e| e.2).max().unwrap_or(0).max(0);
        let mut endpoint = Vec::with_capacity(2 * nedge);
        for &(u, v, _) in &edges {
            endpoint.push(u);
            endpoint.push(v);
        }
        let mut neighbend = vec![Vec::new(); nvertex];
        for (k, &(u, v, _)) in edges.iter().enumerate() {
            neighbend[u].push(2 * k + 1);
            neighbend[v].push(2 * k);
        }
        Matcher {
            nvertex,
            nedge,
            edges,
            max_cardinality,
            endpoint,
            neighbend,
            mate: vec![NONE; nvertex],
            label: vec![0; 2 * nvertex],
            labelend: vec![NONE; 2 * nvertex],
            inblossom: (0..nvertex).collect(),
            blossomparent: vec![NONE; 2 * nvertex],
            blossomchilds: vec![Vec::new(); 2 * nvertex],
            blossombase: (0..nvertex).chain(std::iter::repeat(NONE).take(nvertex)).collect(),
            blossomendps: vec![Vec::new(); 2 * nvertex],
            bestedge: vec![NONE; 2 * nvertex],
            blossombestedges: vec![Vec::new(); 2 * nvertex],
            unusedblossoms: (nvertex..2 * nvertex).collect(),
            dualvar: std::iter::repeat(maxweight)
                .take(nvertex)
                .chain(std::iter::repeat(0).take(nvertex))
                .collect(),
            allowedge: vec![false; nedge],
            queue: Vec::new(),
        }
    }

    fn slack(&self, k: usize) -> i64 {
        let (i, j, w) = self.edges[k];
        self.dualvar[i] + self.dualvar[j] - w
    }

    fn blossom_leaves(&self, b: usize, out: &mut Vec<usize>) {
        if b < self.nvertex {
            out.push(b);
        } else {
            for &t in &self.blossomchilds[b] {
                self.blossom_leaves(t, out);
            }
        }
    }

    fn assign_label(&mut self, w: usize, t: u8, p: usize) {
        let b = self.inblossom[w];
        debug_assert!(self.label[w] == 0 && self.label[b] == 0);
        self.label[w] = t;
        self.label[b] = t;
        self.labelend[w] = p;
        self.labelend[b] = p;
        self.bestedge[w] = NONE;
        self.bestedge[b] = NONE;
        if t == 1 {
            let mut leaves = Vec::new();
            self.blossom_leaves(b, &mut leaves);
            self.queue.extend(leaves);
        } else {
            let base = self.blossombase[b];
            debug_assert!(self.mate[base] != NONE);
            let m = self.mate[base];
            self.assign_label(self.endpoint[m], 1, m ^ 1);
        }
    }

    /// Trace back from both ends of a tight S-S edge; return the common base
    /// vertex, or NONE when the paths end at different roots (an augmenting
    /// path).
    fn scan_blossom(&mut self, mut v: usize, mut w: usize) -> usize {
        let mut path = Vec::new();
        let mut base = NONE;
        while v != NONE || w != NONE {
            let mut b = self.inblossom[v];
            if self.label[b] & 4 != 0 {
                base = self.blossombase[b];
                break;
            }
            debug_assert_eq!(self.label[b], 1);
            path.push(b);
            self.label[b] = 5;
            debug_assert_eq!(self.labelend[b], self.mate[self.blossombase[b]]);
            if self.labelend[b] == NONE {
                v = NONE;
            } else {
                v = self.endpoint[self.labelend[b]];
                b = self.inblossom[v];
                debug_assert_eq!(self.label[b], 2);
                debug_assert!(self.labelend[b] != NONE);
                v = self.endpoint[self.labelend[b]];
            }
            if w != NONE {
                std::mem::swap(&mut v, &mut w);
            }
        }
        for b in path {
            self.label[b] = 1;
        }
        base
    }

    /// Shrink the odd cycle through edge `k` and base `base` into a blossom.
    fn add_blossom(&mut self, base: usize, k: usize) {
        let (mut v, mut w, _) = self.edges[k];
        let bb = self.inblossom[base];
        let mut bv = self.inblossom[v];
        let mut bw = self.inblossom[w];
        let b = self.unusedblossoms.pop().expect("blossom slot");
        self.blossombase[b] = base;
        self.blossomparent[b] = NONE;
        self.blossomparent[bb] = b;
        let mut path = Vec::new();
        let mut endps = Vec::new();
        while bv != bb {
            self.blossomparent[bv] = b;
            path.push(bv);
            endps.push(self.labelend[bv]);
            debug_assert!(self.labelend[bv] != NONE);
            v = self.endpoint[self.labelend[bv]];
            bv = self.inblossom[v];
        }
        path.push(bb);
        path.reverse();
        endps.reverse();
        endps.push(2 * k);
        while bw != bb {
            self.blossomparent[bw] = b;
            path.push(bw);
            endps.push(self.labelend[bw] ^ 1);
            debug_assert!(self.labelend[bw] != NONE);
            w = self.endpoint[self.labelend[bw]];
            bw = self.inblossom[w];
        }
        debug_assert_eq!(self.label[bb], 1);
        self.blossomchilds[b] = path.clone();
        self.blossomendps[b] = endps;
        self.label[b] = 1;
        self.labelend[b] = self.labelend[bb];
        self.dualvar[b] = 0;
        let mut leaves = Vec::new();
        self.blossom_leaves(b, &mut leaves);
        for &leaf in &leaves {
            if self.label[self.inblossom[leaf]] == 2 {
                self.queue.push(leaf);
            }
            self.inblossom[leaf] = b;
        }
        // Merge least-slack edge lists of the sub-blossoms.
        let mut bestedgeto = vec![NONE; 2 * self.nvertex];
        for &bv in &path {
            let nblists: Vec<Vec<usize>> = if self.blossombestedges[bv].is_empty() {
                let mut lists = Vec::new();
                let mut sub = Vec::new();
                self.blossom_leaves(bv, &mut sub);
                for leaf in sub {
                    lists.push(self.neighbend[leaf].iter().map(|&p| p / 2).collect());
                }
                lists
            } else {
                vec![std::mem::take(&mut self.blossombestedges[bv])]
            };
            for list in nblists {
                for k2 in list {
                    let (mut i, mut j, _) = self.edges[k2];
                    if self.inblossom[j] == b {
                        std::mem::swap(&mut i, &mut j);
                    }
                    let _ = i;
                    let bj = self.inblossom[j];
                    if bj != b
                        && self.label[bj] == 1
                        && (bestedgeto[bj] == NONE || self.slack(k2) < self.slack(bestedgeto[bj]))
                    {
                        bestedgeto[bj] = k2;
                    }
                }
            }
            self.blossombestedges[bv] = Vec::new();
            self.bestedge[bv] = NONE;
        }
        let best: Vec<usize> = bestedgeto.into_iter().filter(|&k2| k2 != NONE).collect();
        self.bestedge[b] = NONE;
        for &k2 in &best {
            if self.bestedge[b] == NONE || self.slack(k2) < self.slack(self.bestedge[b]) {
                self.bestedge[b] = k2;
            }
        }
        self.blossombestedges[b] = best;
    }

    /// Undo a blossom, relabeling its children when the expansion happens
    /// mid-stage.
    fn expand_blossom(&mut self, b: usize, endstage: bool) {
        let childs = self.blossomchilds[b].clone();
        for &s in &childs {
            self.blossomparent[s] = NONE;
            if s < self.nvertex {
                self.inblossom[s] = s;
            } else if endstage && self.dualvar[s] == 0 {
                self.expand_blossom(s, endstage);
            } else {
                let mut leaves = Vec::new();
                self.blossom_leaves(s, &mut leaves);
                for leaf in leaves {
                    self.inblossom[leaf] = s;
                }
            }
        }
        if !endstage && self.label[b] == 2 {
            debug_assert!(self.labelend[b] != NONE);
            let entrychild = self.inblossom[self.endpoint[self.labelend[b] ^ 1]];
            let pos = childs.iter().position(|&c| c == entrychild).unwrap();
            let len = childs.len() as i64;
            let (mut j, jstep, endptrick): (i64, i64, usize) = if pos % 2 == 1 {
                (pos as i64 - len, 1, 0)
            } else {
                (pos as i64, -1, 1)
            };
            let idx = |j: i64| -> usize { j.rem_euclid(len) as usize };
            let mut p = self.labelend[b];
            while j != 0 {
                self.label[self.endpoint[p ^ 1]] = 0;
                let ep = self.blossomendps[b][idx(j - endptrick as i64)] ^ endptrick ^ 1;
                self.label[self.endpoint[ep]] = 0;
                self.assign_label(self.endpoint[p ^ 1], 2, p);
                self.allowedge[self.blossomendps[b][idx(j - endptrick as i64)] / 2] = true;
                j += jstep;
                p = self.blossomendps[b][idx(j - endptrick as i64)] ^ endptrick;
                self.allowedge[p / 2] = true;
                j += jstep;
            }
            let bv = childs[idx(j)];
            self.label[self.endpoint[p ^ 1]] = 2;
            self.label[bv] = 2;
            self.labelend[self.endpoint[p ^ 1]] = p;
            self.labelend[bv] = p;
            self.bestedge[bv] = NONE;
            j += jstep;
            while childs[idx(j)] != entrychild {
                let bv = childs[idx(j)];
                if self.label[bv] == 1 {
                    j += jstep;
                    continue;
                }
                let mut leaves = Vec::new();
                self.blossom_leaves(bv, &mut leaves);
                let mut reached = NONE;
                for leaf in leaves {
                    if self.label[leaf] != 0 {
                        reached = leaf;
                        break;
                    }
                }
                if reached != NONE {
                    debug_assert_eq!(self.label[reached], 2);
                    debug_assert_eq!(self.inblossom[reached], bv);
                    self.label[reached] = 0;
                    self.label[self.endpoint[self.mate[self.blossombase[bv]]]] = 0;
                    let le = self.labelend[reached];
                    self.assign_label(reached, 2, le);
                }
                j += jstep;
            }
        }
        self.label[b] = 0;
        self.labelend[b] = NONE;
        self.blossomchilds[b].clear();
        self.blossomendps[b].clear();
        self.blossombase[b] = NONE;
        self.blossombestedges[b].clear();
        self.bestedge[b] = NONE;
        self.unusedblossoms.push(b);
    }

    /// Swap matched and unmatched edges along the path from `v` down to the
    /// base of blossom `b`.
    fn augment_blossom(&mut self, b: usize, v: usize) {
        let mut t = v;
        while self.blossomparent[t] != b {
            t = self.blossomparent[t];
        }
        if t >= self.nvertex {
            self.augment_blossom(t, v);
        }
        let childs = self.blossomchilds[b].clone();
        let len = childs.len() as i64;
        let pos = childs.iter().position(|&c| c == t).unwrap();
        let (mut j, jstep, endptrick): (i64, i64, usize) = if pos % 2 == 1 {
            (pos as i64 - len, 1, 0)
        } else {
            (pos as i64, -1, 1)
        };
        let idx = |j: i64| -> usize { j.rem_euclid(len) as usize };
        while j != 0 {
            j += jstep;
            let t = childs[idx(j)];
            let p = self.blossomendps[b][idx(j - endptrick as i64)] ^ endptrick;
            if t >= self.nvertex {
                self.augment_blossom(t, self.endpoint[p]);
            }
            j += jstep;
            let t = childs[idx(j)];
            if t >= self.nvertex {
                self.augment_blossom(t, self.endpoint[p ^ 1]);
            }
            self.mate[self.endpoint[p]] = p ^ 1;
            self.mate[self.endpoint[p ^ 1]] = p;
        }
        self.blossomchilds[b].rotate_left(pos);
        self.blossomendps[b].rotate_left(pos);
        self.blossombase[b] = self.blossombase[self.blossomchilds[b][0]];
        debug_assert_eq!(self.blossombase[b], v);
    }

    /// Augment the matching along the tree paths meeting at edge `k`.
    fn augment_matching(&mut self, k: usize) {
        let (v, w, _) = self.edges[k];
        for (mut s, mut p) in [(v, 2 * k + 1), (w, 2 * k)] {
            loop {
                let bs = self.inblossom[s];
                debug_assert_eq!(self.label[bs], 1);
                debug_assert_eq!(self.labelend[bs], self.mate[self.blossombase[bs]]);
                if bs >= self.nvertex {
                    self.augment_blossom(bs, s);
                }
                self.mate[s] = p;
                if self.labelend[bs] == NONE {
                    break;
                }
                let t = self.endpoint[self.labelend[bs]];
                let bt = self.inblossom[t];
                debug_assert_eq!(self.label[bt], 2);
                debug_assert!(self.labelend[bt] != NONE);
                s = self.endpoint[self.labelend[bt]];
                let j = self.endpoint[self.labelend[bt] ^ 1];
                debug_assert_eq!(self.blossombase[bt], t);
                if bt >= self.nvertex {
                    self.augment_blossom(bt, j);
                }
                self.mate[j] = self.labelend[bt];
                p = self.labelend[bt] ^ 1;
            }
        }
    }

    fn solve(&mut self) -> Vec<usize> {
        if self.nedge == 0 {
            return vec![NONE; self.nvertex];
        }
        for _stage in 0..self.nvertex {
            self.label.iter_mut().for_each(|l| *l = 0);
            self.bestedge.iter_mut().for_each(|e| *e = NONE);
            for b in self.nvertex..2 * self.nvertex {
                self.blossombestedges[b].clear();
            }
            self.allowedge.iter_mut().for_each(|a| *a = false);
            self.queue.clear();
            for v in 0..self.nvertex {
                if self.mate[v] == NONE && self.label[self.inblossom[v]] == 0 {
                    self.assign_label(v, 1, NONE);
                }
            }
            let mut augmented = false;
            loop {
                while let Some(v) = self.queue.pop() {
                    debug_assert_eq!(self.label[self.inblossom[v]], 1);
                    for pi in 0..self.neighbend[v].len() {
                        let p = self.neighbend[v][pi];
                        let k = p / 2;
                        let w = self.endpoint[p];
                        if self.inblossom[v] == self.inblossom[w] {
                            continue;
                        }
                        if !self.allowedge[k] {
                            let kslack = self.slack(k);
                            if kslack <= 0 {
                                self.allowedge[k] = true;
                            } else if self.label[self.inblossom[w]] == 1 {
                                let b = self.inblossom[v];
                                if self.bestedge[b] == NONE
                                    || kslack < self.slack(self.bestedge[b])
                                {
                                    self.bestedge[b] = k;
                                }
                            } else if self.label[w] == 0
                                && (self.bestedge[w] == NONE
                                    || kslack < self.slack(self.bestedge[w]))
                            {
                                self.bestedge[w] = k;
                            }
                        }
                        if self.allowedge[k] {
                            if self.label[self.inblossom[w]] == 0 {
                                self.assign_label(w, 2, p ^ 1);
                            } else if self.label[self.inblossom[w]] == 1 {
                                let base = self.scan_blossom(v, w);
                                if base != NONE {
                                    self.add_blossom(base, k);
                                } else {
                                    self.augment_matching(k);
                                    augmented = true;
                                    break;
                                }
                            } else if self.label[w] == 0 {
                                debug_assert_eq!(self.label[self.inblossom[w]], 2);
                                self.label[w] = 2;
                                self.labelend[w] = p ^ 1;
                            }
                        }
                    }
                    if augmented {
                        break;
                    }
                }
                if augmented {
                    break;
                }
                // Dual adjustment.
                let mut deltatype = -1i32;
                let mut delta = 0i64;
                let mut deltaedge = NONE;
                let mut deltablossom = NONE;
                if !self.max_cardinality {
                    deltatype = 1;
                    delta = self.dualvar[..self.nvertex]
                        .iter()
                        .copied()
                        .min()
                        .unwrap_or(0)
                        .max(0);
                }
                for v in 0..self.nvertex {
                    if self.label[self.inblossom[v]] == 0 && self.bestedge[v] != NONE {
                        let d = self.slack(self.bestedge[v]);
                        if deltatype == -1 || d < delta {
                            delta = d;
                            deltatype = 2;
                            deltaedge = self.bestedge[v];
                        }
                    }
                }
                for b in 0..2 * self.nvertex {
                    if self.blossomparent[b] == NONE
                        && self.label[b] == 1
                        && self.bestedge[b] != NONE
                    {
                        let kslack = self.slack(self.bestedge[b]);
                        debug_assert_eq!(kslack % 2, 0);
                        let d = kslack / 2;
                        if deltatype == -1 || d < delta {
                            delta = d;
                            deltatype = 3;
                            deltaedge = self.bestedge[b];
                        }
                    }
                }
                for b in self.nvertex..2 * self.nvertex {
                    if self.blossombase[b] != NONE
                        && self.blossomparent[b] == NONE
                        && self.label[b] == 2
                        && (deltatype == -1 || self.dualvar[b] < delta)
                    {
                        delta = self.dualvar[b];
                        deltatype = 4;
                        deltablossom = b;
                    }
                }
                if deltatype == -1 {
                    // No improvement possible: optimum at max cardinality.
                    deltatype = 1;
                    delta = self.dualvar[..self.nvertex]
                        .iter()
                        .copied()
                        .min()
                        .unwrap_or(0)
                        .max(0);
                }
                for v in 0..self.nvertex {
                    match self.label[self.inblossom[v]] {
                        1 => self.dualvar[v] -= delta,
                        2 => self.dualvar[v] += delta,
                        _ => {}
                    }
                }
                for b in self.nvertex..2 * self.nvertex {
                    if self.blossombase[b] != NONE && self.blossomparent[b] == NONE {
                        match self.label[b] {
                            1 => self.dualvar[b] += delta,
                            2 => self.dualvar[b] -= delta,
                            _ => {}
                        }
                    }
                }
                match deltatype {
                    1 => break,
                    2 => {
                        self.allowedge[deltaedge] = true;
                        let (mut i, j, _) = self.edges[deltaedge];
                        if self.label[self.inblossom[i]] == 0 {
                            i = j;
                        }
                        debug_assert_eq!(self.label[self.inblossom[i]], 1);
                        self.queue.push(i);
                    }
                    3 => {
                        self.allowedge[deltaedge] = true;
                        let (i, _, _) = self.edges[deltaedge];
                        debug_assert_eq!(self.label[self.inblossom[i]], 1);
                        self.queue.push(i);
                    }
                    4 => self.expand_blossom(deltablossom, false),
                    _ => unreachable!(),
                }
            }
            if !augmented {
                break;
            }
            for b in self.nvertex..2 * self.nvertex {
                if self.blossomparent[b] == NONE
                    && self.blossombase[b] != NONE
                    && self.label[b] == 1
                    && self.dualvar[b] == 0
                {
                    self.expand_blossom(b, true);
                }
            }
        }
        let mut mate = vec![NONE; self.nvertex];
        for v in 0..self.nvertex {
            if self.mate[v] != NONE {
                mate[v] = self.endpoint[self.mate[v]];
            }
        }
        mate
    }
}

/// Maximum-weight matching; returns `mate[v]` as the matched partner or
/// `None`. With `max_cardinality` the matching has maximum size, with
/// maximum weight among those.
pub fn max_weight_matching(
    nvertex: usize,
    edges: &[(usize, usize, i64)],
    max_cardinality: bool,
) -> Vec<Option<usize>> {
    for &(u, v, _) in edges {
        assert!(u != v && u < nvertex && v < nvertex, "bad edge ({u},{v})");
    }
    let mate = Matcher::new(nvertex, edges, max_cardinality).solve();
    mate.into_iter()
        .map(|m| if m == NONE { None } else { Some(m) })
        .collect()
}

/// Minimum-weight perfect matching over nonnegative integer weights. The
/// vertex count must be even and a perfect matching must exist in the given
/// edge set.
pub fn min_weight_perfect_matching(
    nvertex: usize,
    edges: &[(usize, usize, u64)],
) -> Result<Vec<usize>> {
    if nvertex % 2 != 0 {
        return Err(Error::Invariant(format!(
            "perfect matching needs an even vertex count, got {nvertex}"
        )));
    }
    let negated: Vec<(usize, usize, i64)> = edges
        .iter()
        .map(|&(u, v, w)| (u, v, -(w as i64)))
        .collect();
    let mate = max_weight_matching(nvertex, &negated, true);
    let mut out = vec![0usize; nvertex];
    for (v, m) in mate.iter().enumerate() {
        match m {
            Some(w) => out[v] = *w,
            None => {
                return Err(Error::Invariant(format!(
                    "no perfect matching: vertex {v} unmatched"
                )))
            }
        }
    }
    Ok(out)
}
