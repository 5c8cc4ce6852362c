//! Pieces, essential pieces, labelled-graph automorphisms and piece distance.
//!
//! Under a reduced labelling a map of a labelled path into the graph is fixed
//! by the image of its initial vertex, so "distinct maps of p" becomes
//! "distinct start vertices reading ℓ(p)". Every query here is word-indexed.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::cycles::{simple_cycles, BudgetExceeded};
use crate::graph::{EdgeId, LabelledGraph, PathRef, Step, VertexId, Violation};
use crate::word::{Letter, Word};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PieceError {
    #[error("labelling is not reduced")]
    NotReduced(Vec<Violation>),
    #[error("word is not freely reduced; query its reduction instead")]
    WordNotReduced,
    #[error("piece distance undefined: edge {0} is not a piece")]
    Undefined(EdgeId),
    #[error("vertices {0} and {1} lie in different components")]
    DifferentComponents(VertexId, VertexId),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("opposite-edge property violated on cycle starting at {cycle_start} for vertex {x}: {detail}")]
    OppositeEdgeViolation { cycle_start: VertexId, x: VertexId, detail: String },
    #[error(transparent)]
    Budget(#[from] BudgetExceeded),
}

/// Automorphism data of a labelled graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Automorphisms {
    /// Vertex permutations generating the group (identity omitted).
    pub generators: Vec<Vec<VertexId>>,
    /// Orbits of the whole group, sorted.
    pub orbits: Vec<Vec<VertexId>>,
    /// Orbits when only automorphisms fixing every component are allowed.
    pub local_orbits: Vec<Vec<VertexId>>,
    /// Group order, `None` when it overflows.
    pub order: Option<u128>,
    #[serde(skip)]
    orbit_of: Vec<usize>,
    #[serde(skip)]
    local_orbit_of: Vec<usize>,
}

impl Automorphisms {
    pub fn orbit_of(&self, v: VertexId) -> usize {
        self.orbit_of[v]
    }

    pub fn local_orbit_of(&self, v: VertexId) -> usize {
        self.local_orbit_of[v]
    }

    pub fn is_trivial(&self) -> bool {
        self.order == Some(1)
    }
}

fn refine_colours(g: &LabelledGraph) -> Vec<usize> {
    let n = g.vertex_count();
    let sig0: Vec<Vec<Letter>> = (0..n).map(|v| g.darts(v).iter().map(|d| d.0).collect()).collect();
    let mut colour = compress(&sig0);
    loop {
        let sig: Vec<(usize, Vec<(Letter, usize)>)> = (0..n)
            .map(|v| {
                let mut s: Vec<(Letter, usize)> =
                    g.darts(v).iter().map(|&(l, st)| (l, colour[g.head(st)])).collect();
                s.sort_unstable();
                (colour[v], s)
            })
            .collect();
        let next = compress(&sig);
        let classes = |c: &[usize]| c.iter().collect::<HashSet<_>>().len();
        if classes(&next) == classes(&colour) {
            return next;
        }
        colour = next;
    }
}

fn compress<T: Ord + Clone>(sigs: &[T]) -> Vec<usize> {
    let mut sorted: Vec<T> = sigs.to_vec();
    sorted.sort();
    sorted.dedup();
    sigs.iter().map(|s| sorted.binary_search(s).unwrap()).collect()
}

/// Tries to extend `root ↦ image` to an isomorphism from the component of
/// `root` onto the component of `image`.
fn extend_map(g: &LabelledGraph, root: VertexId, image: VertexId) -> Option<BTreeMap<VertexId, VertexId>> {
    let mut map: BTreeMap<VertexId, VertexId> = BTreeMap::new();
    let mut used: HashSet<VertexId> = HashSet::new();
    map.insert(root, image);
    used.insert(image);
    let mut q = VecDeque::from([root]);
    while let Some(x) = q.pop_front() {
        let fx = map[&x];
        if g.degree(x) != g.degree(fx) {
            return None;
        }
        for &(l, st) in g.darts(x) {
            let st2 = g.step_from(fx, l)?;
            let y = g.head(st);
            let fy = g.head(st2);
            match map.get(&y) {
                Some(&m) if m != fy => return None,
                Some(_) => {}
                None => {
                    if !used.insert(fy) {
                        return None;
                    }
                    map.insert(y, fy);
                    q.push_back(y);
                }
            }
        }
    }
    let src_comp = g.component_of(root);
    let dst_comp = g.component_of(image);
    if g.components()[src_comp].vertices.len() != g.components()[dst_comp].vertices.len() {
        return None;
    }
    Some(map)
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }

    fn classes(&mut self, n: usize) -> (Vec<Vec<usize>>, Vec<usize>) {
        let mut by_root: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for v in 0..n {
            let r = self.find(v);
            by_root.entry(r).or_default().push(v);
        }
        let classes: Vec<Vec<usize>> = by_root.into_values().collect();
        let mut of = vec![0; n];
        for (i, c) in classes.iter().enumerate() {
            for &v in c {
                of[v] = i;
            }
        }
        (classes, of)
    }
}

/// Exact automorphism group of a reduced labelled graph, acting on the whole
/// disjoint union (isomorphic components may be swapped).
pub fn compute_automorphisms(g: &LabelledGraph) -> Result<Automorphisms, PieceError> {
    let (ok, viol) = g.reduced_labelling();
    if !ok {
        return Err(PieceError::NotReduced(viol.to_vec()));
    }
    let n = g.vertex_count();
    let colour = refine_colours(g);
    let comps = g.components();
    let mut uf = UnionFind((0..n).collect());
    let mut local_uf = UnionFind((0..n).collect());
    let mut comp_uf = UnionFind((0..comps.len()).collect());
    let mut generators = Vec::new();
    let mut self_count = vec![0u128; comps.len()];
    let mut swapped: HashSet<(usize, usize)> = HashSet::new();
    for (ci, comp) in comps.iter().enumerate() {
        let root = comp.vertices[0];
        for u in (0..n).filter(|&u| colour[u] == colour[root]) {
            let Some(map) = extend_map(g, root, u) else { continue };
            let dc = g.component_of(u);
            for (&x, &y) in &map {
                uf.union(x, y);
                if dc == ci {
                    local_uf.union(x, y);
                }
            }
            let mut perm: Vec<VertexId> = (0..n).collect();
            if dc == ci {
                self_count[ci] += 1;
                if u == root {
                    continue;
                }
                for (&x, &y) in &map {
                    perm[x] = y;
                }
            } else {
                comp_uf.union(ci, dc);
                if dc < ci || !swapped.insert((ci, dc)) {
                    continue;
                }
                // swap the two components along this isomorphism
                for (&x, &y) in &map {
                    perm[x] = y;
                    perm[y] = x;
                }
            }
            generators.push(perm);
        }
    }
    let (classes, _) = comp_uf.classes(comps.len());
    let mut order: Option<u128> = Some(1);
    for cls in &classes {
        let k = cls.len() as u128;
        let a = self_count[cls[0]];
        let mut term: Option<u128> = Some(1);
        for i in 1..=k {
            term = term.and_then(|t| t.checked_mul(i));
        }
        for _ in 0..k {
            term = term.and_then(|t| t.checked_mul(a));
        }
        order = order.and_then(|o| term.and_then(|t| o.checked_mul(t)));
    }
    let (orbits, orbit_of) = uf.classes(n);
    let (local_orbits, local_orbit_of) = local_uf.classes(n);
    Ok(Automorphisms { generators, orbits, local_orbits, order, orbit_of, local_orbit_of })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PieceReport {
    pub word: Word,
    /// Path read from the first witness, when there is one.
    pub path: Option<PathRef>,
    pub witness_starts: Vec<VertexId>,
    pub piece: bool,
    pub essential: bool,
}

/// Occurrence and orbit data for piece queries on one graph.
pub struct PieceIndex<'g> {
    g: &'g LabelledGraph,
    autos: Automorphisms,
    local: bool,
}

impl<'g> PieceIndex<'g> {
    pub fn new(g: &'g LabelledGraph) -> Result<Self, PieceError> {
        let autos = compute_automorphisms(g)?;
        Ok(PieceIndex { g, autos, local: false })
    }

    /// Index whose essential-piece queries only use automorphisms that fix
    /// every component.
    pub fn new_local(g: &'g LabelledGraph) -> Result<Self, PieceError> {
        let autos = compute_automorphisms(g)?;
        Ok(PieceIndex { g, autos, local: true })
    }

    fn orbit(&self, v: VertexId) -> usize {
        if self.local {
            self.autos.local_orbit_of(v)
        } else {
            self.autos.orbit_of(v)
        }
    }

    pub fn graph(&self) -> &'g LabelledGraph {
        self.g
    }

    pub fn automorphisms(&self) -> &Automorphisms {
        &self.autos
    }

    /// Every vertex from which `w` can be read.
    pub fn witness_starts(&self, w: &Word) -> Vec<VertexId> {
        let mut cur: Vec<(VertexId, VertexId)> = (0..self.g.vertex_count()).map(|v| (v, v)).collect();
        for &l in w {
            cur = cur
                .into_iter()
                .filter_map(|(s, v)| self.g.step_from(v, l).map(|st| (s, self.g.head(st))))
                .collect();
        }
        cur.into_iter().map(|(s, _)| s).collect()
    }

    fn meets_two_orbits(&self, starts: &[VertexId]) -> bool {
        let mut it = starts.iter().map(|&v| self.orbit(v));
        match it.next() {
            Some(first) => it.any(|o| o != first),
            None => false,
        }
    }

    pub fn is_piece(&self, w: &Word) -> Result<PieceReport, PieceError> {
        if !w.is_reduced() {
            return Err(PieceError::WordNotReduced);
        }
        let witness_starts = if w.is_empty() { Vec::new() } else { self.witness_starts(w) };
        let piece = witness_starts.len() >= 2;
        let essential = piece && self.meets_two_orbits(&witness_starts);
        let path = witness_starts.first().and_then(|&s| self.g.read_path_unchecked(s, w));
        Ok(PieceReport { word: w.clone(), path, witness_starts, piece, essential })
    }

    /// Length of the longest prefix of `along` whose label is a (essential) piece.
    pub fn max_piece_prefix(&self, along: &PathRef, essential: bool) -> usize {
        let label = self.g.label(along);
        self.max_piece_prefix_of_word(label.letters(), essential)
    }

    fn max_piece_prefix_of_word(&self, letters: &[Letter], essential: bool) -> usize {
        let g = self.g;
        let mut cur: Vec<(VertexId, VertexId)> = (0..g.vertex_count()).map(|v| (v, v)).collect();
        let mut best = 0;
        for (k, &l) in letters.iter().enumerate() {
            if k > 0 && letters[k - 1] == l.inverse() {
                break;
            }
            cur.retain_mut(|(_, v)| match g.step_from(*v, l) {
                Some(st) => {
                    *v = g.head(st);
                    true
                }
                None => false,
            });
            let ok = if essential {
                let starts: Vec<VertexId> = cur.iter().map(|p| p.0).collect();
                self.meets_two_orbits(&starts)
            } else {
                cur.len() >= 2
            };
            if !ok {
                break;
            }
            best = k + 1;
        }
        best
    }

    /// ℓ(i) for every position of a closed path: the longest piece starting
    /// at step `i`, capped at the cycle length.
    pub fn piece_extents(&self, cycle: &PathRef, essential: bool) -> Vec<usize> {
        let label = self.g.label(cycle);
        let n = label.len();
        let doubled: Vec<Letter> = label.iter().chain(label.iter()).copied().collect();
        (0..n).map(|i| self.max_piece_prefix_of_word(&doubled[i..i + n], essential)).collect()
    }

    /// Whether a single edge is a (essential) piece.
    pub fn edge_is_piece(&self, e: EdgeId, essential: bool) -> bool {
        let w: Word = vec![Letter::pos(self.g.edge(e).letter)].into();
        let starts = self.witness_starts(&w);
        if essential {
            self.meets_two_orbits(&starts)
        } else {
            starts.len() >= 2
        }
    }

    /// First edge that is not a piece, if any.
    pub fn first_non_piece_edge(&self, essential: bool) -> Option<EdgeId> {
        (0..self.g.edge_count()).find(|&e| !self.edge_is_piece(e, essential))
    }

    /// Every vertex reachable from `x` along one (essential) piece path.
    pub fn single_piece_reach(&self, x: VertexId, essential: bool) -> BTreeSet<VertexId> {
        self.single_piece_reach_marked(x, essential, &[]).into_keys().collect()
    }

    /// Like [`Self::single_piece_reach`], also recording which subsets (as bit
    /// masks) of `marks` a piece path can visit on the way, start excluded.
    fn single_piece_reach_marked(
        &self,
        x: VertexId,
        essential: bool,
        marks: &[VertexId],
    ) -> BTreeMap<VertexId, BTreeSet<u8>> {
        let g = self.g;
        let others: Vec<VertexId> = (0..g.vertex_count())
            .filter(|&v| v != x && (!essential || self.orbit(v) != self.orbit(x)))
            .collect();
        let mask_of = |v: VertexId| -> u8 {
            marks.iter().enumerate().filter(|(_, &m)| m == v).fold(0u8, |acc, (i, _)| acc | (1 << i))
        };
        let mut reach: BTreeMap<VertexId, BTreeSet<u8>> = BTreeMap::new();
        type State = (VertexId, Option<Step>, Vec<VertexId>, u8);
        let mut seen: HashSet<State> = HashSet::new();
        let mut stack: Vec<State> = vec![(x, None, others, 0)];
        while let Some((cur, last, others, mask)) = stack.pop() {
            for &(l, st) in g.darts(cur) {
                if last.is_some_and(|p| p.reversed() == st) {
                    continue;
                }
                let next_others: Vec<VertexId> =
                    others.iter().filter_map(|&o| g.step_from(o, l).map(|s| g.head(s))).collect();
                if next_others.is_empty() {
                    continue;
                }
                let w = g.head(st);
                let m = mask | mask_of(w);
                reach.entry(w).or_default().insert(m);
                let state = (w, Some(st), next_others, m);
                if seen.insert(state.clone()) {
                    stack.push(state);
                }
            }
        }
        reach
    }

    fn check_all_edges_pieces(&self, essential: bool) -> Result<(), PieceError> {
        match self.first_non_piece_edge(essential) {
            Some(e) => Err(PieceError::Undefined(e)),
            None => Ok(()),
        }
    }

    /// Piece distances from `x` to every vertex of its component.
    pub fn piece_distances_from(&self, x: VertexId, essential: bool) -> Result<Vec<Option<usize>>, PieceError> {
        self.check_all_edges_pieces(essential)?;
        let n = self.g.vertex_count();
        let mut dist = vec![None; n];
        dist[x] = Some(0);
        let mut q = VecDeque::from([x]);
        while let Some(u) = q.pop_front() {
            let du = dist[u].unwrap();
            for v in self.single_piece_reach(u, essential) {
                if dist[v].is_none() {
                    dist[v] = Some(du + 1);
                    q.push_back(v);
                }
            }
        }
        Ok(dist)
    }

    pub fn piece_distance(&self, x: VertexId, y: VertexId, essential: bool) -> Result<usize, PieceError> {
        if self.g.component_of(x) != self.g.component_of(y) {
            return Err(PieceError::DifferentComponents(x, y));
        }
        let d = self.piece_distances_from(x, essential)?;
        Ok(d[y].expect("every edge is a piece, so the component is reachable"))
    }

    /// Least number of pieces in a path from `x` that passes through both `y` and `z`.
    pub fn pieces_through_both(&self, x: VertexId, y: VertexId, z: VertexId) -> Result<usize, PieceError> {
        self.check_all_edges_pieces(false)?;
        let marks = [y, z];
        let start_mask = (if x == y { 1u8 } else { 0 }) | (if x == z { 2 } else { 0 });
        let mut dist: HashMap<(VertexId, u8), usize> = HashMap::new();
        dist.insert((x, start_mask), 0);
        let mut q = VecDeque::from([(x, start_mask)]);
        let mut cache: HashMap<VertexId, BTreeMap<VertexId, BTreeSet<u8>>> = HashMap::new();
        while let Some((u, m)) = q.pop_front() {
            let du = dist[&(u, m)];
            if m == 3 {
                return Ok(du);
            }
            let reach = cache.entry(u).or_insert_with(|| self.single_piece_reach_marked(u, false, &marks)).clone();
            for (v, masks) in reach {
                for pm in masks {
                    let nm = m | pm;
                    if let std::collections::hash_map::Entry::Vacant(e) = dist.entry((v, nm)) {
                        e.insert(du + 1);
                        q.push_back((v, nm));
                    }
                }
            }
        }
        Err(PieceError::DifferentComponents(y, z))
    }
}

/// Outcome of the opposite-edge analysis for one vertex on a cycle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "branch", rename_all = "snake_case")]
pub enum OppositeEdge {
    /// A vertex at piece distance ⌈n/2⌉ (n/2 for even n).
    Far { y: VertexId, distance: usize },
    /// Adjacent `y`, `z` at distance (n−1)/2 joined by `edge`, with the least
    /// number of pieces of a path from x through both.
    Opposite { y: VertexId, z: VertexId, edge: EdgeId, distance: usize, pieces_through_both: usize },
}

/// On a simple cycle of a C(n) graph, either a vertex far from
/// `x` in piece distance or an opposite edge.
pub fn opposite_edge(
    idx: &PieceIndex<'_>,
    cycle: &PathRef,
    x: VertexId,
    n: usize,
) -> Result<OppositeEdge, PieceError> {
    let g = idx.graph();
    if !g.is_simple_cycle(cycle) {
        return Err(PieceError::Precondition("path is not a simple cycle".into()));
    }
    let verts = g.path_vertices(cycle);
    let verts = &verts[..verts.len() - 1];
    let Some(pos) = verts.iter().position(|&v| v == x) else {
        return Err(PieceError::Precondition(format!("vertex {x} is not on the cycle")));
    };
    let dist = idx.piece_distances_from(x, false)?;
    let violation = |detail: String| PieceError::OppositeEdgeViolation { cycle_start: cycle.start, x, detail };
    let len = verts.len();
    let order: Vec<usize> = (0..len).map(|k| (pos + k) % len).collect();
    if n.is_multiple_of(2) {
        let want = n / 2;
        return order
            .iter()
            .map(|&i| verts[i])
            .find(|&v| dist[v] == Some(want))
            .map(|y| OppositeEdge::Far { y, distance: want })
            .ok_or_else(|| violation(format!("no vertex at piece distance {want}")));
    }
    let far = n.div_ceil(2);
    if let Some(y) = order.iter().map(|&i| verts[i]).find(|&v| dist[v] == Some(far)) {
        return Ok(OppositeEdge::Far { y, distance: far });
    }
    let near = (n - 1) / 2;
    for &i in &order {
        let j = (i + 1) % len;
        let (y, z) = (verts[i], verts[j]);
        if dist[y] == Some(near) && dist[z] == Some(near) {
            let through = idx.pieces_through_both(x, y, z)?;
            if through < far {
                return Err(violation(format!("path through {y} and {z} uses only {through} pieces")));
            }
            return Ok(OppositeEdge::Opposite {
                y,
                z,
                edge: cycle.steps[i].edge,
                distance: near,
                pieces_through_both: through,
            });
        }
    }
    Err(violation("neither branch holds".into()))
}

/// A piece that cannot be extended by a letter on either side.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MaximalPiece {
    pub label: String,
    pub length: usize,
    pub witness_starts: Vec<VertexId>,
    pub essential: bool,
    /// Extension stopped at the length cap, not at a non-piece.
    pub truncated: bool,
}

/// Maximal (essential) pieces of length at most `max_len`, one of each
/// inverse pair, sorted by word.
pub fn maximal_pieces(
    idx: &PieceIndex<'_>,
    essential: bool,
    max_len: usize,
    budget: u64,
) -> Result<Vec<MaximalPiece>, PieceError> {
    let g = idx.graph();
    let accept = |w: &Word| -> Result<bool, PieceError> {
        let r = idx.is_piece(w)?;
        Ok(if essential { r.essential } else { r.piece })
    };
    let letters: Vec<Letter> =
        (0..g.alphabet().len() as u32).flat_map(|i| [Letter::pos(i), Letter::neg(i)]).collect();
    let mut all: BTreeSet<Word> = BTreeSet::new();
    let mut stack: Vec<Word> = Vec::new();
    for &l in &letters {
        let w = Word::from(vec![l]);
        if max_len > 0 && accept(&w)? {
            stack.push(w);
        }
    }
    let mut steps = 0u64;
    while let Some(w) = stack.pop() {
        steps += 1;
        if steps > budget {
            return Err(BudgetExceeded { what: "piece enumeration", budget }.into());
        }
        if w.len() < max_len {
            for &l in &letters {
                if w.letters().last() == Some(&l.inverse()) {
                    continue;
                }
                let mut next = w.clone();
                next.push(l);
                if accept(&next)? {
                    stack.push(next);
                }
            }
        }
        all.insert(w);
    }
    let extends = |w: &Word| {
        letters.iter().any(|&l| {
            let mut right = w.clone();
            right.push(l);
            let left = Word::from(vec![l]).concat(w);
            (right.is_reduced() && all.contains(&right)) || (left.is_reduced() && all.contains(&left))
        })
    };
    all.iter()
        .filter(|w| **w <= w.inverse() && !extends(w))
        .map(|w| {
            let r = idx.is_piece(w)?;
            Ok(MaximalPiece {
                label: g.alphabet().format_word(w),
                length: w.len(),
                witness_starts: r.witness_starts,
                essential: r.essential,
                truncated: w.len() == max_len,
            })
        })
        .collect()
}

/// Greedy inclusion-maximal family of pairwise vertex-disjoint simple cycles,
/// shortest first in canonical order.
pub fn disjoint_simple_cycles(g: &LabelledGraph, budget: u64) -> Result<Vec<PathRef>, BudgetExceeded> {
    let cycles = simple_cycles(g, budget)?;
    Ok(greedy_disjoint(g, cycles))
}

pub(crate) fn greedy_disjoint(g: &LabelledGraph, cycles: Vec<PathRef>) -> Vec<PathRef> {
    let mut used = vec![false; g.vertex_count()];
    let mut out = Vec::new();
    for c in cycles {
        let vs = g.path_vertices(&c);
        if vs.iter().any(|&v| used[v]) {
            continue;
        }
        for v in vs {
            used[v] = true;
        }
        out.push(c);
    }
    out
}
