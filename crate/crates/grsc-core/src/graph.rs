//! Finite S-labelled directed multigraphs, paths and their labels.

use std::collections::VecDeque;

use serde::Serialize;
use thiserror::Error;

use crate::alphabet::Alphabet;
use crate::word::{Letter, Word};

pub type VertexId = usize;
pub type EdgeId = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("edge {edge} has endpoint {vertex} outside 0..{count}")]
    BadEndpoint { edge: EdgeId, vertex: VertexId, count: usize },
    #[error("edge {edge} uses letter index {letter} outside the alphabet")]
    BadLetter { edge: EdgeId, letter: u32 },
    #[error("labelling is not reduced ({} violations)", .0.len())]
    NotReduced(Vec<Violation>),
    #[error("vertex {0} does not exist")]
    NoSuchVertex(VertexId),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Edge {
    pub source: VertexId,
    pub target: VertexId,
    pub letter: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Dir {
    Forward,
    Backward,
}

/// One traversal of an edge, in a given direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Step {
    pub edge: EdgeId,
    pub dir: Dir,
}

impl Step {
    pub fn forward(edge: EdgeId) -> Self {
        Step { edge, dir: Dir::Forward }
    }

    pub fn backward(edge: EdgeId) -> Self {
        Step { edge, dir: Dir::Backward }
    }

    pub fn reversed(self) -> Self {
        Step {
            edge: self.edge,
            dir: match self.dir {
                Dir::Forward => Dir::Backward,
                Dir::Backward => Dir::Forward,
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct PathRef {
    pub start: VertexId,
    pub steps: Vec<Step>,
}

impl PathRef {
    pub fn empty(start: VertexId) -> Self {
        PathRef { start, steps: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// Which side of a vertex a reducedness violation sits on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Out,
    In,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub vertex: VertexId,
    pub letter: u32,
    pub side: Side,
    pub edges: Vec<EdgeId>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Component {
    pub name: Option<String>,
    pub vertices: Vec<VertexId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelledGraph {
    alphabet: Alphabet,
    vertex_count: usize,
    edges: Vec<Edge>,
    components: Vec<Component>,
    component_of: Vec<usize>,
    // darts leaving each vertex keyed by the letter read, sorted
    darts: Vec<Vec<(Letter, Step)>>,
    violations: Vec<Violation>,
}

impl LabelledGraph {
    /// Builds a graph; components are computed and left unnamed.
    pub fn new(alphabet: Alphabet, vertex_count: usize, edges: Vec<Edge>) -> Result<Self, GraphError> {
        Self::with_names(alphabet, vertex_count, edges, &[])
    }

    /// Like [`LabelledGraph::new`], naming the component containing vertex `v` for each `(v, name)`.
    pub fn with_names(
        alphabet: Alphabet,
        vertex_count: usize,
        edges: Vec<Edge>,
        names: &[(VertexId, String)],
    ) -> Result<Self, GraphError> {
        for (i, e) in edges.iter().enumerate() {
            for v in [e.source, e.target] {
                if v >= vertex_count {
                    return Err(GraphError::BadEndpoint { edge: i, vertex: v, count: vertex_count });
                }
            }
            if e.letter as usize >= alphabet.len() {
                return Err(GraphError::BadLetter { edge: i, letter: e.letter });
            }
        }
        let mut darts: Vec<Vec<(Letter, Step)>> = vec![Vec::new(); vertex_count];
        for (i, e) in edges.iter().enumerate() {
            darts[e.source].push((Letter::pos(e.letter), Step::forward(i)));
            darts[e.target].push((Letter::neg(e.letter), Step::backward(i)));
        }
        for d in &mut darts {
            d.sort();
        }

        let mut violations = Vec::new();
        for (v, ds) in darts.iter().enumerate() {
            let mut i = 0;
            while i < ds.len() {
                let mut j = i + 1;
                while j < ds.len() && ds[j].0 == ds[i].0 {
                    j += 1;
                }
                if j - i > 1 {
                    let l = ds[i].0;
                    violations.push(Violation {
                        vertex: v,
                        letter: l.index(),
                        side: if l.is_positive() { Side::Out } else { Side::In },
                        edges: ds[i..j].iter().map(|d| d.1.edge).collect(),
                    });
                }
                i = j;
            }
        }

        // components by BFS in order of least vertex
        let mut component_of = vec![usize::MAX; vertex_count];
        let mut components = Vec::new();
        for s in 0..vertex_count {
            if component_of[s] != usize::MAX {
                continue;
            }
            let c = components.len();
            let mut verts = vec![s];
            component_of[s] = c;
            let mut q = VecDeque::from([s]);
            while let Some(u) = q.pop_front() {
                for &(_, st) in &darts[u] {
                    let e = edges[st.edge];
                    let w = if st.dir == Dir::Forward { e.target } else { e.source };
                    if component_of[w] == usize::MAX {
                        component_of[w] = c;
                        verts.push(w);
                        q.push_back(w);
                    }
                }
            }
            verts.sort_unstable();
            components.push(Component { name: None, vertices: verts });
        }
        for (v, name) in names {
            if *v >= vertex_count {
                return Err(GraphError::NoSuchVertex(*v));
            }
            components[component_of[*v]].name = Some(name.clone());
        }

        Ok(LabelledGraph { alphabet, vertex_count, edges, components, component_of, darts, violations })
    }

    /// Disjoint union; component names are kept, vertex ids shifted in order.
    pub fn disjoint_union(alphabet: Alphabet, parts: &[LabelledGraph]) -> Result<Self, GraphError> {
        let mut edges = Vec::new();
        let mut names = Vec::new();
        let mut offset = 0;
        for g in parts {
            for e in &g.edges {
                let name = g.alphabet.name(e.letter);
                let letter = alphabet
                    .lookup(name)
                    .ok_or(GraphError::BadLetter { edge: edges.len(), letter: e.letter })?;
                edges.push(Edge { source: e.source + offset, target: e.target + offset, letter });
            }
            for c in &g.components {
                if let Some(n) = &c.name {
                    names.push((c.vertices[0] + offset, n.clone()));
                }
            }
            offset += g.vertex_count;
        }
        Self::with_names(alphabet, offset, edges, &names)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> Edge {
        self.edges[e]
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn component_of(&self, v: VertexId) -> usize {
        self.component_of[v]
    }

    /// Display name of component `c`: its given name or `K{c+1}`.
    pub fn component_name(&self, c: usize) -> String {
        self.components[c].name.clone().unwrap_or_else(|| format!("K{}", c + 1))
    }

    pub fn find_component(&self, name: &str) -> Option<usize> {
        (0..self.components.len()).find(|&c| self.component_name(c) == name)
    }

    /// Darts leaving `v` with the letter each one reads.
    pub fn darts(&self, v: VertexId) -> &[(Letter, Step)] {
        &self.darts[v]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.darts[v].len()
    }

    pub fn is_reduced(&self) -> bool {
        self.violations.is_empty()
    }

    /// Reducedness of the labelling plus every violating (vertex, letter, side).
    pub fn reduced_labelling(&self) -> (bool, &[Violation]) {
        (self.violations.is_empty(), &self.violations)
    }

    pub fn tail(&self, s: Step) -> VertexId {
        let e = self.edges[s.edge];
        match s.dir {
            Dir::Forward => e.source,
            Dir::Backward => e.target,
        }
    }

    pub fn head(&self, s: Step) -> VertexId {
        let e = self.edges[s.edge];
        match s.dir {
            Dir::Forward => e.target,
            Dir::Backward => e.source,
        }
    }

    pub fn step_letter(&self, s: Step) -> Letter {
        Letter::new(self.edges[s.edge].letter, s.dir == Dir::Forward)
    }

    /// The dart at `v` reading `l`; the first match when the labelling is not reduced.
    pub fn step_from(&self, v: VertexId, l: Letter) -> Option<Step> {
        let ds = &self.darts[v];
        let i = ds.partition_point(|d| d.0 < l);
        ds.get(i).filter(|d| d.0 == l).map(|d| d.1)
    }

    /// Follows `w` from `start`; the result is unique under a reduced labelling.
    pub fn read_path(&self, start: VertexId, w: &Word) -> Result<Option<PathRef>, GraphError> {
        if !self.is_reduced() {
            return Err(GraphError::NotReduced(self.violations.clone()));
        }
        if start >= self.vertex_count {
            return Err(GraphError::NoSuchVertex(start));
        }
        Ok(self.read_path_unchecked(start, w))
    }

    pub(crate) fn read_path_unchecked(&self, start: VertexId, w: &Word) -> Option<PathRef> {
        let mut v = start;
        let mut steps = Vec::with_capacity(w.len());
        for &l in w {
            let s = self.step_from(v, l)?;
            v = self.head(s);
            steps.push(s);
        }
        Some(PathRef { start, steps })
    }

    /// End vertex after reading `w` from `start`, if readable.
    pub fn read_end(&self, start: VertexId, w: &[Letter]) -> Option<VertexId> {
        let mut v = start;
        for &l in w {
            v = self.head(self.step_from(v, l)?);
        }
        Some(v)
    }

    pub fn label(&self, p: &PathRef) -> Word {
        p.steps.iter().map(|&s| self.step_letter(s)).collect()
    }

    pub fn path_end(&self, p: &PathRef) -> VertexId {
        p.steps.last().map_or(p.start, |&s| self.head(s))
    }

    /// Vertices visited, including the start (length `len + 1`).
    pub fn path_vertices(&self, p: &PathRef) -> Vec<VertexId> {
        let mut out = Vec::with_capacity(p.len() + 1);
        out.push(p.start);
        out.extend(p.steps.iter().map(|&s| self.head(s)));
        out
    }

    pub fn inverse_path(&self, p: &PathRef) -> PathRef {
        PathRef {
            start: self.path_end(p),
            steps: p.steps.iter().rev().map(|s| s.reversed()).collect(),
        }
    }

    /// Steps are incident in sequence.
    pub fn is_path(&self, p: &PathRef) -> bool {
        let mut v = p.start;
        for &s in &p.steps {
            if s.edge >= self.edges.len() || self.tail(s) != v {
                return false;
            }
            v = self.head(s);
        }
        v < self.vertex_count || p.steps.is_empty() && p.start < self.vertex_count
    }

    /// Closed, nonempty, no repeated vertex or edge.
    pub fn is_simple_cycle(&self, p: &PathRef) -> bool {
        if p.is_empty() || !self.is_path(p) || self.path_end(p) != p.start {
            return false;
        }
        let vs = self.path_vertices(p);
        let mut seen_v = vec![false; self.vertex_count];
        for &v in &vs[..vs.len() - 1] {
            if std::mem::replace(&mut seen_v[v], true) {
                return false;
            }
        }
        let mut seen_e = vec![false; self.edges.len()];
        p.steps.iter().all(|s| !std::mem::replace(&mut seen_e[s.edge], true))
    }

    /// Closed path rotated to start at step `k`.
    pub fn rotate_cycle(&self, p: &PathRef, k: usize) -> PathRef {
        let n = p.len();
        if n == 0 {
            return p.clone();
        }
        let k = k % n;
        let mut steps = p.steps[k..].to_vec();
        steps.extend_from_slice(&p.steps[..k]);
        let start = if k == 0 { p.start } else { self.head(p.steps[k - 1]) };
        PathRef { start, steps }
    }

    /// Component `c` as a graph of its own, vertices renumbered in order.
    pub fn component_graph(&self, c: usize) -> LabelledGraph {
        let comp = &self.components[c];
        let mut local = vec![usize::MAX; self.vertex_count];
        for (i, &v) in comp.vertices.iter().enumerate() {
            local[v] = i;
        }
        let edges: Vec<Edge> = self
            .edges
            .iter()
            .filter(|e| self.component_of[e.source] == c)
            .map(|e| Edge { source: local[e.source], target: local[e.target], letter: e.letter })
            .collect();
        let names: Vec<(VertexId, String)> = comp.name.iter().map(|n| (0, n.clone())).collect();
        Self::with_names(self.alphabet.clone(), comp.vertices.len(), edges, &names).expect("component of a valid graph")
    }

    /// Subgraph keeping the listed edges and all vertices; letters kept as is.
    pub fn without_edges(&self, drop: &[bool]) -> LabelledGraph {
        let edges: Vec<Edge> =
            self.edges.iter().enumerate().filter(|(i, _)| !drop[*i]).map(|(_, e)| *e).collect();
        let names = self.carried_names();
        Self::with_names(self.alphabet.clone(), self.vertex_count, edges, &names)
            .expect("subgraph of a valid graph")
    }

    /// Same vertices and edges over a new alphabet via an index map.
    pub fn relabel(&self, alphabet: Alphabet, map: &[Option<u32>]) -> Option<LabelledGraph> {
        let edges = self
            .edges
            .iter()
            .map(|e| map[e.letter as usize].map(|l| Edge { letter: l, ..*e }))
            .collect::<Option<Vec<_>>>()?;
        Self::with_names(alphabet, self.vertex_count, edges, &self.carried_names()).ok()
    }

    fn carried_names(&self) -> Vec<(VertexId, String)> {
        self.components
            .iter()
            .filter_map(|c| c.name.as_ref().map(|n| (c.vertices[0], n.clone())))
            .collect()
    }

    /// Breadth-first distances in the underlying undirected graph.
    pub fn distances_from(&self, s: VertexId) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.vertex_count];
        dist[s] = Some(0);
        let mut q = VecDeque::from([s]);
        while let Some(u) = q.pop_front() {
            let du = dist[u].unwrap();
            for &(_, st) in &self.darts[u] {
                let w = self.head(st);
                if dist[w].is_none() {
                    dist[w] = Some(du + 1);
                    q.push_back(w);
                }
            }
        }
        dist
    }

    /// Edges that are not bridges, i.e. lie on some simple cycle.
    pub fn cycle_edges(&self) -> Vec<bool> {
        self.edges
            .iter()
            .enumerate()
            .map(|(i, e)| e.source == e.target || self.connected_without(e.source, e.target, i))
            .collect()
    }

    fn connected_without(&self, s: VertexId, t: VertexId, skip: EdgeId) -> bool {
        let mut seen = vec![false; self.vertex_count];
        seen[s] = true;
        let mut q = VecDeque::from([s]);
        while let Some(u) = q.pop_front() {
            if u == t {
                return true;
            }
            for &(_, st) in &self.darts[u] {
                if st.edge == skip {
                    continue;
                }
                let w = self.head(st);
                if !seen[w] {
                    seen[w] = true;
                    q.push_back(w);
                }
            }
        }
        false
    }

    /// Shortest path from `s` to `t` avoiding edge `skip`, by BFS in dart order.
    pub fn path_avoiding(&self, s: VertexId, t: VertexId, skip: Option<EdgeId>) -> Option<PathRef> {
        let mut prev: Vec<Option<Step>> = vec![None; self.vertex_count];
        let mut seen = vec![false; self.vertex_count];
        seen[s] = true;
        let mut q = VecDeque::from([s]);
        while let Some(u) = q.pop_front() {
            if u == t {
                break;
            }
            for &(_, st) in &self.darts[u] {
                if Some(st.edge) == skip {
                    continue;
                }
                let w = self.head(st);
                if !seen[w] {
                    seen[w] = true;
                    prev[w] = Some(st);
                    q.push_back(w);
                }
            }
        }
        if !seen[t] {
            return None;
        }
        let mut steps = Vec::new();
        let mut v = t;
        while v != s {
            let st = prev[v].unwrap();
            steps.push(st);
            v = self.tail(st);
        }
        steps.reverse();
        Some(PathRef { start: s, steps })
    }

    /// True if the graph has no cycles at all.
    pub fn is_forest(&self) -> bool {
        self.edges.len() + self.components.len() == self.vertex_count
    }
}
