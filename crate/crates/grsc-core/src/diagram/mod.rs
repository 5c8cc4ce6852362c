//! Singular disk diagrams as combinatorial maps.
//!
//! Edge `e` has two darts, `e+` from tail to head and `e-` back. A face is a
//! closed walk of darts with the face on the left of every dart, i.e. read
//! counterclockwise. The boundary walk goes counterclockwise around the whole
//! diagram from the base vertex; the outer face is that walk reversed. The
//! faces together with the outer face use every dart exactly once, which
//! fixes the rotation at each vertex, so planarity is an Euler count.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::alphabet::{Alphabet, AlphabetError};
use crate::conditions::{Condition, ConditionReport};
use crate::graph::{EdgeId, LabelledGraph, Step, VertexId};
use crate::pieces::{compute_automorphisms, Automorphisms, PieceError};
use crate::presentation::Presentation;
use crate::solver::{replay, variant_word, DerivationStep, SolverError};
use crate::word::{Letter, Word};

pub mod fixtures;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiagramError {
    #[error("malformed diagram: {0}")]
    Malformed(String),
    #[error("not planar: Euler characteristic {euler}{}", .vertex.map(|v| format!(", vertex {v} has a split link")).unwrap_or_default())]
    NotPlanar { euler: i64, vertex: Option<VertexId> },
    #[error("not simply connected: vertices {unreachable:?} are cut off from the base")]
    NotSimplyConnected { unreachable: Vec<VertexId> },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("face {0} does not lift: its label is not read on a closed path")]
    NoLift(usize),
    #[error("face {face} lifts from {} starts: {starts:?}", .starts.len())]
    AmbiguousLift { face: usize, starts: Vec<VertexId> },
    #[error("diagram carries no edge labels")]
    Unlabelled,
    #[error("folding would close off a spherical subdiagram at step {0}")]
    SphericalPocket(usize),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Piece(#[from] PieceError),
    #[error(transparent)]
    Alphabet(#[from] AlphabetError),
    #[error("json: {0}")]
    Json(String),
}

/// One side of an edge: `2·edge` runs tail to head, `2·edge + 1` back.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Dart(usize);

impl Dart {
    pub fn new(edge: EdgeId, forward: bool) -> Self {
        Dart(2 * edge + usize::from(!forward))
    }

    pub fn edge(self) -> EdgeId {
        self.0 / 2
    }

    pub fn is_forward(self) -> bool {
        self.0.is_multiple_of(2)
    }

    pub fn rev(self) -> Self {
        Dart(self.0 ^ 1)
    }
}

impl fmt::Display for Dart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.edge(), if self.is_forward() { '+' } else { '-' })
    }
}

impl fmt::Debug for Dart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Dart {
    type Err = DiagramError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || DiagramError::Malformed(format!("bad dart `{s}` (expected e.g. `3+` or `3-`)"));
        let (num, forward) = match s.as_bytes().last() {
            Some(b'+') => (&s[..s.len() - 1], true),
            Some(b'-') => (&s[..s.len() - 1], false),
            _ => return Err(bad()),
        };
        Ok(Dart::new(num.parse().map_err(|_| bad())?, forward))
    }
}

impl Serialize for Dart {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Dart {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DEdge {
    pub tail: VertexId,
    pub head: VertexId,
    /// Letter read along `+`; `None` once labels have been forgotten.
    pub letter: Option<Letter>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Cell {
    Face(usize),
    Outer,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagram {
    alphabet: Alphabet,
    vertex_count: usize,
    edges: Vec<DEdge>,
    faces: Vec<Vec<Dart>>,
    boundary: Vec<Dart>,
    base: VertexId,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FaceKind {
    Interior,
    Boundary,
}

/// Maximal path whose inner vertices have degree 2.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Arc {
    pub darts: Vec<Dart>,
    pub closed: bool,
    pub interior: bool,
    pub left: Cell,
    pub right: Cell,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    pub euler_characteristic: i64,
    pub boundary_length: usize,
    pub boundary_word: Option<String>,
    pub face_kinds: Vec<FaceKind>,
    pub interior_edges: usize,
    pub arcs: Vec<Arc>,
    pub spurs: Vec<VertexId>,
    /// Boundary is a simple closed curve (no cut vertices, no spurs).
    pub simple: bool,
}

impl Diagram {
    pub fn new(
        alphabet: Alphabet,
        vertex_count: usize,
        edges: Vec<DEdge>,
        faces: Vec<Vec<Dart>>,
        boundary: Vec<Dart>,
        base: VertexId,
    ) -> Result<Self, DiagramError> {
        let d = Diagram { alphabet, vertex_count, edges, faces, boundary, base };
        d.check_walks()?;
        d.successor()?;
        Ok(d)
    }

    /// The one-vertex diagram of the empty word.
    pub fn trivial(alphabet: Alphabet) -> Self {
        Diagram { alphabet, vertex_count: 1, edges: Vec::new(), faces: Vec::new(), boundary: Vec::new(), base: 0 }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[DEdge] {
        &self.edges
    }

    pub fn faces(&self) -> &[Vec<Dart>] {
        &self.faces
    }

    pub fn boundary(&self) -> &[Dart] {
        &self.boundary
    }

    pub fn base(&self) -> VertexId {
        self.base
    }

    /// |D|, the number of faces.
    pub fn area(&self) -> usize {
        self.faces.len()
    }

    pub fn tail(&self, d: Dart) -> VertexId {
        let e = &self.edges[d.edge()];
        if d.is_forward() {
            e.tail
        } else {
            e.head
        }
    }

    pub fn head(&self, d: Dart) -> VertexId {
        self.tail(d.rev())
    }

    pub fn dart_letter(&self, d: Dart) -> Option<Letter> {
        self.edges[d.edge()].letter.map(|l| if d.is_forward() { l } else { l.inverse() })
    }

    pub fn walk_word(&self, walk: &[Dart]) -> Option<Word> {
        walk.iter().map(|&d| self.dart_letter(d)).collect::<Option<Vec<_>>>().map(Word::from)
    }

    pub fn face_word(&self, f: usize) -> Option<Word> {
        self.walk_word(&self.faces[f])
    }

    pub fn boundary_word(&self) -> Option<Word> {
        self.walk_word(&self.boundary)
    }

    pub fn outer_walk(&self) -> Vec<Dart> {
        self.boundary.iter().rev().map(|d| d.rev()).collect()
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.edges.iter().map(|e| usize::from(e.tail == v) + usize::from(e.head == v)).sum()
    }

    fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.vertex_count];
        for e in &self.edges {
            deg[e.tail] += 1;
            deg[e.head] += 1;
        }
        deg
    }

    fn out_darts(&self) -> Vec<Vec<Dart>> {
        let mut out = vec![Vec::new(); self.vertex_count];
        for e in 0..self.edges.len() {
            for fwd in [true, false] {
                let d = Dart::new(e, fwd);
                out[self.tail(d)].push(d);
            }
        }
        out
    }

    fn check_walks(&self) -> Result<(), DiagramError> {
        let bad = |m: String| Err(DiagramError::Malformed(m));
        if self.vertex_count == 0 {
            return bad("no vertices".into());
        }
        if self.base >= self.vertex_count {
            return bad(format!("base {} out of range", self.base));
        }
        for (i, e) in self.edges.iter().enumerate() {
            if e.tail >= self.vertex_count || e.head >= self.vertex_count {
                return bad(format!("edge {i} has an endpoint out of range"));
            }
            if e.letter.is_some_and(|l| l.index() as usize >= self.alphabet.len()) {
                return bad(format!("edge {i} uses a letter outside the alphabet"));
            }
        }
        let walks = self.faces.iter().map(|w| ("face", w)).chain(std::iter::once(("boundary", &self.boundary)));
        for (what, w) in walks {
            if what == "face" && w.is_empty() {
                return bad("empty face".into());
            }
            if let Some(d) = w.iter().find(|d| d.edge() >= self.edges.len()) {
                return bad(format!("{what} uses unknown dart {d}"));
            }
            for i in 0..w.len() {
                if self.head(w[i]) != self.tail(w[(i + 1) % w.len()]) {
                    return bad(format!("{what} walk breaks after dart {}", w[i]));
                }
            }
        }
        if let Some(&d) = self.boundary.first() {
            if self.tail(d) != self.base {
                return bad("boundary does not start at the base vertex".into());
            }
        } else if !self.edges.is_empty() {
            return bad("edges but an empty boundary: closed surfaces are not disk diagrams".into());
        }
        Ok(())
    }

    /// Next dart in the cell of each dart.
    fn successor(&self) -> Result<Vec<Dart>, DiagramError> {
        let n = 2 * self.edges.len();
        let mut next: Vec<Option<Dart>> = vec![None; n];
        let outer = self.outer_walk();
        for w in self.faces.iter().chain(std::iter::once(&outer)) {
            for i in 0..w.len() {
                let slot = &mut next[w[i].0];
                if slot.is_some() {
                    return Err(DiagramError::Malformed(format!("dart {} lies in two cells", w[i])));
                }
                *slot = Some(w[(i + 1) % w.len()]);
            }
        }
        next.iter()
            .enumerate()
            .map(|(i, d)| d.ok_or_else(|| DiagramError::Malformed(format!("dart {} lies in no cell", Dart(i)))))
            .collect()
    }

    fn cell_of(&self) -> Vec<(Cell, usize)> {
        let mut of = vec![(Cell::Outer, 0); 2 * self.edges.len()];
        for (i, d) in self.outer_walk().into_iter().enumerate() {
            of[d.0] = (Cell::Outer, i);
        }
        for (f, w) in self.faces.iter().enumerate() {
            for (i, d) in w.iter().enumerate() {
                of[d.0] = (Cell::Face(f), i);
            }
        }
        of
    }

    /// Darts leaving each vertex in clockwise order, starting from the least.
    pub fn rotation(&self) -> Result<Vec<Vec<Dart>>, DiagramError> {
        let next = self.successor()?;
        let out = self.out_darts();
        Ok(out
            .iter()
            .map(|ds| {
                let Some(&first) = ds.iter().min() else { return Vec::new() };
                let mut cyc = vec![first];
                let mut cur = next[first.rev().0];
                while cur != first && cyc.len() <= ds.len() {
                    cyc.push(cur);
                    cur = next[cur.rev().0];
                }
                cyc
            })
            .collect())
    }

    pub fn validate(&self) -> Result<ValidationReport, DiagramError> {
        self.check_walks()?;
        let next = self.successor()?;
        let out = self.out_darts();

        let mut seen = vec![false; self.vertex_count];
        seen[self.base] = true;
        let mut q = VecDeque::from([self.base]);
        while let Some(v) = q.pop_front() {
            for &d in &out[v] {
                let h = self.head(d);
                if !seen[h] {
                    seen[h] = true;
                    q.push_back(h);
                }
            }
        }
        let unreachable: Vec<VertexId> = (0..self.vertex_count).filter(|&v| !seen[v]).collect();
        if !unreachable.is_empty() {
            return Err(DiagramError::NotSimplyConnected { unreachable });
        }

        let euler = self.vertex_count as i64 - self.edges.len() as i64 + self.faces.len() as i64 + 1;
        for (v, ds) in out.iter().enumerate() {
            if let Some(&first) = ds.first() {
                let mut len = 1;
                let mut cur = next[first.rev().0];
                while cur != first {
                    len += 1;
                    cur = next[cur.rev().0];
                }
                if len != ds.len() {
                    return Err(DiagramError::NotPlanar { euler, vertex: Some(v) });
                }
            }
        }
        if euler != 2 {
            return Err(DiagramError::NotPlanar { euler, vertex: None });
        }

        let cell = self.cell_of();
        let face_kinds = self
            .faces
            .iter()
            .map(|w| {
                if w.iter().any(|d| cell[d.rev().0].0 == Cell::Outer) {
                    FaceKind::Boundary
                } else {
                    FaceKind::Interior
                }
            })
            .collect();
        let interior_edges = (0..self.edges.len())
            .filter(|&e| (0..2).all(|k| cell[2 * e + k].0 != Cell::Outer))
            .count();
        let deg = self.degrees();
        let spurs: Vec<VertexId> = (0..self.vertex_count).filter(|&v| deg[v] == 1).collect();
        let mut bverts: Vec<VertexId> = self.boundary.iter().map(|&d| self.tail(d)).collect();
        bverts.sort_unstable();
        let repeats = bverts.windows(2).any(|w| w[0] == w[1]);
        Ok(ValidationReport {
            vertices: self.vertex_count,
            edges: self.edges.len(),
            faces: self.faces.len(),
            euler_characteristic: euler,
            boundary_length: self.boundary.len(),
            boundary_word: self.boundary_word().map(|w| self.alphabet.format_word(&w)),
            face_kinds,
            interior_edges,
            arcs: self.arcs(&cell, &out, &deg),
            simple: !repeats && spurs.is_empty(),
            spurs,
        })
    }

    fn arcs(&self, cell: &[(Cell, usize)], out: &[Vec<Dart>], deg: &[usize]) -> Vec<Arc> {
        let through = |v: VertexId| deg[v] == 2 && out[v].len() == 2 && out[v][0].edge() != out[v][1].edge();
        let other = |v: VertexId, d: Dart| if out[v][0] == d { out[v][1] } else { out[v][0] };
        let mut used = vec![false; self.edges.len()];
        let mut arcs = Vec::new();
        for e in 0..self.edges.len() {
            if used[e] {
                continue;
            }
            let mut start = Dart::new(e, true);
            loop {
                let v = self.tail(start);
                if !through(v) {
                    break;
                }
                let p = other(v, start).rev();
                if p.edge() == e {
                    break;
                }
                start = p;
            }
            let mut darts = vec![start];
            used[start.edge()] = true;
            let mut closed = false;
            let mut cur = start;
            loop {
                let v = self.head(cur);
                if !through(v) {
                    break;
                }
                let nxt = other(v, cur.rev());
                if nxt == darts[0] {
                    closed = true;
                    break;
                }
                if used[nxt.edge()] {
                    break;
                }
                used[nxt.edge()] = true;
                darts.push(nxt);
                cur = nxt;
            }
            let left = cell[darts[0].0].0;
            let right = cell[darts[0].rev().0].0;
            arcs.push(Arc { interior: left != Cell::Outer && right != Cell::Outer, darts, closed, left, right });
        }
        arcs
    }

    fn interior_vertices(&self) -> Vec<bool> {
        let mut interior = vec![true; self.vertex_count];
        interior[self.base] = false;
        for &d in &self.boundary {
            interior[self.tail(d)] = false;
        }
        interior
    }

    fn interior_faces(&self) -> Vec<bool> {
        let cell = self.cell_of();
        self.faces.iter().map(|w| w.iter().all(|d| cell[d.rev().0].0 != Cell::Outer)).collect()
    }

    fn substitute(&mut self, map: &HashMap<Dart, Dart>) {
        for w in self.faces.iter_mut().chain(std::iter::once(&mut self.boundary)) {
            for d in w.iter_mut() {
                if let Some(&r) = map.get(d) {
                    *d = r;
                }
            }
        }
    }

    fn merge_vertex(&mut self, from: VertexId, into: VertexId) {
        for e in &mut self.edges {
            if e.tail == from {
                e.tail = into;
            }
            if e.head == from {
                e.head = into;
            }
        }
        if self.base == from {
            self.base = into;
        }
    }

    /// Identifies edge `y` with the reverse of `x`, and the far end of `y`
    /// with the tail of `x`. The caller has already dropped both darts from
    /// the walk where they were adjacent.
    fn identify(&mut self, x: Dart, y: Dart, dead_v: &mut [bool], dead_e: &mut [bool]) {
        let (u, w) = (self.tail(x), self.head(y));
        if u != w {
            self.merge_vertex(w, u);
            dead_v[w] = true;
        }
        let map = HashMap::from([(y, x.rev()), (y.rev(), x)]);
        self.substitute(&map);
        dead_e[y.edge()] = true;
    }

    /// Drops dead vertices and edges, renumbering what is left in order.
    fn compact(self, dead_v: &[bool], dead_e: &[bool]) -> Diagram {
        let mut vmap = vec![usize::MAX; self.vertex_count];
        let mut nv = 0;
        for v in 0..self.vertex_count {
            if !dead_v[v] {
                vmap[v] = nv;
                nv += 1;
            }
        }
        let mut emap = vec![usize::MAX; self.edges.len()];
        let mut edges = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            if !dead_e[i] {
                emap[i] = edges.len();
                edges.push(DEdge { tail: vmap[e.tail], head: vmap[e.head], letter: e.letter });
            }
        }
        let md = |d: &Dart| Dart::new(emap[d.edge()], d.is_forward());
        Diagram {
            alphabet: self.alphabet,
            vertex_count: nv,
            edges,
            faces: self.faces.iter().map(|w| w.iter().map(md).collect()).collect(),
            boundary: self.boundary.iter().map(md).collect(),
            base: vmap[self.base],
        }
    }

    /// Renumbers vertices, edges and faces in order of first appearance:
    /// the boundary walk from the base, then faces reached across edges.
    pub fn canonicalize(&self) -> Diagram {
        let mut vmap: Vec<Option<usize>> = vec![None; self.vertex_count];
        let mut emap: Vec<Option<usize>> = vec![None; self.edges.len()];
        let mut edges: Vec<DEdge> = Vec::new();
        let mut nv = 0;
        let mut touch_v = |v: VertexId, vmap: &mut Vec<Option<usize>>| {
            if vmap[v].is_none() {
                vmap[v] = Some(nv);
                nv += 1;
            }
        };
        touch_v(self.base, &mut vmap);
        let mut seq: Vec<Dart> = Vec::new();
        let mut visit = |d: Dart, vmap: &mut Vec<Option<usize>>, seq: &mut Vec<Dart>| {
            touch_v(self.tail(d), vmap);
            touch_v(self.head(d), vmap);
            if emap[d.edge()].is_none() {
                emap[d.edge()] = Some(edges.len());
                let e = self.edges[d.edge()];
                edges.push(e);
            }
            seq.push(d);
        };
        for &d in &self.boundary {
            visit(d, &mut vmap, &mut seq);
        }
        let cell = self.cell_of();
        let mut placed = vec![false; self.faces.len()];
        let mut order: Vec<Vec<Dart>> = Vec::new();
        let mut k = 0;
        while order.len() < self.faces.len() {
            let mut pick = None;
            'scan: while k < seq.len() {
                for x in [seq[k], seq[k].rev()] {
                    if let (Cell::Face(f), i) = cell[x.0] {
                        if !placed[f] {
                            pick = Some((f, i));
                            break 'scan;
                        }
                    }
                }
                k += 1;
            }
            let (f, i) = pick.unwrap_or_else(|| ((0..self.faces.len()).find(|&f| !placed[f]).unwrap(), 0));
            placed[f] = true;
            let w = &self.faces[f];
            let rotated: Vec<Dart> = (0..w.len()).map(|j| w[(i + j) % w.len()]).collect();
            for &d in &rotated {
                visit(d, &mut vmap, &mut seq);
            }
            order.push(rotated);
        }
        let vm = |v: VertexId| vmap[v].unwrap();
        let md = |d: &Dart| Dart::new(emap[d.edge()].unwrap(), d.is_forward());
        Diagram {
            alphabet: self.alphabet.clone(),
            vertex_count: nv,
            edges: edges.iter().map(|e| DEdge { tail: vm(e.tail), head: vm(e.head), letter: e.letter }).collect(),
            faces: order.iter().map(|w| w.iter().map(md).collect()).collect(),
            boundary: self.boundary.iter().map(md).collect(),
            base: vm(self.base),
        }
    }

    pub fn to_file(&self) -> DiagramFile {
        DiagramFile {
            alphabet: self.alphabet.names().to_vec(),
            vertices: self.vertex_count,
            base: self.base,
            edges: self
                .edges
                .iter()
                .map(|e| EdgeRecord {
                    tail: e.tail,
                    head: e.head,
                    letter: e.letter.map(|l| self.alphabet.format_letter(l)),
                })
                .collect(),
            faces: self.faces.clone(),
            boundary: self.boundary.clone(),
            rotation: self.rotation().ok(),
        }
    }

    pub fn from_file(f: &DiagramFile) -> Result<Self, DiagramError> {
        let alphabet = Alphabet::new(f.alphabet.iter().cloned())?;
        let edges = f
            .edges
            .iter()
            .map(|e| {
                let letter = e.letter.as_deref().map(|t| alphabet.parse_letter(t)).transpose()?;
                Ok(DEdge { tail: e.tail, head: e.head, letter })
            })
            .collect::<Result<Vec<_>, DiagramError>>()?;
        let d = Diagram::new(alphabet, f.vertices, edges, f.faces.clone(), f.boundary.clone(), f.base)?;
        if let Some(given) = &f.rotation {
            let ours = d.rotation()?;
            if given.len() != ours.len() {
                return Err(DiagramError::Malformed("rotation system has the wrong number of vertices".into()));
            }
            for (v, (g, o)) in given.iter().zip(&ours).enumerate() {
                if !same_cyclic(g, o) {
                    return Err(DiagramError::Malformed(format!("rotation system disagrees with the faces at vertex {v}")));
                }
            }
        }
        Ok(d)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("diagram serialises")
    }

    pub fn from_json(s: &str) -> Result<Self, DiagramError> {
        let f: DiagramFile = serde_json::from_str(s).map_err(|e| DiagramError::Json(e.to_string()))?;
        Diagram::from_file(&f)
    }
}

fn same_cyclic(a: &[Dart], b: &[Dart]) -> bool {
    a.len() == b.len() && (a.is_empty() || (0..a.len()).any(|k| (0..a.len()).all(|i| a[(i + k) % a.len()] == b[i])))
}

/// On-disk form. `rotation` is derived and optional on input; when given it
/// must agree with the faces.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagramFile {
    pub alphabet: Vec<String>,
    pub vertices: usize,
    pub base: VertexId,
    pub edges: Vec<EdgeRecord>,
    pub faces: Vec<Vec<Dart>>,
    pub boundary: Vec<Dart>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotation: Option<Vec<Vec<Dart>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub tail: VertexId,
    pub head: VertexId,
    pub letter: Option<String>,
}

/// Incremental construction of fixtures and bouquets.
#[derive(Clone, Debug)]
pub struct DiagramBuilder {
    alphabet: Alphabet,
    vertex_count: usize,
    edges: Vec<DEdge>,
    faces: Vec<Vec<Dart>>,
    used: Vec<[bool; 2]>,
}

impl DiagramBuilder {
    pub fn new(alphabet: Alphabet) -> Self {
        DiagramBuilder { alphabet, vertex_count: 0, edges: Vec::new(), faces: Vec::new(), used: Vec::new() }
    }

    pub fn vertices(&mut self, n: usize) -> std::ops::Range<VertexId> {
        self.vertex_count += n;
        self.vertex_count - n..self.vertex_count
    }

    pub fn edge(&mut self, tail: VertexId, head: VertexId, letter: Option<Letter>) -> EdgeId {
        self.edges.push(DEdge { tail, head, letter });
        self.used.push([false; 2]);
        self.edges.len() - 1
    }

    /// A step from `a` to `b` reading `letter`. An edge whose matching dart
    /// is not yet on a face is reused; otherwise a new edge is made.
    pub fn step(&mut self, a: VertexId, b: VertexId, letter: Option<Letter>) -> Dart {
        self.step_before(a, b, letter, self.edges.len())
    }

    fn step_before(&mut self, a: VertexId, b: VertexId, letter: Option<Letter>, limit: usize) -> Dart {
        let pos = letter.map(|l| Letter::pos(l.index()));
        let fwd_ok = letter.is_none_or(|l| l.is_positive());
        let found = self.edges[..limit].iter().enumerate().find_map(|(i, e)| {
            if e.letter != pos {
                return None;
            }
            if fwd_ok && e.tail == a && e.head == b && !self.used[i][0] {
                Some(Dart::new(i, true))
            } else if letter.is_none_or(|l| !l.is_positive()) && e.tail == b && e.head == a && !self.used[i][1] {
                Some(Dart::new(i, false))
            } else {
                None
            }
        });
        found.unwrap_or_else(|| {
            if fwd_ok {
                Dart::new(self.edge(a, b, pos), true)
            } else {
                Dart::new(self.edge(b, a, pos), false)
            }
        })
    }

    fn fresh_step(&mut self, a: VertexId, b: VertexId, l: Letter) -> Dart {
        if l.is_positive() {
            Dart::new(self.edge(a, b, Some(l)), true)
        } else {
            Dart::new(self.edge(b, a, Some(l.inverse())), false)
        }
    }

    /// Face through `vertices` (closed up), reading one letter per step.
    /// Only edges that existed before the call are shared.
    pub fn face_through(&mut self, vertices: &[VertexId], letters: &[Option<Letter>]) -> usize {
        assert_eq!(vertices.len(), letters.len());
        let n = vertices.len();
        let limit = self.edges.len();
        let walk: Vec<Dart> =
            (0..n).map(|i| self.step_before(vertices[i], vertices[(i + 1) % n], letters[i], limit)).collect();
        self.face(walk)
    }

    pub fn face(&mut self, walk: Vec<Dart>) -> usize {
        for d in &walk {
            self.used[d.edge()][usize::from(!d.is_forward())] = true;
        }
        self.faces.push(walk);
        self.faces.len() - 1
    }

    /// Builds with the boundary inferred from the darts not on any face.
    /// Needs each vertex to have at most one such dart leaving it.
    pub fn build(self, base: VertexId) -> Result<Diagram, DiagramError> {
        let mut free_out: HashMap<VertexId, Dart> = HashMap::new();
        let mut free = Vec::new();
        for (i, u) in self.used.iter().enumerate() {
            for (k, &on_face) in u.iter().enumerate() {
                if !on_face {
                    let d = Dart::new(i, k == 0);
                    let tail = if k == 0 { self.edges[i].tail } else { self.edges[i].head };
                    if free_out.insert(tail, d).is_some() {
                        return Err(DiagramError::Malformed(format!(
                            "boundary is ambiguous at vertex {tail}; give it explicitly"
                        )));
                    }
                    free.push(d);
                }
            }
        }
        let head = |d: Dart| if d.is_forward() { self.edges[d.edge()].head } else { self.edges[d.edge()].tail };
        let mut outer = Vec::new();
        if let Some(&first) = free.first() {
            let mut cur = first;
            loop {
                outer.push(cur);
                cur = *free_out
                    .get(&head(cur))
                    .ok_or_else(|| DiagramError::Malformed("outer walk does not close".into()))?;
                if cur == first {
                    break;
                }
            }
        }
        if outer.len() != free.len() {
            return Err(DiagramError::Malformed("darts off the faces do not form one outer walk".into()));
        }
        let mut boundary: Vec<Dart> = outer.iter().rev().map(|d| d.rev()).collect();
        let tail = |d: Dart| head(d.rev());
        if !boundary.is_empty() {
            let k = boundary
                .iter()
                .position(|&d| tail(d) == base)
                .ok_or_else(|| DiagramError::Malformed(format!("base {base} is not on the boundary")))?;
            boundary.rotate_left(k);
        }
        self.build_with_boundary(boundary, base)
    }

    pub fn build_with_boundary(self, boundary: Vec<Dart>, base: VertexId) -> Result<Diagram, DiagramError> {
        Diagram::new(self.alphabet, self.vertex_count.max(1), self.edges, self.faces, boundary, base)
    }
}

/// Removes every vertex of degree 2 whose two edges differ, joining those
/// edges. Labels are dropped. A lone loop is kept.
pub fn forget_degree2(d: &Diagram) -> Diagram {
    let mut d = d.clone();
    let mut dead_v = vec![false; d.vertex_count];
    let mut dead_e = vec![false; d.edges.len()];
    loop {
        let mut out = vec![Vec::new(); d.vertex_count];
        for e in (0..d.edges.len()).filter(|&e| !dead_e[e]) {
            for fwd in [true, false] {
                let x = Dart::new(e, fwd);
                out[d.tail(x)].push(x);
            }
        }
        let Some(v) = (0..d.vertex_count)
            .find(|&v| !dead_v[v] && out[v].len() == 2 && out[v][0].edge() != out[v][1].edge())
        else {
            break;
        };
        let (d1, d2) = (out[v][0].rev(), out[v][1]);
        let (from, to) = (d.tail(d1), d.head(d2));
        if d.base == v {
            let k = d.boundary.iter().position(|&x| d.tail(x) != v).expect("boundary leaves a degree-2 base");
            d.boundary.rotate_left(k);
            d.base = d.tail(d.boundary[0]);
        }
        let e1 = d1.edge();
        let (fwd, bwd) = (Dart::new(e1, true), Dart::new(e1, false));
        let tails: Vec<VertexId> = (0..d.edges.len()).flat_map(|e| [d.edges[e].tail, d.edges[e].head]).collect();
        let tail_of = |x: Dart| tails[2 * x.edge() + usize::from(!x.is_forward())];
        let rewrite = |w: &Vec<Dart>| -> Vec<Dart> {
            let mut w = w.clone();
            if let Some(k) = w.iter().position(|&x| tail_of(x) != v) {
                w.rotate_left(k);
            }
            let mut res = Vec::with_capacity(w.len());
            let mut i = 0;
            while i < w.len() {
                if i + 1 < w.len() && w[i] == d1 && w[i + 1] == d2 {
                    res.push(fwd);
                    i += 2;
                } else if i + 1 < w.len() && w[i] == d2.rev() && w[i + 1] == d1.rev() {
                    res.push(bwd);
                    i += 2;
                } else {
                    res.push(w[i]);
                    i += 1;
                }
            }
            res
        };
        d.faces = d.faces.iter().map(rewrite).collect();
        d.boundary = rewrite(&d.boundary);
        d.edges[e1] = DEdge { tail: from, head: to, letter: None };
        dead_e[d2.edge()] = true;
        dead_v[v] = true;
    }
    for e in &mut d.edges {
        e.letter = None;
    }
    d.compact(&dead_v, &dead_e)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PqViolation {
    Vertex { vertex: VertexId, degree: usize },
    Face { face: usize, length: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PqReport {
    pub p: usize,
    pub q: usize,
    pub bracket: bool,
    pub holds: bool,
    pub violation: Option<PqViolation>,
}

/// (p,q): interior vertices have degree ≥ p, interior faces ≥ q edges.
/// [p,q] (`bracket`): the face bound applies to every face.
pub fn is_pq_diagram(d: &Diagram, p: usize, q: usize, bracket: bool) -> PqReport {
    let deg = d.degrees();
    let interior_v = d.interior_vertices();
    let interior_f = d.interior_faces();
    let violation = (0..d.vertex_count)
        .find(|&v| interior_v[v] && deg[v] < p)
        .map(|v| PqViolation::Vertex { vertex: v, degree: deg[v] })
        .or_else(|| {
            (0..d.faces.len())
                .find(|&f| (bracket || interior_f[f]) && d.faces[f].len() < q)
                .map(|f| PqViolation::Face { face: f, length: d.faces[f].len() })
        });
    PqReport { p, q, bracket, holds: violation.is_none(), violation }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CurvatureI {
    /// Σ over boundary faces of (4 − interior edges).
    pub sum: i64,
    pub satisfied: bool,
    /// (face, interior edge count) for every boundary face.
    pub terms: Vec<(usize, usize)>,
}

fn ratio_str<S: Serializer>(r: &Ratio<i64>, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(r)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CurvatureII {
    /// Σ over boundary vertices of (5/2 − degree).
    #[serde(serialize_with = "ratio_str")]
    pub sum: Ratio<i64>,
    pub satisfied: bool,
    pub boundary_vertices: usize,
}

/// First curvature formula on a (3,6)-diagram with at least two faces.
/// Counts edges, so forget degree-2 vertices first.
pub fn curvature_i(d: &Diagram) -> Result<CurvatureI, DiagramError> {
    if d.faces.len() < 2 {
        return Err(DiagramError::Precondition("needs at least two faces".into()));
    }
    let pq = is_pq_diagram(d, 3, 6, false);
    if !pq.holds {
        return Err(DiagramError::Precondition(format!("not a (3,6)-diagram: {:?}", pq.violation.unwrap())));
    }
    let cell = d.cell_of();
    let mut terms = Vec::new();
    for (f, w) in d.faces.iter().enumerate() {
        if w.iter().any(|x| cell[x.rev().0].0 == Cell::Outer) {
            let interior = w.iter().filter(|x| cell[x.rev().0].0 != Cell::Outer).count();
            terms.push((f, interior));
        }
    }
    let sum = terms.iter().map(|&(_, i)| 4 - i as i64).sum();
    Ok(CurvatureI { sum, satisfied: sum >= 6, terms })
}

/// Second curvature formula on a [3,6]-diagram.
pub fn curvature_ii(d: &Diagram) -> Result<CurvatureII, DiagramError> {
    let pq = is_pq_diagram(d, 3, 6, true);
    if !pq.holds {
        return Err(DiagramError::Precondition(format!("not a [3,6]-diagram: {:?}", pq.violation.unwrap())));
    }
    let deg = d.degrees();
    let mut verts: Vec<VertexId> = d.boundary.iter().map(|&x| d.tail(x)).collect();
    verts.push(d.base);
    verts.sort_unstable();
    verts.dedup();
    let sum = verts.iter().map(|&v| Ratio::new(5, 2) - Ratio::from_integer(deg[v] as i64)).sum::<Ratio<i64>>();
    Ok(CurvatureII { sum, satisfied: sum >= Ratio::from_integer(3), boundary_vertices: verts.len() })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum BoundCheck {
    NotEvaluated { reason: String },
    Evaluated { bound: u64, holds: bool },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AreaReport {
    pub area: usize,
    pub boundary_length: usize,
    /// |D| ≤ 8|∂D| for (3,7)-diagrams.
    pub linear: BoundCheck,
    /// |D| ≤ 3|∂D|² for (3,6)-diagrams.
    pub quadratic: BoundCheck,
}

/// Compares the area with both bounds. Hypotheses are checked after
/// forgetting degree-2 vertices; lengths are those of `d` itself.
pub fn area_bounds(d: &Diagram) -> AreaReport {
    let forgotten = forget_degree2(d);
    let (area, len) = (d.area(), d.boundary.len() as u64);
    let check = |q: usize, bound: u64| {
        let pq = is_pq_diagram(&forgotten, 3, q, false);
        if pq.holds {
            BoundCheck::Evaluated { bound, holds: area as u64 <= bound }
        } else {
            BoundCheck::NotEvaluated { reason: format!("not a (3,{q})-diagram: {:?}", pq.violation.unwrap()) }
        }
    };
    AreaReport { area, boundary_length: d.boundary.len(), linear: check(7, 8 * len), quadratic: check(6, 3 * len * len) }
}

/// Where a face's boundary goes in the graph: reading the face walk from
/// its first dart starting at `start`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FaceLift {
    pub face: usize,
    pub component: String,
    pub start: VertexId,
    pub steps: Vec<Step>,
    /// Every start the label closes up from, when there is more than one.
    pub alternatives: Vec<VertexId>,
}

/// Lifts every face. More than one start is an error unless `gr_mode` and
/// all starts lie in one automorphism orbit.
pub fn lift_faces(d: &Diagram, g: &LabelledGraph, gr_mode: bool) -> Result<Vec<FaceLift>, DiagramError> {
    let autos = if gr_mode { Some(compute_automorphisms(g)?) } else { None };
    lift_faces_with(d, g, autos.as_ref())
}

fn lift_faces_with(d: &Diagram, g: &LabelledGraph, autos: Option<&Automorphisms>) -> Result<Vec<FaceLift>, DiagramError> {
    if !g.is_reduced() {
        return Err(DiagramError::Precondition("graph labelling is not reduced".into()));
    }
    (0..d.faces.len()).map(|f| lift_face(d, g, autos, f)).collect()
}

fn lift_face(d: &Diagram, g: &LabelledGraph, autos: Option<&Automorphisms>, f: usize) -> Result<FaceLift, DiagramError> {
    let w = d.face_word(f).ok_or(DiagramError::Unlabelled)?;
    let starts: Vec<VertexId> =
        (0..g.vertex_count()).filter(|&v| g.read_end(v, w.letters()) == Some(v)).collect();
    let &start = starts.first().ok_or(DiagramError::NoLift(f))?;
    if starts.len() > 1 {
        let one_orbit = autos.is_some_and(|a| starts.iter().all(|&v| a.orbit_of(v) == a.orbit_of(start)));
        if !one_orbit {
            return Err(DiagramError::AmbiguousLift { face: f, starts });
        }
    }
    let steps = g.read_path_unchecked(start, &w).expect("closed reading").steps;
    Ok(FaceLift {
        face: f,
        component: g.component_name(g.component_of(start)),
        start,
        alternatives: if starts.len() > 1 { starts } else { Vec::new() },
        steps,
    })
}

fn dart_positions(d: &Diagram) -> Vec<Option<(usize, usize)>> {
    let mut pos = vec![None; 2 * d.edges.len()];
    for (f, w) in d.faces.iter().enumerate() {
        for (i, x) in w.iter().enumerate() {
            pos[x.0] = Some((f, i));
        }
    }
    pos
}

fn edge_originates(
    g: &LabelledGraph,
    lifts: &[FaceLift],
    pos: &[Option<(usize, usize)>],
    x: Dart,
    autos: Option<&Automorphisms>,
) -> Option<bool> {
    let (f1, i1) = pos[x.0]?;
    let (f2, i2) = pos[x.rev().0]?;
    let s1 = lifts[f1].steps[i1];
    let s2 = lifts[f2].steps[i2];
    Some(match autos {
        None => s1.edge == s2.edge && s1.dir != s2.dir,
        Some(a) => a.orbit_of(g.tail(s1)) == a.orbit_of(g.head(s2)),
    })
}

/// Whether an interior arc originates from the graph: the lifts of the
/// faces on either side send it to the same path (up to an automorphism
/// in `gr_mode`).
pub fn originates_from(
    d: &Diagram,
    g: &LabelledGraph,
    lifts: &[FaceLift],
    arc: &[Dart],
    gr_mode: bool,
) -> Result<bool, DiagramError> {
    let autos = if gr_mode { Some(compute_automorphisms(g)?) } else { None };
    let pos = dart_positions(d);
    let mut all = true;
    for &x in arc {
        all &= edge_originates(g, lifts, &pos, x, autos.as_ref())
            .ok_or_else(|| DiagramError::Precondition(format!("dart {x} is not on an interior edge")))?;
    }
    Ok(all)
}

#[derive(Clone, Debug, PartialEq)]
pub enum Removal {
    /// Originating edges removed and faces merged.
    Merged { diagram: Diagram, removed_edges: Vec<EdgeId> },
    /// A group of faces merges into a freely trivial boundary.
    TrivialSubdiagram { faces: Vec<usize>, subdiagram: Diagram, boundary_word: Word },
    /// A merged face has holes or encloses other faces.
    Enclosed { faces: Vec<usize>, enclosed: Vec<usize>, boundary_walks: usize },
}

fn condition_allows_merging(r: &ConditionReport) -> bool {
    r.holds
        && match r.condition {
            Condition::C(n) | Condition::Gr(n) => n >= 6,
            Condition::CPrime(l) | Condition::GrPrime(l) => l <= Ratio::new(1, 6),
        }
}

/// Deletes every interior edge that originates from `g` and merges the
/// faces on either side. `report` must show C(n)/Gr(n) with n ≥ 6 (or the
/// metric form with λ ≤ 1/6) for `g`; Gr conditions compare lifts up to
/// automorphism.
pub fn remove_originating_edges(d: &Diagram, g: &LabelledGraph, report: &ConditionReport) -> Result<Removal, DiagramError> {
    if !condition_allows_merging(report) {
        return Err(DiagramError::Precondition(format!("{} is not a verified C(6)-or-stronger report", report.condition)));
    }
    let autos = if report.condition.is_graphical() { Some(compute_automorphisms(g)?) } else { None };
    let lifts = lift_faces_with(d, g, autos.as_ref())?;
    let pos = dart_positions(d);
    let ne = d.edges.len();
    let removed: Vec<bool> =
        (0..ne).map(|e| edge_originates(g, &lifts, &pos, Dart::new(e, true), autos.as_ref()) == Some(true)).collect();
    let removed_edges: Vec<EdgeId> = (0..ne).filter(|&e| removed[e]).collect();
    if removed_edges.is_empty() {
        return Ok(Removal::Merged { diagram: d.clone(), removed_edges });
    }

    // faces joined across removed edges
    let nf = d.faces.len();
    let mut group: Vec<usize> = (0..nf).collect();
    fn find(g: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while g[r] != r {
            r = g[r];
        }
        g[x] = r;
        r
    }
    for &e in &removed_edges {
        let (a, _) = pos[2 * e].unwrap();
        let (b, _) = pos[2 * e + 1].unwrap();
        let (ra, rb) = (find(&mut group, a), find(&mut group, b));
        group[ra.max(rb)] = ra.min(rb);
    }
    let group: Vec<usize> = (0..nf).map(|f| find(&mut group, f)).collect();

    let next = d.successor()?;
    let skip = |x: Dart| {
        let mut y = next[x.0];
        while removed[y.edge()] {
            y = next[y.rev().0];
        }
        y
    };
    // new face walks over the surviving darts
    let mut seen = vec![false; 2 * ne];
    let mut walks: Vec<(usize, Vec<Dart>)> = Vec::new();
    for (f, w) in d.faces.iter().enumerate() {
        for &x in w {
            if removed[x.edge()] || seen[x.0] {
                continue;
            }
            let mut walk = vec![x];
            seen[x.0] = true;
            let mut y = skip(x);
            while y != x {
                seen[y.0] = true;
                walk.push(y);
                y = skip(y);
            }
            walks.push((group[f], walk));
        }
    }

    let members = |root: usize| -> Vec<usize> { (0..nf).filter(|&f| group[f] == root).collect() };
    let mut roots: Vec<usize> = group.clone();
    roots.sort_unstable();
    roots.dedup();

    // cells of the merged map: walks plus the outer face
    let mut cell_of_dart = vec![usize::MAX; 2 * ne];
    for (c, (_, w)) in walks.iter().enumerate() {
        for x in w {
            cell_of_dart[x.0] = c;
        }
    }
    let outer_cell = walks.len();
    for x in d.outer_walk() {
        cell_of_dart[x.0] = outer_cell;
    }
    for &root in &roots {
        let mine: Vec<usize> = (0..walks.len()).filter(|&c| walks[c].0 == root).collect();
        let mut reached = vec![false; walks.len() + 1];
        reached[outer_cell] = true;
        let mut q = VecDeque::from([outer_cell]);
        while let Some(c) = q.pop_front() {
            let darts: Vec<Dart> = if c == outer_cell { d.outer_walk() } else { walks[c].1.clone() };
            for x in darts {
                let o = cell_of_dart[x.rev().0];
                if o != usize::MAX && !reached[o] && !mine.contains(&o) {
                    reached[o] = true;
                    q.push_back(o);
                }
            }
        }
        let enclosed_cells: Vec<usize> = (0..walks.len()).filter(|&c| !reached[c] && !mine.contains(&c)).collect();
        if mine.len() != 1 || !enclosed_cells.is_empty() {
            let mut enclosed: Vec<usize> = enclosed_cells
                .iter()
                .flat_map(|&c| members(walks[c].0))
                .collect();
            enclosed.sort_unstable();
            enclosed.dedup();
            return Ok(Removal::Enclosed { faces: members(root), enclosed, boundary_walks: mine.len() });
        }
    }

    for &root in &roots {
        let (_, walk) = walks.iter().find(|(r, _)| *r == root).unwrap();
        let word = d.walk_word(walk).ok_or(DiagramError::Unlabelled)?;
        if word.free_reduce().is_empty() {
            let faces = members(root);
            let subdiagram = subdiagram(d, &faces, walk)?;
            return Ok(Removal::TrivialSubdiagram { faces, subdiagram, boundary_word: word });
        }
    }

    let mut merged = d.clone();
    merged.faces = walks.into_iter().map(|(_, w)| w).collect();
    let mut dead_v = vec![true; d.vertex_count];
    dead_v[d.base] = false;
    for e in (0..ne).filter(|&e| !removed[e]) {
        dead_v[d.edges[e].tail] = false;
        dead_v[d.edges[e].head] = false;
    }
    let diagram = merged.compact(&dead_v, &removed);
    diagram.validate()?;
    Ok(Removal::Merged { diagram, removed_edges })
}

/// The faces `faces` of `d` as a diagram of their own with boundary `walk`.
fn subdiagram(d: &Diagram, faces: &[usize], walk: &[Dart]) -> Result<Diagram, DiagramError> {
    let mut keep_e = vec![false; d.edges.len()];
    for &f in faces {
        for x in &d.faces[f] {
            keep_e[x.edge()] = true;
        }
    }
    let mut keep_v = vec![false; d.vertex_count];
    for e in (0..d.edges.len()).filter(|&e| keep_e[e]) {
        keep_v[d.edges[e].tail] = true;
        keep_v[d.edges[e].head] = true;
    }
    let mut sub = d.clone();
    sub.faces = faces.iter().map(|&f| d.faces[f].clone()).collect();
    sub.boundary = walk.to_vec();
    sub.base = d.tail(walk[0]);
    let dead_v: Vec<bool> = keep_v.iter().map(|k| !k).collect();
    let dead_e: Vec<bool> = keep_e.iter().map(|k| !k).collect();
    let sub = sub.compact(&dead_v, &dead_e);
    sub.validate()?;
    Ok(sub)
}

/// Replaces a face with freely trivial label by the tree it folds to,
/// always folding the first cancelling pair of the face walk.
pub fn fold_trivial_face(d: &Diagram, face: usize) -> Result<Diagram, DiagramError> {
    if face >= d.faces.len() {
        return Err(DiagramError::Precondition(format!("no face {face}")));
    }
    let word = d.face_word(face).ok_or(DiagramError::Unlabelled)?;
    if !word.free_reduce().is_empty() {
        return Err(DiagramError::Precondition("face label is not freely trivial".into()));
    }
    let mut tails: Vec<VertexId> = d.faces[face].iter().map(|&x| d.tail(x)).collect();
    tails.sort_unstable();
    if tails.windows(2).any(|w| w[0] == w[1]) {
        return Err(DiagramError::Precondition("face boundary does not embed".into()));
    }
    let mut d = d.clone();
    let mut dead_v = vec![false; d.vertex_count];
    let mut dead_e = vec![false; d.edges.len()];
    while !d.faces[face].is_empty() {
        let w = &d.faces[face];
        let n = w.len();
        let i = (0..n)
            .find(|&i| d.dart_letter(w[(i + 1) % n]) == d.dart_letter(w[i]).map(Letter::inverse))
            .expect("freely trivial words cancel somewhere");
        let j = (i + 1) % n;
        let (x, y) = (w[i], w[j]);
        let w = &mut d.faces[face];
        w.remove(i.max(j));
        w.remove(i.min(j));
        d.identify(x, y, &mut dead_v, &mut dead_e);
    }
    d.faces.remove(face);
    let out = d.compact(&dead_v, &dead_e);
    out.validate()?;
    Ok(out)
}

/// Pairs of distinct vertices on `face` whose lifts coincide.
pub fn pinch_candidates(d: &Diagram, g: &LabelledGraph, face: usize) -> Result<Vec<(VertexId, VertexId)>, DiagramError> {
    let lift = lift_face(d, g, None, face)?;
    let w = &d.faces[face];
    let mut out = Vec::new();
    for i in 0..w.len() {
        for j in i + 1..w.len() {
            let (v1, v2) = (d.tail(w[i]), d.tail(w[j]));
            if v1 != v2 && g.tail(lift.steps[i]) == g.tail(lift.steps[j]) {
                out.push((v1, v2));
            }
        }
    }
    Ok(out)
}

/// Identifies `v1` and `v2` on the boundary of `face`, splitting it in two.
pub fn pinch_vertices(
    d: &Diagram,
    g: &LabelledGraph,
    face: usize,
    v1: VertexId,
    v2: VertexId,
) -> Result<Diagram, DiagramError> {
    if face >= d.faces.len() {
        return Err(DiagramError::Precondition(format!("no face {face}")));
    }
    if v1 == v2 {
        return Err(DiagramError::Precondition("the two vertices coincide".into()));
    }
    let lift = lift_face(d, g, None, face)?;
    let w = d.faces[face].clone();
    let at = |v: VertexId| {
        let hits: Vec<usize> = (0..w.len()).filter(|&i| d.tail(w[i]) == v).collect();
        match hits.as_slice() {
            [i] => Ok(*i),
            [] => Err(DiagramError::Precondition(format!("vertex {v} is not on face {face}"))),
            _ => Err(DiagramError::Precondition(format!("face {face} passes vertex {v} more than once"))),
        }
    };
    let (i, j) = (at(v1)?, at(v2)?);
    if g.tail(lift.steps[i]) != g.tail(lift.steps[j]) {
        return Err(DiagramError::Precondition(format!("lifts of {v1} and {v2} differ")));
    }
    let (lo, hi) = (i.min(j), i.max(j));
    let first: Vec<Dart> = w[lo..hi].to_vec();
    let second: Vec<Dart> = w[hi..].iter().chain(&w[..lo]).copied().collect();
    let mut out = d.clone();
    out.faces[face] = first;
    out.faces.push(second);
    out.merge_vertex(v2, v1);
    let mut dead_v = vec![false; d.vertex_count];
    dead_v[v2] = true;
    let out = out.compact(&dead_v, &vec![false; d.edges.len()]);
    out.validate().map_err(|e| DiagramError::Precondition(format!("pinched diagram is invalid: {e}")))?;
    Ok(out)
}

/// Builds a diagram for `w` from a derivation that reduces it to the empty
/// word: a bouquet with one lollipop per step, then the boundary is folded
/// wherever adjacent letters cancel. The area equals the derivation length.
pub fn derivation_to_diagram(w: &Word, steps: &[DerivationStep], p: &Presentation) -> Result<Diagram, DiagramError> {
    let end = replay(w, steps, p)?;
    if !end.is_empty() {
        return Err(SolverError::ReplayFailed { step: steps.len(), reason: "derivation does not end at the empty word".into() }
            .into());
    }
    // u_k = a_k ρ_k⁻¹ a_k⁻¹ u_{k+1}, so w is the product of the conjugates
    let mut b = DiagramBuilder::new(p.alphabet.clone());
    let base = b.vertices(1).start;
    let mut boundary: Vec<Dart> = Vec::new();
    let mut u = w.free_reduce();
    for (k, s) in steps.iter().enumerate() {
        let rho = variant_word(p, s.relator, s.rotation, s.inverted).ok_or_else(|| SolverError::ReplayFailed {
            step: k,
            reason: "no such relator variant".into(),
        })?;
        let prefix = u.slice(0, s.position);
        let mut cur = base;
        let mut stem = Vec::new();
        for &l in &prefix {
            let nv = b.vertices(1).start;
            stem.push(b.fresh_step(cur, nv, l));
            cur = nv;
        }
        // fresh edges throughout so no dart is shared between lollipops
        let n = rho.len();
        let mut cyc = vec![cur];
        cyc.extend(b.vertices(n - 1));
        let walk: Vec<Dart> =
            rho.inverse().iter().enumerate().map(|(i, &l)| b.fresh_step(cyc[i], cyc[(i + 1) % n], l)).collect();
        let f = b.face(walk);
        boundary.extend(&stem);
        boundary.extend(b.faces[f].clone());
        boundary.extend(stem.iter().rev().map(|x| x.rev()));
        let l = u.letters();
        u = Word::from(l[..s.position].to_vec()).mul_reduced(&rho).mul_reduced(&Word::from(l[s.position..].to_vec()));
    }
    let mut d = b.build_with_boundary(boundary, base)?;
    d.validate()?;

    let mut dead_v = vec![false; d.vertex_count];
    let mut dead_e = vec![false; d.edges.len()];
    let mut i = 0;
    while i + 1 < d.boundary.len() {
        let (x, y) = (d.boundary[i], d.boundary[i + 1]);
        if d.dart_letter(y) != d.dart_letter(x).map(Letter::inverse) {
            i += 1;
            continue;
        }
        d.boundary.drain(i..i + 2);
        if y == x.rev() {
            dead_e[x.edge()] = true;
            dead_v[d.head(x)] = true;
        } else if d.tail(x) == d.head(y) {
            return Err(DiagramError::SphericalPocket(i));
        } else {
            d.identify(x, y, &mut dead_v, &mut dead_e);
        }
        i = i.saturating_sub(1);
    }
    let d = d.compact(&dead_v, &dead_e);
    d.validate()?;
    if d.boundary_word().as_ref() != Some(&w.free_reduce()) {
        return Err(DiagramError::Malformed("folded boundary does not read the input word".into()));
    }
    Ok(d)
}

#[cfg(test)]
mod tests;
