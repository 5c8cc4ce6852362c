//! Deterministic fixture graphs.

use thiserror::Error;

use crate::alphabet::Alphabet;
use crate::graph::{Edge, GraphError, LabelledGraph, VertexId};
use crate::word::{Letter, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CorpusError {
    #[error("relator {0} is not cyclically reduced")]
    NotCyclicallyReduced(usize),
    #[error("invalid parameter: {0}")]
    Param(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Appends a path reading `w` from `from` to `to` (fresh inner vertices), orienting
/// each edge by the sign of its letter. Returns the new vertex count.
fn add_path(edges: &mut Vec<Edge>, mut n: usize, from: VertexId, to: VertexId, w: &[Letter]) -> usize {
    let mut cur = from;
    for (i, &l) in w.iter().enumerate() {
        let next = if i + 1 == w.len() {
            to
        } else {
            n += 1;
            n - 1
        };
        let (source, target) = if l.is_positive() { (cur, next) } else { (next, cur) };
        edges.push(Edge { source, target, letter: l.index() });
        cur = next;
    }
    n
}

/// The two-cell graph over {a, b, c}. Vertex 0 is the common corner of the
/// two cells; each cell reads a 7-letter relator from it.
pub fn figure1() -> LabelledGraph {
    let alphabet = Alphabet::new(["a", "b", "c"]).unwrap();
    // 0 Y1, 1..=4 X1..X4, 5 Y2, 6 Y3, 7..=10 Z1..Z4
    let (a, b, c) = (0, 1, 2);
    let es = [
        (1, 2, a),
        (2, 3, b),
        (3, 4, b),
        (0, 1, b),
        (4, 6, c),
        (0, 5, a),
        (5, 6, a),
        (0, 7, c),
        (10, 6, b),
        (7, 8, a),
        (8, 9, c),
        (9, 10, c),
    ];
    let edges = es.iter().map(|&(source, target, letter)| Edge { source, target, letter }).collect();
    LabelledGraph::with_names(alphabet, 11, edges, &[(0, "K1".into())]).unwrap()
}

/// One cycle component per relator class (cyclic conjugates and inverses identified).
pub fn classical(alphabet: &Alphabet, relators: &[Word]) -> Result<LabelledGraph, CorpusError> {
    let mut seen = std::collections::BTreeSet::new();
    let mut edges = Vec::new();
    let mut n = 0;
    let mut names = Vec::new();
    for (i, r) in relators.iter().enumerate() {
        if r.is_empty() || !r.is_cyclically_reduced() {
            return Err(CorpusError::NotCyclicallyReduced(i));
        }
        if !seen.insert(r.canonical_cyclic()) {
            continue;
        }
        let base = n;
        names.push((base, format!("R{}", names.len() + 1)));
        n += 1;
        n = add_path(&mut edges, n, base, base, r.letters());
    }
    Ok(LabelledGraph::with_names(alphabet.clone(), n, edges, &names)?)
}

/// Directed `k`-cycle with every edge labelled `letter`.
pub fn cayley_cycle(k: usize, letter: &str) -> Result<LabelledGraph, CorpusError> {
    if k == 0 {
        return Err(CorpusError::Param("cycle length must be at least 1".into()));
    }
    let alphabet =
        Alphabet::new([letter]).map_err(|e| CorpusError::Param(e.to_string()))?;
    let edges = (0..k).map(|i| Edge { source: i, target: (i + 1) % k, letter: 0 }).collect();
    Ok(LabelledGraph::new(alphabet, k, edges)?)
}

/// One length-1 loop per letter at a single vertex.
pub fn bouquet(letters: &[&str]) -> Result<LabelledGraph, CorpusError> {
    let alphabet = Alphabet::new(letters.iter().copied()).map_err(|e| CorpusError::Param(e.to_string()))?;
    let edges = (0..letters.len() as u32).map(|l| Edge { source: 0, target: 0, letter: l }).collect();
    Ok(LabelledGraph::new(alphabet, 1, edges)?)
}

/// A single directed cycle reading `k` distinct letters `x1 .. xk`.
pub fn distinct_letter_cycle(k: usize) -> Result<LabelledGraph, CorpusError> {
    if k == 0 {
        return Err(CorpusError::Param("cycle length must be at least 1".into()));
    }
    let alphabet = Alphabet::new((1..=k).map(|i| format!("x{i}"))).unwrap();
    let edges = (0..k).map(|i| Edge { source: i, target: (i + 1) % k, letter: i as u32 }).collect();
    Ok(LabelledGraph::new(alphabet, k, edges)?)
}

/// Two vertices joined by `a` one way and `b` the other: a 2-cycle whose
/// edges are not pieces.
pub fn two_cycle() -> LabelledGraph {
    let alphabet = Alphabet::new(["a", "b"]).unwrap();
    let edges = vec![Edge { source: 0, target: 1, letter: 0 }, Edge { source: 1, target: 0, letter: 1 }];
    LabelledGraph::new(alphabet, 2, edges).unwrap()
}

/// Four disjoint directed 8-cycles over 16 letters, each letter on exactly
/// two edges and no two-letter word readable twice. All pieces have length 1,
/// so piece distance is graph distance and antipodal vertices sit at distance 4.
pub fn four_cycles() -> LabelledGraph {
    let alphabet = Alphabet::new((0..16).map(|i| format!("y{i}"))).unwrap();
    let rows: [[u32; 8]; 4] = [
        [0, 1, 2, 3, 4, 5, 6, 7],
        [8, 9, 10, 11, 12, 13, 14, 15],
        [0, 2, 4, 6, 8, 10, 12, 14],
        [1, 3, 5, 7, 9, 11, 13, 15],
    ];
    let mut edges = Vec::new();
    let mut names = Vec::new();
    for (c, row) in rows.iter().enumerate() {
        let base = 8 * c;
        names.push((base, format!("K{}", c + 1)));
        for (i, &l) in row.iter().enumerate() {
            edges.push(Edge { source: base + i, target: base + (i + 1) % 8, letter: l });
        }
    }
    LabelledGraph::with_names(alphabet, 32, edges, &names).unwrap()
}

/// Binary reflected Gray code of `k ≥ 1`, most significant bit first.
fn gray_bits(k: u64) -> Vec<bool> {
    let g = k ^ (k >> 1);
    let bits = 64 - g.leading_zeros();
    (0..bits).rev().map(|i| g >> i & 1 == 1).collect()
}

/// Parameters of the distortion family.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Figure5Params {
    /// Number of `a`-separated seed words per side; the union is C(p).
    pub p: usize,
}

/// One member Γ_n of the distortion family, with its marked vertices.
#[derive(Clone, Debug)]
pub struct Figure5Member {
    pub n: usize,
    pub graph: LabelledGraph,
    pub eta: VertexId,
    pub nu: VertexId,
    pub p_word: Word,
    pub x_word: Word,
    pub y_word: Word,
}

/// Default length schedule f(n) = (n+1)².
pub fn figure5_default_f(n: usize) -> usize {
    (n + 1) * (n + 1)
}

pub fn figure5_alphabet() -> Alphabet {
    Alphabet::new(["a", "b", "s", "t", "c", "d"]).unwrap()
}

/// Seed word number `k` over the pair of letters `(zero, one)`.
pub fn figure5_seed(k: usize, zero: u32, one: u32) -> Word {
    gray_bits(k as u64).into_iter().map(|b| Letter::pos(if b { one } else { zero })).collect()
}

/// Γ_n: paths `p_n` and `x_n` from a corner vertex to η, then `p_n` and
/// `y_n` from η to ν. Block `n` uses seed words `(n−1)p+1 ..= np`.
pub fn figure5_member(params: Figure5Params, n: usize, f: impl Fn(usize) -> usize) -> Result<Figure5Member, CorpusError> {
    let Figure5Params { p } = params;
    if p < 2 || n == 0 {
        return Err(CorpusError::Param("need p ≥ 2 and n ≥ 1".into()));
    }
    let fnv = f(n);
    if fnv == 0 {
        return Err(CorpusError::Param("f(n) must be positive".into()));
    }
    let log2n = (usize::BITS - n.leading_zeros()) as usize;
    if fnv < log2n * log2n {
        return Err(CorpusError::Param(format!("f({n}) = {fnv} is below (log₂ n)²")));
    }
    let alphabet = figure5_alphabet();
    let (a, b, s, t, c, d) = (0, 1, 2, 3, 4, 5);
    let p_word: Word = std::iter::repeat_n(Letter::pos(b), fnv).collect();
    let mut x_word = Word::empty();
    let mut y_word = Word::empty();
    for k in (n - 1) * p + 1..=n * p {
        x_word = x_word.concat(&figure5_seed(k, s, t));
        x_word.push(Letter::pos(a));
        y_word = y_word.concat(&figure5_seed(k, c, d));
        if k < n * p {
            y_word.push(Letter::pos(a));
        }
    }
    for _ in 0..fnv {
        y_word.push(Letter::pos(a));
    }
    let (corner, eta, nu) = (0, 1, 2);
    let mut edges = Vec::new();
    let mut count = 3;
    count = add_path(&mut edges, count, corner, eta, p_word.letters());
    count = add_path(&mut edges, count, corner, eta, x_word.letters());
    count = add_path(&mut edges, count, eta, nu, p_word.letters());
    count = add_path(&mut edges, count, eta, nu, y_word.letters());
    let graph = LabelledGraph::with_names(alphabet, count, edges, &[(0, format!("G{n}"))])?;
    Ok(Figure5Member { n, graph, eta, nu, p_word, x_word, y_word })
}

pub fn figure5(params: Figure5Params, n_max: usize, f: impl Fn(usize) -> usize) -> Result<Vec<Figure5Member>, CorpusError> {
    (1..=n_max).map(|n| figure5_member(params, n, &f)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn figure1_shape() {
        let g = figure1();
        assert_eq!((g.vertex_count(), g.edge_count()), (11, 12));
        assert!(g.is_reduced());
        let counts = (0..3).map(|l| g.edges().iter().filter(|e| e.letter == l).count()).collect::<Vec<_>>();
        assert_eq!(counts, vec![4, 4, 4]);
    }

    #[test]
    fn gray_words_are_distinct() {
        let ws: std::collections::BTreeSet<Word> = (1..200).map(|k| figure5_seed(k, 0, 1)).collect();
        assert_eq!(ws.len(), 199);
        assert_eq!(figure5_seed(1, 0, 1).len(), 1);
        assert_eq!(figure5_seed(4, 0, 1).len(), 3);
    }

    #[test]
    fn figure5_lengths() {
        let m = figure5_member(Figure5Params { p: 6 }, 1, figure5_default_f).unwrap();
        assert_eq!(m.p_word.len(), 4);
        assert_eq!(m.x_word.len(), 20);
        assert!(m.graph.is_reduced());
    }

    #[test]
    fn four_cycles_letters_twice() {
        let g = four_cycles();
        for l in 0..16 {
            assert_eq!(g.edges().iter().filter(|e| e.letter == l).count(), 2);
        }
        assert_eq!(g.components().len(), 4);
    }
}
