//! Presentations read off labelled graphs, conciseness checks, the
//! edge-removal reduction and the trivial / cyclic / free classification.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::alphabet::Alphabet;
use crate::conditions::{check, Condition};
use crate::cycles::{girth_and_diameter, simple_cycles, spanning_tree_generators, BudgetExceeded};
use crate::format::write_graph;
use crate::graph::{EdgeId, LabelledGraph, PathRef, Step, VertexId, Violation};
use crate::pieces::{greedy_disjoint, PieceError, PieceIndex};
use crate::word::Word;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PresentationError {
    #[error("labelling is not reduced")]
    NotReduced(Vec<Violation>),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("audit replay failed at entry {0}")]
    Replay(usize),
    #[error(transparent)]
    Budget(#[from] BudgetExceeded),
    #[error(transparent)]
    Piece(#[from] PieceError),
}

/// Where a relator came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    Cycle { component: usize, cycle: PathRef },
    Generator { component: usize, edge: EdgeId, path: PathRef },
    Given { index: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    pub alphabet: Alphabet,
    pub relators: Vec<Word>,
    pub provenance: Vec<Provenance>,
    /// Entries dropped because an earlier relator had the same canonical form:
    /// (kept index, dropped provenance).
    pub merged: Vec<(usize, Provenance)>,
}

impl Presentation {
    /// Cyclically reduces and canonicalises each word, dropping empty words
    /// and duplicates.
    pub fn new(alphabet: Alphabet, entries: impl IntoIterator<Item = (Word, Provenance)>) -> Self {
        let mut relators = Vec::new();
        let mut provenance = Vec::new();
        let mut merged = Vec::new();
        let mut index: BTreeMap<Word, usize> = BTreeMap::new();
        for (w, p) in entries {
            let core = w.free_reduce().cyclic_reduce().0;
            if core.is_empty() {
                continue;
            }
            let canon = core.canonical_cyclic();
            match index.get(&canon) {
                Some(&i) => merged.push((i, p)),
                None => {
                    index.insert(canon.clone(), relators.len());
                    relators.push(canon);
                    provenance.push(p);
                }
            }
        }
        Presentation { alphabet, relators, provenance, merged }
    }

    pub fn from_words(alphabet: Alphabet, words: &[Word]) -> Self {
        Self::new(alphabet, words.iter().cloned().enumerate().map(|(index, w)| (w, Provenance::Given { index })))
    }

    pub fn max_relator_len(&self) -> usize {
        self.relators.iter().map(Word::len).max().unwrap_or(0)
    }

    pub fn relator_strings(&self) -> Vec<String> {
        self.relators.iter().map(|r| self.alphabet.format_word(r)).collect()
    }
}

pub fn relators_simple_cycles(g: &LabelledGraph, budget: u64) -> Result<Presentation, BudgetExceeded> {
    let cycles = simple_cycles(g, budget)?;
    Ok(Presentation::new(
        g.alphabet().clone(),
        cycles.into_iter().map(|c| {
            let comp = g.component_of(c.start);
            (g.label(&c), Provenance::Cycle { component: comp, cycle: c })
        }),
    ))
}

/// Cyclic reductions of the spanning-tree generators of each component's
/// fundamental group, based at the component's least vertex.
pub fn relators_pi1(g: &LabelledGraph) -> Presentation {
    let entries = g.components().iter().enumerate().flat_map(|(ci, comp)| {
        spanning_tree_generators(g, comp.vertices[0]).into_iter().map(move |gen| {
            (gen.word, Provenance::Generator { component: ci, edge: gen.edge, path: gen.path })
        })
    });
    Presentation::new(g.alphabet().clone(), entries.collect::<Vec<_>>())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConcisenessReport {
    pub concise: bool,
    /// Index pairs of relators equal up to rotation and inversion.
    pub conjugate_pairs: Vec<(usize, usize)>,
    pub proper_powers: Vec<ProperPower>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProperPower {
    pub index: usize,
    pub root: String,
    pub exponent: usize,
}

/// Conciseness and proper-power check on raw relator words.
pub fn conciseness_and_powers(alphabet: &Alphabet, relators: &[Word]) -> ConcisenessReport {
    let cores: Vec<Word> = relators.iter().map(|r| r.free_reduce().cyclic_reduce().0).collect();
    let mut first: BTreeMap<Word, usize> = BTreeMap::new();
    let mut conjugate_pairs = Vec::new();
    let mut proper_powers = Vec::new();
    for (i, core) in cores.iter().enumerate() {
        match first.get(&core.canonical_cyclic()) {
            Some(&j) => conjugate_pairs.push((j, i)),
            None => {
                first.insert(core.canonical_cyclic(), i);
            }
        }
        if let Some((root, exponent)) = core.proper_power() {
            proper_powers.push(ProperPower { index: i, root: alphabet.format_word(&root), exponent });
        }
    }
    ConcisenessReport { concise: conjugate_pairs.is_empty(), conjugate_pairs, proper_powers }
}

/// Report for a presentation; duplicates merged at construction count as conjugate pairs.
pub fn presentation_conciseness(p: &Presentation) -> ConcisenessReport {
    let mut r = conciseness_and_powers(&p.alphabet, &p.relators);
    for (kept, _) in &p.merged {
        r.conjugate_pairs.push((*kept, usize::MAX));
    }
    r.concise = r.conjugate_pairs.is_empty();
    r
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RemovedEdge {
    /// Edge id in the input graph.
    pub edge: EdgeId,
    pub letter: String,
    /// A simple cycle through the edge at the time of removal, as input-graph steps.
    pub cycle: PathRef,
    /// Number of start vertices reading the letter (1: not a piece).
    pub occurrences: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TietzeResult {
    pub graph: LabelledGraph,
    pub alphabet: Alphabet,
    pub audit: Vec<RemovedEdge>,
}

fn require_reduced(g: &LabelledGraph) -> Result<(), PresentationError> {
    let (ok, v) = g.reduced_labelling();
    if ok {
        Ok(())
    } else {
        Err(PresentationError::NotReduced(v.to_vec()))
    }
}

fn map_path(p: &PathRef, orig: &[EdgeId]) -> PathRef {
    PathRef { start: p.start, steps: p.steps.iter().map(|s| Step { edge: orig[s.edge], dir: s.dir }).collect() }
}

fn cycle_through(g: &LabelledGraph, e: EdgeId) -> PathRef {
    let edge = g.edge(e);
    let mut steps = vec![Step::forward(e)];
    if edge.source != edge.target {
        let back = g.path_avoiding(edge.target, edge.source, Some(e)).expect("edge lies on a cycle");
        steps.extend(back.steps);
    }
    PathRef { start: edge.source, steps }
}

/// Repeatedly removes the least-id edge that lies on a simple cycle and is
/// not a piece, together with its letter, until none is left.
pub fn tietze_reduce(g: &LabelledGraph) -> Result<TietzeResult, PresentationError> {
    require_reduced(g)?;
    let mut cur = g.clone();
    let mut orig: Vec<EdgeId> = (0..g.edge_count()).collect();
    let mut audit = Vec::new();
    loop {
        let idx = PieceIndex::new(&cur)?;
        let on_cycle = cur.cycle_edges();
        let Some(e) = (0..cur.edge_count()).find(|&e| on_cycle[e] && !idx.edge_is_piece(e, false)) else {
            break;
        };
        let letter = cur.edge(e).letter;
        let occurrences = cur.edges().iter().filter(|x| x.letter == letter).count();
        audit.push(RemovedEdge {
            edge: orig[e],
            letter: cur.alphabet().name(letter).to_string(),
            cycle: map_path(&cycle_through(&cur, e), &orig),
            occurrences,
        });
        let mut drop = vec![false; cur.edge_count()];
        drop[e] = true;
        cur = cur.without_edges(&drop);
        orig.remove(e);
    }
    let (graph, alphabet) = restrict_alphabet(g, &cur, &audit);
    Ok(TietzeResult { graph, alphabet, audit })
}

fn restrict_alphabet(g: &LabelledGraph, cur: &LabelledGraph, audit: &[RemovedEdge]) -> (LabelledGraph, Alphabet) {
    let keep: Vec<bool> = g.alphabet().names().iter().map(|n| !audit.iter().any(|r| &r.letter == n)).collect();
    let (alphabet, map) = g.alphabet().restrict(&keep);
    let graph = cur.relabel(alphabet.clone(), &map).expect("removed letters label no remaining edge");
    (graph, alphabet)
}

/// Re-applies an audit to the input graph, checking each step is legal.
pub fn replay_audit(g: &LabelledGraph, audit: &[RemovedEdge]) -> Result<TietzeResult, PresentationError> {
    require_reduced(g)?;
    let mut cur = g.clone();
    let mut orig: Vec<EdgeId> = (0..g.edge_count()).collect();
    for (i, r) in audit.iter().enumerate() {
        let e = orig.iter().position(|&o| o == r.edge).ok_or(PresentationError::Replay(i))?;
        let idx = PieceIndex::new(&cur)?;
        if !cur.cycle_edges()[e] || idx.edge_is_piece(e, false) {
            return Err(PresentationError::Replay(i));
        }
        let mut drop = vec![false; cur.edge_count()];
        drop[e] = true;
        cur = cur.without_edges(&drop);
        orig.remove(e);
    }
    let (graph, alphabet) = restrict_alphabet(g, &cur, audit);
    Ok(TietzeResult { graph, alphabet, audit: audit.to_vec() })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PiecePair {
    pub x: VertexId,
    pub y: VertexId,
    pub distance: usize,
    /// Path from x to y along the cycle, split into `distance` pieces (offsets into `path`).
    pub path: PathRef,
    pub label: String,
    pub cuts: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FreeWitness {
    pub alpha: String,
    pub beta: String,
    #[serde(skip)]
    pub alpha_word: Word,
    #[serde(skip)]
    pub beta_word: Word,
    pub cycles: Vec<PathRef>,
    pub pairs: Vec<PiecePair>,
}

/// Splits `path` greedily into pieces; returns cut offsets (including 0).
fn piece_cuts(idx: &PieceIndex<'_>, path: &PathRef) -> Vec<usize> {
    let g = idx.graph();
    let mut cuts = Vec::new();
    let mut pos = 0;
    while pos < path.len() {
        cuts.push(pos);
        let rest = PathRef { start: g.path_end(&PathRef { start: path.start, steps: path.steps[..pos].to_vec() }), steps: path.steps[pos..].to_vec() };
        pos += idx.max_piece_prefix(&rest, false).max(1);
    }
    cuts
}

/// Four pairwise vertex-disjoint simple cycles each carrying a vertex pair
/// at piece distance 4; α and β are the concatenated labels of two arcs each.
pub fn free_subgroup_witness(g: &LabelledGraph, budget: u64) -> Result<Option<FreeWitness>, PresentationError> {
    require_reduced(g)?;
    let idx = PieceIndex::new(g)?;
    if let Some(e) = idx.first_non_piece_edge(false) {
        return Err(PresentationError::Piece(PieceError::Undefined(e)));
    }
    let cycles = simple_cycles(g, budget)?;
    if cycles.is_empty() {
        return Err(PresentationError::Precondition("graph has no cycles".into()));
    }
    let mut found: Vec<(PathRef, PiecePair)> = Vec::new();
    for c in greedy_disjoint(g, cycles) {
        let verts = g.path_vertices(&c);
        let len = c.len();
        'cycle: for i in 0..len {
            let x = verts[i];
            let dist = idx.piece_distances_from(x, false)?;
            for k in 1..len {
                let y = verts[(i + k) % len];
                if dist[y] == Some(4) {
                    let rotated = g.rotate_cycle(&c, i);
                    let path = PathRef { start: x, steps: rotated.steps[..k].to_vec() };
                    let cuts = piece_cuts(&idx, &path);
                    let label = g.alphabet().format_word(&g.label(&path));
                    found.push((c.clone(), PiecePair { x, y, distance: 4, path, label, cuts }));
                    break 'cycle;
                }
            }
        }
        if found.len() == 4 {
            break;
        }
    }
    if found.len() < 4 {
        return Ok(None);
    }
    let w: Vec<Word> = found.iter().map(|(_, p)| g.label(&p.path)).collect();
    let alpha_word = w[0].concat(&w[1]);
    let beta_word = w[2].concat(&w[3]);
    Ok(Some(FreeWitness {
        alpha: g.alphabet().format_word(&alpha_word),
        beta: g.alphabet().format_word(&beta_word),
        alpha_word,
        beta_word,
        cycles: found.iter().map(|f| f.0.clone()).collect(),
        pairs: found.into_iter().map(|f| f.1).collect(),
    }))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Trivial { loops: Vec<EdgeId> },
    InfiniteCyclic,
    FreeOfRank { rank: usize },
    ContainsFreeSubgroup { witness: Option<FreeWitness>, theorem_only: bool, c7_holds: bool },
    Inconclusive { reason: String },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Classification {
    #[serde(flatten)]
    pub verdict: Verdict,
    pub reduced_alphabet: Vec<String>,
    /// Γ' in the graph text format.
    pub reduced_graph: String,
    pub reduced_girth: Vec<usize>,
    pub audit: Vec<RemovedEdge>,
}

/// Trivial / cyclic / free / contains-free classification.
pub fn classify(g: &LabelledGraph, budget: u64, want_witness: bool) -> Result<Classification, PresentationError> {
    require_reduced(g)?;
    let loops: Vec<Option<EdgeId>> = (0..g.alphabet().len() as u32)
        .map(|l| g.edges().iter().position(|e| e.letter == l && e.source == e.target))
        .collect();
    let t = tietze_reduce(g)?;
    let reduced_girth = (0..t.graph.components().len()).map(|c| girth_and_diameter(&t.graph, c).0).collect();
    let mut out = Classification {
        verdict: Verdict::InfiniteCyclic,
        reduced_alphabet: t.alphabet.names().to_vec(),
        reduced_graph: write_graph(&t.graph),
        reduced_girth,
        audit: t.audit.clone(),
    };
    if loops.iter().all(Option::is_some) {
        out.verdict = Verdict::Trivial { loops: loops.into_iter().flatten().collect() };
        return Ok(out);
    }
    let rank = t.alphabet.len();
    if t.graph.is_forest() {
        out.verdict = if rank == 1 { Verdict::InfiniteCyclic } else { Verdict::FreeOfRank { rank } };
        return Ok(out);
    }
    let c7 = check(g, Condition::C(7), budget)?.holds;
    if !c7 {
        let gr7 = check(g, Condition::Gr(7), budget)?.holds;
        let reason = if gr7 {
            "gr-only: Gr(7) holds but C(7) fails; the free-subgroup theorem needs infinitely many non-isomorphic components"
        } else {
            "C(7) fails and the reduced graph is not a forest"
        };
        out.verdict = Verdict::Inconclusive { reason: reason.into() };
        return Ok(out);
    }
    if rank == 1 {
        out.verdict = Verdict::InfiniteCyclic;
        return Ok(out);
    }
    let witness = if want_witness {
        match free_subgroup_witness(&t.graph, budget) {
            Ok(w) => w,
            Err(PresentationError::Budget(_)) | Err(PresentationError::Piece(_)) => None,
            Err(e) => return Err(e),
        }
    } else {
        None
    };
    let theorem_only = witness.is_none();
    out.verdict = Verdict::ContainsFreeSubgroup { witness, theorem_only, c7_holds: true };
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn figure1_pi1_relators() {
        let g = corpus::figure1();
        let p = relators_pi1(&g);
        let s = g.alphabet();
        let want: Vec<Word> = ["a a -c -b -b -a -b", "a a -b -c -c -a -c"]
            .iter()
            .map(|w| s.parse_word(w).unwrap().canonical_cyclic())
            .collect();
        let mut got = p.relators.clone();
        got.sort();
        let mut want_sorted = want.clone();
        want_sorted.sort();
        assert_eq!(got, want_sorted);
        assert_eq!(relators_simple_cycles(&g, 100).unwrap().relators.len(), 3);
    }

    #[test]
    fn conciseness() {
        let s = Alphabet::new(["a", "b", "c"]).unwrap();
        let r = conciseness_and_powers(&s, &[s.parse_word("a b a b").unwrap()]);
        assert_eq!(r.proper_powers[0].root, "a b");
        assert_eq!(r.proper_powers[0].exponent, 2);
        let r = conciseness_and_powers(&s, &[s.parse_word("a b c").unwrap(), s.parse_word("b c a").unwrap()]);
        assert!(!r.concise);
        assert!(presentation_conciseness(&relators_pi1(&corpus::figure1())).concise);
    }

    #[test]
    fn tietze_examples() {
        let g = corpus::distinct_letter_cycle(7).unwrap();
        let t = tietze_reduce(&g).unwrap();
        assert_eq!(t.audit.len(), 1);
        assert_eq!(t.audit[0].edge, 0);
        assert!(t.graph.is_forest());
        assert_eq!(t.alphabet.len(), 6);
        assert_eq!(replay_audit(&g, &t.audit).unwrap(), t);
        let f = corpus::figure1();
        assert!(tietze_reduce(&f).unwrap().audit.is_empty());
    }

    #[test]
    fn classification_examples() {
        let v = |g: &LabelledGraph| classify(g, 10_000, true).unwrap().verdict;
        assert!(matches!(v(&corpus::bouquet(&["a", "b"]).unwrap()), Verdict::Trivial { .. }));
        assert_eq!(v(&corpus::distinct_letter_cycle(7).unwrap()), Verdict::FreeOfRank { rank: 6 });
        assert_eq!(v(&corpus::two_cycle()), Verdict::InfiniteCyclic);
        assert!(matches!(
            v(&corpus::figure1()),
            Verdict::ContainsFreeSubgroup { witness: None, theorem_only: true, c7_holds: true }
        ));
        assert!(matches!(v(&corpus::four_cycles()), Verdict::ContainsFreeSubgroup { witness: Some(_), .. }));
        assert!(matches!(v(&corpus::cayley_cycle(7, "a").unwrap()), Verdict::Inconclusive { .. }));
    }
}
