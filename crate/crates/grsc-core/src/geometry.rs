//! Cayley balls, embeddings of defining graphs, and the lacunarity tests.
//!
//! Group elements are compared through the solver: two words name the same
//! element iff `u·v⁻¹` is Trivial. Words with different abelian or
//! finite-quotient images are distinct without a search. An Unknown verdict
//! is treated as "distinct" and marks the result approximate.

use std::collections::{HashMap, VecDeque};

use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::conditions::{check, Condition};
use crate::cycles::{girth_and_diameter, BudgetExceeded};
use crate::graph::{LabelledGraph, VertexId};
use crate::presentation::{relators_simple_cycles, Presentation};
use crate::solver::{replay, Solver, SolverConfig, SolverError, VerifiedCondition, WordVerdict};
use crate::word::{Letter, Word};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error(transparent)]
    Budget(#[from] BudgetExceeded),
    #[error("ball radius {radius} is below the required {needed} (diameter + longest relator)")]
    BallTooSmall { radius: usize, needed: usize },
    #[error("sequence ran out after {selected} pick(s); next threshold {threshold}")]
    InsufficientData { selected: usize, threshold: String, partial: Box<LacunaryReport> },
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("{0}")]
    Param(String),
}

fn ratio_str<T: std::fmt::Display + Clone + num_integer::Integer, S: Serializer>(
    r: &Ratio<T>,
    s: S,
) -> Result<S::Ok, S::Error> {
    s.collect_str(r)
}

/// Verdict of "are these the same element", folding Unknown into "no".
fn same_element(solver: &Solver<'_>, u: &Word, v: &Word, node_budget: u64) -> Result<(bool, bool), SolverError> {
    let w = u.mul_reduced(&v.inverse());
    Ok(match solver.solve_with_budget(&w, node_budget)? {
        WordVerdict::Trivial { .. } => (true, false),
        WordVerdict::Nontrivial { .. } => (false, false),
        WordVerdict::Unknown { .. } => (false, true),
    })
}

fn letter_slots(rank: usize) -> impl Iterator<Item = Letter> {
    (0..rank as u32).flat_map(|i| [Letter::pos(i), Letter::neg(i)])
}

fn slot(l: Letter) -> usize {
    2 * l.index() as usize + usize::from(!l.is_positive())
}

#[derive(Clone, Debug, Serialize)]
pub struct CayleyBall {
    pub radius: usize,
    /// First word reaching each element in breadth-first order.
    #[serde(skip)]
    pub elements: Vec<Word>,
    pub sphere_sizes: Vec<usize>,
    /// `neighbours[e][2i]` is `e·sᵢ`, `[2i+1]` is `e·sᵢ⁻¹`, when inside the ball.
    #[serde(skip)]
    pub neighbours: Vec<Vec<Option<usize>>>,
    /// Some pair was left unresolved by the solver.
    pub approximate: bool,
    pub solver_calls: u64,
}

impl CayleyBall {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Index of the ball element equal to `w`, searching shortest first.
    /// The flag reports whether some comparison came back Unknown.
    pub fn locate(&self, solver: &Solver<'_>, w: &Word, node_budget: u64) -> Result<(Option<usize>, bool), SolverError> {
        let sig = solver.signature(w);
        let mut tainted = false;
        for (i, e) in self.elements.iter().enumerate() {
            if solver.signature(e) != sig {
                continue;
            }
            let (same, unknown) = same_element(solver, w, e, node_budget)?;
            tainted |= unknown;
            if same {
                return Ok((Some(i), tainted));
            }
        }
        Ok((None, tainted))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BallConfig {
    pub max_elements: usize,
    pub node_budget: u64,
}

impl Default for BallConfig {
    fn default() -> Self {
        BallConfig { max_elements: 200_000, node_budget: 200_000 }
    }
}

/// Ball of radius `r` about the identity, grown one sphere at a time.
pub fn cayley_ball(solver: &Solver<'_>, r: usize, cfg: BallConfig) -> Result<CayleyBall, GeometryError> {
    let rank = solver.presentation().alphabet.len();
    let mut elements = vec![Word::empty()];
    let mut length = vec![0usize];
    let mut neighbours: Vec<Vec<Option<usize>>> = vec![vec![None; 2 * rank]];
    let mut buckets: HashMap<crate::solver::Signature, Vec<usize>> = HashMap::new();
    buckets.entry(solver.signature(&Word::empty())).or_default().push(0);
    let mut sphere_sizes = vec![1];
    let (mut approximate, mut calls) = (false, 0u64);
    let mut layer = vec![0usize];
    for k in 0..r {
        let cands: Vec<(usize, Letter)> =
            layer.iter().flat_map(|&e| letter_slots(rank).map(move |l| (e, l))).collect();
        let prepared: Vec<(usize, Letter, Word, crate::solver::Signature)> = cands
            .into_par_iter()
            .map(|(e, l)| {
                let w = elements[e].mul_reduced(&Word::from(vec![l]));
                let sig = solver.signature(&w);
                (e, l, w, sig)
            })
            .collect();
        let mut next = Vec::new();
        for (e, l, w, sig) in prepared {
            if neighbours[e][slot(l)].is_some() {
                continue;
            }
            let mut found = None;
            if let Some(bucket) = buckets.get(&sig) {
                for &c in bucket {
                    if length[c] + 1 < k {
                        continue;
                    }
                    calls += 1;
                    let (same, unknown) = same_element(solver, &w, &elements[c], cfg.node_budget)?;
                    approximate |= unknown;
                    if same {
                        found = Some(c);
                        break;
                    }
                }
            }
            let idx = match found {
                Some(c) => c,
                None => {
                    if elements.len() >= cfg.max_elements {
                        return Err(BudgetExceeded { what: "ball elements", budget: cfg.max_elements as u64 }.into());
                    }
                    elements.push(w);
                    length.push(k + 1);
                    neighbours.push(vec![None; 2 * rank]);
                    buckets.entry(sig).or_default().push(elements.len() - 1);
                    next.push(elements.len() - 1);
                    elements.len() - 1
                }
            };
            neighbours[e][slot(l)] = Some(idx);
            neighbours[idx][slot(l.inverse())] = Some(e);
        }
        sphere_sizes.push(next.len());
        layer = next;
    }
    Ok(CayleyBall { radius: r, elements, sphere_sizes, neighbours, approximate, solver_calls: calls })
}

/// Labels of a breadth-first spanning tree of `comp`, rooted at `base`.
fn tree_words(g: &LabelledGraph, comp: usize, base: VertexId) -> Result<HashMap<VertexId, Word>, GeometryError> {
    if g.component_of(base) != comp {
        return Err(GeometryError::Param(format!("vertex {base} is not in component {}", g.component_name(comp))));
    }
    let mut words = HashMap::from([(base, Word::empty())]);
    let mut q = VecDeque::from([base]);
    while let Some(u) = q.pop_front() {
        for &(l, st) in g.darts(u) {
            let v = g.head(st);
            if !words.contains_key(&v) {
                let mut w = words[&u].clone();
                w.push(l);
                words.insert(v, w);
                q.push_back(v);
            }
        }
    }
    Ok(words)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DistanceRow {
    pub x: VertexId,
    pub y: VertexId,
    pub graph: usize,
    pub cayley: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct EmbeddingReport {
    pub component: String,
    pub base: VertexId,
    pub vertices: usize,
    pub diameter: usize,
    pub radius: usize,
    /// ι(v) for the vertices in increasing order.
    pub images: Vec<(VertexId, String)>,
    pub labels_respected: bool,
    pub injective: bool,
    pub collisions: Vec<(VertexId, VertexId)>,
    /// `None` when the ball was too large to enumerate.
    pub isometric: Option<bool>,
    pub ball_size: Option<usize>,
    pub pairs: usize,
    /// Pairs whose Cayley distance is below the graph distance.
    pub distortion: Vec<DistanceRow>,
    /// d_Cay ≤ d_Γ held on every pair checked.
    pub contracting: bool,
    pub approximate: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EmbedConfig {
    pub radius: usize,
    /// Compute Cayley distances (needs the ball of radius = diameter).
    pub distances: bool,
    pub ball: BallConfig,
}

/// Maps a component into the Cayley graph by tree-path labels and checks
/// label preservation, injectivity and (optionally) distances.
///
/// Distances are settled inside the ball of radius `diameter`: every Cayley
/// distance between images is at most the graph distance.
pub fn embed_component(
    g: &LabelledGraph,
    comp: usize,
    base: VertexId,
    solver: &Solver<'_>,
    cfg: EmbedConfig,
) -> Result<EmbeddingReport, GeometryError> {
    let (_, diameter) = girth_and_diameter(g, comp);
    let needed = diameter + solver.presentation().max_relator_len();
    if cfg.radius < needed {
        return Err(GeometryError::BallTooSmall { radius: cfg.radius, needed });
    }
    let words = tree_words(g, comp, base)?;
    let mut verts: Vec<VertexId> = words.keys().copied().collect();
    verts.sort_unstable();
    let nb = cfg.ball.node_budget;

    let mut approximate = false;
    let mut labels_respected = true;
    for e in g.edges().iter().filter(|e| words.contains_key(&e.source)) {
        let w = words[&e.source].concat(&Word::from(vec![Letter::pos(e.letter)]));
        let (same, unknown) = same_element(solver, &w.free_reduce(), &words[&e.target], nb)?;
        approximate |= unknown;
        labels_respected &= same || unknown;
    }

    let pairs: Vec<(VertexId, VertexId)> =
        verts.iter().enumerate().flat_map(|(i, &x)| verts[i + 1..].iter().map(move |&y| (x, y))).collect();
    let graph_dist: HashMap<VertexId, Vec<Option<usize>>> =
        verts.par_iter().map(|&x| (x, g.distances_from(x))).collect();
    let h = |x: VertexId, y: VertexId| words[&x].inverse().mul_reduced(&words[&y]);

    let ball = if cfg.distances { Some(cayley_ball(solver, diameter, cfg.ball)?) } else { None };
    let rows: Vec<Result<(VertexId, VertexId, usize, Option<usize>, bool), SolverError>> = pairs
        .par_iter()
        .map(|&(x, y)| {
            let dg = graph_dist[&x][y].expect("same component");
            let w = h(x, y);
            match &ball {
                Some(b) => {
                    let (idx, unknown) = b.locate(solver, &w, nb)?;
                    Ok((x, y, dg, idx.map(|i| b.elements[i].len()), unknown))
                }
                None => {
                    let (same, unknown) = same_element(solver, &w, &Word::empty(), nb)?;
                    Ok((x, y, dg, if same { Some(0) } else { None }, unknown))
                }
            }
        })
        .collect();
    let mut collisions = Vec::new();
    let mut distortion = Vec::new();
    let mut contracting = true;
    let mut isometric = true;
    for r in rows {
        let (x, y, dg, dc, unknown) = r?;
        approximate |= unknown;
        match dc {
            Some(0) => collisions.push((x, y)),
            Some(d) => {
                contracting &= d <= dg;
                if d != dg {
                    isometric = false;
                    distortion.push(DistanceRow { x, y, graph: dg, cayley: d });
                }
            }
            // outside the ball: only possible when a comparison was Unknown
            None if ball.is_some() => isometric = false,
            None => {}
        }
    }
    let fmt = |w: &Word| g.alphabet().format_word(w);
    Ok(EmbeddingReport {
        component: g.component_name(comp),
        base,
        vertices: verts.len(),
        diameter,
        radius: cfg.radius,
        images: verts.iter().map(|&v| (v, fmt(&words[&v]))).collect(),
        labels_respected,
        injective: collisions.is_empty(),
        collisions,
        isometric: ball.as_ref().map(|_| isometric),
        ball_size: ball.as_ref().map(|b| b.len()),
        pairs: pairs.len(),
        distortion,
        contracting,
        approximate: approximate || ball.is_some_and(|b| b.approximate),
    })
}

/// Upper bound on a Cayley distance from a second word for the same element.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DistortionWitness {
    pub x: VertexId,
    pub y: VertexId,
    pub graph_distance: usize,
    pub alternative: String,
    pub alternative_length: usize,
    /// The solver proved `alternative = label(geodesic x→y)` in the group.
    pub certified: bool,
    pub derivation_length: Option<usize>,
    pub cayley_upper_bound: usize,
}

pub fn distortion_witness(
    g: &LabelledGraph,
    x: VertexId,
    y: VertexId,
    alternative: &Word,
    solver: &Solver<'_>,
    node_budget: u64,
) -> Result<DistortionWitness, GeometryError> {
    let geodesic = g
        .path_avoiding(x, y, None)
        .ok_or_else(|| GeometryError::Param(format!("{x} and {y} are in different components")))?;
    let label = g.label(&geodesic);
    let w = alternative.free_reduce().mul_reduced(&label.inverse());
    let (certified, derivation_length) = match solver.solve_with_budget(&w, node_budget)? {
        WordVerdict::Trivial { derivation, .. } => {
            let ok = replay(&w, &derivation, solver.presentation())?.is_empty();
            (ok, Some(derivation.len()))
        }
        _ => (false, None),
    };
    let alt_len = alternative.free_reduce().len();
    Ok(DistortionWitness {
        x,
        y,
        graph_distance: label.len(),
        alternative: g.alphabet().format_word(alternative),
        alternative_length: alt_len,
        certified,
        derivation_length,
        cayley_upper_bound: if certified { alt_len.min(label.len()) } else { label.len() },
    })
}

/// Distance between points of different components `X_m`, `X_n` of the
/// coarse disjoint union.
pub fn inter_component_distance(diam_m: usize, diam_n: usize, m: usize, n: usize) -> usize {
    diam_m + diam_n + m + n
}

/// Metric on `⊔ X_i`, with `components[i]` playing the role of `X_{i+1}`.
pub fn coarse_union_metric(
    components: &[LabelledGraph],
    m: usize,
    x: VertexId,
    n: usize,
    y: VertexId,
) -> Result<usize, GeometryError> {
    let get = |i: usize| {
        components.get(i.wrapping_sub(1)).ok_or_else(|| GeometryError::Param(format!("no component X_{i}")))
    };
    let (gm, gn) = (get(m)?, get(n)?);
    if x >= gm.vertex_count() || y >= gn.vertex_count() {
        return Err(GeometryError::Param("vertex out of range".into()));
    }
    if m == n {
        return gm.distances_from(x)[y].ok_or_else(|| GeometryError::Param("X_m is not connected".into()));
    }
    let diam = |g: &LabelledGraph| (0..g.components().len()).map(|c| girth_and_diameter(g, c).1).max().unwrap_or(0);
    Ok(inter_component_distance(diam(gm), diam(gn), m, n))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Gap {
    /// Position of the lower girth in the sorted list.
    pub index: usize,
    pub lower: u64,
    pub upper: u64,
    #[serde(serialize_with = "ratio_str")]
    pub ratio: Ratio<i128>,
    /// `[a, aK]` misses the list.
    #[serde(serialize_with = "ratio_str")]
    pub a: Ratio<i128>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SparseVerdict {
    /// Some consecutive ratio exceeds K within the first `up_to` values.
    GapFound { up_to: usize },
    /// Every consecutive ratio is at most K. A finite prefix cannot refute sparseness.
    NoGap { up_to: usize },
    /// Fewer than two values: only the gap above the maximum exists.
    Vacuous { above: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SparseReport {
    #[serde(serialize_with = "ratio_str")]
    pub k: Ratio<i128>,
    pub values: Vec<u64>,
    #[serde(serialize_with = "opt_ratio_str")]
    pub max_ratio: Option<Ratio<i128>>,
    pub gaps: Vec<Gap>,
    pub verdict: SparseVerdict,
}

fn opt_ratio_str<S: Serializer>(r: &Option<Ratio<i128>>, s: S) -> Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.collect_str(r),
        None => s.serialize_none(),
    }
}

/// Looks for `a` with `[a, aK] ∩ L = ∅` between consecutive values of `L`.
pub fn sparse_check(l: &[u64], k: Ratio<i64>) -> Result<SparseReport, GeometryError> {
    let k = Ratio::new(i128::from(*k.numer()), i128::from(*k.denom()));
    if k <= Ratio::from_integer(1) {
        return Err(GeometryError::Param("K must exceed 1".into()));
    }
    let mut values = l.to_vec();
    values.sort_unstable();
    values.dedup();
    if values.first() == Some(&0) {
        return Err(GeometryError::Param("girths must be positive".into()));
    }
    let mut gaps = Vec::new();
    let mut max_ratio: Option<Ratio<i128>> = None;
    for (i, w) in values.windows(2).enumerate() {
        let (lo, hi) = (i128::from(w[0]), i128::from(w[1]));
        let ratio = Ratio::new(hi, lo);
        max_ratio = Some(max_ratio.map_or(ratio, |m| m.max(ratio)));
        if ratio > k {
            // midpoint of (lo, hi/K): above lo, and a·K stays below hi
            let a = (Ratio::from_integer(lo) + Ratio::from_integer(hi) / k) / 2;
            gaps.push(Gap { index: i, lower: w[0], upper: w[1], ratio, a });
        }
    }
    let verdict = match values.len() {
        0 | 1 => SparseVerdict::Vacuous { above: values.last().copied().unwrap_or(0) },
        n if gaps.is_empty() => SparseVerdict::NoGap { up_to: n },
        n => SparseVerdict::GapFound { up_to: n },
    };
    Ok(SparseReport { k, values, max_ratio, gaps, verdict })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MemberStats {
    pub girth: u64,
    pub diameter: u64,
}

impl MemberStats {
    /// Least girth and largest diameter over the components of `g`.
    pub fn of(g: &LabelledGraph) -> Self {
        let per: Vec<(usize, usize)> = (0..g.components().len()).map(|c| girth_and_diameter(g, c)).collect();
        MemberStats {
            girth: per.iter().map(|p| p.0).filter(|&x| x > 0).min().unwrap_or(0) as u64,
            diameter: per.iter().map(|p| p.1).max().unwrap_or(0) as u64,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LacunaryMode {
    GirthArith,
    WordSearch,
}

/// One accepted index and the inequality it met.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Selection {
    pub index: usize,
    /// Picks made before this one.
    pub n: usize,
    /// Compared quantity: the girth, or the injectivity-radius lower bound.
    pub value: u64,
    #[serde(serialize_with = "ratio_str")]
    pub threshold: Ratio<i128>,
    pub inequality: String,
    /// For word search: the bound is exact rather than "at least".
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shortest_new_relation: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Rejection {
    pub index: usize,
    pub value: u64,
    #[serde(serialize_with = "ratio_str")]
    pub threshold: Ratio<i128>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LacunaryReport {
    pub mode: LacunaryMode,
    pub girths: Vec<u64>,
    pub diameters: Vec<u64>,
    /// Diameter/girth bound: the prefix maximum unless overridden.
    #[serde(serialize_with = "ratio_str")]
    pub c: Ratio<i128>,
    pub c_overridden: bool,
    pub selected: Vec<Selection>,
    pub rejected: Vec<Rejection>,
    pub sparse: Option<SparseReport>,
    /// Some Unknown verdict weakened a word-search bound.
    pub approximate: bool,
}

fn prefix_c(stats: &[MemberStats], c: Option<Ratio<i64>>) -> (Ratio<i128>, bool) {
    match c {
        Some(c) => (Ratio::new(i128::from(*c.numer()), i128::from(*c.denom())), true),
        None => (
            stats
                .iter()
                .filter(|s| s.girth > 0)
                .map(|s| Ratio::new(i128::from(s.diameter), i128::from(s.girth)))
                .max()
                .unwrap_or_else(|| Ratio::from_integer(0)),
            false,
        ),
    }
}

fn finish(report: LacunaryReport, next: Option<Ratio<i128>>) -> Result<LacunaryReport, GeometryError> {
    if report.selected.len() < 2 {
        let threshold = next.map_or_else(|| "none".to_string(), |t| t.to_string());
        return Err(GeometryError::InsufficientData {
            selected: report.selected.len(),
            threshold,
            partial: Box::new(report),
        });
    }
    Ok(report)
}

/// Greedy girth selection: after `N` picks the next girth must exceed
/// `N · 2C · g_max`, with `g_max` the largest girth picked so far.
pub fn lacunary_select_girth(stats: &[MemberStats], c: Option<Ratio<i64>>) -> Result<LacunaryReport, GeometryError> {
    if stats.iter().any(|s| s.girth == 0) {
        return Err(GeometryError::Param("every member needs a cycle".into()));
    }
    let (c, c_overridden) = prefix_c(stats, c);
    let mut selected: Vec<Selection> = Vec::new();
    let mut rejected = Vec::new();
    let mut g_max = 0u64;
    let mut next = None;
    for (i, s) in stats.iter().enumerate() {
        let n = selected.len();
        let threshold = Ratio::from_integer(2 * n as i128 * i128::from(g_max)) * c;
        if n == 0 || Ratio::from_integer(i128::from(s.girth)) > threshold {
            selected.push(Selection {
                index: i,
                n,
                value: s.girth,
                threshold,
                inequality: format!("{} > {n}·2·{c}·{g_max} = {threshold}", s.girth),
                shortest_new_relation: None,
            });
            g_max = g_max.max(s.girth);
            next = None;
        } else {
            rejected.push(Rejection { index: i, value: s.girth, threshold });
            next = Some(threshold);
        }
    }
    let girths: Vec<u64> = stats.iter().map(|s| s.girth).collect();
    let picked: Vec<u64> = selected.iter().map(|s| s.value).collect();
    let report = LacunaryReport {
        mode: LacunaryMode::GirthArith,
        diameters: stats.iter().map(|s| s.diameter).collect(),
        girths,
        c,
        c_overridden,
        sparse: Some(sparse_check(&picked, Ratio::from_integer(2))?),
        selected,
        rejected,
        approximate: false,
    };
    finish(report, next)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    /// Longest candidate relation tried.
    pub max_len: usize,
    pub node_budget: u64,
    pub cycle_budget: u64,
    pub certificates: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { max_len: 6, node_budget: 100_000, cycle_budget: 1 << 20, certificates: true }
    }
}

/// Cyclically reduced words of length `len`, in lexicographic slot order.
pub fn cyclically_reduced_words(rank: usize, len: usize) -> impl Iterator<Item = Word> {
    let slots: Vec<Letter> = letter_slots(rank).collect();
    let s = slots.len();
    let total = if len == 0 { 0 } else { s.checked_pow(len as u32).unwrap_or(usize::MAX) };
    (0..total).filter_map(move |mut code| {
        let mut w = Vec::with_capacity(len);
        for _ in 0..len {
            w.push(slots[code % s]);
            code /= s;
        }
        w.reverse();
        let ok = (0..len).all(|i| w[(i + 1) % len] != w[i].inverse() || len == 1);
        ok.then(|| Word::from(w))
    })
}

fn union_presentation(parts: &[&LabelledGraph], budget: u64) -> Result<(LabelledGraph, Presentation), GeometryError> {
    let owned: Vec<LabelledGraph> = parts.iter().map(|g| (*g).clone()).collect();
    let u = LabelledGraph::disjoint_union(parts[0].alphabet().clone(), &owned)
        .map_err(|e| GeometryError::Param(e.to_string()))?;
    let p = relators_simple_cycles(&u, budget)?;
    Ok((u, p))
}

/// Shortest word trivial in the larger group but not in the smaller one,
/// among cyclically reduced words up to `cfg.max_len`. Returns the length
/// (exact when found) and whether an Unknown verdict cut the search short.
fn shortest_new_relation(
    small: &Solver<'_>,
    large: &Solver<'_>,
    rank: usize,
    cfg: SearchConfig,
) -> Result<(Option<usize>, usize, bool), SolverError> {
    for len in 1..=cfg.max_len {
        let words: Vec<Word> = cyclically_reduced_words(rank, len).collect();
        let verdicts: Vec<Result<(bool, bool), SolverError>> = words
            .par_iter()
            .map(|w| {
                let big = large.solve_with_budget(w, cfg.node_budget)?;
                match big {
                    WordVerdict::Nontrivial { .. } => Ok((false, false)),
                    WordVerdict::Unknown { .. } => Ok((false, true)),
                    WordVerdict::Trivial { .. } => match small.solve_with_budget(w, cfg.node_budget)? {
                        WordVerdict::Nontrivial { .. } => Ok((true, false)),
                        WordVerdict::Trivial { .. } => Ok((false, false)),
                        WordVerdict::Unknown { .. } => Ok((false, true)),
                    },
                }
            })
            .collect();
        let mut unknown = false;
        for v in verdicts {
            let (new, u) = v?;
            if new {
                return Ok((Some(len), len, false));
            }
            unknown |= u;
        }
        if unknown {
            // a relation of this length may have been missed
            return Ok((None, len, true));
        }
    }
    Ok((None, cfg.max_len + 1, false))
}

/// Selection by injectivity radius: the next graph is accepted when the
/// projection from the group of the current picks is injective on a ball
/// larger than `N · δ_N`, with `δ_N = 2 · max diameter` of the picks.
/// Every member must satisfy Gr(7) and share one alphabet.
pub fn lacunary_select_search(seq: &[LabelledGraph], cfg: SearchConfig) -> Result<LacunaryReport, GeometryError> {
    let first = seq.first().ok_or_else(|| GeometryError::Param("empty sequence".into()))?;
    let rank = first.alphabet().len();
    for (i, g) in seq.iter().enumerate() {
        if g.alphabet() != first.alphabet() {
            return Err(GeometryError::Param(format!("member {i} uses a different alphabet")));
        }
        if !check(g, Condition::Gr(7), cfg.cycle_budget)?.holds {
            return Err(GeometryError::Param(format!("member {i} fails Gr(7)")));
        }
    }
    let stats: Vec<MemberStats> = seq.iter().map(MemberStats::of).collect();
    let solver_cfg = SolverConfig { node_budget: cfg.node_budget, certificates: cfg.certificates, ..Default::default() };
    let mut picks: Vec<usize> = vec![0];
    let mut selected = vec![Selection {
        index: 0,
        n: 0,
        value: 0,
        threshold: Ratio::from_integer(0),
        inequality: "first member".into(),
        shortest_new_relation: None,
    }];
    let mut rejected = Vec::new();
    let mut approximate = false;
    let mut next = None;
    for j in 1..seq.len() {
        let parts: Vec<&LabelledGraph> = picks.iter().map(|&i| &seq[i]).collect();
        let (gs, ps) = union_presentation(&parts, cfg.cycle_budget)?;
        let mut with = parts.clone();
        with.push(&seq[j]);
        let (gl, pl) = union_presentation(&with, cfg.cycle_budget)?;
        let verified = |g: &LabelledGraph| -> Result<VerifiedCondition, GeometryError> {
            Ok(VerifiedCondition::from_report(&check(g, Condition::Gr(7), cfg.cycle_budget)?)?)
        };
        let small = Solver::new(&ps, verified(&gs)?, solver_cfg);
        let large = Solver::new(&pl, verified(&gl)?, solver_cfg);
        let (exact, bound, unknown) = shortest_new_relation(&small, &large, rank, cfg)?;
        approximate |= unknown;
        // injective on the ball of radius r iff no new relation has length ≤ 2r
        let radius = (bound.saturating_sub(1) / 2) as u64;
        let n = picks.len();
        let delta = 2 * picks.iter().map(|&i| stats[i].diameter).max().unwrap_or(0);
        let threshold = Ratio::from_integer(n as i128 * i128::from(delta));
        if Ratio::from_integer(i128::from(radius)) > threshold {
            selected.push(Selection {
                index: j,
                n,
                value: radius,
                threshold,
                inequality: format!("ρ ≥ {radius} > {n}·{delta} = {threshold}"),
                shortest_new_relation: exact,
            });
            picks.push(j);
            next = None;
        } else {
            rejected.push(Rejection { index: j, value: radius, threshold });
            next = Some(threshold);
        }
    }
    let (c, _) = prefix_c(&stats, None);
    let report = LacunaryReport {
        mode: LacunaryMode::WordSearch,
        girths: stats.iter().map(|s| s.girth).collect(),
        diameters: stats.iter().map(|s| s.diameter).collect(),
        c,
        c_overridden: false,
        selected,
        rejected,
        sparse: None,
        approximate,
    };
    finish(report, next)
}

#[cfg(test)]
mod tests;
