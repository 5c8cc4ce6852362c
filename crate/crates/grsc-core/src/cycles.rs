//! Simple cycle enumeration, girth, diameter and spanning-tree generators.

use std::collections::VecDeque;

use serde::Serialize;
use thiserror::Error;

use crate::graph::{Dir, EdgeId, LabelledGraph, PathRef, Step, VertexId};
use crate::word::Word;

pub const DEFAULT_CYCLE_BUDGET: u64 = 1_000_000;

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq, Serialize)]
#[error("budget exceeded: more than {budget} {what}")]
pub struct BudgetExceeded {
    pub what: &'static str,
    pub budget: u64,
}

/// All simple cycles, one per undirected cycle, each in canonical form,
/// sorted by (length, label, start, steps).
pub fn simple_cycles(g: &LabelledGraph, budget: u64) -> Result<Vec<PathRef>, BudgetExceeded> {
    let mut found: Vec<PathRef> = Vec::new();
    let n = g.vertex_count();
    let mut on_path = vec![false; n];
    let mut steps: Vec<Step> = Vec::new();
    let mut expansions: u64 = 0;
    for s in 0..n {
        // loops at s
        for &(_, st) in g.darts(s) {
            if st.dir == Dir::Forward && g.head(st) == s {
                push_cycle(g, &mut found, PathRef { start: s, steps: vec![st] }, budget)?;
            }
        }
        on_path[s] = true;
        // iterative DFS over simple paths from s through vertices > s
        let mut stack: Vec<usize> = vec![0];
        let mut cur = s;
        while let Some(top) = stack.last_mut() {
            let ds = g.darts(cur);
            if *top >= ds.len() {
                stack.pop();
                if let Some(st) = steps.pop() {
                    on_path[cur] = false;
                    cur = g.tail(st);
                }
                continue;
            }
            let st = ds[*top].1;
            *top += 1;
            expansions += 1;
            if expansions.is_multiple_of(10_000) && found.len() as u64 > budget {
                return Err(BudgetExceeded { what: "simple cycles", budget });
            }
            let w = g.head(st);
            if g.tail(st) == w {
                continue;
            }
            if steps.last().is_some_and(|p| p.edge == st.edge) {
                continue;
            }
            if w == s {
                // closing; keep the orientation whose first edge id is smaller
                if let Some(first) = steps.first() {
                    if first.edge < st.edge {
                        let mut c = steps.clone();
                        c.push(st);
                        push_cycle(g, &mut found, PathRef { start: s, steps: c }, budget)?;
                    }
                }
                continue;
            }
            if w < s || on_path[w] {
                continue;
            }
            on_path[w] = true;
            steps.push(st);
            cur = w;
            stack.push(0);
        }
        on_path[s] = false;
    }
    found.sort_by(|a, b| {
        a.len()
            .cmp(&b.len())
            .then_with(|| g.label(a).cmp(&g.label(b)))
            .then_with(|| a.cmp(b))
    });
    Ok(found)
}

fn push_cycle(
    g: &LabelledGraph,
    found: &mut Vec<PathRef>,
    c: PathRef,
    budget: u64,
) -> Result<(), BudgetExceeded> {
    found.push(canonical_cycle(g, &c));
    if found.len() as u64 > budget {
        return Err(BudgetExceeded { what: "simple cycles", budget });
    }
    Ok(())
}

/// Rotation or reversal of a closed path with the least label; ties broken
/// by start vertex and then step sequence.
pub fn canonical_cycle(g: &LabelledGraph, c: &PathRef) -> PathRef {
    let inv = g.inverse_path(c);
    let mut best: Option<(Word, PathRef)> = None;
    for base in [c, &inv] {
        for k in 0..base.len().max(1) {
            let r = g.rotate_cycle(base, k);
            let l = g.label(&r);
            let better = match &best {
                None => true,
                Some((bl, bp)) => (&l, &r) < (bl, bp),
            };
            if better {
                best = Some((l, r));
            }
        }
    }
    best.map(|b| b.1).unwrap_or_else(|| c.clone())
}

/// Girth (0 for a forest) and diameter of the component containing `comp`'s vertices.
pub fn girth_and_diameter(g: &LabelledGraph, comp: usize) -> (usize, usize) {
    let verts = &g.components()[comp].vertices;
    let mut girth = usize::MAX;
    let mut diameter = 0;
    for &r in verts {
        let (dist, parent) = bfs_tree(g, r);
        for &v in verts {
            if let Some(d) = dist[v] {
                diameter = diameter.max(d);
            }
        }
        for &v in verts {
            for &(_, st) in g.darts(v) {
                if st.dir != Dir::Forward {
                    continue;
                }
                let w = g.head(st);
                let (Some(dv), Some(dw)) = (dist[v], dist[w]) else { continue };
                if parent[v] == Some(st.edge) || parent[w] == Some(st.edge) {
                    continue;
                }
                girth = girth.min(dv + dw + 1);
            }
        }
    }
    (if girth == usize::MAX { 0 } else { girth }, diameter)
}

fn bfs_tree(g: &LabelledGraph, r: VertexId) -> (Vec<Option<usize>>, Vec<Option<EdgeId>>) {
    let n = g.vertex_count();
    let mut dist = vec![None; n];
    let mut parent = vec![None; n];
    dist[r] = Some(0);
    let mut q = VecDeque::from([r]);
    while let Some(u) = q.pop_front() {
        let du = dist[u].unwrap();
        for &(_, st) in g.darts(u) {
            let w = g.head(st);
            if dist[w].is_none() {
                dist[w] = Some(du + 1);
                parent[w] = Some(st.edge);
                q.push_back(w);
            }
        }
    }
    (dist, parent)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub edge: EdgeId,
    pub path: PathRef,
    pub word: Word,
}

/// Free generators of π₁ at `base`: one per edge outside a BFS spanning tree
/// built in edge-id order. Words are not reduced.
pub fn spanning_tree_generators(g: &LabelledGraph, base: VertexId) -> Vec<Generator> {
    let n = g.vertex_count();
    let mut tree_step: Vec<Option<Step>> = vec![None; n];
    let mut seen = vec![false; n];
    let mut in_tree = vec![false; g.edge_count()];
    seen[base] = true;
    let mut q = VecDeque::from([base]);
    while let Some(u) = q.pop_front() {
        let mut ds: Vec<Step> = g.darts(u).iter().map(|d| d.1).collect();
        ds.sort();
        for st in ds {
            let w = g.head(st);
            if !seen[w] {
                seen[w] = true;
                in_tree[st.edge] = true;
                tree_step[w] = Some(st);
                q.push_back(w);
            }
        }
    }
    let tree_path = |v: VertexId| -> Vec<Step> {
        let mut out = Vec::new();
        let mut x = v;
        while let Some(st) = tree_step[x] {
            out.push(st);
            x = g.tail(st);
        }
        out.reverse();
        out
    };
    let comp = g.component_of(base);
    let mut out = Vec::new();
    for (i, e) in g.edges().iter().enumerate() {
        if in_tree[i] || g.component_of(e.source) != comp {
            continue;
        }
        let mut steps = tree_path(e.source);
        steps.push(Step::forward(i));
        steps.extend(tree_path(e.target).iter().rev().map(|s| s.reversed()));
        let path = PathRef { start: base, steps };
        let word = g.label(&path);
        out.push(Generator { edge: i, path, word });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::Alphabet;
    use crate::graph::Edge;

    fn graph(letters: &[&str], n: usize, es: &[(usize, usize, u32)]) -> LabelledGraph {
        let edges = es.iter().map(|&(s, t, l)| Edge { source: s, target: t, letter: l }).collect();
        LabelledGraph::new(Alphabet::new(letters.iter().copied()).unwrap(), n, edges).unwrap()
    }

    #[test]
    fn tree_has_no_cycles() {
        let g = graph(&["a"], 4, &[(0, 1, 0), (1, 2, 0), (2, 3, 0)]);
        assert!(simple_cycles(&g, 10).unwrap().is_empty());
        assert_eq!(girth_and_diameter(&g, 0), (0, 3));
        assert!(spanning_tree_generators(&g, 0).is_empty());
    }

    #[test]
    fn loop_cycle() {
        let g = graph(&["a"], 1, &[(0, 0, 0)]);
        let cs = simple_cycles(&g, 10).unwrap();
        assert_eq!(cs.len(), 1);
        assert_eq!(cs[0].len(), 1);
        assert_eq!(girth_and_diameter(&g, 0), (1, 0));
        let gens = spanning_tree_generators(&g, 0);
        assert_eq!(gens.len(), 1);
        assert_eq!(gens[0].word.len(), 1);
        assert!(gens[0].word.letters()[0].is_positive());
    }

    #[test]
    fn parallel_edges_make_a_two_cycle() {
        let g = graph(&["a", "b"], 2, &[(0, 1, 0), (0, 1, 1)]);
        let cs = simple_cycles(&g, 10).unwrap();
        assert_eq!(cs.len(), 1);
        assert_eq!(cs[0].len(), 2);
        assert_eq!(girth_and_diameter(&g, 0).0, 2);
    }

    #[test]
    fn budget_trips() {
        // K4 has 7 simple cycles
        let mut es = Vec::new();
        for i in 0..4 {
            for j in i + 1..4 {
                es.push((i, j, es.len() as u32));
            }
        }
        let g = graph(&["a", "b", "c", "d", "e", "f"], 4, &es);
        assert_eq!(simple_cycles(&g, 100).unwrap().len(), 7);
        assert!(simple_cycles(&g, 3).is_err());
    }
}
