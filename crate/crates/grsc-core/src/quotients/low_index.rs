//! Transitive permutation representations of small degree, from coset
//! tables of subgroups of low index.

use std::collections::HashSet;

use super::PermQuotient;
use crate::word::Word;

const NONE: u32 = u32::MAX;

fn col(l: crate::word::Letter) -> usize {
    2 * l.index() as usize + usize::from(!l.is_positive())
}

struct Search<'a> {
    cols: usize,
    max_index: usize,
    relators: &'a [Vec<usize>],
    nodes: u64,
    node_budget: u64,
    limit: usize,
    found: Vec<Vec<Vec<u32>>>,
}

impl Search<'_> {
    /// Closes relator scans until nothing new is forced. False on a clash.
    fn deduce(&self, t: &mut [Vec<u32>], n: usize) -> bool {
        loop {
            let mut changed = false;
            for k in 0..n {
                for r in self.relators {
                    let (mut i, mut f) = (0, k as u32);
                    while i < r.len() && t[f as usize][r[i]] != NONE {
                        f = t[f as usize][r[i]];
                        i += 1;
                    }
                    if i == r.len() {
                        if f != k as u32 {
                            return false;
                        }
                        continue;
                    }
                    let (mut j, mut b) = (r.len(), k as u32);
                    while j > i && t[b as usize][r[j - 1] ^ 1] != NONE {
                        b = t[b as usize][r[j - 1] ^ 1];
                        j -= 1;
                    }
                    if j == i {
                        if f != b {
                            return false;
                        }
                    } else if j == i + 1 {
                        let x = r[i];
                        if t[b as usize][x ^ 1] != NONE {
                            return false;
                        }
                        t[f as usize][x] = b;
                        t[b as usize][x ^ 1] = f;
                        changed = true;
                    }
                }
            }
            if !changed {
                return true;
            }
        }
    }

    /// Table renumbered breadth-first from `base` is not smaller than `t`.
    fn is_canonical(&self, t: &[Vec<u32>]) -> bool {
        let n = t.len();
        for base in 1..n {
            let mut map = vec![NONE; n];
            let mut order = vec![base];
            map[base] = 0;
            let mut row = 0;
            let mut verdict = std::cmp::Ordering::Equal;
            'rows: while row < n {
                let old = order[row];
                for c in 0..self.cols {
                    let target = t[old][c] as usize;
                    if map[target] == NONE {
                        map[target] = order.len() as u32;
                        order.push(target);
                    }
                    let cmp = map[target].cmp(&t[row][c]);
                    if cmp != std::cmp::Ordering::Equal {
                        verdict = cmp;
                        break 'rows;
                    }
                }
                row += 1;
            }
            if verdict == std::cmp::Ordering::Less {
                return false;
            }
        }
        true
    }

    fn run(&mut self, t: Vec<Vec<u32>>, n: usize) {
        if self.nodes >= self.node_budget || self.found.len() >= self.limit {
            return;
        }
        self.nodes += 1;
        let Some((c, x)) = (0..n).flat_map(|c| (0..self.cols).map(move |x| (c, x))).find(|&(c, x)| t[c][x] == NONE)
        else {
            let table: Vec<Vec<u32>> = t[..n].to_vec();
            if self.is_canonical(&table) {
                self.found.push(table);
            }
            return;
        };
        let fresh = usize::from(n < self.max_index);
        for d in 0..n + fresh {
            if d < n && t[d][x ^ 1] != NONE {
                continue;
            }
            let mut next = t.clone();
            next[c][x] = d as u32;
            next[d][x ^ 1] = c as u32;
            let nn = n.max(d + 1);
            if self.deduce(&mut next, nn) {
                self.run(next, nn);
            }
        }
    }
}

/// Permutation images of the generators on the cosets of every subgroup of
/// index at most `max_index`, one per conjugacy class, skipping abelian
/// images. Stops after `node_budget` search nodes or `limit` tables.
/// The index is capped at 8 so image orders stay cheap to compute.
pub fn low_index_quotients(
    rank: usize,
    relators: &[Word],
    max_index: usize,
    node_budget: u64,
    limit: usize,
) -> Vec<PermQuotient> {
    if rank == 0 || max_index < 2 {
        return Vec::new();
    }
    let rels: Vec<Vec<usize>> = relators.iter().map(|r| r.iter().map(|&l| col(l)).collect()).collect();
    let mut s = Search {
        cols: 2 * rank,
        max_index: max_index.min(8),
        relators: &rels,
        nodes: 0,
        node_budget,
        limit,
        found: Vec::new(),
    };
    let t = vec![vec![NONE; 2 * rank]; s.max_index];
    s.run(t, 1);
    s.found
        .into_iter()
        .filter(|t| t.len() > 2)
        .map(|t| {
            let images: Vec<Vec<u8>> =
                (0..rank).map(|g| t.iter().map(|row| row[2 * g] as u8).collect()).collect();
            PermQuotient { degree: t.len(), image_order: group_order(&images), images }
        })
        .filter(|q| !commuting(&q.images) && q.kills(relators))
        .collect()
}

fn commuting(images: &[Vec<u8>]) -> bool {
    images.iter().enumerate().all(|(i, a)| {
        images[i + 1..].iter().all(|b| super::compose(a, b) == super::compose(b, a))
    })
}

/// Order of the generated permutation group, by closure.
fn group_order(gens: &[Vec<u8>]) -> usize {
    let n = gens.first().map_or(0, Vec::len);
    let id: Vec<u8> = (0..n as u8).collect();
    let mut seen = HashSet::from([id.clone()]);
    let mut stack = vec![id];
    while let Some(x) = stack.pop() {
        for g in gens {
            let y = super::compose(&x, g);
            if seen.insert(y.clone()) {
                stack.push(y);
            }
        }
    }
    seen.len()
}
