//! Sound nontriviality certificates: the abelianisation and homomorphisms
//! onto small permutation groups. A word whose image is nontrivial in some
//! quotient is nontrivial in the group itself.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use serde::Serialize;

use crate::word::{Letter, Word};

mod low_index;
pub use low_index::low_index_quotients;

/// Relator lattice in Z^rank, kept in Hermite normal form.
#[derive(Clone, Debug)]
pub struct AbelianInvariant {
    rank: usize,
    // (pivot column, row) with positive pivots, strictly increasing columns
    rows: Vec<(usize, Vec<i128>)>,
}

impl AbelianInvariant {
    pub fn new(rank: usize, relators: &[Word]) -> Self {
        let mut m: Vec<Vec<i128>> = relators
            .iter()
            .map(|r| r.exponent_vector(rank).into_iter().map(i128::from).collect())
            .collect();
        let mut rows = Vec::new();
        let mut col = 0;
        while col < rank && !m.is_empty() {
            // Euclid on column `col` across the remaining rows
            loop {
                m.retain(|r| r.iter().any(|&x| x != 0));
                let nz: Vec<usize> = (0..m.len()).filter(|&i| m[i][col] != 0).collect();
                if nz.len() <= 1 {
                    break;
                }
                let p = *nz.iter().min_by_key(|&&i| m[i][col].abs()).unwrap();
                let pivot_row = m[p].clone();
                for &i in &nz {
                    if i != p {
                        let q = m[i][col].div_euclid(pivot_row[col]);
                        for (x, y) in m[i].iter_mut().zip(&pivot_row) {
                            *x -= q * y;
                        }
                    }
                }
            }
            if let Some(p) = (0..m.len()).find(|&i| m[i][col] != 0) {
                let mut row = m.remove(p);
                if row[col] < 0 {
                    row.iter_mut().for_each(|x| *x = -*x);
                }
                rows.push((col, row));
            }
            col += 1;
        }
        AbelianInvariant { rank, rows }
    }

    /// `true` when the exponent vector of `w` lies outside the relator lattice.
    pub fn separates(&self, w: &Word) -> bool {
        let mut v: Vec<i128> = w.exponent_vector(self.rank).into_iter().map(i128::from).collect();
        for (c, row) in &self.rows {
            if v[*c] % row[*c] != 0 {
                return true;
            }
            let q = v[*c] / row[*c];
            for (x, y) in v.iter_mut().zip(row) {
                *x -= q * y;
            }
        }
        v.iter().any(|&x| x != 0)
    }

    /// Canonical representative of the image of `w` in the abelianisation:
    /// pivot coordinates reduced into `0..pivot`. Equal iff the images agree.
    pub fn canonical(&self, w: &Word) -> Vec<i128> {
        let mut v: Vec<i128> = w.exponent_vector(self.rank).into_iter().map(i128::from).collect();
        for (c, row) in &self.rows {
            let q = v[*c].div_euclid(row[*c]);
            for (x, y) in v.iter_mut().zip(row) {
                *x -= q * y;
            }
        }
        v
    }

    /// Free rank of the abelianisation.
    pub fn free_rank(&self) -> usize {
        self.rank - self.rows.len()
    }
}

type Perm = Vec<u8>;

fn compose(p: &[u8], q: &[u8]) -> Perm {
    // apply p, then q
    p.iter().map(|&i| q[i as usize]).collect()
}

fn invert(p: &[u8]) -> Perm {
    let mut r = vec![0u8; p.len()];
    for (i, &x) in p.iter().enumerate() {
        r[x as usize] = i as u8;
    }
    r
}

/// The full symmetric group on `n` points with a multiplication table.
struct SymmetricGroup {
    elements: Vec<Perm>,
    mul: Vec<u16>,
    inv: Vec<u16>,
    identity: u16,
}

impl SymmetricGroup {
    fn new(n: usize) -> Self {
        let mut elements: Vec<Perm> = Vec::new();
        let mut cur: Perm = (0..n as u8).collect();
        loop {
            elements.push(cur.clone());
            // next lexicographic permutation
            let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else { break };
            let j = (i + 1..n).rev().find(|&j| cur[j] > cur[i]).unwrap();
            cur.swap(i, j);
            cur[i + 1..].reverse();
        }
        let index = |p: &Perm| elements.binary_search(p).unwrap() as u16;
        let k = elements.len();
        let mut mul = vec![0u16; k * k];
        for (a, pa) in elements.iter().enumerate() {
            for (b, pb) in elements.iter().enumerate() {
                mul[a * k + b] = index(&compose(pa, pb));
            }
        }
        let inv = elements.iter().map(|p| index(&invert(p))).collect();
        SymmetricGroup { identity: 0, mul, inv, elements }
    }

    fn order(&self) -> usize {
        self.elements.len()
    }

    fn mul(&self, a: u16, b: u16) -> u16 {
        self.mul[a as usize * self.order() + b as usize]
    }

    fn letter(&self, images: &[u16], l: Letter) -> u16 {
        let g = images[l.index() as usize];
        if l.is_positive() {
            g
        } else {
            self.inv[g as usize]
        }
    }

    fn eval(&self, images: &[u16], w: &[Letter]) -> u16 {
        w.iter().fold(self.identity, |acc, &l| self.mul(acc, self.letter(images, l)))
    }
}

/// A homomorphism onto a subgroup of S_n, given by generator images.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PermQuotient {
    pub degree: usize,
    /// Image of each generator as a permutation of 0..degree.
    pub images: Vec<Vec<u8>>,
    pub image_order: usize,
}

impl PermQuotient {
    /// Image of `w` (apply letters left to right).
    pub fn eval(&self, w: &Word) -> Perm {
        let mut x: Perm = (0..self.degree as u8).collect();
        for &l in w {
            let g = &self.images[l.index() as usize];
            x = if l.is_positive() { compose(&x, g) } else { compose(&x, &invert(g)) };
        }
        x
    }

    pub fn separates(&self, w: &Word) -> bool {
        self.eval(w).iter().enumerate().any(|(i, &x)| i != x as usize)
    }

    pub fn kills(&self, relators: &[Word]) -> bool {
        relators.iter().all(|r| !self.separates(r))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuotientSearch {
    /// Largest symmetric group degree tried.
    pub max_degree: usize,
    /// Upper bound on candidate generator tuples per degree.
    pub tuple_budget: u64,
    /// Homomorphisms kept overall.
    pub max_quotients: usize,
    /// Seeded random tuples tried per degree when the full enumeration
    /// exceeds `tuple_budget`.
    pub samples: u64,
    /// Largest subgroup index for the coset-table search (0 disables it).
    pub max_index: usize,
    pub index_nodes: u64,
}

impl Default for QuotientSearch {
    fn default() -> Self {
        QuotientSearch { max_degree: 5, tuple_budget: 20_000_000, max_quotients: 256, samples: 2048, max_index: 7, index_nodes: 200_000 }
    }
}

/// For each relator, a letter occurring in it exactly once whose image is then
/// forced by the other letters of that relator.
fn solved_letters(rank: usize, relators: &[Word]) -> Vec<Option<(usize, usize)>> {
    let mut solved: Vec<Option<(usize, usize)>> = vec![None; rank];
    let mut pinned = vec![false; rank];
    for (ri, r) in relators.iter().enumerate() {
        let mut count = vec![0usize; rank];
        for l in r {
            count[l.index() as usize] += 1;
        }
        let others_free = |x: usize| (0..rank).all(|y| y == x || count[y] == 0 || solved[y].is_none());
        if let Some(x) = (0..rank).find(|&x| count[x] == 1 && solved[x].is_none() && !pinned[x] && others_free(x)) {
            let pos = r.iter().position(|l| l.index() as usize == x).unwrap();
            solved[x] = Some((ri, pos));
            for y in 0..rank {
                if y != x && count[y] > 0 {
                    pinned[y] = true;
                }
            }
        }
    }
    solved
}

/// Non-abelian homomorphisms onto subgroups of S_3 ..= S_max_degree, one per
/// conjugacy class, in a fixed enumeration order. Degrees too large to
/// enumerate are sampled with a fixed seed.
pub fn find_perm_quotients(rank: usize, relators: &[Word], cfg: QuotientSearch) -> Vec<PermQuotient> {
    let mut out = Vec::new();
    if rank == 0 {
        return out;
    }
    let solved = solved_letters(rank, relators);
    let free: Vec<usize> = (0..rank).filter(|&x| solved[x].is_none()).collect();
    for n in 3..=cfg.max_degree {
        let grp = SymmetricGroup::new(n);
        let k = grp.order() as u64;
        let tuples = k.checked_pow(free.len() as u32).unwrap_or(u64::MAX);
        let sampled = tuples > cfg.tuple_budget;
        let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
        let mut draws = 0u64;
        // sampled degrees share the quotient allowance evenly
        let per_degree = (cfg.max_quotients / cfg.max_degree.saturating_sub(2).max(1)).max(1);
        let kept_before = out.len();
        let mut seen: HashSet<Vec<u16>> = HashSet::new();
        let mut images = vec![0u16; rank];
        let mut counter = vec![0u64; free.len()];
        'tuples: loop {
            if sampled {
                if draws == cfg.samples || out.len() - kept_before >= per_degree {
                    break;
                }
                draws += 1;
                counter.iter_mut().for_each(|c| *c = rng.gen_range(0..k));
            }
            for (i, &x) in free.iter().enumerate() {
                images[x] = counter[i] as u16;
            }
            // forced letters, in relator order
            let mut ok = true;
            for x in 0..rank {
                if let Some((ri, pos)) = solved[x] {
                    let r = relators[ri].letters();
                    // r = α x^ε β = 1  ⇒  x^ε = α⁻¹ β⁻¹
                    let alpha = grp.eval(&images, &r[..pos]);
                    let beta = grp.eval(&images, &r[pos + 1..]);
                    let xe = grp.mul(grp.inv[alpha as usize], grp.inv[beta as usize]);
                    images[x] = if r[pos].is_positive() { xe } else { grp.inv[xe as usize] };
                }
            }
            if relators.iter().any(|r| grp.eval(&images, r.letters()) != grp.identity) {
                ok = false;
            }
            if ok && !is_abelian(&grp, &images) {
                let canon = canonical_under_conjugation(&grp, &images);
                if seen.insert(canon.clone()) {
                    out.push(PermQuotient {
                        degree: n,
                        images: canon.iter().map(|&g| grp.elements[g as usize].clone()).collect(),
                        image_order: generated_order(&grp, &canon),
                    });
                    if out.len() >= cfg.max_quotients {
                        return out;
                    }
                }
            }
            if sampled {
                continue;
            }
            // advance the mixed-radix counter
            for c in counter.iter_mut() {
                *c += 1;
                if *c < k {
                    continue 'tuples;
                }
                *c = 0;
            }
            break;
        }
    }
    out
}

/// Symmetric-group quotients followed by the low-index ones.
pub fn all_perm_quotients(rank: usize, relators: &[Word], cfg: QuotientSearch) -> Vec<PermQuotient> {
    let mut out = find_perm_quotients(rank, relators, cfg);
    out.extend(low_index_quotients(rank, relators, cfg.max_index, cfg.index_nodes, cfg.max_quotients));
    out
}

fn is_abelian(grp: &SymmetricGroup, images: &[u16]) -> bool {
    images
        .iter()
        .enumerate()
        .all(|(i, &a)| images[i + 1..].iter().all(|&b| grp.mul(a, b) == grp.mul(b, a)))
}

fn canonical_under_conjugation(grp: &SymmetricGroup, images: &[u16]) -> Vec<u16> {
    (0..grp.order() as u16)
        .map(|s| {
            let si = grp.inv[s as usize];
            images.iter().map(|&g| grp.mul(grp.mul(si, g), s)).collect::<Vec<u16>>()
        })
        .min()
        .unwrap()
}

fn generated_order(grp: &SymmetricGroup, gens: &[u16]) -> usize {
    let mut seen = vec![false; grp.order()];
    seen[grp.identity as usize] = true;
    let mut stack = vec![grp.identity];
    let mut count = 1;
    while let Some(x) = stack.pop() {
        for &g in gens {
            let y = grp.mul(x, g);
            if !seen[y as usize] {
                seen[y as usize] = true;
                count += 1;
                stack.push(y);
            }
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::Alphabet;

    #[test]
    fn abelian_lattice() {
        let s = Alphabet::new(["a", "b", "c"]).unwrap();
        let rel = [s.parse_word("a a -c -b -b -a -b").unwrap(), s.parse_word("a a -b -c -c -a -c").unwrap()];
        let ab = AbelianInvariant::new(3, &rel);
        assert_eq!(ab.free_rank(), 1);
        assert!(ab.separates(&s.parse_word("a").unwrap()));
        // b c⁻¹ has zero weight for (4,1,1) but is odd under a+b
        assert!(ab.separates(&s.parse_word("b -c").unwrap()));
        assert!(!ab.separates(&s.parse_word("b b -c -c").unwrap()));
        assert!(!ab.separates(&rel[0]));
    }

    #[test]
    fn quotients_kill_relators() {
        let s = Alphabet::new(["a", "b", "c"]).unwrap();
        let rel = [s.parse_word("a a -c -b -b -a -b").unwrap(), s.parse_word("a a -b -c -c -a -c").unwrap()];
        let qs = find_perm_quotients(3, &rel, QuotientSearch::default());
        assert!(!qs.is_empty());
        for q in &qs {
            assert!(q.kills(&rel));
            assert!(q.image_order > 2);
        }
    }

    #[test]
    fn cyclic_groups_have_no_nonabelian_quotients() {
        let s = Alphabet::new(["a"]).unwrap();
        assert!(find_perm_quotients(1, &[s.parse_word("a a a").unwrap()], QuotientSearch::default()).is_empty());
    }
}
