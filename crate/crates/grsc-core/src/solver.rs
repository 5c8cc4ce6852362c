//! Bounded word problem over a graphical presentation.
//!
//! A derivation step `(position i, relator j, rotation k, inverted)` maps a
//! reduced word `u` to `red(u[..i] · ρ · u[i..])` where ρ is rotation `k` of
//! relator `j` (or of its inverse). A word is trivial iff some derivation
//! ends at the empty word, and the least length of such a derivation is the
//! area of the word.
//!
//! Search. If a reduced word `u` has a van Kampen diagram with a face, some
//! face has an edge `e` on the boundary; deleting that face and edge leaves a
//! diagram of one less area for `u` with `e` replaced by the rest of the
//! face boundary. So it suffices to insert, before each letter `e`, the
//! relator variants ending in `e⁻¹`. Each such step shortens a word by at
//! most the relator length, which gives the depth cut `depth + ⌈|u|/M⌉ ≤ A`.

use std::collections::{HashMap, HashSet, VecDeque};

use num_rational::Ratio;
use serde::Serialize;
use thiserror::Error;

use crate::conditions::{Condition, ConditionReport};
use crate::presentation::Presentation;
use crate::quotients::{all_perm_quotients, AbelianInvariant, PermQuotient, QuotientSearch};
use crate::word::Word;

pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolverError {
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("input word is not freely reduced")]
    NotReduced,
    #[error("derivation replay failed at step {step}: {reason}")]
    ReplayFailed { step: usize, reason: String },
}

/// Which isoperimetric theorem backs the search bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AreaTheorem {
    /// Area ≤ 8|w| under Gr(7).
    Linear,
    /// Area ≤ 3|w|² under Gr(6).
    Quadratic,
}

/// A condition known to hold on the graph the presentation was read from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct VerifiedCondition {
    pub condition: Condition,
    pub theorem: AreaTheorem,
    /// Gr'(1/6) or stronger, which enables the greedy shortcut.
    pub small_metric: bool,
}

impl VerifiedCondition {
    /// Accepts a holding report for C(n)/Gr(n) with n ≥ 6 or C'(λ)/Gr'(λ) with λ ≤ 1/6.
    pub fn from_report(r: &ConditionReport) -> Result<Self, SolverError> {
        if !r.holds {
            return Err(SolverError::Precondition(format!("{} does not hold", r.condition)));
        }
        let sixth = Ratio::new(1, 6);
        let (theorem, small_metric) = match r.condition {
            Condition::C(n) | Condition::Gr(n) if n >= 7 => (AreaTheorem::Linear, false),
            Condition::C(6) | Condition::Gr(6) => (AreaTheorem::Quadratic, false),
            Condition::CPrime(l) | Condition::GrPrime(l) if l <= sixth => (AreaTheorem::Linear, true),
            c => return Err(SolverError::Precondition(format!("{c} gives no area bound"))),
        };
        Ok(VerifiedCondition { condition: r.condition, theorem, small_metric })
    }

    pub fn area_bound(&self, len: usize) -> u64 {
        let n = len as u64;
        match self.theorem {
            AreaTheorem::Linear => 8 * n,
            AreaTheorem::Quadratic => 3 * n * n,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct DerivationStep {
    pub position: usize,
    pub relator: usize,
    pub rotation: usize,
    pub inverted: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NontrivialCertificate {
    /// The exponent vector lies outside the relator lattice.
    Abelian { exponents: Vec<i64> },
    /// A homomorphism onto a permutation group not killing the word.
    FiniteQuotient { quotient: PermQuotient, image: Vec<u8> },
    /// Every derivation within the theorem's area bound was explored.
    Exhaustive { condition: Condition, theorem: AreaTheorem, area_bound: u64, length_bound: usize, nodes: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum WordVerdict {
    Trivial { derivation: Vec<DerivationStep>, area: usize, method: &'static str, nodes: u64 },
    Nontrivial { certificate: NontrivialCertificate, nodes: u64 },
    Unknown { nodes: u64, reason: String },
}

impl WordVerdict {
    pub fn is_trivial(&self) -> bool {
        matches!(self, WordVerdict::Trivial { .. })
    }

    pub fn is_nontrivial(&self) -> bool {
        matches!(self, WordVerdict::Nontrivial { .. })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolverConfig {
    pub node_budget: u64,
    /// Use abelian and finite-quotient certificates before searching.
    pub certificates: bool,
    pub quotients: QuotientSearch,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { node_budget: DEFAULT_NODE_BUDGET, certificates: true, quotients: QuotientSearch::default() }
    }
}

/// Relator variant: a rotation of a relator or of its inverse.
#[derive(Clone, Debug)]
struct Variant {
    word: Word,
    step: (usize, usize, bool),
}

pub(crate) fn variant_word(p: &Presentation, relator: usize, rotation: usize, inverted: bool) -> Option<Word> {
    let r = p.relators.get(relator)?;
    if r.is_empty() || rotation >= r.len() {
        return None;
    }
    let base = if inverted { r.inverse() } else { r.clone() };
    Some(base.rotate(rotation))
}

fn insert_reduce(u: &Word, pos: usize, v: &Word) -> Word {
    let l = u.letters();
    Word::from(l[..pos].to_vec()).mul_reduced(v).mul_reduced(&Word::from(l[pos..].to_vec()))
}

/// Applies a derivation, returning the final word.
pub fn replay(w: &Word, steps: &[DerivationStep], p: &Presentation) -> Result<Word, SolverError> {
    let mut u = w.free_reduce();
    for (k, s) in steps.iter().enumerate() {
        let v = variant_word(p, s.relator, s.rotation, s.inverted)
            .ok_or_else(|| SolverError::ReplayFailed { step: k, reason: "no such relator variant".into() })?;
        if s.position > u.len() {
            return Err(SolverError::ReplayFailed { step: k, reason: format!("position {} beyond length {}", s.position, u.len()) });
        }
        u = insert_reduce(&u, s.position, &v);
    }
    Ok(u)
}

/// Greedy shortening: replace a subword that is more than half of a relator
/// variant by the inverse of the rest of that variant.
pub fn dehn_greedy(w: &Word, p: &Presentation) -> (Word, Vec<DerivationStep>) {
    let variants = all_variants(p);
    let mut u = w.free_reduce();
    let mut steps = Vec::new();
    'outer: loop {
        for i in 0..u.len() {
            for v in &variants {
                let vl = v.word.letters();
                let m = vl.iter().zip(&u.letters()[i..]).take_while(|(a, b)| a == b).count();
                if 2 * m > vl.len() {
                    let (j, k, inv) = v.step;
                    let len = p.relators[j].len();
                    let step = DerivationStep { position: i, relator: j, rotation: (len - k) % len, inverted: !inv };
                    u = insert_reduce(&u, i, &v.word.inverse());
                    steps.push(step);
                    continue 'outer;
                }
            }
        }
        return (u, steps);
    }
}

fn all_variants(p: &Presentation) -> Vec<Variant> {
    let mut out: Vec<Variant> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (j, r) in p.relators.iter().enumerate() {
        for inverted in [false, true] {
            for k in 0..r.len() {
                let word = variant_word(p, j, k, inverted).unwrap();
                if seen.insert(word.clone()) {
                    out.push(Variant { word, step: (j, k, inverted) });
                }
            }
        }
    }
    out
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Signature {
    abelian: Vec<i128>,
    perms: Vec<Vec<u8>>,
}

/// Solver over one presentation; certificates are computed once.
pub struct Solver<'p> {
    p: &'p Presentation,
    cond: VerifiedCondition,
    cfg: SolverConfig,
    variants: Vec<Variant>,
    // variants indexed by their last letter
    by_last: HashMap<crate::word::Letter, Vec<usize>>,
    abelian: AbelianInvariant,
    quotients: Vec<PermQuotient>,
    max_len: usize,
}

impl<'p> Solver<'p> {
    pub fn new(p: &'p Presentation, cond: VerifiedCondition, cfg: SolverConfig) -> Self {
        let variants = all_variants(p);
        let mut by_last: HashMap<_, Vec<usize>> = HashMap::new();
        for (i, v) in variants.iter().enumerate() {
            by_last.entry(*v.word.letters().last().unwrap()).or_default().push(i);
        }
        let rank = p.alphabet.len();
        let abelian = AbelianInvariant::new(rank, &p.relators);
        let quotients =
            if cfg.certificates { all_perm_quotients(rank, &p.relators, cfg.quotients) } else { Vec::new() };
        Solver { p, cond, cfg, variants, by_last, abelian, quotients, max_len: p.max_relator_len(), }
    }

    pub fn presentation(&self) -> &Presentation {
        self.p
    }

    pub fn condition(&self) -> VerifiedCondition {
        self.cond
    }

    pub fn quotients(&self) -> &[PermQuotient] {
        &self.quotients
    }

    /// Images of `w` in the abelianisation and in every finite quotient.
    /// Words with different signatures are certified different elements.
    pub fn signature(&self, w: &Word) -> Signature {
        if !self.cfg.certificates {
            return Signature::default();
        }
        Signature { abelian: self.abelian.canonical(w), perms: self.quotients.iter().map(|q| q.eval(w)).collect() }
    }

    /// Certificate of nontriviality from the abelianisation or a finite quotient.
    pub fn certificate(&self, w: &Word) -> Option<NontrivialCertificate> {
        if !self.cfg.certificates {
            return None;
        }
        if self.abelian.separates(w) {
            return Some(NontrivialCertificate::Abelian { exponents: w.exponent_vector(self.p.alphabet.len()) });
        }
        self.quotients.iter().find(|q| q.separates(w)).map(|q| NontrivialCertificate::FiniteQuotient {
            quotient: q.clone(),
            image: q.eval(w),
        })
    }

    pub fn solve(&self, w: &Word) -> Result<WordVerdict, SolverError> {
        self.solve_with_budget(w, self.cfg.node_budget)
    }

    pub fn solve_with_budget(&self, w: &Word, node_budget: u64) -> Result<WordVerdict, SolverError> {
        if !w.is_reduced() {
            return Err(SolverError::NotReduced);
        }
        if w.is_empty() {
            return Ok(WordVerdict::Trivial { derivation: Vec::new(), area: 0, method: "free", nodes: 0 });
        }
        if let Some(certificate) = self.certificate(w) {
            return Ok(WordVerdict::Nontrivial { certificate, nodes: 0 });
        }
        if self.cond.small_metric {
            let (rest, steps) = dehn_greedy(w, self.p);
            if rest.is_empty() {
                let area = steps.len();
                return Ok(WordVerdict::Trivial { derivation: steps, area, method: "greedy", nodes: 0 });
            }
        }
        Ok(self.search(w, node_budget))
    }

    /// Breadth-first search over face removals, within the area bound.
    pub fn search(&self, w: &Word, node_budget: u64) -> WordVerdict {
        let area = self.cond.area_bound(w.len());
        let m = self.max_len.max(1) as u64;
        let length_bound = w.len() + area as usize * self.max_len;
        let mut parent: Vec<(usize, DerivationStep)> = Vec::new();
        parent.push((usize::MAX, DerivationStep { position: 0, relator: 0, rotation: 0, inverted: false }));
        let mut depth_of: Vec<u64> = vec![0];
        let mut seen: HashSet<Word> = HashSet::from([w.clone()]);
        // pending words live only in the queue; `seen` keeps the other copy
        let mut queue = VecDeque::from([(0usize, w.clone())]);
        let mut nodes: u64 = 1;
        while let Some((id, u)) = queue.pop_front() {
            let d = depth_of[id];
            for (pos, &e) in u.letters().iter().enumerate() {
                let Some(cands) = self.by_last.get(&e.inverse()) else { continue };
                for &vi in cands {
                    let v = &self.variants[vi];
                    let next = insert_reduce(&u, pos, &v.word);
                    let (j, k, inv) = v.step;
                    let step = DerivationStep { position: pos, relator: j, rotation: k, inverted: inv };
                    if next.is_empty() {
                        let mut derivation = vec![step];
                        let mut cur = id;
                        while parent[cur].0 != usize::MAX {
                            derivation.push(parent[cur].1);
                            cur = parent[cur].0;
                        }
                        derivation.reverse();
                        let area = derivation.len();
                        return WordVerdict::Trivial { derivation, area, method: "search", nodes };
                    }
                    let nd = d + 1;
                    if nd + (next.len() as u64).div_ceil(m) > area || seen.contains(&next) {
                        continue;
                    }
                    if nodes >= node_budget {
                        return WordVerdict::Unknown { nodes, reason: "node budget exhausted".into() };
                    }
                    nodes += 1;
                    seen.insert(next.clone());
                    parent.push((id, step));
                    depth_of.push(nd);
                    queue.push_back((parent.len() - 1, next));
                }
            }
        }
        WordVerdict::Nontrivial {
            certificate: NontrivialCertificate::Exhaustive {
                condition: self.cond.condition,
                theorem: self.cond.theorem,
                area_bound: area,
                length_bound,
                nodes,
            },
            nodes,
        }
    }
}
