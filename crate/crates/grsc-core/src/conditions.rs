//! Deciding C(n), C'(λ), Gr(n) and Gr'(λ).
//!
//! Only simple cycles are examined: a graph violates the condition on some
//! nontrivial closed path iff it violates it on a simple cycle.
//!
//! Minimal segmentation. Let ℓ(i) be the longest (essential) piece starting
//! at position i of a cycle of length L, capped at L. Suffixes of pieces are
//! pieces, so i + ℓ(i) is non-decreasing in i. Hence for a fixed first cut
//! the greedy "jump as far as possible" walk uses the fewest pieces, and the
//! minimum over all L first cuts is the exact minimal circular cover.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::cycles::{simple_cycles, BudgetExceeded};
use crate::graph::{LabelledGraph, PathRef, Violation};
use crate::pieces::{PieceError, PieceIndex};

pub type Rational = Ratio<i64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Condition {
    C(usize),
    CPrime(Rational),
    Gr(usize),
    GrPrime(Rational),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConditionError {
    #[error("cannot parse condition `{0}` (expected C7, Cp:1/6, Gr6 or Grp:1/6)")]
    Parse(String),
    #[error("report does not hold; nothing is implied")]
    NotHolding,
    #[error("report is not for a C'(λ) or Gr'(λ) condition")]
    NotMetric,
    #[error(transparent)]
    Budget(#[from] BudgetExceeded),
}

impl Condition {
    pub fn is_graphical(self) -> bool {
        matches!(self, Condition::Gr(_) | Condition::GrPrime(_))
    }

    pub fn essential(self) -> bool {
        self.is_graphical()
    }
}

fn parse_ratio(s: &str) -> Option<Rational> {
    let (n, d) = s.split_once('/').unwrap_or((s, "1"));
    let (n, d): (i64, i64) = (n.trim().parse().ok()?, d.trim().parse().ok()?);
    (d > 0 && n > 0).then(|| Ratio::new(n, d))
}

impl FromStr for Condition {
    type Err = ConditionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ConditionError::Parse(s.to_string());
        if let Some(r) = s.strip_prefix("Grp:") {
            return parse_ratio(r).map(Condition::GrPrime).ok_or_else(err);
        }
        if let Some(r) = s.strip_prefix("Cp:") {
            return parse_ratio(r).map(Condition::CPrime).ok_or_else(err);
        }
        if let Some(n) = s.strip_prefix("Gr") {
            return n.parse().ok().filter(|&n| n > 0).map(Condition::Gr).ok_or_else(err);
        }
        if let Some(n) = s.strip_prefix('C') {
            return n.parse().ok().filter(|&n| n > 0).map(Condition::C).ok_or_else(err);
        }
        Err(err())
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Condition::C(n) => write!(f, "C{n}"),
            Condition::Gr(n) => write!(f, "Gr{n}"),
            Condition::CPrime(r) => write!(f, "Cp:{}/{}", r.numer(), r.denom()),
            Condition::GrPrime(r) => write!(f, "Grp:{}/{}", r.numer(), r.denom()),
        }
    }
}

impl Serialize for Condition {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CycleStat {
    pub cycle: PathRef,
    pub label: String,
    pub length: usize,
    /// Longest (essential) piece that is a subpath of the cycle.
    pub max_piece: usize,
    /// Fewest pieces concatenating to the cycle; `None` when some edge of it
    /// is not a piece.
    pub min_pieces: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    NotReduced { violations: Vec<Violation> },
    /// The cycle is a concatenation of `pieces.len()` pieces, each given as
    /// (offset along the cycle, length).
    Segmentation { cycle: PathRef, label: String, pieces: Vec<(usize, usize)> },
    /// A piece of length `length` at `offset` on a cycle of length `cycle_length`.
    LongPiece { cycle: PathRef, label: String, offset: usize, length: usize, piece: String, cycle_length: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConditionReport {
    pub condition: Condition,
    pub holds: bool,
    pub witness: Option<Witness>,
    pub stats: Vec<CycleStat>,
    /// For graphical conditions on graphs with several components: the verdict
    /// when automorphisms may not move components, if it differs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub holds_with_component_fixing_automorphisms: Option<bool>,
    /// Set when the report was derived from another one instead of searched.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub derived_from: Option<Condition>,
    pub conventions: Vec<&'static str>,
}

const CONVENTIONS: &[&str] = &[
    "cycle representative: least label over rotations and inversion, inverse letter before positive letter",
    "a closed traversal of a whole cycle counts as a piece when its label is readable from two distinct starts",
    "graph automorphisms act on the whole disjoint union and may swap isomorphic components",
    "cycles containing a non-piece edge are unsegmentable and impose no C(n)/Gr(n) constraint",
];

/// Fewest pieces covering a cycle whose piece extents are `ext`, with the cuts.
pub fn min_circular_segmentation(ext: &[usize]) -> Option<Vec<(usize, usize)>> {
    let l = ext.len();
    let mut best: Option<Vec<(usize, usize)>> = None;
    for s in 0..l {
        let mut cuts = Vec::new();
        let mut cur = s;
        let mut ok = true;
        while cur < s + l {
            let e = ext[cur % l].min(s + l - cur);
            if e == 0 {
                ok = false;
                break;
            }
            cuts.push((cur % l, e));
            cur += e;
            if best.as_ref().is_some_and(|b| cuts.len() >= b.len()) {
                ok = false;
                break;
            }
        }
        if ok {
            best = Some(cuts);
        }
    }
    best
}

/// Runs the check on a graph, building its piece index when the labelling is reduced.
pub fn check(g: &LabelledGraph, cond: Condition, budget: u64) -> Result<ConditionReport, BudgetExceeded> {
    let (ok, violations) = g.reduced_labelling();
    if !ok {
        return Ok(ConditionReport {
            condition: cond,
            holds: false,
            witness: Some(Witness::NotReduced { violations: violations.to_vec() }),
            stats: Vec::new(),
            holds_with_component_fixing_automorphisms: None,
            derived_from: None,
            conventions: CONVENTIONS.to_vec(),
        });
    }
    let idx = PieceIndex::new(g).expect("labelling is reduced");
    let mut report = check_with_index(&idx, cond, budget)?;
    if cond.is_graphical() && g.components().len() > 1 {
        let autos = idx.automorphisms();
        if autos.local_orbits.len() != autos.orbits.len() {
            let local = PieceIndex::new_local(g).expect("labelling is reduced");
            let alt = check_with_index(&local, cond, budget)?;
            if alt.holds != report.holds {
                report.holds_with_component_fixing_automorphisms = Some(alt.holds);
            }
        }
    }
    Ok(report)
}

/// Checks a condition against a prebuilt piece index.
pub fn check_with_index(idx: &PieceIndex<'_>, cond: Condition, budget: u64) -> Result<ConditionReport, BudgetExceeded> {
    let g = idx.graph();
    let essential = cond.essential();
    let cycles = simple_cycles(g, budget)?;
    let stats: Vec<(CycleStat, Vec<usize>, Option<Vec<(usize, usize)>>)> = cycles
        .into_par_iter()
        .map(|c| {
            let ext = idx.piece_extents(&c, essential);
            let seg = min_circular_segmentation(&ext);
            let label = g.alphabet().format_word(&g.label(&c));
            let stat = CycleStat {
                length: c.len(),
                max_piece: ext.iter().copied().max().unwrap_or(0),
                min_pieces: seg.as_ref().map(Vec::len),
                label,
                cycle: c,
            };
            (stat, ext, seg)
        })
        .collect();
    let mut witness = None;
    for (stat, ext, seg) in &stats {
        let failure = match cond {
            Condition::C(n) | Condition::Gr(n) => seg.as_ref().filter(|s| s.len() < n).map(|s| Witness::Segmentation {
                cycle: stat.cycle.clone(),
                label: stat.label.clone(),
                pieces: s.clone(),
            }),
            Condition::CPrime(lambda) | Condition::GrPrime(lambda) => {
                let bound = lambda * Ratio::from_integer(stat.length as i64);
                (Ratio::from_integer(stat.max_piece as i64) >= bound).then(|| {
                    let offset = ext.iter().position(|&e| e == stat.max_piece).unwrap();
                    let label = g.label(&stat.cycle);
                    let piece = label.rotate(offset).slice(0, stat.max_piece);
                    Witness::LongPiece {
                        cycle: stat.cycle.clone(),
                        label: stat.label.clone(),
                        offset,
                        length: stat.max_piece,
                        piece: g.alphabet().format_word(&piece),
                        cycle_length: stat.length,
                    }
                })
            }
        };
        if failure.is_some() {
            witness = failure;
            break;
        }
    }
    Ok(ConditionReport {
        condition: cond,
        holds: witness.is_none(),
        witness,
        stats: stats.into_iter().map(|s| s.0).collect(),
        holds_with_component_fixing_automorphisms: None,
        derived_from: None,
        conventions: CONVENTIONS.to_vec(),
    })
}

/// From a holding C'(λ) (Gr'(λ)) report, the implied C(⌊1/λ⌋+1) (Gr(⌊1/λ⌋+1)) report.
pub fn cprime_implies_c(report: &ConditionReport) -> Result<ConditionReport, ConditionError> {
    let (lambda, graphical) = match report.condition {
        Condition::CPrime(l) => (l, false),
        Condition::GrPrime(l) => (l, true),
        _ => return Err(ConditionError::NotMetric),
    };
    if !report.holds {
        return Err(ConditionError::NotHolding);
    }
    let n = (lambda.recip().floor().to_integer() + 1) as usize;
    let condition = if graphical { Condition::Gr(n) } else { Condition::C(n) };
    Ok(ConditionReport {
        condition,
        holds: true,
        witness: None,
        stats: report.stats.clone(),
        holds_with_component_fixing_automorphisms: None,
        derived_from: Some(report.condition),
        conventions: report.conventions.clone(),
    })
}

/// Re-checks a failure witness against the graph. `true` when the witness
/// really demonstrates a violation of `cond`.
pub fn verify_witness(idx: &PieceIndex<'_>, cond: Condition, w: &Witness) -> Result<bool, PieceError> {
    let g = idx.graph();
    let essential = cond.essential();
    let piece_ok = |cycle: &PathRef, offset: usize, len: usize| -> Result<bool, PieceError> {
        let word = g.label(cycle).rotate(offset).slice(0, len);
        let r = idx.is_piece(&word)?;
        Ok(if essential { r.essential } else { r.piece })
    };
    Ok(match w {
        Witness::NotReduced { violations } => !violations.is_empty() && !g.is_reduced(),
        Witness::Segmentation { cycle, pieces, .. } => {
            let n = match cond {
                Condition::C(n) | Condition::Gr(n) => n,
                _ => return Ok(false),
            };
            let total: usize = pieces.iter().map(|p| p.1).sum();
            let contiguous = pieces.windows(2).all(|p| (p[0].0 + p[0].1) % cycle.len() == p[1].0);
            if !(g.is_simple_cycle(cycle) && total == cycle.len() && contiguous && pieces.len() < n) {
                return Ok(false);
            }
            for &(o, l) in pieces {
                if !piece_ok(cycle, o, l)? {
                    return Ok(false);
                }
            }
            true
        }
        Witness::LongPiece { cycle, offset, length, .. } => {
            let lambda = match cond {
                Condition::CPrime(l) | Condition::GrPrime(l) => l,
                _ => return Ok(false),
            };
            g.is_simple_cycle(cycle)
                && Ratio::from_integer(*length as i64) >= lambda * Ratio::from_integer(cycle.len() as i64)
                && piece_ok(cycle, *offset, *length)?
        }
    })
}
