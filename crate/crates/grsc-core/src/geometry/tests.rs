use super::*;
use crate::alphabet::Alphabet;
use crate::corpus;
use crate::graph::Edge;
use crate::presentation::relators_simple_cycles;
use proptest::prelude::*;

fn gr7(g: &LabelledGraph) -> (Presentation, VerifiedCondition) {
    let r = check(g, Condition::Gr(7), 1 << 16).unwrap();
    (relators_simple_cycles(g, 1 << 16).unwrap(), VerifiedCondition::from_report(&r).unwrap())
}

fn free2() -> LabelledGraph {
    LabelledGraph::new(Alphabet::new(["a", "b"]).unwrap(), 1, vec![]).unwrap()
}

#[test]
fn free_ball_counts() {
    let g = free2();
    let (p, c) = gr7(&g);
    let s = Solver::new(&p, c, SolverConfig::default());
    let b = cayley_ball(&s, 2, BallConfig::default()).unwrap();
    assert_eq!(b.sphere_sizes, vec![1, 4, 12]);
    assert_eq!(b.len(), 17);
    assert!(!b.approximate);
}

#[test]
fn cyclic_ball_wraps() {
    let g = corpus::cayley_cycle(5, "a").unwrap();
    let (p, c) = gr7(&g);
    let s = Solver::new(&p, c, SolverConfig::default());
    let b = cayley_ball(&s, 3, BallConfig::default()).unwrap();
    assert_eq!(b.len(), 5);
    assert_eq!(b.sphere_sizes, vec![1, 2, 2, 0]);
    // a·a⁻¹ returns to the identity
    let a = b.neighbours[0][0].unwrap();
    assert_eq!(b.neighbours[a][1], Some(0));
}

#[test]
fn ball_budget_is_reported() {
    let g = free2();
    let (p, c) = gr7(&g);
    let s = Solver::new(&p, c, SolverConfig::default());
    let err = cayley_ball(&s, 3, BallConfig { max_elements: 20, node_budget: 1000 }).unwrap_err();
    assert!(matches!(err, GeometryError::Budget(_)));
}

#[test]
fn cycle_embeds_isometrically() {
    let g = corpus::cayley_cycle(5, "a").unwrap();
    let (p, c) = gr7(&g);
    let s = Solver::new(&p, c, SolverConfig::default());
    let cfg = EmbedConfig { radius: 7, distances: true, ball: BallConfig::default() };
    let r = embed_component(&g, 0, 0, &s, cfg).unwrap();
    assert!(r.labels_respected && r.injective && r.contracting);
    assert_eq!(r.isometric, Some(true));
    assert_eq!(r.pairs, 10);
    let small = embed_component(&g, 0, 0, &s, EmbedConfig { radius: 6, ..cfg }).unwrap_err();
    assert_eq!(small, GeometryError::BallTooSmall { radius: 6, needed: 7 });
}

#[test]
fn injectivity_only_mode() {
    let g = corpus::distinct_letter_cycle(7).unwrap();
    let (p, c) = gr7(&g);
    let s = Solver::new(&p, c, SolverConfig::default());
    let cfg = EmbedConfig { radius: 10, distances: false, ball: BallConfig::default() };
    let r = embed_component(&g, 0, 0, &s, cfg).unwrap();
    assert!(r.injective && r.labels_respected);
    assert_eq!(r.isometric, None);
}

#[test]
fn coarse_union_example() {
    assert_eq!(inter_component_distance(3, 5, 1, 2), 11);
    let xs = vec![corpus::cayley_cycle(6, "a").unwrap(), corpus::cayley_cycle(10, "a").unwrap()];
    assert_eq!(coarse_union_metric(&xs, 1, 0, 2, 4).unwrap(), 3 + 5 + 1 + 2);
    assert_eq!(coarse_union_metric(&xs, 2, 0, 2, 7).unwrap(), 3);
    assert!(coarse_union_metric(&xs, 3, 0, 1, 0).is_err());
    assert!(coarse_union_metric(&xs, 0, 0, 1, 0).is_err());
}

#[test]
fn sparse_gaps() {
    let r = sparse_check(&[7, 8, 100, 101], Ratio::new(2, 1)).unwrap();
    assert_eq!(r.gaps.len(), 1);
    let gap = &r.gaps[0];
    assert_eq!((gap.lower, gap.upper), (8, 100));
    assert!(gap.a > Ratio::from_integer(8) && gap.a * Ratio::from_integer(2) < Ratio::from_integer(100));
    assert_eq!(r.verdict, SparseVerdict::GapFound { up_to: 4 });
    let r = sparse_check(&[4, 6, 9], Ratio::new(2, 1)).unwrap();
    assert_eq!(r.verdict, SparseVerdict::NoGap { up_to: 3 });
    assert_eq!(sparse_check(&[5], Ratio::new(2, 1)).unwrap().verdict, SparseVerdict::Vacuous { above: 5 });
    assert!(sparse_check(&[5], Ratio::new(1, 1)).is_err());
}

fn stats(gs: &[u64], c: u64) -> Vec<MemberStats> {
    gs.iter().map(|&g| MemberStats { girth: g, diameter: c * g }).collect()
}

#[test]
fn girth_selection_takes_fast_sequences() {
    let r = lacunary_select_girth(&stats(&[8, 100, 10_000, 100_000_000], 1), None).unwrap();
    assert_eq!(r.selected.iter().map(|s| s.index).collect::<Vec<_>>(), vec![0, 1, 2, 3]);
    assert_eq!(r.c, Ratio::from_integer(1));
    // 10⁴ against 2·2·1·100
    assert_eq!(r.selected[2].threshold, Ratio::from_integer(400));
}

#[test]
fn girth_selection_runs_out() {
    match lacunary_select_girth(&stats(&[7, 8, 9, 10], 1), None).unwrap_err() {
        GeometryError::InsufficientData { selected, partial, .. } => {
            assert_eq!(selected, 1);
            assert_eq!(partial.rejected.len(), 3);
        }
        e => panic!("{e}"),
    }
}

#[test]
fn girth_selection_override() {
    let s = stats(&[8, 20, 30], 1);
    let r = lacunary_select_girth(&s, Some(Ratio::new(1, 2))).unwrap();
    assert!(r.c_overridden);
    assert_eq!(r.selected.len(), 2);
}

#[test]
fn cycle_stats_close_form() {
    for k in [4usize, 5, 16] {
        let g = corpus::cayley_cycle(k, "a").unwrap();
        assert_eq!(MemberStats::of(&g), MemberStats { girth: k as u64, diameter: (k / 2) as u64 });
    }
}

#[test]
fn reduced_word_enumeration() {
    // rank k: (2k-1)^n + 1 + (k-1)(1 + (-1)^n)
    for k in 1..=3usize {
        for n in 1..=5u32 {
            let expect = (2 * k - 1).pow(n) + 1 + (k - 1) * if n % 2 == 0 { 2 } else { 0 };
            assert_eq!(cyclically_reduced_words(k, n as usize).count(), expect, "k={k} n={n}");
        }
    }
}

fn cycle_over_ab(k: usize, letter: u32) -> LabelledGraph {
    let edges = (0..k).map(|i| Edge { source: i, target: (i + 1) % k, letter }).collect();
    LabelledGraph::new(Alphabet::new(["a", "b"]).unwrap(), k, edges).unwrap()
}

#[test]
fn word_search_finds_new_relation() {
    // ⟨a | a³⟩ then ⟨a, b | a³, b⁴⟩: the shortest new relation is b⁴
    let seq = vec![cycle_over_ab(3, 0), cycle_over_ab(4, 1)];
    let cfg = SearchConfig { max_len: 5, ..Default::default() };
    match lacunary_select_search(&seq, cfg).unwrap_err() {
        GeometryError::InsufficientData { partial, .. } => {
            assert_eq!(partial.rejected[0].value, 1);
        }
        e => panic!("{e}"),
    }
}

#[test]
fn word_search_accepts_distant_relation() {
    let seq = vec![cycle_over_ab(1, 0), cycle_over_ab(9, 1)];
    let cfg = SearchConfig { max_len: 9, ..Default::default() };
    let r = lacunary_select_search(&seq, cfg).unwrap();
    assert_eq!(r.selected[1].shortest_new_relation, Some(9));
    assert_eq!(r.selected[1].value, 4);
}

proptest! {
    #[test]
    fn sparse_gaps_satisfy_definition(mut l in prop::collection::vec(1u64..10_000, 0..12), k in 2i64..6) {
        let r = sparse_check(&l, Ratio::new(k, 1)).unwrap();
        l.sort_unstable();
        l.dedup();
        for gap in &r.gaps {
            let kk = Ratio::from_integer(k as i128);
            let lo = gap.a;
            let hi = gap.a * kk;
            let clear = l.iter().all(|&x| Ratio::from_integer(x as i128) < lo || Ratio::from_integer(x as i128) > hi);
            prop_assert!(clear);
        }
        // a larger K never finds more gaps
        let r2 = sparse_check(&l, Ratio::new(k + 1, 1)).unwrap();
        prop_assert!(r2.gaps.len() <= r.gaps.len());
    }

    #[test]
    fn selection_inequalities_hold(gs in prop::collection::vec(1u64..1_000_000, 1..10)) {
        let s = stats(&gs, 1);
        let r = match lacunary_select_girth(&s, None) {
            Ok(r) => r,
            Err(GeometryError::InsufficientData { partial, .. }) => *partial,
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        prop_assert_eq!(r.selected[0].index, 0);
        for sel in &r.selected {
            prop_assert!(Ratio::from_integer(sel.value as i128) > sel.threshold || sel.n == 0);
        }
        prop_assert_eq!(r.selected.len() + r.rejected.len(), gs.len());
    }
}
