use super::fixtures::*;
use super::*;
use crate::conditions::check;
use crate::corpus;
use crate::solver::dehn_greedy;

#[test]
fn dart_round_trips_through_text() {
    for d in [Dart::new(0, true), Dart::new(3, false), Dart::new(41, true)] {
        assert_eq!(d.to_string().parse::<Dart>().unwrap(), d);
        assert_eq!(d.rev().rev(), d);
        assert_ne!(d.rev(), d);
    }
    assert!("3".parse::<Dart>().is_err());
    assert!("x+".parse::<Dart>().is_err());
}

#[test]
fn honeycomb_counts_and_curvature() {
    let d = honeycomb_patch();
    let r = d.validate().unwrap();
    assert_eq!((r.vertices, r.edges, r.faces, r.boundary_length), (24, 30, 7, 18));
    assert_eq!(r.face_kinds.iter().filter(|k| **k == FaceKind::Interior).count(), 1);
    assert!(r.simple);
    assert!(is_pq_diagram(&d, 3, 6, true).holds);
    assert_eq!(curvature_i(&d).unwrap().sum, 6);
    assert_eq!(curvature_ii(&d).unwrap().sum, Ratio::from_integer(3));
}

#[test]
fn rotation_is_one_cycle_per_vertex() {
    let d = honeycomb_patch();
    let rot = d.rotation().unwrap();
    for (v, r) in rot.iter().enumerate() {
        assert_eq!(r.len(), d.degree(v));
    }
}

#[test]
fn heptagon_pair_forgets_to_two_bigons() {
    let d = heptagon_pair();
    d.validate().unwrap();
    let f = forget_degree2(&d);
    let r = f.validate().unwrap();
    // the shared edge plus one outer arc per face
    assert_eq!((r.vertices, r.edges, r.faces), (2, 3, 2));
    assert!(f.faces().iter().all(|w| w.len() == 2));
}

#[test]
fn area_bounds_on_honeycomb() {
    let r = area_bounds(&honeycomb_patch());
    assert_eq!(r.area, 7);
    assert!(matches!(r.quadratic, BoundCheck::Evaluated { bound: 972, holds: true }));
}

#[test]
fn bad_diagrams_are_rejected() {
    let d = heptagon_pair();
    let mut f = d.to_file();
    f.boundary.pop();
    assert!(matches!(Diagram::from_file(&f), Err(DiagramError::Malformed(_))));

    // a face listed twice puts each dart in two cells
    let mut f = d.to_file();
    f.faces.push(f.faces[0].clone());
    assert!(Diagram::from_file(&f).is_err());

    // an extra isolated vertex
    let mut f = d.to_file();
    f.vertices += 1;
    f.rotation = None;
    let e = Diagram::from_file(&f).unwrap().validate().unwrap_err();
    assert_eq!(e, DiagramError::NotSimplyConnected { unreachable: vec![12] });
}

#[test]
fn annulus_leaves_darts_uncovered() {
    // two nested squares joined by one edge: faces cover an annulus
    let mut b = DiagramBuilder::new(Alphabet::new(Vec::<String>::new()).unwrap());
    b.vertices(8);
    let outer: Vec<Dart> = (0..4).map(|i| Dart::new(b.edge(i, (i + 1) % 4, None), true)).collect();
    let inner: Vec<Dart> = (0..4).map(|i| Dart::new(b.edge(4 + (i + 1) % 4, 4 + i, None), true)).collect();
    let spoke = b.edge(0, 4, None);
    // one big face: outer square, spoke in, inner square clockwise, spoke out
    let mut walk = outer.clone();
    walk.push(Dart::new(spoke, true));
    walk.extend(inner.iter().copied());
    walk.push(Dart::new(spoke, false));
    b.face(walk);
    let mut boundary: Vec<Dart> = outer.iter().rev().map(|d| d.rev()).collect();
    boundary.rotate_left(3);
    // the inner square's other side is on no face
    assert!(matches!(b.build_with_boundary(boundary, 0), Err(DiagramError::Malformed(_))));
}

#[test]
fn json_round_trip_and_rotation_check() {
    let d = figure4_face();
    let s = d.to_json();
    let back = Diagram::from_json(&s).unwrap();
    assert_eq!(back, d);
    let mut f = d.to_file();
    if let Some(rot) = &mut f.rotation {
        rot[0].reverse();
        rot[0].push(Dart::new(5, true));
    }
    assert!(Diagram::from_file(&f).is_err());
}

#[test]
fn canonical_form_ignores_numbering() {
    let d = figure1_pair();
    let mut f = d.to_file();
    // relabel vertices by a fixed permutation and reverse the face order
    let perm = |v: usize| (v * 7 + 3) % 11;
    for e in &mut f.edges {
        e.tail = perm(e.tail);
        e.head = perm(e.head);
    }
    f.base = perm(f.base);
    f.faces.reverse();
    f.rotation = None;
    let shuffled = Diagram::from_file(&f).unwrap();
    assert_ne!(shuffled, d);
    assert_eq!(shuffled.canonicalize(), d.canonicalize());
}

#[test]
fn figure1_cells_merge_along_common_path() {
    let g = corpus::figure1();
    let d = figure1_pair();
    d.validate().unwrap();
    let lifts = lift_faces(&d, &g, false).unwrap();
    assert!(lifts.iter().all(|l| l.start == 0));
    let report = check(&g, Condition::C(6), 1 << 20).unwrap();
    assert!(report.holds);
    match remove_originating_edges(&d, &g, &report).unwrap() {
        Removal::Merged { diagram, removed_edges } => {
            assert_eq!(removed_edges.len(), 2);
            assert_eq!(diagram.area(), 1);
            assert_eq!(diagram.faces()[0].len(), 10);
            assert_eq!(diagram.boundary_word(), d.boundary_word());
        }
        other => panic!("expected a merge, got {other:?}"),
    }
}

#[test]
fn misglued_edge_does_not_originate() {
    let g = corpus::figure1();
    let d = figure1_misglued();
    let r = d.validate().unwrap();
    let lifts = lift_faces(&d, &g, false).unwrap();
    let arc = r.arcs.iter().find(|a| a.interior).unwrap();
    assert_eq!(arc.darts.len(), 1);
    assert!(!originates_from(&d, &g, &lifts, &arc.darts, false).unwrap());
    assert!(!originates_from(&d, &g, &lifts, &arc.darts, true).unwrap());
}

#[test]
fn mirror_pair_closes_to_trivial_subdiagram() {
    let g = corpus::distinct_letter_cycle(7).unwrap();
    let d = mirror_pair();
    d.validate().unwrap();
    let report = check(&g, Condition::C(6), 1 << 20).unwrap();
    match remove_originating_edges(&d, &g, &report).unwrap() {
        Removal::TrivialSubdiagram { faces, subdiagram, boundary_word } => {
            assert_eq!(faces, vec![0, 1]);
            assert_eq!(subdiagram.area(), 2);
            assert_eq!(boundary_word.len(), 2);
            assert!(boundary_word.free_reduce().is_empty());
        }
        other => panic!("expected a trivial subdiagram, got {other:?}"),
    }
}

#[test]
fn removal_needs_c6() {
    let g = corpus::figure1();
    let mut report = check(&g, Condition::C(6), 1 << 20).unwrap();
    report.condition = Condition::C(5);
    assert!(matches!(
        remove_originating_edges(&figure1_pair(), &g, &report),
        Err(DiagramError::Precondition(_))
    ));
}

#[test]
fn fold_figure3_gives_a_tree() {
    let d = figure3_face();
    let t = fold_trivial_face(&d, 0).unwrap();
    let r = t.validate().unwrap();
    assert_eq!((r.vertices, r.edges, r.faces), (5, 4, 0));
    assert_eq!(t.boundary_word(), d.boundary_word());
}

#[test]
fn fold_rejects_nontrivial_face() {
    assert!(matches!(fold_trivial_face(&figure4_face(), 0), Err(DiagramError::Precondition(_))));
}

#[test]
fn pinch_figure4() {
    let d = figure4_face();
    let g = figure4_graph();
    assert_eq!(pinch_candidates(&d, &g, 0).unwrap(), vec![(0, 4), (1, 5), (2, 6), (3, 7)]);
    let p = pinch_vertices(&d, &g, 0, 2, 6).unwrap();
    let r = p.validate().unwrap();
    assert_eq!((r.vertices, r.edges, r.faces), (7, 8, 2));
    assert!(!r.simple);
    assert!(matches!(pinch_vertices(&d, &g, 0, 2, 5), Err(DiagramError::Precondition(_))));
}

#[test]
fn ambiguous_lift_needs_gr_mode() {
    // c c c c closes up from every vertex of the 4-cycle, all in one orbit
    let g = corpus::cayley_cycle(4, "c").unwrap();
    let a = Alphabet::new(["c"]).unwrap();
    let mut b = DiagramBuilder::new(a);
    let vs: Vec<usize> = b.vertices(4).collect();
    b.face_through(&vs, &[Some(Letter::pos(0)); 4]);
    let d = b.build(0).unwrap();
    assert!(matches!(lift_faces(&d, &g, false), Err(DiagramError::AmbiguousLift { .. })));
    let lifts = lift_faces(&d, &g, true).unwrap();
    assert_eq!(lifts[0].alternatives, vec![0, 1, 2, 3]);
}

fn commutator() -> Presentation {
    let a = Alphabet::new(["a", "b"]).unwrap();
    let r = a.parse_word("a b -a -b").unwrap();
    Presentation::from_words(a, &[r])
}

#[test]
fn derivation_of_a_single_relator() {
    let p = commutator();
    let w = p.relators[0].clone();
    let steps = [DerivationStep { position: 0, relator: 0, rotation: 0, inverted: true }];
    let d = derivation_to_diagram(&w, &steps, &p).unwrap();
    assert_eq!(d.area(), 1);
    assert_eq!(d.boundary_word(), Some(w));
    assert!(d.validate().unwrap().simple);
}

#[test]
fn derivation_of_a_square_of_commutators() {
    let p = commutator();
    let alpha = &p.alphabet;
    for s in ["a b -a -b a b -a -b", "b a b -a -b -b", "a a b -a -a -b", "a b b -a -b -b"] {
        let w = alpha.parse_word(s).unwrap();
        let (rest, steps) = dehn_greedy(&w, &p);
        if !rest.is_empty() {
            continue;
        }
        let d = derivation_to_diagram(&w, &steps, &p).unwrap();
        assert_eq!(d.area(), steps.len(), "{s}");
        assert_eq!(d.boundary_word(), Some(w.free_reduce()), "{s}");
        let f = d.canonicalize();
        assert_eq!(Diagram::from_json(&f.to_json()).unwrap(), f);
    }
}

#[test]
fn derivation_must_end_empty() {
    let p = commutator();
    let w = p.alphabet.parse_word("a").unwrap();
    assert!(derivation_to_diagram(&w, &[], &p).is_err());
}

#[test]
fn empty_word_gives_trivial_diagram() {
    let p = commutator();
    let d = derivation_to_diagram(&Word::empty(), &[], &p).unwrap();
    assert_eq!(d, Diagram::trivial(p.alphabet.clone()));
    d.validate().unwrap();
}

fn single_face(n: usize) -> Diagram {
    let mut b = DiagramBuilder::new(Alphabet::new(Vec::<String>::new()).unwrap());
    let vs: Vec<usize> = b.vertices(n).collect();
    b.face_through(&vs, &vec![None; n]);
    b.build(0).unwrap()
}

#[test]
fn heptagon_pair_curvature_is_tight() {
    let d = heptagon_pair();
    let r = d.validate().unwrap();
    assert_eq!(r.face_kinds, vec![FaceKind::Boundary; 2]);
    assert_eq!(r.arcs.iter().filter(|a| a.interior).count(), 1);
    assert!(is_pq_diagram(&d, 3, 7, false).holds);
    let c = curvature_i(&d).unwrap();
    assert_eq!((c.sum, c.satisfied), (6, true));
    let a = area_bounds(&d);
    assert!(matches!(a.linear, BoundCheck::Evaluated { bound: 96, holds: true }));
    assert!(matches!(a.quadratic, BoundCheck::Evaluated { bound: 432, holds: true }));
}

#[test]
fn single_face_edge_cases() {
    let d = single_face(7);
    assert_eq!(d.validate().unwrap().interior_edges, 0);
    assert!(matches!(curvature_i(&d), Err(DiagramError::Precondition(_))));
    assert_eq!(curvature_ii(&d).unwrap().sum, Ratio::new(7, 2));
    let f = forget_degree2(&d);
    assert_eq!((f.vertex_count(), f.edges().len(), f.faces()[0].len()), (1, 1, 1));
    f.validate().unwrap();
}

#[test]
fn lone_edge_is_tight_for_curvature_ii() {
    let mut b = DiagramBuilder::new(Alphabet::new(Vec::<String>::new()).unwrap());
    b.vertices(2);
    b.edge(0, 1, None);
    let d = b.build(0).unwrap();
    let c = curvature_ii(&d).unwrap();
    assert_eq!((c.sum, c.satisfied), (Ratio::from_integer(3), true));
}

#[test]
fn honeycomb_has_no_interior_degree2() {
    let d = honeycomb_patch();
    let f = forget_degree2(&d);
    assert_eq!(f.validate().unwrap().faces, 7);
    assert!(is_pq_diagram(&f, 3, 6, false).holds);
    assert_eq!(curvature_i(&f).unwrap().sum, 6);
}

#[test]
fn forgetting_can_expose_a_violation() {
    // a square with one chord: the chord's ends have degree 3, the rest 2
    let mut b = DiagramBuilder::new(Alphabet::new(Vec::<String>::new()).unwrap());
    b.vertices(6);
    b.face_through(&[0, 1, 2, 3], &[None; 4]);
    b.face_through(&[0, 3, 4, 5], &[None; 4]);
    let d = b.build(0).unwrap();
    let r = is_pq_diagram(&d, 3, 6, true);
    assert_eq!(r.violation, Some(PqViolation::Face { face: 0, length: 4 }));
}

#[test]
fn bigon_folds_to_one_edge() {
    let a = Alphabet::new(["a"]).unwrap();
    let mut b = DiagramBuilder::new(a);
    b.vertices(2);
    b.face_through(&[0, 1], &[Some(Letter::pos(0)), Some(Letter::neg(0))]);
    let d = b.build(0).unwrap();
    let t = fold_trivial_face(&d, 0).unwrap();
    assert_eq!((t.vertex_count(), t.edges().len(), t.area()), (2, 1, 0));
    assert_eq!(t.boundary_word(), d.boundary_word());
}

#[test]
fn nothing_originates_between_different_cells() {
    let g = corpus::figure1();
    let d = figure1_misglued();
    let report = check(&g, Condition::C(6), 1 << 20).unwrap();
    match remove_originating_edges(&d, &g, &report).unwrap() {
        Removal::Merged { diagram, removed_edges } => {
            assert!(removed_edges.is_empty());
            assert_eq!(diagram, d);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn missing_lift_is_reported() {
    let g = corpus::figure1();
    let mut b = DiagramBuilder::new(g.alphabet().clone());
    b.vertices(1);
    b.face_through(&[0], &[Some(Letter::pos(0))]);
    let d = b.build(0).unwrap();
    assert_eq!(lift_faces(&d, &g, false), Err(DiagramError::NoLift(0)));
}
