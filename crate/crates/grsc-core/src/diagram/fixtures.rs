//! Small diagrams used by tests, the acceptance suite and the CLI.

use super::{Diagram, DiagramBuilder};
use crate::alphabet::Alphabet;
use crate::graph::{Edge, LabelledGraph};
use crate::word::Letter;

fn unlabelled() -> Alphabet {
    Alphabet::new(Vec::<String>::new()).unwrap()
}

fn letters(a: &Alphabet, s: &str) -> Vec<Option<Letter>> {
    a.parse_word(s).unwrap().iter().map(|&l| Some(l)).collect()
}

/// A hexagon ringed by six hexagons, unlabelled.
pub fn honeycomb_patch() -> Diagram {
    let mut b = DiagramBuilder::new(unlabelled());
    b.vertices(24);
    let c = |i: usize| i % 6;
    let o = |i: usize| 6 + i % 6;
    b.face_through(&[0, 1, 2, 3, 4, 5], &[None; 6]);
    for i in 0..6 {
        let ring = [c(i + 1), c(i), o(i), 12 + 2 * i, 13 + 2 * i, o(i + 1)];
        b.face_through(&ring, &[None; 6]);
    }
    b.build(o(0)).unwrap()
}

/// Two heptagons sharing one edge.
pub fn heptagon_pair() -> Diagram {
    let mut b = DiagramBuilder::new(unlabelled());
    b.vertices(12);
    b.face_through(&[0, 1, 2, 3, 4, 5, 6], &[None; 7]);
    b.face_through(&[1, 0, 7, 8, 9, 10, 11], &[None; 7]);
    b.build(0).unwrap()
}

/// One octagonal face with freely trivial label `a⁻¹b⁻¹cc⁻¹d⁻¹dba`.
pub fn figure3_face() -> Diagram {
    let a = Alphabet::new(["a", "b", "c", "d"]).unwrap();
    let ls = letters(&a, "-a -b c -c -d d b a");
    let mut b = DiagramBuilder::new(a);
    let vs: Vec<usize> = b.vertices(8).collect();
    b.face_through(&vs, &ls);
    b.build(0).unwrap()
}

/// One octagonal face reading `(cdab)²`.
pub fn figure4_face() -> Diagram {
    let a = Alphabet::new(["a", "b", "c", "d"]).unwrap();
    let ls = letters(&a, "c d a b c d a b");
    let mut b = DiagramBuilder::new(a);
    let vs: Vec<usize> = b.vertices(8).collect();
    b.face_through(&vs, &ls);
    b.build(0).unwrap()
}

/// The square `0 -c→ 1 -d→ 2 -a→ 3 -b→ 0` that [`figure4_face`] maps onto.
pub fn figure4_graph() -> LabelledGraph {
    let a = Alphabet::new(["a", "b", "c", "d"]).unwrap();
    let es = [(0, 1, 2), (1, 2, 3), (2, 3, 0), (3, 0, 1)];
    let edges = es.iter().map(|&(source, target, letter)| Edge { source, target, letter }).collect();
    LabelledGraph::new(a, 4, edges).unwrap()
}

/// Two copies of the relator `x1…x7` glued along `x1…x6`, mirror images
/// of each other. Over [`crate::corpus::distinct_letter_cycle`]`(7)` the
/// whole shared path originates and the pair closes up to `x7 x7⁻¹`.
pub fn mirror_pair() -> Diagram {
    let a = Alphabet::new((1..=7).map(|i| format!("x{i}"))).unwrap();
    let mut b = DiagramBuilder::new(a);
    b.vertices(7);
    let x = |i: u32| Letter::pos(i);
    let path: Vec<usize> = (0..6).map(|k| b.edge(k, k + 1, Some(x(k as u32)))).collect();
    let e7 = b.edge(6, 0, Some(x(6)));
    let e7b = b.edge(6, 0, Some(x(6)));
    use super::Dart;
    let mut f1: Vec<Dart> = path.iter().map(|&e| Dart::new(e, true)).collect();
    f1.push(Dart::new(e7, true));
    let mut f2: Vec<Dart> = path.iter().rev().map(|&e| Dart::new(e, false)).collect();
    f2.push(Dart::new(e7b, false));
    b.face(f1);
    b.face(f2);
    b.build(0).unwrap()
}

/// The two relator cells of [`crate::corpus::figure1`] glued along their
/// common `a a` path, vertices numbered as in the graph.
pub fn figure1_pair() -> Diagram {
    let a = Alphabet::new(["a", "b", "c"]).unwrap();
    let up = letters(&a, "b a b b c -a -a");
    let low = letters(&a, "a a -b -c -c -a -c");
    let mut b = DiagramBuilder::new(a);
    b.vertices(11);
    b.face_through(&[0, 1, 2, 3, 4, 6, 5], &up);
    b.face_through(&[0, 5, 6, 10, 9, 8, 7], &low);
    b.build(0).unwrap()
}

/// The same two cells glued along an `a`-edge that is not common to them
/// in the graph: `1→2` in the upper cell against `7→8` in the lower.
pub fn figure1_misglued() -> Diagram {
    let a = Alphabet::new(["a", "b", "c"]).unwrap();
    let up = letters(&a, "b a b b c -a -a");
    let low = letters(&a, "a a -b -c -c -a -c");
    let mut b = DiagramBuilder::new(a);
    let u: Vec<usize> = b.vertices(7).collect();
    b.face_through(&u, &up);
    let l: Vec<usize> = b.vertices(5).collect();
    b.face_through(&[l[0], l[1], l[2], l[3], l[4], u[2], u[1]], &low);
    b.build(0).unwrap()
}
