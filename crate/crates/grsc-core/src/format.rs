//! Line-oriented graph text format.
//!
//! ```text
//! alphabet a b c
//! component K1
//! v 0
//! v 1
//! e 0 1 a        # directed edge 0 → 1 labelled a
//! ```
//!
//! Vertex ids are local to the enclosing component. Vertices of later
//! components are numbered after those of earlier ones.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::alphabet::{Alphabet, AlphabetError};
use crate::graph::{Edge, GraphError, LabelledGraph, VertexId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: {source}")]
    Alphabet { line: usize, source: AlphabetError },
    #[error("component `{0}` is not connected")]
    Disconnected(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

struct PendingComponent {
    name: Option<String>,
    first_line: usize,
    // local id -> global id
    ids: BTreeMap<usize, VertexId>,
    edges: Vec<(usize, usize, u32, usize)>,
}

pub fn parse_graph(text: &str) -> Result<LabelledGraph, FormatError> {
    let mut alphabet: Option<Alphabet> = None;
    let mut comps: Vec<PendingComponent> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let toks: Vec<&str> = content.split_whitespace().collect();
        let Some((&head, rest)) = toks.split_first() else { continue };
        let syntax = |msg: &str| FormatError::Syntax { line, msg: msg.to_string() };
        match head {
            "alphabet" => {
                if alphabet.is_some() {
                    return Err(syntax("alphabet declared twice"));
                }
                alphabet = Some(
                    Alphabet::new(rest.iter().copied()).map_err(|source| FormatError::Alphabet { line, source })?,
                );
            }
            "component" => {
                if rest.len() != 1 {
                    return Err(syntax("expected `component NAME`"));
                }
                comps.push(PendingComponent {
                    name: Some(rest[0].to_string()),
                    first_line: line,
                    ids: BTreeMap::new(),
                    edges: Vec::new(),
                });
            }
            "v" | "e" => {
                if alphabet.is_none() {
                    return Err(syntax("`alphabet` must come first"));
                }
                if comps.is_empty() {
                    comps.push(PendingComponent { name: None, first_line: line, ids: BTreeMap::new(), edges: Vec::new() });
                }
                let comp = comps.last_mut().unwrap();
                let num = |t: &str| t.parse::<usize>().map_err(|_| syntax(&format!("bad vertex id `{t}`")));
                if head == "v" {
                    if rest.len() != 1 {
                        return Err(syntax("expected `v ID`"));
                    }
                    let id = num(rest[0])?;
                    if comp.ids.insert(id, 0).is_some() {
                        return Err(syntax(&format!("vertex {id} declared twice")));
                    }
                } else {
                    if rest.len() != 3 {
                        return Err(syntax("expected `e SOURCE TARGET LETTER`"));
                    }
                    let (s, t) = (num(rest[0])?, num(rest[1])?);
                    let letter = alphabet
                        .as_ref()
                        .unwrap()
                        .lookup(rest[2])
                        .ok_or_else(|| FormatError::Alphabet { line, source: AlphabetError::Unknown(rest[2].into()) })?;
                    comp.edges.push((s, t, letter, line));
                }
            }
            other => return Err(syntax(&format!("unknown directive `{other}`"))),
        }
    }
    let alphabet = alphabet.ok_or(FormatError::Syntax { line: 0, msg: "missing `alphabet` line".into() })?;
    let mut next = 0;
    let mut edges = Vec::new();
    let mut names = Vec::new();
    for comp in &mut comps {
        for g in comp.ids.values_mut() {
            *g = next;
            next += 1;
        }
        for &(s, t, letter, line) in &comp.edges {
            let look = |v: usize| {
                comp.ids.get(&v).copied().ok_or(FormatError::Syntax {
                    line,
                    msg: format!("vertex {v} not declared in this component"),
                })
            };
            edges.push(Edge { source: look(s)?, target: look(t)?, letter });
        }
        if let (Some(name), Some(&first)) = (&comp.name, comp.ids.values().next()) {
            names.push((first, name.clone()));
        }
    }
    let g = LabelledGraph::with_names(alphabet, next, edges, &names)?;
    for comp in &comps {
        let Some(&first) = comp.ids.values().next() else {
            return Err(FormatError::Syntax { line: comp.first_line, msg: "empty component".into() });
        };
        if g.components()[g.component_of(first)].vertices.len() != comp.ids.len() {
            let name = comp.name.clone().unwrap_or_else(|| "(unnamed)".into());
            return Err(FormatError::Disconnected(name));
        }
    }
    Ok(g)
}

/// Serialises a graph; edges are written under the component of their source.
pub fn write_graph(g: &LabelledGraph) -> String {
    let mut out = String::new();
    writeln!(out, "alphabet {}", g.alphabet().names().join(" ")).unwrap();
    let mut local = vec![0usize; g.vertex_count()];
    for (c, comp) in g.components().iter().enumerate() {
        writeln!(out, "component {}", g.component_name(c)).unwrap();
        for (i, &v) in comp.vertices.iter().enumerate() {
            local[v] = i;
            writeln!(out, "v {i}").unwrap();
        }
        for e in g.edges().iter().filter(|e| g.component_of(e.source) == c) {
            writeln!(out, "e {} {} {}", local[e.source], local[e.target], g.alphabet().name(e.letter)).unwrap();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO: &str = "alphabet a b\n\
        component K1\nv 0\nv 1\ne 0 1 a # comment\ne 1 0 b\n\
        component L\nv 0\ne 0 0 a\n";

    #[test]
    fn round_trip() {
        let g = parse_graph(TWO).unwrap();
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.component_name(1), "L");
        let text = write_graph(&g);
        assert_eq!(text, TWO.replace(" # comment", ""));
        assert_eq!(parse_graph(&text).unwrap(), g);
    }

    #[test]
    fn errors() {
        assert!(matches!(parse_graph("v 0"), Err(FormatError::Syntax { line: 1, .. })));
        assert!(matches!(parse_graph("alphabet a\nv 0\ne 0 1 a"), Err(FormatError::Syntax { line: 3, .. })));
        assert!(matches!(parse_graph("alphabet a\nv 0\ne 0 0 z"), Err(FormatError::Alphabet { line: 3, .. })));
        assert!(matches!(
            parse_graph("alphabet a\ncomponent K\nv 0\nv 1"),
            Err(FormatError::Disconnected(_))
        ));
    }
}
