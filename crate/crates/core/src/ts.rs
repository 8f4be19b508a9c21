//! A labeled graph shared by the explicit LTS, the symbolic STS and the
//! LiTS exports.

use std::fmt::Write;
use std::hash::Hash;

use indexmap::IndexSet;
use serde_json::{json, Value as Json};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TsEdge<L> {
    pub source: usize,
    pub target: usize,
    pub label: L,
}

/// States are numbered in insertion order.
#[derive(Debug, Clone)]
pub struct TransitionSystem<S, L> {
    states: IndexSet<S>,
    pub edges: Vec<TsEdge<L>>,
    pub initial: Vec<usize>,
}

impl<S, L> Default for TransitionSystem<S, L> {
    fn default() -> Self {
        TransitionSystem {
            states: IndexSet::new(),
            edges: Vec::new(),
            initial: Vec::new(),
        }
    }
}

/// How one edge is drawn in DOT output.
pub struct DotEdge {
    pub label: String,
    pub dashed: bool,
}

impl<S: Hash + Eq, L> TransitionSystem<S, L> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Index of `s`, and whether it was newly added.
    pub fn add_state(&mut self, s: S) -> (usize, bool) {
        self.states.insert_full(s)
    }

    pub fn index_of(&self, s: &S) -> Option<usize> {
        self.states.get_index_of(s)
    }

    pub fn state(&self, i: usize) -> &S {
        &self.states[i]
    }

    pub fn states(&self) -> impl ExactSizeIterator<Item = &S> {
        self.states.iter()
    }

    pub fn add_edge(&mut self, source: usize, label: L, target: usize) {
        self.edges.push(TsEdge {
            source,
            target,
            label,
        });
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn outgoing(&self, i: usize) -> impl Iterator<Item = &TsEdge<L>> {
        self.edges.iter().filter(move |e| e.source == i)
    }

    pub fn to_dot(
        &self,
        name: &str,
        state: impl Fn(&S) -> String,
        edge: impl Fn(&L) -> DotEdge,
    ) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "digraph {} {{", dot_id(name));
        out.push_str("  node [shape=box];\n");
        for &i in &self.initial {
            let _ = writeln!(out, "  init{i} [shape=point];");
            let _ = writeln!(out, "  init{i} -> s{i};");
        }
        for (i, s) in self.states.iter().enumerate() {
            let _ = writeln!(out, "  s{i} [label={}];", dot_string(&state(s)));
        }
        for e in &self.edges {
            let d = edge(&e.label);
            let style = if d.dashed { ", style=dashed" } else { "" };
            let _ = writeln!(
                out,
                "  s{} -> s{} [label={}{style}];",
                e.source,
                e.target,
                dot_string(&d.label)
            );
        }
        out.push_str("}\n");
        out
    }

    /// `{"stateCount", "initial", "states": [...], "edges": [{"source", "target", "label"}]}`.
    pub fn to_json(&self, state: impl Fn(&S) -> Json, label: impl Fn(&L) -> Json) -> Json {
        json!({
            "stateCount": self.states.len(),
            "edgeCount": self.edges.len(),
            "initial": self.initial,
            "states": self.states.iter().enumerate()
                .map(|(i, s)| json!({"id": i, "state": state(s)}))
                .collect::<Vec<_>>(),
            "edges": self.edges.iter()
                .map(|e| json!({"source": e.source, "target": e.target, "label": label(&e.label)}))
                .collect::<Vec<_>>(),
        })
    }
}

fn dot_id(name: &str) -> String {
    if !name.is_empty() && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        name.to_string()
    } else {
        dot_string(name)
    }
}

/// A double-quoted DOT string literal.
pub fn dot_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}
