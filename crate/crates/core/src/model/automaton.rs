use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::predicate::Predicate;
use super::ModelError;

/// The reserved name of the silent action.
pub const TAU: &str = "tau";

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", from = "String")]
pub enum Action {
    Tau,
    Named(String),
}

impl Action {
    pub fn named(name: impl Into<String>) -> Action {
        let name = name.into();
        if name == TAU {
            Action::Tau
        } else {
            Action::Named(name)
        }
    }

    pub fn name(&self) -> &str {
        match self {
            Action::Tau => TAU,
            Action::Named(n) => n,
        }
    }

    /// Whether the action belongs to the given synchronization set. The
    /// silent action never does.
    pub fn in_set(&self, set: &BTreeSet<String>) -> bool {
        match self {
            Action::Tau => false,
            Action::Named(n) => set.contains(n),
        }
    }
}

impl From<String> for Action {
    fn from(s: String) -> Self {
        Action::named(s)
    }
}

impl From<Action> for String {
    fn from(a: Action) -> Self {
        a.name().to_string()
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Location {
    pub name: String,
    pub init: Predicate,
    pub inv: Predicate,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Edge {
    pub source: String,
    pub action: Action,
    pub reset: Predicate,
    pub target: String,
}

/// An automaton `(V, init, inv, E, actS)`.
///
/// Locations keep their declaration order. Edges are kept grouped by source
/// location (in location order), preserving their relative order otherwise;
/// this is the order in which the text format lists them.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Automaton {
    pub name: String,
    pub locations: Vec<Location>,
    pub edges: Vec<Edge>,
    pub sync: BTreeSet<String>,
}

impl Automaton {
    pub fn new(
        name: impl Into<String>,
        locations: Vec<Location>,
        mut edges: Vec<Edge>,
        sync: BTreeSet<String>,
    ) -> Result<Automaton, ModelError> {
        let name = name.into();
        let mut seen = BTreeSet::new();
        for loc in &locations {
            if !seen.insert(loc.name.as_str()) {
                return Err(ModelError::Duplicate {
                    what: "location",
                    name: loc.name.clone(),
                });
            }
        }
        if sync.contains(TAU) {
            return Err(ModelError::TauInSync);
        }
        let index_of = |l: &str| locations.iter().position(|x| x.name == l);
        for e in &edges {
            for end in [&e.source, &e.target] {
                if index_of(end).is_none() {
                    return Err(ModelError::UnknownLocation {
                        automaton: name.clone(),
                        location: end.clone(),
                    });
                }
            }
        }
        edges.sort_by_key(|e| index_of(&e.source));
        Ok(Automaton {
            name,
            locations,
            edges,
            sync,
        })
    }

    pub fn location_index(&self, name: &str) -> Option<usize> {
        self.locations.iter().position(|l| l.name == name)
    }

    pub fn location_names(&self) -> Vec<String> {
        self.locations.iter().map(|l| l.name.clone()).collect()
    }

    pub fn inv_of(&self, name: &str) -> Option<&Predicate> {
        self.locations
            .iter()
            .find(|l| l.name == name)
            .map(|l| &l.inv)
    }

    /// All predicates of the automaton: init, invariant and edge resets.
    pub fn predicates(&self) -> impl Iterator<Item = &Predicate> {
        self.locations
            .iter()
            .flat_map(|l| [&l.init, &l.inv])
            .chain(self.edges.iter().map(|e| &e.reset))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn loc(name: &str) -> Location {
        Location {
            name: name.into(),
            init: Predicate::True,
            inv: Predicate::True,
        }
    }

    fn edge(s: &str, a: &str, t: &str) -> Edge {
        Edge {
            source: s.into(),
            action: Action::named(a),
            reset: Predicate::True,
            target: t.into(),
        }
    }

    #[test]
    fn edges_are_grouped_by_source() {
        let a = Automaton::new(
            "A",
            vec![loc("X"), loc("Y")],
            vec![
                edge("Y", "a", "X"),
                edge("X", "b", "Y"),
                edge("Y", "c", "Y"),
            ],
            BTreeSet::new(),
        )
        .unwrap();
        let actions: Vec<_> = a.edges.iter().map(|e| e.action.name()).collect();
        assert_eq!(actions, ["b", "a", "c"]);
    }

    #[test]
    fn rejects_bad_automata() {
        let dup = Automaton::new("A", vec![loc("X"), loc("X")], vec![], BTreeSet::new());
        assert!(matches!(dup, Err(ModelError::Duplicate { .. })));
        let tau = Automaton::new("A", vec![loc("X")], vec![], [TAU.to_string()].into());
        assert_eq!(tau, Err(ModelError::TauInSync));
        let dangling = Automaton::new(
            "A",
            vec![loc("X")],
            vec![edge("X", "a", "Z")],
            BTreeSet::new(),
        );
        assert!(matches!(dangling, Err(ModelError::UnknownLocation { .. })));
    }

    #[test]
    fn tau_is_never_synchronizing() {
        let set: BTreeSet<String> = ["a".to_string()].into();
        assert!(!Action::Tau.in_set(&set));
        assert!(Action::named("a").in_set(&set));
        assert_eq!(Action::named("tau"), Action::Tau);
    }
}
