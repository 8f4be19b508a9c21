//! Predicates, automata, compositions, finite domains and the model text
//! format.

mod automaton;
mod composition;
mod domain;
mod parse;
mod predicate;
mod print;
mod value;

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use thiserror::Error;

pub use automaton::{Action, Automaton, Edge, Location, TAU};
pub use composition::{Atom, Composition, ReinitError};
pub use domain::{Domain, DomainSpec, StepBindings, Universe, Valuation};
pub use parse::parse_model;
pub use predicate::{Bindings, CmpOp, Conj, EvalError, Expr, Predicate, VarRef};
pub use print::print_model;
pub use value::{Kind, Value};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("undeclared {what} `{name}`")]
    Undeclared { what: &'static str, name: String },
    #[error("duplicate {what} `{name}`")]
    Duplicate { what: &'static str, name: String },
    #[error("`tau` cannot be a synchronizing action")]
    TauInSync,
    #[error("automaton `{automaton}` has no location `{location}`")]
    UnknownLocation { automaton: String, location: String },
    #[error("ill-kinded predicate: {0}")]
    IllKinded(String),
    #[error("primed variable `{0}` outside a reset predicate")]
    PrimedOutsideReset(String),
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
}

/// A line/column position in model text, both 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// A model error, annotated with the position it was detected at when it
/// comes from parsing.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub pos: Option<Pos>,
    pub error: ModelError,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.pos {
            Some(p) => write!(f, "{p}: {}", self.error),
            None => write!(f, "{}", self.error),
        }
    }
}

impl From<ModelError> for ParseError {
    fn from(error: ModelError) -> Self {
        ParseError { pos: None, error }
    }
}

/// A complete model: action universe, variable domains, automata and the
/// top-level composition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    pub actions: Vec<String>,
    pub domains: DomainSpec,
    pub automata: Vec<Automaton>,
    /// Name and tree of the declared composition, if any.
    pub composition: Option<(String, Composition)>,
}

impl Model {
    /// The declared composition, or the parallel composition of all
    /// automata in declaration order when none is declared.
    pub fn root(&self) -> Composition {
        match &self.composition {
            Some((_, c)) => c.clone(),
            None => self
                .automata
                .iter()
                .cloned()
                .map(Composition::atom)
                .reduce(Composition::par)
                .expect("model without automata has no root"),
        }
    }

    pub fn composition_name(&self) -> &str {
        self.composition
            .as_ref()
            .map(|(n, _)| n.as_str())
            .unwrap_or("Main")
    }

    pub fn automaton(&self, name: &str) -> Option<&Automaton> {
        self.automata.iter().find(|a| a.name == name)
    }

    /// Every location name declared by some automaton or listed in a
    /// location domain.
    pub fn location_universe(&self) -> BTreeSet<String> {
        let mut out: BTreeSet<String> = self
            .automata
            .iter()
            .flat_map(|a| a.locations.iter().map(|l| l.name.clone()))
            .collect();
        for (_, d) in &self.domains.vars {
            collect_locs(d, &mut out);
        }
        out
    }

    /// Checks the cross-reference and kinding rules the parser enforces.
    /// Useful for models built programmatically.
    pub fn validate(&self) -> Result<(), ModelError> {
        unique("action", self.actions.iter().map(String::as_str))?;
        if self.actions.iter().any(|a| a == TAU) {
            return Err(ModelError::TauInSync);
        }
        unique("variable", self.domains.names())?;
        unique("automaton", self.automata.iter().map(|a| a.name.as_str()))?;
        let locations = self.location_universe();
        for (name, dom) in &self.domains.vars {
            if locations.contains(name) {
                return Err(ModelError::Duplicate {
                    what: "name",
                    name: name.clone(),
                });
            }
            check_domain(dom)?;
        }
        let actions: HashSet<&str> = self.actions.iter().map(String::as_str).collect();
        let kind_of = |n: &str| self.domains.kind_of(n);
        for a in &self.automata {
            for s in &a.sync {
                if s == TAU {
                    return Err(ModelError::TauInSync);
                }
                if !actions.contains(s.as_str()) {
                    return Err(ModelError::Undeclared {
                        what: "action",
                        name: s.clone(),
                    });
                }
            }
            for loc in &a.locations {
                for p in [&loc.init, &loc.inv] {
                    if let Some(v) = p.free_vars().into_iter().find(|v| v.primed) {
                        return Err(ModelError::PrimedOutsideReset(v.to_string()));
                    }
                    p.check_kinds(&kind_of).map_err(ModelError::IllKinded)?;
                }
            }
            for e in &a.edges {
                if let Action::Named(n) = &e.action {
                    if !actions.contains(n.as_str()) {
                        return Err(ModelError::Undeclared {
                            what: "action",
                            name: n.clone(),
                        });
                    }
                }
                e.reset
                    .check_kinds(&kind_of)
                    .map_err(ModelError::IllKinded)?;
            }
        }
        if let Some((_, comp)) = &self.composition {
            unique(
                "automaton in composition",
                comp.automata().iter().map(|a| a.name()),
            )?;
            for atom in comp.automata() {
                match self.automaton(atom.name()) {
                    Some(decl) if decl == atom.automaton() && atom.pin().is_none() => {}
                    _ => {
                        return Err(ModelError::Undeclared {
                            what: "automaton",
                            name: atom.name().to_string(),
                        })
                    }
                }
            }
            check_sync_sets(comp, &actions)?;
        }
        Ok(())
    }
}

fn check_sync_sets(c: &Composition, actions: &HashSet<&str>) -> Result<(), ModelError> {
    match c {
        Composition::Atom(_) => Ok(()),
        Composition::Par(l, r) => {
            check_sync_sets(l, actions)?;
            check_sync_sets(r, actions)
        }
        Composition::Sync(set, body) => {
            for a in set {
                if a == TAU {
                    return Err(ModelError::TauInSync);
                }
                if !actions.contains(a.as_str()) {
                    return Err(ModelError::Undeclared {
                        what: "action",
                        name: a.clone(),
                    });
                }
            }
            check_sync_sets(body, actions)
        }
    }
}

fn collect_locs(d: &Domain, out: &mut BTreeSet<String>) {
    match d {
        Domain::Loc(locs) => out.extend(locs.iter().cloned()),
        Domain::List { elem, .. } => collect_locs(elem, out),
        _ => {}
    }
}

fn check_domain(d: &Domain) -> Result<(), ModelError> {
    match d {
        Domain::Int { lo, hi } if lo > hi => {
            Err(ModelError::InvalidDomain(format!("empty range {lo}..{hi}")))
        }
        Domain::List { elem, .. } => check_domain(elem),
        Domain::Loc(locs) => unique("location in domain", locs.iter().map(String::as_str)),
        _ => Ok(()),
    }
}

fn unique<'a>(what: &'static str, names: impl Iterator<Item = &'a str>) -> Result<(), ModelError> {
    let mut seen = HashSet::new();
    for n in names {
        if !seen.insert(n) {
            return Err(ModelError::Duplicate {
                what,
                name: n.to_string(),
            });
        }
    }
    Ok(())
}
