use std::borrow::Cow;
use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use thiserror::Error;

use super::automaton::Automaton;
use super::predicate::Predicate;

/// An automaton leaf of a composition.
///
/// A freshly parsed atom uses the automaton's own initial predicates. After
/// [`Composition::reinit`] the atom is pinned to one location: its initial
/// predicate is literal `true` there and literal `false` everywhere else.
#[derive(Debug, Clone)]
pub struct Atom {
    automaton: Arc<Automaton>,
    pin: Option<usize>,
}

impl Atom {
    pub fn new(automaton: Automaton) -> Atom {
        Atom {
            automaton: Arc::new(automaton),
            pin: None,
        }
    }

    pub fn from_shared(automaton: Arc<Automaton>) -> Atom {
        Atom {
            automaton,
            pin: None,
        }
    }

    pub fn automaton(&self) -> &Automaton {
        &self.automaton
    }

    pub fn name(&self) -> &str {
        &self.automaton.name
    }

    /// Index of the location the atom is pinned to, if it was reinitialized.
    pub fn pin(&self) -> Option<usize> {
        self.pin
    }

    pub fn pinned_location(&self) -> Option<&str> {
        self.pin.map(|i| self.automaton.locations[i].name.as_str())
    }

    /// The initial predicate of the location at `index`.
    pub fn init(&self, index: usize) -> Cow<'_, Predicate> {
        match self.pin {
            Some(p) if p == index => Cow::Owned(Predicate::True),
            Some(_) => Cow::Owned(Predicate::False),
            None => Cow::Borrowed(&self.automaton.locations[index].init),
        }
    }

    pub fn pinned(&self, index: usize) -> Atom {
        Atom {
            automaton: Arc::clone(&self.automaton),
            pin: Some(index),
        }
    }

    /// The automaton with the effective initial predicates written out.
    pub fn effective(&self) -> Automaton {
        let mut a = (*self.automaton).clone();
        for (i, loc) in a.locations.iter_mut().enumerate() {
            loc.init = self.init(i).into_owned();
        }
        a
    }
}

impl PartialEq for Atom {
    fn eq(&self, other: &Self) -> bool {
        self.pin == other.pin
            && (Arc::ptr_eq(&self.automaton, &other.automaton) || self.automaton == other.automaton)
    }
}

impl Eq for Atom {}

impl Hash for Atom {
    // Automaton names are unique within a composition; hashing the name
    // keeps term hashing cheap.
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.automaton.name.hash(state);
        self.pin.hash(state);
    }
}

/// `C ::= α | C ∥ C | σ_A(C)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Composition {
    Atom(Atom),
    Par(Box<Composition>, Box<Composition>),
    Sync(BTreeSet<String>, Box<Composition>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReinitError {
    #[error("expected {expected} locations, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("automaton `{automaton}` has no location `{location}`")]
    UnknownLocation { automaton: String, location: String },
}

impl Composition {
    pub fn atom(a: Automaton) -> Composition {
        Composition::Atom(Atom::new(a))
    }

    pub fn par(l: Composition, r: Composition) -> Composition {
        Composition::Par(Box::new(l), Box::new(r))
    }

    pub fn sync<S: Into<String>>(
        actions: impl IntoIterator<Item = S>,
        body: Composition,
    ) -> Composition {
        Composition::Sync(
            actions.into_iter().map(Into::into).collect(),
            Box::new(body),
        )
    }

    /// The automata of the composition, left to right. Synchronization
    /// operators are transparent.
    pub fn automata(&self) -> Vec<&Atom> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut Vec<&'a Atom>) {
        match self {
            Composition::Atom(a) => out.push(a),
            Composition::Par(l, r) => {
                l.collect_atoms(out);
                r.collect_atoms(out);
            }
            Composition::Sync(_, body) => body.collect_atoms(out),
        }
    }

    pub fn automaton_count(&self) -> usize {
        match self {
            Composition::Atom(_) => 1,
            Composition::Par(l, r) => l.automaton_count() + r.automaton_count(),
            Composition::Sync(_, body) => body.automaton_count(),
        }
    }

    /// `p[ℓ⃗]`: pins the i-th automaton to location `locations[i]`.
    pub fn reinit<S: AsRef<str>>(&self, locations: &[S]) -> Result<Composition, ReinitError> {
        let atoms = self.automata();
        if atoms.len() != locations.len() {
            return Err(ReinitError::LengthMismatch {
                expected: atoms.len(),
                got: locations.len(),
            });
        }
        let indices = atoms
            .iter()
            .zip(locations)
            .map(|(a, l)| {
                a.automaton().location_index(l.as_ref()).ok_or_else(|| {
                    ReinitError::UnknownLocation {
                        automaton: a.name().to_string(),
                        location: l.as_ref().to_string(),
                    }
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(self.reinit_indices(&indices))
    }

    /// Like [`Composition::reinit`] with location indices; the caller
    /// guarantees lengths and ranges.
    pub fn reinit_indices(&self, indices: &[usize]) -> Composition {
        let mut it = indices.iter().copied();
        let out = self.rebuild(&mut it);
        debug_assert!(it.next().is_none());
        out
    }

    fn rebuild(&self, it: &mut impl Iterator<Item = usize>) -> Composition {
        match self {
            Composition::Atom(a) => {
                Composition::Atom(a.pinned(it.next().expect("too few locations")))
            }
            Composition::Par(l, r) => {
                let l = l.rebuild(it);
                Composition::par(l, r.rebuild(it))
            }
            Composition::Sync(set, body) => {
                Composition::Sync(set.clone(), Box::new(body.rebuild(it)))
            }
        }
    }

    /// Replaces every atom by `f(atom)`, keeping the operator structure.
    pub fn map_atoms(&self, f: &mut impl FnMut(&Atom) -> Atom) -> Composition {
        match self {
            Composition::Atom(a) => Composition::Atom(f(a)),
            Composition::Par(l, r) => {
                let l = l.map_atoms(f);
                Composition::par(l, r.map_atoms(f))
            }
            Composition::Sync(set, body) => {
                Composition::Sync(set.clone(), Box::new(body.map_atoms(f)))
            }
        }
    }

    /// The composition with the i-th automaton pinned as `pins[i]` says;
    /// `None` restores the automaton's own initial predicates.
    pub fn with_pins(&self, pins: &[Option<usize>]) -> Composition {
        let mut it = pins.iter().copied();
        self.map_atoms(&mut |a| match it.next().expect("too few pins") {
            Some(i) => a.pinned(i),
            None => Atom {
                automaton: Arc::clone(&a.automaton),
                pin: None,
            },
        })
    }

    /// Pinned location index of each automaton, `None` where unpinned.
    pub fn pins(&self) -> Vec<Option<usize>> {
        self.automata().iter().map(|a| a.pin()).collect()
    }

    /// Names of the pinned locations, if every automaton is pinned.
    pub fn pinned_locations(&self) -> Option<Vec<String>> {
        self.automata()
            .iter()
            .map(|a| a.pinned_location().map(str::to_string))
            .collect()
    }

    /// Names of all variables occurring in the composition's predicates.
    pub fn free_vars(&self) -> BTreeSet<String> {
        self.automata()
            .iter()
            .flat_map(|a| a.automaton().predicates().flat_map(|p| p.free_vars()))
            .map(|v| v.name)
            .collect()
    }

    /// Every variable some edge may write (occurs primed in a reset).
    pub fn written_vars(&self) -> BTreeSet<String> {
        self.automata()
            .iter()
            .flat_map(|a| {
                a.automaton()
                    .edges
                    .iter()
                    .flat_map(|e| e.reset.written_vars())
            })
            .collect()
    }

    /// The synchronizing actions of the composition: the union of every
    /// automaton's `actS` and every synchronization operator's set.
    pub fn sync_actions(&self) -> BTreeSet<String> {
        match self {
            Composition::Atom(a) => a.automaton().sync.clone(),
            Composition::Par(l, r) => {
                let mut s = l.sync_actions();
                s.extend(r.sync_actions());
                s
            }
            Composition::Sync(set, body) => {
                let mut s = body.sync_actions();
                s.extend(set.iter().cloned());
                s
            }
        }
    }

    /// Compact state label: `<N, F, C>` when every automaton is pinned,
    /// the composition expression otherwise.
    pub fn state_label(&self) -> String {
        match self.pinned_locations() {
            Some(locs) => format!("<{}>", locs.join(", ")),
            None => format!("<{self}>"),
        }
    }
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Composition::Atom(a) => match a.pinned_location() {
                Some(l) => write!(f, "{}[{l}]", a.name()),
                None => f.write_str(a.name()),
            },
            Composition::Par(l, r) => {
                write!(f, "{l} || ")?;
                if matches!(**r, Composition::Par(..)) {
                    write!(f, "({r})")
                } else {
                    write!(f, "{r}")
                }
            }
            Composition::Sync(set, body) => {
                let names: Vec<&str> = set.iter().map(String::as_str).collect();
                write!(f, "sync {{{}}} ", names.join(", "))?;
                if matches!(**body, Composition::Par(..)) {
                    write!(f, "({body})")
                } else {
                    write!(f, "{body}")
                }
            }
        }
    }
}
