//! Linear transition systems: states are location vectors with wild-cards,
//! and the composition's static data (synchronizing actions, initial and
//! invariant functions) is kept apart from its action transitions.

use std::collections::BTreeSet;
use std::fmt;

use serde_json::{json, Value as Json};
use thiserror::Error;

use crate::model::{Action, Composition, Conj, Predicate, TAU};
use crate::symbolic::set_string;
use crate::ts::{DotEdge, TransitionSystem};

/// A location vector in which `None` is the wild-card `_`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinearState(pub Vec<Option<String>>);

impl LinearState {
    pub fn wild(n: usize) -> LinearState {
        LinearState(vec![None; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &LinearState) -> LinearState {
        LinearState(self.0.iter().chain(&other.0).cloned().collect())
    }

    pub fn wild_positions(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, x)| x.is_none())
            .map(|(i, _)| i)
            .collect()
    }
}

impl fmt::Display for LinearState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<&str> = self.0.iter().map(|x| x.as_deref().unwrap_or("_")).collect();
        write!(f, "[{}]", items.join(", "))
    }
}

/// `x⃗ ⊑ y⃗`: every entry of `x⃗` is a wild-card or equals the entry of `y⃗`
/// at the same position. `false` when `x⃗` is longer than `y⃗`.
pub fn subseq(x: &LinearState, y: &[String]) -> bool {
    x.len() <= y.len()
        && x.0
            .iter()
            .zip(y)
            .all(|(a, b)| a.as_ref().is_none_or(|a| a == b))
}

/// `x⃗ ▷ y⃗`: `x⃗` with its wild-cards filled in from `y⃗`, followed by the
/// tail of `y⃗` beyond `#x⃗`. Requires `#x⃗ ≤ #y⃗`.
pub fn overwrite(x: &LinearState, y: &[String]) -> Vec<String> {
    assert!(x.len() <= y.len(), "overwrite needs #x <= #y");
    let mut out: Vec<String> =
        x.0.iter()
            .zip(y)
            .map(|(a, b)| a.clone().unwrap_or_else(|| b.clone()))
            .collect();
    out.extend(y[x.len()..].iter().cloned());
    out
}

/// A per-automaton map from locations to predicates.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LocFn(pub Vec<(String, Predicate)>);

impl LocFn {
    pub fn get(&self, loc: &str) -> Option<&Predicate> {
        self.0.iter().find(|(l, _)| l == loc).map(|(_, p)| p)
    }
}

/// The sync set, init and invariant function lists, and wild-card list of
/// a composition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LitsStatic {
    pub sync: BTreeSet<String>,
    pub init: Vec<LocFn>,
    pub inv: Vec<LocFn>,
    pub wild: LinearState,
}

pub fn lits_static(p: &Composition) -> LitsStatic {
    match p {
        Composition::Atom(atom) => {
            let aut = atom.automaton();
            LitsStatic {
                sync: aut.sync.clone(),
                init: vec![LocFn(
                    aut.locations
                        .iter()
                        .enumerate()
                        .map(|(i, l)| (l.name.clone(), atom.init(i).into_owned()))
                        .collect(),
                )],
                inv: vec![LocFn(
                    aut.locations
                        .iter()
                        .map(|l| (l.name.clone(), l.inv.clone()))
                        .collect(),
                )],
                wild: LinearState::wild(1),
            }
        }
        Composition::Par(l, r) => {
            let mut s = lits_static(l);
            let t = lits_static(r);
            s.sync.extend(t.sync);
            s.init.extend(t.init);
            s.inv.extend(t.inv);
            s.wild = s.wild.concat(&t.wild);
            s
        }
        Composition::Sync(set, body) => {
            let mut s = lits_static(body);
            s.sync.extend(set.iter().cloned());
            s
        }
    }
}

/// `p ⊨ ⟨v⃗⟩ -a,r-> ⟨v⃗′⟩`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LitsActionTransition {
    pub source: LinearState,
    pub action: Action,
    pub reset: Conj,
    pub target: LinearState,
}

impl fmt::Display for LitsActionTransition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} --{}, {}--> {}",
            self.source, self.action, self.reset, self.target
        )
    }
}

pub fn lits_action_transitions(p: &Composition) -> Vec<LitsActionTransition> {
    match p {
        Composition::Atom(atom) => atom
            .automaton()
            .edges
            .iter()
            .map(|e| LitsActionTransition {
                source: LinearState(vec![Some(e.source.clone())]),
                action: e.action.clone(),
                reset: Conj::of(&e.reset),
                target: LinearState(vec![Some(e.target.clone())]),
            })
            .collect(),
        Composition::Par(l, r) => {
            let (sl, sr) = (lits_static(l), lits_static(r));
            let (ls, rs) = (lits_action_transitions(l), lits_action_transitions(r));
            let mut out = Vec::new();
            for lt in &ls {
                if !lt.action.in_set(&sr.sync) {
                    out.push(LitsActionTransition {
                        source: lt.source.concat(&sr.wild),
                        action: lt.action.clone(),
                        reset: lt.reset.clone(),
                        target: lt.target.concat(&sr.wild),
                    });
                }
                if lt.action.in_set(&sl.sync) && lt.action.in_set(&sr.sync) {
                    for rt in rs.iter().filter(|rt| rt.action == lt.action) {
                        out.push(LitsActionTransition {
                            source: lt.source.concat(&rt.source),
                            action: lt.action.clone(),
                            reset: lt.reset.and(&rt.reset),
                            target: lt.target.concat(&rt.target),
                        });
                    }
                }
            }
            for rt in &rs {
                if !rt.action.in_set(&sl.sync) {
                    out.push(LitsActionTransition {
                        source: sl.wild.concat(&rt.source),
                        action: rt.action.clone(),
                        reset: rt.reset.clone(),
                        target: sl.wild.concat(&rt.target),
                    });
                }
            }
            out
        }
        Composition::Sync(_, body) => lits_action_transitions(body),
    }
}

/// The linear transition system of a composition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lits {
    pub composition: Composition,
    pub stat: LitsStatic,
    pub transitions: Vec<LitsActionTransition>,
}

pub fn lits(p: &Composition) -> Lits {
    Lits {
        composition: p.clone(),
        stat: lits_static(p),
        transitions: lits_action_transitions(p),
    }
}

impl Lits {
    pub fn to_ts(&self) -> TransitionSystem<LinearState, (Action, Conj)> {
        let mut ts = TransitionSystem::new();
        for t in &self.transitions {
            let (i, _) = ts.add_state(t.source.clone());
            let (j, _) = ts.add_state(t.target.clone());
            ts.add_edge(i, (t.action.clone(), t.reset.clone()), j);
        }
        ts
    }

    pub fn to_dot(&self, name: &str) -> String {
        self.to_ts().to_dot(
            name,
            |s| s.to_string(),
            |(a, r)| DotEdge {
                label: format!("{a}, {r}"),
                dashed: false,
            },
        )
    }

    pub fn to_json(&self) -> Json {
        let locfns = |fs: &[LocFn]| -> Json {
            fs.iter()
                .map(|f| {
                    f.0.iter()
                        .map(|(l, p)| (l.clone(), Json::String(p.to_string())))
                        .collect::<serde_json::Map<_, _>>()
                })
                .collect::<Vec<_>>()
                .into()
        };
        json!({
            "composition": self.composition.to_string(),
            "sync": self.stat.sync,
            "init": locfns(&self.stat.init),
            "inv": locfns(&self.stat.inv),
            "wild": self.stat.wild.to_string(),
            "transitionCount": self.transitions.len(),
            "transitions": self.transitions.iter().map(|t| json!({
                "source": t.source.to_string(),
                "action": t.action,
                "r": t.reset.to_string(),
                "target": t.target.to_string(),
            })).collect::<Vec<_>>(),
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("sync {}\n", set_string(&self.stat.sync));
        for t in &self.transitions {
            out.push_str(&t.to_string());
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SizeError {
    #[error("the size formula needs a visible action, not `tau`")]
    Silent,
    #[error("automaton `{automaton}` synchronizes on {actions} instead of exactly `{action}`")]
    AtomSync {
        automaton: String,
        actions: String,
        action: String,
    },
    #[error("synchronization operator adds `{extra}` besides `{action}`")]
    OperatorSync { extra: String, action: String },
}

/// Predicted number of LiTS action transitions when `a` is the only
/// synchronizing action: the non-`a` edges of every automaton, plus the
/// product over automata of their `a` edges.
pub fn predict_size(p: &Composition, a: &str) -> Result<usize, SizeError> {
    check_size_hypothesis(p, a)?;
    let atoms = p.automata();
    let is_a = |act: &Action| act.name() == a;
    let others: usize = atoms
        .iter()
        .map(|x| {
            x.automaton()
                .edges
                .iter()
                .filter(|e| !is_a(&e.action))
                .count()
        })
        .sum();
    let product: usize = atoms
        .iter()
        .map(|x| {
            x.automaton()
                .edges
                .iter()
                .filter(|e| is_a(&e.action))
                .count()
        })
        .product();
    Ok(others + product)
}

fn check_size_hypothesis(p: &Composition, a: &str) -> Result<(), SizeError> {
    if a == TAU {
        return Err(SizeError::Silent);
    }
    match p {
        Composition::Atom(atom) => {
            let sync = &atom.automaton().sync;
            if sync.len() == 1 && sync.contains(a) {
                Ok(())
            } else {
                Err(SizeError::AtomSync {
                    automaton: atom.name().to_string(),
                    actions: set_string(sync),
                    action: a.to_string(),
                })
            }
        }
        Composition::Par(l, r) => {
            check_size_hypothesis(l, a)?;
            check_size_hypothesis(r, a)
        }
        Composition::Sync(set, body) => {
            if let Some(extra) = set.iter().find(|x| *x != a) {
                return Err(SizeError::OperatorSync {
                    extra: extra.clone(),
                    action: a.to_string(),
                });
            }
            check_size_hypothesis(body, a)
        }
    }
}
