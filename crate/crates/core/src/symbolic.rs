//! Symbolic operational semantics: transitions between bare compositions,
//! with data effects carried as predicates on the labels.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use serde_json::{json, Value as Json};

use crate::model::{Action, Composition, Conj};
use crate::ts::{DotEdge, TransitionSystem};

/// `⟨p⟩ -a,b,u,n,n′,r-> ⟨p′⟩`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SymbolicActionTransition {
    pub source: Composition,
    pub label: ActionLabel,
    pub target: Composition,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ActionLabel {
    pub action: Action,
    pub sync: bool,
    /// Initial predicate `u`.
    pub init: Conj,
    /// Source invariant `n`.
    pub inv: Conj,
    /// Target invariant `n′`.
    pub inv_post: Conj,
    /// Reset predicate `r`.
    pub reset: Conj,
}

/// `⟨p⟩ ⇝u,n,A ⟨p′⟩`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SymbolicEnvTransition {
    pub source: Composition,
    pub label: EnvLabel,
    pub target: Composition,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EnvLabel {
    pub init: Conj,
    pub inv: Conj,
    pub sync: BTreeSet<String>,
}

impl fmt::Display for ActionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}, {}, u: {}, n: {}, n': {}, r: {}",
            self.action, self.sync, self.init, self.inv, self.inv_post, self.reset
        )
    }
}

impl fmt::Display for EnvLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "u: {}, n: {}, A: {}",
            self.init,
            self.inv,
            set_string(&self.sync)
        )
    }
}

pub(crate) fn set_string(set: &BTreeSet<String>) -> String {
    format!("{{{}}}", set.iter().cloned().collect::<Vec<_>>().join(", "))
}

/// All symbolic action transitions of `p`, targets only.
pub fn symbolic_action_transitions(p: &Composition) -> Vec<SymbolicActionTransition> {
    actions(p)
        .into_iter()
        .map(|(label, target)| SymbolicActionTransition {
            source: p.clone(),
            label,
            target,
        })
        .collect()
}

/// All symbolic environment transitions of `p`.
pub fn symbolic_env_transitions(p: &Composition) -> Vec<SymbolicEnvTransition> {
    envs(p)
        .into_iter()
        .map(|(label, target)| SymbolicEnvTransition {
            source: p.clone(),
            label,
            target,
        })
        .collect()
}

fn actions(p: &Composition) -> Vec<(ActionLabel, Composition)> {
    match p {
        Composition::Atom(atom) => {
            let aut = atom.automaton();
            aut.edges
                .iter()
                .map(|e| {
                    let src = aut
                        .location_index(&e.source)
                        .expect("validated edge source");
                    let tgt = aut
                        .location_index(&e.target)
                        .expect("validated edge target");
                    let label = ActionLabel {
                        action: e.action.clone(),
                        sync: e.action.in_set(&aut.sync),
                        init: Conj::of(&atom.init(src)),
                        inv: Conj::of(&aut.locations[src].inv),
                        inv_post: Conj::of(&aut.locations[tgt].inv),
                        reset: Conj::of(&e.reset),
                    };
                    (label, Composition::Atom(atom.pinned(tgt)))
                })
                .collect()
        }
        Composition::Par(l, r) => {
            let ls = actions(l);
            let rs = actions(r);
            let l_env = envs(l);
            let r_env = envs(r);
            let mut out = Vec::new();
            for (lt, l2) in &ls {
                for (re, r2) in &r_env {
                    if !lt.action.in_set(&re.sync) {
                        let label = ActionLabel {
                            action: lt.action.clone(),
                            sync: lt.sync,
                            init: lt.init.and(&re.init),
                            inv: lt.inv.and(&re.inv),
                            inv_post: lt.inv_post.and(&re.inv),
                            reset: lt.reset.clone(),
                        };
                        out.push((label, Composition::par(l2.clone(), r2.clone())));
                    }
                }
                if lt.sync {
                    for (rt, r2) in rs
                        .iter()
                        .filter(|(rt, _)| rt.sync && rt.action == lt.action)
                    {
                        let label = ActionLabel {
                            action: lt.action.clone(),
                            sync: true,
                            init: lt.init.and(&rt.init),
                            inv: lt.inv.and(&rt.inv),
                            inv_post: lt.inv_post.and(&rt.inv_post),
                            reset: lt.reset.and(&rt.reset),
                        };
                        out.push((label, Composition::par(l2.clone(), r2.clone())));
                    }
                }
            }
            for (rt, r2) in &rs {
                for (le, l2) in &l_env {
                    if !rt.action.in_set(&le.sync) {
                        let label = ActionLabel {
                            action: rt.action.clone(),
                            sync: rt.sync,
                            init: le.init.and(&rt.init),
                            inv: le.inv.and(&rt.inv),
                            inv_post: le.inv.and(&rt.inv_post),
                            reset: rt.reset.clone(),
                        };
                        out.push((label, Composition::par(l2.clone(), r2.clone())));
                    }
                }
            }
            out
        }
        Composition::Sync(set, body) => actions(body)
            .into_iter()
            .map(|(mut label, t)| {
                label.sync = label.sync || label.action.in_set(set);
                (label, Composition::Sync(set.clone(), Box::new(t)))
            })
            .collect(),
    }
}

fn envs(p: &Composition) -> Vec<(EnvLabel, Composition)> {
    match p {
        Composition::Atom(atom) => {
            let aut = atom.automaton();
            aut.locations
                .iter()
                .enumerate()
                .map(|(i, loc)| {
                    let label = EnvLabel {
                        init: Conj::of(&atom.init(i)),
                        inv: Conj::of(&loc.inv),
                        sync: aut.sync.clone(),
                    };
                    (label, Composition::Atom(atom.pinned(i)))
                })
                .collect()
        }
        Composition::Par(l, r) => {
            let ls = envs(l);
            let rs = envs(r);
            let mut out = Vec::with_capacity(ls.len() * rs.len());
            for (le, l2) in &ls {
                for (re, r2) in &rs {
                    let label = EnvLabel {
                        init: le.init.and(&re.init),
                        inv: le.inv.and(&re.inv),
                        sync: le.sync.union(&re.sync).cloned().collect(),
                    };
                    out.push((label, Composition::par(l2.clone(), r2.clone())));
                }
            }
            out
        }
        Composition::Sync(set, body) => envs(body)
            .into_iter()
            .map(|(mut label, t)| {
                label.sync.extend(set.iter().cloned());
                (label, Composition::Sync(set.clone(), Box::new(t)))
            })
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum StsLabel {
    Action(ActionLabel),
    Env(EnvLabel),
}

impl StsLabel {
    pub fn init(&self) -> &Conj {
        match self {
            StsLabel::Action(l) => &l.init,
            StsLabel::Env(l) => &l.init,
        }
    }
}

/// The symbolic transition system; state 0 is the root.
pub type Sts = TransitionSystem<Composition, StsLabel>;

/// Breadth-first exploration from `p`. With `prune`, transitions whose
/// initial predicate has a literal `false` conjunct are dropped and their
/// targets are not explored.
pub fn build_sts(p: &Composition, prune: bool) -> Sts {
    let mut sts = Sts::new();
    let (root, _) = sts.add_state(p.clone());
    sts.initial.push(root);
    let mut queue = VecDeque::from([root]);
    while let Some(i) = queue.pop_front() {
        let state = sts.state(i).clone();
        let succ = actions(&state)
            .into_iter()
            .map(|(l, t)| (StsLabel::Action(l), t))
            .chain(envs(&state).into_iter().map(|(l, t)| (StsLabel::Env(l), t)));
        for (label, target) in succ {
            if prune && label.init().has_false() {
                continue;
            }
            let (j, fresh) = sts.add_state(target);
            if fresh {
                queue.push_back(j);
            }
            sts.add_edge(i, label, j);
        }
    }
    sts
}

/// Every location vector of `p`: the product, in automaton order, of the
/// automata's location sets.
pub fn locsof(p: &Composition) -> Vec<Vec<String>> {
    let mut out = vec![vec![]];
    for atom in p.automata() {
        let names = atom.automaton().location_names();
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<String>| {
                names.iter().map(move |n| {
                    let mut v = prefix.clone();
                    v.push(n.clone());
                    v
                })
            })
            .collect();
    }
    out
}

/// Like [`locsof`], as location indices.
pub fn locsof_indices(p: &Composition) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for atom in p.automata() {
        let n = atom.automaton().locations.len();
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<usize>| {
                (0..n).map(move |i| {
                    let mut v = prefix.clone();
                    v.push(i);
                    v
                })
            })
            .collect();
    }
    out
}

pub fn sts_to_dot(sts: &Sts, name: &str) -> String {
    sts.to_dot(
        name,
        |c| c.state_label(),
        |l| match l {
            StsLabel::Action(a) => DotEdge {
                label: a.to_string(),
                dashed: false,
            },
            StsLabel::Env(e) => DotEdge {
                label: e.to_string(),
                dashed: true,
            },
        },
    )
}

pub fn sts_to_json(sts: &Sts) -> Json {
    sts.to_json(
        |c| json!({"label": c.state_label(), "term": c.to_string()}),
        |l| match l {
            StsLabel::Action(a) => json!({
                "kind": "action",
                "action": a.action,
                "sync": a.sync,
                "u": a.init.to_string(),
                "n": a.inv.to_string(),
                "nPost": a.inv_post.to_string(),
                "r": a.reset.to_string(),
            }),
            StsLabel::Env(e) => json!({
                "kind": "env",
                "u": e.init.to_string(),
                "n": e.inv.to_string(),
                "sync": e.sync,
            }),
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::{parse_model, Expr, Predicate};

    fn gate() -> Composition {
        Composition::atom(fixtures::train_gate().automaton("Gate").unwrap().clone())
    }

    #[test]
    fn gate_rq_transition() {
        let ts = symbolic_action_transitions(&gate());
        assert_eq!(ts.len(), 4);
        let rq = &ts[0];
        assert_eq!(rq.label.action, Action::named("rq"));
        assert!(rq.label.sync);
        assert_eq!(
            rq.label.init,
            Conj(vec![Expr::var("wq").eq(Expr::List(vec![]))])
        );
        assert_eq!(rq.label.inv, Conj(vec![Expr::var("n").eq(Expr::int(0))]));
        assert_eq!(rq.label.inv_post, rq.label.inv);
        assert_eq!(rq.target, gate().reinit(&["C"]).unwrap());
    }

    #[test]
    fn gate_env_transitions() {
        let ts = symbolic_env_transitions(&gate());
        assert_eq!(ts.len(), 2);
        assert_eq!(ts[1].label.init, Conj(vec![Predicate::False]));
        assert_eq!(ts[1].label.inv, Conj(vec![Expr::var("n").le(Expr::int(1))]));
        assert_eq!(ts[1].target, gate().reinit(&["O"]).unwrap());
        assert_eq!(set_string(&ts[0].label.sync), "{go, out, rq}");
    }

    #[test]
    fn no_edges_no_action_transitions() {
        let m = parse_model("automaton A { location L { initial; } }").unwrap();
        assert!(symbolic_action_transitions(&m.root()).is_empty());
        for prune in [false, true] {
            assert_eq!(build_sts(&m.root(), prune).state_count(), 2);
        }
    }

    #[test]
    fn gate_sts_states() {
        let sts = build_sts(&gate(), true);
        let labels: Vec<String> = sts.states().map(|c| c.to_string()).collect();
        assert_eq!(labels, ["Gate", "Gate[C]", "Gate[O]"]);
    }

    #[test]
    fn locsof_counts() {
        let m = fixtures::train_gate();
        assert_eq!(locsof(&m.root()).len(), 32);
        assert_eq!(
            locsof(&gate()),
            vec![vec!["C".to_string()], vec!["O".to_string()]]
        );
        assert_eq!(locsof_indices(&m.root()).len(), 32);
    }

    #[test]
    fn unpruned_sts_bounded_by_locsof() {
        let m = fixtures::train_gate();
        let sts = build_sts(&m.root(), false);
        assert!(sts.state_count() <= 1 + locsof(&m.root()).len());
    }
}
