//! Explicit operational semantics: steps between (term, valuation) pairs,
//! with successor valuations enumerated over a finite domain.
//!
//! Internally every action step carries the set of variables written by the
//! edges that produced it. Synchronized steps union the sets of both
//! participants and interleaved steps keep the active side's set. The frame
//! condition (every variable outside the set is unchanged) is imposed where
//! a variable leaves scope: at variable-scope boundaries and at the top.
//! For a single automaton this is exactly the edge's own frame.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use indexmap::IndexSet;
use serde_json::{json, Value as Json};
use thiserror::Error;

use crate::model::{
    Action, Composition, Conj, DomainSpec, EvalError, Predicate, StepBindings, Universe, Valuation,
    Value,
};
use crate::ts::{DotEdge, TransitionSystem};

/// One variable bound by a scope; `value` is `None` for the undefined
/// value, meaning the scope has not chosen an initial value yet.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ScopeVar {
    pub name: String,
    pub domain: Vec<Value>,
    pub value: Option<Value>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VarScope {
    pub vars: Vec<ScopeVar>,
    pub body: ScopedTerm,
}

/// A composition, possibly wrapped in local-variable scopes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ScopedTerm {
    Comp(Composition),
    Scope(Box<VarScope>),
}

impl ScopedTerm {
    pub fn scope(vars: Vec<ScopeVar>, body: ScopedTerm) -> ScopedTerm {
        ScopedTerm::Scope(Box::new(VarScope { vars, body }))
    }

    pub fn as_comp(&self) -> Option<&Composition> {
        match self {
            ScopedTerm::Comp(c) => Some(c),
            ScopedTerm::Scope(_) => None,
        }
    }

    /// The innermost composition.
    pub fn composition(&self) -> &Composition {
        match self {
            ScopedTerm::Comp(c) => c,
            ScopedTerm::Scope(s) => s.body.composition(),
        }
    }

    /// Every variable occurring primed in some edge, including scope-bound
    /// ones.
    pub fn written_vars(&self) -> BTreeSet<String> {
        self.composition().written_vars()
    }

    /// Compact label: pinned location vectors for bare compositions,
    /// `|[l0=F, l1=⊥ :: body]|` for scopes.
    pub fn state_label(&self) -> String {
        match self {
            ScopedTerm::Comp(c) => c.state_label(),
            ScopedTerm::Scope(_) => self.to_string(),
        }
    }
}

impl From<Composition> for ScopedTerm {
    fn from(c: Composition) -> Self {
        ScopedTerm::Comp(c)
    }
}

impl fmt::Display for ScopedTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScopedTerm::Comp(c) => write!(f, "{c}"),
            ScopedTerm::Scope(s) => {
                f.write_str("|[")?;
                for (i, v) in s.vars.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    match &v.value {
                        Some(x) => write!(f, "{}={x}", v.name)?,
                        None => write!(f, "{}=⊥", v.name)?,
                    }
                }
                write!(f, " :: {}]|", s.body)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExplicitActionStep {
    pub action: Action,
    pub sync: bool,
    pub target: ScopedTerm,
    pub post: Valuation,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExplicitEnvStep {
    pub sync: BTreeSet<String>,
    pub target: ScopedTerm,
    pub post: Valuation,
}

struct RawAct<T> {
    action: Action,
    sync: bool,
    target: T,
    post: Valuation,
    writes: BTreeSet<String>,
}

/// All action steps of `(t, σ)` with successor valuations drawn from `d`.
pub fn action_steps(
    t: &ScopedTerm,
    sigma: &Valuation,
    d: &DomainSpec,
) -> Result<Vec<ExplicitActionStep>, EvalError> {
    action_steps_in(t, sigma, &d.universe())
}

/// Like [`action_steps`] over a precomputed universe.
pub fn action_steps_in(
    t: &ScopedTerm,
    sigma: &Valuation,
    u: &Universe,
) -> Result<Vec<ExplicitActionStep>, EvalError> {
    let mut out = IndexSet::new();
    for s in scoped_actions(t, sigma, u)? {
        if s.post.agrees_outside(sigma, &s.writes) {
            out.insert(ExplicitActionStep {
                action: s.action,
                sync: s.sync,
                target: s.target,
                post: s.post,
            });
        }
    }
    Ok(out.into_iter().collect())
}

/// All environment steps of `(t, σ)` with successor valuations drawn from `d`.
pub fn env_steps(
    t: &ScopedTerm,
    sigma: &Valuation,
    d: &DomainSpec,
) -> Result<Vec<ExplicitEnvStep>, EvalError> {
    env_steps_in(t, sigma, &d.universe().all())
}

/// Like [`env_steps`] over a precomputed list of candidate successors.
pub fn env_steps_in(
    t: &ScopedTerm,
    sigma: &Valuation,
    posts: &[Valuation],
) -> Result<Vec<ExplicitEnvStep>, EvalError> {
    let cands = scoped_env_from(t, sigma)?;
    let mut out = IndexSet::new();
    for post in posts {
        for e in &cands {
            if e.admits(post)? {
                out.insert(ExplicitEnvStep {
                    sync: e.sync.clone(),
                    target: e.target.clone(),
                    post: post.clone(),
                });
            }
        }
    }
    Ok(out.into_iter().collect())
}

/// Environment steps from `σ` to the given `σ′`.
pub fn env_steps_to(
    t: &ScopedTerm,
    sigma: &Valuation,
    post: &Valuation,
) -> Result<Vec<(BTreeSet<String>, ScopedTerm)>, EvalError> {
    scoped_env_to(t, sigma, post)
}

/// Every concrete binding vector of a scope: fixed values stay, undefined
/// ones range over their domain.
fn bindings(vars: &[ScopeVar]) -> Vec<Vec<Value>> {
    let mut out = vec![vec![]];
    for v in vars {
        let choices = match &v.value {
            Some(x) => vec![x.clone()],
            None => v.domain.clone(),
        };
        out = out
            .into_iter()
            .flat_map(|prefix| {
                choices.iter().map(move |c| {
                    let mut p = prefix.clone();
                    p.push(c.clone());
                    p
                })
            })
            .collect();
    }
    out
}

fn bind(sigma: &Valuation, vars: &[ScopeVar], values: &[Value]) -> Valuation {
    let mut inner = sigma.clone();
    for (v, x) in vars.iter().zip(values) {
        inner.set(v.name.clone(), x.clone());
    }
    inner
}

fn rebind(vars: &[ScopeVar], values: &[Value]) -> Vec<ScopeVar> {
    vars.iter()
        .zip(values)
        .map(|(v, x)| ScopeVar {
            name: v.name.clone(),
            domain: v.domain.clone(),
            value: Some(x.clone()),
        })
        .collect()
}

fn scoped_actions(
    t: &ScopedTerm,
    sigma: &Valuation,
    u: &Universe,
) -> Result<Vec<RawAct<ScopedTerm>>, EvalError> {
    match t {
        ScopedTerm::Comp(c) => Ok(comp_actions(c, sigma, u, &BTreeSet::new())?
            .into_iter()
            .map(|s| RawAct {
                action: s.action,
                sync: s.sync,
                target: ScopedTerm::Comp(s.target),
                post: s.post,
                writes: s.writes,
            })
            .collect()),
        ScopedTerm::Scope(s) => {
            let mut inner_u = u.clone();
            for v in &s.vars {
                inner_u = inner_u.with(&v.name, v.domain.clone());
            }
            let mut out = Vec::new();
            for values in bindings(&s.vars) {
                let inner = bind(sigma, &s.vars, &values);
                for step in scoped_actions(&s.body, &inner, &inner_u)? {
                    // Scope-local frame: unwritten locals keep their value.
                    let framed = s.vars.iter().zip(&values).all(|(v, x)| {
                        step.writes.contains(&v.name) || step.post.get(&v.name) == Some(x)
                    });
                    if !framed {
                        continue;
                    }
                    let new_values: Vec<Value> = s
                        .vars
                        .iter()
                        .map(|v| {
                            step.post
                                .get(&v.name)
                                .cloned()
                                .expect("scope variable in post")
                        })
                        .collect();
                    let names = s.vars.iter().map(|v| v.name.as_str());
                    let mut writes = step.writes;
                    for v in &s.vars {
                        writes.remove(&v.name);
                    }
                    out.push(RawAct {
                        action: step.action,
                        sync: step.sync,
                        target: ScopedTerm::scope(rebind(&s.vars, &new_values), step.target),
                        post: step.post.without(names),
                        writes,
                    });
                }
            }
            Ok(out)
        }
    }
}

/// An environment step enabled at σ: its synchronizing actions, its
/// target, the invariants σ′ must satisfy, and the scope-local values under
/// which σ′ is read.
struct EnvCand<'a, T> {
    sync: BTreeSet<String>,
    target: T,
    invs: Vec<&'a Predicate>,
    locals: Vec<(&'a str, Value)>,
}

impl<T> EnvCand<'_, T> {
    fn admits(&self, post: &Valuation) -> Result<bool, EvalError> {
        let bound;
        let post = if self.locals.is_empty() {
            post
        } else {
            let mut b = post.clone();
            for (name, v) in &self.locals {
                b.set(*name, v.clone());
            }
            bound = b;
            &bound
        };
        for inv in &self.invs {
            if !inv.eval(post)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn scoped_env_from<'a>(
    t: &'a ScopedTerm,
    sigma: &Valuation,
) -> Result<Vec<EnvCand<'a, ScopedTerm>>, EvalError> {
    match t {
        ScopedTerm::Comp(c) => Ok(comp_env_from(c, sigma)?
            .into_iter()
            .map(|e| EnvCand {
                sync: e.sync,
                target: ScopedTerm::Comp(e.target),
                invs: e.invs,
                locals: e.locals,
            })
            .collect()),
        ScopedTerm::Scope(s) => {
            let mut out = Vec::new();
            for values in bindings(&s.vars) {
                // Locals are not touched by the environment.
                let inner = bind(sigma, &s.vars, &values);
                for e in scoped_env_from(&s.body, &inner)? {
                    let mut locals: Vec<(&str, Value)> = s
                        .vars
                        .iter()
                        .map(|v| v.name.as_str())
                        .zip(values.iter().cloned())
                        .collect();
                    locals.extend(e.locals);
                    out.push(EnvCand {
                        sync: e.sync,
                        target: ScopedTerm::scope(rebind(&s.vars, &values), e.target),
                        invs: e.invs,
                        locals,
                    });
                }
            }
            Ok(out)
        }
    }
}

fn scoped_env_to(
    t: &ScopedTerm,
    sigma: &Valuation,
    post: &Valuation,
) -> Result<Vec<(BTreeSet<String>, ScopedTerm)>, EvalError> {
    let mut out = Vec::new();
    for e in scoped_env_from(t, sigma)? {
        if e.admits(post)? {
            out.push((e.sync, e.target));
        }
    }
    Ok(out)
}

/// The conjuncts of `r` without primed variables, at `σ`. Checking them
/// first only prunes successor enumeration.
fn guard_holds(r: &Predicate, sigma: &Valuation) -> Result<bool, EvalError> {
    for c in Conj::of(r).0 {
        if c.written_vars().is_empty() && !c.eval(sigma)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `extra` holds the variables that a synchronization partner outside `c`
/// may write; successor valuations of `c`'s edges vary over those as well.
fn comp_actions(
    c: &Composition,
    sigma: &Valuation,
    u: &Universe,
    extra: &BTreeSet<String>,
) -> Result<Vec<RawAct<Composition>>, EvalError> {
    match c {
        Composition::Atom(atom) => {
            let aut = atom.automaton();
            let mut out = Vec::new();
            for (i, loc) in aut.locations.iter().enumerate() {
                if !(atom.init(i).eval(sigma)? && loc.inv.eval(sigma)?) {
                    continue;
                }
                for e in aut.edges.iter().filter(|e| e.source == loc.name) {
                    if !guard_holds(&e.reset, sigma)? {
                        continue;
                    }
                    let target = aut
                        .location_index(&e.target)
                        .expect("validated edge target");
                    let writes = e.reset.written_vars();
                    let target_inv = &aut.locations[target].inv;
                    for post in u.vary(sigma, |x| writes.contains(x) || extra.contains(x)) {
                        if target_inv.eval(&post)?
                            && e.reset.eval(&StepBindings {
                                pre: sigma,
                                post: &post,
                            })?
                        {
                            out.push(RawAct {
                                action: e.action.clone(),
                                sync: e.action.in_set(&aut.sync),
                                target: Composition::Atom(atom.pinned(target)),
                                post,
                                writes: writes.clone(),
                            });
                        }
                    }
                }
            }
            Ok(out)
        }
        Composition::Par(p, q) => {
            let mut extra_p = extra.clone();
            extra_p.extend(q.written_vars());
            let mut extra_q = extra.clone();
            extra_q.extend(p.written_vars());
            let ps = comp_actions(p, sigma, u, &extra_p)?;
            let qs = comp_actions(q, sigma, u, &extra_q)?;

            let mut q_sync: HashMap<(&Action, &Valuation), Vec<usize>> = HashMap::new();
            for (j, s) in qs.iter().enumerate() {
                if s.sync {
                    q_sync.entry((&s.action, &s.post)).or_default().push(j);
                }
            }
            let mut out = Vec::new();
            let q_env = comp_env_from(q, sigma)?;
            for s in &ps {
                for e in &q_env {
                    if !s.action.in_set(&e.sync) && e.admits(&s.post)? {
                        out.push(RawAct {
                            action: s.action.clone(),
                            sync: s.sync,
                            target: Composition::par(s.target.clone(), e.target.clone()),
                            post: s.post.clone(),
                            writes: s.writes.clone(),
                        });
                    }
                }
                if s.sync {
                    for &j in q_sync.get(&(&s.action, &s.post)).into_iter().flatten() {
                        let t = &qs[j];
                        out.push(RawAct {
                            action: s.action.clone(),
                            sync: true,
                            target: Composition::par(s.target.clone(), t.target.clone()),
                            post: s.post.clone(),
                            writes: s.writes.union(&t.writes).cloned().collect(),
                        });
                    }
                }
            }
            let p_env = comp_env_from(p, sigma)?;
            for t in &qs {
                for e in &p_env {
                    if !t.action.in_set(&e.sync) && e.admits(&t.post)? {
                        out.push(RawAct {
                            action: t.action.clone(),
                            sync: t.sync,
                            target: Composition::par(e.target.clone(), t.target.clone()),
                            post: t.post.clone(),
                            writes: t.writes.clone(),
                        });
                    }
                }
            }
            Ok(out)
        }
        Composition::Sync(set, body) => Ok(comp_actions(body, sigma, u, extra)?
            .into_iter()
            .map(|s| RawAct {
                sync: s.sync || s.action.in_set(set),
                target: Composition::Sync(set.clone(), Box::new(s.target)),
                ..s
            })
            .collect()),
    }
}

fn comp_env_from<'a>(
    c: &'a Composition,
    sigma: &Valuation,
) -> Result<Vec<EnvCand<'a, Composition>>, EvalError> {
    match c {
        Composition::Atom(atom) => {
            let aut = atom.automaton();
            let mut out = Vec::new();
            for (i, loc) in aut.locations.iter().enumerate() {
                if atom.init(i).eval(sigma)? && loc.inv.eval(sigma)? {
                    out.push(EnvCand {
                        sync: aut.sync.clone(),
                        target: Composition::Atom(atom.pinned(i)),
                        invs: vec![&loc.inv],
                        locals: Vec::new(),
                    });
                }
            }
            Ok(out)
        }
        Composition::Par(p, q) => {
            let ps = comp_env_from(p, sigma)?;
            if ps.is_empty() {
                return Ok(ps);
            }
            let qs = comp_env_from(q, sigma)?;
            let mut out = Vec::with_capacity(ps.len() * qs.len());
            for a in &ps {
                for b in &qs {
                    out.push(EnvCand {
                        sync: a.sync.union(&b.sync).cloned().collect(),
                        target: Composition::par(a.target.clone(), b.target.clone()),
                        invs: a.invs.iter().chain(&b.invs).copied().collect(),
                        locals: Vec::new(),
                    });
                }
            }
            Ok(out)
        }
        Composition::Sync(set, body) => Ok(comp_env_from(body, sigma)?
            .into_iter()
            .map(|mut e| {
                e.sync.extend(set.iter().cloned());
                e.target = Composition::Sync(set.clone(), Box::new(e.target));
                e
            })
            .collect()),
    }
}

/// A state of the explicit transition system.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExplicitState {
    pub term: ScopedTerm,
    pub valuation: Valuation,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ExplicitLabel {
    Action { action: Action, sync: bool },
    Env(BTreeSet<String>),
}

impl fmt::Display for ExplicitLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExplicitLabel::Action { action, sync } => write!(f, "{action}, {sync}"),
            ExplicitLabel::Env(set) => write!(
                f,
                "{{{}}}",
                set.iter().cloned().collect::<Vec<_>>().join(", ")
            ),
        }
    }
}

pub type ExplicitLts = TransitionSystem<ExplicitState, ExplicitLabel>;

#[derive(Debug, Error)]
pub enum LtsError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("state budget of {bound} exceeded")]
    BudgetExceeded {
        bound: usize,
        partial: Box<ExplicitLts>,
    },
}

/// Breadth-first closure of both step relations from `(t, σ₀)` for every
/// given initial valuation.
pub fn explicit_lts(
    t: &ScopedTerm,
    initial: &[Valuation],
    d: &DomainSpec,
    bound: usize,
) -> Result<ExplicitLts, LtsError> {
    let u = d.universe();
    let posts = u.all();
    let mut ts = ExplicitLts::new();
    let mut queue = VecDeque::new();
    for sigma in initial {
        let (i, fresh) = ts.add_state(ExplicitState {
            term: t.clone(),
            valuation: sigma.clone(),
        });
        ts.initial.push(i);
        if fresh {
            queue.push_back(i);
        }
    }
    while let Some(i) = queue.pop_front() {
        let state = ts.state(i).clone();
        let mut succ = Vec::new();
        for s in action_steps_in(&state.term, &state.valuation, &u)? {
            succ.push((
                ExplicitLabel::Action {
                    action: s.action,
                    sync: s.sync,
                },
                s.target,
                s.post,
            ));
        }
        for s in env_steps_in(&state.term, &state.valuation, &posts)? {
            succ.push((ExplicitLabel::Env(s.sync), s.target, s.post));
        }
        for (label, term, valuation) in succ {
            let (j, fresh) = ts.add_state(ExplicitState { term, valuation });
            if fresh {
                if ts.state_count() > bound {
                    return Err(LtsError::BudgetExceeded {
                        bound,
                        partial: Box::new(ts),
                    });
                }
                queue.push_back(j);
            }
            ts.add_edge(i, label, j);
        }
    }
    Ok(ts)
}

/// DOT rendering: environment steps dashed.
pub fn lts_to_dot(ts: &ExplicitLts, name: &str) -> String {
    ts.to_dot(
        name,
        |s| format!("{} {}", s.term.state_label(), s.valuation),
        |l| DotEdge {
            label: l.to_string(),
            dashed: matches!(l, ExplicitLabel::Env(_)),
        },
    )
}

pub fn lts_to_json(ts: &ExplicitLts) -> Json {
    ts.to_json(
        |s| json!({"term": s.term.to_string(), "valuation": s.valuation}),
        |l| match l {
            ExplicitLabel::Action { action, sync } => {
                json!({"kind": "action", "action": action, "sync": sync})
            }
            ExplicitLabel::Env(set) => json!({"kind": "env", "sync": set}),
        },
    )
}

/// Valuations admitting some environment step of `t`, i.e. the states from
/// which the term can start.
pub fn initial_valuations(t: &ScopedTerm, d: &DomainSpec) -> Result<Vec<Valuation>, EvalError> {
    let all = d.universe().all();
    let mut out = Vec::new();
    for sigma in &all {
        if !scoped_env_to(t, sigma, sigma)?.is_empty() {
            out.push(sigma.clone());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::{parse_model, Model};

    fn val(pairs: &[(&str, Value)]) -> Valuation {
        Valuation(
            pairs
                .iter()
                .map(|(k, v)| (k.to_string(), v.clone()))
                .collect(),
        )
    }

    fn sigma0() -> Valuation {
        val(&[
            ("n", Value::Int(0)),
            ("wq", Value::List(vec![])),
            ("id", Value::Int(0)),
            ("p", Value::Int(0)),
        ])
    }

    fn gate(m: &Model) -> ScopedTerm {
        ScopedTerm::Comp(Composition::atom(m.automaton("Gate").unwrap().clone()))
    }

    #[test]
    fn gate_rq_step_enqueues() {
        let m = fixtures::train_gate();
        let steps = action_steps(&gate(&m), &sigma0(), &m.domains).unwrap();
        let gate_c = ScopedTerm::Comp(
            Composition::atom(m.automaton("Gate").unwrap().clone())
                .reinit(&["C"])
                .unwrap(),
        );
        let mut expected = sigma0();
        expected.set("wq", Value::List(vec![Value::Int(1)]));
        expected.set("id", Value::Int(1));
        assert!(steps.contains(&ExplicitActionStep {
            action: Action::named("rq"),
            sync: true,
            target: gate_c,
            post: expected,
        }));
        // Frame: only wq and id may change.
        assert!(steps
            .iter()
            .all(|s| s.post.get("n") == Some(&Value::Int(0))
                && s.post.get("p") == Some(&Value::Int(0))));
    }

    #[test]
    fn false_init_has_no_steps() {
        let m = parse_model("actions a; automaton A { location L { edge a goto L; } }").unwrap();
        let t = ScopedTerm::Comp(m.root());
        assert!(action_steps(&t, &Valuation::default(), &m.domains)
            .unwrap()
            .is_empty());
        assert!(env_steps(&t, &Valuation::default(), &m.domains)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn gate_env_steps() {
        let m = fixtures::train_gate();
        let steps = env_steps(&gate(&m), &sigma0(), &m.domains).unwrap();
        let with_n0 = m
            .domains
            .universe()
            .all()
            .into_iter()
            .filter(|s| s.get("n") == Some(&Value::Int(0)))
            .count();
        assert_eq!(steps.len(), with_n0);
        assert!(steps.iter().all(|s| s.target.state_label() == "<C>"));
        let mut queued = sigma0();
        queued.set("wq", Value::List(vec![Value::Int(0)]));
        assert!(env_steps(&gate(&m), &queued, &m.domains)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn train_gate_initially_only_requests() {
        let m = fixtures::train_gate();
        let t = ScopedTerm::Comp(m.root());
        let steps = action_steps(&t, &sigma0(), &m.domains).unwrap();
        assert!(!steps.is_empty());
        assert!(steps
            .iter()
            .all(|s| s.action == Action::named("rq") && s.sync));
        let envs = env_steps(&t, &sigma0(), &m.domains).unwrap();
        assert!(!envs.is_empty());
        let all: BTreeSet<String> = ["rq", "go", "out"].iter().map(|s| s.to_string()).collect();
        assert!(envs.iter().all(|s| s.sync == all));
    }

    #[test]
    fn single_location_lts() {
        let m = parse_model("automaton A { location L { initial; } }").unwrap();
        let t = ScopedTerm::Comp(m.root());
        let ts = explicit_lts(&t, &[Valuation::default()], &m.domains, 10).unwrap();
        // The root and its reinitialization.
        assert_eq!(ts.state_count(), 2);
        assert!(ts
            .edges
            .iter()
            .all(|e| matches!(e.label, ExplicitLabel::Env(_))));
    }

    #[test]
    fn budget_is_reported_with_partial_system() {
        let m = fixtures::train_gate();
        let t = ScopedTerm::Comp(m.root());
        match explicit_lts(&t, &[sigma0()], &m.domains, 5) {
            Err(LtsError::BudgetExceeded { partial, .. }) => assert!(partial.state_count() > 5),
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn scope_env_keeps_locals() {
        let m = parse_model(
            "domain l : loc {L, M}; actions a; automaton A { location L { initial; edge a when l' == M goto L; } location M { } }",
        )
        .unwrap();
        let body = ScopedTerm::Comp(Composition::atom(m.automaton("A").unwrap().clone()));
        let d = crate::model::DomainSpec::default();
        let scoped = ScopedTerm::scope(
            vec![ScopeVar {
                name: "l".into(),
                domain: vec![Value::Loc("L".into()), Value::Loc("M".into())],
                value: None,
            }],
            body,
        );
        let envs = env_steps(&scoped, &Valuation::default(), &d).unwrap();
        assert_eq!(envs.len(), 2);
        let acts = action_steps(&scoped, &Valuation::default(), &d).unwrap();
        // From either initial value the edge sets l to M.
        assert_eq!(acts.len(), 1);
        assert!(acts[0].target.to_string().contains("l=M"));
    }
}
