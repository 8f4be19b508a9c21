//! Bounded-domain checks relating the semantic levels: symbolic against
//! explicit, linear against symbolic, and a composition against its
//! linearization.

mod bisim;
pub mod generate;
pub mod mutate;
mod replay;
mod report;

use std::collections::BTreeSet;
use std::time::Instant;

use indexmap::IndexSet;
use thiserror::Error;

use crate::explicit::{action_steps_in, env_steps_in, ScopedTerm};
use crate::linear::{lits, lits_static, overwrite, subseq, Lits, LocFn};
use crate::model::{
    Action, Composition, Conj, DomainSpec, EvalError, StepBindings, Universe, Valuation,
};
use crate::symbolic::{
    build_sts, locsof, symbolic_action_transitions, symbolic_env_transitions, ActionLabel, EnvLabel,
};

pub use bisim::{
    candidate_relation, check_candidate_relation, check_linearization, check_linearization_with,
    linearize_for, partition_refinement, term_graph, Partition, TermGraph,
};
pub use replay::{replay, ReplayOutcome};
pub use report::{CheckReport, Counterexample, Part, Stats, TraceStep, SCOPE};

pub const SYMBOLIC_CHECK: &str = "symbolic-explicit";
pub const LITS_CHECK: &str = "lits-symbolic";
pub const LINEARIZATION_CHECK: &str = "stateless-bisimulation";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Options {
    /// Upper bound on terms or symbolic states explored.
    pub max_states: usize,
    /// Upper bound on (state, valuation) pairs or transitions compared.
    pub max_pairs: usize,
    /// Record wall-clock time in the report statistics.
    pub timings: bool,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            max_states: 100_000,
            max_pairs: 50_000_000,
            timings: false,
        }
    }
}

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("{what} budget of {bound} exceeded")]
    Budget { what: &'static str, bound: usize },
}

pub(crate) struct Clock(Option<Instant>);

impl Clock {
    pub(crate) fn start(opts: &Options) -> Clock {
        Clock(opts.timings.then(Instant::now))
    }

    pub(crate) fn stop(self, report: &mut CheckReport) {
        report.stats.wall_ms = self.0.map(|t| t.elapsed().as_millis() as u64);
    }
}

pub(crate) fn budget(used: usize, bound: usize, what: &'static str) -> Result<(), VerifyError> {
    if used > bound {
        Err(VerifyError::Budget { what, bound })
    } else {
        Ok(())
    }
}

pub(crate) fn state_of(c: &Composition) -> Vec<Option<String>> {
    c.automata()
        .iter()
        .map(|a| a.pinned_location().map(str::to_string))
        .collect()
}

/// An explicit step with its target reduced to the pin vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) enum Step {
    Action {
        action: Action,
        sync: bool,
        target: Vec<Option<usize>>,
        post: Valuation,
    },
    Env {
        sync: BTreeSet<String>,
        target: Vec<Option<usize>>,
        post: Valuation,
    },
}

impl Step {
    pub(crate) fn label(&self) -> String {
        match self {
            Step::Action {
                action,
                sync,
                target,
                ..
            } => format!("{action}, {sync} -> {target:?}"),
            Step::Env { sync, target, .. } => {
                format!("env {} -> {target:?}", crate::symbolic::set_string(sync))
            }
        }
    }

    pub(crate) fn post(&self) -> &Valuation {
        match self {
            Step::Action { post, .. } | Step::Env { post, .. } => post,
        }
    }
}

pub(crate) fn explicit_side(
    t: &ScopedTerm,
    sigma: &Valuation,
    u: &Universe,
    all: &[Valuation],
) -> Result<IndexSet<Step>, EvalError> {
    let mut out = IndexSet::new();
    for s in action_steps_in(t, sigma, u)? {
        out.insert(Step::Action {
            action: s.action,
            sync: s.sync,
            target: s.target.composition().pins(),
            post: s.post,
        });
    }
    for s in env_steps_in(t, sigma, all)? {
        out.insert(Step::Env {
            sync: s.sync,
            target: s.target.composition().pins(),
            post: s.post,
        });
    }
    Ok(out)
}

/// Explicit steps rebuilt from symbolic transitions by the side conditions
/// of the soundness theorems.
pub(crate) fn symbolic_side(
    q: &Composition,
    sigma: &Valuation,
    u: &Universe,
    all: &[Valuation],
) -> Result<IndexSet<Step>, EvalError> {
    let mut out = IndexSet::new();
    for t in symbolic_action_transitions(q) {
        let l = &t.label;
        if !(l.init.eval(sigma)? && l.inv.eval(sigma)?) {
            continue;
        }
        let writes = l.reset.written_vars();
        for post in u.vary(sigma, |x| writes.contains(x)) {
            if l.inv_post.eval(&post)?
                && l.reset.eval(&StepBindings {
                    pre: sigma,
                    post: &post,
                })?
            {
                out.insert(Step::Action {
                    action: l.action.clone(),
                    sync: l.sync,
                    target: t.target.pins(),
                    post,
                });
            }
        }
    }
    for t in symbolic_env_transitions(q) {
        let l = &t.label;
        if !(l.init.eval(sigma)? && l.inv.eval(sigma)?) {
            continue;
        }
        for post in all {
            if l.inv.eval(post)? {
                out.insert(Step::Env {
                    sync: l.sync.clone(),
                    target: t.target.pins(),
                    post: post.clone(),
                });
            }
        }
    }
    Ok(out)
}

/// Explicit steps of `p` against those rebuilt from its symbolic
/// transitions, at every state of the pruned STS and every valuation of
/// `d`.
pub fn check_symbolic(
    p: &Composition,
    d: &DomainSpec,
    opts: &Options,
) -> Result<CheckReport, VerifyError> {
    check_symbolic_with(p, p, d, opts)
}

/// Like [`check_symbolic`], with the explicit side computed on
/// `explicit_root` and the symbolic side on `symbolic_root`. The two must
/// have the same shape; states are matched by their pin vectors.
pub fn check_symbolic_with(
    explicit_root: &Composition,
    symbolic_root: &Composition,
    d: &DomainSpec,
    opts: &Options,
) -> Result<CheckReport, VerifyError> {
    let clock = Clock::start(opts);
    let mut report = CheckReport::new(SYMBOLIC_CHECK);
    let sts = build_sts(symbolic_root, true);
    budget(sts.state_count(), opts.max_states, "state")?;
    let u = d.universe();
    let all = u.all();
    report.stats.states = sts.state_count();
    report.stats.valuations = all.len();
    'states: for q in sts.states() {
        let e = ScopedTerm::Comp(explicit_root.with_pins(&q.pins()));
        for sigma in &all {
            report.stats.pairs += 1;
            budget(report.stats.pairs, opts.max_pairs, "pair")?;
            let ex = explicit_side(&e, sigma, &u, &all)?;
            let sy = symbolic_side(q, sigma, &u, &all)?;
            let diff = ex
                .iter()
                .find(|s| !sy.contains(*s))
                .map(|s| ("explicit step has no symbolic counterpart", s))
                .or_else(|| {
                    sy.iter()
                        .find(|s| !ex.contains(*s))
                        .map(|s| ("symbolic step is not explicit", s))
                });
            if let Some((reason, s)) = diff {
                report.fail(Counterexample {
                    reason: reason.to_string(),
                    state: state_of(q),
                    terms: vec![q.state_label()],
                    sigma: Some(sigma.clone()),
                    post: Some(s.post().clone()),
                    label: s.label(),
                    trace: Vec::new(),
                });
                break 'states;
            }
        }
    }
    clock.stop(&mut report);
    Ok(report)
}

/// Symbolic transitions of one STS state rebuilt from the LiTS.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) enum SymStep {
    Action(ActionLabel, Composition),
    Env(EnvLabel, Composition),
}

impl SymStep {
    pub(crate) fn describe(&self) -> String {
        match self {
            SymStep::Action(l, t) => format!("{l} -> {}", t.state_label()),
            SymStep::Env(l, t) => format!("env {l} -> {}", t.state_label()),
        }
    }
}

/// `⋀ᵢ fᵢ(ℓᵢ)`, conjuncts in automaton order.
fn at(fns: &[LocFn], locs: &[String]) -> Conj {
    let parts: Vec<Conj> = fns
        .iter()
        .zip(locs)
        .map(|(f, l)| Conj::of(f.get(l).expect("location of the automaton")))
        .collect();
    Conj::all(&parts)
}

pub(crate) fn lits_side(q: &Composition, l: &Lits, prune: bool) -> IndexSet<SymStep> {
    let here = lits_static(q);
    let mut out = IndexSet::new();
    for i in locsof(q) {
        let u = at(&here.init, &i);
        if prune && u.has_false() {
            continue;
        }
        let n = at(&l.stat.inv, &i);
        out.insert(SymStep::Env(
            EnvLabel {
                init: u.clone(),
                inv: n.clone(),
                sync: l.stat.sync.clone(),
            },
            q.reinit(&i).expect("locsof vector"),
        ));
        for t in l.transitions.iter().filter(|t| subseq(&t.source, &i)) {
            let target = overwrite(&t.target, &i);
            let label = ActionLabel {
                action: t.action.clone(),
                sync: t.action.in_set(&l.stat.sync),
                init: u.clone(),
                inv: n.clone(),
                inv_post: at(&l.stat.inv, &target),
                reset: t.reset.clone(),
            };
            out.insert(SymStep::Action(
                label,
                q.reinit(&target).expect("locsof vector"),
            ));
        }
    }
    out
}

pub(crate) fn sts_side(q: &Composition, prune: bool) -> IndexSet<SymStep> {
    let acts = symbolic_action_transitions(q)
        .into_iter()
        .map(|t| SymStep::Action(t.label, t.target));
    let envs = symbolic_env_transitions(q)
        .into_iter()
        .map(|t| SymStep::Env(t.label, t.target));
    acts.chain(envs)
        .filter(|s| {
            let u = match s {
                SymStep::Action(l, _) => &l.init,
                SymStep::Env(l, _) => &l.init,
            };
            !(prune && u.has_false())
        })
        .collect()
}

/// Symbolic transitions of every pruned STS state against those rebuilt
/// from the LiTS of `p`.
pub fn check_lits(p: &Composition, opts: &Options) -> Result<CheckReport, VerifyError> {
    check_lits_with(p, &lits(p), opts)
}

/// Like [`check_lits`] with a given LiTS, whose action transitions, sync
/// set and invariant functions are used; initial predicate functions come
/// from each STS state.
pub fn check_lits_with(
    p: &Composition,
    l: &Lits,
    opts: &Options,
) -> Result<CheckReport, VerifyError> {
    let clock = Clock::start(opts);
    let mut report = CheckReport::new(LITS_CHECK);
    let sts = build_sts(p, true);
    budget(sts.state_count(), opts.max_states, "state")?;
    report.stats.states = sts.state_count();
    for q in sts.states() {
        let sy = sts_side(q, true);
        let li = lits_side(q, l, true);
        report.stats.pairs += sy.len();
        budget(report.stats.pairs, opts.max_pairs, "pair")?;
        let diff = sy
            .iter()
            .find(|s| !li.contains(*s))
            .map(|s| ("symbolic transition not rebuilt from the LiTS", s))
            .or_else(|| {
                li.iter()
                    .find(|s| !sy.contains(*s))
                    .map(|s| ("LiTS yields a transition the STS lacks", s))
            });
        if let Some((reason, s)) = diff {
            report.fail(Counterexample {
                reason: reason.to_string(),
                state: state_of(q),
                terms: vec![q.state_label()],
                sigma: None,
                post: None,
                label: s.describe(),
                trace: Vec::new(),
            });
            break;
        }
    }
    clock.stop(&mut report);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn gate() -> Composition {
        Composition::atom(fixtures::train_gate().automaton("Gate").unwrap().clone())
    }

    #[test]
    fn gate_symbolic_passes() {
        let m = fixtures::train_gate();
        let r = check_symbolic(&gate(), &m.domains, &Options::default()).unwrap();
        assert!(r.passed, "{r}");
        assert_eq!(r.stats.states, 3);
    }

    #[test]
    fn gate_lits_passes() {
        let r = check_lits(&gate(), &Options::default()).unwrap();
        assert!(r.passed, "{r}");
    }

    #[test]
    fn budget_is_enforced() {
        let m = fixtures::train_gate();
        let opts = Options {
            max_pairs: 10,
            ..Options::default()
        };
        assert!(matches!(
            check_symbolic(&gate(), &m.domains, &opts),
            Err(VerifyError::Budget { .. })
        ));
    }

    #[test]
    fn timings_only_on_request() {
        let m = fixtures::train_gate();
        let r = check_symbolic(&gate(), &m.domains, &Options::default()).unwrap();
        assert_eq!(r.stats.wall_ms, None);
        let r = check_symbolic(
            &gate(),
            &m.domains,
            &Options {
                timings: true,
                ..Options::default()
            },
        )
        .unwrap();
        assert!(r.stats.wall_ms.is_some());
    }
}
