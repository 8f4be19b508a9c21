//! The linearization function: a composition becomes one automaton with a
//! single location, self-loop edges, and one location pointer variable per
//! original automaton.

use std::collections::BTreeSet;
use std::fmt::Write;

use serde_json::{json, Value as Json};

use crate::explicit::{ScopeVar, ScopedTerm};
use crate::linear::{lits, Lits, LocFn};
use crate::model::{
    Automaton, CmpOp, Composition, Domain, Edge, Expr, Location, Model, Predicate, Value, VarRef,
};
use crate::ts::dot_string;

/// The linear automaton of a composition and its location pointers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearizationResult {
    pub automaton: Automaton,
    /// One pointer per automaton, in automaton order.
    pub pointers: Vec<String>,
    /// Location set of each pointer's automaton, in pointer order.
    pub pointer_domains: Vec<(String, Vec<String>)>,
}

impl LinearizationResult {
    /// The unique location of the linear automaton.
    pub fn location(&self) -> &str {
        &self.automaton.locations[0].name
    }
}

/// The first `n` names `l0, l1, …` not in `reserved`, where `n` is the
/// number of automata of `p`.
pub fn fresh_pointers(p: &Composition, reserved: &BTreeSet<String>) -> Vec<String> {
    (0..)
        .map(|i| format!("l{i}"))
        .filter(|name| !reserved.contains(name))
        .take(p.automaton_count())
        .collect()
}

fn fresh_location(reserved: &BTreeSet<String>) -> String {
    if !reserved.contains("X") {
        return "X".to_string();
    }
    (0..)
        .map(|i| format!("X{i}"))
        .find(|n| !reserved.contains(n))
        .expect("unbounded candidates")
}

/// Names a composition uses: its variables and all its locations.
fn names_of(p: &Composition) -> BTreeSet<String> {
    let mut out = p.free_vars();
    for atom in p.automata() {
        out.extend(atom.automaton().location_names());
    }
    out
}

/// Linearizes `p`, naming the automaton `name`. Pointer and location names
/// avoid every name in `p` and in `reserved`.
pub fn linearize_named(
    p: &Composition,
    name: &str,
    reserved: &BTreeSet<String>,
) -> LinearizationResult {
    let mut taken = names_of(p);
    taken.extend(reserved.iter().cloned());
    let pointers = fresh_pointers(p, &taken);
    taken.extend(pointers.iter().cloned());
    let x = fresh_location(&taken);
    let l = lits(p);
    let domains: Vec<Vec<String>> = p
        .automata()
        .iter()
        .map(|a| a.automaton().location_names())
        .collect();

    let init = init_predicate(&l, &pointers, &domains);
    let inv = inv_predicate(&l, &pointers, &domains);
    let edges = l
        .transitions
        .iter()
        .map(|t| {
            let mut parts = t.reset.0.clone();
            for (i, (v, v2)) in t.source.0.iter().zip(&t.target.0).enumerate() {
                if let (Some(v), Some(v2)) = (v, v2) {
                    parts.push(Expr::var(&pointers[i]).eq(Expr::loc(v)));
                    parts.push(Expr::primed(&pointers[i]).eq(Expr::loc(v2)));
                }
            }
            Edge {
                source: x.clone(),
                action: t.action.clone(),
                reset: Predicate::conj(parts),
                target: x.clone(),
            }
        })
        .collect();
    let automaton = Automaton::new(
        name,
        vec![Location { name: x, init, inv }],
        edges,
        l.stat.sync.clone(),
    )
    .expect("linear automaton is well formed");
    let pointer_domains = pointers.iter().cloned().zip(domains).collect();
    LinearizationResult {
        automaton,
        pointers,
        pointer_domains,
    }
}

/// Linearizes `p` under the name `Linear`.
pub fn linearize(p: &Composition) -> LinearizationResult {
    linearize_named(p, "Linear", &BTreeSet::new())
}

/// Linearizes a model's root composition, keeping clear of every name the
/// model declares. The automaton takes the composition's name.
pub fn linearize_model(m: &Model) -> LinearizationResult {
    let mut reserved: BTreeSet<String> = m.domains.names().map(str::to_string).collect();
    reserved.extend(m.location_universe());
    reserved.extend(m.automata.iter().map(|a| a.name.clone()));
    let mut name = m.composition_name().to_string();
    if m.automaton(&name).is_some() {
        name = (0..)
            .map(|i| format!("{name}{i}"))
            .find(|n| m.automaton(n).is_none())
            .expect("unbounded candidates");
    }
    linearize_named(&m.root(), &name, &reserved)
}

/// `(ℓ = v ⇒ q)` without implication or negation: `ℓ = v₁ ∨ … ∨ q` over the
/// other locations `vᵢ` of the pointer's domain.
pub fn implies_at(pointer: &str, v: &str, domain: &[String], q: Predicate) -> Predicate {
    let others = domain
        .iter()
        .filter(|w| *w != v)
        .map(|w| Expr::var(pointer).eq(Expr::loc(w)));
    Predicate::disj(
        others
            .map(Some)
            .chain([None])
            .map(|p| p.unwrap_or_else(|| q.clone())),
    )
}

/// Locations on which an initial predicate function is defined: those whose
/// initial predicate is not literally `false`.
fn init_domain(f: &LocFn) -> Vec<String> {
    f.0.iter()
        .filter(|(_, p)| *p != Predicate::False)
        .map(|(l, _)| l.clone())
        .collect()
}

fn init_predicate(l: &Lits, pointers: &[String], domains: &[Vec<String>]) -> Predicate {
    let mut parts = Vec::new();
    for (i, f) in l.stat.init.iter().enumerate() {
        for v in init_domain(f) {
            let q = f.get(&v).cloned().expect("location in domain");
            parts.push(implies_at(&pointers[i], &v, &domains[i], q));
        }
    }
    for (i, f) in l.stat.init.iter().enumerate() {
        parts.push(Predicate::In(VarRef::plain(&pointers[i]), init_domain(f)));
    }
    Predicate::conj(parts)
}

fn inv_predicate(l: &Lits, pointers: &[String], domains: &[Vec<String>]) -> Predicate {
    let mut parts = Vec::new();
    for (i, g) in l.stat.inv.iter().enumerate() {
        for (v, q) in &g.0 {
            parts.push(implies_at(&pointers[i], v, &domains[i], q.clone()));
        }
    }
    Predicate::conj(parts)
}

fn scope_vars(res: &LinearizationResult, values: Option<&[String]>) -> Vec<ScopeVar> {
    res.pointer_domains
        .iter()
        .enumerate()
        .map(|(i, (name, locs))| ScopeVar {
            name: name.clone(),
            domain: locs.iter().cloned().map(Value::Loc).collect(),
            value: values.map(|v| Value::Loc(v[i].clone())),
        })
        .collect()
}

/// `|[ {ℓ⃗ ↦ ⊥} :: α_p ]|`.
pub fn scope_linearized(res: &LinearizationResult) -> ScopedTerm {
    ScopedTerm::scope(
        scope_vars(res, None),
        ScopedTerm::Comp(Composition::atom(res.automaton.clone())),
    )
}

/// `|[ {ℓ⃗ ↦ i⃗} :: α_p[x] ]|`: the linear automaton with its pointers at
/// `locations` and its single location pinned, as reached after a step.
pub fn scope_linearized_at(res: &LinearizationResult, locations: &[String]) -> ScopedTerm {
    let body = Composition::atom(res.automaton.clone()).reinit_indices(&[0]);
    ScopedTerm::scope(scope_vars(res, Some(locations)), ScopedTerm::Comp(body))
}

/// A model holding the linear automaton: the source model's domains and
/// actions plus one location domain per pointer.
pub fn to_model(res: &LinearizationResult, source: &Model) -> Model {
    let mut domains = source.domains.clone();
    for (name, locs) in &res.pointer_domains {
        domains.vars.push((name.clone(), Domain::Loc(locs.clone())));
    }
    Model {
        actions: source.actions.clone(),
        domains,
        automata: vec![res.automaton.clone()],
        composition: None,
    }
}

/// Best-effort cleanup for display: folds comparisons between literals,
/// absorbs `true`/`false` in conjunctions and disjunctions, and turns empty
/// memberships into `false`.
pub fn simplify(p: &Predicate) -> Predicate {
    match p {
        Predicate::And(l, r) => match (simplify(l), simplify(r)) {
            (Predicate::False, _) | (_, Predicate::False) => Predicate::False,
            (Predicate::True, x) | (x, Predicate::True) => x,
            (a, b) => a.and(b),
        },
        Predicate::Or(l, r) => match (simplify(l), simplify(r)) {
            (Predicate::True, _) | (_, Predicate::True) => Predicate::True,
            (Predicate::False, x) | (x, Predicate::False) => x,
            (a, b) => a.or(b),
        },
        Predicate::Cmp(Expr::Lit(a), op, Expr::Lit(b)) => {
            let holds = match op {
                CmpOp::Eq => a == b,
                CmpOp::Le => match (a, b) {
                    (Value::Int(x), Value::Int(y)) => x <= y,
                    _ => return p.clone(),
                },
            };
            if holds {
                Predicate::True
            } else {
                Predicate::False
            }
        }
        Predicate::In(_, locs) if locs.is_empty() => Predicate::False,
        other => other.clone(),
    }
}

pub fn simplify_result(res: &LinearizationResult) -> LinearizationResult {
    let mut out = res.clone();
    for loc in &mut out.automaton.locations {
        loc.init = simplify(&loc.init);
        loc.inv = simplify(&loc.inv);
    }
    for e in &mut out.automaton.edges {
        e.reset = simplify(&e.reset);
    }
    out
}

pub fn to_json(res: &LinearizationResult) -> Json {
    let loc = &res.automaton.locations[0];
    json!({
        "automaton": res.automaton.name,
        "location": loc.name,
        "pointers": res.pointers,
        "pointerDomains": res.pointer_domains.iter()
            .map(|(p, locs)| json!({"pointer": p, "locations": locs}))
            .collect::<Vec<_>>(),
        "init": loc.init.to_string(),
        "inv": loc.inv.to_string(),
        "sync": res.automaton.sync,
        "edgeCount": res.automaton.edges.len(),
        "edges": res.automaton.edges.iter()
            .map(|e| json!({"action": e.action, "r": e.reset.to_string()}))
            .collect::<Vec<_>>(),
    })
}

pub fn to_dot(res: &LinearizationResult) -> String {
    let loc = &res.automaton.locations[0];
    let mut out = String::new();
    let _ = writeln!(out, "digraph {} {{", dot_string(&res.automaton.name));
    out.push_str("  node [shape=box];\n  init [shape=point];\n  init -> x;\n");
    let _ = writeln!(
        out,
        "  x [label={}];",
        dot_string(&format!(
            "{}\ninit: {}\ninv: {}",
            loc.name, loc.init, loc.inv
        ))
    );
    for e in &res.automaton.edges {
        let _ = writeln!(
            out,
            "  x -> x [label={}];",
            dot_string(&format!("{}, {}", e.action, e.reset))
        );
    }
    out.push_str("}\n");
    out
}
