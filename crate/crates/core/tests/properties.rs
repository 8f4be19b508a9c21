use std::collections::{BTreeMap, BTreeSet, HashSet};

use proptest::prelude::*;

use cif_lin::explicit::{
    action_steps_in, env_steps_in, ExplicitActionStep, ScopeVar, ScopedTerm, VarScope,
};
use cif_lin::linear::{lits_action_transitions, overwrite, predict_size, subseq, LinearState};
use cif_lin::linearize::linearize;
use cif_lin::model::{
    parse_model, print_model, CmpOp, Composition, Conj, Expr, Model, Predicate, Valuation, Value,
};
use cif_lin::symbolic::{build_sts, locsof};
use cif_lin::verify::generate::{random_model, GenParams};
use cif_lin::verify::{check_linearization, Options};

fn params() -> impl Strategy<Value = GenParams> {
    (1usize..=3, 0usize..=2, 2i64..=3, any::<bool>()).prop_map(
        |(automata, vars, domain_size, sync_operators)| GenParams {
            automata,
            vars,
            domain_size,
            sync_operators,
            ..GenParams::default()
        },
    )
}

fn model() -> impl Strategy<Value = Model> {
    (any::<u64>(), params()).prop_map(|(seed, p)| random_model(seed, &p))
}

/// A model and one valuation of its universe.
fn model_and_valuation() -> impl Strategy<Value = (Model, Valuation)> {
    (model(), any::<prop::sample::Index>()).prop_map(|(m, i)| {
        let all = m.domains.universe().all();
        let sigma = all[i.index(all.len())].clone();
        (m, sigma)
    })
}

fn leaf() -> impl Strategy<Value = Predicate> {
    let operand = prop_oneof![
        prop::sample::select(vec!["v0", "v1"]).prop_map(Expr::var),
        (0i64..3).prop_map(Expr::int),
    ];
    prop_oneof![
        Just(Predicate::True),
        Just(Predicate::False),
        (
            operand.clone(),
            prop::sample::select(vec![CmpOp::Eq, CmpOp::Le]),
            operand
        )
            .prop_map(|(l, op, r)| Predicate::Cmp(l, op, r)),
    ]
}

fn predicate() -> impl Strategy<Value = Predicate> {
    leaf().prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.and(b)),
            (inner.clone(), inner).prop_map(|(a, b)| a.or(b)),
        ]
    })
}

fn valuation() -> impl Strategy<Value = Valuation> {
    (0i64..3, 0i64..3).prop_map(|(a, b)| {
        Valuation(BTreeMap::from([
            ("v0".to_string(), Value::Int(a)),
            ("v1".to_string(), Value::Int(b)),
        ]))
    })
}

fn linear_pair() -> impl Strategy<Value = (LinearState, Vec<String>)> {
    let loc = prop::sample::select(vec!["A", "B", "C"]).prop_map(String::from);
    (1usize..5).prop_flat_map(move |n| {
        (
            prop::collection::vec(prop::option::of(loc.clone()), n).prop_map(LinearState),
            prop::collection::vec(loc.clone(), n),
        )
    })
}

fn first_atom(m: &Model) -> Composition {
    Composition::atom(m.automata[0].clone())
}

fn steps(t: &ScopedTerm, sigma: &Valuation, m: &Model) -> Vec<ExplicitActionStep> {
    action_steps_in(t, sigma, &m.domains.universe()).expect("generated models evaluate")
}

fn comp(t: &ScopedTerm) -> &Composition {
    match t {
        ScopedTerm::Comp(c) => c,
        ScopedTerm::Scope(_) => panic!("expected a composition"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn printed_models_reparse(m in model()) {
        let text = print_model(&m);
        prop_assert_eq!(parse_model(&text).unwrap(), m);
    }

    #[test]
    fn evaluation_is_homomorphic(p in predicate(), q in predicate(), s in valuation()) {
        let (a, b) = (p.eval(&s).unwrap(), q.eval(&s).unwrap());
        prop_assert_eq!(p.clone().and(q.clone()).eval(&s).unwrap(), a && b);
        prop_assert_eq!(p.or(q).eval(&s).unwrap(), a || b);
    }

    #[test]
    fn free_variables_of_a_conjunction(p in predicate(), q in predicate()) {
        let union: BTreeSet<_> = p.free_vars().union(&q.free_vars()).cloned().collect();
        prop_assert_eq!(p.and(q).free_vars(), union);
    }

    #[test]
    fn reinit_changes_only_initial_predicates(m in model(), pick in any::<prop::sample::Index>()) {
        let p = m.root();
        let all = locsof(&p);
        let locs = &all[pick.index(all.len())];
        let q = p.reinit(locs).unwrap();
        let (before, after) = (p.automata(), q.automata());
        prop_assert_eq!(before.len(), after.len());
        for (a, b) in before.iter().zip(&after) {
            prop_assert_eq!(a.name(), b.name());
            let (x, y) = (a.effective(), b.effective());
            prop_assert_eq!(&x.edges, &y.edges);
            prop_assert_eq!(&x.sync, &y.sync);
            let invs = |a: &cif_lin::model::Automaton| a.locations.iter().map(|l| l.inv.clone()).collect::<Vec<_>>();
            prop_assert_eq!(invs(&x), invs(&y));
        }
    }

    #[test]
    fn atom_steps_respect_the_frame((m, sigma) in model_and_valuation()) {
        let a = first_atom(&m);
        let aut = m.automata[0].clone();
        for s in steps(&ScopedTerm::Comp(a), &sigma, &m) {
            let framed = aut.edges.iter().any(|e| {
                e.action == s.action && s.post.agrees_outside(&sigma, &e.reset.written_vars())
            });
            prop_assert!(framed, "{} to {}", s.action, s.post);
        }
    }

    #[test]
    fn atom_env_steps_keep_the_invariant((m, sigma) in model_and_valuation()) {
        let a = first_atom(&m);
        let all = m.domains.universe().all();
        for s in env_steps_in(&ScopedTerm::Comp(a), &sigma, &all).unwrap() {
            let target = comp(&s.target).automata()[0].pinned_location().map(String::from);
            let loc = m.automata[0].locations.iter().find(|l| Some(&l.name) == target.as_ref()).unwrap();
            prop_assert!(loc.inv.eval(&sigma).unwrap());
            prop_assert!(loc.inv.eval(&s.post).unwrap());
        }
    }

    #[test]
    fn synchronization_only_adds((m, sigma) in model_and_valuation(), mask in any::<u8>()) {
        let p = m.root();
        let set: BTreeSet<String> = m.actions.iter().enumerate()
            .filter(|(i, _)| mask & (1 << (i % 8)) != 0)
            .map(|(_, a)| a.clone())
            .collect();
        let wrapped = Composition::Sync(set.clone(), Box::new(p.clone()));
        let outer = steps(&ScopedTerm::Comp(wrapped), &sigma, &m);
        for s in steps(&ScopedTerm::Comp(p), &sigma, &m) {
            let target = ScopedTerm::Comp(Composition::Sync(set.clone(), Box::new(comp(&s.target).clone())));
            let sync = s.sync || set.contains(s.action.name());
            prop_assert!(outer.iter().any(|o| o.action == s.action && o.post == s.post && o.target == target && o.sync == sync));
        }
    }

    #[test]
    fn parallel_composition_is_symmetric((m, sigma) in model_and_valuation()) {
        prop_assume!(m.automata.len() >= 2);
        let a = Composition::atom(m.automata[0].clone());
        let b = Composition::atom(m.automata[1].clone());
        let swap = |c: &Composition| match c {
            Composition::Par(l, r) => Composition::Par(r.clone(), l.clone()),
            other => panic!("expected a parallel term, got {other}"),
        };
        let key = |s: &ExplicitActionStep, flip: bool| {
            let t = comp(&s.target);
            let t = if flip { swap(t) } else { t.clone() };
            (s.action.clone(), s.sync, t.to_string(), s.post.clone())
        };
        let ab: BTreeSet<_> = steps(&ScopedTerm::Comp(Composition::par(a.clone(), b.clone())), &sigma, &m).iter().map(|s| key(s, false)).collect();
        let ba: BTreeSet<_> = steps(&ScopedTerm::Comp(Composition::par(b, a)), &sigma, &m).iter().map(|s| key(s, true)).collect();
        prop_assert_eq!(ab, ba);
    }

    #[test]
    fn unbound_scope_is_the_union_of_bound_scopes((m, sigma) in model_and_valuation()) {
        prop_assume!(!m.domains.vars.is_empty());
        let (name, domain) = m.domains.vars[0].clone();
        let scope = |value: Option<Value>| ScopedTerm::Scope(Box::new(VarScope {
            vars: vec![ScopeVar { name: name.clone(), domain: domain.values(), value }],
            body: ScopedTerm::Comp(m.root()),
        }));
        let key = |s: &ExplicitActionStep| (s.action.clone(), s.sync, s.target.clone(), s.post.clone());
        let open: HashSet<_> = steps(&scope(None), &sigma, &m).iter().map(key).collect();
        let mut bound = HashSet::new();
        for v in domain.values() {
            bound.extend(steps(&scope(Some(v)), &sigma, &m).iter().map(key));
        }
        prop_assert_eq!(open, bound);
    }

    #[test]
    fn sts_states_are_reinitializations(m in model()) {
        let p = m.root();
        let all = locsof(&p);
        let targets: HashSet<Composition> = all.iter().map(|l| p.reinit(l).unwrap()).collect();
        let sts = build_sts(&p, false);
        prop_assert!(sts.state_count() <= 1 + all.len());
        for e in &sts.edges {
            prop_assert!(targets.contains(sts.state(e.target)));
        }
    }

    #[test]
    fn lits_transitions_keep_wild_positions(m in model()) {
        for t in lits_action_transitions(&m.root()) {
            prop_assert_eq!(t.source.wild_positions(), t.target.wild_positions());
        }
    }

    #[test]
    fn overwrite_fills_wild_cards((x, y) in linear_pair()) {
        let z = overwrite(&x, &y);
        prop_assert_eq!(z.len(), y.len());
        for (i, a) in x.0.iter().enumerate() {
            prop_assert_eq!(&z[i], a.as_ref().unwrap_or(&y[i]));
        }
        prop_assert!(subseq(&x, &z));
        prop_assert!(subseq(&LinearState::wild(y.len()), &y));
    }

    #[test]
    fn size_prediction_is_exact(seed in any::<u64>(), automata in 1usize..=4) {
        let p = random_model(seed, &GenParams::single_sync(automata, 6)).root();
        prop_assert_eq!(predict_size(&p, "a0").unwrap(), lits_action_transitions(&p).len());
    }

    #[test]
    fn linear_automaton_shape(m in model()) {
        let p = m.root();
        let res = linearize(&p);
        let x = res.location().to_string();
        prop_assert_eq!(res.automaton.locations.len(), 1);
        prop_assert!(res.automaton.edges.iter().all(|e| e.source == x && e.target == x));
        let lits = lits_action_transitions(&p);
        prop_assert_eq!(res.automaton.edges.len(), lits.len());
        let free = p.free_vars();
        for ptr in &res.pointers {
            prop_assert!(!free.contains(ptr));
        }
        for (e, t) in res.automaton.edges.iter().zip(&lits) {
            let parts = Conj::of(&e.reset).0;
            let written = e.reset.free_vars();
            for (i, ptr) in res.pointers.iter().enumerate() {
                let mentioned = written.iter().any(|v| v.name == *ptr);
                match (&t.source.0[i], &t.target.0[i]) {
                    (Some(v), Some(w)) => {
                        prop_assert!(parts.contains(&Expr::var(ptr).eq(Expr::loc(v))));
                        prop_assert!(parts.contains(&Expr::primed(ptr).eq(Expr::loc(w))));
                    }
                    _ => prop_assert!(!mentioned),
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn an_automaton_is_bisimilar_to_its_linearization(seed in any::<u64>()) {
        let m = random_model(seed, &GenParams { automata: 1, vars: 2, domain_size: 3, ..GenParams::default() });
        let r = check_linearization(&m.root(), &m.domains, &Options::default()).unwrap();
        prop_assert!(r.passed, "{}", r);
    }
}
