//! Injected faults that each checker must detect.

use crate::linear::Lits;
use crate::linearize::LinearizationResult;
use crate::model::{Atom, Composition, Conj, Expr, Predicate};

/// `p` with the invariant of `automaton`'s `location` replaced by `inv`.
pub fn with_invariant(
    p: &Composition,
    automaton: &str,
    location: &str,
    inv: Predicate,
) -> Composition {
    p.map_atoms(&mut |a| {
        if a.name() != automaton {
            return a.clone();
        }
        let mut aut = a.automaton().clone();
        for l in aut.locations.iter_mut().filter(|l| l.name == location) {
            l.inv = inv.clone();
        }
        let fresh = Atom::new(aut);
        match a.pin() {
            Some(i) => fresh.pinned(i),
            None => fresh,
        }
    })
}

/// The LiTS without its `index`-th action transition.
pub fn without_lits_transition(l: &Lits, index: usize) -> Lits {
    let mut out = l.clone();
    out.transitions.remove(index);
    out
}

/// The linearization with the update `pointer' == …` deleted from the
/// reset of edge `edge`.
pub fn without_pointer_update(
    res: &LinearizationResult,
    edge: usize,
    pointer: &str,
) -> LinearizationResult {
    let mut out = res.clone();
    let e = &mut out.automaton.edges[edge];
    let kept = Conj::of(&e.reset).0.into_iter().filter(
        |c| !matches!(c, Predicate::Cmp(Expr::Var(v), _, _) if v.primed && v.name == pointer),
    );
    e.reset = Predicate::conj(kept);
    out
}

/// The first edge moving a pointer to a different location, with that
/// pointer.
pub fn moving_edge(res: &LinearizationResult) -> Option<(usize, String)> {
    res.automaton.edges.iter().enumerate().find_map(|(i, e)| {
        let parts = Conj::of(&e.reset).0;
        res.pointers.iter().find_map(|ptr| {
            let at = |primed: bool| {
                parts.iter().find_map(|c| match c {
                    Predicate::Cmp(Expr::Var(v), _, Expr::Lit(x))
                        if v.name == *ptr && v.primed == primed =>
                    {
                        Some(x)
                    }
                    _ => None,
                })
            };
            match (at(false), at(true)) {
                (Some(a), Some(b)) if a != b => Some((i, ptr.clone())),
                _ => None,
            }
        })
    })
}
