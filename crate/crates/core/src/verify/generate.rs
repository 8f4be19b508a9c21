//! Seeded random models for property checks.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{
    Automaton, Composition, Domain, DomainSpec, Edge, Expr, Location, Model, Predicate,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenParams {
    pub automata: usize,
    /// Upper bound per automaton; each has at least one.
    pub max_locations: usize,
    /// Upper bound per automaton; each has at least one, and enough to
    /// connect its locations.
    pub max_edges: usize,
    /// Number of actions overall.
    pub actions: usize,
    /// How many of the actions may synchronize.
    pub sync_actions: usize,
    pub vars: usize,
    /// Every variable ranges over `0..domain_size`.
    pub domain_size: i64,
    /// Add synchronization operators around subterms.
    pub sync_operators: bool,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            automata: 3,
            max_locations: 4,
            max_edges: 5,
            actions: 4,
            sync_actions: 2,
            vars: 2,
            domain_size: 3,
            sync_operators: true,
        }
    }
}

impl GenParams {
    /// Models where `a0` is the only synchronizing action: every automaton
    /// synchronizes on exactly `{a0}` and no operator adds anything else.
    pub fn single_sync(automata: usize, max_edges: usize) -> GenParams {
        GenParams {
            automata,
            max_edges,
            sync_actions: 1,
            sync_operators: false,
            ..GenParams::default()
        }
    }

    pub fn universe_size(&self) -> usize {
        (self.domain_size as usize).pow(self.vars as u32)
    }
}

struct Gen {
    rng: ChaCha8Rng,
    params: GenParams,
}

impl Gen {
    fn var(&mut self) -> String {
        format!("v{}", self.rng.gen_range(0..self.params.vars))
    }

    fn constant(&mut self) -> Expr {
        Expr::int(self.rng.gen_range(0..self.params.domain_size))
    }

    fn atom_predicate(&mut self) -> Predicate {
        let v = Expr::var(self.var());
        let c = self.constant();
        if self.rng.gen_bool(0.5) {
            v.eq(c)
        } else {
            v.le(c)
        }
    }

    fn state_predicate(&mut self, p_true: f64) -> Predicate {
        if self.params.vars == 0 || self.rng.gen_bool(p_true) {
            return Predicate::True;
        }
        let p = self.atom_predicate();
        if self.rng.gen_bool(0.2) {
            p.or(self.atom_predicate())
        } else {
            p
        }
    }

    fn reset(&mut self) -> Predicate {
        let mut parts = Vec::new();
        if self.params.vars == 0 {
            return Predicate::True;
        }
        if self.rng.gen_bool(0.5) {
            parts.push(self.atom_predicate());
        }
        let written: BTreeSet<String> =
            (0..self.rng.gen_range(0..=2)).map(|_| self.var()).collect();
        for v in written {
            let rhs = match self.rng.gen_range(0..3) {
                0 => Expr::var(&v).add(Expr::int(1)),
                1 => Expr::var(&v).sub(Expr::int(1)),
                _ => self.constant(),
            };
            parts.push(Expr::primed(&v).eq(rhs));
        }
        Predicate::conj(parts)
    }

    fn automaton(&mut self, index: usize) -> Automaton {
        let n = self.rng.gen_range(1..=self.params.max_locations);
        let names: Vec<String> = (0..n).map(|i| format!("L{i}")).collect();
        let locations = names
            .iter()
            .enumerate()
            .map(|(i, name)| {
                let init = if i == 0 {
                    self.state_predicate(0.6)
                } else if self.rng.gen_bool(0.2) {
                    self.state_predicate(0.3)
                } else {
                    Predicate::False
                };
                Location {
                    name: name.clone(),
                    init,
                    inv: self.state_predicate(0.6),
                }
            })
            .collect();
        // A spanning tree from the first location keeps most locations
        // reachable; the remaining edges are arbitrary.
        let count = self.rng.gen_range(1..=self.params.max_edges).max(n - 1);
        let edges = (0..count)
            .map(|k| {
                let (source, target) = if k + 1 < n {
                    (
                        names[self.rng.gen_range(0..=k)].clone(),
                        names[k + 1].clone(),
                    )
                } else {
                    (
                        names.choose(&mut self.rng).expect("nonempty").clone(),
                        names.choose(&mut self.rng).expect("nonempty").clone(),
                    )
                };
                Edge {
                    source,
                    action: format!("a{}", self.rng.gen_range(0..self.params.actions)).into(),
                    reset: self.reset(),
                    target,
                }
            })
            .collect();
        let sync = if self.params.sync_operators {
            (0..self.params.sync_actions)
                .filter(|_| self.rng.gen_bool(0.5))
                .map(|i| format!("a{i}"))
                .collect()
        } else {
            (0..self.params.sync_actions)
                .map(|i| format!("a{i}"))
                .collect()
        };
        Automaton::new(format!("A{index}"), locations, edges, sync)
            .expect("generated automaton is well formed")
    }

    /// A random binary tree over the atoms, in order.
    fn tree(&mut self, atoms: &[Composition]) -> Composition {
        let c = if atoms.len() == 1 {
            atoms[0].clone()
        } else {
            let split = self.rng.gen_range(1..atoms.len());
            let l = self.tree(&atoms[..split]);
            Composition::par(l, self.tree(&atoms[split..]))
        };
        if self.params.sync_operators && self.params.sync_actions > 0 && self.rng.gen_bool(0.25) {
            let set: Vec<String> = (0..self.params.sync_actions)
                .filter(|_| self.rng.gen_bool(0.5))
                .map(|i| format!("a{i}"))
                .collect();
            Composition::sync(set, c)
        } else {
            c
        }
    }
}

/// A well-formed random model; equal seeds and parameters give equal
/// models.
pub fn random_model(seed: u64, params: &GenParams) -> Model {
    assert!(params.automata > 0 && params.actions > 0 && params.sync_actions <= params.actions);
    let mut g = Gen {
        rng: ChaCha8Rng::seed_from_u64(seed),
        params: params.clone(),
    };
    let automata: Vec<Automaton> = (0..params.automata).map(|i| g.automaton(i)).collect();
    let atoms: Vec<Composition> = automata.iter().cloned().map(Composition::atom).collect();
    let root = g.tree(&atoms);
    let domains = DomainSpec::new(
        (0..params.vars)
            .map(|i| {
                (
                    format!("v{i}"),
                    Domain::Int {
                        lo: 0,
                        hi: params.domain_size - 1,
                    },
                )
            })
            .collect(),
    );
    let model = Model {
        actions: (0..params.actions).map(|i| format!("a{i}")).collect(),
        domains,
        automata,
        composition: Some(("Main".to_string(), root)),
    };
    model.validate().expect("generated model is valid");
    model
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{parse_model, print_model};

    #[test]
    fn deterministic_per_seed() {
        let p = GenParams::default();
        assert_eq!(random_model(7, &p), random_model(7, &p));
        assert_ne!(
            print_model(&random_model(7, &p)),
            print_model(&random_model(8, &p))
        );
    }

    #[test]
    fn generated_models_reparse() {
        for seed in 0..20 {
            let m = random_model(seed, &GenParams::default());
            let text = print_model(&m);
            assert_eq!(
                parse_model(&text).unwrap_or_else(|e| panic!("{e}\n{text}")),
                m
            );
        }
    }

    #[test]
    fn single_sync_params_meet_the_size_hypothesis() {
        for seed in 0..10 {
            let m = random_model(seed, &GenParams::single_sync(3, 6));
            assert!(crate::linear::predict_size(&m.root(), "a0").is_ok());
        }
    }
}
