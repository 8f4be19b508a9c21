//! Finite variable domains and valuations over them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::predicate::{Bindings, VarRef};
use super::value::{Kind, Value};

/// The finite domain of one variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Domain {
    /// Integers in the closed range `lo..=hi`.
    Int {
        lo: i64,
        hi: i64,
    },
    Bool,
    /// Lists of at most `max_len` elements drawn from `elem`.
    List {
        elem: Box<Domain>,
        max_len: usize,
    },
    /// Location names, used for location pointers.
    Loc(Vec<String>),
}

impl Domain {
    /// All values of the domain, in a fixed order.
    pub fn values(&self) -> Vec<Value> {
        match self {
            Domain::Int { lo, hi } => (*lo..=*hi).map(Value::Int).collect(),
            Domain::Bool => vec![Value::Bool(false), Value::Bool(true)],
            Domain::Loc(locs) => locs.iter().cloned().map(Value::Loc).collect(),
            Domain::List { elem, max_len } => {
                let elems = elem.values();
                let mut out = vec![Value::List(vec![])];
                let mut layer: Vec<Vec<Value>> = vec![vec![]];
                for _ in 0..*max_len {
                    layer = layer
                        .iter()
                        .flat_map(|prefix| {
                            elems.iter().map(move |e| {
                                let mut l = prefix.clone();
                                l.push(e.clone());
                                l
                            })
                        })
                        .collect();
                    out.extend(layer.iter().cloned().map(Value::List));
                }
                out
            }
        }
    }

    pub fn kind(&self) -> Kind {
        match self {
            Domain::Int { .. } => Kind::Int,
            Domain::Bool => Kind::Bool,
            Domain::Loc(_) => Kind::Loc,
            Domain::List { elem, .. } => Kind::List(Some(Box::new(elem.kind()))),
        }
    }

    pub fn contains(&self, v: &Value) -> bool {
        match (self, v) {
            (Domain::Int { lo, hi }, Value::Int(i)) => lo <= i && i <= hi,
            (Domain::Bool, Value::Bool(_)) => true,
            (Domain::Loc(locs), Value::Loc(l)) => locs.contains(l),
            (Domain::List { elem, max_len }, Value::List(items)) => {
                items.len() <= *max_len && items.iter().all(|i| elem.contains(i))
            }
            _ => false,
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Domain::Int { lo, hi } => (hi - lo + 1).max(0) as usize,
            Domain::Bool => 2,
            Domain::Loc(locs) => locs.len(),
            Domain::List { elem, max_len } => {
                let e = elem.size();
                (0..=*max_len as u32).map(|k| e.pow(k)).sum()
            }
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::Int { lo, hi } => write!(f, "int {lo}..{hi}"),
            Domain::Bool => f.write_str("bool"),
            Domain::Loc(locs) => write!(f, "loc {{{}}}", locs.join(", ")),
            Domain::List { elem, max_len } => write!(f, "list {elem} maxlen {max_len}"),
        }
    }
}

/// Per-variable finite domains, in declaration order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct DomainSpec {
    pub vars: Vec<(String, Domain)>,
}

impl DomainSpec {
    pub fn new(vars: Vec<(String, Domain)>) -> Self {
        DomainSpec { vars }
    }

    pub fn get(&self, name: &str) -> Option<&Domain> {
        self.vars.iter().find(|(n, _)| n == name).map(|(_, d)| d)
    }

    pub fn kind_of(&self, name: &str) -> Option<Kind> {
        self.get(name).map(Domain::kind)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.vars.iter().map(|(n, _)| n.as_str())
    }

    /// Number of valuations in the product of all domains.
    pub fn universe_size(&self) -> usize {
        self.vars.iter().map(|(_, d)| d.size()).product()
    }

    pub fn universe(&self) -> Universe {
        Universe {
            vars: self
                .vars
                .iter()
                .map(|(n, d)| (n.clone(), d.values()))
                .collect(),
        }
    }

    /// Whether every variable of the valuation is declared and in range.
    pub fn admits(&self, sigma: &Valuation) -> bool {
        self.vars.len() == sigma.0.len()
            && self
                .vars
                .iter()
                .all(|(n, d)| sigma.get(n).is_some_and(|v| d.contains(v)))
    }
}

/// A total assignment of values to variables.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Valuation(pub BTreeMap<String, Value>);

impl Valuation {
    pub fn get(&self, name: &str) -> Option<&Value> {
        self.0.get(name)
    }

    pub fn set(&mut self, name: impl Into<String>, v: Value) {
        self.0.insert(name.into(), v);
    }

    /// Overwrites `self` with every binding of `other` (`other ▷ self`).
    pub fn overwritten_by(&self, other: &Valuation) -> Valuation {
        let mut out = self.clone();
        out.0
            .extend(other.0.iter().map(|(k, v)| (k.clone(), v.clone())));
        out
    }

    pub fn without<'a>(&self, names: impl IntoIterator<Item = &'a str>) -> Valuation {
        let mut out = self.clone();
        for n in names {
            out.0.remove(n);
        }
        out
    }

    /// True if `self` and `other` agree on every variable outside `allowed`.
    pub fn agrees_outside(&self, other: &Valuation, allowed: &BTreeSet<String>) -> bool {
        self.0.len() == other.0.len()
            && self
                .0
                .iter()
                .all(|(k, v)| allowed.contains(k) || other.0.get(k) == Some(v))
    }
}

impl Bindings for Valuation {
    fn lookup(&self, var: &VarRef) -> Option<&Value> {
        if var.primed {
            None
        } else {
            self.0.get(&var.name)
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (k, v)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k}={v}")?;
        }
        f.write_str("}")
    }
}

/// A pair of valuations seen by a reset predicate: plain references read
/// the source valuation, primed references read the target (`σ'⁺ ∪ σ`).
#[derive(Debug, Clone, Copy)]
pub struct StepBindings<'a> {
    pub pre: &'a Valuation,
    pub post: &'a Valuation,
}

impl Bindings for StepBindings<'_> {
    fn lookup(&self, var: &VarRef) -> Option<&Value> {
        if var.primed {
            self.post.0.get(&var.name)
        } else {
            self.pre.0.get(&var.name)
        }
    }
}

/// The enumerable product of a set of variable domains.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Universe {
    vars: Vec<(String, Vec<Value>)>,
}

impl Universe {
    pub fn from_values(vars: Vec<(String, Vec<Value>)>) -> Self {
        Universe { vars }
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.vars.iter().map(|(n, _)| n.as_str())
    }

    pub fn size(&self) -> usize {
        self.vars.iter().map(|(_, vs)| vs.len()).product()
    }

    /// A copy with one more (or a replaced) variable.
    pub fn with(&self, name: &str, values: Vec<Value>) -> Universe {
        let mut vars: Vec<_> = self
            .vars
            .iter()
            .filter(|(n, _)| n != name)
            .cloned()
            .collect();
        vars.push((name.to_string(), values));
        Universe { vars }
    }

    /// Every valuation of the universe, last variable varying fastest.
    pub fn all(&self) -> Vec<Valuation> {
        self.vary(&Valuation::default(), |_| true)
    }

    /// Every valuation that copies `base` on variables for which `varies`
    /// is false and ranges over the full domain elsewhere.
    pub fn vary(&self, base: &Valuation, varies: impl Fn(&str) -> bool) -> Vec<Valuation> {
        let mut out = vec![base.clone()];
        for (name, values) in &self.vars {
            if !varies(name) {
                if base.get(name).is_none() {
                    return vec![];
                }
                continue;
            }
            out = out
                .iter()
                .flat_map(|partial| {
                    values.iter().map(move |v| {
                        let mut next = partial.clone();
                        next.set(name.clone(), v.clone());
                        next
                    })
                })
                .collect();
        }
        out
    }
}
