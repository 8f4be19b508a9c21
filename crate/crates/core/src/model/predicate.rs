//! The predicate language shared by initial conditions, invariants and
//! reset predicates.
//!
//! The grammar is deliberately small: `true`, `false`, `=`/`<=`
//! comparisons, conjunction, disjunction, integer `+`/`-`, list literals,
//! list concatenation and membership of a location pointer in a set of
//! locations. There is no negation.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::value::{Kind, Value};

/// A reference to a variable, either its current value (`x`) or the value
/// after a transition (`x'`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VarRef {
    pub name: String,
    pub primed: bool,
}

impl VarRef {
    pub fn plain(name: impl Into<String>) -> Self {
        VarRef {
            name: name.into(),
            primed: false,
        }
    }

    pub fn primed(name: impl Into<String>) -> Self {
        VarRef {
            name: name.into(),
            primed: true,
        }
    }
}

impl fmt::Display for VarRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        if self.primed {
            f.write_str("'")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Expr {
    Lit(Value),
    Var(VarRef),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    List(Vec<Expr>),
    Concat(Box<Expr>, Box<Expr>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CmpOp {
    Eq,
    Le,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Predicate {
    True,
    False,
    Cmp(Expr, CmpOp, Expr),
    And(Box<Predicate>, Box<Predicate>),
    Or(Box<Predicate>, Box<Predicate>),
    /// Membership of a location-pointer variable in a set of locations.
    In(VarRef, Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unbound variable `{0}`")]
    Unbound(VarRef),
    #[error("kind mismatch: {0}")]
    KindMismatch(String),
    #[error("integer overflow")]
    Overflow,
}

/// Anything that can resolve variable references to values.
pub trait Bindings {
    fn lookup(&self, var: &VarRef) -> Option<&Value>;
}

impl Bindings for BTreeMap<VarRef, Value> {
    fn lookup(&self, var: &VarRef) -> Option<&Value> {
        self.get(var)
    }
}

impl Bindings for HashMap<VarRef, Value> {
    fn lookup(&self, var: &VarRef) -> Option<&Value> {
        self.get(var)
    }
}

impl Expr {
    pub fn var(name: impl Into<String>) -> Expr {
        Expr::Var(VarRef::plain(name))
    }

    pub fn primed(name: impl Into<String>) -> Expr {
        Expr::Var(VarRef::primed(name))
    }

    pub fn int(i: i64) -> Expr {
        Expr::Lit(Value::Int(i))
    }

    pub fn loc(name: impl Into<String>) -> Expr {
        Expr::Lit(Value::Loc(name.into()))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(self, rhs: Expr) -> Expr {
        Expr::Add(Box::new(self), Box::new(rhs))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn sub(self, rhs: Expr) -> Expr {
        Expr::Sub(Box::new(self), Box::new(rhs))
    }

    pub fn concat(self, rhs: Expr) -> Expr {
        Expr::Concat(Box::new(self), Box::new(rhs))
    }

    pub fn eq(self, rhs: Expr) -> Predicate {
        Predicate::Cmp(self, CmpOp::Eq, rhs)
    }

    pub fn le(self, rhs: Expr) -> Predicate {
        Predicate::Cmp(self, CmpOp::Le, rhs)
    }

    pub fn eval(&self, env: &impl Bindings) -> Result<Value, EvalError> {
        match self {
            Expr::Lit(v) => Ok(v.clone()),
            Expr::Var(r) => env
                .lookup(r)
                .cloned()
                .ok_or_else(|| EvalError::Unbound(r.clone())),
            Expr::Add(l, r) => {
                let (a, b) = int_operands(l.eval(env)?, r.eval(env)?, "+")?;
                a.checked_add(b).map(Value::Int).ok_or(EvalError::Overflow)
            }
            Expr::Sub(l, r) => {
                let (a, b) = int_operands(l.eval(env)?, r.eval(env)?, "-")?;
                a.checked_sub(b).map(Value::Int).ok_or(EvalError::Overflow)
            }
            Expr::List(items) => items
                .iter()
                .map(|e| e.eval(env))
                .collect::<Result<Vec<_>, _>>()
                .map(Value::List),
            Expr::Concat(l, r) => match (l.eval(env)?, r.eval(env)?) {
                (Value::List(mut a), Value::List(b)) => {
                    a.extend(b);
                    Ok(Value::List(a))
                }
                (a, b) => Err(EvalError::KindMismatch(format!(
                    "`{a} ++ {b}` needs two lists"
                ))),
            },
        }
    }

    fn collect_vars(&self, out: &mut BTreeSet<VarRef>) {
        match self {
            Expr::Lit(_) => {}
            Expr::Var(r) => {
                out.insert(r.clone());
            }
            Expr::Add(l, r) | Expr::Sub(l, r) | Expr::Concat(l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
            Expr::List(items) => items.iter().for_each(|e| e.collect_vars(out)),
        }
    }

    /// Infers the kind of the expression, given the kinds of plain variables.
    pub fn kind(&self, var_kind: &impl Fn(&str) -> Option<Kind>) -> Result<Kind, String> {
        match self {
            Expr::Lit(v) => Ok(v.kind()),
            Expr::Var(r) => {
                var_kind(&r.name).ok_or_else(|| format!("undeclared variable `{}`", r.name))
            }
            Expr::Add(l, r) | Expr::Sub(l, r) => {
                for side in [l, r] {
                    let k = side.kind(var_kind)?;
                    if k != Kind::Int {
                        return Err(format!("arithmetic on `{side}` of kind {k}"));
                    }
                }
                Ok(Kind::Int)
            }
            Expr::List(items) => {
                let mut elem: Option<Kind> = None;
                for item in items {
                    let k = item.kind(var_kind)?;
                    elem = match elem {
                        None => Some(k),
                        Some(e) if e.compatible(&k) => Some(e.unify(&k)),
                        Some(e) => return Err(format!("list mixes {e} and {k}")),
                    };
                }
                Ok(Kind::List(elem.map(Box::new)))
            }
            Expr::Concat(l, r) => {
                let (kl, kr) = (l.kind(var_kind)?, r.kind(var_kind)?);
                match (&kl, &kr) {
                    (Kind::List(_), Kind::List(_)) if kl.compatible(&kr) => Ok(kl.unify(&kr)),
                    _ => Err(format!("cannot concatenate {kl} and {kr}")),
                }
            }
        }
    }

    fn is_binary(&self) -> bool {
        matches!(self, Expr::Add(..) | Expr::Sub(..) | Expr::Concat(..))
    }
}

fn int_operands(a: Value, b: Value, op: &str) -> Result<(i64, i64), EvalError> {
    match (a, b) {
        (Value::Int(a), Value::Int(b)) => Ok((a, b)),
        (a, b) => Err(EvalError::KindMismatch(format!(
            "`{a} {op} {b}` needs two integers"
        ))),
    }
}

impl Predicate {
    pub fn and(self, rhs: Predicate) -> Predicate {
        Predicate::And(Box::new(self), Box::new(rhs))
    }

    pub fn or(self, rhs: Predicate) -> Predicate {
        Predicate::Or(Box::new(self), Box::new(rhs))
    }

    /// Left-nested conjunction; the empty conjunction is `true`.
    pub fn conj(parts: impl IntoIterator<Item = Predicate>) -> Predicate {
        parts
            .into_iter()
            .reduce(Predicate::and)
            .unwrap_or(Predicate::True)
    }

    /// Left-nested disjunction; the empty disjunction is `false`.
    pub fn disj(parts: impl IntoIterator<Item = Predicate>) -> Predicate {
        parts
            .into_iter()
            .reduce(Predicate::or)
            .unwrap_or(Predicate::False)
    }

    pub fn eval(&self, env: &impl Bindings) -> Result<bool, EvalError> {
        Ok(match self {
            Predicate::True => true,
            Predicate::False => false,
            Predicate::Cmp(l, op, r) => {
                let (a, b) = (l.eval(env)?, r.eval(env)?);
                match op {
                    CmpOp::Eq => {
                        if !a.kind().compatible(&b.kind()) {
                            return Err(EvalError::KindMismatch(format!("`{a} == {b}`")));
                        }
                        a == b
                    }
                    CmpOp::Le => {
                        let (a, b) = int_operands(a, b, "<=")?;
                        a <= b
                    }
                }
            }
            Predicate::And(l, r) => l.eval(env)? && r.eval(env)?,
            Predicate::Or(l, r) => l.eval(env)? || r.eval(env)?,
            Predicate::In(var, locs) => match env.lookup(var) {
                Some(Value::Loc(l)) => locs.iter().any(|x| x == l),
                Some(other) => {
                    return Err(EvalError::KindMismatch(format!(
                        "`{var}` holds {other}, not a location"
                    )))
                }
                None => return Err(EvalError::Unbound(var.clone())),
            },
        })
    }

    /// The variable references occurring in the predicate; plain and primed
    /// references are kept apart.
    pub fn free_vars(&self) -> BTreeSet<VarRef> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    /// Names of the variables that occur primed, i.e. the variables the
    /// predicate may assign.
    pub fn written_vars(&self) -> BTreeSet<String> {
        self.free_vars()
            .into_iter()
            .filter(|v| v.primed)
            .map(|v| v.name)
            .collect()
    }

    fn collect_vars(&self, out: &mut BTreeSet<VarRef>) {
        match self {
            Predicate::True | Predicate::False => {}
            Predicate::Cmp(l, _, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
            Predicate::And(l, r) | Predicate::Or(l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
            Predicate::In(v, _) => {
                out.insert(v.clone());
            }
        }
    }

    /// Checks that every comparison is well-kinded.
    pub fn check_kinds(&self, var_kind: &impl Fn(&str) -> Option<Kind>) -> Result<(), String> {
        match self {
            Predicate::True | Predicate::False => Ok(()),
            Predicate::Cmp(l, op, r) => {
                let (kl, kr) = (l.kind(var_kind)?, r.kind(var_kind)?);
                match op {
                    CmpOp::Eq if kl.compatible(&kr) => Ok(()),
                    CmpOp::Eq => Err(format!("`{self}` compares {kl} with {kr}")),
                    CmpOp::Le if kl == Kind::Int && kr == Kind::Int => Ok(()),
                    CmpOp::Le => Err(format!("`{self}` orders non-integers")),
                }
            }
            Predicate::And(l, r) | Predicate::Or(l, r) => {
                l.check_kinds(var_kind)?;
                r.check_kinds(var_kind)
            }
            Predicate::In(v, _) => match var_kind(&v.name) {
                Some(Kind::Loc) => Ok(()),
                Some(k) => Err(format!("membership test on `{v}` of kind {k}")),
                None => Err(format!("undeclared variable `{}`", v.name)),
            },
        }
    }
}

/// A conjunction normalized to a flat list: nested `And` nodes are
/// flattened left to right and literal `true` conjuncts are dropped.
/// Conjunct order is preserved, so two conjunctions are equal only if they
/// were assembled in the same order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Conj(pub Vec<Predicate>);

impl Conj {
    pub fn of(p: &Predicate) -> Conj {
        let mut parts = Vec::new();
        flatten_into(p, &mut parts);
        Conj(parts)
    }

    pub fn and(&self, rhs: &Conj) -> Conj {
        let mut parts = self.0.clone();
        parts.extend(rhs.0.iter().cloned());
        Conj(parts)
    }

    pub fn all<'a>(parts: impl IntoIterator<Item = &'a Conj>) -> Conj {
        Conj(
            parts
                .into_iter()
                .flat_map(|c| c.0.iter().cloned())
                .collect(),
        )
    }

    /// True if some conjunct is the literal `false`.
    pub fn has_false(&self) -> bool {
        self.0.contains(&Predicate::False)
    }

    pub fn to_predicate(&self) -> Predicate {
        Predicate::conj(self.0.iter().cloned())
    }

    pub fn eval(&self, env: &impl Bindings) -> Result<bool, EvalError> {
        for p in &self.0 {
            if !p.eval(env)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn written_vars(&self) -> BTreeSet<String> {
        self.0.iter().flat_map(|p| p.written_vars()).collect()
    }
}

fn flatten_into(p: &Predicate, out: &mut Vec<Predicate>) {
    match p {
        Predicate::True => {}
        Predicate::And(l, r) => {
            flatten_into(l, out);
            flatten_into(r, out);
        }
        other => out.push(other.clone()),
    }
}

impl fmt::Display for Conj {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("true");
        }
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" && ")?;
            }
            if matches!(p, Predicate::Or(..)) {
                write!(f, "({p})")?;
            } else {
                write!(f, "{p}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Lit(v) => write!(f, "{v}"),
            Expr::Var(r) => write!(f, "{r}"),
            Expr::Add(l, r) => write_binary(f, l, "+", r),
            Expr::Sub(l, r) => write_binary(f, l, "-", r),
            Expr::Concat(l, r) => write_binary(f, l, "++", r),
            Expr::List(items) => {
                f.write_str("[")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{item}")?;
                }
                f.write_str("]")
            }
        }
    }
}

// Binary operators share one precedence level and associate to the left, so
// only a compound right operand needs parentheses.
fn write_binary(f: &mut fmt::Formatter<'_>, l: &Expr, op: &str, r: &Expr) -> fmt::Result {
    if r.is_binary() {
        write!(f, "{l} {op} ({r})")
    } else {
        write!(f, "{l} {op} {r}")
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Predicate::True => f.write_str("true"),
            Predicate::False => f.write_str("false"),
            Predicate::Cmp(l, CmpOp::Eq, r) => write!(f, "{l} == {r}"),
            Predicate::Cmp(l, CmpOp::Le, r) => write!(f, "{l} <= {r}"),
            Predicate::And(l, r) => {
                write_operand(f, l, |p| matches!(p, Predicate::Or(..)))?;
                f.write_str(" && ")?;
                write_operand(f, r, |p| {
                    matches!(p, Predicate::Or(..) | Predicate::And(..))
                })
            }
            Predicate::Or(l, r) => {
                write_operand(f, l, |_| false)?;
                f.write_str(" || ")?;
                write_operand(f, r, |p| matches!(p, Predicate::Or(..)))
            }
            Predicate::In(v, locs) => write!(f, "{v} in {{{}}}", locs.join(", ")),
        }
    }
}

fn write_operand(
    f: &mut fmt::Formatter<'_>,
    p: &Predicate,
    needs_parens: impl Fn(&Predicate) -> bool,
) -> fmt::Result {
    if needs_parens(p) {
        write!(f, "({p})")
    } else {
        write!(f, "{p}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn env(pairs: &[(VarRef, Value)]) -> BTreeMap<VarRef, Value> {
        pairs.iter().cloned().collect()
    }

    fn gate_rq_reset() -> Predicate {
        // wq' == wq ++ [id']
        Expr::primed("wq").eq(Expr::var("wq").concat(Expr::List(vec![Expr::primed("id")])))
    }

    #[test]
    fn eval_simple_equality() {
        let p = Expr::var("n").eq(Expr::int(0));
        assert!(p
            .eval(&env(&[(VarRef::plain("n"), Value::Int(0))]))
            .unwrap());
    }

    #[test]
    fn eval_gate_reset() {
        let sigma = env(&[
            (VarRef::plain("wq"), Value::List(vec![])),
            (VarRef::primed("wq"), Value::List(vec![Value::Int(0)])),
            (VarRef::primed("id"), Value::Int(0)),
        ]);
        assert!(gate_rq_reset().eval(&sigma).unwrap());
    }

    #[test]
    fn eval_false_needs_no_bindings() {
        assert!(!Predicate::False.eval(&env(&[])).unwrap());
    }

    #[test]
    fn eval_reports_unbound_and_kind_errors() {
        let p = Expr::var("n").eq(Expr::int(0));
        assert_eq!(
            p.eval(&env(&[])),
            Err(EvalError::Unbound(VarRef::plain("n")))
        );
        let q = Expr::var("b").le(Expr::int(0));
        let err = q
            .eval(&env(&[(VarRef::plain("b"), Value::Bool(true))]))
            .unwrap_err();
        assert!(matches!(err, EvalError::KindMismatch(_)));
    }

    #[test]
    fn free_vars_keeps_primes_apart() {
        let expected: BTreeSet<_> = [
            VarRef::primed("wq"),
            VarRef::plain("wq"),
            VarRef::primed("id"),
        ]
        .into_iter()
        .collect();
        assert_eq!(gate_rq_reset().free_vars(), expected);
        assert!(Predicate::True.free_vars().is_empty());
        let p = Expr::var("n")
            .eq(Expr::int(0))
            .and(Expr::var("n").le(Expr::int(1)));
        assert_eq!(p.free_vars(), [VarRef::plain("n")].into_iter().collect());
    }

    #[test]
    fn conj_flattens_and_drops_true() {
        let a = Expr::var("x").eq(Expr::int(1));
        let b = Expr::var("y").eq(Expr::int(2));
        let p = Predicate::True
            .and(a.clone())
            .and(Predicate::True.and(b.clone()));
        assert_eq!(Conj::of(&p), Conj(vec![a, b]));
        assert!(Conj::of(&Predicate::True.and(Predicate::False)).has_false());
    }

    #[test]
    fn display_parenthesizes_right_nesting() {
        let a = Expr::var("x").eq(Expr::int(1));
        let p = a.clone().and(a.clone().and(a.clone()));
        assert_eq!(p.to_string(), "x == 1 && (x == 1 && x == 1)");
        let q = a.clone().or(a.clone()).and(a.clone());
        assert_eq!(q.to_string(), "(x == 1 || x == 1) && x == 1");
        let e = Expr::var("n").sub(Expr::var("m").add(Expr::int(-1)));
        assert_eq!(e.to_string(), "n - (m + -1)");
    }
}
