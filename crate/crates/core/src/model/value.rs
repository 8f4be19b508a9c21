use std::fmt;

use serde::{Deserialize, Serialize};

/// A runtime value held by a model variable.
///
/// Serialized untagged: integers as JSON numbers, booleans as booleans,
/// lists as arrays and location names as strings.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Int(i64),
    Bool(bool),
    List(Vec<Value>),
    Loc(String),
}

/// The kind of a value or expression, used for well-typedness checks.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Kind {
    Int,
    Bool,
    Loc,
    /// `None` is the element kind of the empty list literal, which unifies
    /// with every list kind.
    List(Option<Box<Kind>>),
}

impl Kind {
    /// Whether two kinds can be compared or concatenated with each other.
    pub fn compatible(&self, other: &Kind) -> bool {
        match (self, other) {
            (Kind::List(None), Kind::List(_)) | (Kind::List(_), Kind::List(None)) => true,
            (Kind::List(Some(a)), Kind::List(Some(b))) => a.compatible(b),
            (a, b) => a == b,
        }
    }

    /// The more informative of two compatible kinds.
    pub fn unify(&self, other: &Kind) -> Kind {
        match (self, other) {
            (Kind::List(None), k) | (k, Kind::List(None)) => k.clone(),
            (Kind::List(Some(a)), Kind::List(Some(b))) => Kind::List(Some(Box::new(a.unify(b)))),
            (a, _) => a.clone(),
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kind::Int => f.write_str("int"),
            Kind::Bool => f.write_str("bool"),
            Kind::Loc => f.write_str("loc"),
            Kind::List(None) => f.write_str("list"),
            Kind::List(Some(k)) => write!(f, "list {k}"),
        }
    }
}

impl Value {
    pub fn kind(&self) -> Kind {
        match self {
            Value::Int(_) => Kind::Int,
            Value::Bool(_) => Kind::Bool,
            Value::Loc(_) => Kind::Loc,
            Value::List(items) => Kind::List(
                items
                    .iter()
                    .map(Value::kind)
                    .reduce(|a, b| a.unify(&b))
                    .map(Box::new),
            ),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(i) => write!(f, "{i}"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Loc(l) => f.write_str(l),
            Value::List(items) => {
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

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_list_unifies_with_any_list() {
        let empty = Value::List(vec![]).kind();
        let ints = Value::List(vec![Value::Int(1)]).kind();
        assert!(empty.compatible(&ints));
        assert_eq!(empty.unify(&ints), ints);
        assert!(!ints.compatible(&Kind::Int));
    }

    #[test]
    fn json_is_untagged() {
        let v = Value::List(vec![Value::Int(0), Value::Int(1)]);
        assert_eq!(serde_json::to_string(&v).unwrap(), "[0,1]");
        let loc: Value = serde_json::from_str("\"F\"").unwrap();
        assert_eq!(loc, Value::Loc("F".into()));
    }
}
