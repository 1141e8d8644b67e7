//! Runtime values of the controlled language: booleans and non-negative integers.

use serde::{Deserialize, Serialize};
use std::fmt;

/// A value flowing through programs, memories, and I/O queues.
///
/// Integers are non-negative by construction (`u64`); subtraction is
/// truncated at zero so the invariant cannot be broken by arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Bool(bool),
    Int(u64),
}

/// The two value kinds, used for dynamic kind checks and channel declarations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Bool,
    Int,
}

impl Value {
    pub fn kind(&self) -> Kind {
        match self {
            Value::Bool(_) => Kind::Bool,
            Value::Int(_) => Kind::Int,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            Value::Int(_) => None,
        }
    }

    pub fn as_int(&self) -> Option<u64> {
        match self {
            Value::Int(n) => Some(*n),
            Value::Bool(_) => None,
        }
    }

    /// The initial value of a kind: `F` for booleans, `0` for integers.
    pub fn initial(kind: Kind) -> Value {
        match kind {
            Kind::Bool => Value::Bool(false),
            Kind::Int => Value::Int(0),
        }
    }

    /// Parse the textual form used in trace files: `T`, `F`, or a decimal integer.
    pub fn parse_literal(s: &str) -> Option<Value> {
        match s {
            "T" => Some(Value::Bool(true)),
            "F" => Some(Value::Bool(false)),
            _ => s.parse::<u64>().ok().map(Value::Int),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(true) => write!(f, "T"),
            Value::Bool(false) => write!(f, "F"),
            Value::Int(n) => write!(f, "{n}"),
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kind::Bool => write!(f, "bool"),
            Kind::Int => write!(f, "int"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_round_trip() {
        for v in [
            Value::Bool(true),
            Value::Bool(false),
            Value::Int(0),
            Value::Int(42),
        ] {
            assert_eq!(Value::parse_literal(&v.to_string()), Some(v));
        }
        assert_eq!(Value::parse_literal("x"), None);
        assert_eq!(Value::parse_literal("-1"), None);
    }
}
