//! Expression evaluation over a variable memory.
//!
//! Memories are total: a variable that was never written reads as the
//! initial value, which is `0` in integer positions and `F` in boolean
//! positions. Kind mismatches (such as `!` applied to an integer) are
//! reported as type errors, never coerced.

use crate::lang::ast::{BinOp, Expr, UnOp, VarName};
use crate::lang::value::{Kind, Value};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Variable store. Absent variables read as the initial value.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Memory(BTreeMap<VarName, Value>);

impl Memory {
    pub fn new() -> Self {
        Memory(BTreeMap::new())
    }

    pub fn get(&self, name: &str) -> Option<Value> {
        self.0.get(name).copied()
    }

    pub fn set(&mut self, name: impl Into<VarName>, value: Value) {
        self.0.insert(name.into(), value);
    }

    pub fn with(mut self, name: impl Into<VarName>, value: Value) -> Self {
        self.set(name, value);
        self
    }

    pub fn iter(&self) -> impl Iterator<Item = (&VarName, &Value)> {
        self.0.iter()
    }
}

impl FromIterator<(VarName, Value)> for Memory {
    fn from_iter<T: IntoIterator<Item = (VarName, Value)>>(iter: T) -> Self {
        Memory(iter.into_iter().collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TypeError {
    #[error("`!` applied to integer {0}")]
    NotOnInt(Value),
    #[error("{op} requires {expected} operands, found {found}")]
    WrongKind {
        op: &'static str,
        expected: Kind,
        found: Value,
    },
    #[error("`==` compares values of different kinds: {0} and {1}")]
    MixedEquality(Value, Value),
    #[error("guard evaluated to integer {0}, expected a boolean")]
    NonBooleanGuard(Value),
}

/// Evaluation result carrying the not-yet-written marker. The marker takes
/// the kind its context demands, so `x + 1` reads `x` as `0` while `!x`
/// reads it as `F`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Partial {
    Known(Value),
    Initial,
}

impl Partial {
    fn as_int(self, op: &'static str) -> Result<u64, TypeError> {
        match self {
            Partial::Known(Value::Int(n)) => Ok(n),
            Partial::Known(v @ Value::Bool(_)) => Err(TypeError::WrongKind {
                op,
                expected: Kind::Int,
                found: v,
            }),
            Partial::Initial => Ok(0),
        }
    }

    fn as_bool(self, op: &'static str) -> Result<bool, TypeError> {
        match self {
            Partial::Known(Value::Bool(b)) => Ok(b),
            Partial::Known(v @ Value::Int(_)) => Err(TypeError::WrongKind {
                op,
                expected: Kind::Bool,
                found: v,
            }),
            Partial::Initial => Ok(false),
        }
    }

    /// Resolve at an unconstrained position (assignment or output root).
    fn resolve(self) -> Value {
        match self {
            Partial::Known(v) => v,
            Partial::Initial => Value::Int(0),
        }
    }
}

fn eval_partial(mem: &Memory, e: &Expr) -> Result<Partial, TypeError> {
    Ok(match e {
        Expr::Lit(v) => Partial::Known(*v),
        Expr::Var(x) => match mem.get(x) {
            Some(v) => Partial::Known(v),
            None => Partial::Initial,
        },
        Expr::Unary(UnOp::Not, inner) => {
            let v = eval_partial(mem, inner)?;
            if let Partial::Known(v @ Value::Int(_)) = v {
                return Err(TypeError::NotOnInt(v));
            }
            Partial::Known(Value::Bool(!v.as_bool("!")?))
        }
        Expr::Binary(op, lhs, rhs) => {
            let l = eval_partial(mem, lhs)?;
            let r = eval_partial(mem, rhs)?;
            let v = match op {
                BinOp::Add => Value::Int(l.as_int("+")?.saturating_add(r.as_int("+")?)),
                BinOp::Monus => Value::Int(l.as_int("-")?.saturating_sub(r.as_int("-")?)),
                BinOp::Lt => Value::Bool(l.as_int("<")? < r.as_int("<")?),
                BinOp::And => Value::Bool(l.as_bool("&&")? && r.as_bool("&&")?),
                BinOp::Or => Value::Bool(l.as_bool("||")? || r.as_bool("||")?),
                BinOp::Eq => Value::Bool(eval_eq(l, r)?),
            };
            Partial::Known(v)
        }
    })
}

fn eval_eq(l: Partial, r: Partial) -> Result<bool, TypeError> {
    Ok(match (l, r) {
        (Partial::Initial, Partial::Initial) => true,
        (Partial::Initial, Partial::Known(v)) | (Partial::Known(v), Partial::Initial) => {
            v == Value::initial(v.kind())
        }
        (Partial::Known(a), Partial::Known(b)) => {
            if a.kind() != b.kind() {
                return Err(TypeError::MixedEquality(a, b));
            }
            a == b
        }
    })
}

/// Evaluate an expression to a value.
pub fn eval_expr(mem: &Memory, e: &Expr) -> Result<Value, TypeError> {
    Ok(eval_partial(mem, e)?.resolve())
}

/// Evaluate a guard; a non-boolean result is a type error.
pub fn eval_guard(mem: &Memory, e: &Expr) -> Result<bool, TypeError> {
    match eval_partial(mem, e)? {
        Partial::Known(Value::Bool(b)) => Ok(b),
        Partial::Known(v @ Value::Int(_)) => Err(TypeError::NonBooleanGuard(v)),
        Partial::Initial => Ok(false),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parser::parse_expr_str;

    fn eval(mem: &Memory, src: &str) -> Result<Value, TypeError> {
        eval_expr(mem, &parse_expr_str(src).unwrap())
    }

    #[test]
    fn negation_of_bound_bool() {
        let mem = Memory::new().with("h1", Value::Bool(true));
        assert_eq!(eval(&mem, "!h1"), Ok(Value::Bool(false)));
    }

    #[test]
    fn addition_over_memory() {
        let mem = Memory::new()
            .with("l2", Value::Int(2))
            .with("h2", Value::Int(0));
        assert_eq!(eval(&mem, "l2 + h2"), Ok(Value::Int(2)));
    }

    #[test]
    fn unbound_reads_initial() {
        let mem = Memory::new();
        assert_eq!(eval(&mem, "x + 1"), Ok(Value::Int(1)));
        assert_eq!(eval(&mem, "!x"), Ok(Value::Bool(true)));
        assert_eq!(eval_guard(&mem, &parse_expr_str("x").unwrap()), Ok(false));
    }

    #[test]
    fn kind_errors_are_reported() {
        let mem = Memory::new().with("n", Value::Int(3));
        assert!(matches!(eval(&mem, "!n"), Err(TypeError::NotOnInt(_))));
        assert!(matches!(
            eval(&mem, "n && T"),
            Err(TypeError::WrongKind { .. })
        ));
        assert!(matches!(
            eval(&mem, "n == T"),
            Err(TypeError::MixedEquality(_, _))
        ));
        assert!(matches!(
            eval_guard(&mem, &parse_expr_str("n").unwrap()),
            Err(TypeError::NonBooleanGuard(_))
        ));
    }

    #[test]
    fn monus_truncates_at_zero() {
        let mem = Memory::new();
        assert_eq!(eval(&mem, "2 - 5"), Ok(Value::Int(0)));
        assert_eq!(eval(&mem, "5 - 2"), Ok(Value::Int(3)));
    }
}
