//! Abstract syntax of the controlled language.

use crate::lang::channel::{ChannelEnv, ChannelEnvError, ChannelName, Direction};
use crate::lang::value::Value;
use serde::{Deserialize, Serialize};

pub type VarName = String;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum UnOp {
    /// Boolean negation `!`.
    Not,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BinOp {
    /// Integer addition.
    Add,
    /// Truncated subtraction: `a - b` is 0 when `b > a`.
    Monus,
    /// Equality on two values of the same kind.
    Eq,
    /// Integer less-than.
    Lt,
    And,
    Or,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Expr {
    Lit(Value),
    Var(VarName),
    Unary(UnOp, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn var(name: impl Into<VarName>) -> Expr {
        Expr::Var(name.into())
    }

    pub fn negate(e: Expr) -> Expr {
        Expr::Unary(UnOp::Not, Box::new(e))
    }

    pub fn bin(op: BinOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Binary(op, Box::new(lhs), Box::new(rhs))
    }
}

/// Program statements. A program is a statement; sequencing is right-nested
/// (`a; b; c` parses as `Seq(a, Seq(b, c))`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Stmt {
    Skip,
    Assign(VarName, Expr),
    Seq(Box<Stmt>, Box<Stmt>),
    If(Expr, Box<Stmt>, Box<Stmt>),
    While(Expr, Box<Stmt>),
    Input { var: VarName, channel: ChannelName },
    Output { expr: Expr, channel: ChannelName },
}

impl Stmt {
    pub fn seq(first: Stmt, second: Stmt) -> Stmt {
        Stmt::Seq(Box::new(first), Box::new(second))
    }

    /// Right-nested sequence of the given statements; a single statement is
    /// returned as-is and an empty list becomes `skip`.
    pub fn seq_all(stmts: Vec<Stmt>) -> Stmt {
        let mut iter = stmts.into_iter().rev();
        let last = match iter.next() {
            Some(s) => s,
            None => return Stmt::Skip,
        };
        iter.fold(last, |acc, s| Stmt::seq(s, acc))
    }

    /// The leftmost instruction to execute next.
    pub fn head(&self) -> &Stmt {
        match self {
            Stmt::Seq(first, _) => first.head(),
            other => other,
        }
    }

    /// A program is terminated when only `skip` remains.
    pub fn is_terminated(&self) -> bool {
        matches!(self, Stmt::Skip)
    }

    /// Every channel referenced by an `input`/`output`, with the direction of use.
    pub fn channel_uses(&self) -> Vec<(ChannelName, Direction)> {
        let mut out = Vec::new();
        self.collect_channel_uses(&mut out);
        out
    }

    fn collect_channel_uses(&self, out: &mut Vec<(ChannelName, Direction)>) {
        match self {
            Stmt::Skip | Stmt::Assign(_, _) => {}
            Stmt::Seq(a, b) => {
                a.collect_channel_uses(out);
                b.collect_channel_uses(out);
            }
            Stmt::If(_, t, e) => {
                t.collect_channel_uses(out);
                e.collect_channel_uses(out);
            }
            Stmt::While(_, body) => body.collect_channel_uses(out),
            Stmt::Input { channel, .. } => out.push((channel.clone(), Direction::In)),
            Stmt::Output { channel, .. } => out.push((channel.clone(), Direction::Out)),
        }
    }

    /// Load-time check: every `input` targets a declared in-channel and every
    /// `output` a declared out-channel.
    pub fn check_channels(&self, env: &ChannelEnv) -> Result<(), ChannelEnvError> {
        for (name, dir) in self.channel_uses() {
            env.check_use(&name, dir)?;
        }
        Ok(())
    }
}

/// A controlled program is a statement.
pub type Program = Stmt;
