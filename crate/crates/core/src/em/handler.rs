//! Instantiated MAP/REDUCE handler programs.
//!
//! Policies carry handler *templates* over two parameters: the requesting
//! execution index `i` and the requested channel `c` (see
//! [`crate::policies::template`]). Activation substitutes concrete values,
//! producing the `HandlerStmt` form executed here. Table-membership guards
//! stay symbolic because the tables grow at runtime; level and index tests
//! fold to constants at instantiation.

use crate::em::config::{PrivCell, PrivTemplate};
use crate::lang::ast::{Expr, VarName};
use crate::lang::channel::ChannelName;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TableSide {
    Map,
    Reduce,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Privilege {
    Ask,
    Tell,
}

impl Privilege {
    pub fn held(&self, cell: PrivCell) -> bool {
        match self {
            Privilege::Ask => cell.ask,
            Privilege::Tell => cell.tell,
        }
    }
}

/// Predicates over local executions, evaluated against one execution plus
/// the privilege tables.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Predicate {
    /// tell ∈ T_M[x][channel]
    CanTell(ChannelName),
    /// Sleeping on `input _ from channel` with a matching item available.
    IsReady(ChannelName),
    /// x == index
    Identical(usize),
    /// Sleeping with an input-channel signal matching the head instruction.
    IsWaitingInput,
    /// Sleeping with an output-channel signal.
    IsWaitingOutput,
    Not(Box<Predicate>),
}

/// Guard of a handler `if`/`while`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum HandlerCond {
    /// `ask`/`tell` membership in a table cell.
    Priv {
        side: TableSide,
        privilege: Privilege,
        exec: usize,
        channel: ChannelName,
    },
    /// Level and index tests, folded at instantiation time.
    Const(bool),
    /// Boolean expression over the handler memory.
    Expr(Expr),
    Not(Box<HandlerCond>),
    And(Box<HandlerCond>, Box<HandlerCond>),
}

/// One handler instruction (or composite). MAP handlers may use `Input`,
/// `MapSend`, `Wake`, and `CloneExec`; REDUCE handlers `Retrieve`,
/// `Output`, `Wake`, and `Clean`; both share skip/assign/sequence/if/while.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum HandlerStmt {
    Skip,
    Assign(VarName, Expr),
    Seq(Box<HandlerStmt>, Box<HandlerStmt>),
    If(HandlerCond, Box<HandlerStmt>, Box<HandlerStmt>),
    While(HandlerCond, Box<HandlerStmt>),
    /// Read from the global input queue (MAP side).
    Input {
        var: VarName,
        channel: ChannelName,
    },
    /// Broadcast a value as a `channel` item to every execution satisfying
    /// the predicate.
    MapSend {
        expr: Expr,
        channel: ChannelName,
        pred: Predicate,
    },
    Wake(Predicate),
    /// Duplicate every execution satisfying the predicate; new table
    /// columns come from the embedded privilege templates.
    CloneExec {
        pred: Predicate,
        priv_tm: PrivTemplate,
        priv_tr: PrivTemplate,
    },
    /// Read (without removing) the first `channel` item of execution
    /// `exec`'s local output queue (REDUCE side).
    Retrieve {
        var: VarName,
        exec: usize,
        channel: ChannelName,
    },
    /// Append to the global output queue (REDUCE side).
    Output {
        expr: Expr,
        channel: ChannelName,
    },
    /// Remove the first `channel` item from the local output queue of every
    /// execution satisfying the predicate.
    Clean {
        channel: ChannelName,
        pred: Predicate,
    },
}

impl HandlerStmt {
    pub fn seq(first: HandlerStmt, second: HandlerStmt) -> HandlerStmt {
        HandlerStmt::Seq(Box::new(first), Box::new(second))
    }

    pub fn seq_all(stmts: Vec<HandlerStmt>) -> HandlerStmt {
        let mut iter = stmts.into_iter().rev();
        let last = match iter.next() {
            Some(s) => s,
            None => return HandlerStmt::Skip,
        };
        iter.fold(last, |acc, s| HandlerStmt::seq(s, acc))
    }

    pub fn is_terminated(&self) -> bool {
        matches!(self, HandlerStmt::Skip)
    }

    pub fn head(&self) -> &HandlerStmt {
        match self {
            HandlerStmt::Seq(first, _) => first.head(),
            other => other,
        }
    }
}
