//! Handler templates: the mini-DSL form policies are written in.
//!
//! A template is a handler program over two symbolic parameters, the
//! requesting execution `i` and the requested channel `c`. Component
//! activation substitutes the concrete request, folding level and index
//! tests to constants and resolving `default(c)` to the channel's default
//! value.

use crate::em::config::PrivTemplate;
use crate::em::handler::{HandlerCond, HandlerStmt, Predicate, Privilege, TableSide};
use crate::lang::ast::{BinOp, Expr, UnOp, VarName};
use crate::lang::channel::{ChannelEnv, ChannelName, Level};
use crate::lang::value::Value;

/// A channel position: the requested channel `c` or a concrete name.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ChanRef {
    Requested,
    Named(ChannelName),
}

/// An execution-index position: the requester `i` or a concrete index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExecRef {
    Requester,
    Index(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TemplateExpr {
    Lit(Value),
    Var(VarName),
    /// `default(c)`: the default value of the referenced channel.
    Default(ChanRef),
    Unary(UnOp, Box<TemplateExpr>),
    Binary(BinOp, Box<TemplateExpr>, Box<TemplateExpr>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TemplatePred {
    CanTell(ChanRef),
    IsReady(ChanRef),
    Identical(ExecRef),
    IsWaitingInput,
    IsWaitingOutput,
    Not(Box<TemplatePred>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TemplateCond {
    Priv {
        side: TableSide,
        privilege: Privilege,
        exec: ExecRef,
        channel: ChanRef,
    },
    /// `level(c) == H` / `level(c) == L`
    LevelIs(ChanRef, Level),
    /// `i == n`
    RequesterIs(usize),
    Expr(TemplateExpr),
    Not(Box<TemplateCond>),
    And(Box<TemplateCond>, Box<TemplateCond>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TemplateStmt {
    Skip,
    Assign(VarName, TemplateExpr),
    Seq(Box<TemplateStmt>, Box<TemplateStmt>),
    If(TemplateCond, Box<TemplateStmt>, Box<TemplateStmt>),
    While(TemplateCond, Box<TemplateStmt>),
    Input {
        var: VarName,
        channel: ChanRef,
    },
    MapSend {
        expr: TemplateExpr,
        channel: ChanRef,
        pred: TemplatePred,
    },
    Wake(TemplatePred),
    /// `clone(pred, PRIV_TM, PRIV_TR)` — the privilege templates are the
    /// policy's clone templates, bound at instantiation.
    CloneExec {
        pred: TemplatePred,
    },
    Retrieve {
        var: VarName,
        exec: ExecRef,
        channel: ChanRef,
    },
    Output {
        expr: TemplateExpr,
        channel: ChanRef,
    },
    Clean {
        channel: ChanRef,
        pred: TemplatePred,
    },
}

impl TemplateStmt {
    pub fn seq_all(stmts: Vec<TemplateStmt>) -> TemplateStmt {
        let mut iter = stmts.into_iter().rev();
        let last = match iter.next() {
            Some(s) => s,
            None => return TemplateStmt::Skip,
        };
        iter.fold(last, |acc, s| TemplateStmt::Seq(Box::new(s), Box::new(acc)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InstantiateError {
    #[error("handler references undeclared channel `{0}`")]
    UndeclaredChannel(ChannelName),
}

/// Concrete request a template is instantiated against.
pub struct Instantiation<'a> {
    pub requester: usize,
    pub channel: &'a str,
    pub env: &'a ChannelEnv,
    pub clone_priv_tm: &'a PrivTemplate,
    pub clone_priv_tr: &'a PrivTemplate,
}

impl Instantiation<'_> {
    fn chan(&self, r: &ChanRef) -> Result<ChannelName, InstantiateError> {
        let name = match r {
            ChanRef::Requested => self.channel.to_string(),
            ChanRef::Named(n) => n.clone(),
        };
        if self.env.get(&name).is_none() {
            return Err(InstantiateError::UndeclaredChannel(name));
        }
        Ok(name)
    }

    fn exec(&self, r: &ExecRef) -> usize {
        match r {
            ExecRef::Requester => self.requester,
            ExecRef::Index(n) => *n,
        }
    }

    fn expr(&self, e: &TemplateExpr) -> Result<Expr, InstantiateError> {
        Ok(match e {
            TemplateExpr::Lit(v) => Expr::Lit(*v),
            TemplateExpr::Var(x) => Expr::Var(x.clone()),
            TemplateExpr::Default(r) => {
                let name = self.chan(r)?;
                let v = self
                    .env
                    .default_value(&name)
                    .ok_or(InstantiateError::UndeclaredChannel(name))?;
                Expr::Lit(v)
            }
            TemplateExpr::Unary(op, inner) => Expr::Unary(*op, Box::new(self.expr(inner)?)),
            TemplateExpr::Binary(op, lhs, rhs) => {
                Expr::Binary(*op, Box::new(self.expr(lhs)?), Box::new(self.expr(rhs)?))
            }
        })
    }

    fn pred(&self, p: &TemplatePred) -> Result<Predicate, InstantiateError> {
        Ok(match p {
            TemplatePred::CanTell(r) => Predicate::CanTell(self.chan(r)?),
            TemplatePred::IsReady(r) => Predicate::IsReady(self.chan(r)?),
            TemplatePred::Identical(r) => Predicate::Identical(self.exec(r)),
            TemplatePred::IsWaitingInput => Predicate::IsWaitingInput,
            TemplatePred::IsWaitingOutput => Predicate::IsWaitingOutput,
            TemplatePred::Not(inner) => Predicate::Not(Box::new(self.pred(inner)?)),
        })
    }

    fn cond(&self, c: &TemplateCond) -> Result<HandlerCond, InstantiateError> {
        Ok(match c {
            TemplateCond::Priv {
                side,
                privilege,
                exec,
                channel,
            } => HandlerCond::Priv {
                side: *side,
                privilege: *privilege,
                exec: self.exec(exec),
                channel: self.chan(channel)?,
            },
            TemplateCond::LevelIs(r, level) => {
                let name = self.chan(r)?;
                HandlerCond::Const(self.env.level(&name) == Some(*level))
            }
            TemplateCond::RequesterIs(n) => HandlerCond::Const(self.requester == *n),
            TemplateCond::Expr(e) => HandlerCond::Expr(self.expr(e)?),
            TemplateCond::Not(inner) => HandlerCond::Not(Box::new(self.cond(inner)?)),
            TemplateCond::And(a, b) => {
                HandlerCond::And(Box::new(self.cond(a)?), Box::new(self.cond(b)?))
            }
        })
    }

    pub fn stmt(&self, s: &TemplateStmt) -> Result<HandlerStmt, InstantiateError> {
        Ok(match s {
            TemplateStmt::Skip => HandlerStmt::Skip,
            TemplateStmt::Assign(x, e) => HandlerStmt::Assign(x.clone(), self.expr(e)?),
            TemplateStmt::Seq(a, b) => {
                HandlerStmt::Seq(Box::new(self.stmt(a)?), Box::new(self.stmt(b)?))
            }
            TemplateStmt::If(c, t, e) => HandlerStmt::If(
                self.cond(c)?,
                Box::new(self.stmt(t)?),
                Box::new(self.stmt(e)?),
            ),
            TemplateStmt::While(c, body) => {
                HandlerStmt::While(self.cond(c)?, Box::new(self.stmt(body)?))
            }
            TemplateStmt::Input { var, channel } => HandlerStmt::Input {
                var: var.clone(),
                channel: self.chan(channel)?,
            },
            TemplateStmt::MapSend {
                expr,
                channel,
                pred,
            } => HandlerStmt::MapSend {
                expr: self.expr(expr)?,
                channel: self.chan(channel)?,
                pred: self.pred(pred)?,
            },
            TemplateStmt::Wake(p) => HandlerStmt::Wake(self.pred(p)?),
            TemplateStmt::CloneExec { pred } => HandlerStmt::CloneExec {
                pred: self.pred(pred)?,
                priv_tm: self.clone_priv_tm.clone(),
                priv_tr: self.clone_priv_tr.clone(),
            },
            TemplateStmt::Retrieve { var, exec, channel } => HandlerStmt::Retrieve {
                var: var.clone(),
                exec: self.exec(exec),
                channel: self.chan(channel)?,
            },
            TemplateStmt::Output { expr, channel } => HandlerStmt::Output {
                expr: self.expr(expr)?,
                channel: self.chan(channel)?,
            },
            TemplateStmt::Clean { channel, pred } => HandlerStmt::Clean {
                channel: self.chan(channel)?,
                pred: self.pred(pred)?,
            },
        })
    }
}
