//! The controlled language: values, channels, I/O queues, abstract syntax,
//! concrete grammar, and the standalone small-step interpreter.

pub mod ast;
pub mod channel;
pub mod eval;
pub mod gen;
pub mod lexer;
pub mod machine;
pub mod parser;
pub mod pretty;
pub mod queue;
pub mod value;

pub use ast::{BinOp, Expr, Program, Stmt, UnOp, VarName};
pub use channel::{Channel, ChannelEnv, ChannelEnvError, ChannelName, Direction, Level};
pub use eval::{eval_expr, eval_guard, Memory, TypeError};
pub use lexer::SyntaxError;
pub use machine::{
    run_program, step_program, Outcome, ProgConfig, ProgRule, StepOutcome, StuckReason,
};
pub use parser::parse_program;
pub use pretty::{pretty_expr, pretty_program};
pub use queue::{channel_eq, channel_eq_all, low_eq, IoItem, IoQueue};
pub use value::{Kind, Value};
