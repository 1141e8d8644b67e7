//! The enforcement machine: local executions, MAP/REDUCE components,
//! privilege tables, scheduling, replay, and interleaving exploration.

pub mod config;
pub mod explore;
pub mod handler;
pub mod rules;
pub mod run;
pub mod trace;

pub use config::{
    EmConfig, ExecState, HandlerRule, LocalExec, LocalRule, PrivCell, PrivTable, PrivTemplate,
    TableTemplate, TransitionLabel,
};
pub use explore::{explore, ExploreClass, ExploreResult};
pub use handler::{HandlerCond, HandlerStmt, Predicate, Privilege, TableSide};
pub use rules::{apply_transition, enabled, eval_predicate, init_em, EmError, EmEvent, InitError};
pub use run::{
    run_enforced, run_from, ExecutionSnapshot, GlobalOutputRecord, RunError, RunOutcome, RunResult,
    SchedulerPolicy, TimedEvent,
};
pub use trace::{render_run_tables, TraceDoc, TraceMeta};
