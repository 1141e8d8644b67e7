//! Multi-execution runtime enforcement of information-flow policies.
//!
//! The crate has four layers:
//!
//! - [`lang`]: the controlled language — parsing, queues, and the standalone
//!   small-step interpreter.
//! - [`em`]: the enforcement machine — local executions, the MAP and REDUCE
//!   components, privilege tables, scheduling, replay, and exhaustive
//!   interleaving exploration.
//! - [`policies`]: the shipped policy configurations (NI, RI, DI, SubDI),
//!   the handler mini-DSL they are written in, and user policy files.
//! - [`oracle`]: brute-force bounded checkers for the information-flow
//!   properties themselves (TINI, TSNI, RI, DI), with replayable witnesses.

pub mod em;
pub mod harness;
pub mod io;
pub mod lang;
pub mod oracle;
pub mod policies;
pub mod rng;
