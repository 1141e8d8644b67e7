//! Small-step execution of standalone controlled programs.
//!
//! The input queue is consumed strictly from the head: an `input x from c`
//! fires only when the first queue item is defined on `c`. A finished
//! program with residual input is reported separately from termination,
//! which requires the residual to be empty.

use crate::lang::ast::{Program, Stmt};
use crate::lang::channel::ChannelName;
use crate::lang::eval::{eval_expr, eval_guard, Memory, TypeError};
use crate::lang::queue::{IoItem, IoQueue};
use serde::{Deserialize, Serialize};

/// Execution configuration: program, memory, input queue, output queue.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProgConfig {
    pub prg: Stmt,
    pub mem: Memory,
    pub input: IoQueue,
    pub output: IoQueue,
}

impl ProgConfig {
    pub fn initial(prg: Program, input: IoQueue) -> Self {
        ProgConfig {
            prg,
            mem: Memory::new(),
            input,
            output: IoQueue::new(),
        }
    }
}

/// The rule applied by one step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ProgRule {
    Assign,
    IfTrue,
    IfFalse,
    WhileTrue,
    WhileFalse,
    SkipSeq,
    Input,
    Output,
}

/// Why a configuration cannot step.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StuckReason {
    /// `input` waiting on `channel`: the queue is empty or its head item is
    /// on a different channel.
    BlockedInput { channel: ChannelName },
    /// A kind error in an expression.
    TypeError { message: String },
}

impl std::fmt::Display for StuckReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StuckReason::BlockedInput { channel } => {
                write!(f, "input blocked on channel `{channel}`")
            }
            StuckReason::TypeError { message } => write!(f, "type error: {message}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepOutcome {
    Stepped {
        config: ProgConfig,
        rule: ProgRule,
    },
    /// Only `skip` remains.
    Finished,
    Stuck(StuckReason),
}

/// Apply exactly one small-step rule.
pub fn step_program(cfg: &ProgConfig) -> StepOutcome {
    let mut mem = cfg.mem.clone();
    let mut input = cfg.input.clone();
    let mut output = cfg.output.clone();
    match step_stmt(&cfg.prg, &mut mem, &mut input, &mut output) {
        Ok(Some((prg, rule))) => StepOutcome::Stepped {
            config: ProgConfig {
                prg,
                mem,
                input,
                output,
            },
            rule,
        },
        Ok(None) => StepOutcome::Finished,
        Err(reason) => StepOutcome::Stuck(reason),
    }
}

/// Step the head instruction of `stmt`, mutating memory and queues.
/// `Ok(None)` means the statement is `skip` with nothing left to run.
fn step_stmt(
    stmt: &Stmt,
    mem: &mut Memory,
    input: &mut IoQueue,
    output: &mut IoQueue,
) -> Result<Option<(Stmt, ProgRule)>, StuckReason> {
    match stmt {
        Stmt::Skip => Ok(None),
        Stmt::Seq(first, rest) => {
            if first.is_terminated() {
                return Ok(Some(((**rest).clone(), ProgRule::SkipSeq)));
            }
            match step_stmt(first, mem, input, output)? {
                Some((first2, rule)) => Ok(Some((Stmt::seq(first2, (**rest).clone()), rule))),
                None => unreachable!("non-skip statement reported finished"),
            }
        }
        Stmt::Assign(x, e) => {
            let v = eval_expr(mem, e).map_err(type_error)?;
            mem.set(x.clone(), v);
            Ok(Some((Stmt::Skip, ProgRule::Assign)))
        }
        Stmt::If(guard, then_branch, else_branch) => {
            let b = eval_guard(mem, guard).map_err(type_error)?;
            let (branch, rule) = if b {
                (then_branch, ProgRule::IfTrue)
            } else {
                (else_branch, ProgRule::IfFalse)
            };
            Ok(Some(((**branch).clone(), rule)))
        }
        Stmt::While(guard, body) => {
            let b = eval_guard(mem, guard).map_err(type_error)?;
            if b {
                Ok(Some((
                    Stmt::seq((**body).clone(), stmt.clone()),
                    ProgRule::WhileTrue,
                )))
            } else {
                Ok(Some((Stmt::Skip, ProgRule::WhileFalse)))
            }
        }
        Stmt::Input { var, channel } => match input.head() {
            Some(item) if item.channel == *channel => {
                let item = input.pop_head().expect("head exists");
                mem.set(var.clone(), item.value);
                Ok(Some((Stmt::Skip, ProgRule::Input)))
            }
            _ => Err(StuckReason::BlockedInput {
                channel: channel.clone(),
            }),
        },
        Stmt::Output { expr, channel } => {
            let v = eval_expr(mem, expr).map_err(type_error)?;
            output.push(IoItem::new(channel.clone(), v));
            Ok(Some((Stmt::Skip, ProgRule::Output)))
        }
    }
}

fn type_error(e: TypeError) -> StuckReason {
    StuckReason::TypeError {
        message: e.to_string(),
    }
}

/// Final classification of a bounded run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    /// The program reached `skip` with the whole input consumed.
    Terminated {
        output: IoQueue,
    },
    /// The program reached `skip` but input items remain.
    FinishedWithResidual {
        output: IoQueue,
        residual: IoQueue,
    },
    Stuck {
        reason: StuckReason,
    },
    BudgetExceeded {
        steps: u64,
    },
}

impl Outcome {
    pub fn terminated_output(&self) -> Option<&IoQueue> {
        match self {
            Outcome::Terminated { output } => Some(output),
            _ => None,
        }
    }
}

/// Run to a fixpoint or until `budget` steps have been spent.
/// Deterministic: the same program and input always yield the same outcome.
pub fn run_program(prg: &Program, input: &IoQueue, budget: u64) -> Outcome {
    run_config(ProgConfig::initial(prg.clone(), input.clone()), budget)
}

pub fn run_config(mut cfg: ProgConfig, budget: u64) -> Outcome {
    let mut steps = 0u64;
    loop {
        match step_program(&cfg) {
            StepOutcome::Finished => {
                return if cfg.input.is_empty() {
                    Outcome::Terminated { output: cfg.output }
                } else {
                    Outcome::FinishedWithResidual {
                        output: cfg.output,
                        residual: cfg.input,
                    }
                };
            }
            StepOutcome::Stuck(reason) => return Outcome::Stuck { reason },
            StepOutcome::Stepped { config, .. } => {
                cfg = config;
                steps += 1;
                if steps >= budget {
                    return Outcome::BudgetExceeded { steps };
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parser::parse_program;
    use crate::lang::value::Value;

    fn q(items: &[(&str, Value)]) -> IoQueue {
        items.iter().map(|(c, v)| IoItem::new(*c, *v)).collect()
    }

    const FIG8: &str = "\
input h1 from cH1;
input l1 from cL1;
if !h1 then { l1 := !l1 };
input l2 from cL2;
h2 := 0;
if l1 then { input h2 from cH2 };
output l2 + h2 to cH3;
output l2 + h2 to cL3";

    #[test]
    fn skip_in_sequence_steps_to_rest() {
        let p = parse_program("skip; x := 1").unwrap();
        let cfg = ProgConfig::initial(p, IoQueue::new());
        match step_program(&cfg) {
            StepOutcome::Stepped { config, rule } => {
                assert_eq!(rule, ProgRule::SkipSeq);
                assert_eq!(config.prg, parse_program("x := 1").unwrap());
            }
            other => panic!("unexpected: {other:?}"),
        }
    }

    #[test]
    fn input_consumes_head_item() {
        let p = parse_program("input x from cH1").unwrap();
        let cfg = ProgConfig::initial(p, q(&[("cH1", Value::Bool(true))]));
        match step_program(&cfg) {
            StepOutcome::Stepped { config, rule } => {
                assert_eq!(rule, ProgRule::Input);
                assert_eq!(config.prg, Stmt::Skip);
                assert_eq!(config.mem.get("x"), Some(Value::Bool(true)));
                assert!(config.input.is_empty());
            }
            other => panic!("unexpected: {other:?}"),
        }
    }

    #[test]
    fn input_requires_head_on_requested_channel() {
        let p = parse_program("input x from cH1").unwrap();
        let cfg = ProgConfig::initial(
            p,
            q(&[("cL1", Value::Bool(false)), ("cH1", Value::Bool(true))]),
        );
        assert_eq!(
            step_program(&cfg),
            StepOutcome::Stuck(StuckReason::BlockedInput {
                channel: "cH1".into()
            })
        );
    }

    #[test]
    fn running_example_terminates_on_three_items() {
        let p = parse_program(FIG8).unwrap();
        let input = q(&[
            ("cH1", Value::Bool(true)),
            ("cL1", Value::Bool(false)),
            ("cL2", Value::Int(2)),
        ]);
        let outcome = run_program(&p, &input, 1000);
        assert_eq!(
            outcome,
            Outcome::Terminated {
                output: q(&[("cH3", Value::Int(2)), ("cL3", Value::Int(2))])
            }
        );
    }

    #[test]
    fn running_example_leaves_unread_high_item() {
        let p = parse_program(FIG8).unwrap();
        let input = q(&[
            ("cH1", Value::Bool(true)),
            ("cL1", Value::Bool(false)),
            ("cL2", Value::Int(2)),
            ("cH2", Value::Int(7)),
        ]);
        let outcome = run_program(&p, &input, 1000);
        assert_eq!(
            outcome,
            Outcome::FinishedWithResidual {
                output: q(&[("cH3", Value::Int(2)), ("cL3", Value::Int(2))]),
                residual: q(&[("cH2", Value::Int(7))]),
            }
        );
    }

    #[test]
    fn divergence_hits_budget() {
        let p = parse_program("while T do { skip }").unwrap();
        let outcome = run_program(&p, &IoQueue::new(), 100);
        assert_eq!(outcome, Outcome::BudgetExceeded { steps: 100 });
    }

    #[test]
    fn guard_kind_error_is_stuck() {
        let p = parse_program("x := 1; if x then { skip }").unwrap();
        match run_program(&p, &IoQueue::new(), 100) {
            Outcome::Stuck {
                reason: StuckReason::TypeError { .. },
            } => {}
            other => panic!("unexpected: {other:?}"),
        }
    }

    #[test]
    fn determinism() {
        let p = parse_program(FIG8).unwrap();
        let input = q(&[
            ("cH1", Value::Bool(false)),
            ("cL1", Value::Bool(true)),
            ("cL2", Value::Int(5)),
        ]);
        assert_eq!(run_program(&p, &input, 1000), run_program(&p, &input, 1000));
    }
}
