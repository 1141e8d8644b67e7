//! Transition rules of the enforcement machine.
//!
//! One run is an interleaving of atomic transitions: small steps of local
//! executions, activations of MAP/REDUCE on pending interrupt signals, and
//! single instructions of the running handler programs. `enabled` lists
//! exactly the labels whose rule premises hold; `apply_transition` applies
//! one of them, returning the successor configuration and the
//! instrumentation events the step produced.
//!
//! Global reads, local input consumption, and output retrieval all use the
//! dequeue-by-channel operator: the first item *on the requested channel*
//! is taken, independently of what other channels sit ahead of it. This is
//! what lets the machine consume a merged multi-channel stream in a
//! different total order than the controlled program would, while
//! preserving per-channel order.

use crate::em::config::{
    ComponentConfig, EmConfig, ExecState, HandlerRule, LocalExec, LocalRule, PrivTable,
    TransitionLabel,
};
use crate::em::handler::{HandlerCond, HandlerStmt, Predicate, TableSide};
use crate::lang::ast::Stmt;
use crate::lang::channel::{ChannelEnv, ChannelEnvError, ChannelName, Direction};
use crate::lang::eval::{eval_expr, eval_guard, Memory, TypeError};
use crate::lang::queue::{IoItem, IoQueue};
use crate::policies::template::{InstantiateError, Instantiation};
use crate::policies::{PolicyConfig, PolicyError};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Instrumentation record for one transition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum EmEvent {
    /// MAP consumed a global input item while serving `exec`'s request.
    GlobalRead {
        exec: usize,
        channel: ChannelName,
        value: crate::lang::value::Value,
    },
    /// REDUCE appended a global output item while serving `exec`'s request.
    GlobalWrite {
        exec: usize,
        channel: ChannelName,
        value: crate::lang::value::Value,
    },
    /// MAP delivered an item to `exec`'s local input queue.
    Delivered {
        exec: usize,
        channel: ChannelName,
        value: crate::lang::value::Value,
    },
    /// A local execution emitted an item into its own output queue.
    LocalOutput {
        exec: usize,
        channel: ChannelName,
        value: crate::lang::value::Value,
    },
    MapActivated {
        exec: usize,
        channel: ChannelName,
    },
    ReduceActivated {
        exec: usize,
        channel: ChannelName,
    },
    Cloned {
        source: usize,
        new_index: usize,
    },
    Woken {
        exec: usize,
    },
    Retrieved {
        exec: usize,
        channel: ChannelName,
        value: crate::lang::value::Value,
    },
    Cleaned {
        exec: usize,
        channel: ChannelName,
    },
    /// A handler is parked on a global read with no matching item.
    BlockedGlobalRead {
        exec: usize,
        channel: ChannelName,
    },
    /// A handler is parked on a retrieve with no matching item.
    BlockedRetrieve {
        exec: usize,
        channel: ChannelName,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EmError {
    #[error("transition {0} is not enabled")]
    NotEnabled(String),
    #[error("handler instantiation failed: {0}")]
    Instantiate(#[from] InstantiateError),
    #[error("component busy without a recorded request")]
    MissingRequest,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InitError {
    #[error(transparent)]
    Policy(#[from] PolicyError),
    #[error(transparent)]
    Channel(#[from] ChannelEnvError),
    #[error("table instantiation: {0}")]
    Table(#[from] crate::em::config::TableError),
}

/// Build the initial configuration: `initial_exec_count` copies of the
/// program, all executing with empty local queues, both components idle,
/// and the privilege tables instantiated from the policy templates.
pub fn init_em(
    prg: &Stmt,
    policy: &PolicyConfig,
    env: &ChannelEnv,
    input: &IoQueue,
) -> Result<EmConfig, InitError> {
    policy.validate(env)?;
    prg.check_channels(env)?;
    for item in input.iter() {
        env.check_use(&item.channel, Direction::In)?;
        env.check_kind(&item.channel, item.value)?;
    }
    let n = policy.initial_exec_count;
    let t_m = PrivTable::instantiate(&policy.t_m, env, Direction::In, n)?;
    let t_r = PrivTable::instantiate(&policy.t_r, env, Direction::Out, n)?;
    Ok(EmConfig {
        channels: Arc::new(env.clone()),
        policy: Arc::new(policy.clone()),
        t_m: Arc::new(t_m),
        t_r: Arc::new(t_r),
        map: ComponentConfig::idle(),
        red: ComponentConfig::idle(),
        input: input.clone(),
        output: IoQueue::new(),
        execs: (0..n)
            .map(|_| Arc::new(LocalExec::initial(prg.clone())))
            .collect(),
    })
}

/// Evaluate a predicate on execution `x` of the configuration.
pub fn eval_predicate(pred: &Predicate, x: usize, cfg: &EmConfig) -> bool {
    let Some(exec) = cfg.execs.get(x) else {
        return false;
    };
    match pred {
        Predicate::CanTell(channel) => cfg.t_m.cell(channel, x).tell,
        Predicate::IsReady(channel) => {
            exec.state == ExecState::S
                && matches!(exec.prg.head(), Stmt::Input { channel: c, .. } if c == channel)
                && exec.input.peek(channel).is_some()
        }
        Predicate::Identical(i) => x == *i,
        Predicate::IsWaitingInput => is_waiting_input(cfg, x).is_some(),
        Predicate::IsWaitingOutput => is_waiting_output(cfg, x).is_some(),
        Predicate::Not(inner) => !eval_predicate(inner, x, cfg),
    }
}

/// The channel `x` is sleeping on, when its signal is an input request
/// matching the head instruction.
fn is_waiting_input(cfg: &EmConfig, x: usize) -> Option<ChannelName> {
    let exec = cfg.execs.get(x)?;
    if exec.state != ExecState::S {
        return None;
    }
    let channel = exec.signal.as_ref()?;
    if cfg.channels.get(channel)?.direction != Direction::In {
        return None;
    }
    match exec.prg.head() {
        Stmt::Input { channel: c, .. } if c == channel => Some(channel.clone()),
        _ => None,
    }
}

/// The channel `x` is sleeping on, when its signal is an output request.
/// The emitting instruction has already run (it queued the item locally),
/// so only the signal identifies the request.
fn is_waiting_output(cfg: &EmConfig, x: usize) -> Option<ChannelName> {
    let exec = cfg.execs.get(x)?;
    if exec.state != ExecState::S {
        return None;
    }
    let channel = exec.signal.as_ref()?;
    if cfg.channels.get(channel)?.direction != Direction::Out {
        return None;
    }
    Some(channel.clone())
}

fn eval_cond(cond: &HandlerCond, cfg: &EmConfig, mem: &Memory) -> Result<bool, TypeError> {
    Ok(match cond {
        HandlerCond::Priv {
            side,
            privilege,
            exec,
            channel,
        } => {
            let table = match side {
                TableSide::Map => &cfg.t_m,
                TableSide::Reduce => &cfg.t_r,
            };
            privilege.held(table.cell(channel, *exec))
        }
        HandlerCond::Const(b) => *b,
        HandlerCond::Expr(e) => eval_guard(mem, e)?,
        HandlerCond::Not(inner) => !eval_cond(inner, cfg, mem)?,
        HandlerCond::And(a, b) => eval_cond(a, cfg, mem)? && eval_cond(b, cfg, mem)?,
    })
}

/// The rule a local execution would fire, or `None` when it cannot step
/// (terminated, sleeping, or stuck on a type error).
fn local_rule(cfg: &EmConfig, i: usize) -> Option<LocalRule> {
    let exec = &cfg.execs[i];
    if exec.state != ExecState::E {
        return None;
    }
    local_rule_of(&exec.prg, &exec.mem, &exec.input)
}

fn local_rule_of(stmt: &Stmt, mem: &Memory, input: &IoQueue) -> Option<LocalRule> {
    match stmt {
        Stmt::Skip => None,
        Stmt::Seq(first, _) => {
            if first.is_terminated() {
                Some(LocalRule::SkipSeq)
            } else {
                local_rule_of(first, mem, input)
            }
        }
        Stmt::Assign(_, e) => eval_expr(mem, e).ok().map(|_| LocalRule::Assign),
        Stmt::If(guard, _, _) => match eval_guard(mem, guard) {
            Ok(true) => Some(LocalRule::IfTrue),
            Ok(false) => Some(LocalRule::IfFalse),
            Err(_) => None,
        },
        Stmt::While(guard, _) => match eval_guard(mem, guard) {
            Ok(true) => Some(LocalRule::WhileTrue),
            Ok(false) => Some(LocalRule::WhileFalse),
            Err(_) => None,
        },
        Stmt::Input { channel, .. } => {
            if input.peek(channel).is_some() {
                Some(LocalRule::InputLocal)
            } else {
                Some(LocalRule::InputWait)
            }
        }
        Stmt::Output { expr, .. } => eval_expr(mem, expr).ok().map(|_| LocalRule::OutputSignal),
    }
}

/// The rule the MAP or REDUCE handler would fire next, or `None` when the
/// component is idle or its head instruction's premises fail.
fn handler_rule(cfg: &EmConfig, side: TableSide) -> Option<HandlerRule> {
    let comp = match side {
        TableSide::Map => &cfg.map,
        TableSide::Reduce => &cfg.red,
    };
    if comp.is_idle() {
        return None;
    }
    handler_rule_of(&comp.prg, cfg, &comp.mem)
}

fn handler_rule_of(stmt: &HandlerStmt, cfg: &EmConfig, mem: &Memory) -> Option<HandlerRule> {
    match stmt {
        HandlerStmt::Skip => None,
        HandlerStmt::Seq(first, _) => {
            if first.is_terminated() {
                Some(HandlerRule::SkipSeq)
            } else {
                handler_rule_of(first, cfg, mem)
            }
        }
        HandlerStmt::Assign(_, e) => eval_expr(mem, e).ok().map(|_| HandlerRule::Assign),
        HandlerStmt::If(cond, _, _) => match eval_cond(cond, cfg, mem) {
            Ok(true) => Some(HandlerRule::IfTrue),
            Ok(false) => Some(HandlerRule::IfFalse),
            Err(_) => None,
        },
        HandlerStmt::While(cond, _) => match eval_cond(cond, cfg, mem) {
            Ok(true) => Some(HandlerRule::WhileTrue),
            Ok(false) => Some(HandlerRule::WhileFalse),
            Err(_) => None,
        },
        HandlerStmt::Input { channel, .. } => {
            if cfg.input.peek(channel).is_some() {
                Some(HandlerRule::GlobalInput)
            } else {
                None
            }
        }
        HandlerStmt::MapSend { expr, .. } => {
            eval_expr(mem, expr).ok().map(|_| HandlerRule::MapSend)
        }
        HandlerStmt::Wake(_) => Some(HandlerRule::Wake),
        HandlerStmt::CloneExec { .. } => Some(HandlerRule::Clone),
        HandlerStmt::Retrieve { exec, channel, .. } => cfg
            .execs
            .get(*exec)
            .and_then(|e| e.output.peek(channel))
            .map(|_| HandlerRule::Retrieve),
        HandlerStmt::Output { expr, .. } => {
            eval_expr(mem, expr).ok().map(|_| HandlerRule::GlobalOutput)
        }
        HandlerStmt::Clean { .. } => Some(HandlerRule::Clean),
    }
}

/// All transitions whose premises hold, in canonical order: local
/// executions by index, then MAP activations (by requester index), the
/// MAP handler step, REDUCE activations, and the REDUCE handler step.
pub fn enabled(cfg: &EmConfig) -> Vec<TransitionLabel> {
    let mut labels = Vec::new();
    for i in 0..cfg.execs.len() {
        if let Some(rule) = local_rule(cfg, i) {
            labels.push(TransitionLabel::Local { exec: i, rule });
        }
    }
    if cfg.map.is_idle() {
        for i in 0..cfg.execs.len() {
            if let Some(channel) = is_waiting_input(cfg, i) {
                labels.push(TransitionLabel::MapActivate { exec: i, channel });
            }
        }
    } else if let Some(rule) = handler_rule(cfg, TableSide::Map) {
        labels.push(TransitionLabel::MapStep { rule });
    }
    if cfg.red.is_idle() {
        for i in 0..cfg.execs.len() {
            if let Some(channel) = is_waiting_output(cfg, i) {
                labels.push(TransitionLabel::ReduceActivate { exec: i, channel });
            }
        }
    } else if let Some(rule) = handler_rule(cfg, TableSide::Reduce) {
        labels.push(TransitionLabel::ReduceStep { rule });
    }
    labels
}

/// Apply one enabled transition, returning the successor and the
/// instrumentation events of the step.
pub fn apply_transition(
    cfg: &EmConfig,
    label: &TransitionLabel,
) -> Result<(EmConfig, Vec<EmEvent>), EmError> {
    let mut next = cfg.clone();
    let events = apply_transition_mut(&mut next, label)?;
    Ok((next, events))
}

/// In-place variant for drivers that own their configuration. On error the
/// configuration is left unmodified.
pub fn apply_transition_mut(
    cfg: &mut EmConfig,
    label: &TransitionLabel,
) -> Result<Vec<EmEvent>, EmError> {
    let not_enabled = || EmError::NotEnabled(label.to_string());
    let mut events = Vec::new();
    match label {
        TransitionLabel::Local { exec, rule } => {
            let actual = local_rule(cfg, *exec).ok_or_else(not_enabled)?;
            if actual != *rule {
                return Err(not_enabled());
            }
            step_local(*exec, cfg.exec_mut(*exec), &mut events);
        }
        TransitionLabel::MapActivate { exec, channel } => {
            if !cfg.map.is_idle() || is_waiting_input(cfg, *exec).as_ref() != Some(channel) {
                return Err(not_enabled());
            }
            let inst = Instantiation {
                requester: *exec,
                channel,
                env: &cfg.channels,
                clone_priv_tm: &cfg.policy.clone_priv_tm,
                clone_priv_tr: &cfg.policy.clone_priv_tr,
            };
            let handler = inst.stmt(&cfg.policy.map_handler)?;
            cfg.exec_mut(*exec).signal = None;
            cfg.map = ComponentConfig {
                prg: handler,
                mem: Memory::new(),
                request: Some((*exec, channel.clone())),
            };
            events.push(EmEvent::MapActivated {
                exec: *exec,
                channel: channel.clone(),
            });
        }
        TransitionLabel::ReduceActivate { exec, channel } => {
            if !cfg.red.is_idle() || is_waiting_output(cfg, *exec).as_ref() != Some(channel) {
                return Err(not_enabled());
            }
            let inst = Instantiation {
                requester: *exec,
                channel,
                env: &cfg.channels,
                clone_priv_tm: &cfg.policy.clone_priv_tm,
                clone_priv_tr: &cfg.policy.clone_priv_tr,
            };
            let handler = inst.stmt(&cfg.policy.reduce_handler)?;
            cfg.exec_mut(*exec).signal = None;
            cfg.red = ComponentConfig {
                prg: handler,
                mem: Memory::new(),
                request: Some((*exec, channel.clone())),
            };
            events.push(EmEvent::ReduceActivated {
                exec: *exec,
                channel: channel.clone(),
            });
        }
        TransitionLabel::MapStep { rule } => {
            let actual = handler_rule(cfg, TableSide::Map).ok_or_else(not_enabled)?;
            if actual != *rule {
                return Err(not_enabled());
            }
            step_handler(cfg, TableSide::Map, &mut events)?;
        }
        TransitionLabel::ReduceStep { rule } => {
            let actual = handler_rule(cfg, TableSide::Reduce).ok_or_else(not_enabled)?;
            if actual != *rule {
                return Err(not_enabled());
            }
            step_handler(cfg, TableSide::Reduce, &mut events)?;
        }
    }
    Ok(events)
}

/// Apply the (already validated) local rule to one execution.
fn step_local(index: usize, exec: &mut LocalExec, events: &mut Vec<EmEvent>) {
    let prg = std::mem::replace(&mut exec.prg, Stmt::Skip);
    let next = step_local_stmt(prg, index, exec, events);
    exec.prg = next;
}

fn step_local_stmt(
    stmt: Stmt,
    index: usize,
    exec: &mut LocalExec,
    events: &mut Vec<EmEvent>,
) -> Stmt {
    match stmt {
        Stmt::Seq(first, rest) => {
            if first.is_terminated() {
                *rest
            } else {
                let stepped = step_local_stmt(*first, index, exec, events);
                Stmt::seq(stepped, *rest)
            }
        }
        Stmt::Assign(x, e) => {
            let v = eval_expr(&exec.mem, &e).expect("checked by local_rule");
            exec.mem.set(x, v);
            Stmt::Skip
        }
        Stmt::If(guard, then_branch, else_branch) => {
            if eval_guard(&exec.mem, &guard).expect("checked by local_rule") {
                *then_branch
            } else {
                *else_branch
            }
        }
        Stmt::While(guard, body) => {
            if eval_guard(&exec.mem, &guard).expect("checked by local_rule") {
                Stmt::seq(*body.clone(), Stmt::While(guard, body))
            } else {
                Stmt::Skip
            }
        }
        Stmt::Input { var, channel } => match exec.input.dequeue_mut(&channel) {
            Some(v) => {
                exec.mem.set(var, v);
                Stmt::Skip
            }
            None => {
                exec.state = ExecState::S;
                exec.signal = Some(channel.clone());
                Stmt::Input { var, channel }
            }
        },
        Stmt::Output { expr, channel } => {
            let v = eval_expr(&exec.mem, &expr).expect("checked by local_rule");
            exec.output.push(IoItem::new(channel.clone(), v));
            exec.state = ExecState::S;
            events.push(EmEvent::LocalOutput {
                exec: index,
                channel: channel.clone(),
                value: v,
            });
            exec.signal = Some(channel);
            Stmt::Skip
        }
        Stmt::Skip => Stmt::Skip,
    }
}

/// Step the head instruction of a component handler.
fn step_handler(
    cfg: &mut EmConfig,
    side: TableSide,
    events: &mut Vec<EmEvent>,
) -> Result<(), EmError> {
    let comp = match side {
        TableSide::Map => &cfg.map,
        TableSide::Reduce => &cfg.red,
    };
    let requester = comp.request.as_ref().ok_or(EmError::MissingRequest)?.0;
    let prg = comp.prg.clone();
    let mem = comp.mem.clone();
    let (next_prg, next_mem) = step_handler_stmt(prg, mem, cfg, requester, events)?;
    let comp = match side {
        TableSide::Map => &mut cfg.map,
        TableSide::Reduce => &mut cfg.red,
    };
    comp.prg = next_prg;
    comp.mem = next_mem;
    if comp.prg.is_terminated() {
        // Handler done: scratch memory is reloaded on the next activation,
        // so drop it now to keep quiescent configurations canonical.
        comp.mem = Memory::new();
        comp.request = None;
    }
    Ok(())
}

fn step_handler_stmt(
    stmt: HandlerStmt,
    mut mem: Memory,
    cfg: &mut EmConfig,
    requester: usize,
    events: &mut Vec<EmEvent>,
) -> Result<(HandlerStmt, Memory), EmError> {
    let stepped = match stmt {
        HandlerStmt::Seq(first, rest) => {
            if first.is_terminated() {
                return Ok((*rest, mem));
            }
            let (first2, mem2) = step_handler_stmt(*first, mem, cfg, requester, events)?;
            return Ok((HandlerStmt::seq(first2, *rest), mem2));
        }
        HandlerStmt::Assign(x, e) => {
            let v = eval_expr(&mem, &e).expect("checked by handler_rule");
            mem.set(x, v);
            HandlerStmt::Skip
        }
        HandlerStmt::If(cond, then_branch, else_branch) => {
            if eval_cond(&cond, cfg, &mem).expect("checked by handler_rule") {
                *then_branch
            } else {
                *else_branch
            }
        }
        HandlerStmt::While(cond, body) => {
            if eval_cond(&cond, cfg, &mem).expect("checked by handler_rule") {
                HandlerStmt::seq(*body.clone(), HandlerStmt::While(cond, body))
            } else {
                HandlerStmt::Skip
            }
        }
        HandlerStmt::Input { var, channel } => {
            let v = cfg
                .input
                .dequeue_mut(&channel)
                .expect("checked by handler_rule");
            mem.set(var, v);
            events.push(EmEvent::GlobalRead {
                exec: requester,
                channel,
                value: v,
            });
            HandlerStmt::Skip
        }
        HandlerStmt::MapSend {
            expr,
            channel,
            pred,
        } => {
            let v = eval_expr(&mem, &expr).expect("checked by handler_rule");
            let targets: Vec<usize> = (0..cfg.execs.len())
                .filter(|x| eval_predicate(&pred, *x, cfg))
                .collect();
            for x in targets {
                cfg.exec_mut(x).input.push(IoItem::new(channel.clone(), v));
                events.push(EmEvent::Delivered {
                    exec: x,
                    channel: channel.clone(),
                    value: v,
                });
            }
            HandlerStmt::Skip
        }
        HandlerStmt::Wake(pred) => {
            let targets: Vec<usize> = (0..cfg.execs.len())
                .filter(|x| cfg.execs[*x].state == ExecState::S && eval_predicate(&pred, *x, cfg))
                .collect();
            for x in targets {
                let exec = cfg.exec_mut(x);
                exec.state = ExecState::E;
                exec.signal = None;
                events.push(EmEvent::Woken { exec: x });
            }
            HandlerStmt::Skip
        }
        HandlerStmt::CloneExec {
            pred,
            priv_tm,
            priv_tr,
        } => {
            let sources: Vec<usize> = (0..cfg.execs.len())
                .filter(|x| eval_predicate(&pred, *x, cfg))
                .collect();
            for source in sources {
                let mut copy = (*cfg.execs[source]).clone();
                copy.state = ExecState::S;
                cfg.execs.push(Arc::new(copy));
                Arc::make_mut(&mut cfg.t_m).append_column(&priv_tm, &cfg.channels);
                Arc::make_mut(&mut cfg.t_r).append_column(&priv_tr, &cfg.channels);
                events.push(EmEvent::Cloned {
                    source,
                    new_index: cfg.execs.len() - 1,
                });
            }
            HandlerStmt::Skip
        }
        HandlerStmt::Retrieve { var, exec, channel } => {
            let v = cfg.execs[exec]
                .output
                .peek(&channel)
                .expect("checked by handler_rule");
            mem.set(var, v);
            events.push(EmEvent::Retrieved {
                exec,
                channel,
                value: v,
            });
            HandlerStmt::Skip
        }
        HandlerStmt::Output { expr, channel } => {
            let v = eval_expr(&mem, &expr).expect("checked by handler_rule");
            cfg.output.push(IoItem::new(channel.clone(), v));
            events.push(EmEvent::GlobalWrite {
                exec: requester,
                channel,
                value: v,
            });
            HandlerStmt::Skip
        }
        HandlerStmt::Clean { channel, pred } => {
            let targets: Vec<usize> = (0..cfg.execs.len())
                .filter(|x| eval_predicate(&pred, *x, cfg))
                .collect();
            for x in targets {
                if cfg.execs[x].output.peek(&channel).is_some() {
                    cfg.exec_mut(x).output.remove_first(&channel);
                    events.push(EmEvent::Cleaned {
                        exec: x,
                        channel: channel.clone(),
                    });
                }
            }
            HandlerStmt::Skip
        }
        HandlerStmt::Skip => HandlerStmt::Skip,
    };
    Ok((stepped, mem))
}

/// Events flagging handlers permanently parked on unsatisfiable reads, for
/// terminal-configuration diagnostics.
pub fn blocked_component_events(cfg: &EmConfig) -> Vec<EmEvent> {
    let mut events = Vec::new();
    for (comp, side) in [(&cfg.map, TableSide::Map), (&cfg.red, TableSide::Reduce)] {
        if comp.is_idle() || handler_rule(cfg, side).is_some() {
            continue;
        }
        let exec = comp.request.as_ref().map(|r| r.0).unwrap_or(usize::MAX);
        match comp.prg.head() {
            HandlerStmt::Input { channel, .. } => events.push(EmEvent::BlockedGlobalRead {
                exec,
                channel: channel.clone(),
            }),
            HandlerStmt::Retrieve { channel, .. } => events.push(EmEvent::BlockedRetrieve {
                exec,
                channel: channel.clone(),
            }),
            _ => {}
        }
    }
    events
}
