//! Driving the enforcement machine: scheduler policies, bounded runs, and
//! the run result with full instrumentation.

use crate::em::config::{EmConfig, ExecState, TransitionLabel};
use crate::em::rules::{
    apply_transition_mut, blocked_component_events, enabled, init_em, EmError, EmEvent, InitError,
};
use crate::lang::ast::Stmt;
use crate::lang::channel::{ChannelEnv, ChannelName};
use crate::lang::queue::{IoItem, IoQueue};
use crate::lang::value::Value;
use crate::policies::PolicyConfig;
use crate::rng::SplitMix64;
use serde::{Deserialize, Serialize};

/// How the next transition is chosen among the enabled ones.
///
/// Every policy is deterministic: the same (program, policy, input,
/// scheduler) quadruple replays to the same run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SchedulerPolicy {
    /// First enabled label in canonical order.
    LowestIndex,
    /// Cycle over actors (executions, MAP, REDUCE), giving each a turn.
    RoundRobin,
    /// Uniform choice driven by a splitmix64 stream.
    SeededRandom { seed: u64 },
    /// Replay a recorded schedule exactly.
    Scripted { schedule: Vec<TransitionLabel> },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScheduleError {
    #[error("scripted schedule exhausted at step {step} with transitions still enabled")]
    ScriptExhausted { step: u64 },
    #[error("scripted label `{label}` at step {step} is not enabled")]
    ScriptDiverged { step: u64, label: String },
}

struct Scheduler {
    policy: SchedulerPolicy,
    rng: Option<SplitMix64>,
    rr_cursor: usize,
    script_pos: usize,
}

impl Scheduler {
    fn new(policy: SchedulerPolicy) -> Self {
        let rng = match &policy {
            SchedulerPolicy::SeededRandom { seed } => Some(SplitMix64::new(*seed)),
            _ => None,
        };
        Scheduler {
            policy,
            rng,
            rr_cursor: 0,
            script_pos: 0,
        }
    }

    fn pick(
        &mut self,
        cfg: &EmConfig,
        labels: &[TransitionLabel],
        step: u64,
    ) -> Result<TransitionLabel, ScheduleError> {
        debug_assert!(!labels.is_empty());
        match &self.policy {
            SchedulerPolicy::LowestIndex => Ok(labels[0].clone()),
            SchedulerPolicy::SeededRandom { .. } => {
                let rng = self.rng.as_mut().expect("rng present");
                Ok(rng.choose(labels).clone())
            }
            SchedulerPolicy::RoundRobin => {
                // Actors: executions 0..n, then MAP, then REDUCE.
                let actors = cfg.execs.len() + 2;
                let actor_of = |label: &TransitionLabel| match label {
                    TransitionLabel::Local { exec, .. } => *exec,
                    TransitionLabel::MapActivate { .. } | TransitionLabel::MapStep { .. } => {
                        cfg.execs.len()
                    }
                    TransitionLabel::ReduceActivate { .. } | TransitionLabel::ReduceStep { .. } => {
                        cfg.execs.len() + 1
                    }
                };
                for offset in 0..actors {
                    let actor = (self.rr_cursor + offset) % actors;
                    if let Some(label) = labels.iter().find(|l| actor_of(l) == actor) {
                        self.rr_cursor = (actor + 1) % actors;
                        return Ok(label.clone());
                    }
                }
                unreachable!("some enabled label belongs to an actor");
            }
            SchedulerPolicy::Scripted { schedule } => {
                let label = schedule
                    .get(self.script_pos)
                    .cloned()
                    .ok_or(ScheduleError::ScriptExhausted { step })?;
                self.script_pos += 1;
                if !labels.contains(&label) {
                    return Err(ScheduleError::ScriptDiverged {
                        step,
                        label: label.to_string(),
                    });
                }
                Ok(label)
            }
        }
    }
}

/// Classification of the final configuration of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunOutcome {
    /// Everything terminated and the global input was consumed completely.
    Completed,
    /// Everything terminated but global input items remain unread.
    QuiescentWithResidual,
    /// No transition is enabled yet some component has work left.
    Deadlocked,
    BudgetExceeded,
}

/// One global output item with its provenance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlobalOutputRecord {
    pub step: u64,
    pub channel: ChannelName,
    pub value: Value,
    pub source_exec: usize,
}

/// Final snapshot of a local execution.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExecutionSnapshot {
    pub id: usize,
    pub state: ExecState,
    pub terminated: bool,
    pub local_in: Vec<IoItem>,
    pub local_out: Vec<IoItem>,
}

/// A timestamped instrumentation event.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimedEvent {
    pub step: u64,
    #[serde(flatten)]
    pub event: EmEvent,
}

/// Everything a bounded enforced run produces.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunResult {
    pub outcome: RunOutcome,
    /// Global input items in consumption order.
    pub consumed: IoQueue,
    /// Global input items left unread.
    pub residual: IoQueue,
    /// Global output queue.
    pub global_out: IoQueue,
    pub global_output: Vec<GlobalOutputRecord>,
    pub executions: Vec<ExecutionSnapshot>,
    pub clone_count: usize,
    pub events: Vec<TimedEvent>,
    pub schedule: Vec<TransitionLabel>,
    pub steps: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Init(#[from] InitError),
    #[error(transparent)]
    Em(#[from] EmError),
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
}

/// Run the enforcement machine until no transition is enabled or the
/// budget is spent.
pub fn run_enforced(
    prg: &Stmt,
    policy: &PolicyConfig,
    env: &ChannelEnv,
    input: &IoQueue,
    scheduler: SchedulerPolicy,
    budget: u64,
) -> Result<RunResult, RunError> {
    let cfg = init_em(prg, policy, env, input)?;
    run_from(cfg, scheduler, budget)
}

/// Run from an existing configuration (used by replay).
pub fn run_from(
    mut cfg: EmConfig,
    scheduler: SchedulerPolicy,
    budget: u64,
) -> Result<RunResult, RunError> {
    let mut sched = Scheduler::new(scheduler);
    let mut schedule = Vec::new();
    let mut events: Vec<TimedEvent> = Vec::new();
    let mut consumed = IoQueue::new();
    let mut global_output = Vec::new();
    let mut clone_count = 0usize;
    let mut steps = 0u64;

    let outcome = loop {
        let labels = enabled(&cfg);
        if labels.is_empty() {
            break if cfg.is_terminated() {
                RunOutcome::Completed
            } else if cfg.is_quiescent_programs() {
                RunOutcome::QuiescentWithResidual
            } else {
                RunOutcome::Deadlocked
            };
        }
        if steps >= budget {
            break RunOutcome::BudgetExceeded;
        }
        let label = sched.pick(&cfg, &labels, steps)?;
        let step_events = apply_transition_mut(&mut cfg, &label)?;
        for event in step_events {
            match &event {
                EmEvent::GlobalRead { channel, value, .. } => {
                    consumed.push(IoItem::new(channel.clone(), *value));
                }
                EmEvent::GlobalWrite {
                    exec,
                    channel,
                    value,
                } => {
                    global_output.push(GlobalOutputRecord {
                        step: steps,
                        channel: channel.clone(),
                        value: *value,
                        source_exec: *exec,
                    });
                }
                EmEvent::Cloned { .. } => clone_count += 1,
                _ => {}
            }
            events.push(TimedEvent { step: steps, event });
        }
        schedule.push(label);
        steps += 1;
    };

    for event in blocked_component_events(&cfg) {
        events.push(TimedEvent { step: steps, event });
    }

    let executions = cfg
        .execs
        .iter()
        .enumerate()
        .map(|(id, e)| ExecutionSnapshot {
            id,
            state: e.state,
            terminated: e.is_terminated(),
            local_in: e.input.items().to_vec(),
            local_out: e.output.items().to_vec(),
        })
        .collect();

    Ok(RunResult {
        outcome,
        consumed,
        residual: cfg.input.clone(),
        global_out: cfg.output.clone(),
        global_output,
        executions,
        clone_count,
        events,
        schedule,
        steps,
    })
}

impl RunResult {
    /// The run reached a rest state with all programs terminated.
    pub fn is_quiescent(&self) -> bool {
        matches!(
            self.outcome,
            RunOutcome::Completed | RunOutcome::QuiescentWithResidual
        )
    }

    /// Per-channel view of the consumed input.
    pub fn consumed_by_channel(&self) -> std::collections::BTreeMap<ChannelName, Vec<Value>> {
        queue_by_channel(&self.consumed)
    }

    pub fn output_by_channel(&self) -> std::collections::BTreeMap<ChannelName, Vec<Value>> {
        queue_by_channel(&self.global_out)
    }
}

pub(crate) fn queue_by_channel(q: &IoQueue) -> std::collections::BTreeMap<ChannelName, Vec<Value>> {
    q.by_channel()
}
