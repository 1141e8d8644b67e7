//! Run trace documents and the time-by-channel table renderer.
//!
//! A trace document is self-contained: it embeds the program source, the
//! channel environment, the input, and the policy, so a recorded run can
//! be replayed from the document alone. The schedule array drives the
//! scripted scheduler; everything else is there to compare against.

use crate::em::config::TransitionLabel;
use crate::em::run::{
    ExecutionSnapshot, GlobalOutputRecord, RunOutcome, RunResult, SchedulerPolicy,
};
use crate::lang::channel::{Channel, ChannelEnv};
use crate::lang::queue::{IoItem, IoQueue};
use crate::policies::PolicyDoc;
use serde::{Deserialize, Serialize};

/// What the run was made of.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceMeta {
    /// Program source text.
    pub program: String,
    pub channels: Vec<Channel>,
    pub input: Vec<IoItem>,
    /// A shipped policy name, an inline policy document, or `"none"` for a
    /// bare (unenforced) run.
    pub policy: PolicyRef,
    pub scheduler: SchedulerPolicy,
    pub budget: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PolicyRef {
    Name(String),
    Inline(Box<PolicyDoc>),
}

impl PolicyRef {
    pub fn is_none(&self) -> bool {
        matches!(self, PolicyRef::Name(n) if n == "none")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceDoc {
    pub meta: TraceMeta,
    pub outcome: String,
    pub consumed: Vec<IoItem>,
    pub residual: Vec<IoItem>,
    pub global_output: Vec<GlobalOutputRecord>,
    pub executions: Vec<ExecutionSnapshot>,
    pub clone_count: usize,
    pub schedule: Vec<TransitionLabel>,
}

pub fn outcome_name(outcome: RunOutcome) -> &'static str {
    match outcome {
        RunOutcome::Completed => "completed",
        RunOutcome::QuiescentWithResidual => "quiescent_with_residual",
        RunOutcome::Deadlocked => "deadlocked",
        RunOutcome::BudgetExceeded => "budget_exceeded",
    }
}

impl TraceDoc {
    pub fn from_run(meta: TraceMeta, result: &RunResult) -> Self {
        TraceDoc {
            meta,
            outcome: outcome_name(result.outcome).to_string(),
            consumed: result.consumed.items().to_vec(),
            residual: result.residual.items().to_vec(),
            global_output: result.global_output.clone(),
            executions: result.executions.clone(),
            clone_count: result.clone_count,
            schedule: result.schedule.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace documents serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// First field on which `other` differs from `self`, for replay
    /// divergence reports.
    pub fn first_divergence(&self, other: &TraceDoc) -> Option<String> {
        if self.outcome != other.outcome {
            return Some(format!("outcome: {} vs {}", self.outcome, other.outcome));
        }
        if self.consumed != other.consumed {
            return Some("consumed input sequence differs".to_string());
        }
        if self.residual != other.residual {
            return Some("residual input differs".to_string());
        }
        if self.global_output != other.global_output {
            return Some("global output records differ".to_string());
        }
        if self.executions != other.executions {
            return Some("final execution snapshots differ".to_string());
        }
        if self.clone_count != other.clone_count {
            return Some(format!(
                "clone count: {} vs {}",
                self.clone_count, other.clone_count
            ));
        }
        if self.schedule != other.schedule {
            return Some("schedule differs".to_string());
        }
        None
    }
}

/// Render a queue as the time-by-channel table used in run listings: one
/// column per item, one row per channel, `-` for undefined cells.
pub fn render_time_table(title: &str, items: &[IoItem], channels: &[String]) -> String {
    let mut rows: Vec<String> = Vec::new();
    let width = items
        .iter()
        .map(|it| it.value.to_string().len())
        .max()
        .unwrap_or(1)
        .max(1);
    let name_width = channels
        .iter()
        .map(|c| c.len())
        .max()
        .unwrap_or(7)
        .max("channel".len());
    let mut header = format!("{:name_width$}", "channel");
    for t in 0..items.len() {
        header.push_str(&format!(" | {:>width$}", t));
    }
    rows.push(format!("{title}:"));
    rows.push(header);
    for channel in channels {
        let mut line = format!("{channel:name_width$}");
        for item in items {
            if &item.channel == channel {
                line.push_str(&format!(" | {:>width$}", item.value.to_string()));
            } else {
                line.push_str(&format!(" | {:>width$}", "-"));
            }
        }
        rows.push(line);
    }
    if items.is_empty() {
        rows.push("(empty)".to_string());
    }
    rows.join("\n")
}

/// The full human-readable rendering of a run: global input, per-execution
/// local queues (everything delivered and emitted over time, not just the
/// unconsumed residue), and the global output.
pub fn render_run_tables(env: &ChannelEnv, input: &IoQueue, result: &RunResult) -> String {
    use crate::em::rules::EmEvent;

    let in_channels: Vec<String> = env.inputs().map(|c| c.name.clone()).collect();
    let out_channels: Vec<String> = env.outputs().map(|c| c.name.clone()).collect();
    let mut delivered: Vec<Vec<IoItem>> = vec![Vec::new(); result.executions.len()];
    let mut emitted: Vec<Vec<IoItem>> = vec![Vec::new(); result.executions.len()];
    for timed in &result.events {
        match &timed.event {
            EmEvent::Delivered {
                exec,
                channel,
                value,
            } if *exec < delivered.len() => {
                delivered[*exec].push(IoItem::new(channel.clone(), *value));
            }
            EmEvent::LocalOutput {
                exec,
                channel,
                value,
            } if *exec < emitted.len() => {
                emitted[*exec].push(IoItem::new(channel.clone(), *value));
            }
            _ => {}
        }
    }

    let mut sections = Vec::new();
    sections.push(render_time_table(
        "input to MAP",
        input.items(),
        &in_channels,
    ));
    for snap in &result.executions {
        sections.push(render_time_table(
            &format!("execution {} local input", snap.id),
            &delivered[snap.id],
            &in_channels,
        ));
        sections.push(render_time_table(
            &format!("execution {} local output", snap.id),
            &emitted[snap.id],
            &out_channels,
        ));
    }
    sections.push(render_time_table(
        "output by REDUCE",
        result.global_out.items(),
        &out_channels,
    ));
    sections.push(format!(
        "outcome: {} (consumed {}, residual {}, clones {})",
        outcome_name(result.outcome),
        result.consumed.len(),
        result.residual.len(),
        result.clone_count
    ));
    sections.join("\n\n")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::value::Value;

    #[test]
    fn table_marks_undefined_cells() {
        let items = vec![
            IoItem::new("cH1", Value::Bool(true)),
            IoItem::new("cL1", Value::Bool(false)),
        ];
        let table = render_time_table("input", &items, &["cH1".into(), "cL1".into()]);
        assert!(table.contains("cH1     | T | -"), "{table}");
        assert!(table.contains("cL1     | - | F"), "{table}");
    }
}
