//! Exhaustive exploration of scheduler interleavings.
//!
//! Depth-first search over every enabled transition with visited-state
//! memoization; sound because the transition system is finitely branching
//! and each label has a unique successor. Terminal configurations are
//! collapsed into classes of (outcome, per-channel consumed input,
//! per-channel global output); an enforcement that is insensitive to
//! scheduling yields a singleton class.

use crate::em::config::EmConfig;
use crate::em::rules::{apply_transition, enabled, init_em, EmError, InitError};
use crate::em::run::{queue_by_channel, RunOutcome};
use crate::lang::ast::Stmt;
use crate::lang::channel::{ChannelEnv, ChannelName};
use crate::lang::queue::IoQueue;
use crate::lang::value::Value;
use crate::policies::PolicyConfig;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashMap};

/// One observable equivalence class of terminal configurations.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ExploreClass {
    pub outcome: RunOutcome,
    pub consumed: BTreeMap<ChannelName, Vec<Value>>,
    pub output: BTreeMap<ChannelName, Vec<Value>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExploreResult {
    pub classes: BTreeSet<ExploreClass>,
    /// False when the state cap was hit; the class set is then a lower
    /// bound, not an enumeration.
    pub complete: bool,
    pub states_visited: usize,
}

impl ExploreResult {
    pub fn is_singleton(&self) -> bool {
        self.complete && self.classes.len() == 1
    }

    pub fn has_deadlock(&self) -> bool {
        self.classes
            .iter()
            .any(|c| c.outcome == RunOutcome::Deadlocked)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExploreError {
    #[error(transparent)]
    Init(#[from] InitError),
    #[error(transparent)]
    Em(#[from] EmError),
}

/// Enumerate every schedule of the machine up to `depth` transitions per
/// branch, visiting at most `max_states` distinct configurations.
pub fn explore(
    prg: &Stmt,
    policy: &PolicyConfig,
    env: &ChannelEnv,
    input: &IoQueue,
    depth: u64,
    max_states: usize,
) -> Result<ExploreResult, ExploreError> {
    let initial = init_em(prg, policy, env, input)?;
    explore_from(initial, input, depth, max_states)
}

pub fn explore_from(
    initial: EmConfig,
    original_input: &IoQueue,
    depth: u64,
    max_states: usize,
) -> Result<ExploreResult, ExploreError> {
    // Per-channel consumption is a function of the remaining global input:
    // the machine removes the first item per channel, so what is gone is a
    // per-channel prefix of the original.
    let original = queue_by_channel(original_input);
    let consumed_of = |cfg: &EmConfig| -> BTreeMap<ChannelName, Vec<Value>> {
        let remaining = queue_by_channel(&cfg.input);
        let mut consumed = BTreeMap::new();
        for (channel, values) in &original {
            let left = remaining.get(channel).map(|v| v.len()).unwrap_or(0);
            let taken = values.len() - left;
            if taken > 0 {
                consumed.insert(channel.clone(), values[..taken].to_vec());
            }
        }
        consumed
    };

    let mut classes = BTreeSet::new();
    let mut complete = true;
    // Highest remaining depth a state was explored with; re-visit only
    // with a larger remaining budget. Configurations are shared between
    // the stack and the visited set.
    let mut visited: HashMap<std::rc::Rc<EmConfig>, u64> = HashMap::new();
    let mut stack: Vec<(std::rc::Rc<EmConfig>, u64)> = vec![(std::rc::Rc::new(initial), depth)];

    while let Some((cfg, remaining)) = stack.pop() {
        match visited.get(&cfg) {
            Some(prev) if *prev >= remaining => continue,
            _ => {}
        }
        if visited.len() >= max_states {
            complete = false;
            continue;
        }
        visited.insert(cfg.clone(), remaining);

        let labels = enabled(&cfg);
        if labels.is_empty() {
            let outcome = if cfg.is_terminated() {
                RunOutcome::Completed
            } else if cfg.is_quiescent_programs() {
                RunOutcome::QuiescentWithResidual
            } else {
                RunOutcome::Deadlocked
            };
            classes.insert(ExploreClass {
                outcome,
                consumed: consumed_of(&cfg),
                output: queue_by_channel(&cfg.output),
            });
            continue;
        }
        if remaining == 0 {
            classes.insert(ExploreClass {
                outcome: RunOutcome::BudgetExceeded,
                consumed: consumed_of(&cfg),
                output: queue_by_channel(&cfg.output),
            });
            continue;
        }
        for label in labels {
            let (next, _) = apply_transition(&cfg, &label)?;
            match visited.get(&next) {
                Some(prev) if *prev >= remaining - 1 => continue,
                _ => stack.push((std::rc::Rc::new(next), remaining - 1)),
            }
        }
    }

    Ok(ExploreResult {
        classes,
        complete,
        states_visited: visited.len(),
    })
}
