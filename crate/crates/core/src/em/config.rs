//! Configurations of the enforcement machine: privilege tables, local
//! executions, the MAP and REDUCE components, and the machine as a whole.

use crate::em::handler::HandlerStmt;
use crate::lang::channel::{Channel, ChannelEnv, ChannelName, Direction, Level};
use crate::lang::eval::Memory;
use crate::lang::queue::IoQueue;
use crate::lang::Stmt;
use crate::policies::PolicyConfig;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

/// A privilege cell: any subset of {ask, tell}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct PrivCell {
    pub ask: bool,
    pub tell: bool,
}

impl PrivCell {
    pub const NONE: PrivCell = PrivCell {
        ask: false,
        tell: false,
    };
    pub const ASK: PrivCell = PrivCell {
        ask: true,
        tell: false,
    };
    pub const TELL: PrivCell = PrivCell {
        ask: false,
        tell: true,
    };
    pub const ASK_TELL: PrivCell = PrivCell {
        ask: true,
        tell: true,
    };

    /// Parse the textual form used in tables: `at`, `a`, `t`, or `-`.
    pub fn parse(s: &str) -> Option<PrivCell> {
        match s {
            "at" | "ta" => Some(PrivCell::ASK_TELL),
            "a" => Some(PrivCell::ASK),
            "t" => Some(PrivCell::TELL),
            "-" => Some(PrivCell::NONE),
            _ => None,
        }
    }
}

impl fmt::Display for PrivCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.ask, self.tell) {
            (true, true) => write!(f, "at"),
            (true, false) => write!(f, "a"),
            (false, true) => write!(f, "t"),
            (false, false) => write!(f, "-"),
        }
    }
}

impl Serialize for PrivCell {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for PrivCell {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        PrivCell::parse(&s)
            .ok_or_else(|| serde::de::Error::custom(format!("invalid privilege cell `{s}`")))
    }
}

/// Privilege template for one table column, keyed by level with optional
/// per-channel overrides. Used for the columns added by `clone`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct PrivTemplate {
    #[serde(default)]
    pub levels: BTreeMap<Level, PrivCell>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub channels: BTreeMap<ChannelName, PrivCell>,
}

impl PrivTemplate {
    pub fn from_levels(high: PrivCell, low: PrivCell) -> Self {
        PrivTemplate {
            levels: BTreeMap::from([(Level::H, high), (Level::L, low)]),
            channels: BTreeMap::new(),
        }
    }

    /// Resolve the cell for a channel; a concrete channel row overrides the
    /// level row. Unresolved channels get no privileges.
    pub fn resolve(&self, channel: &Channel) -> PrivCell {
        self.channels
            .get(&channel.name)
            .or_else(|| self.levels.get(&channel.level))
            .copied()
            .unwrap_or(PrivCell::NONE)
    }
}

/// Template for a whole table: one cell per (level, execution index), with
/// optional per-channel override rows. Cell vectors carry one entry per
/// initial execution.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct TableTemplate {
    #[serde(default)]
    pub levels: BTreeMap<Level, Vec<PrivCell>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub channels: BTreeMap<ChannelName, Vec<PrivCell>>,
}

impl TableTemplate {
    pub fn from_levels(high: Vec<PrivCell>, low: Vec<PrivCell>) -> Self {
        TableTemplate {
            levels: BTreeMap::from([(Level::H, high), (Level::L, low)]),
            channels: BTreeMap::new(),
        }
    }

    fn row(&self, channel: &Channel) -> Option<&Vec<PrivCell>> {
        self.channels
            .get(&channel.name)
            .or_else(|| self.levels.get(&channel.level))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TableError {
    #[error("table template has no row covering channel `{0}`")]
    MissingRow(ChannelName),
    #[error("table template row for `{channel}` has {found} cells, expected {expected}")]
    WrongWidth {
        channel: ChannelName,
        found: usize,
        expected: usize,
    },
}

/// A privilege table: one row per channel, one column per live execution.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrivTable {
    rows: BTreeMap<ChannelName, Vec<PrivCell>>,
    columns: usize,
}

impl PrivTable {
    /// Instantiate a template over the channels of one direction with
    /// `columns` initial executions. Every channel must be covered.
    pub fn instantiate(
        template: &TableTemplate,
        env: &ChannelEnv,
        direction: Direction,
        columns: usize,
    ) -> Result<Self, TableError> {
        let mut rows = BTreeMap::new();
        for ch in env.iter().filter(|c| c.direction == direction) {
            let row = template
                .row(ch)
                .ok_or_else(|| TableError::MissingRow(ch.name.clone()))?;
            if row.len() != columns {
                return Err(TableError::WrongWidth {
                    channel: ch.name.clone(),
                    found: row.len(),
                    expected: columns,
                });
            }
            rows.insert(ch.name.clone(), row.clone());
        }
        Ok(PrivTable { rows, columns })
    }

    pub fn columns(&self) -> usize {
        self.columns
    }

    /// The cell for `(channel, exec)`. Unknown channels and out-of-range
    /// indices carry no privileges.
    pub fn cell(&self, channel: &str, exec: usize) -> PrivCell {
        self.rows
            .get(channel)
            .and_then(|row| row.get(exec))
            .copied()
            .unwrap_or(PrivCell::NONE)
    }

    /// Append one column resolved from `template` (used by `clone`).
    pub fn append_column(&mut self, template: &PrivTemplate, env: &ChannelEnv) {
        for (name, row) in self.rows.iter_mut() {
            let cell = env
                .get(name)
                .map(|ch| template.resolve(ch))
                .unwrap_or(PrivCell::NONE);
            row.push(cell);
        }
        self.columns += 1;
    }

    pub fn rows(&self) -> impl Iterator<Item = (&ChannelName, &Vec<PrivCell>)> {
        self.rows.iter()
    }
}

/// Execution state of a local execution: executing or sleeping.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ExecState {
    E,
    S,
}

/// One local execution: an instance of the controlled program with its own
/// memory and local queues, plus the sleep state and pending interrupt
/// signal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LocalExec {
    pub state: ExecState,
    /// The channel of the pending interrupt signal; `None` when no signal
    /// is outstanding. A signal implies the sleeping state.
    pub signal: Option<ChannelName>,
    pub prg: Stmt,
    pub mem: Memory,
    pub input: IoQueue,
    pub output: IoQueue,
}

impl LocalExec {
    pub fn initial(prg: Stmt) -> Self {
        LocalExec {
            state: ExecState::E,
            signal: None,
            prg,
            mem: Memory::new(),
            input: IoQueue::new(),
            output: IoQueue::new(),
        }
    }

    pub fn is_terminated(&self) -> bool {
        self.prg.is_terminated()
    }
}

/// Configuration of the MAP or REDUCE component: the handler program being
/// executed (skip when idle), its scratch memory, and the request being
/// served.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ComponentConfig {
    pub prg: HandlerStmt,
    pub mem: Memory,
    /// `(execution index, channel)` of the request the current handler was
    /// activated for; cleared when the handler runs to completion.
    pub request: Option<(usize, ChannelName)>,
}

impl ComponentConfig {
    pub fn idle() -> Self {
        ComponentConfig {
            prg: HandlerStmt::Skip,
            mem: Memory::new(),
            request: None,
        }
    }

    pub fn is_idle(&self) -> bool {
        self.prg.is_terminated()
    }
}

/// The whole enforcement machine. Local executions and tables sit behind
/// `Arc` so that snapshots (exploration expands hundreds of thousands of
/// them) share everything a transition does not touch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmConfig {
    pub channels: Arc<ChannelEnv>,
    pub policy: Arc<PolicyConfig>,
    pub t_m: Arc<PrivTable>,
    pub t_r: Arc<PrivTable>,
    pub map: ComponentConfig,
    pub red: ComponentConfig,
    /// Global input queue.
    pub input: IoQueue,
    /// Global output queue.
    pub output: IoQueue,
    /// The stack of local executions; `top` is `execs.len() - 1`.
    pub execs: Vec<Arc<LocalExec>>,
}

// The environment and policy are fixed for the lifetime of a machine, so
// state hashing (visited-set memoization in `explore`) covers only the
// mutable parts. Equal configurations still hash equally.
impl std::hash::Hash for EmConfig {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.t_m.hash(state);
        self.t_r.hash(state);
        self.map.hash(state);
        self.red.hash(state);
        self.input.hash(state);
        self.output.hash(state);
        self.execs.hash(state);
    }
}

impl EmConfig {
    pub fn top(&self) -> usize {
        self.execs.len() - 1
    }

    /// Mutable access to one execution, copy-on-write.
    pub fn exec_mut(&mut self, index: usize) -> &mut LocalExec {
        Arc::make_mut(&mut self.execs[index])
    }

    /// Terminated: all local executions and both components have only
    /// `skip` left, and the global input queue is fully consumed.
    pub fn is_terminated(&self) -> bool {
        self.is_quiescent_programs() && self.input.is_empty()
    }

    /// All local executions and both components have run to `skip`,
    /// irrespective of residual input.
    pub fn is_quiescent_programs(&self) -> bool {
        self.execs.iter().all(|e| e.is_terminated()) && self.map.is_idle() && self.red.is_idle()
    }
}

/// Rule names for one small step of a local execution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum LocalRule {
    Assign,
    IfTrue,
    IfFalse,
    WhileTrue,
    WhileFalse,
    SkipSeq,
    /// LINP1: the requested item is in the local input queue.
    InputLocal,
    /// LINP2: block on input, raise the interrupt signal.
    InputWait,
    /// LOUTP: emit to the local output queue, raise the signal.
    OutputSignal,
}

/// Rule names for one step of a MAP or REDUCE handler.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum HandlerRule {
    Assign,
    IfTrue,
    IfFalse,
    WhileTrue,
    WhileFalse,
    SkipSeq,
    /// INPM: read from the global input queue.
    GlobalInput,
    MapSend,
    Wake,
    Clone,
    /// RETR: read (without removing) from a local output queue.
    Retrieve,
    /// OUTR: append to the global output queue.
    GlobalOutput,
    Clean,
}

/// One atomic transition of the machine. A label is enabled exactly when
/// the premises of its rule hold in the current configuration.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TransitionLabel {
    Local { exec: usize, rule: LocalRule },
    MapActivate { exec: usize, channel: ChannelName },
    ReduceActivate { exec: usize, channel: ChannelName },
    MapStep { rule: HandlerRule },
    ReduceStep { rule: HandlerRule },
}

impl fmt::Display for TransitionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TransitionLabel::Local { exec, rule } => write!(f, "local {exec} {rule:?}"),
            TransitionLabel::MapActivate { exec, channel } => {
                write!(f, "map activate {exec} {channel}")
            }
            TransitionLabel::ReduceActivate { exec, channel } => {
                write!(f, "reduce activate {exec} {channel}")
            }
            TransitionLabel::MapStep { rule } => write!(f, "map {rule:?}"),
            TransitionLabel::ReduceStep { rule } => write!(f, "reduce {rule:?}"),
        }
    }
}
