//! Policy configurations: privilege-table templates, clone templates, and
//! MAP/REDUCE handler templates, plus the four shipped configurations
//! (NI, RI, DI, SubDI).
//!
//! A policy is pure data. New properties are obtained by authoring a new
//! policy file, not by writing code; the shipped policies are built from
//! the same mini-DSL text a user would write.

pub mod dsl;
pub mod file;
pub mod template;

use crate::em::config::{PrivCell, PrivTemplate, TableTemplate};
use crate::lang::channel::ChannelEnv;
use template::TemplateStmt;

pub use crate::em::rules::eval_predicate;
pub use file::PolicyDoc;

/// A complete enforcement-policy configuration.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PolicyConfig {
    pub name: String,
    pub description: String,
    pub initial_exec_count: usize,
    pub t_m: TableTemplate,
    pub t_r: TableTemplate,
    /// Input-side privilege column for executions created by `clone`.
    pub clone_priv_tm: PrivTemplate,
    /// Output-side privilege column for executions created by `clone`.
    pub clone_priv_tr: PrivTemplate,
    pub map_handler: TemplateStmt,
    pub reduce_handler: TemplateStmt,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolicyError {
    #[error("policy `{policy}`: {source}")]
    Table {
        policy: String,
        source: crate::em::config::TableError,
    },
    #[error("policy `{policy}` MAP handler uses REDUCE-only instruction `{instr}`")]
    MapVocabulary { policy: String, instr: &'static str },
    #[error("policy `{policy}` REDUCE handler uses MAP-only instruction `{instr}`")]
    ReduceVocabulary { policy: String, instr: &'static str },
    #[error("policy `{policy}`: {source}")]
    Instantiate {
        policy: String,
        source: template::InstantiateError,
    },
    #[error("policy `{policy}` must start with at least one execution")]
    NoExecutions { policy: String },
}

impl PolicyConfig {
    /// Check the policy against a channel environment: table templates must
    /// cover every channel, handlers must stay within their instruction
    /// vocabulary, and concrete channel references must be declared.
    pub fn validate(&self, env: &ChannelEnv) -> Result<(), PolicyError> {
        use crate::em::config::PrivTable;
        use crate::lang::channel::Direction;

        if self.initial_exec_count == 0 {
            return Err(PolicyError::NoExecutions {
                policy: self.name.clone(),
            });
        }
        let n = self.initial_exec_count;
        PrivTable::instantiate(&self.t_m, env, Direction::In, n).map_err(|source| {
            PolicyError::Table {
                policy: self.name.clone(),
                source,
            }
        })?;
        PrivTable::instantiate(&self.t_r, env, Direction::Out, n).map_err(|source| {
            PolicyError::Table {
                policy: self.name.clone(),
                source,
            }
        })?;

        if let Some(instr) = find_instr(&self.map_handler, &["retrieve", "output", "clean"]) {
            return Err(PolicyError::MapVocabulary {
                policy: self.name.clone(),
                instr,
            });
        }
        if let Some(instr) = find_instr(&self.reduce_handler, &["input", "map", "clone"]) {
            return Err(PolicyError::ReduceVocabulary {
                policy: self.name.clone(),
                instr,
            });
        }

        // Dry instantiation against every declared channel catches
        // references to channels the environment does not declare.
        for ch in env.iter() {
            for handler in [&self.map_handler, &self.reduce_handler] {
                let inst = template::Instantiation {
                    requester: 0,
                    channel: &ch.name,
                    env,
                    clone_priv_tm: &self.clone_priv_tm,
                    clone_priv_tr: &self.clone_priv_tr,
                };
                inst.stmt(handler)
                    .map_err(|source| PolicyError::Instantiate {
                        policy: self.name.clone(),
                        source,
                    })?;
            }
        }
        Ok(())
    }
}

/// First instruction in `stmt` whose name appears in `banned`.
fn find_instr(stmt: &TemplateStmt, banned: &[&'static str]) -> Option<&'static str> {
    let name = match stmt {
        TemplateStmt::Skip | TemplateStmt::Assign(_, _) => None,
        TemplateStmt::Seq(a, b) => return find_instr(a, banned).or_else(|| find_instr(b, banned)),
        TemplateStmt::If(_, t, e) => {
            return find_instr(t, banned).or_else(|| find_instr(e, banned))
        }
        TemplateStmt::While(_, body) => return find_instr(body, banned),
        TemplateStmt::Input { .. } => Some("input"),
        TemplateStmt::MapSend { .. } => Some("map"),
        TemplateStmt::Wake(_) => None,
        TemplateStmt::CloneExec { .. } => Some("clone"),
        TemplateStmt::Retrieve { .. } => Some("retrieve"),
        TemplateStmt::Output { .. } => Some("output"),
        TemplateStmt::Clean { .. } => Some("clean"),
    };
    name.filter(|n| banned.contains(n))
}

fn parse_builtin(name: &str, src: &str) -> TemplateStmt {
    dsl::parse_handler(src).unwrap_or_else(|e| panic!("builtin {name} handler: {e}"))
}

/// REDUCE handler shared by all four shipped policies: retrieve the real
/// value when the requester holds ask, forward it when it holds tell,
/// then clean the requester's output queue and wake it.
const REDUCE_DSL: &str = "\
x := default(c);
if ask in TR[i][c] then { retrieve x from i on c };
if tell in TR[i][c] then { output x to c };
clean(c, identical(i));
wake(identical(i))";

const RI_MAP_DSL: &str = "\
if ask in TM[i][c] then {
    input x from c;
    map(x, c, canTell(c));
    map(default(c), c, !canTell(c));
    wake(isReady(c))
}";

const NI_MAP_DSL: &str = "\
if ask in TM[i][c] then {
    input x from c;
    map(x, c, canTell(c));
    map(default(c), c, !canTell(c));
    wake(isReady(c))
} else {
    if !(tell in TM[i][c]) then {
        map(default(c), c, identical(i));
        wake(identical(i))
    }
}";

const DI_MAP_DSL: &str = "\
if level(c) == H && i == 0 then {
    clone(identical(i), PRIV_TM, PRIV_TR)
};
if ask in TM[i][c] then {
    if tell in TM[i][c] then {
        input x from c;
        map(x, c, canTell(c));
        map(default(c), c, !canTell(c));
        wake(isReady(c))
    } else {
        map(default(c), c, identical(i));
        wake(identical(i))
    }
}";

fn reduce_handler() -> TemplateStmt {
    parse_builtin("shared reduce", REDUCE_DSL)
}

/// T_R shared by all shipped policies: the high execution alone may write
/// high channels, the low execution alone low channels.
fn shared_t_r() -> TableTemplate {
    TableTemplate::from_levels(
        vec![PrivCell::ASK_TELL, PrivCell::NONE],
        vec![PrivCell::NONE, PrivCell::ASK_TELL],
    )
}

/// SME-style noninterference: the low execution can neither ask nor be
/// told real high values; its high requests are served with defaults and
/// no global read happens.
pub fn ni_policy() -> PolicyConfig {
    PolicyConfig {
        name: "ni".to_string(),
        description: "SME-style noninterference: two executions; the low one \
                      never triggers or observes real high input"
            .to_string(),
        initial_exec_count: 2,
        t_m: TableTemplate::from_levels(
            vec![PrivCell::ASK_TELL, PrivCell::NONE],
            vec![PrivCell::TELL, PrivCell::ASK_TELL],
        ),
        t_r: shared_t_r(),
        clone_priv_tm: PrivTemplate::default(),
        clone_priv_tr: PrivTemplate::default(),
        map_handler: parse_builtin("ni map", NI_MAP_DSL),
        reduce_handler: reduce_handler(),
    }
}

/// Removal of inputs: the low execution may trigger real reads on high
/// channels (receiving defaults itself), so the global queue is consumed
/// completely whenever possible.
pub fn ri_policy() -> PolicyConfig {
    PolicyConfig {
        name: "ri".to_string(),
        description: "Removal of inputs: low requests trigger real input \
                      actions on all channels; the low execution sees defaults \
                      for high items"
            .to_string(),
        initial_exec_count: 2,
        t_m: TableTemplate::from_levels(
            vec![PrivCell::ASK_TELL, PrivCell::ASK],
            vec![PrivCell::TELL, PrivCell::ASK_TELL],
        ),
        t_r: shared_t_r(),
        clone_priv_tm: PrivTemplate::default(),
        clone_priv_tr: PrivTemplate::default(),
        map_handler: parse_builtin("ri map", RI_MAP_DSL),
        reduce_handler: reduce_handler(),
    }
}

/// Deletion of inputs: every high request from the high execution first
/// clones it; clones live on defaults and their outputs are discarded.
pub fn di_policy() -> PolicyConfig {
    PolicyConfig {
        name: "di".to_string(),
        description: "Deletion of inputs: the high execution is cloned on \
                      each of its high input requests; clones receive defaults \
                      and cannot write globally"
            .to_string(),
        initial_exec_count: 2,
        t_m: TableTemplate::from_levels(
            vec![PrivCell::ASK_TELL, PrivCell::ASK],
            vec![PrivCell::TELL, PrivCell::ASK_TELL],
        ),
        t_r: shared_t_r(),
        clone_priv_tm: PrivTemplate::from_levels(PrivCell::ASK, PrivCell::TELL),
        clone_priv_tr: PrivTemplate::from_levels(PrivCell::NONE, PrivCell::NONE),
        map_handler: parse_builtin("di map", DI_MAP_DSL),
        reduce_handler: reduce_handler(),
    }
}

/// Substitution-deletion of inputs: NI's input table with RI's MAP
/// handler. A low request for a high channel is neither served nor
/// defaulted, so the requester waits until the high execution asks.
pub fn subdi_policy() -> PolicyConfig {
    PolicyConfig {
        name: "subdi".to_string(),
        description: "Substitution-deletion of inputs: NI input table with \
                      the RI MAP handler; low requests for high channels park \
                      until the high execution requests them"
            .to_string(),
        initial_exec_count: 2,
        t_m: TableTemplate::from_levels(
            vec![PrivCell::ASK_TELL, PrivCell::NONE],
            vec![PrivCell::TELL, PrivCell::ASK_TELL],
        ),
        t_r: shared_t_r(),
        clone_priv_tm: PrivTemplate::default(),
        clone_priv_tr: PrivTemplate::default(),
        map_handler: parse_builtin("subdi map", RI_MAP_DSL),
        reduce_handler: reduce_handler(),
    }
}

/// Look up a shipped policy by name.
pub fn builtin_policy(name: &str) -> Option<PolicyConfig> {
    match name {
        "ni" => Some(ni_policy()),
        "ri" => Some(ri_policy()),
        "di" => Some(di_policy()),
        "subdi" => Some(subdi_policy()),
        _ => None,
    }
}

pub const BUILTIN_POLICY_NAMES: &[&str] = &["ni", "ri", "di", "subdi"];
