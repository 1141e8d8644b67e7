//! On-disk policy documents: JSON with table templates and the handler
//! programs as mini-DSL text. The shipped policies are exported in this
//! format under `fixtures/policies/`.

use crate::em::config::{PrivTemplate, TableTemplate};
use crate::lang::lexer::SyntaxError;
use crate::policies::{dsl, PolicyConfig};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolicyDoc {
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    pub initial_executions: usize,
    pub t_m: TableTemplate,
    pub t_r: TableTemplate,
    #[serde(default, skip_serializing_if = "is_default_template")]
    pub clone_priv_t_m: PrivTemplate,
    #[serde(default, skip_serializing_if = "is_default_template")]
    pub clone_priv_t_r: PrivTemplate,
    pub map_handler: String,
    pub reduce_handler: String,
}

fn is_default_template(t: &PrivTemplate) -> bool {
    *t == PrivTemplate::default()
}

#[derive(Debug, thiserror::Error)]
pub enum PolicyFileError {
    #[error("policy document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{handler} handler: {source}")]
    Handler {
        handler: &'static str,
        source: SyntaxError,
    },
}

impl PolicyDoc {
    pub fn from_config(config: &PolicyConfig) -> Self {
        PolicyDoc {
            name: config.name.clone(),
            description: config.description.clone(),
            initial_executions: config.initial_exec_count,
            t_m: config.t_m.clone(),
            t_r: config.t_r.clone(),
            clone_priv_t_m: config.clone_priv_tm.clone(),
            clone_priv_t_r: config.clone_priv_tr.clone(),
            map_handler: dsl::print_handler(&config.map_handler),
            reduce_handler: dsl::print_handler(&config.reduce_handler),
        }
    }

    pub fn into_config(self) -> Result<PolicyConfig, PolicyFileError> {
        let map_handler =
            dsl::parse_handler(&self.map_handler).map_err(|source| PolicyFileError::Handler {
                handler: "map",
                source,
            })?;
        let reduce_handler = dsl::parse_handler(&self.reduce_handler).map_err(|source| {
            PolicyFileError::Handler {
                handler: "reduce",
                source,
            }
        })?;
        Ok(PolicyConfig {
            name: self.name,
            description: self.description,
            initial_exec_count: self.initial_executions,
            t_m: self.t_m,
            t_r: self.t_r,
            clone_priv_tm: self.clone_priv_t_m,
            clone_priv_tr: self.clone_priv_t_r,
            map_handler,
            reduce_handler,
        })
    }

    pub fn from_json(text: &str) -> Result<Self, PolicyFileError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("policy documents serialize")
    }
}

/// Parse a policy file into a configuration.
pub fn parse_policy_file(text: &str) -> Result<PolicyConfig, PolicyFileError> {
    PolicyDoc::from_json(text)?.into_config()
}
