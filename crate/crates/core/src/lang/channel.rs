//! Channel declarations and the two-level security environment.

use crate::lang::value::{Kind, Value};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

pub type ChannelName = String;

/// Security level of a channel: `H` (confidential) or `L` (public).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Level {
    H,
    L,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    In,
    Out,
}

/// A declared channel: name, direction, level, and the default (fake) value
/// substituted when an execution lacks the tell privilege.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Channel {
    pub name: ChannelName,
    pub direction: Direction,
    pub level: Level,
    pub default_value: Value,
}

impl Channel {
    pub fn kind(&self) -> Kind {
        self.default_value.kind()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ChannelEnvError {
    #[error("duplicate channel `{0}`")]
    Duplicate(ChannelName),
    #[error("undeclared channel `{0}`")]
    Undeclared(ChannelName),
    #[error("channel `{name}` is declared `{declared}` but used for {used}")]
    WrongDirection {
        name: ChannelName,
        declared: Direction,
        used: Direction,
    },
    #[error("value {value} has kind {kind} but channel `{name}` carries {expected}")]
    KindMismatch {
        name: ChannelName,
        value: Value,
        kind: Kind,
        expected: Kind,
    },
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Level::H => write!(f, "H"),
            Level::L => write!(f, "L"),
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Direction::In => write!(f, "in"),
            Direction::Out => write!(f, "out"),
        }
    }
}

/// The channel environment: every channel a program may reference, keyed by
/// name. Declaration order is preserved for deterministic iteration.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct ChannelEnv {
    channels: Vec<Channel>,
}

impl ChannelEnv {
    pub fn new(channels: Vec<Channel>) -> Result<Self, ChannelEnvError> {
        let mut seen = BTreeMap::new();
        for ch in &channels {
            if seen.insert(ch.name.clone(), ()).is_some() {
                return Err(ChannelEnvError::Duplicate(ch.name.clone()));
            }
        }
        Ok(ChannelEnv { channels })
    }

    pub fn get(&self, name: &str) -> Option<&Channel> {
        self.channels.iter().find(|c| c.name == name)
    }

    pub fn require(&self, name: &str) -> Result<&Channel, ChannelEnvError> {
        self.get(name)
            .ok_or_else(|| ChannelEnvError::Undeclared(name.to_string()))
    }

    pub fn level(&self, name: &str) -> Option<Level> {
        self.get(name).map(|c| c.level)
    }

    pub fn default_value(&self, name: &str) -> Option<Value> {
        self.get(name).map(|c| c.default_value)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Channel> {
        self.channels.iter()
    }

    pub fn inputs(&self) -> impl Iterator<Item = &Channel> {
        self.channels
            .iter()
            .filter(|c| c.direction == Direction::In)
    }

    pub fn outputs(&self) -> impl Iterator<Item = &Channel> {
        self.channels
            .iter()
            .filter(|c| c.direction == Direction::Out)
    }

    pub fn is_empty(&self) -> bool {
        self.channels.is_empty()
    }

    /// Check that `name` exists with direction `used`; input/output statements
    /// are validated against this at program load time.
    pub fn check_use(&self, name: &str, used: Direction) -> Result<&Channel, ChannelEnvError> {
        let ch = self.require(name)?;
        if ch.direction != used {
            return Err(ChannelEnvError::WrongDirection {
                name: name.to_string(),
                declared: ch.direction,
                used,
            });
        }
        Ok(ch)
    }

    /// Check that `value` matches the declared kind of `name`.
    pub fn check_kind(&self, name: &str, value: Value) -> Result<(), ChannelEnvError> {
        let ch = self.require(name)?;
        if ch.kind() != value.kind() {
            return Err(ChannelEnvError::KindMismatch {
                name: name.to_string(),
                value,
                kind: value.kind(),
                expected: ch.kind(),
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ch(name: &str, dir: Direction, level: Level, default: Value) -> Channel {
        Channel {
            name: name.to_string(),
            direction: dir,
            level,
            default_value: default,
        }
    }

    #[test]
    fn rejects_duplicates() {
        let env = ChannelEnv::new(vec![
            ch("cH1", Direction::In, Level::H, Value::Bool(false)),
            ch("cH1", Direction::In, Level::H, Value::Bool(false)),
        ]);
        assert_eq!(env, Err(ChannelEnvError::Duplicate("cH1".into())));
    }

    #[test]
    fn direction_check() {
        let env =
            ChannelEnv::new(vec![ch("cL3", Direction::Out, Level::L, Value::Int(0))]).unwrap();
        assert!(env.check_use("cL3", Direction::Out).is_ok());
        assert!(matches!(
            env.check_use("cL3", Direction::In),
            Err(ChannelEnvError::WrongDirection { .. })
        ));
        assert!(matches!(
            env.check_use("cX", Direction::In),
            Err(ChannelEnvError::Undeclared(_))
        ));
    }
}
