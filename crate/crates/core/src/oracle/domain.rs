//! Bounded input domains: per-channel value alphabets and a maximum queue
//! length, with deterministic enumeration order.

use crate::lang::channel::{ChannelEnv, ChannelName, Direction, Level};
use crate::lang::queue::{IoItem, IoQueue};
use crate::lang::value::{Kind, Value};
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputDomain {
    pub env: ChannelEnv,
    pub max_len: usize,
    /// Alphabet per in-channel, enumeration order fixed.
    pub alphabets: BTreeMap<ChannelName, Vec<Value>>,
}

impl InputDomain {
    /// Boolean channels get `{F, T}`; integer channels get `int_alphabet`.
    pub fn standard(env: &ChannelEnv, max_len: usize, int_alphabet: &[u64]) -> Self {
        let mut alphabets = BTreeMap::new();
        for ch in env.inputs() {
            let alphabet = match ch.kind() {
                Kind::Bool => vec![Value::Bool(false), Value::Bool(true)],
                Kind::Int => int_alphabet.iter().copied().map(Value::Int).collect(),
            };
            alphabets.insert(ch.name.clone(), alphabet);
        }
        InputDomain {
            env: env.clone(),
            max_len,
            alphabets,
        }
    }

    /// All (channel, value) item choices in declaration order.
    pub fn item_choices(&self) -> Vec<IoItem> {
        let mut items = Vec::new();
        for ch in self.env.inputs() {
            if let Some(alphabet) = self.alphabets.get(&ch.name) {
                for v in alphabet {
                    items.push(IoItem::new(ch.name.clone(), *v));
                }
            }
        }
        items
    }

    /// Every input queue of length `0..=max_len`, shortest first,
    /// lexicographic in the item-choice order within a length.
    pub fn inputs(&self) -> impl Iterator<Item = IoQueue> + '_ {
        InputIter {
            items: self.item_choices(),
            len: 0,
            odometer: Vec::new(),
            max_len: self.max_len,
            done: false,
        }
    }

    /// Number of inputs the enumeration will yield.
    pub fn input_count(&self) -> u128 {
        let base = self.item_choices().len() as u128;
        let mut total = 0u128;
        let mut pow = 1u128;
        for _ in 0..=self.max_len {
            total = total.saturating_add(pow);
            pow = pow.saturating_mul(base);
        }
        total
    }

    /// Quantification over default values: one candidate default per value
    /// kind, shared by every high in-channel of that kind, ranging over the
    /// union of those channels' alphabets.
    ///
    /// Mixing defaults across channels of the same kind would let the
    /// quantifier distinguish programs through artifacts of the bound, so
    /// the defaults are uniform per kind.
    pub fn default_assignments(&self) -> Vec<BTreeMap<ChannelName, Value>> {
        let high: Vec<_> = self.env.inputs().filter(|c| c.level == Level::H).collect();
        if high.is_empty() {
            return vec![BTreeMap::new()];
        }
        let mut bool_values: Vec<Value> = Vec::new();
        let mut int_values: Vec<Value> = Vec::new();
        for ch in &high {
            if let Some(alphabet) = self.alphabets.get(&ch.name) {
                for v in alphabet {
                    let bucket = match v.kind() {
                        Kind::Bool => &mut bool_values,
                        Kind::Int => &mut int_values,
                    };
                    if !bucket.contains(v) {
                        bucket.push(*v);
                    }
                }
            }
        }
        bool_values.sort();
        int_values.sort();
        let bool_choices: Vec<Option<Value>> = if bool_values.is_empty() {
            vec![None]
        } else {
            bool_values.into_iter().map(Some).collect()
        };
        let int_choices: Vec<Option<Value>> = if int_values.is_empty() {
            vec![None]
        } else {
            int_values.into_iter().map(Some).collect()
        };
        let mut assignments = Vec::new();
        for b in &bool_choices {
            for i in &int_choices {
                let mut assignment = BTreeMap::new();
                for ch in &high {
                    let v = match ch.kind() {
                        Kind::Bool => *b,
                        Kind::Int => *i,
                    };
                    if let Some(v) = v {
                        assignment.insert(ch.name.clone(), v);
                    }
                }
                assignments.push(assignment);
            }
        }
        assignments
    }

    pub fn is_high(&self, channel: &str) -> bool {
        self.env.level(channel) == Some(Level::H)
    }

    pub fn is_low_in(&self, channel: &str) -> bool {
        self.env
            .get(channel)
            .map(|c| c.level == Level::L && c.direction == Direction::In)
            .unwrap_or(false)
    }
}

struct InputIter {
    items: Vec<IoItem>,
    len: usize,
    odometer: Vec<usize>,
    max_len: usize,
    done: bool,
}

impl Iterator for InputIter {
    type Item = IoQueue;

    fn next(&mut self) -> Option<IoQueue> {
        if self.done {
            return None;
        }
        if self.len == 0 {
            self.len = 1;
            self.odometer = vec![0; 1];
            if self.items.is_empty() || self.max_len == 0 {
                self.done = true;
            }
            return Some(IoQueue::new());
        }
        let result: IoQueue = self
            .odometer
            .iter()
            .map(|&i| self.items[i].clone())
            .collect();
        // Advance the odometer; on overflow grow the length.
        let mut pos = self.odometer.len();
        loop {
            if pos == 0 {
                self.len += 1;
                if self.len > self.max_len {
                    self.done = true;
                } else {
                    self.odometer = vec![0; self.len];
                }
                break;
            }
            pos -= 1;
            self.odometer[pos] += 1;
            if self.odometer[pos] < self.items.len() {
                break;
            }
            self.odometer[pos] = 0;
        }
        Some(result)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::channel::Channel;

    fn env() -> ChannelEnv {
        let mk = |name: &str, dir, level, default| Channel {
            name: name.to_string(),
            direction: dir,
            level,
            default_value: default,
        };
        ChannelEnv::new(vec![
            mk("cH1", Direction::In, Level::H, Value::Bool(false)),
            mk("cL1", Direction::In, Level::L, Value::Int(0)),
        ])
        .unwrap()
    }

    #[test]
    fn enumeration_is_complete_and_deterministic() {
        let dom = InputDomain::standard(&env(), 2, &[0, 1]);
        let inputs: Vec<_> = dom.inputs().collect();
        // 4 item choices: lengths 0,1,2 -> 1 + 4 + 16 = 21
        assert_eq!(inputs.len(), 21);
        assert_eq!(dom.input_count(), 21);
        assert_eq!(inputs[0], IoQueue::new());
        let again: Vec<_> = dom.inputs().collect();
        assert_eq!(inputs, again);
    }

    #[test]
    fn defaults_are_uniform_per_kind_over_high_channels() {
        let dom = InputDomain::standard(&env(), 2, &[0, 1]);
        let assignments = dom.default_assignments();
        // Only cH1 (bool) is high: assignments F and T.
        assert_eq!(assignments.len(), 2);
        assert!(assignments
            .iter()
            .all(|a| a.len() == 1 && a.contains_key("cH1")));
    }
}
