//! I/O items and FIFO queues, plus the queue algebra shared by the
//! interpreter, the enforcement machine, and the property checkers:
//! dequeue-by-channel, restriction, low-equivalence, channel-equivalence.

use crate::lang::channel::{ChannelEnv, ChannelName, Level};
use crate::lang::value::Value;
use serde::{Deserialize, Serialize};
use std::fmt;

/// One input or output item. Each item carries a value on exactly one
/// channel; multi-channel vectors are not representable.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct IoItem {
    pub channel: ChannelName,
    pub value: Value,
}

impl IoItem {
    pub fn new(channel: impl Into<ChannelName>, value: Value) -> Self {
        IoItem {
            channel: channel.into(),
            value,
        }
    }
}

impl fmt::Display for IoItem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}={}", self.channel, self.value)
    }
}

/// An ordered finite sequence of items. Append at the tail, remove at the
/// head; per-channel FIFO order is preserved by every operation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IoQueue(Vec<IoItem>);

impl IoQueue {
    pub fn new() -> Self {
        IoQueue(Vec::new())
    }

    pub fn from_items(items: Vec<IoItem>) -> Self {
        IoQueue(items)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn items(&self) -> &[IoItem] {
        &self.0
    }

    pub fn head(&self) -> Option<&IoItem> {
        self.0.first()
    }

    pub fn push(&mut self, item: IoItem) {
        self.0.push(item);
    }

    /// Remove the head item, if any.
    pub fn pop_head(&mut self) -> Option<IoItem> {
        if self.0.is_empty() {
            None
        } else {
            Some(self.0.remove(0))
        }
    }

    /// The dequeue operator: the value of the first item defined on `channel`
    /// together with the queue with that item removed. When no item is
    /// defined on `channel`, the value slot is `None` and the queue is
    /// returned unchanged.
    pub fn dequeue(&self, channel: &str) -> (Option<Value>, IoQueue) {
        match self.0.iter().position(|it| it.channel == channel) {
            Some(idx) => {
                let mut rest = self.0.clone();
                let item = rest.remove(idx);
                (Some(item.value), IoQueue(rest))
            }
            None => (None, self.clone()),
        }
    }

    /// In-place dequeue; returns the removed value.
    pub fn dequeue_mut(&mut self, channel: &str) -> Option<Value> {
        let idx = self.0.iter().position(|it| it.channel == channel)?;
        Some(self.0.remove(idx).value)
    }

    /// Value of the first item defined on `channel`, without removing it.
    pub fn peek(&self, channel: &str) -> Option<Value> {
        self.0
            .iter()
            .find(|it| it.channel == channel)
            .map(|it| it.value)
    }

    /// Remove the first item defined on `channel`, if any.
    pub fn remove_first(&mut self, channel: &str) {
        if let Some(idx) = self.0.iter().position(|it| it.channel == channel) {
            self.0.remove(idx);
        }
    }

    /// The restriction operator: the subsequence of items satisfying `cond`,
    /// order preserved.
    pub fn restrict(&self, cond: impl Fn(&IoItem) -> bool) -> IoQueue {
        IoQueue(self.0.iter().filter(|it| cond(it)).cloned().collect())
    }

    /// Restriction to items on channels of security level `level`. Items on
    /// channels absent from `env` are dropped.
    pub fn restrict_level(&self, env: &ChannelEnv, level: Level) -> IoQueue {
        self.restrict(|it| env.level(&it.channel) == Some(level))
    }

    /// Restriction to items on one channel.
    pub fn restrict_channel(&self, channel: &str) -> IoQueue {
        self.restrict(|it| it.channel == channel)
    }

    pub fn iter(&self) -> impl Iterator<Item = &IoItem> {
        self.0.iter()
    }

    /// Per-channel view: channel name to the sequence of values carried on
    /// it, in queue order.
    pub fn by_channel(&self) -> std::collections::BTreeMap<ChannelName, Vec<Value>> {
        let mut out: std::collections::BTreeMap<ChannelName, Vec<Value>> =
            std::collections::BTreeMap::new();
        for item in &self.0 {
            out.entry(item.channel.clone())
                .or_default()
                .push(item.value);
        }
        out
    }

    /// Channels mentioned in the queue, in first-occurrence order, deduplicated.
    pub fn channels(&self) -> Vec<ChannelName> {
        let mut out: Vec<ChannelName> = Vec::new();
        for it in &self.0 {
            if !out.contains(&it.channel) {
                out.push(it.channel.clone());
            }
        }
        out
    }
}

impl FromIterator<IoItem> for IoQueue {
    fn from_iter<T: IntoIterator<Item = IoItem>>(iter: T) -> Self {
        IoQueue(iter.into_iter().collect())
    }
}

impl fmt::Display for IoQueue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "(empty)");
        }
        let rendered: Vec<String> = self.0.iter().map(|it| it.to_string()).collect();
        write!(f, "{}", rendered.join(" "))
    }
}

/// Low-equivalence: equality of the level-L restrictions of two queues,
/// item by item.
pub fn low_eq(q1: &IoQueue, q2: &IoQueue, env: &ChannelEnv) -> bool {
    q1.restrict_level(env, Level::L) == q2.restrict_level(env, Level::L)
}

/// Channel-equivalence on one channel: the per-channel subsequences are
/// equal, regardless of how the two queues interleave other channels.
pub fn channel_eq(q1: &IoQueue, q2: &IoQueue, channel: &str) -> bool {
    q1.restrict_channel(channel) == q2.restrict_channel(channel)
}

/// Channel-equivalence on every channel mentioned in either queue.
pub fn channel_eq_all(q1: &IoQueue, q2: &IoQueue) -> bool {
    let mut channels = q1.channels();
    for c in q2.channels() {
        if !channels.contains(&c) {
            channels.push(c);
        }
    }
    channels.iter().all(|c| channel_eq(q1, q2, c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::channel::{Channel, Direction};

    fn env() -> ChannelEnv {
        let mk = |name: &str, dir, level, default| Channel {
            name: name.to_string(),
            direction: dir,
            level,
            default_value: default,
        };
        ChannelEnv::new(vec![
            mk("cH1", Direction::In, Level::H, Value::Bool(false)),
            mk("cH2", Direction::In, Level::H, Value::Int(0)),
            mk("cL1", Direction::In, Level::L, Value::Bool(false)),
            mk("cL2", Direction::In, Level::L, Value::Int(0)),
        ])
        .unwrap()
    }

    fn q(items: &[(&str, Value)]) -> IoQueue {
        items.iter().map(|(c, v)| IoItem::new(*c, *v)).collect()
    }

    #[test]
    fn dequeue_first_matching() {
        let input = q(&[("cH1", Value::Bool(true)), ("cL1", Value::Bool(false))]);
        let (v, rest) = input.dequeue("cL1");
        assert_eq!(v, Some(Value::Bool(false)));
        assert_eq!(rest, q(&[("cH1", Value::Bool(true))]));
    }

    #[test]
    fn dequeue_empty() {
        let (v, rest) = IoQueue::new().dequeue("cL1");
        assert_eq!(v, None);
        assert!(rest.is_empty());
    }

    #[test]
    fn dequeue_fifo_per_channel() {
        let input = q(&[("cL1", Value::Int(1)), ("cL1", Value::Int(2))]);
        let (v, rest) = input.dequeue("cL1");
        assert_eq!(v, Some(Value::Int(1)));
        assert_eq!(rest, q(&[("cL1", Value::Int(2))]));
    }

    #[test]
    fn restrict_by_level() {
        let input = q(&[
            ("cH1", Value::Bool(true)),
            ("cL1", Value::Bool(false)),
            ("cL2", Value::Int(2)),
            ("cH2", Value::Int(7)),
        ]);
        assert_eq!(
            input.restrict_level(&env(), Level::L),
            q(&[("cL1", Value::Bool(false)), ("cL2", Value::Int(2))])
        );
        assert_eq!(IoQueue::new().restrict(|_| true), IoQueue::new());
        assert_eq!(input.restrict_channel("cH2"), q(&[("cH2", Value::Int(7))]));
    }

    #[test]
    fn low_eq_ignores_high_values() {
        let env = env();
        assert!(low_eq(&IoQueue::new(), &IoQueue::new(), &env));
        let q1 = q(&[("cH1", Value::Bool(true)), ("cL1", Value::Bool(false))]);
        let q2 = q(&[("cH1", Value::Bool(false)), ("cL1", Value::Bool(false))]);
        assert!(low_eq(&q1, &q2, &env));
        let q3 = q(&[("cL1", Value::Bool(false))]);
        let q4 = q(&[("cL1", Value::Bool(true))]);
        assert!(!low_eq(&q3, &q4, &env));
    }

    #[test]
    fn channel_eq_tolerates_reordering_across_channels() {
        let q1 = q(&[("cL1", Value::Int(1)), ("cH1", Value::Bool(true))]);
        let q2 = q(&[("cH1", Value::Bool(true)), ("cL1", Value::Int(1))]);
        assert!(channel_eq(&q1, &q2, "cL1"));
        assert!(channel_eq(&q1, &q2, "cH1"));
        assert!(channel_eq_all(&q1, &q2));

        let q3 = q(&[("cL1", Value::Int(1)), ("cL1", Value::Int(2))]);
        let q4 = q(&[("cL1", Value::Int(2)), ("cL1", Value::Int(1))]);
        assert!(!channel_eq(&q3, &q4, "cL1"));
    }

    #[test]
    fn dequeue_restrict_coherence() {
        let input = q(&[
            ("cL1", Value::Int(1)),
            ("cH1", Value::Bool(true)),
            ("cL1", Value::Int(2)),
        ]);
        for c in ["cL1", "cH1", "cH2"] {
            let (v, rest) = input.dequeue(c);
            let removed = if v.is_some() { 1 } else { 0 };
            assert_eq!(
                input.restrict_channel(c).len(),
                rest.restrict_channel(c).len() + removed
            );
            for other in ["cL1", "cH1", "cH2"] {
                if other != c {
                    assert_eq!(input.restrict_channel(other), rest.restrict_channel(other));
                }
            }
        }
    }
}
