//! Candidate corrections for the removal-of-inputs and deletion-of-inputs
//! definitions. These are pure enumerations over queues; the same
//! machinery checks bare programs and enforced runs.

use crate::lang::channel::{ChannelEnv, ChannelName, Level};
use crate::lang::queue::{IoItem, IoQueue};
use crate::lang::value::Value;
use std::collections::BTreeMap;

/// A run of identical padding items: `count` copies of `(channel, value)`.
#[derive(Debug, Clone)]
struct Padding {
    channel: ChannelName,
    value: Value,
    count: usize,
}

/// All distinct interleavings of the fixed sequence with the given padding
/// runs. Padding items on one channel are identical, so positions within a
/// run are not distinguished.
fn interleavings(fixed: &[IoItem], padding: &[Padding]) -> Vec<IoQueue> {
    let mut results = Vec::new();
    let mut current: Vec<IoItem> = Vec::new();
    let mut remaining: Vec<usize> = padding.iter().map(|p| p.count).collect();
    fn go(
        fixed: &[IoItem],
        fixed_pos: usize,
        padding: &[Padding],
        remaining: &mut Vec<usize>,
        current: &mut Vec<IoItem>,
        results: &mut Vec<IoQueue>,
    ) {
        if fixed_pos == fixed.len() && remaining.iter().all(|&r| r == 0) {
            results.push(IoQueue::from_items(current.clone()));
            return;
        }
        if fixed_pos < fixed.len() {
            current.push(fixed[fixed_pos].clone());
            go(fixed, fixed_pos + 1, padding, remaining, current, results);
            current.pop();
        }
        for (idx, pad) in padding.iter().enumerate() {
            if remaining[idx] > 0 {
                remaining[idx] -= 1;
                current.push(IoItem::new(pad.channel.clone(), pad.value));
                go(fixed, fixed_pos, padding, remaining, current, results);
                current.pop();
                remaining[idx] += 1;
            }
        }
    }
    go(
        fixed,
        0,
        padding,
        &mut remaining,
        &mut current,
        &mut results,
    );
    results
}

/// Enumerate count combinations: each padding channel independently ranges
/// `0..=cap`.
fn count_combos(caps: &[(ChannelName, Value, usize)]) -> Vec<Vec<Padding>> {
    let mut combos = vec![Vec::new()];
    for (channel, value, cap) in caps {
        let mut next = Vec::new();
        for combo in &combos {
            for count in 0..=*cap {
                let mut c = combo.clone();
                if count > 0 {
                    c.push(Padding {
                        channel: channel.clone(),
                        value: *value,
                        count,
                    });
                }
                next.push(c);
            }
        }
        combos = next;
    }
    combos
}

/// Removal-of-inputs correction candidates for `input`: queues whose low
/// subsequence equals `input`'s, whose high items all carry the channel's
/// default, and whose per-channel length does not exceed `input`'s.
pub fn ri_candidates(
    env: &ChannelEnv,
    input: &IoQueue,
    defaults: &BTreeMap<ChannelName, Value>,
) -> Vec<IoQueue> {
    let low: Vec<IoItem> = input
        .restrict(|it| env.level(&it.channel) == Some(Level::L))
        .items()
        .to_vec();
    let caps: Vec<(ChannelName, Value, usize)> = env
        .inputs()
        .filter(|c| c.level == Level::H)
        .filter_map(|c| {
            let cap = input.restrict_channel(&c.name).len();
            let value = defaults.get(&c.name).copied()?;
            (cap > 0).then_some((c.name.clone(), value, cap))
        })
        .collect();
    let mut candidates = Vec::new();
    for padding in count_combos(&caps) {
        candidates.extend(interleavings(&low, &padding));
    }
    candidates
}

/// A valid deletion point: `input = prefix . deleted . suffix` where the
/// deleted item is high and every high item in the suffix already carries
/// its channel default.
#[derive(Debug, Clone)]
pub struct DiDecomposition {
    pub index: usize,
    pub prefix: Vec<IoItem>,
    pub deleted: IoItem,
    pub suffix: Vec<IoItem>,
}

pub fn di_decompositions(
    env: &ChannelEnv,
    input: &IoQueue,
    defaults: &BTreeMap<ChannelName, Value>,
) -> Vec<DiDecomposition> {
    let items = input.items();
    let mut decompositions = Vec::new();
    for (index, item) in items.iter().enumerate() {
        if env.level(&item.channel) != Some(Level::H) {
            continue;
        }
        let suffix = &items[index + 1..];
        let suffix_default = suffix.iter().all(|it| {
            env.level(&it.channel) != Some(Level::H) || defaults.get(&it.channel) == Some(&it.value)
        });
        if suffix_default {
            decompositions.push(DiDecomposition {
                index,
                prefix: items[..index].to_vec(),
                deleted: item.clone(),
                suffix: suffix.to_vec(),
            });
        }
    }
    decompositions
}

/// Deletion-of-inputs correction candidates: the prefix is kept verbatim;
/// the suffix is rebuilt from its low subsequence interleaved with default
/// high items. In the strict variant the per-channel suffix length may not
/// grow; otherwise one extra default item per channel (plus the slot of
/// the deleted item) is allowed.
pub fn di_candidates(
    env: &ChannelEnv,
    decomposition: &DiDecomposition,
    defaults: &BTreeMap<ChannelName, Value>,
    strict: bool,
) -> Vec<IoQueue> {
    let suffix_q = IoQueue::from_items(decomposition.suffix.clone());
    let low: Vec<IoItem> = suffix_q
        .restrict(|it| env.level(&it.channel) == Some(Level::L))
        .items()
        .to_vec();
    let caps: Vec<(ChannelName, Value, usize)> = env
        .inputs()
        .filter(|c| c.level == Level::H)
        .filter_map(|c| {
            let in_suffix = suffix_q.restrict_channel(&c.name).len();
            let deleted_here = usize::from(decomposition.deleted.channel == c.name);
            let cap = if strict {
                in_suffix
            } else {
                in_suffix + deleted_here + 1
            };
            let value = defaults.get(&c.name).copied()?;
            (cap > 0).then_some((c.name.clone(), value, cap))
        })
        .collect();
    let mut candidates = Vec::new();
    for padding in count_combos(&caps) {
        for tail in interleavings(&low, &padding) {
            let mut items = decomposition.prefix.clone();
            items.extend(tail.items().iter().cloned());
            candidates.push(IoQueue::from_items(items));
        }
    }
    candidates
}
