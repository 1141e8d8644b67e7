//! Brute-force bounded checkers for the information-flow properties
//! themselves: TINI, TSNI, RI, and DI.
//!
//! Everything here is bounded: inputs range over per-channel alphabets up
//! to a maximum queue length, runs are step-budgeted, and `Holds` always
//! means "no counterexample within these bounds". A budget-exhausted run
//! counts as non-terminating, so verdicts that hinge on divergence are
//! budget-relative and flagged as such.

pub mod checks;
pub mod corrections;
pub mod domain;

pub use checks::{check, check_di, check_ri, check_tini, check_tsni, verify_witness, RunView};
pub use corrections::{di_candidates, di_decompositions, ri_candidates, DiDecomposition};
pub use domain::InputDomain;

use crate::lang::channel::ChannelName;
use crate::lang::queue::IoQueue;
use crate::lang::value::Value;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Property {
    Tini,
    Tsni,
    Ri,
    Di,
}

impl Property {
    pub fn parse(s: &str) -> Option<Property> {
        match s {
            "tini" => Some(Property::Tini),
            "tsni" => Some(Property::Tsni),
            "ri" => Some(Property::Ri),
            "di" => Some(Property::Di),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Property::Tini => "tini",
            Property::Tsni => "tsni",
            Property::Ri => "ri",
            Property::Di => "di",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    /// No counterexample within the stated bounds.
    Holds,
    /// A concrete, replayable counterexample was found.
    Violated,
    /// The case cap was hit before the enumeration finished.
    Inconclusive,
}

/// The bounds a verdict is relative to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds {
    pub max_len: usize,
    pub budget: u64,
    pub alphabets: BTreeMap<ChannelName, Vec<Value>>,
}

/// A replayable counterexample: the failing clause of the definition plus
/// the concrete inputs that exhibit it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "clause", rename_all = "snake_case")]
pub enum Witness {
    /// Two low-equivalent terminating inputs with distinguishable outputs.
    LowOutputs {
        input_a: Vec<crate::lang::queue::IoItem>,
        output_a: Vec<crate::lang::queue::IoItem>,
        input_b: Vec<crate::lang::queue::IoItem>,
        output_b: Vec<crate::lang::queue::IoItem>,
    },
    /// A terminating input with a low-equivalent diverging partner.
    Termination {
        input_a: Vec<crate::lang::queue::IoItem>,
        output_a: Vec<crate::lang::queue::IoItem>,
        input_b: Vec<crate::lang::queue::IoItem>,
    },
    /// No removal-of-inputs correction exists for this input and default
    /// assignment.
    RiCorrection {
        input: Vec<crate::lang::queue::IoItem>,
        output: Vec<crate::lang::queue::IoItem>,
        defaults: BTreeMap<ChannelName, Value>,
        candidates_tried: u64,
    },
    /// No deletion-of-inputs correction exists for this decomposition.
    DiCorrection {
        input: Vec<crate::lang::queue::IoItem>,
        output: Vec<crate::lang::queue::IoItem>,
        defaults: BTreeMap<ChannelName, Value>,
        /// Index of the deleted high item within `input`.
        deleted_index: usize,
        candidates_tried: u64,
    },
}

impl Witness {
    /// The primary input of the counterexample, for replay.
    pub fn replay_input(&self) -> IoQueue {
        let items = match self {
            Witness::LowOutputs { input_a, .. } => input_a,
            Witness::Termination { input_a, .. } => input_a,
            Witness::RiCorrection { input, .. } => input,
            Witness::DiCorrection { input, .. } => input,
        };
        IoQueue::from_items(items.clone())
    }

    /// The output the primary input must reproduce under replay.
    pub fn replay_output(&self) -> Option<IoQueue> {
        let items = match self {
            Witness::LowOutputs { output_a, .. } => output_a,
            Witness::Termination { output_a, .. } => output_a,
            Witness::RiCorrection { output, .. } => output,
            Witness::DiCorrection { output, .. } => output,
        };
        Some(IoQueue::from_items(items.clone()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub property: Property,
    pub verdict: Verdict,
    pub bounds: Bounds,
    /// Runs executed (inputs plus correction candidates).
    pub cases: u64,
    /// Some run hit the step budget, so divergence-sensitive conclusions
    /// are budget-relative.
    pub budget_limited: bool,
    pub witness: Option<Witness>,
}

/// Tuning knobs for a check.
#[derive(Debug, Clone)]
pub struct CheckOptions {
    pub budget: u64,
    /// Per-channel length cap on deletion-of-inputs corrections
    /// (the stricter variant of the definition).
    pub di_strict: bool,
    /// Abort with `Inconclusive` after this many runs.
    pub max_cases: Option<u64>,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            budget: 10_000,
            di_strict: false,
            max_cases: None,
        }
    }
}
