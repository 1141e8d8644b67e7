//! Shared helpers for the end-to-end and acceptance suites.
#![allow(dead_code)]

use multex_core::em::run::RunResult;
use multex_core::em::EmEvent;
use multex_core::io::{load_program, parse_channel_env, parse_input_trace};
use multex_core::lang::channel::{Channel, ChannelEnv, ChannelName, Level};
use multex_core::lang::queue::{IoItem, IoQueue};
use multex_core::lang::value::Value;
use multex_core::lang::Program;
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::Command;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

pub fn fixture(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).unwrap_or_else(|e| panic!("fixture {name}: {e}"))
}

pub fn env(name: &str) -> ChannelEnv {
    parse_channel_env(&fixture(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn standard_env() -> ChannelEnv {
    env("standard.channels")
}

pub fn program(name: &str, env: &ChannelEnv) -> Program {
    load_program(&fixture(name), env).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn trace(name: &str, env: &ChannelEnv) -> IoQueue {
    parse_input_trace(&fixture(name), env).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn q(items: &[(&str, Value)]) -> IoQueue {
    items.iter().map(|(c, v)| IoItem::new(*c, *v)).collect()
}

pub fn corpus() -> Vec<(&'static str, Program, ChannelEnv)> {
    let standard = standard_env();
    let e12a = env("fig12a.channels");
    let e12b = env("fig12b.channels");
    vec![
        ("fig8", program("fig8.ifc", &standard), standard.clone()),
        ("fig12a", program("fig12a.ifc", &e12a), e12a),
        ("fig12b", program("fig12b.ifc", &e12b), e12b),
        ("fig14c", program("fig14c.ifc", &standard), standard),
    ]
}

/// The environment with the default values of the high in-channels
/// replaced by `assignment`.
pub fn env_with_defaults(
    env: &ChannelEnv,
    assignment: &BTreeMap<ChannelName, Value>,
) -> ChannelEnv {
    let channels: Vec<Channel> = env
        .iter()
        .map(|ch| {
            let mut ch = ch.clone();
            if let Some(v) = assignment.get(&ch.name) {
                ch.default_value = *v;
            }
            ch
        })
        .collect();
    ChannelEnv::new(channels).expect("defaults replacement keeps names unique")
}

/// Input-side instrumentation assertions shared by the suites.
pub fn assert_input_props(policy: &str, env: &ChannelEnv, result: &RunResult) {
    for timed in &result.events {
        match &timed.event {
            EmEvent::GlobalRead { exec, channel, .. } => {
                if matches!(policy, "ni" | "di") && env.level(channel) == Some(Level::H) {
                    assert_eq!(
                        *exec, 0,
                        "{policy}: global read on high `{channel}` attributed to execution {exec}"
                    );
                }
            }
            EmEvent::Delivered {
                exec: 1,
                channel,
                value,
            } if env.level(channel) == Some(Level::H) => {
                assert_eq!(Some(*value), env.default_value(channel));
            }
            _ => {}
        }
    }
}

/// Output-side instrumentation assertions shared by the suites.
pub fn assert_output_props(policy: &str, env: &ChannelEnv, result: &RunResult) {
    for record in &result.global_output {
        match env.level(&record.channel) {
            Some(Level::H) => assert_eq!(record.source_exec, 0, "{policy}"),
            Some(Level::L) => assert_eq!(record.source_exec, 1, "{policy}"),
            None => panic!("output on undeclared channel `{}`", record.channel),
        }
        assert!(record.source_exec < 2, "{policy}: output from a clone");
    }
}

/// Invoke the built binary; returns (exit code, stdout).
pub fn multex(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_multex"))
        .args(args)
        .output()
        .expect("spawn multex");
    let stdout = String::from_utf8_lossy(&out.stdout).to_string();
    let stderr = String::from_utf8_lossy(&out.stderr).to_string();
    (out.status.code().unwrap_or(-1), format!("{stdout}{stderr}"))
}

pub fn fx(name: &str) -> String {
    fixture_path(name).to_string_lossy().to_string()
}
