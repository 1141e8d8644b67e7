//! Invariant harness for the enforcement machine, used by the verification
//! suites: frame checks (a transition touches only the state its rule
//! names), signal hygiene (waking clears the interrupt signal), and table
//! shape (one privilege column per live execution).

use crate::em::config::{EmConfig, ExecState, HandlerRule, LocalExec, LocalRule, TransitionLabel};
use crate::em::rules::{apply_transition, enabled, init_em};
use crate::em::run::RunOutcome;
use crate::lang::ast::Stmt;
use crate::lang::channel::ChannelEnv;
use crate::lang::queue::IoQueue;
use crate::policies::PolicyConfig;
use crate::rng::SplitMix64;

#[derive(Debug, Clone, Copy)]
enum ExecField {
    State,
    Signal,
    Prg,
    Mem,
    Input,
    Output,
}

fn patch_exec(dst: &mut LocalExec, src: &LocalExec, fields: &[ExecField]) {
    for field in fields {
        match field {
            ExecField::State => dst.state = src.state,
            ExecField::Signal => dst.signal = src.signal.clone(),
            ExecField::Prg => dst.prg = src.prg.clone(),
            ExecField::Mem => dst.mem = src.mem.clone(),
            ExecField::Input => dst.input = src.input.clone(),
            ExecField::Output => dst.output = src.output.clone(),
        }
    }
}

fn local_fields(rule: LocalRule) -> &'static [ExecField] {
    match rule {
        LocalRule::Assign => &[ExecField::Prg, ExecField::Mem],
        LocalRule::IfTrue
        | LocalRule::IfFalse
        | LocalRule::WhileTrue
        | LocalRule::WhileFalse
        | LocalRule::SkipSeq => &[ExecField::Prg],
        LocalRule::InputLocal => &[ExecField::Prg, ExecField::Mem, ExecField::Input],
        LocalRule::InputWait => &[ExecField::State, ExecField::Signal],
        LocalRule::OutputSignal => &[
            ExecField::Prg,
            ExecField::State,
            ExecField::Signal,
            ExecField::Output,
        ],
    }
}

/// Assert that `after` differs from `before` only in the state the rule of
/// `label` is allowed to touch. Everything else must be bit-identical.
pub fn assert_frame(before: &EmConfig, after: &EmConfig, label: &TransitionLabel) {
    let mut patched = before.clone();
    match label {
        TransitionLabel::Local { exec, rule } => {
            patch_exec(
                patched.exec_mut(*exec),
                &after.execs[*exec],
                local_fields(*rule),
            );
        }
        TransitionLabel::MapActivate { exec, .. } => {
            patched.map = after.map.clone();
            patch_exec(
                patched.exec_mut(*exec),
                &after.execs[*exec],
                &[ExecField::Signal],
            );
        }
        TransitionLabel::ReduceActivate { exec, .. } => {
            patched.red = after.red.clone();
            patch_exec(
                patched.exec_mut(*exec),
                &after.execs[*exec],
                &[ExecField::Signal],
            );
        }
        TransitionLabel::MapStep { rule } => {
            patched.map = after.map.clone();
            patch_handler_effects(&mut patched, after, *rule);
        }
        TransitionLabel::ReduceStep { rule } => {
            patched.red = after.red.clone();
            patch_handler_effects(&mut patched, after, *rule);
        }
    }
    assert_eq!(
        &patched, after,
        "transition {label} touched state outside its rule's footprint"
    );
}

fn patch_handler_effects(patched: &mut EmConfig, after: &EmConfig, rule: HandlerRule) {
    match rule {
        HandlerRule::Assign
        | HandlerRule::IfTrue
        | HandlerRule::IfFalse
        | HandlerRule::WhileTrue
        | HandlerRule::WhileFalse
        | HandlerRule::SkipSeq
        | HandlerRule::Retrieve => {}
        HandlerRule::GlobalInput => patched.input = after.input.clone(),
        HandlerRule::GlobalOutput => patched.output = after.output.clone(),
        HandlerRule::MapSend => {
            for i in 0..patched.execs.len().min(after.execs.len()) {
                let src = after.execs[i].clone();
                patch_exec(patched.exec_mut(i), &src, &[ExecField::Input]);
            }
        }
        HandlerRule::Wake => {
            for i in 0..patched.execs.len().min(after.execs.len()) {
                let src = after.execs[i].clone();
                patch_exec(
                    patched.exec_mut(i),
                    &src,
                    &[ExecField::State, ExecField::Signal],
                );
            }
        }
        HandlerRule::Clean => {
            for i in 0..patched.execs.len().min(after.execs.len()) {
                let src = after.execs[i].clone();
                patch_exec(patched.exec_mut(i), &src, &[ExecField::Output]);
            }
        }
        HandlerRule::Clone => {
            // Existing executions and table columns must be untouched; new
            // ones are appended at the end.
            assert!(
                after.execs.len() >= patched.execs.len(),
                "clone removed executions"
            );
            for (dst, src) in patched.execs.iter().zip(after.execs.iter()) {
                assert_eq!(dst, src, "clone modified an existing execution");
            }
            for (name, row) in patched.t_m.rows() {
                let after_row: Vec<_> = after
                    .t_m
                    .rows()
                    .find(|(n, _)| *n == name)
                    .map(|(_, r)| r.clone())
                    .unwrap_or_default();
                assert_eq!(
                    &after_row[..row.len()],
                    &row[..],
                    "clone rewrote T_M row {name}"
                );
            }
            for (name, row) in patched.t_r.rows() {
                let after_row: Vec<_> = after
                    .t_r
                    .rows()
                    .find(|(n, _)| *n == name)
                    .map(|(_, r)| r.clone())
                    .unwrap_or_default();
                assert_eq!(
                    &after_row[..row.len()],
                    &row[..],
                    "clone rewrote T_R row {name}"
                );
            }
            patched.execs = after.execs.clone();
            patched.t_m = after.t_m.clone();
            patched.t_r = after.t_r.clone();
        }
    }
}

/// Sleep/wake discipline: an execution that moves from sleeping to
/// executing carries no interrupt signal, and an executing execution never
/// carries one.
pub fn assert_signal_hygiene(before: &EmConfig, after: &EmConfig) {
    for (i, (b, a)) in before.execs.iter().zip(after.execs.iter()).enumerate() {
        if b.state == ExecState::S && a.state == ExecState::E {
            assert!(
                a.signal.is_none(),
                "execution {i} woke up with a pending signal"
            );
        }
    }
    for (i, e) in after.execs.iter().enumerate() {
        if e.state == ExecState::E {
            assert!(e.signal.is_none(), "executing execution {i} holds a signal");
        }
    }
}

/// Both tables carry exactly one column per live execution.
pub fn assert_table_shape(cfg: &EmConfig) {
    assert_eq!(cfg.t_m.columns(), cfg.execs.len());
    assert_eq!(cfg.t_r.columns(), cfg.execs.len());
}

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct FuzzStats {
    pub transitions: u64,
    pub wakes: u64,
    pub clones: u64,
}

/// Random walk over the transition system with every invariant checked at
/// every step. Returns the number of transitions exercised.
pub fn fuzz_run(
    prg: &Stmt,
    policy: &PolicyConfig,
    env: &ChannelEnv,
    input: &IoQueue,
    seed: u64,
    max_steps: u64,
) -> FuzzStats {
    let mut rng = SplitMix64::new(seed);
    let mut cfg = init_em(prg, policy, env, input).expect("fuzz configuration");
    let mut stats = FuzzStats::default();
    let initial_execs = cfg.execs.len();
    for _ in 0..max_steps {
        let labels = enabled(&cfg);
        if labels.is_empty() {
            break;
        }
        let label = rng.choose(&labels).clone();
        let (next, _) = apply_transition(&cfg, &label).expect("enabled transition applies");
        assert_frame(&cfg, &next, &label);
        assert_signal_hygiene(&cfg, &next);
        assert_table_shape(&next);
        match &label {
            TransitionLabel::MapStep {
                rule: HandlerRule::Wake,
            }
            | TransitionLabel::ReduceStep {
                rule: HandlerRule::Wake,
            } => stats.wakes += 1,
            TransitionLabel::MapStep {
                rule: HandlerRule::Clone,
            } => stats.clones += next.execs.len() as u64 - cfg.execs.len() as u64,
            _ => {}
        }
        stats.transitions += 1;
        cfg = next;
    }
    assert_eq!(
        cfg.execs.len(),
        initial_execs + stats.clones as usize,
        "table growth bookkeeping"
    );
    stats
}

/// Classification shortcut used by suites that only need the outcome.
pub fn classify(cfg: &EmConfig) -> Option<RunOutcome> {
    if !enabled(cfg).is_empty() {
        return None;
    }
    Some(if cfg.is_terminated() {
        RunOutcome::Completed
    } else if cfg.is_quiescent_programs() {
        RunOutcome::QuiescentWithResidual
    } else {
        RunOutcome::Deadlocked
    })
}
