//! Machine-level invariants: frame conditions, signal hygiene, table
//! growth, queue algebra laws, and the equivalence between a single
//! fully-privileged local execution and the bare interpreter.

mod common;

use common::*;
use multex_core::em::config::{PrivCell, TableTemplate};
use multex_core::em::{run_enforced, RunOutcome, SchedulerPolicy};
use multex_core::harness::fuzz_run;
use multex_core::lang::machine::{run_program, Outcome};
use multex_core::lang::queue::{channel_eq_all, low_eq, IoItem, IoQueue};
use multex_core::lang::value::Value;
use multex_core::policies::{builtin_policy, PolicyConfig, BUILTIN_POLICY_NAMES};
use multex_core::rng::SplitMix64;

fn sample_value(kind: multex_core::lang::Kind) -> Value {
    match kind {
        multex_core::lang::Kind::Bool => Value::Bool(true),
        multex_core::lang::Kind::Int => Value::Int(2),
    }
}

#[test]
fn random_transitions_respect_rule_frames() {
    let mut total = 0u64;
    for (_, prg, env) in corpus() {
        // One item per in-channel plus a second round of the first two, so
        // every policy sees reads, defaults, wakes, and (for DI) clones.
        let mut items: Vec<IoItem> = env
            .inputs()
            .map(|ch| IoItem::new(ch.name.clone(), sample_value(ch.kind())))
            .collect();
        let extra: Vec<IoItem> = items.iter().take(2).cloned().collect();
        items.extend(extra);
        let input = IoQueue::from_items(items);
        for policy_name in BUILTIN_POLICY_NAMES {
            let policy = builtin_policy(policy_name).unwrap();
            for seed in 0..8u64 {
                let stats = fuzz_run(&prg, &policy, &env, &input, seed, 400);
                total += stats.transitions;
            }
        }
    }
    assert!(total >= 1000, "only {total} transitions exercised");
}

/// A policy with a single execution holding every privilege; its one local
/// execution should behave, channel by channel, like the bare interpreter.
fn permissive_policy() -> PolicyConfig {
    let mut policy = builtin_policy("ri").unwrap();
    policy.name = "permissive".to_string();
    policy.description = "single fully-privileged execution".to_string();
    policy.initial_exec_count = 1;
    policy.t_m = TableTemplate::from_levels(vec![PrivCell::ASK_TELL], vec![PrivCell::ASK_TELL]);
    policy.t_r = TableTemplate::from_levels(vec![PrivCell::ASK_TELL], vec![PrivCell::ASK_TELL]);
    policy
}

#[test]
fn single_privileged_execution_matches_the_bare_interpreter() {
    let mut compared = 0;
    for (name, prg, env) in corpus() {
        let dom = multex_core::oracle::InputDomain::standard(&env, 3, &[0, 1, 2]);
        let policy = permissive_policy();
        for input in dom.inputs() {
            let Outcome::Terminated { output } = run_program(&prg, &input, 4_000) else {
                continue;
            };
            let result = run_enforced(
                &prg,
                &policy,
                &env,
                &input,
                SchedulerPolicy::LowestIndex,
                20_000,
            )
            .unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(result.outcome, RunOutcome::Completed, "{name} on {input}");
            assert!(
                channel_eq_all(&result.consumed, &input),
                "{name}: consumption differs on {input}"
            );
            assert!(
                channel_eq_all(&result.global_out, &output),
                "{name}: outputs differ on {input}: {} vs {}",
                result.global_out,
                output
            );
            compared += 1;
        }
    }
    assert!(compared > 20, "only {compared} terminating inputs compared");
}

#[test]
fn low_eq_is_an_equivalence_relation() {
    let env = standard_env();
    let mut rng = SplitMix64::new(0x5EED);
    let channels = ["cH1", "cH2", "cL1", "cL2"];
    let random_queue = |rng: &mut SplitMix64| -> IoQueue {
        let len = rng.next_below(5);
        (0..len)
            .map(|_| {
                let c = *rng.choose(&channels);
                let v = match c {
                    "cH1" | "cL1" => Value::Bool(rng.next_bool()),
                    _ => Value::Int(rng.next_below(3) as u64),
                };
                IoItem::new(c, v)
            })
            .collect()
    };
    for _ in 0..300 {
        let a = random_queue(&mut rng);
        let b = random_queue(&mut rng);
        let c = random_queue(&mut rng);
        assert!(low_eq(&a, &a, &env), "reflexive");
        assert_eq!(low_eq(&a, &b, &env), low_eq(&b, &a, &env), "symmetric");
        if low_eq(&a, &b, &env) && low_eq(&b, &c, &env) {
            assert!(low_eq(&a, &c, &env), "transitive");
        }
    }
}

#[test]
fn restriction_laws() {
    let env = standard_env();
    let mut rng = SplitMix64::new(0xFACE);
    let channels = ["cH1", "cH2", "cL1", "cL2"];
    for _ in 0..300 {
        let len = rng.next_below(6);
        let queue: IoQueue = (0..len)
            .map(|_| {
                let c = *rng.choose(&channels);
                let v = match c {
                    "cH1" | "cL1" => Value::Bool(rng.next_bool()),
                    _ => Value::Int(rng.next_below(4) as u64),
                };
                IoItem::new(c, v)
            })
            .collect();
        // Idempotence of restriction.
        let low = queue.restrict_level(&env, multex_core::lang::channel::Level::L);
        assert_eq!(
            low.restrict_level(&env, multex_core::lang::channel::Level::L),
            low
        );
        // Dequeue/restrict coherence on every channel.
        for c in channels {
            let (v, rest) = queue.dequeue(c);
            let removed = usize::from(v.is_some());
            assert_eq!(
                queue.restrict_channel(c).len(),
                rest.restrict_channel(c).len() + removed
            );
            for other in channels {
                if other != c {
                    assert_eq!(queue.restrict_channel(other), rest.restrict_channel(other));
                }
            }
        }
    }
}

#[test]
fn parser_round_trip_over_corpus_and_generated_programs() {
    use multex_core::lang::gen::gen_stmt;
    use multex_core::lang::parser::parse_program;
    use multex_core::lang::pretty::pretty_program;

    for (name, prg, _) in corpus() {
        let printed = pretty_program(&prg);
        assert_eq!(parse_program(&printed).unwrap(), prg, "{name}");
    }
    let mut rng = SplitMix64::new(0xA57);
    for i in 0..500 {
        let prg = gen_stmt(&mut rng, 3);
        let printed = pretty_program(&prg);
        let reparsed =
            parse_program(&printed).unwrap_or_else(|e| panic!("case {i}: {e}\n{printed}"));
        assert_eq!(reparsed, prg, "case {i}:\n{printed}");
    }
}

#[test]
fn running_example_has_the_expected_shape() {
    // Four inputs, two outputs, two branches.
    let env = standard_env();
    let prg = program("fig8.ifc", &env);
    fn count(stmt: &multex_core::lang::Stmt) -> (usize, usize, usize) {
        use multex_core::lang::Stmt;
        match stmt {
            Stmt::Skip | Stmt::Assign(_, _) => (0, 0, 0),
            Stmt::Seq(a, b) => {
                let (i1, o1, f1) = count(a);
                let (i2, o2, f2) = count(b);
                (i1 + i2, o1 + o2, f1 + f2)
            }
            Stmt::If(_, t, e) => {
                let (i1, o1, f1) = count(t);
                let (i2, o2, f2) = count(e);
                (i1 + i2, o1 + o2, f1 + f2 + 1)
            }
            Stmt::While(_, body) => count(body),
            Stmt::Input { .. } => (1, 0, 0),
            Stmt::Output { .. } => (0, 1, 0),
        }
    }
    assert_eq!(count(&prg), (4, 2, 2));
}
