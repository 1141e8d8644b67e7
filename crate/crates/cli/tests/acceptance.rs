//! Acceptance suite: one test per release criterion, each printing a
//! PASS line (run with `--nocapture` to see them). The bounds (queue
//! lengths, alphabets, budgets, exploration depth) are pinned here.

mod support;

use multex_core::em::{explore, run_enforced, RunOutcome, SchedulerPolicy};
use multex_core::harness::fuzz_run;
use multex_core::lang::machine::{run_program, Outcome};
use multex_core::lang::queue::{channel_eq_all, low_eq, IoQueue};
use multex_core::lang::value::Value;
use multex_core::oracle::{
    check, check_di, check_ri, check_tini, di_candidates, di_decompositions, ri_candidates,
    verify_witness, CheckOptions, InputDomain, Property, Verdict,
};
use multex_core::policies::{builtin_policy, di_policy, ni_policy, ri_policy, subdi_policy};
use std::collections::HashMap;
use support::*;

const RUN_BUDGET: u64 = 10_000;
const SUITE_BUDGET: u64 = 3_000;

fn all_schedulers() -> Vec<SchedulerPolicy> {
    let mut out = vec![SchedulerPolicy::RoundRobin, SchedulerPolicy::LowestIndex];
    for seed in 1..=5u64 {
        out.push(SchedulerPolicy::SeededRandom { seed });
    }
    out
}

/// Criterion 1: the removal-of-inputs run of the worked example consumes
/// all four inputs and emits exactly (cH3,2) and (cL3,2), identically
/// across round-robin, lowest-index, and five random seeds.
#[test]
fn a01_ri_worked_run_is_exact_under_every_scheduler() {
    let env = standard_env();
    let prg = program("fig8.ifc", &env);
    let input = trace("fig9.trace", &env);
    let expected = q(&[("cH3", Value::Int(2)), ("cL3", Value::Int(2))]);
    for sched in all_schedulers() {
        let result =
            run_enforced(&prg, &ri_policy(), &env, &input, sched.clone(), RUN_BUDGET).unwrap();
        assert_eq!(result.outcome, RunOutcome::Completed, "{sched:?}");
        assert!(result.residual.is_empty(), "{sched:?}");
        assert!(channel_eq_all(&result.consumed, &input), "{sched:?}");
        assert_eq!(result.global_out, expected, "{sched:?}");
        assert_input_props("ri", &env, &result);
        assert_output_props("ri", &env, &result);
    }
    let (code, _) = multex(&[
        "run",
        "--policy",
        "ri",
        "--program",
        &fx("fig8.ifc"),
        "--channels",
        &fx("standard.channels"),
        "--input",
        &fx("fig9.trace"),
    ]);
    assert_eq!(code, 0);
    println!("acceptance 1 (ri worked run, all schedulers): PASS");
}

/// Criterion 2: the noninterference run of the same input leaves exactly
/// the unrequested high item, produces the same outputs, and never reads a
/// high channel for the low execution.
#[test]
fn a02_ni_worked_run_keeps_residual_and_high_reads_private() {
    let env = standard_env();
    let prg = program("fig8.ifc", &env);
    let input = trace("fig9.trace", &env);
    let expected = q(&[("cH3", Value::Int(2)), ("cL3", Value::Int(2))]);
    for sched in all_schedulers() {
        let result =
            run_enforced(&prg, &ni_policy(), &env, &input, sched.clone(), RUN_BUDGET).unwrap();
        assert_eq!(
            result.outcome,
            RunOutcome::QuiescentWithResidual,
            "{sched:?}"
        );
        assert_eq!(result.residual, q(&[("cH2", Value::Int(7))]), "{sched:?}");
        assert_eq!(result.global_out, expected, "{sched:?}");
        assert_input_props("ni", &env, &result);
        assert_output_props("ni", &env, &result);
    }
    println!("acceptance 2 (ni worked run, residual and privacy): PASS");
}

/// Criterion 3: the deletion-of-inputs run clones the high execution
/// exactly once, matches the noninterference outputs globally, and the
/// clone's outputs never reach the global queue.
#[test]
fn a03_di_worked_run_clones_once_and_discards_clone_output() {
    let env = standard_env();
    let prg = program("fig8.ifc", &env);
    let input = trace("fig9.trace", &env);
    let expected = q(&[("cH3", Value::Int(2)), ("cL3", Value::Int(2))]);
    for sched in all_schedulers() {
        let result =
            run_enforced(&prg, &di_policy(), &env, &input, sched.clone(), RUN_BUDGET).unwrap();
        assert_eq!(
            result.outcome,
            RunOutcome::QuiescentWithResidual,
            "{sched:?}"
        );
        assert_eq!(result.clone_count, 1, "{sched:?}");
        assert_eq!(result.executions.len(), 3, "{sched:?}");
        assert_eq!(result.global_out, expected, "{sched:?}");
        assert_eq!(result.residual, q(&[("cH2", Value::Int(7))]));
        assert!(result.global_output.iter().all(|r| r.source_exec < 2));
        assert_input_props("di", &env, &result);
        assert_output_props("di", &env, &result);
    }
    println!("acceptance 3 (di worked run, one clone, silent clone): PASS");
}

/// Criterion 4: the relationship matrix at K=3 — fig12a satisfies
/// termination-insensitive noninterference but not removal of inputs;
/// fig12b satisfies removal but not deletion of inputs. Both violation
/// witnesses replay to confirmed definitional failures.
#[test]
fn a04_relationship_matrix_with_replayable_witnesses() {
    let opts = CheckOptions {
        budget: 10_000,
        di_strict: false,
        max_cases: None,
    };

    let env_a = env("fig12a.channels");
    let prg_a = program("fig12a.ifc", &env_a);
    let dom_a = InputDomain::standard(&env_a, 3, &[0, 1]);
    assert_eq!(check_tini(&prg_a, &dom_a, &opts).verdict, Verdict::Holds);
    let ri = check_ri(&prg_a, &dom_a, &opts);
    assert_eq!(ri.verdict, Verdict::Violated);
    assert!(verify_witness(
        &prg_a,
        &dom_a,
        &opts,
        ri.witness.as_ref().unwrap()
    ));

    let env_b = env("fig12b.channels");
    let prg_b = program("fig12b.ifc", &env_b);
    let dom_b = InputDomain::standard(&env_b, 3, &[0, 1]);
    assert_eq!(check_ri(&prg_b, &dom_b, &opts).verdict, Verdict::Holds);
    let di = check_di(&prg_b, &dom_b, &opts);
    assert_eq!(di.verdict, Verdict::Violated);
    assert!(verify_witness(
        &prg_b,
        &dom_b,
        &opts,
        di.witness.as_ref().unwrap()
    ));

    // The same matrix through the CLI, including exit codes and the
    // written witness replaying under `run --policy none`.
    let witness_path = std::env::temp_dir().join("multex-acceptance-ri-witness.json");
    let (code, _) = multex(&[
        "check",
        "--property",
        "ri",
        "--program",
        &fx("fig12a.ifc"),
        "--channels",
        &fx("fig12a.channels"),
        "--max-len",
        "3",
        "--witness",
        witness_path.to_str().unwrap(),
    ]);
    assert_eq!(code, 1);
    let witness_doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&witness_path).unwrap()).unwrap();
    let replay_input = serde_json::to_string(&witness_doc["replay"]["input"]).unwrap();
    let input_path = std::env::temp_dir().join("multex-acceptance-ri-input.json");
    std::fs::write(&input_path, replay_input).unwrap();
    let out_path = std::env::temp_dir().join("multex-acceptance-ri-run.json");
    let (code, _) = multex(&[
        "run",
        "--policy",
        "none",
        "--program",
        &fx("fig12a.ifc"),
        "--channels",
        &fx("fig12a.channels"),
        "--input",
        input_path.to_str().unwrap(),
        "--output",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let run_doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(run_doc["outcome"], "terminated");
    let produced: Vec<serde_json::Value> = run_doc["global_output"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| serde_json::json!({"channel": r["channel"], "value": r["value"]}))
        .collect();
    assert_eq!(
        serde_json::Value::Array(produced),
        witness_doc["replay"]["expected_output"]
    );

    let (code, _) = multex(&[
        "check",
        "--property",
        "tini",
        "--program",
        &fx("fig12a.ifc"),
        "--channels",
        &fx("fig12a.channels"),
        "--max-len",
        "3",
    ]);
    assert_eq!(code, 0);
    let (code, _) = multex(&[
        "check",
        "--property",
        "di",
        "--program",
        &fx("fig12b.ifc"),
        "--channels",
        &fx("fig12b.channels"),
        "--max-len",
        "3",
        "--budget",
        "10000",
        "--witness",
        std::env::temp_dir()
            .join("multex-acceptance-di-witness.json")
            .to_str()
            .unwrap(),
    ]);
    assert_eq!(code, 1);
    println!("acceptance 4 (relationship matrix with witnesses): PASS");
}

/// A cached enforced run: completion flag and global output.
struct EnforcedCache {
    runs: HashMap<IoQueue, (bool, IoQueue)>,
}

impl EnforcedCache {
    fn new() -> Self {
        EnforcedCache {
            runs: HashMap::new(),
        }
    }

    fn run(
        &mut self,
        prg: &multex_core::lang::Program,
        policy: &multex_core::policies::PolicyConfig,
        env: &multex_core::lang::channel::ChannelEnv,
        input: &IoQueue,
    ) -> (bool, IoQueue) {
        if let Some(hit) = self.runs.get(input) {
            return hit.clone();
        }
        let result = run_enforced(
            prg,
            policy,
            env,
            input,
            SchedulerPolicy::RoundRobin,
            SUITE_BUDGET,
        )
        .expect("suite run");
        let entry = (
            result.outcome == RunOutcome::Completed,
            result.global_out.clone(),
        );
        self.runs.insert(input.clone(), entry.clone());
        entry
    }
}

/// Criterion 5: bounded soundness. Low-equivalent input pairs produce
/// low-equivalent outputs under noninterference enforcement, and the
/// removal/deletion definitional shapes hold of the enforced runs
/// themselves, for every corpus program at K <= 3.
#[test]
fn a05_soundness_suite_on_enforced_runs() {
    let mut ni_pairs = 0u64;
    let mut ri_cases = 0u64;
    let mut di_cases = 0u64;

    for (name, prg, env) in corpus() {
        let dom = InputDomain::standard(&env, 3, &[0, 1]);

        // Noninterference: group quiescent enforced runs by the low
        // projection of the input; all outputs in a group must agree low.
        let ni = ni_policy();
        let mut groups: HashMap<IoQueue, (IoQueue, IoQueue)> = HashMap::new();
        for input in dom.inputs() {
            let result = run_enforced(
                &prg,
                &ni,
                &env,
                &input,
                SchedulerPolicy::RoundRobin,
                SUITE_BUDGET,
            )
            .unwrap();
            if !result.is_quiescent() {
                continue;
            }
            let key = input.restrict(|it| {
                env.level(&it.channel) == Some(multex_core::lang::channel::Level::L)
            });
            match groups.get(&key) {
                None => {
                    groups.insert(key, (input, result.global_out));
                }
                Some((rep_in, rep_out)) => {
                    assert!(
                        low_eq(rep_out, &result.global_out, &env),
                        "{name}: ni outputs differ for low-equivalent inputs {rep_in} vs {input}"
                    );
                    ni_pairs += 1;
                }
            }
        }

        // Removal of inputs, applied to the enforced runs. The machine
        // consumes a merged queue up to per-channel order, so it completes
        // on reorderings the controlled program itself can never consume;
        // the definitional obligations range over the program's own
        // possible traces, i.e. inputs whose bare run terminates.
        let ri = ri_policy();
        for defaults in dom.default_assignments() {
            let env_df = env_with_defaults(&env, &defaults);
            let mut cache = EnforcedCache::new();
            for input in dom.inputs() {
                if !matches!(
                    run_program(&prg, &input, SUITE_BUDGET),
                    Outcome::Terminated { .. }
                ) {
                    continue;
                }
                let (completed, output) = cache.run(&prg, &ri, &env_df, &input);
                if !completed {
                    continue;
                }
                ri_cases += 1;
                let corrected = ri_candidates(&env_df, &input, &defaults)
                    .iter()
                    .any(|candidate| {
                        let (ok, out) = cache.run(&prg, &ri, &env_df, candidate);
                        ok && low_eq(&out, &output, &env_df)
                    });
                assert!(
                    corrected,
                    "{name}: enforced ri uncorrectable on {input} with defaults {defaults:?}"
                );
            }
        }

        // Deletion of inputs on the enforced runs, decomposition by
        // decomposition, over the same trace set.
        let di = di_policy();
        for defaults in dom.default_assignments() {
            let env_df = env_with_defaults(&env, &defaults);
            let mut cache = EnforcedCache::new();
            for input in dom.inputs() {
                if !matches!(
                    run_program(&prg, &input, SUITE_BUDGET),
                    Outcome::Terminated { .. }
                ) {
                    continue;
                }
                let (completed, output) = cache.run(&prg, &di, &env_df, &input);
                if !completed {
                    continue;
                }
                for decomposition in di_decompositions(&env_df, &input, &defaults) {
                    di_cases += 1;
                    let corrected = di_candidates(&env_df, &decomposition, &defaults, false)
                        .iter()
                        .any(|candidate| {
                            let (ok, out) = cache.run(&prg, &di, &env_df, candidate);
                            ok && low_eq(&out, &output, &env_df)
                        });
                    assert!(
                        corrected,
                        "{name}: enforced di uncorrectable on {input} at index {}",
                        decomposition.index
                    );
                }
            }
        }
    }
    assert!(
        ni_pairs > 100,
        "only {ni_pairs} noninterference pairs compared"
    );
    assert!(ri_cases > 40, "only {ri_cases} removal cases checked");
    assert!(di_cases > 20, "only {di_cases} deletion cases checked");
    println!(
        "acceptance 5 (soundness: {ni_pairs} ni pairs, {ri_cases} ri cases, {di_cases} di cases): PASS"
    );
}

/// Criterion 6: bounded precision. For every (program, property) pair the
/// oracle marks as holding at K <= 3, and every terminating input,
/// exhaustive exploration at depth 400 yields a single class whose
/// per-channel input and output equal the standalone run's.
#[test]
fn a06_precision_suite_via_exhaustive_exploration() {
    let opts = CheckOptions {
        budget: 10_000,
        di_strict: false,
        max_cases: None,
    };
    let pairs = [
        (Property::Tsni, "ni"),
        (Property::Ri, "ri"),
        (Property::Di, "di"),
    ];
    let mut holding_pairs = 0u64;
    let mut inputs_explored = 0u64;
    for (name, prg, env) in corpus() {
        let dom = InputDomain::standard(&env, 3, &[0, 1]);
        for (property, policy_name) in &pairs {
            let report = check(*property, &prg, &dom, &opts);
            if report.verdict != Verdict::Holds {
                continue;
            }
            holding_pairs += 1;
            let policy = builtin_policy(policy_name).unwrap();
            for input in dom.inputs() {
                let Outcome::Terminated { output } = run_program(&prg, &input, 10_000) else {
                    continue;
                };
                let explored = explore(&prg, &policy, &env, &input, 400, 2_000_000)
                    .unwrap_or_else(|e| panic!("{name}/{policy_name}: {e}"));
                assert!(
                    explored.complete,
                    "{name}/{policy_name}: state cap on {input}"
                );
                assert_eq!(
                    explored.classes.len(),
                    1,
                    "{name}/{policy_name} on {input}: {:?}",
                    explored.classes
                );
                let class = explored.classes.iter().next().unwrap();
                assert_eq!(
                    class.outcome,
                    RunOutcome::Completed,
                    "{name}/{policy_name} on {input}"
                );
                assert_eq!(
                    class.consumed,
                    input.by_channel(),
                    "{name}/{policy_name} on {input}"
                );
                assert_eq!(
                    class.output,
                    output.by_channel(),
                    "{name}/{policy_name} on {input}"
                );
                inputs_explored += 1;
            }
        }
    }
    assert!(holding_pairs >= 4, "only {holding_pairs} holding pairs");
    assert!(
        inputs_explored >= 20,
        "only {inputs_explored} inputs explored"
    );
    println!(
        "acceptance 6 (precision: {holding_pairs} pairs, {inputs_explored} explored inputs): PASS"
    );
}

/// Criterion 7: the substitution-deletion configuration deadlocks on the
/// branch-dependent request order while removal of inputs completes on
/// the same program and input.
#[test]
fn a07_subdi_deadlock_separates_it_from_ri() {
    let env = standard_env();
    let prg = program("fig14c.ifc", &env);
    let input = trace("fig14c.trace", &env);

    let explored = explore(&prg, &subdi_policy(), &env, &input, 400, 500_000).unwrap();
    assert!(explored.complete);
    assert!(explored.has_deadlock(), "{:?}", explored.classes);

    for sched in all_schedulers() {
        let result = run_enforced(&prg, &ri_policy(), &env, &input, sched, RUN_BUDGET).unwrap();
        assert_eq!(result.outcome, RunOutcome::Completed);
    }

    let (code, _) = multex(&[
        "run",
        "--policy",
        "subdi",
        "--program",
        &fx("fig14c.ifc"),
        "--channels",
        &fx("standard.channels"),
        "--input",
        &fx("fig14c.trace"),
        "--budget",
        "1000",
    ]);
    assert_eq!(code, 4, "subdi run must exit as deadlocked");
    let (code, _) = multex(&[
        "run",
        "--policy",
        "ri",
        "--program",
        &fx("fig14c.ifc"),
        "--channels",
        &fx("standard.channels"),
        "--input",
        &fx("fig14c.trace"),
    ]);
    assert_eq!(code, 0, "ri run must complete");
    println!("acceptance 7 (subdi deadlock vs ri completion): PASS");
}

/// Criterion 8: property-based invariants — frame/atomicity fuzzing over
/// at least 1000 random transitions with signal hygiene and table-shape
/// checks at every step, instrumentation assertions on the worked runs,
/// grammar round-trip over the corpus plus 500 generated programs, and
/// replay determinism over 100 seeds.
#[test]
fn a08_property_based_invariants() {
    use multex_core::lang::gen::gen_stmt;
    use multex_core::lang::parser::parse_program;
    use multex_core::lang::pretty::pretty_program;
    use multex_core::rng::SplitMix64;

    // Frame, hygiene, and table shape under random scheduling.
    let mut transitions = 0u64;
    for (_, prg, env) in corpus() {
        let items: Vec<_> = env
            .inputs()
            .map(|ch| {
                multex_core::lang::queue::IoItem::new(
                    ch.name.clone(),
                    match ch.kind() {
                        multex_core::lang::Kind::Bool => Value::Bool(true),
                        multex_core::lang::Kind::Int => Value::Int(1),
                    },
                )
            })
            .collect();
        let input = IoQueue::from_items(items);
        for policy_name in ["ni", "ri", "di", "subdi"] {
            let policy = builtin_policy(policy_name).unwrap();
            for seed in 0..6u64 {
                transitions += fuzz_run(&prg, &policy, &env, &input, seed, 400).transitions;
            }
        }
    }
    assert!(transitions >= 1000, "only {transitions} fuzzed transitions");

    // Grammar round-trip: corpus plus 500 generated programs.
    for (name, prg, _) in corpus() {
        assert_eq!(parse_program(&pretty_program(&prg)).unwrap(), prg, "{name}");
    }
    let mut rng = SplitMix64::new(0xACCE97);
    for i in 0..500 {
        let prg = gen_stmt(&mut rng, 3);
        let printed = pretty_program(&prg);
        assert_eq!(
            parse_program(&printed).unwrap_or_else(|e| panic!("case {i}: {e}\n{printed}")),
            prg,
            "case {i}"
        );
    }

    // Replay determinism across 100 seeds.
    let env = standard_env();
    let prg = program("fig8.ifc", &env);
    let input = trace("fig9.trace", &env);
    for seed in 0..100u64 {
        let policy = if seed % 2 == 0 {
            di_policy()
        } else {
            ri_policy()
        };
        let a = run_enforced(
            &prg,
            &policy,
            &env,
            &input,
            SchedulerPolicy::SeededRandom { seed },
            RUN_BUDGET,
        )
        .unwrap();
        let b = run_enforced(
            &prg,
            &policy,
            &env,
            &input,
            SchedulerPolicy::SeededRandom { seed },
            RUN_BUDGET,
        )
        .unwrap();
        assert_eq!(a, b, "seed {seed}");
        assert_input_props(&policy.name, &env, &a);
        assert_output_props(&policy.name, &env, &a);
    }
    println!("acceptance 8 (frames, hygiene, round-trip, replay x100): PASS");
}
