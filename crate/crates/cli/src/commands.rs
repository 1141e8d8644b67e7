//! Implementations of the CLI subcommands. Every function returns the
//! process exit code; `Err(String)` means a load/usage failure (exit 3).

use crate::{CheckArgs, ExploreArgs, ReplayArgs, RunArgs};
use multex_core::em::run::GlobalOutputRecord;
use multex_core::em::trace::{PolicyRef, TraceDoc, TraceMeta};
use multex_core::em::{
    explore, init_em, render_run_tables, run_from, RunError, RunOutcome, SchedulerPolicy,
};
use multex_core::io::{load_program, parse_channel_env, parse_input_trace};
use multex_core::lang::channel::ChannelEnv;
use multex_core::lang::machine::{run_program, Outcome};
use multex_core::lang::queue::IoQueue;
use multex_core::lang::Program;
use multex_core::oracle::{check, CheckOptions, CheckReport, InputDomain, Property, Verdict};
use multex_core::policies::{builtin_policy, file::parse_policy_file, PolicyConfig, PolicyDoc};
use serde::Serialize;
use std::path::{Path, PathBuf};

fn read(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn write_file(path: &Path, contents: &str) -> Result<(), String> {
    std::fs::write(path, contents).map_err(|e| format!("{}: {e}", path.display()))
}

struct Loaded {
    env: ChannelEnv,
    program: Program,
    program_text: String,
}

fn load_inputs(program: &Path, channels: &Path) -> Result<Loaded, String> {
    let env_text = read(channels)?;
    let env = parse_channel_env(&env_text).map_err(|e| format!("{}: {e}", channels.display()))?;
    let program_text = read(program)?;
    let prg =
        load_program(&program_text, &env).map_err(|e| format!("{}: {e}", program.display()))?;
    Ok(Loaded {
        env,
        program: prg,
        program_text,
    })
}

fn load_trace(path: &Option<PathBuf>, env: &ChannelEnv) -> Result<IoQueue, String> {
    match path {
        None => Ok(IoQueue::new()),
        Some(p) => {
            let text = read(p)?;
            parse_input_trace(&text, env).map_err(|e| format!("{}: {e}", p.display()))
        }
    }
}

enum PolicyChoice {
    None,
    Some(Box<PolicyConfig>, PolicyRef),
}

fn resolve_policy(name_or_path: &str) -> Result<PolicyChoice, String> {
    if name_or_path == "none" {
        return Ok(PolicyChoice::None);
    }
    if let Some(config) = builtin_policy(name_or_path) {
        return Ok(PolicyChoice::Some(
            Box::new(config),
            PolicyRef::Name(name_or_path.to_string()),
        ));
    }
    let path = Path::new(name_or_path);
    if path.exists() {
        let text = read(path)?;
        let config = parse_policy_file(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        let doc = PolicyDoc::from_config(&config);
        return Ok(PolicyChoice::Some(
            Box::new(config),
            PolicyRef::Inline(Box::new(doc)),
        ));
    }
    Err(format!(
        "unknown policy `{name_or_path}` (shipped: ni, ri, di, subdi, none; or a policy file path)"
    ))
}

fn resolve_scheduler(name: &str, seed: Option<u64>) -> Result<SchedulerPolicy, String> {
    if let Some(seed) = seed {
        return Ok(SchedulerPolicy::SeededRandom { seed });
    }
    match name {
        "lowest" | "lowest-index" => Ok(SchedulerPolicy::LowestIndex),
        "round-robin" | "rr" => Ok(SchedulerPolicy::RoundRobin),
        "random" => Ok(SchedulerPolicy::SeededRandom { seed: 0 }),
        other => Err(format!(
            "unknown scheduler `{other}` (use lowest, round-robin, or random)"
        )),
    }
}

fn budget_or_default(flag: Option<u64>, fallback: u64) -> u64 {
    flag.or_else(|| {
        std::env::var("MULTEX_BUDGET")
            .ok()
            .and_then(|v| v.parse().ok())
    })
    .unwrap_or(fallback)
    .max(1)
}

/// Trace fields of a bare (unenforced) run.
fn bare_trace(meta: TraceMeta, outcome: &Outcome, input: &IoQueue) -> TraceDoc {
    let (outcome_text, output, residual) = match outcome {
        Outcome::Terminated { output } => {
            ("terminated".to_string(), output.clone(), IoQueue::new())
        }
        Outcome::FinishedWithResidual { output, residual } => (
            "finished_with_residual".to_string(),
            output.clone(),
            residual.clone(),
        ),
        Outcome::Stuck { reason } => (format!("stuck: {reason}"), IoQueue::new(), input.clone()),
        Outcome::BudgetExceeded { steps } => (
            format!("budget_exceeded: {steps}"),
            IoQueue::new(),
            input.clone(),
        ),
    };
    let consumed_len = input.len() - residual.len();
    TraceDoc {
        meta,
        outcome: outcome_text,
        consumed: input.items()[..consumed_len].to_vec(),
        residual: residual.items().to_vec(),
        global_output: output
            .items()
            .iter()
            .enumerate()
            .map(|(i, item)| GlobalOutputRecord {
                step: i as u64,
                channel: item.channel.clone(),
                value: item.value,
                source_exec: 0,
            })
            .collect(),
        executions: Vec::new(),
        clone_count: 0,
        schedule: Vec::new(),
    }
}

pub fn cmd_run(args: RunArgs) -> Result<u8, String> {
    let loaded = load_inputs(&args.inputs.program, &args.inputs.channels)?;
    let input = load_trace(&args.input, &loaded.env)?;
    let budget = budget_or_default(args.budget, 100_000);
    let scheduler = resolve_scheduler(&args.scheduler, args.seed)?;
    let policy = resolve_policy(&args.policy)?;

    let meta = |policy_ref: PolicyRef| TraceMeta {
        program: loaded.program_text.clone(),
        channels: loaded.env.iter().cloned().collect(),
        input: input.items().to_vec(),
        policy: policy_ref,
        scheduler: scheduler.clone(),
        budget,
    };

    let (doc, exit) = match policy {
        PolicyChoice::None => {
            let outcome = run_program(&loaded.program, &input, budget);
            let exit = match &outcome {
                Outcome::Terminated { .. } | Outcome::FinishedWithResidual { .. } => 0,
                Outcome::BudgetExceeded { .. } => 2,
                Outcome::Stuck { .. } => 4,
            };
            let doc = bare_trace(meta(PolicyRef::Name("none".into())), &outcome, &input);
            if args.pretty {
                println!(
                    "{}",
                    multex_core::em::trace::render_time_table(
                        "output",
                        &doc.global_output
                            .iter()
                            .map(|r| multex_core::lang::queue::IoItem::new(
                                r.channel.clone(),
                                r.value
                            ))
                            .collect::<Vec<_>>(),
                        &loaded
                            .env
                            .outputs()
                            .map(|c| c.name.clone())
                            .collect::<Vec<_>>(),
                    )
                );
            }
            (doc, exit)
        }
        PolicyChoice::Some(config, policy_ref) => {
            let result = multex_core::em::run_enforced(
                &loaded.program,
                &config,
                &loaded.env,
                &input,
                scheduler.clone(),
                budget,
            )
            .map_err(|e| e.to_string())?;
            let exit = match result.outcome {
                RunOutcome::Completed | RunOutcome::QuiescentWithResidual => 0,
                RunOutcome::BudgetExceeded => 2,
                RunOutcome::Deadlocked => 4,
            };
            if args.pretty {
                println!("{}", render_run_tables(&loaded.env, &input, &result));
            }
            if args.emit_schedule {
                for label in &result.schedule {
                    println!("{label}");
                }
            }
            (TraceDoc::from_run(meta(policy_ref), &result), exit)
        }
    };

    println!(
        "outcome: {} (consumed {}, residual {}, outputs {})",
        doc.outcome,
        doc.consumed.len(),
        doc.residual.len(),
        doc.global_output.len()
    );
    if let Some(path) = &args.output {
        write_file(path, &(doc.to_json() + "\n"))?;
    }
    Ok(exit)
}

/// The witness document `check` writes on violation: the report plus a
/// replay block in the input-trace shape.
#[derive(Serialize)]
struct WitnessDoc<'a> {
    #[serde(flatten)]
    report: &'a CheckReport,
    replay: ReplayBlock,
}

#[derive(Serialize)]
struct ReplayBlock {
    input: Vec<multex_core::lang::queue::IoItem>,
    expected_output: Vec<multex_core::lang::queue::IoItem>,
}

pub fn cmd_check(args: CheckArgs) -> Result<u8, String> {
    let loaded = load_inputs(&args.inputs.program, &args.inputs.channels)?;
    let property = Property::parse(&args.property)
        .ok_or_else(|| format!("unknown property `{}` (tini, tsni, ri, di)", args.property))?;
    let alphabet: Vec<u64> = args
        .alphabet
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim()
                .parse::<u64>()
                .map_err(|_| format!("bad alphabet entry `{s}`"))
        })
        .collect::<Result<_, _>>()?;
    let dom = InputDomain::standard(&loaded.env, args.max_len, &alphabet);
    let opts = CheckOptions {
        budget: budget_or_default(args.budget, 10_000),
        di_strict: args.di_strict,
        max_cases: args.max_cases,
    };
    let report = check(property, &loaded.program, &dom, &opts);
    println!(
        "{}: {} (K={}, budget={}, cases={}{})",
        report.property.name(),
        match report.verdict {
            Verdict::Holds => "holds within bounds",
            Verdict::Violated => "violated",
            Verdict::Inconclusive => "inconclusive (case cap reached)",
        },
        report.bounds.max_len,
        report.bounds.budget,
        report.cases,
        if report.budget_limited {
            ", budget-limited"
        } else {
            ""
        }
    );
    if let Some(path) = &args.output {
        let json = serde_json::to_string_pretty(&report).expect("report serializes");
        write_file(path, &(json + "\n"))?;
    }
    match report.verdict {
        Verdict::Holds => Ok(0),
        Verdict::Inconclusive => Ok(2),
        Verdict::Violated => {
            let witness = report.witness.as_ref().expect("violation carries witness");
            let doc = WitnessDoc {
                report: &report,
                replay: ReplayBlock {
                    input: witness.replay_input().items().to_vec(),
                    expected_output: witness
                        .replay_output()
                        .map(|q| q.items().to_vec())
                        .unwrap_or_default(),
                },
            };
            let json = serde_json::to_string_pretty(&doc).expect("witness serializes");
            write_file(&args.witness, &(json + "\n"))?;
            println!("witness written to {}", args.witness.display());
            Ok(1)
        }
    }
}

pub fn cmd_explore(args: ExploreArgs) -> Result<u8, String> {
    let loaded = load_inputs(&args.inputs.program, &args.inputs.channels)?;
    let input = load_trace(&args.input, &loaded.env)?;
    let PolicyChoice::Some(config, _) = resolve_policy(&args.policy)? else {
        return Err("explore requires an enforcement policy (not `none`)".to_string());
    };
    let result = explore(
        &loaded.program,
        &config,
        &loaded.env,
        &input,
        args.depth,
        args.max_states,
    )
    .map_err(|e| e.to_string())?;
    println!(
        "{} class(es) over {} state(s){}",
        result.classes.len(),
        result.states_visited,
        if result.complete {
            ""
        } else {
            " [state cap hit]"
        }
    );
    for class in &result.classes {
        println!(
            "  {:?}: consumed {:?}, output {:?}",
            class.outcome, class.consumed, class.output
        );
    }
    if let Some(path) = &args.output {
        let json = serde_json::to_string_pretty(&result).expect("explore result serializes");
        write_file(path, &(json + "\n"))?;
    }
    if !result.complete {
        return Ok(2);
    }
    if result.classes.len() == 1 && !result.has_deadlock() {
        Ok(0)
    } else {
        Ok(1)
    }
}

pub fn cmd_replay(args: ReplayArgs) -> Result<u8, String> {
    let text = read(&args.trace)?;
    let recorded =
        TraceDoc::from_json(&text).map_err(|e| format!("{}: {e}", args.trace.display()))?;
    let env = ChannelEnv::new(recorded.meta.channels.clone()).map_err(|e| e.to_string())?;
    let prg = load_program(&recorded.meta.program, &env).map_err(|e| e.to_string())?;
    let input = IoQueue::from_items(recorded.meta.input.clone());
    let budget = args.budget.unwrap_or(recorded.meta.budget);

    let reproduced = match &recorded.meta.policy {
        PolicyRef::Name(name) if name == "none" => {
            let outcome = run_program(&prg, &input, budget);
            bare_trace(recorded.meta.clone(), &outcome, &input)
        }
        policy_ref => {
            let config = match policy_ref {
                PolicyRef::Name(name) => builtin_policy(name)
                    .ok_or_else(|| format!("trace references unknown policy `{name}`"))?,
                PolicyRef::Inline(doc) => (*doc.clone())
                    .into_config()
                    .map_err(|e| format!("inline policy: {e}"))?,
            };
            let cfg = init_em(&prg, &config, &env, &input).map_err(|e| e.to_string())?;
            let result = run_from(
                cfg,
                SchedulerPolicy::Scripted {
                    schedule: recorded.schedule.clone(),
                },
                budget,
            );
            match result {
                Ok(result) => TraceDoc::from_run(recorded.meta.clone(), &result),
                Err(RunError::Schedule(e)) => {
                    println!("replay diverged: {e}");
                    return Ok(1);
                }
                Err(e) => return Err(e.to_string()),
            }
        }
    };

    match recorded.first_divergence(&reproduced) {
        None => {
            println!("replay reproduced the trace exactly ({})", recorded.outcome);
            Ok(0)
        }
        Some(diff) => {
            println!("replay diverged: {diff}");
            Ok(1)
        }
    }
}
