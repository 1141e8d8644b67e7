//! The four bounded property checkers.
//!
//! Termination is the standalone big-step relation: the program reaches
//! `skip` with its input consumed completely. Runs that get stuck on input
//! (the offered queue is not one the program can consume) or finish with
//! residual items are outside that relation and impose no obligations;
//! runs that exhaust the step budget count as diverging.

use crate::lang::ast::Stmt;
use crate::lang::machine::{run_program, Outcome};
use crate::lang::queue::{low_eq, IoQueue};
use crate::oracle::corrections::{di_candidates, di_decompositions, ri_candidates};
use crate::oracle::domain::InputDomain;
use crate::oracle::{Bounds, CheckOptions, CheckReport, Property, Verdict, Witness};
use std::collections::{BTreeMap, HashMap};

/// What one bounded run contributes to a property check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunView {
    /// Output when the run terminated (full consumption), else `None`.
    pub output: Option<IoQueue>,
    /// The run was cut off by the step budget.
    pub hit_budget: bool,
}

struct CaseCap;

struct Runner<'a> {
    prg: &'a Stmt,
    budget: u64,
    max_cases: Option<u64>,
    cache: HashMap<IoQueue, RunView>,
    cases: u64,
    budget_limited: bool,
}

impl<'a> Runner<'a> {
    fn new(prg: &'a Stmt, opts: &CheckOptions) -> Self {
        Runner {
            prg,
            budget: opts.budget,
            max_cases: opts.max_cases,
            cache: HashMap::new(),
            cases: 0,
            budget_limited: false,
        }
    }

    fn run(&mut self, input: &IoQueue) -> Result<RunView, CaseCap> {
        if let Some(view) = self.cache.get(input) {
            return Ok(view.clone());
        }
        self.cases += 1;
        if let Some(cap) = self.max_cases {
            if self.cases > cap {
                return Err(CaseCap);
            }
        }
        let view = match run_program(self.prg, input, self.budget) {
            Outcome::Terminated { output } => RunView {
                output: Some(output),
                hit_budget: false,
            },
            Outcome::BudgetExceeded { .. } => {
                self.budget_limited = true;
                RunView {
                    output: None,
                    hit_budget: true,
                }
            }
            Outcome::FinishedWithResidual { .. } | Outcome::Stuck { .. } => RunView {
                output: None,
                hit_budget: false,
            },
        };
        self.cache.insert(input.clone(), view.clone());
        Ok(view)
    }
}

fn bounds_of(dom: &InputDomain, opts: &CheckOptions) -> Bounds {
    Bounds {
        max_len: dom.max_len,
        budget: opts.budget,
        alphabets: dom.alphabets.clone(),
    }
}

fn report(
    property: Property,
    dom: &InputDomain,
    opts: &CheckOptions,
    runner: &Runner<'_>,
    verdict: Verdict,
    witness: Option<Witness>,
) -> CheckReport {
    CheckReport {
        property,
        verdict,
        bounds: bounds_of(dom, opts),
        cases: runner.cases,
        budget_limited: runner.budget_limited,
        witness,
    }
}

/// Dispatch on the property name.
pub fn check(
    property: Property,
    prg: &Stmt,
    dom: &InputDomain,
    opts: &CheckOptions,
) -> CheckReport {
    match property {
        Property::Tini => check_tini(prg, dom, opts),
        Property::Tsni => check_tsni(prg, dom, opts),
        Property::Ri => check_ri(prg, dom, opts),
        Property::Di => check_di(prg, dom, opts),
    }
}

/// Low-projection key used to group low-equivalent inputs.
fn low_key(dom: &InputDomain, q: &IoQueue) -> IoQueue {
    q.restrict(|it| dom.env.level(&it.channel) == Some(crate::lang::channel::Level::L))
}

/// Termination-insensitive noninterference: low-equivalent inputs whose
/// runs both terminate must produce low-equivalent outputs.
pub fn check_tini(prg: &Stmt, dom: &InputDomain, opts: &CheckOptions) -> CheckReport {
    let mut runner = Runner::new(prg, opts);
    let mut groups: BTreeMap<IoQueue, (IoQueue, IoQueue)> = BTreeMap::new();
    for input in dom.inputs() {
        let view = match runner.run(&input) {
            Ok(v) => v,
            Err(CaseCap) => {
                return report(
                    Property::Tini,
                    dom,
                    opts,
                    &runner,
                    Verdict::Inconclusive,
                    None,
                )
            }
        };
        let Some(output) = view.output else { continue };
        let key = low_key(dom, &input);
        match groups.get(&key) {
            None => {
                groups.insert(key, (input, output));
            }
            Some((rep_in, rep_out)) => {
                if !low_eq(rep_out, &output, &dom.env) {
                    let witness = Witness::LowOutputs {
                        input_a: rep_in.items().to_vec(),
                        output_a: rep_out.items().to_vec(),
                        input_b: input.items().to_vec(),
                        output_b: output.items().to_vec(),
                    };
                    return report(
                        Property::Tini,
                        dom,
                        opts,
                        &runner,
                        Verdict::Violated,
                        Some(witness),
                    );
                }
            }
        }
    }
    report(Property::Tini, dom, opts, &runner, Verdict::Holds, None)
}

/// Termination-sensitive noninterference: TINI plus the termination
/// channel — a terminating run may not have a low-equivalent diverging
/// partner. Divergence is budget-relative.
pub fn check_tsni(prg: &Stmt, dom: &InputDomain, opts: &CheckOptions) -> CheckReport {
    #[derive(Default)]
    struct Group {
        terminating: Option<(IoQueue, IoQueue)>,
        diverging: Option<IoQueue>,
    }
    let mut runner = Runner::new(prg, opts);
    let mut groups: BTreeMap<IoQueue, Group> = BTreeMap::new();
    for input in dom.inputs() {
        let view = match runner.run(&input) {
            Ok(v) => v,
            Err(CaseCap) => {
                return report(
                    Property::Tsni,
                    dom,
                    opts,
                    &runner,
                    Verdict::Inconclusive,
                    None,
                )
            }
        };
        let key = low_key(dom, &input);
        let group = groups.entry(key).or_default();
        if let Some(output) = view.output {
            if let Some((_, rep_out)) = &group.terminating {
                if !low_eq(rep_out, &output, &dom.env) {
                    let (rep_in, rep_out) = group.terminating.clone().unwrap();
                    let witness = Witness::LowOutputs {
                        input_a: rep_in.items().to_vec(),
                        output_a: rep_out.items().to_vec(),
                        input_b: input.items().to_vec(),
                        output_b: output.items().to_vec(),
                    };
                    return report(
                        Property::Tsni,
                        dom,
                        opts,
                        &runner,
                        Verdict::Violated,
                        Some(witness),
                    );
                }
            } else {
                group.terminating = Some((input.clone(), output));
            }
        } else if view.hit_budget {
            group.diverging.get_or_insert(input.clone());
        }
        if let (Some((t_in, t_out)), Some(d_in)) = (&group.terminating, &group.diverging) {
            let witness = Witness::Termination {
                input_a: t_in.items().to_vec(),
                output_a: t_out.items().to_vec(),
                input_b: d_in.items().to_vec(),
            };
            return report(
                Property::Tsni,
                dom,
                opts,
                &runner,
                Verdict::Violated,
                Some(witness),
            );
        }
    }
    report(Property::Tsni, dom, opts, &runner, Verdict::Holds, None)
}

/// Removal of inputs: for every terminating input and every default
/// assignment there must be an all-default-high corrected input, no longer
/// per channel, that terminates with a low-equivalent output.
pub fn check_ri(prg: &Stmt, dom: &InputDomain, opts: &CheckOptions) -> CheckReport {
    let mut runner = Runner::new(prg, opts);
    for defaults in dom.default_assignments() {
        for input in dom.inputs() {
            let view = match runner.run(&input) {
                Ok(v) => v,
                Err(CaseCap) => {
                    return report(
                        Property::Ri,
                        dom,
                        opts,
                        &runner,
                        Verdict::Inconclusive,
                        None,
                    )
                }
            };
            let Some(output) = view.output else { continue };
            let candidates = ri_candidates(&dom.env, &input, &defaults);
            let mut corrected = false;
            let mut tried = 0u64;
            for candidate in &candidates {
                tried += 1;
                let cand_view = match runner.run(candidate) {
                    Ok(v) => v,
                    Err(CaseCap) => {
                        return report(
                            Property::Ri,
                            dom,
                            opts,
                            &runner,
                            Verdict::Inconclusive,
                            None,
                        )
                    }
                };
                if let Some(cand_out) = cand_view.output {
                    if low_eq(&cand_out, &output, &dom.env) {
                        corrected = true;
                        break;
                    }
                }
            }
            if !corrected {
                let witness = Witness::RiCorrection {
                    input: input.items().to_vec(),
                    output: output.items().to_vec(),
                    defaults: defaults.clone(),
                    candidates_tried: tried,
                };
                return report(
                    Property::Ri,
                    dom,
                    opts,
                    &runner,
                    Verdict::Violated,
                    Some(witness),
                );
            }
        }
    }
    report(Property::Ri, dom, opts, &runner, Verdict::Holds, None)
}

/// Deletion of inputs: for every terminating input, every default
/// assignment, and every deletable high item (one whose suffix carries
/// only default high items), some correction that keeps the prefix and
/// rebuilds the suffix from defaults must terminate with a low-equivalent
/// output.
pub fn check_di(prg: &Stmt, dom: &InputDomain, opts: &CheckOptions) -> CheckReport {
    let mut runner = Runner::new(prg, opts);
    for defaults in dom.default_assignments() {
        for input in dom.inputs() {
            let view = match runner.run(&input) {
                Ok(v) => v,
                Err(CaseCap) => {
                    return report(
                        Property::Di,
                        dom,
                        opts,
                        &runner,
                        Verdict::Inconclusive,
                        None,
                    )
                }
            };
            let Some(output) = view.output else { continue };
            for decomposition in di_decompositions(&dom.env, &input, &defaults) {
                let candidates = di_candidates(&dom.env, &decomposition, &defaults, opts.di_strict);
                let mut corrected = false;
                let mut tried = 0u64;
                for candidate in &candidates {
                    tried += 1;
                    let cand_view = match runner.run(candidate) {
                        Ok(v) => v,
                        Err(CaseCap) => {
                            return report(
                                Property::Di,
                                dom,
                                opts,
                                &runner,
                                Verdict::Inconclusive,
                                None,
                            )
                        }
                    };
                    if let Some(cand_out) = cand_view.output {
                        if low_eq(&cand_out, &output, &dom.env) {
                            corrected = true;
                            break;
                        }
                    }
                }
                if !corrected {
                    let witness = Witness::DiCorrection {
                        input: input.items().to_vec(),
                        output: output.items().to_vec(),
                        defaults: defaults.clone(),
                        deleted_index: decomposition.index,
                        candidates_tried: tried,
                    };
                    return report(
                        Property::Di,
                        dom,
                        opts,
                        &runner,
                        Verdict::Violated,
                        Some(witness),
                    );
                }
            }
        }
    }
    report(Property::Di, dom, opts, &runner, Verdict::Holds, None)
}

/// Re-establish a recorded witness from scratch: replay its runs and
/// re-check the failed clause of the definition. Used to confirm that
/// serialized witnesses stay meaningful.
pub fn verify_witness(
    prg: &Stmt,
    dom: &InputDomain,
    opts: &CheckOptions,
    witness: &Witness,
) -> bool {
    let run = |q: &IoQueue| run_program(prg, q, opts.budget);
    match witness {
        Witness::LowOutputs {
            input_a,
            output_a,
            input_b,
            output_b,
        } => {
            let (qa, qb) = (
                IoQueue::from_items(input_a.clone()),
                IoQueue::from_items(input_b.clone()),
            );
            if !low_eq(&qa, &qb, &dom.env) {
                return false;
            }
            match (run(&qa), run(&qb)) {
                (Outcome::Terminated { output: oa }, Outcome::Terminated { output: ob }) => {
                    oa.items() == output_a.as_slice()
                        && ob.items() == output_b.as_slice()
                        && !low_eq(&oa, &ob, &dom.env)
                }
                _ => false,
            }
        }
        Witness::Termination {
            input_a,
            output_a,
            input_b,
        } => {
            let (qa, qb) = (
                IoQueue::from_items(input_a.clone()),
                IoQueue::from_items(input_b.clone()),
            );
            if !low_eq(&qa, &qb, &dom.env) {
                return false;
            }
            matches!(run(&qa), Outcome::Terminated { output } if output.items() == output_a.as_slice())
                && matches!(run(&qb), Outcome::BudgetExceeded { .. })
        }
        Witness::RiCorrection {
            input,
            output,
            defaults,
            ..
        } => {
            let q = IoQueue::from_items(input.clone());
            let Outcome::Terminated { output: o } = run(&q) else {
                return false;
            };
            if o.items() != output.as_slice() {
                return false;
            }
            ri_candidates(&dom.env, &q, defaults).iter().all(|cand| {
                !matches!(run(cand), Outcome::Terminated { output: co } if low_eq(&co, &o, &dom.env))
            })
        }
        Witness::DiCorrection {
            input,
            output,
            defaults,
            deleted_index,
            ..
        } => {
            let q = IoQueue::from_items(input.clone());
            let Outcome::Terminated { output: o } = run(&q) else {
                return false;
            };
            if o.items() != output.as_slice() {
                return false;
            }
            let Some(decomposition) = di_decompositions(&dom.env, &q, defaults)
                .into_iter()
                .find(|d| d.index == *deleted_index)
            else {
                return false;
            };
            di_candidates(&dom.env, &decomposition, defaults, opts.di_strict)
                .iter()
                .all(|cand| {
                    !matches!(run(cand), Outcome::Terminated { output: co } if low_eq(&co, &o, &dom.env))
                })
        }
    }
}
