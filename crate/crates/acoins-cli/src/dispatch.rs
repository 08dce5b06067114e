//! Routes a loaded instance to the one solver its coin kinds and mode
//! imply, and the oracle / prune / plan-check operations built on top.

use serde::Serialize;

use acoins::continuous::{ca_best_coin, ca_reusable_bounded, ca_reusable_unbounded};
use acoins::discrete::{one_time_selection_exact, reusable_discrete, sequence_given_order_discrete, TossBudget};
use acoins::simple::{
    decide_given_order, one_time_bounded_dp, one_time_unlimited, reusable_bounded,
};
use acoins::verify::{brute_force_one_time, brute_force_selection, OracleReport};
use acoins::{best_coin_for_penalty, CACoin, DiscreteCoin, SimpleCoin, TossPlan, TossStep};

use crate::instance::{CoinSpec, EntrySpec, InstanceFile, LoadedCoin, LoadedInstance};
use crate::plan::{PlanFile, PlanStep};
use crate::{CliError, CliResult};

fn reject(message: &str, nearest: &str) -> CliError {
    CliError::Input(format!("{message} (nearest supported variant: {nearest})"))
}

enum Kinds {
    SimpleOnly(Vec<SimpleCoin>),
    Menus(Vec<DiscreteCoin>),
    CaOnly(Vec<CACoin>),
}

/// Classifies the coin mix. Simple coins mixed with menus are promoted to
/// single-entry menus; adjustable coins do not mix with either.
fn classify(instance: &LoadedInstance) -> CliResult<Kinds> {
    let mut simple = Vec::new();
    let mut menus = Vec::new();
    let mut ca = Vec::new();
    for coin in &instance.coins {
        match coin {
            LoadedCoin::Simple(c) => simple.push(c.clone()),
            LoadedCoin::Discrete(d) => menus.push(d.clone()),
            LoadedCoin::Ca(c) => ca.push(c.clone()),
        }
    }
    if !ca.is_empty() {
        if !simple.is_empty() || !menus.is_empty() {
            return Err(reject(
                "adjustable coins cannot be mixed with simple or discrete coins",
                "split the instance by coin kind",
            ));
        }
        return Ok(Kinds::CaOnly(ca));
    }
    if menus.is_empty() {
        Ok(Kinds::SimpleOnly(simple))
    } else {
        for s in simple {
            menus.push(
                DiscreteCoin::new(s.id().clone(), &[(s.p(), s.fee())])
                    .expect("a valid simple coin is a valid one-entry menu"),
            );
        }
        // Keep the file's coin order for the given-order variant.
        let order: Vec<&acoins::CoinId> = instance.coins.iter().map(|c| c.id()).collect();
        menus.sort_by_key(|m| order.iter().position(|id| *id == m.id()).unwrap_or(usize::MAX));
        Ok(Kinds::Menus(menus))
    }
}

fn solve_simple(
    coins: &[SimpleCoin],
    instance: &LoadedInstance,
) -> CliResult<(&'static str, TossPlan)> {
    let mode = &instance.mode;
    let e = instance.penalty;
    match (mode.order_given, mode.reusable, mode.max_tosses) {
        (true, false, None) => Ok(("simple-one-time-given-order", decide_given_order(coins, e))),
        (true, _, _) => Err(reject(
            "order_given only applies to one-time games without a toss budget",
            "simple-one-time-given-order (drop max_tosses and reusable)",
        )),
        (false, true, None) => {
            Ok(("simple-reusable-unbounded", acoins::simple::reusable_unbounded(coins, e)))
        }
        (false, true, Some(k)) => {
            Ok(("simple-reusable-bounded", reusable_bounded(coins, e, k as usize).to_plan()))
        }
        (false, false, None) => Ok(("simple-one-time-unlimited", one_time_unlimited(coins, e))),
        (false, false, Some(k)) => {
            Ok(("simple-one-time-bounded", one_time_bounded_dp(coins, e, k as usize).1))
        }
    }
}

fn solve_menus(
    menus: &[DiscreteCoin],
    instance: &LoadedInstance,
    diagnostics: &mut Vec<String>,
) -> CliResult<(&'static str, TossPlan)> {
    let mode = &instance.mode;
    let e = instance.penalty;
    match (mode.order_given, mode.reusable, mode.max_tosses) {
        (true, false, None) => {
            Ok(("discrete-one-time-given-order", sequence_given_order_discrete(menus, e)))
        }
        (true, _, _) => Err(reject(
            "order_given only applies to one-time games without a toss budget",
            "discrete-one-time-given-order (drop max_tosses and reusable)",
        )),
        (false, true, budget) => {
            // Reusable play wants efficient menus; record what pruning drops.
            let mut pruned = Vec::with_capacity(menus.len());
            for menu in menus {
                let efficient = menu.prune_to_efficient();
                for entry in menu.entries() {
                    if !efficient.entries().iter().any(|kept| kept.p() == entry.p()) {
                        diagnostics.push(format!(
                            "pruned dominated entry (p={}, fee={}) from coin {}",
                            entry.p(),
                            entry.fee(),
                            menu.id()
                        ));
                    }
                }
                pruned.push(efficient);
            }
            match budget {
                None => Ok((
                    "discrete-reusable-unbounded",
                    reusable_discrete(&pruned, e, TossBudget::Unlimited),
                )),
                Some(k) => Ok((
                    "discrete-reusable-bounded",
                    reusable_discrete(&pruned, e, TossBudget::Bounded(k as usize)),
                )),
            }
        }
        (false, false, None) => {
            let (_, plan) = one_time_selection_exact(menus, e)?;
            Ok(("discrete-one-time-selection", plan))
        }
        (false, false, Some(1)) => {
            let union: Vec<SimpleCoin> =
                menus.iter().flat_map(|m| m.entries().iter().cloned()).collect();
            let plan = match best_coin_for_penalty(&union, e) {
                Some(c) => TossPlan::new(
                    vec![TossStep { coin: c.id().clone(), p: c.p(), fee: c.fee(), repeat: false }],
                    c.expected_cost(e),
                ),
                None => TossPlan::empty(e),
            };
            Ok(("discrete-single-toss", plan))
        }
        (false, false, Some(_)) => Err(reject(
            "bounded one-time selection over menus has no exact solver",
            "discrete-one-time-selection (drop max_tosses) or max_tosses = 1",
        )),
    }
}

fn solve_ca(
    coins: &[CACoin],
    instance: &LoadedInstance,
    diagnostics: &mut Vec<String>,
) -> CliResult<(&'static str, TossPlan)> {
    let mode = &instance.mode;
    let e = instance.penalty;
    if mode.order_given {
        return Err(reject(
            "order_given does not apply to adjustable coins",
            "ca-reusable-unbounded, ca-reusable-bounded, or max_tosses = 1",
        ));
    }
    for coin in coins {
        let th = acoins::continuous::ca_thresholds(coin);
        if th.is_degenerate() {
            diagnostics.push(format!(
                "coin {}: slope at p_min ({}) is below the rate there ({}); the boundary-min window is empty",
                coin.id(),
                th.e_low,
                th.r_min
            ));
        }
    }
    match (mode.reusable, mode.max_tosses) {
        (true, None) => {
            // Cheapest unbounded play is the smallest r_min across coins.
            let best = coins
                .iter()
                .min_by(|a, b| {
                    a.rate(a.p_min())
                        .total_cmp(&b.rate(b.p_min()))
                        .then_with(|| a.id().cmp(b.id()))
                })
                .expect("instance has at least one coin");
            Ok(("ca-reusable-unbounded", ca_reusable_unbounded(best, e)))
        }
        (true, Some(k)) => {
            Ok(("ca-reusable-bounded", ca_reusable_bounded(coins, e, k as usize).to_plan()))
        }
        (false, Some(1)) => {
            let plan = match ca_best_coin(coins, e) {
                Some((coin, result)) if result.should_toss() => {
                    let p = result.p_star.expect("tossing result has a setting");
                    TossPlan::new(
                        vec![TossStep {
                            coin: coin.id().clone(),
                            p,
                            fee: coin.cost(p),
                            repeat: false,
                        }],
                        result.cost,
                    )
                }
                _ => TossPlan::empty(e),
            };
            Ok(("ca-single-toss", plan))
        }
        (false, _) => Err(reject(
            "one-time play of adjustable coins is only solved for a single toss",
            "set max_tosses = 1, or reusable = true",
        )),
    }
}

/// Solves an instance with the unique solver its kinds and mode imply.
pub fn solve(instance: &LoadedInstance) -> CliResult<PlanFile> {
    let mut diagnostics = Vec::new();
    let (variant, plan) = match classify(instance)? {
        Kinds::SimpleOnly(coins) => solve_simple(&coins, instance)?,
        Kinds::Menus(menus) => solve_menus(&menus, instance, &mut diagnostics)?,
        Kinds::CaOnly(coins) => solve_ca(&coins, instance, &mut diagnostics)?,
    };
    Ok(PlanFile::from_plan(variant, &plan, diagnostics))
}

/// Checks that a plan only references coins (and settings) the instance
/// actually offers.
pub fn check_plan_against_instance(
    instance: &LoadedInstance,
    plan: &PlanFile,
) -> CliResult<()> {
    for step in &plan.steps {
        let coin = instance
            .coins
            .iter()
            .find(|c| c.id().as_str() == step.coin)
            .ok_or_else(|| {
                CliError::Input(format!("plan references unknown coin `{}`", step.coin))
            })?;
        let ok = match coin {
            LoadedCoin::Simple(c) => c.p() == step.p && c.fee() == step.fee,
            LoadedCoin::Discrete(d) => {
                d.entries().iter().any(|e| e.p() == step.p && e.fee() == step.fee)
            }
            LoadedCoin::Ca(c) => {
                step.p >= c.p_min()
                    && step.p <= c.p_max()
                    && (step.fee - c.cost(step.p)).abs() <= 1e-9 * step.fee.abs().max(1.0)
            }
        };
        if !ok {
            return Err(CliError::Input(format!(
                "plan step (coin {}, p={}, fee={}) does not match the instance",
                step.coin, step.p, step.fee
            )));
        }
    }
    Ok(())
}

/// What `oracle-check` prints.
#[derive(Debug, Clone, Serialize)]
pub struct OracleReportFile {
    pub oracle_value: f64,
    pub candidate_value: f64,
    pub agree: bool,
    pub witness: Vec<PlanStep>,
}

impl OracleReportFile {
    fn from_report(report: &OracleReport) -> Self {
        OracleReportFile {
            oracle_value: report.oracle_value,
            candidate_value: report.candidate_value,
            agree: report.agree,
            witness: report
                .witness
                .steps()
                .iter()
                .map(|s| PlanStep {
                    coin: s.coin.as_str().to_owned(),
                    p: s.p,
                    fee: s.fee,
                    repeat: s.repeat,
                })
                .collect(),
        }
    }
}

/// Runs the brute-force oracle matching the instance's variant against the
/// corresponding solver.
pub fn oracle_check(instance: &LoadedInstance) -> CliResult<OracleReportFile> {
    if instance.mode.reusable || instance.mode.order_given {
        return Err(reject(
            "oracle comparisons exist for one-time games without a given order",
            "set reusable = false and order_given = false",
        ));
    }
    let report = match classify(instance)? {
        Kinds::SimpleOnly(coins) => {
            let budget = match instance.mode.max_tosses {
                None => TossBudget::Unlimited,
                Some(k) => TossBudget::Bounded(k as usize),
            };
            brute_force_one_time(&coins, instance.penalty, budget)?
        }
        Kinds::Menus(menus) => {
            if instance.mode.max_tosses.is_some() {
                return Err(reject(
                    "the selection oracle has no toss budget",
                    "drop max_tosses",
                ));
            }
            brute_force_selection(&menus, instance.penalty)?
        }
        Kinds::CaOnly(_) => {
            return Err(reject(
                "adjustable coins have no enumeration oracle",
                "grid comparisons run in the test suite",
            ));
        }
    };
    Ok(OracleReportFile::from_report(&report))
}

/// Prunes every discrete coin in the file to its efficient form,
/// preserving the written number forms of surviving entries. Returns the
/// rewritten file and the removed `(id, p, fee)` triples.
pub fn prune_file(instance: &LoadedInstance) -> (InstanceFile, Vec<(String, f64, f64)>) {
    let mut file = instance.file.clone();
    let mut removed = Vec::new();
    for spec in &mut file.coins {
        if let CoinSpec::Discrete { id, entries } = spec {
            let loaded = instance
                .coins
                .iter()
                .find_map(|c| match c {
                    LoadedCoin::Discrete(d) if d.id().as_str() == id.as_str() => Some(d),
                    _ => None,
                })
                .expect("every discrete spec was loaded");
            let efficient = loaded.prune_to_efficient();
            let keep = |entry: &EntrySpec| -> bool {
                let p = entry.p.to_f64().expect("entry validated at load");
                efficient.entries().iter().any(|kept| kept.p() == p)
            };
            let mut kept_entries = Vec::with_capacity(entries.len());
            for entry in entries.drain(..) {
                if keep(&entry) {
                    kept_entries.push(entry);
                } else {
                    removed.push((
                        id.clone(),
                        entry.p.to_f64().expect("validated"),
                        entry.fee.to_f64().expect("validated"),
                    ));
                }
            }
            *entries = kept_entries;
        }
    }
    (file, removed)
}
