//! Monte Carlo plan execution and brute-force oracles.
//!
//! Nothing here trusts the solvers: plans are executed by sampling the
//! game directly, and the oracles enumerate every ordered subset (or every
//! selection and permutation) at small sizes, so optimality claims can be
//! checked independently.

use crate::coin::{DiscreteCoin, Error, Penalty, Result, SimpleCoin, TossPlan, TossStep};
use crate::discrete::{one_time_selection_exact, TossBudget};
use crate::simple::{one_time_bounded_dp, one_time_unlimited};

/// Summary statistics of a simulated plan.
#[derive(Debug, Clone, PartialEq)]
pub struct SimReport {
    pub trials: u64,
    pub mean: f64,
    pub sample_std: f64,
    /// `1.96 · sample_std / √trials`.
    pub ci95_halfwidth: f64,
    pub seed: u64,
}

// Counter-based generator: trial i draws from its own SplitMix64 stream
// keyed by (seed, i), so results do not depend on how trials are sharded.
const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

struct TrialRng {
    state: u64,
}

impl TrialRng {
    fn new(seed: u64, trial: u64) -> Self {
        TrialRng { state: mix64(seed ^ mix64(trial.wrapping_mul(GOLDEN_GAMMA).wrapping_add(1))) }
    }

    fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    /// Uniform in [0, 1).
    fn next_unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in (0, 1).
    fn next_open_unit(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }
}

/// Number of tosses until the first success of a coin with success
/// probability `p`, sampled by inverting the geometric CDF. No loop, so
/// repeat-until-success steps need no iteration cap.
fn sample_tosses_until_success(p: f64, rng: &mut TrialRng) -> f64 {
    if p >= 1.0 {
        return 1.0;
    }
    let u = rng.next_open_unit();
    (u.ln() / (1.0 - p).ln()).ceil().max(1.0)
}

/// Executes a plan `trials` times: steps are tossed in order, stopping at
/// the first success; repeat steps toss until success; if the plan ends
/// without a success the penalty is paid. Deterministic for a given seed.
pub fn simulate_plan(plan: &TossPlan, penalty: Penalty, trials: u64, seed: u64) -> SimReport {
    assert!(trials >= 1, "simulation needs at least one trial");
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for trial in 0..trials {
        let mut rng = TrialRng::new(seed, trial);
        let mut cost = 0.0;
        let mut succeeded = false;
        for step in plan.steps() {
            if step.repeat {
                cost += sample_tosses_until_success(step.p, &mut rng) * step.fee;
                succeeded = true;
                break;
            }
            cost += step.fee;
            if rng.next_unit() < step.p {
                succeeded = true;
                break;
            }
        }
        if !succeeded {
            cost += penalty.value();
        }
        // Welford update: exact mean and zero variance for constant costs.
        let count = (trial + 1) as f64;
        let delta = cost - mean;
        mean += delta / count;
        m2 += delta * (cost - mean);
    }
    let sample_std = if trials > 1 { (m2 / (trials - 1) as f64).max(0.0).sqrt() } else { 0.0 };
    let ci95_halfwidth = 1.96 * sample_std / (trials as f64).sqrt();
    SimReport { trials, mean, sample_std, ci95_halfwidth, seed }
}

/// An oracle-vs-solver comparison. `agree` holds when
/// `|oracle − candidate| ≤ 1e-9 · max(1, |oracle|)`.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub oracle_value: f64,
    pub candidate_value: f64,
    pub agree: bool,
    /// The best schedule the oracle found.
    pub witness: TossPlan,
}

/// Relative tolerance for oracle agreement.
pub const ORACLE_REL_TOL: f64 = 1e-9;

fn values_agree(oracle: f64, candidate: f64) -> bool {
    (oracle - candidate).abs() <= ORACLE_REL_TOL * oracle.abs().max(1.0)
}

/// Largest coin count the ordered-subset oracles will enumerate.
pub const MAX_ORACLE_COINS: usize = 8;

struct OrderedSearch<'a> {
    coins: &'a [SimpleCoin],
    penalty: f64,
    max_depth: usize,
    full_only: bool,
    used: Vec<bool>,
    order: Vec<usize>,
    best_cost: f64,
    best_order: Vec<usize>,
}

impl<'a> OrderedSearch<'a> {
    // Depth-first over ordered subsets with an incrementally maintained
    // cost: `accrued` is the expectation already locked in, `survive` the
    // probability of reaching this point, `fees` the fees sunk so far.
    fn run(&mut self, survive: f64, fees: f64, accrued: f64) {
        if !self.full_only || self.order.len() == self.max_depth || self.all_used() {
            let total = accrued + survive * (fees + self.penalty);
            if total < self.best_cost {
                self.best_cost = total;
                self.best_order = self.order.clone();
            }
        }
        if self.order.len() == self.max_depth {
            return;
        }
        for i in 0..self.coins.len() {
            if self.used[i] {
                continue;
            }
            let coin = &self.coins[i];
            self.used[i] = true;
            self.order.push(i);
            self.run(
                survive * (1.0 - coin.p()),
                fees + coin.fee(),
                accrued + survive * coin.p() * (fees + coin.fee()),
            );
            self.order.pop();
            self.used[i] = false;
        }
    }

    fn all_used(&self) -> bool {
        self.order.len() == self.coins.len()
    }
}

fn min_over_orderings(
    coins: &[SimpleCoin],
    penalty: Penalty,
    max_depth: usize,
    full_only: bool,
) -> (f64, Vec<usize>) {
    let mut search = OrderedSearch {
        coins,
        penalty: penalty.value(),
        max_depth,
        full_only,
        used: vec![false; coins.len()],
        order: Vec::new(),
        best_cost: f64::INFINITY,
        best_order: Vec::new(),
    };
    search.run(1.0, 0.0, 0.0);
    (search.best_cost, search.best_order)
}

fn plan_from_order(coins: &[SimpleCoin], order: &[usize], cost: f64) -> TossPlan {
    let steps = order
        .iter()
        .map(|&i| {
            let c = &coins[i];
            TossStep { coin: c.id().clone(), p: c.p(), fee: c.fee(), repeat: false }
        })
        .collect();
    TossPlan::new(steps, cost)
}

/// Enumerates every ordered subset (within the toss budget) of up to
/// [`MAX_ORACLE_COINS`] one-time coins and compares the minimum against
/// the matching solver: rate-ordered play for an unlimited budget, the
/// dynamic program otherwise.
pub fn brute_force_one_time(
    coins: &[SimpleCoin],
    penalty: Penalty,
    budget: TossBudget,
) -> Result<OracleReport> {
    if coins.len() > MAX_ORACLE_COINS {
        return Err(Error::TooManyCoins { n: coins.len(), max: MAX_ORACLE_COINS });
    }
    let depth = match budget {
        TossBudget::Unlimited => coins.len(),
        TossBudget::Bounded(k) => k.min(coins.len()),
    };
    let (oracle_value, order) = min_over_orderings(coins, penalty, depth, false);
    let candidate_value = match budget {
        TossBudget::Unlimited => one_time_unlimited(coins, penalty).expected_cost(),
        TossBudget::Bounded(k) => one_time_bounded_dp(coins, penalty, k).1.expected_cost(),
    };
    Ok(OracleReport {
        oracle_value,
        candidate_value,
        agree: values_agree(oracle_value, candidate_value),
        witness: plan_from_order(coins, &order, oracle_value),
    })
}

/// Cap on the number of selections [`brute_force_selection`] will expand.
pub const MAX_SELECTION_ORACLE_SIZE: u128 = 1 << 20;

/// Enumerates every selection from the menus and every permutation of the
/// selected entries — without assuming rate ordering — and compares the
/// global minimum against the exact selection solver.
pub fn brute_force_selection(coins: &[DiscreteCoin], penalty: Penalty) -> Result<OracleReport> {
    if coins.len() > MAX_ORACLE_COINS {
        return Err(Error::TooManyCoins { n: coins.len(), max: MAX_ORACLE_COINS });
    }
    let size = coins
        .iter()
        .try_fold(1u128, |acc, d| acc.checked_mul(d.entries().len() as u128 + 1))
        .ok_or(Error::EnumerationTooLarge { size: u128::MAX, cap: MAX_SELECTION_ORACLE_SIZE })?;
    if size > MAX_SELECTION_ORACLE_SIZE {
        return Err(Error::EnumerationTooLarge { size, cap: MAX_SELECTION_ORACLE_SIZE });
    }

    let mut best_cost = f64::INFINITY;
    let mut best_entries: Vec<SimpleCoin> = Vec::new();
    let mut picked: Vec<SimpleCoin> = Vec::new();
    fn expand(
        coins: &[DiscreteCoin],
        index: usize,
        picked: &mut Vec<SimpleCoin>,
        penalty: Penalty,
        best_cost: &mut f64,
        best_entries: &mut Vec<SimpleCoin>,
    ) {
        if index == coins.len() {
            let (cost, order) = min_over_orderings(picked, penalty, picked.len(), true);
            if cost < *best_cost {
                *best_cost = cost;
                *best_entries = order.iter().map(|&i| picked[i].clone()).collect();
            }
            return;
        }
        expand(coins, index + 1, picked, penalty, best_cost, best_entries);
        for entry in coins[index].entries() {
            picked.push(entry.clone());
            expand(coins, index + 1, picked, penalty, best_cost, best_entries);
            picked.pop();
        }
    }
    expand(coins, 0, &mut picked, penalty, &mut best_cost, &mut best_entries);

    let candidate_value = one_time_selection_exact(coins, penalty)?.1.expected_cost();
    let steps = best_entries
        .iter()
        .map(|c| TossStep { coin: c.id().clone(), p: c.p(), fee: c.fee(), repeat: false })
        .collect();
    Ok(OracleReport {
        oracle_value: best_cost,
        candidate_value,
        agree: values_agree(best_cost, candidate_value),
        witness: TossPlan::new(steps, best_cost),
    })
}

/// Whether some subset of `m` multiplies exactly to `target`, by exact
/// integer search (the empty subset counts, with product 1).
pub fn subset_product_oracle(m: &[u64], target: u64) -> bool {
    fn dfs(m: &[u64], target: u128, acc: u128) -> bool {
        if acc > target {
            return false;
        }
        match m {
            [] => acc == target,
            [first, rest @ ..] => {
                dfs(rest, target, acc) || dfs(rest, target, acc * *first as u128)
            }
        }
    }
    dfs(m, target as u128, 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discrete::subset_product_to_acoins;
    use crate::simple::sequence_cost;

    fn penalty(v: f64) -> Penalty {
        Penalty::new(v).unwrap()
    }

    fn coin(id: &str, p: f64, fee: f64) -> SimpleCoin {
        SimpleCoin::new(id, p, fee).unwrap()
    }

    #[test]
    fn deterministic_coin_simulates_exactly() {
        let plan = TossPlan::new(
            vec![TossStep { coin: "a".into(), p: 1.0, fee: 3.0, repeat: false }],
            3.0,
        );
        let report = simulate_plan(&plan, penalty(10.0), 10_000, 1);
        assert_eq!(report.mean, 3.0);
        assert_eq!(report.sample_std, 0.0);
        assert_eq!(report.ci95_halfwidth, 0.0);
    }

    #[test]
    fn empty_plan_simulates_to_penalty() {
        let plan = TossPlan::empty(penalty(4.0));
        let report = simulate_plan(&plan, penalty(4.0), 1000, 7);
        assert_eq!(report.mean, 4.0);
        assert_eq!(report.sample_std, 0.0);
    }

    #[test]
    fn two_coin_sequence_matches_analytic_mean() {
        let seq = vec![coin("a", 0.5, 1.0), coin("b", 0.5, 1.0)];
        let plan = TossPlan::new(
            seq.iter()
                .map(|c| TossStep { coin: c.id().clone(), p: c.p(), fee: c.fee(), repeat: false })
                .collect(),
            sequence_cost(&seq, penalty(4.0)),
        );
        let report = simulate_plan(&plan, penalty(4.0), 1_000_000, 42);
        assert!(
            (report.mean - 2.5).abs() <= 3.0 * report.ci95_halfwidth,
            "mean {} ci {}",
            report.mean,
            report.ci95_halfwidth
        );
    }

    #[test]
    fn repeat_step_matches_rate() {
        let plan = TossPlan::new(
            vec![TossStep { coin: "a".into(), p: 0.25, fee: 0.5, repeat: true }],
            2.0,
        );
        let report = simulate_plan(&plan, penalty(9.0), 1_000_000, 3);
        let standard_error = report.sample_std / (report.trials as f64).sqrt();
        assert!((report.mean - 2.0).abs() <= 4.0 * standard_error);
        assert!(report.sample_std > 0.0);
    }

    #[test]
    fn same_seed_is_bit_identical() {
        let plan = TossPlan::new(
            vec![
                TossStep { coin: "a".into(), p: 0.3, fee: 0.7, repeat: false },
                TossStep { coin: "b".into(), p: 0.6, fee: 1.1, repeat: false },
            ],
            0.0,
        );
        let a = simulate_plan(&plan, penalty(5.0), 200_000, 99);
        let b = simulate_plan(&plan, penalty(5.0), 200_000, 99);
        assert_eq!(a, b);
        let c = simulate_plan(&plan, penalty(5.0), 200_000, 100);
        assert_ne!(a.mean, c.mean);
    }

    #[test]
    fn oracle_single_coin() {
        let coins = vec![coin("a", 0.5, 1.0)];
        let report = brute_force_one_time(&coins, penalty(4.0), TossBudget::Unlimited).unwrap();
        assert_eq!(report.oracle_value, 3.0);
        assert!(report.agree);
        // Not worth tossing: oracle keeps the empty schedule.
        let report = brute_force_one_time(&coins, penalty(1.5), TossBudget::Unlimited).unwrap();
        assert_eq!(report.oracle_value, 1.5);
        assert!(report.witness.steps().is_empty());
        assert!(report.agree);
    }

    #[test]
    fn oracle_witness_is_rate_sorted_without_ties() {
        let coins = vec![coin("a", 0.5, 1.5), coin("b", 0.5, 0.5), coin("c", 0.5, 1.0)];
        let report = brute_force_one_time(&coins, penalty(10.0), TossBudget::Unlimited).unwrap();
        let order: Vec<&str> = report.witness.steps().iter().map(|s| s.coin.as_str()).collect();
        assert_eq!(order, vec!["b", "c", "a"]);
        assert!(report.agree);
    }

    #[test]
    fn oracle_worked_example() {
        let coins = vec![coin("a", 0.9, 0.5), coin("b", 0.5, 0.5)];
        let report = brute_force_one_time(&coins, penalty(10.0), TossBudget::Unlimited).unwrap();
        assert!((report.oracle_value - 1.05).abs() < 1e-12);
        assert!(report.agree);
    }

    #[test]
    fn oracle_refuses_large_sets() {
        let coins: Vec<SimpleCoin> =
            (0..9).map(|i| coin(&format!("c{i}"), 0.5, 1.0)).collect();
        assert!(matches!(
            brute_force_one_time(&coins, penalty(4.0), TossBudget::Unlimited),
            Err(Error::TooManyCoins { n: 9, max: 8 })
        ));
    }

    #[test]
    fn selection_oracle_on_reduction_instance() {
        let red = subset_product_to_acoins(&[2, 3, 6], 6).unwrap();
        let report = brute_force_selection(&red.coins, red.penalty).unwrap();
        assert!((report.oracle_value - 1.0 / 3.0).abs() < 1e-12);
        assert!(report.agree, "{report:?}");
    }

    #[test]
    fn selection_oracle_single_menu() {
        let menu = DiscreteCoin::new("d", &[(0.5, 1.0), (0.7, 2.0)]).unwrap();
        let report = brute_force_selection(&[menu.clone()], penalty(10.0)).unwrap();
        let (direct, _) = menu.cost(penalty(10.0));
        assert_eq!(report.oracle_value, direct.min(10.0));
        assert!(report.agree);
    }

    #[test]
    fn subset_product_oracle_examples() {
        assert!(subset_product_oracle(&[2, 3, 6], 6));
        assert!(!subset_product_oracle(&[2, 3], 5));
        assert!(subset_product_oracle(&[2, 2, 2], 8));
        assert!(subset_product_oracle(&[2, 3], 1)); // empty subset
        assert!(subset_product_oracle(&[7], 7));
        assert!(!subset_product_oracle(&[7], 5));
    }
}
