//! Optimal strategies for sets and sequences of simple coins.
//!
//! The expected cost of tossing a fixed sequence `(c_1, …, c_n)` until the
//! first success, paying `E` if all fail, is
//!
//! ```text
//! P₁μ₁ + (1−P₁)P₂(μ₁+μ₂) + … + (1−P₁)⋯(1−Pₙ)(μ₁+…+μₙ+E)
//! ```
//!
//! which regroups into a convex combination of the coin rates and `E`:
//!
//! ```text
//! P₁r₁ + (1−P₁)P₂r₂ + … + (1−P₁)⋯(1−Pₙ)E.
//! ```
//!
//! The second form shows that swapping adjacent coins changes the cost by
//! `(∏_{k<i}(1−P_k))·P_i·P_{i+1}·(r_{i+1}−r_i)`, so one-time play is
//! optimal exactly in nondecreasing rate order, and only coins with rate
//! below `E` are worth tossing at all.

use crate::coin::{best_coin_against, CoinId, Penalty, SimpleCoin, TossPlan, TossStep};

/// Expected cost of tossing `seq` in order against `penalty` (fee-grouped
/// form). The empty sequence costs exactly the penalty.
pub fn sequence_cost(seq: &[SimpleCoin], penalty: Penalty) -> f64 {
    let mut survive = 1.0;
    let mut fees = 0.0;
    let mut total = 0.0;
    for coin in seq {
        fees += coin.fee();
        total += survive * coin.p() * fees;
        survive *= 1.0 - coin.p();
    }
    total + survive * (fees + penalty.value())
}

/// The same expectation written as a convex combination of the coin rates
/// and the penalty. Agrees with [`sequence_cost`] to floating-point
/// accuracy; kept separate so the two routes can check each other.
pub fn sequence_cost_rate_form(seq: &[SimpleCoin], penalty: Penalty) -> f64 {
    let mut survive = 1.0;
    let mut total = 0.0;
    for coin in seq {
        total += survive * coin.p() * coin.rate();
        survive *= 1.0 - coin.p();
    }
    total + survive * penalty.value()
}

/// Decides, for coins offered in a fixed order, which to toss.
///
/// Backward induction: with `E'` the value of the optimal strategy for the
/// remaining suffix, coin `i` is tossed iff its rate is strictly below
/// `E'`. The returned plan lists only the tossed coins, in order.
pub fn decide_given_order(seq: &[SimpleCoin], penalty: Penalty) -> TossPlan {
    let mut suffix = penalty.value();
    let mut tossed: Vec<&SimpleCoin> = Vec::new();
    for coin in seq.iter().rev() {
        if coin.rate() < suffix {
            suffix = coin.cost_against(suffix);
            tossed.push(coin);
        }
    }
    tossed.reverse();
    let steps = tossed
        .into_iter()
        .map(|c| TossStep { coin: c.id().clone(), p: c.p(), fee: c.fee(), repeat: false })
        .collect();
    TossPlan::new(steps, suffix)
}

/// Unbounded reusable play: repeat a minimum-rate coin until it succeeds,
/// for an expected cost equal to that rate — provided the rate beats the
/// penalty. Rate ties go to the smaller id.
pub fn reusable_unbounded(coins: &[SimpleCoin], penalty: Penalty) -> TossPlan {
    let best = coins.iter().min_by(|a, b| {
        a.rate()
            .total_cmp(&b.rate())
            .then_with(|| a.id().cmp(b.id()))
    });
    match best {
        Some(coin) if coin.rate() < penalty.value() => TossPlan::new(
            vec![TossStep { coin: coin.id().clone(), p: coin.p(), fee: coin.fee(), repeat: true }],
            coin.rate(),
        ),
        _ => TossPlan::empty(penalty),
    }
}

/// The coin chosen at one level of a bounded reusable recursion.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelChoice {
    pub coin: CoinId,
    pub p: f64,
    pub fee: f64,
}

/// One level of a bounded reusable recursion: the value with `j` tosses
/// allowed, and the coin tossed first at that level (if any).
#[derive(Debug, Clone, PartialEq)]
pub struct TraceLevel {
    pub value: f64,
    pub choice: Option<LevelChoice>,
}

/// The full value trace `E_0 = E, E_1, …, E_k` of a bounded reusable game.
///
/// Level `j` holds the optimal expected cost when `j` tosses are allowed;
/// the sequence is nonincreasing and never drops below the smallest rate
/// in play. Levels where no toss improves the value repeat the previous
/// value with no choice.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundedRecursionTrace {
    levels: Vec<TraceLevel>,
}

impl BoundedRecursionTrace {
    pub(crate) fn from_levels(levels: Vec<TraceLevel>) -> Self {
        BoundedRecursionTrace { levels }
    }

    /// Levels `0..=k` in order; `levels()[j].value` is the cost with `j`
    /// tosses allowed.
    pub fn levels(&self) -> &[TraceLevel] {
        &self.levels
    }

    /// The value of the full budget, `E_k`.
    pub fn final_value(&self) -> f64 {
        self.levels.last().expect("trace has level 0").value
    }

    /// Converts the trace into a toss schedule: play the highest level's
    /// coin first, then descend.
    pub fn to_plan(&self) -> TossPlan {
        let steps = self
            .levels
            .iter()
            .rev()
            .filter_map(|level| level.choice.as_ref())
            .map(|c| TossStep { coin: c.coin.clone(), p: c.p, fee: c.fee, repeat: false })
            .collect();
        TossPlan::new(steps, self.final_value())
    }
}

/// Reusable play with at most `k` tosses.
///
/// `E_0 = E`, and each level tosses the coin with the cheapest single toss
/// against the previous value, when that strictly improves it:
/// `E_{j+1} = min_c (fee_c + (1 − p_c)·E_j)`.
pub fn reusable_bounded(coins: &[SimpleCoin], penalty: Penalty, k: usize) -> BoundedRecursionTrace {
    let mut levels = Vec::with_capacity(k + 1);
    let mut value = penalty.value();
    levels.push(TraceLevel { value, choice: None });
    for _ in 0..k {
        let choice = best_coin_against(coins, value).map(|coin| {
            value = coin.cost_against(value);
            LevelChoice { coin: coin.id().clone(), p: coin.p(), fee: coin.fee() }
        });
        levels.push(TraceLevel { value, choice });
    }
    BoundedRecursionTrace::from_levels(levels)
}

/// One-time play, unlimited tosses: toss the coins with rate below the
/// penalty in ascending rate order (ties by id).
pub fn one_time_unlimited(coins: &[SimpleCoin], penalty: Penalty) -> TossPlan {
    let mut chosen: Vec<&SimpleCoin> =
        coins.iter().filter(|c| c.is_beneficial(penalty)).collect();
    chosen.sort_by(|a, b| a.rate().total_cmp(&b.rate()).then_with(|| a.id().cmp(b.id())));
    let ordered: Vec<SimpleCoin> = chosen.iter().map(|&c| c.clone()).collect();
    let cost = sequence_cost(&ordered, penalty);
    let steps = ordered
        .into_iter()
        .map(|c| TossStep { coin: c.id().clone(), p: c.p(), fee: c.fee(), repeat: false })
        .collect();
    TossPlan::new(steps, cost)
}

/// The table of a bounded one-time dynamic program.
///
/// `value(i, j)` is the optimal cost of playing the rate-sorted beneficial
/// coins from index `i` on with at most `j` tosses; `value(n, j) = E` and
/// `value(i, 0) = E`. The effective budget is clamped to the number of
/// beneficial coins, since further tosses cannot help a one-time game.
#[derive(Debug, Clone)]
pub struct DpTable {
    coins: Vec<SimpleCoin>,
    budget: usize,
    values: Vec<f64>,
    toss: Vec<bool>,
}

impl DpTable {
    /// The beneficial coins in ascending rate order (ties by id).
    pub fn coins(&self) -> &[SimpleCoin] {
        &self.coins
    }

    /// The effective toss budget, `min(k, n)`.
    pub fn budget(&self) -> usize {
        self.budget
    }

    /// Optimal cost for the suffix starting at coin `i` with `j` tosses
    /// allowed (`i <= n`, `j <= budget`).
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * (self.budget + 1) + j]
    }

    /// Whether the optimal strategy tosses coin `i` when `j` tosses remain.
    pub fn tosses(&self, i: usize, j: usize) -> bool {
        self.toss[i * (self.budget + 1) + j]
    }

    /// `value(0, budget)`: the optimal cost of the whole game.
    pub fn optimal(&self) -> f64 {
        self.value(0, self.budget)
    }
}

/// One-time play with at most `k` tosses, solved by dynamic programming in
/// `O(k·n)` time and memory.
///
/// Only coins with rate below the penalty participate; they are sorted by
/// ascending rate and the table is filled backwards with
/// `OPT(i,j) = min(OPT(i+1,j), fee_i + (1−p_i)·OPT(i+1,j−1))`.
/// Exact ties prefer skipping, so the plan tosses as few coins as possible.
pub fn one_time_bounded_dp(coins: &[SimpleCoin], penalty: Penalty, k: usize) -> (DpTable, TossPlan) {
    let e = penalty.value();
    let mut sorted: Vec<SimpleCoin> =
        coins.iter().filter(|c| c.is_beneficial(penalty)).cloned().collect();
    sorted.sort_by(|a, b| a.rate().total_cmp(&b.rate()).then_with(|| a.id().cmp(b.id())));
    let n = sorted.len();
    let budget = k.min(n);
    let width = budget + 1;
    let mut values = vec![e; (n + 1) * width];
    let mut toss = vec![false; n.max(1) * width];
    for i in (0..n).rev() {
        for j in 1..=budget {
            let skip = values[(i + 1) * width + j];
            let take = sorted[i].fee() + (1.0 - sorted[i].p()) * values[(i + 1) * width + (j - 1)];
            if take < skip {
                values[i * width + j] = take;
                toss[i * width + j] = true;
            } else {
                values[i * width + j] = skip;
            }
        }
    }
    let table = DpTable { coins: sorted, budget, values, toss };
    let mut steps = Vec::new();
    let mut j = budget;
    for i in 0..n {
        if j > 0 && table.tosses(i, j) {
            let c = &table.coins[i];
            steps.push(TossStep { coin: c.id().clone(), p: c.p(), fee: c.fee(), repeat: false });
            j -= 1;
        }
    }
    let plan = TossPlan::new(steps, table.optimal());
    (table, plan)
}
