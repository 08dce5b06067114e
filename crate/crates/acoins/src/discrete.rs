//! Strategies for discrete coins, the exact one-time selection solver, the
//! rate-{0,1} cost algebra, and the subset-product instance generator.
//!
//! Reusable play over menus reduces to simple-coin play on the union of
//! all entries. One-time play is harder: a simple coin must be selected
//! from each menu (or the menu skipped) before the rate-ordered toss, and
//! choosing those entries optimally is NP-hard already when every menu has
//! one entry of rate 0 and one of rate 1. For that restricted shape the
//! cost of selecting the rate-0 entry on an index set `S` collapses to
//!
//! ```text
//! COST(S) = ∏_{i∈S} h_i · (1 + D·∏_{i∉S} ℓ_i) = H_S + D·prod(ℓ)/B_S,
//! ```
//!
//! and when `ℓ_i = h_i²` this is `H_S + C/H_S` with `C = D·prod(ℓ)`, whose
//! minimum over positive reals is `2√C`, attained iff some subset reaches
//! `H_S = √C`. Hitting the bound therefore decides whether a subset of
//! given integers multiplies to a given target, which is what the
//! [`subset_product_to_acoins`] reduction exploits.

use num_integer::Integer;

use crate::coin::{
    DiscreteCoin, Error, Penalty, Result, SimpleCoin, TossPlan, TossStep, ZeroOneInstance,
};
use crate::simple::{reusable_bounded, reusable_unbounded, sequence_cost, BoundedRecursionTrace};

/// Toss allowance for reusable games.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TossBudget {
    Unlimited,
    Bounded(usize),
}

/// Reusable play over menus: flatten every entry into one simple-coin set
/// and play that.
///
/// Callers should pass efficient (pruned) menus; pruning never changes any
/// single-toss cost, so it is safe either way. For a single efficient menu
/// with unlimited tosses this repeats the minimum-probability entry, which
/// is also its minimum-rate entry.
pub fn reusable_discrete(coins: &[DiscreteCoin], penalty: Penalty, budget: TossBudget) -> TossPlan {
    let union: Vec<SimpleCoin> =
        coins.iter().flat_map(|d| d.entries().iter().cloned()).collect();
    match budget {
        TossBudget::Unlimited => reusable_unbounded(&union, penalty),
        TossBudget::Bounded(k) => reusable_bounded(&union, penalty, k).to_plan(),
    }
}

/// Reusable play over menus with the full recursion trace exposed.
pub fn reusable_discrete_bounded(
    coins: &[DiscreteCoin],
    penalty: Penalty,
    k: usize,
) -> BoundedRecursionTrace {
    let union: Vec<SimpleCoin> =
        coins.iter().flat_map(|d| d.entries().iter().cloned()).collect();
    reusable_bounded(&union, penalty, k)
}

/// One-time menus offered in a fixed order: backward induction where each
/// stage picks the menu entry with the cheapest single toss against the
/// suffix value, or skips the menu when no entry beats it.
pub fn sequence_given_order_discrete(seq: &[DiscreteCoin], penalty: Penalty) -> TossPlan {
    let mut suffix = penalty.value();
    let mut tossed: Vec<TossStep> = Vec::new();
    for menu in seq.iter().rev() {
        let (cost, entry) = menu.cost_against(suffix);
        if cost < suffix {
            suffix = cost;
            tossed.push(TossStep {
                coin: menu.id().clone(),
                p: entry.p(),
                fee: entry.fee(),
                repeat: false,
            });
        }
    }
    tossed.reverse();
    TossPlan::new(tossed, suffix)
}

/// Which entry (if any) each menu contributes to a one-time game.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Selection {
    choices: Vec<Option<usize>>,
}

impl Selection {
    /// Per menu, the index of the chosen entry (into the menu's p-sorted
    /// entries) or `None` for a skip.
    pub fn choices(&self) -> &[Option<usize>] {
        &self.choices
    }
}

/// Default cap on the number of selections [`one_time_selection_exact`]
/// will enumerate.
pub const DEFAULT_SELECTION_CAP: u128 = 1 << 24;

/// Exact one-time selection over menus, by exhaustive enumeration.
///
/// Every assignment of skip-or-entry per menu is scored by tossing the
/// chosen entries in ascending rate order (ties by id). Chosen entries
/// whose rate is not below the penalty are canonicalised to skips. The
/// first selection (in lexicographic order, skip before entries) achieving
/// the minimum is returned. Refuses instances whose selection count
/// exceeds [`DEFAULT_SELECTION_CAP`]; the selection problem is NP-hard, so
/// exhaustive search is the honest tool at this scale.
pub fn one_time_selection_exact(
    coins: &[DiscreteCoin],
    penalty: Penalty,
) -> Result<(Selection, TossPlan)> {
    one_time_selection_exact_with_cap(coins, penalty, DEFAULT_SELECTION_CAP)
}

/// [`one_time_selection_exact`] with an explicit enumeration cap.
pub fn one_time_selection_exact_with_cap(
    coins: &[DiscreteCoin],
    penalty: Penalty,
    cap: u128,
) -> Result<(Selection, TossPlan)> {
    let size = coins
        .iter()
        .try_fold(1u128, |acc, d| acc.checked_mul(d.entries().len() as u128 + 1))
        .ok_or(Error::EnumerationTooLarge { size: u128::MAX, cap })?;
    if size > cap {
        return Err(Error::EnumerationTooLarge { size, cap });
    }

    // counter[i] = 0 means skip menu i, t means entry t-1. Incrementing the
    // last position first walks the selections in lexicographic order, so
    // ties keep the lexicographically smallest canonical selection.
    let n = coins.len();
    let mut counter = vec![0usize; n];
    let mut best_cost = f64::INFINITY;
    let mut best_choices: Vec<Option<usize>> = vec![None; n];
    let mut best_order: Vec<(usize, usize)> = Vec::new();
    let mut chosen: Vec<(usize, usize)> = Vec::new();
    loop {
        chosen.clear();
        for (i, &c) in counter.iter().enumerate() {
            if c > 0 {
                let entry = &coins[i].entries()[c - 1];
                if entry.is_beneficial(penalty) {
                    chosen.push((i, c - 1));
                }
            }
        }
        chosen.sort_by(|&(i, a), &(j, b)| {
            let ra = coins[i].entries()[a].rate();
            let rb = coins[j].entries()[b].rate();
            ra.total_cmp(&rb).then_with(|| coins[i].id().cmp(coins[j].id()))
        });
        let seq: Vec<SimpleCoin> =
            chosen.iter().map(|&(i, t)| coins[i].entries()[t].clone()).collect();
        let cost = sequence_cost(&seq, penalty);
        if cost < best_cost {
            best_cost = cost;
            best_order = chosen.clone();
            best_choices = vec![None; n];
            for &(i, t) in &chosen {
                best_choices[i] = Some(t);
            }
        }

        // Mixed-radix increment, last menu fastest.
        let mut pos = n;
        loop {
            if pos == 0 {
                return Ok(finish_selection(coins, best_choices, best_order, best_cost));
            }
            pos -= 1;
            counter[pos] += 1;
            if counter[pos] <= coins[pos].entries().len() {
                break;
            }
            counter[pos] = 0;
        }
    }
}

fn finish_selection(
    coins: &[DiscreteCoin],
    choices: Vec<Option<usize>>,
    order: Vec<(usize, usize)>,
    cost: f64,
) -> (Selection, TossPlan) {
    let steps = order
        .into_iter()
        .map(|(i, t)| {
            let entry = &coins[i].entries()[t];
            TossStep { coin: coins[i].id().clone(), p: entry.p(), fee: entry.fee(), repeat: false }
        })
        .collect();
    (Selection { choices }, TossPlan::new(steps, cost))
}

/// Cost of choosing the rate-0 entry exactly on the index set `chosen`
/// (0-based, strictly increasing) and tossing everything:
/// `∏_{i∈S} h_i · (1 + D·∏_{i∉S} ℓ_i)`.
pub fn zero_one_cost(inst: &ZeroOneInstance, chosen: &[usize]) -> f64 {
    let mut h_s = 1.0;
    let mut ell_rest = 1.0;
    let mut it = chosen.iter().peekable();
    for i in 0..inst.len() {
        if it.peek() == Some(&&i) {
            h_s *= inst.h()[i];
            it.next();
        } else {
            ell_rest *= inst.ell()[i];
        }
    }
    h_s * (1.0 + inst.d() * ell_rest)
}

/// The same cost in factored form, `H_S + D·prod(ℓ)/B_S` with
/// `B_S = ∏_{i∈S} ℓ_i/h_i`. Agrees with [`zero_one_cost`] to
/// floating-point accuracy.
pub fn zero_one_cost_factored(inst: &ZeroOneInstance, chosen: &[usize]) -> f64 {
    let prod_ell: f64 = inst.ell().iter().product();
    let mut h_s = 1.0;
    let mut b_s = 1.0;
    for &i in chosen {
        h_s *= inst.h()[i];
        b_s *= inst.failure_ratio(i);
    }
    h_s + inst.d() * prod_ell / b_s
}

/// Result of exhaustively minimising [`zero_one_cost`] over all subsets.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroOneSolveResult {
    /// Indices (0-based) where the rate-0 entry is chosen.
    pub best_set: Vec<usize>,
    pub best_cost: f64,
    /// `C = D·prod(ℓ)`.
    pub c_value: f64,
    /// `H_S` of the best set.
    pub h_s: f64,
    /// `B_S` of the best set.
    pub b_s: f64,
    /// `2√C`, reported when the instance satisfies `ℓ = h²`; every subset
    /// cost is then at least this bound, with equality iff `H_S = √C`.
    pub bound: Option<f64>,
}

/// Maximum instance size [`zero_one_solve`] will enumerate.
pub const MAX_ZERO_ONE_COINS: usize = 30;

/// Minimises the {0,1} cost over all `2^n` subsets.
///
/// Subsets are enumerated by depth-first branching with the partial
/// products carried down the tree, so each subset costs O(1) amortised
/// and every cost is a fresh product of at most `n` factors — no
/// incremental divisions whose drift could blur the `2√C` equality test
/// over a million steps. Exact cost ties keep the smaller bitmask.
pub fn zero_one_solve(inst: &ZeroOneInstance) -> Result<ZeroOneSolveResult> {
    let n = inst.len();
    if n > MAX_ZERO_ONE_COINS {
        return Err(Error::TooManyCoins { n, max: MAX_ZERO_ONE_COINS });
    }
    struct Search<'a> {
        inst: &'a ZeroOneInstance,
        best_cost: f64,
        best_mask: u64,
    }
    impl Search<'_> {
        fn dfs(&mut self, i: usize, mask: u64, h_s: f64, ell_rest: f64) {
            if i == self.inst.len() {
                let cost = h_s * (1.0 + self.inst.d() * ell_rest);
                if cost < self.best_cost || (cost == self.best_cost && mask < self.best_mask) {
                    self.best_cost = cost;
                    self.best_mask = mask;
                }
                return;
            }
            self.dfs(i + 1, mask, h_s, ell_rest * self.inst.ell()[i]);
            self.dfs(i + 1, mask | (1 << i), h_s * self.inst.h()[i], ell_rest);
        }
    }
    let mut search = Search { inst, best_cost: f64::INFINITY, best_mask: 0 };
    search.dfs(0, 0, 1.0, 1.0);
    let (best_cost, best_mask) = (search.best_cost, search.best_mask);
    let prod_ell: f64 = inst.ell().iter().product();
    let best_set: Vec<usize> = (0..n).filter(|i| best_mask & (1 << i) != 0).collect();
    let h_best: f64 = best_set.iter().map(|&i| inst.h()[i]).product();
    let b_best: f64 = best_set.iter().map(|&i| inst.failure_ratio(i)).product();
    let c_value = inst.d() * prod_ell;
    let bound = inst.is_square_law().then(|| 2.0 * c_value.sqrt());
    Ok(ZeroOneSolveResult { best_set, best_cost, c_value, h_s: h_best, b_s: b_best, bound })
}

/// A reduced exact fraction, kept in 128-bit integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fraction {
    pub numerator: u128,
    pub denominator: u128,
}

impl Fraction {
    fn reduced(numerator: u128, denominator: u128) -> Self {
        let g = numerator.gcd(&denominator);
        Fraction { numerator: numerator / g, denominator: denominator / g }
    }

    pub fn to_f64(self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }
}

/// The instance a subset-product question reduces to.
#[derive(Debug, Clone, PartialEq)]
pub struct SubsetProductReduction {
    pub instance: ZeroOneInstance,
    /// The equivalent two-entry menus, ids `A1..An`.
    pub coins: Vec<DiscreteCoin>,
    pub penalty: Penalty,
    /// `D = (prod(m)/target)²` as an exact fraction.
    pub d_exact: Fraction,
    /// `E = D + 1` as an exact fraction.
    pub penalty_exact: Fraction,
    /// `2√C`, which reduces to `2/target`: the cost the game attains iff
    /// the subset-product question is solvable.
    pub bound_exact: Fraction,
}

/// Encodes a subset-product question as a {0,1} game.
///
/// Given moduli `m_i ≥ 2` and a target `1 ≤ N ≤ prod(m)`, sets
/// `h_i = 1/m_i`, `ℓ_i = 1/m_i²` (so `ℓ = h²` exactly), and
/// `D = (prod(m)/N)²`. Then `C = D·prod(ℓ) = (1/N)²` and the optimal game
/// cost equals `2√C = 2/N` iff some subset of the moduli multiplies to
/// `N`. All fractions are formed in exact integer arithmetic and
/// converted to floating point at the boundary; overflow of any 128-bit
/// product is refused.
pub fn subset_product_to_acoins(m: &[u64], target: u64) -> Result<SubsetProductReduction> {
    if m.is_empty() {
        return Err(Error::EmptyInstance);
    }
    if let Some(&bad) = m.iter().find(|&&x| x < 2) {
        return Err(Error::InvalidModulus(bad));
    }
    let product = m
        .iter()
        .try_fold(1u128, |acc, &x| acc.checked_mul(x as u128))
        .ok_or(Error::ModulusOverflow)?;
    let target = target as u128;
    if target == 0 || target > product {
        return Err(Error::TargetOutOfRange { target, product });
    }
    // D = (product/target)² reduced before squaring to keep headroom.
    let g = product.gcd(&target);
    let (a, b) = (product / g, target / g);
    let a2 = a.checked_mul(a).ok_or(Error::ModulusOverflow)?;
    let b2 = b.checked_mul(b).ok_or(Error::ModulusOverflow)?;
    let d_exact = Fraction { numerator: a2, denominator: b2 };
    let penalty_exact =
        Fraction { numerator: a2.checked_add(b2).ok_or(Error::ModulusOverflow)?, denominator: b2 };
    // 2√C = 2·(a/b)·(1/product) = 2a/(b·product), always an exact rational.
    let bound_den = b.checked_mul(product).ok_or(Error::ModulusOverflow)?;
    let bound_exact = Fraction::reduced(2u128.checked_mul(a).ok_or(Error::ModulusOverflow)?, bound_den);

    let h: Vec<f64> = m.iter().map(|&x| 1.0 / x as f64).collect();
    let ell: Vec<f64> = m.iter().map(|&x| 1.0 / (x as f64 * x as f64)).collect();
    let instance = ZeroOneInstance::new(h, ell, d_exact.to_f64())?;
    let coins = instance.coins();
    let penalty = Penalty::new(penalty_exact.to_f64())?;
    Ok(SubsetProductReduction { instance, coins, penalty, d_exact, penalty_exact, bound_exact })
}

/// Cross-validation of the {0,1} closed form against the general game.
#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceReport {
    pub subsets_checked: usize,
    /// Worst relative gap between the closed form and the explicit
    /// sequence cost over all subsets.
    pub max_relative_gap: f64,
    pub sequence_agrees: bool,
    /// First subset where the two costs disagreed, if any.
    pub first_mismatch: Option<Vec<usize>>,
    /// Optimal cost from the exact selection solver on the menu form.
    pub selection_cost: f64,
    /// Optimal cost from the subset enumeration.
    pub solve_cost: f64,
    pub selection_agrees: bool,
}

impl EquivalenceReport {
    pub fn agrees(&self) -> bool {
        self.sequence_agrees && self.selection_agrees
    }
}

/// Maximum instance size [`zero_one_equivalence_check`] will sweep.
pub const MAX_EQUIVALENCE_COINS: usize = 12;

/// Checks, for every subset `S`, that the {0,1} closed form equals the
/// cost of the explicit sequence (rate-0 entries of `S` first, then the
/// rate-1 entries) at relative tolerance 1e-9, and that the exact
/// selection solver on the menu form matches the subset enumeration.
///
/// The penalty should be the instance's own `D + 1`; passing anything else
/// simply reports the disagreement.
pub fn zero_one_equivalence_check(
    inst: &ZeroOneInstance,
    penalty: Penalty,
) -> Result<EquivalenceReport> {
    let n = inst.len();
    if n > MAX_EQUIVALENCE_COINS {
        return Err(Error::TooManyCoins { n, max: MAX_EQUIVALENCE_COINS });
    }
    let mut max_relative_gap: f64 = 0.0;
    let mut first_mismatch = None;
    let mut subsets_checked = 0;
    for mask in 0u64..(1 << n) {
        let chosen: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let closed = zero_one_cost(inst, &chosen);
        let mut seq: Vec<SimpleCoin> = Vec::with_capacity(n);
        for &i in &chosen {
            seq.push(SimpleCoin::new(format!("A{}", i + 1), 1.0 - inst.h()[i], 0.0)?);
        }
        for i in (0..n).filter(|i| mask & (1 << i) == 0) {
            let p = 1.0 - inst.ell()[i];
            seq.push(SimpleCoin::new(format!("A{}", i + 1), p, p)?);
        }
        let explicit = sequence_cost(&seq, penalty);
        let gap = (closed - explicit).abs() / closed.abs().max(1.0);
        max_relative_gap = max_relative_gap.max(gap);
        if gap > 1e-9 && first_mismatch.is_none() {
            first_mismatch = Some(chosen);
        }
        subsets_checked += 1;
    }
    let solve_cost = zero_one_solve(inst)?.best_cost;
    let (_, plan) = one_time_selection_exact(&inst.coins(), penalty)?;
    let selection_cost = plan.expected_cost();
    let selection_agrees =
        (selection_cost - solve_cost).abs() <= 1e-9 * solve_cost.abs().max(1.0);
    Ok(EquivalenceReport {
        subsets_checked,
        max_relative_gap,
        sequence_agrees: first_mismatch.is_none(),
        first_mismatch,
        selection_cost,
        solve_cost,
        selection_agrees,
    })
}
