//! Single-toss and reusable strategies for continuously adjustable coins.
//!
//! For a regular coin (strictly increasing, strictly convex `μ` on
//! `[p_min, p_max]`) the single-toss cost `μ(P) + (1−P)E` is convex in
//! `P` with derivative `μ'(P) − E`, so the optimizer reads off three
//! landmarks — `r_min = μ(p_min)/p_min`, `E_low = μ'(p_min)`,
//! `E_high = μ'(p_max)` — and classifies the penalty:
//!
//! 1. `E ≤ r_min`: no setting is worth tossing; pay the penalty.
//! 2. `r_min < E ≤ E_low`: the optimum sits at `p_min`.
//! 3. `E_low < E < E_high`: the optimum is the interior root of
//!    `μ'(P) = E`, found by bisection on the increasing slope.
//! 4. `E_high ≤ E`: the optimum sits at `p_max`.
//!
//! The implementation locates the slope-based minimizer first and then
//! compares its cost against the penalty, which reproduces the ladder
//! (including its half-open boundaries) whenever `r(P)` is increasing —
//! the usual shape, where `r_min < E_low` always holds. Coins whose cost
//! has a large constant term can instead have `E_low < r_min`; there
//! `r(p_min)` is no longer the smallest rate on the window, case 2's
//! window is empty, and comparing the optimised toss against the penalty
//! is what remains correct. Results on such coins carry a flag noting the
//! degenerate threshold ordering.

use crate::coin::{CACoin, Penalty, TossPlan, TossStep};
use crate::simple::{BoundedRecursionTrace, LevelChoice, TraceLevel};

/// Maximum bisection iterations for the interior root of `μ'(P) = E`.
pub const BISECTION_MAX_ITERS: usize = 200;
/// Bisection stops once the bracket is narrower than this.
pub const BISECTION_WIDTH_TOL: f64 = 1e-13;
/// Bisection also stops once `|μ'(P) − E| ≤ tol · max(1, E)`.
pub const BISECTION_RESIDUAL_TOL: f64 = 1e-10;

/// The three penalty landmarks of a coin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaThresholds {
    /// `μ(p_min)/p_min`: below this penalty the coin is not worth tossing.
    pub r_min: f64,
    /// `μ'(p_min)`: up to this penalty the optimum sits at `p_min`.
    pub e_low: f64,
    /// `μ'(p_max)`: from this penalty on the optimum sits at `p_max`.
    pub e_high: f64,
}

impl CaThresholds {
    /// Whether the usual ordering `r_min < e_low` fails (possible when
    /// `μ(p_min)` is large relative to the slope).
    pub fn is_degenerate(&self) -> bool {
        self.r_min >= self.e_low
    }
}

/// Reads the penalty landmarks off a validated regular coin.
pub fn ca_thresholds(coin: &CACoin) -> CaThresholds {
    CaThresholds {
        r_min: coin.rate(coin.p_min()),
        e_low: coin.cost_slope(coin.p_min()),
        e_high: coin.cost_slope(coin.p_max()),
    }
}

/// Which of the four penalty regimes a single toss falls into.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TossCase {
    NotBeneficial,
    BoundaryMin,
    Interior,
    BoundaryMax,
}

/// Outcome of optimising a single toss of an adjustable coin.
#[derive(Debug, Clone, PartialEq)]
pub struct CaSingleTossResult {
    pub case: TossCase,
    /// The chosen probability; absent when the coin is skipped.
    pub p_star: Option<f64>,
    /// Expected cost of the decision (the penalty itself when skipping).
    pub cost: f64,
    /// Set when the coin's thresholds are out of their usual order.
    pub degenerate_thresholds: bool,
}

impl CaSingleTossResult {
    pub fn should_toss(&self) -> bool {
        self.p_star.is_some()
    }
}

fn interior_root(coin: &CACoin, target: f64) -> f64 {
    let mut lo = coin.p_min();
    let mut hi = coin.p_max();
    for _ in 0..BISECTION_MAX_ITERS {
        if hi - lo <= BISECTION_WIDTH_TOL {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let slope = coin.cost_slope(mid);
        if (slope - target).abs() <= BISECTION_RESIDUAL_TOL * target.abs().max(1.0) {
            return mid;
        }
        if slope < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

pub(crate) fn ca_single_toss_against(coin: &CACoin, continuation: f64) -> CaSingleTossResult {
    let th = ca_thresholds(coin);
    let degenerate = th.is_degenerate();
    let (case, p_star) = if continuation <= th.e_low {
        (TossCase::BoundaryMin, coin.p_min())
    } else if continuation < th.e_high {
        (TossCase::Interior, interior_root(coin, continuation))
    } else {
        (TossCase::BoundaryMax, coin.p_max())
    };
    let cost = coin.cost(p_star) + (1.0 - p_star) * continuation;
    if cost >= continuation {
        // Even the optimal setting does not beat paying up; ties skip.
        return CaSingleTossResult {
            case: TossCase::NotBeneficial,
            p_star: None,
            cost: continuation,
            degenerate_thresholds: degenerate,
        };
    }
    CaSingleTossResult { case, p_star: Some(p_star), cost, degenerate_thresholds: degenerate }
}

/// Optimises a single toss: picks the probability minimising
/// `μ(P) + (1−P)·E`, or skips when no setting beats the penalty.
pub fn ca_single_toss(coin: &CACoin, penalty: Penalty) -> CaSingleTossResult {
    ca_single_toss_against(coin, penalty.value())
}

/// Unbounded reusable play of one coin: repeat the cheapest setting
/// `p_min` until success, for an expected cost of `r_min` — when that
/// beats the penalty.
pub fn ca_reusable_unbounded(coin: &CACoin, penalty: Penalty) -> TossPlan {
    let r_min = coin.rate(coin.p_min());
    if r_min < penalty.value() {
        TossPlan::new(
            vec![TossStep {
                coin: coin.id().clone(),
                p: coin.p_min(),
                fee: coin.cost(coin.p_min()),
                repeat: true,
            }],
            r_min,
        )
    } else {
        TossPlan::empty(penalty)
    }
}

/// Reusable play of a set of adjustable coins with at most `k` tosses,
/// re-optimising the coin and its setting at every level:
/// `E_{j+1} = min over coins of the optimal single toss against E_j`.
pub fn ca_reusable_bounded(coins: &[CACoin], penalty: Penalty, k: usize) -> BoundedRecursionTrace {
    let mut levels = Vec::with_capacity(k + 1);
    let mut value = penalty.value();
    levels.push(TraceLevel { value, choice: None });
    for _ in 0..k {
        let mut chosen: Option<(&CACoin, CaSingleTossResult)> = None;
        for coin in coins {
            let result = ca_single_toss_against(coin, value);
            let replace = match &chosen {
                None => true,
                Some((incumbent, best)) => {
                    result.cost < best.cost
                        || (result.cost == best.cost && coin.id() < incumbent.id())
                }
            };
            if replace {
                chosen = Some((coin, result));
            }
        }
        let choice = match chosen {
            Some((coin, result)) if result.cost < value => {
                let p = result.p_star.expect("an improving toss has a setting");
                value = result.cost;
                Some(LevelChoice { coin: coin.id().clone(), p, fee: coin.cost(p) })
            }
            _ => None,
        };
        levels.push(TraceLevel { value, choice });
    }
    BoundedRecursionTrace::from_levels(levels)
}

/// Evaluates the optimal single toss of every coin and returns the
/// cheapest (ties to the smaller id). `None` only for an empty set; when
/// no coin is beneficial the winner's result says skip.
pub fn ca_best_coin<'a>(
    coins: &'a [CACoin],
    penalty: Penalty,
) -> Option<(&'a CACoin, CaSingleTossResult)> {
    let mut best: Option<(&CACoin, CaSingleTossResult)> = None;
    for coin in coins {
        let result = ca_single_toss(coin, penalty);
        let replace = match &best {
            None => true,
            Some((incumbent, incumbent_result)) => {
                result.cost < incumbent_result.cost
                    || (result.cost == incumbent_result.cost && coin.id() < incumbent.id())
            }
        };
        if replace {
            best = Some((coin, result));
        }
    }
    best
}
