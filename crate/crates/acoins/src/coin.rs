//! Core domain types for adjustable-coin games.
//!
//! An adjustable coin is an action with a menu of (success probability,
//! fee) options. The player tosses coins one at a time, paying the fee of
//! each toss; the game ends on the first success, or when the player gives
//! up and pays the penalty `E`. Three coin shapes are supported:
//!
//! * [`SimpleCoin`] — a single `(p, fee)` pair,
//! * [`DiscreteCoin`] — a finite menu of simple coins under one identity,
//! * [`CACoin`] — a continuum of options given by a smooth convex cost
//!   function `μ(P)` on a probability window.
//!
//! The elementary cost algebra lives here: a single toss of `(p, fee)`
//! against penalty `E` costs `fee + (1 − p)·E` in expectation, so the toss
//! is worth taking exactly when the coin's *rate* `fee / p` is below `E`.

use std::fmt;

use thiserror::Error;

/// Errors raised while constructing game objects or refusing oversized
/// enumerations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("success probability must lie in (0, 1], got {0}")]
    InvalidProbability(f64),
    #[error("fee must be finite and nonnegative, got {0}")]
    InvalidFee(f64),
    #[error("penalty must be finite and positive, got {0}")]
    InvalidPenalty(f64),
    #[error("penalty excess must be finite and positive, got {0}")]
    InvalidPenaltyExcess(f64),
    #[error("discrete coin `{0}` has no entries")]
    EmptyMenu(CoinId),
    #[error("discrete coin `{id}` lists success probability {p} twice")]
    DuplicateProbability { id: CoinId, p: f64 },
    #[error("probability window must satisfy 0 < p_min < p_max <= 1, got [{p_min}, {p_max}]")]
    InvalidProbabilityWindow { p_min: f64, p_max: f64 },
    #[error("power cost family needs scale > 0 and exponent > 1, got scale={scale}, exponent={exponent}")]
    InvalidPowerFamily { scale: f64, exponent: f64 },
    #[error("polynomial cost family takes at most 5 finite coefficients")]
    InvalidPolynomialFamily,
    #[error("failure probabilities must satisfy 0 < ell < h < 1, got h={h}, ell={ell} at index {index}")]
    InvalidFailureProbabilities { index: usize, h: f64, ell: f64 },
    #[error("failure-probability vectors have mismatched lengths {h_len} and {ell_len}")]
    MismatchedVectors { h_len: usize, ell_len: usize },
    #[error("instance needs at least one coin")]
    EmptyInstance,
    #[error("enumeration would visit {size} candidates, above the cap of {cap}")]
    EnumerationTooLarge { size: u128, cap: u128 },
    #[error("this operation supports at most {max} coins, got {n}")]
    TooManyCoins { n: usize, max: usize },
    #[error("modulus must be at least 2, got {0}")]
    InvalidModulus(u64),
    #[error("product of the moduli overflows 128-bit integers")]
    ModulusOverflow,
    #[error("target must satisfy 1 <= target <= prod(m), got {target} with product {product}")]
    TargetOutOfRange { target: u128, product: u128 },
}

pub type Result<T> = std::result::Result<T, Error>;

/// Identifier of a coin within one game instance.
///
/// Ids are opaque strings; ordering (lexicographic) is used only to break
/// ties deterministically.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CoinId(String);

impl CoinId {
    pub fn new(id: impl Into<String>) -> Self {
        CoinId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for CoinId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for CoinId {
    fn from(s: &str) -> Self {
        CoinId(s.to_owned())
    }
}

impl From<String> for CoinId {
    fn from(s: String) -> Self {
        CoinId(s)
    }
}

/// The amount paid when the player gives up without a success.
///
/// Strictly positive by construction. Backward inductions thread plain
/// `f64` continuation values instead, since those may legitimately reach
/// zero (a free certain coin).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Penalty(f64);

impl Penalty {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value > 0.0 {
            Ok(Penalty(value))
        } else {
            Err(Error::InvalidPenalty(value))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// A coin with a single option: success probability `p` in (0, 1] for a
/// nonnegative `fee`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimpleCoin {
    id: CoinId,
    p: f64,
    fee: f64,
}

impl SimpleCoin {
    pub fn new(id: impl Into<CoinId>, p: f64, fee: f64) -> Result<Self> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::InvalidProbability(p));
        }
        if !(fee.is_finite() && fee >= 0.0) {
            return Err(Error::InvalidFee(fee));
        }
        Ok(SimpleCoin { id: id.into(), p, fee })
    }

    pub fn id(&self) -> &CoinId {
        &self.id
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn fee(&self) -> f64 {
        self.fee
    }

    /// `fee / p`: the expected cost of tossing this coin until it succeeds,
    /// and the ordering key for one-time games.
    pub fn rate(&self) -> f64 {
        self.fee / self.p
    }

    /// Expected cost of a single toss against an arbitrary continuation
    /// value: `fee + (1 − p)·continuation`.
    ///
    /// Backward inductions call this with suffix values that may be below
    /// any valid penalty.
    pub fn cost_against(&self, continuation: f64) -> f64 {
        self.fee + (1.0 - self.p) * continuation
    }

    /// Expected cost of a single toss when the alternative is paying the
    /// penalty.
    pub fn expected_cost(&self, penalty: Penalty) -> f64 {
        self.cost_against(penalty.value())
    }

    /// `p·E − fee`: how much a single toss saves relative to paying the
    /// penalty outright. Negative when the toss is not worth taking.
    pub fn benefit(&self, penalty: Penalty) -> f64 {
        self.p * penalty.value() - self.fee
    }

    /// A toss is beneficial exactly when the rate is strictly below the
    /// penalty; at `rate == E` the coin is skipped.
    pub fn is_beneficial(&self, penalty: Penalty) -> bool {
        self.rate() < penalty.value()
    }
}

/// Picks the coin whose single toss against `continuation` is cheapest.
///
/// Ties are broken toward the lower success probability, then the smaller
/// id. Returns `None` when no coin strictly beats the continuation value.
pub fn best_coin_against<'a>(coins: &'a [SimpleCoin], continuation: f64) -> Option<&'a SimpleCoin> {
    let mut best: Option<(&SimpleCoin, f64)> = None;
    for coin in coins {
        let cost = coin.cost_against(continuation);
        let replace = match best {
            None => true,
            Some((incumbent, incumbent_cost)) => {
                cost < incumbent_cost
                    || (cost == incumbent_cost
                        && (coin.p() < incumbent.p()
                            || (coin.p() == incumbent.p() && coin.id() < incumbent.id())))
            }
        };
        if replace {
            best = Some((coin, cost));
        }
    }
    best.and_then(|(coin, cost)| (cost < continuation).then_some(coin))
}

/// Picks the coin minimizing the single-toss expected cost, provided that
/// minimum beats paying the penalty.
pub fn best_coin_for_penalty<'a>(coins: &'a [SimpleCoin], penalty: Penalty) -> Option<&'a SimpleCoin> {
    best_coin_against(coins, penalty.value())
}

/// A finite menu of simple coins sharing one identity. At most one entry
/// may be tossed per coin in one-time games.
///
/// Entries are kept sorted by increasing success probability and must have
/// pairwise distinct probabilities. A single-entry menu is permitted, so a
/// simple coin can be handled through the same interface.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteCoin {
    id: CoinId,
    entries: Vec<SimpleCoin>,
}

impl DiscreteCoin {
    /// Builds a menu from `(p, fee)` pairs. Each entry inherits the menu id.
    pub fn new(id: impl Into<CoinId>, entries: &[(f64, f64)]) -> Result<Self> {
        let id = id.into();
        if entries.is_empty() {
            return Err(Error::EmptyMenu(id));
        }
        let mut coins = entries
            .iter()
            .map(|&(p, fee)| SimpleCoin::new(id.clone(), p, fee))
            .collect::<Result<Vec<_>>>()?;
        coins.sort_by(|a, b| a.p().total_cmp(&b.p()));
        for pair in coins.windows(2) {
            if pair[0].p() == pair[1].p() {
                return Err(Error::DuplicateProbability { id, p: pair[0].p() });
            }
        }
        Ok(DiscreteCoin { id, entries: coins })
    }

    pub fn id(&self) -> &CoinId {
        &self.id
    }

    /// Entries sorted by increasing success probability.
    pub fn entries(&self) -> &[SimpleCoin] {
        &self.entries
    }

    /// Cheapest single toss from the menu against a continuation value,
    /// together with the achieving entry (lowest probability on ties).
    pub fn cost_against(&self, continuation: f64) -> (f64, &SimpleCoin) {
        let mut best = &self.entries[0];
        let mut best_cost = best.cost_against(continuation);
        for entry in &self.entries[1..] {
            let cost = entry.cost_against(continuation);
            if cost < best_cost {
                best = entry;
                best_cost = cost;
            }
        }
        (best_cost, best)
    }

    /// Cheapest single toss from the menu when the alternative is the
    /// penalty.
    pub fn cost(&self, penalty: Penalty) -> (f64, &SimpleCoin) {
        self.cost_against(penalty.value())
    }

    /// Drops every entry that is not uniquely optimal for some penalty it
    /// is also worth tossing at.
    ///
    /// An entry is kept iff it is a vertex of the strict lower convex hull
    /// of the `(p, fee)` point set whose supporting slopes include a value
    /// above the entry's own rate (a supporting line of slope `E` below all
    /// other entries, with the toss also beating the penalty `E` itself).
    /// The surviving menu has fees strictly convex in `p` and rates
    /// strictly increasing. For every penalty the game value
    /// `min(E, cost)` is unchanged, and whenever the raw minimum is a
    /// genuine toss (cost below `E`) that minimum and its entry survive;
    /// an entry that wins only at penalties it cannot beat may be dropped.
    pub fn prune_to_efficient(&self) -> DiscreteCoin {
        if self.entries.len() <= 1 {
            return self.clone();
        }
        // Strict lower hull over the p-sorted entries; collinear middle
        // points are never uniquely optimal, so they are popped too.
        let pts = &self.entries;
        let mut hull: Vec<usize> = Vec::with_capacity(pts.len());
        for i in 0..pts.len() {
            while hull.len() >= 2 {
                let a = &pts[hull[hull.len() - 2]];
                let b = &pts[hull[hull.len() - 1]];
                let c = &pts[i];
                let cross = (b.p() - a.p()) * (c.fee() - b.fee())
                    - (c.p() - b.p()) * (b.fee() - a.fee());
                if cross <= 0.0 {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(i);
        }
        // A vertex is essential iff its outgoing chord is steeper than its
        // rate; once that holds for one vertex it holds for all later ones,
        // so the failures form a prefix.
        let mut start = 0;
        while start + 1 < hull.len() {
            let v = &pts[hull[start]];
            let w = &pts[hull[start + 1]];
            let slope = (w.fee() - v.fee()) / (w.p() - v.p());
            if slope <= v.rate() {
                start += 1;
            } else {
                break;
            }
        }
        DiscreteCoin {
            id: self.id.clone(),
            entries: hull[start..].iter().map(|&i| pts[i].clone()).collect(),
        }
    }
}

/// The cost function of a continuously adjustable coin.
#[derive(Debug, Clone, PartialEq)]
pub enum CostFamily {
    /// `μ(P) = scale · P^exponent` with `scale > 0`, `exponent > 1`.
    Power { scale: f64, exponent: f64 },
    /// `μ(P) = c0 + c1·P + c2·P² + c3·P³ + c4·P⁴`.
    Polynomial { coeffs: [f64; 5] },
}

impl CostFamily {
    /// Builds a polynomial family from up to five coefficients (constant
    /// term first); missing high-order coefficients default to zero.
    pub fn polynomial(coeffs: &[f64]) -> Result<Self> {
        if coeffs.len() > 5 || coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidPolynomialFamily);
        }
        let mut full = [0.0; 5];
        full[..coeffs.len()].copy_from_slice(coeffs);
        Ok(CostFamily::Polynomial { coeffs: full })
    }
}

/// A continuously adjustable coin: a smooth cost `μ(P)` over the window
/// `[p_min, p_max]`, with analytic first and second derivatives.
///
/// Construction checks only the window and family parameters; the sign
/// conditions `μ' > 0`, `μ'' > 0` that the single-toss optimizer relies on
/// are checked numerically by [`CACoin::validate_regular`].
#[derive(Debug, Clone, PartialEq)]
pub struct CACoin {
    id: CoinId,
    p_min: f64,
    p_max: f64,
    family: CostFamily,
}

impl CACoin {
    pub fn new(id: impl Into<CoinId>, p_min: f64, p_max: f64, family: CostFamily) -> Result<Self> {
        if !(p_min > 0.0 && p_min < p_max && p_max <= 1.0) {
            return Err(Error::InvalidProbabilityWindow { p_min, p_max });
        }
        match family {
            CostFamily::Power { scale, exponent } => {
                if !(scale > 0.0 && scale.is_finite() && exponent > 1.0 && exponent.is_finite()) {
                    return Err(Error::InvalidPowerFamily { scale, exponent });
                }
            }
            CostFamily::Polynomial { coeffs } => {
                if coeffs.iter().any(|c| !c.is_finite()) {
                    return Err(Error::InvalidPolynomialFamily);
                }
            }
        }
        Ok(CACoin { id: id.into(), p_min, p_max, family })
    }

    pub fn id(&self) -> &CoinId {
        &self.id
    }

    pub fn p_min(&self) -> f64 {
        self.p_min
    }

    pub fn p_max(&self) -> f64 {
        self.p_max
    }

    pub fn family(&self) -> &CostFamily {
        &self.family
    }

    /// `μ(P)`.
    pub fn cost(&self, p: f64) -> f64 {
        match &self.family {
            CostFamily::Power { scale, exponent } => scale * p.powf(*exponent),
            CostFamily::Polynomial { coeffs } => {
                coeffs.iter().rev().fold(0.0, |acc, c| acc * p + c)
            }
        }
    }

    /// `dμ/dP`.
    pub fn cost_slope(&self, p: f64) -> f64 {
        match &self.family {
            CostFamily::Power { scale, exponent } => scale * exponent * p.powf(exponent - 1.0),
            CostFamily::Polynomial { coeffs } => {
                let [_, c1, c2, c3, c4] = coeffs;
                c1 + p * (2.0 * c2 + p * (3.0 * c3 + p * 4.0 * c4))
            }
        }
    }

    /// `d²μ/dP²`.
    pub fn cost_curvature(&self, p: f64) -> f64 {
        match &self.family {
            CostFamily::Power { scale, exponent } => {
                scale * exponent * (exponent - 1.0) * p.powf(exponent - 2.0)
            }
            CostFamily::Polynomial { coeffs } => {
                let [_, _, c2, c3, c4] = coeffs;
                2.0 * c2 + p * (6.0 * c3 + p * 12.0 * c4)
            }
        }
    }

    /// `r(P) = μ(P) / P`.
    pub fn rate(&self, p: f64) -> f64 {
        self.cost(p) / p
    }

    /// Checks `μ ≥ 0`, `μ' > 0`, and `μ'' > 0` on a uniform grid over the
    /// window, and cross-checks the analytic slope against central finite
    /// differences with step `1e-6·(p_max − p_min)` at relative tolerance
    /// `1e-4`.
    ///
    /// `grid_size` must be at least 3.
    pub fn validate_regular(&self, grid_size: usize) -> RegularityReport {
        assert!(grid_size >= 3, "regularity grid needs at least 3 points");
        let span = self.p_max - self.p_min;
        let fd_step = 1e-6 * span;
        let mut violations = Vec::new();
        let mut max_slope_mismatch: f64 = 0.0;
        for k in 0..grid_size {
            let t = k as f64 / (grid_size - 1) as f64;
            let p = self.p_min + t * span;
            let cost = self.cost(p);
            let slope = self.cost_slope(p);
            let curvature = self.cost_curvature(p);
            if !(cost.is_finite() && slope.is_finite() && curvature.is_finite()) {
                violations.push(RegularityViolation::NonFinite { p });
                continue;
            }
            if cost < 0.0 {
                violations.push(RegularityViolation::NegativeCost { p, cost });
            }
            if slope <= 0.0 {
                violations.push(RegularityViolation::NonPositiveSlope { p, slope });
            }
            if curvature <= 0.0 {
                violations.push(RegularityViolation::NonPositiveCurvature { p, curvature });
            }
            let numeric = (self.cost(p + fd_step) - self.cost(p - fd_step)) / (2.0 * fd_step);
            let mismatch = (slope - numeric).abs() / slope.abs().max(1.0);
            max_slope_mismatch = max_slope_mismatch.max(mismatch);
            if mismatch > 1e-4 {
                violations.push(RegularityViolation::SlopeMismatch { p, analytic: slope, numeric });
            }
        }
        RegularityReport { grid_size, violations, max_slope_mismatch }
    }
}

/// One offending grid point found by [`CACoin::validate_regular`].
#[derive(Debug, Clone, PartialEq)]
pub enum RegularityViolation {
    NonFinite { p: f64 },
    NegativeCost { p: f64, cost: f64 },
    NonPositiveSlope { p: f64, slope: f64 },
    NonPositiveCurvature { p: f64, curvature: f64 },
    SlopeMismatch { p: f64, analytic: f64, numeric: f64 },
}

impl fmt::Display for RegularityViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RegularityViolation::NonFinite { p } => write!(f, "non-finite value at P={p}"),
            RegularityViolation::NegativeCost { p, cost } => {
                write!(f, "negative cost {cost} at P={p}")
            }
            RegularityViolation::NonPositiveSlope { p, slope } => {
                write!(f, "slope {slope} not strictly positive at P={p}")
            }
            RegularityViolation::NonPositiveCurvature { p, curvature } => {
                write!(f, "curvature {curvature} not strictly positive at P={p}")
            }
            RegularityViolation::SlopeMismatch { p, analytic, numeric } => {
                write!(f, "analytic slope {analytic} disagrees with finite difference {numeric} at P={p}")
            }
        }
    }
}

/// Outcome of the numeric regularity check on a [`CACoin`].
#[derive(Debug, Clone, PartialEq)]
pub struct RegularityReport {
    pub grid_size: usize,
    pub violations: Vec<RegularityViolation>,
    /// Worst relative gap between the analytic slope and the central
    /// finite-difference estimate across the grid.
    pub max_slope_mismatch: f64,
}

impl RegularityReport {
    pub fn is_regular(&self) -> bool {
        self.violations.is_empty()
    }
}

/// A restricted instance made of two-entry menus where one entry has rate 0
/// and the other rate 1.
///
/// Coin `i` offers a free entry with success probability `1 − h_i` and a
/// rate-one entry with success probability `1 − ell_i`, with
/// `0 < ell_i < h_i < 1`. The game's penalty is `d + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroOneInstance {
    h: Vec<f64>,
    ell: Vec<f64>,
    d: f64,
}

impl ZeroOneInstance {
    pub fn new(h: Vec<f64>, ell: Vec<f64>, d: f64) -> Result<Self> {
        if h.len() != ell.len() {
            return Err(Error::MismatchedVectors { h_len: h.len(), ell_len: ell.len() });
        }
        if h.is_empty() {
            return Err(Error::EmptyInstance);
        }
        if !(d.is_finite() && d > 0.0) {
            return Err(Error::InvalidPenaltyExcess(d));
        }
        for (index, (&hi, &li)) in h.iter().zip(&ell).enumerate() {
            if !(0.0 < li && li < hi && hi < 1.0) {
                return Err(Error::InvalidFailureProbabilities { index, h: hi, ell: li });
            }
        }
        Ok(ZeroOneInstance { h, ell, d })
    }

    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }

    /// Failure probabilities of the rate-0 entries.
    pub fn h(&self) -> &[f64] {
        &self.h
    }

    /// Failure probabilities of the rate-1 entries.
    pub fn ell(&self) -> &[f64] {
        &self.ell
    }

    /// Penalty in excess of one.
    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn penalty(&self) -> Penalty {
        Penalty::new(self.d + 1.0).expect("d > 0 implies a valid penalty")
    }

    /// `b_i = ell_i / h_i`, always below one.
    pub fn failure_ratio(&self, i: usize) -> f64 {
        self.ell[i] / self.h[i]
    }

    /// Whether `ell_i = h_i²` holds (within 1e-12 relative), the shape the
    /// subset-product reduction produces.
    pub fn is_square_law(&self) -> bool {
        self.h.iter().zip(&self.ell).all(|(&h, &l)| {
            (l - h * h).abs() <= 1e-12 * (h * h).max(l)
        })
    }

    /// The explicit two-entry menus: coin `Ai` offers `(1 − h_i, 0)` and
    /// `(1 − ell_i, 1 − ell_i)`.
    pub fn coins(&self) -> Vec<DiscreteCoin> {
        self.h
            .iter()
            .zip(&self.ell)
            .enumerate()
            .map(|(i, (&h, &l))| {
                let p_free = 1.0 - h;
                let p_unit = 1.0 - l;
                DiscreteCoin::new(format!("A{}", i + 1), &[(p_free, 0.0), (p_unit, p_unit)])
                    .expect("0 < ell < h < 1 yields a valid menu")
            })
            .collect()
    }
}

/// One planned toss: which coin, at which probability and fee, and whether
/// the toss repeats until success (reusable unbounded play).
#[derive(Debug, Clone, PartialEq)]
pub struct TossStep {
    pub coin: CoinId,
    pub p: f64,
    pub fee: f64,
    pub repeat: bool,
}

/// A strategy artifact: an ordered toss schedule with stop-on-success
/// semantics, ending in the penalty if every toss fails, and carrying its
/// analytic expected cost.
///
/// The expected cost never exceeds the penalty it was solved against; the
/// empty plan costs exactly the penalty.
#[derive(Debug, Clone, PartialEq)]
pub struct TossPlan {
    steps: Vec<TossStep>,
    expected_cost: f64,
}

impl TossPlan {
    pub fn new(steps: Vec<TossStep>, expected_cost: f64) -> Self {
        TossPlan { steps, expected_cost }
    }

    /// The do-nothing plan: pay the penalty.
    pub fn empty(penalty: Penalty) -> Self {
        TossPlan { steps: Vec::new(), expected_cost: penalty.value() }
    }

    pub fn steps(&self) -> &[TossStep] {
        &self.steps
    }

    pub fn expected_cost(&self) -> f64 {
        self.expected_cost
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn penalty(v: f64) -> Penalty {
        Penalty::new(v).unwrap()
    }

    fn coin(id: &str, p: f64, fee: f64) -> SimpleCoin {
        SimpleCoin::new(id, p, fee).unwrap()
    }

    #[test]
    fn rate_examples() {
        assert_eq!(coin("a", 0.5, 1.0).rate(), 2.0);
        assert_eq!(coin("a", 1.0, 3.0).rate(), 3.0);
        assert_eq!(coin("a", 0.25, 0.0).rate(), 0.0);
    }

    #[test]
    fn single_toss_cost_examples() {
        assert_eq!(coin("a", 0.5, 1.0).expected_cost(penalty(4.0)), 3.0);
        assert_eq!(coin("a", 1.0, 2.5).expected_cost(penalty(17.0)), 2.5);
        // A coin whose rate equals the penalty costs exactly the penalty.
        let c = coin("a", 0.4, 0.4 * 6.0);
        assert!((c.expected_cost(penalty(6.0)) - 6.0).abs() < 1e-12);
    }

    #[test]
    fn benefit_examples() {
        assert_eq!(coin("a", 0.5, 1.0).benefit(penalty(4.0)), 1.0);
        let at_rate = coin("a", 0.3, 0.3 * 5.0);
        assert!(at_rate.benefit(penalty(5.0)).abs() < 1e-12);
        assert_eq!(coin("a", 0.1, 2.0).benefit(penalty(10.0)), -1.0);
    }

    #[test]
    fn beneficial_is_strict() {
        assert!(coin("a", 0.5, 1.0).is_beneficial(penalty(4.0))); // rate 2
        assert!(!coin("a", 0.5, 2.0).is_beneficial(penalty(4.0))); // rate 4: skip
        assert!(coin("a", 0.5, 0.0).is_beneficial(penalty(0.001))); // rate 0
    }

    #[test]
    fn cost_plus_benefit_is_penalty() {
        let c = coin("a", 0.37, 1.9);
        let e = penalty(7.3);
        assert!((c.expected_cost(e) + c.benefit(e) - e.value()).abs() <= 1e-12 * e.value());
    }

    #[test]
    fn best_coin_picks_max_benefit() {
        let coins = vec![coin("a", 0.9, 0.5), coin("b", 0.5, 0.5)];
        let best = best_coin_for_penalty(&coins, penalty(10.0)).unwrap();
        assert_eq!(best.id().as_str(), "a");
        assert!((best.expected_cost(penalty(10.0)) - 1.5).abs() < 1e-12);
    }

    #[test]
    fn best_coin_absent_when_nothing_beats_penalty() {
        let coins = vec![coin("a", 0.5, 2.0), coin("b", 0.25, 1.0)]; // rates 4, 4
        assert!(best_coin_for_penalty(&coins, penalty(4.0)).is_none());
        assert!(best_coin_for_penalty(&coins, penalty(4.5)).is_some());
    }

    #[test]
    fn best_coin_single_beneficial() {
        let coins = vec![coin("only", 0.5, 1.0)];
        assert_eq!(best_coin_for_penalty(&coins, penalty(3.0)).unwrap().id().as_str(), "only");
    }

    #[test]
    fn best_coin_tie_prefers_lower_probability_then_id() {
        // Equal costs at E = 10: (0.5, 1) -> 6 and (0.7, 3) -> 6.
        let coins = vec![coin("z", 0.7, 3.0), coin("a", 0.5, 1.0)];
        assert_eq!(best_coin_for_penalty(&coins, penalty(10.0)).unwrap().id().as_str(), "a");
        // Same probability and cost: id decides.
        let coins = vec![coin("b", 0.5, 1.0), coin("a", 0.5, 1.0)];
        assert_eq!(best_coin_for_penalty(&coins, penalty(10.0)).unwrap().id().as_str(), "a");
    }

    #[test]
    fn simple_coin_validation() {
        assert!(SimpleCoin::new("a", 0.0, 1.0).is_err());
        assert!(SimpleCoin::new("a", 1.1, 1.0).is_err());
        assert!(SimpleCoin::new("a", f64::NAN, 1.0).is_err());
        assert!(SimpleCoin::new("a", 0.5, -0.1).is_err());
        assert!(SimpleCoin::new("a", 0.5, f64::INFINITY).is_err());
        assert!(Penalty::new(0.0).is_err());
        assert!(Penalty::new(-1.0).is_err());
        assert!(Penalty::new(f64::NAN).is_err());
    }

    /// Independent essentiality check by penalty search: entry `i` is
    /// essential iff some `E` on a fine sweep makes it strictly cheapest
    /// among the entries while also beating the penalty itself.
    fn essential_by_sweep(entries: &[(f64, f64)]) -> Vec<bool> {
        let mut essential = vec![false; entries.len()];
        // Sweep penalties across and beyond every pairwise crossover.
        let mut grid = Vec::new();
        for i in 0..entries.len() {
            for j in 0..entries.len() {
                if i == j {
                    continue;
                }
                let (pi, fi) = entries[i];
                let (pj, fj) = entries[j];
                if pi != pj {
                    let cross = (fj - fi) / (pj - pi);
                    if cross > 0.0 {
                        grid.push(cross * 0.999);
                        grid.push(cross * 1.001);
                    }
                }
            }
            grid.push(entries[i].1 / entries[i].0 + 1e-6); // just above each rate
        }
        grid.push(1e-6);
        grid.push(1e6);
        for &e in &grid {
            if e <= 0.0 {
                continue;
            }
            let costs: Vec<f64> = entries.iter().map(|&(p, f)| f + (1.0 - p) * e).collect();
            let mut best = 0;
            for k in 1..costs.len() {
                if costs[k] < costs[best] {
                    best = k;
                }
            }
            let unique = costs.iter().enumerate().all(|(k, &c)| k == best || c > costs[best]);
            if unique && costs[best] < e {
                essential[best] = true;
            }
        }
        essential
    }

    #[test]
    fn prune_keeps_all_when_menu_is_efficient() {
        let d = DiscreteCoin::new("d", &[(0.5, 1.0), (0.7, 2.0), (0.9, 10.0)]).unwrap();
        let pruned = d.prune_to_efficient();
        assert_eq!(pruned.entries().len(), 3);
        assert_eq!(essential_by_sweep(&[(0.5, 1.0), (0.7, 2.0), (0.9, 10.0)]), vec![true; 3]);
    }

    #[test]
    fn prune_drops_non_convex_entry() {
        let d = DiscreteCoin::new("d", &[(0.5, 1.0), (0.7, 6.0), (0.9, 10.0)]).unwrap();
        let pruned = d.prune_to_efficient();
        let kept: Vec<f64> = pruned.entries().iter().map(|c| c.p()).collect();
        assert_eq!(kept, vec![0.5, 0.9]);
        assert_eq!(
            essential_by_sweep(&[(0.5, 1.0), (0.7, 6.0), (0.9, 10.0)]),
            vec![true, false, true]
        );
    }

    #[test]
    fn prune_single_entry_unchanged() {
        let d = DiscreteCoin::new("d", &[(0.4, 2.0)]).unwrap();
        assert_eq!(d.prune_to_efficient(), d);
    }

    #[test]
    fn prune_drops_low_probability_entry_with_flat_chord() {
        // The chord from (0.5, 1) to (0.9, 1.1) has slope 0.25 < rate 2, so
        // the first entry never beats both the second entry and the penalty.
        let d = DiscreteCoin::new("d", &[(0.5, 1.0), (0.9, 1.1)]).unwrap();
        let pruned = d.prune_to_efficient();
        let kept: Vec<f64> = pruned.entries().iter().map(|c| c.p()).collect();
        assert_eq!(kept, vec![0.9]);
        assert_eq!(essential_by_sweep(&[(0.5, 1.0), (0.9, 1.1)]), vec![false, true]);
        // The dropped entry is the raw minimum at small penalties, but only
        // where its cost exceeds the penalty; the game value is intact.
        for e in [0.05, 0.125, 0.25, 0.5, 2.0, 10.0] {
            let e = Penalty::new(e).unwrap();
            let raw = d.cost(e).0;
            let kept = pruned.cost(e).0;
            assert_eq!(raw.min(e.value()), kept.min(e.value()));
            if raw < e.value() {
                assert_eq!(raw, kept);
            }
        }
    }

    #[test]
    fn discrete_cost_examples() {
        let d = DiscreteCoin::new("d", &[(0.5, 1.0), (0.7, 2.0), (0.9, 10.0)]).unwrap();
        // Single-toss costs at E = 10 are 6, 5, 11.
        let (cost, entry) = d.cost(Penalty::new(10.0).unwrap());
        assert!((cost - 5.0).abs() < 1e-12);
        assert_eq!(entry.p(), 0.7);
        // At E = 3 the costs are 2.5, 2.9, 10.3.
        let (cost, entry) = d.cost(Penalty::new(3.0).unwrap());
        assert!((cost - 2.5).abs() < 1e-12);
        assert_eq!(entry.p(), 0.5);
        // Single entry: plain single-toss formula.
        let single = DiscreteCoin::new("s", &[(0.5, 1.0)]).unwrap();
        assert_eq!(single.cost(Penalty::new(4.0).unwrap()).0, 3.0);
    }

    #[test]
    fn discrete_validation() {
        assert!(DiscreteCoin::new("d", &[]).is_err());
        assert!(DiscreteCoin::new("d", &[(0.5, 1.0), (0.5, 2.0)]).is_err());
        let d = DiscreteCoin::new("d", &[(0.9, 3.0), (0.2, 1.0)]).unwrap();
        assert_eq!(d.entries()[0].p(), 0.2); // sorted on construction
    }

    #[test]
    fn regular_power_family_validates() {
        let ca = CACoin::new("c", 0.1, 0.9, CostFamily::Power { scale: 1.0, exponent: 2.0 }).unwrap();
        let report = ca.validate_regular(101);
        assert!(report.is_regular(), "{:?}", report.violations);
        assert!(report.max_slope_mismatch <= 1e-4);
    }

    #[test]
    fn decreasing_polynomial_is_rejected() {
        let ca = CACoin::new("c", 0.1, 0.9, CostFamily::polynomial(&[0.0, -1.0]).unwrap()).unwrap();
        let report = ca.validate_regular(11);
        assert!(!report.is_regular());
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, RegularityViolation::NonPositiveSlope { .. })));
    }

    #[test]
    fn linear_polynomial_is_rejected_for_zero_curvature() {
        let ca = CACoin::new("c", 0.1, 0.9, CostFamily::polynomial(&[0.0, 1.0]).unwrap()).unwrap();
        let report = ca.validate_regular(11);
        assert!(!report.is_regular());
        assert!(report
            .violations
            .iter()
            .all(|v| matches!(v, RegularityViolation::NonPositiveCurvature { .. })));
    }

    #[test]
    fn ca_validation_rejects_bad_windows_and_params() {
        let fam = CostFamily::Power { scale: 1.0, exponent: 2.0 };
        assert!(CACoin::new("c", 0.0, 0.9, fam.clone()).is_err());
        assert!(CACoin::new("c", 0.9, 0.9, fam.clone()).is_err());
        assert!(CACoin::new("c", 0.1, 1.1, fam).is_err());
        assert!(CACoin::new("c", 0.1, 0.9, CostFamily::Power { scale: 0.0, exponent: 2.0 }).is_err());
        assert!(CACoin::new("c", 0.1, 0.9, CostFamily::Power { scale: 1.0, exponent: 1.0 }).is_err());
        assert!(CostFamily::polynomial(&[0.0; 6]).is_err());
    }

    #[test]
    fn zero_one_instance_accessors() {
        let inst = ZeroOneInstance::new(
            vec![0.5, 1.0 / 3.0, 1.0 / 6.0],
            vec![0.25, 1.0 / 9.0, 1.0 / 36.0],
            36.0,
        )
        .unwrap();
        assert_eq!(inst.len(), 3);
        assert_eq!(inst.penalty().value(), 37.0);
        assert!(inst.is_square_law());
        assert!((inst.failure_ratio(0) - 0.5).abs() < 1e-15);
        let coins = inst.coins();
        assert_eq!(coins.len(), 3);
        let a1 = &coins[0];
        assert_eq!(a1.entries()[0].p(), 0.5);
        assert_eq!(a1.entries()[0].fee(), 0.0);
        assert_eq!(a1.entries()[1].p(), 0.75);
        assert_eq!(a1.entries()[1].fee(), 0.75);
    }

    #[test]
    fn zero_one_instance_validation() {
        assert!(ZeroOneInstance::new(vec![0.5], vec![0.5], 1.0).is_err()); // ell == h
        assert!(ZeroOneInstance::new(vec![0.5], vec![0.6], 1.0).is_err()); // ell > h
        assert!(ZeroOneInstance::new(vec![1.0], vec![0.5], 1.0).is_err()); // h == 1
        assert!(ZeroOneInstance::new(vec![0.5], vec![0.25], 0.0).is_err()); // d == 0
        assert!(ZeroOneInstance::new(vec![], vec![], 1.0).is_err());
        assert!(ZeroOneInstance::new(vec![0.5, 0.4], vec![0.25], 1.0).is_err());
        let not_square = ZeroOneInstance::new(vec![0.5], vec![0.2], 1.0).unwrap();
        assert!(!not_square.is_square_law());
    }

    #[test]
    fn empty_plan_costs_penalty() {
        let plan = TossPlan::empty(penalty(3.5));
        assert!(plan.steps().is_empty());
        assert_eq!(plan.expected_cost(), 3.5);
    }
}
