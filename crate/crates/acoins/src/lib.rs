//! Solvers for adjustable-coin games.
//!
//! A player holds a collection of probabilistic actions ("coins"), each
//! with a success probability and a fee per attempt, and faces a penalty
//! `E` for giving up without a success. Every game variant asks the same
//! question — which coins to toss, in what order, at which setting — to
//! minimize the expected amount paid.
//!
//! The crate is organised around the coin shapes and the rules of play:
//!
//! * [`coin`] — domain types and the single-toss cost/benefit algebra,
//!   including efficiency pruning of discrete menus.
//! * [`simple`] — optimal play for sets and sequences of simple coins:
//!   given-order backward induction, reusable (bounded and unbounded)
//!   play, rate-ordered one-time play, and the bounded one-time dynamic
//!   program.
//! * [`discrete`] — strategies for menus: reusable play over the menu
//!   union, given-order induction, exact one-time selection by
//!   enumeration, the rate-{0,1} cost algebra, and the subset-product
//!   instance generator that makes the selection problem hard.
//! * [`continuous`] — single-toss and reusable play for smoothly
//!   adjustable coins with convex cost curves.
//! * [`verify`] — Monte Carlo plan execution and brute-force oracles that
//!   independently confirm the solvers at small sizes.

pub mod coin;
pub mod continuous;
pub mod discrete;
pub mod simple;
pub mod verify;

pub use coin::{
    best_coin_against, best_coin_for_penalty, CACoin, CoinId, CostFamily, DiscreteCoin, Error,
    Penalty, RegularityReport, RegularityViolation, Result, SimpleCoin, TossPlan, TossStep,
    ZeroOneInstance,
};
