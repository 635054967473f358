//! Toolkit for steering play in games an outside party does not control.
//!
//! Given a finite strategic-form game, the library computes the cheapest
//! non-negative monetary promises that make elimination of weakly dominated
//! strategies land inside a desired outcome set, and it constructs and
//! re-verifies the corresponding payment schemes. Around that core it
//! provides:
//!
//! - [`game`] — exact-rational games, dominance structure, pure/mixed/
//!   correlated equilibrium checks, payment overlays;
//! - [`pricing`] — the closed-form price of a single target profile, scheme
//!   construction and verification, and a grid-search oracle for small
//!   target-set instances;
//! - [`sat`] — the CNF-to-game reduction showing set pricing is hard, with
//!   the per-assignment candidate schemes;
//! - [`exact`] — the polynomial perturbation algorithm for two-player
//!   rectangular targets where the surviving set must equal the target;
//! - [`device`] — signal-based implementation devices: zero-cost mediation
//!   of mixed and correlated equilibria, dominance checks, seeded simulation;
//! - [`info`] — prior-free incomplete-information games, ex-post equilibrium
//!   checks, and feasibility of signal-independent payments;
//! - [`auction`] — package auctions under efficient allocation with
//!   displacement transfers, bundle projections, frugality, and conformance
//!   bonus rules;
//! - [`formats`] / [`cli`] — file formats, fixtures, and the command-line
//!   surface.
//!
//! All payoff arithmetic is exact ([`rat::Rat`]); nothing in the dominance
//! or equilibrium logic touches floating point.

pub mod auction;
pub mod cli;
pub mod device;
pub mod exact;
pub mod formats;
pub mod game;
pub mod info;
mod lp;
pub mod pricing;
pub mod rat;
pub mod sat;

pub use game::{Game, GameError, MixedProfile, OutcomeDistribution, PaymentScheme, Profile};
pub use rat::{rat, ratio, Rat};
