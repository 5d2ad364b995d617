//! Stochastic attacker/administrator security game.
//!
//! The crate models a two-player general-sum stochastic game in which each
//! player perceives the true state through an erroneous sensor. It provides:
//!
//! - [`game`]: the game tuple, information sets, extended action sets and the
//!   disallowed-action substitution rule, plus validation of game files;
//! - [`fixture`]: the canonical five-state administrator/user game;
//! - [`sensor`]: state perception from sensor readings via RMS distances;
//! - [`reward`]: three-axis reward vectors collapsed through a Gram matrix;
//! - [`engine`]: seeded Monte Carlo execution with discounted returns;
//! - [`strategy`]: aggression-graded strategies, skill profiles, grid sweeps
//!   and ε-neighborhood optimal strategy profile search;
//! - [`iif`]: occurrence ratios and the imperfect information factor;
//! - [`coop`]: coalition and collective-response predicates;
//! - [`ploy`]: the honeypot offer planner;
//! - [`cli`]: command implementations behind the `secgame` binary.

pub mod cli;
pub mod coop;
pub mod engine;
pub mod error;
pub mod fixture;
pub mod game;
pub mod iif;
pub mod io;
pub mod ploy;
pub mod reward;
pub mod sensor;
pub mod strategy;

pub use error::{Error, Result};
pub use game::{ActionId, Game, GameSpec, Player, StateId};

/// Absolute tolerance used when checking that a distribution sums to one.
pub const PROB_TOLERANCE: f64 = 1e-9;
