//! Occurrence ratios, perceived ratios and the Imperfect Information Factor.
//!
//! With occurrence ratios `r` and a row-stochastic error matrix `E`
//! (`E[j][i]` = probability of perceiving `i` when the truth is `j`):
//!
//! - perceived ratios `r′_i = Σ_j E[j][i]·r_j`;
//! - IIF `z_ij = E[j][i]·r_j / r′_i`, the posterior probability that the
//!   truth is `j` given that `i` is perceived.
//!
//! Occurrence ratios are the long-run visiting frequencies from a start
//! state, `lim (1/m) Σ_{t≤m} e_s·P^t`. They are computed by iterating the
//! lazy chain `(I + P)/2`, which has the same limit (including for periodic
//! `P`) and converges geometrically, so a max-norm step below `tol` means
//! the residual `‖rP − r‖` is below `2·tol`.

use serde::Serialize;

use crate::engine::{MixedStrategy, StrategyProfile};
use crate::error::{Error, Result};
use crate::game::{ActionId, Game, Player, StateId};
use crate::PROB_TOLERANCE;

pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_MAX_ITER: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OccurrenceRatios {
    pub r: Vec<f64>,
    pub start: usize,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerceivedRatios {
    pub r_prime: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IifMatrix {
    /// Rows: perceived state. Columns: true state.
    pub z: Vec<Vec<f64>>,
    /// Rows whose perceived ratio is zero; these hold the identity row.
    pub flagged: Vec<bool>,
}

fn check_stochastic(name: &str, m: &[Vec<f64>], cols: usize) -> Result<()> {
    for (i, row) in m.iter().enumerate() {
        if row.len() != cols {
            return Err(Error::DimensionMismatch { expected: cols, actual: row.len() });
        }
        if row.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
            return Err(Error::invalid(format!("{name} row {i} has a negative or non-finite entry")));
        }
        let s: f64 = row.iter().sum();
        if (s - 1.0).abs() > PROB_TOLERANCE {
            return Err(Error::invalid(format!("{name} row {i} sums to {s}, not 1")));
        }
    }
    Ok(())
}

pub fn occurrence_ratios(p: &[Vec<f64>], start: usize, tol: f64, max_iter: usize) -> Result<OccurrenceRatios> {
    let n = p.len();
    if n == 0 {
        return Err(Error::invalid("transition matrix is empty"));
    }
    check_stochastic("transition matrix", p, n)?;
    if start >= n {
        return Err(Error::invalid(format!("start state {start} out of range for {n} states")));
    }
    if !(tol > 0.0) {
        return Err(Error::invalid(format!("tolerance {tol} must be positive")));
    }
    let mut r = vec![0.0; n];
    r[start] = 1.0;
    let mut next = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for it in 1..=max_iter {
        for (j, x) in next.iter_mut().enumerate() {
            *x = 0.5 * r[j];
        }
        for (i, row) in p.iter().enumerate() {
            let w = 0.5 * r[i];
            if w != 0.0 {
                for (x, &pij) in next.iter_mut().zip(row) {
                    *x += w * pij;
                }
            }
        }
        residual = r.iter().zip(&next).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        std::mem::swap(&mut r, &mut next);
        if residual < tol {
            let s: f64 = r.iter().sum();
            r.iter_mut().for_each(|x| *x /= s);
            return Ok(OccurrenceRatios { r, start, iterations: it });
        }
    }
    Err(Error::NotConverged { iterations: max_iter, residual })
}

pub fn perceived_ratios(error_rows: &[Vec<f64>], r: &[f64]) -> Result<PerceivedRatios> {
    let n = r.len();
    if error_rows.len() != n {
        return Err(Error::DimensionMismatch { expected: n, actual: error_rows.len() });
    }
    check_stochastic("error", error_rows, n)?;
    let mut r_prime = vec![0.0; n];
    for (row, &rj) in error_rows.iter().zip(r) {
        for (x, &e) in r_prime.iter_mut().zip(row) {
            *x += e * rj;
        }
    }
    Ok(PerceivedRatios { r_prime })
}

pub fn iif_matrix(error_rows: &[Vec<f64>], r: &[f64]) -> Result<IifMatrix> {
    let rp = perceived_ratios(error_rows, r)?.r_prime;
    let n = r.len();
    let mut z = vec![vec![0.0; n]; n];
    let mut flagged = vec![false; n];
    for i in 0..n {
        if rp[i] <= 0.0 {
            flagged[i] = true;
            z[i][i] = 1.0;
            continue;
        }
        for j in 0..n {
            z[i][j] = error_rows[j][i] * r[j] / rp[i];
        }
    }
    Ok(IifMatrix { z, flagged })
}

/// `π′ = z·π` for strategies already embedded in a shared coordinate space
/// (`pi[j]` is the distribution at true state `j`).
pub fn apply_iif(z: &IifMatrix, pi: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let n = z.z.len();
    if pi.len() != n {
        return Err(Error::DimensionMismatch { expected: n, actual: pi.len() });
    }
    let k = pi.first().map_or(0, Vec::len);
    if let Some(bad) = pi.iter().find(|row| row.len() != k) {
        return Err(Error::DimensionMismatch { expected: k, actual: bad.len() });
    }
    Ok(z
        .z
        .iter()
        .map(|zi| {
            let mut out = vec![0.0; k];
            for (&w, row) in zi.iter().zip(pi) {
                if w != 0.0 {
                    for (o, &x) in out.iter_mut().zip(row) {
                        *o += w * x;
                    }
                }
            }
            out
        })
        .collect())
}

/// Places each state's distribution in the coordinates of
/// `game.player_actions(player)`.
pub fn embed_strategy(game: &Game, player: Player, strategy: &MixedStrategy) -> Result<Vec<Vec<f64>>> {
    strategy.check(game, player)?;
    let all = game.player_actions(player);
    Ok(game
        .states()
        .map(|s| {
            let mut row = vec![0.0; all.len()];
            for (&id, &p) in game.allowed(player, s).iter().zip(&strategy.per_state[s.0]) {
                let pos = all.iter().position(|&a| a == id).expect("allowed action belongs to player");
                row[pos] = p;
            }
            row
        })
        .collect())
}

/// Distribution over effective actions at a true state, including sensing
/// and substitution of disallowed choices.
fn effective_distribution(game: &Game, player: Player, strategy: &MixedStrategy, truth: StateId) -> Result<Vec<(ActionId, f64)>> {
    let mut out: Vec<(ActionId, f64)> = Vec::new();
    for (t, &e) in game.error_row(player, truth).iter().enumerate() {
        if e == 0.0 {
            continue;
        }
        let perceived = StateId(t);
        for (&id, &p) in game.allowed(player, perceived).iter().zip(&strategy.per_state[t]) {
            if p == 0.0 {
                continue;
            }
            let eff = game.effective_action(player, truth, id)?;
            match out.iter_mut().find(|(a, _)| *a == eff) {
                Some((_, w)) => *w += e * p,
                None => out.push((eff, e * p)),
            }
        }
    }
    Ok(out)
}

/// Per-step state transition matrix under `profile`. Absorbing states
/// become self-loops.
pub fn marginal_transition_matrix(game: &Game, profile: &StrategyProfile) -> Result<Vec<Vec<f64>>> {
    profile.check(game)?;
    let n = game.num_states();
    let mut p = vec![vec![0.0; n]; n];
    for s in game.states() {
        if game.is_absorbing(s) {
            p[s.0][s.0] = 1.0;
            continue;
        }
        let da = effective_distribution(game, Player::Admin, &profile.admin, s)?;
        let du = effective_distribution(game, Player::User, &profile.user, s)?;
        for &(a, wa) in &da {
            for &(u, wu) in &du {
                for (x, &q) in p[s.0].iter_mut().zip(game.transition(s, a, u)) {
                    *x += wa * wu * q;
                }
            }
        }
    }
    Ok(p)
}
