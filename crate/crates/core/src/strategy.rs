//! Aggression-graded strategies, attacker skill, grid sweeps and
//! ε-neighborhood optimal strategy profiles (ε-NOSP).
//!
//! The strategy universe of each player is a list of aggression levels
//! `a ∈ [0, 1)`. At level `a` a player puts mass `a` on the state's
//! aggressive action and spreads `1 − a` uniformly over the rest.
//!
//! A grid cell `(i, j)` (admin level `i`, user level `j`) is an ε-NOSP when,
//! for both players, the shortfall of its mean return from the best
//! unilateral deviation within the grid, divided by the sum of the two
//! standard deviations, is at most ε.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::{evaluate_profile, EngineConfig, MixedStrategy, ProfileKey, ProfileStats, StrategyProfile};
use crate::error::{Error, Result};
use crate::game::{ActionTag, Game, GameSpec, Player};

/// Per-state mixed strategies for aggression level `a`.
pub fn aggression_to_mixed(game: &Game, player: Player, a: f64) -> Result<MixedStrategy> {
    if !(0.0..1.0).contains(&a) {
        return Err(Error::invalid(format!("aggression level {a} not in [0, 1)")));
    }
    let per_state = game
        .states()
        .map(|s| {
            let allowed = game.allowed(player, s);
            let n = allowed.len();
            let aggressive: Vec<bool> =
                allowed.iter().map(|&id| game.action(id).tag == ActionTag::Aggressive).collect();
            let k = aggressive.iter().filter(|&&x| x).count();
            if k == 0 || k == n {
                return vec![1.0 / n as f64; n];
            }
            let on = a / k as f64;
            let off = (1.0 - a) / (n - k) as f64;
            aggressive.iter().map(|&x| if x { on } else { off }).collect()
        })
        .collect();
    Ok(MixedStrategy { per_state })
}

pub fn aggression_profile(game: &Game, admin_level: f64, user_level: f64) -> Result<StrategyProfile> {
    Ok(StrategyProfile {
        admin: aggression_to_mixed(game, Player::Admin, admin_level)?,
        user: aggression_to_mixed(game, Player::User, user_level)?,
    })
}

/// `n` evenly spaced levels `0, 1/n, …, (n−1)/n`.
pub fn default_levels(n: usize) -> Vec<f64> {
    (0..n).map(|i| i as f64 / n as f64).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SkillLevel {
    #[serde(rename = "Below_Average")]
    BelowAverage,
    #[serde(rename = "Average")]
    Average,
    #[serde(rename = "Above_Average")]
    AboveAverage,
}

impl SkillLevel {
    pub const ALL: [SkillLevel; 3] = [SkillLevel::BelowAverage, SkillLevel::Average, SkillLevel::AboveAverage];

    pub fn default_success(self) -> f64 {
        match self {
            SkillLevel::BelowAverage => 0.3,
            SkillLevel::Average => 0.5,
            SkillLevel::AboveAverage => 0.7,
        }
    }

    /// Short CLI name.
    pub fn key(self) -> &'static str {
        match self {
            SkillLevel::BelowAverage => "below",
            SkillLevel::Average => "average",
            SkillLevel::AboveAverage => "above",
        }
    }
}

impl fmt::Display for SkillLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SkillLevel::BelowAverage => "Below_Average",
            SkillLevel::Average => "Average",
            SkillLevel::AboveAverage => "Above_Average",
        })
    }
}

impl FromStr for SkillLevel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "below" | "below_average" => Ok(SkillLevel::BelowAverage),
            "average" => Ok(SkillLevel::Average),
            "above" | "above_average" => Ok(SkillLevel::AboveAverage),
            _ => Err(Error::invalid(format!("unknown skill `{s}` (expected below|average|above)"))),
        }
    }
}

/// Attacker class and its success probability against exact defense.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SkillProfile {
    pub level: SkillLevel,
    pub attack_success: f64,
}

impl SkillProfile {
    pub fn new(level: SkillLevel, attack_success: f64) -> Result<Self> {
        let ok = match level {
            SkillLevel::BelowAverage => (0.0..0.5).contains(&attack_success),
            SkillLevel::Average => attack_success == 0.5,
            SkillLevel::AboveAverage => attack_success > 0.5 && attack_success <= 1.0,
        };
        if !ok {
            return Err(Error::invalid(format!("attack success {attack_success} inconsistent with {level}")));
        }
        Ok(SkillProfile { level, attack_success })
    }

    pub fn of(level: SkillLevel) -> Self {
        SkillProfile { level, attack_success: level.default_success() }
    }
}

/// Copy of `spec` whose contested entries give the user success
/// probability `skill.attack_success`; failure mass stays on the current
/// state.
pub fn apply_skill(spec: &GameSpec, skill: &SkillProfile) -> Result<GameSpec> {
    let mut out = spec.clone();
    let s = skill.attack_success;
    let mut touched = 0;
    for t in &mut out.transitions {
        let Some(c) = &t.contest else { continue };
        let (to_success, stay) = match c.aggressor {
            Player::User => (s, 1.0 - s),
            Player::Admin => (1.0 - s, s),
        };
        t.next.clear();
        t.next.insert(c.success.clone(), to_success);
        t.next.insert(t.state.clone(), stay);
        touched += 1;
    }
    if touched == 0 {
        return Err(Error::invalid("game has no contested transition entries to apply a skill to"));
    }
    Ok(out)
}

/// User success probability stored in a contested entry.
pub fn contest_user_success(t: &crate::game::TransitionEntry) -> Option<f64> {
    let c = t.contest.as_ref()?;
    Some(match c.aggressor {
        Player::User => t.next.get(&c.success).copied().unwrap_or(0.0),
        Player::Admin => t.next.get(&t.state).copied().unwrap_or(0.0),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub levels: Vec<f64>,
    pub n_runs: usize,
    pub config: EngineConfig,
    /// Row-major: `cells[i * levels.len() + j]` is admin level `i`, user level `j`.
    pub cells: Vec<ProfileStats>,
}

impl SweepResult {
    pub fn size(&self) -> usize {
        self.levels.len()
    }

    pub fn cell(&self, admin: usize, user: usize) -> &ProfileStats {
        &self.cells[admin * self.size() + user]
    }

    /// Mean grid `[i][j]` for one player.
    pub fn means(&self, player: Player) -> Vec<Vec<f64>> {
        let n = self.size();
        (0..n).map(|i| (0..n).map(|j| self.cell(i, j).get(player).mean).collect()).collect()
    }
}

/// Evaluates every (admin level, user level) pair. The result does not
/// depend on `parallel`.
pub fn sweep(game: &Game, levels: &[f64], n_runs: usize, config: &EngineConfig, parallel: bool) -> Result<SweepResult> {
    if levels.is_empty() {
        return Err(Error::invalid("sweep needs at least one aggression level"));
    }
    config.validate()?;
    let n = levels.len();
    let strategies = |p: Player| -> Result<Vec<MixedStrategy>> {
        levels.iter().map(|&a| aggression_to_mixed(game, p, a)).collect()
    };
    let admin = strategies(Player::Admin)?;
    let user = strategies(Player::User)?;
    let eval = |idx: usize| {
        let key = ProfileKey { admin: idx / n, user: idx % n };
        let profile = StrategyProfile { admin: admin[key.admin].clone(), user: user[key.user].clone() };
        evaluate_profile(game, &profile, key, n_runs, config)
    };
    let cells: Vec<ProfileStats> = if parallel {
        (0..n * n).into_par_iter().map(eval).collect::<Result<_>>()?
    } else {
        (0..n * n).map(eval).collect::<Result<_>>()?
    };
    Ok(SweepResult { levels: levels.to_vec(), n_runs, config: *config, cells })
}

/// Unilateral-deviation statistics of one player at one cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Deviation {
    /// `(V_max − V) / (σ(V_max) + σ(V))`, 0 when `V = V_max`, +∞ when both
    /// σ vanish and `V < V_max`.
    pub ratio: f64,
    /// `V_max − V ≥ 0`.
    pub gain: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NospCell {
    pub admin: usize,
    pub user: usize,
    pub admin_dev: Deviation,
    pub user_dev: Deviation,
    pub member: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NospResult {
    pub epsilon: f64,
    pub members: Vec<(usize, usize)>,
    /// Member with the smallest attacker (user) deviation gain.
    pub prescribed: Option<(usize, usize)>,
    /// Every grid cell, row-major.
    pub cells: Vec<NospCell>,
}

impl NospResult {
    pub fn cell(&self, admin: usize, user: usize) -> &NospCell {
        let n = (self.cells.len() as f64).sqrt() as usize;
        &self.cells[admin * n + user]
    }
}

fn deviation(v: f64, sv: f64, alternatives: impl Iterator<Item = (f64, f64)>) -> Deviation {
    // best mean; among tied best means the smallest sigma (the strictest test)
    let (vmax, smax) = alternatives.fold((f64::NEG_INFINITY, f64::INFINITY), |(bm, bs), (m, s)| {
        if m > bm || (m == bm && s < bs) {
            (m, s)
        } else {
            (bm, bs)
        }
    });
    let gain = vmax - v;
    if gain <= 0.0 {
        return Deviation { ratio: 0.0, gain: 0.0 };
    }
    let denom = smax + sv;
    let ratio = if denom > 0.0 { gain / denom } else { f64::INFINITY };
    Deviation { ratio, gain }
}

/// Finds all ε-NOSP cells of a completed sweep.
pub fn epsilon_nosp(sweep: &SweepResult, epsilon: f64) -> Result<NospResult> {
    if !(epsilon >= 0.0) {
        return Err(Error::invalid(format!("epsilon {epsilon} must be ≥ 0")));
    }
    let n = sweep.size();
    if sweep.cells.len() != n * n || n == 0 {
        return Err(Error::invalid(format!("incomplete sweep grid: {} cells for {n} levels", sweep.cells.len())));
    }
    let stat = |i: usize, j: usize, p: Player| {
        let s = sweep.cell(i, j).get(p);
        (s.mean, s.sigma)
    };
    let mut cells = Vec::with_capacity(n * n);
    let mut members = Vec::new();
    let mut prescribed: Option<((usize, usize), f64)> = None;
    for i in 0..n {
        for j in 0..n {
            let (va, sa) = stat(i, j, Player::Admin);
            let (vu, su) = stat(i, j, Player::User);
            let admin_dev = deviation(va, sa, (0..n).map(|k| stat(k, j, Player::Admin)));
            let user_dev = deviation(vu, su, (0..n).map(|k| stat(i, k, Player::User)));
            let member = admin_dev.ratio <= epsilon && user_dev.ratio <= epsilon;
            if member {
                members.push((i, j));
                if prescribed.is_none_or(|(_, g)| user_dev.gain < g) {
                    prescribed = Some(((i, j), user_dev.gain));
                }
            }
            cells.push(NospCell { admin: i, user: j, admin_dev, user_dev, member });
        }
    }
    Ok(NospResult { epsilon, members, prescribed: prescribed.map(|(p, _)| p), cells })
}

/// All cells where neither player can strictly raise its own mean by
/// changing only its own index. Brute force.
pub fn pure_nash_oracle(admin: &[Vec<f64>], user: &[Vec<f64>]) -> Vec<(usize, usize)> {
    let rows = admin.len();
    let mut out = Vec::new();
    for i in 0..rows {
        let cols = admin[i].len();
        'cell: for j in 0..cols {
            for k in 0..rows {
                if admin[k][j] > admin[i][j] {
                    continue 'cell;
                }
            }
            for k in 0..cols {
                if user[i][k] > user[i][j] {
                    continue 'cell;
                }
            }
            out.push((i, j));
        }
    }
    out
}
