//! Seeded Monte Carlo execution of the game.
//!
//! One step: each player samples a perceived state from its error row at
//! the true state, then an action from its mixed strategy at the perceived
//! state. An action not allowed at the true state is executed as that
//! state's normal action, but the attempted action's cost is still charged.
//! The next state is drawn from the transition row of the effective pair.
//!
//! Returns are discounted with weight `β^t` at step `t` and the run stops
//! after `min(horizon(β, θ), max_steps)` steps or on entering an absorbing
//! state.
//!
//! Randomness: every run owns a `ChaCha8Rng` seeded from a 64-bit seed.
//! [`evaluate_profile`] derives per-run seeds with [`run_seed`], so results
//! do not depend on evaluation order or thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{ActionId, Game, Player, StateId};
use crate::reward::{attempt_penalty, scalar_reward, RewardVector};
use crate::PROB_TOLERANCE;

pub const GENERATOR: &str = "ChaCha8Rng";

pub const DEFAULT_DISCOUNT: f64 = 0.9;
pub const DEFAULT_THRESHOLD: f64 = 1e-3;
pub const DEFAULT_MAX_STEPS: usize = 200;

/// Per-state mixed strategy of one player, aligned with `Game::allowed`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixedStrategy {
    pub per_state: Vec<Vec<f64>>,
}

impl MixedStrategy {
    pub fn at(&self, state: StateId) -> Option<&[f64]> {
        self.per_state.get(state.0).map(Vec::as_slice)
    }

    /// Pure strategy playing the given local action index at every state.
    pub fn pure(game: &Game, player: Player, pick: impl Fn(StateId) -> usize) -> Self {
        let per_state = game
            .states()
            .map(|s| {
                let mut v = vec![0.0; game.allowed(player, s).len()];
                v[pick(s)] = 1.0;
                v
            })
            .collect();
        MixedStrategy { per_state }
    }

    pub fn uniform(game: &Game, player: Player) -> Self {
        let per_state = game
            .states()
            .map(|s| {
                let n = game.allowed(player, s).len();
                vec![1.0 / n as f64; n]
            })
            .collect();
        MixedStrategy { per_state }
    }

    pub fn check(&self, game: &Game, player: Player) -> Result<()> {
        for s in game.states() {
            let n = game.allowed(player, s).len();
            let dist = self.at(s).ok_or_else(|| {
                Error::Contract(format!("missing {player} strategy at `{}`", game.state_key(s)))
            })?;
            if dist.len() != n {
                return Err(Error::Contract(format!(
                    "{player} strategy at `{}` has {} entries, expected {n}",
                    game.state_key(s),
                    dist.len()
                )));
            }
            let sum: f64 = dist.iter().sum();
            if dist.iter().any(|&p| !(p >= 0.0)) || (sum - 1.0).abs() > PROB_TOLERANCE {
                return Err(Error::Contract(format!(
                    "{player} strategy at `{}` is not a distribution",
                    game.state_key(s)
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrategyProfile {
    pub admin: MixedStrategy,
    pub user: MixedStrategy,
}

impl StrategyProfile {
    pub fn get(&self, player: Player) -> &MixedStrategy {
        match player {
            Player::Admin => &self.admin,
            Player::User => &self.user,
        }
    }

    pub fn check(&self, game: &Game) -> Result<()> {
        self.admin.check(game, Player::Admin)?;
        self.user.check(game, Player::User)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EngineConfig {
    pub discount: f64,
    pub horizon_threshold: f64,
    pub max_steps: usize,
    pub base_seed: u64,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            discount: DEFAULT_DISCOUNT,
            horizon_threshold: DEFAULT_THRESHOLD,
            max_steps: DEFAULT_MAX_STEPS,
            base_seed: 0,
        }
    }
}

impl EngineConfig {
    /// Defaults with the game's own discount factor.
    pub fn for_game(game: &Game) -> Self {
        Self { discount: game.discount(), ..Self::default() }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.base_seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_steps == 0 {
            return Err(Error::invalid("max_steps must be at least 1"));
        }
        horizon(self.discount, self.horizon_threshold).map(|_| ())
    }

    /// Number of steps a run lasts unless absorbed.
    pub fn step_cap(&self) -> Result<usize> {
        Ok(horizon(self.discount, self.horizon_threshold)?.min(self.max_steps))
    }
}

/// Smallest `h ≥ 0` with `β^h < θ`.
pub fn horizon(beta: f64, theta: f64) -> Result<usize> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::invalid(format!("discount {beta} not in (0, 1)")));
    }
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(Error::invalid(format!("horizon threshold {theta} not in (0, 1]")));
    }
    let estimate = (theta.ln() / beta.ln()).floor();
    let mut h = if estimate > 1.0 { estimate as usize - 1 } else { 0 };
    while beta.powi(h as i32) >= theta {
        h += 1;
    }
    Ok(h)
}

/// SplitMix64 finalizer.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Identifies a profile within a sweep grid.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize)]
pub struct ProfileKey {
    pub admin: usize,
    pub user: usize,
}

/// Per-run seed: `h = sm(base)`, then `h = sm(h ^ v)` for `v` in
/// `(admin index, user index, run index)`, where `sm` is [`splitmix64`].
pub fn run_seed(base_seed: u64, key: ProfileKey, run: usize) -> u64 {
    let mut h = splitmix64(base_seed);
    for v in [key.admin as u64, key.user as u64, run as u64] {
        h = splitmix64(h ^ v);
    }
    h
}

/// Index drawn from `probs` by inverse CDF at `u ∈ [0, 1)`.
pub(crate) fn sample_index(probs: &[f64], u: f64) -> usize {
    let mut cum = 0.0;
    let mut last = 0;
    for (i, &p) in probs.iter().enumerate() {
        if p <= 0.0 {
            continue;
        }
        cum += p;
        last = i;
        if u < cum {
            return i;
        }
    }
    last
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlayerStep {
    pub perceived: StateId,
    pub chosen: ActionId,
    pub effective: ActionId,
    pub reward: RewardVector,
    pub scalar: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryStep {
    pub t: usize,
    pub true_state: StateId,
    pub players: [PlayerStep; 2],
    pub next_state: StateId,
    pub weight: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Horizon,
    Absorbed,
    MaxSteps,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunResult {
    /// Discounted return `[admin, user]`.
    pub returns: [f64; 2],
    pub trajectory: Vec<TrajectoryStep>,
    pub seed: u64,
    pub generator: &'static str,
    pub termination: Termination,
}

/// Plays one step from `state`. The returned step carries weight 1 and
/// `t = 0`; [`run_game`] fills both in.
pub fn play_step<R: Rng + ?Sized>(
    game: &Game,
    state: StateId,
    profile: &StrategyProfile,
    rng: &mut R,
) -> Result<TrajectoryStep> {
    let mut picks = [(state, ActionId(0), ActionId(0)); 2];
    for p in Player::ALL {
        let perceived = StateId(sample_index(game.error_row(p, state), rng.gen()));
        let dist = profile.get(p).at(perceived).ok_or_else(|| {
            Error::Contract(format!("missing {p} strategy at `{}`", game.state_key(perceived)))
        })?;
        let allowed = game.allowed(p, perceived);
        if dist.len() != allowed.len() {
            return Err(Error::Contract(format!("{p} strategy at `{}` has wrong length", game.state_key(perceived))));
        }
        let chosen = allowed[sample_index(dist, rng.gen())];
        let effective = game.effective_action(p, state, chosen)?;
        picks[p.index()] = (perceived, chosen, effective);
    }
    let (admin_eff, user_eff) = (picks[0].2, picks[1].2);
    let next_state = StateId(sample_index(game.transition(state, admin_eff, user_eff), rng.gen()));
    let base = game.reward(state, admin_eff, user_eff);

    let players = Player::ALL.map(|p| {
        let (perceived, chosen, effective) = picks[p.index()];
        let mut reward = base[p.index()];
        if chosen != effective {
            reward = reward + attempt_penalty(game.action(chosen));
        }
        PlayerStep { perceived, chosen, effective, reward, scalar: scalar_reward(&reward, game.gram()) }
    });
    Ok(TrajectoryStep { t: 0, true_state: state, players, next_state, weight: 1.0 })
}

fn simulate(
    game: &Game,
    profile: &StrategyProfile,
    config: &EngineConfig,
    seed: u64,
    mut record: Option<&mut Vec<TrajectoryStep>>,
) -> Result<([f64; 2], Termination)> {
    let horizon = horizon(config.discount, config.horizon_threshold)?;
    let (cap, capped_by) = if horizon <= config.max_steps {
        (horizon, Termination::Horizon)
    } else {
        (config.max_steps, Termination::MaxSteps)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = game.start_state();
    let mut returns = [0.0; 2];
    for t in 0..cap {
        if game.is_absorbing(state) {
            return Ok((returns, Termination::Absorbed));
        }
        let mut step = play_step(game, state, profile, &mut rng)?;
        step.t = t;
        step.weight = config.discount.powi(t as i32);
        for (r, ps) in returns.iter_mut().zip(&step.players) {
            *r += step.weight * ps.scalar;
        }
        state = step.next_state;
        if let Some(rec) = record.as_deref_mut() {
            rec.push(step);
        }
    }
    Ok((returns, capped_by))
}

/// Runs one game from the start state with `config.base_seed` as the seed.
pub fn run_game(game: &Game, profile: &StrategyProfile, config: &EngineConfig) -> Result<RunResult> {
    run_with_seed(game, profile, config, config.base_seed)
}

pub fn run_with_seed(game: &Game, profile: &StrategyProfile, config: &EngineConfig, seed: u64) -> Result<RunResult> {
    config.validate()?;
    profile.check(game)?;
    let mut trajectory = Vec::new();
    let (returns, termination) = simulate(game, profile, config, seed, Some(&mut trajectory))?;
    Ok(RunResult { returns, trajectory, seed, generator: GENERATOR, termination })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RewardStats {
    pub mean: f64,
    /// Population standard deviation of the per-run returns.
    pub sigma: f64,
    pub n: usize,
    pub returns: Vec<f64>,
}

impl RewardStats {
    pub fn from_returns(returns: Vec<f64>) -> Self {
        let n = returns.len();
        assert!(n > 0, "stats need at least one return");
        let mean = returns.iter().sum::<f64>() / n as f64;
        let var = returns.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n as f64;
        RewardStats { mean, sigma: var.sqrt(), n, returns }
    }

    /// Stats known only by their summary (e.g. read back from a CSV).
    pub fn summary(mean: f64, sigma: f64, n: usize) -> Self {
        RewardStats { mean, sigma, n, returns: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileStats {
    pub admin: RewardStats,
    pub user: RewardStats,
}

impl ProfileStats {
    pub fn get(&self, player: Player) -> &RewardStats {
        match player {
            Player::Admin => &self.admin,
            Player::User => &self.user,
        }
    }
}

/// Runs `n_runs` independent games with seeds from [`run_seed`].
pub fn evaluate_profile(
    game: &Game,
    profile: &StrategyProfile,
    key: ProfileKey,
    n_runs: usize,
    config: &EngineConfig,
) -> Result<ProfileStats> {
    if n_runs == 0 {
        return Err(Error::invalid("n_runs must be at least 1"));
    }
    config.validate()?;
    profile.check(game)?;
    let mut admin = Vec::with_capacity(n_runs);
    let mut user = Vec::with_capacity(n_runs);
    for run in 0..n_runs {
        let (r, _) = simulate(game, profile, config, run_seed(config.base_seed, key, run), None)?;
        admin.push(r[0]);
        user.push(r[1]);
    }
    Ok(ProfileStats { admin: RewardStats::from_returns(admin), user: RewardStats::from_returns(user) })
}

/// Like [`evaluate_profile`] but keeps every trajectory.
pub fn evaluate_profile_traced(
    game: &Game,
    profile: &StrategyProfile,
    key: ProfileKey,
    n_runs: usize,
    config: &EngineConfig,
) -> Result<(ProfileStats, Vec<RunResult>)> {
    if n_runs == 0 {
        return Err(Error::invalid("n_runs must be at least 1"));
    }
    let runs: Vec<RunResult> = (0..n_runs)
        .map(|run| run_with_seed(game, profile, config, run_seed(config.base_seed, key, run)))
        .collect::<Result<_>>()?;
    let stats = ProfileStats {
        admin: RewardStats::from_returns(runs.iter().map(|r| r.returns[0]).collect()),
        user: RewardStats::from_returns(runs.iter().map(|r| r.returns[1]).collect()),
    };
    Ok((stats, runs))
}
