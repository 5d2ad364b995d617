//! Game tuple, information sets and the disallowed-action substitution rule.
//!
//! A game file ([`GameSpec`]) names states and actions by string ids. After
//! [`validate_spec`] accepts it, [`Game::new`] compiles it into a dense,
//! index-based form that the engine and the analyses work on. A compiled
//! [`Game`] is immutable and can be shared freely across threads.
//!
//! The allowed action set `A^k_ξ` of a player at a state is the list of the
//! player's actions whose `home_state` is `ξ`, in catalog order.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::reward::{GramMatrix, RewardVector};
use crate::PROB_TOLERANCE;

/// Deviation from 1 below which a distribution is accepted as-is.
const SILENT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Player {
    Admin,
    User,
}

impl Player {
    pub const ALL: [Player; 2] = [Player::Admin, Player::User];

    /// 0 for the administrator, 1 for the user.
    pub fn index(self) -> usize {
        match self {
            Player::Admin => 0,
            Player::User => 1,
        }
    }

    pub fn from_index(i: usize) -> Option<Player> {
        match i {
            0 => Some(Player::Admin),
            1 => Some(Player::User),
            _ => None,
        }
    }

    pub fn other(self) -> Player {
        match self {
            Player::Admin => Player::User,
            Player::User => Player::Admin,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Player::Admin => "admin",
            Player::User => "user",
        })
    }
}

impl std::str::FromStr for Player {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "admin" | "administrator" | "0" => Ok(Player::Admin),
            "user" | "1" => Ok(Player::User),
            _ => Err(Error::not_found("player", s)),
        }
    }
}

/// Dense index of a state in a compiled [`Game`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct StateId(pub usize);

/// Dense index of an action in a compiled [`Game`]'s catalog.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ActionId(pub usize);

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ξ{}", self.0)
    }
}

impl fmt::Display for ActionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ActionTag {
    Normal,
    Exit,
    Escalate,
    Aggressive,
    Defensive,
    Judge,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateDef {
    pub id: String,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionDef {
    pub id: String,
    pub label: String,
    pub owner: Player,
    pub home_state: String,
    pub tag: ActionTag,
    /// Cost-axis component charged when the action is attempted (≤ 0).
    pub attempt_cost: f64,
}

/// Perception probabilities of one player's sensor at one true state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErrorRow {
    pub true_state: String,
    pub probs: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErrorModel {
    pub admin: Vec<ErrorRow>,
    pub user: Vec<ErrorRow>,
}

impl ErrorModel {
    pub fn rows(&self, player: Player) -> &[ErrorRow] {
        match player {
            Player::Admin => &self.admin,
            Player::User => &self.user,
        }
    }

    pub fn rows_mut(&mut self, player: Player) -> &mut Vec<ErrorRow> {
        match player {
            Player::Admin => &mut self.admin,
            Player::User => &mut self.user,
        }
    }
}

/// Marks an aggressive-vs-exact-counter entry whose odds depend on skill.
///
/// On success the game moves to `success`; on failure it stays put. The
/// user's success probability is the mass on `success` when the user is the
/// aggressor, and the stay-put mass when the administrator is.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Contest {
    pub aggressor: Player,
    pub success: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionEntry {
    pub state: String,
    pub admin: String,
    pub user: String,
    pub next: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contest: Option<Contest>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RewardEntry {
    pub state: String,
    pub admin: String,
    pub user: String,
    pub admin_reward: RewardVector,
    pub user_reward: RewardVector,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// The game as written in a game file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameSpec {
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub name: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub discount: f64,
    pub start_state: String,
    /// States in which play stops (finite-horizon variant).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub absorbing: Vec<String>,
    pub states: Vec<StateDef>,
    pub actions: Vec<ActionDef>,
    pub error_model: ErrorModel,
    pub transitions: Vec<TransitionEntry>,
    pub rewards: Vec<RewardEntry>,
    #[serde(default)]
    pub gram: GramMatrix,
}

impl GameSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("game spec serializes");
        s.push('\n');
        s
    }
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Warning,
    Violation,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Issue {
    pub severity: Severity,
    pub location: String,
    pub message: String,
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.severity {
            Severity::Warning => "warning",
            Severity::Violation => "violation",
        };
        write!(f, "{tag}: {}: {}", self.location, self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.issues.is_empty()
    }

    pub fn is_valid(&self) -> bool {
        self.violations().next().is_none()
    }

    pub fn violations(&self) -> impl Iterator<Item = &Issue> {
        self.issues.iter().filter(|i| i.severity == Severity::Violation)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Issue> {
        self.issues.iter().filter(|i| i.severity == Severity::Warning)
    }

    fn violation(&mut self, location: impl Into<String>, message: impl Into<String>) {
        self.issues.push(Issue {
            severity: Severity::Violation,
            location: location.into(),
            message: message.into(),
        });
    }

    fn warning(&mut self, location: impl Into<String>, message: impl Into<String>) {
        self.issues.push(Issue {
            severity: Severity::Warning,
            location: location.into(),
            message: message.into(),
        });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for issue in &self.issues {
            writeln!(f, "  {issue}")?;
        }
        Ok(())
    }
}

enum SumCheck {
    Exact,
    Renormalize(f64),
    Bad(f64),
}

fn check_sum<'a>(values: impl IntoIterator<Item = &'a f64>) -> SumCheck {
    let sum: f64 = values.into_iter().sum();
    let dev = (sum - 1.0).abs();
    if dev <= SILENT_TOLERANCE {
        SumCheck::Exact
    } else if dev <= PROB_TOLERANCE {
        SumCheck::Renormalize(sum)
    } else {
        SumCheck::Bad(sum)
    }
}

fn check_distribution(
    report: &mut ValidationReport,
    location: &str,
    dist: &BTreeMap<String, f64>,
    states: &HashMap<&str, usize>,
) {
    for (k, &p) in dist {
        if !states.contains_key(k.as_str()) {
            report.violation(location, format!("unknown state `{k}`"));
        }
        if !(p >= 0.0 && p.is_finite()) {
            report.violation(location, format!("probability of `{k}` is {p}"));
        }
    }
    match check_sum(dist.values()) {
        SumCheck::Exact => {}
        SumCheck::Renormalize(s) => report.warning(location, format!("sum {s} renormalized to 1")),
        SumCheck::Bad(s) => report.violation(location, format!("probabilities sum to {s}, not 1")),
    }
}

/// Checks every invariant of a game file. Never aborts: all findings are
/// collected into the report. Sums within 1e-9 of 1 are reported as
/// warnings and renormalized by [`Game::new`].
pub fn validate_spec(spec: &GameSpec) -> ValidationReport {
    let mut report = ValidationReport::default();

    if !(spec.discount > 0.0 && spec.discount < 1.0) {
        report.violation("discount", format!("discount out of range: {} not in (0, 1)", spec.discount));
    }

    if spec.states.is_empty() {
        report.violation("states", "at least one state is required");
    }
    let mut states: HashMap<&str, usize> = HashMap::new();
    for (i, s) in spec.states.iter().enumerate() {
        if states.insert(s.id.as_str(), i).is_some() {
            report.violation(format!("states[{i}]"), format!("duplicate state id `{}`", s.id));
        }
    }
    if !states.contains_key(spec.start_state.as_str()) {
        report.violation("start_state", format!("unknown state `{}`", spec.start_state));
    }
    for s in &spec.absorbing {
        if !states.contains_key(s.as_str()) {
            report.violation("absorbing", format!("unknown state `{s}`"));
        }
    }

    let mut actions: HashMap<&str, &ActionDef> = HashMap::new();
    let mut normals: HashMap<(Player, &str), usize> = HashMap::new();
    for (i, a) in spec.actions.iter().enumerate() {
        let loc = format!("actions[{i}] `{}`", a.id);
        if actions.insert(a.id.as_str(), a).is_some() {
            report.violation(&loc, "duplicate action id");
        }
        if !states.contains_key(a.home_state.as_str()) {
            report.violation(&loc, format!("unknown home state `{}`", a.home_state));
        }
        if !(a.attempt_cost <= 0.0 && a.attempt_cost.is_finite()) {
            report.violation(&loc, format!("attempt_cost {} must be finite and ≤ 0", a.attempt_cost));
        }
        if a.tag == ActionTag::Normal {
            *normals.entry((a.owner, a.home_state.as_str())).or_default() += 1;
        }
    }
    for s in &spec.states {
        for p in Player::ALL {
            match normals.get(&(p, s.id.as_str())).copied().unwrap_or(0) {
                1 => {}
                n => report.violation(
                    format!("actions ({p}, {})", s.id),
                    format!("expected exactly one normal action, found {n}"),
                ),
            }
        }
    }

    for p in Player::ALL {
        let mut seen = BTreeSet::new();
        for (i, row) in spec.error_model.rows(p).iter().enumerate() {
            let loc = format!("error_model.{p}[{i}] ({})", row.true_state);
            if !states.contains_key(row.true_state.as_str()) {
                report.violation(&loc, format!("unknown state `{}`", row.true_state));
                continue;
            }
            if !seen.insert(row.true_state.as_str()) {
                report.violation(&loc, "duplicate row");
            }
            check_distribution(&mut report, &loc, &row.probs, &states);
            if row.probs.get(&row.true_state).copied().unwrap_or(0.0) <= 0.0 {
                report.violation(&loc, "true state must have positive perception probability");
            }
        }
        for s in &spec.states {
            if !seen.contains(s.id.as_str()) {
                report.violation(format!("error_model.{p}"), format!("missing row for state `{}`", s.id));
            }
        }
    }

    // An action key is usable at `state` when its owner matches and it is allowed there.
    let check_key = |report: &mut ValidationReport, loc: &str, state: &str, admin: &str, user: &str| -> bool {
        let mut ok = states.contains_key(state);
        if !ok {
            report.violation(loc, format!("unknown state `{state}`"));
        }
        for (p, id) in [(Player::Admin, admin), (Player::User, user)] {
            match actions.get(id) {
                None => {
                    report.violation(loc, format!("unknown action `{id}`"));
                    ok = false;
                }
                Some(a) if a.owner != p => {
                    report.violation(loc, format!("action `{id}` is not a {p} action"));
                    ok = false;
                }
                Some(a) if a.home_state != state => {
                    report.violation(loc, format!("action `{id}` is not allowed at `{state}`"));
                    ok = false;
                }
                Some(_) => {}
            }
        }
        ok
    };

    let mut covered_q = BTreeSet::new();
    for (i, t) in spec.transitions.iter().enumerate() {
        let loc = format!("transitions[{i}] ({}, {}, {})", t.state, t.admin, t.user);
        if check_key(&mut report, &loc, &t.state, &t.admin, &t.user)
            && !covered_q.insert((t.state.as_str(), t.admin.as_str(), t.user.as_str()))
        {
            report.violation(&loc, "duplicate transition key");
        }
        check_distribution(&mut report, &loc, &t.next, &states);
        if let Some(c) = &t.contest {
            if !states.contains_key(c.success.as_str()) {
                report.violation(&loc, format!("contest success state `{}` unknown", c.success));
            } else if c.success == t.state {
                report.violation(&loc, "contest success state must differ from the current state");
            }
        }
    }

    let mut covered_r = BTreeSet::new();
    for (i, r) in spec.rewards.iter().enumerate() {
        let loc = format!("rewards[{i}] ({}, {}, {})", r.state, r.admin, r.user);
        if check_key(&mut report, &loc, &r.state, &r.admin, &r.user)
            && !covered_r.insert((r.state.as_str(), r.admin.as_str(), r.user.as_str()))
        {
            report.violation(&loc, "duplicate reward key");
        }
        if !(r.admin_reward.is_finite() && r.user_reward.is_finite()) {
            report.violation(&loc, "reward components must be finite");
        }
    }

    for s in &spec.states {
        let allowed = |p: Player| spec.actions.iter().filter(move |a| a.owner == p && a.home_state == s.id);
        for a in allowed(Player::Admin) {
            for u in allowed(Player::User) {
                let key = (s.id.as_str(), a.id.as_str(), u.id.as_str());
                if !covered_q.contains(&key) {
                    report.violation(format!("transitions ({}, {}, {})", s.id, a.id, u.id), "missing transition entry");
                }
                if !covered_r.contains(&key) {
                    report.violation(format!("rewards ({}, {}, {})", s.id, a.id, u.id), "missing reward entry");
                }
            }
        }
    }

    report
}

// ---------------------------------------------------------------------------
// Compiled game
// ---------------------------------------------------------------------------

/// A validated game in dense, index-based form.
#[derive(Debug, Clone)]
pub struct Game {
    spec: GameSpec,
    state_index: HashMap<String, StateId>,
    action_index: HashMap<String, ActionId>,
    allowed: [Vec<Vec<ActionId>>; 2],
    local: Vec<usize>,
    normal: [Vec<ActionId>; 2],
    errors: [Vec<Vec<f64>>; 2],
    cell_offset: Vec<usize>,
    transitions: Vec<Vec<f64>>,
    rewards: Vec<[RewardVector; 2]>,
    contested: Vec<bool>,
    absorbing: Vec<bool>,
    start: StateId,
}

fn dense(dist: &BTreeMap<String, f64>, index: &HashMap<String, StateId>, n: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    for (k, &p) in dist {
        v[index[k].0] += p;
    }
    let s: f64 = v.iter().sum();
    if (s - 1.0).abs() > SILENT_TOLERANCE {
        v.iter_mut().for_each(|x| *x /= s);
    }
    v
}

impl Game {
    /// Validates and compiles a game file.
    pub fn new(spec: GameSpec) -> Result<Self> {
        Self::compile(spec).map(|(g, _)| g)
    }

    /// Like [`Game::new`], also returning the (warning-only) report.
    pub fn compile(spec: GameSpec) -> Result<(Self, ValidationReport)> {
        let report = validate_spec(&spec);
        if !report.is_valid() {
            return Err(Error::InvalidSpec(report));
        }
        let n = spec.states.len();
        let state_index: HashMap<String, StateId> =
            spec.states.iter().enumerate().map(|(i, s)| (s.id.clone(), StateId(i))).collect();
        let action_index: HashMap<String, ActionId> =
            spec.actions.iter().enumerate().map(|(i, a)| (a.id.clone(), ActionId(i))).collect();

        let mut allowed: [Vec<Vec<ActionId>>; 2] = [vec![Vec::new(); n], vec![Vec::new(); n]];
        let mut local = vec![0; spec.actions.len()];
        let mut normal = [vec![ActionId(0); n], vec![ActionId(0); n]];
        for (i, a) in spec.actions.iter().enumerate() {
            let s = state_index[&a.home_state].0;
            let set = &mut allowed[a.owner.index()][s];
            local[i] = set.len();
            set.push(ActionId(i));
            if a.tag == ActionTag::Normal {
                normal[a.owner.index()][s] = ActionId(i);
            }
        }

        let mut errors = [vec![Vec::new(); n], vec![Vec::new(); n]];
        for p in Player::ALL {
            for row in spec.error_model.rows(p) {
                errors[p.index()][state_index[&row.true_state].0] = dense(&row.probs, &state_index, n);
            }
        }

        let mut cell_offset = Vec::with_capacity(n + 1);
        let mut total = 0;
        for s in 0..n {
            cell_offset.push(total);
            total += allowed[0][s].len() * allowed[1][s].len();
        }
        cell_offset.push(total);

        let cell = |state: &str, admin: &str, user: &str| {
            let s = state_index[state].0;
            let a = local[action_index[admin].0];
            let u = local[action_index[user].0];
            cell_offset[s] + a * allowed[1][s].len() + u
        };

        let mut transitions = vec![Vec::new(); total];
        let mut contested = vec![false; total];
        for t in &spec.transitions {
            let c = cell(&t.state, &t.admin, &t.user);
            transitions[c] = dense(&t.next, &state_index, n);
            contested[c] = t.contest.is_some();
        }
        let mut rewards = vec![[RewardVector::ZERO; 2]; total];
        for r in &spec.rewards {
            rewards[cell(&r.state, &r.admin, &r.user)] = [r.admin_reward, r.user_reward];
        }

        let mut absorbing = vec![false; n];
        for s in &spec.absorbing {
            absorbing[state_index[s].0] = true;
        }
        let start = state_index[&spec.start_state];

        let game = Game {
            spec,
            state_index,
            action_index,
            allowed,
            local,
            normal,
            errors,
            cell_offset,
            transitions,
            rewards,
            contested,
            absorbing,
            start,
        };
        Ok((game, report))
    }

    pub fn spec(&self) -> &GameSpec {
        &self.spec
    }

    pub fn num_states(&self) -> usize {
        self.spec.states.len()
    }

    pub fn num_actions(&self) -> usize {
        self.spec.actions.len()
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> {
        (0..self.num_states()).map(StateId)
    }

    pub fn discount(&self) -> f64 {
        self.spec.discount
    }

    pub fn gram(&self) -> &GramMatrix {
        &self.spec.gram
    }

    pub fn start_state(&self) -> StateId {
        self.start
    }

    pub fn is_absorbing(&self, state: StateId) -> bool {
        self.absorbing[state.0]
    }

    pub fn state_key(&self, state: StateId) -> &str {
        &self.spec.states[state.0].id
    }

    pub fn state_label(&self, state: StateId) -> &str {
        &self.spec.states[state.0].label
    }

    pub fn state(&self, key: &str) -> Result<StateId> {
        self.state_index.get(key).copied().ok_or_else(|| Error::not_found("state", key))
    }

    pub fn action_id(&self, key: &str) -> Result<ActionId> {
        self.action_index.get(key).copied().ok_or_else(|| Error::not_found("action", key))
    }

    pub fn action(&self, id: ActionId) -> &ActionDef {
        &self.spec.actions[id.0]
    }

    /// Actions owned by `player`, in catalog order.
    pub fn player_actions(&self, player: Player) -> Vec<ActionId> {
        (0..self.num_actions()).map(ActionId).filter(|&a| self.action(a).owner == player).collect()
    }

    fn check_state(&self, state: StateId) -> Result<()> {
        if state.0 < self.num_states() {
            Ok(())
        } else {
            Err(Error::not_found("state", state))
        }
    }

    /// The allowed action set `A^k_ξ`.
    pub fn allowed(&self, player: Player, state: StateId) -> &[ActionId] {
        &self.allowed[player.index()][state.0]
    }

    /// Position of an action within its home state's allowed set.
    pub fn local_index(&self, action: ActionId) -> usize {
        self.local[action.0]
    }

    pub fn home_state(&self, action: ActionId) -> StateId {
        self.state_index[&self.action(action).home_state]
    }

    pub fn normal_action(&self, player: Player, state: StateId) -> ActionId {
        self.normal[player.index()][state.0]
    }

    /// Dense perception row: entry `i` is the probability of perceiving `ξ_i`
    /// when the true state is `state`.
    pub fn error_row(&self, player: Player, state: StateId) -> &[f64] {
        &self.errors[player.index()][state.0]
    }

    /// All of a player's perception rows, indexed by true state.
    pub fn error_rows(&self, player: Player) -> &[Vec<f64>] {
        &self.errors[player.index()]
    }

    /// Support of the player's error row at `state`. Always contains `state`.
    pub fn information_set(&self, player: Player, state: StateId) -> Result<Vec<StateId>> {
        self.check_state(state)?;
        Ok(self
            .error_row(player, state)
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(|(i, _)| StateId(i))
            .collect())
    }

    /// Union of allowed sets over the information set, ordered by state
    /// index and then by in-state order.
    pub fn extended_action_set(&self, player: Player, state: StateId) -> Result<Vec<ActionId>> {
        Ok(self
            .information_set(player, state)?
            .into_iter()
            .flat_map(|s| self.allowed(player, s).iter().copied())
            .collect())
    }

    /// Action that actually takes effect when `chosen` is attempted at
    /// `true_state`: itself when allowed there, otherwise the state's
    /// normal action.
    pub fn effective_action(&self, player: Player, true_state: StateId, chosen: ActionId) -> Result<ActionId> {
        self.check_state(true_state)?;
        if chosen.0 >= self.num_actions() {
            return Err(Error::not_found("action", chosen));
        }
        let def = self.action(chosen);
        if def.owner != player {
            return Err(Error::Contract(format!("action `{}` is not a {player} action", def.id)));
        }
        let home = self.home_state(chosen);
        if home == true_state {
            return Ok(chosen);
        }
        if self.error_row(player, true_state)[home.0] <= 0.0 {
            return Err(Error::Contract(format!(
                "action `{}` is outside the extended action set of {player} at `{}`",
                def.id,
                self.state_key(true_state)
            )));
        }
        Ok(self.normal_action(player, true_state))
    }

    /// Sensor error `1 − p_jj`.
    pub fn sensor_error(&self, player: Player, state: StateId) -> Result<f64> {
        self.check_state(state)?;
        Ok(1.0 - self.error_row(player, state)[state.0])
    }

    fn cell(&self, state: StateId, admin: ActionId, user: ActionId) -> usize {
        debug_assert_eq!(self.home_state(admin), state);
        debug_assert_eq!(self.home_state(user), state);
        self.cell_offset[state.0] + self.local[admin.0] * self.allowed[1][state.0].len() + self.local[user.0]
    }

    /// Next-state distribution for an allowed action pair.
    pub fn transition(&self, state: StateId, admin: ActionId, user: ActionId) -> &[f64] {
        &self.transitions[self.cell(state, admin, user)]
    }

    /// Reward vectors `[admin, user]` for an allowed action pair.
    pub fn reward(&self, state: StateId, admin: ActionId, user: ActionId) -> [RewardVector; 2] {
        self.rewards[self.cell(state, admin, user)]
    }

    pub fn is_contested(&self, state: StateId, admin: ActionId, user: ActionId) -> bool {
        self.contested[self.cell(state, admin, user)]
    }
}
