//! The canonical five-state administrator/user game.
//!
//! States: Internet (`is`), Low_Privilege (`lps`), High_Privilege (`hps`),
//! Attack (`as`) and Trap (`ts`). The administrator owns 22 actions and the
//! user 21. The administrator cannot tell `lps`/`hps`/`as` apart reliably and
//! never mistakes the trap state; the user's sensor is perfect.
//!
//! The bundled file `fixtures/fivestate.game` is generated by
//! [`build_five_state_spec`] (`secgame fixture`), and a test keeps the two in
//! sync. Transition probabilities are artifact defaults; contested
//! aggressive-vs-counter entries are set for an average attacker (0.5).

use std::collections::BTreeMap;

use crate::game::{
    ActionDef, ActionTag, Contest, ErrorModel, ErrorRow, Game, GameSpec, Player, RewardEntry, StateDef,
    TransitionEntry,
};
use crate::reward::{GramMatrix, RewardVector};

pub const FIVE_STATE_JSON: &str = include_str!("../fixtures/fivestate.game");

/// Attack success probability of an average attacker against exact defense.
pub const AVERAGE_SKILL: f64 = 0.5;

/// Parses the bundled fixture file.
pub fn five_state_spec() -> GameSpec {
    GameSpec::from_json(FIVE_STATE_JSON).expect("bundled fixture parses")
}

/// The bundled fixture, compiled.
pub fn five_state() -> Game {
    Game::new(five_state_spec()).expect("bundled fixture is valid")
}

const STATES: [(&str, &str); 5] = [
    ("is", "Internet_State"),
    ("lps", "Low_Privilege_State"),
    ("hps", "High_Privilege_State"),
    ("as", "Attack_State"),
    ("ts", "Trap_State"),
];

use ActionTag::*;

const ADMIN_ACTIONS: [(&str, &str, &str, ActionTag); 22] = [
    ("normal_is_a", "Normal_Operation_IS_A", "is", Normal),
    ("sign_in_is", "Sign_In_IS", "is", Escalate),
    ("normal_lps_a", "Normal_Operation_LPS_A", "lps", Normal),
    ("sign_out_lps", "Sign_Out_LPS", "lps", Exit),
    ("promote", "Promote", "lps", Escalate),
    ("defend_lps", "Defend_LPS", "lps", Defensive),
    ("trap_lps", "Trap_LPS", "lps", Aggressive),
    ("normal_hps_a", "Normal_Operation_HPS_A", "hps", Normal),
    ("sign_out_hps", "Sign_Out_HPS", "hps", Exit),
    ("demote", "Demote", "hps", Escalate),
    ("defend_hps", "Defend_HPS", "hps", Defensive),
    ("trap_hps", "Trap_HPS", "hps", Aggressive),
    ("normal_as_a", "Normal_Operation_AS_A", "as", Normal),
    ("sign_out_as", "Sign_Out_AS", "as", Exit),
    ("revive_lps", "Revive_LPS", "as", Defensive),
    ("revive_hps", "Revive_HPS", "as", Defensive),
    ("trap_as", "Trap_AS", "as", Aggressive),
    ("normal_ts_a", "Normal_Operation_TS_A", "ts", Normal),
    ("sign_out_ts", "Sign_Out_TS", "ts", Exit),
    ("test_ts", "Test_TS", "ts", Judge),
    ("judge_ts", "Judge_TS", "ts", Judge),
    ("allow_ts", "Allow_TS", "ts", Escalate),
];

const USER_ACTIONS: [(&str, &str, &str, ActionTag); 21] = [
    ("normal_is_u", "Normal_Operation_IS_U", "is", Normal),
    ("sign_in_request_is", "Sign_In_Request_IS", "is", Escalate),
    ("normal_lps_u", "Normal_Operation_LPS_U", "lps", Normal),
    ("sign_out_request_lps", "Sign_Out_Request_LPS", "lps", Exit),
    ("privilege_request", "Privilege_Request", "lps", Escalate),
    ("attack_lps", "Attack_LPS", "lps", Aggressive),
    ("resist_lps", "Resist_LPS", "lps", Defensive),
    ("normal_hps_u", "Normal_Operation_HPS_U", "hps", Normal),
    ("sign_out_request_hps", "Sign_Out_Request_HPS", "hps", Exit),
    ("privilege_relinquish", "Privilege_Relinquish", "hps", Escalate),
    ("attack_hps", "Attack_HPS", "hps", Aggressive),
    ("resist_hps", "Resist_HPS", "hps", Defensive),
    ("normal_as_u", "Normal_Operation_AS_U", "as", Normal),
    ("sign_out_request_as", "Sign_Out_Request_AS", "as", Exit),
    ("increase_attack", "Increase_Attack", "as", Aggressive),
    ("return_lps", "Return_LPS", "as", Escalate),
    ("return_hps", "Return_HPS", "as", Escalate),
    ("normal_ts_u", "Normal_Operation_TS_U", "ts", Normal),
    ("sign_out_request_ts", "Sign_Out_Request_TS", "ts", Exit),
    ("commit", "Commit", "ts", Aggressive),
    ("behave", "Behave", "ts", Defensive),
];

/// Attempt cost by tag: aggressive actions are the most expensive, exact
/// counters (defensive/judge) and escalations next.
pub fn tag_cost(tag: ActionTag) -> f64 {
    match tag {
        Aggressive => -100.0,
        Defensive | Judge | Escalate => -10.0,
        Normal | Exit => 0.0,
    }
}

fn dist(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    let mut m = BTreeMap::new();
    for &(k, p) in pairs {
        *m.entry(k.to_string()).or_insert(0.0) += p;
    }
    m
}

type TransitionRule = (Vec<(&'static str, f64)>, Option<Contest>, Option<&'static str>);

fn contest(aggressor: Player, success: &str) -> Option<Contest> {
    Some(Contest { aggressor, success: success.to_string() })
}

fn transition_rule(state: &'static str, a: &str, u: &str) -> TransitionRule {
    let s = AVERAGE_SKILL;
    let none = |v: Vec<(&'static str, f64)>| (v, None, None);
    match state {
        "is" => match (a, u) {
            ("sign_in_is", "sign_in_request_is") => none(vec![("lps", 0.9), ("is", 0.1)]),
            _ => none(vec![("is", 1.0)]),
        },
        "lps" | "hps" => {
            let (trap, resist, defend, attack, sign_out, sign_out_req) = if state == "lps" {
                ("trap_lps", "resist_lps", "defend_lps", "attack_lps", "sign_out_lps", "sign_out_request_lps")
            } else {
                ("trap_hps", "resist_hps", "defend_hps", "attack_hps", "sign_out_hps", "sign_out_request_hps")
            };
            if a == trap && u == resist {
                (
                    vec![("ts", 1.0 - s), (state, s)],
                    contest(Player::Admin, "ts"),
                    Some("trap vs resist: user resists with the skill probability"),
                )
            } else if a == trap && u == attack {
                none(vec![("ts", 0.5), ("as", 0.3), (state, 0.2)])
            } else if a == trap {
                none(vec![("ts", 0.9), (state, 0.1)])
            } else if a == defend && u == attack {
                (
                    vec![("as", s), (state, 1.0 - s)],
                    contest(Player::User, "as"),
                    Some("attack vs exact defense: attack succeeds with the skill probability"),
                )
            } else if u == attack {
                none(vec![("as", 0.9), (state, 0.1)])
            } else if a == sign_out {
                none(vec![("is", 0.9), (state, 0.1)])
            } else if u == sign_out_req {
                none(vec![("is", 0.8), (state, 0.2)])
            } else if (a, u) == ("promote", "privilege_request") {
                none(vec![("hps", 0.8), ("lps", 0.2)])
            } else if (a, u) == ("demote", "privilege_relinquish") {
                none(vec![("lps", 0.9), ("hps", 0.1)])
            } else if a == "demote" {
                none(vec![("lps", 0.6), ("hps", 0.4)])
            } else {
                none(vec![(state, 1.0)])
            }
        }
        "as" => match (a, u) {
            ("trap_as", "sign_out_request_as") => none(vec![("ts", 0.5), ("is", 0.3), ("as", 0.2)]),
            ("trap_as", "increase_attack") => none(vec![("ts", 0.5), ("as", 0.5)]),
            ("trap_as", _) => none(vec![("ts", 0.7), ("as", 0.3)]),
            ("sign_out_as", _) => none(vec![("is", 0.9), ("as", 0.1)]),
            ("revive_lps", "increase_attack") => none(vec![("lps", 0.5), ("as", 0.5)]),
            ("revive_lps", _) => none(vec![("lps", 0.8), ("as", 0.2)]),
            ("revive_hps", "increase_attack") => none(vec![("hps", 0.5), ("as", 0.5)]),
            ("revive_hps", _) => none(vec![("hps", 0.8), ("as", 0.2)]),
            (_, "return_lps") => none(vec![("lps", 0.7), ("as", 0.3)]),
            (_, "return_hps") => none(vec![("hps", 0.7), ("as", 0.3)]),
            (_, "sign_out_request_as") => none(vec![("is", 0.8), ("as", 0.2)]),
            _ => none(vec![("as", 1.0)]),
        },
        "ts" => match (a, u) {
            ("sign_out_ts", _) => none(vec![("is", 0.9), ("ts", 0.1)]),
            ("allow_ts", "commit") => none(vec![("ts", 0.7), ("lps", 0.3)]),
            ("allow_ts", _) => none(vec![("lps", 0.9), ("ts", 0.1)]),
            ("judge_ts", "commit") => none(vec![("is", 0.8), ("ts", 0.2)]),
            ("judge_ts", "behave") => none(vec![("lps", 0.5), ("ts", 0.5)]),
            ("judge_ts", "normal_ts_u") => none(vec![("lps", 0.3), ("ts", 0.7)]),
            ("judge_ts", "sign_out_request_ts") => none(vec![("is", 0.5), ("ts", 0.5)]),
            (_, "sign_out_request_ts") => none(vec![("is", 0.3), ("ts", 0.7)]),
            _ => none(vec![("ts", 1.0)]),
        },
        _ => unreachable!("unknown fixture state {state}"),
    }
}

fn is_counter(tag: ActionTag) -> bool {
    matches!(tag, Defensive | Judge)
}

/// Desirability and leak components `(admin, user)` for an action pair;
/// cost components are the attempt costs of the executed actions.
fn reward_rule(state: &str, a: ActionTag, u: ActionTag) -> ((f64, f64), (f64, f64), Option<&'static str>) {
    match (a, u) {
        (Aggressive, Aggressive) => ((0.0, 0.0), (0.0, 0.0), Some("mutual aggression: costs only")),
        (a, Aggressive) if is_counter(a) => {
            ((100.0, 10.0), (0.0, 0.0), Some("aggression met by exact counter: user -100, admin 100"))
        }
        (Aggressive, u) if is_counter(u) => {
            ((0.0, 0.0), (100.0, 10.0), Some("trap met by resistance: admin -100, user 100"))
        }
        (_, Aggressive) => ((-1000.0, 0.0), (1000.0, 0.0), Some("unopposed user aggression")),
        (Aggressive, _) => ((1000.0, 0.0), (-1000.0, 0.0), Some("unopposed administrator aggression")),
        (Exit, Exit) => ((10.0, 0.0), (10.0, 0.0), Some("sign-out pair: 10 each")),
        (a, _) if state == "as" => {
            if a == Defensive {
                ((100.0, 0.0), (-100.0, 0.0), Some("system revived"))
            } else {
                ((-100.0, 0.0), (100.0, 0.0), Some("ongoing damage in the attack state"))
            }
        }
        _ => ((0.0, 0.0), (0.0, 0.0), None),
    }
}

/// Builds the five-state game from its rules.
pub fn build_five_state_spec() -> GameSpec {
    let states: Vec<StateDef> =
        STATES.iter().map(|&(id, label)| StateDef { id: id.into(), label: label.into() }).collect();

    let mut actions = Vec::new();
    for (owner, list) in [(Player::Admin, &ADMIN_ACTIONS[..]), (Player::User, &USER_ACTIONS[..])] {
        for &(id, label, home, tag) in list {
            actions.push(ActionDef {
                id: id.into(),
                label: label.into(),
                owner,
                home_state: home.into(),
                tag,
                attempt_cost: tag_cost(tag),
            });
        }
    }

    let identity_row = |s: &str| ErrorRow { true_state: s.into(), probs: dist(&[(s, 1.0)]) };
    let admin_rows = vec![
        identity_row("is"),
        ErrorRow { true_state: "lps".into(), probs: dist(&[("lps", 0.7), ("hps", 0.2), ("as", 0.1)]) },
        ErrorRow { true_state: "hps".into(), probs: dist(&[("lps", 0.15), ("hps", 0.7), ("as", 0.15)]) },
        ErrorRow { true_state: "as".into(), probs: dist(&[("lps", 0.1), ("hps", 0.2), ("as", 0.7)]) },
        identity_row("ts"),
    ];
    let user_rows = STATES.iter().map(|&(s, _)| identity_row(s)).collect();

    let mut transitions = Vec::new();
    let mut rewards = Vec::new();
    for &(state, _) in &STATES {
        let here = |p: Player| actions.iter().filter(move |a: &&ActionDef| a.owner == p && a.home_state == state);
        for a in here(Player::Admin) {
            for u in here(Player::User) {
                let (next, contest, note) = transition_rule(state, &a.id, &u.id);
                transitions.push(TransitionEntry {
                    state: state.into(),
                    admin: a.id.clone(),
                    user: u.id.clone(),
                    next: dist(&next),
                    contest,
                    note: note.map(str::to_string),
                });
                let ((ad, al), (ud, ul), note) = reward_rule(state, a.tag, u.tag);
                rewards.push(RewardEntry {
                    state: state.into(),
                    admin: a.id.clone(),
                    user: u.id.clone(),
                    admin_reward: RewardVector::new(a.attempt_cost, ad, al),
                    user_reward: RewardVector::new(u.attempt_cost, ud, ul),
                    note: note.map(str::to_string),
                });
            }
        }
    }

    GameSpec {
        name: "five-state administrator/user security game".into(),
        notes: vec![
            "Rewards are [cost, desirability, leak] triples on the scale {-1000,-100,-10,0,10,100,1000}; gram is the identity.".into(),
            "Attempt costs: aggressive -100, defensive/judge/escalate -10, normal/exit 0.".into(),
            "Normal/normal pairs pay 0; sign-out pairs pay 10 each; attack vs defend pays user -100 / admin 100; trap vs resist pays admin -100 / user 100.".into(),
            "Unopposed aggression pays the aggressor 1000 - 100 and the victim -1000 plus own cost.".into(),
            "Transition probabilities are artifact defaults; entries with `contest` carry the attacker skill (0.5 = average).".into(),
            "The administrator confuses lps/hps/as and never mistakes ts; the user's sensor is perfect.".into(),
        ],
        discount: 0.9,
        start_state: "lps".into(),
        absorbing: Vec::new(),
        states,
        actions,
        error_model: ErrorModel { admin: admin_rows, user: user_rows },
        transitions,
        rewards,
        gram: GramMatrix::IDENTITY,
    }
}
