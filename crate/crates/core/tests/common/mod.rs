//! Two-state toy game shared by the integration tests, with an exact
//! expected-return oracle written against the raw game data.

#![allow(dead_code)]

use std::collections::BTreeMap;

use serde_json::json;

use secgame::engine::MixedStrategy;
use secgame::{Game, GameSpec, Player};

pub const GRAM: [[f64; 3]; 3] = [[1.0, 0.2, 0.0], [0.2, 1.0, 0.5], [0.0, 0.5, 1.0]];

/// (state, admin, user) -> (next distribution, admin reward, user reward)
type Table = Vec<(&'static str, &'static str, &'static str, [f64; 2], [f64; 3], [f64; 3])>;

fn table() -> Table {
    // next = [P(a), P(b)]
    vec![
        ("a", "na", "ua", [0.9, 0.1], [1.0, 0.0, 0.0], [0.0, 2.0, 0.0]),
        ("a", "na", "ka", [0.4, 0.6], [0.0, -20.0, -3.0], [-7.0, 30.0, 4.0]),
        ("a", "pa", "ua", [0.7, 0.3], [-5.0, 12.0, 0.0], [0.0, -8.0, 0.0]),
        ("a", "pa", "ka", [0.5, 0.5], [-5.0, -2.0, 1.0], [-7.0, 3.0, 1.0]),
        ("b", "nb", "ub", [0.2, 0.8], [0.0, -1.0, 0.0], [0.0, 5.0, 0.0]),
        ("b", "nb", "eb", [1.0, 0.0], [0.0, 10.0, 0.0], [0.0, 10.0, 0.0]),
        ("b", "xb", "ub", [0.6, 0.4], [-3.0, 6.0, 2.0], [0.0, -6.0, -1.0]),
        ("b", "xb", "eb", [0.9, 0.1], [-3.0, 4.0, 0.0], [0.0, 1.0, 0.0]),
    ]
}

pub fn actions() -> Vec<(&'static str, &'static str, &'static str, &'static str, f64)> {
    vec![
        ("na", "admin", "a", "normal", 0.0),
        ("pa", "admin", "a", "aggressive", -5.0),
        ("nb", "admin", "b", "normal", 0.0),
        ("xb", "admin", "b", "defensive", -3.0),
        ("ua", "user", "a", "normal", 0.0),
        ("ka", "user", "a", "aggressive", -7.0),
        ("ub", "user", "b", "normal", 0.0),
        ("eb", "user", "b", "exit", 0.0),
    ]
}

pub const ADMIN_SENSOR: [[f64; 2]; 2] = [[0.8, 0.2], [0.25, 0.75]];

pub fn toy_spec() -> GameSpec {
    let next = |p: [f64; 2]| {
        let mut m = BTreeMap::new();
        if p[0] > 0.0 {
            m.insert("a", p[0]);
        }
        if p[1] > 0.0 {
            m.insert("b", p[1]);
        }
        m
    };
    let t = table();
    let v = json!({
        "name": "toy",
        "discount": 0.9,
        "start_state": "a",
        "states": [{"id": "a", "label": "A"}, {"id": "b", "label": "B"}],
        "actions": actions().iter().map(|(id, owner, home, tag, cost)| json!({
            "id": id, "label": id, "owner": owner, "home_state": home, "tag": tag, "attempt_cost": cost
        })).collect::<Vec<_>>(),
        "error_model": {
            "admin": [
                {"true_state": "a", "probs": {"a": ADMIN_SENSOR[0][0], "b": ADMIN_SENSOR[0][1]}},
                {"true_state": "b", "probs": {"a": ADMIN_SENSOR[1][0], "b": ADMIN_SENSOR[1][1]}}
            ],
            "user": [
                {"true_state": "a", "probs": {"a": 1.0}},
                {"true_state": "b", "probs": {"b": 1.0}}
            ]
        },
        "transitions": t.iter().map(|(s, a, u, n, _, _)| json!({
            "state": s, "admin": a, "user": u, "next": next(*n)
        })).collect::<Vec<_>>(),
        "rewards": t.iter().map(|(s, a, u, _, ra, ru)| json!({
            "state": s, "admin": a, "user": u, "admin_reward": ra, "user_reward": ru
        })).collect::<Vec<_>>(),
        "gram": GRAM,
    });
    GameSpec::from_json(&v.to_string()).expect("toy spec parses")
}

pub fn toy_game() -> Game {
    Game::new(toy_spec()).expect("toy spec is valid")
}

/// Strategy in the toy's own coordinates: `[state][k]` over the actions
/// homed at that state in declaration order.
pub type ToyStrategy = [[f64; 2]; 2];

pub const ADMIN_MIX: ToyStrategy = [[0.6, 0.4], [0.3, 0.7]];
pub const USER_MIX: ToyStrategy = [[0.5, 0.5], [0.9, 0.1]];

pub fn to_mixed(game: &Game, player: Player, mix: &ToyStrategy) -> MixedStrategy {
    let names = actions();
    let per_state = game
        .states()
        .map(|s| {
            game.allowed(player, s)
                .iter()
                .map(|&id| {
                    let key = &game.action(id).id;
                    let k = names
                        .iter()
                        .filter(|a| a.1 == player.to_string() && a.2 == game.state_key(s))
                        .position(|a| a.0 == key)
                        .unwrap();
                    mix[s.0][k]
                })
                .collect()
        })
        .collect();
    MixedStrategy { per_state }
}

fn scalar(v: [f64; 3]) -> f64 {
    let mut total = 0.0;
    for row in GRAM {
        for (g, x) in row.iter().zip(v) {
            total += g * x;
        }
    }
    total
}

fn state_index(s: &str) -> usize {
    if s == "a" { 0 } else { 1 }
}

/// Exact expected discounted returns `[admin, user]` over `steps` steps
/// from state `a`, by backward recursion over every sensing outcome,
/// choice and transition.
pub fn exact_returns(admin: &ToyStrategy, user: &ToyStrategy, beta: f64, steps: usize) -> [f64; 2] {
    let names = actions();
    let homed = |owner: &str, s: usize| -> Vec<(&'static str, f64)> {
        names
            .iter()
            .filter(|a| a.1 == owner && state_index(a.2) == s)
            .map(|a| (a.0, a.4))
            .collect()
    };
    let t = table();
    let lookup = |s: usize, a: &str, u: &str| {
        t.iter()
            .find(|r| state_index(r.0) == s && r.1 == a && r.2 == u)
            .map(|r| (r.3, r.4, r.5))
            .unwrap()
    };
    let normal = |owner: &str, s: usize| homed(owner, s)[0].0;

    let mut v = [[0.0f64; 2]; 2]; // v[state][player]
    for _ in 0..steps {
        let mut next_v = [[0.0f64; 2]; 2];
        for s in 0..2 {
            // admin: sense, pick among actions homed at the perceived state
            let mut admin_moves: Vec<(&str, f64, f64)> = Vec::new(); // (effective, penalty, prob)
            for (perceived, &e) in ADMIN_SENSOR[s].iter().enumerate() {
                for (k, (id, cost)) in homed("admin", perceived).into_iter().enumerate() {
                    let p = e * admin[perceived][k];
                    if perceived == s {
                        admin_moves.push((id, 0.0, p));
                    } else {
                        admin_moves.push((normal("admin", s), cost, p));
                    }
                }
            }
            for &(a, pen, pa) in &admin_moves {
                for (k, (u, _)) in homed("user", s).into_iter().enumerate() {
                    let pu = user[s][k];
                    let (next, ra, ru) = lookup(s, a, u);
                    let ra = [ra[0] + pen, ra[1], ra[2]];
                    let w = pa * pu;
                    for (player, r) in [scalar(ra), scalar(ru)].into_iter().enumerate() {
                        let cont: f64 = next.iter().zip(&v).map(|(q, vv)| q * vv[player]).sum();
                        next_v[s][player] += w * (r + beta * cont);
                    }
                }
            }
        }
        v = next_v;
    }
    v[0]
}
