//! Decision rules for several users facing one administrator.
//!
//! Users should form a coalition when every one of them strictly gains
//! over a state window by acting cooperatively instead of alone. The
//! administrator should treat the users as one collective adversary when
//! the summed reward of the common response strictly beats the sum of the
//! per-game best responses. Sums are undiscounted.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One user's rewards over a state window, solo and cooperative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RewardTrajectory {
    pub player: String,
    pub solo: Vec<f64>,
    pub coop: Vec<f64>,
}

impl RewardTrajectory {
    pub fn new(player: impl Into<String>, solo: Vec<f64>, coop: Vec<f64>) -> Self {
        RewardTrajectory { player: player.into(), solo, coop }
    }

    /// `Σ coop − Σ solo`.
    pub fn margin(&self) -> f64 {
        self.coop.iter().sum::<f64>() - self.solo.iter().sum::<f64>()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoopDecision {
    pub cooperate: bool,
    /// Per-user margins, in input order.
    pub margins: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CollectiveDecision {
    pub collective: bool,
    /// `Σ common − Σ individual`.
    pub margin: f64,
}

pub fn should_cooperate(users: &[RewardTrajectory]) -> Result<CoopDecision> {
    if users.len() < 2 {
        return Err(Error::invalid(format!("cooperation needs at least 2 users, got {}", users.len())));
    }
    for u in users {
        if u.solo.len() != u.coop.len() {
            return Err(Error::invalid(format!(
                "user `{}`: solo window has {} states, cooperative window has {}",
                u.player,
                u.solo.len(),
                u.coop.len()
            )));
        }
        if u.solo.iter().chain(&u.coop).any(|x| !x.is_finite()) {
            return Err(Error::invalid(format!("user `{}` has a non-finite reward", u.player)));
        }
    }
    let margins: Vec<f64> = users.iter().map(RewardTrajectory::margin).collect();
    Ok(CoopDecision { cooperate: margins.iter().all(|&m| m > 0.0), margins })
}

pub fn should_respond_collectively(individual: &[f64], common: &[f64]) -> Result<CollectiveDecision> {
    if individual.is_empty() || common.is_empty() {
        return Err(Error::invalid("collective response needs nonempty reward lists"));
    }
    if individual.len() != common.len() {
        return Err(Error::DimensionMismatch { expected: individual.len(), actual: common.len() });
    }
    if individual.len() < 2 {
        return Err(Error::invalid("collective response needs at least 2 concurrent games"));
    }
    if individual.iter().chain(common).any(|x| !x.is_finite()) {
        return Err(Error::invalid("non-finite reward"));
    }
    let margin = common.iter().sum::<f64>() - individual.iter().sum::<f64>();
    Ok(CollectiveDecision { collective: margin > 0.0, margin })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn user(name: &str, solo: f64, coop: f64) -> RewardTrajectory {
        RewardTrajectory::new(name, vec![solo], vec![coop])
    }

    #[test]
    fn cooperation_examples() {
        let same = [user("a", 5.0, 5.0), user("b", 1.0, 1.0)];
        assert!(!should_cooperate(&same).unwrap().cooperate);

        let gain = [user("a", 50.0, 60.0), user("b", 10.0, 12.0)];
        let d = should_cooperate(&gain).unwrap();
        assert!(d.cooperate);
        assert_eq!(d.margins, vec![10.0, 2.0]);

        let mixed = [user("a", 50.0, 60.0), user("b", 10.0, 8.0)];
        assert!(!should_cooperate(&mixed).unwrap().cooperate);
    }

    #[test]
    fn cooperation_errors() {
        assert!(should_cooperate(&[user("a", 1.0, 2.0)]).is_err());
        let bad = [user("a", 1.0, 2.0), RewardTrajectory::new("b", vec![1.0, 2.0], vec![3.0])];
        assert!(should_cooperate(&bad).is_err());
    }

    #[test]
    fn collective_examples() {
        assert!(!should_respond_collectively(&[30.0, 40.0], &[40.0, 30.0]).unwrap().collective);
        let d = should_respond_collectively(&[30.0, 40.0], &[35.0, 45.0]).unwrap();
        assert!(d.collective);
        assert_eq!(d.margin, 10.0);
        assert!(!should_respond_collectively(&[30.0, 40.0], &[60.0, 5.0]).unwrap().collective);
    }

    #[test]
    fn collective_errors() {
        assert!(should_respond_collectively(&[], &[]).is_err());
        assert!(should_respond_collectively(&[1.0], &[2.0]).is_err());
        assert!(should_respond_collectively(&[1.0, 2.0], &[2.0]).is_err());
    }

    fn trajectories() -> impl Strategy<Value = Vec<RewardTrajectory>> {
        (1usize..6, 2usize..6).prop_flat_map(|(len, n)| {
            prop::collection::vec(
                (prop::collection::vec(-100i32..100, len), prop::collection::vec(-100i32..100, len)),
                n,
            )
            .prop_map(|v| {
                v.into_iter()
                    .enumerate()
                    .map(|(k, (s, c))| {
                        RewardTrajectory::new(
                            format!("u{k}"),
                            s.into_iter().map(f64::from).collect(),
                            c.into_iter().map(f64::from).collect(),
                        )
                    })
                    .collect()
            })
        })
    }

    proptest! {
        #[test]
        fn shift_invariant(users in trajectories(), shift in 1i32..1000) {
            let base = should_cooperate(&users).unwrap().cooperate;
            let shifted: Vec<_> = users
                .iter()
                .map(|u| RewardTrajectory::new(
                    u.player.clone(),
                    u.solo.iter().map(|x| x + f64::from(shift)).collect(),
                    u.coop.iter().map(|x| x + f64::from(shift)).collect(),
                ))
                .collect();
            prop_assert_eq!(should_cooperate(&shifted).unwrap().cooperate, base);
        }

        #[test]
        fn order_invariant(mut users in trajectories()) {
            let base = should_cooperate(&users).unwrap().cooperate;
            users.reverse();
            prop_assert_eq!(should_cooperate(&users).unwrap().cooperate, base);
        }

        #[test]
        fn zero_margin_never_collective(v in prop::collection::vec(-1000i32..1000, 2..8)) {
            let x: Vec<f64> = v.into_iter().map(f64::from).collect();
            let mut y = x.clone();
            y.reverse();
            prop_assert!(!should_respond_collectively(&x, &y).unwrap().collective);
        }
    }
}
