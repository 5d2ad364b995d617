//! Honeypot ploy planning.
//!
//! The administrator holds a pool of actions it can offer the user, each
//! with the user's preference probability, and knows which action the
//! user's equilibrium strategy prescribes. At each step it offers a subset
//! containing that action. Probabilities renormalize over the subset.
//!
//! The best offer makes the prescribed action as close as possible to
//! equiprobable with the average of the others (the gap
//! `|P_nash − (1 − P_nash)/(y − 1)|`), then maximizes the offer's Shannon
//! entropy, then prefers fewer actions, then the lexicographically
//! smallest set of ids. Pools of up to [`EXHAUSTIVE_LIMIT`] actions are
//! searched exhaustively; larger pools grow a subset greedily from the
//! prescribed action.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::PROB_TOLERANCE;

pub const EXHAUSTIVE_LIMIT: usize = 20;

/// Gaps or entropies closer than this compare equal.
pub const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PloyAction {
    pub id: String,
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PloyPool {
    pub actions: Vec<PloyAction>,
    pub nash_action: String,
}

impl PloyPool {
    pub fn new(actions: Vec<PloyAction>, nash_action: impl Into<String>) -> Result<Self> {
        let pool = PloyPool { actions, nash_action: nash_action.into() };
        pool.validate()?;
        Ok(pool)
    }

    /// Builds a pool from positive weights, normalizing them to sum to 1.
    pub fn from_weights(weights: Vec<(String, f64)>, nash_action: impl Into<String>) -> Result<Self> {
        if weights.iter().any(|(_, w)| !(*w > 0.0 && w.is_finite())) {
            return Err(Error::invalid("ploy weights must be positive and finite"));
        }
        let total: f64 = weights.iter().map(|(_, w)| w).sum();
        let actions = weights.into_iter().map(|(id, w)| PloyAction { id, p: w / total }).collect();
        Self::new(actions, nash_action)
    }

    pub fn validate(&self) -> Result<()> {
        if self.actions.len() < 2 {
            return Err(Error::invalid("ploy pool needs at least 2 actions"));
        }
        for (k, a) in self.actions.iter().enumerate() {
            if !(a.p > 0.0 && a.p.is_finite()) {
                return Err(Error::invalid(format!("ploy action `{}` has non-positive probability {}", a.id, a.p)));
            }
            if self.actions[..k].iter().any(|b| b.id == a.id) {
                return Err(Error::invalid(format!("duplicate ploy action `{}`", a.id)));
            }
        }
        let total: f64 = self.actions.iter().map(|a| a.p).sum();
        if (total - 1.0).abs() > PROB_TOLERANCE {
            return Err(Error::invalid(format!("ploy probabilities sum to {total}, not 1")));
        }
        self.nash_index()?;
        Ok(())
    }

    pub fn nash_index(&self) -> Result<usize> {
        self.actions
            .iter()
            .position(|a| a.id == self.nash_action)
            .ok_or_else(|| Error::not_found("nash action", &self.nash_action))
    }
}

fn by_preference(a: &PloyAction, b: &PloyAction) -> Ordering {
    b.p.total_cmp(&a.p).then_with(|| a.id.cmp(&b.id))
}

/// Descending preference, equal probabilities ordered by id.
pub fn sort_pool(pool: &PloyPool) -> PloyPool {
    let mut out = pool.clone();
    out.actions.sort_by(by_preference);
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchRegime {
    Exhaustive,
    Greedy,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PloyOffer {
    /// Offered actions in descending preference, probabilities renormalized.
    pub actions: Vec<PloyAction>,
    pub nash_action: String,
    pub gap: f64,
    pub entropy: f64,
    pub regime: SearchRegime,
}

impl PloyOffer {
    pub fn size(&self) -> usize {
        self.actions.len()
    }

    pub fn nash_probability(&self) -> f64 {
        self.actions.iter().find(|a| a.id == self.nash_action).map_or(0.0, |a| a.p)
    }
}

/// `|P_nash − (1 − P_nash)/(y − 1)|` for an offer of size `y`, with `probs`
/// renormalized. Evaluated as `|Σ_k (p_nash − p_k)| / (Σp·(y − 1))`, which
/// is exactly zero for a uniform offer.
pub fn equiprobability_gap(probs: &[f64], nash: usize) -> Result<f64> {
    let y = probs.len();
    if y < 2 {
        return Err(Error::invalid(format!("offer of size {y} has no alternative to the prescribed action")));
    }
    if nash >= y {
        return Err(Error::invalid("nash index outside offer"));
    }
    Ok(gap_of(probs.iter().copied(), probs[nash], y))
}

fn gap_of(weights: impl Iterator<Item = f64> + Clone, nash_weight: f64, y: usize) -> f64 {
    let total: f64 = weights.clone().sum();
    let spread: f64 = weights.map(|w| nash_weight - w).sum();
    spread.abs() / (total * (y - 1) as f64)
}

/// Shannon entropy in bits.
pub fn entropy_bits(probs: &[f64]) -> f64 {
    probs.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum()
}

pub fn offer_entropy(offer: &PloyOffer) -> f64 {
    entropy_bits(&offer.actions.iter().map(|a| a.p).collect::<Vec<_>>())
}

/// Scored candidate subset, as indices into a preference-sorted pool.
struct Candidate {
    members: Vec<usize>,
    gap: f64,
    entropy: f64,
    ids: Vec<String>,
}

impl Candidate {
    fn build(pool: &[PloyAction], nash: usize, members: Vec<usize>) -> Candidate {
        let total: f64 = members.iter().map(|&k| pool[k].p).sum();
        let probs: Vec<f64> = members.iter().map(|&k| pool[k].p / total).collect();
        let gap = gap_of(members.iter().map(|&k| pool[k].p), pool[nash].p, members.len());
        let mut ids: Vec<String> = members.iter().map(|&k| pool[k].id.clone()).collect();
        ids.sort();
        Candidate { gap, entropy: entropy_bits(&probs), members, ids }
    }

    /// `Less` means `self` is the better offer.
    fn rank(&self, other: &Candidate) -> Ordering {
        if (self.gap - other.gap).abs() > TIE_TOLERANCE {
            return self.gap.total_cmp(&other.gap);
        }
        if (self.entropy - other.entropy).abs() > TIE_TOLERANCE {
            return other.entropy.total_cmp(&self.entropy);
        }
        self.members.len().cmp(&other.members.len()).then_with(|| self.ids.cmp(&other.ids))
    }
}

fn keep_best(best: &mut Option<Candidate>, c: Candidate) {
    if best.as_ref().is_none_or(|b| c.rank(b) == Ordering::Less) {
        *best = Some(c);
    }
}

pub fn select_offer(pool: &PloyPool, min_size: usize, max_size: usize) -> Result<PloyOffer> {
    pool.validate()?;
    let n = pool.actions.len();
    if !(2 <= min_size && min_size <= max_size && max_size <= n) {
        return Err(Error::invalid(format!("offer sizes must satisfy 2 ≤ {min_size} ≤ {max_size} ≤ {n}")));
    }
    let sorted = sort_pool(pool);
    let nash = sorted.nash_index()?;
    let others: Vec<usize> = (0..n).filter(|&k| k != nash).collect();

    let mut best = None;
    let regime = if n <= EXHAUSTIVE_LIMIT {
        for mask in 1u32..(1u32 << others.len()) {
            let y = mask.count_ones() as usize + 1;
            if y < min_size || y > max_size {
                continue;
            }
            let mut members: Vec<usize> =
                others.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &k)| k).collect();
            members.push(nash);
            members.sort_unstable();
            keep_best(&mut best, Candidate::build(&sorted.actions, nash, members));
        }
        SearchRegime::Exhaustive
    } else {
        let mut current = vec![nash];
        while current.len() < max_size {
            let mut step: Option<Candidate> = None;
            for &k in others.iter().filter(|k| !current.contains(k)) {
                let mut members = current.clone();
                members.push(k);
                members.sort_unstable();
                keep_best(&mut step, Candidate::build(&sorted.actions, nash, members));
            }
            let step = step.expect("pool has unused actions below max_size");
            current = step.members.clone();
            if current.len() >= min_size {
                keep_best(&mut best, step);
            }
        }
        SearchRegime::Greedy
    };

    let best = best.expect("at least one admissible subset");
    let total: f64 = best.members.iter().map(|&k| sorted.actions[k].p).sum();
    let actions = best
        .members
        .iter()
        .map(|&k| PloyAction { id: sorted.actions[k].id.clone(), p: sorted.actions[k].p / total })
        .collect();
    Ok(PloyOffer { actions, nash_action: pool.nash_action.clone(), gap: best.gap, entropy: best.entropy, regime })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Assessment {
    ConfirmsBelief,
    /// `rank` 1 is the most preferred offered alternative.
    Deviation { action: String, rank: usize },
}

pub fn assess_response(offer: &PloyOffer, taken: &str) -> Result<Assessment> {
    if !offer.actions.iter().any(|a| a.id == taken) {
        return Err(Error::not_found("offered action", taken));
    }
    if taken == offer.nash_action {
        return Ok(Assessment::ConfirmsBelief);
    }
    let mut alternatives: Vec<&PloyAction> = offer.actions.iter().filter(|a| a.id != offer.nash_action).collect();
    alternatives.sort_by(|a, b| by_preference(a, b));
    let rank = alternatives.iter().position(|a| a.id == taken).expect("taken is offered") + 1;
    Ok(Assessment::Deviation { action: taken.to_string(), rank })
}
