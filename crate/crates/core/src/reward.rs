//! Rewards over the cost / desirability / information-leak basis.
//!
//! A reward is a point in a three-dimensional space. How strongly the axes
//! couple is described by a Gram matrix `G` (unit diagonal, off-diagonal
//! entries in `[0, 1]`: 0 for orthogonal axes, 1 for colinear ones). The
//! scalar used for strategy comparison is `1ᵀ G v`, which is the plain
//! component sum when `G` is the identity.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::ActionDef;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct RewardVector {
    /// Cost of attempting/executing an action (non-positive by convention).
    pub cost: f64,
    /// Desirability of the state change brought about.
    pub desirability: f64,
    /// Information divulged to the opponent.
    pub leak: f64,
}

impl RewardVector {
    pub const ZERO: RewardVector = RewardVector { cost: 0.0, desirability: 0.0, leak: 0.0 };

    pub fn new(cost: f64, desirability: f64, leak: f64) -> Self {
        Self { cost, desirability, leak }
    }

    pub fn components(&self) -> [f64; 3] {
        [self.cost, self.desirability, self.leak]
    }

    pub fn is_finite(&self) -> bool {
        self.components().iter().all(|c| c.is_finite())
    }
}

impl From<[f64; 3]> for RewardVector {
    fn from(c: [f64; 3]) -> Self {
        Self::new(c[0], c[1], c[2])
    }
}

impl From<RewardVector> for [f64; 3] {
    fn from(v: RewardVector) -> Self {
        v.components()
    }
}

impl std::ops::Add for RewardVector {
    type Output = RewardVector;

    fn add(self, rhs: RewardVector) -> RewardVector {
        RewardVector::new(
            self.cost + rhs.cost,
            self.desirability + rhs.desirability,
            self.leak + rhs.leak,
        )
    }
}

/// Inner products between the three reward axes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[[f64; 3]; 3]", into = "[[f64; 3]; 3]")]
pub struct GramMatrix([[f64; 3]; 3]);

impl GramMatrix {
    pub const IDENTITY: GramMatrix =
        GramMatrix([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);

    pub fn new(m: [[f64; 3]; 3]) -> Result<Self> {
        for i in 0..3 {
            if m[i][i] != 1.0 {
                return Err(Error::invalid(format!("gram diagonal G[{i}][{i}] = {} (must be 1)", m[i][i])));
            }
            for j in 0..3 {
                if i == j {
                    continue;
                }
                if !(0.0..=1.0).contains(&m[i][j]) {
                    return Err(Error::invalid(format!("gram entry G[{i}][{j}] = {} outside [0, 1]", m[i][j])));
                }
                if m[i][j] != m[j][i] {
                    return Err(Error::invalid(format!("gram matrix not symmetric at ({i}, {j})")));
                }
            }
        }
        Ok(GramMatrix(m))
    }

    pub fn entries(&self) -> &[[f64; 3]; 3] {
        &self.0
    }

    /// Column sums of `G`: the weight each reward component carries.
    pub fn weights(&self) -> [f64; 3] {
        let m = &self.0;
        [0, 1, 2].map(|j| m[0][j] + m[1][j] + m[2][j])
    }
}

impl Default for GramMatrix {
    fn default() -> Self {
        Self::IDENTITY
    }
}

impl TryFrom<[[f64; 3]; 3]> for GramMatrix {
    type Error = Error;

    fn try_from(m: [[f64; 3]; 3]) -> Result<Self> {
        GramMatrix::new(m)
    }
}

impl From<GramMatrix> for [[f64; 3]; 3] {
    fn from(g: GramMatrix) -> Self {
        g.0
    }
}

/// Collapses a reward vector to the scalar `1ᵀ G v`.
pub fn scalar_reward(v: &RewardVector, gram: &GramMatrix) -> f64 {
    let w = gram.weights();
    let c = v.components();
    w[0] * c[0] + w[1] * c[1] + w[2] * c[2]
}

/// Cost charged for attempting an action, on the cost axis only.
pub fn attempt_penalty(action: &ActionDef) -> RewardVector {
    RewardVector::new(action.attempt_cost, 0.0, 0.0)
}
