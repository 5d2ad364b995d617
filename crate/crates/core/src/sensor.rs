//! State perception from sensor readings.
//!
//! Each state is described by one or more representative points (a measure
//! of central tendency per observed parameter). A live reading is compared
//! against every point by RMS distance; the closest point of each state
//! gives that state's distance `Δ_i`. Perception probabilities are
//!
//! ```text
//! p_i = (ΣΔ − Δ_i) / (ΣΔ · (N − 1))
//! ```
//!
//! so that larger distances are strictly less probable and the vector sums
//! to one. When the reading sits exactly on one or more states' points, the
//! mass is split uniformly over those states.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSignature {
    pub state: String,
    /// Representative points, each of dimension `g`.
    pub elements: Vec<Vec<f64>>,
    /// Per-parameter multipliers applied to differences before squaring.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scales: Option<Vec<f64>>,
}

impl StateSignature {
    pub fn new(state: impl Into<String>, elements: Vec<Vec<f64>>) -> Self {
        Self { state: state.into(), elements, scales: None }
    }

    pub fn dimension(&self) -> Option<usize> {
        self.elements.first().map(Vec::len)
    }

    fn check(&self) -> Result<usize> {
        let g = self
            .dimension()
            .ok_or_else(|| Error::invalid(format!("signature `{}` has no elements", self.state)))?;
        if g == 0 {
            return Err(Error::invalid(format!("signature `{}` has zero-dimensional elements", self.state)));
        }
        for e in &self.elements {
            if e.len() != g {
                return Err(Error::DimensionMismatch { expected: g, actual: e.len() });
            }
        }
        if let Some(s) = &self.scales {
            if s.len() != g {
                return Err(Error::DimensionMismatch { expected: g, actual: s.len() });
            }
        }
        Ok(g)
    }
}

/// A live observation of the `g` sensor parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SensorReading(pub Vec<f64>);

/// Minimum RMS distance of a reading to each state.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceProfile {
    pub distances: Vec<f64>,
    pub nearest_element: Vec<usize>,
}

/// Distance to the closest element of `sig`, with that element's index
/// (first one on ties).
pub fn min_rms_distance(sig: &StateSignature, cv: &SensorReading) -> Result<(f64, usize)> {
    let g = sig.check()?;
    if cv.0.len() != g {
        return Err(Error::DimensionMismatch { expected: g, actual: cv.0.len() });
    }
    let mut best = (f64::INFINITY, 0);
    for (idx, e) in sig.elements.iter().enumerate() {
        let sq: f64 = e
            .iter()
            .zip(&cv.0)
            .enumerate()
            .map(|(l, (s, c))| {
                let w = sig.scales.as_ref().map_or(1.0, |sc| sc[l]);
                let d = (c - s) * w;
                d * d
            })
            .sum();
        let dist = (sq / g as f64).sqrt();
        if dist < best.0 {
            best = (dist, idx);
        }
    }
    Ok(best)
}

pub fn distance_profile(sigs: &[StateSignature], cv: &SensorReading) -> Result<DistanceProfile> {
    let mut distances = Vec::with_capacity(sigs.len());
    let mut nearest_element = Vec::with_capacity(sigs.len());
    let mut dim = None;
    for sig in sigs {
        let g = sig.check()?;
        if *dim.get_or_insert(g) != g {
            return Err(Error::DimensionMismatch { expected: dim.unwrap(), actual: g });
        }
        let (d, i) = min_rms_distance(sig, cv)?;
        distances.push(d);
        nearest_element.push(i);
    }
    Ok(DistanceProfile { distances, nearest_element })
}

/// Perception probabilities from per-state distances.
pub fn perception_from_distances(distances: &[f64]) -> Vec<f64> {
    let n = distances.len();
    if n == 1 {
        return vec![1.0];
    }
    let zeros = distances.iter().filter(|&&d| d == 0.0).count();
    if zeros > 0 {
        let share = 1.0 / zeros as f64;
        return distances.iter().map(|&d| if d == 0.0 { share } else { 0.0 }).collect();
    }
    let total: f64 = distances.iter().sum();
    let norm = total * (n - 1) as f64;
    distances.iter().map(|&d| (total - d) / norm).collect()
}

/// Probability of perceiving each signature's state given a reading.
pub fn perception_distribution(sigs: &[StateSignature], cv: &SensorReading) -> Result<Vec<f64>> {
    if sigs.is_empty() {
        return Err(Error::invalid("at least one state signature is required"));
    }
    let profile = distance_profile(sigs, cv)?;
    Ok(perception_from_distances(&profile.distances))
}

/// Error rows from labelled readings: row `j` is the mean perception
/// distribution over the readings taken while the true state was `j`.
/// Returned rows are dense over `sigs` order.
pub fn derive_error_rows(
    sigs: &[StateSignature],
    labelled: &BTreeMap<String, Vec<SensorReading>>,
) -> Result<Vec<Vec<f64>>> {
    let mut rows = Vec::with_capacity(sigs.len());
    for (j, sig) in sigs.iter().enumerate() {
        let readings = labelled
            .get(&sig.state)
            .filter(|r| !r.is_empty())
            .ok_or_else(|| Error::invalid(format!("no labelled readings for state `{}`", sig.state)))?;
        let mut row = vec![0.0; sigs.len()];
        for cv in readings {
            for (acc, p) in row.iter_mut().zip(perception_distribution(sigs, cv)?) {
                *acc += p;
            }
        }
        let n = readings.len() as f64;
        row.iter_mut().for_each(|p| *p /= n);
        if row[j] <= 0.0 {
            return Err(Error::Contract(format!(
                "state `{}` is never perceived from its own readings",
                sig.state
            )));
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Signature section of a configuration file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignatureFile {
    pub signatures: Vec<StateSignature>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reading: Option<SensorReading>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labelled_readings: Option<BTreeMap<String, Vec<SensorReading>>>,
}
