use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hire iff the observed signal is at least `theta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdPolicy {
    pub theta: f64,
}

impl ThresholdPolicy {
    pub fn new(theta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&theta) {
            return Err(Error::InvalidArgument(format!("threshold {theta} outside [0, 1]")));
        }
        Ok(Self { theta })
    }
}

/// One threshold per group.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolicyPair {
    pub theta_maj: f64,
    pub theta_min: f64,
}

impl PolicyPair {
    pub fn new(theta_maj: f64, theta_min: f64) -> Self {
        Self { theta_maj, theta_min }
    }

    pub fn uniform(theta: f64) -> Self {
        Self::new(theta, theta)
    }

    pub fn swapped(&self) -> Self {
        Self::new(self.theta_min, self.theta_maj)
    }

    pub fn get(&self, group: Group) -> f64 {
        match group {
            Group::Maj => self.theta_maj,
            Group::Min => self.theta_min,
        }
    }

    pub fn with(&self, group: Group, theta: f64) -> Self {
        match group {
            Group::Maj => Self::new(theta, self.theta_min),
            Group::Min => Self::new(self.theta_maj, theta),
        }
    }

    /// Largest coordinate-wise distance to `other`.
    pub fn distance(&self, other: &PolicyPair) -> f64 {
        (self.theta_maj - other.theta_maj)
            .abs()
            .max((self.theta_min - other.theta_min).abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Group {
    Maj,
    Min,
}

impl Group {
    pub const BOTH: [Group; 2] = [Group::Maj, Group::Min];
}
