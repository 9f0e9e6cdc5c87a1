//! Parameters of one drive cycle.
//!
//! During the first half period the spins precess in their local fields,
//! `H_d = 2(g_s Σ S_i^z + g_c S_c^z)`; during the second half the satellites
//! couple to the central spin through `H_0 = -2λ Σ S_i^x S_c^x`. The period is
//! fixed to one, so each half-period unitary is `exp(-i H / 2)`.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SpinError};

/// The drive period. Every time in this crate is a count of periods.
pub const PERIOD: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SatelliteFields {
    Uniform(f64),
    PerSpin(Vec<f64>),
}

impl SatelliteFields {
    pub fn is_uniform(&self) -> bool {
        match self {
            SatelliteFields::Uniform(_) => true,
            SatelliteFields::PerSpin(v) => v.windows(2).all(|w| w[0] == w[1]),
        }
    }

    /// The common field, if every satellite sees the same one.
    pub fn uniform_value(&self) -> Option<f64> {
        match self {
            SatelliteFields::Uniform(g) => Some(*g),
            SatelliteFields::PerSpin(v) if self.is_uniform() => v.first().copied(),
            SatelliteFields::PerSpin(_) => None,
        }
    }

    /// Field on satellite `i`.
    pub fn get(&self, i: usize) -> f64 {
        match self {
            SatelliteFields::Uniform(g) => *g,
            SatelliteFields::PerSpin(v) => v[i],
        }
    }

    pub(crate) fn check_len(&self, n_sat: usize) -> Result<()> {
        match self {
            SatelliteFields::PerSpin(v) if v.len() != n_sat => Err(SpinError::FieldLength {
                expected: n_sat,
                got: v.len(),
            }),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriveParams {
    /// Ising coupling between each satellite and the central spin.
    pub lambda: f64,
    pub g_sat: SatelliteFields,
    pub g_c: f64,
}

impl DriveParams {
    pub fn new(lambda: f64, g_sat: SatelliteFields, g_c: f64) -> Self {
        Self { lambda, g_sat, g_c }
    }

    /// `g_s = g_c = g`, the setting used for every phase diagram.
    pub fn uniform(lambda: f64, g: f64) -> Self {
        Self::new(lambda, SatelliteFields::Uniform(g), g)
    }

    pub fn with_fields(lambda: f64, g_sat: Vec<f64>, g_c: f64) -> Self {
        Self::new(lambda, SatelliteFields::PerSpin(g_sat), g_c)
    }

    pub fn period(&self) -> f64 {
        PERIOD
    }
}
