//! Pure states of one central spin plus `N` satellites.
//!
//! Two storage layouts are supported:
//!
//! * [`Backend::Full`]: all `2^(N+1)` tensor-product amplitudes. Satellite `i`
//!   sits on bit `i` of the index and the central spin on bit `N`; a clear bit
//!   is `|+z>`.
//! * [`Backend::Symmetric`]: the permutation-symmetric satellite sector,
//!   `|k> ⊗ |c>` stored at index `2k + c`, where `k` counts satellites in
//!   `|-z>` and `c` is the central spin's z-bit.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::axis::Axis;
use crate::dicke;
use crate::drive::DriveParams;
use crate::error::{Result, SpinError};

/// Largest satellite count the full backend will allocate (2^25 amplitudes).
pub const MAX_FULL_SATELLITES: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Full,
    Symmetric,
}

/// Backend requested by a caller; `Auto` is resolved per run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendChoice {
    #[default]
    Auto,
    Full,
    Symmetric,
}

impl BackendChoice {
    /// `Auto` switches to the symmetric backend above this many satellites
    /// when the fields allow it.
    pub const AUTO_SYMMETRIC_ABOVE: usize = 14;

    pub fn resolve(self, params: &DriveParams, n_sat: usize) -> Result<Backend> {
        let uniform = params.g_sat.is_uniform();
        let backend = match self {
            BackendChoice::Full => Backend::Full,
            BackendChoice::Symmetric if !uniform => return Err(SpinError::NonUniformFields),
            BackendChoice::Symmetric => Backend::Symmetric,
            BackendChoice::Auto if uniform && n_sat > Self::AUTO_SYMMETRIC_ABOVE => {
                Backend::Symmetric
            }
            BackendChoice::Auto => Backend::Full,
        };
        dimension(n_sat, backend)?;
        Ok(backend)
    }
}

impl std::str::FromStr for BackendChoice {
    type Err = SpinError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "auto" => Ok(BackendChoice::Auto),
            "full" => Ok(BackendChoice::Full),
            "symmetric" | "dicke" => Ok(BackendChoice::Symmetric),
            other => Err(SpinError::Invalid(format!("unknown backend '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpinState {
    n_sat: usize,
    backend: Backend,
    amps: Vec<Complex64>,
}

impl SpinState {
    /// Wraps raw amplitudes, normalizing them.
    pub fn from_amplitudes(n_sat: usize, backend: Backend, amps: Vec<Complex64>) -> Result<Self> {
        if n_sat == 0 {
            return Err(SpinError::NoSatellites);
        }
        let dim = dimension(n_sat, backend)?;
        if amps.len() != dim {
            return Err(SpinError::DimensionMismatch(format!(
                "expected {dim} amplitudes, got {}",
                amps.len()
            )));
        }
        let mut s = Self { n_sat, backend, amps };
        let n = s.norm_sqr();
        if n == 0.0 || !n.is_finite() {
            return Err(SpinError::Invalid("state has zero or non-finite norm".into()));
        }
        s.scale(1.0 / n.sqrt());
        Ok(s)
    }

    /// `|sat_axis>^{⊗N} ⊗ |central_axis>`, phase fixed so the first nonzero
    /// amplitude is real and positive.
    pub fn product(
        n_sat: usize,
        sat_axis: Axis,
        central_axis: Axis,
        backend: Backend,
    ) -> Result<Self> {
        if n_sat == 0 {
            return Err(SpinError::NoSatellites);
        }
        let c = central_axis.amplitudes();
        let amps = match backend {
            Backend::Full => {
                dimension(n_sat, backend)?;
                let s = sat_axis.amplitudes();
                let mut v = vec![Complex64::new(1.0, 0.0)];
                for q in 0..=n_sat {
                    let a = if q < n_sat { s } else { c };
                    let mut next = Vec::with_capacity(v.len() * 2);
                    next.extend(v.iter().map(|x| x * a[0]));
                    next.extend(v.iter().map(|x| x * a[1]));
                    v = next;
                }
                v
            }
            Backend::Symmetric => {
                let d = dicke::product_amplitudes(n_sat, sat_axis);
                d.iter().flat_map(|x| [x * c[0], x * c[1]]).collect()
            }
        };
        let mut s = Self { n_sat, backend, amps };
        s.canonicalize_phase();
        Ok(s)
    }

    pub fn n_sat(&self) -> usize {
        self.n_sat
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub(crate) fn scale(&mut self, f: f64) {
        for a in &mut self.amps {
            *a *= f;
        }
    }

    pub fn normalize(&mut self) {
        let n = self.norm_sqr().sqrt();
        if n > 0.0 {
            self.scale(1.0 / n);
        }
    }

    /// Rotates the global phase so the first non-negligible amplitude is
    /// real and positive.
    pub fn canonicalize_phase(&mut self) {
        let max = self.amps.iter().map(|a| a.norm()).fold(0.0, f64::max);
        if let Some(first) = self.amps.iter().find(|a| a.norm() > 1e-12 * max) {
            let rot = first.conj() / first.norm();
            for a in &mut self.amps {
                *a *= rot;
            }
        }
    }

    /// `<self|other>`, converting a full-backend operand to the symmetric
    /// sector when the backends differ.
    pub fn inner(&self, other: &SpinState) -> Result<Complex64> {
        if self.n_sat != other.n_sat {
            return Err(SpinError::DimensionMismatch(format!(
                "{} vs {} satellites",
                self.n_sat, other.n_sat
            )));
        }
        let dot = |a: &[Complex64], b: &[Complex64]| -> Complex64 {
            a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
        };
        match (self.backend, other.backend) {
            (x, y) if x == y => Ok(dot(&self.amps, &other.amps)),
            (Backend::Full, Backend::Symmetric) => {
                Ok(dot(&symmetric_components(self), &other.amps))
            }
            _ => Ok(dot(&self.amps, &symmetric_components(other))),
        }
    }

    /// Embeds a symmetric-backend state into the full tensor basis.
    pub fn to_full(&self) -> Result<SpinState> {
        match self.backend {
            Backend::Full => Ok(self.clone()),
            Backend::Symmetric => {
                let n = self.n_sat;
                let dim = dimension(n, Backend::Full)?;
                let norms: Vec<f64> = (0..=n).map(|k| dicke::binomial(n, k).sqrt()).collect();
                let sat_mask = (1usize << n) - 1;
                let amps = (0..dim)
                    .map(|idx| {
                        let k = (idx & sat_mask).count_ones() as usize;
                        let c = idx >> n;
                        self.amps[2 * k + c] / norms[k]
                    })
                    .collect();
                Ok(SpinState { n_sat: n, backend: Backend::Full, amps })
            }
        }
    }

    /// Symmetric-sector part of a full state, renormalized, together with the
    /// weight it carried.
    pub fn project_to_symmetric(&self) -> Result<SymmetricProjection> {
        match self.backend {
            Backend::Symmetric => Ok(SymmetricProjection {
                state: self.clone(),
                symmetric_weight: 1.0,
            }),
            Backend::Full => {
                let amps = symmetric_components(self);
                let weight: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
                if weight <= 1e-300 {
                    return Err(SpinError::NoSymmetricWeight);
                }
                let mut state = SpinState {
                    n_sat: self.n_sat,
                    backend: Backend::Symmetric,
                    amps,
                };
                state.scale(1.0 / weight.sqrt());
                Ok(SymmetricProjection {
                    state,
                    symmetric_weight: weight,
                })
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricProjection {
    pub state: SpinState,
    pub symmetric_weight: f64,
}

impl SymmetricProjection {
    /// Weight in non-symmetric sectors.
    pub fn lost_weight(&self) -> f64 {
        (1.0 - self.symmetric_weight).max(0.0)
    }
}

/// Unnormalized Dicke components `<k, c|ψ>` of a full-backend state.
fn symmetric_components(state: &SpinState) -> Vec<Complex64> {
    let n = state.n_sat;
    let sat_mask = (1usize << n) - 1;
    let mut out = vec![Complex64::new(0.0, 0.0); 2 * (n + 1)];
    for (idx, a) in state.amps.iter().enumerate() {
        let k = (idx & sat_mask).count_ones() as usize;
        let c = idx >> n;
        out[2 * k + c] += a;
    }
    for k in 0..=n {
        let s = dicke::binomial(n, k).sqrt();
        out[2 * k] /= s;
        out[2 * k + 1] /= s;
    }
    out
}

pub(crate) fn dimension(n_sat: usize, backend: Backend) -> Result<usize> {
    match backend {
        Backend::Full if n_sat > MAX_FULL_SATELLITES => Err(SpinError::FullBackendTooLarge {
            max: MAX_FULL_SATELLITES,
            got: n_sat,
        }),
        Backend::Full => Ok(1usize << (n_sat + 1)),
        Backend::Symmetric => Ok(2 * (n_sat + 1)),
    }
}

/// Convenience alias for [`SpinState::product`].
pub fn new_product_state(
    n_sat: usize,
    sat_axis: Axis,
    central_axis: Axis,
    backend: Backend,
) -> Result<SpinState> {
    SpinState::product(n_sat, sat_axis, central_axis, backend)
}

/// Convenience alias for [`SpinState::project_to_symmetric`].
pub fn project_full_to_symmetric(state: &SpinState) -> Result<SymmetricProjection> {
    state.project_to_symmetric()
}
