//! Magnetizations, central-spin entanglement, fidelities and reference cats.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::axis::Axis;
use crate::dicke;
use crate::error::{Result, SpinError};
use crate::state::{Backend, SpinState};

/// Stroboscopic measurement record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub period_index: usize,
    /// Taken right after the kick of period `period_index + 1`, i.e. at
    /// `t = period_index + ½`.
    pub half_period: bool,
    pub m_sat: f64,
    pub m_sat_per_spin: f64,
    pub m_central: f64,
    pub entropy: f64,
    pub fidelity_to_initial: f64,
}

impl Observation {
    pub fn measure(
        state: &SpinState,
        initial: &SpinState,
        period_index: usize,
        half_period: bool,
    ) -> Result<Self> {
        let m_sat = magnetization_sat(state);
        Ok(Self {
            period_index,
            half_period,
            m_sat,
            m_sat_per_spin: m_sat / state.n_sat() as f64,
            m_central: magnetization_central(state),
            entropy: entanglement_entropy_central(state),
            fidelity_to_initial: fidelity(state, initial)?,
        })
    }

    pub fn time(&self) -> f64 {
        self.period_index as f64 + if self.half_period { 0.5 } else { 0.0 }
    }
}

/// `Σ_i <S_i^x>`.
pub fn magnetization_sat(state: &SpinState) -> f64 {
    let n = state.n_sat();
    let a = state.amplitudes();
    match state.backend() {
        Backend::Full => (0..n)
            .map(|q| {
                let stride = 1usize << q;
                a.chunks_exact(2 * stride)
                    .map(|block| {
                        let (lo, hi) = block.split_at(stride);
                        lo.iter().zip(hi).map(|(x, y)| (x.conj() * y).re).sum::<f64>()
                    })
                    .sum::<f64>()
            })
            .sum(),
        Backend::Symmetric => (1..=n)
            .map(|k| {
                let w = dicke::jx_offdiag(n, k);
                let pair = |c: usize| (a[2 * (k - 1) + c].conj() * a[2 * k + c]).re;
                2.0 * w * (pair(0) + pair(1))
            })
            .sum(),
    }
}

/// `<S_c^x>`.
pub fn magnetization_central(state: &SpinState) -> f64 {
    let rho = central_reduced_density(state);
    rho[0][1].re
}

/// 2×2 reduced density matrix of the central spin in the z basis.
pub fn central_reduced_density(state: &SpinState) -> [[Complex64; 2]; 2] {
    let a = state.amplitudes();
    let mut r00 = 0.0;
    let mut r11 = 0.0;
    let mut r01 = Complex64::new(0.0, 0.0);
    let mut add = |up: Complex64, down: Complex64| {
        r00 += up.norm_sqr();
        r11 += down.norm_sqr();
        r01 += up * down.conj();
    };
    match state.backend() {
        Backend::Full => {
            let (lo, hi) = a.split_at(a.len() / 2);
            lo.iter().zip(hi).for_each(|(x, y)| add(*x, *y));
        }
        Backend::Symmetric => a.chunks_exact(2).for_each(|p| add(p[0], p[1])),
    }
    [
        [Complex64::new(r00, 0.0), r01],
        [r01.conj(), Complex64::new(r11, 0.0)],
    ]
}

/// Von Neumann entropy of the central spin, in nats.
pub fn entanglement_entropy_central(state: &SpinState) -> f64 {
    let rho = central_reduced_density(state);
    let diff = rho[0][0].re - rho[1][1].re;
    let r = (diff * diff + 4.0 * rho[0][1].norm_sqr()).sqrt().min(1.0);
    [0.5 * (1.0 + r), 0.5 * (1.0 - r)]
        .into_iter()
        .map(|p| p.clamp(0.0, 1.0))
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.ln())
        .sum()
}

/// `|<a|b>|²`; mixed backends are compared in the symmetric sector.
pub fn fidelity(a: &SpinState, b: &SpinState) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr().min(1.0))
}

/// Normalized superposition `Σ coef · |sat>^{⊗N} |central>`.
pub fn superpose(
    n_sat: usize,
    terms: &[(Complex64, Axis, Axis)],
    backend: Backend,
) -> Result<SpinState> {
    let mut acc: Option<Vec<Complex64>> = None;
    for &(coef, sat, central) in terms {
        let s = SpinState::product(n_sat, sat, central, backend)?;
        let v = acc.get_or_insert_with(|| vec![Complex64::new(0.0, 0.0); s.dim()]);
        for (x, y) in v.iter_mut().zip(s.amplitudes()) {
            *x += coef * y;
        }
    }
    let amps = acc.ok_or_else(|| SpinError::Invalid("empty superposition".into()))?;
    SpinState::from_amplitudes(n_sat, backend, amps)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// `(1/√2)[|+x>^{⊗N}|±x>_c + α |-x>^{⊗N}|∓x>_c]`, `±` given by `branch`.
pub fn bell_cat_state(n_sat: usize, branch: Sign, alpha: Complex64) -> Result<SpinState> {
    let (c1, c2) = match branch {
        Sign::Plus => (Axis::PlusX, Axis::MinusX),
        Sign::Minus => (Axis::MinusX, Axis::PlusX),
    };
    superpose(
        n_sat,
        &[
            (Complex64::new(1.0, 0.0), Axis::PlusX, c1),
            (alpha, Axis::MinusX, c2),
        ],
        Backend::Symmetric,
    )
}

/// `(1/√2)[|+z>^{⊗N} ± |-z>^{⊗N}] |-x>_c`.
pub fn satellite_cat_state(n_sat: usize, relative: Sign) -> Result<SpinState> {
    superpose(
        n_sat,
        &[
            (Complex64::new(1.0, 0.0), Axis::PlusZ, Axis::MinusX),
            (Complex64::new(relative.value(), 0.0), Axis::MinusZ, Axis::MinusX),
        ],
        Backend::Symmetric,
    )
}

/// Smallest lag `p ≥ 1` with `|x[n+p] − x[n]| ≤ tol` for every `n`, searched
/// up to a third of the series length.
pub fn detect_period(series: &[f64], tol: f64) -> Result<Option<usize>> {
    if series.is_empty() {
        return Err(SpinError::EmptySeries);
    }
    Ok((1..=series.len() / 3).find(|&p| {
        series
            .iter()
            .zip(&series[p..])
            .all(|(a, b)| (b - a).abs() <= tol)
    }))
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{LN_2, PI};

    use super::*;

    fn i() -> Complex64 {
        Complex64::new(0.0, 1.0)
    }

    #[test]
    fn x_polarized_magnetizations() {
        for backend in [Backend::Full, Backend::Symmetric] {
            let s = SpinState::product(7, Axis::PlusX, Axis::PlusX, backend).unwrap();
            assert!((magnetization_sat(&s) - 3.5).abs() < 1e-12);
            assert!((magnetization_central(&s) - 0.5).abs() < 1e-14);
            assert!(entanglement_entropy_central(&s).abs() < 1e-12);
        }
        let s = SpinState::product(19, Axis::PlusX, Axis::PlusX, Backend::Symmetric).unwrap();
        assert!((magnetization_sat(&s) - 9.5).abs() < 1e-12);
    }

    #[test]
    fn product_states_have_zero_entropy() {
        for sat in Axis::ALL {
            for c in Axis::ALL {
                let s = SpinState::product(3, sat, c, Backend::Full).unwrap();
                assert!(entanglement_entropy_central(&s) < 1e-12);
            }
        }
    }

    #[test]
    fn bell_cats_are_maximally_entangled() {
        for branch in [Sign::Plus, Sign::Minus] {
            for alpha in [i(), -i()] {
                let s = bell_cat_state(6, branch, alpha).unwrap();
                assert!((s.norm_sqr() - 1.0).abs() < 1e-14);
                assert!((entanglement_entropy_central(&s) - LN_2).abs() < 1e-12);
                assert!(magnetization_sat(&s).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn satellite_cat_properties() {
        let s = satellite_cat_state(5, Sign::Minus).unwrap();
        assert!(magnetization_sat(&s).abs() < 1e-12);
        assert!(entanglement_entropy_central(&s).abs() < 1e-12);
        assert!((magnetization_central(&s) + 0.5).abs() < 1e-14);
        let plus = satellite_cat_state(5, Sign::Plus).unwrap();
        assert!(fidelity(&s, &plus).unwrap() < 1e-14);
    }

    #[test]
    fn fidelity_basics() {
        let a = SpinState::product(4, Axis::PlusX, Axis::PlusX, Backend::Full).unwrap();
        let b = SpinState::product(4, Axis::MinusX, Axis::MinusX, Backend::Full).unwrap();
        assert!((fidelity(&a, &a).unwrap() - 1.0).abs() < 1e-14);
        assert!(fidelity(&a, &b).unwrap() < 1e-28);
        let c = SpinState::product(5, Axis::PlusX, Axis::PlusX, Backend::Full).unwrap();
        assert!(matches!(fidelity(&a, &c), Err(SpinError::DimensionMismatch(_))));
    }

    #[test]
    fn period_detection() {
        let alt: Vec<f64> = (0..30).map(|n| if n % 2 == 0 { 0.5 } else { -0.5 }).collect();
        assert_eq!(detect_period(&alt, 1e-12).unwrap(), Some(2));
        let cos: Vec<f64> = (0..60).map(|n| (PI * n as f64 / 6.0).cos()).collect();
        assert_eq!(detect_period(&cos, 1e-9).unwrap(), Some(12));
        let ramp: Vec<f64> = (0..30).map(|n| n as f64).collect();
        assert_eq!(detect_period(&ramp, 1e-9).unwrap(), None);
        assert_eq!(detect_period(&[], 1e-9), Err(SpinError::EmptySeries));
        assert_eq!(detect_period(&[1.0, 1.0, 1.0], 0.0).unwrap(), Some(1));
    }
}
