//! Stroboscopic trajectories, time-averaged order parameters and parameter
//! sweeps.
//!
//! All order parameters use the per-spin satellite magnetization
//! `M(nT)/N_sat` and start from the fully x-polarized state.

use serde::{Deserialize, Serialize};

use crate::axis::Axis;
use crate::drive::DriveParams;
use crate::error::{Result, SpinError};
use crate::floquet::FloquetOperator;
use crate::metrology;
use crate::observables::{magnetization_sat, Observation};
use crate::report::{csv_string, fmt_f64};
use crate::state::{Backend, BackendChoice, SpinState};

pub const DEFAULT_M_WINDOW: usize = 500;
pub const DEFAULT_O_WINDOW: usize = 1000;

#[derive(Debug, Clone, Serialize)]
pub struct Trajectory {
    pub params: DriveParams,
    pub n_sat: usize,
    pub backend: Backend,
    /// Free-form description of the initial state.
    pub initial: String,
    /// In time order; half-period records sit between their neighbours.
    pub records: Vec<Observation>,
}

impl Trajectory {
    /// Records at integer periods, starting with `n = 0`.
    pub fn stroboscopic(&self) -> impl Iterator<Item = &Observation> {
        self.records.iter().filter(|r| !r.half_period)
    }

    pub fn series(&self, f: impl Fn(&Observation) -> f64) -> Vec<f64> {
        self.stroboscopic().map(f).collect()
    }

    pub fn to_csv(&self) -> Result<String> {
        let header = [
            "t",
            "period_index",
            "half_period",
            "m_sat",
            "m_sat_per_spin",
            "m_central",
            "entropy",
            "fidelity_to_initial",
        ];
        csv_string(
            &header,
            self.records.iter().map(|r| {
                vec![
                    fmt_f64(r.time()),
                    r.period_index.to_string(),
                    r.half_period.to_string(),
                    fmt_f64(r.m_sat),
                    fmt_f64(r.m_sat_per_spin),
                    fmt_f64(r.m_central),
                    fmt_f64(r.entropy),
                    fmt_f64(r.fidelity_to_initial),
                ]
            }),
        )
    }
}

/// `|+x>^{⊗N} |+x>_c`.
pub fn x_polarized(n_sat: usize, backend: Backend) -> Result<SpinState> {
    SpinState::product(n_sat, Axis::PlusX, Axis::PlusX, backend)
}

/// Evolves `init` for `n_periods`, recording after every period and, when
/// `sample_half_periods` is set, also right after every kick.
pub fn run_trajectory(
    p: &DriveParams,
    init: &SpinState,
    n_periods: usize,
    sample_half_periods: bool,
) -> Result<Trajectory> {
    if n_periods == 0 {
        return Err(SpinError::Invalid("at least one period is required".into()));
    }
    let op = FloquetOperator::for_state(p, init)?;
    let mut state = init.clone();
    let per_period = if sample_half_periods { 2 } else { 1 };
    let mut records = Vec::with_capacity(1 + per_period * n_periods);
    records.push(Observation::measure(&state, init, 0, false)?);
    for n in 0..n_periods {
        op.kick(&mut state)?;
        if sample_half_periods {
            records.push(Observation::measure(&state, init, n, true)?);
        }
        op.interact(&mut state)?;
        records.push(Observation::measure(&state, init, n + 1, false)?);
    }
    Ok(Trajectory {
        params: p.clone(),
        n_sat: init.n_sat(),
        backend: init.backend(),
        initial: "custom".into(),
        records,
    })
}

/// [`run_trajectory`] from the x-polarized state.
pub fn run_x_polarized(
    p: &DriveParams,
    n_sat: usize,
    n_periods: usize,
    sample_half_periods: bool,
    backend: BackendChoice,
) -> Result<Trajectory> {
    let init = x_polarized(n_sat, backend.resolve(p, n_sat)?)?;
    let mut t = run_trajectory(p, &init, n_periods, sample_half_periods)?;
    t.initial = "+x satellites, +x central".into();
    Ok(t)
}

/// Per-spin `M(stride·n T)` for `n = 1..=count`, from the x-polarized state.
pub fn strobed_magnetization(
    p: &DriveParams,
    n_sat: usize,
    stride: usize,
    count: usize,
    backend: BackendChoice,
) -> Result<Vec<f64>> {
    if stride == 0 || count == 0 {
        return Err(SpinError::Invalid("stride and sample count must be positive".into()));
    }
    let op = FloquetOperator::new(p, n_sat, backend.resolve(p, n_sat)?)?;
    let mut state = x_polarized(n_sat, op.backend())?;
    let norm = n_sat as f64;
    (0..count)
        .map(|_| {
            op.steps(&mut state, stride)?;
            Ok(magnetization_sat(&state) / norm)
        })
        .collect()
}

/// `M̄ = (1/N) Σ_{n=1}^{N} M(2nT)/N_sat`.
pub fn time_avg_magnetization(
    p: &DriveParams,
    n_sat: usize,
    window: usize,
    backend: BackendChoice,
) -> Result<f64> {
    let m = strobed_magnetization(p, n_sat, 2, window, backend)?;
    Ok(mean(&m))
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrderParams {
    /// `Ō = Ō_DTC − Ō_DMF`.
    pub o_bar: f64,
    /// Average of `(−1)^n M(nT)`.
    pub o_dtc_bar: f64,
    /// Average of `M(nT)`.
    pub o_dmf_bar: f64,
    pub window: usize,
}

impl OrderParams {
    /// From per-spin `M(nT)` for `n = 1..=len`.
    pub fn from_series(m: &[f64]) -> Result<Self> {
        if m.is_empty() {
            return Err(SpinError::EmptySeries);
        }
        let dtc: Vec<f64> = m
            .iter()
            .enumerate()
            .map(|(i, x)| if (i + 1) % 2 == 0 { *x } else { -x })
            .collect();
        let o_dtc_bar = mean(&dtc);
        let o_dmf_bar = mean(m);
        Ok(Self {
            o_bar: o_dtc_bar - o_dmf_bar,
            o_dtc_bar,
            o_dmf_bar,
            window: m.len(),
        })
    }
}

/// `Ō` over periods `1..=window` of a recorded trajectory.
pub fn order_parameter_o(traj: &Trajectory, window: usize) -> Result<OrderParams> {
    if window == 0 {
        return Err(SpinError::Invalid("averaging window must be positive".into()));
    }
    let m: Vec<f64> = traj
        .stroboscopic()
        .filter(|r| r.period_index >= 1 && r.period_index <= window)
        .map(|r| r.m_sat_per_spin)
        .collect();
    if m.len() < window {
        return Err(SpinError::TooShort {
            needed: window,
            got: m.len(),
        });
    }
    OrderParams::from_series(&m)
}

/// `Ō` evolved directly from the x-polarized state without storing a trajectory.
pub fn order_parameter_o_for(
    p: &DriveParams,
    n_sat: usize,
    window: usize,
    backend: BackendChoice,
) -> Result<OrderParams> {
    OrderParams::from_series(&strobed_magnetization(p, n_sat, 1, window, backend)?)
}

/// Stride `α` and sample count `β` of the `Z̄` stroboscope.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZStroboscope {
    pub alpha: usize,
    pub beta: usize,
}

impl ZStroboscope {
    /// `α = 6, β = 200` for even `N_sat`; `α = 12, β = 100` for odd.
    pub fn for_parity(n_sat: usize) -> Self {
        if n_sat % 2 == 0 {
            Self { alpha: 6, beta: 200 }
        } else {
            Self {
                alpha: 12,
                beta: 100,
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZOrder {
    pub z_bar: f64,
    pub alpha: usize,
    pub beta: usize,
}

/// `Z̄ = (1/β) Σ_{n=1}^{β} (−1)^n M(αnT)/N_sat` with the parity defaults.
pub fn order_parameter_z(p: &DriveParams, n_sat: usize) -> Result<f64> {
    Ok(order_parameter_z_with(p, n_sat, ZStroboscope::for_parity(n_sat), BackendChoice::Auto)?.z_bar)
}

pub fn order_parameter_z_with(
    p: &DriveParams,
    n_sat: usize,
    strobe: ZStroboscope,
    backend: BackendChoice,
) -> Result<ZOrder> {
    let m = strobed_magnetization(p, n_sat, strobe.alpha, strobe.beta, backend)?;
    let z: Vec<f64> = m
        .iter()
        .enumerate()
        .map(|(i, x)| if (i + 1) % 2 == 0 { *x } else { -x })
        .collect();
    Ok(ZOrder {
        z_bar: mean(&z),
        alpha: strobe.alpha,
        beta: strobe.beta,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Quantity {
    #[serde(rename = "M_bar")]
    MBar,
    #[serde(rename = "O_bar")]
    OBar,
    #[serde(rename = "Z_bar")]
    ZBar,
    G,
}

impl Quantity {
    pub fn label(self) -> &'static str {
        match self {
            Quantity::MBar => "M_bar",
            Quantity::OBar => "O_bar",
            Quantity::ZBar => "Z_bar",
            Quantity::G => "G",
        }
    }
}

impl std::fmt::Display for Quantity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for Quantity {
    type Err = SpinError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('_', "").as_str() {
            "mbar" | "m" => Ok(Quantity::MBar),
            "obar" | "o" => Ok(Quantity::OBar),
            "zbar" | "z" => Ok(Quantity::ZBar),
            "g" | "qfi" => Ok(Quantity::G),
            other => Err(SpinError::Invalid(format!("unknown quantity '{other}'"))),
        }
    }
}

/// Inclusive, evenly spaced samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisRange {
    pub start: f64,
    pub end: f64,
    pub points: usize,
}

impl AxisRange {
    pub fn new(start: f64, end: f64, points: usize) -> Self {
        Self { start, end, points }
    }

    pub fn single(x: f64) -> Self {
        Self::new(x, x, 1)
    }

    pub fn validate(&self) -> Result<()> {
        if self.points == 0 {
            return Err(SpinError::Invalid("range needs at least one point".into()));
        }
        if !self.start.is_finite() || !self.end.is_finite() {
            return Err(SpinError::Invalid("range bounds must be finite".into()));
        }
        if self.points == 1 && self.start != self.end {
            return Err(SpinError::Invalid(
                "a single-point range must have equal bounds".into(),
            ));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.start];
        }
        let step = (self.end - self.start) / (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                if i + 1 == self.points {
                    self.end
                } else {
                    self.start + step * i as f64
                }
            })
            .collect()
    }
}

/// Averaging windows and QFI settings used by sweep cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSettings {
    pub m_window: usize,
    pub o_window: usize,
    /// `None` picks the parity defaults.
    pub z_strobe: Option<ZStroboscope>,
    pub qfi_periods: usize,
    pub delta: f64,
    pub backend: BackendChoice,
}

impl Default for SweepSettings {
    fn default() -> Self {
        Self {
            m_window: DEFAULT_M_WINDOW,
            o_window: DEFAULT_O_WINDOW,
            z_strobe: None,
            qfi_periods: 100,
            delta: metrology::DEFAULT_DELTA,
            backend: BackendChoice::Auto,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub lambda: AxisRange,
    pub g: AxisRange,
    pub n_sat: usize,
    pub quantity: Quantity,
    pub settings: SweepSettings,
}

impl SweepSpec {
    /// `λ ∈ [0, 4π]`, `g ∈ [0, 2π]`, 101 × 101.
    pub fn default_grid(n_sat: usize, quantity: Quantity) -> Self {
        use std::f64::consts::PI;
        Self {
            lambda: AxisRange::new(0.0, 4.0 * PI, 101),
            g: AxisRange::new(0.0, 2.0 * PI, 101),
            n_sat,
            quantity,
            settings: SweepSettings::default(),
        }
    }

    /// The selected quantity at one `(λ, g)` with `g_s = g_c = g`.
    pub fn evaluate(&self, lambda: f64, g: f64) -> Result<f64> {
        let p = DriveParams::uniform(lambda, g);
        let s = &self.settings;
        match self.quantity {
            Quantity::MBar => time_avg_magnetization(&p, self.n_sat, s.m_window, s.backend),
            Quantity::OBar => Ok(order_parameter_o_for(&p, self.n_sat, s.o_window, s.backend)?.o_bar),
            Quantity::ZBar => {
                let strobe = s.z_strobe.unwrap_or_else(|| ZStroboscope::for_parity(self.n_sat));
                Ok(order_parameter_z_with(&p, self.n_sat, strobe, s.backend)?.z_bar)
            }
            Quantity::G => {
                let point = metrology::QfiPoint {
                    lambda,
                    g,
                    n_periods: s.qfi_periods,
                    n_sat: self.n_sat,
                };
                metrology::qfi_matrix(&point, s.delta, s.backend)?
                    .g
                    .ok_or_else(|| SpinError::Invalid("G undefined: Fisher matrix has no positive trace".into()))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub lambda: f64,
    pub g: f64,
    pub value: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub spec: SweepSpec,
    /// Row-major: `λ` outer, `g` inner.
    pub cells: Vec<SweepCell>,
}

impl SweepGrid {
    pub fn cell(&self, i_lambda: usize, i_g: usize) -> &SweepCell {
        &self.cells[i_lambda * self.spec.g.points + i_g]
    }

    pub fn failures(&self) -> usize {
        self.cells.iter().filter(|c| c.value.is_none()).count()
    }

    /// Columns `lambda, g, n_sat, quantity, value, error`.
    pub fn to_csv(&self) -> Result<String> {
        let q = self.spec.quantity.label();
        let n = self.spec.n_sat.to_string();
        csv_string(
            &["lambda", "g", "n_sat", "quantity", "value", "error"],
            self.cells.iter().map(|c| {
                vec![
                    fmt_f64(c.lambda),
                    fmt_f64(c.g),
                    n.clone(),
                    q.to_string(),
                    c.value.map(fmt_f64).unwrap_or_default(),
                    c.error.clone().unwrap_or_default(),
                ]
            }),
        )
    }
}

/// Evaluates every cell; a failing cell is recorded and the sweep continues.
pub fn sweep_grid(spec: &SweepSpec) -> Result<SweepGrid> {
    spec.lambda.validate()?;
    spec.g.validate()?;
    if spec.n_sat == 0 {
        return Err(SpinError::NoSatellites);
    }
    let gs = spec.g.values();
    let coords: Vec<(f64, f64)> = spec
        .lambda
        .values()
        .into_iter()
        .flat_map(|l| gs.iter().map(move |&g| (l, g)))
        .collect();
    let eval = |&(lambda, g): &(f64, f64)| match spec.evaluate(lambda, g) {
        Ok(v) => SweepCell {
            lambda,
            g,
            value: Some(v),
            error: None,
        },
        Err(e) => SweepCell {
            lambda,
            g,
            value: None,
            error: Some(e.to_string()),
        },
    };
    #[cfg(feature = "parallel")]
    let cells = {
        use rayon::prelude::*;
        coords.par_iter().map(eval).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let cells = coords.iter().map(eval).collect();
    Ok(SweepGrid {
        spec: spec.clone(),
        cells,
    })
}
