//! Two-parameter quantum Fisher information in `(λ, g)` and power-law fits.
//!
//! Derivative states come from central differences of states evolved from
//! the x-polarized start with `g_s = g_c = g`. The scalar figure of merit is
//! `G = det F / tr F`, the inverse of the equally weighted bound
//! `δλ² + δg² ≥ tr F⁻¹ = 1/G`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::drive::DriveParams;
use crate::error::{Result, SpinError};
use crate::floquet::FloquetOperator;
use crate::protocol::{order_parameter_z_with, x_polarized, ZStroboscope};
use crate::report::{csv_string, fmt_f64};
use crate::state::{Backend, BackendChoice, SpinState};

pub const DEFAULT_DELTA: f64 = 1e-4;

/// `det F < SINGULAR_RTOL · (tr F)²` flags the matrix as singular.
pub const SINGULAR_RTOL: f64 = 1e-12;

/// Fits with a lower `r²` are reported but not trusted.
pub const RELIABLE_R_SQUARED: f64 = 0.95;

/// `Z̄` above this marks a scan point as higher-order time-crystalline.
pub const HODTC_Z_THRESHOLD: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QfiPoint {
    pub lambda: f64,
    pub g: f64,
    pub n_periods: usize,
    pub n_sat: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QfiMatrix {
    pub point: QfiPoint,
    pub delta: f64,
    pub backend: Backend,
    pub f_ll: f64,
    pub f_gg: f64,
    pub f_lg: f64,
    pub f_gl: f64,
    /// `None` only when `tr F ≤ 0`.
    pub g: Option<f64>,
    pub singular: bool,
}

impl QfiMatrix {
    pub fn trace(&self) -> f64 {
        self.f_ll + self.f_gg
    }

    pub fn determinant(&self) -> f64 {
        self.f_ll * self.f_gg - self.f_lg * self.f_gl
    }
}

/// `(G, singular)` for the given entries.
pub fn bound_g(f_ll: f64, f_gg: f64, f_lg: f64, f_gl: f64) -> (Option<f64>, bool) {
    let tr = f_ll + f_gg;
    let det = f_ll * f_gg - f_lg * f_gl;
    let singular = det < SINGULAR_RTOL * tr * tr;
    let g = (tr > 0.0).then(|| det / tr);
    (g, singular)
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Fisher matrix from the base state and its four displaced neighbours,
/// ordered `[ψ, ψ(λ+δ), ψ(λ−δ), ψ(g+δ), ψ(g−δ)]`.
fn fisher_entries(states: &[SpinState; 5], delta: f64) -> [f64; 4] {
    let psi = states[0].amplitudes();
    let diff = |plus: &SpinState, minus: &SpinState| -> Vec<Complex64> {
        plus.amplitudes()
            .iter()
            .zip(minus.amplitudes())
            .map(|(a, b)| (a - b) / (2.0 * delta))
            .collect()
    };
    let dl = diff(&states[1], &states[2]);
    let dg = diff(&states[3], &states[4]);
    let f = |a: &[Complex64], b: &[Complex64]| {
        4.0 * (dot(a, b) - dot(a, psi) * dot(psi, b)).re
    };
    [f(&dl, &dl), f(&dg, &dg), f(&dl, &dg), f(&dg, &dl)]
}

/// Fisher matrices at each of `periods` (strictly increasing), evolving the
/// five stencil states once.
pub fn qfi_series(
    lambda: f64,
    g: f64,
    n_sat: usize,
    periods: &[usize],
    delta: f64,
    backend: BackendChoice,
) -> Result<Vec<QfiMatrix>> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(SpinError::InvalidStep(delta));
    }
    if periods.is_empty() || periods.windows(2).any(|w| w[1] <= w[0]) {
        return Err(SpinError::Invalid(
            "period list must be non-empty and strictly increasing".into(),
        ));
    }
    let stencil = [
        (lambda, g),
        (lambda + delta, g),
        (lambda - delta, g),
        (lambda, g + delta),
        (lambda, g - delta),
    ];
    let params = stencil.map(|(l, gg)| DriveParams::uniform(l, gg));
    let resolved = backend.resolve(&params[0], n_sat)?;
    let ops = params
        .iter()
        .map(|p| FloquetOperator::new(p, n_sat, resolved))
        .collect::<Result<Vec<_>>>()?;
    let init = x_polarized(n_sat, resolved)?;
    let mut states: [SpinState; 5] = std::array::from_fn(|_| init.clone());

    let mut out = Vec::with_capacity(periods.len());
    let mut done = 0;
    for &n in periods {
        let advance = n - done;
        let step = |(op, s): (&FloquetOperator, &mut SpinState)| op.steps(s, advance);
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            ops.par_iter().zip(states.par_iter_mut()).try_for_each(step)?;
        }
        #[cfg(not(feature = "parallel"))]
        ops.iter().zip(states.iter_mut()).try_for_each(step)?;
        done = n;

        let [f_ll, f_gg, f_lg, f_gl] = fisher_entries(&states, delta);
        let (gv, singular) = bound_g(f_ll, f_gg, f_lg, f_gl);
        out.push(QfiMatrix {
            point: QfiPoint {
                lambda,
                g,
                n_periods: n,
                n_sat,
            },
            delta,
            backend: resolved,
            f_ll,
            f_gg,
            f_lg,
            f_gl,
            g: gv,
            singular,
        });
    }
    Ok(out)
}

pub fn qfi_matrix(point: &QfiPoint, delta: f64, backend: BackendChoice) -> Result<QfiMatrix> {
    let mut v = qfi_series(
        point.lambda,
        point.g,
        point.n_sat,
        &[point.n_periods],
        delta,
        backend,
    )?;
    Ok(v.remove(0))
}

/// Columns `lambda, g, n_periods, n_sat, F_ll, F_gg, F_lg, G, delta`.
pub fn qfi_csv(rows: &[QfiMatrix]) -> Result<String> {
    csv_string(
        &["lambda", "g", "n_periods", "n_sat", "F_ll", "F_gg", "F_lg", "G", "delta"],
        rows.iter().map(|m| {
            vec![
                fmt_f64(m.point.lambda),
                fmt_f64(m.point.g),
                m.point.n_periods.to_string(),
                m.point.n_sat.to_string(),
                fmt_f64(m.f_ll),
                fmt_f64(m.f_gg),
                fmt_f64(m.f_lg),
                m.g.map(fmt_f64).unwrap_or_default(),
                fmt_f64(m.delta),
            ]
        }),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub exponent: f64,
    pub prefactor: f64,
    pub r_squared: f64,
    /// `(size, value)` pairs the fit used.
    pub points: Vec<(f64, f64)>,
    /// `r² ≥ RELIABLE_R_SQUARED`.
    pub reliable: bool,
}

/// Least squares of `ln value = ln prefactor + exponent · ln size`.
pub fn scaling_fit(points: &[(f64, f64)]) -> Result<ScalingFit> {
    if points.len() < 4 {
        return Err(SpinError::InsufficientPoints {
            needed: 4,
            got: points.len(),
        });
    }
    if let Some(&(s, v)) = points.iter().find(|(s, v)| !(*s > 0.0) || !(*v > 0.0)) {
        return Err(SpinError::NonPositive(if s > 0.0 { v } else { s }));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(SpinError::Invalid("fit needs at least two distinct sizes".into()));
    }
    let exponent = sxy / sxx;
    let intercept = my - exponent * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - exponent * x).powi(2))
        .sum();
    let r_squared = if syy == 0.0 { 1.0 } else { (1.0 - ss_res / syy).clamp(0.0, 1.0) };
    Ok(ScalingFit {
        exponent,
        prefactor: intercept.exp(),
        r_squared,
        points: points.to_vec(),
        reliable: r_squared >= RELIABLE_R_SQUARED,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    HoDtc,
    NonDtc,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub lambda: f64,
    pub qfi: Option<QfiMatrix>,
    pub z_bar: Option<f64>,
    pub regime: Regime,
    pub error: Option<String>,
}

impl ScanPoint {
    pub fn g_value(&self) -> Option<f64> {
        self.qfi.and_then(|q| q.g)
    }
}

/// `G(λ)` at fixed `g`, each point classified by its `Z̄`.
pub fn qfi_lambda_scan(
    lambdas: &[f64],
    g: f64,
    n_periods: usize,
    n_sat: usize,
    delta: f64,
    backend: BackendChoice,
) -> Vec<ScanPoint> {
    let eval = |&lambda: &f64| {
        let point = QfiPoint {
            lambda,
            g,
            n_periods,
            n_sat,
        };
        let qfi = qfi_matrix(&point, delta, backend);
        let z = order_parameter_z_with(
            &DriveParams::uniform(lambda, g),
            n_sat,
            ZStroboscope::for_parity(n_sat),
            backend,
        )
        .map(|z| z.z_bar);
        let regime = match &z {
            Ok(z) if *z >= HODTC_Z_THRESHOLD => Regime::HoDtc,
            Ok(_) => Regime::NonDtc,
            Err(_) => Regime::Unknown,
        };
        let error = qfi
            .as_ref()
            .err()
            .or(z.as_ref().err())
            .map(|e| e.to_string());
        ScanPoint {
            lambda,
            qfi: qfi.ok(),
            z_bar: z.ok(),
            regime,
            error,
        }
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        lambdas.par_iter().map(eval).collect()
    }
    #[cfg(not(feature = "parallel"))]
    lambdas.iter().map(eval).collect()
}

/// QFI columns plus `z_bar, regime, error`.
pub fn scan_csv(points: &[ScanPoint]) -> Result<String> {
    csv_string(
        &[
            "lambda", "g", "n_periods", "n_sat", "F_ll", "F_gg", "F_lg", "G", "delta", "z_bar",
            "regime", "error",
        ],
        points.iter().map(|p| {
            let mut row = match &p.qfi {
                Some(m) => vec![
                    fmt_f64(m.point.lambda),
                    fmt_f64(m.point.g),
                    m.point.n_periods.to_string(),
                    m.point.n_sat.to_string(),
                    fmt_f64(m.f_ll),
                    fmt_f64(m.f_gg),
                    fmt_f64(m.f_lg),
                    m.g.map(fmt_f64).unwrap_or_default(),
                    fmt_f64(m.delta),
                ],
                None => {
                    let mut r = vec![fmt_f64(p.lambda)];
                    r.resize(9, String::new());
                    r
                }
            };
            row.push(p.z_bar.map(fmt_f64).unwrap_or_default());
            row.push(
                match p.regime {
                    Regime::HoDtc => "ho-dtc",
                    Regime::NonDtc => "non-dtc",
                    Regime::Unknown => "unknown",
                }
                .into(),
            );
            row.push(p.error.clone().unwrap_or_default());
            row
        }),
    )
}

/// Interior strict local maxima and minima, ignoring exact plateaus.
pub fn count_local_extrema(values: &[f64]) -> usize {
    let slopes: Vec<f64> = values
        .windows(2)
        .map(|w| w[1] - w[0])
        .filter(|d| *d != 0.0)
        .collect();
    slopes
        .windows(2)
        .filter(|w| (w[0] > 0.0) != (w[1] > 0.0))
        .count()
}
