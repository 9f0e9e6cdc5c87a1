//! Browser bindings for the demo page in `www/`.
//!
//! Each export returns a flat `Float64Array`; the page knows the layout.
//! The plain functions are what the tests exercise, the `#[wasm_bindgen]`
//! wrappers only convert errors to strings.

use central_spin::metrology::{qfi_lambda_scan, DEFAULT_DELTA};
use central_spin::protocol::{run_x_polarized, AxisRange, SweepSettings};
use central_spin::{sweep_grid, BackendChoice, DriveParams, Quantity, SweepSpec};
use wasm_bindgen::prelude::*;

/// Largest system the page will attempt; the symmetric backend keeps this cheap.
pub const MAX_SATELLITES: usize = 400;

fn check_size(n_sat: usize) -> Result<(), String> {
    if n_sat == 0 || n_sat > MAX_SATELLITES {
        return Err(format!("N_sat must be in 1..={MAX_SATELLITES}"));
    }
    Ok(())
}

/// Rows of `[t, M/N_sat, M_c, S]` from the x-polarized state, half periods included.
pub fn trajectory_rows(n_sat: usize, lambda: f64, g: f64, periods: usize) -> Result<Vec<f64>, String> {
    check_size(n_sat)?;
    let p = DriveParams::uniform(lambda, g);
    let t = run_x_polarized(&p, n_sat, periods, true, BackendChoice::Auto).map_err(|e| e.to_string())?;
    Ok(t.records
        .iter()
        .flat_map(|r| [r.time(), r.m_sat_per_spin, r.m_central, r.entropy])
        .collect())
}

/// Row-major `λ × g` map of a sweep quantity; failed cells are NaN.
pub fn phase_map_values(
    n_sat: usize,
    quantity: &str,
    lambda_points: usize,
    g_points: usize,
) -> Result<Vec<f64>, String> {
    use std::f64::consts::PI;
    check_size(n_sat)?;
    let quantity: Quantity = quantity.parse().map_err(|e: central_spin::SpinError| e.to_string())?;
    let spec = SweepSpec {
        lambda: AxisRange::new(0.0, 4.0 * PI, lambda_points),
        g: AxisRange::new(0.0, 2.0 * PI, g_points),
        n_sat,
        quantity,
        settings: SweepSettings {
            backend: BackendChoice::Symmetric,
            ..SweepSettings::default()
        },
    };
    let grid = sweep_grid(&spec).map_err(|e| e.to_string())?;
    Ok(grid.cells.iter().map(|c| c.value.unwrap_or(f64::NAN)).collect())
}

/// Pairs `[λ, G]` along `λ ∈ [0.2π, 1.8π]`; G is NaN where undefined.
pub fn g_scan_values(n_sat: usize, g: f64, periods: usize, points: usize) -> Result<Vec<f64>, String> {
    use std::f64::consts::PI;
    check_size(n_sat)?;
    let lambdas = AxisRange::new(0.2 * PI, 1.8 * PI, points);
    lambdas.validate().map_err(|e| e.to_string())?;
    let scan = qfi_lambda_scan(
        &lambdas.values(),
        g,
        periods,
        n_sat,
        DEFAULT_DELTA,
        BackendChoice::Symmetric,
    );
    Ok(scan
        .iter()
        .flat_map(|p| [p.lambda, p.g_value().unwrap_or(f64::NAN)])
        .collect())
}

#[wasm_bindgen]
pub fn trajectory(n_sat: usize, lambda: f64, g: f64, periods: usize) -> Result<Vec<f64>, JsError> {
    trajectory_rows(n_sat, lambda, g, periods).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn phase_map(n_sat: usize, quantity: &str, lambda_points: usize, g_points: usize) -> Result<Vec<f64>, JsError> {
    phase_map_values(n_sat, quantity, lambda_points, g_points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn g_scan(n_sat: usize, g: f64, periods: usize, points: usize) -> Result<Vec<f64>, JsError> {
    g_scan_values(n_sat, g, periods, points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn version() -> String {
    central_spin::VERSION.to_string()
}
