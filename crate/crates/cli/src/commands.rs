use std::path::PathBuf;

use central_spin::metrology::{
    count_local_extrema, qfi_csv, qfi_lambda_scan, qfi_series, scan_csv, QfiMatrix,
};
use central_spin::oracle::{oracle_check, oracle_check_csv, OracleCheckRow};
use central_spin::protocol::{run_x_polarized, sweep_grid, AxisRange, SweepSettings, SweepSpec};
use central_spin::{qfi_matrix, scaling_fit, DriveParams, QfiPoint, ScalingFit};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::args::*;
use crate::error::CliError;
use crate::output::write_run;
use crate::parse::AngleRange;

/// What a successful run reports on stdout.
pub struct Summary {
    pub line: String,
    pub warnings: usize,
}

struct Artifact {
    csv: String,
    results: Value,
    line: String,
    warnings: usize,
    /// Set when the run completed but its checks did not pass.
    failed: Option<String>,
}

pub fn run(cli: &Cli) -> Result<Summary, CliError> {
    let name = cli.command.name();
    let art = match &cli.command {
        Command::Evolve(a) => evolve(a)?,
        Command::Sweep(a) => sweep(a)?,
        Command::Qfi(a) => qfi(a)?,
        Command::QfiScan(a) => qfi_scan(a)?,
        Command::Scaling(a) => scaling(a)?,
        Command::OracleCheck(a) => oracle(a)?,
    };
    let path = cli
        .command
        .output()
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{name}.csv")));
    let sidecar = write_run(&path, &art.csv, name, cli, art.results)?;
    if let Some(reason) = art.failed {
        return Err(CliError::Check(format!("{reason}; see {}", path.display())));
    }
    let mut line = format!("{name}: {} -> {} (+{})", art.line, path.display(), sidecar.display());
    if art.warnings > 0 {
        line.push_str(&format!(", {} warnings", art.warnings));
    }
    Ok(Summary {
        line,
        warnings: art.warnings,
    })
}

fn positive(name: &str, x: usize) -> Result<(), CliError> {
    if x == 0 {
        return Err(CliError::Usage(format!("--{name} must be positive")));
    }
    Ok(())
}

fn axis(r: AngleRange, points: usize, flag: &str) -> Result<AxisRange, CliError> {
    let range = if r.start == r.end {
        AxisRange::single(r.start)
    } else {
        AxisRange::new(r.start, r.end, points)
    };
    range
        .validate()
        .map_err(|e| CliError::Usage(format!("--{flag}: {e}")))?;
    Ok(range)
}

fn fit_json(fit: &ScalingFit) -> Value {
    json!({
        "exponent": fit.exponent,
        "prefactor": fit.prefactor,
        "r_squared": fit.r_squared,
        "reliable": fit.reliable,
        "points": fit.points,
    })
}

fn fit_line(symbol: &str, fit: &ScalingFit) -> String {
    if fit.reliable {
        format!("{symbol} = {:.4} (r2 = {:.4})", fit.exponent, fit.r_squared)
    } else {
        format!("no exponent asserted, r2 = {:.4} (raw {symbol} = {:.4})", fit.r_squared, fit.exponent)
    }
}

fn evolve(a: &EvolveArgs) -> Result<Artifact, CliError> {
    positive("n-sat", a.n_sat)?;
    positive("periods", a.periods)?;
    let params = match (&a.g_sat, a.g) {
        (Some(fields), g) => {
            let g_c = a
                .g_c
                .or(g)
                .ok_or_else(|| CliError::Usage("--g-sat needs --g-c or --g for the central field".into()))?;
            DriveParams::with_fields(a.lambda, fields.0.clone(), g_c)
        }
        (None, Some(g)) => {
            let mut p = DriveParams::uniform(a.lambda, g);
            if let Some(g_c) = a.g_c {
                p.g_c = g_c;
            }
            p
        }
        (None, None) => return Err(CliError::Usage("either --g or --g-sat is required".into())),
    };
    let t = run_x_polarized(&params, a.n_sat, a.periods, a.half_periods, a.backend)?;
    let last = t.records.last().expect("trajectory has records");
    let backend = format!("{:?}", t.backend).to_lowercase();
    Ok(Artifact {
        csv: t.to_csv()?,
        line: format!(
            "N_sat = {}, {} periods on the {backend} backend, M({}T) = {:.6}",
            a.n_sat, a.periods, a.periods, last.m_sat
        ),
        results: json!({
            "backend": backend,
            "records": t.records.len(),
            "initial": t.initial,
            "final": last,
        }),
        warnings: 0,
        failed: None,
    })
}

fn sweep(a: &SweepArgs) -> Result<Artifact, CliError> {
    positive("n-sat", a.n_sat)?;
    let spec = SweepSpec {
        lambda: axis(a.lambda, a.lambda_points, "lambda")?,
        g: axis(a.g, a.g_points, "g")?,
        n_sat: a.n_sat,
        quantity: a.quantity,
        settings: SweepSettings {
            m_window: a.m_window,
            o_window: a.o_window,
            z_strobe: None,
            qfi_periods: a.qfi_periods,
            delta: a.delta,
            backend: a.backend,
        },
    };
    let grid = sweep_grid(&spec)?;
    let failures = grid.failures();
    Ok(Artifact {
        csv: grid.to_csv()?,
        line: format!(
            "{} x {} cells of {}, {failures} failed",
            spec.lambda.points, spec.g.points, spec.quantity
        ),
        results: json!({ "spec": spec, "cells": grid.cells.len(), "failures": failures }),
        warnings: failures,
        failed: None,
    })
}

fn qfi(a: &QfiArgs) -> Result<Artifact, CliError> {
    positive("n-sat", a.n_sat)?;
    let periods = a.periods.values(a.period_step);
    if periods.first() == Some(&0) {
        return Err(CliError::Usage("--periods must start at 1 or later".into()));
    }
    let rows = qfi_series(a.lambda, a.g, a.n_sat, &periods, a.delta, a.backend)?;
    let singular = rows.iter().filter(|m| m.singular).count();
    let mut results = json!({ "rows": rows.len(), "singular": singular });
    let mut line = format!("N_sat = {}, {} time points", a.n_sat, rows.len());
    if a.fit {
        let fit = scaling_fit(&g_points(&rows, |m| m.point.n_periods))?;
        line.push_str(&format!(", {}", fit_line("alpha", &fit)));
        results["fit"] = fit_json(&fit);
    }
    Ok(Artifact {
        csv: qfi_csv(&rows)?,
        line,
        results,
        warnings: singular,
        failed: None,
    })
}

fn g_points(rows: &[QfiMatrix], x: impl Fn(&QfiMatrix) -> usize) -> Vec<(f64, f64)> {
    rows.iter()
        .filter_map(|m| m.g.map(|g| (x(m) as f64, g)))
        .collect()
}

fn qfi_scan(a: &QfiScanArgs) -> Result<Artifact, CliError> {
    positive("n-sat", a.n_sat)?;
    positive("periods", a.periods)?;
    let lambdas = axis(a.lambda, a.points, "lambda")?.values();
    let points = qfi_lambda_scan(&lambdas, a.g, a.periods, a.n_sat, a.delta, a.backend);
    let failures = points.iter().filter(|p| p.error.is_some()).count();
    let g: Vec<f64> = points.iter().map(|p| p.g_value().unwrap_or(f64::NAN)).collect();
    let extrema = count_local_extrema(&g);
    let peak = points
        .iter()
        .filter_map(|p| p.g_value().map(|g| (p.lambda, g)))
        .max_by(|x, y| x.1.total_cmp(&y.1));
    Ok(Artifact {
        csv: scan_csv(&points)?,
        line: format!(
            "{} points, {extrema} local extrema, max G = {} at lambda = {}",
            points.len(),
            peak.map_or("n/a".into(), |p| format!("{:.6e}", p.1)),
            peak.map_or("n/a".into(), |p| format!("{:.6}", p.0)),
        ),
        results: json!({ "points": points.len(), "local_extrema": extrema, "failures": failures }),
        warnings: failures,
        failed: None,
    })
}

fn scaling(a: &ScalingArgs) -> Result<Artifact, CliError> {
    positive("periods", a.periods)?;
    let sizes = a.n_sat.values(a.n_step);
    if sizes.first() == Some(&0) {
        return Err(CliError::Usage("--n-sat must start at 1 or later".into()));
    }
    let rows = sizes
        .par_iter()
        .map(|&n_sat| {
            let point = QfiPoint {
                lambda: a.lambda,
                g: a.g,
                n_periods: a.periods,
                n_sat,
            };
            qfi_matrix(&point, a.delta, a.backend)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let fit = scaling_fit(&g_points(&rows, |m| m.point.n_sat))?;
    Ok(Artifact {
        csv: qfi_csv(&rows)?,
        line: format!("{} sizes at t = {}T, {}", rows.len(), a.periods, fit_line("beta", &fit)),
        results: json!({ "fit": fit_json(&fit) }),
        warnings: 0,
        failed: None,
    })
}

fn oracle(a: &OracleArgs) -> Result<Artifact, CliError> {
    positive("n-sat", a.n_sat.start)?;
    let per_size = a
        .n_sat
        .values(1)
        .par_iter()
        .map(|&n| oracle_check(n))
        .collect::<Result<Vec<_>, _>>()?;
    let rows: Vec<OracleCheckRow> = per_size.into_iter().flatten().collect();
    let failing = rows.iter().filter(|r| !r.passes(a.tol)).count();
    let written_mismatch = rows
        .iter()
        .filter(|r| r.as_written_fidelity.is_some_and(|f| (f - 1.0).abs() > a.tol))
        .count();
    Ok(Artifact {
        csv: oracle_check_csv(&rows)?,
        line: format!(
            "{} rows, {} pass, {written_mismatch} transcribed forms disagree",
            rows.len(),
            rows.len() - failing
        ),
        results: json!({
            "rows": rows.len(),
            "failing": failing,
            "transcribed_mismatches": written_mismatch,
            "tolerance": a.tol,
        }),
        warnings: 0,
        failed: (failing > 0).then(|| format!("{failing} of {} oracle rows failed", rows.len())),
    })
}
