use std::f64::consts::{FRAC_PI_2, PI};

use central_spin_wasm::{g_scan_values, phase_map_values, trajectory_rows};

#[test]
fn trajectory_layout_and_period_doubling() {
    let rows = trajectory_rows(19, 2.0 * PI, PI, 10).unwrap();
    // Initial record plus kick and full-period records for each period.
    assert_eq!(rows.len(), 4 * (1 + 2 * 10));
    for r in rows.chunks(4).filter(|r| r[0].fract() == 0.0) {
        let want = if r[0] as usize % 2 == 0 { 0.5 } else { -0.5 };
        assert!((r[1] - want).abs() < 1e-10, "t={}: {}", r[0], r[1]);
    }
}

#[test]
fn phase_map_is_row_major() {
    let v = phase_map_values(4, "M_bar", 3, 2).unwrap();
    assert_eq!(v.len(), 6);
    // λ = 0, g = 0: nothing moves.
    assert!((v[0] - 0.5).abs() < 1e-12);
    assert!(phase_map_values(4, "nonsense", 3, 2).is_err());
    assert!(phase_map_values(0, "M_bar", 3, 2).is_err());
}

#[test]
fn g_scan_pairs() {
    let v = g_scan_values(6, FRAC_PI_2, 20, 5).unwrap();
    assert_eq!(v.len(), 10);
    assert!((v[0] - 0.2 * PI).abs() < 1e-15);
    assert!((v[8] - 1.8 * PI).abs() < 1e-15);
    assert!(v.chunks(2).any(|p| p[1] > 0.0));
}
