use std::f64::consts::{FRAC_PI_2, PI};

use central_spin::protocol::{
    order_parameter_o_for, order_parameter_z_with, strobed_magnetization, time_avg_magnetization,
    AxisRange, SweepSettings, ZStroboscope,
};
use central_spin::{sweep_grid, BackendChoice, DriveParams, Quantity, SweepSpec};

fn spec(lambda: AxisRange, g: AxisRange, n_sat: usize, quantity: Quantity) -> SweepSpec {
    SweepSpec {
        lambda,
        g,
        n_sat,
        quantity,
        settings: SweepSettings::default(),
    }
}

#[test]
fn hodtc_point_is_not_magnetized() {
    let p = DriveParams::uniform(PI, FRAC_PI_2);
    let m = time_avg_magnetization(&p, 19, 100, BackendChoice::Auto).unwrap();
    assert!(m < 0.5, "M_bar = {m}");
}

#[test]
fn z_order_at_hodtc_and_trivial_points() {
    let hodtc = DriveParams::uniform(PI, FRAC_PI_2);
    for n_sat in [19, 20] {
        let z = order_parameter_z_with(&hodtc, n_sat, ZStroboscope::for_parity(n_sat), BackendChoice::Auto)
            .unwrap();
        assert!((z.z_bar - 0.5).abs() < 1e-10, "n_sat={n_sat}: {}", z.z_bar);
    }
    let idle = DriveParams::uniform(0.0, 0.0);
    for n_sat in [6, 7] {
        let z = order_parameter_z_with(&idle, n_sat, ZStroboscope::for_parity(n_sat), BackendChoice::Auto)
            .unwrap();
        assert!(z.z_bar.abs() < 1e-12);
    }
}

#[test]
fn order_parameters_are_stable_under_one_more_cycle() {
    // Both points are exactly periodic, so stretching the window by one cycle
    // leaves the averages unchanged.
    let dtc = DriveParams::uniform(2.0 * PI, PI);
    let a = order_parameter_o_for(&dtc, 9, 100, BackendChoice::Auto).unwrap().o_bar;
    let b = order_parameter_o_for(&dtc, 9, 102, BackendChoice::Auto).unwrap().o_bar;
    assert!((a - b).abs() < 1e-10);
    assert!((a - 0.5).abs() < 1e-10);

    let hodtc = DriveParams::uniform(PI, FRAC_PI_2);
    for n_sat in [8, 9] {
        let s = ZStroboscope::for_parity(n_sat);
        let longer = ZStroboscope { beta: s.beta + 2, ..s };
        let a = order_parameter_z_with(&hodtc, n_sat, s, BackendChoice::Auto).unwrap().z_bar;
        let b = order_parameter_z_with(&hodtc, n_sat, longer, BackendChoice::Auto).unwrap().z_bar;
        assert!((a - b).abs() < 1e-10, "n_sat={n_sat}: {a} vs {b}");
    }
}

#[test]
fn sweep_examples() {
    let around = |c: f64, h: f64| AxisRange::new(c - h, c + h, 3);
    let grid = sweep_grid(&spec(around(2.0 * PI, 0.1), around(PI, 0.1), 6, Quantity::OBar)).unwrap();
    assert_eq!(grid.cells.len(), 9);
    let centre = grid.cell(1, 1);
    assert_eq!((centre.lambda, centre.g), (2.0 * PI, PI));
    assert!((centre.value.unwrap() - 0.5).abs() < 1e-10);

    let at = |q| {
        let g = sweep_grid(&spec(AxisRange::single(2.0 * PI), AxisRange::single(2.0 * PI), 6, q)).unwrap();
        g.cells[0].value.unwrap()
    };
    assert!((at(Quantity::MBar) - 0.5).abs() < 1e-10);
    assert!((at(Quantity::OBar) + 0.5).abs() < 1e-10);
}

#[test]
fn sweep_is_deterministic_and_ordered() {
    let s = spec(AxisRange::new(0.0, 4.0 * PI, 4), AxisRange::new(0.0, 2.0 * PI, 3), 5, Quantity::MBar);
    let a = sweep_grid(&s).unwrap();
    let b = sweep_grid(&s).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.to_csv().unwrap(), b.to_csv().unwrap());
    for (k, cell) in a.cells.iter().enumerate() {
        assert_eq!(cell.lambda, s.lambda.values()[k / 3]);
        assert_eq!(cell.g, s.g.values()[k % 3]);
    }
}

#[test]
fn strobe_rejects_empty_windows() {
    let p = DriveParams::uniform(1.0, 1.0);
    assert!(strobed_magnetization(&p, 3, 0, 5, BackendChoice::Auto).is_err());
    assert!(strobed_magnetization(&p, 3, 1, 0, BackendChoice::Auto).is_err());
}
