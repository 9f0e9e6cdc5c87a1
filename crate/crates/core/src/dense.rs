//! Brute-force Floquet matrices for cross-checking the kernels.
//!
//! Both half-period generators are assembled as explicit matrices in the
//! full tensor basis and exponentiated with a Padé scaling-and-squaring
//! routine; nothing here shares code with [`crate::floquet`].

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::drive::DriveParams;
use crate::error::{Result, SpinError};
use crate::state::{Backend, SpinState};

pub const MAX_DENSE_SATELLITES: usize = 12;

pub type DenseMatrix = DMatrix<Complex64>;

fn guard(n_sat: usize) -> Result<()> {
    if n_sat == 0 {
        return Err(SpinError::NoSatellites);
    }
    if n_sat > MAX_DENSE_SATELLITES {
        return Err(SpinError::SizeGuard {
            max: MAX_DENSE_SATELLITES,
            got: n_sat,
        });
    }
    Ok(())
}

/// `Σ g_j S_j^z` (satellites and central spin), diagonal.
pub fn field_generator(params: &DriveParams, n_sat: usize) -> Result<DenseMatrix> {
    guard(n_sat)?;
    params.g_sat.check_len(n_sat)?;
    let dim = 1usize << (n_sat + 1);
    let mut m = DenseMatrix::zeros(dim, dim);
    for idx in 0..dim {
        let mut e = 0.0;
        for q in 0..=n_sat {
            let sz = if (idx >> q) & 1 == 0 { 0.5 } else { -0.5 };
            let g = if q < n_sat { params.g_sat.get(q) } else { params.g_c };
            e += g * sz;
        }
        m[(idx, idx)] = Complex64::new(e, 0.0);
    }
    Ok(m)
}

/// `Σ_i S_i^x S_c^x`.
pub fn coupling_generator(n_sat: usize) -> Result<DenseMatrix> {
    guard(n_sat)?;
    let dim = 1usize << (n_sat + 1);
    let central = 1usize << n_sat;
    let mut m = DenseMatrix::zeros(dim, dim);
    for idx in 0..dim {
        for i in 0..n_sat {
            let j = idx ^ (1 << i) ^ central;
            m[(j, idx)] += Complex64::new(0.25, 0.0);
        }
    }
    Ok(m)
}

fn expm_times_i(generator: &DenseMatrix, angle: f64) -> DenseMatrix {
    (generator * Complex64::new(0.0, angle)).exp()
}

pub fn dense_kick(params: &DriveParams, n_sat: usize) -> Result<DenseMatrix> {
    Ok(expm_times_i(&field_generator(params, n_sat)?, -1.0))
}

pub fn dense_interaction(params: &DriveParams, n_sat: usize) -> Result<DenseMatrix> {
    Ok(expm_times_i(&coupling_generator(n_sat)?, params.lambda))
}

/// `U_F = U_0 U_d` as a dense `2^(N+1)` square matrix.
pub fn dense_floquet_matrix(params: &DriveParams, n_sat: usize) -> Result<DenseMatrix> {
    let ud = dense_kick(params, n_sat)?;
    let u0 = dense_interaction(params, n_sat)?;
    Ok(u0 * ud)
}

/// `‖U U† − 𝕀‖_max`.
pub fn unitarity_defect(u: &DenseMatrix) -> f64 {
    let prod = u * u.adjoint();
    let id = DenseMatrix::identity(u.nrows(), u.ncols());
    (prod - id).iter().map(|x| x.norm()).fold(0.0, f64::max)
}

pub fn apply_dense(u: &DenseMatrix, state: &SpinState) -> Result<SpinState> {
    if state.backend() != Backend::Full || state.dim() != u.ncols() {
        return Err(SpinError::DimensionMismatch(
            "dense matrices act on full-backend states of matching size".into(),
        ));
    }
    let v = nalgebra::DVector::from_column_slice(state.amplitudes());
    let out = u * v;
    SpinState::from_amplitudes(state.n_sat(), Backend::Full, out.as_slice().to_vec())
}
