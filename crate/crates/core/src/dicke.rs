//! Collective-spin algebra on the permutation-symmetric satellite sector.
//!
//! Dicke index `k` counts satellites in `|-z>`, so `J_z |k> = (N/2 - k)|k>`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::axis::Axis;
use crate::exact::{unit_phase, Dot2};

/// `ln C(n, k)`.
pub fn ln_binomial(n: usize, k: usize) -> f64 {
    assert!(k <= n);
    let k = k.min(n - k);
    (0..k).map(|i| ((n - i) as f64).ln() - ((i + 1) as f64).ln()).sum()
}

/// `C(n, k)` as a float; exact for the sizes the full backend can hold.
pub fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as f64
}

/// `<k-1| J_x |k> = ½ √(k (N-k+1))`, the only nonzero off-diagonal entries.
pub fn jx_offdiag(n_sat: usize, k: usize) -> f64 {
    debug_assert!(k >= 1 && k <= n_sat);
    0.5 * ((k * (n_sat - k + 1)) as f64).sqrt()
}

/// `J_x |v>` on a Dicke vector.
pub fn apply_jx(n_sat: usize, v: &[Complex64], out: &mut [Complex64]) {
    debug_assert_eq!(v.len(), n_sat + 1);
    for k in 0..=n_sat {
        let mut acc = Complex64::new(0.0, 0.0);
        if k >= 1 {
            acc += v[k - 1] * jx_offdiag(n_sat, k);
        }
        if k < n_sat {
            acc += v[k + 1] * jx_offdiag(n_sat, k + 1);
        }
        out[k] = acc;
    }
}

/// Dicke amplitudes of `|axis>^{⊗N}`: `√C(N,k) a₀^{N-k} a₁^k`.
pub fn product_amplitudes(n_sat: usize, axis: Axis) -> Vec<Complex64> {
    let [a0, a1] = axis.amplitudes();
    let (r0, r1) = (a0.norm(), a1.norm());
    let (p0, p1) = (a0.arg(), a1.arg());
    (0..=n_sat)
        .map(|k| {
            let up = n_sat - k;
            if (r0 == 0.0 && up > 0) || (r1 == 0.0 && k > 0) {
                return Complex64::new(0.0, 0.0);
            }
            let mut ln_mag = 0.5 * ln_binomial(n_sat, k);
            if up > 0 {
                ln_mag += up as f64 * r0.ln();
            }
            if k > 0 {
                ln_mag += k as f64 * r1.ln();
            }
            Complex64::from_polar(ln_mag.exp(), up as f64 * p0 + k as f64 * p1)
        })
        .collect()
}

/// Eigenbasis of collective `J_x` on the Dicke sector: the change of basis
/// from z- to x-quantization (a Wigner rotation by π/2, up to column phases).
#[derive(Debug)]
pub struct XRotation {
    n_sat: usize,
    /// Column `j` is the eigenvector with `J_x = j - N/2`; row-major.
    vectors: Vec<f64>,
}

impl XRotation {
    fn build(n_sat: usize) -> Self {
        let dim = n_sat + 1;
        let jx = DMatrix::<f64>::from_fn(dim, dim, |r, c| {
            if c == r + 1 {
                jx_offdiag(n_sat, c)
            } else if r == c + 1 {
                jx_offdiag(n_sat, r)
            } else {
                0.0
            }
        });
        let eig = SymmetricEigen::new(jx);
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let mut vectors = vec![0.0; dim * dim];
        for (j, &col) in order.iter().enumerate() {
            for r in 0..dim {
                vectors[r * dim + j] = eig.eigenvectors[(r, col)];
            }
        }
        // The solver's columns are orthonormal only to ~dim·ε with a common
        // bias, which shows up as linear norm drift over long runs.
        for _ in 0..2 {
            refine_orthonormal(&mut vectors, dim);
        }
        Self { n_sat, vectors }
    }

    /// Shared, lazily built rotation for `n_sat` satellites.
    pub fn for_size(n_sat: usize) -> Arc<XRotation> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<XRotation>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
        guard
            .entry(n_sat)
            .or_insert_with(|| Arc::new(XRotation::build(n_sat)))
            .clone()
    }

    pub fn n_sat(&self) -> usize {
        self.n_sat
    }

    /// Exact `J_x` eigenvalue of column `j`.
    pub fn eigenvalue(&self, j: usize) -> f64 {
        j as f64 - 0.5 * self.n_sat as f64
    }

    pub fn vector_entry(&self, row: usize, col: usize) -> f64 {
        self.vectors[row * (self.n_sat + 1) + col]
    }

    /// `exp(i θ m)` for each column's eigenvalue `m`.
    pub fn phases(&self, theta: f64) -> Vec<Complex64> {
        (0..=self.n_sat).map(|j| unit_phase(theta * self.eigenvalue(j))).collect()
    }

    /// In-place `v ← exp(i θ J_x) v`. `scratch` must have length `N + 1`.
    pub fn apply_exp_jx(&self, theta: f64, v: &mut [Complex64], scratch: &mut [Complex64]) {
        self.apply_diagonal(&self.phases(theta), v, scratch);
    }

    /// In-place `v ← V diag(phases) Vᵀ v`.
    pub fn apply_diagonal(&self, phases: &[Complex64], v: &mut [Complex64], scratch: &mut [Complex64]) {
        let dim = self.n_sat + 1;
        debug_assert_eq!(v.len(), dim);
        for (j, s) in scratch.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (r, x) in v.iter().enumerate() {
                acc += x * self.vectors[r * dim + j];
            }
            *s = acc * phases[j];
        }
        for (r, x) in v.iter_mut().enumerate() {
            let row = &self.vectors[r * dim..(r + 1) * dim];
            *x = row.iter().zip(scratch.iter()).map(|(a, s)| s * a).sum();
        }
    }
}

/// `V ← V (I - R/2)` with `R = VᵀV - I` accumulated in compensated arithmetic.
fn refine_orthonormal(v: &mut [f64], dim: usize) {
    let mut r = vec![0.0; dim * dim];
    for a in 0..dim {
        for b in a..dim {
            let mut dot = Dot2::default();
            for k in 0..dim {
                dot.add(v[k * dim + a], v[k * dim + b]);
            }
            let x = dot.value(if a == b { -1.0 } else { 0.0 });
            r[a * dim + b] = x;
            r[b * dim + a] = x;
        }
    }
    let mut row = vec![0.0; dim];
    for k in 0..dim {
        for (b, out) in row.iter_mut().enumerate() {
            let corr: f64 = (0..dim).map(|a| v[k * dim + a] * r[a * dim + b]).sum();
            *out = v[k * dim + b] - 0.5 * corr;
        }
        v[k * dim..(k + 1) * dim].copy_from_slice(&row);
    }
}
