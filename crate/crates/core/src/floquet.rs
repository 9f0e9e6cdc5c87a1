//! Half-period unitaries and the one-period Floquet step.
//!
//! * kick: `U_d = exp[-i(Σ g_i S_i^z + g_c S_c^z)]`, diagonal in z.
//! * interaction: `U_0 = exp[+iλ S_c^x Σ S_i^x]`. With the central spin
//!   resolved in its x basis, each branch `s_c = ±½` applies the same
//!   single-spin rotation `cos(λ/4) ± i sin(λ/4) σ_x` to every satellite.
//!
//! [`FloquetOperator`] precomputes the phase tables once and updates states
//! in place; the free functions are one-shot conveniences.

use std::sync::Arc;

use num_complex::Complex64;

use crate::dicke::XRotation;
use crate::exact::{unit, unit_phase};
use crate::drive::DriveParams;
use crate::error::{Result, SpinError};
use crate::state::{Backend, SpinState};

/// Rotation components below this are treated as exact zeros, turning the
/// satellite rotation into an identity or a global flip.
const PAULI_SNAP: f64 = 1e-14;

/// Which half of the period a state was last advanced through.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HalfStep {
    AfterKick,
    AfterInteraction,
}

#[derive(Debug, Clone)]
pub struct FloquetOperator {
    n_sat: usize,
    backend: Backend,
    kernel: Kernel,
}

#[derive(Debug, Clone)]
enum Kernel {
    Full {
        low_bits: usize,
        kick_low: Vec<Complex64>,
        kick_high: Vec<Complex64>,
        rotation: SatelliteRotation,
    },
    Symmetric {
        kick: Vec<Complex64>,
        rotation: Arc<XRotation>,
        /// `exp(±iλ m/2)` on the `J_x` eigenbasis, for central `±x`.
        jx_plus: Vec<Complex64>,
        jx_minus: Vec<Complex64>,
    },
}

#[derive(Debug, Clone, Copy)]
enum SatelliteRotation {
    /// Each branch is `phase · 𝕀` with the same phase.
    Identity(Complex64),
    /// Each branch is `phase_± · X^{⊗N}`.
    Flip { plus: Complex64, minus: Complex64 },
    General { cos: f64, sin: f64 },
}

impl SatelliteRotation {
    fn new(lambda: f64, n_sat: usize) -> Self {
        let (sin, cos) = (0.25 * lambda).sin_cos();
        let n = n_sat as i32;
        if sin.abs() < PAULI_SNAP {
            SatelliteRotation::Identity(Complex64::new(cos.signum().powi(n), 0.0))
        } else if cos.abs() < PAULI_SNAP {
            let s = sin.signum();
            SatelliteRotation::Flip {
                plus: Complex64::new(0.0, s).powi(n),
                minus: Complex64::new(0.0, -s).powi(n),
            }
        } else {
            let z = unit(Complex64::new(cos, sin));
            SatelliteRotation::General { cos: z.re, sin: z.im }
        }
    }
}

fn kick_phase(g: f64, bit: usize) -> Complex64 {
    // exp[-i g (½ - b)]
    Complex64::from_polar(1.0, -g * (0.5 - bit as f64))
}

impl FloquetOperator {
    pub fn new(params: &DriveParams, n_sat: usize, backend: Backend) -> Result<Self> {
        if n_sat == 0 {
            return Err(SpinError::NoSatellites);
        }
        params.g_sat.check_len(n_sat)?;
        let kernel = match backend {
            Backend::Full => {
                let qubits = n_sat + 1;
                let low_bits = qubits.div_ceil(2);
                let field = |q: usize| {
                    if q < n_sat {
                        params.g_sat.get(q)
                    } else {
                        params.g_c
                    }
                };
                let table = |first: usize, count: usize| -> Vec<Complex64> {
                    (0..1usize << count)
                        .map(|pattern| {
                            (0..count)
                                .map(|j| kick_phase(field(first + j), (pattern >> j) & 1))
                                .product::<Complex64>()
                        })
                        .map(unit)
                        .collect()
                };
                Kernel::Full {
                    low_bits,
                    kick_low: table(0, low_bits),
                    kick_high: table(low_bits, qubits - low_bits),
                    rotation: SatelliteRotation::new(params.lambda, n_sat),
                }
            }
            Backend::Symmetric => {
                let g_s = params.g_sat.uniform_value().ok_or(SpinError::NonUniformFields)?;
                let half_n = 0.5 * n_sat as f64;
                let kick = (0..=n_sat)
                    .flat_map(|k| {
                        let sat = -g_s * (half_n - k as f64);
                        [0usize, 1].map(|c| unit_phase(sat - params.g_c * (0.5 - c as f64)))
                    })
                    .collect();
                let rotation = XRotation::for_size(n_sat);
                Kernel::Symmetric {
                    kick,
                    jx_plus: rotation.phases(0.5 * params.lambda),
                    jx_minus: rotation.phases(-0.5 * params.lambda),
                    rotation,
                }
            }
        };
        Ok(Self {
            n_sat,
            backend,
            kernel,
        })
    }

    /// Operator matched to an existing state's size and backend.
    pub fn for_state(params: &DriveParams, state: &SpinState) -> Result<Self> {
        Self::new(params, state.n_sat(), state.backend())
    }

    pub fn n_sat(&self) -> usize {
        self.n_sat
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    fn check(&self, state: &SpinState) -> Result<()> {
        if state.n_sat() != self.n_sat || state.backend() != self.backend {
            return Err(SpinError::DimensionMismatch(format!(
                "operator built for {} satellites ({:?}), state has {} ({:?})",
                self.n_sat,
                self.backend,
                state.n_sat(),
                state.backend()
            )));
        }
        Ok(())
    }

    pub fn kick(&self, state: &mut SpinState) -> Result<()> {
        self.check(state)?;
        let amps = state.amplitudes_mut();
        match &self.kernel {
            Kernel::Full {
                low_bits,
                kick_low,
                kick_high,
                ..
            } => {
                let low_len = 1usize << low_bits;
                for (chunk, hi) in amps.chunks_exact_mut(low_len).zip(kick_high) {
                    for (a, lo) in chunk.iter_mut().zip(kick_low) {
                        *a *= lo * hi;
                    }
                }
            }
            Kernel::Symmetric { kick, .. } => {
                for (a, p) in amps.iter_mut().zip(kick) {
                    *a *= p;
                }
            }
        }
        Ok(())
    }

    pub fn interact(&self, state: &mut SpinState) -> Result<()> {
        self.check(state)?;
        let n = self.n_sat;
        let amps = state.amplitudes_mut();
        match &self.kernel {
            Kernel::Full { rotation, .. } => full_interaction(amps, n, *rotation),
            Kernel::Symmetric {
                rotation,
                jx_plus,
                jx_minus,
                ..
            } => symmetric_interaction(amps, n, rotation, jx_plus, jx_minus),
        }
        Ok(())
    }

    /// One full period: kick, then interaction.
    pub fn step(&self, state: &mut SpinState) -> Result<()> {
        self.kick(state)?;
        self.interact(state)
    }

    pub fn steps(&self, state: &mut SpinState, periods: usize) -> Result<()> {
        for _ in 0..periods {
            self.step(state)?;
        }
        Ok(())
    }
}

/// Overlaps and central-spin density recorded during a multi-period run.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub period: usize,
    /// `<reference_r|ψ(t)>` for each reference, in order.
    pub overlaps: Vec<Complex64>,
    pub central_density: [[Complex64; 2]; 2],
}

impl Checkpoint {
    pub fn fidelity(&self, reference: usize) -> f64 {
        self.overlaps[reference].norm_sqr()
    }

    /// `<S_c^x>`.
    pub fn m_central(&self) -> f64 {
        self.central_density[0][1].re
    }
}

impl FloquetOperator {
    /// Advances `state` by `periods` steps, recording a [`Checkpoint`] after
    /// every `every` periods.
    ///
    /// When the satellite rotation is a pure flip (λ a multiple of 2π) the
    /// full-backend step couples only the quadruples `{s, s̄} × {c}`, so each
    /// cache-sized block of quadruples is carried through all periods at once.
    pub fn evolve_with_checkpoints(
        &self,
        state: &mut SpinState,
        periods: usize,
        every: usize,
        references: &[&SpinState],
    ) -> Result<Vec<Checkpoint>> {
        self.check(state)?;
        if every == 0 {
            return Err(SpinError::Invalid("checkpoint interval must be positive".into()));
        }
        for r in references {
            if r.n_sat() != self.n_sat || r.backend() != self.backend {
                return Err(SpinError::DimensionMismatch(
                    "reference states must match the evolved state".into(),
                ));
            }
        }
        match &self.kernel {
            Kernel::Full {
                low_bits,
                kick_low,
                kick_high,
                rotation: SatelliteRotation::Flip { plus, minus },
            } => {
                let kick = |idx: usize| kick_low[idx & ((1 << low_bits) - 1)] * kick_high[idx >> low_bits];
                Ok(blocked_flip_evolution(
                    state, self.n_sat, periods, every, references, kick, *plus, *minus,
                ))
            }
            _ => {
                let mut out = Vec::with_capacity(periods / every);
                for p in 1..=periods {
                    self.step(state)?;
                    if p % every == 0 {
                        let overlaps = references
                            .iter()
                            .map(|r| r.inner(state))
                            .collect::<Result<Vec<_>>>()?;
                        out.push(Checkpoint {
                            period: p,
                            overlaps,
                            central_density: crate::observables::central_reduced_density(state),
                        });
                    }
                }
                Ok(out)
            }
        }
    }
}

const QUAD_BLOCK: usize = 256;

type Lane = [f64; QUAD_BLOCK];

/// Structure-of-arrays block of amplitude quadruples
/// `(s,0), (s,1), (s̄,0), (s̄,1)`, zero-padded past the last quadruple.
struct QuadBlock {
    re: Box<[Lane; 4]>,
    im: Box<[Lane; 4]>,
}

impl QuadBlock {
    fn new() -> Self {
        Self {
            re: Box::new([[0.0; QUAD_BLOCK]; 4]),
            im: Box::new([[0.0; QUAD_BLOCK]; 4]),
        }
    }

    fn load_with(&mut self, idx: &[[usize; 4]], f: impl Fn(usize) -> Complex64) {
        for j in 0..4 {
            self.re[j].fill(0.0);
            self.im[j].fill(0.0);
        }
        for (q, ix) in idx.iter().enumerate() {
            for j in 0..4 {
                let z = f(ix[j]);
                self.re[j][q] = z.re;
                self.im[j][q] = z.im;
            }
        }
    }

    fn store(&self, amps: &mut [Complex64], idx: &[[usize; 4]]) {
        for (q, ix) in idx.iter().enumerate() {
            for j in 0..4 {
                amps[ix[j]] = Complex64::new(self.re[j][q], self.im[j][q]);
            }
        }
    }

    /// Adds `Σ conj(reference) · self` for each reference to `overlaps` and
    /// the central-spin density `(ρ₀₀, ρ₁₁, ρ₀₁)` to `density`.
    fn accumulate(
        &self,
        refs: &[QuadBlock],
        overlaps: &mut [Complex64],
        density: &mut (f64, f64, Complex64),
    ) {
        // Independent partial sums per lane let the reductions vectorize.
        const W: usize = 8;
        let mut acc = [[0.0f64; W]; 4];
        for (up, down) in [(0usize, 1usize), (2, 3)] {
            let (ur, ui) = (&self.re[up], &self.im[up]);
            let (dr, di) = (&self.re[down], &self.im[down]);
            let chunks = ur
                .chunks_exact(W)
                .zip(ui.chunks_exact(W))
                .zip(dr.chunks_exact(W).zip(di.chunks_exact(W)));
            for ((ur, ui), (dr, di)) in chunks {
                for l in 0..W {
                    acc[0][l] += ur[l] * ur[l] + ui[l] * ui[l];
                    acc[1][l] += dr[l] * dr[l] + di[l] * di[l];
                    acc[2][l] += ur[l] * dr[l] + ui[l] * di[l];
                    acc[3][l] += ui[l] * dr[l] - ur[l] * di[l];
                }
            }
        }
        let total = |v: &[f64; W]| v.iter().sum::<f64>();
        density.0 += total(&acc[0]);
        density.1 += total(&acc[1]);
        density.2 += Complex64::new(total(&acc[2]), total(&acc[3]));
        for (block, out) in refs.iter().zip(overlaps) {
            let mut re = [0.0f64; W];
            let mut im = [0.0f64; W];
            for j in 0..4 {
                let (ar, ai) = (&block.re[j], &block.im[j]);
                let (br, bi) = (&self.re[j], &self.im[j]);
                let chunks = ar
                    .chunks_exact(W)
                    .zip(ai.chunks_exact(W))
                    .zip(br.chunks_exact(W).zip(bi.chunks_exact(W)));
                for ((ar, ai), (br, bi)) in chunks {
                    for l in 0..W {
                        re[l] += ar[l] * br[l] + ai[l] * bi[l];
                        im[l] += ar[l] * bi[l] - ai[l] * br[l];
                    }
                }
            }
            *out += Complex64::new(total(&re), total(&im));
        }
    }

    /// Monomial update: slot `j` receives `phase[σ(j)] · amp[σ(j)]`, with the
    /// phases indexed by source slot.
    fn apply_monomial(&mut self, phase: &QuadBlock, perm: SlotPerm) {
        match perm {
            SlotPerm::Identity => self.monomial::<0, 1, 2, 3>(phase),
            SlotPerm::Flip => self.monomial::<2, 3, 0, 1>(phase),
            SlotPerm::FlipSwapCentral => self.monomial::<3, 2, 1, 0>(phase),
        }
    }

    fn monomial<const A: usize, const B: usize, const C: usize, const D: usize>(
        &mut self,
        phase: &QuadBlock,
    ) {
        let (re, im) = (&mut *self.re, &mut *self.im);
        let (pr, pi) = (&*phase.re, &*phase.im);
        for q in 0..QUAD_BLOCK {
            let mul = |k: usize| {
                let (xr, xi) = (re[k][q], im[k][q]);
                (xr * pr[k][q] - xi * pi[k][q], xr * pi[k][q] + xi * pr[k][q])
            };
            let out = [mul(A), mul(B), mul(C), mul(D)];
            for (j, (r, i)) in out.into_iter().enumerate() {
                re[j][q] = r;
                im[j][q] = i;
            }
        }
    }
}

/// Slot permutation of one flip period, an involution on
/// `(s,0), (s,1), (s̄,0), (s̄,1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SlotPerm {
    Identity,
    Flip,
    FlipSwapCentral,
}

impl SlotPerm {
    fn source(self, j: usize) -> usize {
        match self {
            SlotPerm::Identity => j,
            SlotPerm::Flip => j ^ 2,
            SlotPerm::FlipSwapCentral => 3 - j,
        }
    }

    fn power(self, k: usize) -> SlotPerm {
        if k % 2 == 0 {
            SlotPerm::Identity
        } else {
            self
        }
    }
}

/// Source-indexed phases of `M^k` for the one-period monomial `M = (phase, perm)`.
fn compose_monomial(phase: &QuadBlock, perm: SlotPerm, k: usize, out: &mut QuadBlock) {
    // Destination-indexed product Φ_j = Π_{m=1..k} phase[σ^m(j)].
    let mut acc: [[Complex64; QUAD_BLOCK]; 4] = [[Complex64::new(1.0, 0.0); QUAD_BLOCK]; 4];
    for m in 1..=k {
        let sigma = perm.power(m);
        for (j, row) in acc.iter_mut().enumerate() {
            let src = sigma.source(j);
            for (q, a) in row.iter_mut().enumerate() {
                *a *= Complex64::new(phase.re[src][q], phase.im[src][q]);
            }
        }
    }
    let total = perm.power(k);
    for (j, row) in acc.iter().enumerate() {
        let src = total.source(j);
        for (q, a) in row.iter().enumerate() {
            out.re[src][q] = a.re;
            out.im[src][q] = a.im;
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn blocked_flip_evolution(
    state: &mut SpinState,
    n_sat: usize,
    periods: usize,
    every: usize,
    references: &[&SpinState],
    kick: impl Fn(usize) -> Complex64,
    plus: Complex64,
    minus: Complex64,
) -> Vec<Checkpoint> {
    let half = 1usize << n_sat;
    let mask = half - 1;
    let n_quads = (half / 2).max(1);
    let n_checks = periods / every;
    let n_refs = references.len();
    // (plus ± minus)/2 mixes s with s̄; since minus = (−1)^N plus, exactly
    // one of the two vanishes and a period is a permutation times a phase.
    debug_assert!((minus - plus * if n_sat % 2 == 0 { 1.0 } else { -1.0 }).norm() == 0.0);
    let perm = if n_sat % 2 == 1 {
        SlotPerm::FlipSwapCentral
    } else {
        SlotPerm::Flip
    };
    let perm_every = perm.power(every);

    let mut overlaps = vec![Complex64::new(0.0, 0.0); n_checks * n_refs];
    let mut densities = vec![(0.0, 0.0, Complex64::new(0.0, 0.0)); n_checks];

    let mut amp = QuadBlock::new();
    let mut phase = QuadBlock::new();
    let mut phase_every = QuadBlock::new();
    let mut refs: Vec<QuadBlock> = (0..n_refs).map(|_| QuadBlock::new()).collect();
    let mut idx = Vec::with_capacity(QUAD_BLOCK);

    let amps = state.amplitudes_mut();
    let mut start = 0;
    while start < n_quads {
        let len = QUAD_BLOCK.min(n_quads - start);
        idx.clear();
        for s in start..start + len {
            // n_sat = 1 has the single quadruple {0, 1} × {c}.
            let t = s ^ mask;
            idx.push([s, s + half, t, t + half]);
        }
        amp.load_with(&idx, |i| amps[i]);
        phase.load_with(&idx, |i| plus * kick(i));
        for (r, block) in references.iter().zip(refs.iter_mut()) {
            let a = r.amplitudes();
            block.load_with(&idx, |i| a[i]);
        }
        // Between checkpoints the `every`-period product is applied at once.
        compose_monomial(&phase, perm, every, &mut phase_every);
        for c in 0..n_checks {
            amp.apply_monomial(&phase_every, perm_every);
            amp.accumulate(
                &refs,
                &mut overlaps[c * n_refs..(c + 1) * n_refs],
                &mut densities[c],
            );
        }
        for _ in n_checks * every..periods {
            amp.apply_monomial(&phase, perm);
        }
        amp.store(amps, &idx);
        start += len;
    }

    (0..n_checks)
        .map(|c| {
            let (r00, r11, r01) = densities[c];
            Checkpoint {
                period: (c + 1) * every,
                overlaps: overlaps[c * n_refs..(c + 1) * n_refs].to_vec(),
                central_density: [
                    [Complex64::new(r00, 0.0), r01],
                    [r01.conj(), Complex64::new(r11, 0.0)],
                ],
            }
        })
        .collect()
}

fn full_interaction(amps: &mut [Complex64], n_sat: usize, rotation: SatelliteRotation) {
    let half = 1usize << n_sat;
    let (lower, upper) = amps.split_at_mut(half);
    match rotation {
        SatelliteRotation::Identity(phase) => {
            if phase != Complex64::new(1.0, 0.0) {
                lower.iter_mut().chain(upper.iter_mut()).for_each(|a| *a *= phase);
            }
        }
        SatelliteRotation::Flip { plus, minus } => {
            // Hadamard on the central spin, flip every satellite with the
            // branch phase, Hadamard back; fused per (s, s̄) quadruple.
            let a = 0.5 * (plus + minus);
            let b = 0.5 * (plus - minus);
            let mask = half - 1;
            for s in 0..half / 2 {
                let t = s ^ mask;
                let (s0, s1, t0, t1) = (lower[s], upper[s], lower[t], upper[t]);
                lower[s] = a * t0 + b * t1;
                upper[s] = b * t0 + a * t1;
                lower[t] = a * s0 + b * s1;
                upper[t] = b * s0 + a * s1;
            }
        }
        SatelliteRotation::General { cos, sin } => {
            central_hadamard(lower, upper, 1.0);
            rotate_all_satellites(lower, n_sat, cos, sin);
            rotate_all_satellites(upper, n_sat, cos, -sin);
            central_hadamard(lower, upper, 0.5);
        }
    }
}

/// Unnormalized `x ± y`, scaled. A pair of calls uses scales 1 and ½, which
/// is exact where (1/√2)² is not.
fn central_hadamard(lower: &mut [Complex64], upper: &mut [Complex64], scale: f64) {
    for (a, b) in lower.iter_mut().zip(upper.iter_mut()) {
        let (x, y) = (*a, *b);
        *a = (x + y) * scale;
        *b = (x - y) * scale;
    }
}

/// Applies `cos 𝕀 + i sin σ_x` to each of the `n` qubits of `v`.
fn rotate_all_satellites(v: &mut [Complex64], n: usize, cos: f64, sin: f64) {
    let isin = Complex64::new(0.0, sin);
    for q in 0..n {
        let stride = 1usize << q;
        for block in v.chunks_exact_mut(2 * stride) {
            let (lo, hi) = block.split_at_mut(stride);
            for (x, y) in lo.iter_mut().zip(hi.iter_mut()) {
                let (a, b) = (*x, *y);
                *x = a * cos + isin * b;
                *y = isin * a + b * cos;
            }
        }
    }
}

fn symmetric_interaction(
    amps: &mut [Complex64],
    n_sat: usize,
    rot: &XRotation,
    jx_plus: &[Complex64],
    jx_minus: &[Complex64],
) {
    let dim = n_sat + 1;
    let mut plus = Vec::with_capacity(dim);
    let mut minus = Vec::with_capacity(dim);
    for k in 0..dim {
        let (a, b) = (amps[2 * k], amps[2 * k + 1]);
        plus.push(a + b);
        minus.push(a - b);
    }
    let mut scratch = vec![Complex64::new(0.0, 0.0); dim];
    rot.apply_diagonal(jx_plus, &mut plus, &mut scratch);
    rot.apply_diagonal(jx_minus, &mut minus, &mut scratch);
    for k in 0..dim {
        // Exact ½ instead of (1/√2)², which rounds up and biases the norm.
        amps[2 * k] = (plus[k] + minus[k]) * 0.5;
        amps[2 * k + 1] = (plus[k] - minus[k]) * 0.5;
    }
}

pub fn apply_kick(state: &SpinState, params: &DriveParams) -> Result<SpinState> {
    let mut out = state.clone();
    FloquetOperator::for_state(params, state)?.kick(&mut out)?;
    Ok(out)
}

pub fn apply_interaction(state: &SpinState, params: &DriveParams) -> Result<SpinState> {
    let mut out = state.clone();
    FloquetOperator::for_state(params, state)?.interact(&mut out)?;
    Ok(out)
}

pub fn floquet_step(state: &SpinState, params: &DriveParams) -> Result<SpinState> {
    let mut out = state.clone();
    FloquetOperator::for_state(params, state)?.step(&mut out)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    use super::*;
    use crate::axis::Axis;

    fn checkpoint_close(a: &[Checkpoint], b: &[Checkpoint]) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert_eq!(x.period, y.period);
            for (u, v) in x.overlaps.iter().zip(&y.overlaps) {
                assert!((u - v).norm() < 1e-11, "{u} vs {v}");
            }
            for r in 0..2 {
                for c in 0..2 {
                    assert!((x.central_density[r][c] - y.central_density[r][c]).norm() < 1e-11);
                }
            }
        }
    }

    #[test]
    fn blocked_flip_evolution_matches_stepping() {
        for n in [1usize, 2, 3, 6, 11] {
            let fields: Vec<f64> = (0..n).map(|i| 0.3 + 0.71 * i as f64).collect();
            let p = DriveParams::with_fields(2.0 * PI, fields, 0.9);
            let op = FloquetOperator::new(&p, n, Backend::Full).unwrap();
            assert!(matches!(
                op.kernel,
                Kernel::Full { rotation: SatelliteRotation::Flip { .. }, .. }
            ));
            let init = SpinState::product(n, Axis::PlusY, Axis::PlusX, Backend::Full).unwrap();
            let other = SpinState::product(n, Axis::MinusX, Axis::PlusZ, Backend::Full).unwrap();
            let mut a = init.clone();
            let fast = op.evolve_with_checkpoints(&mut a, 9, 2, &[&init, &other]).unwrap();
            let mut b = init.clone();
            let mut slow = Vec::new();
            for period in 1..=9 {
                op.step(&mut b).unwrap();
                if period % 2 == 0 {
                    slow.push(Checkpoint {
                        period,
                        overlaps: vec![init.inner(&b).unwrap(), other.inner(&b).unwrap()],
                        central_density: crate::observables::central_reduced_density(&b),
                    });
                }
            }
            checkpoint_close(&fast, &slow);
            assert!(a.amplitudes().iter().zip(b.amplitudes()).all(|(x, y)| (x - y).norm() < 1e-12));
        }
    }

    #[test]
    fn checkpoint_arguments_are_validated() {
        let p = DriveParams::uniform(1.0, 0.5);
        let op = FloquetOperator::new(&p, 3, Backend::Symmetric).unwrap();
        let mut s = SpinState::product(3, Axis::PlusX, Axis::PlusX, Backend::Symmetric).unwrap();
        assert!(op.evolve_with_checkpoints(&mut s, 4, 0, &[]).is_err());
        let full = SpinState::product(3, Axis::PlusX, Axis::PlusX, Backend::Full).unwrap();
        assert!(op.evolve_with_checkpoints(&mut s, 4, 1, &[&full]).is_err());
        let cps = op.evolve_with_checkpoints(&mut s, 5, 2, &[]).unwrap();
        assert_eq!(cps.iter().map(|c| c.period).collect::<Vec<_>>(), vec![2, 4]);
    }

    fn fid(a: &SpinState, b: &SpinState) -> f64 {
        a.inner(b).unwrap().norm_sqr()
    }

    fn single(sat: Axis, central: Axis) -> SpinState {
        SpinState::product(1, sat, central, Backend::Full).unwrap()
    }

    #[test]
    fn kick_rotates_x_into_superposition() {
        let g = 0.83;
        let p = DriveParams::new(0.0, crate::drive::SatelliteFields::Uniform(g), 0.0);
        let out = apply_kick(&single(Axis::PlusX, Axis::PlusZ), &p).unwrap();
        // cos(g/2)|+x> - i sin(g/2)|-x> on the satellite.
        let px = Axis::PlusX.amplitudes();
        let mx = Axis::MinusX.amplitudes();
        let (c, s) = ((g / 2.0).cos(), (g / 2.0).sin());
        let want: Vec<Complex64> = (0..2)
            .map(|b| px[b] * c - Complex64::new(0.0, s) * mx[b])
            .chain([Complex64::new(0.0, 0.0); 2])
            .collect();
        let want = SpinState::from_amplitudes(1, Backend::Full, want).unwrap();
        assert!((fid(&out, &want) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn quarter_kick_cycles_x_and_y() {
        let p = DriveParams::uniform(0.0, FRAC_PI_2);
        let cases = [
            (Axis::PlusX, Axis::PlusY),
            (Axis::MinusX, Axis::MinusY),
            (Axis::PlusY, Axis::MinusX),
            (Axis::MinusY, Axis::PlusX),
            (Axis::PlusZ, Axis::PlusZ),
        ];
        for (from, to) in cases {
            let out = apply_kick(&single(from, Axis::PlusZ), &p).unwrap();
            assert!((fid(&out, &single(to, Axis::PlusZ)) - 1.0).abs() < 1e-14, "{from}");
        }
    }

    #[test]
    fn zero_parameters_are_identity() {
        let s = SpinState::product(3, Axis::PlusY, Axis::MinusX, Backend::Full).unwrap();
        let out = floquet_step(&s, &DriveParams::uniform(0.0, 0.0)).unwrap();
        for (a, b) in s.amplitudes().iter().zip(out.amplitudes()) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn x_product_picks_up_quarter_phase() {
        let s = single(Axis::PlusX, Axis::PlusX);
        let p = DriveParams::uniform(PI, 0.0);
        for backend in [Backend::Full, Backend::Symmetric] {
            let s = SpinState::product(1, Axis::PlusX, Axis::PlusX, backend).unwrap();
            let out = apply_interaction(&s, &p).unwrap();
            let ratio = s.inner(&out).unwrap();
            assert!((ratio - Complex64::from_polar(1.0, FRAC_PI_4)).norm() < 1e-14);
        }
        let _ = s;
    }

    #[test]
    fn flip_and_general_paths_agree() {
        // λ slightly off 2π uses the general path; exactly 2π the flip path.
        let n = 5;
        let s = SpinState::product(n, Axis::PlusY, Axis::MinusZ, Backend::Full).unwrap();
        let mut a = s.clone();
        let mut b = s.clone();
        full_interaction(b.amplitudes_mut(), n, SatelliteRotation::new(2.0 * PI, n));
        let (sin, cos) = (0.5 * PI).sin_cos();
        full_interaction(a.amplitudes_mut(), n, SatelliteRotation::General { cos, sin });
        for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
            assert!((x - y).norm() < 1e-14);
        }
    }

    #[test]
    fn symmetric_backend_rejects_nonuniform_fields() {
        let p = DriveParams::with_fields(1.0, vec![0.1, 0.2], 0.3);
        assert_eq!(
            FloquetOperator::new(&p, 2, Backend::Symmetric).unwrap_err(),
            SpinError::NonUniformFields
        );
        assert!(FloquetOperator::new(&p, 3, Backend::Full).is_err());
        assert!(FloquetOperator::new(&p, 2, Backend::Full).is_ok());
    }

    #[test]
    fn operator_rejects_mismatched_state() {
        let op = FloquetOperator::new(&DriveParams::uniform(1.0, 1.0), 3, Backend::Full).unwrap();
        let mut s = SpinState::product(3, Axis::PlusX, Axis::PlusX, Backend::Symmetric).unwrap();
        assert!(op.step(&mut s).is_err());
    }
}
