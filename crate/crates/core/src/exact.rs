//! Error-free transformations for quantities that are reused every period,
//! where an ε-sized bias would otherwise accumulate linearly.

use num_complex::Complex64;

/// Dot product in twice the working precision.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct Dot2 {
    hi: f64,
    lo: f64,
}

impl Dot2 {
    pub(crate) fn add(&mut self, a: f64, b: f64) {
        let p = a * b;
        let ep = a.mul_add(b, -p);
        let (s, es) = two_sum(self.hi, p);
        self.hi = s;
        self.lo += ep + es;
    }

    /// `Σ ab + c`, rounded once.
    pub(crate) fn value(&self, c: f64) -> f64 {
        let (s, es) = two_sum(self.hi, c);
        s + (self.lo + es)
    }
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let z = s - a;
    (s, (a - (s - z)) + (b - z))
}

fn nudge(x: f64, ulps: i64) -> f64 {
    let bits = x.abs().to_bits() as i64 + ulps;
    if bits < 0 {
        return x;
    }
    f64::from_bits(bits as u64).copysign(x)
}

/// `|z|² - 1` without rounding bias.
pub(crate) fn unit_defect(z: Complex64) -> f64 {
    let mut d = Dot2::default();
    d.add(z.re, z.re);
    d.add(z.im, z.im);
    d.value(-1.0)
}

/// The representable neighbour of `z` (within two ulps per component) whose
/// modulus is closest to one.
pub(crate) fn unit(z: Complex64) -> Complex64 {
    let mut best = (unit_defect(z).abs(), z);
    for dr in -2..=2 {
        for di in -2..=2 {
            let c = Complex64::new(nudge(z.re, dr), nudge(z.im, di));
            let d = unit_defect(c).abs();
            if d < best.0 {
                best = (d, c);
            }
        }
    }
    best.1
}

/// `e^{iθ}` snapped by [`unit`].
pub(crate) fn unit_phase(theta: f64) -> Complex64 {
    unit(Complex64::from_polar(1.0, theta))
}
