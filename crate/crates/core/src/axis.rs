//! Single-spin polarization axes.
//!
//! Amplitudes are given in the `(|+z>, |-z>)` basis with the conventions
//! `|±x> = (|+z> ± |-z>)/√2` and `|±y> = (|+z> ± i|-z>)/√2`.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::SpinError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    PlusX,
    MinusX,
    PlusY,
    MinusY,
    PlusZ,
    MinusZ,
}

impl Axis {
    pub const ALL: [Axis; 6] = [
        Axis::PlusX,
        Axis::MinusX,
        Axis::PlusY,
        Axis::MinusY,
        Axis::PlusZ,
        Axis::MinusZ,
    ];

    /// `(<+z|axis>, <-z|axis>)`.
    pub fn amplitudes(self) -> [Complex64; 2] {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let ih = Complex64::new(0.0, FRAC_1_SQRT_2);
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        match self {
            Axis::PlusX => [h, h],
            Axis::MinusX => [h, -h],
            Axis::PlusY => [h, ih],
            Axis::MinusY => [h, -ih],
            Axis::PlusZ => [one, zero],
            Axis::MinusZ => [zero, one],
        }
    }

    pub fn opposite(self) -> Axis {
        match self {
            Axis::PlusX => Axis::MinusX,
            Axis::MinusX => Axis::PlusX,
            Axis::PlusY => Axis::MinusY,
            Axis::MinusY => Axis::PlusY,
            Axis::PlusZ => Axis::MinusZ,
            Axis::MinusZ => Axis::PlusZ,
        }
    }

    /// `<σ_x>, <σ_y>, <σ_z>` of the eigenstate.
    pub fn bloch_vector(self) -> [f64; 3] {
        match self {
            Axis::PlusX => [1.0, 0.0, 0.0],
            Axis::MinusX => [-1.0, 0.0, 0.0],
            Axis::PlusY => [0.0, 1.0, 0.0],
            Axis::MinusY => [0.0, -1.0, 0.0],
            Axis::PlusZ => [0.0, 0.0, 1.0],
            Axis::MinusZ => [0.0, 0.0, -1.0],
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Axis::PlusX => "+x",
            Axis::MinusX => "-x",
            Axis::PlusY => "+y",
            Axis::MinusY => "-y",
            Axis::PlusZ => "+z",
            Axis::MinusZ => "-z",
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Axis {
    type Err = SpinError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim().to_ascii_lowercase();
        let t = t.strip_prefix('+').unwrap_or(&t);
        match t {
            "x" => Ok(Axis::PlusX),
            "-x" => Ok(Axis::MinusX),
            "y" => Ok(Axis::PlusY),
            "-y" => Ok(Axis::MinusY),
            "z" => Ok(Axis::PlusZ),
            "-z" => Ok(Axis::MinusZ),
            _ => Err(SpinError::Invalid(format!("unknown axis '{s}'"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pauli_expectation(a: [Complex64; 2]) -> [f64; 3] {
        let sx = 2.0 * (a[0].conj() * a[1]).re;
        let sy = 2.0 * (a[0].conj() * a[1]).im;
        let sz = a[0].norm_sqr() - a[1].norm_sqr();
        [sx, sy, sz]
    }

    #[test]
    fn axes_are_normalized_eigenstates() {
        for axis in Axis::ALL {
            let a = axis.amplitudes();
            let norm = a[0].norm_sqr() + a[1].norm_sqr();
            assert!((norm - 1.0).abs() < 1e-15);
            let got = pauli_expectation(a);
            let want = axis.bloch_vector();
            for k in 0..3 {
                assert!((got[k] - want[k]).abs() < 1e-15, "{axis}: {got:?}");
            }
        }
    }

    #[test]
    fn parses_labels() {
        for axis in Axis::ALL {
            assert_eq!(axis.label().parse::<Axis>().unwrap(), axis);
        }
        assert_eq!("x".parse::<Axis>().unwrap(), Axis::PlusX);
        assert!("w".parse::<Axis>().is_err());
        assert_eq!(Axis::PlusY.opposite(), Axis::MinusY);
    }
}
