//! Exact unit-modulus phases `ζ^k` with `ζ = exp(πi/N)`.

use std::fmt;
use std::ops::{Mul, MulAssign};

use num_complex::Complex64;

/// The root of unity `exp(πi·exp/(modulus/2))`, i.e. `ζ^exp` where the
/// modulus is `2N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PhaseExp {
    exp: u64,
    modulus: u64,
}

impl PhaseExp {
    pub fn new(exp: i128, modulus: u64) -> Self {
        assert!(modulus > 0, "phase modulus must be positive");
        let m = modulus as i128;
        PhaseExp {
            exp: exp.rem_euclid(m) as u64,
            modulus,
        }
    }

    pub fn one(modulus: u64) -> Self {
        PhaseExp { exp: 0, modulus }
    }

    pub fn exponent(self) -> u64 {
        self.exp
    }

    pub fn modulus(self) -> u64 {
        self.modulus
    }

    pub fn is_one(self) -> bool {
        self.exp == 0
    }

    pub fn conj(self) -> Self {
        PhaseExp::new(-(self.exp as i128), self.modulus)
    }

    pub fn pow(self, k: i64) -> Self {
        PhaseExp::new(self.exp as i128 * k as i128, self.modulus)
    }

    /// Re-expresses the phase over a modulus that is a multiple of the
    /// current one.
    pub fn rescale(self, modulus: u64) -> Self {
        assert!(
            modulus % self.modulus == 0,
            "cannot rescale phase from modulus {} to {}",
            self.modulus,
            modulus
        );
        PhaseExp {
            exp: self.exp * (modulus / self.modulus),
            modulus,
        }
    }

    pub fn to_complex(self) -> Complex64 {
        if (4 * self.exp) % self.modulus == 0 {
            return match 4 * self.exp / self.modulus {
                0 => Complex64::new(1.0, 0.0),
                1 => Complex64::new(0.0, 1.0),
                2 => Complex64::new(-1.0, 0.0),
                _ => Complex64::new(0.0, -1.0),
            };
        }
        let angle = 2.0 * std::f64::consts::PI * self.exp as f64 / self.modulus as f64;
        Complex64::from_polar(1.0, angle)
    }

    /// Nearest phase of the given modulus to a unit complex number, if it lies
    /// within `tol` of it.
    pub fn quantize(value: Complex64, modulus: u64, tol: f64) -> Option<Self> {
        let turns = value.arg() / (2.0 * std::f64::consts::PI) * modulus as f64;
        let candidate = PhaseExp::new(turns.round() as i128, modulus);
        let unit = value / value.norm();
        if (candidate.to_complex() - unit).norm() <= tol && (value.norm() - 1.0).abs() <= tol {
            Some(candidate)
        } else {
            None
        }
    }
}

impl Mul for PhaseExp {
    type Output = PhaseExp;

    fn mul(self, rhs: PhaseExp) -> PhaseExp {
        assert_eq!(self.modulus, rhs.modulus, "phase moduli differ");
        PhaseExp {
            exp: (self.exp + rhs.exp) % self.modulus,
            modulus: self.modulus,
        }
    }
}

impl MulAssign for PhaseExp {
    fn mul_assign(&mut self, rhs: PhaseExp) {
        *self = *self * rhs;
    }
}

impl fmt::Display for PhaseExp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ζ^{} (mod {})", self.exp, self.modulus)
    }
}
