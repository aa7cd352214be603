use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use super::Mat4;
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// First-order jet in the three momentum components: a value together with
/// its partials ∂/∂p¹, ∂/∂p², ∂/∂p³.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet3 {
    pub value: Complex64,
    pub partial: [Complex64; 3],
}

impl Jet3 {
    pub fn constant(value: Complex64) -> Self {
        Self {
            value,
            partial: [ZERO; 3],
        }
    }

    /// The coordinate function pᵏ evaluated at `x`.
    pub fn variable(x: f64, k: usize) -> Self {
        let mut partial = [ZERO; 3];
        partial[k] = Complex64::new(1.0, 0.0);
        Self {
            value: Complex64::new(x, 0.0),
            partial,
        }
    }

    fn chain(self, value: Complex64, derivative: Complex64) -> Self {
        Self {
            value,
            partial: self.partial.map(|d| d * derivative),
        }
    }

    pub fn recip(self) -> Result<Self> {
        if self.value == ZERO || !self.value.is_finite() {
            return Err(Error::Domain(format!("reciprocal of {}", self.value)));
        }
        let r = self.value.inv();
        Ok(self.chain(r, -r * r))
    }

    /// Principal square root; only defined for values with positive real part.
    pub fn sqrt(self) -> Result<Self> {
        if !(self.value.re > 0.0) {
            return Err(Error::Domain(format!("sqrt of {}", self.value)));
        }
        let s = self.value.sqrt();
        Ok(self.chain(s, 0.5 / s))
    }

    pub fn scale(self, c: Complex64) -> Self {
        Self {
            value: self.value * c,
            partial: self.partial.map(|d| d * c),
        }
    }
}

impl Add for Jet3 {
    type Output = Jet3;
    fn add(self, rhs: Jet3) -> Jet3 {
        Jet3 {
            value: self.value + rhs.value,
            partial: [0, 1, 2].map(|k| self.partial[k] + rhs.partial[k]),
        }
    }
}

impl Sub for Jet3 {
    type Output = Jet3;
    fn sub(self, rhs: Jet3) -> Jet3 {
        self + (-rhs)
    }
}

impl Neg for Jet3 {
    type Output = Jet3;
    fn neg(self) -> Jet3 {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul for Jet3 {
    type Output = Jet3;
    fn mul(self, rhs: Jet3) -> Jet3 {
        Jet3 {
            value: self.value * rhs.value,
            partial: [0, 1, 2].map(|k| self.partial[k] * rhs.value + self.value * rhs.partial[k]),
        }
    }
}

/// Matrix-valued first-order jet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatJet {
    pub value: Mat4,
    pub partial: [Mat4; 3],
}

impl MatJet {
    pub fn constant(value: Mat4) -> Self {
        Self {
            value,
            partial: [Mat4::zero(); 3],
        }
    }

    pub fn zero() -> Self {
        Self::constant(Mat4::zero())
    }

    /// s·I for a scalar jet s.
    pub fn from_scalar(s: Jet3) -> Self {
        Self {
            value: Mat4::scalar(s.value),
            partial: s.partial.map(Mat4::scalar),
        }
    }

    pub fn scaled_by(self, s: Jet3) -> Self {
        Self {
            value: self.value * s.value,
            partial: [0, 1, 2].map(|k| self.partial[k] * s.value + self.value * s.partial[k]),
        }
    }

    pub fn scale(self, c: Complex64) -> Self {
        Self {
            value: self.value * c,
            partial: self.partial.map(|d| d * c),
        }
    }
}

impl Add for MatJet {
    type Output = MatJet;
    fn add(self, rhs: MatJet) -> MatJet {
        MatJet {
            value: self.value + rhs.value,
            partial: [0, 1, 2].map(|k| self.partial[k] + rhs.partial[k]),
        }
    }
}

impl Mul for MatJet {
    type Output = MatJet;
    fn mul(self, rhs: MatJet) -> MatJet {
        MatJet {
            value: self.value * rhs.value,
            partial: [0, 1, 2].map(|k| self.partial[k] * rhs.value + self.value * rhs.partial[k]),
        }
    }
}
