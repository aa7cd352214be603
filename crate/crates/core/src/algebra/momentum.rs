use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An on-shell three-momentum in natural units together with the mass it
/// belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Momentum {
    pub p: [f64; 3],
    pub mass: f64,
}

impl Momentum {
    pub fn new(p: [f64; 3], mass: f64) -> Result<Self> {
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::NonPositiveMass(mass));
        }
        if p.iter().any(|c| !c.is_finite()) {
            return Err(Error::Domain(format!("non-finite momentum {p:?}")));
        }
        Ok(Self { p, mass })
    }

    pub fn at_rest(mass: f64) -> Result<Self> {
        Self::new([0.0; 3], mass)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.p.iter().map(|c| c * c).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// E(p) = sqrt(p·p + m²).
    pub fn energy(&self) -> f64 {
        (self.norm_sqr() + self.mass * self.mass).sqrt()
    }

    pub fn reflected(&self) -> Self {
        Self {
            p: [-self.p[0], -self.p[1], -self.p[2]],
            mass: self.mass,
        }
    }

    /// Same direction, rescaled to |p| = `radius`. The zero momentum is
    /// mapped onto the 3-axis.
    pub fn with_radius(&self, radius: f64) -> Self {
        let n = self.norm();
        let p = if n == 0.0 {
            [0.0, 0.0, radius]
        } else {
            self.p.map(|c| c * radius / n)
        };
        Self { p, mass: self.mass }
    }
}
