use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::Momentum;
use crate::error::{Error, Result};

/// Deterministic momentum sample set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SampleConfig {
    pub mass: f64,
    pub count: usize,
    /// Radius range in units of the mass.
    pub radius_range: (f64, f64),
    pub seed: u64,
    /// Adds p = 0 and the six axis points with |p| = m.
    pub include_special: bool,
}

impl Default for SampleConfig {
    fn default() -> Self {
        Self {
            mass: 1.0,
            count: 200,
            radius_range: (0.0, 10.0),
            seed: 42,
            include_special: true,
        }
    }
}

/// Smallest radius drawn, in units of the mass.
pub const MIN_RADIUS: f64 = 1e-3;

impl SampleConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.mass > 0.0 && self.mass.is_finite()) {
            return Err(Error::NonPositiveMass(self.mass));
        }
        if self.count == 0 {
            return Err(Error::InvalidConfig("sample count must be at least 1".into()));
        }
        let (lo, hi) = self.radius_range;
        if !(lo >= 0.0 && lo < hi && hi.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "radius range must satisfy 0 <= r_min < r_max, got ({lo}, {hi})"
            )));
        }
        if hi <= MIN_RADIUS {
            return Err(Error::InvalidConfig(format!("r_max must exceed {MIN_RADIUS}")));
        }
        Ok(())
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

/// Random momenta first, then the special points.
pub fn sample_momenta(cfg: &SampleConfig) -> Result<Vec<Momentum>> {
    cfg.validate()?;
    let m = cfg.mass;
    let mut rng = cfg.rng();
    let (lo, hi) = cfg.radius_range;
    let (ln_lo, ln_hi) = (lo.max(MIN_RADIUS).ln(), hi.ln());
    let mut out = Vec::with_capacity(cfg.count + 7);
    for _ in 0..cfg.count {
        let r = rng.gen_range(ln_lo..=ln_hi).exp() * m;
        let dir = random_direction(&mut rng);
        out.push(Momentum::new(dir.map(|c| c * r), m)?);
    }
    if cfg.include_special {
        out.extend(special_momenta(m)?);
    }
    Ok(out)
}

/// p = 0 and ±m along each axis.
pub fn special_momenta(m: f64) -> Result<Vec<Momentum>> {
    let mut out = vec![Momentum::at_rest(m)?];
    for k in 0..3 {
        for s in [1.0, -1.0] {
            let mut p = [0.0; 3];
            p[k] = s * m;
            out.push(Momentum::new(p, m)?);
        }
    }
    Ok(out)
}

/// Uniform point on the unit sphere.
pub fn random_direction<R: Rng>(rng: &mut R) -> [f64; 3] {
    let z: f64 = rng.gen_range(-1.0..=1.0);
    let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let s = (1.0 - z * z).max(0.0).sqrt();
    [s * phi.cos(), s * phi.sin(), z]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_sample_with_specials_contains_rest() {
        let cfg = SampleConfig {
            count: 1,
            ..Default::default()
        };
        let s = sample_momenta(&cfg).unwrap();
        assert_eq!(s.len(), 8);
        assert!(s.iter().any(|q| q.p == [0.0; 3]));
    }

    #[test]
    fn deterministic_and_sized() {
        let cfg = SampleConfig::default();
        let a = sample_momenta(&cfg).unwrap();
        let b = sample_momenta(&cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 207);
        assert!(a.iter().all(|q| q.mass == 1.0));
        for q in &a[..200] {
            let r = q.norm();
            assert!((MIN_RADIUS - 1e-12..=10.0 + 1e-9).contains(&r), "{r}");
        }
    }

    #[test]
    fn invalid_configs() {
        let bad = |f: fn(&mut SampleConfig)| {
            let mut c = SampleConfig::default();
            f(&mut c);
            sample_momenta(&c).is_err()
        };
        assert!(bad(|c| c.count = 0));
        assert!(bad(|c| c.radius_range = (5.0, 1.0)));
        assert!(bad(|c| c.radius_range = (-1.0, 1.0)));
        assert!(bad(|c| c.mass = 0.0));
    }
}
