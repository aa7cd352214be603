use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex64;

use super::Jet3;
use crate::error::Result;

/// Real-valued scalar function of the momentum components, stored as an
/// expression tree so it can be differentiated symbolically and evaluated
/// with exact first-order jets.
#[derive(Clone)]
pub struct ScalarFn(Arc<ScalarNode>);

#[derive(Debug)]
enum ScalarNode {
    Const(f64),
    /// The k-th momentum component (0-based).
    Momentum(usize),
    /// E(p) = sqrt(p·p + m²) for a fixed mass.
    Energy(f64),
    Sum(ScalarFn, ScalarFn),
    Product(ScalarFn, ScalarFn),
    Recip(ScalarFn),
    Sqrt(ScalarFn),
}

pub(crate) type ScalarCache = HashMap<usize, Jet3>;

impl ScalarFn {
    fn node(n: ScalarNode) -> Self {
        ScalarFn(Arc::new(n))
    }

    pub fn constant(c: f64) -> Self {
        Self::node(ScalarNode::Const(c))
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn one() -> Self {
        Self::constant(1.0)
    }

    pub fn momentum(k: usize) -> Self {
        assert!(k < 3, "momentum index {k} out of range");
        Self::node(ScalarNode::Momentum(k))
    }

    pub fn energy(mass: f64) -> Self {
        Self::node(ScalarNode::Energy(mass))
    }

    pub fn as_const(&self) -> Option<f64> {
        match *self.0 {
            ScalarNode::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_const() == Some(0.0)
    }

    pub fn recip(&self) -> Self {
        if let Some(c) = self.as_const().filter(|c| *c != 0.0) {
            return Self::constant(1.0 / c);
        }
        Self::node(ScalarNode::Recip(self.clone()))
    }

    pub fn sqrt(&self) -> Self {
        if let Some(c) = self.as_const().filter(|c| *c > 0.0) {
            return Self::constant(c.sqrt());
        }
        Self::node(ScalarNode::Sqrt(self.clone()))
    }

    pub fn square(&self) -> Self {
        self.clone() * self.clone()
    }

    /// Symbolic ∂/∂pᵏ.
    pub fn partial(&self, k: usize) -> Self {
        match &*self.0 {
            ScalarNode::Const(_) => Self::zero(),
            ScalarNode::Momentum(j) => Self::constant(if *j == k { 1.0 } else { 0.0 }),
            ScalarNode::Energy(_) => Self::momentum(k) * self.recip(),
            ScalarNode::Sum(a, b) => a.partial(k) + b.partial(k),
            ScalarNode::Product(a, b) => a.partial(k) * b.clone() + a.clone() * b.partial(k),
            ScalarNode::Recip(a) => -(a.partial(k) * self.square()),
            ScalarNode::Sqrt(a) => a.partial(k) * (Self::constant(0.5) * self.recip()),
        }
    }

    /// The same function composed with p ↦ −p.
    pub fn reflect(&self) -> Self {
        match &*self.0 {
            ScalarNode::Const(_) | ScalarNode::Energy(_) => self.clone(),
            ScalarNode::Momentum(_) => -self.clone(),
            ScalarNode::Sum(a, b) => a.reflect() + b.reflect(),
            ScalarNode::Product(a, b) => a.reflect() * b.reflect(),
            ScalarNode::Recip(a) => a.reflect().recip(),
            ScalarNode::Sqrt(a) => a.reflect().sqrt(),
        }
    }

    pub fn structurally_eq(&self, other: &ScalarFn) -> bool {
        if Arc::ptr_eq(&self.0, &other.0) {
            return true;
        }
        use ScalarNode::*;
        match (&*self.0, &*other.0) {
            (Const(a), Const(b)) => a == b,
            (Momentum(a), Momentum(b)) => a == b,
            (Energy(a), Energy(b)) => a == b,
            (Sum(a, b), Sum(c, d)) | (Product(a, b), Product(c, d)) => {
                a.structurally_eq(c) && b.structurally_eq(d)
            }
            (Recip(a), Recip(b)) | (Sqrt(a), Sqrt(b)) => a.structurally_eq(b),
            _ => false,
        }
    }

    pub fn eval(&self, p: &[f64; 3]) -> Result<Jet3> {
        self.eval_cached(p, &mut ScalarCache::new())
    }

    pub fn value(&self, p: &[f64; 3]) -> Result<f64> {
        Ok(self.eval(p)?.value.re)
    }

    pub(crate) fn eval_cached(&self, p: &[f64; 3], cache: &mut ScalarCache) -> Result<Jet3> {
        let key = Arc::as_ptr(&self.0) as usize;
        if let Some(j) = cache.get(&key) {
            return Ok(*j);
        }
        let jet = match &*self.0 {
            ScalarNode::Const(c) => Jet3::constant(Complex64::new(*c, 0.0)),
            ScalarNode::Momentum(k) => Jet3::variable(p[*k], *k),
            ScalarNode::Energy(m) => {
                let e = (p.iter().map(|c| c * c).sum::<f64>() + m * m).sqrt();
                Jet3 {
                    value: Complex64::new(e, 0.0),
                    partial: [0, 1, 2].map(|k| Complex64::new(p[k] / e, 0.0)),
                }
            }
            ScalarNode::Sum(a, b) => a.eval_cached(p, cache)? + b.eval_cached(p, cache)?,
            ScalarNode::Product(a, b) => a.eval_cached(p, cache)? * b.eval_cached(p, cache)?,
            ScalarNode::Recip(a) => a.eval_cached(p, cache)?.recip()?,
            ScalarNode::Sqrt(a) => a.eval_cached(p, cache)?.sqrt()?,
        };
        cache.insert(key, jet);
        Ok(jet)
    }
}

impl fmt::Debug for ScalarFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.0 {
            ScalarNode::Const(c) => write!(f, "{c}"),
            ScalarNode::Momentum(k) => write!(f, "p{}", k + 1),
            ScalarNode::Energy(m) => write!(f, "E[m={m}]"),
            ScalarNode::Sum(a, b) => write!(f, "({a:?} + {b:?})"),
            ScalarNode::Product(a, b) => write!(f, "{a:?}*{b:?}"),
            ScalarNode::Recip(a) => write!(f, "1/{a:?}"),
            ScalarNode::Sqrt(a) => write!(f, "sqrt({a:?})"),
        }
    }
}

impl Add for ScalarFn {
    type Output = ScalarFn;
    fn add(self, rhs: ScalarFn) -> ScalarFn {
        match (self.as_const(), rhs.as_const()) {
            (Some(a), Some(b)) => ScalarFn::constant(a + b),
            (Some(0.0), _) => rhs,
            (_, Some(0.0)) => self,
            _ => ScalarFn::node(ScalarNode::Sum(self, rhs)),
        }
    }
}

impl Sub for ScalarFn {
    type Output = ScalarFn;
    fn sub(self, rhs: ScalarFn) -> ScalarFn {
        self + (-rhs)
    }
}

impl Neg for ScalarFn {
    type Output = ScalarFn;
    fn neg(self) -> ScalarFn {
        ScalarFn::constant(-1.0) * self
    }
}

impl Mul for ScalarFn {
    type Output = ScalarFn;
    fn mul(self, rhs: ScalarFn) -> ScalarFn {
        match (self.as_const(), rhs.as_const()) {
            (Some(a), Some(b)) => ScalarFn::constant(a * b),
            (Some(0.0), _) => ScalarFn::zero(),
            (_, Some(0.0)) => ScalarFn::zero(),
            (Some(1.0), _) => rhs,
            (_, Some(1.0)) => self,
            _ => ScalarFn::node(ScalarNode::Product(self, rhs)),
        }
    }
}

impl Div for ScalarFn {
    type Output = ScalarFn;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: ScalarFn) -> ScalarFn {
        self * rhs.recip()
    }
}

impl Mul<ScalarFn> for f64 {
    type Output = ScalarFn;
    fn mul(self, rhs: ScalarFn) -> ScalarFn {
        ScalarFn::constant(self) * rhs
    }
}

impl Add<ScalarFn> for f64 {
    type Output = ScalarFn;
    fn add(self, rhs: ScalarFn) -> ScalarFn {
        ScalarFn::constant(self) + rhs
    }
}

impl Add<f64> for ScalarFn {
    type Output = ScalarFn;
    fn add(self, rhs: f64) -> ScalarFn {
        self + ScalarFn::constant(rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn energy_and_its_partial() {
        let e = ScalarFn::energy(1.0);
        let j = e.eval(&[0.0, 0.0, 0.75]).unwrap();
        assert_eq!(j.value.re, 1.25);
        assert!((j.partial[2].re - 0.6).abs() < 1e-15);
        let d = e.partial(2).value(&[0.0, 0.0, 0.75]).unwrap();
        assert!((d - 0.6).abs() < 1e-15);
    }

    #[test]
    fn constant_folding() {
        let s = ScalarFn::constant(2.0) * ScalarFn::constant(3.0) + ScalarFn::zero();
        assert_eq!(s.as_const(), Some(6.0));
        assert!((ScalarFn::zero() * ScalarFn::momentum(0)).is_zero());
        assert!(ScalarFn::energy(1.0).partial(0).partial(1).partial(2).as_const().is_none());
    }

    #[test]
    fn reflection_flips_odd_terms() {
        let f = ScalarFn::momentum(0) * ScalarFn::energy(2.0);
        let p = [0.3, -0.2, 0.1];
        let a = f.value(&p).unwrap();
        let b = f.reflect().value(&p).unwrap();
        assert!((a + b).abs() < 1e-15);
    }

    #[test]
    fn sqrt_domain_error_propagates() {
        let f = (ScalarFn::constant(-1.0) - ScalarFn::momentum(0).square()).sqrt();
        assert!(f.eval(&[0.0; 3]).is_err());
    }
}
