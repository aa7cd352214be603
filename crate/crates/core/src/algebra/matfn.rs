use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex64;

use super::scalar::ScalarCache;
use super::{Mat4, MatJet, Momentum, ScalarFn};
use crate::error::{Error, Result};

/// A matrix-valued function of momentum, closed under sums, matrix
/// products and multiplication by scalar functions.
///
/// Derivatives are exact: [`MatFn::partial`] differentiates the tree
/// symbolically and [`MatFn::eval`] propagates first-order jets. Both routes
/// are cross-checked against finite differences in the test suite.
#[derive(Clone)]
pub struct MatFn(Arc<Node>);

struct Node {
    kind: Kind,
    /// True when the function is a scalar multiple of the identity.
    scalar: bool,
}

enum Kind {
    Zero,
    Const(Mat4),
    /// s(p)·I
    Scalar(ScalarFn),
    /// s(p)·A(p)
    Scaled(ScalarFn, MatFn),
    /// c·A(p) for a complex constant c
    Scale(Complex64, MatFn),
    Sum(MatFn, MatFn),
    Product(MatFn, MatFn),
}

type Memo = HashMap<usize, MatFn>;

fn key(f: &MatFn) -> usize {
    Arc::as_ptr(&f.0) as usize
}

impl MatFn {
    fn node(kind: Kind) -> Self {
        let scalar = match &kind {
            Kind::Zero | Kind::Scalar(_) => true,
            Kind::Const(m) => m.as_scalar().is_some(),
            Kind::Scaled(_, a) | Kind::Scale(_, a) => a.is_scalar(),
            Kind::Sum(a, b) | Kind::Product(a, b) => a.is_scalar() && b.is_scalar(),
        };
        MatFn(Arc::new(Node { kind, scalar }))
    }

    pub fn zero() -> Self {
        Self::node(Kind::Zero)
    }

    pub fn identity() -> Self {
        Self::constant(Mat4::identity())
    }

    pub fn constant(m: Mat4) -> Self {
        if m.is_zero() {
            Self::zero()
        } else {
            Self::node(Kind::Const(m))
        }
    }

    /// s(p)·I
    pub fn scalar(s: ScalarFn) -> Self {
        match s.as_const() {
            Some(c) => Self::constant(Mat4::scalar(Complex64::new(c, 0.0))),
            None => Self::node(Kind::Scalar(s)),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.0.kind, Kind::Zero)
    }

    pub fn is_scalar(&self) -> bool {
        self.0.scalar
    }

    pub fn as_const(&self) -> Option<Mat4> {
        match &self.0.kind {
            Kind::Zero => Some(Mat4::zero()),
            Kind::Const(m) => Some(*m),
            _ => None,
        }
    }

    /// s(p)·self
    pub fn scaled_by(&self, s: &ScalarFn) -> Self {
        if let Some(c) = s.as_const() {
            return self.scale(Complex64::new(c, 0.0));
        }
        match &self.0.kind {
            Kind::Zero => Self::zero(),
            Kind::Scalar(t) => Self::scalar(s.clone() * t.clone()),
            Kind::Const(m) if m.as_scalar().map(|c| c.im == 0.0).unwrap_or(false) => {
                Self::scalar(s.clone() * ScalarFn::constant(m.0[0][0].re))
            }
            _ => Self::node(Kind::Scaled(s.clone(), self.clone())),
        }
    }

    /// c·self
    pub fn scale(&self, c: Complex64) -> Self {
        if c == Complex64::new(0.0, 0.0) {
            return Self::zero();
        }
        if c == Complex64::new(1.0, 0.0) {
            return self.clone();
        }
        match &self.0.kind {
            Kind::Zero => Self::zero(),
            Kind::Const(m) => Self::constant(*m * c),
            Kind::Scale(d, a) => a.scale(c * d),
            _ => Self::node(Kind::Scale(c, self.clone())),
        }
    }

    pub fn scale_re(&self, c: f64) -> Self {
        self.scale(Complex64::new(c, 0.0))
    }

    /// Symbolic ∂/∂pᵏ.
    pub fn partial(&self, k: usize) -> Self {
        self.partial_memo(k, &mut Memo::new())
    }

    fn partial_memo(&self, k: usize, memo: &mut Memo) -> Self {
        if let Some(d) = memo.get(&key(self)) {
            return d.clone();
        }
        let d = match &self.0.kind {
            Kind::Zero | Kind::Const(_) => Self::zero(),
            Kind::Scalar(s) => Self::scalar(s.partial(k)),
            Kind::Scaled(s, a) => a.scaled_by(&s.partial(k)) + a.partial_memo(k, memo).scaled_by(s),
            Kind::Scale(c, a) => a.partial_memo(k, memo).scale(*c),
            Kind::Sum(a, b) => a.partial_memo(k, memo) + b.partial_memo(k, memo),
            Kind::Product(a, b) => {
                a.partial_memo(k, memo) * b.clone() + a.clone() * b.partial_memo(k, memo)
            }
        };
        memo.insert(key(self), d.clone());
        d
    }

    /// The same function composed with p ↦ −p.
    pub fn reflect(&self) -> Self {
        self.reflect_memo(&mut Memo::new())
    }

    fn reflect_memo(&self, memo: &mut Memo) -> Self {
        if let Some(d) = memo.get(&key(self)) {
            return d.clone();
        }
        let r = match &self.0.kind {
            Kind::Zero | Kind::Const(_) => self.clone(),
            Kind::Scalar(s) => Self::scalar(s.reflect()),
            Kind::Scaled(s, a) => a.reflect_memo(memo).scaled_by(&s.reflect()),
            Kind::Scale(c, a) => a.reflect_memo(memo).scale(*c),
            Kind::Sum(a, b) => a.reflect_memo(memo) + b.reflect_memo(memo),
            Kind::Product(a, b) => a.reflect_memo(memo) * b.reflect_memo(memo),
        };
        memo.insert(key(self), r.clone());
        r
    }

    /// Pointwise conjugate transpose. Scalar primitives are real, so only
    /// constants and complex scale factors are conjugated.
    pub fn adjoint(&self) -> Self {
        self.adjoint_memo(&mut Memo::new())
    }

    fn adjoint_memo(&self, memo: &mut Memo) -> Self {
        if let Some(d) = memo.get(&key(self)) {
            return d.clone();
        }
        let r = match &self.0.kind {
            Kind::Zero | Kind::Scalar(_) => self.clone(),
            Kind::Const(m) => Self::constant(m.dagger()),
            Kind::Scaled(s, a) => a.adjoint_memo(memo).scaled_by(s),
            Kind::Scale(c, a) => a.adjoint_memo(memo).scale(c.conj()),
            Kind::Sum(a, b) => a.adjoint_memo(memo) + b.adjoint_memo(memo),
            Kind::Product(a, b) => b.adjoint_memo(memo) * a.adjoint_memo(memo),
        };
        memo.insert(key(self), r.clone());
        r
    }

    pub fn structurally_eq(&self, other: &MatFn) -> bool {
        if Arc::ptr_eq(&self.0, &other.0) {
            return true;
        }
        match (&self.0.kind, &other.0.kind) {
            (Kind::Zero, Kind::Zero) => true,
            (Kind::Const(a), Kind::Const(b)) => a == b,
            (Kind::Scalar(a), Kind::Scalar(b)) => a.structurally_eq(b),
            (Kind::Scaled(s, a), Kind::Scaled(t, b)) => s.structurally_eq(t) && a.structurally_eq(b),
            (Kind::Scale(c, a), Kind::Scale(d, b)) => c == d && a.structurally_eq(b),
            (Kind::Sum(a, b), Kind::Sum(c, d)) | (Kind::Product(a, b), Kind::Product(c, d)) => {
                a.structurally_eq(c) && b.structurally_eq(d)
            }
            _ => false,
        }
    }

    /// Value and first partials at `q`. The mass is baked into the tree;
    /// only `q.p` is read.
    pub fn eval(&self, q: &Momentum) -> Result<MatJet> {
        Evaluator::new(q).eval(self)
    }

    pub fn value(&self, q: &Momentum) -> Result<Mat4> {
        Ok(self.eval(q)?.value)
    }
}

/// Evaluates many functions at one momentum, sharing work across common
/// subtrees.
pub struct Evaluator {
    p: [f64; 3],
    mats: HashMap<usize, (MatFn, MatJet)>,
    scalars: ScalarCache,
    // keeps cached scalar nodes alive so their addresses stay unique
    pinned: Vec<ScalarFn>,
}

impl Evaluator {
    pub fn new(q: &Momentum) -> Self {
        Self {
            p: q.p,
            mats: HashMap::new(),
            scalars: ScalarCache::new(),
            pinned: Vec::new(),
        }
    }

    fn scalar(&mut self, s: &ScalarFn) -> Result<super::Jet3> {
        self.pinned.push(s.clone());
        s.eval_cached(&self.p, &mut self.scalars)
    }

    pub fn eval(&mut self, f: &MatFn) -> Result<MatJet> {
        if let Some((_, j)) = self.mats.get(&key(f)) {
            return Ok(*j);
        }
        let jet = match &f.0.kind {
            Kind::Zero => MatJet::zero(),
            Kind::Const(m) => MatJet::constant(*m),
            Kind::Scalar(s) => MatJet::from_scalar(self.scalar(s)?),
            Kind::Scaled(s, a) => {
                let sj = self.scalar(s)?;
                self.eval(a)?.scaled_by(sj)
            }
            Kind::Scale(c, a) => self.eval(a)?.scale(*c),
            Kind::Sum(a, b) => self.eval(a)? + self.eval(b)?,
            Kind::Product(a, b) => self.eval(a)? * self.eval(b)?,
        };
        if !jet.value.is_finite() {
            return Err(Error::Domain(format!("non-finite value at p = {:?}", self.p)));
        }
        self.mats.insert(key(f), (f.clone(), jet));
        Ok(jet)
    }

    pub fn value(&mut self, f: &MatFn) -> Result<Mat4> {
        Ok(self.eval(f)?.value)
    }
}

/// [A, B] with structural shortcuts: scalar functions commute with
/// everything, and constants commute in closed form.
pub fn commutator_fn(a: &MatFn, b: &MatFn) -> MatFn {
    if a.is_scalar() || b.is_scalar() || a.structurally_eq(b) {
        return MatFn::zero();
    }
    if let (Some(x), Some(y)) = (a.as_const(), b.as_const()) {
        return MatFn::constant(x.commutator(&y));
    }
    a.clone() * b.clone() - b.clone() * a.clone()
}

/// max over samples of ‖F(q) − G(q)‖_F / max(1, ‖F(q)‖_F).
pub fn matfn_residual(f: &MatFn, g: &MatFn, samples: &[Momentum]) -> Result<f64> {
    Ok(matfn_residual_detail(f, g, samples)?.0)
}

/// Like [`matfn_residual`], also returning the sample where the maximum
/// is attained.
pub fn matfn_residual_detail(
    f: &MatFn,
    g: &MatFn,
    samples: &[Momentum],
) -> Result<(f64, Momentum)> {
    let first = *samples.first().ok_or(Error::EmptySamples)?;
    let mut worst = (0.0f64, first);
    for q in samples {
        let mut ev = Evaluator::new(q);
        let fv = ev.value(f)?;
        let gv = ev.value(g)?;
        let r = (fv - gv).frobenius_norm() / fv.frobenius_norm().max(1.0);
        if r > worst.0 || r.is_nan() {
            worst = (r, *q);
        }
    }
    Ok(worst)
}

impl Add for MatFn {
    type Output = MatFn;
    fn add(self, rhs: MatFn) -> MatFn {
        if self.is_zero() {
            return rhs;
        }
        if rhs.is_zero() {
            return self;
        }
        match (&self.0.kind, &rhs.0.kind) {
            (Kind::Const(a), Kind::Const(b)) => MatFn::constant(*a + *b),
            (Kind::Scalar(s), Kind::Scalar(t)) => MatFn::scalar(s.clone() + t.clone()),
            _ => MatFn::node(Kind::Sum(self, rhs)),
        }
    }
}

impl Sub for MatFn {
    type Output = MatFn;
    fn sub(self, rhs: MatFn) -> MatFn {
        self + (-rhs)
    }
}

impl Neg for MatFn {
    type Output = MatFn;
    fn neg(self) -> MatFn {
        self.scale_re(-1.0)
    }
}

impl Mul for MatFn {
    type Output = MatFn;
    fn mul(self, rhs: MatFn) -> MatFn {
        if self.is_zero() || rhs.is_zero() {
            return MatFn::zero();
        }
        match (&self.0.kind, &rhs.0.kind) {
            (Kind::Const(a), Kind::Const(b)) => return MatFn::constant(*a * *b),
            (Kind::Const(a), _) => {
                if let Some(c) = a.as_scalar() {
                    return rhs.scale(c);
                }
            }
            (_, Kind::Const(b)) => {
                if let Some(c) = b.as_scalar() {
                    return self.scale(c);
                }
            }
            _ => {}
        }
        match (&self.0.kind, &rhs.0.kind) {
            (Kind::Scalar(s), _) => rhs.scaled_by(s),
            (_, Kind::Scalar(s)) => self.scaled_by(s),
            (Kind::Scale(c, a), _) => (a.clone() * rhs.clone()).scale(*c),
            (_, Kind::Scale(c, b)) => (self.clone() * b.clone()).scale(*c),
            _ => MatFn::node(Kind::Product(self, rhs)),
        }
    }
}

impl From<Mat4> for MatFn {
    fn from(m: Mat4) -> Self {
        MatFn::constant(m)
    }
}

impl From<ScalarFn> for MatFn {
    fn from(s: ScalarFn) -> Self {
        MatFn::scalar(s)
    }
}

impl fmt::Debug for MatFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0.kind {
            Kind::Zero => write!(f, "0"),
            Kind::Const(m) => match m.as_scalar() {
                Some(c) => write!(f, "({c})I"),
                None => write!(f, "M"),
            },
            Kind::Scalar(s) => write!(f, "{s:?}·I"),
            Kind::Scaled(s, a) => write!(f, "{s:?}·{a:?}"),
            Kind::Scale(c, a) => write!(f, "({c})·{a:?}"),
            Kind::Sum(a, b) => write!(f, "({a:?} + {b:?})"),
            Kind::Product(a, b) => write!(f, "{a:?}{b:?}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::I;

    fn q(p: [f64; 3]) -> Momentum {
        Momentum::new(p, 1.0).unwrap()
    }

    fn some_matrix(seed: f64) -> Mat4 {
        Mat4::from_fn(|i, j| Complex64::new((seed * (i + 2 * j + 1) as f64).sin(), (seed + i as f64 - j as f64).cos()))
    }

    #[test]
    fn constant_has_zero_partials() {
        let f = MatFn::constant(some_matrix(0.3));
        let j = f.eval(&q([0.1, 0.2, 0.3])).unwrap();
        assert_eq!(j.value, some_matrix(0.3));
        assert!(j.partial.iter().all(|d| d.is_zero()));
        assert!(f.partial(0).is_zero());
    }

    #[test]
    fn energy_identity_partial() {
        let f = MatFn::scalar(ScalarFn::energy(1.0));
        let j = f.eval(&q([0.0, 0.0, 0.75])).unwrap();
        assert_eq!(j.value, Mat4::scalar(Complex64::new(1.25, 0.0)));
        assert!((j.partial[2] - Mat4::identity() * 0.6).frobenius_norm() < 1e-15);
    }

    #[test]
    fn scalar_flags_and_commutator_shortcut() {
        let e = MatFn::scalar(ScalarFn::energy(1.0));
        let m = MatFn::constant(some_matrix(1.1)).scaled_by(&ScalarFn::momentum(1));
        assert!(e.is_scalar());
        assert!(!m.is_scalar());
        assert!(commutator_fn(&e, &m).is_zero());
        assert!(commutator_fn(&m, &m).is_zero());
        let ie = e.scale(I);
        assert!(ie.is_scalar());
    }

    #[test]
    fn adjoint_reverses_products() {
        let a = MatFn::constant(some_matrix(0.7)).scaled_by(&ScalarFn::momentum(0));
        let b = MatFn::constant(some_matrix(1.9)).scale(I);
        let p = q([0.4, -0.3, 0.2]);
        let lhs = (a.clone() * b.clone()).adjoint().value(&p).unwrap();
        let rhs = (a.value(&p).unwrap() * b.value(&p).unwrap()).dagger();
        assert!((lhs - rhs).frobenius_norm() < 1e-14);
    }

    #[test]
    fn residual_of_identical_functions_is_zero() {
        let a = MatFn::constant(some_matrix(0.2)).scaled_by(&ScalarFn::energy(1.0));
        let samples = [q([0.0; 3]), q([1.0, 2.0, 3.0])];
        assert_eq!(matfn_residual(&a, &a, &samples).unwrap(), 0.0);
        assert!(matches!(matfn_residual(&a, &a, &[]), Err(Error::EmptySamples)));
    }
}
