//! Momentum-space differential operators with matrix-valued coefficients.
//!
//! An operator of order ≤ 2 acts on a spinor-valued test function ψ(p) as
//!
//! ```text
//! O ψ = A ψ + Σₖ Bᵏ ∂ₖψ + Σⱼₖ Cʲᵏ ∂ⱼ∂ₖψ
//! ```
//!
//! with `C` symmetric. Only the six independent entries of `C` are stored.
//! Operator equality is coefficient equality at sampled momenta.

use std::ops::{Add, Index, IndexMut, Neg, Sub};

use num_complex::Complex64;
use serde::Serialize;

use crate::algebra::{commutator_fn, Evaluator, Mat4, MatFn, Momentum, ScalarFn};
use crate::error::{Error, Result};

/// Position of (j, k) in the packed symmetric storage.
pub fn sym_index(j: usize, k: usize) -> usize {
    let (a, b) = if j <= k { (j, k) } else { (k, j) };
    match (a, b) {
        (0, 0) => 0,
        (0, 1) => 1,
        (0, 2) => 2,
        (1, 1) => 3,
        (1, 2) => 4,
        (2, 2) => 5,
        _ => panic!("index pair ({j}, {k}) out of range"),
    }
}

/// The (j, k) pairs in packed storage order.
pub const SYM_PAIRS: [(usize, usize); 6] = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)];

/// ε_ijk with ε_123 = 1 (0-based indices).
pub fn levi_civita3(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

#[derive(Clone, Debug)]
pub struct DiffOp {
    a: MatFn,
    b: [MatFn; 3],
    c: [MatFn; 6],
}

/// Which side the inverse sits on when conjugating by a unitary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Conjugation {
    /// U⁻¹ O U
    InverseLeft,
    /// U O U⁻¹
    Forward,
}

#[derive(Debug, Clone, Serialize)]
pub struct CoefficientResiduals {
    pub a: f64,
    pub b: [f64; 3],
    pub c: [f64; 6],
}

#[derive(Debug, Clone, Serialize)]
pub struct OpResidual {
    pub max_residual: f64,
    pub worst_sample: Momentum,
    pub per_coefficient: CoefficientResiduals,
}

fn zeros<const N: usize>() -> [MatFn; N] {
    std::array::from_fn(|_| MatFn::zero())
}

impl DiffOp {
    pub fn new(a: MatFn, b: [MatFn; 3], c: [MatFn; 6]) -> Self {
        Self { a, b, c }
    }

    pub fn zero() -> Self {
        Self::multiplication(MatFn::zero())
    }

    /// Order-0 operator: multiplication by a matrix function.
    pub fn multiplication(a: MatFn) -> Self {
        Self {
            a,
            b: zeros(),
            c: zeros(),
        }
    }

    pub fn first_order(a: MatFn, b: [MatFn; 3]) -> Self {
        Self { a, b, c: zeros() }
    }

    pub fn a(&self) -> &MatFn {
        &self.a
    }

    pub fn b(&self, k: usize) -> &MatFn {
        &self.b[k]
    }

    /// Symmetric second-order coefficient Cʲᵏ = Cᵏʲ.
    pub fn c(&self, j: usize, k: usize) -> &MatFn {
        &self.c[sym_index(j, k)]
    }

    /// Coefficient of the monomial ∂ⱼ∂ₖ in the action: Cʲʲ on the
    /// diagonal, Cʲᵏ + Cᵏʲ = 2Cʲᵏ off it.
    pub fn mixed_coefficient(&self, j: usize, k: usize) -> MatFn {
        let c = self.c(j, k).clone();
        if j == k {
            c
        } else {
            c.scale_re(2.0)
        }
    }

    /// Structural order: the highest derivative with a coefficient that is
    /// not identically zero as an expression.
    pub fn order(&self) -> usize {
        if self.c.iter().any(|f| !f.is_zero()) {
            2
        } else if self.b.iter().any(|f| !f.is_zero()) {
            1
        } else {
            0
        }
    }

    fn map(&self, f: impl Fn(&MatFn) -> MatFn) -> Self {
        Self {
            a: f(&self.a),
            b: std::array::from_fn(|k| f(&self.b[k])),
            c: std::array::from_fn(|k| f(&self.c[k])),
        }
    }

    fn zip(&self, other: &DiffOp, f: impl Fn(&MatFn, &MatFn) -> MatFn) -> Self {
        Self {
            a: f(&self.a, &other.a),
            b: std::array::from_fn(|k| f(&self.b[k], &other.b[k])),
            c: std::array::from_fn(|k| f(&self.c[k], &other.c[k])),
        }
    }

    fn coefficients(&self) -> impl Iterator<Item = &MatFn> {
        std::iter::once(&self.a).chain(self.b.iter()).chain(self.c.iter())
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map(|f| f.scale(c))
    }

    pub fn scale_re(&self, c: f64) -> Self {
        self.scale(Complex64::new(c, 0.0))
    }

    /// s(p)·O. Scalar functions commute with matrices but not with ∂, so
    /// this is left multiplication.
    pub fn scaled_by(&self, s: &ScalarFn) -> Self {
        self.map(|f| f.scaled_by(s))
    }

    /// M(p)·O (left multiplication by an order-0 operator).
    pub fn left_mul(&self, m: &MatFn) -> Self {
        self.map(|f| m.clone() * f.clone())
    }

    /// Operator product `self ∘ other` with the product rule applied.
    pub fn compose(&self, other: &DiffOp) -> Result<DiffOp> {
        let (o1, o2) = (self.order(), other.order());
        if o1 + o2 > 2 {
            return Err(Error::OrderOverflow(o1 + o2));
        }
        let (a1, b1, c1) = (&self.a, &self.b, &self.c);
        let (a2, b2, c2) = (&other.a, &other.b, &other.c);

        let da2: [MatFn; 3] = if o1 > 0 {
            std::array::from_fn(|k| a2.partial(k))
        } else {
            zeros()
        };

        let mut a = a1.clone() * a2.clone();
        for k in 0..3 {
            a = a + b1[k].clone() * da2[k].clone();
        }
        if o1 == 2 {
            for j in 0..3 {
                for k in 0..3 {
                    a = a + c1[sym_index(j, k)].clone() * da2[j].partial(k);
                }
            }
        }

        let b = std::array::from_fn(|i| {
            let mut bi = a1.clone() * b2[i].clone() + b1[i].clone() * a2.clone();
            if o1 == 1 && o2 == 1 {
                for k in 0..3 {
                    bi = bi + b1[k].clone() * b2[i].partial(k);
                }
            }
            if o1 == 2 {
                for k in 0..3 {
                    bi = bi + (c1[sym_index(i, k)].clone() * da2[k].clone()).scale_re(2.0);
                }
            }
            bi
        });

        let c = std::array::from_fn(|n| {
            let (j, k) = SYM_PAIRS[n];
            let sym = (b1[j].clone() * b2[k].clone() + b1[k].clone() * b2[j].clone()).scale_re(0.5);
            a1.clone() * c2[n].clone() + c1[n].clone() * a2.clone() + sym
        });

        Ok(DiffOp { a, b, c })
    }

    /// `[self, other]` for operators of order ≤ 1, computed coefficient-wise
    /// so that commuting pieces cancel structurally. Agrees with
    /// `self∘other − other∘self`.
    pub fn commutator(&self, other: &DiffOp) -> Result<DiffOp> {
        let (o1, o2) = (self.order(), other.order());
        if o1 > 1 || o2 > 1 {
            return Err(Error::OrderTooHigh(o1.max(o2), 1));
        }
        let (a1, b1) = (&self.a, &self.b);
        let (a2, b2) = (&other.a, &other.b);

        let mut a = commutator_fn(a1, a2);
        for k in 0..3 {
            if !b1[k].is_zero() {
                a = a + b1[k].clone() * a2.partial(k);
            }
            if !b2[k].is_zero() {
                a = a - b2[k].clone() * a1.partial(k);
            }
        }

        let b = std::array::from_fn(|i| {
            let mut bi = commutator_fn(a1, &b2[i]) + commutator_fn(&b1[i], a2);
            for k in 0..3 {
                if !b1[k].is_zero() {
                    bi = bi + b1[k].clone() * b2[i].partial(k);
                }
                if !b2[k].is_zero() {
                    bi = bi - b2[k].clone() * b1[i].partial(k);
                }
            }
            bi
        });

        let c = std::array::from_fn(|n| {
            let (j, k) = SYM_PAIRS[n];
            (commutator_fn(&b1[j], &b2[k]) + commutator_fn(&b1[k], &b2[j])).scale_re(0.5)
        });

        Ok(DiffOp { a, b, c })
    }

    /// Conjugation by a unitary matrix function. `U` must be unitary to
    /// 1e-12 at every sample; its inverse is taken as U†.
    pub fn conjugate(&self, u: &MatFn, direction: Conjugation, samples: &[Momentum]) -> Result<DiffOp> {
        if self.order() > 1 {
            return Err(Error::OrderTooHigh(self.order(), 1));
        }
        if samples.is_empty() {
            return Err(Error::EmptySamples);
        }
        for q in samples {
            let deviation = u.value(q)?.unitarity_defect();
            if !(deviation <= 1e-12) {
                return Err(Error::NonUnitary { p: q.p, deviation });
            }
        }
        // U O U⁻¹ = W⁻¹ O W with W = U†.
        let w = match direction {
            Conjugation::InverseLeft => u.clone(),
            Conjugation::Forward => u.adjoint(),
        };
        let w_inv = w.adjoint();
        let mut a = w_inv.clone() * self.a.clone() * w.clone();
        for k in 0..3 {
            if !self.b[k].is_zero() {
                a = a + w_inv.clone() * self.b[k].clone() * w.partial(k);
            }
        }
        let b = std::array::from_fn(|k| w_inv.clone() * self.b[k].clone() * w.clone());
        Ok(DiffOp::first_order(a, b))
    }

    /// Parity conjugate β O(−p, −∂) β⁻¹.
    pub fn parity(&self) -> DiffOp {
        let beta = MatFn::constant(crate::dirac::gammas().beta);
        let conj = |f: &MatFn| beta.clone() * f.reflect() * beta.clone();
        DiffOp {
            a: conj(&self.a),
            b: std::array::from_fn(|k| -conj(&self.b[k])),
            c: std::array::from_fn(|k| conj(&self.c[k])),
        }
    }

    /// Coefficient-wise residual against `other`, normalised per
    /// coefficient by max(1, ‖self coefficient‖_F).
    pub fn residual(&self, other: &DiffOp, samples: &[Momentum]) -> Result<OpResidual> {
        let first = *samples.first().ok_or(Error::EmptySamples)?;
        let mut per = [0.0f64; 10];
        let mut worst = (0.0f64, first);
        for q in samples {
            let mut ev = Evaluator::new(q);
            for (n, (f, g)) in self.coefficients().zip(other.coefficients()).enumerate() {
                if f.is_zero() && g.is_zero() {
                    continue;
                }
                let fv = ev.value(f)?;
                let gv = ev.value(g)?;
                let r = (fv - gv).frobenius_norm() / fv.frobenius_norm().max(1.0);
                per[n] = per[n].max(r);
                if r > worst.0 || r.is_nan() {
                    worst = (r, *q);
                }
            }
        }
        Ok(OpResidual {
            max_residual: worst.0,
            worst_sample: worst.1,
            per_coefficient: CoefficientResiduals {
                a: per[0],
                b: [per[1], per[2], per[3]],
                c: [per[4], per[5], per[6], per[7], per[8], per[9]],
            },
        })
    }

    /// Drops derivative coefficients that vanish (absolute Frobenius norm
    /// ≤ `tol`) at every sample. Fails if a dropped coefficient does not
    /// vanish.
    pub fn reduce_order(&self, samples: &[Momentum], tol: f64) -> Result<DiffOp> {
        let vanishes = |f: &MatFn| -> Result<bool> {
            if f.is_zero() {
                return Ok(true);
            }
            for q in samples {
                if f.value(q)?.frobenius_norm() > tol {
                    return Ok(false);
                }
            }
            Ok(true)
        };
        let mut out = self.clone();
        let mut c_gone = true;
        for n in 0..6 {
            if vanishes(&self.c[n])? {
                out.c[n] = MatFn::zero();
            } else {
                c_gone = false;
            }
        }
        if c_gone {
            for k in 0..3 {
                if vanishes(&self.b[k])? {
                    out.b[k] = MatFn::zero();
                }
            }
        }
        Ok(out)
    }

    /// All coefficient values at one momentum: (A, [Bᵏ], [Cʲᵏ packed]).
    pub fn coefficient_values(&self, q: &Momentum) -> Result<(Mat4, [Mat4; 3], [Mat4; 6])> {
        let mut ev = Evaluator::new(q);
        let a = ev.value(&self.a)?;
        let mut b = [Mat4::zero(); 3];
        for k in 0..3 {
            b[k] = ev.value(&self.b[k])?;
        }
        let mut c = [Mat4::zero(); 6];
        for n in 0..6 {
            c[n] = ev.value(&self.c[n])?;
        }
        Ok((a, b, c))
    }
}

impl From<MatFn> for DiffOp {
    fn from(a: MatFn) -> Self {
        DiffOp::multiplication(a)
    }
}

impl Add for DiffOp {
    type Output = DiffOp;
    fn add(self, rhs: DiffOp) -> DiffOp {
        self.zip(&rhs, |f, g| f.clone() + g.clone())
    }
}

impl Sub for DiffOp {
    type Output = DiffOp;
    fn sub(self, rhs: DiffOp) -> DiffOp {
        self.zip(&rhs, |f, g| f.clone() - g.clone())
    }
}

impl Neg for DiffOp {
    type Output = DiffOp;
    fn neg(self) -> DiffOp {
        self.scale_re(-1.0)
    }
}

/// Free-function form of [`DiffOp::compose`].
pub fn op_compose(o1: &DiffOp, o2: &DiffOp) -> Result<DiffOp> {
    o1.compose(o2)
}

pub fn op_commutator(o1: &DiffOp, o2: &DiffOp) -> Result<DiffOp> {
    o1.commutator(o2)
}

pub fn op_conjugate(u: &MatFn, o: &DiffOp, direction: Conjugation, samples: &[Momentum]) -> Result<DiffOp> {
    o.conjugate(u, direction, samples)
}

pub fn op_parity(o: &DiffOp) -> DiffOp {
    o.parity()
}

pub fn op_residual(o1: &DiffOp, o2: &DiffOp, samples: &[Momentum]) -> Result<OpResidual> {
    o1.residual(o2, samples)
}

/// A spatial three-vector of operators.
#[derive(Clone, Debug)]
pub struct VecOp(pub [DiffOp; 3]);

impl VecOp {
    pub fn from_fns(f: [MatFn; 3]) -> Self {
        VecOp(f.map(DiffOp::multiplication))
    }

    pub fn map(&self, f: impl Fn(&DiffOp) -> DiffOp) -> Self {
        VecOp(std::array::from_fn(|i| f(&self.0[i])))
    }

    pub fn parity(&self) -> Self {
        self.map(DiffOp::parity)
    }

    /// Largest component residual.
    pub fn residual(&self, other: &VecOp, samples: &[Momentum]) -> Result<OpResidual> {
        let mut worst: Option<OpResidual> = None;
        for i in 0..3 {
            let r = self.0[i].residual(&other.0[i], samples)?;
            if worst.as_ref().map(|w| r.max_residual > w.max_residual).unwrap_or(true) {
                worst = Some(r);
            }
        }
        Ok(worst.expect("three components"))
    }
}

impl Index<usize> for VecOp {
    type Output = DiffOp;
    fn index(&self, i: usize) -> &DiffOp {
        &self.0[i]
    }
}

impl IndexMut<usize> for VecOp {
    fn index_mut(&mut self, i: usize) -> &mut DiffOp {
        &mut self.0[i]
    }
}

/// A four-vector of operators, indexed μ = 0..3.
#[derive(Clone, Debug)]
pub struct FourVecOp(pub [DiffOp; 4]);

impl FourVecOp {
    pub fn spatial(&self) -> VecOp {
        VecOp([self.0[1].clone(), self.0[2].clone(), self.0[3].clone()])
    }

    pub fn residual(&self, other: &FourVecOp, samples: &[Momentum]) -> Result<OpResidual> {
        let mut worst: Option<OpResidual> = None;
        for mu in 0..4 {
            let r = self.0[mu].residual(&other.0[mu], samples)?;
            if worst.as_ref().map(|w| r.max_residual > w.max_residual).unwrap_or(true) {
                worst = Some(r);
            }
        }
        Ok(worst.expect("four components"))
    }
}

impl Index<usize> for FourVecOp {
    type Output = DiffOp;
    fn index(&self, mu: usize) -> &DiffOp {
        &self.0[mu]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::I;

    fn x(i: usize) -> DiffOp {
        let mut b = zeros();
        b[i] = MatFn::identity().scale(I);
        DiffOp::first_order(MatFn::zero(), b)
    }

    fn samples() -> Vec<Momentum> {
        [[0.0, 0.0, 0.0], [0.3, -0.4, 1.2], [2.0, 1.0, -0.5]]
            .iter()
            .map(|p| Momentum::new(*p, 1.0).unwrap())
            .collect()
    }

    #[test]
    fn x_times_constant() {
        let m = Mat4::from_fn(|i, j| Complex64::new((i * 4 + j) as f64, 1.0));
        let o = x(0).compose(&DiffOp::multiplication(MatFn::constant(m))).unwrap();
        assert!(o.a().is_zero());
        let q = samples()[1];
        assert_eq!(o.b(0).value(&q).unwrap(), m * I);
        assert_eq!(o.order(), 1);
    }

    #[test]
    fn x1_x2_second_order_slot() {
        let o = x(0).compose(&x(1)).unwrap();
        assert!(o.a().is_zero());
        assert_eq!(o.order(), 2);
        let q = samples()[0];
        let half = Mat4::identity() * -0.5;
        assert_eq!(o.c(0, 1).value(&q).unwrap(), half);
        assert_eq!(o.c(1, 0).value(&q).unwrap(), half);
        assert_eq!(o.mixed_coefficient(0, 1).value(&q).unwrap(), -Mat4::identity());
        assert!(o.c(0, 0).is_zero());
    }

    #[test]
    fn order_overflow_rejected() {
        let xx = x(0).compose(&x(1)).unwrap();
        assert!(matches!(xx.compose(&x(2)), Err(Error::OrderOverflow(3))));
        assert!(matches!(xx.commutator(&x(2)), Err(Error::OrderTooHigh(2, 1))));
    }

    #[test]
    fn canonical_pair() {
        for i in 0..3 {
            for j in 0..3 {
                let pj = DiffOp::multiplication(MatFn::scalar(ScalarFn::momentum(j)));
                let c = x(i).commutator(&pj).unwrap();
                let expect = if i == j { MatFn::identity().scale(I) } else { MatFn::zero() };
                let r = c.residual(&DiffOp::multiplication(expect), &samples()).unwrap();
                assert!(r.max_residual < 1e-15, "[x{i}, p{j}] residual {}", r.max_residual);
                assert_eq!(c.order(), 0);
            }
        }
    }

    #[test]
    fn conjugation_rejects_non_unitary() {
        let u = MatFn::identity().scale_re(2.0);
        let err = x(0).conjugate(&u, Conjugation::InverseLeft, &samples()).unwrap_err();
        assert!(matches!(err, Error::NonUnitary { .. }));
    }

    #[test]
    fn conjugation_by_identity_is_trivial() {
        let o = x(2);
        let c = o.conjugate(&MatFn::identity(), Conjugation::InverseLeft, &samples()).unwrap();
        assert_eq!(o.residual(&c, &samples()).unwrap().max_residual, 0.0);
    }

    #[test]
    fn levi_civita_values() {
        assert_eq!(levi_civita3(0, 1, 2), 1.0);
        assert_eq!(levi_civita3(1, 0, 2), -1.0);
        assert_eq!(levi_civita3(1, 1, 2), 0.0);
    }
}
