//! Dirac-theory constants and Poincaré generators in the standard Dirac
//! representation, plus the classical boost L(p).
//!
//! Conventions: metric g = diag(+,−,−,−), ε¹²³⁰ = 1 (so ε⁰¹²³ = −1),
//! natural units ħ = c = 1. The position operator is x = i∇ₚ.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::Serialize;

use crate::algebra::{Mat4, MatFn, ScalarFn, I};
use crate::diffop::{levi_civita3, DiffOp, FourVecOp, VecOp};
use crate::error::{Error, Result};

/// Metric signature g = diag(+,−,−,−).
pub const METRIC: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

/// Constant Dirac matrices.
#[derive(Debug, Clone)]
pub struct GammaSet {
    pub identity: Mat4,
    /// β = γ⁰
    pub beta: Mat4,
    pub gamma5: Mat4,
    /// Σⁱ = diag(σⁱ, σⁱ)
    pub sigma: [Mat4; 3],
    /// αⁱ = γ⁵Σⁱ
    pub alpha: [Mat4; 3],
    /// Pauli matrices σⁱ.
    pub pauli: [[[Complex64; 2]; 2]; 3],
}

impl GammaSet {
    fn build() -> Self {
        let o = Complex64::new(0.0, 0.0);
        let l = Complex64::new(1.0, 0.0);
        let pauli = [[[o, l], [l, o]], [[o, -I], [I, o]], [[l, o], [o, -l]]];
        let id2 = [[l, o], [o, l]];
        let zero2 = [[o; 2]; 2];
        let neg_id2 = [[-l, o], [o, -l]];
        let beta = Mat4::from_blocks(id2, zero2, zero2, neg_id2);
        let gamma5 = Mat4::from_blocks(zero2, id2, id2, zero2);
        let sigma = pauli.map(|s| Mat4::from_blocks(s, zero2, zero2, s));
        let alpha = sigma.map(|s| gamma5 * s);
        Self {
            identity: Mat4::identity(),
            beta,
            gamma5,
            sigma,
            alpha,
            pauli,
        }
    }

    /// γ⁰γ⁵ = βγ⁵.
    pub fn gamma0_gamma5(&self) -> Mat4 {
        self.beta * self.gamma5
    }

    /// γ⁵γ⁰ = −γ⁰γ⁵.
    pub fn gamma5_gamma0(&self) -> Mat4 {
        self.gamma5 * self.beta
    }
}

/// The shared constant γ-matrix set.
pub fn gammas() -> &'static GammaSet {
    static G: OnceLock<GammaSet> = OnceLock::new();
    G.get_or_init(GammaSet::build)
}

pub(crate) fn check_mass(m: f64) -> Result<()> {
    if m > 0.0 && m.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveMass(m))
    }
}

/// pᵏ·I
pub fn momentum_fn(k: usize) -> MatFn {
    MatFn::scalar(ScalarFn::momentum(k))
}

/// E(p)·I
pub fn energy_fn(m: f64) -> MatFn {
    MatFn::scalar(ScalarFn::energy(m))
}

/// Σ·p
pub fn sigma_dot_p() -> MatFn {
    let g = gammas();
    (0..3).fold(MatFn::zero(), |acc, k| {
        acc + MatFn::constant(g.sigma[k]).scaled_by(&ScalarFn::momentum(k))
    })
}

/// α·p
pub fn alpha_dot_p() -> MatFn {
    let g = gammas();
    (0..3).fold(MatFn::zero(), |acc, k| {
        acc + MatFn::constant(g.alpha[k]).scaled_by(&ScalarFn::momentum(k))
    })
}

/// (a × b)ⁱ = ε_ijk aʲ bᵏ for matrix-function vectors, keeping the
/// left-right order of the factors.
pub fn cross(a: &[MatFn; 3], b: &[MatFn; 3]) -> [MatFn; 3] {
    std::array::from_fn(|i| {
        let mut acc = MatFn::zero();
        for j in 0..3 {
            for k in 0..3 {
                let e = levi_civita3(i, j, k);
                if e != 0.0 {
                    acc = acc + (a[j].clone() * b[k].clone()).scale_re(e);
                }
            }
        }
        acc
    })
}

pub fn momentum_vector() -> [MatFn; 3] {
    std::array::from_fn(momentum_fn)
}

pub fn sigma_vector() -> [MatFn; 3] {
    gammas().sigma.map(MatFn::constant)
}

/// H_D(p) = α·p + βm.
pub fn hamiltonian(m: f64) -> Result<MatFn> {
    check_mass(m)?;
    Ok(alpha_dot_p() + MatFn::constant(gammas().beta * m))
}

/// Sign convention for the boost generator Kⁱ = s·½{xⁱ, H_D}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum KSign {
    /// Kⁱ = −½{xⁱ, H_D}
    #[serde(rename = "K = -1/2 {x, H_D}")]
    Minus,
    /// Kⁱ = +½{xⁱ, H_D}
    #[serde(rename = "K = +1/2 {x, H_D}")]
    Plus,
}

impl KSign {
    pub fn factor(self) -> f64 {
        match self {
            KSign::Minus => -1.0,
            KSign::Plus => 1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            KSign::Minus => KSign::Plus,
            KSign::Plus => KSign::Minus,
        }
    }
}

impl fmt::Display for KSign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KSign::Minus => write!(f, "K = -1/2 {{x, H_D}}"),
            KSign::Plus => write!(f, "K = +1/2 {{x, H_D}}"),
        }
    }
}

/// xⁱ = i ∂/∂pⁱ.
pub fn position_x() -> VecOp {
    VecOp(std::array::from_fn(|i| {
        let mut b: [MatFn; 3] = std::array::from_fn(|_| MatFn::zero());
        b[i] = MatFn::identity().scale(I);
        DiffOp::first_order(MatFn::zero(), b)
    }))
}

/// Pⁱ = multiplication by pⁱ.
pub fn momentum_op() -> VecOp {
    VecOp::from_fns(momentum_vector())
}

/// Covariant P⁰ = multiplication by E(p).
pub fn p0_cov(m: f64) -> Result<DiffOp> {
    check_mass(m)?;
    Ok(DiffOp::multiplication(energy_fn(m)))
}

/// J = x × P + Σ/2, assembled by operator composition.
pub fn angular_momentum() -> VecOp {
    let x = position_x();
    let p = momentum_op();
    let g = gammas();
    VecOp(std::array::from_fn(|i| {
        let mut acc = DiffOp::multiplication(MatFn::constant(g.sigma[i] * 0.5));
        for j in 0..3 {
            for k in 0..3 {
                let e = levi_civita3(i, j, k);
                if e != 0.0 {
                    let term = x[j].compose(&p[k]).expect("order 1 ∘ order 0");
                    acc = acc + term.scale_re(e);
                }
            }
        }
        acc
    }))
}

/// Boost generator Kⁱ = s·½(xⁱH_D + H_D xⁱ) at t = 0.
pub fn boost_generator(m: f64, sign: KSign) -> Result<VecOp> {
    let h = DiffOp::multiplication(hamiltonian(m)?);
    let x = position_x();
    let mut out = Vec::with_capacity(3);
    for xi in x.0.iter() {
        let anti = xi.compose(&h)? + h.compose(xi)?;
        out.push(anti.scale_re(0.5 * sign.factor()));
    }
    Ok(VecOp(out.try_into().expect("three components")))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Generator {
    X,
    P,
    P0Cov,
    J,
    K,
}

impl FromStr for Generator {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "X" => Ok(Generator::X),
            "P" => Ok(Generator::P),
            "P0_COV" => Ok(Generator::P0Cov),
            "J" => Ok(Generator::J),
            "K" => Ok(Generator::K),
            other => Err(Error::UnknownName(other.to_string())),
        }
    }
}

#[derive(Debug, Clone)]
pub enum GeneratorOp {
    Vector(VecOp),
    Scalar(DiffOp),
}

/// Builds a generator; K uses the convention Kⁱ = −½{xⁱ, H_D}.
pub fn generator(name: Generator, m: f64) -> Result<GeneratorOp> {
    check_mass(m)?;
    Ok(match name {
        Generator::X => GeneratorOp::Vector(position_x()),
        Generator::P => GeneratorOp::Vector(momentum_op()),
        Generator::P0Cov => GeneratorOp::Scalar(p0_cov(m)?),
        Generator::J => GeneratorOp::Vector(angular_momentum()),
        Generator::K => GeneratorOp::Vector(boost_generator(m, KSign::Minus)?),
    })
}

/// ε^{μνρσ} with ε¹²³⁰ = 1.
pub fn levi_civita4(idx: [usize; 4]) -> f64 {
    if idx.iter().any(|&i| i > 3) {
        return 0.0;
    }
    for a in 0..4 {
        for b in (a + 1)..4 {
            if idx[a] == idx[b] {
                return 0.0;
            }
        }
    }
    let mut perm = idx;
    let mut sign = 1.0;
    for i in 0..4 {
        while perm[i] != i {
            let t = perm[i];
            perm.swap(i, t);
            sign = -sign;
        }
    }
    // sign is relative to (0,1,2,3); ε⁰¹²³ = −ε¹²³⁰ = −1.
    -sign
}

/// Construction routes for the Pauli-Lubanski vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PLMode {
    /// ½ ε^{μνρσ} J_{νρ} P_σ with field-theoretic generators (P₀ = H_D).
    Definitional,
    /// W⁰ = Σ·P/2, Wⁱ = ¼{Σⁱ, H_D}.
    DiracClosed,
    /// W⁰ = Σ·P/2, Wⁱ = mΣⁱ/2 + (Σ·P)pⁱ/(2(m+E)).
    Kinematic,
}

impl FromStr for PLMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "DEFINITIONAL" => Ok(PLMode::Definitional),
            "DIRAC_CLOSED" => Ok(PLMode::DiracClosed),
            "KINEMATIC" => Ok(PLMode::Kinematic),
            other => Err(Error::UnknownName(other.to_string())),
        }
    }
}

pub fn pl_vector(mode: PLMode, m: f64) -> Result<FourVecOp> {
    pl_vector_with(mode, m, KSign::Minus)
}

/// PL vector with an explicit boost-generator sign (only the definitional
/// route depends on it).
pub fn pl_vector_with(mode: PLMode, m: f64, sign: KSign) -> Result<FourVecOp> {
    check_mass(m)?;
    let g = gammas();
    let w0 = sigma_dot_p().scale_re(0.5);
    match mode {
        PLMode::Kinematic => {
            let e = ScalarFn::energy(m);
            let factor = (ScalarFn::constant(2.0) * (m + e)).recip();
            let sp = sigma_dot_p();
            let spatial: [MatFn; 3] = std::array::from_fn(|i| {
                MatFn::constant(g.sigma[i] * (0.5 * m))
                    + sp.scaled_by(&(ScalarFn::momentum(i) * factor.clone()))
            });
            Ok(four_from_fns(w0, spatial))
        }
        PLMode::DiracClosed => {
            let h = hamiltonian(m)?;
            let spatial: [MatFn; 3] = std::array::from_fn(|i| {
                let s = MatFn::constant(g.sigma[i]);
                (s.clone() * h.clone() + h.clone() * s).scale_re(0.25)
            });
            Ok(four_from_fns(w0, spatial))
        }
        PLMode::Definitional => definitional_pl(m, sign),
    }
}

fn four_from_fns(w0: MatFn, w: [MatFn; 3]) -> FourVecOp {
    let [w1, w2, w3] = w;
    FourVecOp([w0, w1, w2, w3].map(DiffOp::multiplication))
}

/// W^μ = ½ ε^{μνρσ} J_{νρ} P_σ, generators composed in the order J then P.
fn definitional_pl(m: f64, sign: KSign) -> Result<FourVecOp> {
    let j = angular_momentum();
    let k = boost_generator(m, sign)?;
    let h = hamiltonian(m)?;

    // Upper-index J^{μν}: J^{ij} = ε_ijk Jᵏ, J^{0i} = Kⁱ.
    let upper = |mu: usize, nu: usize| -> DiffOp {
        match (mu, nu) {
            (0, 0) => DiffOp::zero(),
            (0, i) => k[i - 1].clone(),
            (i, 0) => -k[i - 1].clone(),
            (a, b) => {
                let mut acc = DiffOp::zero();
                for l in 0..3 {
                    let e = levi_civita3(a - 1, b - 1, l);
                    if e != 0.0 {
                        acc = acc + j[l].scale_re(e);
                    }
                }
                acc
            }
        }
    };
    let lower_j = |mu: usize, nu: usize| upper(mu, nu).scale_re(METRIC[mu] * METRIC[nu]);
    let lower_p = |sigma: usize| -> DiffOp {
        if sigma == 0 {
            DiffOp::multiplication(h.clone())
        } else {
            DiffOp::multiplication(momentum_fn(sigma - 1).scale_re(-1.0))
        }
    };

    let mut w: Vec<DiffOp> = Vec::with_capacity(4);
    for mu in 0..4 {
        let mut acc = DiffOp::zero();
        for nu in 0..4 {
            for rho in 0..4 {
                for sigma in 0..4 {
                    let e = levi_civita4([mu, nu, rho, sigma]);
                    if e == 0.0 {
                        continue;
                    }
                    let term = lower_j(nu, rho).compose(&lower_p(sigma))?;
                    acc = acc + term.scale_re(0.5 * e);
                }
            }
        }
        w.push(acc);
    }
    Ok(FourVecOp(w.try_into().expect("four components")))
}

/// Real 4×4 spacetime matrix Λ^μ_ν.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoostMatrix(pub [[f64; 4]; 4]);

impl BoostMatrix {
    pub fn identity() -> Self {
        let mut m = [[0.0; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        BoostMatrix(m)
    }

    pub fn apply(&self, w: &[f64; 4]) -> [f64; 4] {
        std::array::from_fn(|mu| (0..4).map(|nu| self.0[mu][nu] * w[nu]).sum())
    }

    pub fn compose(&self, other: &BoostMatrix) -> BoostMatrix {
        let mut out = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                out[i][j] = (0..4).map(|k| self.0[i][k] * other.0[k][j]).sum();
            }
        }
        BoostMatrix(out)
    }

    /// max |(ΛᵀgΛ − g)_{μν}|.
    pub fn metric_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for mu in 0..4 {
            for nu in 0..4 {
                let v: f64 = (0..4).map(|a| self.0[a][mu] * METRIC[a] * self.0[a][nu]).sum();
                let target = if mu == nu { METRIC[mu] } else { 0.0 };
                worst = worst.max((v - target).abs());
            }
        }
        worst
    }

    /// max |Λ − other| entrywise.
    pub fn max_abs_diff(&self, other: &BoostMatrix) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                worst = worst.max((self.0[i][j] - other.0[i][j]).abs());
            }
        }
        worst
    }
}

/// L(p): L⁰₀ = p⁰/m, L⁰ᵢ = Lⁱ₀ = pⁱ/m, Lⁱⱼ = δᵢⱼ + pⁱpʲ/(m(p⁰+m)).
pub fn boost_matrix(m: f64, p: [f64; 3]) -> Result<BoostMatrix> {
    check_mass(m)?;
    if p.iter().any(|c| !c.is_finite()) {
        return Err(Error::Domain(format!("non-finite momentum {p:?}")));
    }
    let p0 = (p.iter().map(|c| c * c).sum::<f64>() + m * m).sqrt();
    let mut l = [[0.0; 4]; 4];
    l[0][0] = p0 / m;
    for i in 0..3 {
        l[0][i + 1] = p[i] / m;
        l[i + 1][0] = p[i] / m;
        for j in 0..3 {
            let delta = if i == j { 1.0 } else { 0.0 };
            l[i + 1][j + 1] = delta + p[i] * p[j] / (m * (p0 + m));
        }
    }
    Ok(BoostMatrix(l))
}

/// L(−p)·w: the four-vector seen in the rest frame of a particle with
/// momentum p.
pub fn boost_to_rest(m: f64, p: [f64; 3], w: [f64; 4]) -> Result<[f64; 4]> {
    Ok(boost_matrix(m, p.map(|c| -c))?.apply(&w))
}
