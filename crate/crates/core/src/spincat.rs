//! Catalog of spin and position operators: Bogolubov, covariant CM/NW,
//! Pryce (c)/(e) in definitional and closed forms, and the FW mean
//! operators.
//!
//! In every closed form W is the kinematic Pauli-Lubanski vector and P⁰ is
//! multiplication by E(p).

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::algebra::{Mat4, MatFn, Momentum, ScalarFn, I};
use crate::diffop::{Conjugation, DiffOp, VecOp};
use crate::dirac::{
    self, alpha_dot_p, boost_generator, check_mass, cross, energy_fn, gammas, hamiltonian,
    momentum_vector, position_x, KSign, PLMode,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SpinName {
    Bg,
    Cm,
    Nw,
    PryceC,
    PryceE,
    Fw,
}

impl SpinName {
    pub const ALL: [SpinName; 6] = [
        SpinName::Bg,
        SpinName::Cm,
        SpinName::Nw,
        SpinName::PryceC,
        SpinName::PryceE,
        SpinName::Fw,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PosName {
    Cm,
    Nw,
    PryceC,
    PryceE,
    Fw,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Variant {
    Definitional,
    Closed,
}

/// Which product γ⁰γ⁵ or γ⁵γ⁰ is used in the S_(e) closed form. The two
/// anticommute, so the choice flips the sign of the W×P term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GammaOrder {
    #[serde(rename = "gamma0 gamma5")]
    G0G5,
    #[serde(rename = "gamma5 gamma0")]
    G5G0,
}

impl GammaOrder {
    pub fn matrix(self) -> Mat4 {
        match self {
            GammaOrder::G0G5 => gammas().gamma0_gamma5(),
            GammaOrder::G5G0 => gammas().gamma5_gamma0(),
        }
    }
}

impl fmt::Display for GammaOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GammaOrder::G0G5 => write!(f, "gamma0 gamma5"),
            GammaOrder::G5G0 => write!(f, "gamma5 gamma0"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Conventions {
    /// γ-product in the S_(e) closed form.
    pub gamma_order: GammaOrder,
    pub k_sign: KSign,
}

impl Default for Conventions {
    fn default() -> Self {
        Self {
            gamma_order: GammaOrder::G0G5,
            k_sign: KSign::Minus,
        }
    }
}

/// Outcome of trying every sign choice.
#[derive(Debug, Clone, Serialize)]
pub struct Resolution {
    pub conventions: Conventions,
    /// Residual of S_(e) vs S_FW and q_(e) closed vs x_FW, per γ order.
    pub gamma_residuals: Vec<(GammaOrder, f64)>,
    /// Residual of q_(c) definitional vs closed, per K sign.
    pub k_residuals: Vec<(KSign, f64)>,
    pub resolved: bool,
}

impl Conventions {
    /// Picks the γ order for which S_(e) = S_FW and q_(e) = x_FW, and the K
    /// sign for which the definitional q_(c) equals its closed form. When no
    /// choice reaches `tol`, the best one is returned with `resolved = false`.
    pub fn resolve(m: f64, samples: &[Momentum], tol: f64) -> Result<Resolution> {
        check_mass(m)?;
        let mut gamma_residuals = Vec::new();
        for order in [GammaOrder::G0G5, GammaOrder::G5G0] {
            let cat = Catalog::new(
                m,
                Conventions {
                    gamma_order: order,
                    k_sign: KSign::Minus,
                },
            )?;
            let s = cat
                .spin(SpinName::PryceE)?
                .residual(&cat.spin(SpinName::Fw)?, samples)?
                .max_residual;
            let q = cat
                .position(PosName::PryceE, Variant::Closed)?
                .residual(&cat.position(PosName::Fw, Variant::Definitional)?, samples)?
                .max_residual;
            gamma_residuals.push((order, s.max(q)));
        }
        let mut k_residuals = Vec::new();
        for sign in [KSign::Minus, KSign::Plus] {
            let cat = Catalog::new(
                m,
                Conventions {
                    gamma_order: GammaOrder::G0G5,
                    k_sign: sign,
                },
            )?;
            let r = cat
                .position(PosName::PryceC, Variant::Definitional)?
                .residual(&cat.position(PosName::PryceC, Variant::Closed)?, samples)?
                .max_residual;
            k_residuals.push((sign, r));
        }
        let best = |v: &[(GammaOrder, f64)]| {
            v.iter()
                .copied()
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .expect("nonempty")
        };
        let (gamma_order, g_res) = best(&gamma_residuals);
        let (k_sign, k_res) = k_residuals
            .iter()
            .copied()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("nonempty");
        Ok(Resolution {
            conventions: Conventions {
                gamma_order,
                k_sign,
            },
            resolved: g_res <= tol && k_res <= tol,
            gamma_residuals,
            k_residuals,
        })
    }
}

/// Operators built for one mass and one set of sign conventions.
#[derive(Debug, Clone)]
pub struct Catalog {
    m: f64,
    conv: Conventions,
    /// Momenta at which unitaries are checked before conjugating.
    unitarity_samples: Vec<Momentum>,
}

impl Catalog {
    pub fn new(m: f64, conv: Conventions) -> Result<Self> {
        check_mass(m)?;
        let mut unitarity_samples = vec![Momentum::at_rest(m)?];
        for k in 0..3 {
            for s in [1.0, -1.0] {
                let mut p = [0.0; 3];
                p[k] = s * m;
                unitarity_samples.push(Momentum::new(p, m)?);
            }
        }
        unitarity_samples.push(Momentum::new([0.3 * m, -0.7 * m, 1.1 * m], m)?);
        unitarity_samples.push(Momentum::new([-4.0 * m, 2.5 * m, 6.0 * m], m)?);
        Ok(Self {
            m,
            conv,
            unitarity_samples,
        })
    }

    pub fn with_defaults(m: f64) -> Result<Self> {
        Self::new(m, Conventions::default())
    }

    /// Replaces the momenta used to certify unitarity before conjugation.
    pub fn with_unitarity_samples(mut self, samples: Vec<Momentum>) -> Self {
        if !samples.is_empty() {
            self.unitarity_samples = samples;
        }
        self
    }

    pub fn mass(&self) -> f64 {
        self.m
    }

    pub fn conventions(&self) -> Conventions {
        self.conv
    }

    fn energy(&self) -> ScalarFn {
        ScalarFn::energy(self.m)
    }

    /// Kinematic (W⁰, W).
    pub fn pl_kinematic(&self) -> (MatFn, [MatFn; 3]) {
        let w = dirac::pl_vector(PLMode::Kinematic, self.m).expect("mass validated");
        let a = |n: usize| w[n].a().clone();
        (a(0), [a(1), a(2), a(3)])
    }

    pub fn fw_unitary(&self) -> MatFn {
        let e = self.energy();
        let norm = (2.0 * e.clone() * (self.m + e.clone())).sqrt().recip();
        let num = MatFn::scalar(e + ScalarFn::constant(self.m))
            + MatFn::constant(gammas().beta) * alpha_dot_p();
        num.scaled_by(&norm)
    }

    pub fn pryce_unitary(&self) -> MatFn {
        let e = self.energy();
        let norm = (2.0 * e.clone() * (e.clone() + self.m)).sqrt().recip();
        let num = alpha_dot_p() + MatFn::constant(gammas().beta).scaled_by(&(e + self.m));
        num.scaled_by(&norm)
    }

    /// (1/m)(W − W⁰P/(m+E)); this is S_BG and S_NW.
    fn reduced_w(&self) -> [MatFn; 3] {
        let (w0, w) = self.pl_kinematic();
        let inv = (self.m + self.energy()).recip();
        std::array::from_fn(|i| {
            (w[i].clone() - w0.scaled_by(&(ScalarFn::momentum(i) * inv.clone())))
                .scale_re(1.0 / self.m)
        })
    }

    /// S_(c) = (mW + E W⁰ P/(m+E) − iγ⁰γ⁵ W×P)/E².
    pub fn s_c_closed(&self) -> [MatFn; 3] {
        let (w0, w) = self.pl_kinematic();
        let e = self.energy();
        let inv_e2 = e.square().recip();
        let wxp = cross(&w, &momentum_vector());
        let g05 = MatFn::constant(gammas().gamma0_gamma5() * I);
        let coeff = e.clone() * (self.m + e).recip();
        std::array::from_fn(|i| {
            (w[i].scale_re(self.m) + w0.scaled_by(&(coeff.clone() * ScalarFn::momentum(i)))
                - g05.clone() * wxp[i].clone())
            .scaled_by(&inv_e2)
        })
    }

    /// S_(e) = W/E − (iΓ/(mE)) W×P with Γ the resolved γ product.
    fn s_e_closed(&self) -> [MatFn; 3] {
        let (_, w) = self.pl_kinematic();
        let inv_e = self.energy().recip();
        let wxp = cross(&w, &momentum_vector());
        let g = MatFn::constant(self.conv.gamma_order.matrix() * I);
        std::array::from_fn(|i| {
            w[i].scaled_by(&inv_e)
                - (g.clone() * wxp[i].clone()).scaled_by(&inv_e).scale_re(1.0 / self.m)
        })
    }

    pub fn spin(&self, name: SpinName) -> Result<VecOp> {
        let fns: [MatFn; 3] = match name {
            SpinName::Bg | SpinName::Nw => self.reduced_w(),
            SpinName::Cm => {
                let (_, w) = self.pl_kinematic();
                let inv_e = self.energy().recip();
                w.map(|wi| wi.scaled_by(&inv_e))
            }
            SpinName::PryceC => self.s_c_closed(),
            SpinName::PryceE => self.s_e_closed(),
            SpinName::Fw => {
                let half_sigma = VecOp::from_fns(gammas().sigma.map(|s| MatFn::constant(s * 0.5)));
                return self.conjugate_vec(&half_sigma, &self.fw_unitary());
            }
        };
        Ok(VecOp::from_fns(fns))
    }

    fn conjugate_vec(&self, v: &VecOp, u: &MatFn) -> Result<VecOp> {
        let mut out = Vec::with_capacity(3);
        for c in v.0.iter() {
            out.push(c.conjugate(u, Conjugation::InverseLeft, &self.unitarity_samples)?);
        }
        Ok(VecOp(out.try_into().expect("three components")))
    }

    /// Symmetrized −½(F K + K F) for an order-0 multiplier F.
    fn symmetrized_boost(&self, f: &MatFn) -> Result<VecOp> {
        let k = boost_generator(self.m, self.conv.k_sign)?;
        let f = DiffOp::multiplication(f.clone());
        let mut out = Vec::with_capacity(3);
        for ki in k.0.iter() {
            out.push((f.compose(ki)? + ki.compose(&f)?).scale_re(-0.5));
        }
        Ok(VecOp(out.try_into().expect("three components")))
    }

    fn x_plus(&self, shift: [MatFn; 3]) -> VecOp {
        let x = position_x();
        VecOp(std::array::from_fn(|i| x[i].clone() + DiffOp::multiplication(shift[i].clone())))
    }

    pub fn position(&self, name: PosName, variant: Variant) -> Result<VecOp> {
        let m = self.m;
        let e = self.energy();
        let p = momentum_vector();
        let g05 = MatFn::constant(gammas().gamma0_gamma5() * I);
        match (name, variant) {
            (PosName::Cm, Variant::Closed) => self.symmetrized_boost(&MatFn::scalar(e.recip())),
            (PosName::Nw, Variant::Closed) => {
                let r = self.symmetrized_boost(&MatFn::scalar(e.recip()))?;
                let (_, w) = self.pl_kinematic();
                let pxw = cross(&p, &w);
                let f = (m * e.clone() * (m + e)).recip();
                Ok(VecOp(std::array::from_fn(|i| {
                    r[i].clone() - DiffOp::multiplication(pxw[i].scaled_by(&f))
                })))
            }
            (PosName::PryceC, Variant::Closed) => {
                let (w0, w) = self.pl_kinematic();
                let pxw = cross(&p, &w);
                let inv = (m + e.clone()).recip();
                let inv_e2 = e.square().recip();
                Ok(self.x_plus(std::array::from_fn(|i| {
                    let reduced = w[i].clone() - w0.scaled_by(&(ScalarFn::momentum(i) * inv.clone()));
                    (pxw[i].scale_re(1.0 / m) + g05.clone() * reduced).scaled_by(&inv_e2)
                })))
            }
            (PosName::PryceC, Variant::Definitional) => {
                let h_inv = hamiltonian(m)?.scaled_by(&e.square().recip());
                self.symmetrized_boost(&h_inv)
            }
            (PosName::PryceE, Variant::Closed) => {
                let (w0, w) = self.pl_kinematic();
                let pxw = cross(&p, &w);
                let inv_e = e.recip();
                let inv_me = (m * e.clone()).recip();
                let inv_mpe = (m + e.clone()).recip();
                Ok(self.x_plus(std::array::from_fn(|i| {
                    let reduced = w[i].clone() - w0.scaled_by(&(ScalarFn::momentum(i) * inv_e.clone()));
                    (pxw[i].scaled_by(&inv_mpe) + g05.clone() * reduced).scaled_by(&inv_me)
                })))
            }
            (PosName::PryceE, Variant::Definitional) => {
                let qc = self.position(PosName::PryceC, Variant::Definitional)?;
                let sxp = cross(&self.s_c_closed(), &p);
                let f = (m * (m + e)).recip();
                Ok(VecOp(std::array::from_fn(|i| {
                    qc[i].clone() + DiffOp::multiplication(sxp[i].scaled_by(&f))
                })))
            }
            (PosName::Fw, Variant::Definitional) => self.conjugate_vec(&position_x(), &self.fw_unitary()),
            (name, variant) => Err(Error::UnknownVariant {
                name: format!("{name:?}"),
                variant: format!("{variant:?}"),
            }),
        }
    }

    /// Resolves a stable operator name to its operator.
    pub fn operator(&self, name: OperatorName) -> Result<CatalogOp> {
        use OperatorName as N;
        Ok(match name {
            N::SBg => CatalogOp::Vector(self.spin(SpinName::Bg)?),
            N::SCm => CatalogOp::Vector(self.spin(SpinName::Cm)?),
            N::SNw => CatalogOp::Vector(self.spin(SpinName::Nw)?),
            N::SPryceC => CatalogOp::Vector(self.spin(SpinName::PryceC)?),
            N::SPryceE => CatalogOp::Vector(self.spin(SpinName::PryceE)?),
            N::SFw => CatalogOp::Vector(self.spin(SpinName::Fw)?),
            N::RCm => CatalogOp::Vector(self.position(PosName::Cm, Variant::Closed)?),
            N::RNw => CatalogOp::Vector(self.position(PosName::Nw, Variant::Closed)?),
            N::QPryceC => CatalogOp::Vector(self.position(PosName::PryceC, Variant::Closed)?),
            N::QPryceE => CatalogOp::Vector(self.position(PosName::PryceE, Variant::Closed)?),
            N::XFw => CatalogOp::Vector(self.position(PosName::Fw, Variant::Definitional)?),
            N::X => CatalogOp::Vector(position_x()),
            N::HD => CatalogOp::Scalar(DiffOp::multiplication(hamiltonian(self.m)?)),
            N::P0Cov => CatalogOp::Scalar(DiffOp::multiplication(energy_fn(self.m))),
            N::UFw => CatalogOp::Scalar(DiffOp::multiplication(self.fw_unitary())),
            N::UP => CatalogOp::Scalar(DiffOp::multiplication(self.pryce_unitary())),
        })
    }
}

pub fn fw_unitary(m: f64) -> Result<MatFn> {
    Ok(Catalog::with_defaults(m)?.fw_unitary())
}

pub fn pryce_unitary(m: f64) -> Result<MatFn> {
    Ok(Catalog::with_defaults(m)?.pryce_unitary())
}

pub fn spin_operator(name: SpinName, m: f64) -> Result<VecOp> {
    Catalog::with_defaults(m)?.spin(name)
}

pub fn position_operator(name: PosName, variant: Variant, m: f64) -> Result<VecOp> {
    Catalog::with_defaults(m)?.position(name, variant)
}

#[derive(Debug, Clone)]
pub enum CatalogOp {
    Vector(VecOp),
    Scalar(DiffOp),
}

impl CatalogOp {
    pub fn components(&self) -> Vec<&DiffOp> {
        match self {
            CatalogOp::Vector(v) => v.0.iter().collect(),
            CatalogOp::Scalar(d) => vec![d],
        }
    }
}

/// Stable public operator identifiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorName {
    SBg,
    SCm,
    SNw,
    SPryceC,
    SPryceE,
    SFw,
    RCm,
    RNw,
    QPryceC,
    QPryceE,
    XFw,
    X,
    HD,
    P0Cov,
    UFw,
    UP,
}

impl OperatorName {
    pub const ALL: [OperatorName; 16] = [
        OperatorName::SBg,
        OperatorName::SCm,
        OperatorName::SNw,
        OperatorName::SPryceC,
        OperatorName::SPryceE,
        OperatorName::SFw,
        OperatorName::RCm,
        OperatorName::RNw,
        OperatorName::QPryceC,
        OperatorName::QPryceE,
        OperatorName::XFw,
        OperatorName::X,
        OperatorName::HD,
        OperatorName::P0Cov,
        OperatorName::UFw,
        OperatorName::UP,
    ];

    pub fn as_str(self) -> &'static str {
        use OperatorName as N;
        match self {
            N::SBg => "S_BG",
            N::SCm => "S_CM",
            N::SNw => "S_NW",
            N::SPryceC => "S_PRYCE_C",
            N::SPryceE => "S_PRYCE_E",
            N::SFw => "S_FW",
            N::RCm => "R_CM",
            N::RNw => "R_NW",
            N::QPryceC => "Q_PRYCE_C",
            N::QPryceE => "Q_PRYCE_E",
            N::XFw => "X_FW",
            N::X => "X",
            N::HD => "H_D",
            N::P0Cov => "P0_COV",
            N::UFw => "U_FW",
            N::UP => "U_P",
        }
    }
}

impl fmt::Display for OperatorName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for OperatorName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        OperatorName::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| Error::UnknownName(s.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: [f64; 3]) -> Momentum {
        Momentum::new(p, 1.0).unwrap()
    }

    fn samples() -> Vec<Momentum> {
        vec![
            q([0.0; 3]),
            q([1.0, 0.0, 0.0]),
            q([0.0, -1.0, 0.0]),
            q([0.3, -0.7, 1.1]),
            q([-2.0, 0.4, 0.9]),
            q([5.0, 6.0, -3.0]),
        ]
    }

    #[test]
    fn fw_unitary_is_identity_at_rest() {
        let u = fw_unitary(1.0).unwrap();
        let v = u.value(&q([0.0; 3])).unwrap();
        assert!((v - Mat4::identity()).frobenius_norm() < 1e-15);
    }

    #[test]
    fn pryce_unitary_is_beta_fw() {
        let cat = Catalog::with_defaults(1.0).unwrap();
        let beta = MatFn::constant(gammas().beta);
        let r = crate::algebra::matfn_residual(
            &cat.pryce_unitary(),
            &(beta * cat.fw_unitary()),
            &samples(),
        )
        .unwrap();
        assert!(r < 1e-14, "{r}");
    }

    #[test]
    fn s_fw_direct_product_oracle() {
        // U⁻¹(Σ/2)U computed by plain matrix products at p = (0,0,0.75).
        let g = gammas();
        let e = 1.25;
        let pz = 0.75;
        let u = (Mat4::identity() * (e + 1.0) + g.beta * g.alpha[2] * pz)
            * (1.0 / (2.0 * e * (1.0 + e)).sqrt());
        let s = spin_operator(SpinName::Fw, 1.0).unwrap();
        let at = q([0.0, 0.0, pz]);
        for i in 0..3 {
            let oracle = u.dagger() * g.sigma[i] * 0.5 * u;
            let got = s[i].a().value(&at).unwrap();
            assert!((got - oracle).frobenius_norm() < 1e-14);
        }
        // Along the boost axis S_FW³ = Σ³/2; transverse components differ.
        let d3 = (s[2].a().value(&at).unwrap() - g.sigma[2] * 0.5).frobenius_norm();
        let d1 = (s[0].a().value(&at).unwrap() - g.sigma[0] * 0.5).frobenius_norm();
        assert!(d3 < 1e-15);
        assert!((d1 - 0.632_455_532_033_675_9).abs() < 1e-12, "{d1}");
    }

    #[test]
    fn resolver_picks_g0g5_and_minus_k() {
        let r = Conventions::resolve(1.0, &samples(), 1e-10).unwrap();
        assert!(r.resolved);
        assert_eq!(r.conventions, Conventions::default());
        let printed = r.gamma_residuals.iter().find(|x| x.0 == GammaOrder::G5G0).unwrap().1;
        assert!(printed > 0.1, "{printed}");
    }

    #[test]
    fn variant_pairs() {
        assert!(matches!(
            position_operator(PosName::Cm, Variant::Definitional, 1.0),
            Err(Error::UnknownVariant { .. })
        ));
        assert!(matches!(
            position_operator(PosName::Fw, Variant::Closed, 1.0),
            Err(Error::UnknownVariant { .. })
        ));
        assert!(spin_operator(SpinName::Bg, 0.0).is_err());
    }

    #[test]
    fn operator_names_round_trip() {
        for n in OperatorName::ALL {
            assert_eq!(n.as_str().parse::<OperatorName>().unwrap(), n);
        }
        assert!("S_XX".parse::<OperatorName>().is_err());
    }

    #[test]
    fn pryce_e_routes_agree_with_fw() {
        let cat = Catalog::with_defaults(1.0).unwrap();
        let s = samples();
        let def = cat.position(PosName::PryceE, Variant::Definitional).unwrap();
        let closed = cat.position(PosName::PryceE, Variant::Closed).unwrap();
        let fw = cat.position(PosName::Fw, Variant::Definitional).unwrap();
        assert!(def.residual(&closed, &s).unwrap().max_residual < 1e-10);
        assert!(closed.residual(&fw, &s).unwrap().max_residual < 1e-10);
    }
}
