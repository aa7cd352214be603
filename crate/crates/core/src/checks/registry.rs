use num_complex::Complex64;
use rand::Rng;

use super::{CheckContext, Kind, Outcome, Tolerance, DISTINCTNESS_FLOOR};
use crate::algebra::{Evaluator, Mat4, MatFn, Momentum, I};
use crate::diffop::{levi_civita3, Conjugation, DiffOp, VecOp};
use crate::dirac::{
    self, angular_momentum, boost_generator, boost_matrix, boost_to_rest, energy_fn, gammas,
    hamiltonian, momentum_op, momentum_vector, position_x, sigma_dot_p, BoostMatrix, PLMode,
    METRIC,
};
use crate::error::{Error, Result};
use crate::spincat::{OperatorName, PosName, SpinName, Variant};

pub type CheckFn = fn(&CheckContext) -> Result<Outcome>;

#[derive(Clone)]
pub struct CheckSpec {
    pub id: &'static str,
    pub description: &'static str,
    /// The identity under test in formula notation.
    pub anchor: &'static str,
    pub kind: Kind,
    pub tolerance: Tolerance,
    pub floor: Option<f64>,
    pub run: CheckFn,
}

impl std::fmt::Debug for CheckSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CheckSpec")
            .field("id", &self.id)
            .field("anchor", &self.anchor)
            .field("kind", &self.kind)
            .finish()
    }
}

const fn spec(
    id: &'static str,
    description: &'static str,
    anchor: &'static str,
    kind: Kind,
    tolerance: Tolerance,
    run: CheckFn,
) -> CheckSpec {
    CheckSpec {
        id,
        description,
        anchor,
        kind,
        tolerance,
        floor: None,
        run,
    }
}

const fn distinct(
    id: &'static str,
    description: &'static str,
    anchor: &'static str,
    floor: f64,
    run: CheckFn,
) -> CheckSpec {
    CheckSpec {
        id,
        description,
        anchor,
        kind: Kind::Distinctness,
        tolerance: Tolerance::Default,
        floor: Some(floor),
        run,
    }
}

/// Every registered check, in report order.
pub fn registry() -> Vec<CheckSpec> {
    use Kind::*;
    use Tolerance::{Default as Def, Fixed};
    vec![
        spec("GAMMA_IDENTITIES", "stored Dirac matrices satisfy their defining algebra",
            "beta^2 = gamma5^2 = 1, {beta, gamma5} = 0, alpha = gamma5 Sigma, [Sigma^i, Sigma^j] = 2i eps_ijk Sigma^k",
            MatrixIdentity, Fixed(1e-15), gamma_identities),
        spec("SU2_BG", "Bogolubov spin closes su(2)", "[S_BG^i, S_BG^j] = i eps_ijk S_BG^k",
            Commutator, Def, |c| su2(c, SpinName::Bg)),
        spec("SU2_NW", "NW spin closes su(2)", "[S_NW^i, S_NW^j] = i eps_ijk S_NW^k",
            Commutator, Def, |c| su2(c, SpinName::Nw)),
        spec("SU2_PRYCE_E", "Pryce (e) spin closes su(2)", "[S_(e)^i, S_(e)^j] = i eps_ijk S_(e)^k",
            Commutator, Def, |c| su2(c, SpinName::PryceE)),
        spec("SU2_FW", "FW mean spin closes su(2)", "[S_FW^i, S_FW^j] = i eps_ijk S_FW^k",
            Commutator, Def, |c| su2(c, SpinName::Fw)),
        spec("VEC_UNDER_J", "every catalog spin is a vector under rotations",
            "[J^i, S^j] = i eps_ijk S^k for every catalog S", Commutator, Def, vec_under_j),
        spec("AXIAL", "spins are parity-even, momentum parity-odd",
            "beta S(-p) beta = S for S_BG, S_NW, S_(e), S_FW; beta P(-p) beta = -P", Parity, Def, axial),
        spec("BG_IS_PAULI", "Bogolubov spin equals the 4-dimensional Pauli operator",
            "S_BG = Sigma/2", Equality, Fixed(1e-12), bg_is_pauli),
        spec("NW_EQ_BG", "NW spin has the Bogolubov form", "S_NW = S_BG", Equality, Fixed(1e-12), nw_eq_bg),
        spec("PRYCEE_EQ_FW", "Pryce (e) spin equals the FW mean spin", "S_(e) = U_FW^-1 (Sigma/2) U_FW",
            Equality, Def, prycee_eq_fw),
        spec("QE_LOCAL", "Pryce (e) position components commute", "[q_(e)^i, q_(e)^j] = 0",
            Commutator, Def, qe_local),
        spec("QE_CANONICAL", "Pryce (e) position is canonical to momentum", "[q_(e)^i, P^j] = i delta_ij",
            Commutator, Def, qe_canonical),
        spec("QE_SPIN_COMMUTE", "Pryce (e) position commutes with Pryce (e) spin", "[q_(e)^i, S_(e)^j] = 0",
            Commutator, Def, qe_spin_commute),
        spec("SFW_CONSERVED", "FW mean spin commutes with the Dirac Hamiltonian", "[S_FW, H_D] = 0",
            Commutator, Def, sfw_conserved),
        spec("SC_ALGEBRA", "Pryce (c) spin structure constant, literal claim",
            "[S_(c)^i, S_(c)^j] = i eps_ijk (m^2/E^2) S_(c)^k", Commutator, Fixed(1e-8), sc_algebra),
        spec("SC_ALGEBRA_CORRECTED", "Pryce (c) spin commutator, measured relation",
            "[S_(c)^i, S_(c)^j] = i eps_ijk (S_(c)^k - p^k (p.S_(c))/E^2)", Commutator, Def, sc_algebra_corrected),
        spec("SC_ALGEBRA_LONGITUDINAL", "Pryce (c) spin commutator along p",
            "(1/2) eps_ijk p^k [S_(c)^i, S_(c)^j] = i (m^2/E^2) p.S_(c)", Commutator, Def, sc_algebra_longitudinal),
        spec("X_HD_COMM", "position commutator with the Dirac Hamiltonian", "[x, H_D] = i alpha",
            Commutator, Def, x_hd_comm),
        spec("X_P0_COMM", "position commutator with the covariant energy", "[x, P^0] = i P/P^0",
            Commutator, Def, x_p0_comm),
        distinct("ALPHA_NEQ_P_OVER_E", "the two position commutators differ away from rest",
            "i alpha != i P/P^0", DISTINCTNESS_FLOOR, alpha_neq_p_over_e),
        distinct("HD_NONCOVARIANT", "the Dirac Hamiltonian is not the boosted rest-frame Hamiltonian",
            "alpha.p + beta m != L(p)^0_mu k^mu with k = (beta m, 0), at |p| = m", 0.5, hd_noncovariant),
        distinct("CM_NEQ_PRYCEC", "covariant CM position differs from Pryce (c)", "R_CM != q_(c)",
            DISTINCTNESS_FLOOR, cm_neq_prycec),
        distinct("SCM_NEQ_SC", "covariant CM spin differs from Pryce (c) spin", "S_CM != S_(c)",
            DISTINCTNESS_FLOOR, scm_neq_sc),
        distinct("NW_NEQ_PRYCEE", "covariant NW position differs from Pryce (e)", "R_NW != q_(e)",
            DISTINCTNESS_FLOOR, nw_neq_prycee),
        spec("HFW_DIAGONAL", "FW transformation diagonalizes the Hamiltonian", "U_FW H_D U_FW^-1 = beta E",
            Equality, Def, hfw_diagonal),
        spec("UFW_UNITARY", "FW transformation is unitary", "U_FW U_FW^dagger = 1",
            MatrixIdentity, Fixed(1e-12), ufw_unitary),
        spec("UP_EQ_BETA_UFW", "Pryce unitary is beta times the FW unitary", "U_P = beta U_FW",
            MatrixIdentity, Fixed(1e-14), up_eq_beta_ufw),
        spec("SFW_FORWARD_IS_PAULI", "FW mean spin maps back to the Pauli operator",
            "U_FW S_FW U_FW^-1 = Sigma/2", Equality, Def, sfw_forward_is_pauli),
        spec("QC_DEF_EQ_CLOSED", "Pryce (c) position from its definition equals the closed form",
            "-(1/2)(H_D^-1 K + K H_D^-1) = q_(c) closed form", Equality, Def, qc_def_eq_closed),
        spec("QE_DEF_EQ_CLOSED", "Pryce (e) position from q_(c) and S_(c) equals the closed form",
            "q_(c) + S_(c) x P/(m(m+E)) = q_(e) closed form", Equality, Def, qe_def_eq_closed),
        spec("QE_EQ_XFW", "Pryce (e) position equals the FW mean position", "q_(e) = U_FW^-1 x U_FW",
            Equality, Def, qe_eq_xfw),
        spec("PL_DEF_EQ_CLOSED", "contracted PL vector equals the closed Dirac form with no derivative part",
            "(1/2) eps^{mu nu rho sigma} J_{nu rho} P_sigma = (Sigma.P/2, {Sigma, H_D}/4)", Equality, Def,
            pl_def_eq_closed),
        spec("PL_DEF_W0_EQ_KIN", "time component of the contracted PL vector", "W^0 = Sigma.P/2",
            Equality, Def, pl_def_w0_eq_kin),
        spec("PL_CASIMIR", "PL square is a multiple of the identity", "W_mu W^mu = -(3/4) m^2",
            MatrixIdentity, Def, pl_casimir),
        distinct("PL_KIN_NEQ_DIRAC", "kinematic and Dirac PL spatial parts differ",
            "m Sigma/2 + (Sigma.P) P/(2(m+E)) != {Sigma, H_D}/4", DISTINCTNESS_FLOOR, pl_kin_neq_dirac),
        spec("SUBSTITUTION_IDENTITIES", "kinematic PL vector reproduces the Pauli operator",
            "W/m - W^0 P/(m(m+P^0)) = Sigma/2 and W^0 = Sigma.P/2", Equality, Def, substitution_identities),
        spec("BOOST_METRIC", "boost matrices preserve the metric", "L(p)^T g L(p) = g",
            MatrixIdentity, Fixed(1e-12), boost_metric),
        spec("BOOST_INVERSE", "inverse boost is the boost with reversed momentum", "L(p) L(-p) = 1",
            MatrixIdentity, Fixed(1e-12), boost_inverse),
        spec("EQ4_REPRODUCED", "rest-frame spatial components of a boosted four-vector",
            "[L(-p) w]^i = w^i - w^0 p^i/(m + p^0) for w.p = 0", MatrixIdentity, Fixed(1e-12), eq4_reproduced),
        spec("POINCARE_CLOSURE", "Dirac generators close the Poincare algebra",
            "[J,J] = i eps J, [J,K] = i eps K, [K,K] = -i eps J, [J,P] = i eps P, [K^i,P^j] = s i delta H_D, [K,H_D] = s i P, [P,P] = [P,H_D] = 0 with K = s (1/2){x,H_D}",
            Commutator, Def, poincare_closure),
        spec("VELOCITY_SPECTRUM", "velocity operator has eigenvalues +1 and -1",
            "(alpha.n - 1)(alpha.n + 1) = 0, tr alpha.n = 0", MatrixIdentity, Fixed(1e-14), velocity_spectrum),
        spec("JET_FD_AGREEMENT", "autodiff partials match central differences on every catalog coefficient",
            "d/dp^k F = (F(p + h e_k) - F(p - h e_k))/(2h) + O(h^2)", MatrixIdentity, Fixed(1e-7),
            jet_fd_agreement),
    ]
}

fn outcome(value: f64, worst: Momentum, samples_used: usize) -> Outcome {
    Outcome {
        value,
        max: value,
        worst,
        samples_used,
        detail: None,
    }
}

/// Running maximum that treats NaN as worst.
struct MaxTracker {
    value: f64,
    worst: Momentum,
}

impl MaxTracker {
    fn new(first: Momentum) -> Self {
        Self { value: 0.0, worst: first }
    }

    fn push(&mut self, r: f64, q: Momentum) {
        if r > self.value || (r.is_nan() && !self.value.is_nan()) {
            self.value = if r.is_nan() { f64::NAN } else { r };
            self.worst = q;
        }
    }

    fn into_outcome(self, samples_used: usize) -> Outcome {
        outcome(self.value, self.worst, samples_used)
    }
}

fn first(samples: &[Momentum]) -> Result<Momentum> {
    samples.first().copied().ok_or(Error::EmptySamples)
}

/// Σ_k ε_ijk · c · v[k].
fn eps_combo(v: &VecOp, i: usize, j: usize, c: Complex64) -> DiffOp {
    let mut acc = DiffOp::zero();
    for k in 0..3 {
        let e = levi_civita3(i, j, k);
        if e != 0.0 {
            acc = acc + v[k].scale(c * e);
        }
    }
    acc
}

/// max over (i, j) of residual([a^i, b^j], target(i, j)).
fn commutator_check(
    a: &VecOp,
    b: &VecOp,
    samples: &[Momentum],
    target: impl Fn(usize, usize) -> DiffOp,
) -> Result<Outcome> {
    let mut t = MaxTracker::new(first(samples)?);
    for i in 0..3 {
        for j in 0..3 {
            let c = a[i].commutator(&b[j])?;
            let r = c.residual(&target(i, j), samples)?;
            t.push(r.max_residual, r.worst_sample);
        }
    }
    Ok(t.into_outcome(samples.len()))
}

fn equality(a: &VecOp, b: &VecOp, samples: &[Momentum]) -> Result<Outcome> {
    let r = a.residual(b, samples)?;
    Ok(outcome(r.max_residual, r.worst_sample, samples.len()))
}

/// min over samples of the residual between `a` and `b`.
fn distinctness(a: &VecOp, b: &VecOp, samples: &[Momentum]) -> Result<Outcome> {
    let mut min = (f64::INFINITY, first(samples)?);
    let mut max = 0.0f64;
    for q in samples {
        let r = a.residual(b, std::slice::from_ref(q))?.max_residual;
        if r < min.0 || r.is_nan() {
            min = (r, *q);
        }
        max = max.max(r);
    }
    Ok(Outcome {
        value: min.0,
        max,
        worst: min.1,
        samples_used: samples.len(),
        detail: Some("minimum over samples with |p| >= m/2 and samples moved onto |p| = m".into()),
    })
}

fn const_vec(m: [Mat4; 3]) -> VecOp {
    VecOp::from_fns(m.map(MatFn::constant))
}

fn half_sigma() -> VecOp {
    const_vec(gammas().sigma.map(|s| s * 0.5))
}

fn zero_op() -> DiffOp {
    DiffOp::zero()
}

fn gamma_identities(_: &CheckContext) -> Result<Outcome> {
    let g = gammas();
    let id = Mat4::identity();
    let mut worst = 0.0f64;
    let mut note = |m: Mat4| worst = worst.max(m.max_abs());
    note(g.beta * g.beta - id);
    note(g.gamma5 * g.gamma5 - id);
    note(g.beta.anticommutator(&g.gamma5));
    for i in 0..3 {
        note(g.alpha[i] - g.gamma5 * g.sigma[i]);
        for j in 0..3 {
            let mut target = Mat4::zero();
            for k in 0..3 {
                target += g.sigma[k] * (2.0 * levi_civita3(i, j, k)) * I;
            }
            note(g.sigma[i].commutator(&g.sigma[j]) - target);
        }
    }
    Ok(outcome(worst, Momentum::at_rest(1.0)?, 0))
}

fn su2(ctx: &CheckContext, name: SpinName) -> Result<Outcome> {
    let s = ctx.catalog.spin(name)?;
    commutator_check(&s, &s, &ctx.samples, |i, j| eps_combo(&s, i, j, I))
}

fn vec_under_j(ctx: &CheckContext) -> Result<Outcome> {
    let j = angular_momentum();
    let mut t = MaxTracker::new(first(&ctx.samples)?);
    for name in SpinName::ALL {
        let s = ctx.catalog.spin(name)?;
        let o = commutator_check(&j, &s, &ctx.samples, |a, b| eps_combo(&s, a, b, I))?;
        t.push(o.value, o.worst);
    }
    Ok(t.into_outcome(ctx.samples.len()))
}

fn axial(ctx: &CheckContext) -> Result<Outcome> {
    let mut t = MaxTracker::new(first(&ctx.samples)?);
    for name in [SpinName::Bg, SpinName::Nw, SpinName::PryceE, SpinName::Fw] {
        let s = ctx.catalog.spin(name)?;
        let r = s.parity().residual(&s, &ctx.samples)?;
        t.push(r.max_residual, r.worst_sample);
    }
    let p = momentum_op();
    let r = p.parity().residual(&p.map(|c| -c.clone()), &ctx.samples)?;
    t.push(r.max_residual, r.worst_sample);
    Ok(t.into_outcome(ctx.samples.len()))
}

fn bg_is_pauli(ctx: &CheckContext) -> Result<Outcome> {
    equality(&ctx.catalog.spin(SpinName::Bg)?, &half_sigma(), &ctx.samples)
}

fn nw_eq_bg(ctx: &CheckContext) -> Result<Outcome> {
    equality(&ctx.catalog.spin(SpinName::Nw)?, &ctx.catalog.spin(SpinName::Bg)?, &ctx.samples)
}

fn prycee_eq_fw(ctx: &CheckContext) -> Result<Outcome> {
    equality(&ctx.catalog.spin(SpinName::PryceE)?, &ctx.catalog.spin(SpinName::Fw)?, &ctx.samples)
}

fn qe(ctx: &CheckContext) -> Result<VecOp> {
    ctx.catalog.position(PosName::PryceE, Variant::Closed)
}

fn qe_local(ctx: &CheckContext) -> Result<Outcome> {
    let q = qe(ctx)?;
    commutator_check(&q, &q, &ctx.samples, |_, _| zero_op())
}

fn qe_canonical(ctx: &CheckContext) -> Result<Outcome> {
    let q = qe(ctx)?;
    commutator_check(&q, &momentum_op(), &ctx.samples, |i, j| {
        if i == j {
            DiffOp::multiplication(MatFn::identity().scale(I))
        } else {
            zero_op()
        }
    })
}

fn qe_spin_commute(ctx: &CheckContext) -> Result<Outcome> {
    let q = qe(ctx)?;
    let s = ctx.catalog.spin(SpinName::PryceE)?;
    commutator_check(&q, &s, &ctx.samples, |_, _| zero_op())
}

fn sfw_conserved(ctx: &CheckContext) -> Result<Outcome> {
    let s = ctx.catalog.spin(SpinName::Fw)?;
    let h = DiffOp::multiplication(hamiltonian(ctx.mass())?);
    let mut t = MaxTracker::new(first(&ctx.samples)?);
    for i in 0..3 {
        let r = s[i].commutator(&h)?.residual(&zero_op(), &ctx.samples)?;
        t.push(r.max_residual, r.worst_sample);
    }
    Ok(t.into_outcome(ctx.samples.len()))
}

/// Values of S_(c) and of its commutators at one momentum.
fn sc_values(sc: &[MatFn; 3], q: &Momentum) -> Result<([Mat4; 3], [[Mat4; 3]; 3])> {
    let mut ev = Evaluator::new(q);
    let mut s = [Mat4::zero(); 3];
    for k in 0..3 {
        s[k] = ev.value(&sc[k])?;
    }
    let c = std::array::from_fn(|i| std::array::from_fn(|j| s[i].commutator(&s[j])));
    Ok((s, c))
}

fn sc_algebra(ctx: &CheckContext) -> Result<Outcome> {
    let sc = ctx.catalog.s_c_closed();
    let m = ctx.mass();
    let mut t = MaxTracker::new(first(&ctx.samples)?);
    let mut measured = Complex64::new(0.0, 0.0);
    for q in &ctx.samples {
        let (s, c) = sc_values(&sc, q)?;
        let lam = m * m / (q.energy() * q.energy());
        for i in 0..3 {
            for j in 0..3 {
                let mut target = Mat4::zero();
                let mut scale = Mat4::zero();
                for k in 0..3 {
                    let e = levi_civita3(i, j, k);
                    target += s[k] * (I * e * lam);
                    scale += s[k] * (e * lam);
                }
                if scale.is_zero() {
                    continue;
                }
                let r = (c[i][j] - target).frobenius_norm() / scale.frobenius_norm();
                if r > t.value {
                    // Least-squares structure constant c[i][j] ≈ μ S^k.
                    let k = 3 - i - j;
                    let e = levi_civita3(i, j, k);
                    measured = s[k].inner(&c[i][j]) / (s[k].inner(&s[k]) * e);
                }
                t.push(r, *q);
            }
        }
    }
    let mut o = t.into_outcome(ctx.samples.len());
    let q = o.worst;
    o.detail = Some(format!(
        "relative deviation from i eps (m^2/E^2) S^k; at the worst sample the least-squares constant is {:.6}{:+.6}i against claimed {:.6}i",
        measured.re,
        measured.im,
        m * m / (q.energy() * q.energy())
    ));
    Ok(o)
}

fn sc_algebra_corrected(ctx: &CheckContext) -> Result<Outcome> {
    let sc = VecOp::from_fns(ctx.catalog.s_c_closed());
    let e2_inv = crate::algebra::ScalarFn::energy(ctx.mass()).square().recip();
    let p = momentum_vector();
    let p_dot_s = (0..3).fold(MatFn::zero(), |acc, k| acc + p[k].clone() * sc[k].a().clone());
    let adjusted = VecOp(std::array::from_fn(|k| {
        DiffOp::multiplication(
            sc[k].a().clone() - (p[k].clone() * p_dot_s.clone()).scaled_by(&e2_inv),
        )
    }));
    commutator_check(&sc, &sc, &ctx.samples, |i, j| eps_combo(&adjusted, i, j, I))
}

fn sc_algebra_longitudinal(ctx: &CheckContext) -> Result<Outcome> {
    let sc = VecOp::from_fns(ctx.catalog.s_c_closed());
    let m = ctx.mass();
    let e = crate::algebra::ScalarFn::energy(m);
    let p = momentum_vector();
    let mut lhs = DiffOp::zero();
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                let eps = levi_civita3(i, j, k);
                if eps != 0.0 {
                    let c = sc[i].commutator(&sc[j])?;
                    lhs = lhs + c.left_mul(&p[k]).scale_re(0.5 * eps);
                }
            }
        }
    }
    let p_dot_s = (0..3).fold(MatFn::zero(), |acc, k| acc + p[k].clone() * sc[k].a().clone());
    let rhs = p_dot_s.scaled_by(&(m * m * e.square().recip())).scale(I);
    let r = lhs.residual(&DiffOp::multiplication(rhs), &ctx.samples)?;
    Ok(outcome(r.max_residual, r.worst_sample, ctx.samples.len()))
}

fn x_hd_comm(ctx: &CheckContext) -> Result<Outcome> {
    let x = position_x();
    let h = DiffOp::multiplication(hamiltonian(ctx.mass())?);
    let target = const_vec(gammas().alpha.map(|a| a * I));
    let mut t = MaxTracker::new(first(&ctx.samples)?);
    for i in 0..3 {
        let r = x[i].commutator(&h)?.residual(&target[i], &ctx.samples)?;
        t.push(r.max_residual, r.worst_sample);
    }
    Ok(t.into_outcome(ctx.samples.len()))
}

fn p_over_e(m: f64) -> VecOp {
    let inv_e = crate::algebra::ScalarFn::energy(m).recip();
    VecOp::from_fns(momentum_vector().map(|p| p.scaled_by(&inv_e).scale(I)))
}

fn x_p0_comm(ctx: &CheckContext) -> Result<Outcome> {
    let x = position_x();
    let p0 = DiffOp::multiplication(energy_fn(ctx.mass()));
    let target = p_over_e(ctx.mass());
    let mut t = MaxTracker::new(first(&ctx.samples)?);
    for i in 0..3 {
        let r = x[i].commutator(&p0)?.residual(&target[i], &ctx.samples)?;
        t.push(r.max_residual, r.worst_sample);
    }
    Ok(t.into_outcome(ctx.samples.len()))
}

fn alpha_neq_p_over_e(ctx: &CheckContext) -> Result<Outcome> {
    let x = position_x();
    let h = DiffOp::multiplication(hamiltonian(ctx.mass())?);
    let p0 = DiffOp::multiplication(energy_fn(ctx.mass()));
    let mut with_h = Vec::new();
    let mut with_p0 = Vec::new();
    for i in 0..3 {
        with_h.push(x[i].commutator(&h)?);
        with_p0.push(x[i].commutator(&p0)?);
    }
    let a = VecOp(with_h.try_into().expect("three"));
    let b = VecOp(with_p0.try_into().expect("three"));
    distinctness(&a, &b, &ctx.distinct_samples())
}

fn hd_noncovariant(ctx: &CheckContext) -> Result<Outcome> {
    let m = ctx.mass();
    let h = hamiltonian(m)?;
    let beta = gammas().beta;
    let samples = ctx.shell_samples();
    let mut min = (f64::INFINITY, first(&samples)?);
    let mut max = 0.0f64;
    for q in &samples {
        // L(p)⁰_μ k^μ with k = (βm, 0, 0, 0).
        let l = boost_matrix(m, q.p)?;
        let boosted = beta * (l.0[0][0] * m);
        let d = (h.value(q)? - boosted).frobenius_norm();
        if d < min.0 || d.is_nan() {
            min = (d, *q);
        }
        max = max.max(d);
    }
    Ok(Outcome {
        value: min.0,
        max,
        worst: min.1,
        samples_used: samples.len(),
        detail: Some("absolute Frobenius norm, samples moved onto |p| = m".into()),
    })
}

fn cm_neq_prycec(ctx: &CheckContext) -> Result<Outcome> {
    let r = ctx.catalog.position(PosName::Cm, Variant::Closed)?;
    let q = ctx.catalog.position(PosName::PryceC, Variant::Closed)?;
    distinctness(&r, &q, &ctx.distinct_samples())
}

fn scm_neq_sc(ctx: &CheckContext) -> Result<Outcome> {
    let a = ctx.catalog.spin(SpinName::Cm)?;
    let b = ctx.catalog.spin(SpinName::PryceC)?;
    distinctness(&a, &b, &ctx.distinct_samples())
}

fn nw_neq_prycee(ctx: &CheckContext) -> Result<Outcome> {
    let a = ctx.catalog.position(PosName::Nw, Variant::Closed)?;
    let b = qe(ctx)?;
    distinctness(&a, &b, &ctx.distinct_samples())
}

fn hfw_diagonal(ctx: &CheckContext) -> Result<Outcome> {
    let m = ctx.mass();
    let h = DiffOp::multiplication(hamiltonian(m)?);
    let u = ctx.catalog.fw_unitary();
    let hfw = h.conjugate(&u, Conjugation::Forward, &ctx.samples)?;
    let target = DiffOp::multiplication(MatFn::constant(gammas().beta).scaled_by(
        &crate::algebra::ScalarFn::energy(m),
    ));
    let r = hfw.residual(&target, &ctx.samples)?;
    Ok(outcome(r.max_residual, r.worst_sample, ctx.samples.len()))
}

fn ufw_unitary(ctx: &CheckContext) -> Result<Outcome> {
    let u = ctx.catalog.fw_unitary();
    let mut t = MaxTracker::new(first(&ctx.samples)?);
    for q in &ctx.samples {
        let v = u.value(q)?;
        let d = (v * v.dagger() - Mat4::identity())
            .frobenius_norm()
            .max(v.unitarity_defect());
        t.push(d, *q);
    }
    Ok(t.into_outcome(ctx.samples.len()))
}

fn up_eq_beta_ufw(ctx: &CheckContext) -> Result<Outcome> {
    let lhs = ctx.catalog.pryce_unitary();
    let rhs = MatFn::constant(gammas().beta) * ctx.catalog.fw_unitary();
    let (r, q) = crate::algebra::matfn_residual_detail(&lhs, &rhs, &ctx.samples)?;
    Ok(outcome(r, q, ctx.samples.len()))
}

fn sfw_forward_is_pauli(ctx: &CheckContext) -> Result<Outcome> {
    let s = ctx.catalog.spin(SpinName::Fw)?;
    let u = ctx.catalog.fw_unitary();
    let mut back = Vec::new();
    for c in s.0.iter() {
        back.push(c.conjugate(&u, Conjugation::Forward, &ctx.samples)?);
    }
    equality(&VecOp(back.try_into().expect("three")), &half_sigma(), &ctx.samples)
}

fn qc_def_eq_closed(ctx: &CheckContext) -> Result<Outcome> {
    let d = ctx.catalog.position(PosName::PryceC, Variant::Definitional)?;
    let c = ctx.catalog.position(PosName::PryceC, Variant::Closed)?;
    equality(&d, &c, &ctx.samples)
}

fn qe_def_eq_closed(ctx: &CheckContext) -> Result<Outcome> {
    let d = ctx.catalog.position(PosName::PryceE, Variant::Definitional)?;
    equality(&d, &qe(ctx)?, &ctx.samples)
}

fn qe_eq_xfw(ctx: &CheckContext) -> Result<Outcome> {
    let x = ctx.catalog.position(PosName::Fw, Variant::Definitional)?;
    equality(&qe(ctx)?, &x, &ctx.samples)
}

fn pl_def_eq_closed(ctx: &CheckContext) -> Result<Outcome> {
    let m = ctx.mass();
    let k = ctx.catalog.conventions().k_sign;
    let def = dirac::pl_vector_with(PLMode::Definitional, m, k)?;
    let closed = dirac::pl_vector(PLMode::DiracClosed, m)?;
    let r = def.residual(&closed, &ctx.samples)?;
    Ok(outcome(r.max_residual, r.worst_sample, ctx.samples.len()))
}

fn pl_def_w0_eq_kin(ctx: &CheckContext) -> Result<Outcome> {
    let m = ctx.mass();
    let k = ctx.catalog.conventions().k_sign;
    let def = dirac::pl_vector_with(PLMode::Definitional, m, k)?;
    let target = DiffOp::multiplication(sigma_dot_p().scale_re(0.5));
    let r = def[0].residual(&target, &ctx.samples)?;
    Ok(outcome(r.max_residual, r.worst_sample, ctx.samples.len()))
}

fn pl_square(w: &crate::diffop::FourVecOp) -> MatFn {
    (0..4).fold(MatFn::zero(), |acc, mu| {
        acc + (w[mu].a().clone() * w[mu].a().clone()).scale_re(METRIC[mu])
    })
}

fn pl_casimir(ctx: &CheckContext) -> Result<Outcome> {
    let m = ctx.mass();
    let target = MatFn::constant(Mat4::identity() * (-0.75 * m * m));
    let mut t = MaxTracker::new(first(&ctx.samples)?);
    for mode in [PLMode::DiracClosed, PLMode::Kinematic] {
        let w = dirac::pl_vector(mode, m)?;
        let (r, q) = crate::algebra::matfn_residual_detail(&pl_square(&w), &target, &ctx.samples)?;
        t.push(r, q);
    }
    Ok(t.into_outcome(ctx.samples.len()))
}

fn pl_kin_neq_dirac(ctx: &CheckContext) -> Result<Outcome> {
    let m = ctx.mass();
    let a = dirac::pl_vector(PLMode::Kinematic, m)?.spatial();
    let b = dirac::pl_vector(PLMode::DiracClosed, m)?.spatial();
    distinctness(&a, &b, &ctx.distinct_samples())
}

fn substitution_identities(ctx: &CheckContext) -> Result<Outcome> {
    let m = ctx.mass();
    let w = dirac::pl_vector(PLMode::Kinematic, m)?;
    let inv = (m + crate::algebra::ScalarFn::energy(m)).recip();
    let reduced = VecOp(std::array::from_fn(|i| {
        DiffOp::multiplication(
            (w[i + 1].a().clone()
                - w[0].a().scaled_by(&(crate::algebra::ScalarFn::momentum(i) * inv.clone())))
            .scale_re(1.0 / m),
        )
    }));
    let a = reduced.residual(&half_sigma(), &ctx.samples)?;
    let b = w[0].residual(&DiffOp::multiplication(sigma_dot_p().scale_re(0.5)), &ctx.samples)?;
    let (r, q) = if a.max_residual >= b.max_residual {
        (a.max_residual, a.worst_sample)
    } else {
        (b.max_residual, b.worst_sample)
    };
    Ok(outcome(r, q, ctx.samples.len()))
}

fn boost_metric(ctx: &CheckContext) -> Result<Outcome> {
    let mut t = MaxTracker::new(first(&ctx.samples)?);
    for q in &ctx.samples {
        let l = boost_matrix(ctx.mass(), q.p)?;
        // Relative to the entry scale, which grows like (E/m)².
        let scale = (q.energy() / ctx.mass()).powi(2);
        t.push(l.metric_defect() / scale, *q);
    }
    Ok(t.into_outcome(ctx.samples.len()))
}

fn boost_inverse(ctx: &CheckContext) -> Result<Outcome> {
    let mut t = MaxTracker::new(first(&ctx.samples)?);
    for q in &ctx.samples {
        let l = boost_matrix(ctx.mass(), q.p)?;
        let li = boost_matrix(ctx.mass(), q.p.map(|c| -c))?;
        let scale = (q.energy() / ctx.mass()).powi(2);
        t.push(l.compose(&li).max_abs_diff(&BoostMatrix::identity()) / scale, *q);
    }
    Ok(t.into_outcome(ctx.samples.len()))
}

/// Number of random (p, w) pairs used for the rest-frame formula.
pub const EQ4_PAIRS: usize = 100;

fn eq4_reproduced(ctx: &CheckContext) -> Result<Outcome> {
    let m = ctx.mass();
    let mut rng = ctx.cfg.sampling.rng();
    let mut t = MaxTracker::new(first(&ctx.samples)?);
    for n in 0..EQ4_PAIRS {
        let q = ctx.samples[n % ctx.samples.len()];
        // The closed form needs w·p = 0, which every PL vector satisfies, so
        // w⁰ is fixed by w⁰p⁰ = w·p.
        let p0 = q.energy();
        let spatial: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-5.0..=5.0));
        let w0 = (0..3).map(|i| spatial[i] * q.p[i]).sum::<f64>() / p0;
        let w = [w0, spatial[0], spatial[1], spatial[2]];
        let out = boost_to_rest(m, q.p, w)?;
        let scale = w.iter().fold(1.0f64, |a, c| a.max(c.abs())) * p0 / m;
        for i in 0..3 {
            let closed = w[i + 1] - w[0] * q.p[i] / (m + p0);
            t.push((out[i + 1] - closed).abs() / scale, q);
        }
    }
    Ok(t.into_outcome(EQ4_PAIRS))
}

fn poincare_closure(ctx: &CheckContext) -> Result<Outcome> {
    let m = ctx.mass();
    let s = ctx.catalog.conventions().k_sign.factor();
    let j = angular_momentum();
    let k = boost_generator(m, ctx.catalog.conventions().k_sign)?;
    let p = momentum_op();
    let h_fn = hamiltonian(m)?;
    let h = VecOp::from_fns(std::array::from_fn(|_| h_fn.clone()));
    let samples = &ctx.samples;
    let delta = |i: usize, jj: usize, op: DiffOp| if i == jj { op } else { zero_op() };

    let relations: Vec<(&str, Outcome)> = vec![
        ("[J,J]", commutator_check(&j, &j, samples, |a, b| eps_combo(&j, a, b, I))?),
        ("[J,K]", commutator_check(&j, &k, samples, |a, b| eps_combo(&k, a, b, I))?),
        ("[K,K]", commutator_check(&k, &k, samples, |a, b| eps_combo(&j, a, b, -I))?),
        ("[J,P]", commutator_check(&j, &p, samples, |a, b| eps_combo(&p, a, b, I))?),
        ("[K,P]", commutator_check(&k, &p, samples, |a, b| {
            delta(a, b, DiffOp::multiplication(h_fn.scale(I * s)))
        })?),
        ("[K,H]", commutator_check(&k, &h, samples, |a, _| p[a].scale(I * s))?),
        ("[P,P]", commutator_check(&p, &p, samples, |_, _| zero_op())?),
        ("[P,H]", commutator_check(&p, &h, samples, |_, _| zero_op())?),
    ];
    let mut t = MaxTracker::new(first(samples)?);
    let mut worst_rel = relations[0].0;
    for (name, o) in &relations {
        if o.value > t.value || o.value.is_nan() {
            worst_rel = name;
        }
        t.push(o.value, o.worst);
    }
    let mut o = t.into_outcome(samples.len());
    o.detail = Some(format!("boost sign s = {s:+}; largest residual in {worst_rel}"));
    Ok(o)
}

fn velocity_spectrum(ctx: &CheckContext) -> Result<Outcome> {
    let g = gammas();
    let id = Mat4::identity();
    let mut t = MaxTracker::new(first(&ctx.samples)?);
    for q in &ctx.samples {
        let n = q.with_radius(1.0).p;
        let v = (0..3).fold(Mat4::zero(), |acc, k| acc + g.alpha[k] * n[k]);
        let d = ((v - id) * (v + id)).max_abs().max(v.trace().norm());
        t.push(d, *q);
    }
    for a in g.alpha.iter() {
        let d = ((*a - id) * (*a + id)).max_abs().max(a.trace().norm());
        t.push(d, ctx.samples[0]);
    }
    Ok(t.into_outcome(ctx.samples.len()))
}

/// Momenta used for the finite-difference comparison.
pub const FD_SAMPLES: usize = 50;
pub const FD_STEP: f64 = 1e-5;

/// Every coefficient function of every catalog operator and PL vector.
pub fn catalog_matfns(ctx: &CheckContext) -> Result<Vec<(String, MatFn)>> {
    let mut out = Vec::new();
    let mut push_op = |label: String, op: &DiffOp| {
        out.push((format!("{label}.A"), op.a().clone()));
        for k in 0..3 {
            out.push((format!("{label}.B{}", k + 1), op.b(k).clone()));
        }
        for j in 0..3 {
            for k in j..3 {
                out.push((format!("{label}.C{}{}", j + 1, k + 1), op.c(j, k).clone()));
            }
        }
    };
    for name in OperatorName::ALL {
        let op = ctx.catalog.operator(name)?;
        for (n, c) in op.components().into_iter().enumerate() {
            push_op(format!("{name}[{}]", n + 1), c);
        }
    }
    let k_sign = ctx.catalog.conventions().k_sign;
    for mode in [PLMode::Definitional, PLMode::DiracClosed, PLMode::Kinematic] {
        let w = dirac::pl_vector_with(mode, ctx.mass(), k_sign)?;
        for mu in 0..4 {
            push_op(format!("W[{mode:?}]^{mu}"), &w[mu]);
        }
    }
    let kk = boost_generator(ctx.mass(), k_sign)?;
    for i in 0..3 {
        push_op(format!("K[{}]", i + 1), &kk[i]);
    }
    out.retain(|(_, f)| !f.is_zero());
    Ok(out)
}

/// max |jet partial − central difference| over all entries.
pub fn fd_deviation(f: &MatFn, q: &Momentum, h: f64) -> Result<f64> {
    let jet = f.eval(q)?;
    let mut worst = 0.0f64;
    for k in 0..3 {
        let mut plus = q.p;
        let mut minus = q.p;
        plus[k] += h;
        minus[k] -= h;
        let fp = f.value(&Momentum::new(plus, q.mass)?)?;
        let fm = f.value(&Momentum::new(minus, q.mass)?)?;
        let fd = (fp - fm) * (1.0 / (2.0 * h));
        worst = worst.max((jet.partial[k] - fd).max_abs());
    }
    Ok(worst)
}

fn jet_fd_agreement(ctx: &CheckContext) -> Result<Outcome> {
    let fns = catalog_matfns(ctx)?;
    let n = FD_SAMPLES.min(ctx.samples.len());
    let samples = &ctx.samples[..n];
    let mut t = MaxTracker::new(first(samples)?);
    let mut worst_label = String::new();
    for (label, f) in &fns {
        for q in samples {
            let d = fd_deviation(f, q, FD_STEP)?;
            if d > t.value {
                worst_label.clone_from(label);
            }
            t.push(d, *q);
        }
    }
    let mut o = t.into_outcome(n);
    o.detail = Some(format!("{} coefficient functions; worst {worst_label}", fns.len()));
    Ok(o)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn ids_and_anchors_unique_and_nonempty() {
        let r = registry();
        let ids: HashSet<_> = r.iter().map(|s| s.id).collect();
        let anchors: HashSet<_> = r.iter().map(|s| s.anchor).collect();
        assert_eq!(ids.len(), r.len());
        assert_eq!(anchors.len(), r.len());
        assert!(r.iter().all(|s| !s.anchor.is_empty() && !s.description.is_empty()));
        for s in &r {
            if s.kind == Kind::Distinctness {
                assert!(s.floor.unwrap() > super::super::DEFAULT_TOLERANCE);
            }
        }
    }

    #[test]
    fn required_ids_registered() {
        let ids: HashSet<_> = registry().iter().map(|s| s.id).collect();
        for id in [
            "SU2_BG", "SU2_NW", "SU2_PRYCE_E", "SU2_FW", "VEC_UNDER_J", "AXIAL", "BG_IS_PAULI",
            "NW_EQ_BG", "PRYCEE_EQ_FW", "QE_LOCAL", "QE_CANONICAL", "QE_SPIN_COMMUTE",
            "SFW_CONSERVED", "SC_ALGEBRA", "X_HD_COMM", "X_P0_COMM", "ALPHA_NEQ_P_OVER_E",
            "HD_NONCOVARIANT", "CM_NEQ_PRYCEC", "HFW_DIAGONAL", "UP_EQ_BETA_UFW",
            "QC_DEF_EQ_CLOSED", "QE_DEF_EQ_CLOSED", "PL_DEF_EQ_CLOSED", "BOOST_INVERSE",
            "EQ4_REPRODUCED", "POINCARE_CLOSURE", "VELOCITY_SPECTRUM",
        ] {
            assert!(ids.contains(id), "{id}");
        }
    }
}
