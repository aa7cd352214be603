//! Property tests over random momenta and operators.

use proptest::prelude::*;
use relspin::algebra::{Complex64, Momentum};
use relspin::checks::{run_suite, CheckConfig, Kind, SampleConfig};
use relspin::diffop::{Conjugation, DiffOp};
use relspin::dirac::{self, KSign, PLMode};
use relspin::spincat::{Catalog, OperatorName};
use relspin::zbw::{run_zbw, ZbwConfig};

const I: Complex64 = Complex64::new(0.0, 1.0);
const TOL: f64 = 1e-9;

fn momentum() -> impl Strategy<Value = Momentum> {
    (prop::array::uniform3(-5.0f64..5.0), 0.3f64..3.0).prop_map(|(p, m)| Momentum::new(p, m).unwrap())
}

/// First-order operators: x, P, H_D, Σ/2, J, K.
fn pool(m: f64) -> Vec<DiffOp> {
    let mut ops = Vec::new();
    let x = dirac::position_x();
    let p = dirac::momentum_op();
    let j = dirac::angular_momentum();
    let k = dirac::boost_generator(m, KSign::Minus).unwrap();
    let s = dirac::sigma_vector();
    for i in 0..3 {
        ops.push(x[i].clone());
        ops.push(p[i].clone());
        ops.push(j[i].clone());
        ops.push(k[i].clone());
        ops.push(DiffOp::multiplication(s[i].scale_re(0.5)));
    }
    ops.push(DiffOp::multiplication(dirac::hamiltonian(m).unwrap()));
    ops
}

fn zero_residual(op: &DiffOp, q: &Momentum) -> f64 {
    op.residual(&DiffOp::zero(), std::slice::from_ref(q)).unwrap().max_residual
}

fn comm(a: &DiffOp, b: &DiffOp, q: &Momentum) -> DiffOp {
    a.commutator(b).unwrap().reduce_order(std::slice::from_ref(q), 1e-12).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn jet_product_rule(q in momentum(), a in 0usize..16, b in 0usize..16) {
        let cat = Catalog::with_defaults(q.mass).unwrap().with_unitarity_samples(vec![q]);
        let fns: Vec<_> = OperatorName::ALL
            .iter()
            .flat_map(|&n| cat.operator(n).unwrap().components().into_iter().map(|c| c.a().clone()).collect::<Vec<_>>())
            .collect();
        let (f, g) = (&fns[a % fns.len()], &fns[b % fns.len()]);
        let (jf, jg) = (f.eval(&q).unwrap(), g.eval(&q).unwrap());
        let jfg = (f.clone() * g.clone()).eval(&q).unwrap();
        for k in 0..3 {
            let expected = jf.partial[k] * jg.value + jf.value * jg.partial[k];
            let scale = 1.0f64.max(expected.frobenius_norm());
            prop_assert!((jfg.partial[k] - expected).frobenius_norm() / scale < TOL);
        }
    }

    #[test]
    fn jacobi_identity(q in momentum(), a in 0usize..16, b in 0usize..16, c in 0usize..16) {
        let ops = pool(q.mass);
        let (a, b, c) = (&ops[a], &ops[b], &ops[c]);
        let sum = comm(a, &comm(b, c, &q), &q) + comm(b, &comm(c, a, &q), &q) + comm(c, &comm(a, b, &q), &q);
        prop_assert!(zero_residual(&sum, &q) < TOL);
    }

    #[test]
    fn composition_is_associative(q in momentum(), i in 0usize..3, j in 0usize..3, s in 0usize..3) {
        let x = dirac::position_x();
        let b = DiffOp::multiplication(dirac::sigma_vector()[s].clone() * dirac::hamiltonian(q.mass).unwrap());
        let left = x[i].compose(&b).unwrap().compose(&x[j]).unwrap();
        let right = x[i].compose(&b.compose(&x[j]).unwrap()).unwrap();
        prop_assert!(left.residual(&right, &[q]).unwrap().max_residual < TOL);
    }

    #[test]
    fn commutator_matches_composition(q in momentum(), a in 0usize..16, b in 0usize..16) {
        let ops = pool(q.mass);
        let (a, b) = (&ops[a], &ops[b]);
        let direct = a.commutator(b).unwrap();
        let composed = a.compose(b).unwrap() - b.compose(a).unwrap();
        prop_assert!(direct.residual(&composed, &[q]).unwrap().max_residual < TOL);
    }

    #[test]
    fn conjugation_preserves_commutators(q in momentum(), a in 0usize..16, b in 0usize..16) {
        let ops = pool(q.mass);
        let u = relspin::spincat::fw_unitary(q.mass).unwrap();
        let conj = |o: &DiffOp| o.conjugate(&u, Conjugation::Forward, &[q]).unwrap();
        let lhs = conj(&ops[a].commutator(&ops[b]).unwrap().reduce_order(&[q], 1e-12).unwrap());
        let rhs = conj(&ops[a]).commutator(&conj(&ops[b])).unwrap();
        prop_assert!(lhs.residual(&rhs, &[q]).unwrap().max_residual < TOL);
    }

    #[test]
    fn parity_is_an_involution(q in momentum(), a in 0usize..16) {
        let op = &pool(q.mass)[a];
        prop_assert!(op.parity().parity().residual(op, &[q]).unwrap().max_residual < 1e-14);
    }

    #[test]
    fn pl_square_is_fixed_by_mass(q in momentum()) {
        let m = q.mass;
        for mode in [PLMode::Definitional, PLMode::DiracClosed, PLMode::Kinematic] {
            let w = dirac::pl_vector(mode, m).unwrap();
            let mut sq = relspin::algebra::Mat4::zero();
            for mu in 0..4 {
                let v = w[mu].a().value(&q).unwrap();
                sq += (v * v) * dirac::METRIC[mu];
            }
            let target = relspin::algebra::Mat4::identity() * (-0.75 * m * m);
            let scale = 1.0f64.max(m * m) * q.energy() * q.energy() / (m * m);
            prop_assert!((sq - target).frobenius_norm() / scale < TOL, "{mode:?}");
        }
    }

    #[test]
    fn boost_round_trip(p in prop::array::uniform3(-20.0f64..20.0), m in 0.3f64..3.0, w in prop::array::uniform4(-5.0f64..5.0)) {
        let fwd = dirac::boost_matrix(m, p).unwrap();
        let back = dirac::boost_matrix(m, p.map(|c| -c)).unwrap();
        let out = back.apply(&fwd.apply(&w));
        let gamma2 = 1.0 + p.iter().map(|c| c * c).sum::<f64>() / (m * m);
        for mu in 0..4 {
            prop_assert!((out[mu] - w[mu]).abs() < 1e-12 * gamma2 * (1.0 + w[mu].abs()).max(5.0));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn raising_tolerance_never_breaks_a_pass(seed in any::<u64>(), exp in 11i32..14) {
        let sampling = SampleConfig { count: 5, seed, ..SampleConfig::default() };
        let tight = run_suite(&CheckConfig { sampling, tolerance: 10f64.powi(-exp) }, None).unwrap();
        let loose = run_suite(&CheckConfig { sampling, tolerance: 10f64.powi(-exp + 3) }, None).unwrap();
        for (a, b) in tight.checks.iter().zip(&loose.checks) {
            prop_assert_eq!(&a.id, &b.id);
            if a.kind != Kind::Distinctness && a.pass {
                prop_assert!(b.pass, "{} passed at the tight tolerance only", a.id);
            }
        }
    }

    #[test]
    fn suite_is_reproducible_per_seed(seed in any::<u64>()) {
        let cfg = CheckConfig { sampling: SampleConfig { count: 5, seed, ..SampleConfig::default() }, ..CheckConfig::default() };
        let a = run_suite(&cfg, Some("SU2_*")).unwrap();
        let b = run_suite(&cfg, Some("SU2_*")).unwrap();
        prop_assert_eq!(a.checks.len(), 4);
        for (x, y) in a.checks.iter().zip(&b.checks) {
            prop_assert_eq!(x.max_residual.to_bits(), y.max_residual.to_bits());
            prop_assert_eq!(x.worst_sample, y.worst_sample);
        }
    }
}

/// The sign of K fixes the sign of [Kⁱ,Pʲ]: each convention closes with its
/// own constant and fails with the other.
#[test]
fn boost_sign_fixes_poincare_constants() {
    let m = 1.0;
    let q = Momentum::new([0.3, -0.7, 1.1], m).unwrap();
    let p = dirac::momentum_op();
    let h = DiffOp::multiplication(dirac::hamiltonian(m).unwrap());
    let minus = dirac::boost_generator(m, KSign::Minus).unwrap();
    let plus = dirac::boost_generator(m, KSign::Plus).unwrap();
    assert!(plus[0].residual(&(-minus[0].clone()), &[q]).unwrap().max_residual < 1e-14);
    for (k, s) in [(&minus, KSign::Minus), (&plus, KSign::Plus)] {
        let c = k[1].commutator(&p[1]).unwrap();
        let own = h.scale(I * s.factor());
        let other = h.scale(I * s.flipped().factor());
        assert!(c.residual(&own, &[q]).unwrap().max_residual < 1e-12, "{s}");
        assert!(c.residual(&other, &[q]).unwrap().max_residual > 1.0, "{s}");
    }
}

/// Doubling the grid leaves ⟨x⟩(t_max) unchanged to 1e-6. Rows are evolved
/// exactly from ψ(0), so fewer steps give the same final row.
#[test]
fn zbw_grid_refinement() {
    let coarse = ZbwConfig { n_steps: 10, ..ZbwConfig::default() };
    let fine = ZbwConfig { n: 2 * coarse.n, ..coarse };
    let a = run_zbw(&coarse).unwrap();
    let b = run_zbw(&fine).unwrap();
    let (ra, rb) = (a.rows.last().unwrap(), b.rows.last().unwrap());
    assert_eq!(ra.t, coarse.t_max);
    let diff = (ra.x_dirac - rb.x_dirac).abs();
    assert!(diff < 1e-6, "grid refinement changed <x>(t_max) by {diff:e}");
}
