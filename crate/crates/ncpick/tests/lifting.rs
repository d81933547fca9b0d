mod common;

use common::*;
use ncpick::entropy;
use ncpick::fock::{self, FockTruncation, MultiAnalyticSymbol};
use ncpick::interpolate::cs::{self, CSProblem};
use ncpick::interpolate::np::{self, NPProblem};
use ncpick::interpolate::sarason::{self, HSpec};
use ncpick::lifting::{self, LiftingContext};
use ncpick::series::Realization;
use ncpick::{linalg, CMat};

fn zero_context(n: usize, m: usize, d: usize, t: f64) -> LiftingContext {
    let dom = FockTruncation::new(n, m, d).unwrap();
    let tgt = FockTruncation::new(n, m, 1).unwrap();
    let q = linalg::eye(tgt.total_dim());
    let a = CMat::zeros(tgt.total_dim(), dom.total_dim());
    LiftingContext::new(dom, tgt, q, a, t).unwrap()
}

fn random_cs_context(seed: u64, ratio: f64) -> LiftingContext {
    let mut r = rng(seed);
    let q = symbol(&mut r, 2, 1, 1, 2);
    let t = ratio * cs::cs_distance(&CSProblem::new(q.clone())).unwrap();
    sarason::sarason_context(&HSpec::DegreeCutoff { degree: 2 }, &q, t).unwrap()
}

#[test]
fn defect_of_zero_is_t_squared() {
    let tr = FockTruncation::new(2, 2, 2).unwrap();
    let d = lifting::schur_defect(&CMat::zeros(5, tr.total_dim()), &tr, 1.5).unwrap();
    assert!(close(&d, &(linalg::eye(2) * ncpick::C64::new(2.25, 0.0))) < 1e-15);
}

#[test]
fn defect_of_constant_multiplier() {
    let mut r = rng(1);
    let cm = mat(&mut r, 2, 2) * c(0.3, 0.0);
    let tr = FockTruncation::new(2, 2, 2).unwrap();
    let x = fock::assemble(&MultiAnalyticSymbol::constant(2, cm.clone()).unwrap(), &tr).unwrap();
    let d = lifting::schur_defect(&x, &tr, 1.0).unwrap();
    assert!(close(&d, &(linalg::eye(2) - cm.adjoint() * &cm)) < 1e-14);
}

#[test]
fn defect_rejects_large_operators() {
    let tr = FockTruncation::new(1, 1, 1).unwrap();
    let x = linalg::eye(2) * c(2.0, 0.0);
    assert!(matches!(
        lifting::schur_defect(&x, &tr, 1.0),
        Err(ncpick::Error::Infeasible { .. })
    ));
}

#[test]
fn defect_of_central_lifting_equals_delta_of_a() {
    let ctx = random_cs_context(2, 1.3);
    let bc = ctx.central_realization().unwrap();
    let m = 8;
    let rep = entropy::entropy_of_rational(&bc, ctx.t(), m).unwrap();
    assert!(close(&rep.delta, &ctx.delta().unwrap()) < 1e-8);
}

#[test]
fn xa_of_zero_context_is_the_shift() {
    let ctx = zero_context(2, 3, 1, 1.0);
    let xa = lifting::xa_operators(&ctx).unwrap();
    for (i, xs) in xa.adjoints.iter().enumerate() {
        let si = fock::left_creation(ctx.domain(), i + 1).unwrap();
        assert!(close(xs, &si.adjoint()) < 1e-14);
    }
}

#[test]
fn xa_residuals_on_random_contexts() {
    for seed in 0..4 {
        let ctx = random_cs_context(10 + seed, 1.2);
        let xa = lifting::xa_operators(&ctx).unwrap();
        assert!(lifting::similarity_residual(&ctx, &xa).unwrap() < 1e-10);
        assert!(lifting::annihilation_residual(&ctx, &xa).unwrap() < 1e-10);
    }
}

#[test]
fn xa_powers_decay() {
    let ctx = random_cs_context(20, 1.5);
    let xa = lifting::xa_operators(&ctx).unwrap();
    let norms = xa.power_norms(8);
    assert!(norms[8] < 1e-4 * norms[2], "{norms:?}");
    assert!(norms[2..].windows(2).all(|w| w[1] < w[0]), "{norms:?}");
}

#[test]
fn xa_needs_strict_context() {
    let mut r = rng(21);
    let q = symbol(&mut r, 2, 1, 1, 1);
    let t = cs::cs_distance(&CSProblem::new(q.clone())).unwrap();
    let ctx = sarason::sarason_context(&HSpec::DegreeCutoff { degree: 1 }, &q, t * 0.9).unwrap();
    assert!(matches!(
        lifting::xa_operators(&ctx),
        Err(ncpick::Error::Infeasible { .. })
    ));
}

#[test]
fn central_coefficients_of_zero_context() {
    let ctx = zero_context(2, 2, 1, 1.0);
    let bc = lifting::central_coefficients(&ctx, 4).unwrap();
    assert!(bc.is_zero() || bc.coeffs().iter().all(|m| linalg::max_abs(m) < 1e-15));
}

#[test]
fn central_coefficients_of_single_point_are_constant() {
    let cv = c(0.4, -0.3);
    let p = NPProblem::ball(
        vec![vec![c(0.0, 0.0)]],
        vec![s(c(1.0, 0.0))],
        vec![s(cv)],
        1.0,
    )
    .unwrap();
    let r = np::polynomial_interpolant(&p).unwrap();
    let ctx = sarason::sarason_context(&HSpec::from_ball(&p, 4).unwrap(), &r, 1.0).unwrap();
    let bc = lifting::central_coefficients(&ctx, 4).unwrap();
    assert!((bc.at_zero()[(0, 0)] - cv).norm() < 1e-12);
    assert!(bc.coeffs()[1..].iter().all(|m| linalg::max_abs(m) < 1e-12));
    let phi = lifting::defect_outer_factor(&ctx).unwrap();
    let coeffs = phi.coefficients(4).unwrap();
    assert!((coeffs.at_zero()[(0, 0)].re - (1.0 - cv.norm_sqr()).sqrt()).abs() < 1e-12);
    assert!(coeffs.coeffs()[1..]
        .iter()
        .all(|m| linalg::max_abs(m) < 1e-12));
}

#[test]
fn defect_factor_of_zero_context() {
    let ctx = zero_context(2, 2, 2, 0.7);
    let phi = lifting::defect_outer_factor(&ctx).unwrap();
    let coeffs = phi.coefficients(3).unwrap();
    assert!(close(coeffs.at_zero(), &(linalg::eye(2) * c(0.7, 0.0))) < 1e-14);
    assert!(coeffs.coeffs()[1..]
        .iter()
        .all(|m| linalg::max_abs(m) < 1e-14));
}

#[test]
fn defect_factor_on_random_contexts() {
    for seed in 0..4 {
        let ctx = random_cs_context(30 + seed, 1.25);
        let phi = lifting::defect_outer_factor(&ctx).unwrap();
        let p0 = phi.at_zero();
        assert!(close(&(p0.adjoint() * p0), &ctx.delta().unwrap()) < 1e-10);
        assert!(lifting::defect_factor_residual(&ctx, &phi, 6).unwrap() < 1e-8);
    }
}

#[test]
fn central_entropy_is_inverse_corner() {
    let ctx = random_cs_context(40, 1.4);
    let dsq = ctx.defect_square();
    let d = ctx.domain().d;
    let inv = linalg::inverse(&dsq).unwrap();
    let corner = linalg::block(&inv, 0, 0, d, d);
    let lhs = entropy::ln_det(&ctx.delta().unwrap(), 1.0);
    assert!((lhs + entropy::ln_det(&linalg::herm(&corner), 1.0)).abs() < 1e-10);
}

#[test]
fn maximum_principle_on_a_two_point_problem() {
    let p = NPProblem::ball(
        vec![vec![c(0.2, 0.1)], vec![c(-0.3, 0.4)]],
        vec![s(c(1.0, 0.0)), s(c(1.0, 0.0))],
        vec![s(c(0.3, 0.0)), s(c(-0.1, 0.2))],
        1.0,
    )
    .unwrap();
    let central = np::np_central(&p).unwrap();
    let bc = central.realization().unwrap();
    let dc = central.delta().unwrap()[(0, 0)].re;
    let inner = blaschke(c(0.2, 0.1))
        .product(&blaschke(c(-0.3, 0.4)))
        .unwrap();
    let headroom = 1.0 - circle_sup(&bc, 1024);
    let mut r = rng(50);
    for _ in 0..5 {
        let g = Realization::from_polynomial(&scalar_poly(&[cplx(&mut r), cplx(&mut r)])).unwrap();
        let bump = inner.product(&g).unwrap();
        let eps = 0.9 * headroom / circle_sup(&bump, 1024);
        let alt = bc.sum(&bump.scale_left(&s(c(eps, 0.0))).unwrap()).unwrap();
        let da = entropy::entropy_of_rational(&alt, 1.0, 60).unwrap().delta[(0, 0)].re;
        assert!(da <= dc + 1e-10, "{da} > {dc}");
    }
}
