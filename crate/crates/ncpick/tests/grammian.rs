mod common;

use common::*;
use ncpick::fock::MultiAnalyticSymbol;
use ncpick::grammian::{self, OperatorTuple};
use ncpick::interpolate::np;
use ncpick::{linalg, CMat, Word, C64};

#[test]
fn spectral_radius_examples() {
    let z = OperatorTuple::new(vec![CMat::zeros(2, 2), CMat::zeros(2, 2)]).unwrap();
    assert_eq!(grammian::spectral_radius(&z, 1e-12, 500).estimate, 0.0);
    let z = OperatorTuple::new(vec![s(c(0.5, 0.0))]).unwrap();
    assert!((grammian::spectral_radius(&z, 1e-12, 500).estimate - 0.5).abs() < 1e-12);
}

#[test]
fn spectral_radius_of_ball_tuple_is_largest_point_norm() {
    let mut r = rng(20);
    let points: Vec<Vec<C64>> = (0..4).map(|_| ball_point(&mut r, 3, 0.1, 0.9)).collect();
    let z = OperatorTuple::from_ball_points(&points, &[1, 2, 1, 1]).unwrap();
    let want = points
        .iter()
        .map(|p| p.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    let got = grammian::spectral_radius(&z, 1e-13, 2000);
    assert!(got.converged);
    assert!(
        (got.estimate - want).abs() < 1e-6,
        "{} vs {want}",
        got.estimate
    );
}

#[test]
fn grammian_examples() {
    let mut r = rng(21);
    let cm = mat(&mut r, 3, 2);
    let z = OperatorTuple::new(vec![CMat::zeros(3, 3)]).unwrap();
    let g = grammian::grammian(&z, &cm, 1e-14).unwrap().g;
    assert!(close(&g, &(&cm * cm.adjoint())) < 1e-15);
    let (zz, cc) = (c(0.3, 0.4), c(0.7, -0.1));
    let z = OperatorTuple::new(vec![s(zz)]).unwrap();
    let g = grammian::grammian(&z, &s(cc), 1e-15).unwrap();
    assert!((g.g[(0, 0)].re - cc.norm_sqr() / (1.0 - zz.norm_sqr())).abs() < 1e-14);
    assert!(grammian::grammian_residual(&z, &s(cc), &g.g) < 1e-14);
}

#[test]
fn grammian_diverges_outside_ball() {
    let z = OperatorTuple::new(vec![s(c(1.0, 0.0))]).unwrap();
    assert!(grammian::grammian(&z, &s(c(1.0, 0.0)), 1e-12).is_err());
}

#[test]
fn grammian_scales_quadratically() {
    let mut r = rng(22);
    let z = OperatorTuple::new((0..2).map(|_| mat(&mut r, 3, 3) * c(0.25, 0.0)).collect()).unwrap();
    let cm = mat(&mut r, 3, 1);
    let lam = c(0.3, -1.2);
    let g1 = grammian::grammian(&z, &cm, 1e-15).unwrap().g;
    let g2 = grammian::grammian(&z, &(&cm * lam), 1e-15).unwrap().g;
    assert!(close(&g2, &(g1 * c(lam.norm_sqr(), 0.0))) < 1e-12);
}

#[test]
fn ball_grammian_closed_form() {
    let mut r = rng(23);
    let points: Vec<Vec<C64>> = (0..3).map(|_| ball_point(&mut r, 2, 0.1, 0.8)).collect();
    let b: Vec<CMat> = (0..3).map(|j| mat(&mut r, j + 1, 2)).collect();
    let z = OperatorTuple::from_ball_points(&points, &[1, 2, 3]).unwrap();
    let g = grammian::grammian(&z, &linalg::vstack(&b), 1e-15)
        .unwrap()
        .g;
    let closed = np::ball_gram(&points, &b, &b);
    assert!(close(&g, &closed) < 1e-10 * linalg::max_abs(&closed));
}

#[test]
fn evaluation_examples() {
    let a0 = CMat::from_row_slice(1, 2, &[c(1.0, 2.0), c(-0.5, 0.0)]);
    let f = MultiAnalyticSymbol::constant(2, a0.clone()).unwrap();
    let z = OperatorTuple::new(vec![s(c(0.2, 0.0)), s(c(0.1, 0.1))]).unwrap();
    let v = grammian::evaluate_symbol(&f, &z, 1e-12).unwrap();
    assert!(close(&v.value, &a0) < 1e-15);
    let (a, b, zz) = (c(0.4, 0.0), c(0.0, 1.0), c(0.3, -0.2));
    let f = MultiAnalyticSymbol::from_pairs(
        1,
        1,
        1,
        &[
            (Word::identity(1), s(a)),
            (Word::letter(1, 1).unwrap(), s(b)),
        ],
    )
    .unwrap();
    let v =
        grammian::evaluate_symbol(&f, &OperatorTuple::new(vec![s(zz)]).unwrap(), 1e-12).unwrap();
    assert!((v.value[(0, 0)] - (a + zz * b)).norm() < 1e-15);
}

#[test]
fn diagonal_evaluation_is_pointwise() {
    let mut r = rng(24);
    let f = symbol(&mut r, 2, 1, 1, 3);
    let points: Vec<Vec<C64>> = (0..3).map(|_| ball_point(&mut r, 2, 0.1, 0.9)).collect();
    let z = OperatorTuple::from_ball_points(&points, &[1, 1, 1]).unwrap();
    let v = grammian::evaluate_symbol(&f, &z, 1e-12).unwrap().value;
    for (j, p) in points.iter().enumerate() {
        let want = f.evaluate_commutative(p).unwrap()[(0, 0)];
        assert!((v[(j, j)] - want).norm() < 1e-13);
    }
}

#[test]
fn evaluation_is_multiplicative_on_diagonal_tuples() {
    let mut r = rng(25);
    let f = symbol(&mut r, 2, 1, 1, 2);
    let g = symbol(&mut r, 2, 1, 1, 2);
    let points: Vec<Vec<C64>> = (0..2).map(|_| ball_point(&mut r, 2, 0.1, 0.8)).collect();
    let z = OperatorTuple::from_ball_points(&points, &[1, 1]).unwrap();
    let fg = f.mul(&g, 4).unwrap();
    let ev = |h: &MultiAnalyticSymbol| grammian::evaluate_symbol(h, &z, 1e-12).unwrap().value;
    assert!(close(&ev(&fg), &(ev(&f) * ev(&g))) < 1e-13);
}
