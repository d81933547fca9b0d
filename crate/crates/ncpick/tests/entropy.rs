mod common;

use common::*;
use ncpick::entropy::{self, ExtremeVerdict, OuterVerdict};
use ncpick::fock::{self, FockTruncation, MultiAnalyticSymbol};
use ncpick::toeplitz::{self, MultiToeplitzOperator};
use ncpick::{linalg, CMat, Word};

/// `K_θ + I`, strictly positive.
fn positive_toeplitz(seed: u64, n: usize, d: usize, m: usize) -> MultiToeplitzOperator {
    let mut r = rng(seed);
    let th = symbol(&mut r, n, d, d, 2);
    let mut k = toeplitz::kernel_coefficients(&th, m).unwrap();
    let k0 = k.at_zero() + linalg::eye(d);
    k.set(&Word::identity(n), k0).unwrap();
    MultiToeplitzOperator::from_coeffs(&FockTruncation::new(n, m, d).unwrap(), &k).unwrap()
}

fn scalar_defect(f: &MultiAnalyticSymbol, m: usize) -> MultiToeplitzOperator {
    MultiToeplitzOperator::defect_of(f, &FockTruncation::new(f.n(), m, 1).unwrap(), 1.0).unwrap()
}

#[test]
fn szego_infimum_of_identity() {
    let t = MultiToeplitzOperator::identity(&FockTruncation::new(2, 3, 2).unwrap()).unwrap();
    assert!(close(&entropy::szego_infimum(&t).unwrap(), &linalg::eye(2)) < 1e-15);
}

#[test]
fn szego_infimum_of_constant_defect() {
    let cv = c(0.3, 0.4);
    let f = MultiAnalyticSymbol::constant(2, s(cv)).unwrap();
    let d = entropy::szego_infimum(&scalar_defect(&f, 3)).unwrap();
    assert!((d[(0, 0)].re - (1.0 - cv.norm_sqr())).abs() < 1e-15);
}

#[test]
fn half_z_matches_quadrature() {
    let f = scalar_poly(&[c(0.0, 0.0), c(0.5, 0.0)]);
    let rep = entropy::prediction_entropy(&scalar_defect(&f, 16)).unwrap();
    assert!((rep.entropy - 0.75f64.ln()).abs() < 1e-12);
    assert!((rep.entropy - szego_quadrature(&f, 1.0, 512)).abs() < 1e-10);
}

#[test]
fn entropy_of_scaled_identity() {
    let tr = FockTruncation::new(2, 2, 3).unwrap();
    let k = MultiAnalyticSymbol::constant(2, linalg::eye(3) * c(2.5, 0.0)).unwrap();
    let rep =
        entropy::prediction_entropy(&MultiToeplitzOperator::from_coeffs(&tr, &k).unwrap()).unwrap();
    assert!((rep.entropy - 3.0 * 2.5f64.ln()).abs() < 1e-13);
    assert_eq!(rep.monotonicity_gap, 0.0);
}

#[test]
fn dual_formula_on_positive_operators() {
    for seed in 0..4 {
        let t = positive_toeplitz(seed, 2, 2, 3);
        let e = entropy::prediction_entropy(&t).unwrap().entropy;
        assert!((e - entropy::inverse_entropy(&t).unwrap()).abs() < 1e-10);
    }
}

#[test]
fn singular_prediction_error_gives_minus_infinity() {
    let f = scalar_poly(&[c(0.0, 0.0), c(1.0, 0.0)]);
    let rep = entropy::prediction_entropy(&scalar_defect(&f, 4)).unwrap();
    assert_eq!(rep.entropy, f64::NEG_INFINITY);
}

#[test]
fn non_psd_operator_is_rejected() {
    let tr = FockTruncation::new(1, 2, 1).unwrap();
    let k = MultiAnalyticSymbol::constant(1, s(c(-1.0, 0.0))).unwrap();
    let t = MultiToeplitzOperator::from_coeffs(&tr, &k).unwrap();
    assert!(entropy::szego_infimum(&t).is_err());
}

#[test]
fn contraction_entropy_of_constant() {
    let cv = c(-0.2, 0.6);
    let f = MultiAnalyticSymbol::constant(2, s(cv)).unwrap();
    let rep = entropy::entropy_of_contraction(&f, 1.0, 3).unwrap();
    assert!((rep.entropy - (1.0 - cv.norm_sqr()).ln()).abs() < 1e-14);
}

#[test]
fn contraction_entropy_matches_quadrature() {
    let f = scalar_poly(&[c(0.3, 0.1), c(-0.2, 0.2), c(0.1, 0.0)]);
    let rep = entropy::entropy_of_contraction(&f, 1.0, 64).unwrap();
    assert!((rep.entropy - szego_quadrature(&f, 1.0, 2048)).abs() < 1e-8);
}

#[test]
fn inner_contraction_has_minus_infinite_entropy() {
    let s1 =
        MultiAnalyticSymbol::from_pairs(2, 1, 1, &[(Word::letter(2, 1).unwrap(), s(c(1.0, 0.0)))])
            .unwrap();
    assert_eq!(
        entropy::entropy_of_contraction(&s1, 1.0, 3)
            .unwrap()
            .entropy,
        f64::NEG_INFINITY
    );
}

#[test]
fn contraction_beyond_t_is_infeasible() {
    let f = MultiAnalyticSymbol::constant(1, s(c(1.5, 0.0))).unwrap();
    assert!(matches!(
        entropy::entropy_of_contraction(&f, 1.0, 2),
        Err(ncpick::Error::Infeasible { .. })
    ));
}

#[test]
fn rational_entropy_agrees_with_polynomial_route() {
    let f = scalar_poly(&[c(0.2, 0.0), c(0.3, -0.1)]);
    let real = ncpick::series::Realization::from_polynomial(&f).unwrap();
    let a = entropy::entropy_of_rational(&real, 1.0, 12).unwrap();
    let b = entropy::entropy_of_contraction(&f, 1.0, 12).unwrap();
    assert!((a.entropy - b.entropy).abs() < 1e-13);
}

#[test]
fn outer_factor_of_identity() {
    let t = MultiToeplitzOperator::identity(&FockTruncation::new(2, 3, 2).unwrap()).unwrap();
    let of = entropy::square_outer_factor(&t).unwrap();
    let coeffs = of.coefficients(3).unwrap();
    assert!(close(coeffs.at_zero(), &linalg::eye(2)) < 1e-14);
    assert!(coeffs.coeffs()[1..]
        .iter()
        .all(|m| linalg::max_abs(m) < 1e-14));
}

#[test]
fn outer_factor_recovers_one_plus_half_z() {
    let f = scalar_poly(&[c(1.0, 0.0), c(0.5, 0.0)]);
    let t = toeplitz::kernel_from_symbol(&f, &FockTruncation::new(1, 30, 1).unwrap()).unwrap();
    let of = entropy::square_outer_factor(&t).unwrap();
    let coeffs = of.coefficients(4).unwrap();
    let want = [1.0, 0.5, 0.0, 0.0, 0.0];
    for (k, w) in want.iter().enumerate() {
        assert!(
            (coeffs.coeff(k)[(0, 0)] - c(*w, 0.0)).norm() < 1e-8,
            "coefficient {k}"
        );
    }
}

#[test]
fn outer_factor_residual_and_entropy_equality() {
    for seed in 10..14 {
        let t = positive_toeplitz(seed, 2, 2, 4);
        let of = entropy::square_outer_factor(&t).unwrap();
        assert!(of.residual(&t).unwrap() < 1e-9);
        let p0 = of.at_zero();
        let e = entropy::prediction_entropy(&t).unwrap().entropy;
        assert!((e - entropy::ln_det(&(p0.adjoint() * p0), 1.0)).abs() < 1e-9);
    }
}

#[test]
fn outer_factor_needs_strict_positivity() {
    let f = scalar_poly(&[c(0.0, 0.0), c(1.0, 0.0)]);
    assert!(matches!(
        entropy::square_outer_factor(&scalar_defect(&f, 3)),
        Err(ncpick::Error::Infeasible { .. })
    ));
}

#[test]
fn outerness_examples() {
    let f = scalar_poly(&[c(1.0, 0.0), c(0.5, 0.0)]);
    assert_eq!(
        entropy::check_outer(&f, 40, 1e-6).unwrap().verdict,
        OuterVerdict::Outer
    );
    let z = scalar_poly(&[c(0.0, 0.0), c(1.0, 0.0)]);
    assert_eq!(
        entropy::check_outer(&z, 10, 1e-6).unwrap().verdict,
        OuterVerdict::NotOuter
    );
    let g = scalar_poly(&[c(0.5, 0.0), c(0.5, 0.0)]);
    let chk = entropy::check_outer(&g, 400, 5e-3).unwrap();
    assert_eq!(chk.verdict, OuterVerdict::Outer);
    assert!((chk.ln_det_zero - 0.25f64.ln()).abs() < 1e-14);
    assert!(chk.entropy >= chk.ln_det_zero);
}

#[test]
fn inner_multiple_is_not_outer() {
    let f = scalar_poly(&[c(0.5, 0.0), c(1.0, 0.0)]);
    let chk = entropy::check_outer(&f, 60, 1e-6).unwrap();
    assert_ne!(chk.verdict, OuterVerdict::Outer);
    assert!((chk.entropy - 0.0).abs() < 1e-10);
}

#[test]
fn inequality_examples() {
    let cv = c(0.4, 0.3);
    let chk = entropy::entropy_inequality_check(
        &MultiAnalyticSymbol::constant(2, s(cv)).unwrap(),
        3,
        1e-10,
    )
    .unwrap();
    assert!(chk.holds && chk.leading_degree == 0);
    assert!((chk.delta[(0, 0)].re - cv.norm_sqr()).abs() < 1e-14);
    let z = scalar_poly(&[c(0.0, 0.0), c(1.0, 0.0)]);
    let chk = entropy::entropy_inequality_check(&z, 6, 1e-10).unwrap();
    assert!(chk.holds && chk.leading_degree == 1);
    assert!((chk.delta[(0, 0)].re - 1.0).abs() < 1e-12);
    let zero = MultiAnalyticSymbol::zero(1, 1, 1, 2).unwrap();
    assert!(entropy::entropy_inequality_check(&zero, 2, 1e-10).is_err());
}

#[test]
fn inequality_on_random_symbols() {
    let mut r = rng(30);
    for _ in 0..5 {
        let th = symbol(&mut r, 2, 2, 2, 2);
        let chk = entropy::entropy_inequality_check(&th, 3, 1e-10).unwrap();
        assert!(chk.holds, "λ_min = {}", chk.min_eigenvalue);
    }
}

#[test]
fn extreme_point_examples() {
    let s1 = scalar_poly(&[c(0.0, 0.0), c(1.0, 0.0)]);
    assert_eq!(
        entropy::extreme_point_certificate(&s1, 1.0, 6, 1e-10)
            .unwrap()
            .verdict,
        ExtremeVerdict::Extreme
    );
    let zero = MultiAnalyticSymbol::zero(2, 1, 1, 1).unwrap();
    let cert = entropy::extreme_point_certificate(&zero, 1.0, 3, 1e-10).unwrap();
    assert_eq!(cert.verdict, ExtremeVerdict::Inconclusive);
    assert!((cert.norm - 1.0).abs() < 1e-14);
    let one = MultiAnalyticSymbol::constant(2, s(c(1.0, 0.0))).unwrap();
    assert_eq!(
        entropy::extreme_point_certificate(&one, 1.0, 3, 1e-10)
            .unwrap()
            .verdict,
        ExtremeVerdict::Extreme
    );
}

#[test]
fn infimum_decreases_with_degree() {
    let t = positive_toeplitz(40, 2, 2, 5);
    let deltas: Vec<CMat> = (0..=5)
        .map(|m| entropy::szego_infimum(&t.at_degree(m).unwrap()).unwrap())
        .collect();
    for w in deltas.windows(2) {
        assert!(linalg::lambda_min(&(&w[0] - &w[1])) > -1e-12);
    }
    let rep = entropy::prediction_entropy(&t).unwrap();
    assert!(rep.monotonicity_gap >= -1e-12);
}

#[test]
fn minimum_energy_delay() {
    let mut r = rng(50);
    let phi = symbol(&mut r, 2, 1, 1, 1);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let isometry = MultiAnalyticSymbol::from_pairs(
        2,
        1,
        1,
        &[
            (Word::letter(2, 1).unwrap(), s(c(h, 0.0))),
            (Word::letter(2, 2).unwrap(), s(c(0.0, h))),
        ],
    )
    .unwrap();
    let delayed = isometry.mul(&phi, 2).unwrap();
    let k = 3;
    let tr = FockTruncation::new(2, k, 1).unwrap();
    let mp = fock::assemble(&phi, &tr).unwrap();
    let md = fock::assemble(&delayed, &tr).unwrap();
    for _ in 0..20 {
        let p = mat(&mut r, tr.total_dim(), 1);
        for j in 0..=k {
            let pj = fock::degree_projection(&tr, j).unwrap();
            assert!((&pj * &md * &p).norm() <= (&pj * &mp * &p).norm() + 1e-12);
        }
    }
}

#[test]
fn entropy_is_invariant_under_constant_unitaries() {
    let mut r = rng(60);
    let th = symbol(&mut r, 2, 2, 2, 1).scale(c(0.2, 0.0));
    let u = mat(&mut r, 2, 2).qr().q();
    let e1 = entropy::entropy_of_contraction(&th, 1.0, 3).unwrap();
    let e2 = entropy::entropy_of_contraction(&th.left_mul(&u).unwrap(), 1.0, 3).unwrap();
    assert!((e1.entropy - e2.entropy).abs() < 1e-12);
}
