#![allow(dead_code)]

use ncpick::fock::MultiAnalyticSymbol;
use ncpick::series::Realization;
use ncpick::{CMat, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn cplx(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

pub fn mat(rng: &mut ChaCha8Rng, r: usize, c: usize) -> CMat {
    CMat::from_fn(r, c, |_, _| cplx(rng))
}

/// Uniform direction scaled to a radius drawn from `[lo, hi]`.
pub fn ball_point(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Vec<C64> {
    let v: Vec<C64> = (0..n).map(|_| cplx(rng)).collect();
    let nrm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let r = rng.random_range(lo..hi);
    v.into_iter().map(|z| z * (r / nrm)).collect()
}

pub fn symbol(
    rng: &mut ChaCha8Rng,
    n: usize,
    d_out: usize,
    d_in: usize,
    degree: usize,
) -> MultiAnalyticSymbol {
    let len = ncpick::GradedIndex::new(n, degree).unwrap().len();
    let coeffs = (0..len).map(|_| mat(rng, d_out, d_in)).collect();
    MultiAnalyticSymbol::from_dense(n, d_out, d_in, degree, coeffs).unwrap()
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn s(z: C64) -> CMat {
    CMat::from_element(1, 1, z)
}

pub fn close(a: &CMat, b: &CMat) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn scalar_poly(coeffs: &[C64]) -> MultiAnalyticSymbol {
    let pairs: Vec<_> = coeffs
        .iter()
        .enumerate()
        .map(|(k, &v)| (ncpick::Word::new(1, vec![1; k]).unwrap(), s(v)))
        .collect();
    MultiAnalyticSymbol::from_pairs(1, 1, 1, &pairs).unwrap()
}

/// `(z − a)/(1 − ā z)`.
pub fn blaschke(a: C64) -> Realization {
    Realization::new(
        s(-a),
        s(c(1.0, 0.0)),
        vec![s(a.conj())],
        vec![s(c(1.0 - a.norm_sqr(), 0.0))],
    )
    .unwrap()
}

/// Largest modulus of a scalar n = 1 realization on `nodes` equispaced points of the circle.
pub fn circle_sup(r: &Realization, nodes: usize) -> f64 {
    (0..nodes)
        .map(|k| {
            let z = C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / nodes as f64);
            r.eval_point(&[z]).unwrap()[(0, 0)].norm()
        })
        .fold(0.0, f64::max)
}

/// `(1/2π) ∫ ln(1 − |f|²/t²) + ln t²` by the trapezoid rule.
pub fn szego_quadrature(f: &MultiAnalyticSymbol, t: f64, nodes: usize) -> f64 {
    let sum: f64 = (0..nodes)
        .map(|k| {
            let z = C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / nodes as f64);
            (t * t - f.evaluate_commutative(&[z]).unwrap()[(0, 0)].norm_sqr()).ln()
        })
        .sum();
    sum / nodes as f64
}
