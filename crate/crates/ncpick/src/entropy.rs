//! Prediction entropy, Szegő infima and square outer spectral factors.
//!
//! All Schur complements here are taken with respect to the splitting
//! `(1 ⊗ E) ⊕ (higher degrees)` of a truncated Fock space. Entropies of
//! multi-analytic symbols use the compression `P_m (t²I − M_θ*M_θ) P_m` of the
//! untruncated operator, which is multi-Toeplitz with kernel `t²δ − K_θ`.

use crate::error::{Error, Result};
use crate::fock::{FockTruncation, MultiAnalyticSymbol};
use crate::linalg::{self, CMat, C64};
use crate::series::Realization;
use crate::toeplitz::{self, MultiToeplitzOperator};

/// Relative cutoff for pseudo-inverses in Schur complements.
pub const PINV_CUTOFF: f64 = 1e-12;

/// Per-dimension determinant scale under which the entropy is reported as −∞.
pub const SINGULAR_DET: f64 = 1e-12;

/// Relative tolerance for the norm precondition `‖Θ‖ ≤ t`.
const NORM_SLACK: f64 = 1e-9;

/// Stein tolerance for exact kernels of rational symbols.
pub(crate) const STEIN_TOL: f64 = 1e-15;

#[derive(Clone, Debug, PartialEq)]
pub struct EntropyReport {
    pub delta: CMat,
    /// `ln det delta`, or −∞ when delta is singular.
    pub entropy: f64,
    pub truncation_degree: usize,
    /// Entropy at degree m−1 minus entropy at degree m (0 when m = 0).
    pub monotonicity_gap: f64,
}

impl EntropyReport {
    pub(crate) fn from_pair(delta: CMat, prev: Option<&CMat>, m: usize, scale: f64) -> Self {
        let entropy = ln_det(&delta, scale);
        let monotonicity_gap = match prev {
            Some(p) => entropy_gap(ln_det(p, scale), entropy),
            None => 0.0,
        };
        EntropyReport {
            delta,
            entropy,
            truncation_degree: m,
            monotonicity_gap,
        }
    }
}

fn entropy_gap(prev: f64, cur: f64) -> f64 {
    if prev == f64::NEG_INFINITY && cur == f64::NEG_INFINITY {
        0.0
    } else {
        prev - cur
    }
}

/// `ln det` of a Hermitian PSD matrix with the −∞ convention.
pub fn ln_det(m: &CMat, scale: f64) -> f64 {
    let d = m.nrows();
    if d == 0 {
        return 0.0;
    }
    let vals = linalg::eigvalsh(m);
    let floor = (SINGULAR_DET * scale.max(1.0)).ln() * d as f64;
    if vals.iter().any(|&v| v <= 0.0) {
        return f64::NEG_INFINITY;
    }
    let s: f64 = vals.iter().map(|v| v.ln()).sum();
    if s < floor {
        f64::NEG_INFINITY
    } else {
        s
    }
}

/// Schur complement of a Hermitian PSD matrix onto its leading `d × d` block.
pub fn leading_schur(m: &CMat, d: usize) -> CMat {
    let n = m.nrows();
    let t00 = linalg::block(m, 0, 0, d, d);
    if n == d {
        return linalg::herm(&t00);
    }
    let t10 = linalg::block(m, d, 0, n - d, d);
    let t11 = linalg::block(m, d, d, n - d, n - d);
    let scale = linalg::norm_bound(m).max(1e-300);
    let sol = match well_conditioned_solve(&t11, &t10) {
        Some(x) => x,
        None => linalg::pinv_psd(&t11, PINV_CUTOFF * scale) * &t10,
    };
    linalg::herm(&(t00 - t10.adjoint() * sol))
}

fn well_conditioned_solve(a: &CMat, b: &CMat) -> Option<CMat> {
    let ch = linalg::herm(a).cholesky()?;
    let l = ch.l_dirty();
    let diag: Vec<f64> = (0..a.nrows()).map(|i| l[(i, i)].re).collect();
    let dmin = diag.iter().cloned().fold(f64::INFINITY, f64::min);
    let dmax = diag.iter().cloned().fold(0.0_f64, f64::max);
    if dmin > 1e-5 * dmax {
        Some(ch.solve(b))
    } else {
        None
    }
}

fn check_psd(m: &CMat) -> Result<()> {
    let (ok, lmin) = toeplitz::is_psd(m, toeplitz::PSD_TOL)?;
    if !ok {
        return Err(Error::arg(format!(
            "operator is not PSD (λ_min = {lmin:e})"
        )));
    }
    Ok(())
}

/// `Δ_T` at the truncation degree of `T`.
pub fn szego_infimum(t: &MultiToeplitzOperator) -> Result<CMat> {
    let m = t.matrix()?;
    check_psd(&m)?;
    Ok(leading_schur(&m, t.d()))
}

/// `e(T) = ln det Δ_T` with the gap to degree m−1.
pub fn prediction_entropy(t: &MultiToeplitzOperator) -> Result<EntropyReport> {
    let m = t.matrix()?;
    check_psd(&m)?;
    let scale = linalg::norm_bound(&m).max(1.0);
    let delta = leading_schur(&m, t.d());
    let deg = t.trunc().m;
    let prev = if deg > 0 {
        Some(szego_infimum(&t.at_degree(deg - 1)?)?)
    } else {
        None
    };
    Ok(EntropyReport::from_pair(delta, prev.as_ref(), deg, scale))
}

/// `P_E T^{-1}|E` for strictly positive T.
pub fn inverse_corner(t: &MultiToeplitzOperator) -> Result<CMat> {
    let m = t.matrix()?;
    let d = t.d();
    let mut rhs = linalg::zeros(m.nrows(), d);
    rhs.view_mut((0, 0), (d, d)).copy_from(&linalg::eye(d));
    let x = linalg::solve_hpd(&m, &rhs)
        .ok_or_else(|| Error::arg("operator is not strictly positive"))?;
    Ok(linalg::herm(&linalg::block(&x, 0, 0, d, d)))
}

/// `−ln det(P_E T^{-1}|E)`.
pub fn inverse_entropy(t: &MultiToeplitzOperator) -> Result<f64> {
    let c = inverse_corner(t)?;
    Ok(-ln_det(&c, 1.0))
}

/// `E(Θ) = e(t²I − Θ*Θ)` on words of length ≤ m, using the kernel of the untruncated operator.
pub fn entropy_of_contraction(
    theta: &MultiAnalyticSymbol,
    t: f64,
    m: usize,
) -> Result<EntropyReport> {
    let trunc = FockTruncation::new(theta.n(), m, theta.d_in())?;
    let defect = MultiToeplitzOperator::defect_of(theta, &trunc, t)?;
    defect_report(&defect, t)
}

/// Same as [`entropy_of_contraction`] for a rational symbol, with its exact kernel.
pub fn entropy_of_rational(theta: &Realization, t: f64, m: usize) -> Result<EntropyReport> {
    let k = theta.kernel(m, STEIN_TOL)?;
    let mut c = k.scale(C64::new(-1.0, 0.0));
    let d = theta.d_in();
    let mut c0 = c.at_zero().clone();
    c0 += linalg::eye(d).scale(t * t);
    c.set(&crate::words::Word::identity(theta.n()), c0)?;
    let trunc = FockTruncation::new(theta.n(), m, d)?;
    defect_report(&MultiToeplitzOperator::from_coeffs(&trunc, &c)?, t)
}

fn defect_report(defect: &MultiToeplitzOperator, t: f64) -> Result<EntropyReport> {
    let mat = defect.matrix()?;
    let lmin = linalg::lambda_min(&mat);
    if lmin < -NORM_SLACK * t * t {
        return Err(Error::Infeasible {
            reason: format!("symbol norm exceeds t = {t} at the truncation"),
            lambda_min: Some(lmin),
        });
    }
    let d = defect.d();
    let deg = defect.trunc().m;
    let delta = leading_schur(&mat, d);
    let prev = if deg > 0 {
        Some(leading_schur(&defect.at_degree(deg - 1)?.matrix()?, d))
    } else {
        None
    };
    Ok(EntropyReport::from_pair(
        delta,
        prev.as_ref(),
        deg,
        (t * t).max(1.0),
    ))
}

/// Entropy of `t²I − X*X` for an assembled matrix on a truncated domain.
pub fn entropy_of_contraction_matrix(
    x: &CMat,
    trunc: &FockTruncation,
    t: f64,
) -> Result<EntropyReport> {
    let delta = crate::lifting::schur_defect(x, trunc, t)?;
    Ok(EntropyReport::from_pair(
        delta,
        None,
        trunc.m,
        (t * t).max(1.0),
    ))
}

/// Square outer factor `φ = N ψ^{-1}` of a strictly positive multi-Toeplitz operator.
#[derive(Clone, Debug)]
pub struct OuterFactor {
    /// `ψ_β`, read from `T^{-1}(1 ⊗ E)` at Fock position `β̃`.
    pub psi: MultiAnalyticSymbol,
    /// `N = (P_E T^{-1}|E)^{1/2}`.
    pub norm_factor: CMat,
    pub realization: Realization,
    pub degree: usize,
}

impl OuterFactor {
    pub fn coefficients(&self, bound: usize) -> Result<MultiAnalyticSymbol> {
        self.realization.coefficients(bound)
    }

    pub fn at_zero(&self) -> &CMat {
        self.realization.feedthrough()
    }

    /// `max_{|α| ≤ m} ‖K_T(α) − K_φ(α)‖`: the residual of `T − M_φ*M_φ` on every block of degree ≤ m.
    pub fn residual(&self, t: &MultiToeplitzOperator) -> Result<f64> {
        kernel_residual(t.coeffs(), &self.realization, t.trunc().m)
    }
}

pub(crate) fn kernel_residual(
    target: &MultiAnalyticSymbol,
    r: &Realization,
    m: usize,
) -> Result<f64> {
    let k = r.kernel(m, STEIN_TOL)?;
    let mut worst = 0.0_f64;
    for (g, c) in k.coeffs().iter().enumerate() {
        let expect = if g < target.coeffs().len() {
            target.coeff(g).clone()
        } else {
            linalg::zeros(c.nrows(), c.ncols())
        };
        worst = worst.max(linalg::op_norm(&(c - expect)));
    }
    Ok(worst)
}

pub fn square_outer_factor(t: &MultiToeplitzOperator) -> Result<OuterFactor> {
    let m = t.matrix()?;
    let d = t.d();
    let scale = linalg::norm_bound(&m).max(1e-300);
    let lmin = linalg::lambda_min(&m);
    if lmin <= 1e-12 * scale {
        return Err(Error::Infeasible {
            reason: "operator is not strictly positive".into(),
            lambda_min: Some(lmin),
        });
    }
    let mut rhs = linalg::zeros(m.nrows(), d);
    rhs.view_mut((0, 0), (d, d)).copy_from(&linalg::eye(d));
    let cols = linalg::solve_hpd(&m, &rhs)
        .or_else(|| linalg::solve(&m, &rhs))
        .ok_or_else(|| Error::Numerical("Toeplitz solve failed".into()))?;
    let trunc = t.trunc();
    let ix = trunc.index();
    let coeffs: Vec<CMat> = (0..ix.len())
        .map(|b| linalg::block(&cols, ix.reverse(b) * d, 0, d, d))
        .collect();
    let mut psi = MultiAnalyticSymbol::from_dense(trunc.n, d, d, trunc.m, coeffs)?;
    let psi0 = linalg::herm(psi.at_zero());
    psi.set(&crate::words::Word::identity(trunc.n), psi0.clone())?;
    let norm_factor = linalg::psd_sqrt(&psi0);
    let realization = Realization::from_polynomial(&psi)?
        .inverse()?
        .scale_left(&norm_factor)?;
    Ok(OuterFactor {
        psi,
        norm_factor,
        realization,
        degree: trunc.m,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OuterVerdict {
    Outer,
    NotOuter,
    Undecided,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OuterCheck {
    pub verdict: OuterVerdict,
    /// `e(K_θ)` at degree m (an upper bound for the limit).
    pub entropy: f64,
    /// `ln det θ(0)*θ(0)` (a lower bound for the limit).
    pub ln_det_zero: f64,
    pub monotonicity_gap: f64,
    pub degree: usize,
}

/// Outerness test: `e(K_θ)` decreases in m towards a limit bounded below by `ln det θ(0)*θ(0)`.
pub fn check_outer(theta: &MultiAnalyticSymbol, m: usize, tol: f64) -> Result<OuterCheck> {
    if theta.d_in() != theta.d_out() {
        return Err(Error::arg("outerness is tested for square symbols"));
    }
    let d = theta.d_in();
    let t0 = theta.at_zero();
    let g0 = t0.adjoint() * t0;
    let ln_det_zero = ln_det(&g0, 1.0);
    let trunc = FockTruncation::new(theta.n(), m, d)?;
    let k = toeplitz::kernel_from_symbol(theta, &trunc)?;
    let mat = k.matrix()?;
    let scale = linalg::norm_bound(&mat).max(1.0);
    let delta = leading_schur(&mat, d);
    let prev = if m > 0 {
        Some(leading_schur(&k.at_degree(m - 1)?.matrix()?, d))
    } else {
        None
    };
    let rep = EntropyReport::from_pair(delta, prev.as_ref(), m, scale);
    let invertible = linalg::inverse(t0).is_some() && ln_det_zero > f64::NEG_INFINITY;
    let verdict = if !invertible {
        OuterVerdict::NotOuter
    } else if rep.entropy - ln_det_zero < tol {
        OuterVerdict::Outer
    } else if rep.monotonicity_gap.abs() < tol * 1e-3 {
        OuterVerdict::NotOuter
    } else {
        OuterVerdict::Undecided
    };
    Ok(OuterCheck {
        verdict,
        entropy: rep.entropy,
        ln_det_zero,
        monotonicity_gap: rep.monotonicity_gap,
        degree: m,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct InequalityCheck {
    pub delta: CMat,
    pub lower_bound: CMat,
    /// Smallest degree with a nonzero coefficient.
    pub leading_degree: usize,
    pub holds: bool,
    pub min_eigenvalue: f64,
}

/// Checks `Δ_{K_θ} ⪰ Σ_{|α|=k} θ_α*θ_α` with k the leading degree of θ.
pub fn entropy_inequality_check(
    theta: &MultiAnalyticSymbol,
    m: usize,
    tol: f64,
) -> Result<InequalityCheck> {
    if theta.is_zero() {
        return Err(Error::arg("symbol is zero"));
    }
    let ix = theta.index();
    let first = (0..ix.len())
        .find(|&g| linalg::max_abs(theta.coeff(g)) > 0.0)
        .expect("nonzero");
    let k = ix.degree(first);
    let d = theta.d_in();
    let mut lower = linalg::zeros(d, d);
    for g in ix.degree_start(k)..ix.len_upto(k) {
        lower += theta.coeff(g).adjoint() * theta.coeff(g);
    }
    let trunc = FockTruncation::new(theta.n(), m, d)?;
    let delta = leading_schur(&toeplitz::kernel_from_symbol(theta, &trunc)?.matrix()?, d);
    let min_eigenvalue = linalg::lambda_min(&(&delta - &lower));
    let scale = linalg::max_abs(&lower).max(1.0);
    Ok(InequalityCheck {
        holds: min_eigenvalue >= -tol * scale,
        delta,
        lower_bound: lower,
        leading_degree: k,
        min_eigenvalue,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExtremeVerdict {
    Extreme,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExtremeCertificate {
    pub verdict: ExtremeVerdict,
    pub delta: CMat,
    pub norm: f64,
    /// `‖Δ‖` at degree m−1.
    pub previous_norm: f64,
    pub degree: usize,
}

/// `Δ(M_θ) = 0` certifies an extreme point; `Δ^{(m)}` decreases in m, so a small value at m is conclusive.
pub fn extreme_point_certificate(
    theta: &MultiAnalyticSymbol,
    t: f64,
    m: usize,
    tol: f64,
) -> Result<ExtremeCertificate> {
    let rep = entropy_of_contraction(theta, t, m)?;
    let norm = linalg::op_norm(&rep.delta);
    let previous_norm = if m > 0 {
        linalg::op_norm(&entropy_of_contraction(theta, t, m - 1)?.delta)
    } else {
        norm
    };
    let verdict = if norm < tol {
        ExtremeVerdict::Extreme
    } else {
        ExtremeVerdict::Inconclusive
    };
    Ok(ExtremeCertificate {
        verdict,
        delta: rep.delta,
        norm,
        previous_norm,
        degree: m,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::Word;

    fn scalar_poly(c: &[f64]) -> MultiAnalyticSymbol {
        let pairs: Vec<_> = c
            .iter()
            .enumerate()
            .map(|(k, &v)| {
                (
                    Word::new(1, vec![1; k]).unwrap(),
                    linalg::scalar(C64::new(v, 0.0)),
                )
            })
            .collect();
        MultiAnalyticSymbol::from_pairs(1, 1, 1, &pairs).unwrap()
    }

    #[test]
    fn half_shift_entropy() {
        let rep = entropy_of_contraction(&scalar_poly(&[0.0, 0.5]), 1.0, 8).unwrap();
        assert!((rep.entropy - 0.75f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn outer_factor_of_one_plus_half_z() {
        let f = scalar_poly(&[1.0, 0.5]);
        let trunc = FockTruncation::new(1, 24, 1).unwrap();
        let t = toeplitz::kernel_from_symbol(&f, &trunc).unwrap();
        let of = square_outer_factor(&t).unwrap();
        let phi = of.coefficients(6).unwrap();
        assert!((phi.coeff(0)[(0, 0)] - 1.0).norm() < 1e-9);
        assert!((phi.coeff(1)[(0, 0)] - 0.5).norm() < 1e-9);
        assert!(phi.coeff(3)[(0, 0)].norm() < 1e-9);
        assert!(of.residual(&t).unwrap() < 1e-12);
    }
}
