//! Multi-Toeplitz operators and kernels on `F_n^+`.
//!
//! A multi-Toeplitz kernel is determined by `K(α) := K(α, g_0)`; the block at
//! `(σ, ω)` is `K(α)` when `σ = ωα`, `K(α)*` when `ω = σα`, and zero when the
//! words are incomparable.

use crate::error::{Error, Result};
use crate::fock::{self, FockTruncation, MultiAnalyticSymbol};
use crate::linalg::{self, CMat, C64};

/// Default PSD tolerance, relative to the matrix norm.
pub const PSD_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct MultiToeplitzOperator {
    trunc: FockTruncation,
    coeffs: MultiAnalyticSymbol,
}

impl MultiToeplitzOperator {
    /// `coeffs` holds `K(α)` as a square d × d symbol; entries above degree m are ignored.
    pub fn from_coeffs(trunc: &FockTruncation, coeffs: &MultiAnalyticSymbol) -> Result<Self> {
        if coeffs.n() != trunc.n || coeffs.d_in() != trunc.d || coeffs.d_out() != trunc.d {
            return Err(Error::arg(
                "kernel coefficients do not match the truncation",
            ));
        }
        let k0 = coeffs.at_zero();
        if linalg::hermitian_residual(k0) > 1e-12 * linalg::max_abs(k0).max(1.0) {
            return Err(Error::arg("K(g_0, g_0) is not Hermitian"));
        }
        let mut coeffs = coeffs.with_bound(trunc.m.min(coeffs.degree_bound()))?;
        coeffs.coeffs_mut()[0] = linalg::herm(k0);
        Ok(MultiToeplitzOperator {
            trunc: trunc.clone(),
            coeffs,
        })
    }

    /// `t² I − Θ*Θ` as a kernel: coefficients `t² δ_{α,g_0} − K_Θ(α)`.
    pub fn defect_of(theta: &MultiAnalyticSymbol, trunc: &FockTruncation, t: f64) -> Result<Self> {
        let k = kernel_coefficients(theta, trunc.m)?;
        let mut c = k.scale(C64::new(-1.0, 0.0));
        c.coeffs_mut()[0] += linalg::eye(theta.d_in()).scale(t * t);
        MultiToeplitzOperator::from_coeffs(&trunc.with_coefficients(theta.d_in())?, &c)
    }

    pub fn identity(trunc: &FockTruncation) -> Result<Self> {
        MultiToeplitzOperator::from_coeffs(trunc, &MultiAnalyticSymbol::identity(trunc.n, trunc.d)?)
    }

    pub fn trunc(&self) -> &FockTruncation {
        &self.trunc
    }

    pub fn coeffs(&self) -> &MultiAnalyticSymbol {
        &self.coeffs
    }

    pub fn d(&self) -> usize {
        self.trunc.d
    }

    /// Same kernel on a different truncation degree.
    pub fn at_degree(&self, m: usize) -> Result<Self> {
        MultiToeplitzOperator::from_coeffs(&self.trunc.with_degree(m)?, &self.coeffs)
    }

    /// Dense Hermitian matrix `[K(σ, ω)]` over words of length ≤ m.
    pub fn matrix(&self) -> Result<CMat> {
        let t = &self.trunc;
        fock::check_dim(t.total_dim())?;
        let d = t.d;
        let ix = t.index();
        let cix = self.coeffs.index();
        let mut out = linalg::zeros(t.total_dim(), t.total_dim());
        for w in 0..ix.len() {
            let kw = ix.degree(w);
            let top = (t.m - kw).min(self.coeffs.degree_bound());
            for a in 0..cix.len_upto(top) {
                let c = self.coeffs.coeff(a);
                if a > 0 && linalg::max_abs(c) == 0.0 {
                    continue;
                }
                let (ka, ra) = cix.split(a);
                let s = ix.concat(w, ix.join(ka, ra)).expect("degree checked");
                out.view_mut((s * d, w * d), (d, d)).copy_from(c);
                if a > 0 {
                    out.view_mut((w * d, s * d), (d, d)).copy_from(&c.adjoint());
                }
            }
        }
        Ok(out)
    }

    /// Smallest eigenvalue of the assembled matrix.
    pub fn lambda_min(&self) -> Result<f64> {
        Ok(linalg::lambda_min(&self.matrix()?))
    }
}

/// Checks `(S_i ⊗ I)* M (S_j ⊗ I) = δ_ij M` on blocks of degree ≤ m−1; returns the verdict and max residual.
pub fn is_multi_toeplitz(m: &CMat, trunc: &FockTruncation, tol: f64) -> Result<(bool, f64)> {
    let dim = trunc.total_dim();
    if m.nrows() != dim || m.ncols() != dim {
        return Err(Error::arg("matrix does not match the truncation"));
    }
    if trunc.m == 0 {
        return Ok((true, 0.0));
    }
    let d = trunc.d;
    let ix = trunc.index();
    let inner = ix.len_upto(trunc.m - 1);
    let mut resid = 0.0_f64;
    for i in 1..=trunc.n {
        for j in 1..=trunc.n {
            for s in 0..inner {
                let is = ix.prepend(i, s).expect("interior");
                for w in 0..inner {
                    let jw = ix.prepend(j, w).expect("interior");
                    for a in 0..d {
                        for b in 0..d {
                            let lhs = m[(is * d + a, jw * d + b)];
                            let rhs = if i == j {
                                m[(s * d + a, w * d + b)]
                            } else {
                                C64::new(0.0, 0.0)
                            };
                            resid = resid.max((lhs - rhs).norm());
                        }
                    }
                }
            }
        }
    }
    let scale = linalg::max_abs(m).max(1.0);
    Ok((resid <= tol * scale, resid))
}

/// `K_θ(α) = Σ_β θ_β* θ_{β α̃}` for |α| ≤ min(m, deg θ).
pub fn kernel_coefficients(theta: &MultiAnalyticSymbol, m: usize) -> Result<MultiAnalyticSymbol> {
    let deg = theta.degree();
    let bound = deg.min(m);
    let d = theta.d_in();
    let mut out = MultiAnalyticSymbol::zero(theta.n(), d, d, bound)?;
    let tix = theta.index().clone();
    let full = crate::words::GradedIndex::new(theta.n(), deg)?;
    let oix = out.index().clone();
    for a in 0..oix.len() {
        let (ka, ra) = oix.split(a);
        let arev = full.reverse(full.join(ka, ra));
        let mut acc = linalg::zeros(d, d);
        for b in 0..full.len_upto(deg - ka) {
            let (kb, rb) = full.split(b);
            let bb = tix.join(kb, rb);
            let cat = full.concat(b, arev).expect("degree checked");
            let (kc, rc) = full.split(cat);
            acc += theta.coeff(bb).adjoint() * theta.coeff(tix.join(kc, rc));
        }
        out.coeffs_mut()[a] = acc;
    }
    Ok(out)
}

/// Positive multi-Toeplitz kernel `K_θ` of a symbol on the given truncation.
pub fn kernel_from_symbol(
    theta: &MultiAnalyticSymbol,
    trunc: &FockTruncation,
) -> Result<MultiToeplitzOperator> {
    if theta.n() != trunc.n || theta.d_in() != trunc.d {
        return Err(Error::arg("symbol does not match the truncation"));
    }
    MultiToeplitzOperator::from_coeffs(trunc, &kernel_coefficients(theta, trunc.m)?)
}

/// PSD verdict `λ_min ≥ −tol·‖M‖` with the smallest eigenvalue.
pub fn is_psd(m: &CMat, tol: f64) -> Result<(bool, f64)> {
    let scale = linalg::norm_bound(m).max(1e-300);
    if linalg::hermitian_residual(m) > 1e-10 * scale.max(1.0) {
        return Err(Error::arg("matrix is not Hermitian"));
    }
    let lmin = linalg::lambda_min(m);
    Ok((lmin >= -tol * scale.max(1.0), lmin))
}
