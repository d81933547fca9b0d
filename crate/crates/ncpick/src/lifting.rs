//! Schur-complement defects and the central intertwining lifting.
//!
//! A context is an operator `A` from the truncated domain `F²(H_n) ⊗ E` into a
//! finite-dimensional space `H'`, given in orthonormal coordinates together with
//! the isometric embedding `Q` of `H'` into a truncated target Fock space
//! `F²(H_n) ⊗ K`. With `D² = t²I − A*A` and `ι` the inclusion of `1 ⊗ E`:
//!
//! * `Δ(A) = [P_E D^{-2} ι]^{-1}`, the Schur complement of `D²`;
//! * `(X^A)* = G^{-1} T* D²` with `T = [T_1 ⋯ T_n]` and `G = T* D² T`;
//! * `M_ψ^{-1}(1 ⊗ h) = Σ_σ e_σ ⊗ Δ(A) P_E (X^A_σ)* h`;
//! * the central lifting has symbol `θ ψ^{-1}` with `θ = Q A D^{-2} ι`.

use crate::entropy::leading_schur;
use crate::error::{Error, Result};
use crate::fock::{self, FockTruncation, MultiAnalyticSymbol};
use crate::linalg::{self, CMat};
use crate::series::Realization;

/// Relative slack on `‖X‖ ≤ t`.
const NORM_SLACK: f64 = 1e-9;

/// `Δ(X)`: Schur complement of `t²I − X*X` onto `1 ⊗ E`.
pub fn schur_defect(x: &CMat, trunc: &FockTruncation, t: f64) -> Result<CMat> {
    if x.ncols() != trunc.total_dim() {
        return Err(Error::arg("operator domain does not match the truncation"));
    }
    let dsq = linalg::eye(x.ncols()).scale(t * t) - x.adjoint() * x;
    let lmin = linalg::lambda_min(&dsq);
    if lmin < -NORM_SLACK * t * t {
        return Err(Error::Infeasible {
            reason: format!("‖X‖ exceeds t = {t}"),
            lambda_min: Some(lmin),
        });
    }
    Ok(leading_schur(&dsq, trunc.d))
}

#[derive(Clone, Debug)]
pub struct LiftingContext {
    domain: FockTruncation,
    target: FockTruncation,
    embedding: CMat,
    a: CMat,
    t: f64,
}

impl LiftingContext {
    /// `embedding` has orthonormal columns spanning `H'` inside the target truncation; `a` maps the domain into those coordinates.
    pub fn new(
        domain: FockTruncation,
        target: FockTruncation,
        embedding: CMat,
        a: CMat,
        t: f64,
    ) -> Result<Self> {
        if !(t > 0.0) {
            return Err(Error::arg("t must be positive"));
        }
        if embedding.nrows() != target.total_dim()
            || a.nrows() != embedding.ncols()
            || a.ncols() != domain.total_dim()
        {
            return Err(Error::arg("lifting context shape mismatch"));
        }
        if domain.n != target.n {
            return Err(Error::arg("domain and target alphabets differ"));
        }
        let gram = embedding.adjoint() * &embedding;
        if linalg::max_abs(&(gram - linalg::eye(embedding.ncols()))) > 1e-10 {
            return Err(Error::arg("embedding columns are not orthonormal"));
        }
        Ok(LiftingContext {
            domain,
            target,
            embedding,
            a,
            t,
        })
    }

    pub fn domain(&self) -> &FockTruncation {
        &self.domain
    }

    pub fn target(&self) -> &FockTruncation {
        &self.target
    }

    pub fn embedding(&self) -> &CMat {
        &self.embedding
    }

    pub fn operator(&self) -> &CMat {
        &self.a
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// `‖A‖` at the truncation.
    pub fn norm(&self) -> f64 {
        linalg::op_norm(&self.a)
    }

    fn require_strict(&self) -> Result<()> {
        let nrm = self.norm();
        if nrm >= self.t {
            return Err(Error::Infeasible {
                reason: format!("‖A‖ = {nrm} ≥ t = {}", self.t),
                lambda_min: None,
            });
        }
        Ok(())
    }

    /// Operator `Q A` into the target Fock truncation.
    pub fn lifted_operator(&self) -> CMat {
        &self.embedding * &self.a
    }

    /// `D² = t²I − A*A` on the truncated domain.
    pub fn defect_square(&self) -> CMat {
        linalg::eye(self.domain.total_dim()).scale(self.t * self.t) - self.a.adjoint() * &self.a
    }

    /// `D^{-2} x` by the Woodbury identity `t^{-2}(x + A*(t²I − AA*)^{-1} A x)`.
    pub fn apply_defect_inverse(&self, x: &CMat) -> Result<CMat> {
        let t2 = self.t * self.t;
        let small = linalg::eye(self.a.nrows()).scale(t2) - &self.a * self.a.adjoint();
        let ax = &self.a * x;
        let y = linalg::solve_hpd(&small, &ax)
            .or_else(|| linalg::solve(&small, &ax))
            .ok_or_else(|| Error::Numerical("t²I − AA* is singular".into()))?;
        Ok((x + self.a.adjoint() * y) / linalg::c64(t2, 0.0))
    }

    /// `D^{-2} ι`, the columns defining ψ.
    pub fn psi_columns(&self) -> Result<CMat> {
        self.require_strict()?;
        self.apply_defect_inverse(&inclusion(&self.domain))
    }

    /// `Δ(A) = [P_E D^{-2} ι]^{-1}`.
    pub fn delta(&self) -> Result<CMat> {
        let cols = self.psi_columns()?;
        let d = self.domain.d;
        let corner = linalg::herm(&linalg::block(&cols, 0, 0, d, d));
        let inv = linalg::inverse(&corner)
            .ok_or_else(|| Error::Numerical("P_E D^{-2} ι is singular".into()))?;
        Ok(linalg::herm(&inv))
    }

    /// `ψ` with `ψ(1 ⊗ h) = D^{-2}(1 ⊗ h)`, and `θ` with `θ(1 ⊗ h) = Q A D^{-2}(1 ⊗ h)`.
    pub fn theta_psi(&self) -> Result<(MultiAnalyticSymbol, MultiAnalyticSymbol)> {
        let cols = self.psi_columns()?;
        let mut psi = fock::symbol_from_vector(&cols, &self.domain)?;
        let p0 = linalg::herm(psi.at_zero());
        psi.set(&crate::words::Word::identity(self.domain.n), p0)?;
        let theta = fock::symbol_from_vector(&(&self.embedding * (&self.a * &cols)), &self.target)?;
        Ok((theta, psi))
    }

    /// Exact rational form `θ ψ^{-1}` of the central lifting.
    pub fn central_realization(&self) -> Result<Realization> {
        let (theta, psi) = self.theta_psi()?;
        Realization::from_polynomial(&theta)?
            .product(&Realization::from_polynomial(&psi)?.inverse()?)
    }
}

/// `ι`: inclusion of `1 ⊗ E` as the first d columns.
pub fn inclusion(trunc: &FockTruncation) -> CMat {
    let mut out = linalg::zeros(trunc.total_dim(), trunc.d);
    out.view_mut((0, 0), (trunc.d, trunc.d))
        .copy_from(&linalg::eye(trunc.d));
    out
}

/// `T_i = S_i ⊗ I_E` restricted to degree ≤ m−1, as `total_dim × low_dim` matrices.
fn restricted_creations(trunc: &FockTruncation) -> Result<(usize, Vec<CMat>)> {
    if trunc.m == 0 {
        return Err(Error::arg("X^A operators need truncation degree ≥ 1"));
    }
    let low = trunc.index().len_upto(trunc.m - 1) * trunc.d;
    let ts = (1..=trunc.n)
        .map(|i| {
            fock::left_creation(trunc, i).map(|s| linalg::block(&s, 0, 0, trunc.total_dim(), low))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((low, ts))
}

#[derive(Clone, Debug)]
pub struct XaOperators {
    /// `(X^A_i)*` on the truncated domain; ranges lie in degree ≤ m−1.
    pub adjoints: Vec<CMat>,
    pub degree: usize,
}

impl XaOperators {
    pub fn operators(&self) -> Vec<CMat> {
        self.adjoints.iter().map(|m| m.adjoint()).collect()
    }

    /// `(X^A_σ)* v` for all words of length ≤ k in graded order, with `(X_{σ g_i})* = X_i* X_σ*`.
    pub fn word_images(&self, v: &CMat, k: usize) -> Result<Vec<CMat>> {
        let n = self.adjoints.len();
        let ix = crate::words::GradedIndex::new(n, k)?;
        let mut out: Vec<CMat> = Vec::with_capacity(ix.len());
        out.push(v.clone());
        for g in 1..ix.len() {
            let (deg, r) = ix.split(g);
            let head = ix.join(deg - 1, r / n);
            let next = &self.adjoints[r % n] * &out[head];
            out.push(next);
        }
        Ok(out)
    }

    /// `‖Σ_{|σ|=k} X_σ X_σ*‖` for k = 0..=kmax.
    pub fn power_norms(&self, kmax: usize) -> Vec<f64> {
        let mut p = linalg::eye(self.adjoints[0].nrows());
        let mut out = vec![linalg::op_norm(&p)];
        for _ in 0..kmax {
            let mut next = linalg::zeros(p.nrows(), p.ncols());
            for xs in &self.adjoints {
                next += xs.adjoint() * &p * xs;
            }
            p = linalg::herm(&next);
            out.push(linalg::op_norm(&p));
        }
        out
    }
}

/// `(X^A)* = (T* D² T)^{-1} T* D²`, with a pseudo-inverse fallback when the block matrix is ill conditioned.
pub fn xa_operators(ctx: &LiftingContext) -> Result<XaOperators> {
    ctx.require_strict()?;
    let trunc = ctx.domain();
    let (low, ts) = restricted_creations(trunc)?;
    let dsq = ctx.defect_square();
    let tb = linalg::hstack(&ts);
    let g = tb.adjoint() * &dsq * &tb;
    let rhs = tb.adjoint() * &dsq;
    let sol = match linalg::solve_hpd(&g, &rhs) {
        Some(s) => s,
        None => {
            let scale = linalg::norm_bound(&g).max(1e-300);
            let pinv = linalg::pinv_psd(&g, 1e-12 * scale);
            if linalg::lambda_min(&g) <= 1e-14 * scale {
                return Err(Error::Numerical("block matrix T* D² T is singular".into()));
            }
            pinv * rhs
        }
    };
    let total = trunc.total_dim();
    let adjoints = (0..trunc.n)
        .map(|i| {
            let mut x = linalg::zeros(total, total);
            x.view_mut((0, 0), (low, total))
                .copy_from(&sol.view((i * low, 0), (low, total)));
            x
        })
        .collect();
    Ok(XaOperators {
        adjoints,
        degree: trunc.m,
    })
}

/// `max ‖X_j* T_i − δ_ij I‖` on degree ≤ m−1.
pub fn similarity_residual(ctx: &LiftingContext, xa: &XaOperators) -> Result<f64> {
    let (low, ts) = restricted_creations(ctx.domain())?;
    let mut worst = 0.0_f64;
    for (j, xs) in xa.adjoints.iter().enumerate() {
        for (i, ti) in ts.iter().enumerate() {
            let prod = linalg::block(&(xs * ti), 0, 0, low, low);
            let expect = if i == j {
                linalg::eye(low)
            } else {
                linalg::zeros(low, low)
            };
            worst = worst.max(linalg::max_abs(&(prod - expect)));
        }
    }
    Ok(worst)
}

/// `max_i ‖X_i* D^{-2} ι‖`.
pub fn annihilation_residual(ctx: &LiftingContext, xa: &XaOperators) -> Result<f64> {
    let cols = ctx.psi_columns()?;
    Ok(xa
        .adjoints
        .iter()
        .map(|xs| linalg::max_abs(&(xs * &cols)))
        .fold(0.0, f64::max))
}

/// Coefficients of `M_ψ^{-1}` to degree k from the X^A series.
pub fn inverse_psi_series(
    ctx: &LiftingContext,
    xa: &XaOperators,
    k: usize,
) -> Result<MultiAnalyticSymbol> {
    let delta = ctx.delta()?;
    let d = ctx.domain().d;
    let images = xa.word_images(&inclusion(ctx.domain()), k)?;
    let ix = crate::words::GradedIndex::new(ctx.domain().n, k)?;
    let coeffs = (0..ix.len())
        .map(|b| &delta * linalg::block(&images[ix.reverse(b)], 0, 0, d, d))
        .collect();
    MultiAnalyticSymbol::from_dense(ctx.domain().n, d, d, k, coeffs)
}

/// Degree-≤k coefficients of the central lifting `B_c` through the X^A series.
pub fn central_coefficients(ctx: &LiftingContext, k: usize) -> Result<MultiAnalyticSymbol> {
    let xa = xa_operators(ctx)?;
    let (theta, _) = ctx.theta_psi()?;
    let eta = inverse_psi_series(ctx, &xa, k)?;
    theta.mul(&eta, k)
}

/// Factor `φ` of `t²I − B_c*B_c` with `φ(1 ⊗ h) = Σ_σ e_σ ⊗ Δ(A)^{1/2} P_E (X^A_σ)* h`.
#[derive(Clone, Debug)]
pub struct DefectFactor {
    pub delta: CMat,
    pub realization: Realization,
}

impl DefectFactor {
    pub fn coefficients(&self, bound: usize) -> Result<MultiAnalyticSymbol> {
        self.realization.coefficients(bound)
    }

    pub fn at_zero(&self) -> &CMat {
        self.realization.feedthrough()
    }
}

pub fn defect_outer_factor(ctx: &LiftingContext) -> Result<DefectFactor> {
    let xa = xa_operators(ctx)?;
    let delta = ctx.delta()?;
    let root = linalg::psd_sqrt(&delta);
    let trunc = ctx.domain();
    let d = trunc.d;
    let iota = inclusion(trunc);
    let c = &root * iota.adjoint();
    let b = xa.adjoints.iter().map(|xs| xs * &iota).collect();
    let realization = Realization::new(root.clone(), c, xa.adjoints.clone(), b)?;
    debug_assert_eq!(realization.d_in(), d);
    Ok(DefectFactor { delta, realization })
}

/// `max_{|α| ≤ m} ‖K_{t²I − B_c*B_c}(α) − K_φ(α)‖` using exact rational kernels.
pub fn defect_factor_residual(ctx: &LiftingContext, phi: &DefectFactor, m: usize) -> Result<f64> {
    let bc = ctx.central_realization()?;
    let mut target = bc
        .kernel(m, crate::entropy::STEIN_TOL)?
        .scale(linalg::c64(-1.0, 0.0));
    let d = ctx.domain().d;
    let k0 = target.at_zero() + linalg::eye(d).scale(ctx.t * ctx.t);
    target.set(&crate::words::Word::identity(ctx.domain().n), k0)?;
    crate::entropy::kernel_residual(&target, &phi.realization, m)
}
