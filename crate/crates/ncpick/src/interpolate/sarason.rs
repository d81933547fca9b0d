//! Sarason-type central interpolants `Θ_t = θ ψ^{-1}` for `A = P_{H'} M_R`.

use crate::error::{Error, Result};
use crate::fock::{self, FockTruncation, MultiAnalyticSymbol};
use crate::interpolate::np::{self, NPProblem, Variant};
use crate::lifting::LiftingContext;
use crate::linalg::{self, CMat, C64};
use crate::series::Realization;

/// Columns below this fraction of the largest singular value are dropped from a kernel span.
const SPAN_RANK_TOL: f64 = 1e-12;

/// The co-invariant subspace `H'` of the target.
#[derive(Clone, Debug, PartialEq)]
pub enum HSpec {
    /// Polynomials of degree ≤ `degree`.
    DegreeCutoff { degree: usize },
    /// `span{f_{λ_j} ⊗ k : k ∈ range(directions_j)}`, truncated at `degree`.
    KernelSpan {
        points: Vec<Vec<C64>>,
        directions: Vec<CMat>,
        degree: usize,
    },
}

impl HSpec {
    /// Kernel span `f_{z_j} ⊗ range(B_j*)` of a ball problem.
    pub fn from_ball(p: &NPProblem, degree: usize) -> Result<Self> {
        match &p.variant {
            Variant::Ball { points, b, .. } => Ok(HSpec::KernelSpan {
                points: points.clone(),
                directions: b.iter().map(|m| m.adjoint()).collect(),
                degree,
            }),
            Variant::Operatorial { .. } => Err(Error::arg("kernel spans are built from ball data")),
        }
    }

    pub fn degree(&self) -> usize {
        match self {
            HSpec::DegreeCutoff { degree } | HSpec::KernelSpan { degree, .. } => *degree,
        }
    }

    /// Orthonormal embedding of `H'` into the target truncation.
    pub fn embedding(&self, target: &FockTruncation) -> Result<CMat> {
        match self {
            HSpec::DegreeCutoff { .. } => Ok(linalg::eye(target.total_dim())),
            HSpec::KernelSpan {
                points, directions, ..
            } => {
                if points.is_empty() || points.len() != directions.len() {
                    return Err(Error::arg(
                        "kernel span needs one direction matrix per point",
                    ));
                }
                let ix = target.index();
                let mut cols = Vec::new();
                for (z, dir) in points.iter().zip(directions) {
                    if z.len() != target.n || dir.nrows() != target.d {
                        return Err(Error::arg(
                            "kernel span point or direction has the wrong shape",
                        ));
                    }
                    if z.iter().map(|x| x.norm_sqr()).sum::<f64>() >= 1.0 {
                        return Err(Error::arg("kernel span point is not inside the unit ball"));
                    }
                    let mono = np::monomials(z, ix);
                    let mut v = linalg::zeros(target.total_dim(), dir.ncols());
                    for (w, m) in mono.iter().enumerate() {
                        v.view_mut((w * target.d, 0), (target.d, dir.ncols()))
                            .copy_from(&(dir * m.conj()));
                    }
                    cols.push(v);
                }
                let v = linalg::hstack(&cols);
                let svd = v.svd(true, false);
                let u = svd
                    .u
                    .ok_or_else(|| Error::Numerical("SVD did not return vectors".into()))?;
                let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
                if smax == 0.0 {
                    return Err(Error::arg("kernel span is trivial"));
                }
                let keep: Vec<usize> = (0..svd.singular_values.len())
                    .filter(|&i| svd.singular_values[i] > SPAN_RANK_TOL * smax)
                    .collect();
                let mut q = linalg::zeros(u.nrows(), keep.len());
                for (c, &i) in keep.iter().enumerate() {
                    q.set_column(c, &u.column(i));
                }
                Ok(q)
            }
        }
    }
}

/// Lifting context for `A = P_{H'} M_R` on the truncated domain.
pub fn sarason_context(space: &HSpec, r: &MultiAnalyticSymbol, t: f64) -> Result<LiftingContext> {
    let m = space.degree();
    let dom = FockTruncation::new(r.n(), m, r.d_in())?;
    let tgt = FockTruncation::new(r.n(), m, r.d_out())?;
    let q = space.embedding(&tgt)?;
    let full = fock::assemble(&r.with_bound(m)?, &dom)?;
    let a = q.adjoint() * full;
    LiftingContext::new(dom, tgt, q, a, t)
}

#[derive(Clone, Debug)]
pub struct SarasonCentral {
    pub theta: MultiAnalyticSymbol,
    pub psi: MultiAnalyticSymbol,
    pub interpolant: MultiAnalyticSymbol,
    pub realization: Realization,
    pub norm: f64,
    pub delta: CMat,
    pub entropy: f64,
    pub t: f64,
}

/// `ψ = (t²I − A*A)^{-1} ι`, `θ = A ψ`, and `Θ_t = θ ψ^{-1}` to degree `m_out`.
pub fn sarason_central(
    space: &HSpec,
    r: &MultiAnalyticSymbol,
    t: f64,
    m_out: usize,
) -> Result<SarasonCentral> {
    let ctx = sarason_context(space, r, t)?;
    let norm = ctx.norm();
    if !(norm < t) {
        return Err(Error::Infeasible {
            reason: format!("‖A‖ = {norm} ≥ t = {t}"),
            lambda_min: Some(t * t - norm * norm),
        });
    }
    let (theta, psi) = ctx.theta_psi()?;
    let interpolant = theta.mul(&psi.inverse_series(m_out)?, m_out)?;
    let realization = ctx.central_realization()?;
    let delta = ctx.delta()?;
    let entropy = crate::entropy::ln_det(&delta, (t * t).max(1.0));
    Ok(SarasonCentral {
        theta,
        psi,
        interpolant,
        realization,
        norm,
        delta,
        entropy,
        t,
    })
}
