//! Carathéodory–Schur problems: prescribed coefficients `A_α` for |α| ≤ p.

use crate::error::{Error, Result};
use crate::fock::{self, FockTruncation, MultiAnalyticSymbol};
use crate::lifting;
use crate::linalg::{self, CMat, C64};
use crate::series::Realization;

#[derive(Clone, Debug, PartialEq)]
pub struct CSProblem {
    prescribed: MultiAnalyticSymbol,
}

impl CSProblem {
    /// The degree bound of `prescribed` is the prescription degree p (coefficients of
    /// degree ≤ p are fixed, zero entries included).
    pub fn new(prescribed: MultiAnalyticSymbol) -> Self {
        CSProblem { prescribed }
    }

    pub fn prescribed(&self) -> &MultiAnalyticSymbol {
        &self.prescribed
    }

    pub fn n(&self) -> usize {
        self.prescribed.n()
    }

    /// Largest prescribed degree p.
    pub fn degree(&self) -> usize {
        self.prescribed.degree_bound()
    }

    pub fn domain(&self) -> Result<FockTruncation> {
        FockTruncation::new(self.n(), self.degree(), self.prescribed.d_in())
    }

    pub fn target(&self) -> Result<FockTruncation> {
        FockTruncation::new(self.n(), self.degree(), self.prescribed.d_out())
    }
}

/// Block lower-triangular `M` over words of length ≤ p: block `(α, β)` is `A_{(α\β)~}` when β is a prefix of α.
pub fn cs_matrix(p: &CSProblem) -> Result<CMat> {
    let q = &p.prescribed;
    let ix = p.domain()?.index().clone();
    let (d2, d1) = (q.d_out(), q.d_in());
    let mut out = linalg::zeros(ix.len() * d2, ix.len() * d1);
    for a in 0..ix.len() {
        let ka = ix.degree(a);
        for kb in 0..=ka {
            let b = ix.prefix(a, kb);
            let quotient = ix.suffix_after(a, kb);
            let c = q.coeff(ix.reverse(quotient));
            out.view_mut((a * d2, b * d1), (d2, d1)).copy_from(c);
        }
    }
    Ok(out)
}

pub fn cs_distance(p: &CSProblem) -> Result<f64> {
    Ok(linalg::op_norm(&cs_matrix(p)?))
}

#[derive(Clone, Debug)]
pub struct CSCentral {
    pub theta: MultiAnalyticSymbol,
    pub psi: MultiAnalyticSymbol,
    /// Coefficients of `Θ_t = θ ψ^{-1}` to the requested degree.
    pub interpolant: MultiAnalyticSymbol,
    pub realization: Realization,
    pub d_inf: f64,
    /// `Δ = [P_E(t²I − M*M)^{-1}|E]^{-1}`.
    pub delta: CMat,
    pub entropy: f64,
    pub t: f64,
}

/// Central interpolant with `ψ = F_1 (t²I − M*M)^{-1} ι` and `θ = M (t²I − M*M)^{-1} ι`.
pub fn cs_central(p: &CSProblem, t: f64, m_out: usize) -> Result<CSCentral> {
    let m = cs_matrix(p)?;
    let d_inf = linalg::op_norm(&m);
    if !(t > d_inf) {
        return Err(Error::Infeasible {
            reason: format!("t = {t} ≤ d_∞ = {d_inf}"),
            lambda_min: Some(t * t - d_inf * d_inf),
        });
    }
    let dom = p.domain()?;
    let tgt = p.target()?;
    let dsq = linalg::eye(m.ncols()).scale(t * t) - m.adjoint() * &m;
    let iota = lifting::inclusion(&dom);
    let cols = linalg::solve_hpd(&dsq, &iota)
        .ok_or_else(|| Error::Numerical("t²I − M*M is not positive".into()))?;
    let mut psi = fock::symbol_from_vector(&cols, &dom)?;
    let p0 = linalg::herm(psi.at_zero());
    psi.set(&crate::words::Word::identity(p.n()), p0.clone())?;
    let theta = fock::symbol_from_vector(&(&m * &cols), &tgt)?;
    let interpolant = theta.mul(&psi.inverse_series(m_out)?, m_out)?;
    let realization = Realization::from_polynomial(&theta)?
        .product(&Realization::from_polynomial(&psi)?.inverse()?)?;
    let delta = linalg::herm(
        &linalg::inverse(&p0).ok_or_else(|| Error::Numerical("ψ(0) is singular".into()))?,
    );
    let entropy = crate::entropy::ln_det(&delta, (t * t).max(1.0));
    Ok(CSCentral {
        theta,
        psi,
        interpolant,
        realization,
        d_inf,
        delta,
        entropy,
        t,
    })
}

/// Largest deviation of the interpolant from the prescribed coefficients.
pub fn constraint_residual(p: &CSProblem, interpolant: &MultiAnalyticSymbol) -> f64 {
    let ix = p.prescribed.index();
    (0..ix.len())
        .map(|g| {
            let w = ix.word(g);
            linalg::max_abs(&(interpolant.get(&w) - p.prescribed.coeff(g)))
        })
        .fold(0.0, f64::max)
}

#[derive(Clone, Debug)]
pub struct CSOptimal {
    pub phi: MultiAnalyticSymbol,
    pub realization: Realization,
    pub d_inf: f64,
    /// Number of leading zero coefficients removed from the attaining vector (n = 1 only).
    pub stripped: usize,
}

/// Norm-optimal solution `φ = f g^{-1}` from the attaining vector y: `g ↔ y`, `f ↔ M y`.
pub fn cs_optimal(p: &CSProblem, m_out: usize) -> Result<CSOptimal> {
    let q = &p.prescribed;
    if q.d_in() != 1 {
        return Err(Error::arg(
            "the optimal route supports scalar domains (d_in = 1)",
        ));
    }
    let m = cs_matrix(p)?;
    let svd = m.clone().svd(false, true);
    let (imax, d_inf) =
        svd.singular_values
            .iter()
            .enumerate()
            .fold(
                (0, f64::NEG_INFINITY),
                |acc, (i, &s)| if s > acc.1 { (i, s) } else { acc },
            );
    let n = p.n();
    if d_inf <= 1e-300 {
        let zero = MultiAnalyticSymbol::zero(n, q.d_out(), 1, m_out)?;
        let realization = Realization::constant(n, linalg::zeros(q.d_out(), 1))?;
        return Ok(CSOptimal {
            phi: zero,
            realization,
            d_inf: 0.0,
            stripped: 0,
        });
    }
    let vt = svd
        .v_t
        .as_ref()
        .ok_or_else(|| Error::Numerical("SVD did not return vectors".into()))?;
    let y = vt.row(imax).adjoint();
    let y = CMat::from_column_slice(y.len(), 1, y.as_slice());
    let f_vec = &m * &y;
    let dom = p.domain()?;
    let tgt = p.target()?;
    let mut g = fock::symbol_from_vector(&y, &dom)?;
    let mut f = fock::symbol_from_vector(&f_vec, &tgt)?;
    let scale = linalg::max_abs(&y);
    let lead_tol = 1e-10 * scale;
    let mut stripped = 0;
    if linalg::max_abs(g.at_zero()) <= lead_tol {
        if n != 1 {
            return Err(Error::Degenerate(
                "attaining vector has a vanishing leading block".into(),
            ));
        }
        while stripped < g.coeffs().len() && linalg::max_abs(g.coeff(stripped)) <= lead_tol {
            stripped += 1;
        }
        g = shift_down(&g, stripped)?;
        f = shift_down(&f, stripped)?;
    }
    let realization =
        Realization::from_polynomial(&f)?.product(&Realization::from_polynomial(&g)?.inverse()?)?;
    let phi = f.mul(&g.inverse_series(m_out)?, m_out)?;
    Ok(CSOptimal {
        phi,
        realization,
        d_inf,
        stripped,
    })
}

/// Drops the first k coefficients of a one-letter series.
fn shift_down(s: &MultiAnalyticSymbol, k: usize) -> Result<MultiAnalyticSymbol> {
    let len = s.coeffs().len();
    let coeffs: Vec<CMat> = (k..len).map(|i| s.coeff(i).clone()).collect();
    if coeffs.is_empty() {
        return Err(Error::Degenerate("attaining vector vanishes".into()));
    }
    MultiAnalyticSymbol::from_dense(1, s.d_out(), s.d_in(), coeffs.len() - 1, coeffs)
}

/// `max_{|α| ≤ m} ‖K_{φ/s}(α) − δ_{α,g_0} I‖` from the exact kernel of the realization.
pub fn inner_residual(r: &Realization, s: f64, m: usize) -> Result<f64> {
    let k = r.kernel(m, crate::entropy::STEIN_TOL)?;
    let d = r.d_in();
    let inv = 1.0 / (s * s);
    Ok(k.coeffs()
        .iter()
        .enumerate()
        .map(|(g, c)| {
            let expect = if g == 0 {
                linalg::eye(d)
            } else {
                linalg::zeros(d, d)
            };
            linalg::op_norm(&(c * C64::new(inv, 0.0) - expect))
        })
        .fold(0.0, f64::max))
}
