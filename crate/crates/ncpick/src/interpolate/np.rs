//! Nevanlinna–Pick problems with operatorial argument and on the unit ball.
//!
//! Constraints are stacked: `B` is `q × dim K`, `C` is `q × dim H`, and a
//! solution satisfies `Σ_α Z_{α̃} B Θ_α = C`. For ball data the tuple is
//! `Z_i = diag_j(z_{j,i} I)` and the condition reads `B_j Θ(z_j) = C_j`.

use crate::error::{Error, Result};
use crate::grammian::{self, OperatorTuple};
use crate::linalg::{self, CMat, C64};
use crate::series::Realization;
use crate::toeplitz;

/// Default relative tolerance for PSD and strictness decisions on Pick matrices.
pub const PICK_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub enum Variant {
    Ball {
        points: Vec<Vec<C64>>,
        b: Vec<CMat>,
        c: Vec<CMat>,
    },
    Operatorial {
        z: OperatorTuple,
        b: CMat,
        c: CMat,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct NPProblem {
    pub variant: Variant,
    pub t: f64,
}

pub(crate) fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}

impl NPProblem {
    pub fn ball(points: Vec<Vec<C64>>, b: Vec<CMat>, c: Vec<CMat>, t: f64) -> Result<Self> {
        if points.is_empty() || points.len() != b.len() || points.len() != c.len() {
            return Err(Error::arg("need matching lists of points, B_j and C_j"));
        }
        let n = points[0].len();
        if n == 0 || points.iter().any(|p| p.len() != n) {
            return Err(Error::arg("points must share one dimension n ≥ 1"));
        }
        for (j, p) in points.iter().enumerate() {
            let r2: f64 = p.iter().map(|z| z.norm_sqr()).sum();
            if !(r2 < 1.0) {
                return Err(Error::arg(format!("point {j} is not inside the unit ball")));
            }
        }
        for j in 0..points.len() {
            for k in 0..j {
                let d: f64 = points[j]
                    .iter()
                    .zip(&points[k])
                    .map(|(x, y)| (x - y).norm_sqr())
                    .sum();
                if d.sqrt() < 1e-12 {
                    return Err(Error::arg(format!("points {k} and {j} coincide")));
                }
            }
        }
        let (kdim, hdim) = (b[0].ncols(), c[0].ncols());
        for j in 0..b.len() {
            if b[j].ncols() != kdim || c[j].ncols() != hdim || b[j].nrows() != c[j].nrows() {
                return Err(Error::arg(format!(
                    "constraint {j} has inconsistent shapes"
                )));
            }
        }
        if !(t > 0.0) {
            return Err(Error::arg("t must be positive"));
        }
        Ok(NPProblem {
            variant: Variant::Ball { points, b, c },
            t,
        })
    }

    pub fn operatorial(z: OperatorTuple, b: CMat, c: CMat, t: f64) -> Result<Self> {
        if b.nrows() != z.q() || c.nrows() != z.q() {
            return Err(Error::arg(
                "B and C must have as many rows as the tuple dimension",
            ));
        }
        if !(t > 0.0) {
            return Err(Error::arg("t must be positive"));
        }
        let r = grammian::spectral_radius(&z, 1e-10, grammian::RADIUS_MAX_ITER);
        if r.estimate >= 1.0 {
            return Err(Error::Divergence(format!(
                "spectral radius {} ≥ 1",
                r.estimate
            )));
        }
        Ok(NPProblem {
            variant: Variant::Operatorial { z, b, c },
            t,
        })
    }

    pub fn with_t(&self, t: f64) -> Self {
        NPProblem {
            variant: self.variant.clone(),
            t,
        }
    }

    pub fn n(&self) -> usize {
        match &self.variant {
            Variant::Ball { points, .. } => points[0].len(),
            Variant::Operatorial { z, .. } => z.n(),
        }
    }

    /// Stacked `(Z, B, C)`.
    pub fn stacked(&self) -> Result<(OperatorTuple, CMat, CMat)> {
        match &self.variant {
            Variant::Ball { points, b, c } => {
                let dims: Vec<usize> = b.iter().map(|m| m.nrows()).collect();
                let z = OperatorTuple::from_ball_points(points, &dims)?;
                Ok((z, linalg::vstack(b), linalg::vstack(c)))
            }
            Variant::Operatorial { z, b, c } => Ok((z.clone(), b.clone(), c.clone())),
        }
    }

    pub fn k_dim(&self) -> usize {
        match &self.variant {
            Variant::Ball { b, .. } => b[0].ncols(),
            Variant::Operatorial { b, .. } => b.ncols(),
        }
    }

    pub fn h_dim(&self) -> usize {
        match &self.variant {
            Variant::Ball { c, .. } => c[0].ncols(),
            Variant::Operatorial { c, .. } => c.ncols(),
        }
    }

    /// `(G_{Z,B}, G_{Z,C})`, in closed form for ball data.
    pub fn grammians(&self) -> Result<(CMat, CMat)> {
        match &self.variant {
            Variant::Ball { points, b, c } => {
                Ok((ball_gram(points, b, b), ball_gram(points, c, c)))
            }
            Variant::Operatorial { z, b, c } => {
                let gb = grammian::grammian(z, b, 1e-15)?.g;
                let gc = grammian::grammian(z, c, 1e-15)?.g;
                Ok((gb, gc))
            }
        }
    }
}

/// `[X_j Y_k* / (1 − ⟨z_j, z_k⟩)]`.
pub fn ball_gram(points: &[Vec<C64>], x: &[CMat], y: &[CMat]) -> CMat {
    let rows: Vec<usize> = x.iter().map(|m| m.nrows()).collect();
    let total: usize = rows.iter().sum();
    let mut out = linalg::zeros(total, total);
    let mut r0 = 0;
    for j in 0..points.len() {
        let mut c0 = 0;
        for k in 0..points.len() {
            let w = C64::new(1.0, 0.0) / (C64::new(1.0, 0.0) - inner(&points[j], &points[k]));
            out.view_mut((r0, c0), (rows[j], rows[k]))
                .copy_from(&(&x[j] * y[k].adjoint() * w));
            c0 += rows[k];
        }
        r0 += rows[j];
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct Feasibility {
    pub lambda: CMat,
    pub feasible: bool,
    pub strict: bool,
    pub lambda_min: f64,
}

/// `Λ = t² G_{Z,B} − G_{Z,C}` and its PSD verdict.
pub fn np_feasible(p: &NPProblem) -> Result<Feasibility> {
    let lambda = match &p.variant {
        Variant::Ball { points, b, c } => {
            let t2 = p.t * p.t;
            let tb: Vec<CMat> = b.iter().map(|m| m * C64::new(t2, 0.0)).collect();
            ball_gram(points, &tb, b) - ball_gram(points, c, c)
        }
        Variant::Operatorial { .. } => {
            let (gb, gc) = p.grammians()?;
            gb.scale(p.t * p.t) - gc
        }
    };
    let lambda = linalg::herm(&lambda);
    let scale = linalg::norm_bound(&lambda).max(p.t * p.t).max(1e-300);
    let (_, lambda_min) = toeplitz::is_psd(&lambda, PICK_TOL)?;
    let feasible = lambda_min >= -PICK_TOL * scale;
    let strict = lambda_min > PICK_TOL * scale;
    Ok(Feasibility {
        lambda,
        feasible,
        strict,
        lambda_min,
    })
}

/// Central interpolant data `(Z, B, C, Λ, t)`.
#[derive(Clone, Debug, PartialEq)]
pub struct StateSpaceInterpolant {
    pub z: OperatorTuple,
    pub b: CMat,
    pub c: CMat,
    pub lambda: CMat,
    pub t: f64,
    lambda_inv_c: CMat,
}

impl StateSpaceInterpolant {
    pub fn new(z: OperatorTuple, b: CMat, c: CMat, lambda: CMat, t: f64) -> Result<Self> {
        let lambda_inv_c = linalg::solve_hpd(&lambda, &c)
            .ok_or_else(|| Error::infeasible("Λ is not positive definite"))?;
        Ok(StateSpaceInterpolant {
            z,
            b,
            c,
            lambda,
            t,
            lambda_inv_c,
        })
    }

    pub fn n(&self) -> usize {
        self.z.n()
    }

    /// `(I − Σ λ_i Z_i*)^{-1} X`.
    fn resolvent(&self, lambda: &[C64], x: &CMat) -> Result<CMat> {
        if lambda.len() != self.z.n() {
            return Err(Error::arg("point dimension differs from alphabet size"));
        }
        let mut m = linalg::eye(self.z.q());
        for (i, l) in lambda.iter().enumerate() {
            m -= self.z.get(i).adjoint() * *l;
        }
        linalg::solve(&m, x).ok_or_else(|| Error::Evaluation("I − Σλ_i Z_i* is singular".into()))
    }

    /// `Φ(λ) = B*(I − Σλ_i Z_i*)^{-1} Λ^{-1} C`.
    pub fn phi(&self, lambda: &[C64]) -> Result<CMat> {
        Ok(self.b.adjoint() * self.resolvent(lambda, &self.lambda_inv_c)?)
    }

    /// `Ψ(λ) = t^{-2}[I + C*(I − Σλ_i Z_i*)^{-1} Λ^{-1} C]`.
    pub fn psi(&self, lambda: &[C64]) -> Result<CMat> {
        let h = self.c.ncols();
        let inner =
            linalg::eye(h) + self.c.adjoint() * self.resolvent(lambda, &self.lambda_inv_c)?;
        Ok(inner / C64::new(self.t * self.t, 0.0))
    }

    /// `Θ_t(λ) = Φ(λ) Ψ(λ)^{-1}`.
    pub fn theta(&self, lambda: &[C64]) -> Result<CMat> {
        let psi = self.psi(lambda)?;
        let phi = self.phi(lambda)?;
        let sol = linalg::solve(&psi.transpose(), &phi.transpose())
            .ok_or_else(|| Error::Evaluation("Ψ(λ) is singular".into()))?;
        Ok(sol.transpose())
    }

    fn realizations(&self) -> Result<(Realization, Realization)> {
        let a: Vec<CMat> = self.z.ops().iter().map(|m| m.adjoint()).collect();
        let inputs: Vec<CMat> = a.iter().map(|m| m * &self.lambda_inv_c).collect();
        let phi = Realization::new(
            self.b.adjoint() * &self.lambda_inv_c,
            self.b.adjoint(),
            a.clone(),
            inputs.clone(),
        )?;
        let s = 1.0 / (self.t * self.t);
        let h = self.c.ncols();
        let d = (linalg::eye(h) + self.c.adjoint() * &self.lambda_inv_c).scale(s);
        let psi = Realization::new(d, self.c.adjoint().scale(s), a, inputs)?;
        Ok((phi, psi))
    }

    /// Exact rational realization of `Θ_t = Φ Ψ^{-1}`.
    pub fn realization(&self) -> Result<Realization> {
        let (phi, psi) = self.realizations()?;
        phi.product(&psi.inverse()?)
    }

    /// Realizations of Φ and Ψ separately.
    pub fn factor_realizations(&self) -> Result<(Realization, Realization)> {
        self.realizations()
    }

    /// `Δ(Θ_t) = Ψ(0)^{-1} = t²[I + C*Λ^{-1}C]^{-1}`.
    pub fn delta(&self) -> Result<CMat> {
        let h = self.c.ncols();
        let inner = linalg::eye(h) + self.c.adjoint() * &self.lambda_inv_c;
        let inv = linalg::inverse(&inner)
            .ok_or_else(|| Error::Numerical("I + C*Λ^{-1}C is singular".into()))?;
        Ok(linalg::herm(&inv.scale(self.t * self.t)))
    }

    /// `Σ_α Z_{α̃} L Θ_α` for an arbitrary tuple and left factor.
    pub fn eval_tangential(&self, z: &OperatorTuple, left: &CMat) -> Result<CMat> {
        self.realization()?.eval_tangential(z, left)
    }
}

/// Central (maximal-entropy) interpolant; requires `Λ ≻ 0`.
pub fn np_central(p: &NPProblem) -> Result<StateSpaceInterpolant> {
    let f = np_feasible(p)?;
    if !f.strict {
        return Err(Error::Infeasible {
            reason: "Pick matrix is not positive definite".into(),
            lambda_min: Some(f.lambda_min),
        });
    }
    let (z, b, c) = p.stacked()?;
    StateSpaceInterpolant::new(z, b, c, f.lambda, p.t)
}

/// Closed-form entropy report of the central interpolant.
pub fn np_central_entropy(p: &NPProblem) -> Result<crate::entropy::EntropyReport> {
    let s = np_central(p)?;
    let delta = s.delta()?;
    let entropy = crate::entropy::ln_det(&delta, (p.t * p.t).max(1.0));
    Ok(crate::entropy::EntropyReport {
        delta,
        entropy,
        truncation_degree: 0,
        monotonicity_gap: 0.0,
    })
}

/// Interpolation residuals `‖(BΘ)(Z)_j − C_j‖` per constraint block.
pub fn residuals(
    p: &NPProblem,
    theta_at: &dyn Fn(&[C64]) -> Result<CMat>,
    realization: Option<&Realization>,
) -> Result<Vec<f64>> {
    match &p.variant {
        Variant::Ball { points, b, c } => points
            .iter()
            .zip(b.iter().zip(c))
            .map(|(z, (bj, cj))| Ok(linalg::max_abs(&(bj * theta_at(z)? - cj))))
            .collect(),
        Variant::Operatorial { z, b, c } => {
            let r = realization
                .ok_or_else(|| Error::arg("operatorial residuals need a realization"))?;
            Ok(vec![linalg::max_abs(&(r.eval_tangential(z, b)? - c))])
        }
    }
}

#[derive(Clone, Debug)]
pub struct OptimalBall {
    pub d_inf: f64,
    /// Top generalized eigenvector of `G_C x = λ G_B x`.
    pub x: CMat,
    /// Top eigenvalue is repeated (the attaining vector is not unique).
    pub non_unique: bool,
    numerator: Realization,
    denominator: Option<Realization>,
    b: CMat,
    c: CMat,
    z: OperatorTuple,
}

impl OptimalBall {
    /// `Θ_opt(λ) = d²·B*(I − Σλ_iZ_i*)^{-1}x / C*(I − Σλ_iZ_i*)^{-1}x`.
    pub fn evaluate(&self, lambda: &[C64]) -> Result<CMat> {
        if self.denominator.is_none() {
            return Ok(linalg::zeros(self.b.ncols(), 1));
        }
        let mut m = linalg::eye(self.z.q());
        for (i, l) in lambda.iter().enumerate() {
            m -= self.z.get(i).adjoint() * *l;
        }
        let r = linalg::solve(&m, &self.x)
            .ok_or_else(|| Error::Evaluation("I − Σλ_i Z_i* is singular".into()))?;
        let den = (self.c.adjoint() * &r)[(0, 0)];
        if den.norm() <= 1e-14 * linalg::max_abs(&self.x).max(1e-300) {
            return Err(Error::Evaluation(
                "denominator vanishes at the evaluation point".into(),
            ));
        }
        Ok(self.b.adjoint() * r * (C64::new(self.d_inf * self.d_inf, 0.0) / den))
    }

    /// Exact realization `d²·N·Den^{-1}`.
    pub fn realization(&self) -> Result<Realization> {
        match &self.denominator {
            None => Realization::constant(self.z.n(), linalg::zeros(self.b.ncols(), 1)),
            Some(den) => self
                .numerator
                .scale_left(&linalg::eye(self.b.ncols()).scale(self.d_inf * self.d_inf))?
                .product(&den.inverse()?),
        }
    }
}

/// Norm-optimal solution for scalar domain `H = C`.
pub fn np_optimal_ball(p: &NPProblem) -> Result<OptimalBall> {
    if p.h_dim() != 1 {
        return Err(Error::arg(
            "the optimal route needs a scalar domain (C_j columns = 1)",
        ));
    }
    let (z, b, c) = p.stacked()?;
    let (gb, gc) = p.grammians()?;
    let chol = linalg::herm(&gb)
        .cholesky()
        .ok_or_else(|| Error::arg("G_B is not positive definite"))?;
    let l = chol.l();
    let diag_min = (0..l.nrows())
        .map(|i| l[(i, i)].re)
        .fold(f64::INFINITY, f64::min);
    let diag_max = (0..l.nrows()).map(|i| l[(i, i)].re).fold(0.0_f64, f64::max);
    if !(diag_min > 1e-8 * diag_max) {
        return Err(Error::arg("G_B is numerically singular"));
    }
    let linv = linalg::inverse(&l).ok_or_else(|| Error::arg("G_B is singular"))?;
    let w = &linv * gc * linv.adjoint();
    let (vals, vecs) = linalg::eigh(&w);
    let top = vals.len() - 1;
    let lmax = vals[top].max(0.0);
    let non_unique = top > 0 && (vals[top] - vals[top - 1]).abs() <= 1e-9 * lmax.max(1e-300);
    let u = vecs.column(top).into_owned();
    let x = linv.adjoint() * CMat::from_column_slice(u.len(), 1, u.as_slice());
    let d_inf = lmax.sqrt();
    let a: Vec<CMat> = z.ops().iter().map(|m| m.adjoint()).collect();
    let inputs: Vec<CMat> = a.iter().map(|m| m * &x).collect();
    let numerator = Realization::new(b.adjoint() * &x, b.adjoint(), a.clone(), inputs.clone())?;
    let denominator = if d_inf <= 1e-14 * linalg::max_abs(&gb).sqrt().max(1e-300) {
        None
    } else {
        let d0 = c.adjoint() * &x;
        if d0[(0, 0)].norm() <= 1e-13 * linalg::max_abs(&x) * linalg::max_abs(&c).max(1e-300) {
            return Err(Error::Degenerate(
                "C*x vanishes; the quotient formula does not start".into(),
            ));
        }
        Some(Realization::new(d0, c.adjoint(), a, inputs)?)
    };
    Ok(OptimalBall {
        d_inf,
        x,
        non_unique,
        numerator,
        denominator,
        b,
        c,
        z,
    })
}

/// Augments a ball problem with `B_j = I`, `C_j = Θ_max(z_j)` at new points.
pub fn permanence_extend(
    p: &NPProblem,
    theta_max: &StateSpaceInterpolant,
    new_points: &[Vec<C64>],
) -> Result<NPProblem> {
    let (points, b, c) = match &p.variant {
        Variant::Ball { points, b, c } => (points.clone(), b.clone(), c.clone()),
        Variant::Operatorial { .. } => {
            return Err(Error::arg("permanence applies to ball problems"))
        }
    };
    let mut points = points;
    let mut b = b;
    let mut c = c;
    let k = p.k_dim();
    for z in new_points {
        if z.len() != p.n() {
            return Err(Error::arg("new point has the wrong dimension"));
        }
        for q in &points {
            let d: f64 = z.iter().zip(q).map(|(x, y)| (x - y).norm_sqr()).sum();
            if d.sqrt() < 1e-12 {
                return Err(Error::arg("new point coincides with an existing point"));
            }
        }
        let value = theta_max.theta(z)?;
        points.push(z.clone());
        b.push(linalg::eye(k));
        c.push(value);
    }
    NPProblem::ball(points, b, c, p.t)
}

/// Minimum-norm polynomial `R` with `B_j R(z_j) = C_j`, degree ≤ number of points − 1.
pub fn polynomial_interpolant(p: &NPProblem) -> Result<crate::fock::MultiAnalyticSymbol> {
    let (points, b, c) = match &p.variant {
        Variant::Ball { points, b, c } => (points, b, c),
        Variant::Operatorial { .. } => {
            return Err(Error::arg(
                "polynomial interpolants are built for ball data",
            ))
        }
    };
    let n = p.n();
    let deg = points.len() - 1;
    let ix = crate::words::GradedIndex::new(n, deg)?;
    let (kd, hd) = (p.k_dim(), p.h_dim());
    let rows: usize = b.iter().map(|m| m.nrows()).sum();
    let mut l = linalg::zeros(rows, ix.len() * kd);
    let mut r0 = 0;
    for (z, bj) in points.iter().zip(b) {
        let mono = monomials(z, &ix);
        for (g, w) in mono.iter().enumerate() {
            l.view_mut((r0, g * kd), (bj.nrows(), kd))
                .copy_from(&(bj * *w));
        }
        r0 += bj.nrows();
    }
    let rhs = linalg::vstack(c);
    let llh = &l * l.adjoint();
    let y = match linalg::solve_hpd(&llh, &rhs) {
        Some(y) => y,
        None => linalg::pinv_psd(&llh, 1e-13 * linalg::norm_bound(&llh)) * &rhs,
    };
    let sol = l.adjoint() * y;
    let coeffs = (0..ix.len())
        .map(|g| linalg::block(&sol, g * kd, 0, kd, hd))
        .collect();
    crate::fock::MultiAnalyticSymbol::from_dense(n, kd, hd, deg, coeffs)
}

/// `z^α` for every word of the index, in index order.
pub(crate) fn monomials(z: &[C64], ix: &crate::words::GradedIndex) -> Vec<C64> {
    let mut out = vec![C64::new(1.0, 0.0); ix.len()];
    for g in 1..ix.len() {
        let k = ix.degree(g);
        let (_, r) = ix.split(g);
        out[g] = out[ix.prefix(g, k - 1)] * z[r % ix.n()];
    }
    out
}
