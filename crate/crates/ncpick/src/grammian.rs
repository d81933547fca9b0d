//! Operator tuples, joint spectral radius, controllability grammians and evaluation at tuples.

use crate::error::{Error, Result};
use crate::fock::MultiAnalyticSymbol;
use crate::linalg::{self, CMat, C64};

/// Default cap on power iterations for the spectral radius.
pub const RADIUS_MAX_ITER: usize = 500;

/// Spectral-radius threshold above which the grammian uses a direct solve.
const DIRECT_RADIUS: f64 = 0.95;

/// Largest state dimension for the vectorized direct Lyapunov solve.
const DIRECT_MAX_Q: usize = 32;

#[derive(Clone, Debug, PartialEq)]
pub struct OperatorTuple {
    z: Vec<CMat>,
}

impl OperatorTuple {
    pub fn new(z: Vec<CMat>) -> Result<Self> {
        let first = z
            .first()
            .ok_or_else(|| Error::arg("tuple must have at least one operator"))?;
        let q = first.nrows();
        if z.iter().any(|m| m.nrows() != q || m.ncols() != q) {
            return Err(Error::arg(
                "tuple operators must share one square dimension",
            ));
        }
        Ok(OperatorTuple { z })
    }

    /// Diagonal tuple with `Z_i = diag_j(z_{j,i} I_{dims[j]})` built from ball points.
    pub fn from_ball_points(points: &[Vec<C64>], dims: &[usize]) -> Result<Self> {
        if points.is_empty() || points.len() != dims.len() {
            return Err(Error::arg("need one block dimension per point"));
        }
        let n = points[0].len();
        if n == 0 || points.iter().any(|p| p.len() != n) {
            return Err(Error::arg("points must share one dimension n ≥ 1"));
        }
        let q: usize = dims.iter().sum();
        let mut z = vec![linalg::zeros(q, q); n];
        let mut off = 0;
        for (p, &dj) in points.iter().zip(dims) {
            for (i, zi) in z.iter_mut().enumerate() {
                for k in 0..dj {
                    zi[(off + k, off + k)] = p[i];
                }
            }
            off += dj;
        }
        OperatorTuple::new(z)
    }

    pub fn n(&self) -> usize {
        self.z.len()
    }

    pub fn q(&self) -> usize {
        self.z[0].nrows()
    }

    pub fn get(&self, i: usize) -> &CMat {
        &self.z[i]
    }

    pub fn ops(&self) -> &[CMat] {
        &self.z
    }

    pub fn adjoint(&self) -> OperatorTuple {
        OperatorTuple {
            z: self.z.iter().map(|m| m.adjoint()).collect(),
        }
    }

    /// `Φ(X) = Σ Z_i X Z_i*`.
    pub fn cp_map(&self, x: &CMat) -> CMat {
        let mut out = linalg::zeros(self.q(), self.q());
        for zi in &self.z {
            out += linalg::matmul(&linalg::matmul(zi, x), &zi.adjoint());
        }
        out
    }

    /// `Z_{i_1} ⋯ Z_{i_k}` for the given letters.
    pub fn word_product(&self, letters: &[u32]) -> CMat {
        letters.iter().fold(linalg::eye(self.q()), |acc, &l| {
            acc * &self.z[l as usize - 1]
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralRadius {
    pub estimate: f64,
    pub converged: bool,
    pub iterations: usize,
}

/// Relative accuracy of the radius used as a convergence guard.
const GUARD_TOL: f64 = 1e-6;

/// Krylov dimension between restarts of [`spectral_radius`].
const KRYLOV_DIM: usize = 40;

/// Steps between Ritz convergence checks.
const RITZ_EVERY: usize = 5;

fn frob_inner(a: &CMat, b: &CMat) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// `r(Z)` as the square root of the spectral radius of `Φ`, by restarted Arnoldi on `Φ` from `I`.
///
/// `iterations` counts applications of `Φ`. Convergence is declared when the Ritz residual of the
/// dominant Ritz pair falls below `tol` relative to the eigenvalue, or the estimate is unchanged
/// across a restart; an invariant Krylov space gives the exact value.
pub fn spectral_radius(z: &OperatorTuple, tol: f64, k_max: usize) -> SpectralRadius {
    let q = z.q();
    if q == 0 {
        return SpectralRadius {
            estimate: 0.0,
            converged: true,
            iterations: 0,
        };
    }
    let mut v0 = linalg::eye(q) / C64::new((q as f64).sqrt(), 0.0);
    let mut applied = 0;
    let mut prev = f64::NAN;
    loop {
        let mut basis = vec![v0];
        let mut h = linalg::zeros(KRYLOV_DIM + 1, KRYLOV_DIM);
        let mut dim = 0;
        let mut invariant = false;
        let mut ritz = (C64::new(0.0, 0.0), linalg::zeros(0, 1));
        for j in 0..KRYLOV_DIM {
            if applied >= k_max.max(1) {
                break;
            }
            let mut w = z.cp_map(&basis[j]);
            applied += 1;
            let scale = linalg::fro(&w);
            for _ in 0..2 {
                for (i, v) in basis.iter().enumerate() {
                    let c = frob_inner(v, &w);
                    h[(i, j)] += c;
                    w -= v * c;
                }
            }
            let nw = linalg::fro(&w);
            h[(j + 1, j)] = C64::new(nw, 0.0);
            dim = j + 1;
            if nw <= 1e-13 * scale || scale <= 1e-300 {
                invariant = true;
                break;
            }
            basis.push(w / C64::new(nw, 0.0));
            if dim % RITZ_EVERY == 0 {
                ritz = dominant_ritz(&linalg::block(&h, 0, 0, dim, dim));
                let (theta, y) = &ritz;
                let residual = nw * y[(dim - 1, 0)].norm() / y.norm().max(1e-300);
                if residual <= tol * theta.norm() {
                    return SpectralRadius {
                        estimate: theta.norm().sqrt(),
                        converged: true,
                        iterations: applied,
                    };
                }
            }
        }
        if invariant || ritz.1.nrows() != dim {
            ritz = dominant_ritz(&linalg::block(&h, 0, 0, dim, dim));
        }
        let (theta, y) = ritz;
        let est = theta.norm().sqrt();
        if invariant {
            return SpectralRadius {
                estimate: est,
                converged: true,
                iterations: applied,
            };
        }
        if (est - prev).abs() <= tol * est.max(1e-300) {
            return SpectralRadius {
                estimate: est,
                converged: true,
                iterations: applied,
            };
        }
        if applied >= k_max.max(1) {
            return SpectralRadius {
                estimate: est,
                converged: false,
                iterations: applied,
            };
        }
        prev = est;
        let mut next = linalg::zeros(q, q);
        for (i, v) in basis.iter().take(dim).enumerate() {
            next += v * y[(i, 0)];
        }
        let nn = linalg::fro(&next);
        if nn <= 1e-300 {
            return SpectralRadius {
                estimate: est,
                converged: false,
                iterations: applied,
            };
        }
        v0 = next / C64::new(nn, 0.0);
    }
}

/// Largest-modulus eigenvalue of a small matrix and an eigenvector by inverse iteration.
fn dominant_ritz(h: &CMat) -> (C64, CMat) {
    let k = h.nrows();
    let eig = h
        .clone()
        .schur()
        .eigenvalues()
        .expect("complex Schur form is triangular");
    let theta =
        eig.iter().copied().fold(
            C64::new(0.0, 0.0),
            |a, b| if b.norm() > a.norm() { b } else { a },
        );
    let shift = theta + C64::new(1e-12 * theta.norm().max(1e-300), 0.0);
    let shifted = h - linalg::eye(k) * shift;
    let mut y = CMat::from_element(k, 1, C64::new(1.0, 0.0));
    for _ in 0..2 {
        match linalg::solve(&shifted, &y) {
            Some(next) if next.norm().is_finite() && next.norm() > 0.0 => {
                let n = next.norm();
                y = next / C64::new(n, 0.0);
            }
            _ => break,
        }
    }
    (theta, y)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Grammian {
    pub g: CMat,
    pub iterations: usize,
    pub residual: f64,
}

/// Relative fixed-point residual `‖G − Σ Z_i G Z_i* − CC*‖ / ‖G‖`.
pub fn grammian_residual(z: &OperatorTuple, c: &CMat, g: &CMat) -> f64 {
    let r = g - z.cp_map(g) - c * c.adjoint();
    linalg::max_abs(&r) / linalg::max_abs(g).max(1e-300)
}

/// Unique PSD solution of `X = Σ Z_i X Z_i* + CC*`.
pub fn grammian(z: &OperatorTuple, c: &CMat, tol: f64) -> Result<Grammian> {
    if c.nrows() != z.q() {
        return Err(Error::arg(
            "C must have as many rows as the tuple dimension",
        ));
    }
    let r = spectral_radius(z, GUARD_TOL, RADIUS_MAX_ITER);
    if r.estimate >= 1.0 {
        return Err(Error::Divergence(format!(
            "spectral radius {} ≥ 1",
            r.estimate
        )));
    }
    let cc = c * c.adjoint();
    if r.estimate > DIRECT_RADIUS && z.q() <= DIRECT_MAX_Q {
        let g = direct_lyapunov(z, &cc)?;
        let residual = grammian_residual(z, c, &g);
        return Ok(Grammian {
            g,
            iterations: 0,
            residual,
        });
    }
    let rate = r.estimate.max(1e-3).powi(2);
    let cap = ((tol.max(1e-300).ln() / rate.ln()).abs() as usize * 4 + 200).min(2_000_000);
    let mut x = cc.clone();
    for k in 1..=cap {
        let next = z.cp_map(&x) + &cc;
        let diff = linalg::max_abs(&(&next - &x));
        x = linalg::herm(&next);
        if diff <= tol * linalg::max_abs(&x).max(1e-300) {
            let residual = grammian_residual(z, c, &x);
            return Ok(Grammian {
                g: x,
                iterations: k,
                residual,
            });
        }
    }
    Err(Error::Divergence(
        "grammian iteration did not converge".into(),
    ))
}

fn direct_lyapunov(z: &OperatorTuple, q: &CMat) -> Result<CMat> {
    let d = z.q();
    let mut sys = linalg::eye(d * d);
    // vec(Z X Z*) = (conj(Z) ⊗ Z) vec(X), column-major.
    for zi in z.ops() {
        let zc = zi.map(|w| w.conj());
        for a in 0..d {
            for b in 0..d {
                let s = zc[(a, b)];
                if s == C64::new(0.0, 0.0) {
                    continue;
                }
                for i in 0..d {
                    for j in 0..d {
                        sys[(a * d + i, b * d + j)] -= s * zi[(i, j)];
                    }
                }
            }
        }
    }
    let rhs = CMat::from_column_slice(d * d, 1, q.as_slice());
    let sol = linalg::solve(&sys, &rhs)
        .ok_or_else(|| Error::Numerical("singular Lyapunov system".into()))?;
    Ok(linalg::herm(&CMat::from_column_slice(d, d, sol.as_slice())))
}

/// Solves the Stein equation `X = Q + Σ A_i* X A_i`.
pub fn stein_adjoint(a: &[CMat], q: &CMat, tol: f64) -> Result<CMat> {
    if a.is_empty() || q.nrows() == 0 {
        return Ok(q.clone());
    }
    let tuple = OperatorTuple::new(a.iter().map(|m| m.adjoint()).collect())?;
    let root = linalg::psd_sqrt(q);
    Ok(grammian(&tuple, &root, tol)?.g)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Evaluation {
    pub value: CMat,
    /// Geometric estimate of the neglected tail when the symbol is known only to its degree bound.
    pub tail_bound: f64,
}

/// `f(Z) = Σ_α Z_{α̃} ⊗ A_(α)`, blocks laid out state-major.
pub fn evaluate_symbol(
    f: &MultiAnalyticSymbol,
    z: &OperatorTuple,
    tail_tol: f64,
) -> Result<Evaluation> {
    if f.n() != z.n() {
        return Err(Error::arg("alphabet size differs from tuple length"));
    }
    let r = spectral_radius(z, 1e-10, RADIUS_MAX_ITER);
    if r.estimate >= 1.0 {
        return Err(Error::Divergence(format!(
            "spectral radius {} ≥ 1",
            r.estimate
        )));
    }
    let powers = reversed_powers(z, f.degree());
    let (q, p, m) = (z.q(), f.d_out(), f.d_in());
    let mut value = linalg::zeros(q * p, q * m);
    for (a, za) in powers.iter().enumerate() {
        let c = f.coeff(a);
        if linalg::max_abs(c) == 0.0 {
            continue;
        }
        value += kron(za, c);
    }
    let ix = f.index();
    let k = f.degree();
    let top = (ix.degree_start(k)..ix.len_upto(k))
        .map(|i| linalg::fro(f.coeff(i)))
        .fold(0.0, f64::max);
    let rr = r.estimate;
    let mut tail_bound = top * rr.powi(f.degree() as i32 + 1) / (1.0 - rr).max(1e-300);
    if tail_bound < tail_tol * linalg::max_abs(&value).max(1.0) {
        tail_bound = 0.0;
    }
    Ok(Evaluation { value, tail_bound })
}

/// `Σ_α Z_{α̃} L A_(α)`: the tangential evaluation used by interpolation constraints.
pub fn evaluate_tangential(
    f: &MultiAnalyticSymbol,
    z: &OperatorTuple,
    left: &CMat,
) -> Result<CMat> {
    if f.n() != z.n() || left.nrows() != z.q() || left.ncols() != f.d_out() {
        return Err(Error::arg("tangential evaluation shape mismatch"));
    }
    let powers = reversed_powers(z, f.degree());
    let mut out = linalg::zeros(z.q(), f.d_in());
    for (a, za) in powers.iter().enumerate() {
        let c = f.coeff(a);
        if linalg::max_abs(c) == 0.0 {
            continue;
        }
        out += za * left * c;
    }
    Ok(out)
}

/// `Z_{α̃}` for every word of length ≤ m in graded order.
pub fn reversed_powers(z: &OperatorTuple, m: usize) -> Vec<CMat> {
    let ix = crate::words::GradedIndex::new(z.n(), m).expect("valid alphabet");
    let mut out: Vec<CMat> = Vec::with_capacity(ix.len());
    out.push(linalg::eye(z.q()));
    for a in 1..ix.len() {
        let (k, r) = ix.split(a);
        let head = ix.join(k - 1, r / z.n());
        let last = r % z.n();
        // α = α' g_i gives α̃ = g_i α̃'.
        let next = z.get(last) * &out[head];
        out.push(next);
    }
    out
}

pub(crate) fn kron(a: &CMat, b: &CMat) -> CMat {
    let (p, q) = (b.nrows(), b.ncols());
    let mut out = linalg::zeros(a.nrows() * p, a.ncols() * q);
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            let s = a[(i, j)];
            if s == C64::new(0.0, 0.0) {
                continue;
            }
            out.view_mut((i * p, j * q), (p, q)).copy_from(&(b * s));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_geometric_series() {
        let z = OperatorTuple::new(vec![linalg::scalar(C64::new(0.5, 0.0))]).unwrap();
        let c = linalg::scalar(C64::new(2.0, 0.0));
        let g = grammian(&z, &c, 1e-14).unwrap();
        assert!((g.g[(0, 0)].re - 4.0 / 0.75).abs() < 1e-12);
        let r = spectral_radius(&z, 1e-12, 500);
        assert!((r.estimate - 0.5).abs() < 1e-12);
    }

    #[test]
    fn direct_solve_agrees_with_iteration() {
        let z = OperatorTuple::new(vec![
            CMat::from_fn(3, 3, |i, j| C64::new(0.1 * (i + j) as f64, 0.05 * i as f64)),
            CMat::from_fn(3, 3, |i, j| {
                C64::new(0.2 * (i == j) as u8 as f64, -0.03 * j as f64)
            }),
        ])
        .unwrap();
        let c = CMat::from_fn(3, 2, |i, j| C64::new(1.0 + i as f64, j as f64));
        let q = &c * c.adjoint();
        let g1 = grammian(&z, &c, 1e-15).unwrap().g;
        let g2 = direct_lyapunov(&z, &q).unwrap();
        assert!(linalg::max_abs(&(&g1 - &g2)) < 1e-10 * linalg::max_abs(&g1));
    }
}
