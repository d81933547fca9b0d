//! Rational noncommutative power series in transfer-function form.
//!
//! A realization `(D, C, A_1..A_n, B_1..B_n)` encodes the coefficients
//! `s_{g_0} = D` and `s_{β g_i} = C A_β B_i` with `A_β = A_{β_1} ⋯ A_{β_k}`.
//! Products, inverses and sums of realizations follow the convolution rule of
//! [`MultiAnalyticSymbol::mul`], so compositions such as `θ ψ^{-1}` are
//! represented exactly and their kernels can be computed from a Stein equation
//! instead of a truncated sum.

use crate::error::{Error, Result};
use crate::fock::MultiAnalyticSymbol;
use crate::grammian::{self, OperatorTuple};
use crate::linalg::{self, CMat, C64};
use crate::words::GradedIndex;

/// Largest `q·N` for direct solves of the evaluation equation.
const DIRECT_EVAL_DIM: usize = 1500;

#[derive(Clone, Debug, PartialEq)]
pub struct Realization {
    n: usize,
    d: CMat,
    c: CMat,
    a: Vec<CMat>,
    b: Vec<CMat>,
}

impl Realization {
    pub fn new(d: CMat, c: CMat, a: Vec<CMat>, b: Vec<CMat>) -> Result<Self> {
        let n = a.len();
        if n == 0 || b.len() != n {
            return Err(Error::arg(
                "realization needs n ≥ 1 state operators and inputs",
            ));
        }
        let s = c.ncols();
        if c.nrows() != d.nrows()
            || a.iter().any(|m| m.nrows() != s || m.ncols() != s)
            || b.iter().any(|m| m.nrows() != s || m.ncols() != d.ncols())
        {
            return Err(Error::arg("realization shape mismatch"));
        }
        Ok(Realization { n, d, c, a, b })
    }

    pub fn constant(n: usize, d: CMat) -> Result<Self> {
        let (p, m) = (d.nrows(), d.ncols());
        Realization::new(
            d,
            linalg::zeros(p, 0),
            vec![linalg::zeros(0, 0); n],
            vec![linalg::zeros(0, m); n],
        )
    }

    /// Finite realization with one state block per nonempty word of length ≤ deg θ.
    pub fn from_polynomial(theta: &MultiAnalyticSymbol) -> Result<Self> {
        let (n, p, m) = (theta.n(), theta.d_out(), theta.d_in());
        let deg = theta.degree();
        if deg == 0 {
            return Realization::constant(n, theta.at_zero().clone());
        }
        let ix = GradedIndex::new(n, deg)?;
        let words = ix.len() - 1;
        let s = words * m;
        let one = C64::new(1.0, 0.0);
        let mut c = linalg::zeros(p, s);
        let mut a = vec![linalg::zeros(s, s); n];
        let mut b = vec![linalg::zeros(s, m); n];
        let tix = theta.index();
        for g in 1..ix.len() {
            let (k, r) = ix.split(g);
            let col = (g - 1) * m;
            c.view_mut((0, col), (p, m))
                .copy_from(theta.coeff(tix.join(k, r)));
            for i in 1..=n {
                if let Some(h) = ix.prepend(i, g) {
                    for j in 0..m {
                        a[i - 1][((h - 1) * m + j, col + j)] = one;
                    }
                }
            }
        }
        for i in 1..=n {
            let g = ix.join(1, i - 1);
            for j in 0..m {
                b[i - 1][((g - 1) * m + j, j)] = one;
            }
        }
        Realization::new(theta.at_zero().clone(), c, a, b)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d_out(&self) -> usize {
        self.d.nrows()
    }

    pub fn d_in(&self) -> usize {
        self.d.ncols()
    }

    pub fn state_dim(&self) -> usize {
        self.c.ncols()
    }

    pub fn feedthrough(&self) -> &CMat {
        &self.d
    }

    pub fn output(&self) -> &CMat {
        &self.c
    }

    pub fn state_ops(&self) -> &[CMat] {
        &self.a
    }

    pub fn inputs(&self) -> &[CMat] {
        &self.b
    }

    /// Joint spectral radius of the state tuple (0 for a constant).
    pub fn state_radius(&self) -> f64 {
        if self.state_dim() == 0 {
            return 0.0;
        }
        let t = OperatorTuple::new(self.a.clone()).expect("square state operators");
        grammian::spectral_radius(&t, 1e-10, grammian::RADIUS_MAX_ITER).estimate
    }

    /// Convolution product `self · other`.
    pub fn product(&self, other: &Realization) -> Result<Realization> {
        if self.n != other.n || self.d_in() != other.d_out() {
            return Err(Error::arg("realization product shape mismatch"));
        }
        let (s1, s2) = (self.state_dim(), other.state_dim());
        let a = (0..self.n)
            .map(|i| {
                let mut m = linalg::zeros(s1 + s2, s1 + s2);
                m.view_mut((0, 0), (s1, s1)).copy_from(&self.a[i]);
                m.view_mut((0, s1), (s1, s2))
                    .copy_from(&(&self.b[i] * &other.c));
                m.view_mut((s1, s1), (s2, s2)).copy_from(&other.a[i]);
                m
            })
            .collect();
        let b = (0..self.n)
            .map(|i| linalg::vstack(&[&self.b[i] * &other.d, other.b[i].clone()]))
            .collect();
        let c = linalg::hstack(&[self.c.clone(), &self.d * &other.c]);
        Realization::new(&self.d * &other.d, c, a, b)
    }

    /// Realization of the inverse series; needs an invertible feedthrough.
    pub fn inverse(&self) -> Result<Realization> {
        if self.d_in() != self.d_out() {
            return Err(Error::arg("only square realizations have inverses"));
        }
        let dinv = linalg::inverse(&self.d)
            .ok_or_else(|| Error::Numerical("feedthrough is singular".into()))?;
        let c = -(&dinv * &self.c);
        let a = (0..self.n)
            .map(|i| &self.a[i] - &self.b[i] * &dinv * &self.c)
            .collect();
        let b = (0..self.n).map(|i| &self.b[i] * &dinv).collect();
        Realization::new(dinv, c, a, b)
    }

    pub fn sum(&self, other: &Realization) -> Result<Realization> {
        if self.n != other.n || self.d_in() != other.d_in() || self.d_out() != other.d_out() {
            return Err(Error::arg("realization sum shape mismatch"));
        }
        let a = (0..self.n)
            .map(|i| linalg::block_diag(&[self.a[i].clone(), other.a[i].clone()]))
            .collect();
        let b = (0..self.n)
            .map(|i| linalg::vstack(&[self.b[i].clone(), other.b[i].clone()]))
            .collect();
        Realization::new(
            &self.d + &other.d,
            linalg::hstack(&[self.c.clone(), other.c.clone()]),
            a,
            b,
        )
    }

    /// `N · self`.
    pub fn scale_left(&self, left: &CMat) -> Result<Realization> {
        if left.ncols() != self.d_out() {
            return Err(Error::arg("left factor shape mismatch"));
        }
        Realization::new(
            left * &self.d,
            left * &self.c,
            self.a.clone(),
            self.b.clone(),
        )
    }

    /// `self · N`.
    pub fn scale_right(&self, right: &CMat) -> Result<Realization> {
        if right.nrows() != self.d_in() {
            return Err(Error::arg("right factor shape mismatch"));
        }
        let b = self.b.iter().map(|m| m * right).collect();
        Realization::new(&self.d * right, self.c.clone(), self.a.clone(), b)
    }

    /// `A_ρ B_j` for every nonempty word `w = ρ g_j` of length ≤ m, indexed by graded index minus one.
    fn state_columns(&self, m: usize) -> Result<(GradedIndex, Vec<CMat>)> {
        let ix = GradedIndex::new(self.n, m)?;
        let mut v: Vec<CMat> = Vec::with_capacity(ix.len().saturating_sub(1));
        for g in 1..ix.len() {
            let (k, r) = ix.split(g);
            let first = r / ix.power(k - 1);
            let col = if k == 1 {
                self.b[first].clone()
            } else {
                let rest = ix.suffix_after(g, 1);
                &self.a[first] * &v[rest - 1]
            };
            v.push(col);
        }
        Ok((ix, v))
    }

    /// Fourier coefficients up to degree `bound`.
    pub fn coefficients(&self, bound: usize) -> Result<MultiAnalyticSymbol> {
        let (ix, v) = self.state_columns(bound)?;
        let mut coeffs = Vec::with_capacity(ix.len());
        coeffs.push(self.d.clone());
        coeffs.extend(v.iter().map(|col| &self.c * col));
        MultiAnalyticSymbol::from_dense(self.n, self.d_out(), self.d_in(), bound, coeffs)
    }

    /// Observability solution `X = C*C + Σ A_i* X A_i`.
    pub fn observability(&self, tol: f64) -> Result<CMat> {
        grammian::stein_adjoint(&self.a, &(self.c.adjoint() * &self.c), tol)
    }

    /// Exact multi-Toeplitz kernel `K(α) = Σ_β s_β* s_{β α̃}` for |α| ≤ m.
    pub fn kernel(&self, m: usize, tol: f64) -> Result<MultiAnalyticSymbol> {
        let x = self.observability(tol)?;
        let (ix, v) = self.state_columns(m)?;
        let mut coeffs = Vec::with_capacity(ix.len());
        let mut k0 = self.d.adjoint() * &self.d;
        for bi in &self.b {
            k0 += bi.adjoint() * &x * bi;
        }
        coeffs.push(linalg::herm(&k0));
        for g in 1..ix.len() {
            let rv = ix.reverse(g);
            let col = &v[rv - 1];
            let mut k = self.d.adjoint() * &self.c * col;
            for i in 0..self.n {
                k += self.b[i].adjoint() * &x * &self.a[i] * col;
            }
            coeffs.push(k);
        }
        MultiAnalyticSymbol::from_dense(self.n, self.d_in(), self.d_in(), m, coeffs)
    }

    /// Commutative evaluation `D + C(I − Σ λ_i A_i)^{-1} Σ λ_i B_i`.
    pub fn eval_point(&self, lambda: &[C64]) -> Result<CMat> {
        if lambda.len() != self.n {
            return Err(Error::arg("point dimension differs from alphabet size"));
        }
        let s = self.state_dim();
        if s == 0 {
            return Ok(self.d.clone());
        }
        let mut lhs = linalg::eye(s);
        let mut rhs = linalg::zeros(s, self.d_in());
        for i in 0..self.n {
            lhs -= &self.a[i] * lambda[i];
            rhs += &self.b[i] * lambda[i];
        }
        let x = linalg::solve(&lhs, &rhs)
            .ok_or_else(|| Error::Evaluation("resolvent is singular".into()))?;
        Ok(&self.d + &self.c * x)
    }

    /// Tangential evaluation `Σ_α Z_{α̃} L s_α = L D + Σ_i Z_i Y B_i` with `Y = L C + Σ_j Z_j Y A_j`.
    pub fn eval_tangential(&self, z: &OperatorTuple, left: &CMat) -> Result<CMat> {
        if z.n() != self.n || left.nrows() != z.q() || left.ncols() != self.d_out() {
            return Err(Error::arg("tangential evaluation shape mismatch"));
        }
        let s = self.state_dim();
        let mut out = left * &self.d;
        if s == 0 {
            return Ok(out);
        }
        let q = z.q();
        let lc = left * &self.c;
        let y = if q * s <= DIRECT_EVAL_DIM {
            let mut sys = linalg::eye(q * s);
            for j in 0..self.n {
                let aj = &self.a[j];
                let zj = z.get(j);
                for a in 0..s {
                    for b in 0..s {
                        let w = aj[(b, a)];
                        if w == C64::new(0.0, 0.0) {
                            continue;
                        }
                        for r in 0..q {
                            for c in 0..q {
                                sys[(a * q + r, b * q + c)] -= w * zj[(r, c)];
                            }
                        }
                    }
                }
            }
            let rhs = CMat::from_column_slice(q * s, 1, lc.as_slice());
            let sol = linalg::solve(&sys, &rhs)
                .ok_or_else(|| Error::Evaluation("evaluation system is singular".into()))?;
            CMat::from_column_slice(q, s, sol.as_slice())
        } else {
            let mut y = lc.clone();
            let mut done = false;
            for _ in 0..100_000 {
                let mut next = lc.clone();
                for j in 0..self.n {
                    next += z.get(j) * &y * &self.a[j];
                }
                let diff = linalg::max_abs(&(&next - &y));
                y = next;
                if diff <= 1e-15 * linalg::max_abs(&y).max(1e-300) {
                    done = true;
                    break;
                }
            }
            if !done {
                return Err(Error::Divergence(
                    "evaluation series did not converge".into(),
                ));
            }
            y
        };
        for i in 0..self.n {
            out += z.get(i) * &y * &self.b[i];
        }
        Ok(out)
    }

    /// `I_q ⊗ self`, so that `(I ⊗ f)` evaluated tangentially with `Z ⊗ I` gives `Σ Z_{α̃} ⊗ s_α`.
    pub fn lift(&self, q: usize) -> Result<Realization> {
        let k = |m: &CMat| grammian::kron(&linalg::eye(q), m);
        Realization::new(
            k(&self.d),
            k(&self.c),
            self.a.iter().map(k).collect(),
            self.b.iter().map(k).collect(),
        )
    }

    /// `f(Z) = Σ_α Z_{α̃} ⊗ s_α` in the same layout as [`grammian::evaluate_symbol`].
    pub fn eval_tuple(&self, z: &OperatorTuple) -> Result<CMat> {
        let p = self.d_out();
        let zl = OperatorTuple::new(
            z.ops()
                .iter()
                .map(|m| grammian::kron(m, &linalg::eye(p)))
                .collect(),
        )?;
        self.lift(z.q())?
            .eval_tangential(&zl, &linalg::eye(z.q() * p))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(n: usize, seed: u64) -> MultiAnalyticSymbol {
        let mut pairs = Vec::new();
        let words = crate::words::enumerate(n, 2).unwrap();
        for (k, w) in words.into_iter().enumerate() {
            let x = ((k as u64 * 7919 + seed * 104729) % 1000) as f64 / 1000.0 - 0.5;
            let y = ((k as u64 * 104723 + seed * 7907) % 1000) as f64 / 1000.0 - 0.5;
            let c = if w.is_identity() {
                C64::new(1.5, 0.0)
            } else {
                C64::new(x, y) * 0.4
            };
            pairs.push((w, linalg::scalar(c)));
        }
        MultiAnalyticSymbol::from_pairs(n, 1, 1, &pairs).unwrap()
    }

    #[test]
    fn polynomial_coefficients_round_trip() {
        let s = sample(2, 1);
        let r = Realization::from_polynomial(&s).unwrap();
        let back = r.coefficients(4).unwrap();
        assert_eq!(back.with_bound(2).unwrap(), s.with_bound(2).unwrap());
        assert!(back.coeffs()[7..].iter().all(|c| linalg::max_abs(c) == 0.0));
    }

    #[test]
    fn product_and_inverse_match_series() {
        let (a, b) = (sample(2, 1), sample(2, 2));
        let ra = Realization::from_polynomial(&a).unwrap();
        let rb = Realization::from_polynomial(&b).unwrap();
        let prod = ra
            .product(&rb.inverse().unwrap())
            .unwrap()
            .coefficients(5)
            .unwrap();
        let series = a.mul(&b.inverse_series(5).unwrap(), 5).unwrap();
        for g in 0..prod.coeffs().len() {
            assert!(linalg::max_abs(&(prod.coeff(g) - series.coeff(g))) < 1e-12);
        }
    }

    #[test]
    fn point_evaluation_matches_polynomial() {
        let s = sample(2, 3);
        let r = Realization::from_polynomial(&s).unwrap();
        let lam = [C64::new(0.3, -0.1), C64::new(-0.2, 0.25)];
        let a = r.eval_point(&lam).unwrap();
        let b = s.evaluate_commutative(&lam).unwrap();
        assert!(linalg::max_abs(&(a - b)) < 1e-13);
    }
}
