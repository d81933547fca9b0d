//! Dense complex linear algebra helpers over nalgebra.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;

/// Dimension at or below which norms use a full SVD.
const SVD_LIMIT: usize = 400;

/// Flop count above which [`matmul`] splits into real products.
const SPLIT_MATMUL: usize = 1 << 15;

pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn zeros(r: usize, c: usize) -> CMat {
    CMat::zeros(r, c)
}

pub fn eye(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn scalar(z: C64) -> CMat {
    CMat::from_element(1, 1, z)
}

pub fn real_scaled(m: &CMat, s: f64) -> CMat {
    m.map(|z| z * s)
}

/// Hermitian part (M + M*)/2.
pub fn herm(m: &CMat) -> CMat {
    (m + m.adjoint()).map(|z| z * 0.5)
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

pub fn fro(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Upper bound for the spectral norm used to scale relative tolerances.
pub fn norm_bound(m: &CMat) -> f64 {
    let rows = (0..m.nrows())
        .map(|i| m.row(i).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0_f64, f64::max);
    let cols = (0..m.ncols())
        .map(|j| m.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0_f64, f64::max);
    (rows * cols).sqrt()
}

pub fn hermitian_residual(m: &CMat) -> f64 {
    max_abs(&(m - m.adjoint()))
}

/// Eigen-decomposition of a Hermitian matrix with ascending eigenvalues.
pub fn eigh(m: &CMat) -> (DVector<f64>, CMat) {
    let n = m.nrows();
    if n == 0 {
        return (DVector::zeros(0), zeros(0, 0));
    }
    let se = herm(m).symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
    let vals = DVector::from_iterator(n, order.iter().map(|&i| se.eigenvalues[i]));
    let mut vecs = zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        vecs.set_column(k, &se.eigenvectors.column(i));
    }
    (vals, vecs)
}

pub fn eigvalsh(m: &CMat) -> DVector<f64> {
    eigh(m).0
}

/// Smallest eigenvalue of a Hermitian matrix; Lanczos on `sI − m` above the dense limit.
pub fn lambda_min(m: &CMat) -> f64 {
    let n = m.nrows();
    if n == 0 {
        return 0.0;
    }
    if n <= SVD_LIMIT {
        return herm(m)
            .symmetric_eigenvalues()
            .iter()
            .fold(f64::INFINITY, |a, &x| a.min(x));
    }
    let s = norm_bound(m);
    s - lanczos_top(n, |v| v * C64::new(s, 0.0) - m * v, 1e-14)
}

/// Applies a real function to the spectrum of a Hermitian matrix.
pub fn spectral_map(m: &CMat, f: impl Fn(f64) -> f64) -> CMat {
    let (vals, vecs) = eigh(m);
    let mut scaled = vecs.clone();
    for (j, &lam) in vals.iter().enumerate() {
        let s = f(lam);
        scaled.column_mut(j).iter_mut().for_each(|z| *z *= s);
    }
    herm(&(scaled * vecs.adjoint()))
}

pub fn psd_sqrt(m: &CMat) -> CMat {
    spectral_map(m, |x| x.max(0.0).sqrt())
}

pub fn pd_inv_sqrt(m: &CMat) -> CMat {
    spectral_map(m, |x| 1.0 / x.sqrt())
}

/// Pseudo-inverse of a Hermitian PSD matrix, discarding eigenvalues below `cutoff`.
pub fn pinv_psd(m: &CMat, cutoff: f64) -> CMat {
    spectral_map(m, |x| if x > cutoff { 1.0 / x } else { 0.0 })
}

pub fn solve(a: &CMat, b: &CMat) -> Option<CMat> {
    if a.nrows() == 0 {
        return Some(zeros(0, b.ncols()));
    }
    a.clone().lu().solve(b)
}

pub fn inverse(a: &CMat) -> Option<CMat> {
    if a.nrows() == 0 {
        return Some(zeros(0, 0));
    }
    a.clone().try_inverse()
}

/// Cholesky solve; `None` when the matrix is not numerically positive definite.
pub fn solve_hpd(a: &CMat, b: &CMat) -> Option<CMat> {
    if a.nrows() == 0 {
        return Some(zeros(0, b.ncols()));
    }
    let ch = herm(a).cholesky()?;
    let l = ch.l_dirty();
    let dmin = (0..a.nrows())
        .map(|i| l[(i, i)].re)
        .fold(f64::INFINITY, f64::min);
    let dmax = (0..a.nrows()).map(|i| l[(i, i)].re).fold(0.0_f64, f64::max);
    if !(dmin > 1e-9 * dmax) {
        return None;
    }
    Some(ch.solve(b))
}

/// `a · b`, through four real products for large operands.
pub fn matmul(a: &CMat, b: &CMat) -> CMat {
    if a.nrows() * a.ncols() * b.ncols() < SPLIT_MATMUL {
        return a * b;
    }
    let (ar, ai) = (a.map(|z| z.re), a.map(|z| z.im));
    let (br, bi) = (b.map(|z| z.re), b.map(|z| z.im));
    let re = &ar * &br - &ai * &bi;
    let im = &ar * &bi + &ai * &br;
    re.zip_map(&im, C64::new)
}

/// Mixed-product Kronecker `a ⊗ I_d`.
pub fn kron_eye(a: &CMat, d: usize) -> CMat {
    let mut out = zeros(a.nrows() * d, a.ncols() * d);
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            let z = a[(i, j)];
            if z != C64::new(0.0, 0.0) {
                for k in 0..d {
                    out[(i * d + k, j * d + k)] = z;
                }
            }
        }
    }
    out
}

/// Largest singular value.
pub fn op_norm(m: &CMat) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    if m.nrows().min(m.ncols()) <= SVD_LIMIT {
        return m
            .clone()
            .svd(false, false)
            .singular_values
            .iter()
            .fold(0.0_f64, |a, &s| a.max(s));
    }
    let top = if m.nrows() >= m.ncols() {
        lanczos_top(m.ncols(), |v| m.ad_mul(&(m * v)), 1e-14)
    } else {
        lanczos_top(m.nrows(), |v| m * m.ad_mul(v), 1e-14)
    };
    top.max(0.0).sqrt()
}

/// Largest eigenvalue of a Hermitian matrix by Lanczos with full reorthogonalization.
pub fn lanczos_max(h: &CMat, tol: f64) -> f64 {
    lanczos_top(h.nrows(), |v| h * v, tol)
}

fn lanczos_top(n: usize, apply: impl Fn(&DVector<C64>) -> DVector<C64>, tol: f64) -> f64 {
    let kmax = n.min(400);
    let mut basis: Vec<DVector<C64>> = Vec::with_capacity(kmax);
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut v = DVector::from_fn(n, |i, _| {
        C64::new(1.0 + (i % 7) as f64 * 0.1, (i % 3) as f64 * 0.05)
    });
    let nv = v.norm();
    v /= C64::new(nv, 0.0);
    let mut theta = 0.0;
    for k in 0..kmax {
        basis.push(v.clone());
        let mut w = apply(&v);
        let a = v.dotc(&w).re;
        alpha.push(a);
        for q in &basis {
            let p = q.dotc(&w);
            w -= q * p;
        }
        for q in &basis {
            let p = q.dotc(&w);
            w -= q * p;
        }
        let b = w.norm();
        let t = DMatrix::<f64>::from_fn(k + 1, k + 1, |i, j| {
            if i == j {
                alpha[i]
            } else if i + 1 == j {
                beta[i]
            } else if j + 1 == i {
                beta[j]
            } else {
                0.0
            }
        });
        let se = t.symmetric_eigen();
        let (imax, tmax) =
            se.eigenvalues
                .iter()
                .enumerate()
                .fold(
                    (0, f64::NEG_INFINITY),
                    |acc, (i, &x)| if x > acc.1 { (i, x) } else { acc },
                );
        theta = tmax;
        let resid = (b * se.eigenvectors[(k, imax)]).abs();
        if resid <= tol * theta.abs().max(1e-300) || b <= 1e-300 {
            break;
        }
        beta.push(b);
        v = w / C64::new(b, 0.0);
    }
    theta
}

/// Stacks matrices vertically.
pub fn vstack(blocks: &[CMat]) -> CMat {
    let cols = blocks.first().map(|b| b.ncols()).unwrap_or(0);
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = zeros(rows, cols);
    let mut r = 0;
    for b in blocks {
        out.view_mut((r, 0), (b.nrows(), cols)).copy_from(b);
        r += b.nrows();
    }
    out
}

/// Stacks matrices horizontally.
pub fn hstack(blocks: &[CMat]) -> CMat {
    let rows = blocks.first().map(|b| b.nrows()).unwrap_or(0);
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = zeros(rows, cols);
    let mut c = 0;
    for b in blocks {
        out.view_mut((0, c), (rows, b.ncols())).copy_from(b);
        c += b.ncols();
    }
    out
}

/// Block-diagonal assembly.
pub fn block_diag(blocks: &[CMat]) -> CMat {
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = zeros(rows, cols);
    let (mut r, mut c) = (0, 0);
    for b in blocks {
        out.view_mut((r, c), (b.nrows(), b.ncols())).copy_from(b);
        r += b.nrows();
        c += b.ncols();
    }
    out
}

pub fn block(m: &CMat, r0: usize, c0: usize, nr: usize, nc: usize) -> CMat {
    m.view((r0, c0), (nr, nc)).into_owned()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn large_extremes_match_dense() {
        let a = CMat::from_fn(450, 440, |i, j| {
            C64::new(
                ((i * 7 + j * 3) % 11) as f64 / 11.0,
                ((i + 2 * j) % 5) as f64 / 9.0,
            )
        });
        let h = herm(&(a.adjoint() * &a)) + eye(440).scale(0.25);
        let dense = h.clone().symmetric_eigenvalues();
        let lo = dense.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = dense.iter().cloned().fold(0.0_f64, f64::max);
        assert!((lambda_min(&h) - lo).abs() < 1e-9 * hi);
        assert!(
            (op_norm(&a) - a.clone().svd(false, false).singular_values.max()).abs() < 1e-10 * hi
        );
    }

    #[test]
    fn split_product_matches_direct() {
        let a = CMat::from_fn(40, 37, |i, j| {
            C64::new((i as f64).sin(), (j as f64 * 0.3).cos())
        });
        let b = CMat::from_fn(37, 45, |i, j| {
            C64::new((i * j) as f64 % 1.7, -(i as f64) * 0.01)
        });
        assert!(max_abs(&(matmul(&a, &b) - &a * &b)) < 1e-12);
    }

    #[test]
    fn op_norm_matches_between_svd_and_lanczos() {
        let m = CMat::from_fn(30, 30, |i, j| {
            c64(
                ((i * 7 + j * 3) % 11) as f64 - 5.0,
                (i as f64 - j as f64) * 0.1,
            )
        });
        let h = m.adjoint() * &m;
        let a = op_norm(&m);
        let b = lanczos_max(&h, 1e-14).sqrt();
        assert!((a - b).abs() < 1e-9 * a);
    }

    #[test]
    fn eigh_sorted_and_reconstructs() {
        let m = CMat::from_fn(5, 5, |i, j| c64((i + j) as f64, i as f64 - j as f64));
        let h = herm(&m);
        let (vals, vecs) = eigh(&h);
        for k in 1..vals.len() {
            assert!(vals[k - 1] <= vals[k]);
        }
        let d = CMat::from_diagonal(&vals.map(|x| c64(x, 0.0)));
        assert!(max_abs(&(&vecs * d * vecs.adjoint() - &h)) < 1e-10);
    }

    #[test]
    fn psd_sqrt_squares_back() {
        let m = CMat::from_fn(4, 4, |i, j| {
            c64(if i == j { 3.0 } else { 0.5 }, 0.1 * (i as f64 - j as f64))
        });
        let s = psd_sqrt(&m);
        assert!(max_abs(&(&s * &s - &m)) < 1e-12);
    }
}
