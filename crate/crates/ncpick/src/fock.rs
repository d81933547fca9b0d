//! Truncated full Fock space `F²(H_n) ⊗ E`, creation operators and multi-analytic symbols.
//!
//! Basis vectors `e_α ⊗ ε_j` are laid out word-major (graded order) with the
//! coefficient index varying fastest. Creation operators are nilpotent
//! truncations: anything pushed past degree `m` is dropped.
//!
//! A symbol stores Fourier coefficients `θ_α` so that `θh = Σ_α e_{α̃} ⊗ θ_α h`
//! and `M_θ ~ Σ_α R_α ⊗ θ_α`. The product of two symbols is the convolution
//! `(θφ)_γ = Σ_{γ = αβ} θ_α φ_β`, which is also the product rule for
//! `Σ S_α ⊗ A_(α)` expansions, so the same type carries both.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, C64};
use crate::words::{GradedIndex, Word};

/// Upper limit on dense dimensions; `NCPICK_MAX_DIM` overrides the default.
pub fn max_dense_dim() -> usize {
    std::env::var("NCPICK_MAX_DIM")
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .unwrap_or(20_000)
}

pub(crate) fn check_dim(dim: usize) -> Result<()> {
    let cap = max_dense_dim();
    if dim > cap {
        return Err(Error::arg(format!(
            "dense dimension {dim} exceeds cap {cap}"
        )));
    }
    Ok(())
}

/// Truncation of `F²(H_n) ⊗ C^d` to words of length ≤ m.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FockTruncation {
    pub n: usize,
    pub m: usize,
    pub d: usize,
    index: GradedIndex,
}

impl FockTruncation {
    pub fn new(n: usize, m: usize, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::arg("coefficient dimension must be positive"));
        }
        let index = GradedIndex::new(n, m)?;
        Ok(FockTruncation { n, m, d, index })
    }

    pub fn index(&self) -> &GradedIndex {
        &self.index
    }

    pub fn words(&self) -> usize {
        self.index.len()
    }

    pub fn total_dim(&self) -> usize {
        self.index.len() * self.d
    }

    pub fn with_degree(&self, m: usize) -> Result<Self> {
        FockTruncation::new(self.n, m, self.d)
    }

    pub fn with_coefficients(&self, d: usize) -> Result<Self> {
        FockTruncation::new(self.n, self.m, d)
    }

    /// Basis position of `e_α ⊗ ε_j`.
    pub fn position(&self, word_idx: usize, j: usize) -> usize {
        word_idx * self.d + j
    }
}

fn check_letter(trunc: &FockTruncation, i: usize) -> Result<()> {
    if i == 0 || i > trunc.n {
        return Err(Error::arg(format!("letter {i} outside 1..={}", trunc.n)));
    }
    Ok(())
}

fn word_permutation(trunc: &FockTruncation, map: impl Fn(usize) -> Option<usize>) -> Result<CMat> {
    check_dim(trunc.total_dim())?;
    let one = C64::new(1.0, 0.0);
    let mut out = linalg::zeros(trunc.total_dim(), trunc.total_dim());
    for w in 0..trunc.words() {
        if let Some(v) = map(w) {
            for j in 0..trunc.d {
                out[(trunc.position(v, j), trunc.position(w, j))] = one;
            }
        }
    }
    Ok(out)
}

/// Matrix of `S_i ⊗ I_E`: `e_α ⊗ ε ↦ e_{g_i α} ⊗ ε`, zero at the top degree.
pub fn left_creation(trunc: &FockTruncation, i: usize) -> Result<CMat> {
    check_letter(trunc, i)?;
    word_permutation(trunc, |w| trunc.index().prepend(i, w))
}

/// Matrix of `R_i ⊗ I_E`: `e_α ⊗ ε ↦ e_{α g_i} ⊗ ε`, zero at the top degree.
pub fn right_creation(trunc: &FockTruncation, i: usize) -> Result<CMat> {
    check_letter(trunc, i)?;
    word_permutation(trunc, |w| trunc.index().append(w, i))
}

/// Flipping unitary `e_α ⊗ ε ↦ e_{α̃} ⊗ ε`.
pub fn flip_unitary(trunc: &FockTruncation) -> Result<CMat> {
    word_permutation(trunc, |w| Some(trunc.index().reverse(w)))
}

/// Orthogonal projection onto words of length ≤ k.
pub fn degree_projection(trunc: &FockTruncation, k: usize) -> Result<CMat> {
    if k > trunc.m {
        return Err(Error::arg(format!(
            "degree {k} exceeds truncation {}",
            trunc.m
        )));
    }
    let cut = trunc.index().len_upto(k);
    word_permutation(trunc, |w| if w < cut { Some(w) } else { None })
}

/// Finitely supported Fourier coefficients `θ_α` (each `d_out × d_in`), stored densely up to a degree bound.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiAnalyticSymbol {
    n: usize,
    d_out: usize,
    d_in: usize,
    index: GradedIndex,
    coeffs: Vec<CMat>,
}

impl MultiAnalyticSymbol {
    pub fn zero(n: usize, d_out: usize, d_in: usize, degree_bound: usize) -> Result<Self> {
        let index = GradedIndex::new(n, degree_bound)?;
        let coeffs = vec![linalg::zeros(d_out, d_in); index.len()];
        Ok(MultiAnalyticSymbol {
            n,
            d_out,
            d_in,
            index,
            coeffs,
        })
    }

    pub fn constant(n: usize, c: CMat) -> Result<Self> {
        let mut s = MultiAnalyticSymbol::zero(n, c.nrows(), c.ncols(), 0)?;
        s.coeffs[0] = c;
        Ok(s)
    }

    pub fn identity(n: usize, d: usize) -> Result<Self> {
        MultiAnalyticSymbol::constant(n, linalg::eye(d))
    }

    /// Builds a symbol from `(word, coefficient)` pairs; repeated words add up.
    pub fn from_pairs(n: usize, d_out: usize, d_in: usize, pairs: &[(Word, CMat)]) -> Result<Self> {
        let bound = pairs.iter().map(|(w, _)| w.len()).max().unwrap_or(0);
        let mut s = MultiAnalyticSymbol::zero(n, d_out, d_in, bound)?;
        for (w, c) in pairs {
            if w.alphabet() != n {
                return Err(Error::arg(format!(
                    "word {w} has alphabet {} not {n}",
                    w.alphabet()
                )));
            }
            if c.nrows() != d_out || c.ncols() != d_in {
                return Err(Error::arg(format!(
                    "coefficient {w} is {}x{}, expected {d_out}x{d_in}",
                    c.nrows(),
                    c.ncols()
                )));
            }
            let i = s.index.index(w)?;
            s.coeffs[i] += c;
        }
        Ok(s)
    }

    pub fn from_dense(
        n: usize,
        d_out: usize,
        d_in: usize,
        degree_bound: usize,
        coeffs: Vec<CMat>,
    ) -> Result<Self> {
        let index = GradedIndex::new(n, degree_bound)?;
        if coeffs.len() != index.len() {
            return Err(Error::arg(
                "coefficient count does not match the degree bound",
            ));
        }
        if coeffs
            .iter()
            .any(|c| c.nrows() != d_out || c.ncols() != d_in)
        {
            return Err(Error::arg("coefficient shape mismatch"));
        }
        Ok(MultiAnalyticSymbol {
            n,
            d_out,
            d_in,
            index,
            coeffs,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d_out(&self) -> usize {
        self.d_out
    }

    pub fn d_in(&self) -> usize {
        self.d_in
    }

    pub fn index(&self) -> &GradedIndex {
        &self.index
    }

    pub fn degree_bound(&self) -> usize {
        self.index.max_degree()
    }

    /// Highest degree carrying a nonzero coefficient (0 for the zero symbol).
    pub fn degree(&self) -> usize {
        (0..self.coeffs.len())
            .rev()
            .find(|&i| linalg::max_abs(&self.coeffs[i]) > 0.0)
            .map(|i| self.index.degree(i))
            .unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| linalg::max_abs(c) == 0.0)
    }

    pub fn coeff(&self, idx: usize) -> &CMat {
        &self.coeffs[idx]
    }

    pub fn coeffs(&self) -> &[CMat] {
        &self.coeffs
    }

    pub(crate) fn coeffs_mut(&mut self) -> &mut [CMat] {
        &mut self.coeffs
    }

    pub fn get(&self, w: &Word) -> CMat {
        if w.len() > self.degree_bound() {
            return linalg::zeros(self.d_out, self.d_in);
        }
        match self.index.index(w) {
            Ok(i) => self.coeffs[i].clone(),
            Err(_) => linalg::zeros(self.d_out, self.d_in),
        }
    }

    pub fn set(&mut self, w: &Word, c: CMat) -> Result<()> {
        if c.nrows() != self.d_out || c.ncols() != self.d_in {
            return Err(Error::arg("coefficient shape mismatch"));
        }
        if w.len() > self.degree_bound() {
            *self = self.with_bound(w.len())?;
        }
        let i = self.index.index(w)?;
        self.coeffs[i] = c;
        Ok(())
    }

    /// `θ(0)`.
    pub fn at_zero(&self) -> &CMat {
        &self.coeffs[0]
    }

    /// Copy with a new degree bound: truncates or zero-pads.
    pub fn with_bound(&self, bound: usize) -> Result<Self> {
        let mut out = MultiAnalyticSymbol::zero(self.n, self.d_out, self.d_in, bound)?;
        let keep = out.coeffs.len().min(self.coeffs.len());
        out.coeffs[..keep].clone_from_slice(&self.coeffs[..keep]);
        Ok(out)
    }

    /// Nonzero coefficients in graded order.
    pub fn pairs(&self) -> Vec<(Word, CMat)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| linalg::max_abs(c) > 0.0)
            .map(|(i, c)| (self.index.word(i), c.clone()))
            .collect()
    }

    pub fn map(&self, f: impl Fn(&CMat) -> CMat) -> Result<Self> {
        let coeffs: Vec<CMat> = self.coeffs.iter().map(f).collect();
        let (r, c) = coeffs
            .first()
            .map(|m| (m.nrows(), m.ncols()))
            .unwrap_or((self.d_out, self.d_in));
        MultiAnalyticSymbol::from_dense(self.n, r, c, self.degree_bound(), coeffs)
    }

    pub fn scale(&self, z: C64) -> Self {
        let mut out = self.clone();
        out.coeffs.iter_mut().for_each(|c| *c *= z);
        out
    }

    /// `(I ⊗ N) M_θ`.
    pub fn left_mul(&self, left: &CMat) -> Result<Self> {
        if left.ncols() != self.d_out {
            return Err(Error::arg("left factor shape mismatch"));
        }
        self.map(|c| left * c)
    }

    pub fn right_mul(&self, right: &CMat) -> Result<Self> {
        if right.nrows() != self.d_in {
            return Err(Error::arg("right factor shape mismatch"));
        }
        self.map(|c| c * right)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.n != other.n || self.d_out != other.d_out || self.d_in != other.d_in {
            return Err(Error::arg("symbol shape mismatch"));
        }
        let bound = self.degree_bound().max(other.degree_bound());
        let mut out = self.with_bound(bound)?;
        for (i, c) in other.coeffs.iter().enumerate() {
            out.coeffs[i] += c;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    /// Convolution `(θφ)_γ = Σ_{γ=αβ} θ_α φ_β` up to degree `bound`.
    pub fn mul(&self, other: &Self, bound: usize) -> Result<Self> {
        if self.n != other.n || self.d_in != other.d_out {
            return Err(Error::arg("symbol product shape mismatch"));
        }
        let mut out = MultiAnalyticSymbol::zero(self.n, self.d_out, other.d_in, bound)?;
        let ix = out.index.clone();
        for g in 0..ix.len() {
            let k = ix.degree(g);
            let mut acc = linalg::zeros(self.d_out, other.d_in);
            for j in 0..=k {
                if j > self.degree_bound() || k - j > other.degree_bound() {
                    continue;
                }
                let a = self.index.join(j, ix.split(ix.prefix(g, j)).1);
                let b = other.index.join(k - j, ix.split(ix.suffix_after(g, j)).1);
                acc += &self.coeffs[a] * &other.coeffs[b];
            }
            out.coeffs[g] = acc;
        }
        Ok(out)
    }

    /// Inverse power series seeded with `θ(0)^{-1}`, computed degree by degree.
    pub fn inverse_series(&self, bound: usize) -> Result<Self> {
        if self.d_in != self.d_out {
            return Err(Error::arg("only square symbols have inverses"));
        }
        let inv0 = linalg::inverse(&self.coeffs[0])
            .ok_or_else(|| Error::Numerical("θ(0) is singular".into()))?;
        let mut out = MultiAnalyticSymbol::zero(self.n, self.d_in, self.d_out, bound)?;
        let ix = out.index.clone();
        out.coeffs[0] = inv0.clone();
        for g in 1..ix.len() {
            let k = ix.degree(g);
            let mut acc = linalg::zeros(self.d_out, self.d_out);
            for j in 1..=k.min(self.degree_bound()) {
                let a = self.index.join(j, ix.split(ix.prefix(g, j)).1);
                let b = ix.suffix_after(g, j);
                acc += &self.coeffs[a] * &out.coeffs[b];
            }
            out.coeffs[g] = -(&inv0 * acc);
        }
        Ok(out)
    }

    /// Right division `θ φ^{-1}` by a square symbol `φ` with invertible `φ(0)`.
    pub fn right_divide(&self, denom: &Self, bound: usize) -> Result<Self> {
        let inv = denom.inverse_series(bound)?;
        self.mul(&inv, bound)
    }

    /// Commutative evaluation `Σ_α λ^α θ_α` at a point of `C^n`.
    pub fn evaluate_commutative(&self, lambda: &[C64]) -> Result<CMat> {
        if lambda.len() != self.n {
            return Err(Error::arg("point dimension differs from alphabet size"));
        }
        let ix = &self.index;
        let mut mono = vec![C64::new(0.0, 0.0); ix.len()];
        mono[0] = C64::new(1.0, 0.0);
        let mut acc = self.coeffs[0].clone();
        for g in 1..ix.len() {
            let (k, r) = ix.split(g);
            let last = r % self.n;
            let head = ix.join(k - 1, r / self.n);
            mono[g] = mono[head] * lambda[last];
            acc += &self.coeffs[g] * mono[g];
        }
        Ok(acc)
    }

    /// Conjugate-transposed coefficients (used for co-analytic bookkeeping).
    pub fn adjoint_coeffs(&self) -> Vec<CMat> {
        self.coeffs.iter().map(|c| c.adjoint()).collect()
    }
}

/// Truncated matrix of `M_θ = Σ_α R_α ⊗ θ_α`; the column of `e_ω ⊗ ε` is `(S_ω ⊗ I)θε`.
pub fn assemble(theta: &MultiAnalyticSymbol, trunc: &FockTruncation) -> Result<CMat> {
    if theta.n() != trunc.n || theta.d_in() != trunc.d {
        return Err(Error::arg("symbol does not match the truncation"));
    }
    if theta.degree() > trunc.m {
        return Err(Error::arg(format!(
            "symbol degree {} exceeds truncation {}",
            theta.degree(),
            trunc.m
        )));
    }
    let (din, dout) = (theta.d_in(), theta.d_out());
    check_dim(trunc.words() * din.max(dout))?;
    let ix = trunc.index();
    let tix = theta.index();
    let mut out = linalg::zeros(trunc.words() * dout, trunc.words() * din);
    let top = theta.degree_bound().min(trunc.m);
    for w in 0..ix.len() {
        let kw = ix.degree(w);
        for b in 0..tix.len_upto(top.min(trunc.m - kw)) {
            let c = theta.coeff(b);
            if linalg::max_abs(c) == 0.0 {
                continue;
            }
            let (kb, rb) = tix.split(b);
            let rev = ix.reverse(ix.join(kb, rb));
            let row = ix.concat(w, rev).expect("degree checked");
            out.view_mut((row * dout, w * din), (dout, din))
                .copy_from(c);
        }
    }
    Ok(out)
}

/// Second construction of `M_θ` as `Σ_α R_α ⊗ θ_α` from products of right creation matrices.
pub fn assemble_from_right_creations(
    theta: &MultiAnalyticSymbol,
    trunc: &FockTruncation,
) -> Result<CMat> {
    let scalar = trunc.with_coefficients(1)?;
    let rs: Vec<CMat> = (1..=trunc.n)
        .map(|i| right_creation(&scalar, i))
        .collect::<Result<_>>()?;
    let ix = theta.index();
    let nw = trunc.words();
    let mut powers: HashMap<usize, CMat> = HashMap::new();
    powers.insert(0, linalg::eye(nw));
    let mut out = linalg::zeros(nw * theta.d_out(), nw * theta.d_in());
    for a in 0..ix.len_upto(theta.degree().min(trunc.m)) {
        let (k, r) = ix.split(a);
        if k > 0 {
            // R_α = R_{i_1} ⋯ R_{i_k}; build from the prefix.
            let head = ix.join(k - 1, r / trunc.n);
            let last = r % trunc.n;
            let p = &powers[&head] * &rs[last];
            powers.insert(a, p);
        }
        let c = theta.coeff(a);
        if linalg::max_abs(c) == 0.0 {
            continue;
        }
        let p = &powers[&a];
        for i in 0..nw {
            for j in 0..nw {
                if p[(i, j)].norm() > 0.0 {
                    let mut v = out.view_mut(
                        (i * theta.d_out(), j * theta.d_in()),
                        (theta.d_out(), theta.d_in()),
                    );
                    v += c * p[(i, j)];
                }
            }
        }
    }
    Ok(out)
}

/// Extracts the symbol of a truncated multi-analytic matrix from its first block column.
pub fn symbol_of(
    m: &CMat,
    trunc: &FockTruncation,
    d_out: usize,
    tol: f64,
) -> Result<MultiAnalyticSymbol> {
    let nw = trunc.words();
    if m.nrows() != nw * d_out || m.ncols() != nw * trunc.d {
        return Err(Error::arg("matrix does not match the truncation"));
    }
    let ix = trunc.index();
    let mut coeffs = Vec::with_capacity(nw);
    for b in 0..nw {
        let row = ix.reverse(b);
        coeffs.push(linalg::block(m, row * d_out, 0, d_out, trunc.d));
    }
    let sym = MultiAnalyticSymbol::from_dense(trunc.n, d_out, trunc.d, trunc.m, coeffs)?;
    let rebuilt = assemble(&sym, trunc)?;
    let scale = linalg::max_abs(m).max(1.0);
    let resid = linalg::max_abs(&(&rebuilt - m));
    if resid > tol * scale {
        return Err(Error::Structure(format!(
            "intertwining residual {resid:e} above tolerance"
        )));
    }
    Ok(sym)
}

/// Symbol whose action on `1 ⊗ C^c` is the Fock vector `v`: `θ_β` is the block of `v` at position `β̃`.
pub fn symbol_from_vector(v: &CMat, trunc: &FockTruncation) -> Result<MultiAnalyticSymbol> {
    if v.nrows() != trunc.total_dim() {
        return Err(Error::arg("vector does not match the truncation"));
    }
    let ix = trunc.index();
    let coeffs = (0..ix.len())
        .map(|b| linalg::block(v, ix.reverse(b) * trunc.d, 0, trunc.d, v.ncols()))
        .collect();
    MultiAnalyticSymbol::from_dense(trunc.n, trunc.d, v.ncols(), trunc.m, coeffs)
}

/// Inverse of [`symbol_from_vector`]: the Fock vector `θ(1 ⊗ ·)`.
pub fn vector_from_symbol(theta: &MultiAnalyticSymbol, trunc: &FockTruncation) -> Result<CMat> {
    if theta.d_out() != trunc.d || theta.n() != trunc.n || theta.degree() > trunc.m {
        return Err(Error::arg("symbol does not fit the truncation"));
    }
    let ix = trunc.index();
    let tix = theta.index();
    let mut v = linalg::zeros(trunc.total_dim(), theta.d_in());
    for b in 0..tix.len_upto(theta.degree()) {
        let (k, r) = tix.split(b);
        let pos = ix.reverse(ix.join(k, r));
        v.view_mut((pos * trunc.d, 0), (trunc.d, theta.d_in()))
            .copy_from(theta.coeff(b));
    }
    Ok(v)
}

/// Lower bound for `‖M_θ‖` from the degree-m compression, with the value at degree m−1.
#[derive(Clone, Debug, PartialEq)]
pub struct NormCertificate {
    pub value: f64,
    pub previous: f64,
    pub degree: usize,
    pub stable: bool,
}

impl NormCertificate {
    pub fn gap(&self) -> f64 {
        self.value - self.previous
    }
}

pub fn compression_norm(
    theta: &MultiAnalyticSymbol,
    m: usize,
    tol: f64,
) -> Result<NormCertificate> {
    let t = FockTruncation::new(theta.n(), m, theta.d_in())?;
    let value = linalg::op_norm(&assemble(&theta.with_bound(m)?, &t)?);
    let previous = if m == 0 {
        0.0
    } else {
        let tp = t.with_degree(m - 1)?;
        linalg::op_norm(&assemble(&theta.with_bound(m - 1)?, &tp)?)
    };
    Ok(NormCertificate {
        value,
        previous,
        degree: m,
        stable: value - previous < tol,
    })
}

/// Orthonormal basis of the truncated symmetric Fock space with the compressions `B_i = P_s S_i|_s`.
#[derive(Clone, Debug)]
pub struct SymmetricCompression {
    pub basis: CMat,
    pub b: Vec<CMat>,
    /// Letter counts of each basis vector.
    pub counts: Vec<Vec<usize>>,
}

pub fn symmetric_compression(trunc: &FockTruncation) -> Result<SymmetricCompression> {
    if trunc.d != 1 {
        return Err(Error::arg("symmetric compression is built for d = 1"));
    }
    let ix = trunc.index();
    let mut groups: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    let mut lookup: HashMap<Vec<usize>, usize> = HashMap::new();
    for w in 0..ix.len() {
        let word = ix.word(w);
        let mut counts = vec![0usize; trunc.n];
        for &l in word.letters() {
            counts[l as usize - 1] += 1;
        }
        let slot = *lookup.entry(counts.clone()).or_insert_with(|| {
            groups.push((counts.clone(), Vec::new()));
            groups.len() - 1
        });
        groups[slot].1.push(w);
    }
    let mut basis = linalg::zeros(ix.len(), groups.len());
    for (j, (_, members)) in groups.iter().enumerate() {
        let s = 1.0 / (members.len() as f64).sqrt();
        for &w in members {
            basis[(w, j)] = C64::new(s, 0.0);
        }
    }
    let b = (1..=trunc.n)
        .map(|i| left_creation(trunc, i).map(|s| basis.adjoint() * s * &basis))
        .collect::<Result<Vec<_>>>()?;
    Ok(SymmetricCompression {
        basis,
        b,
        counts: groups.into_iter().map(|g| g.0).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_bidiagonal_assembly() {
        let t = FockTruncation::new(1, 2, 1).unwrap();
        let a = C64::new(0.3, 0.1);
        let b = C64::new(-0.5, 0.2);
        let s = MultiAnalyticSymbol::from_pairs(
            1,
            1,
            1,
            &[
                (Word::identity(1), linalg::scalar(a)),
                (Word::letter(1, 1).unwrap(), linalg::scalar(b)),
            ],
        )
        .unwrap();
        let m = assemble(&s, &t).unwrap();
        for i in 0..3 {
            assert_eq!(m[(i, i)], a);
        }
        assert_eq!(m[(1, 0)], b);
        assert_eq!(m[(2, 1)], b);
        assert_eq!(m[(2, 0)], C64::new(0.0, 0.0));
    }

    #[test]
    fn inverse_series_is_two_sided() {
        let n = 2;
        let pairs = vec![
            (Word::identity(n), linalg::scalar(C64::new(1.0, 0.2))),
            (
                Word::parse("1", n).unwrap(),
                linalg::scalar(C64::new(0.3, 0.0)),
            ),
            (
                Word::parse("21", n).unwrap(),
                linalg::scalar(C64::new(-0.2, 0.4)),
            ),
        ];
        let s = MultiAnalyticSymbol::from_pairs(n, 1, 1, &pairs).unwrap();
        let inv = s.inverse_series(5).unwrap();
        let left = inv.mul(&s, 5).unwrap();
        let right = s.mul(&inv, 5).unwrap();
        for g in 0..left.coeffs().len() {
            let expect = if g == 0 { 1.0 } else { 0.0 };
            assert!((left.coeff(g)[(0, 0)] - expect).norm() < 1e-12);
            assert!((right.coeff(g)[(0, 0)] - expect).norm() < 1e-12);
        }
    }
}
