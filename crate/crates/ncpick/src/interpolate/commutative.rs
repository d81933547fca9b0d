//! Compression of a truncated multiplier to the symmetric Fock space.

use crate::error::{Error, Result};
use crate::fock::{self, FockTruncation, MultiAnalyticSymbol};
use crate::interpolate::np;
use crate::linalg::{self, CMat, C64};

#[derive(Clone, Debug)]
pub struct CommutativeMultiplier {
    /// `(P_s ⊗ I) M_Θ (P_s ⊗ I)` in the orthonormal symmetric basis.
    pub matrix: CMat,
    /// Symmetric basis vectors as columns over the scalar truncation.
    pub basis: CMat,
    pub counts: Vec<Vec<usize>>,
    trunc: FockTruncation,
    d_out: usize,
}

impl CommutativeMultiplier {
    /// `Σ_s conj(w_s) u_s` with `u_s` the blocks of the compressed multiplier on `1 ⊗ E`
    /// and `w_s = ⟨k_z, b_s⟩`.
    pub fn evaluate(&self, z: &[C64]) -> Result<CMat> {
        if z.len() != self.trunc.n {
            return Err(Error::arg("point dimension differs from alphabet size"));
        }
        let din = self.trunc.d;
        let mono = np::monomials(z, self.trunc.index());
        let mut out = linalg::zeros(self.d_out, din);
        for s in 0..self.basis.ncols() {
            let w: C64 = (0..mono.len()).map(|a| mono[a] * self.basis[(a, s)]).sum();
            out += linalg::block(&self.matrix, s * self.d_out, 0, self.d_out, din) * w;
        }
        Ok(out)
    }

    pub fn norm(&self) -> f64 {
        linalg::op_norm(&self.matrix)
    }
}

/// Compression at truncation degree `m`.
pub fn commutative_compress(
    theta: &MultiAnalyticSymbol,
    m: usize,
) -> Result<CommutativeMultiplier> {
    let trunc = FockTruncation::new(theta.n(), m, theta.d_in())?;
    let sym = fock::symmetric_compression(&trunc.with_coefficients(1)?)?;
    let full = fock::assemble(&theta.with_bound(m)?, &trunc)?;
    let left = linalg::kron_eye(&sym.basis, theta.d_out());
    let right = linalg::kron_eye(&sym.basis, theta.d_in());
    let matrix = left.adjoint() * full * right;
    Ok(CommutativeMultiplier {
        matrix,
        basis: sym.basis,
        counts: sym.counts,
        trunc,
        d_out: theta.d_out(),
    })
}
