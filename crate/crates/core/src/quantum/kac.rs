//! Matrix-level Kac witness: `u` and `uᵗ` both unitary.

use serde::Serialize;

use super::magic::MagicUnitary;
use crate::error::{Error, Result};
use crate::linalg::{identity, op_norm, CMatrix};

pub const KAC_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Serialize)]
pub struct KacReport {
    pub unitary: bool,
    pub transpose_unitary: bool,
    /// `‖u*u − 1‖`
    pub left_residual: f64,
    /// `‖uu* − 1‖`
    pub right_residual: f64,
    /// `‖(uᵗ)*uᵗ − 1‖`
    pub transpose_residual: f64,
}

/// For a scalar matrix `uᵗ` is unitary exactly when `u` is; a genuine
/// failure needs operator-valued entries, see [`kac_witness_blocks`].
pub fn kac_witness(u: &CMatrix) -> Result<KacReport> {
    if u.nrows() != u.ncols() {
        return Err(Error::ShapeMismatch(format!("{}x{} matrix is not square", u.nrows(), u.ncols())));
    }
    Ok(report(u, &u.transpose()))
}

/// Treats `U = (q_vw)` as a block matrix over `M_k`; its transpose swaps the
/// blocks without transposing them.
pub fn kac_witness_blocks(u: &MagicUnitary) -> KacReport {
    let (m, k) = (u.dim(), u.block());
    let mut big = CMatrix::zeros(m * k, m * k);
    let mut big_t = CMatrix::zeros(m * k, m * k);
    for v in 0..m {
        for w in 0..m {
            big.view_mut((v * k, w * k), (k, k)).copy_from(u.entry(v, w));
            big_t.view_mut((w * k, v * k), (k, k)).copy_from(u.entry(v, w));
        }
    }
    report(&big, &big_t)
}

fn report(u: &CMatrix, ut: &CMatrix) -> KacReport {
    let one = identity(u.nrows());
    let left_residual = op_norm(&(u.adjoint() * u - &one));
    let right_residual = op_norm(&(u * u.adjoint() - &one));
    let transpose_residual = op_norm(&(ut.adjoint() * ut - &one));
    KacReport {
        unitary: left_residual <= KAC_TOL && right_residual <= KAC_TOL,
        transpose_unitary: transpose_residual <= KAC_TOL,
        left_residual,
        right_residual,
        transpose_residual,
    }
}
