use super::CliffordTableau;
use crate::dense::{self, CMatrix, CVector};
use crate::error::{CtnError, Result};

const UNITARY_LIMIT: usize = 5;

/// Dense unitary of a tableau.
///
/// The free global phase is fixed so that the first nonzero amplitude of
/// `C|0...0>` is real and positive. Column `x` is `Π_k (C X_k C†)^{x_k} C|0...0>`.
pub fn tableau_to_unitary(c: &CliffordTableau) -> Result<CMatrix> {
    let n = c.n();
    if n > UNITARY_LIMIT {
        return Err(CtnError::TooLarge { n, limit: UNITARY_LIMIT });
    }
    let dim = 1usize << n;
    let project = |mut v: CVector| -> CVector {
        for k in 0..n {
            let zv = dense::apply_pauli(c.z_image(k), &v);
            v = (&v + zv) * dense::c(0.5, 0.0);
        }
        v
    };
    let mut best = CVector::zeros(dim);
    for b in 0..dim {
        let v = project(dense::basis_state(n, b));
        if v.norm() > best.norm() {
            best = v;
        }
        if best.norm() > 0.5 {
            break;
        }
    }
    let mut v0 = best.unscale(best.norm());
    if let Some(first) = v0.iter().find(|a| a.norm() > 1e-12).copied() {
        v0 *= first.conj() / first.norm();
    }
    let mut u = CMatrix::zeros(dim, dim);
    for col in 0..dim {
        let mut v = v0.clone();
        for k in 0..n {
            if (col >> (n - 1 - k)) & 1 == 1 {
                v = dense::apply_pauli(c.x_image(k), &v);
            }
        }
        u.set_column(col, &v);
    }
    Ok(u)
}
