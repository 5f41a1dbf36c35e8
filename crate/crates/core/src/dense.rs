//! Dense kernels backing the desk-scale oracles: symmetric
//! eigendecomposition, Cholesky solves, and pseudoinverse application.
//!
//! Everything here is plain nalgebra; sizes up to a couple of thousand
//! are practical.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};

/// Eigenvalues of a symmetric matrix, ascending.
pub fn sym_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let sym = symmetrize(m);
    let mut ev: Vec<f64> = sym.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

/// Full symmetric eigendecomposition: (ascending values, matching columns).
pub fn sym_eigen(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let sym = symmetrize(m);
    let eig = sym.symmetric_eigen();
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        vectors.set_column(k, &eig.eigenvectors.column(i));
    }
    (values, vectors)
}

pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()).scale(0.5)
}

/// Solve `A x = b` for symmetric positive definite `A`.
pub fn spd_solve(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>> {
    let chol = symmetrize(a)
        .cholesky()
        .ok_or_else(|| Error::SingularBlock("dense Cholesky failed (not SPD)".into()))?;
    Ok(chol.solve(b))
}

/// Apply the Moore-Penrose pseudoinverse of a symmetric PSD matrix,
/// truncating eigenvalues below `rank_tol * lambda_max`.
pub fn psd_pinv_apply(m: &DMatrix<f64>, b: &DVector<f64>, rank_tol: f64) -> DVector<f64> {
    let (vals, vecs) = sym_eigen(m);
    let lmax = vals.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
    let cut = rank_tol * lmax.max(1e-300);
    let mut out = DVector::zeros(b.len());
    for (k, &lam) in vals.iter().enumerate() {
        if lam > cut {
            let q = vecs.column(k);
            out += q * (q.dot(b) / lam);
        }
    }
    out
}

/// Smallest eigenvalue of the symmetric part of `m`.
pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    *sym_eigenvalues(m).first().unwrap_or(&0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigen_of_diag() {
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, 1.0, 2.0]));
        let ev = sym_eigenvalues(&m);
        assert!((ev[0] - 1.0).abs() < 1e-12);
        assert!((ev[2] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn pinv_of_p2_laplacian() {
        let l = DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0]);
        let b = DVector::from_vec(vec![1.0, -1.0]);
        let x = psd_pinv_apply(&l, &b, 1e-10);
        // L x = b with x mean-zero: x = (0.5, -0.5)
        assert!((x[0] - 0.5).abs() < 1e-12);
        assert!((x[1] + 0.5).abs() < 1e-12);
    }
}
