//! The approximation relation `A ≈_eps B`, certified by generalized
//! eigenvalues.
//!
//! `A ≈_eps B` means `e^eps B ⪰ A ⪰ e^-eps B` in the Loewner order. On
//! the range of `B` this is equivalent to all generalized eigenvalues of
//! the pencil `(A, B)` lying in `[e^-eps, e^eps]`. The check below
//! whitens with an eigendecomposition of `B`, so it is exact up to dense
//! solver accuracy and usable up to n of a couple thousand.

use crate::dense::{sym_eigen, sym_eigenvalues, symmetrize};
use crate::error::{Error, Result};
use crate::matrix::SddmMatrix;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

/// Relative eigenvalue cutoff separating the null space from the range.
pub const RANK_REL_TOL: f64 = 1e-10;

/// Slack applied to the pass/fail decision (dense solver tolerance).
pub const LOEWNER_DECISION_TOL: f64 = 1e-9;

/// Result of a Loewner comparison of `(A, B)` on the range of `B`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LoewnerReport {
    /// Extremal generalized eigenvalue `lambda_min`.
    pub lower: f64,
    /// Extremal generalized eigenvalue `lambda_max`.
    pub upper: f64,
    /// `ln(max(upper, 1/lower))`; infinite if `lower <= 0`.
    pub epsilon_achieved: f64,
    /// Whether the requested epsilon is met (within solver tolerance).
    pub passes: bool,
}

/// Check `a ≈_eps b` via dense symmetric eigendecomposition.
///
/// For Laplacian pairs the comparison is restricted to the common range;
/// a nonzero action of `A` on the null space of `B` is an error.
pub fn loewner_approx_check(a: &SddmMatrix, b: &SddmMatrix, eps: f64) -> Result<LoewnerReport> {
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch {
            expected: b.n(),
            got: a.n(),
        });
    }
    loewner_check_dense(&a.to_dense(), &b.to_dense(), eps)
}

/// Dense-input variant of [`loewner_approx_check`].
pub fn loewner_check_dense(a: &DMatrix<f64>, b: &DMatrix<f64>, eps: f64) -> Result<LoewnerReport> {
    if a.nrows() != b.nrows() {
        return Err(Error::DimensionMismatch {
            expected: b.nrows(),
            got: a.nrows(),
        });
    }
    let n = b.nrows();
    let (vals, vecs) = sym_eigen(b);
    let lmax = vals.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    if lmax == 0.0 {
        return Err(Error::NullSpaceMismatch("B is the zero matrix".into()));
    }
    let cut = RANK_REL_TOL * lmax;

    // A must vanish on the null space of B for the relation to make sense.
    let a_sym = symmetrize(a);
    let a_scale = a_sym.amax().max(1e-300);
    let mut range_cols = Vec::new();
    for (k, &lam) in vals.iter().enumerate() {
        if lam > cut {
            range_cols.push(k);
        } else {
            let q = vecs.column(k);
            let aq = &a_sym * q;
            if aq.amax() > 1e-7 * a_scale * (n as f64).sqrt() {
                return Err(Error::NullSpaceMismatch(format!(
                    "A acts on null(B) with magnitude {:.3e}",
                    aq.amax()
                )));
            }
        }
    }
    if range_cols.is_empty() {
        return Err(Error::NullSpaceMismatch("B has empty numerical range".into()));
    }

    // Whiten: C = S^-1/2 Q^T A Q S^-1/2 on the range of B.
    let r = range_cols.len();
    let mut w = DMatrix::zeros(n, r);
    for (t, &k) in range_cols.iter().enumerate() {
        let scale = 1.0 / vals[k].sqrt();
        w.set_column(t, &(vecs.column(k) * scale));
    }
    let c = w.transpose() * &a_sym * &w;
    let cev = sym_eigenvalues(&c);
    let lower = *cev.first().unwrap();
    let upper = *cev.last().unwrap();
    Ok(report_from_extremes(lower, upper, eps))
}

pub(crate) fn report_from_extremes(lower: f64, upper: f64, eps: f64) -> LoewnerReport {
    let epsilon_achieved = if lower <= 0.0 {
        f64::INFINITY
    } else {
        upper.max(1.0 / lower).ln().max(0.0)
    };
    let passes =
        lower >= (-eps).exp() - LOEWNER_DECISION_TOL && upper <= eps.exp() + LOEWNER_DECISION_TOL;
    LoewnerReport {
        lower,
        upper,
        epsilon_achieved,
        passes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::SddmMatrix;

    fn p3() -> SddmMatrix {
        SddmMatrix::laplacian_from_edges(3, &[(0, 1, 1.0), (1, 2, 1.0)]).unwrap()
    }

    #[test]
    fn equal_matrices_pass_any_eps() {
        let m = p3();
        let rep = loewner_approx_check(&m, &m, 0.0).unwrap();
        assert!(rep.passes);
        assert!(rep.epsilon_achieved < 1e-9);
    }

    #[test]
    fn pure_scaling_threshold() {
        let m = p3();
        let a = m.scale(0.3f64.exp());
        let rep = loewner_approx_check(&a, &m, 0.3 + 1e-9).unwrap();
        assert!(rep.passes, "{rep:?}");
        let rep = loewner_approx_check(&a, &m, 0.29).unwrap();
        assert!(!rep.passes, "{rep:?}");
        assert!((rep.epsilon_achieved - 0.3).abs() < 1e-9);
    }

    #[test]
    fn null_space_mismatch_detected() {
        // A connected Laplacian vs one with an extra component.
        let a = SddmMatrix::laplacian_from_edges(3, &[(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        let b = SddmMatrix::laplacian_from_edges(3, &[(0, 1, 1.0)]).unwrap();
        assert!(matches!(
            loewner_approx_check(&a, &b, 1.0),
            Err(Error::NullSpaceMismatch(_))
        ));
    }

    #[test]
    fn dimension_mismatch_detected() {
        let a = SddmMatrix::identity(2);
        let b = SddmMatrix::identity(3);
        assert!(matches!(
            loewner_approx_check(&a, &b, 1.0),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
