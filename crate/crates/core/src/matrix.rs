//! Sparse symmetric SDDM / Laplacian matrices.
//!
//! An SDDM matrix is symmetric, has nonpositive off-diagonal entries and
//! nonnegative row sums, and is nonsingular; a Laplacian additionally has
//! all row sums exactly zero. Every such matrix splits uniquely as
//! `M = X + L` with `X` the nonnegative diagonal of row sums (the
//! "excess") and `L` a Laplacian.
//!
//! Storage is coordinate input canonicalized to sorted compressed-row
//! form with duplicates summed on ingestion. All types here are immutable
//! after construction; operations are pure functions.

use crate::error::{Error, Result};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

/// Structural zero threshold, relative to the matrix max-abs entry.
pub const STRUCTURAL_ZERO_REL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MatrixKind {
    /// Nonsingular: at least one strictly positive row sum per component.
    Sddm,
    /// All row sums exactly zero (up to the structural tolerance).
    Laplacian,
}

/// Symmetric sparse SDDM/Laplacian matrix in canonical CSR form.
#[derive(Debug, Clone, PartialEq)]
pub struct SddmMatrix {
    n: usize,
    kind: MatrixKind,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SddmMatrix {
    /// Build from coordinate triplets. Duplicates are summed, entries that
    /// cancel to exact zero are dropped, rows are sorted. The kind flag is
    /// classified from the row sums. No SDDM invariants are enforced here;
    /// use [`validate_sddm`] for that.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        for &(i, j, _) in triplets {
            if i >= n || j >= n {
                return Err(Error::InvalidParameter(format!(
                    "triplet index ({i},{j}) out of range for n={n}"
                )));
            }
        }
        let mut per_row: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for &(i, j, v) in triplets {
            per_row[i].push((j, v));
        }
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for row in &mut per_row {
            row.sort_unstable_by_key(|&(j, _)| j);
            let mut k = 0;
            while k < row.len() {
                let j = row[k].0;
                let mut v = 0.0;
                while k < row.len() && row[k].0 == j {
                    v += row[k].1;
                    k += 1;
                }
                if v != 0.0 {
                    col_idx.push(j);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        let mut m = SddmMatrix {
            n,
            kind: MatrixKind::Sddm,
            row_ptr,
            col_idx,
            values,
        };
        m.kind = m.classify_kind();
        Ok(m)
    }

    /// Weighted-graph Laplacian from an edge list. Weights must be
    /// positive; parallel edges are summed. Row sums are structurally
    /// zero: the diagonal is assembled as the same floating-point sum as
    /// the off-diagonals.
    pub fn laplacian_from_edges(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let mut triplets = Vec::with_capacity(4 * edges.len());
        let mut degree = vec![0.0f64; n];
        for &(u, v, w) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidParameter(format!(
                    "edge ({u},{v}) out of range for n={n}"
                )));
            }
            if u == v {
                continue; // self-loops cancel in a Laplacian
            }
            if w < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "negative edge weight {w} on ({u},{v})"
                )));
            }
            triplets.push((u, v, -w));
            triplets.push((v, u, -w));
            degree[u] += w;
            degree[v] += w;
        }
        for (i, &d) in degree.iter().enumerate() {
            if d != 0.0 {
                triplets.push((i, i, d));
            }
        }
        let mut m = Self::from_triplets(n, &triplets)?;
        m.kind = MatrixKind::Laplacian;
        Ok(m)
    }

    /// SDDM matrix `diag(excess) + Laplacian(edges)`.
    pub fn from_excess_and_edges(
        n: usize,
        excess: &[f64],
        edges: &[(usize, usize, f64)],
    ) -> Result<Self> {
        if excess.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: excess.len(),
            });
        }
        let lap = Self::laplacian_from_edges(n, edges)?;
        let mut triplets: Vec<(usize, usize, f64)> = lap.entries().collect();
        for (i, &x) in excess.iter().enumerate() {
            if x != 0.0 {
                triplets.push((i, i, x));
            }
        }
        Self::from_triplets(n, &triplets)
    }

    pub fn identity(n: usize) -> Self {
        let triplets: Vec<_> = (0..n).map(|i| (i, i, 1.0)).collect();
        Self::from_triplets(n, &triplets).expect("identity")
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let triplets: Vec<_> = values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0.0)
            .map(|(i, &v)| (i, i, v))
            .collect();
        Self::from_triplets(values.len(), &triplets).expect("diagonal")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn kind(&self) -> MatrixKind {
        self.kind
    }

    pub fn is_laplacian(&self) -> bool {
        self.kind == MatrixKind::Laplacian
    }

    /// Force the kind flag (used where the caller knows the exact class,
    /// e.g. a Schur complement of a Laplacian away from the ground).
    pub fn with_kind(mut self, kind: MatrixKind) -> Self {
        self.kind = kind;
        self
    }

    fn classify_kind(&self) -> MatrixKind {
        let tol = STRUCTURAL_ZERO_REL * self.max_abs().max(1e-300);
        if (0..self.n).all(|i| self.row_sum(i).abs() <= tol) {
            MatrixKind::Laplacian
        } else {
            MatrixKind::Sddm
        }
    }

    /// Row `i` as parallel (columns, values) slices.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        (&self.col_idx[lo..hi], &self.values[lo..hi])
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(k) => vals[k],
            Err(_) => 0.0,
        }
    }

    /// All stored entries as `(row, col, value)`.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).map(move |(&j, &v)| (i, j, v))
        })
    }

    /// Graph edges `(u, v, w)` with `u < v` and `w = -entry > 0` for every
    /// strictly negative off-diagonal entry.
    pub fn edges(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for (i, j, v) in self.entries() {
            if i < j && v < 0.0 {
                out.push((i, j, -v));
            }
        }
        out
    }

    pub fn row_sum(&self, i: usize) -> f64 {
        let (_, vals) = self.row(i);
        vals.iter().sum()
    }

    /// Sum of absolute off-diagonal entries in row `i`.
    pub fn offdiag_abs_sum(&self, i: usize) -> f64 {
        let (cols, vals) = self.row(i);
        cols.iter()
            .zip(vals)
            .filter(|(&j, _)| j != i)
            .map(|(_, &v)| v.abs())
            .sum()
    }

    pub fn diag(&self, i: usize) -> f64 {
        self.entry(i, i)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Number of stored entries in row `i` (diagonal included).
    pub fn row_nnz(&self, i: usize) -> usize {
        self.row_ptr[i + 1] - self.row_ptr[i]
    }

    /// Strong diagonal dominance of this matrix as a standalone block:
    /// the largest `alpha` with `M_ii >= (1 + alpha) * sum_j |M_ij|` for
    /// every row. Rows without off-diagonal entries are vacuous
    /// (infinity); returns infinity for a diagonal matrix.
    pub fn dominance_alpha(&self) -> f64 {
        let mut alpha = f64::INFINITY;
        for i in 0..self.n {
            let off = self.offdiag_abs_sum(i);
            if off > 0.0 {
                alpha = alpha.min(self.diag(i) / off - 1.0);
            }
        }
        alpha
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        let mut y = vec![0.0; self.n];
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            let mut acc = 0.0;
            for (&j, &v) in cols.iter().zip(vals) {
                acc += v * x[j];
            }
            y[i] = acc;
        }
        Ok(y)
    }

    pub fn add(&self, other: &SddmMatrix) -> Result<SddmMatrix> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: other.n,
            });
        }
        let mut triplets: Vec<_> = self.entries().collect();
        triplets.extend(other.entries());
        Self::from_triplets(self.n, &triplets)
    }

    pub fn scale(&self, s: f64) -> SddmMatrix {
        let mut m = self.clone();
        for v in &mut m.values {
            *v *= s;
        }
        m
    }

    /// Drop entries with magnitude below `STRUCTURAL_ZERO_REL * max_abs`.
    pub fn cleaned(&self) -> SddmMatrix {
        let tol = STRUCTURAL_ZERO_REL * self.max_abs();
        let triplets: Vec<_> = self
            .entries()
            .filter(|&(i, j, v)| i == j || v.abs() > tol)
            .collect();
        Self::from_triplets(self.n, &triplets).expect("cleaned")
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut d = DMatrix::zeros(self.n, self.n);
        for (i, j, v) in self.entries() {
            d[(i, j)] += v;
        }
        d
    }

    /// Extract the principal submatrix indexed by `idx` (sorted, unique).
    pub fn submatrix(&self, idx: &[usize]) -> SddmMatrix {
        let mut pos = vec![usize::MAX; self.n];
        for (k, &i) in idx.iter().enumerate() {
            pos[i] = k;
        }
        let mut triplets = Vec::new();
        for &i in idx {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                if pos[j] != usize::MAX {
                    triplets.push((pos[i], pos[j], v));
                }
            }
        }
        Self::from_triplets(idx.len(), &triplets).expect("submatrix")
    }

    /// Restrict to the blocks of a partition: `M_FF`, `M_CC` and the
    /// rectangular `M_FC` (with `M_CF` its transpose by symmetry).
    pub fn restrict(&self, part: &IndexPartition) -> MatrixBlocks {
        let ff = self.submatrix(&part.f);
        let cc = self.submatrix(&part.c);
        let fpos = part.f_positions(self.n);
        let cpos = part.c_positions(self.n);
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); part.f.len()];
        for (fi, &i) in part.f.iter().enumerate() {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                if cpos[j] != usize::MAX {
                    rows[fi].push((cpos[j], v));
                }
            }
        }
        let _ = fpos;
        MatrixBlocks {
            ff,
            cc,
            fc: RectBlock {
                nrows: part.f.len(),
                ncols: part.c.len(),
                rows,
            },
        }
    }

    /// The unique decomposition `M = X + L`, `X = diag(row sums)`.
    pub fn xl_decompose(&self) -> XlDecomposition {
        let x: Vec<f64> = (0..self.n).map(|i| self.row_sum(i)).collect();
        let mut triplets: Vec<(usize, usize, f64)> = Vec::with_capacity(self.nnz());
        for (i, j, v) in self.entries() {
            if i == j {
                let d = v - x[i];
                if d != 0.0 {
                    triplets.push((i, i, d));
                }
            } else {
                triplets.push((i, j, v));
            }
        }
        let lap = Self::from_triplets(self.n, &triplets)
            .expect("xl laplacian")
            .with_kind(MatrixKind::Laplacian);
        XlDecomposition { x, laplacian: lap }
    }

    /// Connected components of the off-diagonal structure.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut comp = vec![usize::MAX; self.n];
        let mut out: Vec<Vec<usize>> = Vec::new();
        for start in 0..self.n {
            if comp[start] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut stack = vec![start];
            let mut members = Vec::new();
            comp[start] = id;
            while let Some(v) = stack.pop() {
                members.push(v);
                let (cols, _) = self.row(v);
                for &j in cols {
                    if j != v && comp[j] == usize::MAX {
                        comp[j] = id;
                        stack.push(j);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }
}

/// `M = X + L` with `X` nonnegative diagonal and `L` a Laplacian.
#[derive(Debug, Clone)]
pub struct XlDecomposition {
    /// Row sums of the parent matrix.
    pub x: Vec<f64>,
    pub laplacian: SddmMatrix,
}

impl XlDecomposition {
    /// Reassemble `X + L`; bit-exact against the parent's stored values.
    pub fn recompose(&self) -> SddmMatrix {
        let mut triplets: Vec<(usize, usize, f64)> = self.laplacian.entries().collect();
        for (i, &x) in self.x.iter().enumerate() {
            if x != 0.0 {
                triplets.push((i, i, x));
            }
        }
        SddmMatrix::from_triplets(self.laplacian.n(), &triplets).expect("recompose")
    }
}

/// Disjoint index sets `F` (to eliminate) and `C` (to keep), both sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexPartition {
    pub f: Vec<usize>,
    pub c: Vec<usize>,
}

impl IndexPartition {
    /// Build from `F`; `C` is the complement in `0..n`.
    pub fn from_f(n: usize, f: &[usize]) -> Result<Self> {
        let mut in_f = vec![false; n];
        for &i in f {
            if i >= n {
                return Err(Error::InvalidParameter(format!(
                    "partition index {i} out of range for n={n}"
                )));
            }
            if in_f[i] {
                return Err(Error::InvalidParameter(format!("duplicate index {i} in F")));
            }
            in_f[i] = true;
        }
        let mut fs: Vec<usize> = f.to_vec();
        fs.sort_unstable();
        let c: Vec<usize> = (0..n).filter(|&i| !in_f[i]).collect();
        Ok(IndexPartition { f: fs, c })
    }

    pub fn f_positions(&self, n: usize) -> Vec<usize> {
        let mut pos = vec![usize::MAX; n];
        for (k, &i) in self.f.iter().enumerate() {
            pos[i] = k;
        }
        pos
    }

    pub fn c_positions(&self, n: usize) -> Vec<usize> {
        let mut pos = vec![usize::MAX; n];
        for (k, &i) in self.c.iter().enumerate() {
            pos[i] = k;
        }
        pos
    }
}

/// Rectangular sparse block (row-major adjacency lists).
#[derive(Debug, Clone)]
pub struct RectBlock {
    pub nrows: usize,
    pub ncols: usize,
    /// `rows[i]` holds `(col, value)` sorted by column.
    pub rows: Vec<Vec<(usize, f64)>>,
}

impl RectBlock {
    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.nrows];
        for (i, row) in self.rows.iter().enumerate() {
            y[i] = row.iter().map(|&(j, v)| v * x[j]).sum();
        }
        y
    }

    /// `y = B^T x` (the `M_CF` action, by symmetry).
    pub fn matvec_transpose(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.ncols];
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, v) in row {
                y[j] += v * x[i];
            }
        }
        y
    }
}

/// The three distinct blocks of a symmetric matrix under a partition.
#[derive(Debug, Clone)]
pub struct MatrixBlocks {
    pub ff: SddmMatrix,
    pub cc: SddmMatrix,
    pub fc: RectBlock,
}

/// Check every SddmMatrix invariant, reporting the first violation.
///
/// Checks: pairwise symmetry of stored values, nonpositive off-diagonal,
/// positive (SDDM) or nonnegative (Laplacian) diagonal, nonnegative row
/// sums, kind consistency, and — for SDDM — that every connected
/// component carries strictly positive excess (otherwise the component is
/// a singular Laplacian block, reported with its vertex list).
pub fn validate_sddm(m: &SddmMatrix) -> Result<()> {
    let tol = STRUCTURAL_ZERO_REL * m.max_abs().max(1e-300);
    for (i, j, v) in m.entries() {
        let vt = m.entry(j, i);
        if (v - vt).abs() > tol {
            return Err(Error::Validation(format!(
                "asymmetric entries at ({i},{j}): {v} vs {vt}"
            )));
        }
        if i != j && v > tol {
            return Err(Error::Validation(format!(
                "positive off-diagonal at ({i},{j})"
            )));
        }
        if i == j {
            match m.kind() {
                MatrixKind::Sddm if v <= 0.0 => {
                    return Err(Error::Validation(format!("nonpositive diagonal at ({i},{i})")));
                }
                MatrixKind::Laplacian if v < -tol => {
                    return Err(Error::Validation(format!("negative diagonal at ({i},{i})")));
                }
                _ => {}
            }
        }
    }
    for i in 0..m.n() {
        if m.row_sum(i) < -tol {
            return Err(Error::Validation(format!("negative row sum at row {i}")));
        }
    }
    match m.kind() {
        MatrixKind::Laplacian => {
            for i in 0..m.n() {
                if m.row_sum(i).abs() > tol {
                    return Err(Error::Validation(format!(
                        "kind=Laplacian but row {i} has nonzero sum {}",
                        m.row_sum(i)
                    )));
                }
            }
        }
        MatrixKind::Sddm => {
            // Every component must be grounded somewhere.
            let bad: Vec<Vec<usize>> = m
                .components()
                .into_iter()
                .filter(|comp| comp.iter().all(|&i| m.row_sum(i) <= tol))
                .collect();
            if !bad.is_empty() {
                return Err(Error::Validation(format!(
                    "singular Laplacian components (no excess): {:?}",
                    bad
                )));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_valid_sddm() {
        let m = SddmMatrix::identity(3);
        assert_eq!(m.kind(), MatrixKind::Sddm);
        validate_sddm(&m).unwrap();
    }

    #[test]
    fn p3_laplacian_is_valid() {
        let m = SddmMatrix::laplacian_from_edges(3, &[(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        assert_eq!(m.kind(), MatrixKind::Laplacian);
        assert_eq!(m.entry(1, 1), 2.0);
        assert_eq!(m.entry(0, 1), -1.0);
        validate_sddm(&m).unwrap();
    }

    #[test]
    fn positive_offdiag_rejected() {
        let m = SddmMatrix::from_triplets(
            2,
            &[(0, 0, 2.0), (1, 1, 2.0), (0, 1, 1.0), (1, 0, 1.0)],
        )
        .unwrap();
        let err = validate_sddm(&m).unwrap_err().to_string();
        assert!(err.contains("positive off-diagonal at (0,1)"), "{err}");
    }

    #[test]
    fn asymmetry_rejected() {
        let m =
            SddmMatrix::from_triplets(2, &[(0, 0, 2.0), (1, 1, 2.0), (0, 1, -1.0)]).unwrap();
        let err = validate_sddm(&m).unwrap_err().to_string();
        assert!(err.contains("asymmetric"), "{err}");
    }

    #[test]
    fn ungrounded_component_rejected() {
        // Two components, only one with excess.
        let m = SddmMatrix::from_excess_and_edges(
            4,
            &[1.0, 0.0, 0.0, 0.0],
            &[(0, 1, 1.0), (2, 3, 1.0)],
        )
        .unwrap();
        let err = validate_sddm(&m).unwrap_err().to_string();
        assert!(err.contains("singular Laplacian components"), "{err}");
    }

    #[test]
    fn xl_decompose_examples() {
        // diag(2,2): x = (2,2), laplacian = 0
        let d = SddmMatrix::diagonal(&[2.0, 2.0]);
        let xl = d.xl_decompose();
        assert_eq!(xl.x, vec![2.0, 2.0]);
        assert_eq!(xl.laplacian.nnz(), 0);

        // [[2,-1],[-1,2]]: x = (1,1), laplacian = [[1,-1],[-1,1]]
        let m = SddmMatrix::from_excess_and_edges(2, &[1.0, 1.0], &[(0, 1, 1.0)]).unwrap();
        let xl = m.xl_decompose();
        assert_eq!(xl.x, vec![1.0, 1.0]);
        assert_eq!(xl.laplacian.entry(0, 0), 1.0);
        assert_eq!(xl.laplacian.entry(0, 1), -1.0);
        assert_eq!(xl.recompose(), m);
    }

    #[test]
    fn matvec_examples() {
        let id = SddmMatrix::identity(3);
        assert_eq!(id.matvec(&[1.0, 2.0, 3.0]).unwrap(), vec![1.0, 2.0, 3.0]);

        // Laplacian times all-ones is zero.
        let l = SddmMatrix::laplacian_from_edges(3, &[(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        let y = l.matvec(&[1.0, 1.0, 1.0]).unwrap();
        assert!(y.iter().all(|&v| v.abs() < 1e-15));

        // P3 Laplacian times (1,0,0) = (1,-1,0).
        let y = l.matvec(&[1.0, 0.0, 0.0]).unwrap();
        assert_eq!(y, vec![1.0, -1.0, 0.0]);
    }

    #[test]
    fn restrict_blocks() {
        let m = SddmMatrix::from_excess_and_edges(
            3,
            &[0.5, 0.0, 0.5],
            &[(0, 1, 1.0), (1, 2, 1.0)],
        )
        .unwrap();
        let part = IndexPartition::from_f(3, &[1]).unwrap();
        let b = m.restrict(&part);
        assert_eq!(b.ff.n(), 1);
        assert_eq!(b.ff.entry(0, 0), 2.0);
        assert_eq!(b.cc.entry(0, 0), 1.5);
        assert_eq!(b.fc.rows[0], vec![(0, -1.0), (1, -1.0)]);
        assert_eq!(b.fc.matvec(&[1.0, 0.0]), vec![-1.0]);
        assert_eq!(b.fc.matvec_transpose(&[2.0]), vec![-2.0, -2.0]);
    }

    #[test]
    fn duplicate_triplets_summed() {
        let m = SddmMatrix::from_triplets(2, &[(0, 0, 1.0), (0, 0, 1.5), (1, 1, 1.0)]).unwrap();
        assert_eq!(m.entry(0, 0), 2.5);
        assert_eq!(m.nnz(), 2);
    }
}
