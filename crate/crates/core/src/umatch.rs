//! U-match decomposition `T·M = D·S`.
//!
//! `T` and `S` are upper unitriangular and `M` is a generalized matching
//! matrix (at most one nonzero per row and per column). The factors are
//! assembled from a left-to-right `R = D·V` column reduction.

use crate::field::PrimeField;
use crate::sparse::{Accumulator, Entry, MatrixError, SparseMatrix};

/// Output of the standard column reduction `R = D·V`.
#[derive(Debug, Clone)]
pub struct Reduction {
    pub r: Vec<Vec<Entry>>,
    pub v: Vec<Vec<Entry>>,
    /// `pivot_col[i] = Some(j)` when the lowest nonzero of `R_j` sits in row `i`.
    pub pivot_col: Vec<Option<usize>>,
}

impl Reduction {
    /// Lowest nonzero entry of reduced column `j`.
    pub fn low(&self, j: usize) -> Option<Entry> {
        self.r[j].last().copied()
    }
}

/// Reduce `d` left to right: whenever column `j` shares its lowest row with
/// an earlier reduced column, clear that row using the earlier column.
pub fn reduce(d: &SparseMatrix) -> Reduction {
    let field = d.field().clone();
    let (nrows, ncols) = (d.nrows(), d.ncols());
    let mut racc = Accumulator::new(nrows);
    let mut vacc = Accumulator::new(ncols);
    let mut r: Vec<Vec<Entry>> = Vec::with_capacity(ncols);
    let mut v: Vec<Vec<Entry>> = Vec::with_capacity(ncols);
    let mut pivot_col: Vec<Option<usize>> = vec![None; nrows];

    for j in 0..ncols {
        racc.add_scaled(&field, d.col(j), 1);
        vacc.add_scaled(&field, &[(j, 1)], 1);
        while let Some((low, c)) = racc.peek_max() {
            let Some(k) = pivot_col[low] else { break };
            let pivot = r[k].last().expect("pivot column is nonzero").1;
            let factor = field.neg(field.mul(c, field.inv(pivot).expect("nonzero pivot")));
            racc.add_scaled(&field, &r[k], factor);
            vacc.add_scaled(&field, &v[k], factor);
        }
        let rj = racc.drain();
        if let Some(&(low, _)) = rj.last() {
            pivot_col[low] = Some(j);
        }
        r.push(rj);
        v.push(vacc.drain());
    }
    Reduction { r, v, pivot_col }
}

/// `column / column[row]`, so that the entry in `row` becomes one.
pub(crate) fn normalize_at(field: &PrimeField, column: &[Entry], row: usize) -> Vec<Entry> {
    let pivot = column
        .iter()
        .find(|e| e.0 == row)
        .expect("normalizing row present")
        .1;
    let inv = field.inv(pivot).expect("nonzero pivot");
    column.iter().map(|&(i, v)| (i, field.mul(v, inv))).collect()
}

/// The factors `(T, M, S)` of a U-match decomposition of some `D`.
#[derive(Debug, Clone)]
pub struct UmatchFactors {
    pub t: SparseMatrix,
    pub m: SparseMatrix,
    pub s: SparseMatrix,
    row_match: Vec<Option<(usize, u32)>>,
    col_match: Vec<Option<(usize, u32)>>,
}

impl UmatchFactors {
    /// Wrap externally supplied factors. Matching lookups are derived from `m`;
    /// if `m` has more than one nonzero in a row or column the last one wins,
    /// and [`validate`](Self::validate) will report the violation.
    pub fn from_parts(t: SparseMatrix, m: SparseMatrix, s: SparseMatrix) -> Self {
        let mut row_match = vec![None; m.nrows()];
        let mut col_match = vec![None; m.ncols()];
        for (j, col) in m.columns().iter().enumerate() {
            for &(i, v) in col {
                row_match[i] = Some((j, v));
                col_match[j] = Some((i, v));
            }
        }
        Self {
            t,
            m,
            s,
            row_match,
            col_match,
        }
    }

    /// Column matched to row `i` of `M`, with the coefficient.
    pub fn row_match(&self, i: usize) -> Option<(usize, u32)> {
        self.row_match[i]
    }

    /// Row matched to column `j` of `M`, with the coefficient.
    pub fn col_match(&self, j: usize) -> Option<(usize, u32)> {
        self.col_match[j]
    }

    /// Nonzero entries `(row, col)` of `M`, by column.
    pub fn matching(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.col_match
            .iter()
            .enumerate()
            .filter_map(|(j, m)| m.map(|(i, _)| (i, j)))
    }

    pub fn rank(&self) -> usize {
        self.m.nnz()
    }

    /// Check all three U-match conditions against `d` exactly.
    pub fn validate(&self, d: &SparseMatrix) -> Result<bool, MatrixError> {
        let (n, m) = (d.nrows(), d.ncols());
        let shapes = [
            (self.t.nrows(), self.t.ncols(), n, n),
            (self.m.nrows(), self.m.ncols(), n, m),
            (self.s.nrows(), self.s.ncols(), m, m),
        ];
        if let Some(&(r, c, er, ec)) = shapes.iter().find(|s| (s.0, s.1) != (s.2, s.3)) {
            return Err(MatrixError::DimensionMismatch {
                left: format!("factor {r}x{c}"),
                right: format!("expected {er}x{ec}"),
            });
        }
        if !self.t.is_upper_unitriangular() || !self.s.is_upper_unitriangular() {
            return Ok(false);
        }
        if !is_generalized_matching(&self.m) {
            return Ok(false);
        }
        Ok(self.t.matmul(&self.m)? == d.matmul(&self.s)?)
    }
}

pub fn is_generalized_matching(m: &SparseMatrix) -> bool {
    let mut seen = vec![false; m.nrows()];
    m.columns().iter().all(|col| {
        col.len() <= 1
            && col.iter().all(|&(i, _)| {
                let fresh = !seen[i];
                seen[i] = true;
                fresh
            })
    })
}

/// Compute a U-match decomposition of `d`.
///
/// From `R = D·V`: `S = V`; for each pivot `i = low(R_j)`, column `i` of `T`
/// is `R_j` scaled to one at row `i` and `M[i, j]` is the pivot value; every
/// unmatched row `i` contributes the standard basis vector `e_i` to `T`.
pub fn umatch_decompose(d: &SparseMatrix) -> UmatchFactors {
    let field = d.field().clone();
    let red = reduce(d);
    let (n, m) = (d.nrows(), d.ncols());

    let t_cols = (0..n)
        .map(|i| match red.pivot_col[i] {
            Some(j) => normalize_at(&field, &red.r[j], i),
            None => vec![(i, 1)],
        })
        .collect();
    let m_cols = (0..m)
        .map(|j| red.low(j).into_iter().collect())
        .collect();

    let Reduction { v, .. } = red;
    UmatchFactors::from_parts(
        SparseMatrix::from_columns_unchecked(n, t_cols, field.clone()),
        SparseMatrix::from_columns_unchecked(n, m_cols, field.clone()),
        SparseMatrix::from_columns_unchecked(m, v, field),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(p: u32) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    fn dense(rows: &[&[u32]], p: u32) -> SparseMatrix {
        SparseMatrix::from_dense(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>(), gf(p))
    }

    #[test]
    fn zero_matrix() {
        let d = SparseMatrix::zeros(3, 2, gf(5));
        let f = umatch_decompose(&d);
        assert_eq!(f.t, SparseMatrix::identity(3, gf(5)));
        assert!(f.m.is_zero());
        assert_eq!(f.s, SparseMatrix::identity(2, gf(5)));
        assert!(f.validate(&d).unwrap());
    }

    #[test]
    fn matching_input_is_its_own_m() {
        let d = dense(&[&[0, 1], &[0, 0]], 2);
        let f = umatch_decompose(&d);
        assert_eq!(f.t, SparseMatrix::identity(2, gf(2)));
        assert_eq!(f.m, d);
        assert_eq!(f.s, SparseMatrix::identity(2, gf(2)));
        assert_eq!(f.row_match(0), Some((1, 1)));
        assert_eq!(f.col_match(0), None);
    }

    #[test]
    fn all_ones_over_gf2() {
        let d = dense(&[&[1, 1], &[1, 1]], 2);
        let f = umatch_decompose(&d);
        assert_eq!(f.t, dense(&[&[1, 1], &[0, 1]], 2));
        assert_eq!(f.m, dense(&[&[0, 0], &[1, 0]], 2));
        assert_eq!(f.s, dense(&[&[1, 1], &[0, 1]], 2));
        // T·M and D·S computed by hand: both [[1,0],[1,0]].
        assert_eq!(f.t.matmul(&f.m).unwrap(), dense(&[&[1, 0], &[1, 0]], 2));
        assert!(f.validate(&d).unwrap());
    }

    #[test]
    fn pivot_values_are_kept_in_m() {
        let d = dense(&[&[2, 1], &[2, 0]], 3);
        let f = umatch_decompose(&d);
        assert_eq!(f.m.get(1, 0), 2);
        assert!(f.validate(&d).unwrap());
        assert_eq!(f.rank(), 2);
    }

    #[test]
    fn validate_rejects_broken_factors() {
        let d = dense(&[&[1], &[1]], 2);
        let bogus = UmatchFactors::from_parts(
            SparseMatrix::identity(2, gf(2)),
            SparseMatrix::zeros(2, 1, gf(2)),
            SparseMatrix::identity(1, gf(2)),
        );
        assert!(!bogus.validate(&d).unwrap());

        let d = dense(&[&[1, 1], &[1, 1]], 2);
        let good = umatch_decompose(&d);
        let bad_s = SparseMatrix::from_columns(2, vec![vec![], vec![(0, 1), (1, 1)]], gf(2)).unwrap();
        let tampered = UmatchFactors::from_parts(good.t.clone(), good.m.clone(), bad_s);
        assert!(!tampered.validate(&d).unwrap());

        let double = UmatchFactors::from_parts(
            SparseMatrix::identity(2, gf(2)),
            dense(&[&[1, 1], &[0, 0]], 2),
            SparseMatrix::identity(2, gf(2)),
        );
        assert!(!double.validate(&dense(&[&[1, 1], &[0, 0]], 2)).unwrap());

        let wrong_shape = UmatchFactors::from_parts(
            SparseMatrix::identity(3, gf(2)),
            SparseMatrix::zeros(3, 2, gf(2)),
            SparseMatrix::identity(2, gf(2)),
        );
        assert!(wrong_shape.validate(&d).is_err());
    }

    #[test]
    fn unitriangular_input_is_fully_matched() {
        let d = dense(&[&[1, 2, 0], &[0, 1, 1], &[0, 0, 1]], 3);
        let f = umatch_decompose(&d);
        assert_eq!(f.rank(), 3);
        assert!(f.validate(&d).unwrap());
    }
}
