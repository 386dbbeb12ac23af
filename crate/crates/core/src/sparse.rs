//! Column-major sparse matrices over GF(p).

use std::collections::BinaryHeap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::field::{FieldError, PrimeField};

/// A stored coefficient: `(row index, nonzero residue)`.
pub type Entry = (usize, u32);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: String, right: String },
    #[error("field mismatch: GF({left}) vs GF({right})")]
    FieldMismatch { left: u32, right: u32 },
    #[error("column {col}: {reason}")]
    InvalidColumn { col: usize, reason: String },
    #[error("duplicate entry at ({row}, {col})")]
    DuplicateEntry { row: usize, col: usize },
    #[error("matrix is not upper unitriangular (column {col})")]
    NotUnitUpperTriangular { col: usize },
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("parse error on line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error(transparent)]
    Field(#[from] FieldError),
}

fn dims(r: usize, c: usize) -> String {
    format!("{r}x{c}")
}

/// A bijection on `{0, …, n-1}`; `forward[position] = original index`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    forward: Vec<usize>,
    inverse: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Self {
            forward: (0..n).collect(),
            inverse: (0..n).collect(),
        }
    }

    pub fn from_forward(forward: Vec<usize>) -> Result<Self, MatrixError> {
        let n = forward.len();
        let mut inverse = vec![usize::MAX; n];
        for (pos, &orig) in forward.iter().enumerate() {
            if orig >= n {
                return Err(MatrixError::InvalidPermutation(format!(
                    "index {orig} out of range for length {n}"
                )));
            }
            if inverse[orig] != usize::MAX {
                return Err(MatrixError::InvalidPermutation(format!("index {orig} repeated")));
            }
            inverse[orig] = pos;
        }
        Ok(Self { forward, inverse })
    }

    /// The permutation listing `0..n` sorted by `key`, ties broken by index.
    pub fn sorted_by<K, F>(n: usize, mut key: F) -> Self
    where
        F: FnMut(usize) -> K,
        K: Ord,
    {
        let mut keyed: Vec<(K, usize)> = (0..n).map(|i| (key(i), i)).collect();
        keyed.sort();
        let forward = keyed.into_iter().map(|(_, i)| i).collect();
        Self::from_forward(forward).expect("sorted indices form a permutation")
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    /// Original index at `position`.
    #[inline]
    pub fn forward(&self, position: usize) -> usize {
        self.forward[position]
    }

    /// Position of original index `index`.
    #[inline]
    pub fn position_of(&self, index: usize) -> usize {
        self.inverse[index]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.forward
    }

    pub fn inverse(&self) -> Permutation {
        Permutation {
            forward: self.inverse.clone(),
            inverse: self.forward.clone(),
        }
    }
}

/// Dense scratch vector with a max-heap over its support.
///
/// Supports the two access patterns the reductions need: repeatedly reading
/// the largest nonzero index, and draining the final sparse column.
pub(crate) struct Accumulator {
    values: Vec<u32>,
    queued: Vec<bool>,
    heap: BinaryHeap<usize>,
}

impl Accumulator {
    pub(crate) fn new(len: usize) -> Self {
        Self {
            values: vec![0; len],
            queued: vec![false; len],
            heap: BinaryHeap::new(),
        }
    }

    /// `self += factor * column`.
    pub(crate) fn add_scaled(&mut self, field: &PrimeField, column: &[Entry], factor: u32) {
        if factor == 0 {
            return;
        }
        for &(row, v) in column {
            let slot = &mut self.values[row];
            *slot = field.add(*slot, field.mul(v, factor));
            if !self.queued[row] {
                self.queued[row] = true;
                self.heap.push(row);
            }
        }
    }

    /// Largest index holding a nonzero value.
    pub(crate) fn peek_max(&mut self) -> Option<Entry> {
        while let Some(&row) = self.heap.peek() {
            if self.values[row] != 0 {
                return Some((row, self.values[row]));
            }
            self.heap.pop();
            self.queued[row] = false;
        }
        None
    }

    /// Remove and return the largest nonzero entry.
    pub(crate) fn pop_max(&mut self) -> Option<Entry> {
        let entry = self.peek_max()?;
        self.heap.pop();
        self.queued[entry.0] = false;
        self.values[entry.0] = 0;
        Some(entry)
    }

    /// Drain into a sorted sparse column, leaving the accumulator zeroed.
    pub(crate) fn drain(&mut self) -> Vec<Entry> {
        let mut out = Vec::with_capacity(self.heap.len());
        while let Some(e) = self.pop_max() {
            out.push(e);
        }
        out.reverse();
        out
    }
}

/// Sparse matrix stored by columns. Every stored coefficient is nonzero and
/// row indices within a column are strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseMatrix {
    nrows: usize,
    field: PrimeField,
    cols: Vec<Vec<Entry>>,
}

impl SparseMatrix {
    pub fn zeros(nrows: usize, ncols: usize, field: PrimeField) -> Self {
        Self {
            nrows,
            field,
            cols: vec![Vec::new(); ncols],
        }
    }

    pub fn identity(n: usize, field: PrimeField) -> Self {
        Self {
            nrows: n,
            field,
            cols: (0..n).map(|i| vec![(i, 1)]).collect(),
        }
    }

    /// Build from columns, checking the storage invariants.
    pub fn from_columns(
        nrows: usize,
        cols: Vec<Vec<Entry>>,
        field: PrimeField,
    ) -> Result<Self, MatrixError> {
        for (j, col) in cols.iter().enumerate() {
            let bad = |reason: &str| MatrixError::InvalidColumn {
                col: j,
                reason: reason.to_string(),
            };
            if col.windows(2).any(|w| w[0].0 >= w[1].0) {
                return Err(bad("row indices not strictly increasing"));
            }
            if col.iter().any(|&(r, _)| r >= nrows) {
                return Err(bad("row index out of range"));
            }
            if col.iter().any(|&(_, v)| v == 0 || v >= field.modulus()) {
                return Err(bad("coefficient is zero or not reduced"));
            }
        }
        Ok(Self::from_columns_unchecked(nrows, cols, field))
    }

    pub(crate) fn from_columns_unchecked(nrows: usize, cols: Vec<Vec<Entry>>, field: PrimeField) -> Self {
        debug_assert!(cols
            .iter()
            .all(|c| c.windows(2).all(|w| w[0].0 < w[1].0) && c.iter().all(|&(r, v)| r < nrows && v != 0)));
        Self { nrows, field, cols }
    }

    /// Build from `(row, col, value)` triplets in any order. Values are
    /// reduced mod p and must be nonzero after reduction.
    pub fn from_triplets(
        nrows: usize,
        ncols: usize,
        field: PrimeField,
        triplets: impl IntoIterator<Item = (usize, usize, i64)>,
    ) -> Result<Self, MatrixError> {
        let mut cols = vec![Vec::new(); ncols];
        for (i, j, v) in triplets {
            if i >= nrows || j >= ncols {
                return Err(MatrixError::DimensionMismatch {
                    left: format!("entry ({i}, {j})"),
                    right: dims(nrows, ncols),
                });
            }
            let v = field.reduce(v);
            if v == 0 {
                return Err(MatrixError::InvalidColumn {
                    col: j,
                    reason: format!("zero coefficient at row {i}"),
                });
            }
            cols[j].push((i, v));
        }
        for (j, col) in cols.iter_mut().enumerate() {
            col.sort_unstable_by_key(|e| e.0);
            if let Some(w) = col.windows(2).find(|w| w[0].0 == w[1].0) {
                return Err(MatrixError::DuplicateEntry { row: w[0].0, col: j });
            }
        }
        Ok(Self::from_columns_unchecked(nrows, cols, field))
    }

    /// Build from a row-major dense array; zeros are dropped.
    pub fn from_dense(rows: &[Vec<u32>], field: PrimeField) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let mut cols = vec![Vec::new(); ncols];
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), ncols, "ragged dense matrix");
            for (j, &v) in row.iter().enumerate() {
                let v = v % field.modulus();
                if v != 0 {
                    cols[j].push((i, v));
                }
            }
        }
        Self::from_columns_unchecked(nrows, cols, field)
    }

    pub fn to_dense(&self) -> Vec<Vec<u32>> {
        let mut out = vec![vec![0; self.ncols()]; self.nrows];
        for (j, col) in self.cols.iter().enumerate() {
            for &(i, v) in col {
                out[i][j] = v;
            }
        }
        out
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    pub fn col(&self, j: usize) -> &[Entry] {
        &self.cols[j]
    }

    pub fn columns(&self) -> &[Vec<Entry>] {
        &self.cols
    }

    pub fn into_columns(self) -> Vec<Vec<Entry>> {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(Vec::is_empty)
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        let col = &self.cols[j];
        col.binary_search_by_key(&i, |e| e.0).map_or(0, |k| col[k].1)
    }

    /// For each row, the columns holding a nonzero in that row.
    pub fn row_index(&self) -> Vec<Vec<Entry>> {
        let mut rows = vec![Vec::new(); self.nrows];
        for (j, col) in self.cols.iter().enumerate() {
            for &(i, v) in col {
                rows[i].push((j, v));
            }
        }
        rows
    }

    fn same_field(&self, other: &Self) -> Result<(), MatrixError> {
        if self.field != other.field {
            return Err(MatrixError::FieldMismatch {
                left: self.field.modulus(),
                right: other.field.modulus(),
            });
        }
        Ok(())
    }

    /// Exact product `self * other`.
    pub fn matmul(&self, other: &SparseMatrix) -> Result<SparseMatrix, MatrixError> {
        self.same_field(other)?;
        if self.ncols() != other.nrows {
            return Err(MatrixError::DimensionMismatch {
                left: dims(self.nrows, self.ncols()),
                right: dims(other.nrows, other.ncols()),
            });
        }
        let mut acc = Accumulator::new(self.nrows);
        let cols = other
            .cols
            .iter()
            .map(|bcol| {
                for &(k, v) in bcol {
                    acc.add_scaled(&self.field, &self.cols[k], v);
                }
                acc.drain()
            })
            .collect();
        Ok(Self::from_columns_unchecked(self.nrows, cols, self.field.clone()))
    }

    /// Column `j` of the result is column `p.forward(j)` of `self`.
    pub fn permute_columns(&self, p: &Permutation) -> Result<SparseMatrix, MatrixError> {
        if p.len() != self.ncols() {
            return Err(MatrixError::DimensionMismatch {
                left: dims(self.nrows, self.ncols()),
                right: format!("permutation of length {}", p.len()),
            });
        }
        let cols = p.as_slice().iter().map(|&j| self.cols[j].clone()).collect();
        Ok(Self::from_columns_unchecked(self.nrows, cols, self.field.clone()))
    }

    /// Row `i` of the result is row `p.forward(i)` of `self`.
    pub fn permute_rows(&self, p: &Permutation) -> Result<SparseMatrix, MatrixError> {
        if p.len() != self.nrows {
            return Err(MatrixError::DimensionMismatch {
                left: dims(self.nrows, self.ncols()),
                right: format!("permutation of length {}", p.len()),
            });
        }
        let cols = self
            .cols
            .iter()
            .map(|col| {
                let mut c: Vec<Entry> = col.iter().map(|&(i, v)| (p.position_of(i), v)).collect();
                c.sort_unstable_by_key(|e| e.0);
                c
            })
            .collect();
        Ok(Self::from_columns_unchecked(self.nrows, cols, self.field.clone()))
    }

    pub fn is_upper_unitriangular(&self) -> bool {
        self.nrows == self.ncols()
            && self
                .cols
                .iter()
                .enumerate()
                .all(|(j, col)| col.last() == Some(&(j, 1)))
    }

    fn check_unitriangular(&self) -> Result<(), MatrixError> {
        if self.nrows != self.ncols() {
            return Err(MatrixError::DimensionMismatch {
                left: dims(self.nrows, self.ncols()),
                right: "square".into(),
            });
        }
        match self.cols.iter().enumerate().find(|(j, col)| col.last() != Some(&(*j, 1))) {
            Some((col, _)) => Err(MatrixError::NotUnitUpperTriangular { col }),
            None => Ok(()),
        }
    }

    /// Solve `self * x = b` for a single sparse column by back-substitution.
    /// `self` must be upper unitriangular (unchecked here).
    pub(crate) fn solve_column(&self, acc: &mut Accumulator, b: &[Entry]) -> Vec<Entry> {
        acc.add_scaled(&self.field, b, 1);
        let mut out = Vec::new();
        while let Some((i, xi)) = acc.pop_max() {
            out.push((i, xi));
            let col = &self.cols[i];
            // Diagonal entry is last; everything before it lies strictly above.
            acc.add_scaled(&self.field, &col[..col.len() - 1], self.field.neg(xi));
        }
        out.reverse();
        out
    }

    /// The unique `X` with `self * X = b`, for upper unitriangular `self`.
    pub fn solve_upper_unitriangular(&self, b: &SparseMatrix) -> Result<SparseMatrix, MatrixError> {
        self.same_field(b)?;
        self.check_unitriangular()?;
        if b.nrows != self.nrows {
            return Err(MatrixError::DimensionMismatch {
                left: dims(self.nrows, self.ncols()),
                right: dims(b.nrows, b.ncols()),
            });
        }
        let mut acc = Accumulator::new(self.nrows);
        let cols = b.cols.iter().map(|c| self.solve_column(&mut acc, c)).collect();
        Ok(Self::from_columns_unchecked(self.nrows, cols, self.field.clone()))
    }

    pub fn invert_upper_unitriangular(&self) -> Result<SparseMatrix, MatrixError> {
        self.solve_upper_unitriangular(&SparseMatrix::identity(self.nrows, self.field.clone()))
    }

    /// Render in the text format: header `nrows ncols p`, then `i j v` per
    /// nonzero in column-major order.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {} {}\n", self.nrows, self.ncols(), self.field.modulus());
        for (j, col) in self.cols.iter().enumerate() {
            for &(i, v) in col {
                let _ = writeln!(out, "{i} {j} {v}");
            }
        }
        out
    }

    /// Parse the text format. Blank lines and `#` comments are ignored.
    pub fn parse_text(text: &str) -> Result<SparseMatrix, MatrixError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(n, l)| (n + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let perr = |line: usize, reason: &str| MatrixError::Parse {
            line,
            reason: reason.to_string(),
        };
        let (hline, header) = lines.next().ok_or_else(|| perr(1, "missing header"))?;
        let h: Vec<&str> = header.split_whitespace().collect();
        if h.len() != 3 {
            return Err(perr(hline, "header must be `nrows ncols p`"));
        }
        let nrows: usize = h[0].parse().map_err(|_| perr(hline, "bad nrows"))?;
        let ncols: usize = h[1].parse().map_err(|_| perr(hline, "bad ncols"))?;
        let p: u32 = h[2].parse().map_err(|_| perr(hline, "bad modulus"))?;
        let field = PrimeField::new(p)?;
        let mut triplets = Vec::new();
        for (n, line) in lines {
            let t: Vec<&str> = line.split_whitespace().collect();
            if t.len() != 3 {
                return Err(perr(n, "entry must be `i j v`"));
            }
            let i: usize = t[0].parse().map_err(|_| perr(n, "bad row index"))?;
            let j: usize = t[1].parse().map_err(|_| perr(n, "bad column index"))?;
            let v: u32 = t[2].parse().map_err(|_| perr(n, "bad value"))?;
            if v == 0 || v >= p {
                return Err(perr(n, "value must lie in 1..p-1"));
            }
            if i >= nrows || j >= ncols {
                return Err(perr(n, "index out of range"));
            }
            triplets.push((i, j, v as i64));
        }
        Self::from_triplets(nrows, ncols, field, triplets)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gf(p: u32) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    fn dense(rows: &[&[u32]], p: u32) -> SparseMatrix {
        SparseMatrix::from_dense(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>(), gf(p))
    }

    #[test]
    fn matmul_examples() {
        let x = dense(&[&[1, 0, 2], &[0, 0, 1], &[1, 1, 0]], 3);
        let i3 = SparseMatrix::identity(3, gf(3));
        assert_eq!(i3.matmul(&x).unwrap(), x);
        let z = SparseMatrix::zeros(3, 3, gf(3));
        assert!(z.matmul(&x).unwrap().is_zero());
        let a = dense(&[&[1, 1], &[1, 1]], 2);
        let b = dense(&[&[1, 1], &[0, 1]], 2);
        assert_eq!(a.matmul(&b).unwrap(), dense(&[&[1, 0], &[1, 0]], 2));
    }

    #[test]
    fn matmul_rejects_bad_shapes_and_fields() {
        let a = SparseMatrix::zeros(2, 3, gf(2));
        let b = SparseMatrix::zeros(2, 2, gf(2));
        assert!(matches!(a.matmul(&b), Err(MatrixError::DimensionMismatch { .. })));
        let c = SparseMatrix::zeros(3, 1, gf(3));
        assert!(matches!(a.matmul(&c), Err(MatrixError::FieldMismatch { .. })));
    }

    #[test]
    fn permute_columns_examples() {
        let a = dense(&[&[1, 0, 1], &[0, 1, 1]], 2);
        assert_eq!(a.permute_columns(&Permutation::identity(3)).unwrap(), a);
        let swap = Permutation::from_forward(vec![1, 0]).unwrap();
        let b = dense(&[&[1, 0], &[1, 1]], 2);
        let once = b.permute_columns(&swap).unwrap();
        assert_eq!(once, dense(&[&[0, 1], &[1, 1]], 2));
        assert_eq!(once.permute_columns(&swap).unwrap(), b);
        let rev = Permutation::from_forward(vec![2, 1, 0]).unwrap();
        assert_eq!(a.permute_columns(&rev).unwrap(), dense(&[&[1, 0, 1], &[1, 1, 0]], 2));
        assert!(a.permute_columns(&swap).is_err());
    }

    #[test]
    fn solve_examples() {
        let b = dense(&[&[1, 1], &[0, 1]], 2);
        let i2 = SparseMatrix::identity(2, gf(2));
        assert_eq!(i2.solve_upper_unitriangular(&b).unwrap(), b);
        let t = dense(&[&[1, 1], &[0, 1]], 2);
        let rhs = dense(&[&[1], &[1]], 2);
        let x = t.solve_upper_unitriangular(&rhs).unwrap();
        assert_eq!(x, dense(&[&[0], &[1]], 2));
        assert_eq!(t.matmul(&x).unwrap(), rhs);
        let zero = SparseMatrix::zeros(2, 3, gf(2));
        assert!(t.solve_upper_unitriangular(&zero).unwrap().is_zero());
    }

    #[test]
    fn invert_examples() {
        let i = SparseMatrix::identity(4, gf(5));
        assert_eq!(i.invert_upper_unitriangular().unwrap(), i);
        let t2 = dense(&[&[1, 1], &[0, 1]], 2);
        assert_eq!(t2.invert_upper_unitriangular().unwrap(), t2);
        let t3 = dense(&[&[1, 2], &[0, 1]], 3);
        let inv = t3.invert_upper_unitriangular().unwrap();
        assert_eq!(inv, dense(&[&[1, 1], &[0, 1]], 3));
        assert_eq!(t3.matmul(&inv).unwrap(), SparseMatrix::identity(2, gf(3)));
    }

    #[test]
    fn solve_rejects_non_unitriangular() {
        let t = dense(&[&[1, 0], &[1, 1]], 2);
        let b = SparseMatrix::identity(2, gf(2));
        assert_eq!(
            t.solve_upper_unitriangular(&b),
            Err(MatrixError::NotUnitUpperTriangular { col: 0 })
        );
        let t = dense(&[&[2, 0], &[0, 1]], 3);
        assert!(t.invert_upper_unitriangular().is_err());
    }

    #[test]
    fn triplets_reject_duplicates_and_zeros() {
        let f = gf(3);
        assert_eq!(
            SparseMatrix::from_triplets(2, 2, f.clone(), [(0, 1, 1), (0, 1, 2)]),
            Err(MatrixError::DuplicateEntry { row: 0, col: 1 })
        );
        assert!(SparseMatrix::from_triplets(2, 2, f.clone(), [(0, 1, 3)]).is_err());
        let m = SparseMatrix::from_triplets(2, 2, f, [(1, 0, -1), (0, 0, 1)]).unwrap();
        assert_eq!(m.col(0), &[(0, 1), (1, 2)]);
    }

    #[test]
    fn from_columns_checks_invariants() {
        let f = gf(5);
        assert!(SparseMatrix::from_columns(3, vec![vec![(1, 1), (0, 2)]], f.clone()).is_err());
        assert!(SparseMatrix::from_columns(3, vec![vec![(0, 0)]], f.clone()).is_err());
        assert!(SparseMatrix::from_columns(3, vec![vec![(3, 1)]], f.clone()).is_err());
        assert!(SparseMatrix::from_columns(3, vec![vec![(0, 5)]], f.clone()).is_err());
        assert!(SparseMatrix::from_columns(3, vec![vec![(0, 4), (2, 1)]], f).is_ok());
    }

    #[test]
    fn text_format() {
        let m = dense(&[&[0, 2, 0], &[1, 0, 0]], 3);
        let text = m.to_text();
        assert_eq!(text, "2 3 3\n1 0 1\n0 1 2\n");
        assert_eq!(SparseMatrix::parse_text(&text).unwrap(), m);
        let shuffled = "# comment\n2 3 3\n0 1 2\n\n1 0 1\n";
        assert_eq!(SparseMatrix::parse_text(shuffled).unwrap(), m);
        assert!(matches!(
            SparseMatrix::parse_text("2 2 3\n0 0 1\n0 0 2\n"),
            Err(MatrixError::DuplicateEntry { .. })
        ));
        assert!(SparseMatrix::parse_text("2 2 3\n0 0 3\n").is_err());
        assert!(SparseMatrix::parse_text("2 2 4\n").is_err());
        assert!(SparseMatrix::parse_text("2 2 3\n2 0 1\n").is_err());
        assert!(SparseMatrix::parse_text("").is_err());
    }

    #[test]
    fn row_permutation_roundtrip() {
        let m = dense(&[&[1, 0], &[0, 2], &[1, 1]], 3);
        let p = Permutation::from_forward(vec![2, 0, 1]).unwrap();
        let moved = m.permute_rows(&p).unwrap();
        assert_eq!(moved.to_dense(), vec![vec![1, 1], vec![1, 0], vec![0, 2]]);
        assert_eq!(moved.permute_rows(&p.inverse()).unwrap(), m);
    }

    #[test]
    fn permutation_validation() {
        assert!(Permutation::from_forward(vec![0, 0]).is_err());
        assert!(Permutation::from_forward(vec![0, 2]).is_err());
        let p = Permutation::sorted_by(4, |i| [3, 1, 1, 0][i]);
        assert_eq!(p.as_slice(), &[3, 1, 2, 0]);
        assert_eq!(p.position_of(3), 0);
    }

    fn random_matrix(nrows: usize, ncols: usize, p: u32) -> impl Strategy<Value = SparseMatrix> {
        prop::collection::vec(prop::collection::vec(0..p, ncols), nrows)
            .prop_map(move |rows| SparseMatrix::from_dense(&rows, gf(p)))
    }

    fn random_unitriangular(n: usize, p: u32) -> impl Strategy<Value = SparseMatrix> {
        prop::collection::vec(prop::collection::vec(0..p, n), n).prop_map(move |mut rows| {
            for (i, row) in rows.iter_mut().enumerate() {
                for (j, v) in row.iter_mut().enumerate() {
                    if j < i {
                        *v = 0;
                    } else if j == i {
                        *v = 1;
                    }
                }
            }
            SparseMatrix::from_dense(&rows, gf(p))
        })
    }

    fn field_and_size() -> impl Strategy<Value = (u32, usize, usize)> {
        (prop::sample::select(vec![2u32, 3, 7]), 1usize..9, 1usize..9)
    }

    proptest! {
        #[test]
        fn triangular_solve_inverts_product(
            (t, b) in field_and_size().prop_flat_map(|(p, n, k)| (random_unitriangular(n, p), random_matrix(n, k, p)))
        ) {
            let x = t.solve_upper_unitriangular(&b).unwrap();
            prop_assert_eq!(t.matmul(&x).unwrap(), b.clone());
            let inv = t.invert_upper_unitriangular().unwrap();
            prop_assert!(inv.is_upper_unitriangular());
            prop_assert_eq!(inv.matmul(&b).unwrap(), x);
        }

        #[test]
        fn column_permutation_roundtrip(
            (m, perm) in field_and_size()
                .prop_flat_map(|(p, r, c)| (random_matrix(r, c, p), Just((0..c).collect::<Vec<_>>()).prop_shuffle()))
        ) {
            let perm = Permutation::from_forward(perm).unwrap();
            let there = m.permute_columns(&perm).unwrap();
            prop_assert_eq!(there.permute_columns(&perm.inverse()).unwrap(), m);
        }

        #[test]
        fn matmul_matches_dense(
            (a, b) in (prop::sample::select(vec![2u32, 3, 7]), 1usize..7, 1usize..7, 1usize..7)
                .prop_flat_map(|(p, r, k, c)| (random_matrix(r, k, p), random_matrix(k, c, p)))
        ) {
            let p = a.field().modulus() as u64;
            let (da, db) = (a.to_dense(), b.to_dense());
            let expected: Vec<Vec<u32>> = (0..a.nrows())
                .map(|i| (0..b.ncols())
                    .map(|j| ((0..a.ncols()).map(|k| da[i][k] as u64 * db[k][j] as u64).sum::<u64>() % p) as u32)
                    .collect())
                .collect();
            let prod = a.matmul(&b).unwrap();
            prop_assert_eq!(prod.to_dense(), expected);
            prop_assert!(SparseMatrix::from_columns(prod.nrows(), prod.columns().to_vec(), prod.field().clone()).is_ok());
        }
    }
}
