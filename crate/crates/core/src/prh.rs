//! Persistent relative homology via two U-match factorizations.
//!
//! The first factorization `T·M = D̄·S` of the boundary matrix (rows in `b_G`
//! order, columns in `b_F` order) yields chains whose columns contain bases
//! for every relative boundary space (columns of `T`) and every relative
//! cycle space (columns of `S`). Sorting those columns by the filtration
//! value at which each one becomes a boundary (`f_im`) or a cycle (`f_ker`)
//! gives `A` and `B`; a second factorization of `A⁻¹B` produces one basis
//! `A·T̄` compatible with both filtrations at once. Each of its columns is a
//! bar `[f_ker, f_im)` together with a relative cycle representative.

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

use crate::complex::{boundary_matrix, validate_pair, BoundaryMatrix, Chain, ComplexError, FilteredPair};
use crate::sparse::{Accumulator, Entry, MatrixError, Permutation, SparseMatrix};
use crate::umatch::{is_generalized_matching, umatch_decompose, UmatchFactors};

#[derive(Debug, Error)]
pub enum PrhError {
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    /// A factorization or bookkeeping invariant failed. Always a bug.
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

/// Which pipeline produced a barcode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pipeline {
    General,
    Lag,
}

impl fmt::Display for Pipeline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pipeline::General => "general",
            Pipeline::Lag => "lag",
        })
    }
}

/// A half-open interval `[birth, death)` in homological dimension `dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct Bar {
    pub dim: usize,
    pub birth: f64,
    pub death: f64,
    pub representative: Chain,
}

impl Bar {
    /// `(dim, birth, death)` ordering, ignoring the representative.
    pub fn cmp_interval(&self, other: &Bar) -> Ordering {
        self.dim
            .cmp(&other.dim)
            .then(self.birth.total_cmp(&other.birth))
            .then(self.death.total_cmp(&other.death))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Barcode {
    pub bars: Vec<Bar>,
    pub modulus: u32,
    pub pipeline: Pipeline,
    pub cell_count: usize,
}

impl Barcode {
    pub(crate) fn new(mut bars: Vec<Bar>, modulus: u32, pipeline: Pipeline, cell_count: usize) -> Self {
        bars.sort_by(|a, b| a.cmp_interval(b).then_with(|| a.representative.cmp(&b.representative)));
        Self {
            bars,
            modulus,
            pipeline,
            cell_count,
        }
    }

    pub fn len(&self) -> usize {
        self.bars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bars.is_empty()
    }

    /// Sorted `(dim, birth, death)` triples.
    pub fn intervals(&self) -> Vec<(usize, f64, f64)> {
        let mut v: Vec<_> = self.bars.iter().map(|b| (b.dim, b.birth, b.death)).collect();
        v.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)).then(a.2.total_cmp(&b.2)));
        v
    }

    /// Same multiset of `(dim, birth, death)`, bit-exact.
    pub fn same_intervals(&self, other: &Barcode) -> bool {
        let (a, b) = (self.intervals(), other.intervals());
        a.len() == b.len()
            && a.iter()
                .zip(&b)
                .all(|(x, y)| x.0 == y.0 && x.1.to_bits() == y.1.to_bits() && x.2.to_bits() == y.2.to_bits())
    }

    /// Largest homological dimension with a bar.
    pub fn max_dim(&self) -> Option<usize> {
        self.bars.iter().map(|b| b.dim).max()
    }
}

/// Number of bars of dimension `dim` with `birth ≤ t < death`.
pub fn betti_curve(barcode: &Barcode, t: f64, dim: usize) -> usize {
    barcode
        .bars
        .iter()
        .filter(|b| b.dim == dim && b.birth <= t && t < b.death)
        .count()
}

/// `f_im` of a column of `T`: the cell `α` indexing the column enters the
/// subcomplex at `b_G(α)`; if row `α` of `M` is matched to a column `η`, the
/// column is also the boundary of a chain born at `b_F(η)`.
#[inline]
pub fn fim_lookup(birth_g_alpha: f64, matched_birth_f: Option<f64>) -> f64 {
    match matched_birth_f {
        Some(b) => birth_g_alpha.min(b),
        None => birth_g_alpha,
    }
}

/// `f_ker` of a column of `S`: born with its leading cell `α` at `b_F(α)`,
/// and a relative cycle once its boundary (a multiple of column `ρ` of `T`)
/// lies in the subcomplex. A zero boundary imposes no constraint.
#[inline]
pub fn fker_lookup(birth_f_alpha: f64, matched_birth_g: Option<f64>) -> f64 {
    match matched_birth_g {
        Some(b) => birth_f_alpha.max(b),
        None => birth_f_alpha,
    }
}

/// The first factorization together with the cell orders that index it.
pub struct FirstFactorization<'a> {
    pair: &'a FilteredPair,
    pub boundary: BoundaryMatrix,
    pub factors: UmatchFactors,
}

impl<'a> FirstFactorization<'a> {
    pub fn new(pair: &'a FilteredPair) -> Result<Self, PrhError> {
        let boundary = boundary_matrix(pair)?;
        let factors = umatch_decompose(&boundary.matrix);
        if !factors.validate(&boundary.matrix)? {
            return Err(PrhError::Internal("first U-match failed validation".into()));
        }
        Ok(Self {
            pair,
            boundary,
            factors,
        })
    }

    /// `f_im` of the column of `T` indexed by `cell`.
    pub fn fim_of_t_column(&self, cell: usize) -> f64 {
        let row = self.boundary.rows.position_of(cell);
        let matched = self
            .factors
            .row_match(row)
            .map(|(col, _)| self.pair.birth_f(self.boundary.cols.forward(col)));
        fim_lookup(self.pair.birth_g(cell), matched)
    }

    /// `f_ker` of the column of `S` indexed by `cell`.
    pub fn fker_of_s_column(&self, cell: usize) -> f64 {
        let col = self.boundary.cols.position_of(cell);
        let matched = self
            .factors
            .col_match(col)
            .map(|(row, _)| self.pair.birth_g(self.boundary.rows.forward(row)));
        fker_lookup(self.pair.birth_f(cell), matched)
    }
}

fn sort_by_value(values: &[f64]) -> Permutation {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    Permutation::from_forward(idx).expect("sorted indices form a permutation")
}

/// Everything computed by [`compute_prh`], kept for inspection and testing.
pub struct PrhRun<'a> {
    pub first: FirstFactorization<'a>,
    /// `f_im` of each column of `T`, indexed by position in `b_G` order.
    pub fim: Vec<f64>,
    /// `f_ker` of each column of `S`, indexed by position in `b_F` order.
    pub fker: Vec<f64>,
    /// Columns of `T` sorted by `f_im` (ties by position).
    pub beta: Permutation,
    /// Columns of `S` sorted by `f_ker` (ties by position).
    pub gamma: Permutation,
    /// `A⁻¹B`, rows indexed by `beta`, columns by `gamma`.
    pub a_inv_b: SparseMatrix,
    pub second: UmatchFactors,
}

impl<'a> PrhRun<'a> {
    /// Run both factorizations on a valid pair.
    pub fn new(pair: &'a FilteredPair) -> Result<Self, PrhError> {
        let violations = validate_pair(pair);
        if !violations.is_empty() {
            return Err(ComplexError::Invalid(violations).into());
        }
        let first = FirstFactorization::new(pair)?;
        let m = pair.len();
        let rows = &first.boundary.rows;
        let cols = &first.boundary.cols;
        let fim: Vec<f64> = (0..m).map(|i| first.fim_of_t_column(rows.forward(i))).collect();
        let fker: Vec<f64> = (0..m).map(|j| first.fker_of_s_column(cols.forward(j))).collect();
        let beta = sort_by_value(&fim);
        let gamma = sort_by_value(&fker);

        // B: columns of S in gamma order, rows re-indexed from b_F order to b_G order.
        let field = pair.field().clone();
        let b_cols: Vec<Vec<Entry>> = gamma
            .as_slice()
            .iter()
            .map(|&j| {
                let mut c: Vec<Entry> = first
                    .factors
                    .s
                    .col(j)
                    .iter()
                    .map(|&(r, v)| (rows.position_of(cols.forward(r)), v))
                    .collect();
                c.sort_unstable_by_key(|e| e.0);
                c
            })
            .collect();

        // A = T·P_beta, so A⁻¹B = P_beta⁻¹·(T⁻¹B).
        let t = &first.factors.t;
        let mut acc = Accumulator::new(m);
        let a_inv_b_cols: Vec<Vec<Entry>> = b_cols
            .iter()
            .map(|b| {
                let x = t.solve_column(&mut acc, b);
                let mut c: Vec<Entry> = x.into_iter().map(|(r, v)| (beta.position_of(r), v)).collect();
                c.sort_unstable_by_key(|e| e.0);
                c
            })
            .collect();
        let a_inv_b = SparseMatrix::from_columns_unchecked(m, a_inv_b_cols, field);

        let second = umatch_decompose(&a_inv_b);
        if !second.validate(&a_inv_b)? {
            return Err(PrhError::Internal("second U-match failed validation".into()));
        }
        if second.rank() != m || !is_generalized_matching(&second.m) {
            return Err(PrhError::Internal(format!(
                "second matching has {} of {m} entries",
                second.rank()
            )));
        }
        Ok(Self {
            first,
            fim,
            fker,
            beta,
            gamma,
            a_inv_b,
            second,
        })
    }

    /// Column `i` of `A·T̄`, as a chain of cell ids.
    pub(crate) fn representative(&self, i: usize, acc: &mut Accumulator) -> Chain {
        let t = &self.first.factors.t;
        let field = t.field();
        for &(k, v) in self.second.t.col(i) {
            acc.add_scaled(field, t.col(self.beta.forward(k)), v);
        }
        let rows = &self.first.boundary.rows;
        Chain::new(acc.drain().into_iter().map(|(r, v)| (rows.forward(r), v)).collect())
    }

    pub fn barcode(&self) -> Result<Barcode, PrhError> {
        let pair = self.first.pair;
        let m = pair.len();
        let mut acc = Accumulator::new(m);
        let mut bars = Vec::new();
        for (i, j) in self.second.matching() {
            let birth = self.fker[self.gamma.forward(j)];
            let death = self.fim[self.beta.forward(i)];
            if birth == death {
                continue;
            }
            if birth > death {
                return Err(PrhError::Internal(format!(
                    "column {i} is born at {birth} after it dies at {death}"
                )));
            }
            let representative = self.representative(i, &mut acc);
            let dim = representative
                .dim(|c| pair.dim(c))
                .ok_or_else(|| PrhError::Internal(format!("representative {i} is not homogeneous")))?;
            bars.push(Bar {
                dim,
                birth,
                death,
                representative,
            });
        }
        Ok(Barcode::new(bars, pair.field().modulus(), Pipeline::General, m))
    }
}

/// Barcode of `t ↦ H_*(F_t, G_t)` with relative cycle representatives.
pub fn compute_prh(pair: &FilteredPair) -> Result<Barcode, PrhError> {
    PrhRun::new(pair)?.barcode()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{apply_lag, build_rips, Cell};
    use crate::field::PrimeField;

    fn vertex(bf: f64, bg: f64) -> Cell {
        Cell {
            dim: 0,
            boundary: vec![],
            birth_f: bf,
            birth_g: bg,
        }
    }

    #[test]
    fn lookup_formulas() {
        assert_eq!(fim_lookup(0.75, None), 0.75);
        let diag = 2f64.sqrt() / 2.0;
        assert_eq!(fim_lookup(0.75, Some(diag)), diag);
        assert_eq!(fim_lookup(0.5, Some(0.9)), 0.5);
        assert_eq!(fker_lookup(0.5, None), 0.5);
        assert_eq!(fker_lookup(0.5, Some(0.75)), 0.75);
        assert_eq!(fker_lookup(0.5, Some(0.25)), 0.5);
    }

    #[test]
    fn single_vertex_bar() {
        let pair = FilteredPair::new(PrimeField::gf2(), vec![vertex(0.0, 5.0)]);
        let bc = compute_prh(&pair).unwrap();
        assert_eq!(bc.len(), 1);
        let bar = &bc.bars[0];
        assert_eq!((bar.dim, bar.birth, bar.death), (0, 0.0, 5.0));
        assert_eq!(bar.representative.terms(), &[(0, 1)]);
    }

    #[test]
    fn lag_zero_is_empty() {
        let pts: Vec<Vec<f64>> = vec![vec![0.0, 0.0], vec![1.0, 0.1], vec![0.3, 0.9], vec![1.2, 1.1]];
        let r = build_rips(&pts, 2, 10.0, PrimeField::new(3).unwrap()).unwrap();
        let bc = compute_prh(&apply_lag(&r, 0.0).unwrap()).unwrap();
        assert!(bc.is_empty());
    }

    #[test]
    fn betti_curve_half_open() {
        let empty = Barcode::new(vec![], 2, Pipeline::General, 0);
        assert_eq!(betti_curve(&empty, 0.0, 0), 0);
        let one = Barcode::new(
            vec![Bar {
                dim: 0,
                birth: 0.0,
                death: 1.0,
                representative: Chain::new(vec![(0, 1)]),
            }],
            2,
            Pipeline::General,
            1,
        );
        assert_eq!(betti_curve(&one, 0.0, 0), 1);
        assert_eq!(betti_curve(&one, 1.0, 0), 0);
        assert_eq!(betti_curve(&one, 0.5, 1), 0);
    }

    #[test]
    fn invalid_pair_is_rejected() {
        let pair = FilteredPair::new(PrimeField::gf2(), vec![vertex(1.0, 0.0)]);
        assert!(matches!(compute_prh(&pair), Err(PrhError::Complex(_))));
    }

    #[test]
    fn factorization_invariants_on_grid() {
        let pts: Vec<Vec<f64>> = (0..3)
            .flat_map(|i| (0..3).map(move |j| vec![i as f64 * 0.5, j as f64 * 0.5]))
            .collect();
        let r = build_rips(&pts, 2, 0.75, PrimeField::gf2()).unwrap();
        let pair = apply_lag(&r, 0.25).unwrap();
        let run = PrhRun::new(&pair).unwrap();
        assert!(run.first.factors.validate(&run.first.boundary.matrix).unwrap());
        assert!(run.second.validate(&run.a_inv_b).unwrap());
        assert_eq!(run.second.rank(), pair.len());
        // sorted lookups
        assert!(run.beta.as_slice().windows(2).all(|w| run.fim[w[0]] <= run.fim[w[1]]));
        assert!(run.gamma.as_slice().windows(2).all(|w| run.fker[w[0]] <= run.fker[w[1]]));
    }
}
