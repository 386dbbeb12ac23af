//! Single-factorization pipeline for lag filtrations `G_t = F_{t-l}`.
//!
//! With rows and columns of the boundary matrix `D` both sorted by `b_F`,
//! one `R = D·V` reduction yields a U-match of the form `J·M = D·J`. The
//! columns of `J` already contain bases for every relative cycle and relative
//! boundary space of the lag pair, so each column is a bar on its own.

use crate::complex::{Chain, ComplexError, Filtration};
use crate::prh::{fim_lookup, fker_lookup, Bar, Barcode, Pipeline, PrhError};
use crate::sparse::{Entry, MatrixError, Permutation, SparseMatrix};
use crate::umatch::{is_generalized_matching, normalize_at, reduce};

/// `J·M = D·J` with `D` in `b_F` order on both sides.
#[derive(Debug, Clone)]
pub struct LagFactors {
    pub j: SparseMatrix,
    pub m: SparseMatrix,
    /// Cells sorted by `(b_F, dim, id)`; indexes rows and columns of all factors.
    pub ordering: Permutation,
    /// `D` in `ordering` on rows and columns.
    pub d: SparseMatrix,
}

impl LagFactors {
    pub fn validate(&self) -> Result<bool, MatrixError> {
        Ok(self.j.is_upper_unitriangular()
            && is_generalized_matching(&self.m)
            && self.j.matmul(&self.m)? == self.d.matmul(&self.j)?)
    }
}

fn ordered_boundary(filtration: &Filtration) -> Result<(SparseMatrix, Permutation), ComplexError> {
    let violations = filtration.violations();
    if !violations.is_empty() {
        return Err(ComplexError::Invalid(violations));
    }
    let order = filtration.order();
    let p = filtration.field().modulus();
    let cols = order
        .as_slice()
        .iter()
        .map(|&cell| {
            let mut c: Vec<Entry> = filtration.cells()[cell]
                .boundary
                .iter()
                .map(|&(face, v)| (order.position_of(face), v % p))
                .filter(|e| e.1 != 0)
                .collect();
            c.sort_unstable_by_key(|e| e.0);
            c
        })
        .collect();
    let d = SparseMatrix::from_columns(filtration.len(), cols, filtration.field().clone())
        .expect("validated boundary data forms a sparse matrix");
    Ok((d, order))
}

/// Factor the boundary matrix as `J·M = D·J`.
///
/// A column `k` that is the pivot row of a reduced column `R_j` gets
/// `J_k = R_j` scaled to one at `k`; every other column gets `J_k = V_k`.
/// `M[low(R_j), j]` is the pivot value of `R_j`.
pub fn lag_decompose(filtration: &Filtration) -> Result<LagFactors, PrhError> {
    let (d, ordering) = ordered_boundary(filtration)?;
    let field = d.field().clone();
    let n = d.ncols();
    let red = reduce(&d);
    let j_cols = (0..n)
        .map(|k| match red.pivot_col[k] {
            Some(j) => normalize_at(&field, &red.r[j], k),
            None => red.v[k].clone(),
        })
        .collect();
    let m_cols = (0..n).map(|j| red.low(j).into_iter().collect()).collect();
    let factors = LagFactors {
        j: SparseMatrix::from_columns_unchecked(n, j_cols, field.clone()),
        m: SparseMatrix::from_columns_unchecked(n, m_cols, field),
        ordering,
        d,
    };
    if !factors.validate()? {
        return Err(PrhError::Internal("J·M = D·J failed validation".into()));
    }
    Ok(factors)
}

/// Barcode of the lag pair `(F, F_{· - lag})` from a single factorization.
/// Births and deaths are `b_F` values or `b_F + lag`, with the lag added once.
pub fn compute_prh_lag(filtration: &Filtration, lag: f64) -> Result<Barcode, PrhError> {
    if !(lag.is_finite() && lag >= 0.0) {
        return Err(ComplexError::InvalidLag(lag).into());
    }
    let factors = lag_decompose(filtration)?;
    let n = filtration.len();
    let order = &factors.ordering;
    let birth_f = |pos: usize| filtration.cells()[order.forward(pos)].birth;

    let mut row_match = vec![None; n];
    let mut col_match = vec![None; n];
    for (col, entries) in factors.m.columns().iter().enumerate() {
        if let Some(&(row, _)) = entries.first() {
            row_match[row] = Some(col);
            col_match[col] = Some(row);
        }
    }

    let mut bars = Vec::new();
    for alpha in 0..n {
        let birth = fker_lookup(birth_f(alpha), col_match[alpha].map(|rho| birth_f(rho) + lag));
        let death = fim_lookup(birth_f(alpha) + lag, row_match[alpha].map(birth_f));
        if birth > death {
            return Err(PrhError::Internal(format!(
                "column {alpha} is born at {birth} after it dies at {death}"
            )));
        }
        if birth == death {
            continue;
        }
        let representative = Chain::new(
            factors
                .j
                .col(alpha)
                .iter()
                .map(|&(r, v)| (order.forward(r), v))
                .collect(),
        );
        let dim = representative
            .dim(|c| filtration.cells()[c].dim)
            .ok_or_else(|| PrhError::Internal(format!("column {alpha} of J is not homogeneous")))?;
        bars.push(Bar {
            dim,
            birth,
            death,
            representative,
        });
    }
    Ok(Barcode::new(bars, filtration.field().modulus(), Pipeline::Lag, n))
}
