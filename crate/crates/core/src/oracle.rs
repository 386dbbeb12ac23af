//! Brute-force reference computations by dense linear algebra.
//!
//! Relative cycles `Z(F_t, G_t) = C(F_t) ∩ ∂⁻¹(C(G_t))` and relative
//! boundaries `B(F_t, G_t) = ∂C(F_t) + C(G_t)` are built directly from their
//! definitions, one homological dimension at a time, and compared by rank.
//! Nothing here touches the sparse reduction code; only the field and the
//! complex data model are shared.

use thiserror::Error;

use crate::complex::{validate_pair, Chain, FilteredPair};
use crate::field::PrimeField;
use crate::prh::Bar;

/// Instances larger than this are refused.
pub const DEFAULT_MAX_CELLS: usize = 2000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("pair has {cells} cells; the oracle is capped at {cap}")]
    TooLarge { cells: usize, cap: usize },
    #[error("pair is invalid: {0} violation(s)")]
    InvalidPair(usize),
    #[error("persistent Betti number needs s <= t (got s = {s}, t = {t})")]
    DecreasingInterval { s: f64, t: f64 },
}

/// Row-reduce `rows` in place; returns the echelon rows (nonzero, independent)
/// with their pivot columns.
fn echelon(field: &PrimeField, mut rows: Vec<Vec<u32>>) -> (Vec<Vec<u32>>, Vec<usize>) {
    let width = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..width {
        let Some(found) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(rank, found);
        let inv = field.inv(rows[rank][col]).expect("nonzero pivot");
        for x in rows[rank].iter_mut() {
            *x = field.mul(*x, inv);
        }
        let pivot_row = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row[col] != 0 {
                let factor = field.neg(row[col]);
                for (x, &y) in row.iter_mut().zip(&pivot_row) {
                    *x = field.add(*x, field.mul(factor, y));
                }
            }
        }
        pivots.push(col);
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rows.truncate(rank);
    (rows, pivots)
}

/// A linearly independent set spanning a subspace of `GF(p)^ambient`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceBasis {
    pub ambient: usize,
    pub vectors: Vec<Vec<u32>>,
}

impl SubspaceBasis {
    /// A basis of the span of `vectors`.
    pub fn span(field: &PrimeField, ambient: usize, vectors: Vec<Vec<u32>>) -> Self {
        debug_assert!(vectors.iter().all(|v| v.len() == ambient));
        let (vectors, _) = echelon(field, vectors);
        Self { ambient, vectors }
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    /// Dimension of the sum of two subspaces.
    pub fn sum_dim(&self, field: &PrimeField, other: &SubspaceBasis) -> usize {
        let all: Vec<Vec<u32>> = self.vectors.iter().chain(&other.vectors).cloned().collect();
        echelon(field, all).0.len()
    }

    pub fn intersection_dim(&self, field: &PrimeField, other: &SubspaceBasis) -> usize {
        self.dim() + other.dim() - self.sum_dim(field, other)
    }

    pub fn contains(&self, field: &PrimeField, v: &[u32]) -> bool {
        if v.iter().all(|&x| x == 0) {
            return true;
        }
        let mut all = self.vectors.clone();
        all.push(v.to_vec());
        echelon(field, all).0.len() == self.dim()
    }
}

/// Dense reference computations on one filtered pair.
pub struct Oracle<'a> {
    pair: &'a FilteredPair,
    field: PrimeField,
    /// Cell ids of each dimension.
    by_dim: Vec<Vec<usize>>,
    /// Position of each cell within its dimension.
    local: Vec<usize>,
}

impl<'a> Oracle<'a> {
    pub fn new(pair: &'a FilteredPair) -> Result<Self, OracleError> {
        Self::with_cap(pair, DEFAULT_MAX_CELLS)
    }

    pub fn with_cap(pair: &'a FilteredPair, cap: usize) -> Result<Self, OracleError> {
        if pair.len() > cap {
            return Err(OracleError::TooLarge { cells: pair.len(), cap });
        }
        let violations = validate_pair(pair);
        if !violations.is_empty() {
            return Err(OracleError::InvalidPair(violations.len()));
        }
        let top = pair.cells().iter().map(|c| c.dim).max().unwrap_or(0);
        let mut by_dim = vec![Vec::new(); top + 1];
        let mut local = vec![0; pair.len()];
        for (id, c) in pair.cells().iter().enumerate() {
            local[id] = by_dim[c.dim].len();
            by_dim[c.dim].push(id);
        }
        Ok(Self {
            pair,
            field: pair.field().clone(),
            by_dim,
            local,
        })
    }

    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    pub fn top_dim(&self) -> usize {
        self.by_dim.len() - 1
    }

    fn cells(&self, p: usize) -> &[usize] {
        self.by_dim.get(p).map_or(&[], Vec::as_slice)
    }

    /// Dense coordinates of the boundary of `cell` in `C_{dim-1}`.
    fn boundary_vector(&self, cell: usize) -> Vec<u32> {
        let c = &self.pair.cells()[cell];
        let mut v = vec![0; self.cells(c.dim.wrapping_sub(1)).len()];
        for &(face, coeff) in &c.boundary {
            let slot = &mut v[self.local[face]];
            *slot = self.field.add(*slot, coeff % self.field.modulus());
        }
        v
    }

    /// Dense coordinates of a homogeneous chain, with its dimension.
    pub fn chain_vector(&self, chain: &Chain) -> Option<(usize, Vec<u32>)> {
        let p = chain.dim(|c| self.pair.dim(c))?;
        let mut v = vec![0; self.cells(p).len()];
        for &(c, coeff) in chain.terms() {
            v[self.local[c]] = coeff % self.field.modulus();
        }
        Some((p, v))
    }

    /// Basis of `Z_p(F_t, G_t)`: `p`-chains on cells with `b_F ≤ t` whose
    /// boundary vanishes outside `G_t`.
    pub fn relative_cycles(&self, t: f64, p: usize) -> SubspaceBasis {
        let ambient = self.cells(p).len();
        let columns: Vec<usize> = self
            .cells(p)
            .iter()
            .copied()
            .filter(|&c| self.pair.birth_f(c) <= t)
            .collect();
        let outside_g: Vec<usize> = if p == 0 {
            Vec::new()
        } else {
            (0..self.cells(p - 1).len())
                .filter(|&k| self.pair.birth_g(self.cells(p - 1)[k]) > t)
                .collect()
        };
        // Kernel of the boundary restricted to `columns`, rows outside G_t.
        // Rows of `system` are the columns of that matrix, so the kernel is
        // the left null space of `system`: reduce [system | I].
        let k = columns.len();
        let augmented: Vec<Vec<u32>> = columns
            .iter()
            .enumerate()
            .map(|(idx, &c)| {
                let b = if p == 0 { Vec::new() } else { self.boundary_vector(c) };
                let mut row: Vec<u32> = outside_g.iter().map(|&r| b[r]).collect();
                row.extend((0..k).map(|q| u32::from(q == idx)));
                row
            })
            .collect();
        let (ech, pivots) = echelon(&self.field, augmented);
        let w = outside_g.len();
        let vectors = ech
            .into_iter()
            .zip(pivots)
            .filter(|&(_, piv)| piv >= w)
            .map(|(row, _)| {
                let mut v = vec![0; ambient];
                for (q, &c) in columns.iter().enumerate() {
                    v[self.local[c]] = row[w + q];
                }
                v
            })
            .collect();
        SubspaceBasis { ambient, vectors }
    }

    /// Basis of `B_p(F_t, G_t) = ∂C_{p+1}(F_t) + C_p(G_t)`.
    pub fn relative_boundaries(&self, t: f64, p: usize) -> SubspaceBasis {
        let ambient = self.cells(p).len();
        let mut vectors: Vec<Vec<u32>> = self
            .cells(p + 1)
            .iter()
            .filter(|&&c| self.pair.birth_f(c) <= t)
            .map(|&c| self.boundary_vector(c))
            .collect();
        for (k, &c) in self.cells(p).iter().enumerate() {
            if self.pair.birth_g(c) <= t {
                let mut e = vec![0; ambient];
                e[k] = 1;
                vectors.push(e);
            }
        }
        SubspaceBasis::span(&self.field, ambient, vectors)
    }

    /// `dim H_p(F_t, G_t)`.
    pub fn relative_homology_dim(&self, t: f64, p: usize) -> usize {
        let z = self.relative_cycles(t, p);
        let b = self.relative_boundaries(t, p);
        z.dim() - z.intersection_dim(&self.field, &b)
    }

    /// Rank of `H_p(F_s, G_s) → H_p(F_t, G_t)`.
    pub fn persistent_betti(&self, s: f64, t: f64, p: usize) -> Result<usize, OracleError> {
        if s > t {
            return Err(OracleError::DecreasingInterval { s, t });
        }
        let z = self.relative_cycles(s, p);
        let b = self.relative_boundaries(t, p);
        Ok(z.dim() - z.intersection_dim(&self.field, &b))
    }

    /// Sorted distinct birth values of both filtrations, plus `t_end`.
    pub fn critical_values(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self
            .pair
            .cells()
            .iter()
            .flat_map(|c| [c.birth_f, c.birth_g])
            .chain(std::iter::once(self.pair.t_end()))
            .collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }

    /// Barcode as sorted `(dim, birth, death)` triples, from persistent Betti
    /// numbers on the critical-value grid by inclusion–exclusion.
    pub fn reference_barcode(&self) -> Vec<(usize, f64, f64)> {
        let grid = self.critical_values();
        let k = grid.len();
        let mut bars = Vec::new();
        for p in 0..=self.top_dim() {
            let z: Vec<SubspaceBasis> = grid.iter().map(|&t| self.relative_cycles(t, p)).collect();
            let b: Vec<SubspaceBasis> = grid.iter().map(|&t| self.relative_boundaries(t, p)).collect();
            // beta[i][j] = rank H(s_i) → H(t_j) = dim(Z_i + B_j) - dim B_j
            let mut beta = vec![vec![0i64; k]; k];
            for i in 0..k {
                for j in i..k {
                    beta[i][j] = (z[i].sum_dim(&self.field, &b[j]) - b[j].dim()) as i64;
                }
            }
            let at = |i: Option<usize>, j: usize| i.map_or(0, |i| beta[i][j]);
            for i in 0..k {
                for j in i + 1..k {
                    let prev = i.checked_sub(1);
                    let mu = (at(Some(i), j - 1) - at(Some(i), j)) - (at(prev, j - 1) - at(prev, j));
                    assert!(mu >= 0, "negative multiplicity at ({i}, {j})");
                    bars.extend(std::iter::repeat_n((p, grid[i], grid[j]), mu as usize));
                }
            }
        }
        bars
    }

    /// True iff the bar's representative is a relative cycle at `birth`, is
    /// not a relative boundary anywhere in `[birth, death)`, and is one at
    /// `death`.
    pub fn verify_representative(&self, bar: &Bar) -> bool {
        self.check_representative(bar).is_ok()
    }

    /// Like [`verify_representative`](Self::verify_representative) with the
    /// reason for a failure.
    pub fn check_representative(&self, bar: &Bar) -> Result<(), String> {
        let Some((p, v)) = self.chain_vector(&bar.representative) else {
            return Err("representative is empty or mixes dimensions".into());
        };
        if p != bar.dim {
            return Err(format!("representative has dimension {p}, bar has {}", bar.dim));
        }
        if !(bar.birth < bar.death) {
            return Err("empty interval".into());
        }
        if !self.relative_cycles(bar.birth, p).contains(&self.field, &v) {
            return Err(format!("not a relative cycle at birth {}", bar.birth));
        }
        let grid = self.critical_values();
        let mut probes = vec![bar.birth];
        probes.extend(
            grid.windows(2)
                .filter(|w| w[0] >= bar.birth && w[1] <= bar.death)
                .map(|w| (w[0] + w[1]) / 2.0),
        );
        for t in probes {
            if self.relative_boundaries(t, p).contains(&self.field, &v) {
                return Err(format!("already a relative boundary at {t}"));
            }
        }
        if !self.relative_boundaries(bar.death, p).contains(&self.field, &v) {
            return Err(format!("not a relative boundary at death {}", bar.death));
        }
        Ok(())
    }
}
