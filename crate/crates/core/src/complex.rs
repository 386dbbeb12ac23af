//! Filtered cell complexes and filtered pairs.
//!
//! A [`FilteredPair`] is one cell complex `X` carrying two birth functions:
//! `b_F` for the ambient filtration and `b_G` for the subcomplex filtration,
//! with `G_t ⊆ F_t` for every `t`. Cells are identified by their index.
//! Filtration values are `f64`; two values are equal only if bit-equal.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::field::PrimeField;
use crate::sparse::{Entry, Permutation, SparseMatrix};

/// A cell of a filtered pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub dim: usize,
    /// `(face id, coefficient)`, sorted by face id.
    pub boundary: Vec<Entry>,
    pub birth_f: f64,
    pub birth_g: f64,
}

/// A cell carrying a single birth value.
#[derive(Debug, Clone, PartialEq)]
pub struct FilteredCell {
    pub dim: usize,
    pub boundary: Vec<Entry>,
    pub birth: f64,
}

/// A filtered complex with one birth function, e.g. a Vietoris–Rips complex.
#[derive(Debug, Clone, PartialEq)]
pub struct Filtration {
    field: PrimeField,
    cells: Vec<FilteredCell>,
}

impl Filtration {
    pub fn new(field: PrimeField, cells: Vec<FilteredCell>) -> Self {
        Self { field, cells }
    }

    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    pub fn cells(&self) -> &[FilteredCell] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Largest birth value, or 0 for an empty complex.
    pub fn max_birth(&self) -> f64 {
        self.cells.iter().map(|c| c.birth).fold(0.0, f64::max)
    }

    /// Structural violations: bad faces, non-monotone births, `∂∂ ≠ 0`.
    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        check_structure(
            &self.field,
            self.cells.len(),
            |i| (self.cells[i].dim, &self.cells[i].boundary),
            &mut out,
        );
        check_births(self.cells.len(), |i| self.cells[i].birth, Filt::F, &self.cells_faces(), &mut out);
        out
    }

    fn cells_faces(&self) -> Vec<&[Entry]> {
        self.cells.iter().map(|c| c.boundary.as_slice()).collect()
    }

    /// The order in which cells enter: by birth, then dimension, then id.
    pub fn order(&self) -> Permutation {
        filtration_order(self.cells.len(), |i| self.cells[i].birth, |i| self.cells[i].dim)
    }
}

/// A cell complex with two nested filtrations `G_t ⊆ F_t` that both reach
/// the full complex by `t_end`.
#[derive(Debug, Clone, PartialEq)]
pub struct FilteredPair {
    field: PrimeField,
    cells: Vec<Cell>,
    t_end: f64,
}

impl FilteredPair {
    /// `t_end` is taken to be the largest finite birth value.
    pub fn new(field: PrimeField, cells: Vec<Cell>) -> Self {
        let t_end = cells
            .iter()
            .flat_map(|c| [c.birth_f, c.birth_g])
            .filter(|b| b.is_finite())
            .fold(f64::NEG_INFINITY, f64::max);
        let t_end = if t_end.is_finite() { t_end } else { 0.0 };
        Self { field, cells, t_end }
    }

    pub fn with_terminal(field: PrimeField, cells: Vec<Cell>, t_end: f64) -> Self {
        Self { field, cells, t_end }
    }

    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn birth_f(&self, cell: usize) -> f64 {
        self.cells[cell].birth_f
    }

    pub fn birth_g(&self, cell: usize) -> f64 {
        self.cells[cell].birth_g
    }

    pub fn dim(&self, cell: usize) -> usize {
        self.cells[cell].dim
    }

    /// Cells that never enter the subcomplex (`b_G = +∞`) are made to enter at
    /// `t_end`, so that `G_{t_end} = X`. Returns the number of cells changed.
    pub fn extend_to_terminal(&mut self) -> usize {
        let t_end = self.t_end;
        let mut changed = 0;
        for c in &mut self.cells {
            if c.birth_g == f64::INFINITY {
                c.birth_g = t_end;
                changed += 1;
            }
        }
        changed
    }

    /// Forget the subcomplex filtration.
    pub fn ambient(&self) -> Filtration {
        Filtration::new(
            self.field.clone(),
            self.cells
                .iter()
                .map(|c| FilteredCell {
                    dim: c.dim,
                    boundary: c.boundary.clone(),
                    birth: c.birth_f,
                })
                .collect(),
        )
    }
}

/// A chain: `(cell id, coefficient)` pairs sorted by id, all nonzero.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Chain {
    terms: Vec<Entry>,
}

impl Chain {
    /// Sorts the terms and drops zero coefficients. Panics on repeated cells.
    pub fn new(mut terms: Vec<Entry>) -> Self {
        terms.retain(|e| e.1 != 0);
        terms.sort_unstable_by_key(|e| e.0);
        assert!(terms.windows(2).all(|w| w[0].0 < w[1].0), "repeated cell in chain");
        Self { terms }
    }

    pub fn terms(&self) -> &[Entry] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    /// Common dimension of the cells, if the chain is nonempty and homogeneous.
    pub fn dim(&self, dim_of: impl Fn(usize) -> usize) -> Option<usize> {
        let d = dim_of(self.terms.first()?.0);
        self.terms.iter().all(|e| dim_of(e.0) == d).then_some(d)
    }
}

impl fmt::Display for Chain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, (c, v)) in self.terms.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}:{v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Filt {
    F,
    G,
}

impl fmt::Display for Filt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Filt::F => "F",
            Filt::G => "G",
        })
    }
}

/// One failed invariant of a cell complex or filtered pair.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    FaceOutOfRange { cell: usize, face: usize },
    FaceDimension { cell: usize, face: usize },
    BadCoefficient { cell: usize, face: usize },
    RepeatedFace { cell: usize, face: usize },
    BoundaryNotCycle { cell: usize },
    NonFiniteBirth { cell: usize, filtration: Filt },
    FaceBornLater { cell: usize, face: usize, filtration: Filt },
    PairContainment { cell: usize },
    NotTerminated { cell: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::FaceOutOfRange { cell, face } => write!(f, "cell {cell}: face {face} does not exist"),
            Violation::FaceDimension { cell, face } => {
                write!(f, "cell {cell}: face {face} does not have dimension one lower")
            }
            Violation::BadCoefficient { cell, face } => {
                write!(f, "cell {cell}: coefficient on face {face} is zero mod p")
            }
            Violation::RepeatedFace { cell, face } => write!(f, "cell {cell}: face {face} listed twice"),
            Violation::BoundaryNotCycle { cell } => write!(f, "cell {cell}: boundary of boundary is nonzero"),
            Violation::NonFiniteBirth { cell, filtration } => {
                write!(f, "cell {cell}: non-finite birth in {filtration}")
            }
            Violation::FaceBornLater { cell, face, filtration } => write!(
                f,
                "face-monotonicity: cell {cell} enters {filtration} before its face {face}"
            ),
            Violation::PairContainment { cell } => {
                write!(f, "pair-containment: cell {cell} has b_G < b_F")
            }
            Violation::NotTerminated { cell } => write!(f, "cell {cell} is born after the terminal value"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ComplexError {
    #[error("point cloud is empty")]
    EmptyPointCloud,
    #[error("point {index} has dimension {found}, expected {expected}")]
    RaggedPoints { index: usize, expected: usize, found: usize },
    #[error("point {index} has a non-finite coordinate")]
    NonFiniteCoordinate { index: usize },
    #[error("points {first} and {second} coincide")]
    DuplicatePoint { first: usize, second: usize },
    #[error("max radius must be a non-negative number, got {0}")]
    InvalidRadius(f64),
    #[error("lag must be a finite non-negative number, got {0}")]
    InvalidLag(f64),
    #[error("invalid complex: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
}

fn check_structure<'a>(
    field: &PrimeField,
    n: usize,
    cell: impl Fn(usize) -> (usize, &'a Vec<Entry>),
    out: &mut Vec<Violation>,
) {
    for i in 0..n {
        let (dim, boundary) = cell(i);
        let mut structurally_ok = true;
        for (k, &(face, coeff)) in boundary.iter().enumerate() {
            if face >= n {
                out.push(Violation::FaceOutOfRange { cell: i, face });
                structurally_ok = false;
                continue;
            }
            if dim == 0 || cell(face).0 + 1 != dim {
                out.push(Violation::FaceDimension { cell: i, face });
                structurally_ok = false;
            }
            if coeff % field.modulus() == 0 {
                out.push(Violation::BadCoefficient { cell: i, face });
            }
            if boundary[..k].iter().any(|e| e.0 == face) {
                out.push(Violation::RepeatedFace { cell: i, face });
            }
        }
        if !structurally_ok {
            continue;
        }
        // ∂∂ = 0
        let mut acc: HashMap<usize, u32> = HashMap::new();
        for &(face, c) in boundary {
            for &(ff, c2) in cell(face).1 {
                if ff >= n {
                    continue;
                }
                let slot = acc.entry(ff).or_insert(0);
                *slot = field.add(*slot, field.mul(c % field.modulus(), c2 % field.modulus()));
            }
        }
        if acc.values().any(|&v| v != 0) {
            out.push(Violation::BoundaryNotCycle { cell: i });
        }
    }
}

fn check_births(n: usize, birth: impl Fn(usize) -> f64, filt: Filt, faces: &[&[Entry]], out: &mut Vec<Violation>) {
    for i in 0..n {
        let b = birth(i);
        if b.is_nan() || b == f64::NEG_INFINITY || (filt == Filt::F && b.is_infinite()) {
            out.push(Violation::NonFiniteBirth { cell: i, filtration: filt });
            continue;
        }
        for &(face, _) in faces[i] {
            if face < n && birth(face) > b {
                out.push(Violation::FaceBornLater {
                    cell: i,
                    face,
                    filtration: filt,
                });
            }
        }
    }
}

/// Every invariant violated by `pair`; empty iff the pair is valid.
pub fn validate_pair(pair: &FilteredPair) -> Vec<Violation> {
    let n = pair.cells.len();
    let mut out = Vec::new();
    check_structure(&pair.field, n, |i| (pair.cells[i].dim, &pair.cells[i].boundary), &mut out);
    let faces: Vec<&[Entry]> = pair.cells.iter().map(|c| c.boundary.as_slice()).collect();
    check_births(n, |i| pair.cells[i].birth_f, Filt::F, &faces, &mut out);
    check_births(n, |i| pair.cells[i].birth_g, Filt::G, &faces, &mut out);
    for (i, c) in pair.cells.iter().enumerate() {
        if c.birth_g.is_infinite() && c.birth_g > 0.0 {
            out.push(Violation::NonFiniteBirth { cell: i, filtration: Filt::G });
        }
        if c.birth_g < c.birth_f {
            out.push(Violation::PairContainment { cell: i });
        }
        if c.birth_f > pair.t_end || c.birth_g > pair.t_end {
            out.push(Violation::NotTerminated { cell: i });
        }
    }
    out
}

fn compare_entry(a: (f64, usize, usize), b: (f64, usize, usize)) -> Ordering {
    a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2))
}

/// Cells sorted by `(birth, dimension, id)`; faces precede cofaces when
/// births are face-monotone.
pub fn filtration_order(n: usize, birth: impl Fn(usize) -> f64, dim: impl Fn(usize) -> usize) -> Permutation {
    let mut ids: Vec<usize> = (0..n).collect();
    ids.sort_by(|&a, &b| compare_entry((birth(a), dim(a), a), (birth(b), dim(b), b)));
    Permutation::from_forward(ids).expect("sorted ids form a permutation")
}

/// The boundary matrix of a pair with rows in `b_G` order and columns in
/// `b_F` order.
#[derive(Debug, Clone)]
pub struct BoundaryMatrix {
    /// Entry `(i, j)` is the coefficient of cell `rows.forward(i)` in the
    /// boundary of cell `cols.forward(j)`.
    pub matrix: SparseMatrix,
    /// Row order: cells sorted by `b_G`.
    pub rows: Permutation,
    /// Column order: cells sorted by `b_F`.
    pub cols: Permutation,
}

pub fn boundary_matrix(pair: &FilteredPair) -> Result<BoundaryMatrix, ComplexError> {
    let violations = validate_pair(pair);
    if !violations.is_empty() {
        return Err(ComplexError::Invalid(violations));
    }
    let n = pair.len();
    let rows = filtration_order(n, |i| pair.birth_g(i), |i| pair.dim(i));
    let cols = filtration_order(n, |i| pair.birth_f(i), |i| pair.dim(i));
    let p = pair.field.modulus();
    let columns = cols
        .as_slice()
        .iter()
        .map(|&cell| {
            let mut col: Vec<Entry> = pair.cells[cell]
                .boundary
                .iter()
                .map(|&(face, v)| (rows.position_of(face), v % p))
                .filter(|e| e.1 != 0)
                .collect();
            col.sort_unstable_by_key(|e| e.0);
            col
        })
        .collect();
    let matrix = SparseMatrix::from_columns(n, columns, pair.field.clone())
        .expect("validated boundary data forms a sparse matrix");
    Ok(BoundaryMatrix { matrix, rows, cols })
}

/// Vietoris–Rips filtration: every simplex of dimension `≤ max_dim` whose
/// diameter is `≤ max_radius`, born at its diameter (Euclidean).
///
/// Cell ids run through vertices, then edges, then triangles, …, each
/// dimension in lexicographic order of sorted vertex lists. Face `k` of a
/// simplex (omit the `k`-th vertex) carries sign `(-1)^k`.
pub fn build_rips(
    points: &[Vec<f64>],
    max_dim: usize,
    max_radius: f64,
    field: PrimeField,
) -> Result<Filtration, ComplexError> {
    if points.is_empty() {
        return Err(ComplexError::EmptyPointCloud);
    }
    if max_radius.is_nan() || max_radius < 0.0 {
        return Err(ComplexError::InvalidRadius(max_radius));
    }
    let d = points[0].len();
    for (index, pt) in points.iter().enumerate() {
        if pt.len() != d {
            return Err(ComplexError::RaggedPoints {
                index,
                expected: d,
                found: pt.len(),
            });
        }
        if pt.iter().any(|x| !x.is_finite()) {
            return Err(ComplexError::NonFiniteCoordinate { index });
        }
    }
    let n = points.len();
    let mut dist = vec![0.0f64; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let sq: f64 = points[i]
                .iter()
                .zip(&points[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            if sq == 0.0 {
                return Err(ComplexError::DuplicatePoint { first: i, second: j });
            }
            let r = sq.sqrt();
            dist[i * n + j] = r;
            dist[j * n + i] = r;
        }
    }
    let neighbors: Vec<Vec<usize>> = (0..n)
        .map(|i| (i + 1..n).filter(|&j| dist[i * n + j] <= max_radius).collect())
        .collect();

    // simplices[k] lists the k-simplices in lexicographic order with diameters
    let mut simplices: Vec<Vec<(Vec<usize>, f64)>> = vec![(0..n).map(|i| (vec![i], 0.0)).collect()];
    for k in 1..=max_dim {
        let mut next = Vec::new();
        for (s, diam) in &simplices[k - 1] {
            let last = *s.last().expect("simplices are nonempty");
            for &v in &neighbors[last] {
                if s[..s.len() - 1].iter().all(|&u| dist[u * n + v] <= max_radius) {
                    let diam = s.iter().map(|&u| dist[u * n + v]).fold(*diam, f64::max);
                    let mut t = s.clone();
                    t.push(v);
                    next.push((t, diam));
                }
            }
        }
        if next.is_empty() {
            break;
        }
        next.sort_by(|a, b| a.0.cmp(&b.0));
        simplices.push(next);
    }

    let mut ids: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut cells = Vec::new();
    let minus_one = field.neg(1);
    for (k, level) in simplices.into_iter().enumerate() {
        for (s, birth) in level {
            let boundary = if k == 0 {
                Vec::new()
            } else {
                let mut b: Vec<Entry> = (0..s.len())
                    .map(|omit| {
                        let face: Vec<usize> =
                            s.iter().enumerate().filter(|&(q, _)| q != omit).map(|(_, &v)| v).collect();
                        let sign = if omit % 2 == 0 { 1 } else { minus_one };
                        (ids[&face], sign)
                    })
                    .collect();
                b.sort_unstable_by_key(|e| e.0);
                b
            };
            ids.insert(s, cells.len());
            cells.push(FilteredCell { dim: k, boundary, birth });
        }
    }
    Ok(Filtration::new(field, cells))
}

/// The lag pair `G_t = F_{t-l}`: `b_G = b_F + l` for every cell.
pub fn apply_lag(filtration: &Filtration, lag: f64) -> Result<FilteredPair, ComplexError> {
    if !(lag.is_finite() && lag >= 0.0) {
        return Err(ComplexError::InvalidLag(lag));
    }
    let cells = filtration
        .cells
        .iter()
        .map(|c| Cell {
            dim: c.dim,
            boundary: c.boundary.clone(),
            birth_f: c.birth,
            birth_g: c.birth + lag,
        })
        .collect();
    Ok(FilteredPair::with_terminal(
        filtration.field.clone(),
        cells,
        filtration.max_birth() + lag,
    ))
}
