//! Seeded generators for small test inputs.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::complex::{Cell, FilteredPair};
use crate::field::PrimeField;
use crate::sparse::Entry;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random simplicial pair with at most `max_cells` cells.
///
/// Births are quarter integers in `[0, 3]`, so ties are common. `b_F` and
/// `b_G` are both face-monotone and `b_F ≤ b_G`. Some cells are drawn with
/// `b_G = +∞` and then enter the subcomplex only at the terminal value.
pub fn random_pair(seed: u64, field: &PrimeField, max_cells: usize) -> FilteredPair {
    let mut rng = rng(seed);
    let n_vertices = rng.gen_range(2..=6usize).min(max_cells.max(1));
    let mut simplices: Vec<Vec<usize>> = (0..n_vertices).map(|v| vec![v]).collect();
    let mut edges = Vec::new();
    for a in 0..n_vertices {
        for b in a + 1..n_vertices {
            if rng.gen_bool(0.6) {
                edges.push(vec![a, b]);
            }
        }
    }
    edges.shuffle(&mut rng);
    edges.truncate(max_cells.saturating_sub(simplices.len()));
    edges.sort();
    let mut triangles = Vec::new();
    for a in 0..n_vertices {
        for b in a + 1..n_vertices {
            for c in b + 1..n_vertices {
                let present = |s: &[usize]| edges.binary_search(&s.to_vec()).is_ok();
                if present(&[a, b]) && present(&[a, c]) && present(&[b, c]) && rng.gen_bool(0.5) {
                    triangles.push(vec![a, b, c]);
                }
            }
        }
    }
    triangles.truncate(max_cells.saturating_sub(simplices.len() + edges.len()));
    simplices.extend(edges);
    simplices.extend(triangles);

    let quarter = |rng: &mut ChaCha8Rng, hi: u32| rng.gen_range(0..=hi) as f64 * 0.25;
    let minus_one = field.neg(1);
    let mut cells: Vec<Cell> = Vec::with_capacity(simplices.len());
    for s in &simplices {
        let boundary: Vec<Entry> = if s.len() == 1 {
            Vec::new()
        } else {
            (0..s.len())
                .map(|omit| {
                    let face: Vec<usize> = s.iter().enumerate().filter(|&(q, _)| q != omit).map(|(_, &v)| v).collect();
                    let id = simplices.iter().position(|t| *t == face).expect("faces precede cofaces");
                    (id, if omit % 2 == 0 { 1 } else { minus_one })
                })
                .collect()
        };
        let face_f = boundary.iter().map(|&(f, _)| cells[f].birth_f).fold(0.0, f64::max);
        let face_g = boundary.iter().map(|&(f, _)| cells[f].birth_g).fold(0.0, f64::max);
        let birth_f = face_f + quarter(&mut rng, 2);
        let birth_g = if rng.gen_bool(0.15) {
            f64::INFINITY
        } else {
            birth_f.max(face_g) + quarter(&mut rng, 3)
        };
        let mut boundary = boundary;
        boundary.sort_unstable_by_key(|e| e.0);
        cells.push(Cell {
            dim: s.len() - 1,
            boundary,
            birth_f,
            birth_g,
        });
    }
    let mut pair = FilteredPair::new(field.clone(), cells);
    pair.extend_to_terminal();
    pair
}

/// `n` distinct points drawn uniformly from `[0, 1)^dim`.
pub fn random_points(seed: u64, n: usize, dim: usize) -> Vec<Vec<f64>> {
    let mut rng = rng(seed);
    (0..n).map(|_| (0..dim).map(|_| rng.gen::<f64>()).collect()).collect()
}
