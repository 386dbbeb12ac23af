//! The 3×3 grid with spacing 1/2, Rips to dimension 2 at radius 3/4, lag 1/4.
//! Expected values here were computed with the dense oracle.

use relhom::oracle::Oracle;
use relhom::svg::render_svg;
use relhom::{apply_lag, betti_curve, build_rips, compute_prh, compute_prh_lag, Filtration, PrimeField};

fn grid(field: PrimeField) -> Filtration {
    let pts: Vec<Vec<f64>> = (0..3)
        .flat_map(|i| (0..3).map(move |j| vec![i as f64 * 0.5, j as f64 * 0.5]))
        .collect();
    build_rips(&pts, 2, 0.75, field).unwrap()
}

fn count(iv: &[(usize, f64, f64)], dim: usize, birth: f64, death: f64) -> usize {
    iv.iter().filter(|b| **b == (dim, birth, death)).count()
}

#[test]
fn grid_barcode_matches_oracle() {
    let diag = 2f64.sqrt() / 2.0;
    let rips = grid(PrimeField::gf2());
    let pair = apply_lag(&rips, 0.25).unwrap();
    let bc = compute_prh(&pair).unwrap();
    let oracle = Oracle::new(&pair).unwrap();

    let mut want = oracle.reference_barcode();
    want.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)).then(a.2.total_cmp(&b.2)));
    assert_eq!(bc.intervals(), want);

    let iv = bc.intervals();
    assert_eq!(iv.iter().filter(|b| b.0 == 1).count(), 12);
    assert_eq!(count(&iv, 1, 0.5, diag), 4);
    assert_eq!(count(&iv, 1, 0.5, 0.75), 8);
    assert_eq!(iv.iter().filter(|b| b.0 == 2).count(), 8);
    assert_eq!(count(&iv, 2, diag, diag + 0.25), 4);
    assert_eq!(count(&iv, 2, 0.75, diag + 0.25), 4);
    assert_eq!(iv.iter().filter(|b| b.0 == 0).count(), 9);
    assert!(iv.iter().all(|b| b.2 - b.1 <= 0.25));

    for bar in &bc.bars {
        assert!(oracle.verify_representative(bar), "{bar:?}");
    }
}

#[test]
fn grid_betti_numbers() {
    let rips = grid(PrimeField::gf2());
    let pair = apply_lag(&rips, 0.25).unwrap();
    let bc = compute_prh(&pair).unwrap();
    let oracle = Oracle::new(&pair).unwrap();
    assert_eq!(betti_curve(&bc, 0.7, 1), 12);
    assert_eq!(oracle.relative_homology_dim(0.7, 1), 12);
    assert_eq!(oracle.persistent_betti(0.6, 0.72, 1).unwrap(), 8);
    assert_eq!(oracle.relative_homology_dim(0.72, 2), 4);
    assert_eq!(oracle.relative_homology_dim(0.8, 2), 8);
    for t in oracle.critical_values() {
        for p in 0..=2 {
            assert_eq!(betti_curve(&bc, t, p), oracle.relative_homology_dim(t, p), "t = {t}, p = {p}");
        }
    }
}

#[test]
fn grid_absolute_limit() {
    let rips = grid(PrimeField::gf2());
    let lag = 5.0;
    let bc = compute_prh(&apply_lag(&rips, lag).unwrap()).unwrap();
    let early: Vec<_> = bc.intervals().into_iter().filter(|b| b.0 == 1 && b.1 < lag).collect();
    assert_eq!(early, vec![(1, 0.5, 2f64.sqrt() / 2.0); 4]);
}

#[test]
fn grid_pipelines_agree_over_several_fields() {
    for p in [2, 3, 7] {
        let rips = grid(PrimeField::new(p).unwrap());
        let pair = apply_lag(&rips, 0.25).unwrap();
        let general = compute_prh(&pair).unwrap();
        let lag = compute_prh_lag(&rips, 0.25).unwrap();
        assert!(general.same_intervals(&lag));
        let oracle = Oracle::new(&pair).unwrap();
        for bar in &lag.bars {
            assert!(oracle.verify_representative(bar), "GF({p}) {bar:?}");
        }
    }
}

#[test]
fn grid_plot_has_three_groups() {
    let rips = grid(PrimeField::gf2());
    let bc = compute_prh_lag(&rips, 0.25).unwrap();
    let svg = render_svg(&bc);
    assert_eq!(svg.matches("<g class=\"dim-").count(), 3);
    assert_eq!(svg.matches("<line x1=").count(), bc.len());
}
