use proptest::prelude::*;

use relhom::oracle::{Oracle, SubspaceBasis};
use relhom::prh::PrhRun;
use relhom::random::{random_pair, random_points};
use relhom::{apply_lag, betti_curve, build_rips, compute_prh, compute_prh_lag, Chain, FilteredPair, PrimeField};

fn field_strategy() -> impl Strategy<Value = PrimeField> {
    prop::sample::select(vec![2u32, 3, 5, 7]).prop_map(|p| PrimeField::new(p).unwrap())
}

fn pair_strategy() -> impl Strategy<Value = FilteredPair> {
    (any::<u64>(), field_strategy()).prop_map(|(seed, f)| random_pair(seed, &f, 40))
}

/// Dense span of the given chains restricted to dimension `p`.
fn span_of(oracle: &Oracle, chains: &[Chain], p: usize, ambient: usize) -> SubspaceBasis {
    let vectors = chains
        .iter()
        .filter_map(|c| oracle.chain_vector(c))
        .filter(|(d, _)| *d == p)
        .map(|(_, v)| v)
        .collect();
    SubspaceBasis::span(oracle.field(), ambient, vectors)
}

fn same_space(field: &PrimeField, a: &SubspaceBasis, b: &SubspaceBasis) -> bool {
    a.dim() == b.dim() && a.sum_dim(field, b) == a.dim()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn factor_columns_span_relative_spaces(pair in pair_strategy()) {
        let run = PrhRun::new(&pair).unwrap();
        let oracle = Oracle::new(&pair).unwrap();
        let field = oracle.field().clone();
        let rows = &run.first.boundary.rows;
        let cols = &run.first.boundary.cols;
        let to_chain = |col: &[(usize, u32)], order: &relhom::Permutation| {
            Chain::new(col.iter().map(|&(r, v)| (order.forward(r), v)).collect())
        };
        let s_chains: Vec<(f64, Chain)> = (0..pair.len())
            .map(|j| (run.fker[j], to_chain(run.first.factors.s.col(j), cols)))
            .collect();
        let t_chains: Vec<(f64, Chain)> = (0..pair.len())
            .map(|i| (run.fim[i], to_chain(run.first.factors.t.col(i), rows)))
            .collect();
        for t in oracle.critical_values() {
            for p in 0..=oracle.top_dim() {
                let z = oracle.relative_cycles(t, p);
                let s: Vec<Chain> = s_chains.iter().filter(|c| c.0 <= t).map(|c| c.1.clone()).collect();
                prop_assert!(same_space(&field, &span_of(&oracle, &s, p, z.ambient), &z), "Z at t = {}, p = {}", t, p);
                let b = oracle.relative_boundaries(t, p);
                let tc: Vec<Chain> = t_chains.iter().filter(|c| c.0 <= t).map(|c| c.1.clone()).collect();
                prop_assert!(same_space(&field, &span_of(&oracle, &tc, p, b.ambient), &b), "B at t = {}, p = {}", t, p);
            }
        }
    }

    #[test]
    fn barcode_matches_oracle(pair in pair_strategy()) {
        let bc = compute_prh(&pair).unwrap();
        let oracle = Oracle::new(&pair).unwrap();
        let mut want = oracle.reference_barcode();
        want.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)).then(a.2.total_cmp(&b.2)));
        prop_assert_eq!(bc.intervals(), want);
        for t in oracle.critical_values() {
            for p in 0..=oracle.top_dim() {
                prop_assert_eq!(betti_curve(&bc, t, p), oracle.relative_homology_dim(t, p));
            }
        }
        for bar in &bc.bars {
            prop_assert!(oracle.check_representative(bar).is_ok(), "{:?}", oracle.check_representative(bar));
        }
    }

    #[test]
    fn oracle_boundaries_are_cycles(pair in pair_strategy()) {
        let oracle = Oracle::new(&pair).unwrap();
        let field = oracle.field().clone();
        let grid = oracle.critical_values();
        for p in 0..=oracle.top_dim() {
            for &t in &grid {
                let z = oracle.relative_cycles(t, p);
                let b = oracle.relative_boundaries(t, p);
                prop_assert_eq!(z.sum_dim(&field, &b), z.dim());
            }
            for w in grid.windows(3) {
                let (r, s, t) = (w[0], w[1], w[2]);
                let beta = |a: f64, b: f64| oracle.persistent_betti(a, b, p).unwrap();
                // non-increasing in the second argument, non-decreasing in the first
                prop_assert!(beta(r, t) <= beta(r, s));
                prop_assert!(beta(r, t) <= beta(s, t));
            }
        }
    }

    #[test]
    fn lag_pipeline_matches_general(
        seed in any::<u64>(),
        n in 3usize..9,
        lag in prop::sample::select(vec![0.0, 0.03, 0.1, 0.25, 0.5, 2.0]),
        field in field_strategy(),
    ) {
        let rips = build_rips(&random_points(seed, n, 2), 2, f64::INFINITY, field).unwrap();
        let pair = apply_lag(&rips, lag).unwrap();
        let general = compute_prh(&pair).unwrap();
        let fast = compute_prh_lag(&rips, lag).unwrap();
        prop_assert!(general.same_intervals(&fast));
        let oracle = Oracle::new(&pair).unwrap();
        for bar in &fast.bars {
            prop_assert!(bar.death - bar.birth <= lag + 1e-12);
            prop_assert!(oracle.check_representative(bar).is_ok(), "{:?}", oracle.check_representative(bar));
        }
    }
}
