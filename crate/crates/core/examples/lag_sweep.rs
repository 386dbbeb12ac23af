//! Barcodes of one random point cloud at three lags, written as SVG plots.
//!
//! cargo run --release --example lag_sweep -- [OUT_DIR]

use std::path::PathBuf;

use relhom::random::random_points;
use relhom::svg::emit_svg;
use relhom::{build_rips, compute_prh_lag, PrimeField};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| ".".into()));
    std::fs::create_dir_all(&out)?;
    let rips = build_rips(&random_points(2024, 30, 2), 2, 0.4, PrimeField::gf2())?;
    for lag in [0.05, 0.1, 0.2] {
        let bc = compute_prh_lag(&rips, lag)?;
        let path = out.join(format!("lag-{lag}.svg"));
        emit_svg(&bc, &path)?;
        let dims: Vec<usize> = (0..=2).map(|p| bc.bars.iter().filter(|b| b.dim == p).count()).collect();
        println!("lag {lag}: {} bars {dims:?} -> {}", bc.len(), path.display());
    }
    Ok(())
}
