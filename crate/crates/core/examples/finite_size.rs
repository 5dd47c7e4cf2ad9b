//! Open-chain spectra of the Lee model for growing chain length.
//!
//!   cargo run --release -p nhwind --example finite_size -- 30 100 800

use std::time::Instant;

use nhwind::lattice::SolveOptions;
use nhwind::{BlochModel, BoundaryCondition, ChainSpectrum};

fn main() {
    let mut n_list: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    if n_list.is_empty() {
        n_list = vec![30, 100, 200, 400, 800];
    }
    let model = BlochModel::lee(0.52, 0.5, 1.0);
    println!("N\tmax|Im|\tfrac(|Im|>1e-2)\tgap\tedges\tmedian_ipr\tresidual\tbalance_cond\tseconds");
    for n in n_list {
        let start = Instant::now();
        let s = ChainSpectrum::solve(&model, n, BoundaryCondition::Open, SolveOptions::default())
            .expect("solve");
        println!(
            "{n}\t{:.3e}\t{:.3}\t{:.6}\t{}\t{:.4}\t{:.2e}\t{:.1e}\t{:.2}",
            s.max_abs_imag,
            s.complex_fraction(1e-2),
            s.gap.value,
            s.gap.edge_modes.len(),
            s.median_ipr(),
            s.max_residual,
            s.balancing.condition(),
            start.elapsed().as_secs_f64()
        );
    }
}
