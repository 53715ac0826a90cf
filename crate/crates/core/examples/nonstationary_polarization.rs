//! Polarization of a collection of different channels.

use std::f64::consts::LN_2;

use cq_combine::channels::{bec_embed, bsc_embed};
use cq_combine::polar::{nonstationary_levels, nonstationary_polarize, polarization_stats, DimensionBudget, ErasureKernel};
use cq_combine::Result;

fn main() -> Result<()> {
    let (a, b) = (0.05 * LN_2, 0.95 * LN_2);
    let t = 1 << 14;
    let eps: Vec<f64> = (0..t).map(|i| (i as f64 + 0.5) / t as f64).collect();
    let levels = nonstationary_levels(&ErasureKernel, &eps, 12)?;
    for (n, v) in levels.iter().enumerate().step_by(2) {
        let s = polarization_stats(v, a, b)?;
        println!("n={n:>2} theta={:.4} mu={:.6}", s.theta, s.mu);
    }

    // exact backend on a short list of embedded channels
    let list = vec![bsc_embed(0.05)?, bec_embed(0.7)?, bsc_embed(0.2)?, bec_embed(0.1)?];
    let caps = nonstationary_polarize(&list, 2, DimensionBudget::default())?;
    println!("exact, 4 channels, n=2: {caps:.5?}");
    Ok(())
}
