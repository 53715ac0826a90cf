//! Channel polarization with the scalar, mixture and exact backends.

use std::f64::consts::LN_2;

use cq_combine::channels::{bsc_embed, random_cq_channel};
use cq_combine::polar::{
    polarization_stats, polarize_classical, polarize_classical_levels, polarize_exact, traces_from_levels,
    ClassicalKind, DimensionBudget,
};
use cq_combine::{PriorMode, Result};

fn main() -> Result<()> {
    let (a, b) = (0.05 * LN_2, 0.95 * LN_2);

    println!("BEC(1/2), scalar recursion");
    println!(" n   alpha    theta    beta     mu");
    for t in traces_from_levels(polarize_classical_levels(ClassicalKind::Bec, 0.5, 16)?, a, b)?.iter().step_by(4) {
        println!("{:>2}  {:.5}  {:.5}  {:.5}  {:.6}", t.level, t.alpha, t.theta, t.beta, t.mu);
    }

    let exact = polarize_exact(&bsc_embed(0.11)?, 3, DimensionBudget::default())?;
    let scalar = polarize_classical(ClassicalKind::Bsc, 0.11, 3)?;
    let diff = exact.iter().zip(&scalar).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    println!("\nBSC(0.11) n=3: exact vs mixture backend max diff {diff:.2e}");

    let w = random_cq_channel(2, PriorMode::Half, 4)?;
    let budget = DimensionBudget::default();
    let n = 2.min(budget.n_max_exact(&w));
    let caps = polarize_exact(&w, n, budget)?;
    println!("random qubit channel, n={n}: {caps:.4?}");
    println!("{:?}", polarization_stats(&caps, a, b)?);
    Ok(())
}
