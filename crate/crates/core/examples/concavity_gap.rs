//! Lower bounds on the concavity gap of the von Neumann entropy.

use cq_combine::bounds::{concavity_gap_forms, concavity_lower_fid, concavity_lower_sqrt};
use cq_combine::channels::{random_density_matrix, sample_rng};
use cq_combine::Result;

fn main() -> Result<()> {
    let mut rng = sample_rng(3, 0);
    let probs = [0.2, 0.3, 0.5];
    let states = (0..3).map(|_| random_density_matrix(&mut rng, 3, 2)).collect::<Result<Vec<_>>>()?;
    let (direct, divergence) = concavity_gap_forms(&probs, &states)?;
    println!("gap (direct)     = {direct:.10}");
    println!("gap (divergence) = {divergence:.10}");
    println!("sqrt bound       = {:.10}", concavity_lower_sqrt(&probs, &states)?);
    println!("fidelity bound   = {:.10}", concavity_lower_fid(&probs, &states)?);
    Ok(())
}
