//! Decay of E[T] per level with exponential and sqrt-exponential fits.

use cq_combine::channels::bsc_embed;
use cq_combine::polar::{polarize_classical_levels, polarize_levels, speed_trace, ClassicalKind, ExactKernel};
use cq_combine::Result;

fn main() -> Result<()> {
    let bec = speed_trace(&polarize_classical_levels(ClassicalKind::Bec, 0.5, 16)?);
    println!("BEC(1/2): E[T] {:.3e} -> {:.3e}", bec.expected_t[0], bec.expected_t[16]);
    println!("  exp fit  {:?}", bec.exponential);
    println!("  sqrt fit {:?}", bec.sqrt_exponential);

    let w = bsc_embed(0.11)?.split_blocks();
    let exact = speed_trace(&polarize_levels(&ExactKernel::default(), &w, 3)?);
    println!("BSC(0.11) exact: E[T] = {:.5?}", exact.expected_t);
    Ok(())
}
