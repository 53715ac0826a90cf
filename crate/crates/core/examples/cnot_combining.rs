//! Minus and plus channels of a pair and the chain rule that ties them together.

use cq_combine::channels::{bsc_embed, random_cq_channel};
use cq_combine::combine::{boxast, combined_entropies, combined_entropies_general, varoast};
use cq_combine::{channel_entropy, PriorMode, Result};

fn main() -> Result<()> {
    let w1 = random_cq_channel(2, PriorMode::Half, 1)?;
    let w2 = random_cq_channel(3, PriorMode::Half, 2)?;
    let (h1, h2) = (channel_entropy(&w1)?, channel_entropy(&w2)?);
    let (minus, plus) = combined_entropies(&w1, &w2)?;
    println!("H1 = {h1:.6}, H2 = {h2:.6}");
    println!("H(minus) = {minus:.6} >= max = {:.6}", h1.max(h2));
    println!("H(plus)  = {plus:.6} <= min = {:.6}", h1.min(h2));
    println!("chain rule residual = {:.2e}", (minus + plus - h1 - h2).abs());
    println!("output dims: minus {}, plus {}", boxast(&w1, &w2)?.dim(), varoast(&w1, &w2)?.dim());

    let bsc = bsc_embed(0.11)?;
    let (m, p) = combined_entropies(&bsc, &bsc)?;
    println!("BSC(0.11) pair: minus {m:.6}, plus {p:.6}");

    // arbitrary priors go through the joint state
    let skewed = random_cq_channel(2, PriorMode::Uniform, 3)?;
    let (m, p) = combined_entropies_general(&skewed, &skewed)?;
    println!("prior {:.3}: minus {m:.6}, plus {p:.6}", skewed.prior());
    Ok(())
}
