//! Conditional entropies of binary-input cq channels, classical embeddings
//! included, and the JSON form used to exchange channels.

use cq_combine::channels::{bec_embed, bsc_embed, pure_channel, random_cq_channel};
use cq_combine::{channel_entropy, symmetric_capacity, CqChannel, PriorMode, Result};

fn main() -> Result<()> {
    for p in [0.0, 0.11, 0.5] {
        println!("BSC({p:<4}) H = {:.6}", channel_entropy(&bsc_embed(p)?)?);
    }
    for e in [0.0, 0.3, 1.0] {
        println!("BEC({e:<4}) H = {:.6}", channel_entropy(&bec_embed(e)?)?);
    }
    let pure = pure_channel(0.6)?;
    println!("pure(0.6) H = {:.6}, I = {:.6}", channel_entropy(&pure)?, symmetric_capacity(&pure)?);

    let w = random_cq_channel(3, PriorMode::Half, 7)?;
    println!("random d=3  H = {:.6}", channel_entropy(&w)?);

    let json = w.to_json()?;
    let back = CqChannel::from_json(&json)?;
    println!("JSON round trip exact: {}", back == w);
    Ok(())
}
