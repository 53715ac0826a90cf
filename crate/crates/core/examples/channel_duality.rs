//! Dual channels: capacities add to log 2 and combining commutes with duality.

use std::f64::consts::LN_2;

use cq_combine::channels::{bec_embed, bsc_embed, random_cq_channel};
use cq_combine::duality::{check_duality_lemma, dual_channel, mirror_identity_check};
use cq_combine::{channel_entropy, PriorMode, Result};

fn main() -> Result<()> {
    let w = random_cq_channel(2, PriorMode::Half, 11)?;
    let d = dual_channel(&w)?;
    println!("H(W) = {:.6}, H(W^perp) = {:.6}, sum = {:.6} (log 2 = {LN_2:.6})", channel_entropy(&w)?, channel_entropy(&d)?, channel_entropy(&w)? + channel_entropy(&d)?);

    let eps = 0.3;
    let bec_dual = dual_channel(&bec_embed(eps)?)?;
    println!("I(BEC({eps})^perp) = {:.6} = eps log 2 = {:.6}", LN_2 - channel_entropy(&bec_dual)?, eps * LN_2);

    let bsc_dual = dual_channel(&bsc_embed(0.11)?)?;
    println!("BSC(0.11) dual: {} blocks, dim {}", bsc_dual.blocks().len(), bsc_dual.dim());

    let w2 = random_cq_channel(3, PriorMode::Half, 12)?;
    let report = check_duality_lemma(&w, &w2)?;
    println!("{report:#?}");
    println!("mirror identity residual {:.2e}", mirror_identity_check(&w, &w2)?);
    Ok(())
}
