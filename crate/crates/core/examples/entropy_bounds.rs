//! Every bound on the minus entropy next to its exact value.

use std::f64::consts::LN_2;

use cq_combine::bounds::{bound_report, fidelity_window, kappa_estimate, qmgl_lower_iid, qmgl_lower_iid_convenient};
use cq_combine::channels::{bec_embed, bsc_embed, pure_channel, random_cq_channel};
use cq_combine::{PriorMode, Result};

fn main() -> Result<()> {
    let random = random_cq_channel(2, PriorMode::Half, 5)?;
    let cases = [
        ("random", random.clone(), random),
        ("bsc", bsc_embed(0.1)?, bsc_embed(0.1)?),
        ("bec", bec_embed(0.4)?, bec_embed(0.4)?),
        ("pure", pure_channel(0.3)?, pure_channel(0.3)?),
    ];
    for (name, w1, w2) in &cases {
        let r = bound_report(w1, w2)?;
        println!(
            "{name:>6}: H={:.4} exact={:.6} thm4={:.6} thm3={:.6} conj=[{:.6}, {:.6}] classical_lo={:.6}",
            r.h1,
            r.exact,
            r.thm4.unwrap_or(f64::NAN),
            r.thm3.unwrap_or(f64::NAN),
            r.conjectured_lower,
            r.conjectured_upper,
            r.classical_lower
        );
    }

    println!("\n     H   f_lo     f_hi     iid      closed form");
    for k in 0..=8 {
        let h = LN_2 * k as f64 / 8.0;
        let (lo, hi) = fidelity_window(h)?;
        println!("{h:.4} {lo:.6} {hi:.6} {:.6} {:.6}", qmgl_lower_iid(h)?, qmgl_lower_iid_convenient(h)?);
    }
    println!("\nkappa(0.1, 0.6) ~ {:.6e}", kappa_estimate(0.1, 0.6, 101)?);
    Ok(())
}
