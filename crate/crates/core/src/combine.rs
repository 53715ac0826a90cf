//! CNOT channel combining.
//!
//! With inputs `U1, U2` sent as `X1 = U1 + U2`, `X2 = U2`, the minus channel
//! `W1 ⊠ W2` sees `U1` with `U2` uniform and unknown, the plus channel
//! `W1 ⊛ W2` sees `U2` with `U1` handed over in a classical register.
//! Both act blockwise on the direct-sum representation of the inputs.

use crate::channels::{channel_entropy, Block, CqChannel, JointCqState};
use crate::error::{Error, Result};
use crate::linalg::{tensor, ComplexMatrix};

/// Tolerance of the chain-rule post-check in [`combined_entropies`].
pub const CHAIN_RULE_TOL: f64 = 1e-8;

fn require_uniform(w: &CqChannel) -> Result<()> {
    if w.is_uniform() {
        Ok(())
    } else {
        Err(Error::NonUniformPrior(w.prior()))
    }
}

fn half_sum(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    (a + b).scale(0.5)
}

/// `u1 -> 1/2 sum_{u2} sigma_{u1 + u2} (x) sigma'_{u2}`, output dimension `d1 d2`.
pub fn boxast(w1: &CqChannel, w2: &CqChannel) -> Result<CqChannel> {
    require_uniform(w1)?;
    require_uniform(w2)?;
    let mut blocks = Vec::with_capacity(w1.blocks().len() * w2.blocks().len());
    for a in w1.blocks() {
        for b in w2.blocks() {
            let c0 = half_sum(&tensor(a.given(0), b.given(0)), &tensor(a.given(1), b.given(1)));
            let c1 = half_sum(&tensor(a.given(1), b.given(0)), &tensor(a.given(0), b.given(1)));
            blocks.push(Block::new(c0, c1)?);
        }
    }
    Ok(CqChannel::from_blocks_unchecked(0.5, blocks))
}

/// `u2 -> 1/2 sum_{u1} |u1><u1| (x) sigma_{u1 + u2} (x) sigma'_{u2}`, output dimension `2 d1 d2`.
pub fn varoast(w1: &CqChannel, w2: &CqChannel) -> Result<CqChannel> {
    require_uniform(w1)?;
    require_uniform(w2)?;
    let mut blocks = Vec::with_capacity(2 * w1.blocks().len() * w2.blocks().len());
    for u1 in 0..2u8 {
        for a in w1.blocks() {
            for b in w2.blocks() {
                let c0 = tensor(a.given(u1), b.given(0)).scale(0.5);
                let c1 = tensor(a.given(u1 ^ 1), b.given(1)).scale(0.5);
                blocks.push(Block::new(c0, c1)?);
            }
        }
    }
    Ok(CqChannel::from_blocks_unchecked(0.5, blocks))
}

/// `(H(W1 ⊠ W2), H(W1 ⊛ W2))`, checked against `H(W1) + H(W2)`.
pub fn combined_entropies(w1: &CqChannel, w2: &CqChannel) -> Result<(f64, f64)> {
    let minus = channel_entropy(&boxast(w1, w2)?)?;
    let plus = channel_entropy(&varoast(w1, w2)?)?;
    let residual = (minus + plus - channel_entropy(w1)? - channel_entropy(w2)?).abs();
    if residual > CHAIN_RULE_TOL {
        return Err(Error::ChainRuleViolation(residual));
    }
    Ok((minus, plus))
}

/// Which conditional entropy of the CNOT-combined pair to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CnotRule {
    /// `H(X1 + X2 | B1 B2)`.
    Minus,
    /// `H(X2 | X1 + X2, B1 B2)`.
    Plus,
}

/// Conditional entropy of the combined pair for a product joint state with
/// classical label `2 x1 + x2`; priors are arbitrary.
pub fn conditional_entropy_general(joint: &JointCqState, rule: CnotRule) -> Result<f64> {
    if joint.classical_dim() != 4 {
        return Err(Error::InvalidState(format!(
            "expected a two-bit classical register, got alphabet size {}",
            joint.classical_dim()
        )));
    }
    let sum = joint.conditional_entropy_grouped(|x| (x >> 1) ^ (x & 1))?;
    let h = match rule {
        CnotRule::Minus => sum,
        CnotRule::Plus => joint.conditional_entropy()? - sum,
    };
    Ok(h.clamp(0.0, std::f64::consts::LN_2))
}

/// `(H(X1 + X2 | B1 B2), H(X2 | X1 + X2, B1 B2))` for two channels with any priors.
pub fn combined_entropies_general(w1: &CqChannel, w2: &CqChannel) -> Result<(f64, f64)> {
    let joint = JointCqState::product(w1, w2);
    Ok((
        conditional_entropy_general(&joint, CnotRule::Minus)?,
        conditional_entropy_general(&joint, CnotRule::Plus)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{bec_embed, bsc_embed, pure_channel, random_cq_channel, PriorMode};
    use approx::assert_relative_eq;
    use std::f64::consts::LN_2;

    fn h2(p: f64) -> f64 {
        if p <= 0.0 || p >= 1.0 {
            0.0
        } else {
            -p * p.ln() - (1.0 - p) * (1.0 - p).ln()
        }
    }

    fn conv(p: f64, q: f64) -> f64 {
        p * (1.0 - q) + q * (1.0 - p)
    }

    #[test]
    fn minus_examples() {
        let perfect = bsc_embed(0.0).unwrap();
        assert!(channel_entropy(&boxast(&perfect, &perfect).unwrap()).unwrap().abs() < 1e-15);

        for (p, q) in [(0.1, 0.2), (0.3, 0.05), (0.5, 0.11)] {
            let w = boxast(&bsc_embed(p).unwrap(), &bsc_embed(q).unwrap()).unwrap();
            assert_eq!(w.dim(), 4);
            assert_relative_eq!(channel_entropy(&w).unwrap(), h2(conv(p, q)), epsilon = 1e-12);
        }

        let w = boxast(&bec_embed(0.3).unwrap(), &bec_embed(0.6).unwrap()).unwrap();
        assert_eq!(w.dim(), 9);
        assert_relative_eq!(channel_entropy(&w).unwrap(), (0.3 + 0.6 - 0.18) * LN_2, epsilon = 1e-12);
    }

    #[test]
    fn plus_examples() {
        let useless = bsc_embed(0.5).unwrap();
        let w = varoast(&useless, &useless).unwrap();
        assert_eq!(w.dim(), 8);
        assert_relative_eq!(channel_entropy(&w).unwrap(), LN_2, epsilon = 1e-14);

        let (p, q) = (0.2, 0.07);
        let w = varoast(&bsc_embed(p).unwrap(), &bsc_embed(q).unwrap()).unwrap();
        assert_relative_eq!(channel_entropy(&w).unwrap(), h2(p) + h2(q) - h2(conv(p, q)), epsilon = 1e-12);

        let a = pure_channel(0.7).unwrap();
        let sum = channel_entropy(&varoast(&a, &a).unwrap()).unwrap()
            + channel_entropy(&boxast(&a, &a).unwrap()).unwrap();
        assert_relative_eq!(sum, 2.0 * channel_entropy(&a).unwrap(), epsilon = 1e-10);

        let w = varoast(&bec_embed(0.4).unwrap(), &bec_embed(0.4).unwrap()).unwrap();
        assert_relative_eq!(channel_entropy(&w).unwrap(), 0.16 * LN_2, epsilon = 1e-12);
    }

    #[test]
    fn combined_entropy_examples() {
        let w = bsc_embed(0.2).unwrap();
        let (m, p) = combined_entropies(&w, &w).unwrap();
        assert_relative_eq!(m, h2(conv(0.2, 0.2)), epsilon = 1e-12);
        assert_relative_eq!(p, 2.0 * h2(0.2) - h2(conv(0.2, 0.2)), epsilon = 1e-12);

        let perfect = bsc_embed(0.0).unwrap();
        let r = random_cq_channel(3, PriorMode::Half, 9).unwrap();
        let (m, p) = combined_entropies(&perfect, &r).unwrap();
        assert_relative_eq!(m, channel_entropy(&r).unwrap(), epsilon = 1e-10);
        assert!(p.abs() < 1e-10);

        for seed in 0..20 {
            let a = random_cq_channel(2, PriorMode::Half, 2 * seed).unwrap();
            let b = random_cq_channel(2, PriorMode::Half, 2 * seed + 1).unwrap();
            let (h1, h2) = (channel_entropy(&a).unwrap(), channel_entropy(&b).unwrap());
            let (m, p) = combined_entropies(&a, &b).unwrap();
            assert!(m >= h1.max(h2) - 1e-10);
            assert!(p <= h1.min(h2) + 1e-10);
        }
    }

    #[test]
    fn rejects_non_uniform_prior() {
        let w = bsc_embed(0.1).unwrap().with_prior(0.3).unwrap();
        let u = bsc_embed(0.1).unwrap();
        assert!(matches!(boxast(&w, &u), Err(Error::NonUniformPrior(_))));
        assert!(matches!(varoast(&u, &w), Err(Error::NonUniformPrior(_))));
        assert!(matches!(combined_entropies(&w, &u), Err(Error::NonUniformPrior(_))));
    }

    #[test]
    fn general_rule_examples() {
        // deterministic X1: the sum is X2 relabelled
        let w1 = bsc_embed(0.0).unwrap().with_prior(1.0).unwrap();
        let w2 = random_cq_channel(2, PriorMode::Uniform, 3).unwrap();
        let (m, _) = combined_entropies_general(&w1, &w2).unwrap();
        assert_relative_eq!(m, channel_entropy(&w2).unwrap(), epsilon = 1e-10);

        let a = random_cq_channel(2, PriorMode::Half, 4).unwrap();
        let b = random_cq_channel(3, PriorMode::Half, 5).unwrap();
        let (m, p) = combined_entropies(&a, &b).unwrap();
        let (mg, pg) = combined_entropies_general(&a, &b).unwrap();
        assert_relative_eq!(m, mg, epsilon = 1e-9);
        assert_relative_eq!(p, pg, epsilon = 1e-9);

        // classical brute force over the joint distribution
        let (p1, p2, e1, e2) = (0.3, 0.8, 0.1, 0.25);
        let w1 = bsc_embed(e1).unwrap().with_prior(p1).unwrap();
        let w2 = bsc_embed(e2).unwrap().with_prior(p2).unwrap();
        let mut joint = [[0.0; 4]; 2];
        for x1 in 0..2 {
            for x2 in 0..2 {
                for y1 in 0..2 {
                    for y2 in 0..2 {
                        let px = [p1, 1.0 - p1][x1] * [p2, 1.0 - p2][x2];
                        let py1 = if x1 == y1 { 1.0 - e1 } else { e1 };
                        let py2 = if x2 == y2 { 1.0 - e2 } else { e2 };
                        joint[x1 ^ x2][2 * y1 + y2] += px * py1 * py2;
                    }
                }
            }
        }
        let mut expected = 0.0;
        for (&a, &b) in joint[0].iter().zip(&joint[1]) {
            let py = a + b;
            for q in [a, b] {
                if q > 0.0 {
                    expected -= q * (q / py).ln();
                }
            }
        }
        let got = conditional_entropy_general(&JointCqState::product(&w1, &w2), CnotRule::Minus).unwrap();
        assert_relative_eq!(got, expected, epsilon = 1e-12);

        let single = JointCqState::from_channel(&w1);
        assert!(matches!(conditional_entropy_general(&single, CnotRule::Minus), Err(Error::InvalidState(_))));
    }
}
