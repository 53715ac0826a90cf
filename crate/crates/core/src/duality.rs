//! Dual channels.
//!
//! Each output is purified as `|phi_x> = (1 (x) sqrt(sigma_x)) |Omega>` on
//! `B' (x) B`. The isometry `|x> -> |phi_x> |x>` is applied to the conjugate
//! basis `(|0> + (-1)^x |1>) / sqrt 2` and `B'` is traced out, leaving
//!
//! `sigma_x^perp = 1/2 sum_{z,z'} (-1)^{x(z+z')} sqrt(sigma_z) sqrt(sigma_z') (x) |z><z'|`
//!
//! on `B (x) Z`. The formula acts blockwise on direct sums.

use std::f64::consts::LN_2;

use crate::channels::{channel_entropy, Block, CqChannel};
use crate::combine::{boxast, varoast};
use crate::error::{Error, Result};
use crate::linalg::{partial_trace, psd_sqrt, ComplexMatrix, C64};

/// Assembles `1/2 sum_{z,z'} s_{zz'} P_{zz'} (x) |z><z'|` where `P_{zz'}` is a `d x d` block.
fn assemble(pieces: &[[ComplexMatrix; 2]; 2], x: u8) -> ComplexMatrix {
    let d = pieces[0][0].dim();
    ComplexMatrix::from_fn(2 * d, |r, c| {
        let (i, z) = (r / 2, r % 2);
        let (j, zp) = (c / 2, c % 2);
        let sign = if x == 1 && (z + zp) % 2 == 1 { -0.5 } else { 0.5 };
        pieces[z][zp][(i, j)] * sign
    })
}

fn require_uniform(w: &CqChannel) -> Result<()> {
    if w.is_uniform() {
        Ok(())
    } else {
        Err(Error::NonUniformPrior(w.prior()))
    }
}

/// `W^perp` with the canonical purification; output dimension `2d`.
pub fn dual_channel(w: &CqChannel) -> Result<CqChannel> {
    require_uniform(w)?;
    let mut blocks = Vec::with_capacity(w.blocks().len());
    for b in w.blocks() {
        let roots = [psd_sqrt(b.given(0))?, psd_sqrt(b.given(1))?];
        let pieces = [
            [&roots[0] * &roots[0], &roots[0] * &roots[1]],
            [&roots[1] * &roots[0], &roots[1] * &roots[1]],
        ];
        blocks.push(Block::new(assemble(&pieces, 0), assemble(&pieces, 1))?);
    }
    Ok(CqChannel::from_blocks_unchecked(0.5, blocks))
}

/// `W^perp` built literally on `B' (x) B (x) Z` from the purifications
/// `(V (x) sqrt(sigma_x)) |Omega>`, tracing out `B'`. Any unitary `V` gives the
/// same dual; distinct unitaries per input do not.
pub fn dual_channel_with_purification(w: &CqChannel, v: &ComplexMatrix) -> Result<CqChannel> {
    require_uniform(w)?;
    let d = w.dim();
    if v.dim() != d {
        return Err(Error::DimensionMismatch(format!("purifying unitary of size {} for output dimension {d}", v.dim())));
    }
    let roots = [psd_sqrt(w.sigma0().matrix())?, psd_sqrt(w.sigma1().matrix())?];
    let amp = std::f64::consts::FRAC_1_SQRT_2;
    let mut outputs = Vec::with_capacity(2);
    for x in 0..2 {
        let mut psi = vec![C64::default(); d * d * 2];
        for (z, root) in roots.iter().enumerate() {
            let sign = if x == 1 && z == 1 { -amp } else { amp };
            for k in 0..d {
                for kp in 0..d {
                    let vk = v[(kp, k)];
                    if vk == C64::default() {
                        continue;
                    }
                    for i in 0..d {
                        psi[(kp * d + i) * 2 + z] += vk * root[(i, k)] * sign;
                    }
                }
            }
        }
        outputs.push(partial_trace(&ComplexMatrix::outer(&psi), &[d, d, 2], &[1, 2])?);
    }
    let given1 = outputs.pop().expect("two outputs");
    let given0 = outputs.pop().expect("two outputs");
    Ok(CqChannel::from_blocks_unchecked(0.5, vec![Block::new(given0, given1)?]))
}

/// Residuals of the duality identities for a channel pair.
#[derive(Clone, Copy, Debug, Default, PartialEq, serde::Serialize)]
pub struct DualityReport {
    /// `|H(W1^perp ⊠ W2^perp) - H((W1 ⊛ W2)^perp)|`
    pub minus_of_duals: f64,
    /// `|H(W1^perp ⊛ W2^perp) - H((W1 ⊠ W2)^perp)|`
    pub plus_of_duals: f64,
    /// `|H(W1 ⊛ W2) - (log 2 - H(W1^perp ⊠ W2^perp))|`
    pub plus_complement: f64,
    /// `max_i |H((W_i^perp)^perp) - H(W_i)|`
    pub double_dual: f64,
    /// `max_i |I(W_i) + I(W_i^perp) - log 2|`
    pub capacity_sum: f64,
}

impl DualityReport {
    pub fn max_residual(&self) -> f64 {
        [self.minus_of_duals, self.plus_of_duals, self.plus_complement, self.double_dual, self.capacity_sum]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

pub fn check_duality_lemma(w1: &CqChannel, w2: &CqChannel) -> Result<DualityReport> {
    let (d1, d2) = (dual_channel(w1)?, dual_channel(w2)?);
    let h = channel_entropy;
    let minus_duals = h(&boxast(&d1, &d2)?)?;
    let plus_duals = h(&varoast(&d1, &d2)?)?;
    let minus = boxast(w1, w2)?;
    let plus = varoast(w1, w2)?;

    let mut double_dual: f64 = 0.0;
    let mut capacity_sum: f64 = 0.0;
    for (w, d) in [(w1, &d1), (w2, &d2)] {
        let hw = h(w)?;
        let hd = h(d)?;
        double_dual = double_dual.max((h(&dual_channel(d)?)? - hw).abs());
        capacity_sum = capacity_sum.max(((LN_2 - hw) + (LN_2 - hd) - LN_2).abs());
    }
    Ok(DualityReport {
        minus_of_duals: (minus_duals - h(&dual_channel(&plus)?)?).abs(),
        plus_of_duals: (plus_duals - h(&dual_channel(&minus)?)?).abs(),
        plus_complement: (h(&plus)? - (LN_2 - minus_duals)).abs(),
        double_dual,
        capacity_sum,
    })
}

/// Residual of `H(W1 ⊠ W2) = H1 + H2 - log 2 + H(W1^perp ⊠ W2^perp)`.
pub fn mirror_identity_check(w1: &CqChannel, w2: &CqChannel) -> Result<f64> {
    let lhs = channel_entropy(&boxast(w1, w2)?)?;
    let duals = boxast(&dual_channel(w1)?, &dual_channel(w2)?)?;
    let rhs = channel_entropy(w1)? + channel_entropy(w2)? - LN_2 + channel_entropy(&duals)?;
    Ok((lhs - rhs).abs())
}

/// `H(W1 ⊛ W2) - (H1 + H2)/2`, for the pair and for its duals.
pub fn symmetry_functional(w1: &CqChannel, w2: &CqChannel) -> Result<(f64, f64)> {
    let f = |a: &CqChannel, b: &CqChannel| -> Result<f64> {
        Ok(channel_entropy(&varoast(a, b)?)? - 0.5 * (channel_entropy(a)? + channel_entropy(b)?))
    };
    Ok((f(w1, w2)?, f(&dual_channel(w1)?, &dual_channel(w2)?)?))
}

/// Random unitary from the QR decomposition of a Ginibre matrix (Gram-Schmidt on columns).
pub fn random_unitary<R: rand::Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    use rand_distr::StandardNormal;
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v: Vec<C64> =
            (0..dim).map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect();
        for u in &cols {
            let proj: C64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (vi, ui) in v.iter_mut().zip(u) {
                *vi -= proj * ui;
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-8 {
            cols.push(v.into_iter().map(|z| z / norm).collect());
        }
    }
    ComplexMatrix::from_fn(dim, |i, j| cols[j][i])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{bec_embed, bsc_embed, pure_channel, random_cq_channel, sample_rng, PriorMode};
    use crate::linalg::{fidelity, von_neumann_entropy, DensityMatrix};
    use approx::assert_relative_eq;

    #[test]
    fn matches_literal_construction() {
        let id = ComplexMatrix::identity(3);
        for seed in 0..5 {
            let w = random_cq_channel(3, PriorMode::Half, seed).unwrap();
            let dual = dual_channel(&w).unwrap();
            let lit = dual_channel_with_purification(&w, &id).unwrap();
            assert!(dual.sigma0().matrix().max_abs_diff(lit.sigma0().matrix()) < 1e-12);
            assert!(dual.sigma1().matrix().max_abs_diff(lit.sigma1().matrix()) < 1e-12);
            assert_eq!(dual.dim(), 6);
        }
    }

    #[test]
    fn dual_examples() {
        for eps in [0.0, 0.2, 0.75, 1.0] {
            let d = dual_channel(&bec_embed(eps).unwrap()).unwrap();
            assert_relative_eq!(channel_entropy(&d).unwrap(), (1.0 - eps) * LN_2, epsilon = 1e-12);
        }
        // dual BSC: a flag y selects a pure-state pair with overlap |1 - 2p|
        let p = 0.15;
        let d = dual_channel(&bsc_embed(p).unwrap().split_blocks()).unwrap();
        assert_eq!(d.blocks().len(), 2);
        for b in d.blocks() {
            let pure: Vec<DensityMatrix> = (0..2)
                .map(|x| {
                    let m = b.given(x);
                    DensityMatrix::new(m.scale(1.0 / m.trace().re)).unwrap()
                })
                .collect();
            for s in &pure {
                assert!(von_neumann_entropy(s).unwrap().abs() < 1e-10);
            }
            assert_relative_eq!(fidelity(&pure[0], &pure[1]).unwrap(), 1.0 - 2.0 * p, epsilon = 1e-7);
        }
        let d = dual_channel(&pure_channel(0.4).unwrap()).unwrap();
        let h = channel_entropy(&pure_channel(0.4).unwrap()).unwrap();
        assert_relative_eq!(channel_entropy(&d).unwrap(), LN_2 - h, epsilon = 1e-10);
        let skewed = bsc_embed(0.1).unwrap().with_prior(0.4).unwrap();
        assert!(matches!(dual_channel(&skewed), Err(Error::NonUniformPrior(_))));
    }

    #[test]
    fn capacities_sum_to_log_two() {
        for seed in 0..200 {
            let w = random_cq_channel(2 + (seed as usize % 3), PriorMode::Half, seed).unwrap();
            let h = channel_entropy(&w).unwrap();
            let hd = channel_entropy(&dual_channel(&w).unwrap()).unwrap();
            assert_relative_eq!(h + hd, LN_2, epsilon = 1e-9);
        }
    }

    #[test]
    fn lemma_residuals() {
        let r = check_duality_lemma(&bec_embed(0.3).unwrap(), &bec_embed(0.6).unwrap()).unwrap();
        assert!(r.max_residual() < 1e-8, "{r:?}");
        let r = check_duality_lemma(&bsc_embed(0.1).unwrap(), &bsc_embed(0.3).unwrap()).unwrap();
        assert!(r.max_residual() < 1e-8, "{r:?}");
        for seed in 0..10 {
            let a = random_cq_channel(2, PriorMode::Half, 100 + seed).unwrap();
            let b = random_cq_channel(2, PriorMode::Half, 200 + seed).unwrap();
            let r = check_duality_lemma(&a, &b).unwrap();
            assert!(r.max_residual() < 1e-7, "{r:?}");
        }
    }

    #[test]
    fn mirror_and_symmetry() {
        let r = mirror_identity_check(&bsc_embed(0.05).unwrap(), &bsc_embed(0.2).unwrap()).unwrap();
        assert!(r < 1e-8);
        let r = mirror_identity_check(&pure_channel(0.3).unwrap(), &pure_channel(1.1).unwrap()).unwrap();
        assert!(r < 1e-8);
        let a = random_cq_channel(2, PriorMode::Half, 1).unwrap();
        let b = random_cq_channel(3, PriorMode::Half, 2).unwrap();
        let (s, sd) = symmetry_functional(&a, &b).unwrap();
        assert_relative_eq!(s, sd, epsilon = 1e-8);
    }

    #[test]
    fn entropy_independent_of_purification() {
        let mut rng = sample_rng(3, 0);
        for seed in 0..10 {
            let w = random_cq_channel(3, PriorMode::Half, seed).unwrap();
            let base = channel_entropy(&dual_channel(&w).unwrap()).unwrap();
            let v = random_unitary(&mut rng, 3);
            let other = dual_channel_with_purification(&w, &v).unwrap();
            assert_relative_eq!(channel_entropy(&other).unwrap(), base, epsilon = 1e-9);
        }
    }

    #[test]
    fn double_dual_differs_but_keeps_entropy() {
        let w = random_cq_channel(2, PriorMode::Half, 8).unwrap();
        let dd = dual_channel(&dual_channel(&w).unwrap()).unwrap();
        assert_eq!(dd.dim(), 8);
        assert_relative_eq!(channel_entropy(&dd).unwrap(), channel_entropy(&w).unwrap(), epsilon = 1e-8);
    }
}
