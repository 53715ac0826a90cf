//! Polar-transform recursion.
//!
//! A [`PolarKernel`] knows how to combine two channels into their minus and
//! plus versions and how to read off a symmetric capacity. Three kernels are
//! provided: exact cq-channels ([`ExactKernel`]), erasure probabilities
//! ([`ErasureKernel`]) and mixtures of binary symmetric channels
//! ([`BscMixtureKernel`]). The recursion itself is generic and processes one
//! level at a time, in parallel within a level.

use std::f64::consts::LN_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::{channel_entropy, sample_rng, CqChannel};
use crate::combine::{boxast, varoast};
use crate::error::{Error, Result};
use crate::linalg::TOL_SUPPORT;

/// Largest depth accepted by the scalar backends.
pub const MAX_CLASSICAL_LEVELS: usize = 24;
/// Component cap of the BSC backend used by [`polarize_classical`].
pub const BSC_COMPONENTS: usize = 128;

pub trait PolarKernel: Sync {
    type Channel: Clone + Send + Sync;

    fn minus(&self, a: &Self::Channel, b: &Self::Channel) -> Result<Self::Channel>;
    fn plus(&self, a: &Self::Channel, b: &Self::Channel) -> Result<Self::Channel>;
    /// Symmetric capacity in nats.
    fn capacity(&self, w: &Self::Channel) -> Result<f64>;

    fn combine(&self, a: &Self::Channel, b: &Self::Channel) -> Result<(Self::Channel, Self::Channel)> {
        Ok((self.minus(a, b)?, self.plus(a, b)?))
    }
}

/// Limits for exact combining: largest direct-sum block and number of blocks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionBudget {
    pub max_block_dim: usize,
    pub max_blocks: usize,
}

impl Default for DimensionBudget {
    fn default() -> Self {
        Self { max_block_dim: 4096, max_blocks: 1 << 16 }
    }
}

impl DimensionBudget {
    /// Deepest full recursion on `w` the budget admits, assuming no block ever splits.
    pub fn n_max_exact(&self, w: &CqChannel) -> usize {
        let (mut dim, mut blocks) = (w.max_block_dim() as u128, w.blocks().len() as u128);
        let mut n = 0;
        loop {
            dim = dim * dim;
            blocks = 2 * blocks * blocks;
            if dim > self.max_block_dim as u128 || blocks > self.max_blocks as u128 {
                return n;
            }
            n += 1;
        }
    }

    fn check(&self, a: &CqChannel, b: &CqChannel) -> Result<()> {
        let dim = a.max_block_dim() * b.max_block_dim();
        let blocks = 2 * a.blocks().len() * b.blocks().len();
        if dim > self.max_block_dim {
            return Err(Error::DimensionBudgetExceeded(format!(
                "block dimension {dim} exceeds {}",
                self.max_block_dim
            )));
        }
        if blocks > self.max_blocks {
            return Err(Error::DimensionBudgetExceeded(format!("{blocks} blocks exceed {}", self.max_blocks)));
        }
        Ok(())
    }
}

/// Exact cq-channel combining; results are split into blocks and compressed to their support.
#[derive(Clone, Copy, Debug, Default)]
pub struct ExactKernel {
    pub budget: DimensionBudget,
}

impl ExactKernel {
    fn tidy(&self, w: CqChannel) -> Result<CqChannel> {
        w.split_blocks().compress_support(TOL_SUPPORT)
    }
}

impl PolarKernel for ExactKernel {
    type Channel = CqChannel;

    fn minus(&self, a: &CqChannel, b: &CqChannel) -> Result<CqChannel> {
        self.budget.check(a, b)?;
        self.tidy(boxast(a, b)?)
    }

    fn plus(&self, a: &CqChannel, b: &CqChannel) -> Result<CqChannel> {
        self.budget.check(a, b)?;
        self.tidy(varoast(a, b)?)
    }

    fn capacity(&self, w: &CqChannel) -> Result<f64> {
        Ok(LN_2 - channel_entropy(w)?)
    }
}

/// Binary erasure channels tracked by their erasure probability.
#[derive(Clone, Copy, Debug, Default)]
pub struct ErasureKernel;

impl PolarKernel for ErasureKernel {
    type Channel = f64;

    fn minus(&self, a: &f64, b: &f64) -> Result<f64> {
        Ok(a + b - a * b)
    }

    fn plus(&self, a: &f64, b: &f64) -> Result<f64> {
        Ok(a * b)
    }

    fn capacity(&self, w: &f64) -> Result<f64> {
        Ok((1.0 - w) * LN_2)
    }
}

/// A binary memoryless symmetric channel as a mixture of BSCs: `(weight, crossover <= 1/2)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BscMixture {
    components: Vec<(f64, f64)>,
}

impl BscMixture {
    pub fn bsc(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::OutOfRange(format!("crossover {p} not in [0, 1]")));
        }
        Ok(Self { components: vec![(1.0, p.min(1.0 - p))] })
    }

    pub fn components(&self) -> &[(f64, f64)] {
        &self.components
    }

    /// Conditional entropy `H(X|Y)` in nats under a uniform input.
    pub fn entropy(&self) -> f64 {
        self.components.iter().map(|&(w, e)| w * h2(e)).sum()
    }

    fn from_unsorted(mut comps: Vec<(f64, f64)>, merge_tol: f64, max_components: Option<usize>) -> Self {
        comps.retain(|&(w, _)| w > 0.0);
        comps.sort_by(|x, y| x.1.total_cmp(&y.1));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(comps.len());
        for (w, e) in comps {
            match merged.last_mut() {
                Some(last) if (last.1 - e).abs() <= merge_tol => {
                    last.1 = (last.0 * last.1 + w * e) / (last.0 + w);
                    last.0 += w;
                }
                _ => merged.push((w, e)),
            }
        }
        if let Some(cap) = max_components {
            degrade_to(&mut merged, cap.max(1));
        }
        Self { components: merged }
    }
}

fn h2(p: f64) -> f64 {
    let t = |x: f64| if x > 0.0 { -x * x.ln() } else { 0.0 };
    t(p) + t(1.0 - p)
}

#[derive(PartialEq)]
struct MergeCandidate {
    loss: f64,
    left: usize,
    stamp: (u64, u64),
}

impl Eq for MergeCandidate {}

impl PartialOrd for MergeCandidate {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for MergeCandidate {
    // reversed so that the max-heap pops the smallest loss, ties by position
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        other.loss.total_cmp(&self.loss).then(other.left.cmp(&self.left))
    }
}

/// Greedily merges neighbouring components with the smallest capacity loss
/// until at most `cap` remain. Merging forgets which component was used, so
/// the result is a degraded channel.
fn degrade_to(comps: &mut Vec<(f64, f64)>, cap: usize) {
    let n = comps.len();
    if n <= cap {
        return;
    }
    let merged = |a: (f64, f64), b: (f64, f64)| {
        let w = a.0 + b.0;
        (w, (a.0 * a.1 + b.0 * b.1) / w)
    };
    let loss = |a: (f64, f64), b: (f64, f64)| {
        let m = merged(a, b);
        (m.0 * h2(m.1) - a.0 * h2(a.1) - b.0 * h2(b.1)).max(0.0)
    };
    let mut next: Vec<usize> = (1..=n).collect();
    let mut prev: Vec<usize> = (0..n).map(|i| i.wrapping_sub(1)).collect();
    let mut alive = vec![true; n];
    let mut version = vec![0u64; n];
    let mut heap = std::collections::BinaryHeap::with_capacity(n);
    for i in 0..n - 1 {
        heap.push(MergeCandidate { loss: loss(comps[i], comps[i + 1]), left: i, stamp: (0, 0) });
    }
    let mut count = n;
    while count > cap {
        let Some(c) = heap.pop() else { break };
        let i = c.left;
        let j = next[i];
        if !alive[i] || j >= n || c.stamp != (version[i], version[j]) {
            continue;
        }
        comps[i] = merged(comps[i], comps[j]);
        alive[j] = false;
        next[i] = next[j];
        if next[i] < n {
            prev[next[i]] = i;
        }
        version[i] += 1;
        count -= 1;
        let p = prev[i];
        if p < n {
            heap.push(MergeCandidate { loss: loss(comps[p], comps[i]), left: p, stamp: (version[p], version[i]) });
        }
        if next[i] < n {
            let k = next[i];
            heap.push(MergeCandidate { loss: loss(comps[i], comps[k]), left: i, stamp: (version[i], version[k]) });
        }
    }
    let mut k = 0;
    comps.retain(|_| {
        k += 1;
        alive[k - 1]
    });
}

/// Exact scalar recursion for BSC mixtures, optionally capped in size.
#[derive(Clone, Copy, Debug)]
pub struct BscMixtureKernel {
    /// Crossovers closer than this are treated as one output symbol.
    pub merge_tol: f64,
    /// Degrading merge beyond this many components; `None` keeps the recursion exact.
    pub max_components: Option<usize>,
}

impl Default for BscMixtureKernel {
    fn default() -> Self {
        Self { merge_tol: 1e-12, max_components: None }
    }
}

impl PolarKernel for BscMixtureKernel {
    type Channel = BscMixture;

    fn minus(&self, a: &BscMixture, b: &BscMixture) -> Result<BscMixture> {
        let mut out = Vec::with_capacity(a.components.len() * b.components.len());
        for &(wa, ea) in &a.components {
            for &(wb, eb) in &b.components {
                out.push((wa * wb, ea * (1.0 - eb) + (1.0 - ea) * eb));
            }
        }
        Ok(BscMixture::from_unsorted(out, self.merge_tol, self.max_components))
    }

    fn plus(&self, a: &BscMixture, b: &BscMixture) -> Result<BscMixture> {
        let mut out = Vec::with_capacity(2 * a.components.len() * b.components.len());
        for &(wa, ea) in &a.components {
            for &(wb, eb) in &b.components {
                let agree = (1.0 - ea) * (1.0 - eb) + ea * eb;
                if agree > 0.0 {
                    out.push((wa * wb * agree, ea * eb / agree));
                }
                let disagree = ea * (1.0 - eb) + (1.0 - ea) * eb;
                if disagree > 0.0 {
                    let e = (ea * (1.0 - eb)).min((1.0 - ea) * eb) / disagree;
                    out.push((wa * wb * disagree, e));
                }
            }
        }
        Ok(BscMixture::from_unsorted(out, self.merge_tol, self.max_components))
    }

    fn capacity(&self, w: &BscMixture) -> Result<f64> {
        Ok(LN_2 - w.entropy())
    }
}

/// `(W^-, W^+)` for one exact channel with itself.
pub fn polar_step(w: &CqChannel) -> Result<(CqChannel, CqChannel)> {
    if !w.is_uniform() {
        return Err(Error::NonUniformPrior(w.prior()));
    }
    Ok((boxast(w, w)?, varoast(w, w)?))
}

/// Channels at depth `n`, index bits read from the first step (most
/// significant) to the last; bit 0 is minus, bit 1 is plus.
pub fn polarize_channels<K: PolarKernel>(kernel: &K, w: &K::Channel, n: usize) -> Result<Vec<Vec<K::Channel>>> {
    let mut levels = vec![vec![w.clone()]];
    for _ in 0..n {
        let prev = levels.last().expect("level 0 exists");
        let next: Vec<(K::Channel, K::Channel)> =
            prev.par_iter().map(|c| kernel.combine(c, c)).collect::<Result<_>>()?;
        levels.push(next.into_iter().flat_map(|(m, p)| [m, p]).collect());
    }
    Ok(levels)
}

/// Capacities of every level `0..=n` in the order of [`polarize_channels`].
pub fn polarize_levels<K: PolarKernel>(kernel: &K, w: &K::Channel, n: usize) -> Result<Vec<Vec<f64>>> {
    let mut out = Vec::with_capacity(n + 1);
    let mut level = vec![w.clone()];
    out.push(vec![kernel.capacity(w)?]);
    for _ in 0..n {
        let next: Vec<(K::Channel, K::Channel)> =
            level.par_iter().map(|c| kernel.combine(c, c)).collect::<Result<_>>()?;
        level = next.into_iter().flat_map(|(m, p)| [m, p]).collect();
        out.push(level.par_iter().map(|c| kernel.capacity(c)).collect::<Result<_>>()?);
    }
    Ok(out)
}

/// The `2^n` symmetric capacities of `W^s`, `s in {-,+}^n`, for an exact channel.
pub fn polarize_exact(w: &CqChannel, n: usize, budget: DimensionBudget) -> Result<Vec<f64>> {
    if !w.is_uniform() {
        return Err(Error::NonUniformPrior(w.prior()));
    }
    let kernel = ExactKernel { budget };
    let start = kernel.tidy(w.clone())?;
    Ok(polarize_levels(&kernel, &start, n)?.pop().expect("n + 1 levels"))
}

/// Classical channel family for the scalar backends.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassicalKind {
    Bsc,
    Bec,
}

/// Level-by-level capacities of a classical channel via its scalar recursion.
pub fn polarize_classical_levels(kind: ClassicalKind, param: f64, n: usize) -> Result<Vec<Vec<f64>>> {
    if n > MAX_CLASSICAL_LEVELS {
        return Err(Error::OutOfRange(format!("depth {n} > {MAX_CLASSICAL_LEVELS}")));
    }
    if !(0.0..=1.0).contains(&param) {
        return Err(Error::OutOfRange(format!("channel parameter {param} not in [0, 1]")));
    }
    match kind {
        ClassicalKind::Bec => polarize_levels(&ErasureKernel, &param, n),
        ClassicalKind::Bsc => {
            let kernel = BscMixtureKernel { max_components: Some(BSC_COMPONENTS), ..Default::default() };
            polarize_levels(&kernel, &BscMixture::bsc(param)?, n)
        }
    }
}

/// The `2^n` capacities at depth `n` for a classical channel.
pub fn polarize_classical(kind: ClassicalKind, param: f64, n: usize) -> Result<Vec<f64>> {
    Ok(polarize_classical_levels(kind, param, n)?.pop().expect("n + 1 levels"))
}

/// Fractions and moments of a list of capacities.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PolarStats {
    /// Fraction with `I < a`.
    pub alpha: f64,
    /// Fraction with `a <= I <= b`.
    pub theta: f64,
    /// Fraction with `I > b`.
    pub beta: f64,
    pub mu: f64,
    pub nu: f64,
}

pub fn polarization_stats(i_values: &[f64], a: f64, b: f64) -> Result<PolarStats> {
    if !(0.0 < a && a < b && b < LN_2) {
        return Err(Error::OutOfRange(format!("need 0 < a < b < log 2, got a = {a}, b = {b}")));
    }
    if i_values.is_empty() {
        return Err(Error::OutOfRange("empty capacity list".into()));
    }
    let n = i_values.len() as f64;
    let low = i_values.iter().filter(|&&i| i < a).count();
    let high = i_values.iter().filter(|&&i| i > b).count();
    let mid = i_values.len() - low - high;
    Ok(PolarStats {
        alpha: low as f64 / n,
        theta: mid as f64 / n,
        beta: high as f64 / n,
        mu: i_values.iter().sum::<f64>() / n,
        nu: i_values.iter().map(|i| i * i).sum::<f64>() / n,
    })
}

/// `T = h (1 - h)` with `h = H / log 2` the entropy normalised to `[0, 1]`.
pub fn t_functional(capacity: f64) -> f64 {
    let h = (1.0 - capacity / LN_2).clamp(0.0, 1.0);
    h * (1.0 - h)
}

/// Statistics of one recursion level.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PolarizationTrace {
    pub level: usize,
    pub i_values: Vec<f64>,
    pub alpha: f64,
    pub theta: f64,
    pub beta: f64,
    pub mu: f64,
    pub nu: f64,
    pub expected_t: f64,
}

impl PolarizationTrace {
    pub fn new(level: usize, i_values: Vec<f64>, a: f64, b: f64) -> Result<Self> {
        let s = polarization_stats(&i_values, a, b)?;
        let expected_t = i_values.iter().map(|&i| t_functional(i)).sum::<f64>() / i_values.len() as f64;
        Ok(Self { level, i_values, alpha: s.alpha, theta: s.theta, beta: s.beta, mu: s.mu, nu: s.nu, expected_t })
    }
}

pub fn traces_from_levels(levels: Vec<Vec<f64>>, a: f64, b: f64) -> Result<Vec<PolarizationTrace>> {
    levels.into_iter().enumerate().map(|(n, v)| PolarizationTrace::new(n, v, a, b)).collect()
}

/// One step of the non-stationary recursion at level `n` (`N = 2^n`): for each
/// group `m` and `j < N/2`, positions `Nm + j` and `Nm + N/2 + j` receive the
/// minus and plus of the pair `(Nm + j, Nm + N/2 + j)` of the previous level.
pub fn nonstationary_step<K: PolarKernel>(kernel: &K, prev: &[K::Channel], n: usize) -> Result<Vec<K::Channel>> {
    let big_n = 1usize << n;
    if n == 0 || prev.len() % big_n != 0 {
        return Err(Error::BadLength { len: prev.len(), block: big_n });
    }
    let half = big_n / 2;
    let pairs: Vec<(usize, usize)> = (0..prev.len() / big_n)
        .flat_map(|m| (0..half).map(move |j| (big_n * m + j, big_n * m + half + j)))
        .collect();
    let combined: Vec<(K::Channel, K::Channel)> =
        pairs.par_iter().map(|&(lo, hi)| kernel.combine(&prev[lo], &prev[hi])).collect::<Result<_>>()?;
    let mut out: Vec<Option<K::Channel>> = vec![None; prev.len()];
    for ((lo, hi), (minus, plus)) in pairs.into_iter().zip(combined) {
        out[lo] = Some(minus);
        out[hi] = Some(plus);
    }
    Ok(out.into_iter().map(|c| c.expect("every position is written")).collect())
}

/// Capacities of levels `0..=n` of the non-stationary recursion on `channels`.
pub fn nonstationary_levels<K: PolarKernel>(kernel: &K, channels: &[K::Channel], n: usize) -> Result<Vec<Vec<f64>>> {
    let big_n = 1usize << n;
    if channels.is_empty() || channels.len() % big_n != 0 {
        return Err(Error::BadLength { len: channels.len(), block: big_n });
    }
    let caps = |list: &[K::Channel]| list.par_iter().map(|c| kernel.capacity(c)).collect::<Result<Vec<f64>>>();
    let mut level = channels.to_vec();
    let mut out = vec![caps(&level)?];
    for k in 1..=n {
        level = nonstationary_step(kernel, &level, k)?;
        out.push(caps(&level)?);
    }
    Ok(out)
}

/// Exact non-stationary recursion; returns the capacities at level `n`.
pub fn nonstationary_polarize(channels: &[CqChannel], n: usize, budget: DimensionBudget) -> Result<Vec<f64>> {
    if let Some(w) = channels.iter().find(|w| !w.is_uniform()) {
        return Err(Error::NonUniformPrior(w.prior()));
    }
    let kernel = ExactKernel { budget };
    let start: Vec<CqChannel> = channels.iter().map(|w| kernel.tidy(w.clone())).collect::<Result<_>>()?;
    Ok(nonstationary_levels(&kernel, &start, n)?.pop().expect("n + 1 levels"))
}

/// Capacities of `n`-step paths with independent uniform signs, one seeded stream per path.
pub fn sample_paths<K: PolarKernel>(kernel: &K, w: &K::Channel, n: usize, paths: usize, seed: u64) -> Result<Vec<f64>> {
    (0..paths)
        .into_par_iter()
        .map(|p| {
            let mut rng = sample_rng(seed, p as u64);
            let mut c = w.clone();
            for _ in 0..n {
                c = if rand::Rng::random::<bool>(&mut rng) { kernel.plus(&c, &c)? } else { kernel.minus(&c, &c)? };
            }
            kernel.capacity(&c)
        })
        .collect()
}

/// Least-squares fit `log E[T] ~ intercept - rate * x(n)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DecayFit {
    pub rate: f64,
    pub intercept: f64,
    /// Root-mean-square residual in `log E[T]`.
    pub rms_residual: f64,
}

/// `E[T]` per level with fits against `exp(-c n)` and `exp(-c sqrt n)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpeedTrace {
    pub expected_t: Vec<f64>,
    pub exponential: Option<DecayFit>,
    pub sqrt_exponential: Option<DecayFit>,
}

fn fit(points: &[(f64, f64)]) -> Option<DecayFit> {
    if points.len() < 2 {
        return None;
    }
    let k = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
    let my = points.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = points.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    Some(DecayFit { rate: -slope, intercept, rms_residual: (rss / k).sqrt() })
}

pub fn speed_trace(levels: &[Vec<f64>]) -> SpeedTrace {
    let expected_t: Vec<f64> = levels
        .iter()
        .map(|v| v.iter().map(|&i| t_functional(i)).sum::<f64>() / v.len() as f64)
        .collect();
    let logs: Vec<(f64, f64)> = expected_t
        .iter()
        .enumerate()
        .filter(|(_, &t)| t > 0.0)
        .map(|(n, &t)| (n as f64, t.ln()))
        .collect();
    let sqrt_logs: Vec<(f64, f64)> = logs.iter().map(|&(n, y)| (n.sqrt(), y)).collect();
    SpeedTrace { expected_t, exponential: fit(&logs), sqrt_exponential: fit(&sqrt_logs) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{bec_embed, bsc_embed, pure_channel, random_cq_channel, PriorMode};
    use approx::assert_relative_eq;

    fn cap(w: &CqChannel) -> f64 {
        LN_2 - channel_entropy(w).unwrap()
    }

    #[test]
    fn step_examples() {
        for eps in [0.2, 0.5, 0.9] {
            let (m, p) = polar_step(&bec_embed(eps).unwrap()).unwrap();
            assert_relative_eq!(cap(&m), (1.0 - (2.0 * eps - eps * eps)) * LN_2, epsilon = 1e-12);
            assert_relative_eq!(cap(&p), (1.0 - eps * eps) * LN_2, epsilon = 1e-12);
        }
        let perfect = bsc_embed(0.0).unwrap();
        let (m, p) = polar_step(&perfect).unwrap();
        assert_relative_eq!(cap(&m), LN_2, epsilon = 1e-12);
        assert_relative_eq!(cap(&p), LN_2, epsilon = 1e-12);

        let w = pure_channel(0.6).unwrap();
        let (m, p) = polar_step(&w).unwrap();
        assert!(cap(&p) - cap(&m) > 1e-3);
        assert_relative_eq!(cap(&p) + cap(&m), 2.0 * cap(&w), epsilon = 1e-8);
        assert!(cap(&p) >= cap(&w) && cap(&w) >= cap(&m));
    }

    #[test]
    fn exact_examples() {
        let v = polarize_exact(&bec_embed(0.5).unwrap(), 1, DimensionBudget::default()).unwrap();
        assert_relative_eq!(v[0], 0.25 * LN_2, epsilon = 1e-12);
        assert_relative_eq!(v[1], 0.75 * LN_2, epsilon = 1e-12);

        let v = polarize_exact(&bsc_embed(0.0).unwrap(), 2, DimensionBudget::default()).unwrap();
        assert!(v.iter().all(|&i| (i - LN_2).abs() < 1e-12));

        let w = bsc_embed(0.11).unwrap();
        let v = polarize_exact(&w, 3, DimensionBudget::default()).unwrap();
        assert_eq!(v.len(), 8);
        let mean = v.iter().sum::<f64>() / 8.0;
        assert_relative_eq!(mean, LN_2 - h2(0.11), epsilon = 1e-6);
        let classical = polarize_classical(ClassicalKind::Bsc, 0.11, 3).unwrap();
        for (a, b) in v.iter().zip(&classical) {
            assert_relative_eq!(a, b, epsilon = 1e-6);
        }
    }

    #[test]
    fn budget_is_enforced() {
        let w = random_cq_channel(2, PriorMode::Half, 0).unwrap();
        let budget = DimensionBudget::default();
        assert_eq!(budget.n_max_exact(&w), 3);
        let tight = DimensionBudget { max_block_dim: 16, max_blocks: 1 << 16 };
        assert!(matches!(polarize_exact(&w, 3, tight), Err(Error::DimensionBudgetExceeded(_))));
        let v = polarize_exact(&w, 2, tight).unwrap();
        assert_relative_eq!(v.iter().sum::<f64>() / 4.0, cap(&w), epsilon = 1e-8);
    }

    #[test]
    fn classical_examples() {
        let v = polarize_classical(ClassicalKind::Bec, 0.5, 1).unwrap();
        assert_eq!(v, vec![0.25 * LN_2, 0.75 * LN_2]);
        for eps in [0.1, 0.5, 0.77] {
            let v = polarize_classical(ClassicalKind::Bec, eps, 10).unwrap();
            assert_relative_eq!(v.iter().sum::<f64>() / v.len() as f64, (1.0 - eps) * LN_2, epsilon = 1e-12);
        }
        let levels = polarize_classical_levels(ClassicalKind::Bsc, 0.11, 8).unwrap();
        for v in &levels {
            let mean = v.iter().sum::<f64>() / v.len() as f64;
            assert_relative_eq!(mean, LN_2 - h2(0.11), epsilon = 1e-6);
        }
        assert!(polarize_classical(ClassicalKind::Bec, 0.5, 25).is_err());
        assert!(polarize_classical(ClassicalKind::Bsc, 1.5, 2).is_err());
    }

    #[test]
    fn degrading_merge_loses_capacity_only() {
        let capped = BscMixtureKernel { max_components: Some(8), ..Default::default() };
        let w = BscMixture::bsc(0.11).unwrap();
        let exact = polarize_levels(&BscMixtureKernel::default(), &w, 6).unwrap();
        let approx = polarize_levels(&capped, &w, 6).unwrap();
        for (e, a) in exact[6].iter().zip(&approx[6]) {
            assert!(a <= &(e + 1e-12));
        }
    }

    #[test]
    fn stats_examples() {
        let (a, b) = (0.05 * LN_2, 0.95 * LN_2);
        let s = polarization_stats(&[LN_2; 4], a, b).unwrap();
        assert_eq!(s.beta, 1.0);
        let s = polarization_stats(&[0.0, LN_2], a, b).unwrap();
        assert_eq!((s.alpha, s.theta, s.beta), (0.5, 0.0, 0.5));
        assert!(polarization_stats(&[0.1], 0.3, 0.2).is_err());
    }

    #[test]
    fn bec_half_theta_at_sixteen_levels() {
        // frozen from an independent scalar recursion: 3680 of 65536 channels are unpolarized
        let v = polarize_classical(ClassicalKind::Bec, 0.5, 16).unwrap();
        let s = polarization_stats(&v, 0.05 * LN_2, 0.95 * LN_2).unwrap();
        assert_eq!(s.theta, 3680.0 / 65536.0);
        assert_relative_eq!(s.mu, 0.5 * LN_2, epsilon = 1e-12);
    }

    #[test]
    fn nonstationary_examples() {
        let w = random_cq_channel(2, PriorMode::Half, 4).unwrap();
        let list = vec![w.clone(); 4];
        let ns = nonstationary_polarize(&list, 2, DimensionBudget::default()).unwrap();
        let st = polarize_exact(&w, 2, DimensionBudget::default()).unwrap();
        // bit reversal of a 2-bit index swaps positions 1 and 2
        for (i, rev) in [0, 2, 1, 3].into_iter().enumerate() {
            assert_relative_eq!(ns[i], st[rev], epsilon = 1e-10);
        }

        let list = vec![bsc_embed(0.0).unwrap(), bsc_embed(0.5).unwrap(), bsc_embed(0.0).unwrap(), bsc_embed(0.5).unwrap()];
        let v = nonstationary_polarize(&list, 1, DimensionBudget::default()).unwrap();
        assert!(v[0].abs() < 1e-12 && (v[1] - LN_2).abs() < 1e-12);
        assert!(v[2].abs() < 1e-12 && (v[3] - LN_2).abs() < 1e-12);

        assert!(matches!(
            nonstationary_polarize(&list[..3], 1, DimensionBudget::default()),
            Err(Error::BadLength { len: 3, block: 2 })
        ));
    }

    #[test]
    fn nonstationary_conserves_block_means() {
        let eps: Vec<f64> = (0..64).map(|t| (t as f64 + 0.5) / 64.0).collect();
        let levels = nonstationary_levels(&ErasureKernel, &eps, 4).unwrap();
        for m in 0..4 {
            let before: f64 = levels[0][16 * m..16 * (m + 1)].iter().sum();
            let after: f64 = levels[4][16 * m..16 * (m + 1)].iter().sum();
            assert_relative_eq!(before, after, epsilon = 1e-12);
        }
    }

    #[test]
    fn sampled_paths_are_deterministic() {
        let a = sample_paths(&ErasureKernel, &0.3, 10, 64, 9).unwrap();
        let b = sample_paths(&ErasureKernel, &0.3, 10, 64, 9).unwrap();
        assert_eq!(a, b);
        let mean = a.iter().sum::<f64>() / 64.0;
        assert!((mean - 0.7 * LN_2).abs() < 0.2);
    }

    #[test]
    fn speed_examples() {
        let levels = polarize_classical_levels(ClassicalKind::Bec, 0.0, 5).unwrap();
        let s = speed_trace(&levels);
        assert!(s.expected_t.iter().all(|&t| t == 0.0));
        assert!(s.exponential.is_none());

        let levels = polarize_classical_levels(ClassicalKind::Bec, 0.5, 16).unwrap();
        let s = speed_trace(&levels);
        assert!(s.expected_t.windows(2).all(|w| w[1] < w[0]));
        assert!(s.exponential.unwrap().rate > 0.0 && s.sqrt_exponential.unwrap().rate > 0.0);

        let levels = polarize_levels(&ExactKernel::default(), &bsc_embed(0.11).unwrap(), 3).unwrap();
        let s = speed_trace(&levels);
        assert!(s.expected_t.windows(2).all(|w| w[1] < w[0]));
    }
}
