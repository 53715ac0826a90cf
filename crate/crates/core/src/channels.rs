//! Binary-input classical-quantum channels.
//!
//! A channel maps the input bit `x` to an output state `sigma_x`. Internally
//! the outputs are kept as a direct sum of blocks: block `k` holds the
//! (unnormalised) pieces `A_k^0`, `A_k^1`, with `sigma_x = (+)_k A_k^x`.
//! Combined channels stay block diagonal (a classical register, an erasure
//! flag, a diagonal embedding), and entropies add up blockwise, so the
//! decomposition keeps repeated combining tractable.

use std::f64::consts::LN_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, DensityMatrix, C64, TOL_TRACE};

/// Relative tolerance for treating two scalar blocks as the same output symbol.
pub const MERGE_TOL: f64 = 1e-12;

/// One direct-sum block of a channel's output states.
#[derive(Clone, Debug, PartialEq)]
pub struct Block {
    given0: ComplexMatrix,
    given1: ComplexMatrix,
}

impl Block {
    pub fn new(given0: ComplexMatrix, given1: ComplexMatrix) -> Result<Self> {
        if given0.dim() != given1.dim() {
            return Err(Error::DimensionMismatch(format!(
                "block pieces of size {} and {}",
                given0.dim(),
                given1.dim()
            )));
        }
        Ok(Self { given0, given1 })
    }

    pub fn dim(&self) -> usize {
        self.given0.dim()
    }

    /// Unnormalised output piece for input `x`.
    pub fn given(&self, x: u8) -> &ComplexMatrix {
        if x == 0 {
            &self.given0
        } else {
            &self.given1
        }
    }

    fn scalar(&self) -> Option<(f64, f64)> {
        (self.dim() == 1).then(|| (self.given0[(0, 0)].re, self.given1[(0, 0)].re))
    }
}

/// Binary-input cq-channel with input prior `p = P(x = 0)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CqChannel {
    prior: f64,
    blocks: Vec<Block>,
}

impl CqChannel {
    pub fn new(prior: f64, sigma0: DensityMatrix, sigma1: DensityMatrix) -> Result<Self> {
        check_prior(prior)?;
        if sigma0.dim() != sigma1.dim() {
            return Err(Error::InvalidChannel(format!(
                "output states of dimension {} and {}",
                sigma0.dim(),
                sigma1.dim()
            )));
        }
        Ok(Self {
            prior,
            blocks: vec![Block { given0: sigma0.into_matrix(), given1: sigma1.into_matrix() }],
        })
    }

    /// Channel from explicit direct-sum blocks; each input's pieces must have total trace one.
    pub fn from_blocks(prior: f64, blocks: Vec<Block>) -> Result<Self> {
        check_prior(prior)?;
        if blocks.is_empty() {
            return Err(Error::InvalidChannel("no output blocks".into()));
        }
        for x in 0..2u8 {
            let tr: f64 = blocks.iter().map(|b| b.given(x).trace().re).sum();
            if (tr - 1.0).abs() > TOL_TRACE {
                return Err(Error::InvalidChannel(format!("output {x} has trace {tr}")));
            }
        }
        Ok(Self { prior, blocks })
    }

    pub(crate) fn from_blocks_unchecked(prior: f64, blocks: Vec<Block>) -> Self {
        Self { prior, blocks }
    }

    pub fn prior(&self) -> f64 {
        self.prior
    }

    pub fn is_uniform(&self) -> bool {
        self.prior == 0.5
    }

    /// Same output states with a different input prior.
    pub fn with_prior(&self, prior: f64) -> Result<Self> {
        check_prior(prior)?;
        Ok(Self { prior, blocks: self.blocks.clone() })
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    /// Total output dimension.
    pub fn dim(&self) -> usize {
        self.blocks.iter().map(Block::dim).sum()
    }

    pub fn max_block_dim(&self) -> usize {
        self.blocks.iter().map(Block::dim).max().unwrap_or(0)
    }

    /// Materialised output state for input `x` (block diagonal).
    pub fn sigma(&self, x: u8) -> DensityMatrix {
        let n = self.dim();
        let mut m = ComplexMatrix::zeros(n);
        let mut off = 0;
        for b in &self.blocks {
            let piece = b.given(x);
            for i in 0..b.dim() {
                for j in 0..b.dim() {
                    m[(off + i, off + j)] = piece[(i, j)];
                }
            }
            off += b.dim();
        }
        DensityMatrix::from_matrix_unchecked(m)
    }

    pub fn sigma0(&self) -> DensityMatrix {
        self.sigma(0)
    }

    pub fn sigma1(&self) -> DensityMatrix {
        self.sigma(1)
    }

    /// Refines the block structure: splits every block into its connected
    /// components (by exactly-nonzero entries), drops empty blocks and merges
    /// 1x1 blocks carrying the same posterior.
    pub fn split_blocks(&self) -> Self {
        let mut refined = Vec::new();
        for b in &self.blocks {
            if b.dim() == 1 {
                refined.push(b.clone());
                continue;
            }
            for comp in components(b) {
                if comp.len() == b.dim() {
                    refined.push(b.clone());
                } else {
                    refined.push(Block {
                        given0: b.given0.submatrix(&comp),
                        given1: b.given1.submatrix(&comp),
                    });
                }
            }
        }
        Self { prior: self.prior, blocks: merge_scalar_blocks(refined) }
    }

    /// Projects every block onto the support of `A^0 + A^1`, dropping
    /// directions with weight at most `tol`. Blocks larger than
    /// [`linalg::JACOBI_MAX_DIM`] are left as they are.
    pub fn compress_support(&self, tol: f64) -> Result<Self> {
        let mut out = Vec::with_capacity(self.blocks.len());
        for b in &self.blocks {
            if b.dim() == 1 || b.dim() > linalg::JACOBI_MAX_DIM {
                out.push(b.clone());
                continue;
            }
            let spec = linalg::eig_hermitian(&(&b.given0 + &b.given1))?;
            let keep: Vec<Vec<C64>> = spec
                .eigenvalues
                .iter()
                .enumerate()
                .filter(|(_, &l)| l > tol)
                .map(|(k, _)| spec.column(k))
                .collect();
            if keep.is_empty() {
                continue;
            }
            if keep.len() == b.dim() {
                out.push(b.clone());
            } else {
                out.push(Block { given0: b.given0.compress(&keep), given1: b.given1.compress(&keep) });
            }
        }
        Ok(Self { prior: self.prior, blocks: out })
    }

    /// JSON form `{prior, dim, sigma0, sigma1}` with materialised outputs.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&ChannelJson::from(self))?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: ChannelJson = serde_json::from_str(s)?;
        raw.try_into()
    }
}

fn check_prior(prior: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&prior) {
        return Err(Error::OutOfRange(format!("prior {prior} not in [0, 1]")));
    }
    Ok(())
}

fn components(b: &Block) -> Vec<Vec<usize>> {
    let n = b.dim();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    let zero = C64::default();
    for i in 0..n {
        for j in (i + 1)..n {
            if b.given0[(i, j)] != zero || b.given1[(i, j)] != zero {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(i);
    }
    // drop components with no weight at all
    groups.retain(|g| g.iter().any(|&i| b.given0[(i, i)] != zero || b.given1[(i, i)] != zero));
    groups
}

fn merge_scalar_blocks(blocks: Vec<Block>) -> Vec<Block> {
    let (scalars, mut rest): (Vec<Block>, Vec<Block>) = blocks.into_iter().partition(|b| b.dim() == 1);
    let mut pairs: Vec<(f64, f64)> = scalars.iter().filter_map(Block::scalar).filter(|(a, b)| a + b > 0.0).collect();
    pairs.sort_by(|x, y| posterior(*x).total_cmp(&posterior(*y)));
    let mut merged: Vec<(f64, f64)> = Vec::with_capacity(pairs.len());
    for (a0, a1) in pairs {
        match merged.last_mut() {
            Some(last) if (posterior(*last) - posterior((a0, a1))).abs() <= MERGE_TOL => {
                last.0 += a0;
                last.1 += a1;
            }
            _ => merged.push((a0, a1)),
        }
    }
    rest.extend(merged.into_iter().map(|(a0, a1)| Block {
        given0: ComplexMatrix::from_real_diagonal(&[a0]),
        given1: ComplexMatrix::from_real_diagonal(&[a1]),
    }));
    rest
}

#[inline]
fn posterior((a0, a1): (f64, f64)) -> f64 {
    a0 / (a0 + a1)
}

#[derive(Serialize, Deserialize)]
struct ChannelJson {
    prior: f64,
    dim: usize,
    sigma0: ComplexMatrix,
    sigma1: ComplexMatrix,
}

impl From<&CqChannel> for ChannelJson {
    fn from(w: &CqChannel) -> Self {
        Self {
            prior: w.prior,
            dim: w.dim(),
            sigma0: w.sigma0().into_matrix(),
            sigma1: w.sigma1().into_matrix(),
        }
    }
}

impl TryFrom<ChannelJson> for CqChannel {
    type Error = Error;
    fn try_from(raw: ChannelJson) -> Result<Self> {
        if raw.sigma0.dim() != raw.dim || raw.sigma1.dim() != raw.dim {
            return Err(Error::InvalidChannel(format!(
                "declared dim {} but states are {} and {}",
                raw.dim,
                raw.sigma0.dim(),
                raw.sigma1.dim()
            )));
        }
        CqChannel::new(raw.prior, DensityMatrix::new(raw.sigma0)?, DensityMatrix::new(raw.sigma1)?)
    }
}

/// Classical-quantum state `sum_x p_x |x><x| (x) rho_x` over an arbitrary classical alphabet.
#[derive(Clone, Debug)]
pub struct JointCqState {
    blocks: Vec<(f64, DensityMatrix)>,
}

impl JointCqState {
    pub fn new(blocks: Vec<(f64, DensityMatrix)>) -> Result<Self> {
        let d = blocks.first().map(|(_, s)| s.dim()).ok_or_else(|| Error::InvalidState("empty joint state".into()))?;
        if blocks.iter().any(|(_, s)| s.dim() != d) {
            return Err(Error::InvalidState("quantum blocks differ in dimension".into()));
        }
        if blocks.iter().any(|(p, _)| !(0.0..=1.0).contains(p)) {
            return Err(Error::InvalidState("block probability outside [0, 1]".into()));
        }
        let total: f64 = blocks.iter().map(|(p, _)| p).sum();
        if (total - 1.0).abs() > TOL_TRACE {
            return Err(Error::InvalidState(format!("probabilities sum to {total}")));
        }
        Ok(Self { blocks })
    }

    /// `rho^{XB}` of a single channel (classical dimension 2).
    pub fn from_channel(w: &CqChannel) -> Self {
        Self { blocks: vec![(w.prior, w.sigma0()), (1.0 - w.prior, w.sigma1())] }
    }

    /// `rho^{X1 B1} (x) rho^{X2 B2}` with classical label `2 x1 + x2`.
    pub fn product(w1: &CqChannel, w2: &CqChannel) -> Self {
        let (s1, s2) = ([w1.sigma0(), w1.sigma1()], [w2.sigma0(), w2.sigma1()]);
        let (p1, p2) = ([w1.prior, 1.0 - w1.prior], [w2.prior, 1.0 - w2.prior]);
        let mut blocks = Vec::with_capacity(4);
        for x1 in 0..2 {
            for x2 in 0..2 {
                let rho = linalg::tensor(s1[x1].matrix(), s2[x2].matrix());
                blocks.push((p1[x1] * p2[x2], DensityMatrix::from_matrix_unchecked(rho)));
            }
        }
        Self { blocks }
    }

    pub fn classical_dim(&self) -> usize {
        self.blocks.len()
    }

    pub fn quantum_dim(&self) -> usize {
        self.blocks[0].1.dim()
    }

    pub fn blocks(&self) -> &[(f64, DensityMatrix)] {
        &self.blocks
    }

    /// `H(X|B)` where classical labels are first relabelled through `label`.
    pub fn conditional_entropy_grouped(&self, label: impl Fn(usize) -> usize) -> Result<f64> {
        let d = self.quantum_dim();
        let groups = (0..self.blocks.len()).map(&label).max().unwrap_or(0) + 1;
        let mut merged = vec![ComplexMatrix::zeros(d); groups];
        for (x, (p, rho)) in self.blocks.iter().enumerate() {
            if *p > 0.0 {
                let g = &mut merged[label(x)];
                *g = &*g + &rho.matrix().scale(*p);
            }
        }
        let mut total = ComplexMatrix::zeros(d);
        let mut joint = 0.0;
        for m in &merged {
            joint += linalg::psd_entropy(m)?;
            total = &total + m;
        }
        Ok(joint - linalg::psd_entropy(&total)?)
    }

    /// `H(X|B)` over the full classical alphabet.
    pub fn conditional_entropy(&self) -> Result<f64> {
        self.conditional_entropy_grouped(|x| x)
    }
}

/// `H(X|B)` for the channel's joint state `p |0><0| (x) sigma0 + (1-p) |1><1| (x) sigma1`, in nats.
pub fn channel_entropy(w: &CqChannel) -> Result<f64> {
    let p = w.prior;
    let mut h = 0.0;
    for b in &w.blocks {
        let weighted0 = b.given0.scale(p);
        let weighted1 = b.given1.scale(1.0 - p);
        h += linalg::psd_entropy(&weighted0)? + linalg::psd_entropy(&weighted1)?
            - linalg::psd_entropy(&(&weighted0 + &weighted1))?;
    }
    Ok(h.clamp(0.0, LN_2))
}

/// `I(W) = log 2 - H(W)`; meaningful for uniform priors.
pub fn symmetric_capacity(w: &CqChannel) -> Result<f64> {
    if !w.is_uniform() {
        log::warn!("symmetric capacity of a channel with prior {}", w.prior);
    }
    Ok(LN_2 - channel_entropy(w)?)
}

fn check_unit(name: &str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::OutOfRange(format!("{name} = {v} not in [0, 1]")));
    }
    Ok(())
}

/// Binary symmetric channel with outputs `diag(p, 1-p)`, `diag(1-p, p)`; `H = h2(p)`.
pub fn bsc_embed(p: f64) -> Result<CqChannel> {
    check_unit("p", p)?;
    CqChannel::new(
        0.5,
        DensityMatrix::from_matrix_unchecked(ComplexMatrix::from_real_diagonal(&[p, 1.0 - p])),
        DensityMatrix::from_matrix_unchecked(ComplexMatrix::from_real_diagonal(&[1.0 - p, p])),
    )
}

/// Binary erasure channel on `span{|0>, |1>, |e>}`; `H = eps log 2`.
pub fn bec_embed(eps: f64) -> Result<CqChannel> {
    check_unit("eps", eps)?;
    CqChannel::new(
        0.5,
        DensityMatrix::from_matrix_unchecked(ComplexMatrix::from_real_diagonal(&[1.0 - eps, 0.0, eps])),
        DensityMatrix::from_matrix_unchecked(ComplexMatrix::from_real_diagonal(&[0.0, 1.0 - eps, eps])),
    )
}

/// Pure-output qubit channel `|0>`, `cos a |0> + sin a |1>`; fidelity `cos a`.
pub fn pure_channel(angle: f64) -> Result<CqChannel> {
    if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&angle) {
        return Err(Error::OutOfRange(format!("angle {angle} not in [0, pi/2]")));
    }
    let zero = C64::new(0.0, 0.0);
    let psi0 = [C64::new(1.0, 0.0), zero];
    let psi1 = [C64::new(angle.cos(), 0.0), C64::new(angle.sin(), 0.0)];
    CqChannel::new(
        0.5,
        DensityMatrix::from_matrix_unchecked(ComplexMatrix::outer(&psi0)),
        DensityMatrix::from_matrix_unchecked(ComplexMatrix::outer(&psi1)),
    )
}

/// Pure-output channel with a prescribed output fidelity `f`.
pub fn pure_channel_with_fidelity(f: f64) -> Result<CqChannel> {
    check_unit("fidelity", f)?;
    pure_channel(f.acos().clamp(0.0, std::f64::consts::FRAC_PI_2))
}

/// Input prior used for random channels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PriorMode {
    /// `p = 1/2`.
    Half,
    /// `p ~ U[0, 1]`.
    Uniform,
}

/// Counter-based stream for sample `index` under master `seed`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Ginibre-induced random state `G G^dagger / tr(G G^dagger)` with `G` of size `dim x rank`.
pub fn random_density_matrix<R: Rng + ?Sized>(rng: &mut R, dim: usize, rank: usize) -> Result<DensityMatrix> {
    if dim == 0 || rank == 0 || rank > dim {
        return Err(Error::OutOfRange(format!("dim {dim}, rank {rank}")));
    }
    let g: Vec<C64> = (0..dim * rank)
        .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let mut m = ComplexMatrix::from_fn(dim, |i, j| {
        (0..rank).map(|k| g[i * rank + k] * g[j * rank + k].conj()).sum()
    });
    let tr = m.trace().re;
    m = m.scale(1.0 / tr).hermitian_part();
    Ok(DensityMatrix::from_matrix_unchecked(m))
}

/// Random channel drawn from an existing stream (full-rank Ginibre outputs).
pub fn random_cq_channel_from<R: Rng + ?Sized>(rng: &mut R, dim: usize, mode: PriorMode) -> Result<CqChannel> {
    random_cq_channel_with_rank(rng, dim, dim, mode)
}

pub fn random_cq_channel_with_rank<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    rank: usize,
    mode: PriorMode,
) -> Result<CqChannel> {
    if dim < 2 {
        return Err(Error::OutOfRange(format!("output dimension {dim} < 2")));
    }
    if dim > 6 {
        log::warn!("random channel with output dimension {dim} > 6");
    }
    let s0 = random_density_matrix(rng, dim, rank)?;
    let s1 = random_density_matrix(rng, dim, rank)?;
    let prior = match mode {
        PriorMode::Half => 0.5,
        PriorMode::Uniform => rng.random::<f64>(),
    };
    CqChannel::new(prior, s0, s1)
}

/// Deterministic random channel for a given seed.
pub fn random_cq_channel(dim: usize, mode: PriorMode, seed: u64) -> Result<CqChannel> {
    random_cq_channel_from(&mut sample_rng(seed, 0), dim, mode)
}
