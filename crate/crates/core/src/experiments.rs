//! Experiment drivers behind the `cqbounds` binary.
//!
//! Each driver takes an [`ExperimentConfig`], draws every random object from
//! its own `(seed, index)` stream and writes CSV / JSON into `out_path`.
//! Rows are emitted in index order, so reruns with the same seed are
//! byte-identical regardless of thread count. Floats are printed with 17
//! significant digits; computation is in nats and `log_base` only affects
//! what is written.

use std::f64::consts::LN_2;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{
    conjectured_lower, conjectured_upper, fidelity_window, fuchs_vdg_lower, gc, qmgl_lower_asym, qmgl_lower_iid,
    qmgl_lower_iid_convenient, qmgl_lower_iid_high_branch, qmgl_lower_iid_low_branch, BoundReport, LogBase,
};
use crate::channels::{
    bec_embed, bsc_embed, channel_entropy, pure_channel, random_cq_channel_from, sample_rng, CqChannel, PriorMode,
};
use crate::combine::{boxast, combined_entropies_general, varoast};
use crate::duality::{check_duality_lemma, dual_channel, mirror_identity_check, DualityReport};
use crate::error::{Error, Result};
use crate::polar::{
    nonstationary_levels, polarize_classical_levels, polarize_levels, speed_trace, traces_from_levels, ClassicalKind,
    DecayFit, DimensionBudget, ErasureKernel, ExactKernel, PolarizationTrace,
};

/// Largest duality residual still counted as agreement.
pub const DUALITY_TOL: f64 = 1e-7;
/// Largest drift of the mean capacity across polarization levels.
pub const CONSERVATION_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Sweep,
    Curves,
    Duality,
    Polarize,
    Speed,
}

/// Channel fed to `polarize` and `speed`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "param")]
pub enum ChannelSpec {
    /// Erasure probability, scalar recursion.
    Bec(f64),
    /// Crossover probability, merged-mixture recursion.
    Bsc(f64),
    /// Erasure channel embedded as a cq channel, exact recursion.
    BecEmbed(f64),
    /// Symmetric channel embedded as a cq channel, exact recursion.
    BscEmbed(f64),
    /// Pure-state channel with the given angle, exact recursion.
    Pure(f64),
    /// Random channel of this output dimension with `p = 1/2`, exact recursion.
    Random(usize),
    /// `T` erasure channels with `eps_t = (t + 1/2) / T`, non-stationary recursion.
    MixedBec(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub command: Command,
    pub seed: u64,
    pub samples: usize,
    pub dims: Vec<usize>,
    pub grid: usize,
    pub a: f64,
    pub b: f64,
    pub log_base: LogBase,
    pub out_path: PathBuf,
    pub prior: PriorMode,
    /// Sweep over `(W, W)` instead of independent pairs.
    pub identical_pairs: bool,
    pub channel: ChannelSpec,
    pub levels: usize,
    pub budget: DimensionBudget,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            command: Command::Sweep,
            seed: 0,
            samples: 50_000,
            dims: vec![2],
            grid: 101,
            a: 0.05 * LN_2,
            b: 0.95 * LN_2,
            log_base: LogBase::Nat,
            out_path: PathBuf::from("out"),
            prior: PriorMode::Half,
            identical_pairs: true,
            channel: ChannelSpec::Bec(0.5),
            levels: 16,
            budget: DimensionBudget::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.samples < 1 {
            return Err(Error::Config("samples must be at least 1".into()));
        }
        if self.grid < 2 {
            return Err(Error::Config("grid must have at least 2 points".into()));
        }
        if !(0.0 < self.a && self.a < self.b && self.b < LN_2) {
            return Err(Error::Config(format!("need 0 < a < b < log 2, got a = {}, b = {}", self.a, self.b)));
        }
        if self.dims.is_empty() || self.dims.iter().any(|&d| d < 2) {
            return Err(Error::Config("dims must be a non-empty list of sizes >= 2".into()));
        }
        Ok(())
    }

    fn file(&self, name: &str) -> PathBuf {
        self.out_path.join(name)
    }

    fn conv(&self, v: f64) -> f64 {
        self.log_base.from_nats(v)
    }
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

fn flag(b: bool) -> String {
    u8::from(b).to_string()
}

fn write_csv(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.flush()?;
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    fs::write(path, s)?;
    Ok(())
}

fn prepare(cfg: &ExperimentConfig) -> Result<()> {
    cfg.validate()?;
    fs::create_dir_all(&cfg.out_path)?;
    Ok(())
}

// ---------------------------------------------------------------- sweep

/// One sampled pair with every bound, in nats.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub index: usize,
    pub dim: usize,
    pub prior1: f64,
    pub prior2: f64,
    pub report: BoundReport,
    pub chain_rule_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepSummary {
    pub seed: u64,
    pub samples: usize,
    pub dims: Vec<usize>,
    pub prior: PriorMode,
    pub identical_pairs: bool,
    pub log_base: LogBase,
    pub proven_violations: usize,
    pub conjecture_violations: usize,
    pub classical_lower_violations: usize,
    pub max_chain_rule_residual: f64,
    pub min_proven_slack: Option<f64>,
    pub min_conjectured_lower_slack: f64,
    pub min_conjectured_upper_slack: f64,
    pub min_classical_lower_slack: f64,
}

fn sweep_sample(cfg: &ExperimentConfig, index: usize, dim: usize) -> Result<SweepRow> {
    let mut rng = sample_rng(cfg.seed, index as u64);
    let w1 = random_cq_channel_from(&mut rng, dim, cfg.prior)?;
    let w2 = if cfg.identical_pairs { w1.clone() } else { random_cq_channel_from(&mut rng, dim, cfg.prior)? };
    let (h1, h2) = (channel_entropy(&w1)?, channel_entropy(&w2)?);
    let uniform = w1.is_uniform() && w2.is_uniform();
    let (minus, plus) = if uniform {
        (channel_entropy(&boxast(&w1, &w2)?)?, channel_entropy(&varoast(&w1, &w2)?)?)
    } else {
        combined_entropies_general(&w1, &w2)?
    };
    Ok(SweepRow {
        index,
        dim,
        prior1: w1.prior(),
        prior2: w2.prior(),
        report: BoundReport::from_entropies(h1, h2, minus, plus, uniform, cfg.identical_pairs),
        chain_rule_residual: (minus + plus - h1 - h2).abs(),
    })
}

/// All sweep rows; sample `k` of the `j`-th dimension uses stream `j * samples + k`.
pub fn sweep_rows(cfg: &ExperimentConfig) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    let jobs: Vec<(usize, usize)> = cfg
        .dims
        .iter()
        .enumerate()
        .flat_map(|(j, &d)| (0..cfg.samples).map(move |k| (j * cfg.samples + k, d)))
        .collect();
    jobs.par_iter().map(|&(i, d)| sweep_sample(cfg, i, d)).collect()
}

pub fn summarize_sweep(cfg: &ExperimentConfig, rows: &[SweepRow]) -> SweepSummary {
    let min = |f: &dyn Fn(&SweepRow) -> f64| rows.iter().map(f).fold(f64::INFINITY, f64::min);
    let proven = rows
        .iter()
        .flat_map(|r| {
            let rep = &r.report;
            [rep.slack_thm3(), rep.slack_thm4(), rep.thm4_convenient.map(|b| rep.exact - b)]
        })
        .flatten()
        .fold(None, |acc: Option<f64>, s| Some(acc.map_or(s, |a| a.min(s))));
    SweepSummary {
        seed: cfg.seed,
        samples: cfg.samples,
        dims: cfg.dims.clone(),
        prior: cfg.prior,
        identical_pairs: cfg.identical_pairs,
        log_base: cfg.log_base,
        proven_violations: rows.iter().filter(|r| r.report.proven_fault).count(),
        conjecture_violations: rows.iter().filter(|r| r.report.conjecture_violation).count(),
        classical_lower_violations: rows.iter().filter(|r| r.report.classical_lower_violation).count(),
        max_chain_rule_residual: cfg.conv(rows.iter().map(|r| r.chain_rule_residual).fold(0.0, f64::max)),
        min_proven_slack: proven.map(|s| cfg.conv(s)),
        min_conjectured_lower_slack: cfg.conv(min(&|r| r.report.slack_conjectured_lower())),
        min_conjectured_upper_slack: cfg.conv(min(&|r| r.report.slack_conjectured_upper())),
        min_classical_lower_slack: cfg.conv(min(&|r| r.report.slack_classical_lower())),
    }
}

const SWEEP_HEADER: [&str; 18] = [
    "index",
    "dim",
    "prior1",
    "prior2",
    "H1",
    "H2",
    "exact",
    "exact_plus",
    "cl_lo",
    "cl_hi",
    "thm3",
    "thm4",
    "thm4_conv",
    "conj_lo",
    "conj_hi",
    "proven_fault",
    "conjecture_violation",
    "classical_lower_violation",
];

/// Writes `sweep.csv` and `sweep_summary.json`.
pub fn run_conjecture_sweep(cfg: &ExperimentConfig) -> Result<SweepSummary> {
    prepare(cfg)?;
    let rows = sweep_rows(cfg)?;
    let c = |v: f64| num(cfg.conv(v));
    let co = |v: Option<f64>| opt(v.map(|x| cfg.conv(x)));
    write_csv(
        &cfg.file("sweep.csv"),
        &SWEEP_HEADER,
        rows.iter().map(|r| {
            let rep = &r.report;
            vec![
                r.index.to_string(),
                r.dim.to_string(),
                num(r.prior1),
                num(r.prior2),
                c(rep.h1),
                c(rep.h2),
                c(rep.exact),
                c(rep.exact_plus),
                c(rep.classical_lower),
                c(rep.classical_upper),
                co(rep.thm3),
                co(rep.thm4),
                co(rep.thm4_convenient),
                c(rep.conjectured_lower),
                c(rep.conjectured_upper),
                flag(rep.proven_fault),
                flag(rep.conjecture_violation),
                flag(rep.classical_lower_violation),
            ]
        }),
    )?;
    let summary = summarize_sweep(cfg, &rows);
    write_json(&cfg.file("sweep_summary.json"), &summary)?;
    Ok(summary)
}

// ---------------------------------------------------------------- curves

/// Single-entropy bound curves at one grid point, in nats (fidelities are unitless).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CurveRow {
    pub h: f64,
    pub f_lo: f64,
    pub f_hi: f64,
    pub fuchs_vdg: f64,
    pub thm4: f64,
    pub thm4_low_branch: f64,
    pub thm4_high_branch: f64,
    pub thm4_convenient: f64,
    pub thm3_diagonal: f64,
    pub classical_lower: f64,
    pub conj_lo: f64,
    pub conj_hi: f64,
}

/// Two-entropy surfaces at one grid point, in nats.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridRow {
    pub h1: f64,
    pub h2: f64,
    pub thm3: f64,
    /// `qmgl_lower_asym(H1, H2) - max(H1, H2)`.
    pub thm3_gain: f64,
    pub classical_lower: f64,
    pub conj_lo: f64,
    pub conj_hi: f64,
}

fn grid_point(grid: usize, i: usize) -> f64 {
    if i + 1 == grid {
        LN_2
    } else {
        LN_2 * i as f64 / (grid - 1) as f64
    }
}

pub fn curve_rows(grid: usize) -> Result<Vec<CurveRow>> {
    (0..grid)
        .map(|i| {
            let h = grid_point(grid, i);
            let (f_lo, f_hi) = fidelity_window(h)?;
            Ok(CurveRow {
                h,
                f_lo,
                f_hi,
                fuchs_vdg: fuchs_vdg_lower(h)?,
                thm4: qmgl_lower_iid(h)?,
                thm4_low_branch: qmgl_lower_iid_low_branch(h)?,
                thm4_high_branch: qmgl_lower_iid_high_branch(h)?,
                thm4_convenient: qmgl_lower_iid_convenient(h)?,
                thm3_diagonal: qmgl_lower_asym(h, h)?,
                classical_lower: gc(h, h)?,
                conj_lo: conjectured_lower(h, h)?,
                conj_hi: conjectured_upper(h, h)?,
            })
        })
        .collect()
}

pub fn grid_rows(grid: usize) -> Result<Vec<GridRow>> {
    let points: Vec<(usize, usize)> = (0..grid).flat_map(|i| (0..grid).map(move |j| (i, j))).collect();
    points
        .par_iter()
        .map(|&(i, j)| {
            let (h1, h2) = (grid_point(grid, i), grid_point(grid, j));
            let thm3 = qmgl_lower_asym(h1, h2)?;
            Ok(GridRow {
                h1,
                h2,
                thm3,
                thm3_gain: thm3 - h1.max(h2),
                classical_lower: gc(h1, h2)?,
                conj_lo: conjectured_lower(h1, h2)?,
                conj_hi: conjectured_upper(h1, h2)?,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurvesSummary {
    pub grid: usize,
    pub log_base: LogBase,
    pub curve_rows: usize,
    pub grid_rows: usize,
    /// Smallest `thm3_gain` over grid points off the square's edges.
    pub min_interior_thm3_gain: Option<f64>,
}

/// Writes `curves.csv` (one entropy) and `curves_grid.csv` (two entropies).
pub fn run_bound_curves(cfg: &ExperimentConfig) -> Result<CurvesSummary> {
    prepare(cfg)?;
    let c = |v: f64| num(cfg.conv(v));
    let curves = curve_rows(cfg.grid)?;
    write_csv(
        &cfg.file("curves.csv"),
        &[
            "H",
            "f_lo",
            "f_hi",
            "fuchs_vdg",
            "thm4",
            "thm4_low",
            "thm4_high",
            "thm4_conv",
            "thm3_diag",
            "cl_lo",
            "conj_lo",
            "conj_hi",
        ],
        curves.iter().map(|r| {
            vec![
                c(r.h),
                num(r.f_lo),
                num(r.f_hi),
                num(r.fuchs_vdg),
                c(r.thm4),
                c(r.thm4_low_branch),
                c(r.thm4_high_branch),
                c(r.thm4_convenient),
                c(r.thm3_diagonal),
                c(r.classical_lower),
                c(r.conj_lo),
                c(r.conj_hi),
            ]
        }),
    )?;
    let grid = grid_rows(cfg.grid)?;
    write_csv(
        &cfg.file("curves_grid.csv"),
        &["H1", "H2", "thm3", "thm3_gain", "cl_lo", "conj_lo", "conj_hi"],
        grid.iter().map(|r| {
            vec![c(r.h1), c(r.h2), c(r.thm3), c(r.thm3_gain), c(r.classical_lower), c(r.conj_lo), c(r.conj_hi)]
        }),
    )?;
    let edge = |h: f64| h == 0.0 || h == LN_2;
    let interior = grid.iter().filter(|r| !edge(r.h1) && !edge(r.h2)).map(|r| r.thm3_gain);
    let min_interior_thm3_gain = interior.fold(None, |acc: Option<f64>, g| Some(acc.map_or(g, |a| a.min(g))));
    Ok(CurvesSummary {
        grid: cfg.grid,
        log_base: cfg.log_base,
        curve_rows: curves.len(),
        grid_rows: grid.len(),
        min_interior_thm3_gain: min_interior_thm3_gain.map(|g| cfg.conv(g)),
    })
}

// ---------------------------------------------------------------- duality

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DualitySummary {
    pub seed: u64,
    pub samples: usize,
    pub dims: Vec<usize>,
    pub log_base: LogBase,
    /// Componentwise maximum over all random pairs.
    pub worst: DualityReport,
    pub max_residual: f64,
    pub mean_residual: f64,
    pub max_mirror_residual: f64,
    /// `max |I(BEC(eps)^perp) - eps log 2|` over the grid.
    pub bec_dual_residual: f64,
    /// `max |I(W) + I(W^perp) - log 2|` over symmetric channels on the grid.
    pub bsc_capacity_sum_residual: f64,
    /// `|H(perfect^perp) - log 2|`.
    pub perfect_dual_residual: f64,
    pub pass: bool,
}

fn random_pair(cfg: &ExperimentConfig, index: usize, dim: usize) -> Result<(CqChannel, CqChannel)> {
    let mut rng = sample_rng(cfg.seed, index as u64);
    let w1 = random_cq_channel_from(&mut rng, dim, PriorMode::Half)?;
    let w2 = random_cq_channel_from(&mut rng, dim, PriorMode::Half)?;
    Ok((w1, w2))
}

fn max_report(a: DualityReport, b: DualityReport) -> DualityReport {
    DualityReport {
        minus_of_duals: a.minus_of_duals.max(b.minus_of_duals),
        plus_of_duals: a.plus_of_duals.max(b.plus_of_duals),
        plus_complement: a.plus_complement.max(b.plus_complement),
        double_dual: a.double_dual.max(b.double_dual),
        capacity_sum: a.capacity_sum.max(b.capacity_sum),
    }
}

/// Duality identities over random pairs plus the erasure / symmetric examples.
pub fn duality_suite(cfg: &ExperimentConfig) -> Result<DualitySummary> {
    cfg.validate()?;
    let jobs: Vec<(usize, usize)> = cfg
        .dims
        .iter()
        .enumerate()
        .flat_map(|(j, &d)| (0..cfg.samples).map(move |k| (j * cfg.samples + k, d)))
        .collect();
    let results: Vec<(DualityReport, f64)> = jobs
        .par_iter()
        .map(|&(i, d)| {
            let (w1, w2) = random_pair(cfg, i, d)?;
            Ok((check_duality_lemma(&w1, &w2)?, mirror_identity_check(&w1, &w2)?))
        })
        .collect::<Result<_>>()?;
    let worst = results.iter().map(|r| r.0).fold(DualityReport::default(), max_report);
    let mean_residual = results.iter().map(|r| r.0.max_residual()).sum::<f64>() / results.len() as f64;
    let max_mirror_residual = results.iter().map(|r| r.1).fold(0.0, f64::max);

    let mut bec_dual_residual: f64 = 0.0;
    let mut bsc_capacity_sum_residual: f64 = 0.0;
    for i in 0..cfg.grid {
        let x = i as f64 / (cfg.grid - 1) as f64;
        let dual = dual_channel(&bec_embed(x)?)?;
        bec_dual_residual = bec_dual_residual.max((LN_2 - channel_entropy(&dual)? - x * LN_2).abs());
        let w = bsc_embed(x)?;
        let sum = 2.0 * LN_2 - channel_entropy(&w)? - channel_entropy(&dual_channel(&w)?)?;
        bsc_capacity_sum_residual = bsc_capacity_sum_residual.max((sum - LN_2).abs());
    }
    let perfect_dual_residual = (channel_entropy(&dual_channel(&bsc_embed(0.0)?)?)? - LN_2).abs();

    let max_residual = worst.max_residual();
    let pass = [max_residual, max_mirror_residual, bec_dual_residual, bsc_capacity_sum_residual, perfect_dual_residual]
        .iter()
        .all(|&r| r <= DUALITY_TOL);
    let c = |v: f64| cfg.conv(v);
    Ok(DualitySummary {
        seed: cfg.seed,
        samples: cfg.samples,
        dims: cfg.dims.clone(),
        log_base: cfg.log_base,
        worst: DualityReport {
            minus_of_duals: c(worst.minus_of_duals),
            plus_of_duals: c(worst.plus_of_duals),
            plus_complement: c(worst.plus_complement),
            double_dual: c(worst.double_dual),
            capacity_sum: c(worst.capacity_sum),
        },
        max_residual: c(max_residual),
        mean_residual: c(mean_residual),
        max_mirror_residual: c(max_mirror_residual),
        bec_dual_residual: c(bec_dual_residual),
        bsc_capacity_sum_residual: c(bsc_capacity_sum_residual),
        perfect_dual_residual: c(perfect_dual_residual),
        pass,
    })
}

/// Writes `duality.json`.
pub fn run_duality_suite(cfg: &ExperimentConfig) -> Result<DualitySummary> {
    prepare(cfg)?;
    let summary = duality_suite(cfg)?;
    write_json(&cfg.file("duality.json"), &summary)?;
    Ok(summary)
}

// ---------------------------------------------------------------- polarization

/// Capacities per level for the configured channel, with the backend name.
pub fn polarization_levels(cfg: &ExperimentConfig) -> Result<(&'static str, Vec<Vec<f64>>)> {
    let n = cfg.levels;
    let exact = |w: CqChannel| -> Result<Vec<Vec<f64>>> {
        let kernel = ExactKernel { budget: cfg.budget };
        let start = w.split_blocks().compress_support(crate::linalg::TOL_SUPPORT)?;
        polarize_levels(&kernel, &start, n)
    };
    Ok(match cfg.channel {
        ChannelSpec::Bec(e) => ("bec-scalar", polarize_classical_levels(ClassicalKind::Bec, e, n)?),
        ChannelSpec::Bsc(p) => ("bsc-mixture", polarize_classical_levels(ClassicalKind::Bsc, p, n)?),
        ChannelSpec::BecEmbed(e) => ("exact", exact(bec_embed(e)?)?),
        ChannelSpec::BscEmbed(p) => ("exact", exact(bsc_embed(p)?)?),
        ChannelSpec::Pure(angle) => ("exact", exact(pure_channel(angle)?)?),
        ChannelSpec::Random(d) => {
            let mut rng = sample_rng(cfg.seed, 0);
            ("exact", exact(random_cq_channel_from(&mut rng, d, PriorMode::Half)?)?)
        }
        ChannelSpec::MixedBec(t) => {
            if t == 0 {
                return Err(Error::Config("mixed erasure list must be non-empty".into()));
            }
            let eps: Vec<f64> = (0..t).map(|i| (i as f64 + 0.5) / t as f64).collect();
            ("bec-nonstationary", nonstationary_levels(&ErasureKernel, &eps, n)?)
        }
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PolarizationManifest {
    pub seed: u64,
    pub backend: String,
    pub channel: ChannelSpec,
    pub levels: usize,
    pub budget: DimensionBudget,
    pub a: f64,
    pub b: f64,
    pub log_base: LogBase,
    /// `max_n |mu_n - mu_0|`, in the output unit.
    pub mean_drift: f64,
    pub nu_non_decreasing: bool,
    pub theta_final: f64,
}

pub fn polarization_traces(cfg: &ExperimentConfig) -> Result<(&'static str, Vec<PolarizationTrace>)> {
    cfg.validate()?;
    let (backend, levels) = polarization_levels(cfg)?;
    Ok((backend, traces_from_levels(levels, cfg.a, cfg.b)?))
}

/// Mean drift and `nu` monotonicity (with a tolerance for rounding) of a trace list.
pub fn conservation(traces: &[PolarizationTrace]) -> (f64, bool) {
    let mu0 = traces.first().map_or(0.0, |t| t.mu);
    let drift = traces.iter().map(|t| (t.mu - mu0).abs()).fold(0.0, f64::max);
    let monotone = traces.windows(2).all(|w| w[1].nu >= w[0].nu - 1e-12);
    (drift, monotone)
}

/// Writes `polarize.csv` and `polarize_manifest.json`.
pub fn run_polarization(cfg: &ExperimentConfig) -> Result<PolarizationManifest> {
    prepare(cfg)?;
    let (backend, traces) = polarization_traces(cfg)?;
    write_csv(
        &cfg.file("polarize.csv"),
        &["n", "alpha", "theta", "beta", "mu", "nu", "expected_T"],
        traces.iter().map(|t| {
            vec![
                t.level.to_string(),
                num(t.alpha),
                num(t.theta),
                num(t.beta),
                num(cfg.conv(t.mu)),
                num(cfg.conv(cfg.conv(t.nu))),
                num(t.expected_t),
            ]
        }),
    )?;
    let (drift, nu_non_decreasing) = conservation(&traces);
    let manifest = PolarizationManifest {
        seed: cfg.seed,
        backend: backend.to_string(),
        channel: cfg.channel,
        levels: cfg.levels,
        budget: cfg.budget,
        a: cfg.conv(cfg.a),
        b: cfg.conv(cfg.b),
        log_base: cfg.log_base,
        mean_drift: cfg.conv(drift),
        nu_non_decreasing,
        theta_final: traces.last().map_or(0.0, |t| t.theta),
    };
    write_json(&cfg.file("polarize_manifest.json"), &manifest)?;
    Ok(manifest)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpeedReport {
    pub seed: u64,
    pub backend: String,
    pub channel: ChannelSpec,
    pub levels: usize,
    pub expected_t: Vec<f64>,
    /// `log E[T] ~ c0 - c n`.
    pub exponential: Option<DecayFit>,
    /// `log E[T] ~ c0 - c sqrt(n)`.
    pub sqrt_exponential: Option<DecayFit>,
    pub non_increasing: bool,
}

/// Writes `speed.csv` and `speed.json`.
pub fn run_speed(cfg: &ExperimentConfig) -> Result<SpeedReport> {
    prepare(cfg)?;
    let (backend, levels) = polarization_levels(cfg)?;
    let trace = speed_trace(&levels);
    write_csv(
        &cfg.file("speed.csv"),
        &["n", "expected_T"],
        trace.expected_t.iter().enumerate().map(|(n, &t)| vec![n.to_string(), num(t)]),
    )?;
    let non_increasing = trace.expected_t.windows(2).all(|w| w[1] <= w[0] + 1e-12);
    let report = SpeedReport {
        seed: cfg.seed,
        backend: backend.to_string(),
        channel: cfg.channel,
        levels: cfg.levels,
        expected_t: trace.expected_t,
        exponential: trace.exponential,
        sqrt_exponential: trace.sqrt_exponential,
        non_increasing,
    };
    write_json(&cfg.file("speed.json"), &report)?;
    Ok(report)
}

/// Outcome of [`run`], used to pick the exit status.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Ok,
    /// A proven bound or identity failed beyond its tolerance.
    ProvenViolation,
}

pub fn run(cfg: &ExperimentConfig) -> Result<Outcome> {
    let fault = match cfg.command {
        Command::Sweep => run_conjecture_sweep(cfg)?.proven_violations > 0,
        Command::Curves => {
            run_bound_curves(cfg)?;
            false
        }
        Command::Duality => !run_duality_suite(cfg)?.pass,
        Command::Polarize => {
            let m = run_polarization(cfg)?;
            m.mean_drift > cfg.conv(CONSERVATION_TOL)
        }
        Command::Speed => {
            run_speed(cfg)?;
            false
        }
    };
    Ok(if fault { Outcome::ProvenViolation } else { Outcome::Ok })
}
