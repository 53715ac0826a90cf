//! Scalar entropy bounds for the combined conditional entropy
//! `H(X1 + X2 | B1 B2)` in terms of `H1`, `H2`, plus the concavity and
//! fidelity relations they are built from. All entropies are in nats.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::channels::{channel_entropy, CqChannel};
use crate::combine::{combined_entropies, combined_entropies_general};
use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, DensityMatrix};

/// Slack allowed on the domain checks of scalar arguments.
pub const DOMAIN_TOL: f64 = 1e-12;
/// Slack below which a proven bound counts as violated.
pub const PROVEN_TOL: f64 = 1e-8;
/// Slack below which a conjectured bound counts as violated.
pub const CONJECTURE_TOL: f64 = 1e-7;
/// Bisection steps for the inverse binary entropy.
pub const BISECTION_STEPS: usize = 60;
/// Tolerance between the two evaluations of the concavity gap.
pub const GAP_AGREEMENT_TOL: f64 = 1e-8;

/// Unit of reported entropies.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LogBase {
    #[default]
    Nat,
    Bits,
}

impl LogBase {
    /// Converts a value in nats to this unit.
    pub fn from_nats(self, v: f64) -> f64 {
        match self {
            LogBase::Nat => v,
            LogBase::Bits => v / LN_2,
        }
    }
}

fn in_range(name: &str, v: f64, lo: f64, hi: f64) -> Result<f64> {
    if v.is_nan() || v < lo - DOMAIN_TOL || v > hi + DOMAIN_TOL {
        return Err(Error::OutOfRange(format!("{name} = {v} not in [{lo}, {hi}]")));
    }
    Ok(v.clamp(lo, hi))
}

fn entropy_arg(name: &str, h: f64) -> Result<f64> {
    in_range(name, h, 0.0, LN_2)
}

/// `h2(p) = -p log p - (1-p) log(1-p)`.
pub fn binary_entropy(p: f64) -> Result<f64> {
    let p = in_range("p", p, 0.0, 1.0)?;
    Ok(h2(p))
}

fn h2(p: f64) -> f64 {
    let term = |x: f64| if x > 0.0 { -x * x.ln() } else { 0.0 };
    term(p) + term(1.0 - p)
}

/// Inverse of `h2` on `[0, 1/2]`.
pub fn binary_entropy_inverse(h: f64) -> Result<f64> {
    let h = entropy_arg("h", h)?;
    Ok(h2_inv(h))
}

fn h2_inv(h: f64) -> f64 {
    if h <= 0.0 {
        return 0.0;
    }
    if h >= LN_2 {
        return 0.5;
    }
    let (mut lo, mut hi) = (0.0_f64, 0.5_f64);
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if h2(mid) < h {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `a * b = a(1-b) + (1-a)b`.
pub fn binary_convolution(a: f64, b: f64) -> Result<f64> {
    let a = in_range("a", a, 0.0, 1.0)?;
    let b = in_range("b", b, 0.0, 1.0)?;
    Ok(conv(a, b))
}

fn conv(a: f64, b: f64) -> f64 {
    a * (1.0 - b) + (1.0 - a) * b
}

/// Classical Mrs. Gerber function `h2(h2^{-1}(H1) * h2^{-1}(H2))`.
pub fn gc(h1: f64, h2v: f64) -> Result<f64> {
    let (h1, h2v) = (entropy_arg("H1", h1)?, entropy_arg("H2", h2v)?);
    Ok(gc_raw(h1, h2v))
}

fn gc_raw(h1: f64, h2v: f64) -> f64 {
    h2(conv(h2_inv(h1), h2_inv(h2v))).max(h1).max(h2v)
}

/// Optimal classical bounds `(lower, upper)` on the minus entropy.
pub fn classical_bounds(h1: f64, h2v: f64) -> Result<(f64, f64)> {
    let (h1, h2v) = (entropy_arg("H1", h1)?, entropy_arg("H2", h2v)?);
    Ok((gc_raw(h1, h2v), conjectured_upper_raw(h1, h2v)))
}

/// Optimal classical bounds `(lower, upper)` on the plus entropy.
pub fn classical_plus_bounds(h1: f64, h2v: f64) -> Result<(f64, f64)> {
    let (lo, hi) = classical_bounds(h1, h2v)?;
    Ok((h1 + h2v - hi, h1 + h2v - lo))
}

fn validate_ensemble(probs: &[f64], states: &[DensityMatrix]) -> Result<()> {
    if probs.is_empty() || probs.len() != states.len() {
        return Err(Error::InvalidEnsemble(format!("{} probabilities for {} states", probs.len(), states.len())));
    }
    if probs.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
        return Err(Error::InvalidEnsemble("probability outside [0, 1]".into()));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > linalg::TOL_TRACE {
        return Err(Error::InvalidEnsemble(format!("probabilities sum to {total}")));
    }
    let d = states[0].dim();
    if states.iter().any(|s| s.dim() != d) {
        return Err(Error::InvalidEnsemble("states differ in dimension".into()));
    }
    Ok(())
}

fn shannon(probs: &[f64]) -> f64 {
    linalg::entropy_of_eigenvalues(probs)
}

/// `H(sum p_i rho_i) - sum p_i H(rho_i)`, evaluated directly and as
/// `H(p) - D(psi || (+)_i p_i rho_i)` with `psi = sum sqrt(p_i p_j) |i><j| (x) sqrt(rho_i) sqrt(rho_j)`.
/// Fails if the two differ by more than [`GAP_AGREEMENT_TOL`].
pub fn concavity_gap_exact(probs: &[f64], states: &[DensityMatrix]) -> Result<f64> {
    let (direct, via_divergence) = concavity_gap_forms(probs, states)?;
    let diff = (direct - via_divergence).abs();
    if diff.is_nan() || diff > GAP_AGREEMENT_TOL {
        return Err(Error::EqualityFormMismatch(diff));
    }
    Ok(direct)
}

/// Both evaluations of [`concavity_gap_exact`], direct first.
pub fn concavity_gap_forms(probs: &[f64], states: &[DensityMatrix]) -> Result<(f64, f64)> {
    validate_ensemble(probs, states)?;
    let mix = DensityMatrix::mixture(probs, states)?;
    let mut direct = linalg::von_neumann_entropy(&mix)?;
    for (p, s) in probs.iter().zip(states) {
        direct -= p * linalg::von_neumann_entropy(s)?;
    }

    let (n, d) = (states.len(), states[0].dim());
    let roots: Vec<ComplexMatrix> = states.iter().map(linalg::matrix_sqrt).collect::<Result<_>>()?;
    let mut psi = ComplexMatrix::zeros(n * d);
    let mut pinched = ComplexMatrix::zeros(n * d);
    for i in 0..n {
        for j in 0..n {
            let block = (&roots[i] * &roots[j]).scale((probs[i] * probs[j]).sqrt());
            for r in 0..d {
                for c in 0..d {
                    psi[(i * d + r, j * d + c)] = block[(r, c)];
                    if i == j {
                        pinched[(i * d + r, i * d + c)] = states[i].matrix()[(r, c)] * probs[i];
                    }
                }
            }
        }
    }
    let psi = DensityMatrix::new(psi.hermitian_part())?;
    let pinched = DensityMatrix::new(pinched)?;
    let via_divergence = shannon(probs) - linalg::relative_entropy(&psi, &pinched)?;
    Ok((direct, via_divergence))
}

fn concavity_lower_with(probs: &[f64], overlap: impl Fn(usize, usize) -> Result<f64>) -> Result<f64> {
    let mut acc = 0.0;
    for i in 0..probs.len() {
        for j in (i + 1)..probs.len() {
            acc += (probs[i] * probs[j]).sqrt() * overlap(i, j)?;
        }
    }
    Ok(shannon(probs) - (1.0 + 2.0 * acc).ln())
}

/// `H(p) - log(1 + 2 sum_{i<j} sqrt(p_i p_j) tr[sqrt(rho_i) sqrt(rho_j)])`.
pub fn concavity_lower_sqrt(probs: &[f64], states: &[DensityMatrix]) -> Result<f64> {
    validate_ensemble(probs, states)?;
    let roots: Vec<ComplexMatrix> = states.iter().map(linalg::matrix_sqrt).collect::<Result<_>>()?;
    concavity_lower_with(probs, |i, j| Ok(roots[i].trace_product_re(&roots[j])))
}

/// Same as [`concavity_lower_sqrt`] with the fidelity `F(rho_i, rho_j)` in place of the trace.
pub fn concavity_lower_fid(probs: &[f64], states: &[DensityMatrix]) -> Result<f64> {
    validate_ensemble(probs, states)?;
    concavity_lower_with(probs, |i, j| linalg::fidelity(&states[i], &states[j]))
}

/// Range `(e^H - 1, 1 - 2 h2^{-1}(log 2 - H))` of the output fidelity of a channel with entropy `H`.
pub fn fidelity_window(h: f64) -> Result<(f64, f64)> {
    let h = entropy_arg("H", h)?;
    Ok(fidelity_window_raw(h))
}

fn fidelity_window_raw(h: f64) -> (f64, f64) {
    let lo = (h.exp() - 1.0).clamp(0.0, 1.0);
    let hi = (1.0 - 2.0 * h2_inv(LN_2 - h)).clamp(0.0, 1.0);
    (lo, hi)
}

/// Fuchs-van de Graaf type lower bound `1 - sqrt(2(log 2 - H))`, clipped to `[0, 1]`.
pub fn fuchs_vdg_lower(h: f64) -> Result<f64> {
    let h = entropy_arg("H", h)?;
    Ok((1.0 - (2.0 * (LN_2 - h)).sqrt()).clamp(0.0, 1.0))
}

/// `-2 log cos(arccos(fg)/2 - arccos(g)/2)`.
pub fn mgl_fg(f: f64, g: f64) -> Result<f64> {
    let f = in_range("f", f, 0.0, 1.0)?;
    let g = in_range("g", g, 0.0, 1.0)?;
    Ok(mgl_raw(f, g))
}

fn mgl_raw(f: f64, g: f64) -> f64 {
    let angle = 0.5 * (f * g).clamp(-1.0, 1.0).acos() - 0.5 * g.clamp(-1.0, 1.0).acos();
    (-2.0 * angle.cos().ln()).max(0.0)
}

/// Lower bound on the minus entropy for independent channels with uniform priors.
pub fn qmgl_lower_asym(h1: f64, h2v: f64) -> Result<f64> {
    let (h1, h2v) = (entropy_arg("H1", h1)?, entropy_arg("H2", h2v)?);
    Ok(qmgl_asym_raw(h1, h2v))
}

fn qmgl_asym_raw(h1: f64, h2v: f64) -> f64 {
    let upper_f = |h: f64| 1.0 - 2.0 * h2_inv(LN_2 - h);
    let upper_f_dual = |h: f64| 1.0 - 2.0 * h2_inv(h);
    let lower_g = |h: f64| h.exp() - 1.0;
    let lower_g_dual = |h: f64| 2.0 * (-h).exp() - 1.0;
    let candidates = [
        h1 + mgl_raw(upper_f(h1), lower_g(h2v)),
        h2v + mgl_raw(upper_f(h2v), lower_g(h1)),
        h2v + mgl_raw(upper_f_dual(h1), lower_g_dual(h2v)),
        h1 + mgl_raw(upper_f_dual(h2v), lower_g_dual(h1)),
    ];
    candidates.into_iter().filter(|v| !v.is_nan()).fold(h1.max(h2v), f64::max)
}

/// Lower bound on the minus entropy for two copies of one channel with a uniform prior.
pub fn qmgl_lower_iid(h: f64) -> Result<f64> {
    let h = entropy_arg("H", h)?;
    Ok(qmgl_iid_raw(h))
}

fn qmgl_iid_raw(h: f64) -> f64 {
    let f = if h <= 0.5 * LN_2 { 1.0 - 2.0 * h2_inv(h) } else { 1.0 - 2.0 * h2_inv(LN_2 - h) };
    h + mgl_raw(f, f)
}

/// The branch of the i.i.d. bound for `H <= log 2 / 2`, evaluated at any `H`.
pub fn qmgl_lower_iid_low_branch(h: f64) -> Result<f64> {
    let h = entropy_arg("H", h)?;
    let f = 1.0 - 2.0 * h2_inv(h);
    Ok(h + mgl_raw(f, f))
}

/// The branch of the i.i.d. bound for `H > log 2 / 2`, evaluated at any `H`.
pub fn qmgl_lower_iid_high_branch(h: f64) -> Result<f64> {
    let h = entropy_arg("H", h)?;
    let f = 1.0 - 2.0 * h2_inv(LN_2 - h);
    Ok(h + mgl_raw(f, f))
}

/// Weaker closed form `H + 0.083 H / (1 - ln H)`, mirrored about `log 2 / 2`.
pub fn qmgl_lower_iid_convenient(h: f64) -> Result<f64> {
    let h = entropy_arg("H", h)?;
    Ok(qmgl_convenient_raw(h))
}

/// [`qmgl_lower_iid_convenient`] with an explicit unit; the constant only holds in nats.
pub fn qmgl_lower_iid_convenient_in(h: f64, base: LogBase) -> Result<f64> {
    match base {
        LogBase::Nat => qmgl_lower_iid_convenient(h),
        LogBase::Bits => Err(Error::Config("the closed-form i.i.d. bound is only valid in nats".into())),
    }
}

fn qmgl_convenient_raw(h: f64) -> f64 {
    let excess = |x: f64| if x > 0.0 { 0.083 * x / (1.0 - x.ln()) } else { 0.0 };
    if h <= 0.5 * LN_2 {
        h + excess(h)
    } else {
        h + excess(LN_2 - h)
    }
}

/// Conjectured optimal lower bound with quantum side information.
pub fn conjectured_lower(h1: f64, h2v: f64) -> Result<f64> {
    let (h1, h2v) = (entropy_arg("H1", h1)?, entropy_arg("H2", h2v)?);
    Ok(conjectured_lower_raw(h1, h2v))
}

fn conjectured_lower_raw(h1: f64, h2v: f64) -> f64 {
    if h1 + h2v <= LN_2 {
        gc_raw(h1, h2v)
    } else {
        h1 + h2v - LN_2 + gc_raw(LN_2 - h1, LN_2 - h2v)
    }
}

/// Conjectured (and classically optimal) upper bound `log 2 - (log 2 - H1)(log 2 - H2)/log 2`.
pub fn conjectured_upper(h1: f64, h2v: f64) -> Result<f64> {
    let (h1, h2v) = (entropy_arg("H1", h1)?, entropy_arg("H2", h2v)?);
    Ok(conjectured_upper_raw(h1, h2v))
}

fn conjectured_upper_raw(h1: f64, h2v: f64) -> f64 {
    LN_2 - (LN_2 - h1) * (LN_2 - h2v) / LN_2
}

/// Every bound on `H(X1 + X2 | B1 B2)` for one channel pair next to the exact value.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub h1: f64,
    pub h2: f64,
    pub exact: f64,
    /// Exact plus entropy `H(X2 | X1 + X2, B1 B2)`.
    pub exact_plus: f64,
    pub classical_lower: f64,
    pub classical_upper: f64,
    /// Two-channel bound; uniform priors only.
    pub thm3: Option<f64>,
    /// Identical-channel bound; identical pairs with uniform prior only.
    pub thm4: Option<f64>,
    pub thm4_convenient: Option<f64>,
    pub conjectured_lower: f64,
    pub conjectured_upper: f64,
    /// A proven bound (including `exact >= max(H1, H2)`) failed by more than [`PROVEN_TOL`].
    pub proven_fault: bool,
    /// A conjectured bound failed by more than [`CONJECTURE_TOL`].
    pub conjecture_violation: bool,
    /// The classical lower bound failed by more than [`PROVEN_TOL`].
    pub classical_lower_violation: bool,
}

impl BoundReport {
    /// Builds the report from entropies alone.
    pub fn from_entropies(h1: f64, h2v: f64, exact: f64, exact_plus: f64, uniform: bool, identical: bool) -> Self {
        let (h1, h2v) = (h1.clamp(0.0, LN_2), h2v.clamp(0.0, LN_2));
        let (classical_lower, classical_upper) = (gc_raw(h1, h2v), conjectured_upper_raw(h1, h2v));
        let thm3 = uniform.then(|| qmgl_asym_raw(h1, h2v));
        let iid = uniform && identical;
        let thm4 = iid.then(|| qmgl_iid_raw(h1));
        let thm4_convenient = iid.then(|| qmgl_convenient_raw(h1));
        let conj_lo = conjectured_lower_raw(h1, h2v);
        let conj_hi = conjectured_upper_raw(h1, h2v);

        let below = |bound: Option<f64>, tol: f64| bound.is_some_and(|b| exact - b < -tol);
        let proven_fault = below(thm3, PROVEN_TOL)
            || below(thm4, PROVEN_TOL)
            || below(thm4_convenient, PROVEN_TOL)
            || (uniform && exact - h1.max(h2v) < -PROVEN_TOL);
        let conjecture_violation = exact - conj_lo < -CONJECTURE_TOL || conj_hi - exact < -CONJECTURE_TOL;
        Self {
            h1,
            h2: h2v,
            exact,
            exact_plus,
            classical_lower,
            classical_upper,
            thm3,
            thm4,
            thm4_convenient,
            conjectured_lower: conj_lo,
            conjectured_upper: conj_hi,
            proven_fault,
            conjecture_violation,
            classical_lower_violation: exact - classical_lower < -PROVEN_TOL,
        }
    }

    pub fn slack_classical_lower(&self) -> f64 {
        self.exact - self.classical_lower
    }

    pub fn slack_thm3(&self) -> Option<f64> {
        self.thm3.map(|b| self.exact - b)
    }

    pub fn slack_thm4(&self) -> Option<f64> {
        self.thm4.map(|b| self.exact - b)
    }

    pub fn slack_conjectured_lower(&self) -> f64 {
        self.exact - self.conjectured_lower
    }

    pub fn slack_conjectured_upper(&self) -> f64 {
        self.conjectured_upper - self.exact
    }
}

/// Exact minus entropy of the pair and every bound. Non-uniform priors are
/// evaluated on the joint state and only compared with prior-free bounds.
pub fn bound_report(w1: &CqChannel, w2: &CqChannel) -> Result<BoundReport> {
    let (h1, h2v) = (channel_entropy(w1)?, channel_entropy(w2)?);
    let uniform = w1.is_uniform() && w2.is_uniform();
    let (exact, exact_plus) = if uniform { combined_entropies(w1, w2)? } else { combined_entropies_general(w1, w2)? };
    Ok(BoundReport::from_entropies(h1, h2v, exact, exact_plus, uniform, w1 == w2))
}

/// Grid estimate of `min 2 (qmgl_lower_asym(H1, H2) - max(H1, H2))` over
/// channels with symmetric capacities in `[a, b]`, i.e. `H1, H2 in [log 2 - b, log 2 - a]`.
pub fn kappa_estimate(a: f64, b: f64, grid_n: usize) -> Result<f64> {
    if !(0.0 < a && a < b && b < LN_2) {
        return Err(Error::OutOfRange(format!("need 0 < a < b < log 2, got a = {a}, b = {b}")));
    }
    if grid_n < 2 {
        return Err(Error::OutOfRange(format!("grid size {grid_n} < 2")));
    }
    let (lo, hi) = (LN_2 - b, LN_2 - a);
    let point = |i: usize| lo + (hi - lo) * i as f64 / (grid_n - 1) as f64;
    let mut best = f64::INFINITY;
    for i in 0..grid_n {
        for j in 0..grid_n {
            let (x, y) = (point(i), point(j));
            best = best.min(2.0 * (qmgl_asym_raw(x, y) - x.max(y)));
        }
    }
    Ok(best)
}
