//! Dense complex Hermitian matrices for small systems.
//!
//! Everything here works on row-major `Complex64` storage and is sized for
//! the dimensions that show up in binary-input cq-channel work (a few up to
//! a few hundred). Eigendecompositions use cyclic Jacobi rotations, which
//! are accurate to a few ulps at these sizes and need no external LAPACK.
//! Spectra of larger matrices, when only eigenvalues are needed, go through
//! Householder tridiagonalization and implicit QL.
//!
//! All entropies are in nats and use `0 log 0 = 0`. Eigenvalues in
//! `[-TOL_PSD, 0)` are treated as exact zeros.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Hermiticity tolerance for inputs.
pub const TOL_HERM: f64 = 1e-10;
/// Smallest eigenvalue still accepted as "nonnegative".
pub const TOL_PSD: f64 = 1e-10;
/// Trace tolerance for density matrices.
pub const TOL_TRACE: f64 = 1e-9;
/// Reconstruction / eigen-equation tolerance.
pub const TOL_EIG: f64 = 1e-9;
/// Eigenvalues at or below this are outside the support.
pub const TOL_SUPPORT: f64 = 1e-12;

const JACOBI_MAX_SWEEPS: usize = 100;
const JACOBI_OFF_TARGET: f64 = 1e-13;
/// Above this size eigenvalue-only requests use the tridiagonal QL path.
pub const JACOBI_MAX_DIM: usize = 32;
const QL_MAX_ITER: usize = 60;

pub type C64 = Complex64;

#[inline]
fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![C64::default(); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = c(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix from row-major entries. Fails unless `entries.len()` is a square.
    pub fn from_vec(dim: usize, entries: Vec<C64>) -> Result<Self> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {dim}x{dim} matrix",
                entries.len()
            )));
        }
        Ok(Self { dim, data: entries })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = c(d, 0.0);
        }
        m
    }

    /// Rank-one projector-like matrix `|v><v|` (not normalised).
    pub fn outer(v: &[C64]) -> Self {
        Self::from_fn(v.len(), |i, j| v[i] * v[j].conj())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn diagonal_real(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self[(i, i)].re).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)])
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn scale_complex(&self, s: C64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch in max_abs_diff");
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `max |M_ij - conj(M_ji)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol * self.max_abs().max(1.0)
    }

    /// `(M + M^dagger) / 2`.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.dim, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    /// True when every off-diagonal entry is exactly zero.
    pub fn is_diagonal(&self) -> bool {
        (0..self.dim).all(|i| (0..self.dim).all(|j| i == j || self[(i, j)] == C64::default()))
    }

    /// Principal submatrix on the given index set (in the given order).
    pub fn submatrix(&self, indices: &[usize]) -> Self {
        Self::from_fn(indices.len(), |i, j| self[(indices[i], indices[j])])
    }

    /// `V^dagger M V` for a `dim x k` isometry given by its `k` columns.
    pub fn compress(&self, columns: &[Vec<C64>]) -> Self {
        let k = columns.len();
        // W = M V
        let mv: Vec<Vec<C64>> = columns
            .iter()
            .map(|v| (0..self.dim).map(|i| (0..self.dim).map(|j| self[(i, j)] * v[j]).sum()).collect())
            .collect();
        Self::from_fn(k, |a, b| (0..self.dim).map(|i| columns[a][i].conj() * mv[b][i]).sum())
    }

    /// Real part of `tr(self * other)`.
    pub fn trace_product_re(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        let mut acc = 0.0;
        for i in 0..self.dim {
            for k in 0..self.dim {
                acc += (self[(i, k)] * other[(k, i)]).re;
            }
        }
        acc
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in matrix product");
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == C64::default() {
                    continue;
                }
                let row = &rhs.data[k * n..(k + 1) * n];
                let dst = &mut out.data[i * n..(i + 1) * n];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in matrix sum");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in matrix difference");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

// JSON layout: array of rows, each row an array of [re, im] pairs.
impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> = (0..self.dim)
            .map(|i| (0..self.dim).map(|j| [self[(i, j)].re, self[(i, j)].im]).collect())
            .collect();
        rows.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<[f64; 2]>> = Vec::deserialize(deserializer)?;
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(serde::de::Error::custom("matrix rows must form a square"));
        }
        let data = rows.into_iter().flatten().map(|[re, im]| c(re, im)).collect();
        ComplexMatrix::from_vec(dim, data).map_err(serde::de::Error::custom)
    }
}

/// Eigenvalues (ascending) and eigenvectors (columns of a unitary).
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl Spectrum {
    /// `V diag(lambda) V^dagger`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map(|x| x)
    }

    /// Applies a real function to the eigenvalues: `V diag(f(lambda)) V^dagger`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.eigenvalues.len();
        let v = &self.eigenvectors;
        let fl: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        ComplexMatrix::from_fn(n, |i, j| (0..n).map(|k| v[(i, k)] * v[(j, k)].conj() * fl[k]).sum())
    }

    pub fn column(&self, k: usize) -> Vec<C64> {
        let n = self.eigenvalues.len();
        (0..n).map(|i| self.eigenvectors[(i, k)]).collect()
    }
}

/// Cyclic Jacobi eigendecomposition of a Hermitian matrix.
pub fn eig_hermitian(m: &ComplexMatrix) -> Result<Spectrum> {
    let defect = m.hermiticity_defect();
    if defect > TOL_HERM * m.max_abs().max(1.0) {
        return Err(Error::NotHermitian(defect));
    }
    let n = m.dim();
    let mut a = m.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm();

    let off_norm = |a: &ComplexMatrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let mut converged = false;
    for _ in 0..JACOBI_MAX_SWEEPS {
        let off = off_norm(&a);
        if off <= JACOBI_OFF_TARGET * scale || off == 0.0 {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r <= f64::MIN_POSITIVE {
                    continue;
                }
                let phase = apq / r; // e^{i phi}
                let alpha = a[(p, p)].re;
                let gamma = a[(q, q)].re;
                let tau = (gamma - alpha) / (2.0 * r);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * cs;
                // J = D R with D = diag(1, e^{-i phi}) on (p, q).
                let jqp = -phase.conj() * sn;
                let jqq = phase.conj() * cs;
                // Columns: A <- A J, V <- V J.
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * cs + akq * jqp;
                    a[(k, q)] = akp * sn + akq * jqq;
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * cs + vkq * jqp;
                    v[(k, q)] = vkp * sn + vkq * jqq;
                }
                // Rows: A <- J^dagger A.
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * cs + aqk * jqp.conj();
                    a[(q, k)] = apk * sn + aqk * jqq.conj();
                }
                a[(p, q)] = C64::default();
                a[(q, p)] = C64::default();
                a[(p, p)] = c(a[(p, p)].re, 0.0);
                a[(q, q)] = c(a[(q, q)].re, 0.0);
            }
        }
    }
    if !converged {
        let off = off_norm(&a);
        if off > JACOBI_OFF_TARGET * scale {
            return Err(Error::NoConvergence { sweeps: JACOBI_MAX_SWEEPS, off });
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag = a.diagonal_real();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));
    let eigenvalues = order.iter().map(|&i| diag[i]).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, |i, k| v[(i, order[k])]);
    Ok(Spectrum { eigenvalues, eigenvectors })
}

/// Eigenvalues only; diagonal inputs skip the rotation loop entirely.
pub fn eigenvalues_hermitian(m: &ComplexMatrix) -> Result<Vec<f64>> {
    if m.is_diagonal() {
        let mut d = m.diagonal_real();
        d.sort_by(f64::total_cmp);
        return Ok(d);
    }
    if m.dim() > JACOBI_MAX_DIM {
        return eigenvalues_tridiagonal_ql(m);
    }
    Ok(eig_hermitian(m)?.eigenvalues)
}

/// Householder reduction to a real symmetric tridiagonal matrix followed by
/// implicit QL with Wilkinson-type shifts. Eigenvalues only, ascending.
pub fn eigenvalues_tridiagonal_ql(m: &ComplexMatrix) -> Result<Vec<f64>> {
    let defect = m.hermiticity_defect();
    if defect > TOL_HERM * m.max_abs().max(1.0) {
        return Err(Error::NotHermitian(defect));
    }
    let n = m.dim();
    let (mut d, mut e) = householder_tridiagonal(m);
    tql(&mut d, &mut e)?;
    d.sort_by(f64::total_cmp);
    debug_assert_eq!(d.len(), n);
    Ok(d)
}

// Off-diagonal phases are dropped: a Hermitian tridiagonal matrix is
// diagonally unitarily similar to the real one with |e_k|.
fn householder_tridiagonal(m: &ComplexMatrix) -> (Vec<f64>, Vec<f64>) {
    let n = m.dim();
    let mut a = m.hermitian_part().data;
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    let mut v = vec![C64::default(); n];
    let mut p = vec![C64::default(); n];
    for k in 0..n.saturating_sub(1) {
        d[k] = a[k * n + k].re;
        let alpha = (k + 1..n).map(|i| a[i * n + k].norm_sqr()).sum::<f64>().sqrt();
        e[k] = alpha;
        if k + 2 >= n || alpha == 0.0 {
            continue;
        }
        let x0 = a[(k + 1) * n + k];
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { c(1.0, 0.0) };
        for i in k + 1..n {
            v[i] = a[i * n + k];
        }
        v[k + 1] += phase * alpha;
        let vs = &v[k + 1..];
        let vnorm2: f64 = vs.iter().map(|x| x.norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        let tau = 2.0 / vnorm2;
        for i in k + 1..n {
            let row = &a[i * n + k + 1..(i + 1) * n];
            let s: C64 = row.iter().zip(vs).map(|(x, y)| x * y).sum();
            p[i] = s * tau;
        }
        let vp: C64 = (k + 1..n).map(|i| v[i].conj() * p[i]).sum();
        let half = 0.5 * tau * vp.re;
        for i in k + 1..n {
            p[i] -= v[i] * half;
        }
        let ps = &p[k + 1..];
        for i in k + 1..n {
            let (vi, pi) = (v[i], p[i]);
            let row = &mut a[i * n + k + 1..(i + 1) * n];
            for ((x, vj), pj) in row.iter_mut().zip(vs).zip(ps) {
                *x -= vi * pj.conj() + pi * vj.conj();
            }
        }
    }
    if n > 0 {
        d[n - 1] = a[(n - 1) * n + n - 1].re;
    }
    (d, e)
}

// `e[i]` couples `d[i]` and `d[i + 1]`; `e[n - 1]` is unused.
fn tql(d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > QL_MAX_ITER {
                return Err(Error::NoConvergence { sweeps: QL_MAX_ITER, off: e[l].abs() });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut cc, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = cc * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                cc = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * cc * b;
                p = s * r;
                d[i + 1] = g + p;
                g = cc * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// `-sum x log x` over a list of eigenvalues, with tiny negatives clipped.
pub fn entropy_of_eigenvalues(eigs: &[f64]) -> f64 {
    eigs.iter()
        .map(|&l| if l > 0.0 { -l * l.ln() } else { 0.0 })
        .sum()
}

/// `-tr M log M` for a positive semidefinite matrix of any trace.
pub fn psd_entropy(m: &ComplexMatrix) -> Result<f64> {
    let eigs = eigenvalues_hermitian(m)?;
    check_psd(&eigs, m.max_abs())?;
    Ok(entropy_of_eigenvalues(&eigs))
}

fn check_psd(eigs: &[f64], scale: f64) -> Result<()> {
    if let Some(&min) = eigs.first() {
        if min < -TOL_PSD * scale.max(1.0) {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:.3e}")));
        }
    }
    Ok(())
}

/// Square root of a positive semidefinite matrix of any trace.
pub fn psd_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    if m.is_diagonal() {
        let d = m.diagonal_real();
        check_psd(&{
            let mut s = d.clone();
            s.sort_by(f64::total_cmp);
            s
        }, m.max_abs())?;
        return Ok(ComplexMatrix::from_real_diagonal(
            &d.iter().map(|&x| x.max(0.0).sqrt()).collect::<Vec<_>>(),
        ));
    }
    let spec = eig_hermitian(m)?;
    check_psd(&spec.eigenvalues, m.max_abs())?;
    Ok(spec.map(|l| l.max(0.0).sqrt()).hermitian_part())
}

/// Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix(ComplexMatrix);

impl DensityMatrix {
    /// Validates Hermiticity, positivity and trace.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if !m.is_hermitian(TOL_HERM) {
            return Err(Error::InvalidState(format!(
                "not Hermitian (defect {:.3e})",
                m.hermiticity_defect()
            )));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > TOL_TRACE || tr.im.abs() > TOL_TRACE {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let eigs = eigenvalues_hermitian(&m)?;
        check_psd(&eigs, 1.0)?;
        Ok(Self(m))
    }

    /// Skips validation; the caller guarantees the invariants by construction.
    pub(crate) fn from_matrix_unchecked(m: ComplexMatrix) -> Self {
        Self(m)
    }

    /// Pure state `|psi><psi| / <psi|psi>`.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if psi.is_empty() || norm <= 0.0 {
            return Err(Error::InvalidState("zero state vector".into()));
        }
        Ok(Self(ComplexMatrix::outer(psi).scale(1.0 / norm)))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self(ComplexMatrix::identity(dim).scale(1.0 / dim as f64))
    }

    /// Diagonal state from a probability vector.
    pub fn diagonal(probs: &[f64]) -> Result<Self> {
        Self::new(ComplexMatrix::from_real_diagonal(probs))
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    /// Convex combination `sum_i p_i rho_i`.
    pub fn mixture(probs: &[f64], states: &[DensityMatrix]) -> Result<Self> {
        let d = states.first().map(|s| s.dim()).ok_or_else(|| Error::InvalidState("empty mixture".into()))?;
        let mut acc = ComplexMatrix::zeros(d);
        for (p, s) in probs.iter().zip(states) {
            if s.dim() != d {
                return Err(Error::DimensionMismatch(format!("{} vs {}", s.dim(), d)));
            }
            acc = &acc + &s.0.scale(*p);
        }
        Ok(Self(acc))
    }
}

/// `-tr rho log rho`, in nats.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    psd_entropy(rho.matrix())
}

/// Principal square root of a state, negative rounding eigenvalues clipped to zero.
pub fn matrix_sqrt(rho: &DensityMatrix) -> Result<ComplexMatrix> {
    psd_sqrt(rho.matrix())
}

/// Fidelity `|| sqrt(rho) sqrt(sigma) ||_1`.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(format!("{} vs {}", rho.dim(), sigma.dim())));
    }
    let sr = matrix_sqrt(rho)?;
    let ss = matrix_sqrt(sigma)?;
    Ok(trace_norm_of_product(&sr, &ss)?.min(1.0))
}

/// `|| A B ||_1` for Hermitian PSD `A`, `B`, via the eigenvalues of `(AB)^dagger (AB)`.
pub(crate) fn trace_norm_of_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    let x = a * b;
    let gram = (&x.adjoint() * &x).hermitian_part();
    let eigs = eigenvalues_hermitian(&gram)?;
    Ok(eigs.iter().map(|&l| l.max(0.0).sqrt()).sum())
}

/// Umegaki relative entropy `tr rho (log rho - log sigma)`, `+inf` off-support.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(format!("{} vs {}", rho.dim(), sigma.dim())));
    }
    let neg_entropy = -von_neumann_entropy(rho)?;
    let spec = eig_hermitian(sigma.matrix())?;
    let mut cross = 0.0;
    for (k, &mu) in spec.eigenvalues.iter().enumerate() {
        let v = spec.column(k);
        // <v| rho |v>
        let weight: f64 = (0..v.len())
            .map(|i| {
                let row: C64 = (0..v.len()).map(|j| rho.matrix()[(i, j)] * v[j]).sum();
                (v[i].conj() * row).re
            })
            .sum();
        if mu <= TOL_SUPPORT {
            if weight > TOL_SUPPORT {
                return Ok(f64::INFINITY);
            }
            continue;
        }
        cross += weight * mu.ln();
    }
    Ok((neg_entropy - cross).max(0.0))
}

/// Kronecker product, `A` index major.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (da, db) = (a.dim(), b.dim());
    let mut out = ComplexMatrix::zeros(da * db);
    for i in 0..da {
        for j in 0..da {
            let aij = a[(i, j)];
            if aij == C64::default() {
                continue;
            }
            for k in 0..db {
                for l in 0..db {
                    out[(i * db + k, j * db + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Traces out every subsystem not listed in `keep`.
///
/// `dims` gives the subsystem dimensions, first subsystem most significant.
/// Keeping nothing returns the 1x1 matrix `[tr M]`.
pub fn partial_trace(m: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    let total: usize = dims.iter().product();
    if dims.is_empty() || dims.contains(&0) || total != m.dim() {
        return Err(Error::DimensionMismatch(format!(
            "subsystem dims {dims:?} do not multiply to {}",
            m.dim()
        )));
    }
    if let Some(&bad) = keep.iter().find(|&&k| k >= dims.len()) {
        return Err(Error::DimensionMismatch(format!("subsystem {bad} out of range")));
    }
    let kept: Vec<bool> = (0..dims.len()).map(|k| keep.contains(&k)).collect();
    let out_dim: usize = dims.iter().zip(&kept).filter(|(_, &k)| k).map(|(d, _)| d).product();

    // Split a flat index into (kept index, traced index).
    let split = |mut idx: usize| -> (usize, usize) {
        let (mut kidx, mut kmul, mut tidx, mut tmul) = (0, 1, 0, 1);
        for (d, &k) in dims.iter().zip(&kept).rev() {
            let digit = idx % d;
            idx /= d;
            if k {
                kidx += digit * kmul;
                kmul *= d;
            } else {
                tidx += digit * tmul;
                tmul *= d;
            }
        }
        (kidx, tidx)
    };
    let parts: Vec<(usize, usize)> = (0..total).map(split).collect();

    let mut out = ComplexMatrix::zeros(out_dim);
    for i in 0..total {
        let (ki, ti) = parts[i];
        for j in 0..total {
            let (kj, tj) = parts[j];
            if ti == tj {
                out[(ki, kj)] += m[(i, j)];
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::LN_2;

    fn pauli_x() -> ComplexMatrix {
        ComplexMatrix::from_vec(2, vec![c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]).unwrap()
    }

    fn random_hermitian(n: usize, seed: u64) -> ComplexMatrix {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let g = ComplexMatrix::from_fn(n, |_, _| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
        (&g + &g.adjoint()).scale(0.5)
    }

    #[test]
    fn eig_identity_and_diagonal() {
        let s = eig_hermitian(&ComplexMatrix::identity(2)).unwrap();
        assert_eq!(s.eigenvalues, vec![1.0, 1.0]);
        let s = eig_hermitian(&ComplexMatrix::from_real_diagonal(&[0.8, 0.2])).unwrap();
        assert_relative_eq!(s.eigenvalues[0], 0.2);
        assert_relative_eq!(s.eigenvalues[1], 0.8);
    }

    #[test]
    fn eig_pauli_x() {
        let s = eig_hermitian(&pauli_x()).unwrap();
        assert_relative_eq!(s.eigenvalues[0], -1.0, epsilon = 1e-14);
        assert_relative_eq!(s.eigenvalues[1], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn eig_reconstructs_random_hermitian() {
        for (n, seed) in [(3, 1), (8, 2), (17, 3), (64, 4)] {
            let m = random_hermitian(n, seed);
            let s = eig_hermitian(&m).unwrap();
            assert!(s.reconstruct().max_abs_diff(&m) < 1e-10, "n = {n}");
            let vv = &s.eigenvectors.adjoint() * &s.eigenvectors;
            assert!(vv.max_abs_diff(&ComplexMatrix::identity(n)) < TOL_EIG);
            assert!(s.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
            // M v_k = lambda_k v_k
            for k in 0..n {
                let v = s.column(k);
                for i in 0..n {
                    let mv: C64 = (0..n).map(|j| m[(i, j)] * v[j]).sum();
                    assert!((mv - v[i] * s.eigenvalues[k]).norm() < TOL_EIG);
                }
            }
        }
    }

    #[test]
    fn tridiagonal_ql_matches_jacobi() {
        for (n, seed) in [(1, 5), (2, 6), (5, 7), (33, 8), (70, 9)] {
            let m = random_hermitian(n, seed);
            let ql = eigenvalues_tridiagonal_ql(&m).unwrap();
            let jac = eig_hermitian(&m).unwrap().eigenvalues;
            for (a, b) in ql.iter().zip(&jac) {
                assert!((a - b).abs() < 1e-11, "n={n}: {a} vs {b}");
            }
        }
        // rank-deficient with a repeated eigenvalue
        let v: Vec<C64> = (0..40).map(|i| c((i as f64).sin(), (i as f64 * 0.3).cos())).collect();
        let w: Vec<C64> = (0..40).map(|i| c((i as f64 * 1.7).cos(), 0.1 * i as f64)).collect();
        let m = &ComplexMatrix::outer(&v) + &ComplexMatrix::outer(&w);
        let ql = eigenvalues_tridiagonal_ql(&m).unwrap();
        let jac = eig_hermitian(&m).unwrap().eigenvalues;
        for (a, b) in ql.iter().zip(&jac) {
            assert!((a - b).abs() < 1e-10 * m.max_abs().max(1.0) * 40.0);
        }
        assert!(ql[..38].iter().all(|x| x.abs() < 1e-9));
        let shift = ComplexMatrix::identity(48).scale(0.25);
        assert!(eigenvalues_tridiagonal_ql(&shift).unwrap().iter().all(|x| (x - 0.25).abs() < 1e-15));
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let m = ComplexMatrix::from_vec(2, vec![c(0., 0.), c(1., 0.), c(0., 0.), c(0., 0.)]).unwrap();
        assert!(matches!(eig_hermitian(&m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn entropy_examples() {
        let mixed = DensityMatrix::maximally_mixed(2);
        assert_relative_eq!(von_neumann_entropy(&mixed).unwrap(), LN_2, epsilon = 1e-15);
        let pure = DensityMatrix::pure(&[c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        assert!(von_neumann_entropy(&pure).unwrap().abs() < 1e-12);
        let d = DensityMatrix::diagonal(&[0.25, 0.75]).unwrap();
        let expected = -0.25 * 0.25f64.ln() - 0.75 * 0.75f64.ln();
        assert_relative_eq!(von_neumann_entropy(&d).unwrap(), expected, epsilon = 1e-15);
    }

    #[test]
    fn density_matrix_validation() {
        assert!(DensityMatrix::diagonal(&[0.5, 0.6]).is_err());
        assert!(DensityMatrix::diagonal(&[1.5, -0.5]).is_err());
        assert!(DensityMatrix::new(pauli_x()).is_err());
        // tiny negative eigenvalue inside tolerance is accepted
        assert!(DensityMatrix::diagonal(&[1.0 + 1e-11, -1e-11]).is_ok());
    }

    #[test]
    fn sqrt_examples() {
        let id = DensityMatrix::maximally_mixed(3);
        let s = matrix_sqrt(&id).unwrap();
        assert!(s.max_abs_diff(&ComplexMatrix::identity(3).scale(1.0 / 3f64.sqrt())) < 1e-15);

        let d = DensityMatrix::diagonal(&[4.0 / 13.0, 9.0 / 13.0]).unwrap();
        let s = matrix_sqrt(&d).unwrap();
        let expected = ComplexMatrix::from_real_diagonal(&[2.0 / 13f64.sqrt(), 3.0 / 13f64.sqrt()]);
        assert!(s.max_abs_diff(&expected) < 1e-15);

        let rho = DensityMatrix::new(
            ComplexMatrix::from_vec(2, vec![c(0.7, 0.), c(0.1, 0.2), c(0.1, -0.2), c(0.3, 0.)]).unwrap(),
        )
        .unwrap();
        let s = matrix_sqrt(&rho).unwrap();
        assert!((&s * &s).max_abs_diff(rho.matrix()) < TOL_EIG);
    }

    #[test]
    fn fidelity_examples() {
        let zero = DensityMatrix::pure(&[c(1., 0.), c(0., 0.)]).unwrap();
        let one = DensityMatrix::pure(&[c(0., 0.), c(1., 0.)]).unwrap();
        let plus = DensityMatrix::pure(&[c(1., 0.), c(1., 0.)]).unwrap();
        assert_relative_eq!(fidelity(&zero, &zero).unwrap(), 1.0, epsilon = 1e-12);
        assert!(fidelity(&zero, &one).unwrap().abs() < 1e-12);
        assert_relative_eq!(fidelity(&zero, &plus).unwrap(), 0.5f64.sqrt(), epsilon = 1e-12);
        let three = DensityMatrix::maximally_mixed(3);
        assert!(matches!(fidelity(&zero, &three), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn relative_entropy_examples() {
        let a = DensityMatrix::diagonal(&[0.5, 0.5]).unwrap();
        let b = DensityMatrix::diagonal(&[0.25, 0.75]).unwrap();
        assert!(relative_entropy(&a, &a).unwrap().abs() < 1e-14);
        let expected = 0.5 * (0.5f64 / 0.25).ln() + 0.5 * (0.5f64 / 0.75).ln();
        assert_relative_eq!(relative_entropy(&a, &b).unwrap(), expected, epsilon = 1e-14);
        let zero = DensityMatrix::pure(&[c(1., 0.), c(0., 0.)]).unwrap();
        let one = DensityMatrix::pure(&[c(0., 0.), c(1., 0.)]).unwrap();
        assert_eq!(relative_entropy(&zero, &one).unwrap(), f64::INFINITY);
    }

    #[test]
    fn tensor_examples() {
        let i4 = tensor(&ComplexMatrix::identity(2), &ComplexMatrix::identity(2));
        assert_eq!(i4, ComplexMatrix::identity(4));
        let t = tensor(
            &ComplexMatrix::from_real_diagonal(&[2.0, 3.0]),
            &ComplexMatrix::from_real_diagonal(&[5.0, 7.0]),
        );
        assert_eq!(t, ComplexMatrix::from_real_diagonal(&[10.0, 14.0, 15.0, 21.0]));
        let a = random_hermitian(3, 9);
        let b = random_hermitian(4, 10);
        let lhs = tensor(&a, &b).trace();
        assert!((lhs - a.trace() * b.trace()).norm() < 1e-12);
    }

    #[test]
    fn partial_trace_examples() {
        let rho = DensityMatrix::diagonal(&[0.3, 0.7]).unwrap();
        let sigma = DensityMatrix::maximally_mixed(3);
        let joint = tensor(rho.matrix(), sigma.matrix());
        let kept = partial_trace(&joint, &[2, 3], &[0]).unwrap();
        assert!(kept.max_abs_diff(rho.matrix()) < 1e-15);
        let kept = partial_trace(&joint, &[2, 3], &[1]).unwrap();
        assert!(kept.max_abs_diff(sigma.matrix()) < 1e-15);
        let none = partial_trace(&joint, &[2, 3], &[]).unwrap();
        assert_eq!(none.dim(), 1);
        assert!((none[(0, 0)] - c(1.0, 0.0)).norm() < 1e-15);

        // Bell state (|00> + |11>)/sqrt2: each qubit is maximally mixed.
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = DensityMatrix::pure(&[c(s, 0.), c(0., 0.), c(0., 0.), c(s, 0.)]).unwrap();
        let red = partial_trace(bell.matrix(), &[2, 2], &[1]).unwrap();
        assert!(red.max_abs_diff(&ComplexMatrix::identity(2).scale(0.5)) < 1e-15);

        assert!(matches!(partial_trace(&joint, &[2, 2], &[0]), Err(Error::DimensionMismatch(_))));
    }
}
