use std::f64::consts::LN_2;

use cq_combine::bounds::{gc, mgl_fg, qmgl_lower_asym, qmgl_lower_iid};
use cq_combine::channels::{
    bec_embed, bsc_embed, random_cq_channel_from, random_density_matrix, sample_rng, CqChannel,
};
use cq_combine::combine::{boxast, varoast};
use cq_combine::duality::{dual_channel, dual_channel_with_purification, random_unitary};
use cq_combine::linalg::{
    eig_hermitian, fidelity, relative_entropy, tensor, von_neumann_entropy, ComplexMatrix, DensityMatrix, C64,
};
use cq_combine::polar::{polarization_stats, polarize_classical_levels, polarize_exact, ClassicalKind, DimensionBudget};
use cq_combine::{channel_entropy, PriorMode};
use proptest::prelude::*;
use rand::Rng;

fn h2(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        0.0
    } else {
        -p * p.ln() - (1.0 - p) * (1.0 - p).ln()
    }
}

fn conj(p: f64, q: f64) -> f64 {
    p * (1.0 - q) + q * (1.0 - p)
}

fn random_hermitian(seed: u64, n: usize) -> ComplexMatrix {
    let mut rng = sample_rng(seed, 0);
    let g = ComplexMatrix::from_fn(n, |_, _| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
    (&g + &g.adjoint()).scale(0.5)
}

fn state(seed: u64, stream: u64, d: usize) -> DensityMatrix {
    random_density_matrix(&mut sample_rng(seed, stream), d, d).unwrap()
}

fn channel(seed: u64, stream: u64, d: usize) -> CqChannel {
    random_cq_channel_from(&mut sample_rng(seed, stream), d, PriorMode::Half).unwrap()
}

fn conjugate(u: &ComplexMatrix, rho: &DensityMatrix) -> DensityMatrix {
    DensityMatrix::new((&(u * rho.matrix()) * &u.adjoint()).hermitian_part()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eigendecomposition_reconstructs(seed in any::<u64>(), n in 1usize..=64) {
        let m = random_hermitian(seed, n);
        let s = eig_hermitian(&m).unwrap();
        prop_assert!(s.reconstruct().max_abs_diff(&m) <= 1e-10);
    }

    #[test]
    fn entropy_is_unitarily_invariant(seed in any::<u64>(), d in 1usize..=6) {
        let rho = state(seed, 0, d);
        let u = random_unitary(&mut sample_rng(seed, 1), d);
        let a = von_neumann_entropy(&rho).unwrap();
        let b = von_neumann_entropy(&conjugate(&u, &rho)).unwrap();
        prop_assert!((a - b).abs() <= 1e-9);
    }

    #[test]
    fn fidelity_is_multiplicative(seed in any::<u64>(), d1 in 1usize..=3, d2 in 1usize..=3) {
        let (r1, s1, r2, s2) = (state(seed, 0, d1), state(seed, 1, d1), state(seed, 2, d2), state(seed, 3, d2));
        let joint = |a: &DensityMatrix, b: &DensityMatrix| DensityMatrix::new(tensor(a.matrix(), b.matrix())).unwrap();
        let lhs = fidelity(&joint(&r1, &r2), &joint(&s1, &s2)).unwrap();
        let rhs = fidelity(&r1, &s1).unwrap() * fidelity(&r2, &s2).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-8);
    }

    #[test]
    fn relative_entropy_is_nonnegative(seed in any::<u64>(), d in 1usize..=5) {
        let (rho, sigma) = (state(seed, 0, d), state(seed, 1, d));
        prop_assert!(relative_entropy(&rho, &sigma).unwrap() >= -1e-10);
        prop_assert!(relative_entropy(&rho, &rho).unwrap().abs() <= 1e-9);
    }

    #[test]
    fn channel_entropy_range_and_invariance(seed in any::<u64>(), d in 2usize..=5, p in 0.0f64..=1.0) {
        let w = channel(seed, 0, d).with_prior(p).unwrap();
        let h = channel_entropy(&w).unwrap();
        prop_assert!((0.0..=LN_2).contains(&h));
        let u = random_unitary(&mut sample_rng(seed, 1), d);
        let rotated = CqChannel::new(p, conjugate(&u, &w.sigma0()), conjugate(&u, &w.sigma1())).unwrap();
        prop_assert!((channel_entropy(&rotated).unwrap() - h).abs() <= 1e-9);
        let rho = state(seed, 2, d);
        let useless = CqChannel::new(p, rho.clone(), rho).unwrap();
        prop_assert!((channel_entropy(&useless).unwrap() - h2(p)).abs() <= 1e-9);
    }

    #[test]
    fn embeddings_match_classical_formulas(p in 0.0f64..=1.0, q in 0.0f64..=1.0) {
        let (a, b) = (bsc_embed(p).unwrap(), bsc_embed(q).unwrap());
        prop_assert!((channel_entropy(&a).unwrap() - h2(p)).abs() <= 1e-9);
        prop_assert!((channel_entropy(&bec_embed(p).unwrap()).unwrap() - p * LN_2).abs() <= 1e-9);
        let minus = channel_entropy(&boxast(&a, &b).unwrap()).unwrap();
        let plus = channel_entropy(&varoast(&a, &b).unwrap()).unwrap();
        prop_assert!((minus - h2(conj(p, q))).abs() <= 1e-9);
        prop_assert!((plus - (h2(p) + h2(q) - h2(conj(p, q)))).abs() <= 1e-9);
        let (e1, e2) = (bec_embed(p).unwrap(), bec_embed(q).unwrap());
        let minus = channel_entropy(&boxast(&e1, &e2).unwrap()).unwrap();
        prop_assert!((minus - (p + q - p * q) * LN_2).abs() <= 1e-9);
    }

    #[test]
    fn combining_orders_entropies(seed in any::<u64>(), d1 in 2usize..=4, d2 in 2usize..=4) {
        let (w1, w2) = (channel(seed, 0, d1), channel(seed, 1, d2));
        let (a, b) = (channel_entropy(&w1).unwrap(), channel_entropy(&w2).unwrap());
        let minus = channel_entropy(&boxast(&w1, &w2).unwrap()).unwrap();
        let plus = channel_entropy(&varoast(&w1, &w2).unwrap()).unwrap();
        prop_assert!(minus >= a.max(b) - 1e-10);
        prop_assert!(plus <= a.min(b) + 1e-10);
        prop_assert!((minus + plus - a - b).abs() <= 1e-8);
        let swapped = channel_entropy(&boxast(&w2, &w1).unwrap()).unwrap();
        prop_assert!((swapped - minus).abs() <= 1e-9);
    }

    #[test]
    fn dual_entropy_identities(seed in any::<u64>(), d in 2usize..=4) {
        let w = channel(seed, 0, d);
        let h = channel_entropy(&w).unwrap();
        let dual = dual_channel(&w).unwrap();
        let hd = channel_entropy(&dual).unwrap();
        prop_assert!((hd - (LN_2 - h)).abs() <= 1e-9);
        prop_assert!((channel_entropy(&dual_channel(&dual).unwrap()).unwrap() - h).abs() <= 1e-8);
        let v = random_unitary(&mut sample_rng(seed, 1), d);
        let literal = dual_channel_with_purification(&w, &v).unwrap();
        prop_assert!((channel_entropy(&literal).unwrap() - hd).abs() <= 1e-9);
    }

    #[test]
    fn proven_bounds_dominate(seed in any::<u64>(), d in 2usize..=4) {
        let (w1, w2) = (channel(seed, 0, d), channel(seed, 1, d));
        let (a, b) = (channel_entropy(&w1).unwrap(), channel_entropy(&w2).unwrap());
        let exact = channel_entropy(&boxast(&w1, &w2).unwrap()).unwrap();
        prop_assert!(exact >= qmgl_lower_asym(a, b).unwrap() - 1e-8);
        let same = channel_entropy(&boxast(&w1, &w1).unwrap()).unwrap();
        prop_assert!(same >= qmgl_lower_iid(a).unwrap() - 1e-8);
    }

    #[test]
    fn iid_bound_excess_is_mirror_symmetric(x in 0.0f64..=1.0) {
        let h = x * LN_2;
        let excess = |h: f64| qmgl_lower_iid(h).unwrap() - h;
        prop_assert!((excess(h) - excess(LN_2 - h)).abs() <= 1e-10);
    }

    #[test]
    fn polarization_gap_lemma(seed in any::<u64>()) {
        let w = channel(seed, 0, 2);
        let i = LN_2 - channel_entropy(&w).unwrap();
        let v = polarize_exact(&w, 1, DimensionBudget::default()).unwrap();
        prop_assert!(v[1] - v[0] >= -1e-10);
        if i > 1e-6 && i < LN_2 - 1e-6 {
            prop_assert!(v[1] - v[0] > 0.0);
        }
        prop_assert!(((v[0] + v[1]) / 2.0 - i).abs() <= 1e-8);
    }

    #[test]
    fn classical_recursions_conserve_mean(eps in 0.01f64..0.99, n in 1usize..=8) {
        for (kind, tol) in [(ClassicalKind::Bec, 1e-12), (ClassicalKind::Bsc, 1e-6)] {
            let levels = polarize_classical_levels(kind, eps, n).unwrap();
            let mu0 = levels[0][0];
            let (a, b) = (0.05 * LN_2, 0.95 * LN_2);
            let mut nu = 0.0;
            for v in &levels {
                let s = polarization_stats(v, a, b).unwrap();
                prop_assert!((s.mu - mu0).abs() <= tol);
                prop_assert!(s.nu >= nu - 1e-12);
                nu = s.nu;
            }
        }
    }
}

#[test]
fn classical_mrs_gerber_is_convex() {
    let n = 200;
    let step = LN_2 / (n - 1) as f64;
    for k in 0..20 {
        let h2v = LN_2 * k as f64 / 19.0;
        let f: Vec<f64> = (0..n).map(|i| gc(i as f64 * step, h2v).unwrap()).collect();
        for w in f.windows(3) {
            assert!(w[0] - 2.0 * w[1] + w[2] >= -1e-12, "H2 = {h2v}");
        }
    }
}

#[test]
fn mgl_is_monotone() {
    let n = 200;
    let x = |i: usize| i as f64 / (n - 1) as f64;
    for i in 0..n {
        for j in 0..n {
            let here = mgl_fg(x(i), x(j)).unwrap();
            if i + 1 < n {
                assert!(mgl_fg(x(i + 1), x(j)).unwrap() <= here + 1e-15);
            }
            if j + 1 < n {
                assert!(mgl_fg(x(i), x(j + 1)).unwrap() >= here - 1e-15);
            }
        }
    }
}
