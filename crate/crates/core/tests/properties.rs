mod common;

use accaltproj::eval::{incoherence_of, relative_error, sparsity_of};
use accaltproj::io::{decode_bin, encode_bin, format_csv, parse_csv};
use accaltproj::numkernel::{spectral_norm, svd_small, svd_truncated, thin_qr};
use accaltproj::rpca::{
    hard_threshold, structured_truncate, tangent_complement_project, tangent_project, trim,
    trim_rows, FactoredLowRank,
};
use accaltproj::DenseMatrix;
use common::{gaussian, random_factored, rel_diff, rng, symmetric};
use proptest::prelude::*;
use rand::Rng;

fn orthonormality_defect(q: &DenseMatrix) -> f64 {
    q.t_matmul(q)
        .sub(&DenseMatrix::identity(q.cols()))
        .max_abs()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn qr_reconstructs(n in 1usize..20, extra in 0usize..20, seed: u64) {
        let a = gaussian(n + extra, n, &mut rng(seed));
        let qr = thin_qr(&a).unwrap();
        prop_assert!(rel_diff(&qr.q.matmul(&qr.r), &a) < 1e-12);
        prop_assert!(orthonormality_defect(&qr.q) < 1e-12);
        for i in 0..n {
            prop_assert!(qr.r[(i, i)] >= 0.0);
            for j in 0..i {
                prop_assert_eq!(qr.r[(i, j)], 0.0);
            }
        }
    }

    #[test]
    fn svd_reconstructs(m in 1usize..40, n in 1usize..40, seed: u64) {
        let a = gaussian(m, n, &mut rng(seed));
        let svd = svd_small(&a).unwrap();
        prop_assert!(rel_diff(&svd.reconstruct(), &a) < 1e-12);
        prop_assert!(orthonormality_defect(&svd.u) < 1e-12);
        prop_assert!(orthonormality_defect(&svd.v) < 1e-12);
        prop_assert!(svd.sigma.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(svd.sigma.iter().all(|&s| s >= 0.0));
    }

    #[test]
    fn truncation_residual_is_the_tail(m in 2usize..60, n in 2usize..60, r in 1usize..8, seed: u64) {
        let r = r.min(m.min(n));
        let a = gaussian(m, n, &mut rng(seed));
        let full = svd_small(&a).unwrap();
        let tail = full.sigma[r..].iter().map(|s| s * s).sum::<f64>().sqrt();
        let residual = a.sub(&svd_truncated(&a, r).unwrap().reconstruct()).fro_norm();
        prop_assert!((residual - tail).abs() <= 1e-10 * a.fro_norm());
        prop_assert!((spectral_norm(&a).unwrap() - full.sigma[0]).abs() <= 1e-10 * full.sigma[0]);
    }

    #[test]
    fn weyl_perturbation_bound(n in 1usize..30, scale in 1e-3f64..10.0, seed: u64) {
        let mut g = rng(seed);
        let b = symmetric(n, &mut g);
        let c = symmetric(n, &mut g).scale(scale);
        let before = svd_small(&b).unwrap().sigma;
        let after = svd_small(&b.add(&c)).unwrap().sigma;
        let bound = spectral_norm(&c).unwrap();
        for (x, y) in after.iter().zip(&before) {
            prop_assert!((x - y).abs() <= bound * (1.0 + 1e-12) + 1e-12);
        }
    }

    #[test]
    fn tangent_projectors_split_identity(m in 2usize..40, n in 2usize..40, r in 1usize..6, seed: u64) {
        let r = r.min(m.min(n));
        let mut g = rng(seed);
        let basis = random_factored(m, n, r, &mut g);
        let z = gaussian(m, n, &mut g);
        let p = tangent_project(&basis, &z).unwrap();
        let q = tangent_complement_project(&basis, &z).unwrap();
        prop_assert!(rel_diff(&p.add(&q), &z) < 1e-12);
        prop_assert!(rel_diff(&tangent_project(&basis, &p).unwrap(), &p) < 1e-12);
    }

    #[test]
    fn symmetric_projection_norm_bound(n in 2usize..30, r in 1usize..6, seed: u64) {
        let r = r.min(n - 1);
        let mut g = rng(seed);
        let u = thin_qr(&gaussian(n, r, &mut g)).unwrap().q;
        let basis = FactoredLowRank::new(u.clone(), vec![1.0; r], u).unwrap();
        let z = symmetric(n, &mut g);
        let ratio = spectral_norm(&tangent_project(&basis, &z).unwrap()).unwrap() / spectral_norm(&z).unwrap();
        prop_assert!(ratio <= (4.0f64 / 3.0).sqrt() + 1e-10);
    }

    #[test]
    fn structured_truncation_matches_dense(m in 2usize..40, n in 2usize..40, r in 1usize..6, seed: u64) {
        let r = r.min(m.min(n));
        let mut g = rng(seed);
        let basis = random_factored(m, n, r, &mut g);
        let w = gaussian(m, n, &mut g);
        let (fast, window) = structured_truncate(&basis, &w, r).unwrap();
        let dense = svd_small(&tangent_project(&basis, &w).unwrap()).unwrap();
        prop_assert!(rel_diff(&fast.to_dense(), &dense.clone().truncate(r).reconstruct()) < 1e-10);
        prop_assert_eq!(window.len(), 2 * r);
        for (i, s) in dense.sigma.iter().enumerate() {
            let expected = window.get(i).copied().unwrap_or(0.0);
            prop_assert!((s - expected).abs() <= 1e-10 * dense.sigma[0]);
        }
        // numerical rank of the projection is at most 2r
        prop_assert!(dense.sigma.iter().skip(2 * r).all(|&s| s <= 1e-10 * dense.sigma[0]));
    }

    #[test]
    fn sparse_spectral_bound(n in 2usize..50, fill in 0.0f64..0.5, seed: u64) {
        let mut g = rng(seed);
        let mut s = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                if g.random::<f64>() < fill {
                    let v = g.random_range(-5.0..5.0);
                    s[(i, j)] = v;
                    s[(j, i)] = v;
                }
            }
        }
        prop_assume!(s.count_nonzero() > 0);
        let alpha = sparsity_of(&s);
        prop_assert!(spectral_norm(&s).unwrap() <= alpha * n as f64 * s.max_abs() * (1.0 + 1e-12));
    }

    #[test]
    fn threshold_support_shrinks(seed: u64, a in 0.0f64..3.0, b in 0.0f64..3.0) {
        let z = gaussian(12, 9, &mut rng(seed));
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let small = hard_threshold(&z, lo);
        let large = hard_threshold(&z, hi);
        for i in 0..12 {
            for j in 0..9 {
                if large[(i, j)] != 0.0 {
                    prop_assert!(small[(i, j)] != 0.0);
                }
                if small[(i, j)] != 0.0 {
                    prop_assert_eq!(small[(i, j)], z[(i, j)]);
                    prop_assert!(z[(i, j)].abs() > lo);
                }
            }
        }
    }

    #[test]
    fn trim_budgets_and_idempotence(m in 4usize..30, n in 4usize..30, r in 1usize..4, spike in 1.0f64..50.0, mu in 1.0f64..3.0, seed: u64) {
        let r = r.min(m.min(n) / 2);
        let mut g = rng(seed);
        // a coherent matrix: one heavy row on top of a random low-rank part
        let mut l = random_factored(m, n, r, &mut g).to_dense();
        for j in 0..n {
            l[(0, j)] *= spike;
        }
        let factored: FactoredLowRank = svd_truncated(&l, r).unwrap().into();
        let t = trim_rows(&factored, mu);
        prop_assert!(t.a.row_norms().iter().all(|&x| x <= t.budget_rows));
        prop_assert!(t.b.row_norms().iter().all(|&x| x <= t.budget_cols));
        let once = trim(&factored, mu).unwrap();
        prop_assert!(once.orthonormality_defect() < 1e-12);
        if !trim_rows(&once, mu).changed {
            prop_assert!(rel_diff(&trim(&once, mu).unwrap().to_dense(), &once.to_dense()) < 1e-10);
        }
    }

    #[test]
    fn relative_error_is_scale_invariant(seed: u64, t in prop_oneof![-100.0f64..-0.01, 0.01f64..100.0]) {
        let mut g = rng(seed);
        let (d, l, s) = (gaussian(7, 5, &mut g), gaussian(7, 5, &mut g), gaussian(7, 5, &mut g));
        let base = relative_error(&d, &l, &s).unwrap();
        let scaled = relative_error(&d.scale(t), &l.scale(t), &s.scale(t)).unwrap();
        prop_assert!((base - scaled).abs() <= 1e-12 * base);
    }

    #[test]
    fn incoherence_in_admissible_range(m in 2usize..30, n in 2usize..30, r in 1usize..5, seed: u64) {
        let r = r.min(m.min(n));
        let square = random_factored(n, n, r, &mut rng(seed)).to_dense();
        let mu = incoherence_of(&square, r).unwrap();
        prop_assert!(mu >= 1.0 - 1e-12 && mu <= n as f64 / r as f64 + 1e-12);
        // each side is bounded by its own dimension
        let rect = random_factored(m, n, r, &mut rng(seed)).to_dense();
        let mu = incoherence_of(&rect, r).unwrap();
        prop_assert!(mu >= 1.0 - 1e-12 && mu <= m.max(n) as f64 / r as f64 + 1e-12);
    }

    #[test]
    fn bin_roundtrip_is_bitwise(rows in 1usize..8, cols in 1usize..8, bits in prop::collection::vec(any::<u64>(), 64)) {
        let data: Vec<f64> = bits.iter().map(|&b| f64::from_bits(b)).map(|v| if v.is_finite() { v } else { 0.0 }).collect();
        let m = DenseMatrix::new(rows, cols, data[..rows * cols].to_vec()).unwrap();
        let back = decode_bin(&encode_bin(&m).unwrap()).unwrap();
        let same = back.as_slice().iter().zip(m.as_slice()).all(|(a, b)| a.to_bits() == b.to_bits());
        prop_assert!(same);
        prop_assert_eq!(back.shape(), m.shape());
    }

    #[test]
    fn csv_roundtrip_is_exact(rows in 1usize..8, cols in 1usize..8, vals in prop::collection::vec(prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO, 64)) {
        let m = DenseMatrix::new(rows, cols, vals[..rows * cols].to_vec()).unwrap();
        let back = parse_csv(&format_csv(&m).unwrap()).unwrap();
        prop_assert_eq!(back, m);
    }
}
