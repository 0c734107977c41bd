//! Projections onto the tangent space of the rank-`r` manifold and the
//! structured rank-`r` truncation of a projected residual.

use super::FactoredLowRank;
use crate::error::{Result, RpcaError};
use crate::matrix::DenseMatrix;
use crate::numkernel::{svd_small, thin_qr};

fn check_shape(basis: &FactoredLowRank, z: &DenseMatrix) -> Result<()> {
    if z.shape() != (basis.rows(), basis.cols()) {
        return Err(RpcaError::Dimension(format!(
            "tangent basis is {}x{} but the matrix is {}x{}",
            basis.rows(),
            basis.cols(),
            z.rows(),
            z.cols()
        )));
    }
    Ok(())
}

/// `UUᵀZ + ZVVᵀ − UUᵀZVVᵀ`, formed densely.
pub fn tangent_project(basis: &FactoredLowRank, z: &DenseMatrix) -> Result<DenseMatrix> {
    check_shape(basis, z)?;
    let (u, v) = (&basis.u, &basis.v);
    let ut_z = u.t_matmul(z); // r x n
    let z_v = z.matmul(v); // m x r
    let ut_z_v = ut_z.matmul(v); // r x r
    let left = u.matmul(&ut_z);
    let right = z_v.matmul_t(v);
    let both = u.matmul(&ut_z_v).matmul_t(v);
    Ok(left.add(&right).sub(&both))
}

/// `(I − UUᵀ) Z (I − VVᵀ)`.
pub fn tangent_complement_project(basis: &FactoredLowRank, z: &DenseMatrix) -> Result<DenseMatrix> {
    check_shape(basis, z)?;
    let (u, v) = (&basis.u, &basis.v);
    let row_part = z.sub(&u.matmul(&u.t_matmul(z)));
    Ok(row_part.sub(&row_part.matmul(v).matmul_t(v)))
}

/// `H_r` of the tangent projection of `w`, without forming the projection.
///
/// With `X₁ = (I − UUᵀ)WV = Q₁R₁` and `X₂ = (I − VVᵀ)WᵀU = Q₂R₂`,
///
/// ```text
/// P_T(W) = [U Q₁] [[UᵀWV, R₂ᵀ], [R₁, 0]] [V Q₂]ᵀ
/// ```
///
/// and both outer factors have orthonormal columns, so the SVD of the
/// `2r x 2r` middle block gives the SVD of `P_T(W)`. The second return value
/// holds all `2r` singular values of `P_T(W)` in descending order.
pub fn structured_truncate(
    basis: &FactoredLowRank,
    w: &DenseMatrix,
    r: usize,
) -> Result<(FactoredLowRank, Vec<f64>)> {
    check_shape(basis, w)?;
    let k = basis.rank();
    let (m, n) = w.shape();
    if r == 0 || r > k {
        return Err(RpcaError::RankOutOfRange {
            rank: r,
            rows: m,
            cols: n,
        });
    }
    if m < 2 * k || n < 2 * k {
        return dense_truncate(basis, w, r);
    }
    let (u, v) = (&basis.u, &basis.v);

    let w_v = w.matmul(v); // m x k
    let wt_u = w.t_matmul(u); // n x k
    let core = u.t_matmul(&w_v); // UᵀWV, k x k
    let x1 = w_v.sub(&u.matmul(&core));
    let x2 = wt_u.sub(&v.matmul_t(&core));
    let (q1, r1) = complement_qr(u, &x1)?;
    let (q2, r2) = complement_qr(v, &x2)?;

    let mut middle = DenseMatrix::zeros(2 * k, 2 * k);
    for i in 0..k {
        for j in 0..k {
            middle[(i, j)] = core[(i, j)];
            middle[(i, k + j)] = r2[(j, i)];
            middle[(k + i, j)] = r1[(i, j)];
        }
    }
    let svd = svd_small(&middle)?;
    let u_new = u.hstack(&q1).matmul(&svd.u.columns(0, r));
    let v_new = v.hstack(&q2).matmul(&svd.v.columns(0, r));
    let window = svd.sigma.clone();
    let low_rank = FactoredLowRank::new(u_new, svd.sigma[..r].to_vec(), v_new)?;
    Ok((low_rank, window))
}

/// Thin QR of `x`, whose columns are orthogonal to the orthonormal `basis`,
/// with `Q` guaranteed orthogonal to `basis` even when `x` is rank deficient.
/// Factoring `[basis x]` jointly makes the completion columns of `Q` inherit
/// that orthogonality.
fn complement_qr(basis: &DenseMatrix, x: &DenseMatrix) -> Result<(DenseMatrix, DenseMatrix)> {
    let k = basis.cols();
    let qr = thin_qr(&basis.hstack(x))?;
    let q = qr.q.columns(k, 2 * k);
    let r = DenseMatrix::from_fn(k, k, |i, j| qr.r[(k + i, k + j)]);
    Ok((q, r))
}

/// Fallback for matrices too small to host a `2r`-dimensional basis.
fn dense_truncate(
    basis: &FactoredLowRank,
    w: &DenseMatrix,
    r: usize,
) -> Result<(FactoredLowRank, Vec<f64>)> {
    let projected = tangent_project(basis, w)?;
    let svd = svd_small(&projected)?;
    let mut window = svd.sigma.clone();
    window.resize(2 * basis.rank(), 0.0);
    Ok((svd.truncate(r).into(), window))
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    use super::*;

    fn gaussian(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> DenseMatrix {
        DenseMatrix::from_fn(rows, cols, |_, _| StandardNormal.sample(rng))
    }

    fn random_basis(m: usize, n: usize, k: usize, seed: u64) -> FactoredLowRank {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = thin_qr(&gaussian(m, k, &mut rng)).unwrap().q;
        let v = thin_qr(&gaussian(n, k, &mut rng)).unwrap().q;
        FactoredLowRank::new(u, (0..k).map(|i| (k - i) as f64).collect(), v).unwrap()
    }

    fn close(a: &DenseMatrix, b: &DenseMatrix, tol: f64) -> bool {
        a.sub(b).fro_norm() <= tol * b.fro_norm().max(1.0)
    }

    #[test]
    fn tight_example() {
        let e1 = DenseMatrix::column_vector(&[1.0, 0.0]);
        let basis = FactoredLowRank::new(e1.clone(), vec![1.0], e1).unwrap();
        let s = 2f64.sqrt();
        let z = DenseMatrix::from_rows(&[[1.0, s], [s, -1.0]]);
        let p = tangent_project(&basis, &z).unwrap();
        assert!(close(
            &p,
            &DenseMatrix::from_rows(&[[1.0, s], [s, 0.0]]),
            1e-15
        ));
        let q = tangent_complement_project(&basis, &z).unwrap();
        assert!(close(
            &q,
            &DenseMatrix::from_rows(&[[0.0, 0.0], [0.0, -1.0]]),
            1e-15
        ));
    }

    #[test]
    fn full_basis_is_identity() {
        let basis = FactoredLowRank::new(
            DenseMatrix::identity(3),
            vec![1.0; 3],
            DenseMatrix::identity(3),
        )
        .unwrap();
        let z = DenseMatrix::from_fn(3, 3, |i, j| (i * 3 + j) as f64 - 4.0);
        assert!(close(&tangent_project(&basis, &z).unwrap(), &z, 1e-15));
    }

    #[test]
    fn projector_algebra() {
        let basis = random_basis(9, 7, 2, 11);
        let z = gaussian(9, 7, &mut ChaCha8Rng::seed_from_u64(12));
        let p = tangent_project(&basis, &z).unwrap();
        let q = tangent_complement_project(&basis, &z).unwrap();
        assert!(close(&p.add(&q), &z, 1e-14));
        assert!(close(&tangent_project(&basis, &p).unwrap(), &p, 1e-14));
        assert!(tangent_project(&basis, &q).unwrap().fro_norm() < 1e-13);
    }

    #[test]
    fn structured_matches_dense() {
        for (m, n, k, r) in [(12, 9, 3, 3), (12, 9, 3, 1), (20, 20, 4, 2), (5, 9, 3, 2)] {
            let basis = random_basis(m, n, k, (m * n + k) as u64);
            let w = gaussian(m, n, &mut ChaCha8Rng::seed_from_u64(r as u64));
            let (fast, window) = structured_truncate(&basis, &w, r).unwrap();
            let dense = svd_small(&tangent_project(&basis, &w).unwrap()).unwrap();
            assert!(close(
                &fast.to_dense(),
                &dense.clone().truncate(r).reconstruct(),
                1e-12
            ));
            assert_eq!(window.len(), 2 * k);
            for (a, b) in window.iter().zip(&dense.sigma) {
                assert!((a - b).abs() < 1e-12 * dense.sigma[0]);
            }
            assert!(fast.orthonormality_defect() < 1e-13);
        }
    }

    #[test]
    fn low_rank_point_is_fixed() {
        let basis = random_basis(15, 12, 3, 4);
        let l = basis.to_dense();
        let (out, window) = structured_truncate(&basis, &l, 3).unwrap();
        assert!(close(&out.to_dense(), &l, 1e-13));
        assert!((window[0] - 3.0).abs() < 1e-13 && (window[2] - 1.0).abs() < 1e-13);
        assert!(window[3..].iter().all(|s| s.abs() < 1e-13));
    }

    #[test]
    fn rejects_bad_rank_and_shape() {
        let basis = random_basis(10, 10, 2, 1);
        let w = DenseMatrix::zeros(10, 10);
        assert!(structured_truncate(&basis, &w, 3).is_err());
        assert!(structured_truncate(&basis, &w, 0).is_err());
        assert!(tangent_project(&basis, &DenseMatrix::zeros(10, 9)).is_err());
    }
}
