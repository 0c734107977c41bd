use crate::error::{Result, RpcaError};
use crate::matrix::DenseMatrix;
use crate::numkernel::svd_truncated;

/// Relative low-rank error at or below which a recovery counts as a success.
pub const RECOVERY_TOLERANCE: f64 = 1e-4;

/// `‖D − L − S‖_F / ‖D‖_F`.
pub fn relative_error(d: &DenseMatrix, l: &DenseMatrix, s: &DenseMatrix) -> Result<f64> {
    let d_fro = d.fro_norm();
    if d_fro == 0.0 {
        return Err(RpcaError::ZeroMatrix("D"));
    }
    Ok(d.try_sub(l)?.try_sub(s)?.fro_norm() / d_fro)
}

/// `‖L_est − L‖_F / ‖L‖_F`.
pub fn low_rank_error(l_true: &DenseMatrix, l_est: &DenseMatrix) -> Result<f64> {
    let norm = l_true.fro_norm();
    if norm == 0.0 {
        return Err(RpcaError::ZeroMatrix("L_true"));
    }
    Ok(l_est.try_sub(l_true)?.fro_norm() / norm)
}

/// Whether `l_est` is within [`RECOVERY_TOLERANCE`] of `l_true` in relative
/// Frobenius norm.
pub fn recovery_success(l_true: &DenseMatrix, l_est: &DenseMatrix) -> Result<bool> {
    Ok(low_rank_error(l_true, l_est)? <= RECOVERY_TOLERANCE)
}

/// Incoherence of the rank-`r` part of `l`:
/// `max((m/r) maxᵢ‖eᵢᵀU‖², (n/r) maxⱼ‖eⱼᵀV‖²)`.
pub fn incoherence_of(l: &DenseMatrix, r: usize) -> Result<f64> {
    let svd = svd_truncated(l, r)?;
    if svd.sigma[0] == 0.0 {
        return Err(RpcaError::ZeroMatrix("L"));
    }
    let (m, n) = l.shape();
    let peak = |f: &DenseMatrix| f.row_norms().into_iter().fold(0.0_f64, |a, x| a.max(x * x));
    let mu_rows = m as f64 / r as f64 * peak(&svd.u);
    let mu_cols = n as f64 / r as f64 * peak(&svd.v);
    Ok(mu_rows.max(mu_cols))
}

/// Smallest `α` for which `s` is `α`-sparse: the largest nonzero fraction
/// over its rows (out of `n`) and columns (out of `m`).
pub fn sparsity_of(s: &DenseMatrix) -> f64 {
    let (m, n) = s.shape();
    let mut col_counts = vec![0usize; n];
    let mut worst_row = 0usize;
    for i in 0..m {
        let mut count = 0;
        for (j, &x) in s.row(i).iter().enumerate() {
            if x != 0.0 {
                count += 1;
                col_counts[j] += 1;
            }
        }
        worst_row = worst_row.max(count);
    }
    let worst_col = col_counts.into_iter().max().unwrap_or(0);
    (worst_row as f64 / n as f64).max(worst_col as f64 / m as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relative_error_cases() {
        let d = DenseMatrix::from_diag(&[3.0, 4.0]);
        let z = DenseMatrix::zeros(2, 2);
        assert_eq!(relative_error(&d, &d, &z).unwrap(), 0.0);
        let eye = DenseMatrix::identity(2);
        assert_eq!(relative_error(&eye, &z, &z).unwrap(), 1.0);
        let l = DenseMatrix::from_diag(&[3.0, 0.0]);
        assert!((relative_error(&d, &l, &z).unwrap() - 0.8).abs() < 1e-15);
        assert!(matches!(
            relative_error(&z, &z, &z),
            Err(RpcaError::ZeroMatrix(_))
        ));
    }

    #[test]
    fn recovery_cases() {
        let l = DenseMatrix::from_fn(4, 3, |i, j| (i + 2 * j) as f64 + 1.0);
        assert!(recovery_success(&l, &l).unwrap());
        assert!(!recovery_success(&l, &l.scale(1.001)).unwrap());
        // E = 5e-5 ‖L‖_F on a single entry
        let mut e = DenseMatrix::zeros(4, 3);
        e[(2, 1)] = 5e-5 * l.fro_norm();
        assert!(recovery_success(&l, &l.add(&e)).unwrap());
        assert!(recovery_success(&DenseMatrix::zeros(4, 3), &l).is_err());
    }

    #[test]
    fn incoherence_cases() {
        let mut spike = DenseMatrix::zeros(4, 4);
        spike[(0, 0)] = 1.0;
        assert!((incoherence_of(&spike, 1).unwrap() - 4.0).abs() < 1e-12);
        let ones = DenseMatrix::from_fn(5, 5, |_, _| 1.0);
        assert!((incoherence_of(&ones, 1).unwrap() - 1.0).abs() < 1e-12);
        assert!(incoherence_of(&DenseMatrix::zeros(3, 3), 1).is_err());
    }

    #[test]
    fn sparsity_counts_rows_and_columns() {
        let mut s = DenseMatrix::zeros(4, 5);
        s[(0, 0)] = 1.0;
        s[(0, 3)] = -2.0;
        s[(2, 3)] = 1.0;
        s[(3, 3)] = 1.0;
        // row 0 holds 2 of 5, column 3 holds 3 of 4
        assert_eq!(sparsity_of(&s), 0.75);
    }
}
