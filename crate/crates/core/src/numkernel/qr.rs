use crate::error::{Result, RpcaError};
use crate::matrix::DenseMatrix;

/// Thin QR factorization `A = QR` of an `n x r` matrix with `n >= r`.
#[derive(Debug, Clone)]
pub struct ThinQr {
    /// `n x r`, orthonormal columns.
    pub q: DenseMatrix,
    /// `r x r`, upper triangular with a non-negative diagonal.
    pub r: DenseMatrix,
}

/// Householder thin QR.
///
/// Columns whose sub-diagonal part is already zero are not reflected, so
/// inputs with orthonormal canonical columns come back unchanged. The
/// diagonal of `R` is made non-negative. Rank-deficient input is accepted;
/// `R` is then singular but `QR = A` and `QᵀQ = I` still hold.
pub fn thin_qr(a: &DenseMatrix) -> Result<ThinQr> {
    let (n, r) = a.shape();
    if r == 0 || n < r {
        return Err(RpcaError::Dimension(format!(
            "thin QR needs rows >= cols >= 1, got {n}x{r}"
        )));
    }

    // Column-major working copy so reflections touch contiguous memory.
    let mut cols: Vec<Vec<f64>> = (0..r).map(|j| a.column(j)).collect();
    let mut reflectors: Vec<Option<(Vec<f64>, f64)>> = Vec::with_capacity(r);

    for k in 0..r {
        let x = &cols[k][k..];
        let tail: f64 = x[1..].iter().map(|v| v * v).sum();
        if tail == 0.0 {
            reflectors.push(None);
            continue;
        }
        let norm = (x[0] * x[0] + tail).sqrt();
        let alpha = if x[0] >= 0.0 { -norm } else { norm };
        let mut v = x.to_vec();
        v[0] -= alpha;
        let beta = 2.0 / (v[0] * v[0] + tail);

        cols[k][k] = alpha;
        cols[k][k + 1..].iter_mut().for_each(|e| *e = 0.0);
        for col in cols.iter_mut().skip(k + 1) {
            apply_reflector(&v, beta, &mut col[k..]);
        }
        reflectors.push(Some((v, beta)));
    }

    let mut r_mat = DenseMatrix::zeros(r, r);
    for (j, col) in cols.iter().enumerate() {
        for i in 0..=j {
            r_mat[(i, j)] = col[i];
        }
    }

    // Q = H_0 H_1 ... H_{r-1} applied to the first r columns of I.
    let mut q_cols: Vec<Vec<f64>> = (0..r)
        .map(|j| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            e
        })
        .collect();
    for (k, refl) in reflectors.iter().enumerate().rev() {
        if let Some((v, beta)) = refl {
            for col in q_cols.iter_mut() {
                apply_reflector(v, *beta, &mut col[k..]);
            }
        }
    }

    for (k, q_col) in q_cols.iter_mut().enumerate() {
        if r_mat[(k, k)] < 0.0 {
            q_col.iter_mut().for_each(|e| *e = -*e);
            r_mat.row_mut(k).iter_mut().for_each(|e| *e = -*e);
        }
    }

    let q = DenseMatrix::from_fn(n, r, |i, j| q_cols[j][i]);
    Ok(ThinQr { q, r: r_mat })
}

#[inline]
fn apply_reflector(v: &[f64], beta: f64, x: &mut [f64]) {
    let s = beta * v.iter().zip(x.iter()).map(|(a, b)| a * b).sum::<f64>();
    if s != 0.0 {
        x.iter_mut().zip(v).for_each(|(xi, vi)| *xi -= s * vi);
    }
}
