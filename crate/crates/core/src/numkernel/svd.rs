//! Dense SVD by Householder bidiagonalization followed by implicit-shift QR
//! on the bidiagonal (Golub–Kahan–Reinsch).

use crate::error::{Result, RpcaError};
use crate::matrix::DenseMatrix;

/// Thin singular value decomposition `A ≈ U diag(sigma) Vᵀ`.
#[derive(Debug, Clone)]
pub struct SvdResult {
    /// `rows x k`, orthonormal columns.
    pub u: DenseMatrix,
    /// Descending, non-negative.
    pub sigma: Vec<f64>,
    /// `cols x k`, orthonormal columns.
    pub v: DenseMatrix,
}

impl SvdResult {
    pub fn rank(&self) -> usize {
        self.sigma.len()
    }

    /// `U diag(sigma) Vᵀ`.
    pub fn reconstruct(&self) -> DenseMatrix {
        self.u.scale_cols(&self.sigma).matmul_t(&self.v)
    }

    /// Keeps the leading `r` triplets.
    pub fn truncate(mut self, r: usize) -> Self {
        let r = r.min(self.sigma.len());
        self.u = self.u.columns(0, r);
        self.v = self.v.columns(0, r);
        self.sigma.truncate(r);
        self
    }
}

/// Full thin SVD of a small dense matrix.
///
/// Singular values come back in descending order. Each column of `U` is
/// signed so that its largest-magnitude entry is positive (the first one on
/// ties), with the matching column of `V` flipped alongside.
pub fn svd_small(a: &DenseMatrix) -> Result<SvdResult> {
    let (p, q) = a.shape();
    if p == 0 || q == 0 {
        return Err(RpcaError::Dimension(format!("SVD of a {p}x{q} matrix")));
    }
    let mut out = if p >= q {
        let (u, sigma, v) = golub_kahan(a);
        SvdResult { u, sigma, v }
    } else {
        let (v, sigma, u) = golub_kahan(&a.transpose());
        SvdResult { u, sigma, v }
    };
    fix_signs(&mut out);
    Ok(out)
}

fn fix_signs(svd: &mut SvdResult) {
    for k in 0..svd.sigma.len() {
        let mut best = 0.0_f64;
        let mut sign = 1.0;
        for i in 0..svd.u.rows() {
            let x = svd.u[(i, k)];
            if x.abs() > best {
                best = x.abs();
                sign = x.signum();
            }
        }
        if sign < 0.0 {
            for i in 0..svd.u.rows() {
                svd.u[(i, k)] = -svd.u[(i, k)];
            }
            for i in 0..svd.v.rows() {
                svd.v[(i, k)] = -svd.v[(i, k)];
            }
        }
    }
}

/// Rotates columns `j` and `k` of a column-major work array:
/// `(x_j, x_k) <- (cs x_j + sn x_k, -sn x_j + cs x_k)`.
#[inline]
fn rotate(cols: &mut [Vec<f64>], j: usize, k: usize, cs: f64, sn: f64) {
    debug_assert_ne!(j, k);
    let (a, b) = if j < k {
        let (lo, hi) = cols.split_at_mut(k);
        (&mut lo[j], &mut hi[0])
    } else {
        let (lo, hi) = cols.split_at_mut(j);
        (&mut hi[0], &mut lo[k])
    };
    for (x, y) in a.iter_mut().zip(b.iter_mut()) {
        let t = cs * *x + sn * *y;
        *y = -sn * *x + cs * *y;
        *x = t;
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Requires `rows >= cols`. Returns `(U m x n, sigma, V n x n)`.
#[allow(clippy::needless_range_loop)]
fn golub_kahan(input: &DenseMatrix) -> (DenseMatrix, Vec<f64>, DenseMatrix) {
    let (m, n) = input.shape();
    debug_assert!(m >= n);
    let nu = n;

    let mut a: Vec<Vec<f64>> = (0..n).map(|j| input.column(j)).collect();
    let mut s = vec![0.0; n];
    let mut e = vec![0.0; n];
    let mut work = vec![0.0; m];
    let mut u: Vec<Vec<f64>> = vec![vec![0.0; m]; nu];
    let mut v: Vec<Vec<f64>> = vec![vec![0.0; n]; n];

    // Reduce to bidiagonal form, storing the diagonal in s and the
    // super-diagonal in e.
    let nct = (m - 1).min(n);
    let nrt = n.saturating_sub(2).min(m);
    for k in 0..nct.max(nrt) {
        if k < nct {
            s[k] = a[k][k..].iter().fold(0.0_f64, |acc, &x| acc.hypot(x));
            if s[k] != 0.0 {
                if a[k][k] < 0.0 {
                    s[k] = -s[k];
                }
                let sk = s[k];
                a[k][k..].iter_mut().for_each(|x| *x /= sk);
                a[k][k] += 1.0;
            }
            s[k] = -s[k];
        }
        for j in k + 1..n {
            if k < nct && s[k] != 0.0 {
                let (lo, hi) = a.split_at_mut(j);
                let ak = &lo[k];
                let aj = &mut hi[0];
                let t = -dot(&ak[k..], &aj[k..]) / ak[k];
                aj[k..]
                    .iter_mut()
                    .zip(&ak[k..])
                    .for_each(|(x, y)| *x += t * y);
            }
            e[j] = a[j][k];
        }
        if k < nct {
            u[k][k..].copy_from_slice(&a[k][k..]);
        }
        if k < nrt {
            e[k] = e[k + 1..].iter().fold(0.0_f64, |acc, &x| acc.hypot(x));
            if e[k] != 0.0 {
                if e[k + 1] < 0.0 {
                    e[k] = -e[k];
                }
                let ek = e[k];
                e[k + 1..].iter_mut().for_each(|x| *x /= ek);
                e[k + 1] += 1.0;
            }
            e[k] = -e[k];
            if k + 1 < m && e[k] != 0.0 {
                work[k + 1..].iter_mut().for_each(|x| *x = 0.0);
                for j in k + 1..n {
                    let ej = e[j];
                    work[k + 1..]
                        .iter_mut()
                        .zip(&a[j][k + 1..])
                        .for_each(|(w, x)| *w += ej * x);
                }
                for j in k + 1..n {
                    let t = -e[j] / e[k + 1];
                    a[j][k + 1..]
                        .iter_mut()
                        .zip(&work[k + 1..])
                        .for_each(|(x, w)| *x += t * w);
                }
            }
            v[k][k + 1..].copy_from_slice(&e[k + 1..]);
        }
    }

    let mut p = n.min(m + 1);
    if nct < n {
        s[nct] = a[nct][nct];
    }
    if m < p {
        s[p - 1] = 0.0;
    }
    if nrt + 1 < p {
        e[nrt] = a[p - 1][nrt];
    }
    e[p - 1] = 0.0;

    // Accumulate U.
    for j in nct..nu {
        u[j].iter_mut().for_each(|x| *x = 0.0);
        u[j][j] = 1.0;
    }
    for k in (0..nct).rev() {
        if s[k] != 0.0 {
            for j in k + 1..nu {
                let (lo, hi) = u.split_at_mut(j);
                let uk = &lo[k];
                let uj = &mut hi[0];
                let t = -dot(&uk[k..], &uj[k..]) / uk[k];
                uj[k..]
                    .iter_mut()
                    .zip(&uk[k..])
                    .for_each(|(x, y)| *x += t * y);
            }
            u[k][k..].iter_mut().for_each(|x| *x = -*x);
            u[k][k] += 1.0;
            u[k][..k].iter_mut().for_each(|x| *x = 0.0);
        } else {
            u[k].iter_mut().for_each(|x| *x = 0.0);
            u[k][k] = 1.0;
        }
    }

    // Accumulate V.
    for k in (0..n).rev() {
        if k < nrt && e[k] != 0.0 {
            for j in k + 1..nu {
                let (lo, hi) = v.split_at_mut(j);
                let vk = &lo[k];
                let vj = &mut hi[0];
                let t = -dot(&vk[k + 1..], &vj[k + 1..]) / vk[k + 1];
                vj[k + 1..]
                    .iter_mut()
                    .zip(&vk[k + 1..])
                    .for_each(|(x, y)| *x += t * y);
            }
        }
        v[k].iter_mut().for_each(|x| *x = 0.0);
        v[k][k] = 1.0;
    }

    // Implicit-shift QR iterations on the bidiagonal.
    let pp = p - 1;
    let eps = f64::EPSILON;
    let tiny = 2.0_f64.powi(-966);
    let mut sweeps = 0usize;
    let max_sweeps = 75 * n.max(10);
    while p > 0 {
        sweeps += 1;
        if sweeps > max_sweeps {
            log::warn!("bidiagonal QR did not converge after {max_sweeps} sweeps");
            break;
        }
        // kase 1: s[p-1] and e[k-1] negligible, k < p
        // kase 2: s[k] negligible, k < p
        // kase 3: e[k-1] negligible, QR step on s[k..p]
        // kase 4: e[p-2] negligible, converged
        let mut k: isize = p as isize - 2;
        while k >= 0 {
            let ku = k as usize;
            if e[ku].abs() <= tiny + eps * (s[ku].abs() + s[ku + 1].abs()) {
                e[ku] = 0.0;
                break;
            }
            k -= 1;
        }
        let kase;
        if k == p as isize - 2 {
            kase = 4;
        } else {
            let mut ks: isize = p as isize - 1;
            while ks > k {
                let ksu = ks as usize;
                let t = (if ksu != p { e[ksu].abs() } else { 0.0 })
                    + (if ks != k + 1 { e[ksu - 1].abs() } else { 0.0 });
                if s[ksu].abs() <= tiny + eps * t {
                    s[ksu] = 0.0;
                    break;
                }
                ks -= 1;
            }
            if ks == k {
                kase = 3;
            } else if ks == p as isize - 1 {
                kase = 1;
            } else {
                kase = 2;
                k = ks;
            }
        }
        let k = (k + 1) as usize;

        match kase {
            1 => {
                let mut f = e[p - 2];
                e[p - 2] = 0.0;
                for j in (k..=p - 2).rev() {
                    let t = s[j].hypot(f);
                    let cs = s[j] / t;
                    let sn = f / t;
                    s[j] = t;
                    if j != k {
                        f = -sn * e[j - 1];
                        e[j - 1] *= cs;
                    }
                    rotate(&mut v, j, p - 1, cs, sn);
                }
            }
            2 => {
                let mut f = e[k - 1];
                e[k - 1] = 0.0;
                for j in k..p {
                    let t = s[j].hypot(f);
                    let cs = s[j] / t;
                    let sn = f / t;
                    s[j] = t;
                    f = -sn * e[j];
                    e[j] *= cs;
                    rotate(&mut u, j, k - 1, cs, sn);
                }
            }
            3 => {
                let scale = s[p - 1]
                    .abs()
                    .max(s[p - 2].abs())
                    .max(e[p - 2].abs())
                    .max(s[k].abs())
                    .max(e[k].abs());
                let sp = s[p - 1] / scale;
                let spm1 = s[p - 2] / scale;
                let epm1 = e[p - 2] / scale;
                let sk = s[k] / scale;
                let ek = e[k] / scale;
                let b = ((spm1 + sp) * (spm1 - sp) + epm1 * epm1) / 2.0;
                let c = (sp * epm1) * (sp * epm1);
                let mut shift = 0.0;
                if b != 0.0 || c != 0.0 {
                    shift = (b * b + c).sqrt();
                    if b < 0.0 {
                        shift = -shift;
                    }
                    shift = c / (b + shift);
                }
                let mut f = (sk + sp) * (sk - sp) + shift;
                let mut g = sk * ek;

                for j in k..p - 1 {
                    let t = f.hypot(g);
                    let cs = f / t;
                    let sn = g / t;
                    if j != k {
                        e[j - 1] = t;
                    }
                    f = cs * s[j] + sn * e[j];
                    e[j] = cs * e[j] - sn * s[j];
                    g = sn * s[j + 1];
                    s[j + 1] *= cs;
                    rotate(&mut v, j, j + 1, cs, sn);

                    let t = f.hypot(g);
                    let cs = f / t;
                    let sn = g / t;
                    s[j] = t;
                    f = cs * e[j] + sn * s[j + 1];
                    s[j + 1] = -sn * e[j] + cs * s[j + 1];
                    g = sn * e[j + 1];
                    e[j + 1] *= cs;
                    if j < m - 1 {
                        rotate(&mut u, j, j + 1, cs, sn);
                    }
                }
                e[p - 2] = f;
            }
            _ => {
                let mut k = k;
                if s[k] <= 0.0 {
                    s[k] = if s[k] < 0.0 { -s[k] } else { 0.0 };
                    v[k][..=pp].iter_mut().for_each(|x| *x = -*x);
                }
                while k < pp && s[k] < s[k + 1] {
                    s.swap(k, k + 1);
                    v.swap(k, k + 1);
                    u.swap(k, k + 1);
                    k += 1;
                }
                p -= 1;
                sweeps = 0;
            }
        }
    }

    let u_mat = DenseMatrix::from_fn(m, nu, |i, j| u[j][i]);
    let v_mat = DenseMatrix::from_fn(n, n, |i, j| v[j][i]);
    s.truncate(nu);
    (u_mat, s, v_mat)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_factorization(a: &DenseMatrix, svd: &SvdResult) {
        let k = svd.rank();
        assert!(svd.sigma.windows(2).all(|w| w[0] >= w[1]));
        assert!(svd.sigma.iter().all(|&s| s >= 0.0));
        let eye = DenseMatrix::identity(k);
        assert!(svd.u.t_matmul(&svd.u).sub(&eye).max_abs() < 1e-12);
        assert!(svd.v.t_matmul(&svd.v).sub(&eye).max_abs() < 1e-12);
        let err = svd.reconstruct().sub(a).fro_norm();
        assert!(
            err <= 1e-12 * a.fro_norm().max(1e-300),
            "reconstruction error {err}"
        );
    }

    #[test]
    fn diagonal_input() {
        let a = DenseMatrix::from_diag(&[3.0, 1.0]);
        let svd = svd_small(&a).unwrap();
        assert_eq!(svd.sigma, vec![3.0, 1.0]);
        assert_eq!(svd.u, DenseMatrix::identity(2));
        assert_eq!(svd.v, DenseMatrix::identity(2));
    }

    #[test]
    fn antidiagonal_input() {
        let a = DenseMatrix::from_rows(&[[0.0, 2.0], [1.0, 0.0]]);
        let svd = svd_small(&a).unwrap();
        assert!((svd.sigma[0] - 2.0).abs() < 1e-15);
        assert!((svd.sigma[1] - 1.0).abs() < 1e-15);
        check_factorization(&a, &svd);
    }

    #[test]
    fn tight_example_has_equal_singular_values() {
        let r2 = 2.0_f64.sqrt();
        let a = DenseMatrix::from_rows(&[[1.0, r2], [r2, -1.0]]);
        let svd = svd_small(&a).unwrap();
        let r3 = 3.0_f64.sqrt();
        assert!((svd.sigma[0] - r3).abs() < 1e-14);
        assert!((svd.sigma[1] - r3).abs() < 1e-14);
        check_factorization(&a, &svd);
    }

    #[test]
    fn wide_tall_and_degenerate_shapes() {
        let tall = DenseMatrix::from_fn(7, 3, |i, j| ((i * 7 + j * 3) % 5) as f64 - 2.0);
        check_factorization(&tall, &svd_small(&tall).unwrap());
        let wide = tall.transpose();
        check_factorization(&wide, &svd_small(&wide).unwrap());
        let row = DenseMatrix::from_rows(&[[3.0, 4.0]]);
        let svd = svd_small(&row).unwrap();
        assert!((svd.sigma[0] - 5.0).abs() < 1e-15);
        let zero = DenseMatrix::zeros(3, 3);
        let svd = svd_small(&zero).unwrap();
        assert!(svd.sigma.iter().all(|&s| s == 0.0));
        check_factorization(&zero, &svd);
    }

    #[test]
    fn sign_convention_holds() {
        let a = DenseMatrix::from_fn(5, 4, |i, j| ((i + 1) as f64).sin() * ((j + 2) as f64).cos());
        let svd = svd_small(&a.add(&DenseMatrix::eye(5, 4))).unwrap();
        for k in 0..svd.rank() {
            let col = svd.u.column(k);
            let big = col
                .iter()
                .cloned()
                .fold(0.0_f64, |m, x| if x.abs() > m.abs() { x } else { m });
            assert!(big > 0.0);
        }
    }
}
