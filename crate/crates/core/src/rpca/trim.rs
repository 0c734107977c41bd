use super::FactoredLowRank;
use crate::error::Result;
use crate::matrix::DenseMatrix;
use crate::numkernel::{svd_small, thin_qr};

/// Row-rescaled factors `A diag(sigma) Bᵀ` before re-orthonormalization.
#[derive(Debug, Clone)]
pub struct TrimmedFactors {
    pub a: DenseMatrix,
    pub sigma: Vec<f64>,
    pub b: DenseMatrix,
    /// Row budget applied to `A`: `√(μr/m)`.
    pub budget_rows: f64,
    /// Row budget applied to `B`: `√(μr/n)`.
    pub budget_cols: f64,
    /// Whether any row was actually shrunk.
    pub changed: bool,
}

/// Scales every row of `U` to norm at most `√(μr/m)` and every row of `V`
/// to norm at most `√(μr/n)`.
pub fn trim_rows(low_rank: &FactoredLowRank, mu: f64) -> TrimmedFactors {
    let r = low_rank.rank() as f64;
    let budget_rows = (mu * r / low_rank.rows() as f64).sqrt();
    let budget_cols = (mu * r / low_rank.cols() as f64).sqrt();
    let (a, changed_a) = clip_rows(&low_rank.u, budget_rows);
    let (b, changed_b) = clip_rows(&low_rank.v, budget_cols);
    TrimmedFactors {
        a,
        sigma: low_rank.sigma.clone(),
        b,
        budget_rows,
        budget_cols,
        changed: changed_a || changed_b,
    }
}

fn clip_rows(factor: &DenseMatrix, budget: f64) -> (DenseMatrix, bool) {
    let mut out = factor.clone();
    let mut changed = false;
    for (i, norm) in factor.row_norms().into_iter().enumerate() {
        if norm <= budget {
            continue;
        }
        changed = true;
        // Step the scale down past rounding so the stored row meets the budget.
        let mut scale = budget / norm;
        loop {
            let row = out.row_mut(i);
            for (dst, &src) in row.iter_mut().zip(factor.row(i)) {
                *dst = src * scale;
            }
            if row.iter().map(|v| v * v).sum::<f64>().sqrt() <= budget {
                break;
            }
            scale = scale.next_down();
        }
    }
    (out, changed)
}

/// Trims `low_rank` to incoherence level `mu` and re-factors the result so
/// its factors are orthonormal again.
///
/// Returns the input unchanged when no row exceeds its budget.
pub fn trim(low_rank: &FactoredLowRank, mu: f64) -> Result<FactoredLowRank> {
    let trimmed = trim_rows(low_rank, mu);
    if !trimmed.changed {
        return Ok(low_rank.clone());
    }
    refactor(&trimmed)
}

/// SVD of `A diag(sigma) Bᵀ` through thin QRs of both factors and an
/// `r x r` SVD.
pub fn refactor(t: &TrimmedFactors) -> Result<FactoredLowRank> {
    let qa = thin_qr(&t.a)?;
    let qb = thin_qr(&t.b)?;
    let core = qa.r.scale_cols(&t.sigma).matmul_t(&qb.r);
    let svd = svd_small(&core)?;
    FactoredLowRank::new(qa.q.matmul(&svd.u), svd.sigma, qb.q.matmul(&svd.v))
}
