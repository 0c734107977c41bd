use crate::error::{Result, RpcaError};
use crate::matrix::DenseMatrix;
use crate::numkernel::SvdResult;

/// A rank-`r` matrix held as `U diag(sigma) Vᵀ` with orthonormal `U`, `V`.
///
/// The column spaces of `U` and `V` also define the tangent space used by
/// the accelerated update.
#[derive(Debug, Clone, PartialEq)]
pub struct FactoredLowRank {
    pub u: DenseMatrix,
    pub sigma: Vec<f64>,
    pub v: DenseMatrix,
}

impl FactoredLowRank {
    pub fn new(u: DenseMatrix, sigma: Vec<f64>, v: DenseMatrix) -> Result<Self> {
        if u.cols() != sigma.len() || v.cols() != sigma.len() {
            return Err(RpcaError::Dimension(format!(
                "factors {}x{}, {} values, {}x{}",
                u.rows(),
                u.cols(),
                sigma.len(),
                v.rows(),
                v.cols()
            )));
        }
        Ok(Self { u, sigma, v })
    }

    pub fn rank(&self) -> usize {
        self.sigma.len()
    }

    pub fn rows(&self) -> usize {
        self.u.rows()
    }

    pub fn cols(&self) -> usize {
        self.v.rows()
    }

    pub fn to_dense(&self) -> DenseMatrix {
        self.u.scale_cols(&self.sigma).matmul_t(&self.v)
    }

    /// Largest deviation of `UᵀU` and `VᵀV` from the identity.
    pub fn orthonormality_defect(&self) -> f64 {
        let eye = DenseMatrix::identity(self.rank());
        let du = self.u.t_matmul(&self.u).sub(&eye).max_abs();
        let dv = self.v.t_matmul(&self.v).sub(&eye).max_abs();
        du.max(dv)
    }
}

impl From<SvdResult> for FactoredLowRank {
    fn from(svd: SvdResult) -> Self {
        Self {
            u: svd.u,
            sigma: svd.sigma,
            v: svd.v,
        }
    }
}
