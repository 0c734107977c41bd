use crate::matrix::DenseMatrix;

/// `ζ = β (σ_{r+1} + γ^{k+1} σ₁)` over the singular values of the projected
/// residual. Missing values count as zero.
pub fn threshold_value(sigma_window: &[f64], r: usize, beta: f64, gamma: f64, k: usize) -> f64 {
    let sigma_1 = sigma_window.first().copied().unwrap_or(0.0);
    let sigma_r1 = sigma_window.get(r).copied().unwrap_or(0.0);
    beta * (sigma_r1 + gamma.powi(k as i32 + 1) * sigma_1)
}

/// Keeps entries with `|z| > zeta` and zeroes the rest, boundary included.
pub fn hard_threshold(z: &DenseMatrix, zeta: f64) -> DenseMatrix {
    z.map(|x| if x.abs() > zeta { x } else { 0.0 })
}

/// Hard thresholds `z` and also returns the Frobenius norm of what was
/// discarded, i.e. `‖z − T_ζ(z)‖_F`, and the support size.
pub(crate) fn hard_threshold_with_residual(
    z: &DenseMatrix,
    zeta: f64,
) -> (DenseMatrix, f64, usize) {
    let mut out = z.clone();
    let mut dropped = 0.0;
    let mut support = 0;
    for x in out.as_mut_slice() {
        if x.abs() > zeta {
            support += 1;
        } else {
            dropped += *x * *x;
            *x = 0.0;
        }
    }
    (out, dropped.sqrt(), support)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_arithmetic() {
        let window = [10.0, 3.0, 1.0, 0.5];
        assert!((threshold_value(&window, 2, 0.1, 0.5, 0) - 0.6).abs() < 1e-15);
        assert_eq!(threshold_value(&window, 2, 0.1, 0.0, 4), 0.1 * 1.0);
        let exact = [10.0, 3.0, 0.0, 0.0];
        assert!((threshold_value(&exact, 2, 0.2, 0.5, 2) - 0.2 * 0.125 * 10.0).abs() < 1e-15);
        // window shorter than r + 1 pads with zero
        assert_eq!(threshold_value(&[4.0], 1, 1.0, 0.5, 0), 2.0);
    }

    #[test]
    fn thresholding_cases() {
        let z = DenseMatrix::from_rows(&[[1.0, -3.0], [0.5, 2.0]]);
        assert_eq!(
            hard_threshold(&z, 1.0),
            DenseMatrix::from_rows(&[[0.0, -3.0], [0.0, 2.0]])
        );
        assert_eq!(hard_threshold(&z, 3.0), DenseMatrix::zeros(2, 2));
        assert_eq!(hard_threshold(&z, 0.0), z);
        let (kept, dropped, support) = hard_threshold_with_residual(&z, 1.0);
        assert_eq!(kept, hard_threshold(&z, 1.0));
        assert_eq!(support, 2);
        assert!((dropped - 1.25_f64.sqrt()).abs() < 1e-15);
    }
}
