use crate::sparse::CsrMatrix;

use super::AssemblyError;

/// Above this dimension the smallest eigenvalue is estimated iteratively.
pub const DENSE_EIGEN_LIMIT: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoercivityReport {
    pub lambda_min: f64,
    /// Spectral norm (dense) or ∞-norm bound (iterative).
    pub norm: f64,
    pub asymmetry: f64,
    /// λ_min ≥ -1e-10 ‖A‖
    pub accepted: bool,
    pub dense: bool,
}

/// Smallest eigenvalue of the symmetric matrix `a`. Asymmetry beyond
/// 1e-12 ‖A‖_max is an error; a negative λ_min is only reported.
pub fn check_coercivity(a: &CsrMatrix) -> Result<CoercivityReport, AssemblyError> {
    let max = a.max_abs();
    let asymmetry = a.asymmetry();
    let threshold = 1e-12 * max;
    if asymmetry > threshold {
        return Err(AssemblyError::Asymmetric { residual: asymmetry, threshold });
    }
    let (lambda_min, norm, dense) = if a.nrows <= DENSE_EIGEN_LIMIT {
        let eig = a.to_dense().symmetric_eigen();
        let lo = eig.eigenvalues.min();
        let hi = eig.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        (lo, hi, true)
    } else {
        let (lo, bound) = shifted_power_iteration(a);
        (lo, bound, false)
    };
    Ok(CoercivityReport {
        lambda_min,
        norm,
        asymmetry,
        accepted: lambda_min >= -1e-10 * norm,
        dense,
    })
}

/// Power iteration on σI - A with σ a Gershgorin bound, so the dominant
/// eigenvalue is σ - λ_min.
fn shifted_power_iteration(a: &CsrMatrix) -> (f64, f64) {
    let n = a.nrows;
    let sigma = (0..n).map(|r| a.row(r).map(|(_, v)| v.abs()).sum::<f64>()).fold(0.0, f64::max);
    // Deterministic start vector with components of mixed sign.
    let mut x: Vec<f64> = (0..n).map(|i| ((i as f64 + 1.0) * 0.618_033_988_75).fract() - 0.5).collect();
    let normalize = |x: &mut Vec<f64>| {
        let s = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        x.iter_mut().for_each(|v| *v /= s);
    };
    normalize(&mut x);
    let mut mu = 0.0;
    for _ in 0..20_000 {
        let ax = a.matvec(&x);
        let mut y: Vec<f64> = x.iter().zip(&ax).map(|(xi, ai)| sigma * xi - ai).collect();
        let next: f64 = y.iter().zip(&x).map(|(a, b)| a * b).sum();
        normalize(&mut y);
        x = y;
        if (next - mu).abs() <= 1e-12 * sigma.max(1e-300) {
            mu = next;
            break;
        }
        mu = next;
    }
    (sigma - mu, sigma)
}
