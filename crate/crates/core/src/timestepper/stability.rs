use crate::sparse::CsrMatrix;

use super::{LinearSolver, TimeError};

/// Estimate of the largest eigenvalue of M⁻¹A and the step limit 2/√λ of
/// the undamped explicit scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityEstimate {
    pub lambda_max: f64,
    pub step_limit: f64,
    pub iterations: usize,
}

/// Power iteration for λ_max(M⁻¹A), with M symmetric positive definite and
/// A symmetric positive semidefinite. Stops when the Rayleigh quotient
/// changes by less than `tol` relative, or after `max_iter` iterations.
pub fn stability_limit(m: &CsrMatrix, a: &CsrMatrix, tol: f64, max_iter: usize) -> Result<StabilityEstimate, TimeError> {
    let n = m.nrows;
    if a.nrows != n {
        return Err(TimeError::Dimension(format!("mass is {n}, stiffness is {}", a.nrows)));
    }
    let solver = LinearSolver::new(m.clone(), m)?;
    let mut x: Vec<f64> = (0..n).map(|i| ((i as f64 + 1.0) * 0.754_877_666).fract() - 0.5).collect();
    let mut y = vec![0.0; n];
    let mut lambda = 0.0;
    let mut iterations = 0;
    for it in 1..=max_iter.max(1) {
        iterations = it;
        let ax = a.matvec(&x);
        solver.solve(&ax, &mut y)?;
        // Rayleigh quotient xᵀAx / xᵀMx of the current iterate.
        let next = x.iter().zip(&ax).map(|(p, q)| p * q).sum::<f64>() / m.bilinear(&x, &x);
        let scale = m.bilinear(&y, &y).sqrt();
        if !(scale > 0.0) {
            break;
        }
        x.iter_mut().zip(&y).for_each(|(p, q)| *p = q / scale);
        let done = (next - lambda).abs() <= tol * next.abs();
        lambda = next;
        if done {
            break;
        }
    }
    Ok(StabilityEstimate { lambda_max: lambda, step_limit: 2.0 / lambda.sqrt(), iterations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;
    use rand::{Rng, SeedableRng};

    #[test]
    fn matches_dense_generalized_eigenvalue() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(9);
        let n = 25;
        let b = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
        let md = &b * b.transpose() + DMatrix::identity(n, n) * 2.0;
        let c = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
        let ad = &c * c.transpose();
        let est = stability_limit(&CsrMatrix::from_dense(&md), &CsrMatrix::from_dense(&ad), 1e-12, 100_000).unwrap();
        let l = md.clone().cholesky().unwrap().l();
        let li = l.try_inverse().unwrap();
        let sym = &li * &ad * li.transpose();
        let exact = sym.symmetric_eigen().eigenvalues.max();
        assert!((est.lambda_max - exact).abs() < 1e-6 * exact, "{} vs {exact}", est.lambda_max);
        assert!((est.step_limit - 2.0 / exact.sqrt()).abs() < 1e-6 * est.step_limit);
    }

    #[test]
    fn zero_stiffness() {
        let m = CsrMatrix::from_triplets(2, 2, vec![(0, 0, 1.0), (1, 1, 2.0)]);
        let est = stability_limit(&m, &CsrMatrix::zeros(2, 2), 1e-10, 10).unwrap();
        assert_eq!(est.lambda_max, 0.0);
        assert!(est.step_limit.is_infinite());
    }
}
