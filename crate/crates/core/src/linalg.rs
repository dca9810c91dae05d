//! Dense direct solves with a 1-norm condition estimate.

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

/// Condition estimates above this trigger a warning.
pub const COND_WARN: f64 = 1e12;

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub x: DVector<f64>,
    /// ‖Ax − b‖ / ‖b‖ (absolute residual when b = 0)
    pub residual: f64,
    pub cond_est: f64,
    pub warning: Option<String>,
}

/// LU with partial pivoting plus Hager's estimate of κ₁(A).
pub fn solve_dense(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<SolveReport> {
    let n = a.nrows();
    if a.ncols() != n || b.len() != n {
        return Err(Error::Quadrature(format!("system shape {}x{} with rhs {}", n, a.ncols(), b.len())));
    }
    let lu = a.clone().lu();
    let x = lu.solve(b).ok_or(Error::SingularSystem(f64::INFINITY))?;
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::SingularSystem(f64::INFINITY));
    }
    let lut = a.transpose().lu();
    let inv_norm = hager(n, |v| lu.solve(v), |v| lut.solve(v));
    let cond_est = a.column_iter().map(|c| c.lp_norm(1)).fold(0.0, f64::max) * inv_norm;
    let r = a * &x - b;
    let bn = b.norm();
    let residual = if bn > 0.0 { r.norm() / bn } else { r.norm() };
    let warning = (cond_est > COND_WARN).then(|| format!("ill-conditioned system, condition estimate {cond_est:e}"));
    Ok(SolveReport { x, residual, cond_est, warning })
}

fn hager(
    n: usize,
    solve: impl Fn(&DVector<f64>) -> Option<DVector<f64>>,
    solve_t: impl Fn(&DVector<f64>) -> Option<DVector<f64>>,
) -> f64 {
    let mut x = DVector::from_element(n, 1.0 / n as f64);
    let mut est = 0.0;
    for _ in 0..5 {
        let Some(y) = solve(&x) else { return f64::INFINITY };
        est = y.lp_norm(1);
        let xi = y.map(|v| if v >= 0.0 { 1.0 } else { -1.0 });
        let Some(z) = solve_t(&xi) else { return f64::INFINITY };
        let (j, zmax) = z.iter().enumerate().fold((0, 0.0), |acc, (i, v)| if v.abs() > acc.1 { (i, v.abs()) } else { acc });
        if zmax <= z.dot(&x) {
            break;
        }
        x = DVector::zeros(n);
        x[j] = 1.0;
    }
    est
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn solves_and_estimates() {
        let a = DMatrix::from_row_slice(3, 3, &[4.0, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 2.0]);
        let b = DVector::from_vec(vec![1.0, 2.0, 3.0]);
        let r = solve_dense(&a, &b).unwrap();
        assert!(r.residual < 1e-15);
        let inv = a.clone().try_inverse().unwrap();
        let exact = a.column_iter().map(|c| c.lp_norm(1)).fold(0.0, f64::max)
            * inv.column_iter().map(|c| c.lp_norm(1)).fold(0.0, f64::max);
        assert_abs_diff_eq!(r.cond_est, exact, epsilon = 1e-12 * exact);
        assert!(r.warning.is_none());
    }

    #[test]
    fn singular_and_ill_conditioned() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        let b = DVector::from_vec(vec![1.0, 1.0]);
        assert!(matches!(solve_dense(&a, &b), Err(Error::SingularSystem(_))));
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0 + 1e-14]);
        let r = solve_dense(&a, &b).unwrap();
        assert!(r.warning.is_some());
        let bad = DVector::from_vec(vec![1.0]);
        assert!(solve_dense(&a, &bad).is_err());
    }
}
