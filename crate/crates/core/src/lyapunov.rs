//! Steady-state covariance from A V + V Aᵀ = −D.

use nalgebra::{DMatrix, DVector, SMatrix};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::stability::spectral_abscissa;
use crate::Mat8;

const DIM: usize = 8;
const UNKNOWNS: usize = DIM * (DIM + 1) / 2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CovarianceMatrix(pub Mat8);

impl CovarianceMatrix {
    pub fn matrix(&self) -> &Mat8 {
        &self.0
    }

    /// ‖A V + V Aᵀ + D‖_F.
    pub fn lyapunov_residual(&self, a: &Mat8, d: &Mat8) -> f64 {
        (a * self.0 + self.0 * a.transpose() + d).norm()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.0.symmetric_eigenvalues().min()
    }

    /// Smallest eigenvalue of V + (i/2)Ω. Non-negative for a state that
    /// obeys the uncertainty relation.
    pub fn uncertainty_min_eigenvalue(&self) -> f64 {
        // Hermitian V + iW maps to the real symmetric [[V, −W], [W, V]],
        // which has the same spectrum with doubled multiplicity.
        let mut w = Mat8::zeros();
        for k in 0..DIM / 2 {
            w[(2 * k, 2 * k + 1)] = 0.5;
            w[(2 * k + 1, 2 * k)] = -0.5;
        }
        let mut big = SMatrix::<f64, 16, 16>::zeros();
        big.fixed_view_mut::<8, 8>(0, 0).copy_from(&self.0);
        big.fixed_view_mut::<8, 8>(8, 8).copy_from(&self.0);
        big.fixed_view_mut::<8, 8>(0, 8).copy_from(&(-w));
        big.fixed_view_mut::<8, 8>(8, 0).copy_from(&w);
        big.symmetric_eigenvalues().min()
    }
}

fn packed_index(i: usize, j: usize) -> usize {
    let (r, c) = if i <= j { (i, j) } else { (j, i) };
    r * DIM - r * (r + 1) / 2 + c
}

/// Direct solve over the 36 independent entries of the symmetric V.
pub fn solve_lyapunov(a: &Mat8, d: &Mat8) -> Result<CovarianceMatrix> {
    let margin = spectral_abscissa(a)?;
    if !(margin < 0.0) {
        return Err(Error::Unstable { margin });
    }
    let scale = d.norm().max(f64::MIN_POSITIVE);
    if (d - d.transpose()).norm() > 1e-12 * scale {
        return Err(Error::invalid("diffusion matrix is not symmetric"));
    }

    // Row (i, j), i ≤ j:  Σ_k A_ik V_kj + Σ_k A_jk V_ik = −D_ij.
    let mut lhs = DMatrix::<f64>::zeros(UNKNOWNS, UNKNOWNS);
    let mut rhs = DVector::<f64>::zeros(UNKNOWNS);
    for i in 0..DIM {
        for j in i..DIM {
            let row = packed_index(i, j);
            rhs[row] = -d[(i, j)];
            for k in 0..DIM {
                lhs[(row, packed_index(k, j))] += a[(i, k)];
                lhs[(row, packed_index(i, k))] += a[(j, k)];
            }
        }
    }
    let sol = lhs
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::NumericalFailure("singular Lyapunov system".into()))?;
    if sol.iter().any(|v| !v.is_finite()) {
        return Err(Error::NumericalFailure(
            "non-finite Lyapunov solution".into(),
        ));
    }
    let v = Mat8::from_fn(|i, j| sol[packed_index(i, j)]);
    Ok(CovarianceMatrix((v + v.transpose()) * 0.5))
}

/// Settling threshold on ‖dV/dt‖_F for [`integrate_moments`].
pub const SETTLE_RATE: f64 = 1e-10;

/// Integrates dV/dt = A V + V Aᵀ + D from V(0) = 0 with classical RK4 until
/// ‖dV/dt‖_F drops below [`SETTLE_RATE`] or `t_end` is reached.
pub fn integrate_moments(a: &Mat8, d: &Mat8, t_end: f64, dt: f64) -> Result<CovarianceMatrix> {
    if !(dt > 0.0) || !(t_end > 0.0) {
        return Err(Error::invalid("dt and t_end must be positive"));
    }
    let margin = spectral_abscissa(a)?;
    if margin != 0.0 && dt >= 0.1 / margin.abs() {
        return Err(Error::invalid(format!(
            "dt = {dt:e} too coarse for spectral abscissa {margin:e}"
        )));
    }
    let at = a.transpose();
    let flow = |v: &Mat8| a * v + v * at + d;
    let mut v = Mat8::zeros();
    let mut t = 0.0;
    loop {
        let rate = flow(&v).norm();
        if rate < SETTLE_RATE {
            return Ok(CovarianceMatrix((v + v.transpose()) * 0.5));
        }
        if t >= t_end || !rate.is_finite() {
            return Err(Error::Timeout {
                t,
                rate,
                last: Box::new(v),
            });
        }
        let k1 = flow(&v);
        let k2 = flow(&(v + k1 * (dt / 2.0)));
        let k3 = flow(&(v + k2 * (dt / 2.0)));
        let k4 = flow(&(v + k3 * dt));
        v += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
        t += dt;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn half_damped_identity() {
        let a = -Mat8::identity() * 0.5;
        let d = Mat8::identity();
        let v = solve_lyapunov(&a, &d).unwrap();
        assert_relative_eq!(v.0, Mat8::identity(), epsilon = 1e-14);
        let w = integrate_moments(&a, &d, 200.0, 0.01).unwrap();
        assert_relative_eq!(w.0, Mat8::identity(), epsilon = 1e-9);
    }

    #[test]
    fn unstable_drift_is_rejected() {
        let a = Mat8::identity() * 0.1;
        assert!(matches!(
            solve_lyapunov(&a, &Mat8::identity()),
            Err(Error::Unstable { .. })
        ));
        match integrate_moments(&a, &Mat8::identity(), 50.0, 0.01) {
            Err(Error::Timeout { last, .. }) => assert!(last[(0, 0)] > 1.0),
            other => panic!("expected timeout, got {other:?}"),
        }
    }

    #[test]
    fn asymmetric_diffusion_is_rejected() {
        let mut d = Mat8::identity();
        d[(0, 1)] = 0.3;
        assert!(solve_lyapunov(&(-Mat8::identity()), &d).is_err());
    }

    #[test]
    fn vacuum_obeys_uncertainty_with_equality() {
        let v = CovarianceMatrix(Mat8::identity() * 0.5);
        assert_relative_eq!(v.uncertainty_min_eigenvalue(), 0.0, epsilon = 1e-15);
        let squeezed = CovarianceMatrix(Mat8::identity() * 0.3);
        assert!(squeezed.uncertainty_min_eigenvalue() < 0.0);
    }

    #[test]
    fn packed_indices_cover_upper_triangle() {
        let mut seen = vec![false; UNKNOWNS];
        for i in 0..DIM {
            for j in i..DIM {
                let k = packed_index(i, j);
                assert!(!seen[k]);
                seen[k] = true;
                assert_eq!(k, packed_index(j, i));
            }
        }
        assert!(seen.into_iter().all(|s| s));
    }
}
